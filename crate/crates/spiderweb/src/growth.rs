//! The ladder `R_n = M^n(R)` and the growth exponents
//! `eps_n = max_{R_n <= r <= R_{n+1}} log log M(r) / log r`.
//!
//! Rungs are stored as enclosures of `log R_n`. Once a rung is wider than one
//! unit in log (so `R_n` is only known up to a factor `e`) the ladder keeps
//! going on midpoints in level-index form, and nothing past that rung is
//! certified.

use crate::entire::{delta_enclosure, Delta, EntireError, EntireFunction, FamilyKind};
use crate::xnum::{to_decimal, Dir, Enclosure, ExtReal, LevelReal, Verdict, XnumError};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("M(R) > R is not decisive at the base radius")]
    BaseNotExpanding,
    #[error("precision lost at rung {0}")]
    PrecisionLost(usize),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Entire(#[from] EntireError),
    #[error(transparent)]
    Xnum(#[from] XnumError),
}

/// `log R_n`.
#[derive(Clone, Debug, PartialEq)]
pub enum Rung {
    Certified(Enclosure),
    /// Midpoint estimate after certification was lost.
    Degraded(LevelReal),
}

impl Rung {
    pub fn certified(&self) -> Option<&Enclosure> {
        match self {
            Rung::Certified(e) => Some(e),
            Rung::Degraded(_) => None,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Rung::Certified(e) => to_decimal(&e.mid()),
            Rung::Degraded(l) => l.to_text(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsNumeric {
    /// `lo` comes from the witness, `hi` from the branch-and-bound cover.
    pub value: Enclosure,
    pub witness_u: ExtReal,
    /// The cover closed within the relative tolerance.
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsEntry {
    pub n: usize,
    pub numeric: Option<EpsNumeric>,
    pub certified_hi: Option<ExtReal>,
}

impl EpsEntry {
    /// Best known upper bound.
    pub fn upper(&self) -> Option<ExtReal> {
        let a = self.numeric.as_ref().map(|e| e.value.hi().clone());
        match (a, self.certified_hi.clone()) {
            (Some(x), Some(y)) => Some(x.lesser(&y)),
            (x, y) => x.or(y),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthTable {
    pub log_r0: Enclosure,
    pub rungs: Vec<Rung>,
    pub eps: Vec<EpsEntry>,
    pub horizon: usize,
    /// First rung that is not certified.
    pub degraded_at: Option<usize>,
    pub partial_sum: Option<PartialSum>,
}

impl GrowthTable {
    pub fn rung(&self, n: usize) -> Result<&Enclosure, GrowthError> {
        self.rungs.get(n).and_then(Rung::certified).ok_or(GrowthError::PrecisionLost(n))
    }

    pub fn certified_len(&self) -> usize {
        self.degraded_at.unwrap_or(self.rungs.len())
    }

    pub fn eps_entry(&self, n: usize) -> Option<&EpsEntry> {
        self.eps.iter().find(|e| e.n == n)
    }
}

/// Absolute width above which a rung counts as degraded, unless its relative
/// width is below [`certification_rel_width`].
pub fn certification_width() -> ExtReal {
    ExtReal::one()
}

pub fn certification_rel_width() -> f64 {
    1e-6
}

/// A log-enclosure still counts as certified: width at most 1 or relative width at most 1e-6.
pub fn certified_width(e: &Enclosure) -> bool {
    e.width() <= certification_width() || e.rel_width() <= certification_rel_width()
}

/// Builds rungs `0..=horizon` from `R = e^log_r0`.
pub fn build_ladder(f: &EntireFunction, log_r0: &Enclosure, horizon: usize) -> Result<GrowthTable, GrowthError> {
    let first = f.log_max_modulus(log_r0)?;
    if first.gt(log_r0) != Verdict::Verified {
        return Err(GrowthError::BaseNotExpanding);
    }
    let mut rungs = vec![Rung::Certified(log_r0.clone())];
    let mut degraded_at = None;
    let mut mid: Option<ExtReal> = None;
    for n in 1..=horizon {
        if degraded_at.is_none() {
            let prev = rungs[n - 1].certified().expect("certified prefix");
            match f.log_max_modulus(prev) {
                Ok(next) if certified_width(&next) => {
                    rungs.push(Rung::Certified(next));
                    continue;
                }
                Ok(next) => mid = Some(next.mid()),
                Err(_) => mid = Some(prev.mid()),
            }
            degraded_at = Some(n);
            if let Some(m) = &mid {
                if let Ok(l) = LevelReal::promote(&m.greater(&ExtReal::one())) {
                    rungs.push(Rung::Degraded(l));
                    continue;
                }
            }
            break;
        }
        let m = mid.take().expect("midpoint");
        match f.log_max_modulus(&Enclosure::point(m)) {
            Ok(next) => {
                let c = next.mid();
                match LevelReal::promote(&c.greater(&ExtReal::one())) {
                    Ok(l) => rungs.push(Rung::Degraded(l)),
                    Err(_) => break,
                }
                mid = Some(c);
            }
            Err(_) => break,
        }
    }
    Ok(GrowthTable { log_r0: log_r0.clone(), rungs, eps: Vec::new(), horizon, degraded_at, partial_sum: None })
}

/// Enclosure of `ln(log M(u)) / u` at a point `u > 0`.
fn maximand(f: &EntireFunction, u: &ExtReal) -> Result<Enclosure, GrowthError> {
    let l = f.log_max_modulus(&Enclosure::point(u.clone()))?;
    Ok(l.ln()?.div(&Enclosure::point(u.clone()))?)
}

#[derive(Clone)]
struct Cell {
    x: ExtReal,
    y: ExtReal,
    bound: ExtReal,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.bound == o.bound
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.bound.cmp(&o.bound)
    }
}

/// Upper bound of the maximand over `[x, y]`, `0 < x <= y`.
fn cell_bound(f: &EntireFunction, x: &ExtReal, y: &ExtReal) -> Result<ExtReal, GrowthError> {
    let lx = f.log_max_modulus(&Enclosure::point(x.clone()))?;
    let ly = f.log_max_modulus(&Enclosure::point(y.clone()))?;
    // decreasing on the cell when u L'(u) < L(u) ln L(u) throughout
    let dl = f.dlog_max_modulus_hi(y)?;
    let lhs = y.mul_dir(&dl, Dir::Up);
    let ln_lx = Enclosure::point(lx.lo().clone()).ln()?;
    let rhs = lx.lo().mul_dir(ln_lx.lo(), Dir::Down);
    if lhs < rhs {
        return Ok(lx.ln()?.div(&Enclosure::point(x.clone()))?.hi().clone());
    }
    let top = Enclosure::point(ly.hi().clone()).ln()?;
    Ok(top.div(&Enclosure::point(x.clone()))?.hi().clone())
}

fn split(x: &ExtReal, y: &ExtReal) -> ExtReal {
    let two = ExtReal::from_f64(2.0);
    if y.div_dir(x, Dir::Down) > two {
        // geometric midpoint
        let lx = x.ln_abs_f64();
        let ly = y.ln_abs_f64();
        let m = ExtReal::from_f64(((lx + ly) / 2.0).exp());
        if x.to_f64_exact().is_some() && y.to_f64_exact().is_some() && &m > x && &m < y {
            return m;
        }
        let e = (x.exponent() + y.exponent()) / 2;
        let m = ExtReal::scaled(1.0, e);
        if &m > x && &m < y {
            return m;
        }
    }
    x.add_dir(y, Dir::Down).mul_pow2(-1)
}

pub const CSV_HEADER: [&str; 6] = ["n", "log_Rn", "eps_lo", "eps_hi", "eps_certified_hi", "cumulative_sum_hi"];

/// Settings for [`eps_numeric`].
#[derive(Clone, Copy, Debug)]
pub struct EpsSettings {
    pub grid_density: usize,
    pub rel_tol: f64,
    pub cell_budget: usize,
}

impl Default for EpsSettings {
    fn default() -> Self {
        EpsSettings { grid_density: 16, rel_tol: 1e-9, cell_budget: 6000 }
    }
}

/// Encloses `eps_n`. The lower end is a checked value at a witness inside the
/// rung interval, the upper end a certified cover of the widest possible
/// interval.
pub fn eps_numeric(f: &EntireFunction, table: &GrowthTable, n: usize, s: EpsSettings) -> Result<EpsNumeric, GrowthError> {
    let a = table.rung(n)?;
    let b = table.rung(n + 1)?;
    if !a.lo().is_positive() {
        return Err(GrowthError::NotApplicable("eps needs R_n > 1".into()));
    }
    let (in_lo, in_hi) = (a.hi().clone(), b.lo().clone());
    let (out_lo, out_hi) = (a.lo().clone(), b.hi().clone());

    // witnesses: a grid between knots, then golden-section around the best
    let mut knots = vec![in_lo.clone()];
    for z in f.zeros() {
        if z.log_a > in_lo && z.log_a < in_hi {
            knots.push(z.log_a.clone());
        }
    }
    knots.push(in_hi.clone());
    let mut best_u = in_lo.clone();
    let mut best = maximand(f, &in_lo)?.lo().clone();
    let consider = |u: ExtReal, best: &mut ExtReal, best_u: &mut ExtReal| -> Result<(), GrowthError> {
        if u < in_lo || u > in_hi {
            return Ok(());
        }
        let v = maximand(f, &u)?.lo().clone();
        if v > *best {
            *best = v;
            *best_u = u;
        }
        Ok(())
    };
    for w in knots.windows(2) {
        let (x, y) = (&w[0], &w[1]);
        let lx = x.ln_abs_f64();
        let ly = y.ln_abs_f64();
        for i in 0..=s.grid_density {
            let t = i as f64 / s.grid_density as f64;
            let u = if x.to_f64_exact().is_some() && y.to_f64_exact().is_some() {
                ExtReal::from_f64((lx + t * (ly - lx)).exp())
            } else {
                x.add_dir(&y.sub_dir(x, Dir::Down).mul_dir(&ExtReal::from_f64(t), Dir::Down), Dir::Down)
            };
            consider(u, &mut best, &mut best_u)?;
        }
        // just above a knot the factor 2p log 2 has switched on
        consider(x.add_dir(&x.abs().mul_pow2(-30), Dir::Up), &mut best, &mut best_u)?;
    }
    if let (Some(lo), Some(hi)) = (in_lo.to_f64_exact(), in_hi.to_f64_exact()) {
        let c = best_u.to_f64();
        let span = (hi - lo) / (s.grid_density.max(1) as f64);
        let (mut p, mut q) = ((c - span).max(lo), (c + span).min(hi));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..60 {
            let m1 = q - g * (q - p);
            let m2 = p + g * (q - p);
            let v1 = maximand(f, &ExtReal::from_f64(m1))?.mid().to_f64();
            let v2 = maximand(f, &ExtReal::from_f64(m2))?.mid().to_f64();
            if v1 < v2 {
                p = m1;
            } else {
                q = m2;
            }
        }
        consider(ExtReal::from_f64((p + q) / 2.0), &mut best, &mut best_u)?;
    }

    // certified cover
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Cell>, x: ExtReal, y: ExtReal| -> Result<(), GrowthError> {
        let bound = cell_bound(f, &x, &y)?;
        heap.push(Cell { x, y, bound });
        Ok(())
    };
    push(&mut heap, out_lo, out_hi)?;
    let mut converged = false;
    let mut cells = 0usize;
    let tol = ExtReal::from_f64(s.rel_tol);
    while let Some(top) = heap.peek() {
        let slack = best.abs().mul_dir(&tol, Dir::Down);
        if top.bound <= best.add_dir(&slack, Dir::Down) {
            converged = true;
            break;
        }
        if cells >= s.cell_budget {
            break;
        }
        let top = heap.pop().expect("nonempty");
        let m = split(&top.x, &top.y);
        if m <= top.x || m >= top.y {
            // cannot split further; keep the cell
            heap.push(top);
            break;
        }
        consider(m.clone(), &mut best, &mut best_u)?;
        push(&mut heap, top.x.clone(), m.clone())?;
        push(&mut heap, m, top.y.clone())?;
        cells += 2;
    }
    let hi = heap.peek().map(|c| c.bound.clone()).unwrap_or_else(|| best.clone()).greater(&best);
    Ok(EpsNumeric { value: Enclosure::new(best, hi), witness_u: best_u, converged })
}

/// Rung index `n` with `a_k` in `[R_n, R_{n+1})`, as all indices consistent
/// with the rung enclosures.
pub fn rung_of(table: &GrowthTable, log_a: &ExtReal) -> Vec<usize> {
    let len = table.certified_len();
    let mut out = Vec::new();
    for n in 0..len.saturating_sub(1) {
        let a = table.rungs[n].certified().expect("certified");
        let b = table.rungs[n + 1].certified().expect("certified");
        // possible iff a.lo <= log_a and log_a < b.hi
        if a.lo() <= log_a && log_a < b.hi() {
            out.push(n);
        }
    }
    out
}

/// The analytic upper bound for `eps_n` on a constructed function: the zero
/// rung gets `delta_k + c_n`, the `m`-th rung after it `delta_k / 3^(m-1) + c_n`
/// with `c_n = 2 ln(log R_n) / log R_n`. For `n >= 4` this is below the
/// familiar `2^-n`; for `n <= 3` that simpler term is too small. Ambiguous
/// rung positions are resolved by taking the largest bound over all
/// consistent assignments.
pub fn eps_certified_hi(f: &EntireFunction, table: &GrowthTable, n: usize) -> Result<ExtReal, GrowthError> {
    if f.kind() != FamilyKind::FullFamily || f.zeros().iter().any(|z| z.delta.is_none()) || f.zeros().is_empty() {
        return Err(GrowthError::NotApplicable("needs a constructed function with delta on every zero".into()));
    }
    let upper = table.rung(n + 1)?;
    if let Some(d) = f.determined_below() {
        if upper.hi() >= &d {
            return Err(GrowthError::NotApplicable(format!("rung {n} reaches past the listed zeros")));
        }
    }
    let places: Vec<Vec<usize>> = f.zeros().iter().map(|z| rung_of(table, &z.log_a)).collect();
    let mut worst: Option<ExtReal> = None;
    let mut covered_all = true;
    // every assignment of the ambiguous zeros is explored through the per-zero options
    let mut assignment = vec![0usize; places.len()];
    loop {
        let chosen: Option<Vec<usize>> = places.iter().zip(&assignment).map(|(p, &i)| p.get(i).copied()).collect();
        match chosen {
            None => {
                covered_all = false;
            }
            Some(nk) if nk.windows(2).all(|w| w[0] < w[1]) => match bound_for(f, table, &nk, n) {
                Some(b) => worst = Some(worst.map_or(b.clone(), |w| w.greater(&b))),
                None => covered_all = false,
            },
            Some(_) => {}
        }
        let mut i = 0;
        while i < assignment.len() {
            assignment[i] += 1;
            if assignment[i] < places[i].len().max(1) {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
        if i == assignment.len() {
            break;
        }
    }
    match worst {
        Some(w) if covered_all => Ok(w),
        _ => Err(GrowthError::NotApplicable(format!("rung {n} is not covered by a zero position"))),
    }
}

/// `2 ln(log R_n) / log R_n`, decreasing in `log R_n` once it exceeds `e`.
fn rung_correction(table: &GrowthTable, n: usize) -> Option<Enclosure> {
    let l = Enclosure::point(table.rung(n).ok()?.lo().clone());
    if l.le(&Enclosure::from_f64(std::f64::consts::E)) != Verdict::Falsified {
        return None;
    }
    l.ln().ok()?.mul_pow2(1).div(&l).ok()
}

/// `delta / 3^(m-1)` plus either `2^-n` (`headline`) or the rung correction.
pub fn lemma_eps_bound(delta: Delta, m: usize, n: usize, table: Option<&GrowthTable>) -> Option<ExtReal> {
    let d = delta_enclosure(delta);
    let main = if m == 0 { d } else { d.div(&Enclosure::from_f64(3.0).pow_int(m as i64 - 1).ok()?).ok()? };
    let extra = match table {
        None => Enclosure::from_f64(2.0).pow_int(-(n as i64)).ok()?,
        Some(t) => rung_correction(t, n)?,
    };
    Some(main.add(&extra).hi().clone())
}

fn bound_for(f: &EntireFunction, table: &GrowthTable, nk: &[usize], n: usize) -> Option<ExtReal> {
    if let Some(k) = nk.iter().position(|&x| x == n) {
        return lemma_eps_bound(f.zeros()[k].delta?, 0, n, Some(table));
    }
    let k = nk.iter().rposition(|&x| x < n)?;
    if k + 1 < nk.len() && nk[k + 1] <= n {
        return None;
    }
    lemma_eps_bound(f.zeros()[k].delta?, n - nk[k], n, Some(table))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialSum {
    pub from: usize,
    pub to: usize,
    pub sum: Enclosure,
    /// Decides `sum < 1/8`.
    pub below_eighth: Verdict,
}

/// Encloses `sum_{n=N}^{horizon} eps_n` from the stored eps values.
pub fn partial_sum_eps(table: &GrowthTable, from: usize, to: usize) -> Result<PartialSum, GrowthError> {
    let mut lo = ExtReal::zero();
    let mut hi = ExtReal::zero();
    for n in from..=to {
        let e = table.eps_entry(n).ok_or(GrowthError::PrecisionLost(n))?;
        let up = e.upper().ok_or(GrowthError::PrecisionLost(n))?;
        let down = e.numeric.as_ref().map(|x| x.value.lo().clone()).unwrap_or_else(ExtReal::zero);
        lo = lo.add_dir(&down.lesser(&up), Dir::Down);
        hi = hi.add_dir(&up, Dir::Up);
    }
    let sum = Enclosure::new(lo, hi);
    let below_eighth = sum.lt(&Enclosure::ratio(1, 8));
    Ok(PartialSum { from, to, sum, below_eighth })
}

/// Computes eps for every certified rung pair and the sum from `sum_from`.
pub fn fill_eps(f: &EntireFunction, table: &mut GrowthTable, s: EpsSettings, sum_from: usize) {
    let len = table.certified_len();
    let mut eps = Vec::new();
    for n in 0..len.saturating_sub(1) {
        let numeric = eps_numeric(f, table, n, s).ok();
        let certified_hi = eps_certified_hi(f, table, n).ok();
        eps.push(EpsEntry { n, numeric, certified_hi });
    }
    table.eps = eps;
    let last = table.eps.iter().filter(|e| e.upper().is_some()).map(|e| e.n).max();
    table.partial_sum = last.filter(|&l| l >= sum_from).and_then(|l| partial_sum_eps(table, sum_from, l).ok());
}

/// Decides `M(r^c) >= M(r)^c` at `u = log r`.
pub fn check_m_convexity(f: &EntireFunction, u: &ExtReal, c: &Enclosure) -> Verdict {
    match f.max_convexity_gap(u, c) {
        Ok(d) => {
            if !d.lo().is_negative() {
                Verdict::Verified
            } else if d.hi().is_negative() {
                Verdict::Falsified
            } else {
                Verdict::Indeterminate
            }
        }
        Err(_) => Verdict::Indeterminate,
    }
}

/// Smallest grid point from which every tested `u` and `c` verifies.
pub fn convexity_threshold(f: &EntireFunction, grid: &[ExtReal], cs: &[f64]) -> Option<ExtReal> {
    let mut threshold = None;
    for u in grid.iter().rev() {
        let ok = cs.iter().all(|&c| check_m_convexity(f, u, &Enclosure::from_f64(c)) == Verdict::Verified);
        if !ok {
            break;
        }
        threshold = Some(u.clone());
    }
    threshold
}

#[derive(Serialize)]
struct RungRow {
    n: usize,
    log_rn: String,
    certified: bool,
}

#[derive(Serialize)]
struct EpsRow {
    n: usize,
    eps_lo: Option<String>,
    eps_hi: Option<String>,
    witness_u: Option<String>,
    converged: Option<bool>,
    eps_certified_hi: Option<String>,
}

#[derive(Serialize)]
struct TableDoc {
    log_r0: String,
    horizon: usize,
    degraded_at: Option<usize>,
    rungs: Vec<RungRow>,
    eps: Vec<EpsRow>,
    partial_sum: Option<(usize, usize, String, String, Verdict)>,
}

impl GrowthTable {
    pub fn to_json(&self) -> serde_json::Value {
        let doc = TableDoc {
            log_r0: to_decimal(&self.log_r0.mid()),
            horizon: self.horizon,
            degraded_at: self.degraded_at,
            rungs: self
                .rungs
                .iter()
                .enumerate()
                .map(|(n, r)| RungRow { n, log_rn: r.to_text(), certified: r.certified().is_some() })
                .collect(),
            eps: self
                .eps
                .iter()
                .map(|e| EpsRow {
                    n: e.n,
                    eps_lo: e.numeric.as_ref().map(|x| to_decimal(x.value.lo())),
                    eps_hi: e.numeric.as_ref().map(|x| to_decimal(x.value.hi())),
                    witness_u: e.numeric.as_ref().map(|x| to_decimal(&x.witness_u)),
                    converged: e.numeric.as_ref().map(|x| x.converged),
                    eps_certified_hi: e.certified_hi.as_ref().map(to_decimal),
                })
                .collect(),
            partial_sum: self
                .partial_sum
                .as_ref()
                .map(|p| (p.from, p.to, to_decimal(p.sum.lo()), to_decimal(p.sum.hi()), p.below_eighth)),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    /// Rows `n, log_Rn, eps_lo, eps_hi, eps_certified_hi, cumulative_sum_hi`.
    pub fn csv_rows(&self) -> Vec<[String; 6]> {
        let mut cum = ExtReal::zero();
        let mut have_cum = true;
        let mut rows = Vec::new();
        for (n, r) in self.rungs.iter().enumerate() {
            let e = self.eps_entry(n);
            let num = e.and_then(|x| x.numeric.as_ref());
            let cert = e.and_then(|x| x.certified_hi.as_ref());
            match e.and_then(|x| x.upper()) {
                Some(u) if have_cum => cum = cum.add_dir(&u, Dir::Up),
                _ => have_cum = false,
            }
            rows.push([
                n.to_string(),
                r.to_text(),
                num.map(|x| to_decimal(x.value.lo())).unwrap_or_default(),
                num.map(|x| to_decimal(x.value.hi())).unwrap_or_default(),
                cert.map(to_decimal).unwrap_or_default(),
                if have_cum && e.is_some() { to_decimal(&cum) } else { String::new() },
            ]);
        }
        rows
    }
}
