//! The counterexample machine: the ladder `r_0 = 10`, `r_{n+1} = g(r_n)`,
//! the inductive step with its radii `s_k`, greedy zero placement, the
//! stage schedule, and checks of the estimates the construction relies on.
//!
//! Every ladder value and every `s_k` is frozen as the upper end of its
//! enclosure, so `f([-r, 0]) \subset [-g(r), 0]` keeps the recorded radii
//! sound upper bounds.

use crate::entire::{p_from_delta, Delta, EntireError, EntireFunction, FamilyKind, PCount, ZeroEntry};
use crate::growth::{lemma_eps_bound, rung_of, GrowthError, GrowthTable};
use crate::xnum::{to_decimal, Enclosure, ExtReal, Verdict, XnumError};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("precision lost: {0}")]
    PrecisionLost(String),
    #[error("stage m = {m} did not terminate within {budget} steps")]
    NonTermination { m: usize, budget: usize },
    #[error("indeterminate comparison: {0}")]
    IndeterminateComparison(String),
    #[error("stage budget of {0} exceeded")]
    StageBudgetExceeded(usize),
    #[error("a zero lies in the gap interval")]
    GapConditionFails,
    #[error("beyond the decided part of the ledger: {0}")]
    BeyondFrontier(String),
    #[error(transparent)]
    Entire(#[from] EntireError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Xnum(#[from] XnumError),
}

impl ConstructError {
    /// Numbers past the exponent range count as lost precision.
    fn with_range_as_precision(self, m: usize) -> Self {
        let range = |x: &XnumError| matches!(x, XnumError::RangeExceeded(_));
        match &self {
            ConstructError::Xnum(x) | ConstructError::Entire(EntireError::Xnum(x)) if range(x) => {
                ConstructError::PrecisionLost(format!("stage m = {m}: {x}"))
            }
            _ => self,
        }
    }
}

/// The sequence `delta_n`, `n >= 1`. Divergence of the sum is the intent of
/// the built-in rules; it is not checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DeltaSpecText", into = "DeltaSpecText")]
pub enum DeltaSpec {
    Constant(Delta),
    /// `c / ln(n + 2)`, rounded down to a multiple of `2^-20`.
    Harmonic(Delta),
    List(Vec<Delta>),
}

/// Text form of a `DeltaSpec`, rationals written as `"p/q"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeltaSpecText {
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
}

impl From<DeltaSpec> for DeltaSpecText {
    fn from(d: DeltaSpec) -> Self {
        let one = |rule: &str, v: Delta| DeltaSpecText { rule: rule.into(), value: Some(v.to_string()), values: None };
        match d {
            DeltaSpec::Constant(v) => one("constant", v),
            DeltaSpec::Harmonic(v) => one("harmonic", v),
            DeltaSpec::List(v) => DeltaSpecText { rule: "list".into(), value: None, values: Some(v.iter().map(|x| x.to_string()).collect()) },
        }
    }
}

impl std::fmt::Display for DeltaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeltaSpec::Constant(v) => write!(f, "constant {v}"),
            DeltaSpec::Harmonic(c) => write!(f, "harmonic, c = {c}"),
            DeltaSpec::List(v) => write!(f, "list [{}]", v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")),
        }
    }
}

impl TryFrom<DeltaSpecText> for DeltaSpec {
    type Error = String;

    fn try_from(t: DeltaSpecText) -> Result<Self, String> {
        let parse = |s: &str| s.trim().parse::<Delta>().map_err(|e| format!("bad rational {s:?}: {e}"));
        let value = || t.value.as_deref().ok_or_else(|| format!("rule {:?} needs `value`", t.rule)).and_then(parse);
        match t.rule.as_str() {
            "constant" => Ok(DeltaSpec::Constant(value()?)),
            "harmonic" => Ok(DeltaSpec::Harmonic(value()?)),
            "list" => Ok(DeltaSpec::List(
                t.values.as_deref().ok_or("rule \"list\" needs `values`")?.iter().map(|s| parse(s)).collect::<Result<_, _>>()?,
            )),
            other => Err(format!("unknown delta rule {other:?}")),
        }
    }
}

impl DeltaSpec {
    pub fn delta(&self, n: usize) -> Result<Delta, ConstructError> {
        let d = match self {
            DeltaSpec::Constant(c) => *c,
            DeltaSpec::Harmonic(c) => {
                let v = c.to_f64().unwrap_or(0.0) / ((n + 2) as f64).ln();
                let num = (v * (1u64 << 20) as f64 * (1.0 - 1e-12)).floor() as i64;
                Delta::new(num, 1 << 20)
            }
            DeltaSpec::List(v) => *v
                .get(n.wrapping_sub(1))
                .ok_or_else(|| ConstructError::ConstraintViolation(format!("delta list has no entry {n}")))?,
        };
        if d <= Delta::new(0, 1) || d >= Delta::new(1, 2) {
            return Err(ConstructError::ConstraintViolation(format!("delta_{n} = {d} violates 0 < delta_n < 1/2")));
        }
        Ok(d)
    }

    pub fn divergence_note(&self) -> &'static str {
        match self {
            DeltaSpec::Constant(_) => "constant: the sum diverges",
            DeltaSpec::Harmonic(_) => "c / ln(n + 2): the sum diverges",
            DeltaSpec::List(_) => "finite list: divergence refers to the intended continuation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructSettings {
    /// Multiplicative slack on the spacing constraints.
    pub slack: f64,
    pub step_budget: usize,
    pub stage_budget: usize,
    /// Largest relative width of a `log` enclosure before precision counts as lost.
    pub rel_width_limit: f64,
    /// Samples per zero for the small-modulus check used by the image envelope.
    pub small_samples: usize,
}

impl Default for ConstructSettings {
    fn default() -> Self {
        ConstructSettings { slack: 2.0, step_budget: 10_000, stage_budget: 64, rel_width_limit: 1e-6, small_samples: 16 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub k: usize,
    pub zero: usize,
    /// Ladder index `n` with `r_n <= a < r_{n+1}`.
    pub rung: usize,
    pub jump: Verdict,
    pub small: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayRule {
    /// No zero between placements.
    Steady,
    /// The step onto the next placement.
    AtZero,
    /// The step after it.
    AfterZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCheck {
    pub n: usize,
    pub q: usize,
    pub rule: DecayRule,
    pub holds: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub m: usize,
    /// `log s_k`.
    pub s: Vec<ExtReal>,
    /// `T_k = log s_k / log r_{m+k}`.
    pub t: Vec<Enclosure>,
    /// `r_{m+k} <= s_k <= r_{m+k+1}` for `k < K`.
    pub bracket: Vec<Verdict>,
    pub placements: Vec<Placement>,
    /// Reasons placement was refused, by `k`.
    pub refused: Vec<(usize, String)>,
    pub k_term: Option<usize>,
    pub decay: Vec<DecayCheck>,
}

impl StepTrace {
    fn new(m: usize) -> Self {
        StepTrace { m, s: vec![], t: vec![], bracket: vec![], placements: vec![], refused: vec![], k_term: None, decay: vec![] }
    }

    pub fn n(&self) -> Option<usize> {
        self.k_term
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub k: usize,
    pub parts: Vec<usize>,
    pub n_k: usize,
    /// `f^{N_k}((-r_start, 0]) \subset (-r_end, 0]`.
    pub start: usize,
    pub end: usize,
    pub inclusion: Verdict,
}

#[derive(Debug, Clone)]
pub struct ConstructionState {
    pub delta: DeltaSpec,
    /// Smallest allowed `log a_1`.
    pub log_a1: ExtReal,
    pub settings: ConstructSettings,
    pub zeros: Vec<ZeroEntry>,
    pub zero_rungs: Vec<usize>,
    /// Frozen `log r_n`.
    pub ladder: Vec<ExtReal>,
    /// Enclosures the frozen values were taken from.
    pub ladder_enc: Vec<Enclosure>,
    pub schedule: Vec<ScheduleEntry>,
    pub traces: Vec<StepTrace>,
    small_ok: Vec<Verdict>,
    g: EntireFunction,
}

fn v(e: Enclosure) -> Enclosure {
    e
}

fn ln_of(x: f64) -> Enclosure {
    Enclosure::from_f64(x).ln().expect("positive constant")
}

impl ConstructionState {
    pub fn init(delta: DeltaSpec, log_a1: ExtReal, settings: ConstructSettings) -> Result<Self, ConstructError> {
        let d1 = delta.delta(1)?;
        let lhs = crate::entire::delta_enclosure(d1).mul(&Enclosure::point(log_a1.clone())).mul_pow2(-2);
        if lhs.ge(&ln_of(4.0)) != Verdict::Verified {
            return Err(ConstructError::ConstraintViolation("a_1^(delta_1/4) >= 4 fails".into()));
        }
        let p1 = p_from_delta(&log_a1, d1)?;
        if p1.enclosure().lo() < &ExtReal::one() {
            return Err(ConstructError::ConstraintViolation("p_1 < 1".into()));
        }
        let r0 = ln_of(10.0);
        Ok(ConstructionState {
            delta,
            log_a1,
            settings,
            zeros: vec![],
            zero_rungs: vec![],
            ladder: vec![r0.hi().clone()],
            ladder_enc: vec![r0],
            schedule: vec![],
            traces: vec![],
            small_ok: vec![],
            g: EntireFunction::cubic(),
        })
    }

    /// Replaces the ledger without constraint checks; for exercising the checkers.
    pub fn adopt_ledger(&mut self, zeros: Vec<ZeroEntry>) -> Result<(), ConstructError> {
        self.g = EntireFunction::new(zeros.clone(), FamilyKind::Truncated)?;
        self.zeros = zeros;
        self.zero_rungs = self.zeros.iter().map(|z| self.ladder.iter().rposition(|r| r <= &z.log_a).unwrap_or(0)).collect();
        self.small_ok = vec![Verdict::Indeterminate; self.zeros.len()];
        Ok(())
    }

    /// Placed zeros only; `g` and upper bounds for `m` on the negative axis.
    pub fn g_function(&self) -> &EntireFunction {
        &self.g
    }

    /// The placed zeros as the listed part of an infinite family.
    pub fn function(&self) -> Result<EntireFunction, ConstructError> {
        match self.zeros.last() {
            Some(z) if z.log_a >= ExtReal::from_f64(2.0) => Ok(EntireFunction::new(self.zeros.clone(), FamilyKind::FullFamily)?),
            _ => Ok(EntireFunction::new(self.zeros.clone(), FamilyKind::Truncated)?),
        }
    }

    /// Zeros below this `log r` can no longer change.
    pub fn frontier(&self) -> ExtReal {
        let n = self.ladder.len();
        self.ladder[n.saturating_sub(2)].clone()
    }

    fn checked_log_g(&self, u: &Enclosure, what: &str) -> Result<Enclosure, ConstructError> {
        let e = self.g.log_g(u)?;
        if !(e.rel_width() <= self.settings.rel_width_limit) {
            return Err(ConstructError::PrecisionLost(format!("{what}: relative width {}", e.rel_width())));
        }
        Ok(e)
    }

    /// Extends the ladder so that `r_upto` exists.
    pub fn extend_ladder(&mut self, upto: usize) -> Result<(), ConstructError> {
        while self.ladder.len() <= upto {
            let n = self.ladder.len();
            let prev = Enclosure::point(self.ladder[n - 1].clone());
            let enc = self.checked_log_g(&prev, &format!("r_{n}"))?;
            if Enclosure::point(enc.hi().clone()).ge(&prev.mul(&Enclosure::from_f64(3.0))) != Verdict::Verified {
                return Err(ConstructError::ConstraintViolation(format!("r_{n} >= r_{}^3 fails", n - 1)));
            }
            self.ladder.push(enc.hi().clone());
            self.ladder_enc.push(enc);
        }
        Ok(())
    }

    /// Ladder index `n` with `r_n <= u < r_{n+1}`, if the ladder reaches that far.
    fn rung_of_u(&self, u: &ExtReal) -> Option<usize> {
        let n = self.ladder.iter().rposition(|r| r <= u)?;
        (n + 1 < self.ladder.len()).then_some(n)
    }

    /// Decides whether a zero may go at `log a = s`; returns the reasons when not.
    fn placement_check(&self, s: &ExtReal) -> Result<Result<(Delta, PCount, usize), String>, ConstructError> {
        let i = self.zeros.len();
        let d = match self.delta.delta(i + 1) {
            Ok(d) => d,
            Err(e) => return Ok(Err(e.to_string())),
        };
        if s < &self.log_a1 {
            return Ok(Err("below the first-zero threshold".into()));
        }
        if s <= &self.frontier() {
            return Ok(Err("ladder already fixed above this radius".into()));
        }
        for (what, verdict) in spacing_checks(self.zeros.last(), s, d, self.settings.slack)? {
            if verdict != Verdict::Verified {
                return Ok(Err(format!("{what}: {verdict:?}")));
            }
        }
        let rung = match self.rung_of_u(s) {
            Some(n) => n,
            None => self.ladder.len() - 1,
        };
        for (j, &nj) in self.zero_rungs.iter().enumerate() {
            match self.ladder.get(nj + 4) {
                Some(r) if s >= r => {}
                Some(_) => return Ok(Err(format!("inside the four-rung window of zero {}", j + 1))),
                None => return Ok(Err(format!("window of zero {} not yet on the ladder", j + 1))),
            }
        }
        let p = p_from_delta(s, d)?;
        if p.enclosure().lo() < &ExtReal::one() {
            return Ok(Err("p < 1".into()));
        }
        if let Some(prev) = self.zeros.last() {
            let pp = prev.p.enclosure();
            if p.enclosure().ge(&pp.mul(&pp).mul_pow2(1)) != Verdict::Verified {
                return Ok(Err("p_{n+1} >= 2 p_n^2 not decisive".into()));
            }
        }
        Ok(Ok((d, p, rung)))
    }

    fn place(&mut self, s: &ExtReal, k: usize, trace: &mut StepTrace) -> Result<Option<usize>, ConstructError> {
        let (d, p, rung) = match self.placement_check(s)? {
            Ok(x) => x,
            Err(why) => {
                trace.refused.push((k, why));
                return Ok(None);
            }
        };
        let mut zeros = self.zeros.clone();
        zeros.push(ZeroEntry { log_a: s.clone(), p, delta: Some(d) });
        let g = match EntireFunction::new(zeros.clone(), FamilyKind::Truncated) {
            Ok(g) => g,
            Err(e) => {
                trace.refused.push((k, e.to_string()));
                return Ok(None);
            }
        };
        self.zeros = zeros;
        self.g = g;
        self.zero_rungs.push(rung);
        let idx = self.zeros.len() - 1;
        let small = self.verify_lemma_small(idx, self.settings.small_samples).map(|r| r.verdict).unwrap_or(Verdict::Indeterminate);
        self.small_ok.push(small);
        let jump = self.verify_lemma_large(idx).unwrap_or(Verdict::Indeterminate);
        trace.placements.push(Placement { k, zero: idx, rung, jump, small });
        Ok(Some(idx))
    }

    /// `log` of `a^{1 - delta/16}` for zero `i`.
    fn shrunk(&self, i: usize) -> Enclosure {
        let z = &self.zeros[i];
        let d = crate::entire::delta_enclosure(z.delta.expect("placed zeros carry delta"));
        Enclosure::from_f64(1.0).sub(&d.mul_pow2(-4)).mul(&Enclosure::point(z.log_a.clone()))
    }

    /// One inductive step from stage `m`; returns `N`.
    pub fn run_step(&mut self, m: usize) -> Result<usize, ConstructError> {
        let mut trace = StepTrace::new(m);
        let out = self.step_inner(m, &mut trace).map_err(|e| e.with_range_as_precision(m));
        trace.decay = self.decay_overlay(&trace);
        self.traces.push(trace);
        out
    }

    fn step_inner(&mut self, m: usize, trace: &mut StepTrace) -> Result<usize, ConstructError> {
        self.extend_ladder(m + 1)?;
        let mut s = self.ladder[m + 1].clone();
        let mut k = 0;
        loop {
            self.extend_ladder(m + k + 1)?;
            let r = self.ladder[m + k].clone();
            trace.s.push(s.clone());
            trace.t.push(Enclosure::point(s.clone()).div(&Enclosure::point(r.clone()))?);
            if s <= r {
                trace.k_term = Some(k);
                return Ok(k);
            }
            if k >= self.settings.step_budget {
                return Err(ConstructError::NonTermination { m, budget: self.settings.step_budget });
            }
            trace.bracket.push(if s <= self.ladder[m + k + 1] { Verdict::Verified } else { Verdict::Falsified });
            let next = match self.place(&s, k, trace)? {
                Some(i) => self.shrunk(i),
                None => Enclosure::point(s.clone()),
            };
            s = self.checked_log_g(&next, &format!("s_{}", k + 1))?.hi().clone();
            k += 1;
        }
    }

    /// Checks each transition after the second placement of a step against
    /// its decay factor.
    fn decay_overlay(&self, trace: &StepTrace) -> Vec<DecayCheck> {
        let mut out = Vec::new();
        let pl = &trace.placements;
        for n in 1..pl.len() {
            let kn = pl[n].k;
            let p = self.zeros[pl[n].zero].p.enclosure();
            let Ok(sqrt_p) = p.ln().and_then(|l| l.mul_pow2(-1).exp()) else { continue };
            let gap = pl.get(n + 1).map(|x| x.k - kn);
            let mut q = 2;
            while kn + q + 1 < trace.t.len() {
                let three = Enclosure::from_f64(3.0).pow_int(q as i64 - 2).unwrap_or_else(|_| Enclosure::from_f64(1.0));
                let steady = Enclosure::from_f64(1.0).add(&Enclosure::from_f64(2.0).div(&three.mul(&sqrt_p)).unwrap_or_else(|_| Enclosure::zero()));
                let (rule, factor) = match gap {
                    Some(g) if q == g => {
                        let dn = crate::entire::delta_enclosure(self.zeros[pl[n + 1].zero].delta.expect("delta"));
                        (DecayRule::AtZero, steady.mul(&Enclosure::from_f64(1.0).sub(&dn.mul_pow2(-4))))
                    }
                    Some(g) if q == g + 1 => {
                        let f = Enclosure::from_f64(1.0).add(&Enclosure::from_f64(2.0).div(&sqrt_p).unwrap_or_else(|_| Enclosure::zero()));
                        (DecayRule::AfterZero, f)
                    }
                    Some(g) if q > g + 1 => break,
                    _ => (DecayRule::Steady, steady),
                };
                let holds = trace.t[kn + q + 1].le(&trace.t[kn + q].mul(&factor));
                out.push(DecayCheck { n: n + 1, q, rule, holds });
                q += 1;
            }
        }
        out
    }

    /// Upper bound for `log sup_{t <= e^u} |f(-t)|`: `g(a^{1-delta/16})` when `u`
    /// falls in a checked small-modulus interval, `g(e^u)` otherwise.
    pub fn envelope(&self, u: &ExtReal) -> Result<ExtReal, ConstructError> {
        for i in 0..self.zeros.len() {
            let lo = self.shrunk(i);
            if lo.hi() < u && u <= &self.zeros[i].log_a && self.small_ok.get(i) == Some(&Verdict::Verified) {
                return Ok(self.g.log_g(&lo)?.hi().clone().greater(&ExtReal::zero()));
            }
        }
        Ok(self.g.log_g(&Enclosure::point(u.clone()))?.hi().clone().greater(&ExtReal::zero()))
    }

    /// Decides `f^n((-r_start, 0]) \subset (-r_end, 0]` by iterating the envelope.
    pub fn check_inclusion(&mut self, start: usize, n: usize, end: usize) -> Result<Verdict, ConstructError> {
        self.extend_ladder(start.max(end))?;
        let mut u = self.ladder[start].clone();
        for _ in 0..n {
            u = self.envelope(&u)?;
        }
        Ok(if u <= self.ladder[end] { Verdict::Verified } else { Verdict::Falsified })
    }

    /// Runs the schedule for `k = 1..=k_max`.
    pub fn run_schedule(&mut self, k_max: usize) -> Result<(), ConstructError> {
        let mut total = self.schedule.iter().map(|e| e.n_k).sum::<usize>();
        let mut stages = self.traces.len();
        for k in self.schedule.len() + 1..=k_max {
            let mut parts: Vec<usize> = Vec::new();
            for j in 1..=2 * k {
                if stages >= self.settings.stage_budget {
                    return Err(ConstructError::StageBudgetExceeded(self.settings.stage_budget));
                }
                let m = total + parts.iter().sum::<usize>() + 2 * k - j;
                parts.push(self.run_step(m)?);
                stages += 1;
            }
            let n_k: usize = parts.iter().sum();
            let (start, end) = (total + 2 * k, total + n_k);
            let inclusion = self.check_inclusion(start, n_k, end)?;
            self.schedule.push(ScheduleEntry { k, parts, n_k, start, end, inclusion });
            total += n_k;
        }
        Ok(())
    }

    /// `|f| < 1` on `(-a_k, -a_k^{1-delta/16})` at `n` evenly spaced `log`-points.
    pub fn verify_lemma_small(&self, k: usize, n: usize) -> Result<SmallReport, ConstructError> {
        let z = self.zeros.get(k).ok_or_else(|| ConstructError::ConstraintViolation(format!("no zero {k}")))?;
        let lo = self.shrunk(k).hi().clone();
        let span = z.log_a.sub_dir(&lo, crate::xnum::Dir::Down);
        let mut samples = Vec::new();
        for i in 0..n.max(1) {
            let s = ExtReal::from_f64((i as f64 + 0.5) / n.max(1) as f64);
            let u = lo.add_dir(&span.mul_dir(&s, crate::xnum::Dir::Down), crate::xnum::Dir::Down);
            let verdict = match self.g.log_min_modulus(&Enclosure::point(u.clone()))?.upper() {
                None => Verdict::Verified,
                Some(x) if x.is_negative() => Verdict::Verified,
                Some(_) => Verdict::Indeterminate,
            };
            samples.push((u, verdict));
        }
        Ok(SmallReport { verdict: Verdict::all(samples.iter().map(|s| s.1)), samples })
    }

    /// `log g(a_k) >= p_k^{1/2} log g(a_k^{1-delta/16})`.
    pub fn verify_lemma_large(&self, k: usize) -> Result<Verdict, ConstructError> {
        let z = self.zeros.get(k).ok_or_else(|| ConstructError::ConstraintViolation(format!("no zero {k}")))?;
        let at = self.g.log_g(&Enclosure::point(z.log_a.clone()))?;
        let below = self.g.log_g(&self.shrunk(k))?;
        let sqrt_p = z.p.enclosure().ln()?.mul_pow2(-1).exp()?;
        Ok(at.ge(&v(sqrt_p.mul(&below))))
    }

    fn within_frontier(&self, u: &Enclosure) -> Result<(), ConstructError> {
        if u.hi() > &self.frontier() {
            return Err(ConstructError::BeyondFrontier(to_decimal(u.hi())));
        }
        Ok(())
    }

    /// `log g(r^t) >= t log g(r)` for `t >= 2`.
    pub fn verify_g_convexity(&self, u: &ExtReal, t: &Enclosure) -> Result<Verdict, ConstructError> {
        if t.ge(&Enclosure::from_f64(2.0)) != Verdict::Verified {
            return Err(ConstructError::ConstraintViolation("t >= 2 required".into()));
        }
        self.within_frontier(&t.mul(&Enclosure::point(u.clone())))?;
        Ok(gap_verdict(&self.g.g_convexity_gap(u, t)?))
    }

    /// `log g(r^t) <= t (1 + 2s) log g(r)` when no zero lies in `(r^s, r^t]`.
    pub fn verify_g_cap(&self, u: &ExtReal, s: &Enclosure, t: &Enclosure) -> Result<Verdict, ConstructError> {
        if s.gt(&Enclosure::zero()) != Verdict::Verified
            || s.lt(&Enclosure::ratio(1, 2)) != Verdict::Verified
            || t.gt(&Enclosure::from_f64(1.0)) != Verdict::Verified
        {
            return Err(ConstructError::ConstraintViolation("needs 0 < s < 1/2 and t > 1".into()));
        }
        let uu = Enclosure::point(u.clone());
        let (su, tu) = (s.mul(&uu), t.mul(&uu));
        self.within_frontier(&tu)?;
        for z in &self.zeros {
            if &z.log_a > su.lo() && &z.log_a <= tu.hi() {
                return Err(ConstructError::GapConditionFails);
            }
        }
        Ok(gap_verdict(&self.g.g_cap_gap(u, s, t)?))
    }

    /// Rung spacing of the zeros on the `R_n = M^n(10)` ladder and
    /// `g(R_n^3) > M(R_n)` on every rung where it can be decided.
    pub fn verify_r_spacing(&self, table: &GrowthTable) -> Result<SpacingReport, ConstructError> {
        let f = self.function()?;
        let mut per_zero = Vec::new();
        for (k, z) in self.zeros.iter().enumerate() {
            let places = rung_of(table, &z.log_a);
            if places.is_empty() {
                continue;
            }
            let mut vs = Vec::new();
            for &n in &places {
                let lo = table.rung(n)?;
                let Ok(hi2) = table.rung(n + 2) else {
                    vs.push(Verdict::Indeterminate);
                    continue;
                };
                for (j, o) in self.zeros.iter().enumerate() {
                    if j == k {
                        continue;
                    }
                    // o outside [R_n, R_{n+2})
                    let below = Enclosure::point(o.log_a.clone()).lt(lo);
                    let above = Enclosure::point(o.log_a.clone()).ge(hi2);
                    vs.push(if below == Verdict::Verified || above == Verdict::Verified {
                        Verdict::Verified
                    } else if below == Verdict::Falsified && above == Verdict::Falsified {
                        Verdict::Falsified
                    } else {
                        Verdict::Indeterminate
                    });
                }
            }
            per_zero.push((k, places, Verdict::all(vs)));
        }
        let mut cube = Vec::new();
        let limit = self.frontier();
        for n in 0..table.certified_len() {
            let r = table.rung(n)?;
            if r.hi().mul_dir(&ExtReal::from_f64(3.0), crate::xnum::Dir::Up) >= limit {
                break;
            }
            let lhs = self.g.log_g(&r.mul(&Enclosure::from_f64(3.0)))?;
            let rhs = f.log_max_modulus(r)?;
            cube.push((n, lhs.gt(&rhs)));
        }
        let verdict = Verdict::all(per_zero.iter().map(|x| x.2).chain(cube.iter().map(|x| x.1)));
        Ok(SpacingReport { verdict, per_zero, cube })
    }

    /// Compares numeric eps with `delta_k + 2^-n_k` on the zero rungs and
    /// `delta_k / 3^(m-1) + 2^-(n_k+m)` on the rungs after them.
    pub fn verify_eps_bounds(&self, table: &GrowthTable) -> Result<EpsBoundReport, ConstructError> {
        let mut rows = Vec::new();
        let nk: Vec<Vec<usize>> = self.zeros.iter().map(|z| rung_of(table, &z.log_a)).collect();
        let mut monotone = true;
        for w in nk.windows(2) {
            if let (Some(a), Some(b)) = (w[0].iter().max(), w[1].iter().min()) {
                monotone &= a < b;
            }
        }
        let f = self.function()?;
        let limit = f.determined_below();
        for (k, places) in nk.iter().enumerate() {
            let d = self.zeros[k].delta.expect("placed zeros carry delta");
            let next = nk.get(k + 1).and_then(|p| p.iter().min().copied());
            for &n in places {
                let mut m = 0;
                loop {
                    let rung = n + m;
                    if next.is_some_and(|x| rung >= x) {
                        break;
                    }
                    let Some(e) = table.eps_entry(rung).and_then(|e| e.numeric.clone()) else { break };
                    if let (Some(l), Ok(r)) = (&limit, table.rung(rung + 1)) {
                        if r.hi() >= l {
                            break;
                        }
                    }
                    let bound = lemma_eps_bound(d, m, rung, None).expect("finite bound");
                    let verdict = if e.value.hi() <= &bound {
                        Verdict::Verified
                    } else if e.value.lo() > &bound {
                        Verdict::Falsified
                    } else {
                        Verdict::Indeterminate
                    };
                    rows.push(EpsBoundRow { zero: k, n_k: n, m, eps: e.value, bound, verdict });
                    m += 1;
                }
            }
        }
        if rows.is_empty() && !self.zeros.is_empty() {
            return Err(ConstructError::PrecisionLost("no eps value on a zero rung".into()));
        }
        let verdict = Verdict::all(rows.iter().map(|r| r.verdict));
        Ok(EpsBoundReport { verdict, rows, monotone_subsequence: monotone })
    }

    /// Re-decides every placement constraint on the current ledger and ladder.
    pub fn check_ledger_constraints(&self) -> Result<Vec<ConstraintCheck>, ConstructError> {
        let mut out = Vec::new();
        let mut push = |zero: usize, name: &str, verdict: Verdict| out.push(ConstraintCheck { zero, name: name.to_string(), verdict });
        for (i, z) in self.zeros.iter().enumerate() {
            let Some(d) = z.delta else {
                push(i + 1, "delta recorded", Verdict::Falsified);
                continue;
            };
            push(i + 1, "delta_n < 1/2", if d < Delta::new(1, 2) && d > Delta::new(0, 1) { Verdict::Verified } else { Verdict::Falsified });
            let prev = if i == 0 { None } else { Some(&self.zeros[i - 1]) };
            for (name, verdict) in spacing_checks(prev, &z.log_a, d, 1.0)? {
                push(i + 1, name, verdict);
            }
            let p = z.p.enclosure();
            push(i + 1, "p_n >= 1", p.ge(&Enclosure::from_f64(1.0)));
            if let Some(prev) = prev {
                let pp = prev.p.enclosure();
                push(i + 1, "p_{n+1} >= 2 p_n^2", p.ge(&pp.mul(&pp).mul_pow2(1)));
            }
            for j in 0..i {
                let verdict = match (self.zero_rungs.get(j), self.zero_rungs.get(i)) {
                    (Some(&nj), Some(&ni)) if ni + 1 < self.ladder.len() => {
                        if ni >= nj + 4 {
                            Verdict::Verified
                        } else {
                            Verdict::Falsified
                        }
                    }
                    _ => Verdict::Indeterminate,
                };
                push(i + 1, "a_m outside [r_n, r_{n+4})", verdict);
            }
        }
        Ok(out)
    }

    /// Rebuilds a state from `to_json` output; the ladder is recomputed as far
    /// as precision allows up to its recorded length.
    pub fn from_json(v: &serde_json::Value) -> Result<Self, ConstructError> {
        let bad = |what: &str| ConstructError::ConstraintViolation(format!("construction file: {what}"));
        let delta: DeltaSpec = serde_json::from_value(v["delta"].clone()).map_err(|e| bad(&e.to_string()))?;
        let settings: ConstructSettings = serde_json::from_value(v["settings"].clone()).map_err(|e| bad(&e.to_string()))?;
        let log_a1 = crate::xnum::from_decimal(v["log_a1"].as_str().ok_or_else(|| bad("log_a1"))?)?;
        let ledger: EntireFunction = serde_json::from_value(v["ledger"].clone()).map_err(|e| bad(&e.to_string()))?;
        let len = v["ladder"].as_array().map_or(1, |a| a.len());
        let mut st = ConstructionState::init(delta, log_a1, settings)?;
        st.g = EntireFunction::new(ledger.zeros().to_vec(), FamilyKind::Truncated)?;
        st.zeros = ledger.zeros().to_vec();
        match st.extend_ladder(len.saturating_sub(1)) {
            Ok(()) | Err(ConstructError::PrecisionLost(_)) => {}
            Err(e) => return Err(e.with_range_as_precision(0)),
        }
        st.zero_rungs = st.zeros.iter().map(|z| st.ladder.iter().rposition(|r| r <= &z.log_a).unwrap_or(0)).collect();
        st.small_ok = (0..st.zeros.len())
            .map(|i| st.verify_lemma_small(i, st.settings.small_samples).map_or(Verdict::Indeterminate, |r| r.verdict))
            .collect();
        Ok(st)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let traces: Vec<serde_json::Value> = self
            .traces
            .iter()
            .map(|t| {
                serde_json::json!({
                    "m": t.m,
                    "N": t.k_term,
                    "log_s": t.s.iter().map(to_decimal).collect::<Vec<_>>(),
                    "T": t.t.iter().map(|x| [to_decimal(x.lo()), to_decimal(x.hi())]).collect::<Vec<_>>(),
                    "bracket": t.bracket,
                    "placements": t.placements.iter().map(|p| serde_json::json!({
                        "k": p.k, "zero": p.zero + 1, "rung": p.rung, "jump": p.jump, "small": p.small,
                    })).collect::<Vec<_>>(),
                    "refused": t.refused.iter().map(|(k, why)| serde_json::json!({"k": k, "reason": why})).collect::<Vec<_>>(),
                    "decay": t.decay.iter().map(|d| serde_json::json!({"n": d.n, "q": d.q, "rule": d.rule, "holds": d.holds})).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "delta": self.delta,
            "divergence_note": self.delta.divergence_note(),
            "log_a1": to_decimal(&self.log_a1),
            "settings": self.settings,
            "ledger": serde_json::to_value(&self.g).expect("serializable"),
            "ladder": self.ladder.iter().map(to_decimal).collect::<Vec<_>>(),
            "schedule": self.schedule.iter().map(|e| serde_json::json!({
                "k": e.k, "parts": e.parts, "N_k": e.n_k, "start": e.start, "end": e.end, "inclusion": e.inclusion,
            })).collect::<Vec<_>>(),
            "traces": traces,
        })
    }
}

/// The size and spacing constraints for a zero at `log a = s` after `prev`.
fn spacing_checks(prev: Option<&ZeroEntry>, s: &ExtReal, d: Delta, slack: f64) -> Result<Vec<(&'static str, Verdict)>, ConstructError> {
    let su = Enclosure::point(s.clone());
    let de = crate::entire::delta_enclosure(d);
    let slack = ln_of(slack);
    let mut checks = Vec::new();
    match prev {
        None => checks.push(("a_1^(delta_1/4) >= 4", de.mul(&su).mul_pow2(-2).ge(&ln_of(4.0).add(&slack)))),
        Some(prev) => {
            let lp = Enclosure::point(prev.log_a.clone());
            let dp = crate::entire::delta_enclosure(prev.delta.unwrap_or(d));
            checks.push(("a_{n+1} > a_n^2", su.gt(&lp.mul_pow2(1).add(&slack))));
            checks.push(("a_{n+1}^(delta/2) > 16 a_n^delta", de.mul(&su).mul_pow2(-1).gt(&ln_of(16.0).add(&slack).add(&dp.mul(&lp)))));
            checks.push(("a_{n+1}^(delta/16) > a_n^delta log a_{n+1}", de.mul(&su).mul_pow2(-4).gt(&slack.add(&dp.mul(&lp)).add(&su.ln()?))));
        }
    }
    Ok(checks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintCheck {
    /// 1-based zero index.
    pub zero: usize,
    pub name: String,
    pub verdict: Verdict,
}

fn gap_verdict(d: &Enclosure) -> Verdict {
    if !d.lo().is_negative() {
        Verdict::Verified
    } else if d.hi().is_negative() {
        Verdict::Falsified
    } else {
        Verdict::Indeterminate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallReport {
    pub verdict: Verdict,
    pub samples: Vec<(ExtReal, Verdict)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpacingReport {
    pub verdict: Verdict,
    /// Zero index, its possible rungs, spacing verdict.
    pub per_zero: Vec<(usize, Vec<usize>, Verdict)>,
    /// Rung and the verdict for `g(R_n^3) > M(R_n)`.
    pub cube: Vec<(usize, Verdict)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsBoundRow {
    pub zero: usize,
    pub n_k: usize,
    pub m: usize,
    pub eps: Enclosure,
    pub bound: ExtReal,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsBoundReport {
    pub verdict: Verdict,
    pub rows: Vec<EpsBoundRow>,
    /// Rung positions of successive zeros increase.
    pub monotone_subsequence: bool,
}
