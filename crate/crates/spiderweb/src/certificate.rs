//! Spider's-web certificates.
//!
//! A certificate is a finite sequence `rho_0, ..., rho_H` with
//! `rho_n > M^n(R')` and `m(rho_n) >= rho_{n+1}`, every comparison decided by
//! interval arithmetic. The search follows the constructive argument: shrink
//! radii `r_n`, then a radius `t` in `(r_n^{1-2 alpha}, r_n)` where the minimum
//! modulus is within `e^2` of `M(r_n^{1-2 alpha})`.

use crate::entire::{EntireError, EntireFunction, LogValue};
use crate::growth::{build_ladder, fill_eps, EpsSettings, GrowthError, GrowthTable};
use crate::xnum::{from_decimal, to_decimal, Dir, Enclosure, ExtReal, Verdict, XnumError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error("no witness among {} probes", .probes.len())]
    NoWitnessFound { probes: Vec<Probe> },
    #[error("growth hypothesis fails: {0}")]
    HypothesisFails(String),
    #[error("no N satisfies the size conditions within the table")]
    NoValidN,
    #[error("witness search failed at rung {0}")]
    WitnessSearchFailed(usize),
    #[error("ladder precision lost at rung {0}")]
    LadderPrecisionLost(usize),
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error(transparent)]
    Entire(#[from] EntireError),
    #[error(transparent)]
    Xnum(#[from] XnumError),
}

impl From<GrowthError> for CertError {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::PrecisionLost(n) => CertError::LadderPrecisionLost(n),
            GrowthError::Entire(e) => CertError::Entire(e),
            GrowthError::Xnum(e) => CertError::Xnum(e),
            other => CertError::HypothesisFails(other.to_string()),
        }
    }
}

/// One tried radius and the margin `lhs.lo - rhs.hi` when it was finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub u_t: ExtReal,
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalCosWitness {
    pub u_r: ExtReal,
    pub alpha: ExtReal,
    pub u_t: ExtReal,
    /// `log m(t)`.
    pub lhs: Enclosure,
    /// `log M(r^{1-2 alpha}) - 2`.
    pub rhs: Enclosure,
}

impl LocalCosWitness {
    /// Re-evaluates both sides and the position of `t`.
    pub fn recheck(&self, f: &EntireFunction) -> Verdict {
        let lower = lower_end(&self.u_r, &self.alpha);
        let inside = Verdict::all([Enclosure::point(self.u_t.clone()).gt(&lower), Enclosure::point(self.u_t.clone()).lt(&Enclosure::point(self.u_r.clone()))]);
        let rhs = match f.log_max_modulus(&lower) {
            Ok(m) => m.sub(&Enclosure::from_f64(2.0)),
            Err(_) => return Verdict::Indeterminate,
        };
        let lhs = match f.log_min_modulus(&Enclosure::point(self.u_t.clone())) {
            Ok(LogValue::Finite(e)) => e,
            Ok(LogValue::NegInfinity) => return Verdict::Falsified,
            _ => return Verdict::Indeterminate,
        };
        inside.and(lhs.gt(&rhs))
    }
}

/// `u_r (1 - 2 alpha)`.
fn lower_end(u_r: &ExtReal, alpha: &ExtReal) -> Enclosure {
    let a = Enclosure::point(alpha.clone());
    Enclosure::from_f64(1.0).sub(&a.mul_pow2(1)).mul(&Enclosure::point(u_r.clone()))
}

/// Smallest `u = log r` on the scan grid `2^(j/16)` with `log M >= 2`.
pub fn radius_rf(f: &EntireFunction) -> Result<ExtReal, CertError> {
    let two = Enclosure::from_f64(2.0);
    for j in -160..=400 {
        let u = ExtReal::from_f64(2f64.powf(j as f64 / 16.0));
        if f.log_max_modulus(&Enclosure::point(u.clone()))?.ge(&two) == Verdict::Verified {
            return Ok(u);
        }
    }
    Err(CertError::HypothesisFails("log M stays below 2 on the scan grid".into()))
}

/// Looks for `t` in `(r^{1-2 alpha}, r)` with `log m(t) > log M(r^{1-2 alpha}) - 2`.
/// Among the successful probes the one with the largest `log m(t)` is kept.
pub fn find_witness(f: &EntireFunction, u_r: &ExtReal, alpha: &ExtReal) -> Result<LocalCosWitness, CertError> {
    let half = ExtReal::from_f64(0.5);
    if !alpha.is_positive() || alpha >= &half {
        return Err(CertError::HypothesisFails("alpha must lie in (0, 1/2)".into()));
    }
    let ur = Enclosure::point(u_r.clone());
    let lm = f.log_max_modulus(&ur)?;
    if !lm.lo().is_positive() {
        return Err(CertError::HypothesisFails("log M(r) is not positive".into()));
    }
    // log M(r) <= r^alpha, in logs
    if lm.ln()?.le(&Enclosure::point(alpha.clone()).mul(&ur)) != Verdict::Verified {
        return Err(CertError::HypothesisFails("log M(r) <= r^alpha is not decisive".into()));
    }
    let lower = lower_end(u_r, alpha);
    if lower.ge(&Enclosure::point(radius_rf(f)?)) != Verdict::Verified {
        return Err(CertError::HypothesisFails("r^(1-2 alpha) >= r(f) is not decisive".into()));
    }
    let rhs = f.log_max_modulus(&lower)?.sub(&Enclosure::from_f64(2.0));
    let (a, b) = (lower.hi().clone(), u_r.clone());

    let mut probes_u = Vec::new();
    let mut knots = vec![a.clone()];
    knots.extend(f.zeros().iter().map(|z| z.log_a.clone()).filter(|l| l > &a && l < &b));
    knots.push(b.clone());
    for w in knots.windows(2) {
        probes_u.push(w[0].add_dir(&w[1], Dir::Down).mul_pow2(-1));
    }
    let nudge = ExtReal::scaled(1.0, (-20).into());
    probes_u.push(a.add_dir(&a.abs().mul_dir(&nudge, Dir::Up), Dir::Up));
    probes_u.push(b.sub_dir(&b.abs().mul_dir(&nudge, Dir::Up), Dir::Down));
    let span = b.sub_dir(&a, Dir::Down);
    for i in 1..=64 {
        let s = ExtReal::from_f64(i as f64 / 65.0);
        probes_u.push(a.add_dir(&span.mul_dir(&s, Dir::Down), Dir::Down));
    }

    let mut best: Option<LocalCosWitness> = None;
    let mut probes = Vec::new();
    for t in probes_u {
        if t <= a || t >= b {
            probes.push(Probe { u_t: t, margin: None });
            continue;
        }
        let lhs = match f.log_min_modulus(&Enclosure::point(t.clone()))? {
            LogValue::Finite(e) => e,
            _ => {
                probes.push(Probe { u_t: t, margin: None });
                continue;
            }
        };
        let margin = lhs.lo().sub_dir(rhs.hi(), Dir::Down);
        probes.push(Probe { u_t: t.clone(), margin: Some(margin.to_f64()) });
        if margin.is_positive() && best.as_ref().is_none_or(|w| lhs.lo() > w.lhs.lo()) {
            best = Some(LocalCosWitness { u_r: u_r.clone(), alpha: alpha.clone(), u_t: t, lhs, rhs: rhs.clone() });
        }
    }
    best.ok_or(CertError::NoWitnessFound { probes })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeurlingReport {
    /// Sampled `u`-measure of `{t : log m(t) <= mu}`.
    pub measure_e: f64,
    /// Smallest cell width used by the sampling.
    pub resolution: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Sampled check of `log(M(r2)/mu) > exp(|E|/2) log(M(r1)/mu) / 2`. Advisory only.
pub fn beurling_spotcheck(f: &EntireFunction, u_r1: f64, u_r2: f64, mu_log: f64, samples: usize) -> BeurlingReport {
    let lm = |u: f64| f.log_max_modulus(&Enclosure::from_f64(u)).map(|e| e.mid().to_f64()).unwrap_or(f64::INFINITY);
    let in_e = |u: f64| match f.log_min_modulus(&Enclosure::from_f64(u)) {
        Ok(LogValue::Finite(e)) => e.mid().to_f64() <= mu_log,
        Ok(LogValue::UpperOnly(h)) => h.to_f64() <= mu_log,
        Ok(LogValue::NegInfinity) => true,
        Err(_) => false,
    };
    let samples = samples.max(1);
    let h = (u_r2 - u_r1) / samples as f64;
    let refine = 64usize;
    let mut measure = 0.0;
    let mut prev = in_e(u_r1);
    for i in 0..samples {
        let (x, y) = (u_r1 + i as f64 * h, u_r1 + (i + 1) as f64 * h);
        let next = in_e(y);
        let has_zero = f.zeros().iter().any(|z| {
            let l = z.log_a.to_f64();
            l >= x && l <= y
        });
        if has_zero || next != prev {
            let k = h / refine as f64;
            measure += (0..refine).filter(|&j| in_e(x + (j as f64 + 0.5) * k)).count() as f64 * k;
        } else if in_e(x + h / 2.0) {
            measure += h;
        }
        prev = next;
    }
    let lhs = lm(u_r2) - mu_log;
    let rhs = 0.5 * (0.5 * measure).exp() * (lm(u_r1) - mu_log);
    BeurlingReport { measure_e: measure, resolution: h / refine as f64, lhs, rhs, holds: lhs > rhs }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertLadder {
    pub n0: usize,
    /// The eps values used, `eps_N ..`.
    pub eps: Vec<ExtReal>,
    pub shrink: Vec<Enclosure>,
    pub u_rn: Vec<Enclosure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Rung,
    MinModulus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub n: usize,
    pub rung: Verdict,
    /// Absent for the last index.
    pub min_modulus: Option<Verdict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    Complete(usize),
    FailedAt(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpidersWebCertificate {
    /// `log R'` with `R' = R_{N+1}`.
    pub log_base: Enclosure,
    pub n0: usize,
    pub rho: Vec<(usize, ExtReal)>,
    pub checks: Vec<CheckRecord>,
    pub status: CertStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertOutcome {
    Valid,
    InvalidAt { n: usize, which: Which },
    Indeterminate { n: usize, which: Which },
}

/// Decides `sum_{m=N}^{last} eps_m < 1/8`.
fn sum_condition(table: &GrowthTable, n0: usize, last: usize) -> Result<Verdict, CertError> {
    let mut sum = Enclosure::zero();
    for m in n0..=last {
        let e = table.eps_entry(m).and_then(|e| e.upper()).ok_or(CertError::LadderPrecisionLost(m))?;
        sum = sum.add(&Enclosure::point(e));
    }
    Ok(sum.lt(&Enclosure::ratio(1, 8)))
}

/// Decides `log R_{n+1} >= 16 n^2` for `N <= n <= last`, `log R_{N+1} >= 4 log R_N`
/// and `R_N >= r(f)`.
pub fn size_conditions(f: &EntireFunction, table: &GrowthTable, n0: usize, last: usize) -> Result<Verdict, CertError> {
    let mut v = Vec::new();
    for n in n0..=last {
        v.push(table.rung(n + 1)?.ge(&Enclosure::from_f64(16.0 * (n * n) as f64)));
    }
    let rn = table.rung(n0)?;
    v.push(table.rung(n0 + 1)?.ge(&rn.mul_pow2(2)));
    v.push(rn.ge(&Enclosure::point(radius_rf(f)?)));
    Ok(Verdict::all(v))
}

/// Picks `N` for a horizon-`h` certificate: the smallest `N >= 1` meeting the
/// eps-sum condition and the size conditions, or failing that the smallest
/// meeting the eps-sum condition alone. The certificate checks are decided
/// directly, so the size conditions only steer the search.
pub fn choose_n(f: &EntireFunction, table: &GrowthTable, horizon: usize) -> Result<usize, CertError> {
    let avail = table.eps.iter().filter(|e| e.upper().is_some()).map(|e| e.n).max().ok_or(CertError::NoValidN)?;
    let mut fallback = None;
    for n0 in 1..=avail {
        let last = n0 + horizon + 1;
        if last > avail || table.rung(last + 1).is_err() {
            if fallback.is_none() {
                // the table ran out before any N qualified
                return Err(CertError::LadderPrecisionLost(table.degraded_at.unwrap_or(avail + 1)));
            }
            break;
        }
        if sum_condition(table, n0, last)? != Verdict::Verified {
            continue;
        }
        if size_conditions(f, table, n0, last)? == Verdict::Verified {
            return Ok(n0);
        }
        fallback.get_or_insert(n0);
    }
    fallback.ok_or(CertError::NoValidN)
}

/// `s_n` and `log r_n` for `n = 0..=horizon + 1`.
pub fn cert_ladder(f: &EntireFunction, table: &GrowthTable, n0: usize, horizon: usize) -> Result<CertLadder, CertError> {
    let base = table.rung(n0 + 1)?.clone();
    let one = Enclosure::from_f64(1.0);
    let mut s = one.clone();
    let (mut eps, mut shrink, mut u_rn) = (Vec::new(), Vec::new(), Vec::new());
    for n in 0..=horizon + 1 {
        let m = n0 + n;
        let e = table.eps_entry(m).and_then(|e| e.upper()).ok_or(CertError::LadderPrecisionLost(m))?;
        let corr = Enclosure::from_f64(1.0).div(&Enclosure::from_f64(8.0 * (m * m) as f64))?;
        let factor = one.sub(&Enclosure::point(e.clone()).mul_pow2(1)).sub(&corr);
        s = s.mul(&factor);
        let mut u = s.mul(&base);
        for _ in 0..=n {
            u = f.log_max_modulus(&u)?;
        }
        eps.push(e);
        shrink.push(s.clone());
        u_rn.push(u);
    }
    Ok(CertLadder { n0, eps, shrink, u_rn })
}

/// Builds the ladder and eps table needed for a horizon-`h` certificate from
/// `R = e^log_r`.
pub fn growth_for_certificate(f: &EntireFunction, log_r: &Enclosure, horizon: usize) -> Result<GrowthTable, CertError> {
    let mut table = build_ladder(f, log_r, 2 * horizon + 12)?;
    fill_eps(f, &mut table, EpsSettings::default(), 0);
    Ok(table)
}

pub fn build_certificate(f: &EntireFunction, log_r: &Enclosure, horizon: usize) -> Result<SpidersWebCertificate, CertError> {
    let table = growth_for_certificate(f, log_r, horizon)?;
    build_certificate_from(f, &table, horizon)
}

pub fn build_certificate_from(f: &EntireFunction, table: &GrowthTable, horizon: usize) -> Result<SpidersWebCertificate, CertError> {
    let n0 = choose_n(f, table, horizon)?;
    let ladder = cert_ladder(f, table, n0, horizon)?;
    let mut rho = Vec::new();
    for n in 0..=horizon {
        // alpha is eps_{n+N+1}
        let u_r = ladder.u_rn[n].lo().clone();
        let w = find_witness(f, &u_r, &ladder.eps[n + 1]).map_err(|e| match e {
            CertError::Entire(_) | CertError::Xnum(_) => e,
            _ => CertError::WitnessSearchFailed(n),
        })?;
        rho.push((n, w.u_t));
    }
    let log_base = table.rung(n0 + 1)?.clone();
    let mut cert = SpidersWebCertificate { log_base, n0, rho, checks: Vec::new(), status: CertStatus::Complete(horizon) };
    let (checks, outcome) = evaluate(f, &cert);
    cert.checks = checks;
    if let CertOutcome::InvalidAt { n, .. } | CertOutcome::Indeterminate { n, .. } = outcome {
        cert.status = CertStatus::FailedAt(n);
    }
    Ok(cert)
}

fn evaluate(f: &EntireFunction, cert: &SpidersWebCertificate) -> (Vec<CheckRecord>, CertOutcome) {
    let mut checks = Vec::new();
    let mut first: Option<CertOutcome> = None;
    let note = |first: &mut Option<CertOutcome>, n, which, v: Verdict| {
        if first.is_none() {
            match v {
                Verdict::Verified => {}
                Verdict::Falsified => *first = Some(CertOutcome::InvalidAt { n, which }),
                Verdict::Indeterminate => *first = Some(CertOutcome::Indeterminate { n, which }),
            }
        }
    };
    let mut rung = Some(cert.log_base.clone());
    for (i, (n, u)) in cert.rho.iter().enumerate() {
        let rv = match &rung {
            Some(r) if r.lo().is_positive() => Enclosure::point(u.clone()).gt(r),
            _ => Verdict::Indeterminate,
        };
        note(&mut first, *n, Which::Rung, rv);
        let mv = cert.rho.get(i + 1).map(|(_, next)| match f.log_min_modulus(&Enclosure::point(u.clone())) {
            Ok(LogValue::Finite(e)) => e.ge(&Enclosure::point(next.clone())),
            Ok(LogValue::NegInfinity) => Verdict::Falsified,
            Ok(LogValue::UpperOnly(h)) if &h < next => Verdict::Falsified,
            _ => Verdict::Indeterminate,
        });
        if let Some(v) = mv {
            note(&mut first, *n, Which::MinModulus, v);
        }
        checks.push(CheckRecord { n: *n, rung: rv, min_modulus: mv });
        rung = rung.and_then(|r| f.log_max_modulus(&r).ok());
    }
    (checks, first.unwrap_or(CertOutcome::Valid))
}

/// Re-verifies `rho_n > M^n(R')` and `m(rho_n) >= rho_{n+1}` from scratch.
pub fn check_certificate(f: &EntireFunction, cert: &SpidersWebCertificate) -> CertOutcome {
    if cert.rho.is_empty() || cert.rho.iter().enumerate().any(|(i, (n, _))| *n != i) {
        return CertOutcome::Indeterminate { n: 0, which: Which::Rung };
    }
    evaluate(f, cert).1
}

#[derive(Serialize, Deserialize)]
struct CertDoc {
    #[serde(rename = "R")]
    log_r: (String, String),
    #[serde(rename = "N")]
    n: usize,
    rho: Vec<(usize, String)>,
    checks: Vec<CheckRecord>,
    status: CertStatus,
}

impl SpidersWebCertificate {
    /// `R` is written as the enclosure of `log R'`, `rho` as `log rho_n`.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = CertDoc {
            log_r: (to_decimal(self.log_base.lo()), to_decimal(self.log_base.hi())),
            n: self.n0,
            rho: self.rho.iter().map(|(n, u)| (*n, to_decimal(u))).collect(),
            checks: self.checks.clone(),
            status: self.status,
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, CertError> {
        let doc: CertDoc = serde_json::from_value(v.clone()).map_err(|e| CertError::Malformed(e.to_string()))?;
        // decimal text may round; widen so the base still encloses what was written
        let lo = from_decimal(&doc.log_r.0)?;
        let hi = from_decimal(&doc.log_r.1)?;
        if lo > hi {
            return Err(CertError::Malformed("R enclosure is reversed".into()));
        }
        let log_base = Enclosure::new(lo, hi).widen(4);
        let rho = doc.rho.iter().map(|(n, s)| Ok((*n, from_decimal(s)?))).collect::<Result<Vec<_>, CertError>>()?;
        Ok(SpidersWebCertificate { log_base, n0: doc.n, rho, checks: doc.checks, status: doc.status })
    }
}
