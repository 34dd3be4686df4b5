//! Orbits on the negative real axis and their escape speed measured against
//! the ladder `M^n(R)`.
//!
//! For this family `f(-t) = -t^3 prod (1 - t/a_n)^{2p_n}`, so `f` maps
//! `(-inf, 0]` into itself and `|f(-t)|` is `exp(log_m(log t))`. Orbits are
//! tracked by `log |f^n(x)|` only.

use crate::entire::{EntireError, EntireFunction, LogValue};
use crate::growth::{certified_width, GrowthTable};
use crate::xnum::{to_decimal, Enclosure, ExtReal, Verdict};
use serde::Serialize;

/// `log |f^n(x)|`.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitPoint {
    /// The iterate is exactly 0.
    Zero,
    Log(Enclosure),
    /// Only an upper bound is known; the orbit stops here.
    Upper(ExtReal),
}

impl OrbitPoint {
    fn text(&self) -> serde_json::Value {
        match self {
            OrbitPoint::Zero => serde_json::json!("zero"),
            OrbitPoint::Log(e) => serde_json::json!([to_decimal(e.lo()), to_decimal(e.hi())]),
            OrbitPoint::Upper(v) => serde_json::json!({ "upper": to_decimal(v) }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    /// `log |x0|`, `None` for `x0 = 0`.
    pub x0_log: Option<ExtReal>,
    pub logs: Vec<OrbitPoint>,
    /// Every iterate stays in `(-inf, 0]`.
    pub sign_note: bool,
    pub n_max: usize,
    /// First iterate whose enclosure grew wider than 1 and 1e-6 relative, or could not be evaluated.
    pub degraded_at: Option<usize>,
    pub hit_zero: bool,
}

impl OrbitRecord {
    /// Index of the last iterate with a two-sided enclosure or exact zero.
    pub fn reached(&self) -> usize {
        self.logs.iter().take_while(|p| !matches!(p, OrbitPoint::Upper(_))).count().saturating_sub(1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "x0_log": self.x0_log.as_ref().map(to_decimal),
            "n_max": self.n_max,
            "degraded_at": self.degraded_at,
            "hit_zero": self.hit_zero,
            "sign_note": self.sign_note,
            "logs": self.logs.iter().map(OrbitPoint::text).collect::<Vec<_>>(),
        })
    }
}

/// Iterates `f` from `x0 = -exp(x0_log)` (or `x0 = 0`) up to `n_max` times.
pub fn orbit(f: &EntireFunction, x0_log: Option<&ExtReal>, n_max: usize) -> OrbitRecord {
    let mut rec = OrbitRecord {
        x0_log: x0_log.cloned(),
        logs: Vec::with_capacity(n_max + 1),
        sign_note: true,
        n_max,
        degraded_at: None,
        hit_zero: false,
    };
    let Some(u0) = x0_log else {
        rec.logs = vec![OrbitPoint::Zero; n_max + 1];
        return rec;
    };
    let mut cur = Enclosure::point(u0.clone());
    rec.logs.push(OrbitPoint::Log(cur.clone()));
    for n in 1..=n_max {
        let next = match f.log_min_modulus(&cur) {
            Ok(LogValue::Finite(e)) => e,
            Ok(LogValue::NegInfinity) => {
                rec.hit_zero = true;
                rec.logs.resize(n_max + 1, OrbitPoint::Zero);
                return rec;
            }
            Ok(LogValue::UpperOnly(v)) => {
                rec.logs.push(OrbitPoint::Upper(v));
                rec.degraded_at = Some(n);
                return rec;
            }
            Err(EntireError::Xnum(_)) | Err(_) => {
                rec.degraded_at = Some(n);
                return rec;
            }
        };
        if !certified_width(&next) {
            rec.logs.push(OrbitPoint::Upper(next.hi().clone()));
            rec.degraded_at = Some(n);
            return rec;
        }
        rec.logs.push(OrbitPoint::Log(next.clone()));
        cur = next;
    }
    rec
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class", content = "detail")]
pub enum EscapeClass {
    FastWithLag(usize),
    EscapingNotFastAtHorizon,
    BoundedAtHorizon,
    Undecided(String),
}

impl EscapeClass {
    pub fn name(&self) -> &'static str {
        match self {
            EscapeClass::FastWithLag(_) => "fast_with_lag",
            EscapeClass::EscapingNotFastAtHorizon => "escaping_not_fast_at_horizon",
            EscapeClass::BoundedAtHorizon => "bounded_at_horizon",
            EscapeClass::Undecided(_) => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: EscapeClass,
    /// Verdict of `|f^{n+l}(x)| >= M^n(R)` for all `n <= n_max - l`, by lag `l`.
    pub lag_verdicts: Vec<Verdict>,
    pub n_reached: usize,
    pub first_indeterminate: Option<String>,
    pub orbit: OrbitRecord,
}

fn compare(point: Option<&OrbitPoint>, rung: Option<&Enclosure>) -> Verdict {
    match (point, rung) {
        (Some(OrbitPoint::Zero), _) => Verdict::Falsified,
        (Some(OrbitPoint::Log(e)), Some(r)) => e.ge(r),
        (Some(OrbitPoint::Upper(v)), Some(r)) if v < r.lo() => Verdict::Falsified,
        _ => Verdict::Indeterminate,
    }
}

/// Escape class of `x0 = -exp(x0_log)` at horizon `(lag_max, n_max)`;
/// `table` holds `log M^n(R)`.
pub fn classify(f: &EntireFunction, table: &GrowthTable, x0_log: Option<&ExtReal>, lag_max: usize, n_max: usize) -> Classification {
    let orbit = orbit(f, x0_log, n_max + lag_max);
    let n_reached = orbit.reached();
    let mut lag_verdicts = Vec::new();
    let mut first_indeterminate = None;
    for lag in 0..=lag_max {
        let mut all = Verdict::Verified;
        for n in 0..=n_max {
            let v = compare(orbit.logs.get(n + lag), table.rung(n).ok());
            if v == Verdict::Indeterminate && first_indeterminate.is_none() {
                first_indeterminate = Some(format!("n = {n}, lag = {lag}"));
            }
            all = all.and(v);
            if all == Verdict::Falsified {
                break;
            }
        }
        lag_verdicts.push(all);
    }
    // once an iterate lies in [-1, 0] the orbit stays there: |f(-t)| <= t^3
    let bounded = orbit.logs.iter().any(|p| match p {
        OrbitPoint::Zero => true,
        OrbitPoint::Log(e) => !e.hi().is_positive(),
        OrbitPoint::Upper(v) => !v.is_positive(),
    });
    let class = if let Some(l) = lag_verdicts.iter().position(|v| *v == Verdict::Verified) {
        EscapeClass::FastWithLag(l)
    } else if bounded && f.zeros().iter().all(|z| !z.log_a.is_negative()) {
        EscapeClass::BoundedAtHorizon
    } else if lag_verdicts.iter().all(|v| *v == Verdict::Falsified) && escaping_tail(&orbit, table) {
        EscapeClass::EscapingNotFastAtHorizon
    } else {
        EscapeClass::Undecided(
            first_indeterminate.clone().unwrap_or_else(|| format!("orbit neither bounded nor growing by n = {n_reached}")),
        )
    };
    Classification { class, lag_verdicts, n_reached, first_indeterminate, orbit }
}

/// The orbit reaches the horizon, ends above `R`, and grows over its last three iterates.
fn escaping_tail(orbit: &OrbitRecord, table: &GrowthTable) -> bool {
    if orbit.degraded_at.is_some() || orbit.logs.len() < 4 {
        return false;
    }
    let Ok(r0) = table.rung(0) else { return false };
    let tail: Vec<&Enclosure> = orbit.logs[orbit.logs.len() - 3..]
        .iter()
        .filter_map(|p| match p {
            OrbitPoint::Log(e) => Some(e),
            _ => None,
        })
        .collect();
    tail.len() == 3 && tail[2].gt(r0) == Verdict::Verified && tail.windows(2).all(|w| w[1].gt(w[0]) == Verdict::Verified)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayRow {
    pub u: ExtReal,
    pub class: EscapeClass,
    pub n_reached: usize,
    pub first_indeterminate: Option<String>,
}

/// Classifies `samples` points `-exp(u)`, `u` evenly spaced on `[u_lo, u_hi]`.
pub fn ray_scan(
    f: &EntireFunction,
    table: &GrowthTable,
    u_lo: f64,
    u_hi: f64,
    samples: usize,
    lag_max: usize,
    n_max: usize,
) -> Vec<RayRow> {
    (0..samples)
        .map(|i| {
            let t = if samples == 1 { 0.5 } else { i as f64 / (samples - 1) as f64 };
            let u = ExtReal::from_f64(u_lo + t * (u_hi - u_lo));
            let c = classify(f, table, Some(&u), lag_max, n_max);
            RayRow { u, class: c.class, n_reached: c.n_reached, first_indeterminate: c.first_indeterminate }
        })
        .collect()
}

pub const RAY_CSV_HEADER: [&str; 5] = ["u", "class", "lag", "n_reached", "first_indeterminate"];

pub fn ray_csv_rows(rows: &[RayRow]) -> Vec<[String; 5]> {
    rows.iter()
        .map(|r| {
            let lag = match r.class {
                EscapeClass::FastWithLag(l) => l.to_string(),
                _ => String::new(),
            };
            [to_decimal(&r.u), r.class.name().to_string(), lag, r.n_reached.to_string(), r.first_indeterminate.clone().unwrap_or_default()]
        })
        .collect()
}
