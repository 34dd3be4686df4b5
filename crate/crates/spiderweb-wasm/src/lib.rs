//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string, so the page
//! needs nothing beyond the generated glue.

use serde_json::{json, Value};
use spiderweb::constructor::{ConstructSettings, ConstructionState, DeltaSpec};
use spiderweb::entire::{Delta, EntireFunction, LogValue};
use spiderweb::escape::{ray_scan, EscapeClass};
use spiderweb::growth::{build_ladder, fill_eps, EpsSettings};
use spiderweb::xnum::{Enclosure, ExtReal};
use wasm_bindgen::prelude::*;

/// The demo functions, by name.
pub fn function(kind: &str) -> Result<EntireFunction, String> {
    match kind {
        "cubic" => Ok(EntireFunction::cubic()),
        "slow_growth" => Ok(EntireFunction::slow_growth(1e6f64.ln(), 40)),
        "constructed" => {
            let mut s = ConstructionState::init(
                DeltaSpec::Constant(Delta::new(9, 20)),
                ExtReal::from_f64(1e65f64.ln()),
                ConstructSettings::default(),
            )
            .map_err(|e| e.to_string())?;
            // the run stops with lost precision; the zeros placed so far are kept
            let _ = s.run_schedule(1);
            s.function().map_err(|e| e.to_string())
        }
        other => Err(format!("unknown function {other:?}")),
    }
}

fn mid(e: &Enclosure) -> Value {
    json!(e.mid().to_f64())
}

/// `log m`, `log g`, `log M` at `samples` evenly spaced `u = log r`.
pub fn curves_json(kind: &str, u_lo: f64, u_hi: f64, samples: usize) -> Result<Value, String> {
    if !(u_lo < u_hi) || samples < 2 {
        return Err("need u_lo < u_hi and at least 2 samples".into());
    }
    let f = function(kind)?;
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let u = u_lo + (u_hi - u_lo) * i as f64 / (samples - 1) as f64;
        let e = Enclosure::from_f64(u);
        let big_m = f.log_max_modulus(&e).ok();
        let g = f.log_g(&e).ok();
        let (m, m_upper) = match f.log_min_modulus(&e) {
            Ok(LogValue::Finite(v)) => (mid(&v), false),
            Ok(LogValue::UpperOnly(v)) => (json!(v.to_f64()), true),
            _ => (Value::Null, false),
        };
        rows.push(json!({
            "u": u,
            "log_m": m,
            "log_m_upper_only": m_upper,
            "log_g": g.as_ref().map(mid),
            "log_M": big_m.as_ref().map(mid),
        }));
    }
    let zeros: Vec<f64> = f.zeros().iter().map(|z| z.log_a.to_f64()).collect();
    Ok(json!({ "function": kind, "zeros": zeros, "rows": rows }))
}

/// `log R_n` and `eps_n` for `n <= horizon`, from `R = 10`.
pub fn eps_json(kind: &str, horizon: usize) -> Result<Value, String> {
    let f = function(kind)?;
    let mut t = build_ladder(&f, &Enclosure::from_f64(10.0).ln().map_err(|e| e.to_string())?, horizon).map_err(|e| e.to_string())?;
    fill_eps(&f, &mut t, EpsSettings::default(), 0);
    let header = spiderweb::growth::CSV_HEADER;
    let rows: Vec<Value> = t
        .csv_rows()
        .iter()
        .map(|r| Value::Object(header.iter().zip(r).map(|(k, v)| (k.to_string(), json!(v))).collect()))
        .collect();
    Ok(json!({ "function": kind, "degraded_at": t.degraded_at, "rows": rows }))
}

/// Escape class of `-exp(u)` for `samples` evenly spaced `u`.
pub fn rays_json(kind: &str, u_lo: f64, u_hi: f64, samples: usize, lag_max: usize, n_max: usize) -> Result<Value, String> {
    if !(u_lo < u_hi) {
        return Err("need u_lo < u_hi".into());
    }
    let f = function(kind)?;
    let t = build_ladder(&f, &Enclosure::from_f64(10.0).ln().map_err(|e| e.to_string())?, n_max + 1).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = ray_scan(&f, &t, u_lo, u_hi, samples, lag_max, n_max)
        .iter()
        .map(|r| {
            json!({
                "u": r.u.to_f64(),
                "class": r.class.name(),
                "lag": match r.class { EscapeClass::FastWithLag(l) => Some(l), _ => None },
                "n_reached": r.n_reached,
                "first_indeterminate": r.first_indeterminate,
            })
        })
        .collect();
    Ok(json!({ "function": kind, "rows": rows }))
}

#[wasm_bindgen]
pub fn curves(kind: &str, u_lo: f64, u_hi: f64, samples: usize) -> Result<String, String> {
    curves_json(kind, u_lo, u_hi, samples).map(|v| v.to_string())
}

#[wasm_bindgen]
pub fn eps_table(kind: &str, horizon: usize) -> Result<String, String> {
    eps_json(kind, horizon).map(|v| v.to_string())
}

#[wasm_bindgen]
pub fn classify_rays(kind: &str, u_lo: f64, u_hi: f64, samples: usize, lag_max: usize, n_max: usize) -> Result<String, String> {
    rays_json(kind, u_lo, u_hi, samples, lag_max, n_max).map(|v| v.to_string())
}
