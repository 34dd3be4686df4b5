//! One function per subcommand. Each writes its files before reporting failure.

use crate::config::{log_of, parse_ext, RunConfig};
use crate::CliError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use spiderweb::certificate::{build_certificate, check_certificate, CertError, CertOutcome, CertStatus, SpidersWebCertificate};
use spiderweb::constructor::{ConstructError, ConstructionState};
use spiderweb::entire::EntireError;
use spiderweb::escape::{ray_csv_rows, ray_scan, RAY_CSV_HEADER};
use spiderweb::growth::{build_ladder, fill_eps, EpsSettings, GrowthError, CSV_HEADER};
use spiderweb::xnum::{to_decimal, Enclosure, ExtReal, Verdict, XnumError};
use std::fmt::Write as _;
use std::path::Path;

fn timestamp() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn io_err(p: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Internal(format!("{}: {e}", p.display()))
}

fn write_json(path: &Path, mut doc: Value) -> Result<(), CliError> {
    doc["timestamp"] = json!(timestamp());
    let text = serde_json::to_string_pretty(&doc).map_err(|e| io_err(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

fn write_csv<const N: usize>(path: &Path, header: [&str; N], rows: &[[String; N]]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn read_json(cfg: &RunConfig, p: &Path) -> Result<Value, CliError> {
    let p = cfg.resolve(p);
    let text = std::fs::read_to_string(&p).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))
}

fn xnum_err(e: &XnumError) -> CliError {
    match e {
        XnumError::RangeExceeded(_) => CliError::Indeterminate(format!("precision lost: {e}")),
        _ => CliError::Internal(e.to_string()),
    }
}

fn entire_err(e: &EntireError) -> CliError {
    match e {
        EntireError::Xnum(x) => xnum_err(x),
        EntireError::InvalidLedger(_) => CliError::Invalid(e.to_string()),
        _ => CliError::Indeterminate(e.to_string()),
    }
}

fn construct_err(e: &ConstructError) -> CliError {
    match e {
        ConstructError::ConstraintViolation(_) | ConstructError::GapConditionFails => CliError::Invalid(e.to_string()),
        ConstructError::Entire(x) => entire_err(x),
        ConstructError::Xnum(x) => xnum_err(x),
        ConstructError::Growth(g) => growth_err(g),
        _ => CliError::Indeterminate(e.to_string()),
    }
}

fn growth_err(e: &GrowthError) -> CliError {
    match e {
        GrowthError::BaseNotExpanding | GrowthError::NotApplicable(_) => CliError::Invalid(e.to_string()),
        GrowthError::PrecisionLost(n) => CliError::Indeterminate(format!("precision lost at rung {n}")),
        GrowthError::Entire(x) => entire_err(x),
        GrowthError::Xnum(x) => xnum_err(x),
    }
}

fn cert_err(e: &CertError) -> CliError {
    match e {
        CertError::LadderPrecisionLost(n) => CliError::Indeterminate(format!("precision lost at rung {n}")),
        CertError::WitnessSearchFailed(_) | CertError::NoWitnessFound { .. } => CliError::Indeterminate(e.to_string()),
        CertError::HypothesisFails(_) | CertError::NoValidN | CertError::Malformed(_) => CliError::Falsified(e.to_string()),
        CertError::Entire(x) => entire_err(x),
        CertError::Xnum(x) => xnum_err(x),
    }
}

pub fn construct(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let c = cfg.section(&cfg.construct, "construct")?;
    let log_a1 = parse_ext(&c.log_a1, "construct.log_a1")?;
    let mut st = ConstructionState::init(c.delta.clone(), log_a1, c.settings.unwrap_or_default()).map_err(|e| construct_err(&e))?;
    let res = st.run_schedule(c.k_max);
    let doc = json!({
        "config": cfg,
        "status": if res.is_ok() { "complete" } else { "stopped" },
        "error": res.as_ref().err().map(|e| e.to_string()),
        "construction": st.to_json(),
    });
    write_json(&out.join("construction.json"), doc)?;
    let summary = summary(&st, res.as_ref().err());
    std::fs::write(out.join("summary.txt"), summary).map_err(|e| io_err(out, e))?;
    res.map_err(|e| construct_err(&e))
}

fn summary(st: &ConstructionState, err: Option<&ConstructError>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "delta rule: {} ({})", st.delta, st.delta.divergence_note());
    let _ = writeln!(s, "zeros placed: {}", st.zeros.len());
    for (i, z) in st.zeros.iter().enumerate() {
        let p = z.p.enclosure();
        let _ = writeln!(s, "  a_{}: log a = {}, p in [{}, {}], rung r_{}", i + 1, to_decimal(&z.log_a), to_decimal(p.lo()), to_decimal(p.hi()), st.zero_rungs[i]);
    }
    let _ = writeln!(s, "ladder: r_0 ..= r_{}, log r_last = {}", st.ladder.len() - 1, to_decimal(st.ladder.last().expect("seeded")));
    for t in &st.traces {
        let ks: Vec<String> = t.placements.iter().map(|p| p.k.to_string()).collect();
        let n = t.k_term.map_or("not reached".to_string(), |k| k.to_string());
        let _ = writeln!(s, "step m = {}: N = {n}, {} radii, placements at k = [{}]", t.m, t.s.len(), ks.join(", "));
    }
    for e in &st.schedule {
        let _ = writeln!(s, "stage k = {}: N_k = {} ({:?}), inclusion {:?}", e.k, e.n_k, e.parts, e.inclusion);
    }
    let _ = writeln!(s, "status: {}", err.map_or("complete".to_string(), |e| e.to_string()));
    s
}

fn outcome_text(o: &CertOutcome) -> String {
    match o {
        CertOutcome::Valid => "valid".into(),
        CertOutcome::InvalidAt { n, which } => format!("invalid at n = {n} ({which:?})"),
        CertOutcome::Indeterminate { n, which } => format!("indeterminate at n = {n} ({which:?})"),
    }
}

fn outcome_result(o: &CertOutcome) -> Result<(), CliError> {
    match o {
        CertOutcome::Valid => Ok(()),
        CertOutcome::InvalidAt { .. } => Err(CliError::Falsified(outcome_text(o))),
        CertOutcome::Indeterminate { .. } => Err(CliError::Indeterminate(outcome_text(o))),
    }
}

pub fn certify(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let c = cfg.section(&cfg.certify, "certify")?;
    let f = cfg.function()?;
    if let Some(path) = &c.check {
        let cert = SpidersWebCertificate::from_json(&read_json(cfg, path)?).map_err(|e| CliError::Invalid(e.to_string()))?;
        let outcome = check_certificate(&f, &cert);
        write_json(&out.join("check.json"), json!({ "config": cfg, "outcome": outcome_text(&outcome) }))?;
        return outcome_result(&outcome);
    }
    match build_certificate(&f, &log_of(c.r), c.horizon) {
        Ok(cert) => {
            let outcome = check_certificate(&f, &cert);
            let mut doc = cert.to_json();
            doc["check"] = json!(outcome_text(&outcome));
            doc["config"] = json!(cfg);
            write_json(&out.join("certificate.json"), doc)?;
            match cert.status {
                CertStatus::Complete(_) => outcome_result(&outcome),
                CertStatus::FailedAt(n) => Err(CliError::Falsified(format!("certificate failed at n = {n}"))),
            }
        }
        Err(e) => {
            write_json(&out.join("certificate.json"), json!({ "config": cfg, "error": e.to_string() }))?;
            Err(cert_err(&e))
        }
    }
}

pub fn eps(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let c = cfg.section(&cfg.eps, "eps")?;
    let f = cfg.function()?;
    let mut t = build_ladder(&f, &log_of(c.r), c.horizon).map_err(|e| growth_err(&e))?;
    let s = EpsSettings { grid_density: c.grid_density, rel_tol: c.rel_tol, cell_budget: c.cell_budget };
    fill_eps(&f, &mut t, s, c.sum_from);
    write_csv(&out.join("eps.csv"), CSV_HEADER, &t.csv_rows())?;
    let mut doc = t.to_json();
    doc["config"] = json!(cfg);
    write_json(&out.join("eps.json"), doc)?;
    match t.degraded_at {
        Some(n) if n <= c.horizon => Err(CliError::Indeterminate(format!("precision lost at rung {n}; later rungs are estimates"))),
        _ => Ok(()),
    }
}

pub fn classify(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let c = cfg.section(&cfg.classify, "classify")?;
    let f = cfg.function()?;
    let t = build_ladder(&f, &log_of(c.r), c.n_max + 1).map_err(|e| growth_err(&e))?;
    let rows = ray_scan(&f, &t, c.u_lo, c.u_hi, c.samples, c.lag_max, c.n_max);
    write_csv(&out.join("rays.csv"), RAY_CSV_HEADER, &ray_csv_rows(&rows))
}

struct Check {
    name: String,
    verdict: Verdict,
    detail: String,
}

pub fn verify(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let c = cfg.section(&cfg.verify, "verify")?;
    let doc = read_json(cfg, &c.construction)?;
    let st = ConstructionState::from_json(&doc["construction"]).map_err(|e| CliError::Invalid(format!("construction file: {e}")))?;
    let mut checks: Vec<Check> = Vec::new();
    let mut add = |name: String, verdict: Verdict, detail: String| checks.push(Check { name, verdict, detail });

    for k in st.check_ledger_constraints().map_err(|e| construct_err(&e))? {
        add(format!("zero {}: {}", k.zero, k.name), k.verdict, String::new());
    }
    for t in &st.traces {
        add(format!("step m = {}: r_(m+k) <= s_k <= r_(m+k+1)", t.m), Verdict::all(t.bracket.iter().copied()), format!("{} radii", t.bracket.len()));
    }
    for i in 0..st.zeros.len() {
        let small = st.verify_lemma_small(i, c.small_samples).map_err(|e| construct_err(&e))?;
        add(format!("zero {}: |f| < 1 below a^(1-delta/16)", i + 1), small.verdict, format!("{} samples", small.samples.len()));
        let large = st.verify_lemma_large(i).map_err(|e| construct_err(&e))?;
        add(format!("zero {}: log g(a) >= p^(1/2) log g(a^(1-delta/16))", i + 1), large, String::new());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let top = st.frontier().to_f64().clamp(8.0, 1e300);
    let draw_u = |rng: &mut ChaCha8Rng, over: f64| (rng.gen_range(0.0..(top / over).ln().max(0.1))).exp();
    let mut conv = Vec::new();
    for _ in 0..c.convexity_pairs {
        let t = rng.gen_range(2.0..4.0);
        let u = draw_u(&mut rng, 4.0);
        conv.push(st.verify_g_convexity(&ExtReal::from_f64(u), &Enclosure::from_f64(t)).unwrap_or(Verdict::Indeterminate));
    }
    add("log g(r^t) >= t log g(r)".into(), Verdict::all(conv.iter().copied()), format!("{} pairs", conv.len()));
    let (mut cap, mut tries) = (Vec::new(), 0);
    while cap.len() < c.cap_pairs && tries < 20 * c.cap_pairs.max(1) {
        tries += 1;
        let s = rng.gen_range(0.05..0.45);
        let t = rng.gen_range(1.05..3.0);
        let u = draw_u(&mut rng, 3.0);
        match st.verify_g_cap(&ExtReal::from_f64(u), &Enclosure::from_f64(s), &Enclosure::from_f64(t)) {
            Ok(v) => cap.push(v),
            Err(ConstructError::GapConditionFails) => {}
            Err(_) => cap.push(Verdict::Indeterminate),
        }
    }
    add("log g(r^t) <= t (1 + 2s) log g(r)".into(), Verdict::all(cap.iter().copied()), format!("{} pairs", cap.len()));

    let f = st.function().map_err(|e| construct_err(&e))?;
    let mut t = build_ladder(&f, &log_of(10.0), c.eps_horizon).map_err(|e| growth_err(&e))?;
    fill_eps(&f, &mut t, EpsSettings::default(), 0);
    let sp = st.verify_r_spacing(&t).map_err(|e| construct_err(&e))?;
    add("zeros apart on the R_n ladder and g(R_n^3) > M(R_n)".into(), sp.verdict, format!("{} rungs", sp.cube.len()));
    match st.verify_eps_bounds(&t) {
        Ok(r) => {
            add("eps_n below delta_k / 3^(m-1) + 2^-(n_k+m)".into(), r.verdict, format!("{} rungs", r.rows.len()));
            if !r.monotone_subsequence {
                add("zero rungs increase".into(), Verdict::Indeterminate, "flag only".into());
            }
        }
        Err(e) => add("eps_n below delta_k / 3^(m-1) + 2^-(n_k+m)".into(), Verdict::Indeterminate, e.to_string()),
    }

    let list: Vec<Value> = checks.iter().map(|k| json!({ "check": k.name, "verdict": k.verdict, "detail": k.detail })).collect();
    write_json(&out.join("verify.json"), json!({ "config": cfg, "checks": list }))?;
    let names = |v: Verdict| checks.iter().filter(|k| k.verdict == v).map(|k| k.name.clone()).collect::<Vec<_>>();
    let bad = names(Verdict::Falsified);
    if !bad.is_empty() {
        return Err(CliError::Falsified(bad.join("; ")));
    }
    let open = names(Verdict::Indeterminate);
    if !open.is_empty() {
        return Err(CliError::Indeterminate(open.join("; ")));
    }
    Ok(())
}
