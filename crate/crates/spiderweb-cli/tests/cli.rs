use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

struct Run {
    code: i32,
    stderr: String,
}

fn run(cmd: &str, config: &Path, out: &Path) -> Run {
    let o = Command::new(env!("CARGO_BIN_EXE_spiderweb"))
        .args([cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .expect("binary runs");
    Run { code: o.status.code().unwrap_or(-1), stderr: String::from_utf8_lossy(&o.stderr).into_owned() }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn without_timestamp(p: &Path) -> Value {
    let mut v = json(p);
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

const CONSTRUCT: &str = r#"
version = 1
[construct]
delta = { rule = "constant", value = "9/20" }
log_a1 = "150"
k_max = 1
"#;

const SLOW: &str = r#"
version = 1
[function]
kind = "slow_growth"
log_a1 = 13.815510557964274
count = 40
"#;

#[test]
fn construct_stops_with_precision_lost_and_keeps_the_trace() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.toml", CONSTRUCT);
    let r = run("construct", &cfg, &d.path().join("out"));
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("precision lost"));
    let v = json(&d.path().join("out/construction.json"));
    assert_eq!(v["status"], "stopped");
    assert_eq!(v["construction"]["ledger"]["zeros"].as_array().unwrap().len(), 2);
    assert!(!v["construction"]["traces"][0]["log_s"].as_array().unwrap().is_empty());
    assert!(d.path().join("out/summary.txt").exists());
}

#[test]
fn delta_above_one_half_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.toml", &CONSTRUCT.replace("9/20", "3/5"));
    let r = run("construct", &cfg, &d.path().join("out"));
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("delta_n < 1/2"), "{}", r.stderr);
}

#[test]
fn wrong_schema_version_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.toml", &CONSTRUCT.replace("version = 1", "version = 7"));
    let r = run("construct", &cfg, &d.path().join("out"));
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("schema version"));
}

#[test]
fn construct_and_certify_are_byte_stable() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.toml", CONSTRUCT);
    run("construct", &cfg, &d.path().join("a"));
    run("construct", &cfg, &d.path().join("b"));
    assert_eq!(without_timestamp(&d.path().join("a/construction.json")), without_timestamp(&d.path().join("b/construction.json")));
    assert_eq!(std::fs::read(d.path().join("a/summary.txt")).unwrap(), std::fs::read(d.path().join("b/summary.txt")).unwrap());

    let cfg = write(d.path(), "s.toml", &format!("{SLOW}\n[certify]\nhorizon = 4\n"));
    run("certify", &cfg, &d.path().join("c"));
    run("certify", &cfg, &d.path().join("e"));
    assert_eq!(without_timestamp(&d.path().join("c/certificate.json")), without_timestamp(&d.path().join("e/certificate.json")));
}

#[test]
fn certify_slow_growth_then_catch_a_tampered_copy() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "s.toml", &format!("{SLOW}\n[certify]\nr = 10.0\nhorizon = 4\n"));
    let r = run("certify", &cfg, &d.path().join("out"));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut cert = json(&d.path().join("out/certificate.json"));
    assert_eq!(cert["status"]["complete"], 4);
    assert_eq!(cert["check"], "valid");

    let check = write(d.path(), "k.toml", &format!("{SLOW}\n[certify]\ncheck = \"cert.json\"\n"));
    std::fs::copy(d.path().join("out/certificate.json"), d.path().join("cert.json")).unwrap();
    assert_eq!(run("certify", &check, &d.path().join("k1")).code, 0);

    cert["rho"][1][1] = Value::from("+1.0E0");
    std::fs::write(d.path().join("cert.json"), cert.to_string()).unwrap();
    let r = run("certify", &check, &d.path().join("k2"));
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(json(&d.path().join("k2/check.json"))["outcome"].as_str().unwrap().starts_with("invalid"));
}

#[test]
fn certify_too_deep_reports_precision_loss() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "s.toml", &format!("{SLOW}\n[certify]\nhorizon = 14\n"));
    let r = run("certify", &cfg, &d.path().join("out"));
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("precision lost"));
}

#[test]
fn eps_on_the_cubic_follows_the_closed_form() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "e.toml", "version = 1\n[function]\nkind = \"cubic\"\n[eps]\nhorizon = 8\n");
    let r = run("eps", &cfg, &d.path().join("out"));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut rd = csv::Reader::from_path(d.path().join("out/eps.csv")).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["n", "log_Rn", "eps_lo", "eps_hi", "eps_certified_hi", "cumulative_sum_hi"]);
    let mut prev = f64::INFINITY;
    let mut rows = 0;
    for rec in rd.records() {
        let rec = rec.unwrap();
        if rec[3].is_empty() {
            continue;
        }
        let u: f64 = rec[1].parse().unwrap();
        let hi: f64 = rec[3].parse().unwrap();
        let want = (3.0 * u).ln() / u;
        assert!((hi - want).abs() <= 1e-9 * want, "row {}: {hi} vs {want}", &rec[0]);
        assert!(hi < prev);
        prev = hi;
        rows += 1;
    }
    assert_eq!(rows, 8);
}

#[test]
fn classify_writes_the_ray_table() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "r.toml",
        &format!("{SLOW}\n[classify]\nu_lo = 3.0\nu_hi = 60.0\nsamples = 10\nlag_max = 2\nn_max = 4\n"),
    );
    let r = run("classify", &cfg, &d.path().join("out"));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut rd = csv::Reader::from_path(d.path().join("out/rays.csv")).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["u", "class", "lag", "n_reached", "first_indeterminate"]);
    assert_eq!(rd.records().count(), 10);
}

#[test]
fn verify_passes_fresh_and_names_a_broken_constraint() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.toml", CONSTRUCT);
    run("construct", &cfg, &d.path().join("out"));
    let vcfg = write(d.path(), "v.toml", "version = 1\nseed = 3\n[verify]\nconstruction = \"out/construction.json\"\n");
    let r = run("verify", &vcfg, &d.path().join("v"));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let checks = json(&d.path().join("v/verify.json"))["checks"].as_array().unwrap().clone();
    assert!(checks.iter().all(|c| c["verdict"] == "Verified"));

    // move the second zero below a_1^2, keeping p consistent with its delta
    let mut v = json(&d.path().join("out/construction.json"));
    let z = &mut v["construction"]["ledger"]["zeros"][1];
    z["log_a"] = Value::from("200");
    z["p"] = Value::from(1_477_630_515u64);
    std::fs::write(d.path().join("out/construction.json"), v.to_string()).unwrap();
    let r = run("verify", &vcfg, &d.path().join("w"));
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(r.stderr.contains("a_{n+1} > a_n^2"), "{}", r.stderr);
}
