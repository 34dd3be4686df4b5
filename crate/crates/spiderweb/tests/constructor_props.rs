mod common;

use common::model;
use common::oracle::{inside, Big};
use proptest::prelude::*;
use spiderweb::constructor::*;
use spiderweb::entire::{p_from_delta, Delta, EntireFunction, FamilyKind, PCount, ZeroEntry};
use spiderweb::growth::{build_ladder, fill_eps, EpsSettings};
use spiderweb::xnum::{Enclosure, ExtReal, Verdict};
use std::sync::OnceLock;

fn x(v: f64) -> ExtReal {
    ExtReal::from_f64(v)
}

fn ln10() -> Enclosure {
    Enclosure::from_f64(10.0).ln().unwrap()
}

fn steep() -> DeltaSpec {
    DeltaSpec::Constant(Delta::new(9, 20))
}

/// Constant delta = 9/20 from `a_1 >= 10^65`; runs until precision gives out.
fn run_constructed() -> (ConstructionState, ConstructError) {
    let mut s = ConstructionState::init(steep(), x(1e65f64.ln()), ConstructSettings::default()).unwrap();
    let err = s.run_schedule(1).unwrap_err();
    (s, err)
}

fn constructed() -> &'static ConstructionState {
    static S: OnceLock<ConstructionState> = OnceLock::new();
    S.get_or_init(|| run_constructed().0)
}

/// Zeros whose `p` is exact, in oracle form.
fn exact_zeros(s: &ConstructionState) -> Vec<(Big, Big)> {
    s.zeros
        .iter()
        .filter_map(|z| match &z.p {
            PCount::Exact(p) => Some((Big::from_ext(&z.log_a), Big::from_bigint(p).mul_pow2(1))),
            PCount::Approx(_) => None,
        })
        .collect()
}

#[test]
fn init_examples() {
    let p = p_from_delta(&x(1e8f64.ln()), Delta::new(2, 5)).unwrap();
    assert_eq!(p, PCount::Exact(1.into()));
    assert!(ConstructionState::init(DeltaSpec::Constant(Delta::new(2, 5)), x(1e8f64.ln()), Default::default()).is_ok());
    let e = ConstructionState::init(DeltaSpec::Constant(Delta::new(2, 5)), x(10f64.ln()), Default::default());
    assert!(matches!(e, Err(ConstructError::ConstraintViolation(_))));
    let s = ConstructionState::init(steep(), x(200.0), Default::default()).unwrap();
    assert!(inside(&Big::int(10).ln(), s.ladder_enc[0].lo(), s.ladder_enc[0].hi()));
    assert!(s.zeros.is_empty());
}

#[test]
fn ladder_jump_matches_oracle() {
    let mut s = ConstructionState::init(steep(), x(200.0), Default::default()).unwrap();
    s.adopt_ledger(vec![ZeroEntry::with_p(x(15.0), 7)]).unwrap();
    s.extend_ladder(5).unwrap();
    let z = exact_zeros(&s);
    for n in 1..=5 {
        // g keeps only the zeros at or below r
        let u = Big::from_ext(&s.ladder[n - 1]);
        let below: Vec<_> = z.iter().filter(|(l, _)| l.cmp(&u).is_le()).cloned().collect();
        let want = model::log_max(&below, &u);
        assert!(inside(&want, s.ladder_enc[n].lo(), s.ladder_enc[n].hi()), "rung {n}");
        assert!(s.ladder[n] >= s.ladder[n - 1].mul_dir(&x(3.0), spiderweb::xnum::Dir::Down));
    }
}

#[test]
fn blocked_placements_do_not_terminate() {
    let settings = ConstructSettings { step_budget: 25, ..Default::default() };
    let mut s = ConstructionState::init(steep(), x(1e300), settings).unwrap();
    let e = s.run_step(1).unwrap_err();
    assert_eq!(e, ConstructError::NonTermination { m: 1, budget: 25 });
    let t = &s.traces[0];
    assert!(t.placements.is_empty());
    assert_eq!(t.s.len(), 26);
    for (k, tk) in t.t.iter().enumerate() {
        assert!(tk.lo().to_f64() > 2.999, "T_{k} = {}", tk.lo().to_f64());
        // s_k is r_{m+k+1} exactly
        assert_eq!(t.s[k], s.ladder[k + 2]);
    }
    assert!(t.bracket.iter().all(|v| *v == Verdict::Verified));
}

#[test]
fn constructed_run_places_and_then_loses_precision() {
    let (s, err) = run_constructed();
    assert!(matches!(err, ConstructError::PrecisionLost(_)), "{err:?}");
    assert!(s.zeros.len() >= 2);
    // first placement lands on the first ladder point above the threshold
    assert_eq!(s.zeros[0].log_a, s.ladder[4]);
    for t in &s.traces {
        assert!(t.bracket.iter().all(|v| *v == Verdict::Verified));
        for p in &t.placements {
            assert_eq!(p.jump, Verdict::Verified);
            assert_eq!(p.small, Verdict::Verified);
        }
        assert!(!t.refused.is_empty());
    }
}

#[test]
fn ledger_constraints_hold_after_construction() {
    let s = constructed();
    let d = Enclosure::ratio(9, 20);
    for w in 0..s.zeros.len().saturating_sub(1) {
        let (a, b) = (&s.zeros[w], &s.zeros[w + 1]);
        let (la, lb) = (Enclosure::point(a.log_a.clone()), Enclosure::point(b.log_a.clone()));
        assert_eq!(lb.gt(&la.mul_pow2(1)), Verdict::Verified);
        assert_eq!(d.mul(&lb).mul_pow2(-4).gt(&d.mul(&la).add(&lb.ln().unwrap())), Verdict::Verified);
        let (pa, pb) = (a.p.enclosure(), b.p.enclosure());
        assert_eq!(pb.ge(&pa.mul(&pa).mul_pow2(1)), Verdict::Verified);
        assert!(s.zero_rungs[w + 1] >= s.zero_rungs[w] + 4);
    }
}

#[test]
fn construction_is_deterministic() {
    let a = run_constructed();
    let b = run_constructed();
    assert_eq!(a.0.to_json(), b.0.to_json());
    assert_eq!(a.1, b.1);
}

#[test]
fn small_modulus_on_first_zero() {
    let s = constructed();
    let r = s.verify_lemma_small(0, 32).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    let z = exact_zeros(s);
    for (u, _) in &r.samples {
        assert!(model::log_min(&z, &Big::from_ext(u)).sign() < 0);
    }
    // just inside -a_1
    let u = s.zeros[0].log_a.to_f64() + (1.0 - 2f64.powi(-10)).ln();
    assert!(model::log_min(&z, &Big::from_f64(u)).sign() < 0);
    let m = s.g_function().log_min_modulus(&Enclosure::from_f64(u)).unwrap();
    assert!(m.upper().is_none_or(|v| v.is_negative()));
}

#[test]
fn jump_checker_rejects_a_small_first_zero() {
    let mut s = ConstructionState::init(steep(), x(200.0), Default::default()).unwrap();
    let l = 1e9f64.ln();
    s.adopt_ledger(vec![ZeroEntry::from_delta(x(l), Delta::new(9, 20)).unwrap()]).unwrap();
    assert_eq!(s.zeros[0].p, PCount::Exact(2.into()));
    assert_eq!(s.verify_lemma_large(0).unwrap(), Verdict::Falsified);

    let l = 1e8f64.ln();
    s.adopt_ledger(vec![ZeroEntry::from_delta(x(l), Delta::new(2, 5)).unwrap()]).unwrap();
    assert_eq!(s.zeros[0].p, PCount::Exact(1.into()));
    assert_eq!(s.verify_lemma_large(0).unwrap(), Verdict::Verified);
}

#[test]
fn g_convexity_without_zeros_is_the_boundary_case() {
    let mut s = ConstructionState::init(steep(), x(1e300), Default::default()).unwrap();
    s.extend_ladder(6).unwrap();
    assert_ne!(s.verify_g_convexity(&x(5.0), &Enclosure::from_f64(2.0)).unwrap(), Verdict::Falsified);
    assert!(s.verify_g_convexity(&x(5.0), &Enclosure::from_f64(1.5)).is_err());
}

#[test]
fn g_cap_needs_the_gap() {
    let s = constructed();
    let (sv, tv) = (Enclosure::ratio(2, 5), Enclosure::ratio(3, 2));
    assert_eq!(s.verify_g_cap(&x(1000.0), &sv, &tv).unwrap(), Verdict::Verified);
    assert_eq!(s.verify_g_cap(&x(200.0), &sv, &tv), Err(ConstructError::GapConditionFails));
    let far = s.frontier().mul_dir(&x(2.0), spiderweb::xnum::Dir::Up);
    assert!(matches!(s.verify_g_cap(&far, &sv, &tv), Err(ConstructError::BeyondFrontier(_))));
}

#[test]
fn one_application_maps_each_ladder_interval_into_the_next() {
    let mut s = constructed().clone();
    for n in 0..s.ladder.len() - 2 {
        assert_eq!(s.check_inclusion(n, 1, n + 1).unwrap(), Verdict::Verified, "r_{n}");
    }
    // two applications land no further out than two rungs
    assert_eq!(s.check_inclusion(2, 2, 4).unwrap(), Verdict::Verified);
}

#[test]
fn spacing_and_eps_on_the_constructed_function() {
    let s = constructed();
    let f = s.function().unwrap();
    assert_eq!(f.kind(), FamilyKind::FullFamily);
    let mut t = build_ladder(&f, &ln10(), 7).unwrap();
    fill_eps(&f, &mut t, EpsSettings::default(), 0);
    let sp = s.verify_r_spacing(&t).unwrap();
    assert_ne!(sp.verdict, Verdict::Falsified, "{sp:?}");
    assert!(!sp.cube.is_empty());
    let eb = s.verify_eps_bounds(&t).unwrap();
    assert!(eb.monotone_subsequence);
    assert!(!eb.rows.is_empty());
    assert!(eb.rows.iter().all(|r| r.verdict != Verdict::Falsified), "{:?}", eb.rows);
}

#[test]
fn no_zeros_means_vacuous_spacing() {
    let mut s = ConstructionState::init(steep(), x(1e300), Default::default()).unwrap();
    s.extend_ladder(6).unwrap();
    let f = EntireFunction::cubic();
    let t = build_ladder(&f, &ln10(), 5).unwrap();
    let sp = s.verify_r_spacing(&t).unwrap();
    assert!(sp.per_zero.is_empty());
    assert_eq!(sp.verdict, Verdict::Verified);
}

#[test]
fn json_records_the_run() {
    let j = constructed().to_json();
    assert_eq!(j["delta"]["rule"], "constant");
    assert_eq!(j["delta"]["value"], "9/20");
    assert!(j["ladder"].as_array().unwrap().len() >= 5);
    assert!(!j["traces"][0]["placements"].as_array().unwrap().is_empty());
    assert_eq!(j["settings"]["step_budget"], 10_000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn envelope_bounds_the_image(u in 0.5f64..900.0, frac in 0.0f64..1.0) {
        let s = constructed();
        let z = exact_zeros(s);
        let v = u * frac.max(1e-3);
        let env = s.envelope(&x(u)).unwrap();
        let img = model::log_min(&z, &Big::from_f64(v));
        prop_assert!(img.to_f64() <= env.to_f64() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn g_convexity_on_constructed_ledger(u in 0.5f64..5000.0, t in 2.0f64..4.0) {
        let s = constructed();
        prop_assert_eq!(s.verify_g_convexity(&x(u), &Enclosure::from_f64(t)).unwrap(), Verdict::Verified);
    }
}

#[test]
fn json_reload_restores_ledger_and_ladder() {
    let s = constructed();
    let back = ConstructionState::from_json(&s.to_json()).unwrap();
    for (a, b) in back.zeros.iter().zip(&s.zeros) {
        assert_eq!(a.log_a, b.log_a);
        assert_eq!(a.delta, b.delta);
        match (&a.p, &b.p) {
            (PCount::Approx(x), PCount::Approx(y)) => assert!(x.lo() <= y.lo() && y.hi() <= x.hi()),
            (x, y) => assert_eq!(x, y),
        }
    }
    assert_eq!(back.zero_rungs, s.zero_rungs);
    assert_eq!(back.ladder, s.ladder);
    let checks = back.check_ledger_constraints().unwrap();
    assert!(checks.iter().all(|c| c.verdict == Verdict::Verified), "{checks:?}");
}

#[test]
fn corrupted_ledger_names_the_constraint() {
    let s = constructed();
    let mut j = s.to_json();
    let p = p_from_delta(&x(200.0), Delta::new(9, 20)).unwrap();
    let PCount::Exact(p) = p else { panic!() };
    j["ledger"]["zeros"][1]["log_a"] = serde_json::json!("200");
    j["ledger"]["zeros"][1]["p"] = serde_json::json!(p.to_string());
    let back = ConstructionState::from_json(&j).unwrap();
    let checks = back.check_ledger_constraints().unwrap();
    let bad: Vec<_> = checks.iter().filter(|c| c.verdict == Verdict::Falsified).collect();
    assert!(bad.iter().any(|c| c.zero == 2 && c.name == "a_{n+1} > a_n^2"), "{bad:?}");
}
