mod common;

use common::oracle::{inside, Big};
use common::{ledgers, model};
use proptest::prelude::*;
use spiderweb::constructor::{ConstructSettings, ConstructionState, DeltaSpec};
use spiderweb::entire::{Delta, EntireFunction};
use spiderweb::escape::*;
use spiderweb::growth::{build_ladder, GrowthTable};
use spiderweb::xnum::{Enclosure, ExtReal, Verdict};
use std::sync::OnceLock;

fn ln10() -> Enclosure {
    Enclosure::from_f64(10.0).ln().unwrap()
}

fn x(v: f64) -> ExtReal {
    ExtReal::from_f64(v)
}

struct Built {
    f: EntireFunction,
    table: GrowthTable,
    first_zero: f64,
}

/// The function left by the constant-delta construction, with its ladder from 10.
fn constructed() -> &'static Built {
    static B: OnceLock<Built> = OnceLock::new();
    B.get_or_init(|| {
        let mut s = ConstructionState::init(DeltaSpec::Constant(Delta::new(9, 20)), x(1e65f64.ln()), ConstructSettings::default())
            .unwrap();
        let _ = s.run_schedule(1);
        let f = s.function().unwrap();
        let table = build_ladder(&f, &ln10(), 8).unwrap();
        Built { first_zero: s.zeros[0].log_a.to_f64(), f, table }
    })
}

#[test]
fn cubic_orbit_is_powers_of_three() {
    let f = EntireFunction::cubic();
    let start = ln10().hi().clone();
    let o = orbit(&f, Some(&start), 20);
    assert_eq!(o.degraded_at, None);
    let mut want = Big::from_ext(&start);
    for (n, p) in o.logs.iter().enumerate() {
        let OrbitPoint::Log(e) = p else { panic!("iterate {n}") };
        assert!(inside(&want, e.lo(), e.hi()), "iterate {n}");
        want = want.mul(&Big::int(3));
    }
}

#[test]
fn cubic_hundred_is_fast_with_no_lag() {
    let f = EntireFunction::cubic();
    let t = build_ladder(&f, &ln10(), 12).unwrap();
    let c = classify(&f, &t, Some(&x(100f64.ln())), 3, 10);
    assert_eq!(c.class, EscapeClass::FastWithLag(0));
    assert_eq!(c.n_reached, 13);
}

#[test]
fn origin_is_bounded() {
    let b = constructed();
    let c = classify(&b.f, &b.table, None, 3, 5);
    assert_eq!(c.class, EscapeClass::BoundedAtHorizon);
    assert!(c.orbit.logs.iter().all(|p| *p == OrbitPoint::Zero));
}

#[test]
fn trough_point_falls_to_the_origin() {
    let b = constructed();
    let u0 = b.first_zero * (1.0 - 0.45 / 32.0);
    let c = classify(&b.f, &b.table, Some(&x(u0)), 3, 5);
    let z: Vec<_> = model::zeros(&EntireFunction::new(b.f.zeros()[..1].to_vec(), spiderweb::entire::FamilyKind::Truncated).unwrap());
    let want = model::log_min(&z, &Big::from_f64(u0));
    assert!(want.sign() < 0);
    let OrbitPoint::Log(e) = &c.orbit.logs[1] else { panic!() };
    assert!(inside(&want, e.lo(), e.hi()));
    assert_eq!(c.class, EscapeClass::BoundedAtHorizon);
    assert!(c.lag_verdicts.iter().all(|v| *v == Verdict::Falsified));
}

#[test]
fn cubic_ray_is_fast() {
    let f = EntireFunction::cubic();
    let t = build_ladder(&f, &ln10(), 10).unwrap();
    let rows = ray_scan(&f, &t, 3.0, 40.0, 16, 2, 8);
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.class == EscapeClass::FastWithLag(0)));
    let csv = ray_csv_rows(&rows);
    assert_eq!(csv[0][1], "fast_with_lag");
    assert_eq!(csv[0][2], "0");
    assert!(ray_scan(&f, &t, 3.0, 40.0, 0, 2, 8).is_empty());
}

#[test]
fn constructed_ray_through_the_trough_has_no_fast_points() {
    let b = constructed();
    let lo = b.first_zero * (1.0 - 0.45 / 16.0) + 0.01;
    let rows = ray_scan(&b.f, &b.table, lo, b.first_zero - 0.01, 12, 3, 5);
    assert!(rows.iter().all(|r| !matches!(r.class, EscapeClass::FastWithLag(_))));
    assert!(rows.iter().all(|r| r.class == EscapeClass::BoundedAtHorizon));
}

#[test]
fn orbit_json_lists_every_iterate() {
    let f = ledgers::slow_growth();
    let o = orbit(&f, Some(&x(3.0)), 4);
    let j = o.to_json();
    assert_eq!(j["logs"].as_array().unwrap().len(), o.logs.len());
    assert_eq!(j["sign_note"], true);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_image_stays_under_g(u in 0.5f64..5000.0) {
        let b = constructed();
        let o = orbit(&b.f, Some(&x(u)), 1);
        prop_assert!(o.sign_note);
        let g = b.f.log_g(&Enclosure::from_f64(u)).unwrap();
        match &o.logs[1] {
            OrbitPoint::Log(e) => prop_assert!(e.lo() <= g.hi()),
            OrbitPoint::Upper(v) => prop_assert!(v <= g.hi() || b.f.determined_below().is_some()),
            OrbitPoint::Zero => {}
        }
    }

    #[test]
    fn fast_lags_stay_fast(u in 2.4f64..60.0) {
        let f = ledgers::slow_growth();
        let t = build_ladder(&f, &ln10(), 9).unwrap();
        let c = classify(&f, &t, Some(&x(u)), 3, 4);
        if let Some(l) = c.lag_verdicts.iter().position(|v| *v == Verdict::Verified) {
            for v in &c.lag_verdicts[l..] {
                prop_assert_ne!(*v, Verdict::Falsified);
            }
        }
    }
}
