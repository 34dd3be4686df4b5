//! Hand-built functions shared by the integration tests.

use spiderweb::entire::{Delta, EntireFunction, FamilyKind, ZeroEntry};
use spiderweb::xnum::ExtReal;

pub fn slow_growth() -> EntireFunction {
    EntireFunction::slow_growth(1e6f64.ln(), 40)
}

pub fn small_truncated() -> EntireFunction {
    let z = [(5.0, 1), (12.0, 2), (30.0, 5), (70.0, 40)];
    EntireFunction::new(z.iter().map(|&(l, p)| ZeroEntry::with_p(ExtReal::from_f64(l), p)).collect(), FamilyKind::Truncated)
        .unwrap()
}

pub fn delta_ledger() -> EntireFunction {
    let d = Delta::new(2, 5);
    let z = [14.0, 200.0, 3000.0].iter().map(|&l| ZeroEntry::from_delta(ExtReal::from_f64(l), d).unwrap()).collect();
    EntireFunction::new(z, FamilyKind::FullFamily).unwrap()
}

pub fn wide_truncated() -> EntireFunction {
    let z = [(3.0, 1), (8.5, 3), (9.0, 1), (21.0, 17), (60.0, 250), (61.5, 2), (400.0, 1000)];
    EntireFunction::new(z.iter().map(|&(l, p)| ZeroEntry::with_p(ExtReal::from_f64(l), p)).collect(), FamilyKind::Truncated)
        .unwrap()
}

pub fn steep_family() -> EntireFunction {
    let d = Delta::new(9, 20);
    let z = [186.5, 9000.0].iter().map(|&l| ZeroEntry::from_delta(ExtReal::from_f64(l), d).unwrap()).collect();
    EntireFunction::new(z, FamilyKind::FullFamily).unwrap()
}

/// The five ledgers with the `u` range on which every value is determined.
pub fn all() -> Vec<(&'static str, EntireFunction, f64, f64)> {
    vec![
        ("slow-growth", slow_growth(), 0.1, 5000.0),
        ("small-truncated", small_truncated(), 0.1, 69.0),
        ("delta-ledger", delta_ledger(), 0.1, 5900.0),
        ("wide-truncated", wide_truncated(), 0.1, 399.0),
        ("steep-family", steep_family(), 0.1, 17000.0),
    ]
}
