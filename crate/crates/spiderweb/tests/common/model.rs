//! Oracle evaluation of the ladder quantities straight from a ledger.

use super::oracle::Big;
use spiderweb::entire::{EntireFunction, PCount};

/// Listed zeros as `(log a, 2p)` in oracle precision.
pub fn zeros(f: &EntireFunction) -> Vec<(Big, Big)> {
    f.zeros()
        .iter()
        .map(|z| match &z.p {
            PCount::Exact(p) => (Big::from_ext(&z.log_a), Big::from_bigint(p).mul_pow2(1)),
            PCount::Approx(_) => panic!("oracle needs exact p"),
        })
        .collect()
}

/// `3u + sum 2p softplus(u - l)` over the listed zeros.
pub fn log_max(z: &[(Big, Big)], u: &Big) -> Big {
    let mut s = u.mul(&Big::int(3));
    for (l, tp) in z {
        let d = u.sub(l);
        // below about -700 the term is far under the tolerance of any test
        if d.to_f64() < -2000.0 {
            continue;
        }
        s = s.add(&tp.mul(&d.softplus()));
    }
    s
}

/// `ln(log M(u)) / u`.
pub fn maximand(z: &[(Big, Big)], u: &Big) -> Big {
    log_max(z, u).ln().div(u)
}

/// `log R_0 ..= log R_horizon` from `R_0 = 10`.
pub fn ladder(z: &[(Big, Big)], horizon: usize) -> Vec<Big> {
    let mut out = vec![Big::int(10).ln()];
    for _ in 0..horizon {
        let next = log_max(z, out.last().unwrap());
        out.push(next);
    }
    out
}

/// `3u + sum 2p log|1 - e^(u - l)|` over the listed zeros.
pub fn log_min(z: &[(Big, Big)], u: &Big) -> Big {
    let mut s = u.mul(&Big::int(3));
    for (l, tp) in z {
        let d = u.sub(l);
        if d.to_f64() < -2000.0 {
            continue;
        }
        s = s.add(&tp.mul(&d.logabs_one_minus_exp()));
    }
    s
}
