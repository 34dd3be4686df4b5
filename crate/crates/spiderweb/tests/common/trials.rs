//! Randomized containment trials for the enclosure arithmetic.

use super::oracle::{inside, Big};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spiderweb::xnum::{logabs_one_minus_exp, softplus, Enclosure, ExtReal};

fn random_ext(rng: &mut ChaCha8Rng) -> ExtReal {
    let m: f64 = rng.gen_range(1.0..2.0);
    let e: i64 = match rng.gen_range(0..4) {
        0 => rng.gen_range(-8..8),
        1 => rng.gen_range(-60..60),
        2 => rng.gen_range(-1100..1100),
        _ => rng.gen_range(-3000..3000),
    };
    let s = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
    ExtReal::scaled(s * m, BigInt::from(e))
}

fn random_enc(rng: &mut ChaCha8Rng) -> Enclosure {
    let a = random_ext(rng);
    if rng.gen_bool(0.5) {
        return Enclosure::point(a);
    }
    let w: f64 = rng.gen_range(0.0..1e-6);
    let b = a.add_dir(&a.abs().mul_dir(&ExtReal::from_f64(w), spiderweb::xnum::Dir::Up), spiderweb::xnum::Dir::Up);
    Enclosure::new(a, b)
}

fn moderate(rng: &mut ChaCha8Rng, span: f64) -> ExtReal {
    ExtReal::from_f64(rng.gen_range(-span..span))
}

/// Outcome of one trial: operation name and whether the oracle value was inside.
pub struct Trial {
    pub op: &'static str,
    pub ok: bool,
}

fn check_points(op: &'static str, enc: &Enclosure, exact: &[Big]) -> Trial {
    Trial { op, ok: exact.iter().all(|v| inside(v, enc.lo(), enc.hi())) }
}

/// Runs `n` random operations and reports each against the oracle. Exact
/// results are evaluated at the corners of the operand enclosures.
pub fn containment(n: usize, seed: u64) -> Vec<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let kind = rng.gen_range(0..10);
        let t = match kind {
            0 | 1 | 2 | 3 => {
                let a = random_enc(&mut rng);
                let b = random_enc(&mut rng);
                let corners = |f: &dyn Fn(&Big, &Big) -> Big| {
                    let mut v = Vec::new();
                    for x in [a.lo(), a.hi()] {
                        for y in [b.lo(), b.hi()] {
                            v.push(f(&Big::from_ext(x), &Big::from_ext(y)));
                        }
                    }
                    v
                };
                match kind {
                    0 => check_points("add", &a.add(&b), &corners(&|x, y| x.add(y))),
                    1 => check_points("sub", &a.sub(&b), &corners(&|x, y| x.sub(y))),
                    2 => check_points("mul", &a.mul(&b), &corners(&|x, y| x.mul(y))),
                    _ => check_points("div", &a.div(&b).unwrap(), &corners(&|x, y| x.div(y))),
                }
            }
            4 => {
                let a = random_enc(&mut rng).abs();
                let a = if a.lo().is_zero() { Enclosure::from_f64(1.5) } else { a };
                let r = a.ln().unwrap();
                check_points("ln", &r, &[Big::from_ext(a.lo()).ln(), Big::from_ext(a.hi()).ln()])
            }
            5 => {
                let x = moderate(&mut rng, 2000.0);
                let r = Enclosure::point(x.clone()).exp().unwrap();
                check_points("exp", &r, &[Big::from_ext(&x).exp()])
            }
            6 => {
                let x = if rng.gen_bool(0.2) { random_ext(&mut rng) } else { moderate(&mut rng, 60.0) };
                let x = if x.exp_i64().unwrap() > 10 { ExtReal::from_f64(x.to_f64().clamp(-1500.0, 1500.0)) } else { x };
                check_points("softplus", &softplus(&x), &[Big::from_ext(&x).softplus()])
            }
            7 => {
                let x = if rng.gen_bool(0.3) {
                    ExtReal::from_f64(rng.gen_range(-1e-6..1e-6))
                } else {
                    moderate(&mut rng, 60.0)
                };
                if x.is_zero() {
                    continue;
                }
                check_points("logabs", &logabs_one_minus_exp(&x).unwrap(), &[Big::from_ext(&x).logabs_one_minus_exp()])
            }
            8 => {
                let a = Enclosure::from_f64(rng.gen_range(-4.0..4.0));
                let k: u32 = rng.gen_range(0..40);
                let r = a.pow_int(k as i64).unwrap();
                check_points("pow_int", &r, &[Big::from_ext(a.lo()).powi(k)])
            }
            _ => {
                let a = Enclosure::from_f64(rng.gen_range(0.01..50.0));
                let y = Enclosure::from_f64(rng.gen_range(-3.0..3.0));
                let r = a.pow_real(&y).unwrap();
                let exact = Big::from_ext(a.lo()).ln().mul(&Big::from_ext(y.lo())).exp();
                check_points("pow_real", &r, &[exact])
            }
        };
        out.push(t);
    }
    out
}

