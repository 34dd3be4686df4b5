//! Elementary functions with outward rounding.
//!
//! Inside the native range the platform `libm` result is widened by a few
//! ulps. Outside it, arguments are reduced exactly through the binary
//! exponent before calling `libm`.

use super::enclosure::Enclosure;
use super::ext::{Dir, ExtReal};
use super::{precision, XnumError};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

const LIBM_ULPS: u32 = 4;

/// Bracket for `ln 2`.
pub const LN2: (f64, f64) = (f64::from_bits(0x3fe6_2e42_fefa_39ee), f64::from_bits(0x3fe6_2e42_fefa_39f0));
/// Bracket for `log2 e`.
pub const LOG2_E: (f64, f64) = (f64::from_bits(0x3ff7_1547_652b_82fd), f64::from_bits(0x3ff7_1547_652b_82ff));

fn ln2_enc() -> Enclosure {
    Enclosure::new(ExtReal::from_f64(LN2.0), ExtReal::from_f64(LN2.1))
}

fn pad(v: f64, ulps: u32, dir: Dir) -> ExtReal {
    let mut x = v;
    for _ in 0..ulps {
        x = match dir {
            Dir::Up => x.next_up(),
            Dir::Down => x.next_down(),
        };
    }
    ExtReal::from_f64(x)
}

fn pad_enc(v: f64, ulps: u32) -> Enclosure {
    Enclosure::new(pad(v, ulps, Dir::Down), pad(v, ulps, Dir::Up))
}

/// Same as `pad_enc` plus an absolute margin `abs`.
fn pad_enc_abs(v: f64, ulps: u32, abs: f64) -> Enclosure {
    let lo = pad(v, ulps, Dir::Down).sub_dir(&ExtReal::from_f64(abs), Dir::Down);
    let hi = pad(v, ulps, Dir::Up).add_dir(&ExtReal::from_f64(abs), Dir::Up);
    Enclosure::new(lo, hi)
}

/// `2^(-2^max_exp_bits)`, a positive stand-in for values below the exp range.
pub fn tiny_bound() -> ExtReal {
    let bits = precision().max_exp_bits;
    ExtReal::pow2(-(BigInt::one() << (bits as usize)))
}

/// Directed bound for `ln x`, `x > 0`.
pub fn ln_dir(x: &ExtReal, dir: Dir) -> Result<ExtReal, XnumError> {
    if !x.is_positive() {
        return Err(XnumError::DomainError("ln of a non-positive value".into()));
    }
    if let Some(v) = x.to_f64_exact() {
        if v == 1.0 {
            return Ok(ExtReal::zero());
        }
        return Ok(pad(v.ln(), LIBM_ULPS, dir));
    }
    let lm = if x.mantissa() == 1.0 { Enclosure::zero() } else { pad_enc(x.mantissa().ln(), LIBM_ULPS) };
    let e = Enclosure::from_bigint(x.exponent()).mul(&ln2_enc());
    let s = lm.add(&e);
    Ok(match dir {
        Dir::Down => s.lo().clone(),
        Dir::Up => s.hi().clone(),
    })
}

/// Directed bound for `exp x`.
pub fn exp_dir(x: &ExtReal, dir: Dir) -> Result<ExtReal, XnumError> {
    if x.is_zero() {
        return Ok(ExtReal::one());
    }
    if let Some(v) = x.to_f64_exact() {
        if v.abs() < 700.0 {
            return Ok(pad(v.exp(), LIBM_ULPS, dir));
        }
    }
    let limit = precision().max_exp_bits;
    match x.exponent().to_u64() {
        Some(e) if e <= limit => {}
        _ if x.exponent().is_negative() => return Ok(pad(1.0, 1, dir)),
        _ => return Err(XnumError::RangeExceeded(format!("exp argument exponent exceeds {limit} bits"))),
    }
    // x * log2(e) rounded so that the final bound stays on the requested side
    let l2e = match (dir, x.is_positive()) {
        (Dir::Down, true) | (Dir::Up, false) => LOG2_E.0,
        _ => LOG2_E.1,
    };
    let t = x.mul_dir(&ExtReal::from_f64(l2e), dir);
    let n = t.floor_bigint();
    let frac = match t.exp_i64() {
        Some(e) if e < 52 => {
            let tf = t.to_f64();
            tf - tf.floor()
        }
        _ => 0.0,
    };
    let y = if frac == 0.0 { pad(1.0, 0, dir) } else { pad(frac.exp2(), LIBM_ULPS, dir) };
    Ok(ExtReal::scaled(y.to_f64(), n))
}

/// Upper bound for `exp x` without the argument limit of [`exp_dir`]. Large
/// arguments get a power of two above the result; `None` only when even the
/// exponent of the result is out of reach.
pub fn exp_up_wide(x: &ExtReal) -> Option<ExtReal> {
    match exp_dir(x, Dir::Up) {
        Ok(v) => Some(v),
        Err(_) if x.is_negative() => Some(tiny_bound()),
        Err(_) => {
            if x.exp_i64().is_none_or(|e| e > 1 << 24) {
                return None;
            }
            let t = x.mul_dir(&ExtReal::from_f64(LOG2_E.1), Dir::Up);
            Some(ExtReal::pow2(t.floor_bigint() + 1))
        }
    }
}

/// `log(1 + e^x)`.
pub fn softplus(x: &ExtReal) -> Enclosure {
    let small = x.exp_i64().map(|e| e < -60).unwrap_or(x.exponent().is_negative());
    if x.is_zero() || small {
        return Enclosure::new(
            ExtReal::from_f64(LN2.0).steps(Dir::Down, 8),
            ExtReal::from_f64(LN2.1).steps(Dir::Up, 8),
        );
    }
    if let Some(v) = x.to_f64_exact() {
        if v.abs() <= 40.0 {
            return pad_enc(v.exp().ln_1p(), 2 * LIBM_ULPS);
        }
    }
    if x.is_negative() {
        // e^x (1 - e^x / 2) <= log(1 + e^x) <= e^x
        match (exp_dir(x, Dir::Down), exp_dir(x, Dir::Up)) {
            (Ok(lo), Ok(hi)) => {
                let lo = lo.mul_dir(&ExtReal::from_f64(1.0 - f64::EPSILON), Dir::Down);
                Enclosure::new(lo, hi)
            }
            _ => Enclosure::new(ExtReal::zero(), tiny_bound()),
        }
    } else {
        // x <= log(1 + e^x) <= x + e^-x
        let tail = match exp_dir(&x.neg(), Dir::Up) {
            Ok(t) => t,
            Err(_) => tiny_bound(),
        };
        Enclosure::new(x.clone(), x.add_dir(&tail, Dir::Up))
    }
}

/// `log|1 - e^x|`, undefined at `x = 0`.
pub fn logabs_one_minus_exp(x: &ExtReal) -> Result<Enclosure, XnumError> {
    if x.is_zero() {
        return Err(XnumError::ExactZero);
    }
    let small = x.exp_i64().map(|e| e < -60).unwrap_or(x.exponent().is_negative());
    if small {
        // |1 - e^x| = |x| (1 + x/2 + ...), so the log is ln|x| plus a term of size |x|
        let l = x.abs();
        let base = Enclosure::new(ln_dir(&l, Dir::Down)?, ln_dir(&l, Dir::Up)?);
        let corr = if x.is_positive() {
            Enclosure::new(ExtReal::zero(), l)
        } else {
            Enclosure::new(l.neg(), ExtReal::zero())
        };
        return Ok(base.add(&corr));
    }
    if let Some(v) = x.to_f64_exact() {
        if v.abs() <= 40.0 {
            let ulps = 4 * LIBM_ULPS;
            return Ok(if v < -1.0 {
                pad_enc((-v.exp()).ln_1p(), ulps)
            } else if v < 0.0 {
                pad_enc((-v.exp_m1()).ln(), ulps)
            } else if v <= 1.0 {
                pad_enc_abs(v.exp_m1().ln(), ulps, f64::EPSILON * 4.0)
            } else {
                pad_enc(v.exp_m1().ln(), ulps)
            });
        }
    }
    let margin = ExtReal::from_f64(1.0 + f64::EPSILON);
    if x.is_negative() {
        // -e^x (1 + eps) <= log(1 - e^x) <= -e^x
        match (exp_dir(x, Dir::Down), exp_dir(x, Dir::Up)) {
            (Ok(ylo), Ok(yhi)) => {
                let lo = yhi.mul_dir(&margin, Dir::Up).neg();
                Ok(Enclosure::new(lo, ylo.neg()))
            }
            _ => Ok(Enclosure::new(tiny_bound().neg(), ExtReal::zero())),
        }
    } else {
        // x - e^-x (1 + eps) <= log(e^x - 1) <= x
        let t = match exp_dir(&x.neg(), Dir::Up) {
            Ok(t) => t.mul_dir(&margin, Dir::Up),
            Err(_) => tiny_bound(),
        };
        Ok(Enclosure::new(x.sub_dir(&t, Dir::Down), x.clone()))
    }
}

/// Upper bound for the logistic function `1 / (1 + e^-x)`.
pub fn sigmoid_hi(x: &ExtReal) -> ExtReal {
    if !x.is_negative() {
        return ExtReal::one();
    }
    // 1/(1+e^-x) <= e^x for x < 0
    match exp_dir(x, Dir::Up) {
        Ok(v) => v.lesser(&ExtReal::one()),
        Err(_) => tiny_bound(),
    }
}
