//! Decimal text form `±d.ddddEk` with an arbitrary-precision exponent `k`.
//!
//! Values inside the `f64` range use the shortest round-trip formatting of the
//! standard library. Larger exponents go through fixed-point logarithms of 2
//! and 10 computed with big integers at a precision that grows with `|k|`.

use super::ext::ExtReal;
use super::XnumError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// `ln 2 * 2^p`, truncated, using `sum 1/(k 2^k)`.
fn ln2_fixed(p: usize) -> BigInt {
    let g = p + 64;
    let one = BigInt::one() << g;
    let mut sum = BigInt::zero();
    for k in 1..=(g + 8) {
        sum += (&one >> k) / BigInt::from(k);
    }
    sum >> 64
}

/// `ln 1.25 * 2^p` via `2 atanh(1/9)`.
fn ln_five_quarters_fixed(p: usize) -> BigInt {
    let g = p + 64;
    let mut pw: BigInt = (BigInt::one() << g) / 9;
    let mut sum = BigInt::zero();
    let mut j = 0u64;
    while !pw.is_zero() {
        sum += &pw / BigInt::from(2 * j + 1);
        pw /= 81;
        j += 1;
    }
    (sum * 2) >> 64
}

fn ln10_fixed(p: usize) -> BigInt {
    ln2_fixed(p) * 3 + ln_five_quarters_fixed(p)
}

/// Splits `k * c / 2^p` into `(floor, fractional part as f64 pair)`.
fn scaled_parts(k: &BigInt, c: &BigInt, p: usize) -> (BigInt, f64, f64) {
    let t = k * c;
    let unit = BigInt::one() << p;
    let (q, r) = t.div_mod_floor(&unit);
    let hi_bits = &r >> (p - 53);
    let hi = hi_bits.to_f64().unwrap() / 2f64.powi(53);
    let rest = &r - (&hi_bits << (p - 53));
    let lo = (rest >> (p - 106)).to_f64().unwrap() / 2f64.powi(106);
    (q, hi, lo)
}

fn fmt_small(v: f64) -> String {
    let s = format!("{:e}", v.abs());
    let (m, e) = s.split_once('e').unwrap();
    let m = if m.contains('.') { m.to_string() } else { format!("{m}.0") };
    format!("{}{}E{}", if v < 0.0 { '-' } else { '+' }, m, e)
}

/// Serializes as `±d.ddddEk`.
pub fn to_decimal(x: &ExtReal) -> String {
    if x.is_zero() {
        return "+0.0E0".to_string();
    }
    if let Some(v) = x.to_f64_exact() {
        return fmt_small(v);
    }
    let e = x.exponent();
    let p = e.bits() as usize + 128;
    let l = (ln2_fixed(p) << p) / ln10_fixed(p);
    let (mut k, hi, lo) = scaled_parts(e, &l, p);
    // log10 |x| = k + hi + lo + log10(m)
    let lm = x.mantissa().log10();
    let s = hi + lm;
    let err = (hi - (s - (s - hi))) + (lm - (s - hi));
    let whole = s.floor();
    k += BigInt::from(whole as i64);
    let f = s - whole;
    let mut d = 10f64.powf(f) * (1.0 + (lo + err) * std::f64::consts::LN_10);
    if d >= 10.0 {
        d /= 10.0;
        k += 1;
    }
    let mut digits = format!("{:.16}", d);
    if digits.starts_with("10") {
        digits = format!("{:.16}", d / 10.0);
        k += 1;
    }
    format!("{}{}E{}", if x.is_negative() { '-' } else { '+' }, digits, k)
}

/// Parses `±d.ddddEk`; the sign and fractional digits are optional.
pub fn from_decimal(s: &str) -> Result<ExtReal, XnumError> {
    let t = s.trim();
    let (m, k) = match t.find(['E', 'e']) {
        Some(i) => (&t[..i], &t[i + 1..]),
        None => (t, "0"),
    };
    let k: BigInt = k.trim_start_matches('+').parse().map_err(|_| XnumError::Parse(format!("bad exponent in {s:?}")))?;
    let mv: f64 = m.parse().map_err(|_| XnumError::Parse(format!("bad mantissa in {s:?}")))?;
    if !mv.is_finite() {
        return Err(XnumError::Parse(format!("non-finite mantissa in {s:?}")));
    }
    if mv == 0.0 {
        return Ok(ExtReal::zero());
    }
    if let Some(ki) = k.to_i64() {
        if ki.abs() <= 290 {
            let v: f64 = format!("{m}e{ki}").parse().map_err(|_| XnumError::Parse(s.to_string()))?;
            if v.is_normal() {
                return Ok(ExtReal::from_f64(v));
            }
        }
    }
    // log2 |x| = log2|mv| + k log2(10)
    let p = k.bits() as usize + 128;
    let l = (ln10_fixed(p) << p) / ln2_fixed(p);
    let (mut n, hi, lo) = scaled_parts(&k, &l, p);
    let lm = mv.abs().log2();
    let s = hi + lm;
    let err = (hi - (s - (s - hi))) + (lm - (s - hi));
    let whole = s.floor();
    n += BigInt::from(whole as i64);
    let f = s - whole;
    let mant = f.exp2() * (1.0 + (lo + err) * std::f64::consts::LN_2);
    let signed = if mv < 0.0 { -mant } else { mant };
    Ok(ExtReal::scaled(signed, n))
}
