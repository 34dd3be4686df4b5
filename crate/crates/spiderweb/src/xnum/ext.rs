//! Signed reals with a 53-bit significand and an unbounded binary exponent.
//!
//! Every arithmetic primitive takes a rounding direction and returns a value
//! that is a valid lower (`Dir::Down`) or upper (`Dir::Up`) bound for the exact
//! result. Residuals are recovered exactly with `TwoSum` and fused
//! multiply-add, so the bound is tight to one ulp.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Rounding direction for a single operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        }
    }
}

/// `sign * mant * 2^exp` with `mant` in `[1, 2)`.
#[derive(Clone, Debug)]
pub struct ExtReal {
    sign: i8,
    mant: f64,
    exp: BigInt,
}

/// Splits a finite nonzero `f64` into `(mantissa in [1,2), exponent)`.
pub(crate) fn split_f64(v: f64) -> (f64, i64) {
    debug_assert!(v.is_finite() && v != 0.0);
    let a = v.abs();
    let bits = a.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        let (m, e) = split_f64(a * f64::from_bits(0x43f0_0000_0000_0000)); // 2^64
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
    (m, raw - 1023)
}

fn pow2_f64(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

fn bump(v: f64, residual: f64, dir: Dir) -> f64 {
    match dir {
        Dir::Up if residual > 0.0 => v.next_up(),
        Dir::Down if residual < 0.0 => v.next_down(),
        _ => v,
    }
}

impl ExtReal {
    pub fn zero() -> Self {
        ExtReal { sign: 0, mant: 0.0, exp: BigInt::zero() }
    }

    pub fn one() -> Self {
        ExtReal { sign: 1, mant: 1.0, exp: BigInt::zero() }
    }

    /// `sign * mant * 2^exp` for a signed `f64` multiplier and big exponent.
    pub fn scaled(v: f64, exp: BigInt) -> Self {
        assert!(v.is_finite(), "non-finite value");
        if v == 0.0 {
            return Self::zero();
        }
        let (m, e) = split_f64(v);
        ExtReal { sign: if v < 0.0 { -1 } else { 1 }, mant: m, exp: exp + e }
    }

    pub fn from_f64(v: f64) -> Self {
        Self::scaled(v, BigInt::zero())
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_bigint(&BigInt::from(v), Dir::Down)
    }

    /// Rounds an integer to the nearest representable value in direction `dir`.
    pub fn from_bigint(v: &BigInt, dir: Dir) -> Self {
        if v.is_zero() {
            return Self::zero();
        }
        let bits = v.bits() as i64;
        if bits <= 53 {
            return Self::from_f64(v.to_f64().unwrap());
        }
        let shift = bits - 53;
        let mag = v.abs();
        let top = &mag >> (shift as usize);
        let exact = (&top << (shift as usize)) == mag;
        let mut t = top.to_f64().unwrap();
        let neg = v.is_negative();
        if !exact {
            // magnitude lies strictly between t and t + 1
            let round_mag_up = matches!((dir, neg), (Dir::Up, false) | (Dir::Down, true));
            if round_mag_up {
                t += 1.0;
            }
        }
        Self::scaled(if neg { -t } else { t }, BigInt::from(shift))
    }

    /// `2^e` exactly.
    pub fn pow2(e: BigInt) -> Self {
        ExtReal { sign: 1, mant: 1.0, exp: e }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn mantissa(&self) -> f64 {
        self.mant
    }

    pub fn exponent(&self) -> &BigInt {
        &self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign < 0
    }

    /// Exponent as `i64` when it fits.
    pub fn exp_i64(&self) -> Option<i64> {
        self.exp.to_i64()
    }

    pub fn neg(&self) -> Self {
        ExtReal { sign: -self.sign, mant: self.mant, exp: self.exp.clone() }
    }

    pub fn abs(&self) -> Self {
        ExtReal { sign: self.sign.abs(), mant: self.mant, exp: self.exp.clone() }
    }

    /// Nearest `f64`, saturating to infinity or zero outside the native range.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let s = self.sign as f64;
        match self.exp.to_i64() {
            Some(e) if e > 1023 => s * f64::INFINITY,
            Some(e) if e >= -1022 => s * self.mant * pow2_f64(e),
            Some(e) if e >= -1100 => s * self.mant * pow2_f64(e + 64) * pow2_f64(-64),
            Some(_) => s * 0.0,
            None => {
                if self.exp.is_positive() {
                    s * f64::INFINITY
                } else {
                    s * 0.0
                }
            }
        }
    }

    /// Exact `f64` value when it is a normal double.
    pub fn to_f64_exact(&self) -> Option<f64> {
        if self.sign == 0 {
            return Some(0.0);
        }
        match self.exp.to_i64() {
            Some(e) if (-1022..=1023).contains(&e) => Some(self.sign as f64 * self.mant * pow2_f64(e)),
            _ => None,
        }
    }

    /// Natural log of `|self|` as a plain `f64` estimate (not rounded).
    pub fn ln_abs_f64(&self) -> f64 {
        if self.sign == 0 {
            return f64::NEG_INFINITY;
        }
        self.mant.ln() + self.exp.to_f64().unwrap_or(f64::INFINITY) * std::f64::consts::LN_2
    }

    fn with_signed_mant(v: f64, exp: &BigInt) -> Self {
        Self::scaled(v, exp.clone())
    }

    pub fn next_up(&self) -> Self {
        if self.sign == 0 {
            // smallest positive value is unbounded; use a very small power of two
            return Self::pow2(BigInt::from(-(1i64 << 40)));
        }
        Self::with_signed_mant((self.sign as f64 * self.mant).next_up(), &self.exp)
    }

    pub fn next_down(&self) -> Self {
        if self.sign == 0 {
            return Self::pow2(BigInt::from(-(1i64 << 40))).neg();
        }
        Self::with_signed_mant((self.sign as f64 * self.mant).next_down(), &self.exp)
    }

    pub fn step(&self, dir: Dir) -> Self {
        match dir {
            Dir::Up => self.next_up(),
            Dir::Down => self.next_down(),
        }
    }

    /// Moves `n` ulps outward in direction `dir`.
    pub fn steps(&self, dir: Dir, n: u32) -> Self {
        let mut x = self.clone();
        for _ in 0..n {
            x = x.step(dir);
        }
        x
    }

    pub fn add_dir(&self, o: &Self, dir: Dir) -> Self {
        if self.sign == 0 {
            return o.clone();
        }
        if o.sign == 0 {
            return self.clone();
        }
        let (big, small) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let d = &big.exp - &small.exp;
        let x = big.sign as f64 * big.mant;
        match d.to_i64() {
            Some(d) if d <= 64 => {
                let y = small.sign as f64 * small.mant * pow2_f64(-d);
                let s = x + y;
                let bb = s - x;
                let err = (x - (s - bb)) + (y - bb);
                if s == 0.0 {
                    return Self::zero();
                }
                Self::with_signed_mant(bump(s, err, dir), &big.exp)
            }
            _ => {
                // |small| < 2^-63 |big|: the sum sits strictly between big and its neighbour
                let r = small.sign as f64;
                Self::with_signed_mant(bump(x, r, dir), &big.exp)
            }
        }
    }

    pub fn sub_dir(&self, o: &Self, dir: Dir) -> Self {
        self.add_dir(&o.neg(), dir)
    }

    pub fn mul_dir(&self, o: &Self, dir: Dir) -> Self {
        if self.sign == 0 || o.sign == 0 {
            return Self::zero();
        }
        let s = (self.sign * o.sign) as f64;
        let p = self.mant * o.mant;
        let err = self.mant.mul_add(o.mant, -p);
        Self::with_signed_mant(bump(s * p, s * err, dir), &(&self.exp + &o.exp))
    }

    pub fn div_dir(&self, o: &Self, dir: Dir) -> Self {
        assert!(o.sign != 0, "division by zero");
        if self.sign == 0 {
            return Self::zero();
        }
        let s = (self.sign * o.sign) as f64;
        let q = self.mant / o.mant;
        let r = (-q).mul_add(o.mant, self.mant);
        Self::with_signed_mant(bump(s * q, s * r, dir), &(&self.exp - &o.exp))
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.sign == 0 {
            return Self::zero();
        }
        ExtReal { sign: self.sign, mant: self.mant, exp: &self.exp + k }
    }

    /// Largest integer not above `self`, when `self` is a finite value.
    pub fn floor_bigint(&self) -> BigInt {
        if self.sign == 0 {
            return BigInt::zero();
        }
        if self.exp.is_negative() {
            return if self.sign > 0 { BigInt::zero() } else { -BigInt::one() };
        }
        let e = self.exp.to_u64().expect("exponent too large for integer conversion");
        if e >= 52 {
            let m = BigInt::from((self.mant * pow2_f64(52)) as u64);
            let v = m << ((e - 52) as usize);
            return if self.sign > 0 { v } else { -v };
        }
        let v = self.sign as f64 * self.mant * pow2_f64(e as i64);
        BigInt::from(v.floor() as i64)
    }

    fn cmp_mag(&self, o: &Self) -> Ordering {
        self.exp.cmp(&o.exp).then(self.mant.partial_cmp(&o.mant).unwrap())
    }

    pub fn lesser(&self, o: &Self) -> Self {
        if self <= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    pub fn greater(&self, o: &Self) -> Self {
        if self >= o {
            self.clone()
        } else {
            o.clone()
        }
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, o: &Self) -> Ordering {
        match self.sign.cmp(&o.sign) {
            Ordering::Equal => {}
            other => return other,
        }
        match self.sign {
            0 => Ordering::Equal,
            1 => self.cmp_mag(o),
            _ => o.cmp_mag(self),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::xnum::decimal::to_decimal(self))
    }
}
