use super::ext::{Dir, ExtReal};
use super::XnumError;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Outcome of a certified inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Verified,
    Falsified,
    Indeterminate,
}

impl Verdict {
    pub fn and(self, o: Verdict) -> Verdict {
        use Verdict::*;
        match (self, o) {
            (Falsified, _) | (_, Falsified) => Falsified,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            _ => Verified,
        }
    }

    pub fn is_verified(self) -> bool {
        self == Verdict::Verified
    }

    pub fn all<I: IntoIterator<Item = Verdict>>(it: I) -> Verdict {
        it.into_iter().fold(Verdict::Verified, Verdict::and)
    }
}

/// Three-way comparison of enclosures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Less,
    Greater,
    Indeterminate,
}

/// Closed interval `[lo, hi]` known to contain an exact real.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: ExtReal,
    hi: ExtReal,
}

impl Enclosure {
    pub fn new(lo: ExtReal, hi: ExtReal) -> Self {
        assert!(lo <= hi, "inverted enclosure");
        Enclosure { lo, hi }
    }

    pub fn point(x: ExtReal) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn from_f64(v: f64) -> Self {
        Self::point(ExtReal::from_f64(v))
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Enclosure { lo: ExtReal::from_bigint(v, Dir::Down), hi: ExtReal::from_bigint(v, Dir::Up) }
    }

    /// Encloses the rational `num/den`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).div(&Self::from_i64(den)).expect("zero denominator")
    }

    pub fn zero() -> Self {
        Self::point(ExtReal::zero())
    }

    pub fn lo(&self) -> &ExtReal {
        &self.lo
    }

    pub fn hi(&self) -> &ExtReal {
        &self.hi
    }

    pub fn into_bounds(self) -> (ExtReal, ExtReal) {
        (self.lo, self.hi)
    }

    /// Midpoint rounded to nearest (not certified).
    pub fn mid(&self) -> ExtReal {
        if self.lo == self.hi {
            return self.lo.clone();
        }
        self.lo.add_dir(&self.hi, Dir::Down).mul_pow2(-1)
    }

    pub fn width(&self) -> ExtReal {
        self.hi.sub_dir(&self.lo, Dir::Up)
    }

    /// Width relative to the larger endpoint magnitude, as `f64`.
    pub fn rel_width(&self) -> f64 {
        let m = self.lo.abs().greater(&self.hi.abs());
        if m.is_zero() {
            return 0.0;
        }
        self.width().div_dir(&m, Dir::Up).to_f64()
    }

    pub fn contains(&self, x: &ExtReal) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.sign() <= 0 && self.hi.sign() >= 0
    }

    pub fn hull(&self, o: &Self) -> Self {
        Enclosure { lo: self.lo.lesser(&o.lo), hi: self.hi.greater(&o.hi) }
    }

    /// Pushes both ends outward by `n` ulps.
    pub fn widen(&self, n: u32) -> Self {
        Enclosure { lo: self.lo.steps(Dir::Down, n), hi: self.hi.steps(Dir::Up, n) }
    }

    pub fn cmp(&self, o: &Self) -> Cmp {
        if self.hi < o.lo {
            Cmp::Less
        } else if self.lo > o.hi {
            Cmp::Greater
        } else {
            Cmp::Indeterminate
        }
    }

    /// `self < o` decided from the enclosures.
    pub fn lt(&self, o: &Self) -> Verdict {
        if self.hi < o.lo {
            Verdict::Verified
        } else if self.lo >= o.hi {
            Verdict::Falsified
        } else {
            Verdict::Indeterminate
        }
    }

    /// `self <= o` decided from the enclosures.
    pub fn le(&self, o: &Self) -> Verdict {
        if self.hi <= o.lo {
            Verdict::Verified
        } else if self.lo > o.hi {
            Verdict::Falsified
        } else {
            Verdict::Indeterminate
        }
    }

    pub fn gt(&self, o: &Self) -> Verdict {
        o.lt(self)
    }

    pub fn ge(&self, o: &Self) -> Verdict {
        o.le(self)
    }

    pub fn cmp_strict(&self, o: &Self) -> Result<std::cmp::Ordering, XnumError> {
        match self.cmp(o) {
            Cmp::Less => Ok(std::cmp::Ordering::Less),
            Cmp::Greater => Ok(std::cmp::Ordering::Greater),
            Cmp::Indeterminate => Err(XnumError::IndeterminateComparison),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Enclosure { lo: self.lo.add_dir(&o.lo, Dir::Down), hi: self.hi.add_dir(&o.hi, Dir::Up) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Enclosure { lo: self.lo.sub_dir(&o.hi, Dir::Down), hi: self.hi.sub_dir(&o.lo, Dir::Up) }
    }

    pub fn neg(&self) -> Self {
        Enclosure { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn abs(&self) -> Self {
        if self.lo.sign() >= 0 {
            self.clone()
        } else if self.hi.sign() <= 0 {
            self.neg()
        } else {
            Enclosure { lo: ExtReal::zero(), hi: self.hi.greater(&self.lo.neg()) }
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.lo.sign() >= 0 && o.lo.sign() >= 0 {
            return Enclosure { lo: self.lo.mul_dir(&o.lo, Dir::Down), hi: self.hi.mul_dir(&o.hi, Dir::Up) };
        }
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = pairs.iter().map(|(a, b)| a.mul_dir(b, Dir::Down)).min().unwrap();
        let hi = pairs.iter().map(|(a, b)| a.mul_dir(b, Dir::Up)).max().unwrap();
        Enclosure { lo, hi }
    }

    pub fn div(&self, o: &Self) -> Result<Self, XnumError> {
        if o.contains_zero() {
            return Err(XnumError::DomainError("division by an enclosure containing 0".into()));
        }
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = pairs.iter().map(|(a, b)| a.div_dir(b, Dir::Down)).min().unwrap();
        let hi = pairs.iter().map(|(a, b)| a.div_dir(b, Dir::Up)).max().unwrap();
        Ok(Enclosure { lo, hi })
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Enclosure { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k) }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.mul(&Enclosure::from_f64(c))
    }

    pub fn pow_int(&self, n: i64) -> Result<Self, XnumError> {
        if n < 0 {
            return Enclosure::from_f64(1.0).div(&self.pow_int(-n)?);
        }
        let mut result = Enclosure::from_f64(1.0);
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        Ok(result)
    }

    pub fn sqr(&self) -> Self {
        let a = self.abs();
        Enclosure { lo: a.lo.mul_dir(&a.lo, Dir::Down), hi: a.hi.mul_dir(&a.hi, Dir::Up) }
    }

    pub fn min(&self, o: &Self) -> Self {
        Enclosure { lo: self.lo.lesser(&o.lo), hi: self.hi.lesser(&o.hi) }
    }

    pub fn max(&self, o: &Self) -> Self {
        Enclosure { lo: self.lo.greater(&o.lo), hi: self.hi.greater(&o.hi) }
    }

    pub fn ln(&self) -> Result<Self, XnumError> {
        if !self.lo.is_positive() {
            return Err(XnumError::DomainError("ln of a non-positive enclosure".into()));
        }
        Ok(Enclosure { lo: super::ln_dir(&self.lo, Dir::Down)?, hi: super::ln_dir(&self.hi, Dir::Up)? })
    }

    pub fn exp(&self) -> Result<Self, XnumError> {
        Ok(Enclosure { lo: super::exp_dir(&self.lo, Dir::Down)?, hi: super::exp_dir(&self.hi, Dir::Up)? })
    }

    /// `self^y` for positive `self`.
    pub fn pow_real(&self, y: &Self) -> Result<Self, XnumError> {
        self.ln()?.mul(y).exp()
    }

    pub fn softplus(&self) -> Self {
        let a = super::softplus(&self.lo);
        let b = super::softplus(&self.hi);
        Enclosure { lo: a.lo, hi: b.hi }
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, o: &Enclosure) -> Enclosure {
        Enclosure::add(self, o)
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, o: &Enclosure) -> Enclosure {
        Enclosure::sub(self, o)
    }
}

impl Mul for &Enclosure {
    type Output = Enclosure;
    fn mul(self, o: &Enclosure) -> Enclosure {
        Enclosure::mul(self, o)
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure::neg(self)
    }
}

impl From<ExtReal> for Enclosure {
    fn from(x: ExtReal) -> Self {
        Enclosure::point(x)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
