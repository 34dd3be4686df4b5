//! Reference arithmetic for tests: binary floating point with a 256-bit
//! significand on top of `num-bigint`. It shares no code with the library and
//! never calls into `libm`.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use spiderweb::xnum::ExtReal;
use std::cmp::Ordering;

const W: u64 = 256;

/// `m * 2^e`.
#[derive(Clone, Debug)]
pub struct Big {
    m: BigInt,
    e: i64,
}

impl Big {
    fn norm(mut self) -> Self {
        let b = self.m.bits();
        if b > W {
            let s = b - W;
            self.m >>= s;
            self.e += s as i64;
        }
        self
    }

    pub fn zero() -> Self {
        Big { m: BigInt::zero(), e: 0 }
    }

    pub fn int(v: i64) -> Self {
        Big { m: BigInt::from(v), e: 0 }.norm()
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Big { m: v.clone(), e: 0 }.norm()
    }

    pub fn pow2(k: i64) -> Self {
        Big { m: BigInt::one(), e: k }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            return Big::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let ex = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if ex == 0 { (frac, -1074) } else { (frac | (1u64 << 52), ex - 1075) };
        Big { m: BigInt::from(m) * sign, e }
    }

    pub fn from_ext(x: &ExtReal) -> Self {
        if x.is_zero() {
            return Big::zero();
        }
        let mut b = Big::from_f64(x.mantissa() * x.sign() as f64);
        b.e += x.exponent().to_i64().expect("oracle exponent range");
        b
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn sign(&self) -> i32 {
        if self.m.is_zero() {
            0
        } else if self.m.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn neg(&self) -> Self {
        Big { m: -&self.m, e: self.e }
    }

    pub fn abs(&self) -> Self {
        Big { m: self.m.abs(), e: self.e }
    }

    /// `floor(log2 |x|)`.
    fn ilog2(&self) -> i64 {
        self.m.bits() as i64 - 1 + self.e
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        // operands far below the working precision only nudge the last bit
        let gap = self.ilog2() - o.ilog2();
        if gap > W as i64 + 8 {
            return self.nudge(o.sign());
        }
        if -gap > W as i64 + 8 {
            return o.nudge(self.sign());
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &o.m << (o.e - e) as usize;
        Big { m: a + b, e }.norm()
    }

    fn nudge(&self, s: i32) -> Self {
        let k = (W + 8).saturating_sub(self.m.bits()) as usize;
        let m = (&self.m << k) + BigInt::from(s);
        Big { m, e: self.e - k as i64 }.norm()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Big { m: &self.m * &o.m, e: self.e + o.e }.norm()
    }

    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "oracle division by zero");
        let s = (W + o.m.bits()) as usize;
        Big { m: (&self.m << s) / &o.m, e: self.e - o.e - s as i64 }.norm()
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Big { m: self.m.clone(), e: self.e + k }
    }

    pub fn cmp(&self, o: &Self) -> Ordering {
        match self.sub(o).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let b = self.m.bits() as i64;
        let shift = b - 60;
        let top = if shift > 0 { &self.m >> shift as usize } else { self.m.clone() << (-shift) as usize };
        let t = top.to_f64().unwrap();
        let k = self.e + shift.max(0) + shift.min(0);
        t * 2f64.powi(k.clamp(-1100, 1100) as i32)
    }

    fn tiny(&self) -> bool {
        self.is_zero() || self.ilog2() < -(W as i64) - 4
    }

    /// `2 atanh z = sum 2 z^(2j+1)/(2j+1)` for `|z| <= 1/2`.
    fn atanh2(z: &Big) -> Big {
        let z2 = z.mul(z);
        let mut pw = z.clone();
        let mut sum = Big::zero();
        let mut j = 0i64;
        if z.is_zero() {
            return Big::zero();
        }
        let floor = z.ilog2() - W as i64 - 4;
        loop {
            let t = pw.div(&Big::int(2 * j + 1));
            if t.is_zero() || t.ilog2() < floor {
                break;
            }
            sum = sum.add(&t);
            pw = pw.mul(&z2);
            j += 1;
        }
        sum.mul_pow2(1)
    }

    pub fn ln2() -> Big {
        Big::atanh2(&Big::int(1).div(&Big::int(3)))
    }

    pub fn ln(&self) -> Big {
        assert!(self.sign() > 0, "oracle ln of non-positive");
        // x = y 2^k with y in [1, 2), then move y into [1/sqrt2, sqrt2]
        let mut k = self.ilog2();
        let mut y = self.mul_pow2(-k);
        if y.cmp(&Big::from_f64(std::f64::consts::SQRT_2)) == Ordering::Greater {
            y = y.mul_pow2(-1);
            k += 1;
        }
        let one = Big::int(1);
        let z = y.sub(&one).div(&y.add(&one));
        Big::atanh2(&z).add(&Big::ln2().mul(&Big::int(k)))
    }

    pub fn exp(&self) -> Big {
        let ln2 = Big::ln2();
        let n = self.div(&ln2).to_f64().round() as i64;
        let r = self.sub(&ln2.mul(&Big::int(n))).mul_pow2(-8);
        let mut sum = Big::int(1);
        let mut t = Big::int(1);
        let mut j = 1i64;
        loop {
            t = t.mul(&r).div(&Big::int(j));
            if t.tiny() {
                break;
            }
            sum = sum.add(&t);
            j += 1;
        }
        for _ in 0..8 {
            sum = sum.mul(&sum);
        }
        sum.mul_pow2(n)
    }

    /// `e^x - 1` without cancellation for small `x`.
    pub fn expm1(&self) -> Big {
        if self.abs().cmp(&Big::from_f64(0.5)) == Ordering::Greater {
            return self.exp().sub(&Big::int(1));
        }
        let mut sum = Big::zero();
        let mut t = Big::int(1);
        let mut j = 1i64;
        loop {
            t = t.mul(self).div(&Big::int(j));
            if t.is_zero() || t.ilog2() < self.ilog2() - W as i64 - 4 {
                break;
            }
            sum = sum.add(&t);
            j += 1;
        }
        sum
    }

    /// `ln(1 + y)` for `y > -1`.
    pub fn ln1p(&self) -> Big {
        if self.abs().cmp(&Big::from_f64(0.25)) == Ordering::Greater {
            return Big::int(1).add(self).ln();
        }
        // 2 atanh(y / (2 + y))
        Big::atanh2(&self.div(&Big::int(2).add(self)))
    }

    pub fn softplus(&self) -> Big {
        if self.sign() > 0 {
            self.add(&self.neg().exp().ln1p())
        } else {
            self.exp().ln1p()
        }
    }

    /// `ln |1 - e^x|`.
    pub fn logabs_one_minus_exp(&self) -> Big {
        self.expm1().abs().ln()
    }

    pub fn powi(&self, n: u32) -> Big {
        let mut r = Big::int(1);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }
}

/// True when `lo <= v <= hi` for the enclosure given by its bounds.
pub fn inside(v: &Big, lo: &ExtReal, hi: &ExtReal) -> bool {
    Big::from_ext(lo).cmp(v) != Ordering::Greater && v.cmp(&Big::from_ext(hi)) != Ordering::Greater
}

#[cfg(test)]
#[allow(unused_imports)]
mod self_check {
    use super::*;

    #[test]
    fn constants() {
        assert!((Big::ln2().to_f64() - std::f64::consts::LN_2).abs() < 1e-16);
        assert!((Big::int(10).ln().to_f64() - std::f64::consts::LN_10).abs() < 1e-15);
        assert!((Big::int(1).exp().to_f64() - std::f64::consts::E).abs() < 1e-15);
        let x = Big::from_f64(12.5);
        let back = x.exp().ln();
        assert!(back.sub(&x).abs().cmp(&Big::pow2(-240)) == Ordering::Less);
    }
}
