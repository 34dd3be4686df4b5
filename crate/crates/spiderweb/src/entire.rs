//! The family `f(z) = z^3 prod (1 + z/a_n)^(2 p_n)` with zeros on the negative
//! real axis, evaluated in log coordinates `u = log r`.
//!
//! For this family `M(r) = f(r)` and `m(r) = |f(-r)|`, so
//!
//! ```text
//! log M(u) = 3u + sum 2p softplus(u - l)
//! log m(u) = 3u + sum 2p log|1 - e^(u - l)|
//! log g(u) = 3u + sum_{l <= u} 2p softplus(u - l)
//! ```
//!
//! with `l = log a`. A [`FamilyKind::Truncated`] function is the finite
//! product over its ledger. A [`FamilyKind::FullFamily`] function lists only
//! its first zeros; the unlisted ones are assumed to satisfy `a_{n+1} > a_n^2`
//! and `2 p_n <= a_n^(1/8) / 2`, which bounds their contribution to `log M` by
//! `exp(u - 7 l_L / 4)` at every radius (`l_L` is the last listed zero).

use crate::xnum::{
    exp_up_wide, from_decimal, logabs_one_minus_exp, sigmoid_hi, to_decimal, Dir, Enclosure, ExtReal, Verdict,
    XnumError,
};
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Delta = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntireError {
    #[error("invalid ledger: {0}")]
    InvalidLedger(String),
    #[error("constraint unverified: {0}")]
    ConstraintUnverified(String),
    #[error("value out of range at u = {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Xnum(#[from] XnumError),
}

/// Half the multiplicity of a zero.
#[derive(Clone, Debug, PartialEq)]
pub enum PCount {
    Exact(BigInt),
    /// Some integer inside the enclosure; used when `p` has too many digits.
    Approx(Enclosure),
}

impl PCount {
    pub fn enclosure(&self) -> Enclosure {
        match self {
            PCount::Exact(v) => Enclosure::from_bigint(v),
            PCount::Approx(e) => e.clone(),
        }
    }

    /// Enclosure of `ln p`.
    pub fn ln(&self) -> Enclosure {
        self.enclosure().ln().expect("p >= 1")
    }
}

/// `p = floor(a^(delta/4) / 4)` from `log a`.
pub fn p_from_delta(log_a: &ExtReal, delta: Delta) -> Result<PCount, EntireError> {
    let d = delta_enclosure(delta);
    let y = d.mul(&Enclosure::point(log_a.clone())).mul_pow2(-2).sub(&ln4());
    if y.hi() < &ExtReal::from_f64(40.0) {
        let v = y.exp()?;
        let (lo, hi) = (v.lo().floor_bigint(), v.hi().floor_bigint());
        if lo == hi {
            return Ok(PCount::Exact(lo));
        }
        return Ok(PCount::Approx(Enclosure::from_bigint(&lo).hull(&Enclosure::from_bigint(&hi))));
    }
    let v = y.exp()?;
    let lo = v.lo().sub_dir(&ExtReal::one(), Dir::Down);
    Ok(PCount::Approx(Enclosure::new(lo, v.hi().clone())))
}

pub fn delta_enclosure(delta: Delta) -> Enclosure {
    Enclosure::ratio(*delta.numer(), *delta.denom())
}

fn ln4() -> Enclosure {
    Enclosure::from_f64(4.0).ln().expect("positive")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroEntry {
    pub log_a: ExtReal,
    pub p: PCount,
    pub delta: Option<Delta>,
}

impl ZeroEntry {
    /// Zero with `p` fixed by the delta rule.
    pub fn from_delta(log_a: ExtReal, delta: Delta) -> Result<Self, EntireError> {
        let p = p_from_delta(&log_a, delta)?;
        Ok(ZeroEntry { log_a, p, delta: Some(delta) })
    }

    pub fn with_p(log_a: ExtReal, p: u64) -> Self {
        ZeroEntry { log_a, p: PCount::Exact(BigInt::from(p)), delta: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    FullFamily,
    Truncated,
}

/// The result of a `log m` evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum LogValue {
    Finite(Enclosure),
    /// Only an upper bound is known (close to a zero, or beyond the ledger).
    UpperOnly(ExtReal),
    /// The point is a zero of `f`.
    NegInfinity,
}

impl LogValue {
    /// Upper bound, `None` standing for minus infinity.
    pub fn upper(&self) -> Option<&ExtReal> {
        match self {
            LogValue::Finite(e) => Some(e.hi()),
            LogValue::UpperOnly(v) => Some(v),
            LogValue::NegInfinity => None,
        }
    }

    pub fn lower(&self) -> Option<&ExtReal> {
        match self {
            LogValue::Finite(e) => Some(e.lo()),
            _ => None,
        }
    }

    pub fn finite(&self) -> Option<&Enclosure> {
        match self {
            LogValue::Finite(e) => Some(e),
            _ => None,
        }
    }

    /// Decides `self < x`.
    pub fn lt(&self, x: &Enclosure) -> Verdict {
        match self {
            LogValue::NegInfinity => Verdict::Verified,
            LogValue::UpperOnly(h) => {
                if h < x.lo() {
                    Verdict::Verified
                } else {
                    Verdict::Indeterminate
                }
            }
            LogValue::Finite(e) => e.lt(x),
        }
    }

    /// Decides `self >= x`.
    pub fn ge(&self, x: &Enclosure) -> Verdict {
        match self {
            LogValue::NegInfinity => Verdict::Falsified,
            LogValue::UpperOnly(h) => {
                if h < x.lo() {
                    Verdict::Falsified
                } else {
                    Verdict::Indeterminate
                }
            }
            LogValue::Finite(e) => e.ge(x),
        }
    }
}

/// Bound on the log of the tail product beyond zero `k`, for `r <= a_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailBudget {
    pub k: usize,
    pub factor_log_hi: ExtReal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntireFunction {
    zeros: Vec<ZeroEntry>,
    kind: FamilyKind,
    two_p: Vec<Enclosure>,
}

fn three() -> Enclosure {
    Enclosure::from_f64(3.0)
}

fn pt(x: &ExtReal) -> Enclosure {
    Enclosure::point(x.clone())
}

/// `log|1 - e^x|` over an interval not containing 0.
fn logabs_enc(x: &Enclosure) -> Result<Enclosure, XnumError> {
    if x.hi().is_negative() {
        let a = logabs_one_minus_exp(x.hi())?;
        let b = logabs_one_minus_exp(x.lo())?;
        Ok(Enclosure::new(a.lo().clone(), b.hi().clone()))
    } else {
        let a = logabs_one_minus_exp(x.lo())?;
        let b = logabs_one_minus_exp(x.hi())?;
        Ok(Enclosure::new(a.lo().clone(), b.hi().clone()))
    }
}

/// Upper bound of `log|1 - e^x|` over an interval that may contain 0.
fn logabs_upper(x: &Enclosure) -> Option<ExtReal> {
    let ends: Vec<ExtReal> = [x.lo(), x.hi()]
        .into_iter()
        .filter(|e| !e.is_zero())
        .map(|e| logabs_one_minus_exp(e).expect("nonzero").hi().clone())
        .collect();
    ends.into_iter().reduce(|a, b| a.greater(&b))
}

fn near_zero() -> ExtReal {
    ExtReal::pow2(BigInt::from(-40))
}

impl EntireFunction {
    pub fn new(zeros: Vec<ZeroEntry>, kind: FamilyKind) -> Result<Self, EntireError> {
        for w in zeros.windows(2) {
            if w[0].log_a >= w[1].log_a {
                return Err(EntireError::InvalidLedger("log_a must be strictly increasing".into()));
            }
        }
        let half = Delta::new(1, 2);
        for (i, z) in zeros.iter().enumerate() {
            let p = z.p.enclosure();
            if p.lo() < &ExtReal::one() {
                return Err(EntireError::InvalidLedger(format!("zero {i}: p must be at least 1")));
            }
            if let Some(d) = z.delta {
                if d <= Delta::zero() || d >= half {
                    return Err(EntireError::InvalidLedger(format!("zero {i}: delta {d} must lie in (0, 1/2)")));
                }
                let want = p_from_delta(&z.log_a, d)?.enclosure();
                if want.hi() < p.lo() || p.hi() < want.lo() {
                    return Err(EntireError::InvalidLedger(format!(
                        "zero {i}: p does not match floor(a^(delta/4)/4)"
                    )));
                }
            }
        }
        if kind == FamilyKind::FullFamily {
            match zeros.last() {
                None => return Err(EntireError::InvalidLedger("a full family needs at least one listed zero".into())),
                Some(z) if z.log_a < ExtReal::from_f64(2.0) => {
                    return Err(EntireError::InvalidLedger("a full family needs log a_L >= 2".into()))
                }
                _ => {}
            }
        }
        let two_p = zeros.iter().map(|z| z.p.enclosure().mul_pow2(1)).collect();
        Ok(EntireFunction { zeros, kind, two_p })
    }

    /// `z^3`, no zeros.
    pub fn cubic() -> Self {
        EntireFunction { zeros: Vec::new(), kind: FamilyKind::Truncated, two_p: Vec::new() }
    }

    /// Zeros `a_1 = e^log_a1`, `a_{n+1} = a_n^3`, all with `p = 1`.
    pub fn slow_growth(log_a1: f64, count: usize) -> Self {
        let mut zeros = Vec::with_capacity(count);
        let mut l = ExtReal::from_f64(log_a1);
        for _ in 0..count {
            zeros.push(ZeroEntry::with_p(l.clone(), 1));
            l = l.mul_dir(&ExtReal::from_f64(3.0), Dir::Down);
        }
        EntireFunction::new(zeros, FamilyKind::FullFamily).expect("valid slow-growth ledger")
    }

    pub fn zeros(&self) -> &[ZeroEntry] {
        &self.zeros
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// `2 p_k` as an enclosure.
    pub fn two_p(&self, k: usize) -> &Enclosure {
        &self.two_p[k]
    }

    fn terms(&self) -> impl Iterator<Item = (&ExtReal, &Enclosure)> {
        self.zeros.iter().map(|z| &z.log_a).zip(self.two_p.iter())
    }

    fn last_log_a(&self) -> Option<&ExtReal> {
        self.zeros.last().map(|z| &z.log_a)
    }

    /// Upper bound on the unlisted zeros' share of `log M` at `u`.
    fn tail_hi(&self, u: &ExtReal) -> Result<ExtReal, EntireError> {
        match (self.kind, self.last_log_a()) {
            (FamilyKind::FullFamily, Some(l)) => {
                let x = u.sub_dir(&l.mul_dir(&ExtReal::from_f64(1.75), Dir::Down), Dir::Up);
                exp_up_wide(&x).ok_or_else(|| EntireError::OutOfRange(to_decimal(u)))
            }
            _ => Ok(ExtReal::zero()),
        }
    }

    /// Below this `u` no unlisted zero can lie (`2 l_L` for a full family).
    pub fn determined_below(&self) -> Option<ExtReal> {
        match (self.kind, self.last_log_a()) {
            (FamilyKind::FullFamily, Some(l)) => Some(l.mul_pow2(1)),
            _ => None,
        }
    }

    fn determined(&self, u: &ExtReal) -> bool {
        self.determined_below().is_none_or(|d| u < &d)
    }

    /// Enclosure of `log M(e^u)` over `u`.
    pub fn log_max_modulus(&self, u: &Enclosure) -> Result<Enclosure, EntireError> {
        let mut s = three().mul(u);
        for (l, c) in self.terms() {
            s = s.add(&c.mul(&u.sub(&pt(l)).softplus()));
        }
        let t = self.tail_hi(u.hi())?;
        Ok(Enclosure::new(s.lo().clone(), s.hi().add_dir(&t, Dir::Up)))
    }

    /// `log m(e^u)` over `u`.
    pub fn log_min_modulus(&self, u: &Enclosure) -> Result<LogValue, EntireError> {
        if !self.determined(u.hi()) {
            return Ok(LogValue::UpperOnly(self.log_max_modulus(u)?.hi().clone()));
        }
        let eps = near_zero();
        let mut exact_zero = false;
        let mut upper_only = false;
        let mut s = three().mul(u);
        let mut hi = s.hi().clone();
        for (l, c) in self.terms() {
            let x = u.sub(&pt(l));
            if x.lo().is_zero() && x.hi().is_zero() {
                exact_zero = true;
                continue;
            }
            let close = x.contains_zero() || (x.hi().abs() < eps || x.lo().abs() < eps);
            if close {
                upper_only = true;
                let h = logabs_upper(&x).expect("nonzero endpoint");
                hi = hi.add_dir(&c.mul(&Enclosure::new(h.clone(), h)).hi().clone(), Dir::Up);
            } else {
                let t = c.mul(&logabs_enc(&x)?);
                s = s.add(&t);
                hi = hi.add_dir(t.hi(), Dir::Up);
            }
        }
        if exact_zero {
            return Ok(LogValue::NegInfinity);
        }
        // unlisted zeros lie above a_L^2; their factors are in (0, 1) and at
        // least exp(-2 tail) while r <= a_L^2 / 2
        let tail = self.tail_hi(u.hi())?;
        if let Some(d) = self.determined_below() {
            let safe = d.sub_dir(&ExtReal::from_f64(std::f64::consts::LN_2), Dir::Down);
            if u.hi() > &safe {
                upper_only = true;
            }
        }
        if upper_only {
            return Ok(LogValue::UpperOnly(hi));
        }
        let lo = s.lo().sub_dir(&tail.mul_pow2(1), Dir::Down);
        Ok(LogValue::Finite(Enclosure::new(lo, s.hi().clone())))
    }

    /// Enclosure of `log g(e^u)` over `u`; zeros with `l <= u` are included.
    pub fn log_g(&self, u: &Enclosure) -> Result<Enclosure, EntireError> {
        let mut s = three().mul(u);
        let mut extra = ExtReal::zero();
        for (l, c) in self.terms() {
            if l <= u.lo() {
                s = s.add(&c.mul(&u.sub(&pt(l)).softplus()));
            } else if l <= u.hi() {
                let t = c.mul(&pt(&u.hi().sub_dir(l, Dir::Up)).softplus());
                extra = extra.add_dir(t.hi(), Dir::Up);
            }
        }
        let mut hi = s.hi().add_dir(&extra, Dir::Up);
        if !self.determined(u.hi()) {
            hi = hi.greater(self.log_max_modulus(u)?.hi());
        }
        Ok(Enclosure::new(s.lo().clone(), hi))
    }

    /// Upper bound of `d log M / du` on `(-inf, u]`.
    pub fn dlog_max_modulus_hi(&self, u: &ExtReal) -> Result<ExtReal, EntireError> {
        let mut s = ExtReal::from_f64(3.0);
        for (l, c) in self.terms() {
            let x = u.sub_dir(l, Dir::Up);
            s = s.add_dir(&c.hi().mul_dir(&sigmoid_hi(&x), Dir::Up), Dir::Up);
        }
        Ok(s.add_dir(&self.tail_hi(u)?, Dir::Up))
    }

    /// Bound for the factors of zeros after `k` at radii `r <= a_k`.
    pub fn tail_budget(&self, k: usize) -> Result<TailBudget, EntireError> {
        if k >= self.zeros.len() {
            return Err(EntireError::InvalidLedger(format!("no zero with index {k}")));
        }
        for w in self.zeros[k..].windows(2) {
            let sq = w[0].log_a.mul_pow2(1);
            if w[1].log_a <= sq {
                return Err(EntireError::ConstraintUnverified("a_{n+1} > a_n^2".into()));
            }
        }
        let lk = pt(&self.zeros[k].log_a);
        let mut s = Enclosure::zero();
        for (l, c) in self.terms().skip(k + 1) {
            s = s.add(&c.mul(&lk.sub(&pt(l)).softplus()));
        }
        let hi = s.hi().add_dir(&self.tail_hi(&self.zeros[k].log_a)?, Dir::Up);
        if hi > ExtReal::from_f64(2.0) {
            return Err(EntireError::ConstraintUnverified(format!("tail after zero {k} exceeds e^2")));
        }
        Ok(TailBudget { k, factor_log_hi: hi })
    }

    /// Decides `m < g` and `g < M` at `u` through the term-wise differences,
    /// which are sums of positive quantities.
    pub fn sandwich(&self, u: &ExtReal) -> Result<(Verdict, Verdict), EntireError> {
        let m = self.log_min_modulus(&pt(u))?;
        let mg = match m {
            LogValue::NegInfinity => Verdict::Verified,
            _ if !self.determined(u) => Verdict::Indeterminate,
            _ => {
                // g - m = sum_{l <= u} 2p (sp(-x) - logabs(-x)) - sum_{l > u} 2p logabs(x)
                let mut d = Enclosure::zero();
                let mut ok = true;
                for (l, c) in self.terms() {
                    let x = pt(u).sub(&pt(l));
                    if x.contains_zero() {
                        ok = false;
                        break;
                    }
                    let t = if l <= u {
                        let nx = x.neg();
                        nx.softplus().sub(&logabs_enc(&nx)?)
                    } else {
                        logabs_enc(&x)?.neg()
                    };
                    d = d.add(&c.mul(&t));
                }
                if !ok {
                    Verdict::Indeterminate
                } else if self.zeros.is_empty() {
                    Verdict::Falsified
                } else {
                    d.gt(&Enclosure::zero())
                }
            }
        };
        let above: Vec<_> = self.terms().filter(|(l, _)| *l > u).collect();
        let gm = if self.kind == FamilyKind::FullFamily {
            // infinitely many zeros lie above u
            Verdict::Verified
        } else if above.is_empty() {
            Verdict::Falsified
        } else {
            let mut d = Enclosure::zero();
            for (l, c) in above {
                d = d.add(&c.mul(&pt(u).sub(&pt(l)).softplus()));
            }
            d.gt(&Enclosure::zero())
        };
        Ok((mg, gm))
    }

    /// Lower bound of `log g(e^(tu)) - t log g(e^u)` for `t >= 1`.
    pub fn g_convexity_gap(&self, u: &ExtReal, t: &Enclosure) -> Result<Enclosure, EntireError> {
        let tu = t.mul(&pt(u));
        if !self.determined(tu.hi()) {
            return Err(EntireError::OutOfRange(to_decimal(u)));
        }
        let mut d = Enclosure::zero();
        let t1 = t.sub(&Enclosure::from_f64(1.0));
        for (l, c) in self.terms() {
            let lv = pt(l);
            let term = if l <= u {
                t1.mul(&lv).add(&lv.sub(&tu).softplus()).sub(&t.mul(&lv.sub(&pt(u)).softplus()))
            } else if l <= tu.lo() {
                tu.sub(&lv).softplus()
            } else {
                continue;
            };
            d = d.add(&c.mul(&term));
        }
        Ok(d)
    }

    /// Lower bound of `t(1+2s) log g(e^u) - log g(e^(tu))`, valid when no zero
    /// lies in `(su, tu]`.
    pub fn g_cap_gap(&self, u: &ExtReal, s: &Enclosure, t: &Enclosure) -> Result<Enclosure, EntireError> {
        let tu = t.mul(&pt(u));
        if !self.determined(tu.hi()) {
            return Err(EntireError::OutOfRange(to_decimal(u)));
        }
        let k = t.mul(&Enclosure::from_f64(1.0).add(&s.mul_pow2(1)));
        let mut d = s.mul(&tu).mul(&Enclosure::from_f64(6.0));
        let uu = pt(u);
        for (l, c) in self.terms() {
            if l > u {
                continue;
            }
            let lv = pt(l);
            let y = uu.sub(&lv);
            let term = s
                .mul(&tu)
                .mul_pow2(1)
                .sub(&k.sub(&Enclosure::from_f64(1.0)).mul(&lv))
                .add(&k.mul(&y.neg().softplus()))
                .sub(&lv.sub(&tu).softplus());
            d = d.add(&c.mul(&term));
        }
        Ok(d)
    }

    /// Lower bound of `log g(e^(3u)) - log M(e^u)`.
    pub fn g_cube_over_max_gap(&self, u: &ExtReal) -> Result<Enclosure, EntireError> {
        let uu = pt(u);
        let u3 = uu.mul(&three());
        if !self.determined(u3.hi()) {
            return Err(EntireError::OutOfRange(to_decimal(u)));
        }
        let mut d = uu.mul(&Enclosure::from_f64(6.0));
        for (l, c) in self.terms() {
            let lv = pt(l);
            let term = if l <= u {
                uu.mul_pow2(1).add(&lv.sub(&u3).softplus()).sub(&lv.sub(&uu).softplus())
            } else if l <= u3.lo() {
                u3.sub(&lv).softplus().sub(&uu.sub(&lv).softplus())
            } else {
                uu.sub(&lv).softplus().neg()
            };
            d = d.add(&c.mul(&term));
        }
        let tail = self.tail_hi(u)?;
        Ok(d.sub(&Enclosure::new(ExtReal::zero(), tail)))
    }

    /// Lower bound of `log M(e^(cu)) - c log M(e^u)` for `c > 1`.
    pub fn max_convexity_gap(&self, u: &ExtReal, c: &Enclosure) -> Result<Enclosure, EntireError> {
        let uu = pt(u);
        let cu = c.mul(&uu);
        let c1 = c.sub(&Enclosure::from_f64(1.0));
        let mut d = Enclosure::zero();
        for (l, k) in self.terms() {
            let lv = pt(l);
            let term = if l <= u {
                c1.mul(&lv).add(&lv.sub(&cu).softplus()).sub(&c.mul(&lv.sub(&uu).softplus()))
            } else {
                cu.sub(&lv).softplus().sub(&c.mul(&uu.sub(&lv).softplus()))
            };
            d = d.add(&k.mul(&term));
        }
        let tail = c.mul(&Enclosure::new(ExtReal::zero(), self.tail_hi(u)?));
        Ok(d.sub(&tail))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PSpec {
    Int(u64),
    Text(String),
    Bounds { lo: String, hi: String },
}

#[derive(Serialize, Deserialize)]
struct ZeroSpec {
    log_a: String,
    p: PSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct FunctionSpec {
    zeros: Vec<ZeroSpec>,
    kind: FamilyKind,
}

impl Serialize for EntireFunction {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let zeros = self
            .zeros
            .iter()
            .map(|z| ZeroSpec {
                log_a: to_decimal(&z.log_a),
                p: match &z.p {
                    PCount::Exact(v) => match v.to_u64() {
                        Some(x) => PSpec::Int(x),
                        None => PSpec::Text(v.to_string()),
                    },
                    PCount::Approx(e) => PSpec::Bounds { lo: to_decimal(e.lo()), hi: to_decimal(e.hi()) },
                },
                delta: z.delta.map(|d| d.to_string()),
            })
            .collect();
        FunctionSpec { zeros, kind: self.kind }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for EntireFunction {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let spec = FunctionSpec::deserialize(de)?;
        let mut zeros = Vec::with_capacity(spec.zeros.len());
        for z in spec.zeros {
            let log_a = from_decimal(&z.log_a).map_err(D::Error::custom)?;
            let p = match z.p {
                PSpec::Int(v) => PCount::Exact(BigInt::from(v)),
                PSpec::Text(s) => PCount::Exact(s.parse().map_err(D::Error::custom)?),
                PSpec::Bounds { lo, hi } => {
                    // decimal text is rounded to nearest; widen so the bounds stay bounds
                    let lo = from_decimal(&lo).map_err(D::Error::custom)?.mul_dir(&ExtReal::from_f64(1.0 - 2f64.powi(-44)), Dir::Down);
                    let hi = from_decimal(&hi).map_err(D::Error::custom)?.mul_dir(&ExtReal::from_f64(1.0 + 2f64.powi(-44)), Dir::Up);
                    if lo > hi {
                        return Err(D::Error::custom("p bounds out of order"));
                    }
                    PCount::Approx(Enclosure::new(lo, hi))
                }
            };
            let delta = match z.delta {
                Some(s) => Some(s.trim().parse::<Delta>().map_err(|_| D::Error::custom(format!("bad delta {s:?}")))?),
                None => None,
            };
            zeros.push(ZeroEntry { log_a, p, delta });
        }
        EntireFunction::new(zeros, spec.kind).map_err(D::Error::custom)
    }
}
