//! Level-index form `exp^(h)(t)` with the residual `t` in the band `[1, e)`.

use super::elem::{exp_dir, ln_dir};
use super::ext::{Dir, ExtReal};
use super::{from_decimal, to_decimal, XnumError};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelReal {
    level: u32,
    residual: ExtReal,
}

fn band_top() -> ExtReal {
    ExtReal::from_f64(std::f64::consts::E)
}

fn ln_mid(x: &ExtReal) -> Result<ExtReal, XnumError> {
    let lo = ln_dir(x, Dir::Down)?;
    let hi = ln_dir(x, Dir::Up)?;
    Ok(lo.add_dir(&hi, Dir::Down).mul_pow2(-1))
}

fn exp_mid(x: &ExtReal) -> Result<ExtReal, XnumError> {
    let lo = exp_dir(x, Dir::Down)?;
    let hi = exp_dir(x, Dir::Up)?;
    Ok(lo.add_dir(&hi, Dir::Down).mul_pow2(-1))
}

impl LevelReal {
    /// Builds from parts, normalizing the residual into the band.
    pub fn new(level: u32, residual: ExtReal) -> Result<Self, XnumError> {
        let mut x = LevelReal { level: 0, residual };
        if x.residual < ExtReal::one() {
            return Err(XnumError::DomainError("residual below 1".into()));
        }
        x.normalize()?;
        x.level += level;
        Ok(x)
    }

    fn normalize(&mut self) -> Result<(), XnumError> {
        let top = band_top();
        while self.residual >= top {
            self.residual = ln_mid(&self.residual)?.greater(&ExtReal::one());
            self.level += 1;
        }
        Ok(())
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn residual(&self) -> &ExtReal {
        &self.residual
    }

    /// Level form of `x >= 1`.
    pub fn promote(x: &ExtReal) -> Result<Self, XnumError> {
        Self::new(0, x.clone())
    }

    /// Level form of `e^l` for `l >= 0`.
    pub fn from_log(l: &ExtReal) -> Result<Self, XnumError> {
        if l.is_negative() {
            return Err(XnumError::DomainError("value below 1".into()));
        }
        if *l >= ExtReal::one() {
            let mut v = Self::promote(l)?;
            v.level += 1;
            Ok(v)
        } else {
            Self::promote(&exp_mid(l)?.greater(&ExtReal::one()))
        }
    }

    /// Back to `ExtReal`; fails when the value is too large.
    pub fn demote(&self) -> Result<ExtReal, XnumError> {
        let mut t = self.residual.clone();
        for _ in 0..self.level {
            t = exp_mid(&t)?;
        }
        Ok(t)
    }

    /// Natural log of the value, as `ExtReal` when representable.
    pub fn ln_ext(&self) -> Result<ExtReal, XnumError> {
        if self.level == 0 {
            return ln_mid(&self.residual);
        }
        LevelReal { level: self.level - 1, residual: self.residual.clone() }.demote()
    }

    pub fn exp(&self) -> Self {
        LevelReal { level: self.level + 1, residual: self.residual.clone() }
    }

    /// Multiplies the value by `c > 0`. The second component is `false` when
    /// the factor was absorbed below working precision.
    pub fn scale(&self, c: &ExtReal) -> Result<(Self, bool), XnumError> {
        if !c.is_positive() {
            return Err(XnumError::DomainError("scale factor must be positive".into()));
        }
        if let Ok(v) = self.demote() {
            let p = v.mul_dir(c, Dir::Down);
            if p >= ExtReal::one() {
                return Ok((Self::promote(&p)?, true));
            }
        }
        match self.ln_ext() {
            Ok(l) => {
                let shifted = l.add_dir(&ln_mid(c)?, Dir::Down);
                let v = Self::from_log(&shifted)?;
                let exact = v != *self;
                Ok((v, exact))
            }
            Err(_) => Ok((self.clone(), false)),
        }
    }

    pub fn to_text(&self) -> String {
        format!("L{}:{}", self.level, to_decimal(&self.residual))
    }

    pub fn parse(s: &str) -> Result<Self, XnumError> {
        let rest = s.trim().strip_prefix('L').ok_or_else(|| XnumError::Parse(s.to_string()))?;
        let (h, t) = rest.split_once(':').ok_or_else(|| XnumError::Parse(s.to_string()))?;
        let h: u32 = h.parse().map_err(|_| XnumError::Parse(s.to_string()))?;
        Self::new(h, from_decimal(t)?)
    }
}

impl PartialOrd for LevelReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for LevelReal {
    fn cmp(&self, o: &Self) -> Ordering {
        self.level.cmp(&o.level).then_with(|| self.residual.cmp(&o.residual))
    }
}

impl fmt::Display for LevelReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
