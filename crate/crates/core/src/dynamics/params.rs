use std::fmt;

use crate::error::{Error, Result};
use crate::real::Real;

/// Nondimensional numbers of the transformed system plus the period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysParams<T> {
    pub pr: T,
    pub ra: T,
    pub nsq: T,
    pub lsq: T,
    pub d: T,
    pub l: T,
}

impl<T: Real> PhysParams<T> {
    pub fn new(pr: T, ra: T, nsq: T, lsq: T, d: T, l: T) -> Result<Self> {
        let p = Self { pr, ra, nsq, lsq, d, l };
        p.validate()?;
        Ok(p)
    }

    /// `Pr = Ra = D = l = L² = 1`, `N² = 1/2`.
    pub fn small_ra() -> Self {
        Self {
            pr: T::one(),
            ra: T::one(),
            nsq: T::lit(0.5),
            lsq: T::one(),
            d: T::one(),
            l: T::one(),
        }
    }

    /// The invariants of the model: every number positive and `0 < N² < 1`.
    pub fn validate(&self) -> Result<()> {
        self.check_finite()?;
        for (name, v) in [
            ("Pr", self.pr),
            ("Ra", self.ra),
            ("L²", self.lsq),
            ("D", self.d),
            ("l", self.l),
        ] {
            if v <= T::zero() {
                return Err(Error::Params(format!("{name} > 0 violated ({name} = {v})")));
            }
        }
        if !(self.nsq > T::zero() && self.nsq < T::one()) {
            return Err(Error::Params(format!("0 < N² < 1 violated (N² = {})", self.nsq)));
        }
        Ok(())
    }

    /// Weaker check used by the integrator: couplings may vanish, so that
    /// linear sub-problems (`N² = Ra = D = 0`) can be stepped directly.
    pub fn validate_degenerate(&self) -> Result<()> {
        self.check_finite()?;
        for (name, v) in [("Pr", self.pr), ("L²", self.lsq), ("l", self.l)] {
            if v <= T::zero() {
                return Err(Error::Params(format!("{name} > 0 violated ({name} = {v})")));
            }
        }
        for (name, v) in [("Ra", self.ra), ("D", self.d)] {
            if v < T::zero() {
                return Err(Error::Params(format!("{name} ≥ 0 violated ({name} = {v})")));
            }
        }
        if !(self.nsq >= T::zero() && self.nsq < T::one()) {
            return Err(Error::Params(format!("0 ≤ N² < 1 violated (N² = {})", self.nsq)));
        }
        Ok(())
    }

    fn check_finite(&self) -> Result<()> {
        let all = [self.pr, self.ra, self.nsq, self.lsq, self.d, self.l];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Params(format!("non-finite parameter in {self}")));
        }
        Ok(())
    }

    /// Whether the uniqueness condition `N²L² < 1` of the mixed-regularity theory holds.
    pub fn mixed_uniqueness(&self) -> bool {
        self.nsq * self.lsq < T::one()
    }
}

impl<T: Real> fmt::Display for PhysParams<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Pr={} Ra={} N²={} L²={} D={} l={}",
            self.pr, self.ra, self.nsq, self.lsq, self.d, self.l
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coupling_outside_unit_interval() {
        let e = PhysParams::new(1.0, 1.0, 1.5, 1.0, 1.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("0 < N² < 1"), "{e}");
        assert!(PhysParams::new(1.0, 1.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysParams::new(1.0, -1.0, 0.5, 1.0, 1.0, 1.0).is_err());
        assert!(PhysParams::new(1.0, 1.0, 0.5, 1.0, 1.0, f64::NAN).is_err());
        assert!(PhysParams::<f64>::small_ra().validate().is_ok());
    }

    #[test]
    fn degenerate_couplings_allowed_for_stepping() {
        let p = PhysParams {
            pr: 1.0,
            ra: 0.0,
            nsq: 0.0,
            lsq: 1.0,
            d: 0.0,
            l: 1.0,
        };
        assert!(p.validate().is_err());
        assert!(p.validate_degenerate().is_ok());
    }
}
