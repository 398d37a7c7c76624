//! Polytropic gas with `kappa = 1/gamma`, so that `c^2(rho) = rho^(gamma-1)`
//! and `h(rho) = (rho^(gamma-1) - 1)/(gamma - 1)`.
//!
//! The Bernoulli constant is pinned by the quiescent upstream state, so the
//! density of a pseudo-potential flow is
//! `rho = (rho0^(gamma-1) - (gamma-1)(|Dphi|^2/2 + phi))^(1/(gamma-1))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    gamma: f64,
    rho0: f64,
}

/// Result of the type test for the pseudo-potential equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipticity {
    pub elliptic: bool,
    /// `c_*(phi) - |Dphi|`; positive inside the elliptic region.
    pub margin: f64,
}

impl GasModel {
    pub fn new(gamma: f64, rho0: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and > 1, got {gamma}"
            )));
        }
        if !(rho0 > 0.0) || !rho0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rho0 must be finite and > 0, got {rho0}"
            )));
        }
        Ok(Self { gamma, rho0 })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    fn check_density(rho: f64) -> Result<()> {
        if rho > 0.0 {
            Ok(())
        } else {
            Err(Error::NonPositiveDensity(rho))
        }
    }

    pub fn enthalpy(&self, rho: f64) -> Result<f64> {
        Self::check_density(rho)?;
        Ok((rho.powf(self.gamma - 1.0) - 1.0) / (self.gamma - 1.0))
    }

    /// Squared sound speed `rho^(gamma-1)`.
    pub fn sound_speed_sq(&self, rho: f64) -> Result<f64> {
        Self::check_density(rho)?;
        Ok(rho.powf(self.gamma - 1.0))
    }

    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        Self::check_density(rho)?;
        Ok(rho.powf(0.5 * (self.gamma - 1.0)))
    }

    /// The Bernoulli constant `h(rho0)`.
    pub fn bernoulli_constant(&self) -> f64 {
        (self.rho0.powf(self.gamma - 1.0) - 1.0) / (self.gamma - 1.0)
    }

    /// `rho^(gamma-1)` from the Bernoulli law; the quantity whose sign decides
    /// cavitation.
    pub fn bernoulli_power_argument(&self, speed_sq: f64, phi: f64) -> f64 {
        self.rho0.powf(self.gamma - 1.0) - (self.gamma - 1.0) * (0.5 * speed_sq + phi)
    }

    pub fn density_from_bernoulli(&self, speed_sq: f64, phi: f64) -> Result<f64> {
        if speed_sq < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "squared speed must be non-negative, got {speed_sq}"
            )));
        }
        let argument = self.bernoulli_power_argument(speed_sq, phi);
        if !(argument > 0.0) {
            return Err(Error::Vacuum { argument });
        }
        Ok(argument.powf(1.0 / (self.gamma - 1.0)))
    }

    /// Density from the power argument `rho^(gamma-1)` directly.
    pub fn density_from_power(&self, argument: f64) -> Result<f64> {
        if !(argument > 0.0) {
            return Err(Error::Vacuum { argument });
        }
        Ok(argument.powf(1.0 / (self.gamma - 1.0)))
    }

    /// Squared critical speed `c_*^2 = 2/(gamma+1) (rho0^(gamma-1) - (gamma-1) phi)`.
    pub fn critical_speed_sq(&self, phi: f64) -> Result<f64> {
        let radicand = self.rho0.powf(self.gamma - 1.0) - (self.gamma - 1.0) * phi;
        if radicand < 0.0 {
            return Err(Error::NoSonicThreshold { radicand });
        }
        Ok(2.0 / (self.gamma + 1.0) * radicand)
    }

    /// Critical speed. A zero radicand yields zero; a negative one is an error.
    pub fn critical_speed(&self, phi: f64) -> Result<f64> {
        self.critical_speed_sq(phi).map(f64::sqrt)
    }

    /// Strict test `|Dphi| < c_*(phi)`; the sonic boundary is not elliptic.
    pub fn is_elliptic(&self, pseudo_velocity: [f64; 2], phi: f64) -> Result<Ellipticity> {
        let speed_sq = pseudo_velocity[0].powi(2) + pseudo_velocity[1].powi(2);
        self.density_from_bernoulli(speed_sq, phi)?;
        let c_star = self.critical_speed(phi)?;
        let margin = c_star - speed_sq.sqrt();
        Ok(Ellipticity {
            elliptic: margin > 0.0,
            margin,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas(gamma: f64) -> GasModel {
        GasModel::new(gamma, 1.0).unwrap()
    }

    #[test]
    fn rejects_non_polytropic_exponents() {
        assert!(GasModel::new(1.0, 1.0).is_err());
        assert!(GasModel::new(0.5, 1.0).is_err());
        assert!(GasModel::new(1.4, 0.0).is_err());
        assert!(GasModel::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn enthalpy_values() {
        assert_eq!(gas(1.4).enthalpy(1.0).unwrap(), 0.0);
        assert!((gas(2.0).enthalpy(2.0).unwrap() - 1.0).abs() < 1e-15);
        // (2^0.4 - 1)/0.4
        assert!((gas(1.4).enthalpy(2.0).unwrap() - 0.798_769_776_932_235_5).abs() < 1e-12);
        assert_eq!(
            gas(1.4).enthalpy(-1.0),
            Err(Error::NonPositiveDensity(-1.0))
        );
        assert!(gas(1.4).enthalpy(0.0).is_err());
    }

    #[test]
    fn sound_speed_values() {
        assert_eq!(gas(1.4).sound_speed(1.0).unwrap(), 1.0);
        assert!((gas(2.0).sound_speed(4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((gas(1.4).sound_speed(2.0).unwrap() - 1.148_698).abs() < 1e-6);
        assert!(gas(1.4).sound_speed(0.0).is_err());
    }

    #[test]
    fn bernoulli_density_values() {
        assert_eq!(gas(1.4).density_from_bernoulli(0.0, 0.0).unwrap(), 1.0);
        assert!((gas(2.0).density_from_bernoulli(0.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        match gas(2.0).density_from_bernoulli(0.0, 1.5) {
            Err(Error::Vacuum { argument }) => assert!((argument + 0.5).abs() < 1e-15),
            other => panic!("expected vacuum, got {other:?}"),
        }
    }

    #[test]
    fn critical_speed_values() {
        assert!((gas(1.4).critical_speed(0.0).unwrap() - 0.912_871).abs() < 1e-6);
        assert_eq!(gas(3.0).critical_speed(0.5).unwrap(), 0.0);
        assert!((gas(2.0).critical_speed(0.0).unwrap() - 0.816_497).abs() < 1e-6);
        assert!(matches!(
            gas(2.0).critical_speed(2.0),
            Err(Error::NoSonicThreshold { .. })
        ));
    }

    #[test]
    fn ellipticity_values() {
        let e = gas(1.4).is_elliptic([0.0, 0.0], 0.0).unwrap();
        assert!(e.elliptic);
        assert!((e.margin - 0.912_871).abs() < 1e-6);

        let g = gas(2.0);
        let c = g.critical_speed(0.0).unwrap();
        let e = g.is_elliptic([c, 0.0], 0.0).unwrap();
        assert!(!e.elliptic);
        assert_eq!(e.margin, 0.0);

        let e = g.is_elliptic([1.0, 0.0], 0.0).unwrap();
        assert!(!e.elliptic);
        assert!((e.margin + 0.183_503).abs() < 1e-6);

        assert!(matches!(
            g.is_elliptic([0.0, 0.0], 1.5),
            Err(Error::Vacuum { .. })
        ));
    }
}
