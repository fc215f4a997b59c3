//! Physical parameters, complex-sector geometry and jump-bracket conventions.
//!
//! Everything downstream (symbol construction, dispersion analysis, kernels)
//! works with one immutable [`FluidParams`] value describing the two-phase
//! configuration: phase 1 occupies the lower half-space, phase 2 the upper
//! one, and jump brackets are always "upper minus lower".

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("parameter `{0}` must be strictly positive")]
    NonPositiveParameter(&'static str),
    #[error("gravitational acceleration must be non-negative")]
    NegativeGravity,
    #[error("sector half-angle must lie in (0, pi)")]
    InvalidSectorAngle,
    #[error("strip parameters require beta >= 0 and delta in (0, 1]")]
    InvalidStrip,
}

/// Densities, viscosities, surface tension and gravity of the two-phase
/// configuration. Phase 1 is the lower fluid (y < 0), phase 2 the upper one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    pub rho1: f64,
    pub rho2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub sigma: f64,
    pub gamma_a: f64,
}

impl FluidParams {
    pub fn new(
        rho1: f64,
        rho2: f64,
        mu1: f64,
        mu2: f64,
        sigma: f64,
        gamma_a: f64,
    ) -> Result<Self, ParamError> {
        Self {
            rho1,
            rho2,
            mu1,
            mu2,
            sigma,
            gamma_a,
        }
        .validated()
    }

    /// Checks positivity of densities, viscosities and surface tension and
    /// non-negativity of gravity; returns the value unchanged on success.
    /// `gamma_a = 0` is allowed (the pure surface-tension case).
    pub fn validated(self) -> Result<Self, ParamError> {
        if !(self.rho1 > 0.0) || !self.rho1.is_finite() {
            return Err(ParamError::NonPositiveParameter("rho1"));
        }
        if !(self.rho2 > 0.0) || !self.rho2.is_finite() {
            return Err(ParamError::NonPositiveParameter("rho2"));
        }
        if !(self.mu1 > 0.0) || !self.mu1.is_finite() {
            return Err(ParamError::NonPositiveParameter("mu1"));
        }
        if !(self.mu2 > 0.0) || !self.mu2.is_finite() {
            return Err(ParamError::NonPositiveParameter("mu2"));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(ParamError::NonPositiveParameter("sigma"));
        }
        if self.gamma_a < 0.0 || !self.gamma_a.is_finite() {
            return Err(ParamError::NegativeGravity);
        }
        Ok(self)
    }

    /// Density jump bracket `[[rho]] = rho2 - rho1` (upper minus lower).
    pub fn density_jump(&self) -> f64 {
        self.rho2 - self.rho1
    }

    /// Mean of the two viscosities times two, the scale entering `k(0)`.
    pub fn viscosity_sum(&self) -> f64 {
        self.mu1 + self.mu2
    }

    pub fn density_sum(&self) -> f64 {
        self.rho1 + self.rho2
    }

    /// Phase-wise density by sign of the vertical coordinate.
    pub fn rho_at(&self, y: f64) -> f64 {
        if y > 0.0 {
            self.rho2
        } else {
            self.rho1
        }
    }

    /// Phase-wise viscosity by sign of the vertical coordinate.
    pub fn mu_at(&self, y: f64) -> f64 {
        if y > 0.0 {
            self.mu2
        } else {
            self.mu1
        }
    }

    /// Configuration with the phases exchanged (used by reflection checks).
    pub fn swapped(&self) -> Self {
        Self {
            rho1: self.rho2,
            rho2: self.rho1,
            mu1: self.mu2,
            mu2: self.mu1,
            sigma: self.sigma,
            gamma_a: self.gamma_a,
        }
    }
}

/// Jump bracket of a quantity across the interface: value on the upper phase
/// minus value on the lower phase.
pub fn jump(value_omega2: Complex64, value_omega1: Complex64) -> Complex64 {
    value_omega2 - value_omega1
}

/// Open sector `{ w != 0 : |arg w| < half_angle }` around the positive real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    half_angle: f64,
}

impl Sector {
    pub fn new(half_angle: f64) -> Result<Self, ParamError> {
        if half_angle > 0.0 && half_angle < std::f64::consts::PI {
            Ok(Self { half_angle })
        } else {
            Err(ParamError::InvalidSectorAngle)
        }
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// Membership test. The boundary rays are excluded (open sector) and the
    /// argument is the principal value in (-pi, pi].
    pub fn contains(&self, w: Complex64) -> bool {
        in_sector(w, self.half_angle)
    }
}

/// `true` iff `w != 0` and `|arg w| < theta` with the principal argument.
pub fn in_sector(w: Complex64, theta: f64) -> bool {
    if w == Complex64::new(0.0, 0.0) {
        return false;
    }
    w.arg().abs() < theta
}

/// Horizontal strip `U_{beta,delta} = { |Re z| < beta + 1, |Im z| < delta }`
/// housing the transport-symbol tail parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripDomain {
    pub beta: f64,
    pub delta: f64,
}

impl StripDomain {
    pub fn new(beta: f64, delta: f64) -> Result<Self, ParamError> {
        if beta >= 0.0 && delta > 0.0 && delta <= 1.0 {
            Ok(Self { beta, delta })
        } else {
            Err(ParamError::InvalidStrip)
        }
    }

    pub fn contains(&self, zeta: Complex64) -> bool {
        zeta.re.abs() < self.beta + 1.0 && zeta.im.abs() < self.delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn jump_is_difference_of_one_sided_values() {
        assert_eq!(jump(c(5.0, 0.0), c(2.0, 0.0)), c(3.0, 0.0));
        let x = c(1.25, -0.5);
        assert_eq!(jump(x, x), c(0.0, 0.0));
        // density bracket instance: rho2 = 2, rho1 = 1
        assert_eq!(jump(c(2.0, 0.0), c(1.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn jump_is_antisymmetric() {
        let pts = [c(1.0, 2.0), c(-0.5, 0.25), c(0.0, -3.0), c(4.0, 0.0)];
        for &a in &pts {
            for &b in &pts {
                assert_eq!(jump(a, b), -jump(b, a));
            }
        }
    }

    #[test]
    fn sector_membership() {
        assert!(in_sector(c(1.0, 0.0), FRAC_PI_2));
        assert!(!in_sector(c(-1.0, 0.0), FRAC_PI_2));
        assert!(in_sector(c(0.0, 1.0), FRAC_PI_2 + 0.1));
        // boundary is excluded
        assert!(!in_sector(c(0.0, 1.0), FRAC_PI_2));
        // origin never belongs
        assert!(!in_sector(c(0.0, 0.0), 3.0));
    }

    #[test]
    fn sector_monotone_in_angle() {
        let pts = [c(1.0, 0.5), c(0.3, -2.0), c(-1.0, 1.5), c(2.0, 0.0)];
        let angles = [0.3, 1.0, FRAC_PI_2, 2.0, 3.0];
        for &w in &pts {
            for (i, &th1) in angles.iter().enumerate() {
                for &th2 in &angles[i + 1..] {
                    if in_sector(w, th1) {
                        assert!(in_sector(w, th2), "monotonicity failed at {w} {th1} {th2}");
                    }
                }
            }
        }
    }

    #[test]
    fn sector_rejects_bad_angles() {
        assert!(Sector::new(0.0).is_err());
        assert!(Sector::new(PI).is_err());
        assert!(Sector::new(1.0).is_ok());
    }

    #[test]
    fn validation_accepts_unit_configuration() {
        let p = FluidParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.density_jump(), 0.0);
    }

    #[test]
    fn validation_rejects_zero_surface_tension() {
        let err = FluidParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 1.0).unwrap_err();
        assert_eq!(err, ParamError::NonPositiveParameter("sigma"));
    }

    #[test]
    fn gravity_free_case_is_allowed() {
        assert!(FluidParams::new(1.0, 2.0, 0.5, 0.5, 1.0, 0.0).is_ok());
    }

    #[test]
    fn validation_is_idempotent() {
        let p = FluidParams::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0).unwrap();
        assert_eq!(p.validated().unwrap(), p);
    }

    #[test]
    fn strip_membership_matches_definition() {
        let u = StripDomain::new(1.0, 0.5).unwrap();
        assert!(u.contains(c(1.9, 0.4)));
        assert!(!u.contains(c(2.0, 0.0)));
        assert!(!u.contains(c(0.0, 0.5)));
        assert!(StripDomain::new(-0.1, 0.5).is_err());
        assert!(StripDomain::new(1.0, 1.5).is_err());
    }

    #[test]
    fn fluid_params_json_round_trip_uses_flat_keys() {
        let p = FluidParams::new(1.0, 2.0, 0.5, 0.25, 1.5, 9.8).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        for key in ["rho1", "rho2", "mu1", "mu2", "sigma", "gamma_a"] {
            assert!(s.contains(key), "missing key {key} in {s}");
        }
        let back: FluidParams = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
