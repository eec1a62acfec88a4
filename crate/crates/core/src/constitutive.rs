//! Scalar constitutive law of the thin-film Oldroyd-B limit.
//!
//! In the limit the whole stress state is a function of the wall-normal
//! shear rate `t = dz u1`. The total shear stress is
//!
//! ```text
//! phi(t) = nu (1 - r) t + nu r t / (1 + lambda*^2 t^2)
//! ```
//!
//! (solvent part plus polymer part `sigma12`), and the normal stresses follow
//! algebraically: `sigma22 = -sigma11 = lambda* t sigma12`. `phi` is odd and
//! satisfies `nu (1 - 9r/8) <= phi' <= nu`, so it is invertible for `r < 8/9`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{expand_bracket, safeguarded_newton, NewtonOptions};

/// Invertibility limit for `phi`.
pub const R_MONOTONE: f64 = 8.0 / 9.0;
/// Limit below which the Reynolds coefficient `U` provably stays negative.
pub const R_REYNOLDS: f64 = 2.0 / 9.0;

const PSI_TOL: f64 = 1e-12;
const PSI_MAX_ITER: usize = 100;

/// Rheological and kinematic constants of the limit problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    /// Total viscosity.
    pub nu: f64,
    /// Retardation ratio: polymer share of the viscosity, in `[0, 1)`.
    pub r: f64,
    /// Rescaled relaxation time (`lambda = epsilon * lambda_star`).
    pub lambda_star: f64,
    /// Sliding speed of the lower wall.
    pub s: f64,
    /// Density. Not used by the limit system; carried for output only.
    pub rho: f64,
}

impl FluidParams {
    pub fn new(nu: f64, r: f64, lambda_star: f64, s: f64) -> Result<Self> {
        let p = Self {
            nu,
            r,
            lambda_star,
            s,
            rho: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_slide(mut self, s: f64) -> Self {
        self.s = s;
        self
    }

    /// Collects every violated constraint into one message.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.nu.is_finite() && self.nu > 0.0) {
            v.push(format!("nu must be finite and > 0 (got {})", self.nu));
        }
        if !(self.r >= 0.0 && self.r < 1.0) {
            v.push(format!("r must lie in [0, 1) (got {})", self.r));
        }
        if !(self.lambda_star.is_finite() && self.lambda_star >= 0.0) {
            v.push(format!(
                "lambda_star must be finite and >= 0 (got {})",
                self.lambda_star
            ));
        }
        if !self.s.is_finite() {
            v.push(format!("s must be finite (got {})", self.s));
        }
        if !self.rho.is_finite() {
            v.push(format!("rho must be finite (got {})", self.rho));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v.join("; ")))
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.r < R_MONOTONE
    }

    pub fn ensure_invertible(&self) -> Result<()> {
        if self.is_invertible() {
            Ok(())
        } else {
            Err(Error::MonotonicityViolated { r: self.r })
        }
    }

    /// Gate for everything built on the Reynolds ODE.
    pub fn ensure_reynolds(&self) -> Result<()> {
        if self.r < R_REYNOLDS {
            Ok(())
        } else {
            Err(Error::RheologyOutOfRange { r: self.r })
        }
    }

    /// Lower bound `nu (1 - 9r/8)` of `phi'`.
    pub fn phi_prime_lower(&self) -> f64 {
        self.nu * (1.0 - 9.0 * self.r / 8.0)
    }

    /// Bounds `(m, M) = (1/nu, 1/(nu (1 - 9r/8)))` of `psi'`.
    pub fn psi_prime_bounds(&self) -> (f64, f64) {
        (1.0 / self.nu, 1.0 / self.phi_prime_lower())
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.nu * (1.0 - self.r) * t + self.sigma12_of_shear(t)
    }

    pub fn phi_prime(&self, t: f64) -> f64 {
        self.nu * (1.0 - self.r) + self.sigma12_prime(t)
    }

    /// Polymer shear stress `nu r t / (1 + lambda*^2 t^2)`.
    pub fn sigma12_of_shear(&self, t: f64) -> f64 {
        let lt = self.lambda_star * t;
        self.nu * self.r * t / (1.0 + lt * lt)
    }

    /// `d sigma12 / dt`.
    pub fn sigma12_prime(&self, t: f64) -> f64 {
        let l2t2 = (self.lambda_star * t).powi(2);
        self.nu * self.r * (1.0 - l2t2) / (1.0 + l2t2).powi(2)
    }

    /// Normal stresses `(sigma11, sigma22)`; `sigma22 = -sigma11 = lambda* t sigma12`.
    pub fn sigma_diag_of_shear(&self, t: f64) -> (f64, f64) {
        let d = self.lambda_star * t * self.sigma12_of_shear(t);
        (-d, d)
    }

    /// `d sigma11 / dt = -lambda* (sigma12 + t sigma12')`.
    pub fn sigma11_prime(&self, t: f64) -> f64 {
        -self.lambda_star * (self.sigma12_of_shear(t) + t * self.sigma12_prime(t))
    }

    /// Shear rate `t` with `phi(t) = y`.
    pub fn psi(&self, y: f64) -> Result<f64> {
        self.ensure_invertible()?;
        if y == 0.0 {
            return Ok(0.0);
        }
        if self.lambda_star == 0.0 {
            return Ok(y / self.nu);
        }
        // solve for |y| and restore the sign: psi is odd
        let a = y.abs();
        let center = a / self.nu;
        let spread = 9.0 * self.r / 8.0;
        let half_width = center * spread / (1.0 - spread) + f64::EPSILON * center;
        let g = |t: f64| Ok(self.phi(t) - a);
        let bracket = expand_bracket(g, center, half_width, 200)?.ok_or(Error::NoConvergence {
            what: "psi bracket",
            iterations: 200,
        })?;
        let opts = NewtonOptions {
            f_tol: PSI_TOL * a.max(1.0),
            max_iter: PSI_MAX_ITER,
            what: "psi",
        };
        let t = safeguarded_newton(
            |t| Ok((self.phi(t) - a, self.phi_prime(t))),
            bracket,
            center,
            opts,
        )?;
        Ok(t.copysign(y))
    }

    /// `(psi(y), psi'(y))` with `psi' = 1 / phi'(psi)`.
    pub fn psi_with_prime(&self, y: f64) -> Result<(f64, f64)> {
        let t = self.psi(y)?;
        Ok((t, 1.0 / self.phi_prime(t)))
    }

    pub fn psi_prime(&self, y: f64) -> Result<f64> {
        self.psi_with_prime(y).map(|(_, d)| d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(nu: f64, r: f64, l: f64) -> FluidParams {
        FluidParams::new(nu, r, l, 0.0).unwrap()
    }

    #[test]
    fn phi_examples() {
        let q = p(1.0, 0.5, 1.0);
        assert_eq!(q.phi(0.0), 0.0);
        assert!((q.phi(1.0) - 0.75).abs() < 1e-15);
        assert!((q.phi_prime(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(q.phi_prime(0.0), 1.0);
        let newt = p(1.0, 0.0, 3.0);
        for t in [-2.0, 0.3, 7.0] {
            assert_eq!(newt.phi(t), t);
        }
    }

    #[test]
    fn psi_examples() {
        let q = p(1.0, 0.5, 1.0);
        assert_eq!(q.psi(0.0).unwrap(), 0.0);
        assert!((q.psi(0.75).unwrap() - 1.0).abs() < 1e-12);
        let newt = p(2.5, 0.0, 0.0);
        assert_eq!(newt.psi(5.0).unwrap(), 2.0);
        let r0 = p(2.0, 0.0, 0.7);
        assert!((r0.psi(3.0).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn psi_refuses_non_monotone() {
        let q = FluidParams {
            nu: 1.0,
            r: 0.9,
            lambda_star: 1.0,
            s: 0.0,
            rho: 1.0,
        };
        assert_eq!(q.psi(1.0), Err(Error::MonotonicityViolated { r: 0.9 }));
    }

    #[test]
    fn phi_prime_lower_bound_example() {
        let q = p(2.0, 0.2, 1.3);
        let inf = (0..20001)
            .map(|i| -50.0 + i as f64 * 0.005)
            .map(|t| q.phi_prime(t))
            .fold(f64::INFINITY, f64::min);
        assert!(inf >= 1.55 - 1e-12, "{inf}");
        // the infimum is attained at lambda t = sqrt(3)
        assert!((inf - 1.55).abs() < 1e-6);
    }

    #[test]
    fn stress_examples() {
        let q = p(1.0, 0.2, 0.1);
        let s12 = q.sigma12_of_shear(-1.0);
        assert!((s12 + 0.2 / 1.01).abs() < 1e-15);
        assert!((s12 + 0.1980198).abs() < 1e-7);
        let (s11, s22) = q.sigma_diag_of_shear(-1.0);
        assert!((s11 + 0.01980198).abs() < 1e-8);
        assert_eq!(s11 + s22, 0.0);
        assert_eq!(q.sigma_diag_of_shear(0.0), (-0.0, 0.0));
        assert_eq!(q.sigma12_of_shear(0.0), 0.0);
    }

    #[test]
    fn couette_normal_stress_closed_form() {
        let (nu, r, l, s, h) = (1.3, 0.15, 0.4, 0.9, 1.7);
        let q = p(nu, r, l);
        let (s11, _) = q.sigma_diag_of_shear(-s / h);
        let expect = -r * nu * s * s * l / (h * h + l * l * s * s);
        assert!((s11 - expect).abs() < 1e-15);
    }

    #[test]
    fn invalid_params() {
        assert!(FluidParams::new(0.0, 0.1, 0.1, 1.0).is_err());
        assert!(FluidParams::new(1.0, 1.0, 0.1, 1.0).is_err());
        assert!(FluidParams::new(1.0, 0.1, -0.1, 1.0).is_err());
        let err = FluidParams::new(-1.0, 2.0, -1.0, f64::NAN).unwrap_err();
        let Error::InvalidParams(msg) = err else {
            panic!()
        };
        assert_eq!(msg.matches(';').count(), 3, "{msg}");
    }

    proptest! {
        #[test]
        fn polymer_stress_is_bounded(t in -1e4f64..1e4, l in 0.01f64..10.0, r in 0.0f64..0.88) {
            let q = p(1.0, r, l);
            prop_assert!(q.sigma12_of_shear(t).abs() <= r / (2.0 * l) * (1.0 + 1e-14));
        }

        #[test]
        fn odd_and_consistent(t in -1e3f64..1e3, nu in 0.1f64..10.0, r in 0.0f64..0.88, l in 0.0f64..5.0) {
            let q = p(nu, r, l);
            prop_assert_eq!(q.phi(-t), -q.phi(t));
            let y = q.phi(t);
            prop_assert_eq!(q.psi(-y).unwrap(), -q.psi(y).unwrap());
            prop_assert!((q.phi(t) - (nu * (1.0 - r) * t + q.sigma12_of_shear(t))).abs() <= 1e-15 * y.abs().max(1.0));
            let (s11, s22) = q.sigma_diag_of_shear(t);
            prop_assert_eq!(s11 + s22, 0.0);
            prop_assert!(s11 <= 0.0);
        }

        #[test]
        fn derivative_matches_central_difference(t in -100f64..100.0, r in 0.0f64..0.88, l in 0.0f64..3.0) {
            let q = p(1.7, r, l);
            let d = 1e-5 * t.abs().max(1.0);
            let fd = (q.phi(t + d) - q.phi(t - d)) / (2.0 * d);
            prop_assert!((q.phi_prime(t) - fd).abs() <= 1e-6 * q.nu);
            let fd11 = (q.sigma_diag_of_shear(t + d).0 - q.sigma_diag_of_shear(t - d).0) / (2.0 * d);
            prop_assert!((q.sigma11_prime(t) - fd11).abs() <= 1e-6 * (1.0 + fd11.abs()));
        }
    }
}
