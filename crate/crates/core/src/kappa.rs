//! The integration-constant closure.
//!
//! Integrating the momentum balance once across the gap gives
//! `phi(dz u1) = q z + kappa`, hence `dz u1 = psi(q z + kappa)` and
//! `u1(z) = s + int_0^z psi(q t + kappa) dt`. The upper no-slip condition
//! fixes `kappa` as the unique root of
//!
//! ```text
//! F(h, q, s, kappa) = int_0^h psi(q t + kappa) dt + s
//! ```
//!
//! which is strictly increasing in `kappa` (`dF/dkappa = int psi' > 0`).
//! The root is `K(h, q, s)`; its partials follow from implicit
//! differentiation and are ratios of `psi'`-weighted moments.

use crate::constitutive::FluidParams;
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_n, DEFAULT_TOL};
use crate::roots::{safeguarded_newton, Bracket, NewtonOptions};

const KAPPA_TOL: f64 = 1e-10;
const KAPPA_MAX_ITER: usize = 100;

/// Arguments `(h, q, s)` of the closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaQuery {
    pub h: f64,
    pub q: f64,
    pub s: f64,
}

impl KappaQuery {
    pub fn new(h: f64, q: f64, s: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGap { h });
        }
        Ok(Self { h, q, s })
    }
}

/// `F(h, q, s, kappa)`.
pub fn f_eval(kq: &KappaQuery, kappa: f64, p: &FluidParams) -> Result<f64> {
    p.ensure_invertible()?;
    let int = integrate(|t| p.psi(kq.q * t + kappa), 0.0, kq.h, DEFAULT_TOL)?;
    Ok(int + kq.s)
}

/// `(F, dF/dkappa)` from one shared quadrature.
fn f_and_slope(kq: &KappaQuery, kappa: f64, p: &FluidParams) -> Result<(f64, f64)> {
    let [int, slope] = integrate_n(
        |t| {
            let (v, d) = p.psi_with_prime(kq.q * t + kappa)?;
            Ok([v, d])
        },
        0.0,
        kq.h,
        DEFAULT_TOL,
    )?;
    Ok((int + kq.s, slope))
}

/// `K(h, q, s)`: the `kappa` with `F(h, q, s, kappa) = 0`.
pub fn kappa_solve(kq: &KappaQuery, p: &FluidParams) -> Result<f64> {
    KappaQuery::new(kq.h, kq.q, kq.s)?;
    p.ensure_invertible()?;
    if p.lambda_star == 0.0 || p.r == 0.0 {
        // linear psi: F = (q h^2 / 2 + kappa h) / nu + s
        return Ok(-(kq.q * kq.h / 2.0 + p.nu * kq.s / kq.h));
    }
    // exact when q = 0 and when s = 0
    let k0 = p.phi(-kq.s / kq.h) - kq.q * kq.h / 2.0;
    let (f0, d0) = f_and_slope(kq, k0, p)?;
    let f_tol = KAPPA_TOL * kq.s.abs().max(1.0);
    if f0.abs() <= f_tol {
        let k1 = k0 - f0 / d0;
        let f1 = f_eval(kq, k1, p)?;
        return Ok(if f1.abs() <= f0.abs() { k1 } else { k0 });
    }
    // dF/dkappa >= h / nu, so the root lies within |F(k0)| nu / h of k0
    let (m, _) = p.psi_prime_bounds();
    let mut w = f0.abs() / (m * kq.h) * (1.0 + 1e-6) + 1e-12 * k0.abs().max(1.0);
    let mut bracket = None;
    for _ in 0..60 {
        let (lo, hi) = if f0 > 0.0 { (k0 - w, k0) } else { (k0, k0 + w) };
        let (f_lo, f_hi) = if f0 > 0.0 {
            (f_eval(kq, lo, p)?, f0)
        } else {
            (f0, f_eval(kq, hi, p)?)
        };
        let b = Bracket { lo, f_lo, hi, f_hi };
        if b.straddles() {
            bracket = Some(b);
            break;
        }
        w *= 2.0;
    }
    let bracket = bracket.ok_or(Error::NoConvergence {
        what: "kappa bracket",
        iterations: 60,
    })?;
    let opts = NewtonOptions {
        f_tol,
        max_iter: KAPPA_MAX_ITER,
        what: "kappa",
    };
    safeguarded_newton(|k| f_and_slope(kq, k, p), bracket, k0 - f0 / d0, opts)
}

/// Everything downstream needs at one `(h, q, s)`: the root and the
/// `psi'`-weighted moments `int_0^h t^k psi'(q t + kappa) dt`, `k = 0, 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closure {
    pub query: KappaQuery,
    pub kappa: f64,
    pub moment0: f64,
    pub moment1: f64,
    pub moment2: f64,
    /// Shear rate at the upper wall, `psi(q h + kappa)`.
    pub top_shear: f64,
}

impl Closure {
    pub fn new(kq: KappaQuery, p: &FluidParams) -> Result<Self> {
        let kappa = kappa_solve(&kq, p)?;
        let [moment0, moment1, moment2] = integrate_n(
            |t| {
                let d = p.psi_prime(kq.q * t + kappa)?;
                Ok([d, t * d, t * t * d])
            },
            0.0,
            kq.h,
            DEFAULT_TOL,
        )?;
        let top_shear = p.psi(kq.q * kq.h + kappa)?;
        Ok(Self {
            query: kq,
            kappa,
            moment0,
            moment1,
            moment2,
            top_shear,
        })
    }

    /// `dK/dq = -int t psi' / int psi'`.
    pub fn dk_dq(&self) -> f64 {
        -self.moment1 / self.moment0
    }

    /// `dK/dh = -psi(q h + kappa) / int psi'`.
    pub fn dk_dh(&self) -> f64 {
        -self.top_shear / self.moment0
    }

    /// `dK/ds = -1 / int psi'`.
    pub fn dk_ds(&self) -> f64 {
        -1.0 / self.moment0
    }

    /// `int_0^h (h - t) psi' dt`.
    pub fn lever_moment(&self) -> f64 {
        self.query.h * self.moment0 - self.moment1
    }
}

pub fn dk_dq(kq: &KappaQuery, p: &FluidParams) -> Result<f64> {
    let c = Closure::new(*kq, p)?;
    let d = c.dk_dq();
    debug_assert!(d < 0.0, "dK/dq = {d} must be negative for h > 0");
    Ok(d)
}

pub fn dk_dh(kq: &KappaQuery, p: &FluidParams) -> Result<f64> {
    Closure::new(*kq, p).map(|c| c.dk_dh())
}

/// Volume flux through the gap, `int_0^h u1 dz = h s + int_0^h (h - t) psi(q t + kappa) dt`.
pub fn gap_flux(kq: &KappaQuery, p: &FluidParams) -> Result<f64> {
    let kappa = kappa_solve(kq, p)?;
    gap_flux_with(kq, kappa, p)
}

pub(crate) fn gap_flux_with(kq: &KappaQuery, kappa: f64, p: &FluidParams) -> Result<f64> {
    let int = integrate(
        |t| Ok((kq.h - t) * p.psi(kq.q * t + kappa)?),
        0.0,
        kq.h,
        DEFAULT_TOL,
    )?;
    Ok(kq.h * kq.s + int)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn visco() -> FluidParams {
        FluidParams::new(1.0, 0.2, 0.1, 1.0).unwrap()
    }

    fn newtonian() -> FluidParams {
        FluidParams::new(1.0, 0.2, 0.0, 1.0).unwrap()
    }

    #[test]
    fn f_examples() {
        let p = visco();
        let kq = KappaQuery::new(1.3, 0.0, 0.0).unwrap();
        assert_eq!(f_eval(&kq, 0.0, &p).unwrap(), 0.0);
        let n = newtonian();
        let (h, q, s, k) = (1.4, 2.0, -0.7, 0.3);
        let kq = KappaQuery::new(h, q, s).unwrap();
        let v = f_eval(&kq, k, &n).unwrap();
        assert!((v - (q * h * h / 2.0 + k * h + s)).abs() < 1e-13);
        let kq = KappaQuery::new(1.0, 0.0, 1.0).unwrap();
        assert!(f_eval(&kq, p.phi(-1.0), &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn kappa_examples() {
        let p = FluidParams::new(1.0, 0.2, 0.8, 0.0).unwrap();
        let kq = KappaQuery::new(1.5, 3.0, 0.0).unwrap();
        assert!((kappa_solve(&kq, &p).unwrap() + 3.0 * 1.5 / 2.0).abs() < 1e-10);
        let kq = KappaQuery::new(0.7, 0.0, 1.2).unwrap();
        assert!((kappa_solve(&kq, &p).unwrap() - p.phi(-1.2 / 0.7)).abs() < 1e-10);
        let n = newtonian();
        let kq = KappaQuery::new(2.0, -1.5, 0.4).unwrap();
        assert!((kappa_solve(&kq, &n).unwrap() + (-1.5 * 2.0 / 2.0 + 0.4 / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn invalid_gap() {
        assert_eq!(
            KappaQuery::new(0.0, 1.0, 1.0),
            Err(Error::InvalidGap { h: 0.0 })
        );
        let kq = KappaQuery {
            h: -1.0,
            q: 0.0,
            s: 0.0,
        };
        assert!(matches!(
            kappa_solve(&kq, &visco()),
            Err(Error::InvalidGap { .. })
        ));
    }

    #[test]
    fn newtonian_partials_and_flux() {
        let n = newtonian();
        let (h, q, s) = (1.3, 2.5, 0.8);
        let kq = KappaQuery::new(h, q, s).unwrap();
        let c = Closure::new(kq, &n).unwrap();
        assert!((c.dk_dq() + h / 2.0).abs() < 1e-13);
        assert!((c.dk_dh() + (q * h / 2.0 - s / h) / h).abs() < 1e-13);
        let flux = gap_flux(&kq, &n).unwrap();
        assert!((flux - (s * h / 2.0 - q * h.powi(3) / 12.0)).abs() < 1e-13);
    }

    #[test]
    fn couette_flux_and_rest() {
        let p = visco();
        let kq = KappaQuery::new(1.7, 0.0, 0.9).unwrap();
        assert!((gap_flux(&kq, &p).unwrap() - 0.9 * 1.7 / 2.0).abs() < 1e-12);
        let kq = KappaQuery::new(1.7, 0.0, 0.0).unwrap();
        assert_eq!(gap_flux(&kq, &p).unwrap(), 0.0);
        assert_eq!(dk_dh(&kq, &p).unwrap(), 0.0);
    }

    #[test]
    fn strong_pressure_gradient() {
        // lambda* q h spans the inflection of phi several times
        let p = FluidParams::new(1.0, 0.2, 2.0, 1.0).unwrap();
        let kq = KappaQuery::new(2.0, 40.0, 3.0).unwrap();
        let k = kappa_solve(&kq, &p).unwrap();
        assert!(f_eval(&kq, k, &p).unwrap().abs() <= 1e-10 * 3.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn partials_match_finite_differences(
            h in 0.2f64..3.0, q in -20f64..20.0, s in -3f64..3.0,
            r in 0.0f64..0.22, l in 0.0f64..1.5,
        ) {
            let p = FluidParams::new(1.0, r, l, s).unwrap();
            let kq = KappaQuery::new(h, q, s).unwrap();
            let c = Closure::new(kq, &p).unwrap();
            prop_assert!(f_eval(&kq, c.kappa, &p).unwrap().abs() <= 1e-10 * s.abs().max(1.0));
            let (m, big_m) = p.psi_prime_bounds();
            let dq = c.dk_dq();
            prop_assert!(dq < 0.0 && dq >= -h);
            prop_assert!(dq >= -big_m * h / (2.0 * m) * (1.0 + 1e-10));
            prop_assert!(dq <= -m * h / (2.0 * big_m) * (1.0 - 1e-10));

            let k = |h: f64, q: f64| kappa_solve(&KappaQuery::new(h, q, s).unwrap(), &p).unwrap();
            let d = 1e-4 * q.abs().max(1.0);
            let fd_q = (k(h, q + d) - k(h, q - d)) / (2.0 * d);
            prop_assert!((dq - fd_q).abs() <= 1e-6 * h.max(dq.abs()));
            let d = 1e-4 * h;
            let fd_h = (k(h + d, q) - k(h - d, q)) / (2.0 * d);
            prop_assert!((c.dk_dh() - fd_h).abs() <= 1e-6 * fd_h.abs().max(1.0));
        }
    }
}
