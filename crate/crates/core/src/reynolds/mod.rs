//! Generalized Reynolds problem for the pressure gradient `q = dp/dx`.
//!
//! The gap flux `int_0^h u1 dz` is independent of `x`. Differentiating it
//! along the channel gives `U(x, q) q' = -V(x, q)` with
//!
//! ```text
//! U = int_0^h -t (t + dK/dq) psi'(q t + K) dt             (< 0 for r < 2/9)
//! V = int_0^h (h - t) h'(x) dK/dh psi'(q t + K) dt
//! ```
//!
//! [`solve_q_ode`] marches that ODE from the flux-matching `q(0)`.
//! [`solve_q_pointwise`] instead solves `gap_flux(h(x), q, s) = Q` at every
//! node; `d gap_flux / dq = U < 0`, so the root is unique. The two paths
//! share only the closure machinery and serve as oracles for each other.

mod gap;

pub use gap::{GapProfile, GapShape};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constitutive::FluidParams;
use crate::error::{Error, Result};
use crate::kappa::{gap_flux_with, Closure, KappaQuery};
use crate::ode::{Dopri5, OdeStats};
use crate::quad::{integrate, DEFAULT_TOL};
use crate::roots::{safeguarded_newton, Bracket, NewtonOptions};

pub const MIN_NODES: usize = 16;
const FLUX_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Ode,
    Pointwise,
    /// Closed-form reference solution.
    ClosedForm,
}

/// Pressure gradient and pressure on the uniform grid `x_i = i L / N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureSolution {
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    /// `q'(x)`: `-V/U` on the ODE path, fourth-order differences on the pointwise path.
    pub dq: Vec<f64>,
    pub p: Vec<f64>,
    pub flux: f64,
    pub method: SolveMethod,
    #[serde(skip)]
    pub ode_stats: Option<OdeStatsSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OdeStatsSummary {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl From<OdeStats> for OdeStatsSummary {
    fn from(s: OdeStats) -> Self {
        Self {
            accepted: s.accepted,
            rejected: s.rejected,
            evaluations: s.evaluations,
        }
    }
}

impl PressureSolution {
    pub fn nodes(&self) -> usize {
        self.x.len()
    }

    fn segment(&self, x: f64) -> (usize, f64) {
        let n = self.x.len() - 1;
        let dx = self.x[1] - self.x[0];
        let k = ((x / dx).floor().max(0.0) as usize).min(n - 1);
        (k, dx)
    }

    /// `(q, q')` at any `x` by cubic Hermite interpolation of the nodal data.
    pub fn gradient_at(&self, x: f64) -> (f64, f64) {
        let (k, _) = self.segment(x);
        let sl = k..k + 2;
        crate::reynolds::gap::hermite(&self.x[sl.clone()], &self.q[sl.clone()], &self.dq[sl], x)
    }

    /// Pressure at any `x`, integrating the Hermite interpolant of `q` from the left node.
    pub fn pressure_at(&self, x: f64) -> f64 {
        let (k, dx) = self.segment(x);
        let t = (x - self.x[k]) / dx;
        // integral of the Hermite basis from 0 to t
        let (t2, t3, t4) = (t * t, t * t * t, t * t * t * t);
        let i00 = t4 / 2.0 - t3 + t;
        let i10 = t4 / 4.0 - 2.0 * t3 / 3.0 + t2 / 2.0;
        let i01 = -t4 / 2.0 + t3;
        let i11 = t4 / 4.0 - t3 / 3.0;
        self.p[k]
            + dx * (i00 * self.q[k]
                + i10 * dx * self.dq[k]
                + i01 * self.q[k + 1]
                + i11 * dx * self.dq[k + 1])
    }
}

/// Default flux datum: pure shear flux `s h(0) / 2` at the inlet.
pub fn default_flux(gp: &GapProfile, p: &FluidParams) -> f64 {
    p.s * gp.h(0.0) / 2.0
}

pub fn uniform_grid(length: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| length * i as f64 / n as f64).collect()
}

/// `U`, `V` and the closure at one `(x, q)`.
#[derive(Debug, Clone, Copy)]
pub struct ReynoldsCoefficients {
    pub u: f64,
    pub v: f64,
    pub h: f64,
    pub dh: f64,
    pub closure: Closure,
}

impl ReynoldsCoefficients {
    pub fn at(x: f64, q: f64, gp: &GapProfile, p: &FluidParams) -> Result<Self> {
        p.ensure_reynolds()?;
        let (h, dh) = gp.eval(x);
        let closure = Closure::new(KappaQuery::new(h, q, p.s)?, p)?;
        let u = -(closure.moment2 + closure.dk_dq() * closure.moment1);
        if u >= 0.0 || u.is_nan() {
            return Err(Error::SignViolation { x, q, u });
        }
        let v = dh * closure.dk_dh() * closure.lever_moment();
        Ok(Self {
            u,
            v,
            h,
            dh,
            closure,
        })
    }

    /// `q' = -V / U`.
    pub fn slope(&self) -> f64 {
        -self.v / self.u
    }
}

/// `U(x, q)` in the simplified form `-int t (t + dK/dq) psi'`.
pub fn u_eval(x: f64, q: f64, gp: &GapProfile, p: &FluidParams) -> Result<f64> {
    ReynoldsCoefficients::at(x, q, gp, p).map(|c| c.u)
}

/// `U(x, q)` from its defining integral `int (h - t)(t + dK/dq) psi'`, by a
/// separate quadrature. Agrees with [`u_eval`] because
/// `int (t + dK/dq) psi' = 0`.
pub fn u_eval_unsimplified(x: f64, q: f64, gp: &GapProfile, p: &FluidParams) -> Result<f64> {
    p.ensure_reynolds()?;
    let h = gp.h(x);
    let c = Closure::new(KappaQuery::new(h, q, p.s)?, p)?;
    let kq = c.dk_dq();
    integrate(
        |t| Ok((h - t) * (t + kq) * p.psi_prime(q * t + c.kappa)?),
        0.0,
        h,
        DEFAULT_TOL,
    )
}

pub fn v_eval(x: f64, q: f64, gp: &GapProfile, p: &FluidParams) -> Result<f64> {
    ReynoldsCoefficients::at(x, q, gp, p).map(|c| c.v)
}

/// Gap flux and its `q`-derivative (which is `U`).
fn flux_and_slope(h: f64, q: f64, p: &FluidParams) -> Result<(f64, f64)> {
    let c = Closure::new(KappaQuery::new(h, q, p.s)?, p)?;
    let u = -(c.moment2 + c.dk_dq() * c.moment1);
    let flux = gap_flux_with(&c.query, c.kappa, p)?;
    Ok((flux, u))
}

/// The `q` with `gap_flux(h, q, s) = flux`.
pub fn solve_flux_gradient(x: f64, h: f64, flux: f64, p: &FluidParams) -> Result<f64> {
    let unreachable = || Error::FluxUnreachable { x, flux };
    // Newtonian guess; exact for lambda* = 0 or r = 0
    let q0 = 12.0 * p.nu * (p.s * h / 2.0 - flux) / h.powi(3);
    // a flux that cannot even be evaluated (overflowing q) is out of reach
    let g = |q: f64| {
        flux_and_slope(h, q, p)
            .map(|(f, u)| (f - flux, u))
            .map_err(|e| match e {
                Error::NoConvergence { .. } => unreachable(),
                e => e,
            })
    };
    let (g0, u0) = g(q0)?;
    let f_tol = FLUX_TOL * flux.abs().max(1.0);
    // |dG/dq| = -U >= h^3 (m/3 - M/4)
    let (m, big_m) = p.psi_prime_bounds();
    let slope_min = h.powi(3) * (m / 3.0 - big_m / 4.0);
    let mut w = g0.abs() / slope_min * (1.0 + 1e-6) + 1e-12 * q0.abs().max(1.0);
    if g0.abs() <= f_tol {
        w = w.max(1e-9 * q0.abs().max(1.0));
    }
    let mut bracket = None;
    for _ in 0..40 {
        // G is decreasing: the root is above q0 when G(q0) > 0
        let b = if g0 > 0.0 {
            Bracket {
                lo: q0,
                f_lo: g0,
                hi: q0 + w,
                f_hi: g(q0 + w)?.0,
            }
        } else {
            Bracket {
                lo: q0 - w,
                f_lo: g(q0 - w)?.0,
                hi: q0,
                f_hi: g0,
            }
        };
        if b.straddles() {
            bracket = Some(b);
            break;
        }
        w *= 2.0;
    }
    let bracket = bracket.ok_or_else(unreachable)?;
    let opts = NewtonOptions {
        f_tol,
        max_iter: 100,
        what: "flux gradient",
    };
    safeguarded_newton(g, bracket, q0 - g0 / u0, opts).map_err(|e| match e {
        Error::NoConvergence { .. } => unreachable(),
        e => e,
    })
}

fn check_grid(n: usize) -> Result<()> {
    if n < MIN_NODES {
        return Err(Error::InvalidGrid(format!("N = {n} < {MIN_NODES}")));
    }
    Ok(())
}

/// Node-by-node flux solve.
pub fn solve_q_pointwise(
    gp: &GapProfile,
    p: &FluidParams,
    flux: f64,
    n: usize,
) -> Result<PressureSolution> {
    p.validate()?;
    p.ensure_reynolds()?;
    check_grid(n)?;
    let x = uniform_grid(gp.length, n);
    // q' by implicit differentiation of the flux constraint at each node
    let (q, dq): (Vec<f64>, Vec<f64>) = x
        .par_iter()
        .map(|&xi| {
            let qi = solve_flux_gradient(xi, gp.h(xi), flux, p)?;
            Ok((qi, ReynoldsCoefficients::at(xi, qi, gp, p)?.slope()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let pr = assemble_pressure(&q, gp);
    Ok(PressureSolution {
        x,
        q,
        dq,
        p: pr,
        flux,
        method: SolveMethod::Pointwise,
        ode_stats: None,
    })
}

/// March `U q' = -V` from the flux-matching inlet value.
pub fn solve_q_ode(
    gp: &GapProfile,
    p: &FluidParams,
    flux: f64,
    n: usize,
) -> Result<PressureSolution> {
    solve_q_ode_with(gp, p, flux, n, &Dopri5::default())
}

pub fn solve_q_ode_with(
    gp: &GapProfile,
    p: &FluidParams,
    flux: f64,
    n: usize,
    integrator: &Dopri5,
) -> Result<PressureSolution> {
    p.validate()?;
    p.ensure_reynolds()?;
    check_grid(n)?;
    let x = uniform_grid(gp.length, n);
    let q0 = solve_flux_gradient(0.0, gp.h(0.0), flux, p)?;
    let rhs = |xi: f64, qi: f64| ReynoldsCoefficients::at(xi, qi, gp, p).map(|c| c.slope());
    let (q, stats) = integrator.solve_dense(rhs, 0.0, q0, &x)?;
    let dq = x
        .par_iter()
        .zip(q.par_iter())
        .map(|(&xi, &qi)| rhs(xi, qi))
        .collect::<Result<Vec<_>>>()?;
    let pr = assemble_pressure(&q, gp);
    Ok(PressureSolution {
        x,
        q,
        dq,
        p: pr,
        flux,
        method: SolveMethod::Ode,
        ode_stats: Some(stats.into()),
    })
}

/// Fourth-order finite differences on a uniform grid (one-sided at the ends).
pub fn central_difference4(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "need at least 5 samples");
    (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]
            } else if i < 2 {
                let o = if i == 0 {
                    [-25.0, 48.0, -36.0, 16.0, -3.0]
                } else {
                    [-3.0, -10.0, 18.0, -6.0, 1.0]
                };
                (0..5).map(|k| o[k] * f[k]).sum::<f64>()
            } else {
                let o = if i == n - 1 {
                    [25.0, -48.0, 36.0, -16.0, 3.0]
                } else {
                    [3.0, 10.0, -18.0, 6.0, -1.0]
                };
                (0..5).map(|k| o[k] * f[n - 1 - k]).sum::<f64>()
            };
            d / (12.0 * dx)
        })
        .collect()
}

/// Cumulative integral on a uniform grid. Each interval uses the quadratic
/// through three neighbouring nodes, so the value at every even node equals
/// composite Simpson.
pub fn cumulative_simpson(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * dx * (f[0] + f[1]);
        return out;
    }
    for i in 1..n {
        // interval [i-1, i]
        let left_start = i - 1;
        let inc = if left_start % 2 == 0 && i + 1 < n {
            dx * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]) / 12.0
        } else {
            dx * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]) / 12.0
        };
        out[i] = out[i - 1] + inc;
    }
    out
}

/// `p(x) = int_0^x q`, shifted so that `int_0^L p h dx = 0`.
pub fn assemble_pressure(q: &[f64], gp: &GapProfile) -> Vec<f64> {
    let n = q.len() - 1;
    let dx = gp.length / n as f64;
    let mut p = cumulative_simpson(q, dx);
    let x = uniform_grid(gp.length, n);
    let h: Vec<f64> = x.iter().map(|&xi| gp.h(xi)).collect();
    let ph: Vec<f64> = p.iter().zip(&h).map(|(p, h)| p * h).collect();
    let mass = cumulative_simpson(&h, dx)[n];
    let c = cumulative_simpson(&ph, dx)[n] / mass;
    for v in p.iter_mut() {
        *v -= c;
    }
    p
}

/// `|int_0^L p h dx| / int_0^L h dx`, by the same quadrature as [`assemble_pressure`].
pub fn zero_mean_residual(ps: &PressureSolution, gp: &GapProfile) -> f64 {
    let n = ps.nodes() - 1;
    let dx = gp.length / n as f64;
    let h: Vec<f64> = ps.x.iter().map(|&xi| gp.h(xi)).collect();
    let ph: Vec<f64> = ps.p.iter().zip(&h).map(|(p, h)| p * h).collect();
    cumulative_simpson(&ph, dx)[n].abs() / cumulative_simpson(&h, dx)[n]
}

/// `max_i |gap_flux(h(x_i), q_i, s) - Q| / max(1, |Q|)`.
pub fn flux_residual(ps: &PressureSolution, gp: &GapProfile, p: &FluidParams) -> Result<f64> {
    let res =
        ps.x.par_iter()
            .zip(ps.q.par_iter())
            .map(|(&xi, &qi)| {
                let kq = KappaQuery::new(gp.h(xi), qi, p.s)?;
                crate::kappa::gap_flux(&kq, p).map(|f| (f - ps.flux).abs())
            })
            .collect::<Result<Vec<_>>>()?;
    Ok(res.into_iter().fold(0.0, f64::max) / ps.flux.abs().max(1.0))
}

/// `max |a - b| / max(1, max |b|)` over the nodal gradients.
pub fn max_relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}
