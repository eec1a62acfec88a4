//! Reconstruction of the limit velocity and stress fields.
//!
//! With `q(x)` known, each column is explicit:
//!
//! ```text
//! dz u1 = psi(q z + kappa)
//! u1    = s + int_0^z psi(q t + kappa) dt
//! dx u1 = int_0^z psi'(q t + kappa) (q' t + kappa') dt,  kappa' = dK/dh h' + dK/dq q'
//! u2    = -int_0^z dx u1 = -int_0^z (z - t) psi'(q t + kappa) (q' t + kappa') dt
//! ```
//!
//! and the stresses follow from the shear rate alone. Columns use
//! Chebyshev-Gauss-Lobatto heights `z_j = h (1 - cos(pi j / M)) / 2`,
//! clustered at both walls.

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::constitutive::FluidParams;
use crate::error::{Error, Result};
use crate::kappa::{Closure, KappaQuery};
use crate::quad::{clenshaw_curtis_weights, integrate, integrate_n, DEFAULT_TOL};
use crate::reynolds::{GapProfile, PressureSolution};

pub const DEFAULT_GRID: usize = 128;

/// Everything needed to evaluate one column `x = const`.
#[derive(Debug, Clone, Copy)]
pub struct Column {
    pub x: f64,
    pub h: f64,
    pub dh: f64,
    pub q: f64,
    pub dq: f64,
    pub kappa: f64,
    /// `d kappa / dx` along the solution.
    pub dkappa: f64,
    pub s: f64,
}

impl Column {
    pub fn new(x: f64, q: f64, dq: f64, gp: &GapProfile, p: &FluidParams) -> Result<Self> {
        let (h, dh) = gp.eval(x);
        let c = Closure::new(KappaQuery::new(h, q, p.s)?, p)?;
        let dkappa = c.dk_dh() * dh + c.dk_dq() * dq;
        Ok(Self {
            x,
            h,
            dh,
            q,
            dq,
            kappa: c.kappa,
            dkappa,
            s: p.s,
        })
    }

    /// Column at an arbitrary `x`, interpolating the pressure solution.
    pub fn at(x: f64, ps: &PressureSolution, gp: &GapProfile, p: &FluidParams) -> Result<Self> {
        let (q, dq) = ps.gradient_at(x);
        Self::new(x, q, dq, gp, p)
    }

    fn check(&self, z: f64) -> Result<f64> {
        let slack = 1e-14 * self.h;
        if !(z >= -slack && z <= self.h + slack) {
            return Err(Error::OutOfGap { z, h: self.h });
        }
        Ok(z.clamp(0.0, self.h))
    }

    fn stress_arg(&self, z: f64) -> f64 {
        self.q * z + self.kappa
    }

    pub fn u1(&self, z: f64, p: &FluidParams) -> Result<f64> {
        let z = self.check(z)?;
        let int = integrate(|t| p.psi(self.stress_arg(t)), 0.0, z, DEFAULT_TOL)?;
        Ok(self.s + int)
    }

    /// `(dz u1, dz^2 u1) = (psi(q z + kappa), q psi'(q z + kappa))`.
    pub fn shear(&self, z: f64, p: &FluidParams) -> Result<(f64, f64)> {
        let z = self.check(z)?;
        let (t, d) = p.psi_with_prime(self.stress_arg(z))?;
        Ok((t, self.q * d))
    }

    fn dx_integrand(&self, t: f64, p: &FluidParams) -> Result<f64> {
        Ok(p.psi_prime(self.stress_arg(t))? * (self.dq * t + self.dkappa))
    }

    pub fn dxu1(&self, z: f64, p: &FluidParams) -> Result<f64> {
        let z = self.check(z)?;
        integrate(|t| self.dx_integrand(t, p), 0.0, z, DEFAULT_TOL)
    }

    pub fn u2(&self, z: f64, p: &FluidParams) -> Result<f64> {
        let z = self.check(z)?;
        let int = integrate(
            |t| Ok((z - t) * self.dx_integrand(t, p)?),
            0.0,
            z,
            DEFAULT_TOL,
        )?;
        Ok(-int)
    }

    /// `(sigma11, sigma12, sigma22)`.
    pub fn stress(&self, z: f64, p: &FluidParams) -> Result<(f64, f64, f64)> {
        let (t, _) = self.shear(z, p)?;
        let (s11, s22) = p.sigma_diag_of_shear(t);
        Ok((s11, p.sigma12_of_shear(t), s22))
    }
}

pub fn reconstruct_u1(
    x: f64,
    z: f64,
    ps: &PressureSolution,
    gp: &GapProfile,
    p: &FluidParams,
) -> Result<f64> {
    Column::at(x, ps, gp, p)?.u1(z, p)
}

pub fn shear_profile(
    x: f64,
    z: f64,
    ps: &PressureSolution,
    gp: &GapProfile,
    p: &FluidParams,
) -> Result<(f64, f64)> {
    Column::at(x, ps, gp, p)?.shear(z, p)
}

pub fn reconstruct_u2(
    x: f64,
    z: f64,
    ps: &PressureSolution,
    gp: &GapProfile,
    p: &FluidParams,
) -> Result<f64> {
    Column::at(x, ps, gp, p)?.u2(z, p)
}

pub fn reconstruct_stress(
    x: f64,
    z: f64,
    ps: &PressureSolution,
    gp: &GapProfile,
    p: &FluidParams,
) -> Result<(f64, f64, f64)> {
    Column::at(x, ps, gp, p)?.stress(z, p)
}

/// Chebyshev-Gauss-Lobatto heights on `[0, h]`.
pub fn lobatto_heights(h: f64, m: usize) -> Vec<f64> {
    (0..=m)
        .map(|j| {
            if j == m {
                h
            } else {
                0.5 * h * (1.0 - (std::f64::consts::PI * j as f64 / m as f64).cos())
            }
        })
        .collect()
}

/// Sampled limit fields on the `(N + 1) x (M + 1)` grid. Row `i` is the
/// column `x_i`; `z[[i, j]]` are its heights (scaled by `epsilon` once rescaled).
#[derive(Debug, Clone)]
pub struct LimitFields {
    pub params: FluidParams,
    pub gap: GapProfile,
    pub pressure: PressureSolution,
    pub x: Vec<f64>,
    pub h: Vec<f64>,
    pub z: Array2<f64>,
    pub u1: Array2<f64>,
    pub u2: Array2<f64>,
    pub sigma11: Array2<f64>,
    pub sigma12: Array2<f64>,
    pub sigma22: Array2<f64>,
    pub dzu1: Array2<f64>,
    pub dzzu1: Array2<f64>,
    pub dxu1: Array2<f64>,
    /// 1 for limit fields; the thin-gap scale after [`rescale_to_epsilon`].
    pub epsilon: f64,
}

struct ColumnSamples {
    h: f64,
    z: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    dxu1: Vec<f64>,
    dzu1: Vec<f64>,
    dzzu1: Vec<f64>,
}

fn sample_column(col: &Column, m: usize, p: &FluidParams) -> Result<ColumnSamples> {
    let z = lobatto_heights(col.h, m);
    let mut u1 = vec![col.s; m + 1];
    let mut u2 = vec![0.0; m + 1];
    let mut dxu1 = vec![0.0; m + 1];
    let mut dzu1 = vec![0.0; m + 1];
    let mut dzzu1 = vec![0.0; m + 1];
    let (mut a, mut b) = (0.0, 0.0);
    for j in 0..=m {
        if j > 0 {
            // increments of u1, int g, int t g over [z_{j-1}, z_j]
            let [du, da, db] = integrate_n(
                |t| {
                    let (v, d) = p.psi_with_prime(col.stress_arg(t))?;
                    let g = d * (col.dq * t + col.dkappa);
                    Ok([v, g, t * g])
                },
                z[j - 1],
                z[j],
                DEFAULT_TOL,
            )?;
            u1[j] = u1[j - 1] + du;
            a += da;
            b += db;
        }
        dxu1[j] = a;
        u2[j] = -(z[j] * a - b);
        let (t, d) = p.psi_with_prime(col.stress_arg(z[j]))?;
        dzu1[j] = t;
        dzzu1[j] = col.q * d;
    }
    Ok(ColumnSamples {
        h: col.h,
        z,
        u1,
        u2,
        dxu1,
        dzu1,
        dzzu1,
    })
}

impl LimitFields {
    /// Assemble fields on the pressure solution's x-grid with `m + 1` heights per column.
    pub fn assemble(
        ps: &PressureSolution,
        gp: &GapProfile,
        p: &FluidParams,
        m: usize,
    ) -> Result<Self> {
        if m < 4 {
            return Err(Error::InvalidGrid(format!("M = {m} < 4")));
        }
        let cols = (0..ps.nodes())
            .into_par_iter()
            .map(|i| {
                let col = Column::new(ps.x[i], ps.q[i], ps.dq[i], gp, p)?;
                sample_column(&col, m, p)
            })
            .collect::<Result<Vec<_>>>()?;
        let n1 = cols.len();
        let grid = |f: &dyn Fn(&ColumnSamples) -> &Vec<f64>| {
            Array2::from_shape_fn((n1, m + 1), |(i, j)| f(&cols[i])[j])
        };
        let dzu1 = grid(&|c| &c.dzu1);
        let sigma12 = dzu1.mapv(|t| p.sigma12_of_shear(t));
        let sigma11 = dzu1.mapv(|t| p.sigma_diag_of_shear(t).0);
        let sigma22 = dzu1.mapv(|t| p.sigma_diag_of_shear(t).1);
        Ok(Self {
            params: *p,
            gap: gp.clone(),
            pressure: ps.clone(),
            x: ps.x.clone(),
            h: cols.iter().map(|c| c.h).collect(),
            z: grid(&|c| &c.z),
            u1: grid(&|c| &c.u1),
            u2: grid(&|c| &c.u2),
            sigma11,
            sigma12,
            sigma22,
            dzu1,
            dzzu1: grid(&|c| &c.dzzu1),
            dxu1: grid(&|c| &c.dxu1),
            epsilon: 1.0,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.u1.dim()
    }

    /// Largest deviation from the wall values `u1 = s, u2 = 0` at `z = 0` and
    /// `u1 = 0` at `z = h`, and separately `|u2(x, h)|`.
    pub fn wall_errors(&self) -> (f64, f64) {
        let m = self.shape().1 - 1;
        let s = self.params.s;
        let mut u1_err = 0.0_f64;
        let mut u2_top = 0.0_f64;
        for i in 0..self.x.len() {
            u1_err = u1_err
                .max((self.u1[[i, 0]] - s).abs())
                .max(self.u1[[i, m]].abs())
                .max(self.u2[[i, 0]].abs());
            u2_top = u2_top.max(self.u2[[i, m]].abs());
        }
        (u1_err, u2_top)
    }

    /// `max |sigma11 + sigma22|`.
    pub fn trace_error(&self) -> f64 {
        (&self.sigma11 + &self.sigma22)
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Per-column flux `int_0^h u1 dz` by Clenshaw-Curtis on the sampled heights.
    pub fn column_fluxes(&self) -> Vec<f64> {
        let m = self.shape().1 - 1;
        (0..self.x.len())
            .map(|i| {
                let w = clenshaw_curtis_weights(m, self.z[[i, m]]);
                w.iter().enumerate().map(|(j, w)| w * self.u1[[i, j]]).sum()
            })
            .collect()
    }

    /// `(max - min) / max(1, |Q|)` of [`Self::column_fluxes`].
    pub fn flux_spread(&self) -> f64 {
        let f = self.column_fluxes();
        let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = f.iter().copied().fold(f64::INFINITY, f64::min);
        (max - min) / self.pressure.flux.abs().max(1.0)
    }

    /// `dz` of a sampled field, column by column.
    pub fn dz(&self, f: &Array2<f64>) -> Array2<f64> {
        let (n1, m1) = f.dim();
        let mut out = Array2::zeros((n1, m1));
        for i in 0..n1 {
            let z: Vec<f64> = self.z.row(i).to_vec();
            let v: Vec<f64> = f.row(i).to_vec();
            for (j, d) in differentiate(&z, &v).into_iter().enumerate() {
                out[[i, j]] = d;
            }
        }
        out
    }

    /// `dz sigma12 = sigma12'(dz u1) dz^2 u1` by the chain rule.
    pub fn dz_sigma12(&self) -> Array2<f64> {
        let p = &self.params;
        ndarray::Zip::from(&self.dzu1)
            .and(&self.dzzu1)
            .map_collect(|&t, &tt| p.sigma12_prime(t) * tt)
    }

    /// `dz sigma11` by the chain rule.
    pub fn dz_sigma11(&self) -> Array2<f64> {
        let p = &self.params;
        ndarray::Zip::from(&self.dzu1)
            .and(&self.dzzu1)
            .map_collect(|&t, &tt| p.sigma11_prime(t) * tt)
    }
}

/// Weights of the first derivative at `x0` over the nodes `xs` (Fornberg).
fn fornberg_first(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    // c[k][j]: weight of node j for derivative order k (k = 0, 1)
    let mut c = vec![[0.0_f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// First derivative of samples on a non-uniform grid with five-point
/// stencils (fourth order; shifted one-sided stencils near the ends).
pub fn differentiate(z: &[f64], v: &[f64]) -> Vec<f64> {
    let n = z.len();
    let width = 5.min(n);
    (0..n)
        .map(|j| {
            let start = j.saturating_sub(width / 2).min(n - width);
            let w = fornberg_first(z[j], &z[start..start + width]);
            w.iter()
                .zip(&v[start..start + width])
                .map(|(w, v)| w * v)
                .sum()
        })
        .collect()
}

/// Max-norm residuals of the limit system on sampled fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `(1 - r) nu dz^2 u1 - dx p + dz sigma12`, with `dz sigma12` differenced on the grid.
    pub momentum: f64,
    /// `dz p`: zero by construction.
    pub dz_pressure: f64,
    /// `dx u1 + dz u2` on interior heights, `dz u2` differenced on the grid.
    pub divergence: f64,
    /// `lambda* dz u1 sigma12 + sigma11`.
    pub closure11: f64,
    /// `-lambda*/2 dz u1 (sigma11 - sigma22) + sigma12 - r nu dz u1`.
    pub closure12: f64,
    /// `-lambda* dz u1 sigma12 + sigma22`.
    pub closure22: f64,
}

impl ResidualReport {
    pub fn algebraic_max(&self) -> f64 {
        self.closure11.max(self.closure12).max(self.closure22)
    }
}

pub fn residual_limit_system(fields: &LimitFields, p: &FluidParams) -> ResidualReport {
    let (n1, m1) = fields.shape();
    let dz_s12 = fields.dz(&fields.sigma12);
    let dz_u2 = fields.dz(&fields.u2);
    let (mut momentum, mut divergence) = (0.0_f64, 0.0_f64);
    let (mut c11, mut c12, mut c22) = (0.0_f64, 0.0_f64, 0.0_f64);
    let l = p.lambda_star;
    for i in 0..n1 {
        let q = fields.pressure.q[i];
        for j in 0..m1 {
            let t = fields.dzu1[[i, j]];
            let s11 = fields.sigma11[[i, j]];
            let s12 = fields.sigma12[[i, j]];
            let s22 = fields.sigma22[[i, j]];
            let mom = (1.0 - p.r) * p.nu * fields.dzzu1[[i, j]] - q + dz_s12[[i, j]];
            momentum = momentum.max(mom.abs());
            if j > 0 && j + 1 < m1 {
                divergence = divergence.max((fields.dxu1[[i, j]] + dz_u2[[i, j]]).abs());
            }
            c11 = c11.max((l * t * s12 + s11).abs());
            c12 = c12.max((-l / 2.0 * t * (s11 - s22) + s12 - p.r * p.nu * t).abs());
            c22 = c22.max((-l * t * s12 + s22).abs());
        }
    }
    ResidualReport {
        momentum,
        dz_pressure: 0.0,
        divergence,
        closure11: c11,
        closure12: c12,
        closure22: c22,
    }
}

/// Map limit fields to a gap of thickness `epsilon h(x)`: `y = epsilon z`,
/// `u2 -> epsilon u2`, `p -> p / epsilon^2`, `sigma -> sigma / epsilon`.
/// `u1` is unchanged at leading order; derivatives follow the same scalings.
pub fn rescale_to_epsilon(fields: &LimitFields, epsilon: f64) -> Result<LimitFields> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if fields.epsilon != 1.0 {
        return Err(Error::AlreadyRescaled(fields.epsilon));
    }
    let inv = 1.0 / epsilon;
    let inv2 = inv * inv;
    let mut out = fields.clone();
    out.epsilon = epsilon;
    out.z.mapv_inplace(|v| v * epsilon);
    out.h.iter_mut().for_each(|v| *v *= epsilon);
    out.u2.mapv_inplace(|v| v * epsilon);
    for s in [&mut out.sigma11, &mut out.sigma12, &mut out.sigma22] {
        s.mapv_inplace(|v| v * inv);
    }
    out.dzu1.mapv_inplace(|v| v * inv);
    out.dzzu1.mapv_inplace(|v| v * inv2);
    for v in [
        &mut out.pressure.p,
        &mut out.pressure.q,
        &mut out.pressure.dq,
    ] {
        v.iter_mut().for_each(|x| *x *= inv2);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reynolds::{default_flux, solve_q_ode, solve_q_pointwise};

    fn couette() -> (GapProfile, FluidParams) {
        (
            GapProfile::constant(1.0, 1.0).unwrap(),
            FluidParams::new(1.0, 0.2, 0.1, 1.0).unwrap(),
        )
    }

    #[test]
    fn fornberg_matches_textbook_stencil() {
        let w = fornberg_first(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let expect = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let z = lobatto_heights(1.3, 24);
        let v: Vec<f64> = z.iter().map(|z| z.powi(4)).collect();
        for (d, z) in differentiate(&z, &v).iter().zip(&z) {
            assert!((d - 4.0 * z.powi(3)).abs() < 1e-11);
        }
    }

    #[test]
    fn couette_columns() {
        let (gp, p) = couette();
        let ps = solve_q_pointwise(&gp, &p, default_flux(&gp, &p), 16).unwrap();
        for z in [0.0, 0.25, 0.5, 1.0] {
            let u = reconstruct_u1(0.3, z, &ps, &gp, &p).unwrap();
            assert!((u - (1.0 - z)).abs() < 1e-10);
            let (dz, dzz) = shear_profile(0.3, z, &ps, &gp, &p).unwrap();
            assert!((dz + 1.0).abs() < 1e-10 && dzz.abs() < 1e-10);
            assert!(reconstruct_u2(0.3, z, &ps, &gp, &p).unwrap().abs() < 1e-10);
            let (s11, s12, s22) = reconstruct_stress(0.3, z, &ps, &gp, &p).unwrap();
            assert!((s12 + 0.1980198).abs() < 1e-7);
            assert!((s11 + 0.01980198).abs() < 1e-8);
            assert_eq!(s11 + s22, 0.0);
        }
        assert!(matches!(
            reconstruct_u1(0.3, 1.5, &ps, &gp, &p),
            Err(Error::OutOfGap { .. })
        ));
    }

    #[test]
    fn newtonian_column_closed_form() {
        let gp = GapProfile::linear_slider(1.0, 1.0, 2.0).unwrap();
        let p = FluidParams::new(1.5, 0.1, 0.0, 1.0).unwrap();
        let ps = solve_q_pointwise(&gp, &p, 0.4, 32).unwrap();
        let x = 0.37;
        let col = Column::at(x, &ps, &gp, &p).unwrap();
        for f in [0.1, 0.6, 1.0] {
            let z = f * col.h;
            let u = col.u1(z, &p).unwrap();
            let kappa = -(col.q * col.h / 2.0 + p.nu * p.s / col.h);
            let expect = p.s + (col.q * z * z / 2.0 + kappa * z) / p.nu;
            assert!((u - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn shear_profile_matches_differences() {
        let gp = GapProfile::cosine_bump(1.0, 1.0, 0.6).unwrap();
        let p = FluidParams::new(1.0, 0.2, 0.8, 1.5).unwrap();
        let ps = solve_q_pointwise(&gp, &p, 0.3, 32).unwrap();
        let col = Column::at(0.3, &ps, &gp, &p).unwrap();
        let d = 1e-4;
        for f in [0.2, 0.5, 0.8] {
            let z = f * col.h;
            let (dz, dzz) = col.shear(z, &p).unwrap();
            let fd = (col.u1(z + d, &p).unwrap() - col.u1(z - d, &p).unwrap()) / (2.0 * d);
            assert!((dz - fd).abs() < 1e-6, "{dz} vs {fd}");
            let fd2 =
                (col.shear(z + d, &p).unwrap().0 - col.shear(z - d, &p).unwrap().0) / (2.0 * d);
            assert!((dzz - fd2).abs() < 1e-6);
        }
    }

    #[test]
    fn slider_fields_satisfy_invariants() {
        let gp = GapProfile::linear_slider(1.0, 1.0, 2.0).unwrap();
        let p = FluidParams::new(1.0, 0.2, 0.5, 1.0).unwrap();
        let flux = default_flux(&gp, &p);
        for ps in [
            solve_q_pointwise(&gp, &p, flux, 128).unwrap(),
            solve_q_ode(&gp, &p, flux, 128).unwrap(),
        ] {
            let f = LimitFields::assemble(&ps, &gp, &p, 64).unwrap();
            let (u1_err, u2_top) = f.wall_errors();
            assert!(u1_err < 1e-8, "{u1_err}");
            assert!(u2_top < 1e-6, "{:?}: {u2_top}", ps.method);
            assert_eq!(f.trace_error(), 0.0);
            assert!(f.flux_spread() < 1e-6);
            let r = residual_limit_system(&f, &p);
            assert!(r.algebraic_max() <= 1e-12);
            assert!(r.divergence < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn field_samples_match_pointwise_reconstruction() {
        let gp = GapProfile::linear_slider(1.0, 1.0, 2.0).unwrap();
        let p = FluidParams::new(1.0, 0.2, 0.5, 1.0).unwrap();
        let ps = solve_q_ode(&gp, &p, 0.2, 32).unwrap();
        let f = LimitFields::assemble(&ps, &gp, &p, 16).unwrap();
        let (i, j) = (11, 5);
        let z = f.z[[i, j]];
        assert!((f.u1[[i, j]] - reconstruct_u1(ps.x[i], z, &ps, &gp, &p).unwrap()).abs() < 1e-12);
        assert!((f.u2[[i, j]] - reconstruct_u2(ps.x[i], z, &ps, &gp, &p).unwrap()).abs() < 1e-12);
        let col = Column::at(ps.x[i], &ps, &gp, &p).unwrap();
        assert!((f.dxu1[[i, j]] - col.dxu1(z, &p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rescaling() {
        let (gp, p) = couette();
        let ps = solve_q_pointwise(&gp, &p, 0.3, 16).unwrap();
        let f = LimitFields::assemble(&ps, &gp, &p, 8).unwrap();
        let same = rescale_to_epsilon(&f, 1.0).unwrap();
        assert_eq!(same.u2, f.u2);
        assert_eq!(same.sigma12, f.sigma12);
        assert_eq!(same.pressure.p, f.pressure.p);
        let r = rescale_to_epsilon(&f, 0.1).unwrap();
        for (a, b) in r.pressure.p.iter().zip(&f.pressure.p) {
            assert_eq!(*a, b * 100.0);
        }
        assert_eq!(r.sigma11, f.sigma11.mapv(|v| v * 10.0));
        assert_eq!(r.u1, f.u1);
        assert!(matches!(
            rescale_to_epsilon(&f, 0.0),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(matches!(
            rescale_to_epsilon(&f, 1.5),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(matches!(
            rescale_to_epsilon(&r, 0.5),
            Err(Error::AlreadyRescaled(_))
        ));
    }
}
