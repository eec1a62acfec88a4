//! Adaptive composite Gauss-Legendre quadrature.
//!
//! Panels use a fixed 16-point rule. A panel is accepted when the two-half
//! estimate agrees with the whole-panel estimate to within the tolerance;
//! otherwise both halves are refined independently. Integrands may fail
//! (they usually call [`FluidParams::psi`](crate::FluidParams::psi)), so
//! they return a [`Result`].

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const GL_POINTS: usize = 16;

/// Inter-refinement tolerance used throughout the crate.
pub const DEFAULT_TOL: f64 = 1e-11;

const MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
pub struct GaussLegendre {
    pub nodes: [f64; GL_POINTS],
    pub weights: [f64; GL_POINTS],
}

/// Nodes and weights of the 16-point rule on [-1, 1], computed once by
/// Newton iteration on the Legendre polynomial.
pub fn gauss_legendre_16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(legendre_rule::<GL_POINTS>)
}

fn legendre_rule<const N: usize>() -> GaussLegendre {
    let mut nodes = [0.0; GL_POINTS];
    let mut weights = [0.0; GL_POINTS];
    let n = N as f64;
    for i in 0..N.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=N {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[N - 1 - i] = x;
        weights[i] = w;
        weights[N - 1 - i] = w;
    }
    GaussLegendre { nodes, weights }
}

/// One 16-point panel on `[a, b]` for a vector-valued integrand.
pub fn panel_n<const K: usize, F>(f: &mut F, a: f64, b: f64) -> Result<[f64; K]>
where
    F: FnMut(f64) -> Result<[f64; K]>,
{
    let rule = gauss_legendre_16();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = [0.0; K];
    for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let v = f(mid + half * x)?;
        for k in 0..K {
            acc[k] += w * v[k];
        }
    }
    for a in acc.iter_mut() {
        *a *= half;
    }
    Ok(acc)
}

/// Single fixed panel for a scalar integrand.
pub fn panel<F>(mut f: F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut g = |t| f(t).map(|v| [v]);
    panel_n(&mut g, a, b).map(|[v]| v)
}

/// Adaptive integral of a vector-valued integrand. All components share
/// the same panel tree; the refinement criterion is the worst component.
pub fn integrate_n<const K: usize, F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<[f64; K]>
where
    F: FnMut(f64) -> Result<[f64; K]>,
{
    if a == b {
        return Ok([0.0; K]);
    }
    let whole = panel_n(&mut f, a, b)?;
    let scale = whole.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut budget = MAX_PANELS;
    refine(&mut f, a, b, whole, tol * scale, 0, &mut budget)
}

fn refine<const K: usize, F>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: [f64; K],
    abs_tol: f64,
    depth: u32,
    budget: &mut usize,
) -> Result<[f64; K]>
where
    F: FnMut(f64) -> Result<[f64; K]>,
{
    let mid = 0.5 * (a + b);
    let left = panel_n(f, a, mid)?;
    let right = panel_n(f, mid, b)?;
    let mut sum = [0.0; K];
    let mut diff = 0.0_f64;
    for k in 0..K {
        sum[k] = left[k] + right[k];
        // NaN differences must not be swallowed by f64::max
        let d = (sum[k] - whole[k]).abs();
        diff = if d.is_nan() {
            f64::INFINITY
        } else {
            diff.max(d)
        };
    }
    if diff <= abs_tol && abs_tol.is_finite() {
        return Ok(sum);
    }
    *budget = budget.saturating_sub(2);
    if depth >= MAX_DEPTH || *budget == 0 || !diff.is_finite() || !abs_tol.is_finite() {
        return Err(Error::NoConvergence {
            what: "adaptive quadrature panels",
            iterations: MAX_PANELS - *budget,
        });
    }
    let l = refine(f, a, mid, left, abs_tol, depth + 1, budget)?;
    let r = refine(f, mid, b, right, abs_tol, depth + 1, budget)?;
    let mut out = [0.0; K];
    for k in 0..K {
        out[k] = l[k] + r[k];
    }
    Ok(out)
}

/// Adaptive integral of a scalar integrand.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_n(|t| f(t).map(|v| [v]), a, b, tol).map(|[v]| v)
}

/// Clenshaw-Curtis weights for the Chebyshev-Gauss-Lobatto points
/// `z_j = h (1 - cos(pi j / m)) / 2`, `j = 0..=m`, on `[0, h]`.
pub fn clenshaw_curtis_weights(m: usize, h: f64) -> Vec<f64> {
    assert!(m >= 1);
    let n = m as f64;
    let mut w = vec![0.0; m + 1];
    let theta = |j: usize| std::f64::consts::PI * j as f64 / n;
    if m.is_multiple_of(2) {
        let w0 = 1.0 / (n * n - 1.0);
        w[0] = w0;
        w[m] = w0;
        for (j, wj) in w.iter_mut().enumerate().take(m).skip(1) {
            let mut v = 1.0;
            for k in 1..m / 2 {
                v -= 2.0 * (2.0 * k as f64 * theta(j)).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
            v -= (n * theta(j)).cos() / (n * n - 1.0);
            *wj = 2.0 * v / n;
        }
    } else {
        let w0 = 1.0 / (n * n);
        w[0] = w0;
        w[m] = w0;
        for (j, wj) in w.iter_mut().enumerate().take(m).skip(1) {
            let mut v = 1.0;
            for k in 1..=(m - 1) / 2 {
                v -= 2.0 * (2.0 * k as f64 * theta(j)).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
            *wj = 2.0 * v / n;
        }
    }
    // Weights above are for [-1, 1]; map to [0, h].
    for wj in w.iter_mut() {
        *wj *= 0.5 * h;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_and_singular_integrands_fail_fast() {
        assert!(integrate(
            |x| Ok(if x > 0.5 { f64::INFINITY } else { 1.0 }),
            0.0,
            1.0,
            DEFAULT_TOL
        )
        .is_err());
        assert!(integrate(|x| Ok((x - 0.3).powi(-2)), 0.0, 1.0, DEFAULT_TOL).is_err());
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        // 16 points are exact up to degree 31.
        for deg in [0, 1, 5, 17, 31] {
            let v = panel(|t| Ok(t.powi(deg)), 0.0, 1.0).unwrap();
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "deg {deg}: {v} vs {exact}");
        }
        let sum: f64 = gauss_legendre_16().weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_sharp_integrand() {
        let v = integrate(|t| Ok((200.0 * t).tanh()), -1.0, 2.0, DEFAULT_TOL).unwrap();
        // antiderivative ln(cosh(200 t)) / 200
        let lc = |t: f64| {
            let a = (200.0 * t).abs();
            (a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2) / 200.0
        };
        assert!((v - (lc(2.0) - lc(-1.0))).abs() < 1e-10);
    }

    #[test]
    fn vector_components_share_panels() {
        let [a, b] = integrate_n(|t| Ok([t.exp(), t * t]), 0.0, 1.0, DEFAULT_TOL).unwrap();
        assert!((a - (1f64.exp() - 1.0)).abs() < 1e-13);
        assert!((b - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn integrand_errors_propagate() {
        let r = integrate(|_| Err(Error::InvalidGap { h: 0.0 }), 0.0, 1.0, DEFAULT_TOL);
        assert!(matches!(r, Err(Error::InvalidGap { .. })));
    }

    #[test]
    fn clenshaw_curtis_is_spectral() {
        for m in [8, 9, 32, 33] {
            let h = 1.7;
            let w = clenshaw_curtis_weights(m, h);
            let z: Vec<f64> = (0..=m)
                .map(|j| 0.5 * h * (1.0 - (std::f64::consts::PI * j as f64 / m as f64).cos()))
                .collect();
            let v: f64 = z.iter().zip(&w).map(|(z, w)| w * z.sin()).sum();
            let exact = 1.0 - h.cos();
            let tol = if m > 30 { 1e-14 } else { 1e-6 };
            assert!((v - exact).abs() < tol, "m={m}: {v} vs {exact}");
        }
    }
}
