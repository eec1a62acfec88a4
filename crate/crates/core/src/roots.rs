//! Safeguarded Newton iteration for scalar roots with a sign-change bracket.
//!
//! Every root solved in this crate (the constitutive inverse, the closure
//! constant, the flux-matching pressure gradient) is the zero of a strictly
//! monotone map with a cheap analytic derivative, so Newton converges
//! quadratically once close. The bracket guards the early iterates.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Accept `x` once `|f(x)| <= f_tol`; one extra Newton step then polishes it.
    pub f_tol: f64,
    pub max_iter: usize,
    pub what: &'static str,
}

/// A sign-change bracket with the function values at both ends.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub f_lo: f64,
    pub hi: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn straddles(&self) -> bool {
        self.f_lo == 0.0 || self.f_hi == 0.0 || (self.f_lo < 0.0) != (self.f_hi < 0.0)
    }
}

/// Grow `[center - w, center + w]` geometrically until `f` changes sign.
/// Returns `None` when `max_expansions` doublings are not enough.
pub fn expand_bracket<F>(
    mut f: F,
    center: f64,
    half_width: f64,
    max_expansions: usize,
) -> Result<Option<Bracket>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut w = half_width.abs().max(f64::MIN_POSITIVE);
    for _ in 0..=max_expansions {
        let (lo, hi) = (center - w, center + w);
        let b = Bracket {
            lo,
            f_lo: f(lo)?,
            hi,
            f_hi: f(hi)?,
        };
        if b.straddles() {
            return Ok(Some(b));
        }
        w *= 2.0;
    }
    Ok(None)
}

/// Root of `f` inside `bracket`, starting from `x0`. `f` returns the value
/// and the derivative. Steps leaving the bracket, or failing to halve the
/// residual, fall back to bisection.
pub fn safeguarded_newton<F>(
    mut f: F,
    bracket: Bracket,
    x0: f64,
    opts: NewtonOptions,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    if bracket.f_lo == 0.0 {
        return Ok(bracket.lo);
    }
    if bracket.f_hi == 0.0 {
        return Ok(bracket.hi);
    }
    debug_assert!(bracket.straddles(), "bracket does not straddle a root");
    // orient so that the oriented function is negative at `lo`
    let sign = if bracket.f_lo < 0.0 { 1.0 } else { -1.0 };
    let (mut lo, mut hi) = (bracket.lo.min(bracket.hi), bracket.lo.max(bracket.hi));
    if bracket.lo > bracket.hi {
        // values were given for the swapped ends
        return safeguarded_newton(
            f,
            Bracket {
                lo,
                f_lo: bracket.f_hi,
                hi,
                f_hi: bracket.f_lo,
            },
            x0,
            opts,
        );
    }

    let mut x = if x0 > lo && x0 < hi {
        x0
    } else {
        0.5 * (lo + hi)
    };
    let mut prev_abs = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let (fx, dfx) = f(x)?;
        if fx.abs() <= opts.f_tol {
            let xn = x - fx / dfx;
            if xn.is_finite() && xn >= lo && xn <= hi && xn != x {
                let (fxn, _) = f(xn)?;
                if fxn.abs() <= fx.abs() {
                    return Ok(xn);
                }
            }
            return Ok(x);
        }
        if sign * fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
        let newton = x - fx / dfx;
        let slow = fx.abs() > 0.5 * prev_abs;
        x = if newton.is_finite() && newton > lo && newton < hi && !slow {
            newton
        } else {
            0.5 * (lo + hi)
        };
        prev_abs = fx.abs();
    }
    Err(Error::NoConvergence {
        what: opts.what,
        iterations: opts.max_iter,
    })
}
