//! Dormand-Prince 5(4) for a scalar ODE `y' = f(x, y)` with dense output.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub safety: f64,
    /// Bounds on the step-size change factor.
    pub fac_min: f64,
    pub fac_max: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            max_steps: 100_000,
            safety: 0.9,
            fac_min: 0.2,
            fac_max: 10.0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, Copy)]
struct DenseStep {
    x0: f64,
    h: f64,
    cont: [f64; 5],
}

impl DenseStep {
    fn eval(&self, x: f64) -> f64 {
        let s = (x - self.x0) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        c[0] + s * (c[1] + s1 * (c[2] + s * (c[3] + s1 * c[4])))
    }
}

impl Dopri5 {
    /// Integrate from `(x0, y0)` and return the solution at each of `outputs`
    /// (sorted, in the direction of integration, starting at or after `x0`).
    pub fn solve_dense<F>(
        &self,
        mut f: F,
        x0: f64,
        y0: f64,
        outputs: &[f64],
    ) -> Result<(Vec<f64>, OdeStats)>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let mut stats = OdeStats::default();
        let mut out = Vec::with_capacity(outputs.len());
        let Some(&x_end) = outputs.last() else {
            return Ok((out, stats));
        };
        let mut next = 0;
        while next < outputs.len() && outputs[next] == x0 {
            out.push(y0);
            next += 1;
        }
        if next == outputs.len() {
            return Ok((out, stats));
        }
        let span = x_end - x0;
        let dir = span.signum();

        let mut x = x0;
        let mut y = y0;
        let mut k1 = f(x, y)?;
        stats.evaluations += 1;
        let mut h = self.initial_step(&mut f, x, y, k1, span, &mut stats)?;
        let h_min = 1e-14 * span.abs();

        let mut k = [0.0; 7];
        while next < outputs.len() {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::StepFailure { x, step: h });
            }
            if (x + h - x_end) * dir > 0.0 {
                h = x_end - x;
            }
            k[0] = k1;
            for s in 1..7 {
                let mut yi = y;
                for j in 0..s {
                    yi += h * A[s][j] * k[j];
                }
                k[s] = f(x + C[s] * h, yi)?;
                stats.evaluations += 1;
            }
            // stage 7 sits at x + h with the fifth-order solution (FSAL)
            let mut y_new = y;
            for j in 0..6 {
                y_new += h * A[6][j] * k[j];
            }
            let mut err = 0.0;
            for j in 0..7 {
                err += E[j] * k[j];
            }
            let sc = self.atol + self.rtol * y.abs().max(y_new.abs());
            let err = (h * err / sc).abs();
            let err = if err.is_finite() { err } else { f64::INFINITY };

            if err <= 1.0 {
                let ydiff = y_new - y;
                let bspl = h * k[0] - ydiff;
                let mut d = 0.0;
                for j in 0..7 {
                    d += D[j] * k[j];
                }
                let dense = DenseStep {
                    x0: x,
                    h,
                    cont: [y, ydiff, bspl, ydiff - h * k[6] - bspl, h * d],
                };
                let x_new = if (x + h - x_end) * dir >= 0.0 {
                    x_end
                } else {
                    x + h
                };
                while next < outputs.len() && (outputs[next] - x_new) * dir <= 0.0 {
                    out.push(dense.eval(outputs[next]));
                    next += 1;
                }
                x = x_new;
                y = y_new;
                k1 = k[6];
                stats.accepted += 1;
                let fac = if err == 0.0 {
                    self.fac_max
                } else {
                    (self.safety * err.powf(-0.2)).clamp(self.fac_min, self.fac_max)
                };
                h *= fac;
            } else {
                stats.rejected += 1;
                let fac = (self.safety * err.powf(-0.2)).clamp(self.fac_min, 1.0);
                h *= fac;
                if h.abs() < h_min {
                    return Err(Error::StepFailure { x, step: h });
                }
            }
        }
        Ok((out, stats))
    }

    fn initial_step<F>(
        &self,
        f: &mut F,
        x: f64,
        y: f64,
        f0: f64,
        span: f64,
        stats: &mut OdeStats,
    ) -> Result<f64>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        // Hairer-Norsett-Wanner starting step heuristic, scalar form
        let sc = self.atol + self.rtol * y.abs();
        let d0 = (y / sc).abs();
        let d1 = (f0 / sc).abs();
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(span.abs());
        let y1 = y + h0 * span.signum() * f0;
        let f1 = f(x + h0 * span.signum(), y1)?;
        stats.evaluations += 1;
        let d2 = ((f1 - f0) / sc).abs() / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dmax).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(span.abs()) * span.signum())
    }
}
