use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the upper wall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapShape {
    Constant {
        h: f64,
    },
    /// `h1 + (h2 - h1) x / L`.
    LinearSlider {
        h1: f64,
        h2: f64,
    },
    /// `base + amplitude (1 - cos(2 pi x / L)) / 2`; negative amplitude gives a constriction.
    CosineBump {
        base: f64,
        amplitude: f64,
    },
    /// Sampled heights, interpolated with a monotone (PCHIP) cubic.
    Table {
        xs: Vec<f64>,
        hs: Vec<f64>,
    },
}

/// Gap height `h(x) > 0` on `[0, L]`, continuously differentiable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapProfile {
    pub length: f64,
    pub shape: GapShape,
    #[serde(skip)]
    slopes: Vec<f64>,
}

impl GapProfile {
    pub fn new(length: f64, shape: GapShape) -> Result<Self> {
        let mut errs = Vec::new();
        if !(length.is_finite() && length > 0.0) {
            errs.push(format!("length must be finite and > 0 (got {length})"));
        }
        let mut slopes = Vec::new();
        match &shape {
            GapShape::Constant { h } => {
                if !(h.is_finite() && *h > 0.0) {
                    errs.push(format!("h must be > 0 (got {h})"));
                }
            }
            GapShape::LinearSlider { h1, h2 } => {
                if !(h1.is_finite() && *h1 > 0.0 && h2.is_finite() && *h2 > 0.0) {
                    errs.push(format!(
                        "slider heights must be > 0 (got h1 = {h1}, h2 = {h2})"
                    ));
                }
            }
            GapShape::CosineBump { base, amplitude } => {
                let min = base + amplitude.min(0.0);
                if !(base.is_finite() && amplitude.is_finite() && min > 0.0) {
                    errs.push(format!(
                        "cosine bump must stay positive (base = {base}, amplitude = {amplitude})"
                    ));
                }
            }
            GapShape::Table { xs, hs } => {
                if xs.len() != hs.len() || xs.len() < 2 {
                    errs.push(format!(
                        "table needs >= 2 points with matching lengths (got {} x, {} h)",
                        xs.len(),
                        hs.len()
                    ));
                } else {
                    if xs[0] != 0.0 || (xs[xs.len() - 1] - length).abs() > 1e-12 * length.max(1.0) {
                        errs.push(format!("table x must span [0, {length}]"));
                    }
                    if xs
                        .windows(2)
                        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
                    {
                        errs.push("table x must be strictly increasing".into());
                    }
                    if hs.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
                        errs.push("table heights must be strictly positive".into());
                    }
                    if errs.is_empty() {
                        slopes = pchip_slopes(xs, hs);
                    }
                }
            }
        }
        if !errs.is_empty() {
            return Err(Error::InvalidProfile(errs.join("; ")));
        }
        Ok(Self {
            length,
            shape,
            slopes,
        })
    }

    pub fn constant(length: f64, h: f64) -> Result<Self> {
        Self::new(length, GapShape::Constant { h })
    }

    pub fn linear_slider(length: f64, h1: f64, h2: f64) -> Result<Self> {
        Self::new(length, GapShape::LinearSlider { h1, h2 })
    }

    pub fn cosine_bump(length: f64, base: f64, amplitude: f64) -> Result<Self> {
        Self::new(length, GapShape::CosineBump { base, amplitude })
    }

    pub fn table(xs: Vec<f64>, hs: Vec<f64>) -> Result<Self> {
        let length = xs.last().copied().unwrap_or(f64::NAN);
        Self::new(length, GapShape::Table { xs, hs })
    }

    pub fn is_constant(&self) -> bool {
        match &self.shape {
            GapShape::Constant { .. } => true,
            GapShape::LinearSlider { h1, h2 } => h1 == h2,
            GapShape::CosineBump { amplitude, .. } => *amplitude == 0.0,
            GapShape::Table { hs, .. } => hs.windows(2).all(|w| w[0] == w[1]),
        }
    }

    pub fn h(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    pub fn dh(&self, x: f64) -> f64 {
        self.eval(x).1
    }

    /// `(h(x), h'(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let l = self.length;
        match &self.shape {
            GapShape::Constant { h } => (*h, 0.0),
            GapShape::LinearSlider { h1, h2 } => (h1 + (h2 - h1) * x / l, (h2 - h1) / l),
            GapShape::CosineBump { base, amplitude } => {
                let w = 2.0 * std::f64::consts::PI / l;
                (
                    base + amplitude * 0.5 * (1.0 - (w * x).cos()),
                    amplitude * 0.5 * w * (w * x).sin(),
                )
            }
            GapShape::Table { xs, hs } => hermite(xs, hs, &self.slopes, x),
        }
    }

    /// Minimum height (exact for the analytic shapes, node minimum for tables,
    /// which PCHIP does not undershoot).
    pub fn min_height(&self) -> f64 {
        match &self.shape {
            GapShape::Constant { h } => *h,
            GapShape::LinearSlider { h1, h2 } => h1.min(*h2),
            GapShape::CosineBump { base, amplitude } => base + amplitude.min(0.0),
            GapShape::Table { hs, .. } => hs.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let hk: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let dk: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / hk[k]).collect();
    if n == 2 {
        return vec![dk[0]; 2];
    }
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        let (d0, d1) = (dk[k - 1], dk[k]);
        if d0 == 0.0 || d1 == 0.0 || (d0 > 0.0) != (d1 > 0.0) {
            m[k] = 0.0;
        } else {
            let w1 = 2.0 * hk[k] + hk[k - 1];
            let w2 = hk[k] + 2.0 * hk[k - 1];
            m[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    let edge = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if d.signum() != d0.signum() || d0 == 0.0 {
            0.0
        } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            d
        }
    };
    m[0] = edge(hk[0], hk[1], dk[0], dk[1]);
    m[n - 1] = edge(hk[n - 2], hk[n - 3], dk[n - 2], dk[n - 3]);
    m
}

/// Cubic Hermite value and derivative.
pub(crate) fn hermite(xs: &[f64], ys: &[f64], ms: &[f64], x: f64) -> (f64, f64) {
    let n = xs.len();
    let k = match xs.partition_point(|&v| v <= x) {
        0 => 0,
        i if i >= n => n - 2,
        i => i - 1,
    };
    let h = xs[k + 1] - xs[k];
    let t = (x - xs[k]) / h;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let v = h00 * ys[k] + h10 * h * ms[k] + h01 * ys[k + 1] + h11 * h * ms[k + 1];
    let d00 = (6.0 * t2 - 6.0 * t) / h;
    let d10 = 3.0 * t2 - 4.0 * t + 1.0;
    let d01 = (-6.0 * t2 + 6.0 * t) / h;
    let d11 = 3.0 * t2 - 2.0 * t;
    let d = d00 * ys[k] + d10 * ms[k] + d01 * ys[k + 1] + d11 * ms[k + 1];
    (v, d)
}
