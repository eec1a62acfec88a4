//! Invariant checks on a computed solution and the aggregated report.
//!
//! Checks come in two tiers. Hard checks are properties the limit solution
//! must satisfy (wall conditions, flux constancy, sign of `U`, residuals,
//! closed-form oracles); the overall verdict is their conjunction. Warnings
//! cover the smallness conditions under which the thin-film limit is known to
//! hold and the `dK/dq` bracket. They say something about applicability rather
//! than about the correctness of the limit solve.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::constitutive::FluidParams;
use crate::error::{Error, Result};
use crate::fields::{
    lobatto_heights, residual_limit_system, LimitFields, ResidualReport, DEFAULT_GRID,
};
use crate::kappa::{kappa_solve, Closure, KappaQuery};
use crate::reynolds::{
    assemble_pressure, default_flux, flux_residual, max_relative_deviation, solve_q_ode,
    solve_q_pointwise, u_eval_unsimplified, uniform_grid, zero_mean_residual, GapProfile,
    PressureSolution, ReynoldsCoefficients, SolveMethod,
};

pub const FLUX_TOL: f64 = 1e-8;
pub const ZERO_MEAN_TOL: f64 = 1e-8;
pub const WALL_TOL: f64 = 1e-8;
pub const U2_TOP_TOL: f64 = 1e-6;
pub const ALGEBRAIC_TOL: f64 = 1e-12;
pub const MOMENTUM_TOL: f64 = 1e-6;
pub const DIVERGENCE_TOL: f64 = 1e-6;
pub const FIELD_FLUX_TOL: f64 = 1e-6;
pub const ORACLE_EQUIVALENCE_TOL: f64 = 1e-6;
pub const BRACKET_TOL: f64 = 1e-8;
pub const COUETTE_TOL: f64 = 1e-8;
pub const NEWTONIAN_TOL: f64 = 1e-9;
pub const ROUND_TRIP_TOL: f64 = 1e-10;
pub const PARTIALS_TOL: f64 = 1e-6;
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
pub const SHEAR_LIMIT: f64 = 1.0 / 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    Ode,
    Pointwise,
    Both,
}

impl std::str::FromStr for SolverChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ode" => Ok(Self::Ode),
            "pointwise" => Ok(Self::Pointwise),
            "both" => Ok(Self::Both),
            _ => Err(format!(
                "unknown solver '{s}' (expected ode | pointwise | both)"
            )),
        }
    }
}

impl std::fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Ode => "ode",
            Self::Pointwise => "pointwise",
            Self::Both => "both",
        })
    }
}

/// What to solve and on which grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub fluid: FluidParams,
    pub gap: GapProfile,
    /// Flux datum; defaults to `s h(0) / 2`.
    pub flux: Option<f64>,
    /// Intervals along `x`.
    pub n: usize,
    /// Intervals across the gap.
    pub m: usize,
    pub solver: SolverChoice,
}

impl RunConfig {
    pub fn new(fluid: FluidParams, gap: GapProfile) -> Self {
        Self {
            fluid,
            gap,
            flux: None,
            n: DEFAULT_GRID,
            m: DEFAULT_GRID,
            solver: SolverChoice::Pointwise,
        }
    }

    pub fn flux(&self) -> f64 {
        self.flux
            .unwrap_or_else(|| default_flux(&self.gap, &self.fluid))
    }

    /// Every violated constraint, for reporting all at once.
    pub fn violations(&self) -> Vec<String> {
        Self::check(&self.fluid, self.flux, self.n, self.m)
    }

    /// The gap-independent part of [`RunConfig::violations`].
    pub fn check(fluid: &FluidParams, flux: Option<f64>, n: usize, m: usize) -> Vec<String> {
        let mut v = fluid.violations();
        if fluid.r >= crate::constitutive::R_REYNOLDS {
            v.push(format!(
                "r = {} must satisfy r < 2/9 for the Reynolds solve",
                fluid.r
            ));
        }
        if n < crate::reynolds::MIN_NODES {
            v.push(format!("N = {n} must be >= {}", crate::reynolds::MIN_NODES));
        }
        if m < 4 {
            v.push(format!("M = {m} must be >= 4"));
        }
        if let Some(q) = flux {
            if !q.is_finite() {
                v.push(format!("flux must be finite (got {q})"));
            }
        }
        v
    }
}

/// Solutions produced by one run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub primary: PressureSolution,
    /// ODE solution when both solvers ran (the pointwise one is primary).
    pub secondary: Option<PressureSolution>,
    pub fields: LimitFields,
}

pub fn solve(config: &RunConfig) -> Result<RunOutcome> {
    let p = &config.fluid;
    p.validate()?;
    p.ensure_reynolds()?;
    let flux = config.flux();
    let (primary, secondary) = match config.solver {
        SolverChoice::Ode => (solve_q_ode(&config.gap, p, flux, config.n)?, None),
        SolverChoice::Pointwise => (solve_q_pointwise(&config.gap, p, flux, config.n)?, None),
        SolverChoice::Both => (
            solve_q_pointwise(&config.gap, p, flux, config.n)?,
            Some(solve_q_ode(&config.gap, p, flux, config.n)?),
        ),
    };
    let fields = LimitFields::assemble(&primary, &config.gap, p, config.m)?;
    Ok(RunOutcome {
        primary,
        secondary,
        fields,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Hard,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
    pub tier: Tier,
    /// The property being checked, in words.
    pub anchor: String,
}

impl Check {
    /// Passes when `measured <= threshold`.
    pub fn at_most(name: &str, measured: f64, threshold: f64, tier: Tier, anchor: &str) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            pass: measured <= threshold,
            tier,
            anchor: anchor.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallnessCondition {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
    /// `(x, z)` where the sup-norm is attained on the grid.
    pub location: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallnessBlock {
    pub chi: f64,
    pub conditions: Vec<SmallnessCondition>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketBlock {
    /// Lower bound `1/nu` of `psi'`.
    pub m: f64,
    /// Upper bound `1/(nu (1 - 9r/8))` of `psi'`.
    pub big_m: f64,
    /// `m/3 - M/4`: must be positive for the `U` bracket to certify `U < 0`.
    pub lower_coeff: f64,
    /// `M/3 - m/4`.
    pub upper_coeff: f64,
    pub satisfiable: bool,
    pub samples: usize,
    /// Extremes of `-U / h^3`.
    pub u_ratio_min: f64,
    pub u_ratio_max: f64,
    pub u_max: f64,
    /// Largest relative excursion of `-U / h^3` outside `[lower_coeff, upper_coeff]`.
    pub u_violation: f64,
    /// Extremes of `(dK/dq) / h`, to compare against `[-M/(2m), -m/(2M)]`.
    pub dkdq_ratio_min: f64,
    pub dkdq_ratio_max: f64,
    pub dkdq_max: f64,
    pub dkdq_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportError {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub smallness: Option<SmallnessBlock>,
    pub brackets: Option<BracketBlock>,
    pub residuals: Option<ResidualReport>,
    /// Max relative deviation between the ODE and pointwise gradients, when both ran.
    pub ode_vs_pointwise: Option<f64>,
    pub error: Option<ReportError>,
    pub warnings: Vec<String>,
    pub verdict: bool,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn hard_failures(&self) -> Vec<&Check> {
        self.checks
            .iter()
            .filter(|c| c.tier == Tier::Hard && !c.pass)
            .collect()
    }
}

/// Grid maximum of `|f|`, corrected once by Richardson extrapolation against
/// the every-other-node subgrid when both dimensions allow it. Returns the
/// estimate and the maximizing `(row, col)`.
pub fn sup_norm(f: &Array2<f64>) -> (f64, (usize, usize)) {
    let (n1, m1) = f.dim();
    let mut best = (0.0_f64, (0, 0));
    let mut coarse = 0.0_f64;
    for i in 0..n1 {
        for j in 0..m1 {
            let v = f[[i, j]].abs();
            if v > best.0 || (i, j) == (0, 0) {
                best = (v, (i, j));
            }
            if i % 2 == 0 && j % 2 == 0 {
                coarse = coarse.max(v);
            }
        }
    }
    if n1 % 2 == 1 && m1 % 2 == 1 && n1 >= 5 && m1 >= 5 {
        // grid maxima of smooth fields converge at second order
        (best.0 + (best.0 - coarse) / 3.0, best.1)
    } else {
        best
    }
}

/// `chi = (nu / 6) sqrt(r (1 - r))`.
pub fn chi(p: &FluidParams) -> f64 {
    p.nu / 6.0 * (p.r * (1.0 - p.r)).sqrt()
}

pub fn check_smallness(fields: &LimitFields, p: &FluidParams) -> SmallnessBlock {
    let chi = chi(p);
    let l = p.lambda_star;
    let at = |(i, j): (usize, usize)| (fields.x[i], fields.z[[i, j]]);
    let mut conditions = Vec::new();
    let mut push = |name: &str, measured: f64, threshold: f64, loc: (usize, usize)| {
        conditions.push(SmallnessCondition {
            name: name.into(),
            measured,
            threshold,
            pass: measured <= threshold,
            location: at(loc),
        });
    };
    let (v, loc) = sup_norm(&fields.dzu1);
    push("lambda* |dz u1|", l * v, SHEAR_LIMIT, loc);
    let (v, loc) = sup_norm(&fields.sigma12);
    push("lambda* |sigma12|", l * v, chi, loc);
    let (a, loc) = sup_norm(&fields.sigma11);
    let (b, _) = sup_norm(&fields.sigma22);
    push("lambda* (|sigma11| + |sigma22|)", l * (a + b), chi, loc);
    let (v, loc) = sup_norm(&fields.dz_sigma12());
    push("2 lambda* |dz sigma12|", 2.0 * l * v, chi, loc);
    let (v, loc) = sup_norm(&fields.dz_sigma11());
    push("lambda* |dz sigma11|", l * v, chi, loc);
    let all_pass = conditions.iter().all(|c| c.pass);
    SmallnessBlock {
        chi,
        conditions,
        all_pass,
    }
}

/// Bracket coefficients only; the samples are left empty.
pub fn bracket_coefficients(p: &FluidParams) -> BracketBlock {
    let (m, big_m) = p.psi_prime_bounds();
    let lower_coeff = m / 3.0 - big_m / 4.0;
    BracketBlock {
        m,
        big_m,
        lower_coeff,
        upper_coeff: big_m / 3.0 - m / 4.0,
        satisfiable: lower_coeff > 0.0 && p.r < crate::constitutive::R_REYNOLDS,
        samples: 0,
        u_ratio_min: f64::NAN,
        u_ratio_max: f64::NAN,
        u_max: f64::NAN,
        u_violation: f64::NAN,
        dkdq_ratio_min: f64::NAN,
        dkdq_ratio_max: f64::NAN,
        dkdq_max: f64::NAN,
        dkdq_violation: f64::NAN,
    }
}

/// Sample `U` and `dK/dq` at every node of `ps` against their brackets.
pub fn check_brackets(
    ps: &PressureSolution,
    gp: &GapProfile,
    p: &FluidParams,
) -> Result<BracketBlock> {
    let mut b = bracket_coefficients(p);
    if !b.satisfiable {
        return Ok(b);
    }
    let (k_lo, k_hi) = (-b.big_m / (2.0 * b.m), -b.m / (2.0 * b.big_m));
    let (mut umin, mut umax, mut umaxv, mut uviol) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0_f64);
    let (mut kmin, mut kmax, mut kmaxv, mut kviol) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0_f64);
    for (&x, &q) in ps.x.iter().zip(&ps.q) {
        let c = ReynoldsCoefficients::at(x, q, gp, p)?;
        let ratio = -c.u / c.h.powi(3);
        umin = umin.min(ratio);
        umax = umax.max(ratio);
        umaxv = umaxv.max(c.u);
        uviol = uviol
            .max((b.lower_coeff - ratio) / b.lower_coeff)
            .max((ratio - b.upper_coeff) / b.upper_coeff);
        let dk = c.closure.dk_dq();
        let kr = dk / c.h;
        kmin = kmin.min(kr);
        kmax = kmax.max(kr);
        kmaxv = kmaxv.max(dk);
        kviol = kviol
            .max((k_lo - kr) / k_lo.abs())
            .max((kr - k_hi) / k_hi.abs());
    }
    b.samples = ps.x.len();
    b.u_ratio_min = umin;
    b.u_ratio_max = umax;
    b.u_max = umaxv;
    b.u_violation = uviol.max(0.0);
    b.dkdq_ratio_min = kmin;
    b.dkdq_ratio_max = kmax;
    b.dkdq_max = kmaxv;
    b.dkdq_violation = kviol.max(0.0);
    Ok(b)
}

/// Closed-form constant-gap (plane Couette) fields on an `n x m` grid.
pub fn oracle_couette(
    p: &FluidParams,
    h: f64,
    length: f64,
    n: usize,
    m: usize,
) -> Result<LimitFields> {
    p.validate()?;
    p.ensure_invertible()?;
    let gap = GapProfile::constant(length, h)?;
    let (nu, r, l, s) = (p.nu, p.r, p.lambda_star, p.s);
    let x = uniform_grid(length, n);
    let zs = lobatto_heights(h, m);
    let full = |v: f64| Array2::from_elem((n + 1, m + 1), v);
    let s12 = -r * nu * s / (h + l * l * s * s / h);
    let s11 = -r * nu * s * s * l / (h * h + l * l * s * s);
    let pressure = PressureSolution {
        x: x.clone(),
        q: vec![0.0; n + 1],
        dq: vec![0.0; n + 1],
        p: vec![0.0; n + 1],
        flux: s * h / 2.0,
        method: SolveMethod::ClosedForm,
        ode_stats: None,
    };
    Ok(LimitFields {
        params: *p,
        gap,
        pressure,
        h: vec![h; n + 1],
        z: Array2::from_shape_fn((n + 1, m + 1), |(_, j)| zs[j]),
        u1: Array2::from_shape_fn((n + 1, m + 1), |(_, j)| s * (1.0 - zs[j] / h)),
        u2: full(0.0),
        sigma11: full(s11),
        sigma12: full(s12),
        sigma22: full(-s11),
        dzu1: full(-s / h),
        dzzu1: full(0.0),
        dxu1: full(0.0),
        x,
        epsilon: 1.0,
    })
}

/// Classical Reynolds solution for a linear constitutive law:
/// `q = 12 nu (s h / 2 - Q) / h^3`, independent of the closure machinery.
pub fn oracle_newtonian(
    gp: &GapProfile,
    p: &FluidParams,
    flux: f64,
    n: usize,
) -> Result<PressureSolution> {
    p.validate()?;
    if p.lambda_star != 0.0 {
        return Err(Error::InvalidParams(format!(
            "Newtonian oracle needs lambda_star = 0 (got {})",
            p.lambda_star
        )));
    }
    let x = uniform_grid(gp.length, n);
    let (q, dq): (Vec<f64>, Vec<f64>) = x
        .iter()
        .map(|&xi| {
            let (h, dh) = gp.eval(xi);
            let excess = p.s * h / 2.0 - flux;
            let q = 12.0 * p.nu * excess / h.powi(3);
            let dq = 12.0 * p.nu * dh * (p.s / (2.0 * h.powi(3)) - 3.0 * excess / h.powi(4));
            (q, dq)
        })
        .unzip();
    let pr = assemble_pressure(&q, gp);
    Ok(PressureSolution {
        x,
        q,
        dq,
        p: pr,
        flux,
        method: SolveMethod::ClosedForm,
        ode_stats: None,
    })
}

/// Largest elementwise difference between two field sets on the same grid,
/// over `u1, u2, sigma11, sigma12, sigma22` and the pressure gradient.
pub fn field_deviation(a: &LimitFields, b: &LimitFields) -> f64 {
    let pairs = [
        (&a.u1, &b.u1),
        (&a.u2, &b.u2),
        (&a.sigma11, &b.sigma11),
        (&a.sigma12, &b.sigma12),
        (&a.sigma22, &b.sigma22),
    ];
    let mut dev = pairs
        .iter()
        .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max);
    for (u, v) in a.pressure.q.iter().zip(&b.pressure.q) {
        dev = dev.max((u - v).abs());
    }
    dev
}

/// Log-spaced shear rates `+-[1e-6, 1e6]` plus zero.
pub fn shear_grid(points: usize) -> Vec<f64> {
    let half = points / 2;
    let mut g = vec![0.0];
    for k in 0..half {
        let t = 10f64.powf(-6.0 + 12.0 * k as f64 / (half - 1).max(1) as f64);
        g.push(t);
        g.push(-t);
    }
    g
}

/// `max |psi(phi(t)) - t| / max(1, |t|)` over `grid`.
pub fn round_trip_error(p: &FluidParams, grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &t in grid {
        worst = worst.max((p.psi(p.phi(t))? - t).abs() / t.abs().max(1.0));
    }
    Ok(worst)
}

/// `(inf phi', sup phi')` over `grid`.
pub fn phi_prime_range(p: &FluidParams, grid: &[f64]) -> (f64, f64) {
    grid.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
            let d = p.phi_prime(t);
            (lo.min(d), hi.max(d))
        })
}

fn partials_error(ps: &PressureSolution, gp: &GapProfile, p: &FluidParams) -> Result<f64> {
    let n = ps.x.len() - 1;
    let mut worst = 0.0_f64;
    for i in [0, n / 2, n] {
        let (h, q, s) = (gp.h(ps.x[i]), ps.q[i], p.s);
        let c = Closure::new(KappaQuery::new(h, q, s)?, p)?;
        let k = |h: f64, q: f64| kappa_solve(&KappaQuery::new(h, q, s)?, p);
        let d = 1e-4 * q.abs().max(1.0);
        let fd_q = (k(h, q + d)? - k(h, q - d)?) / (2.0 * d);
        let d = 1e-4 * h;
        let fd_h = (k(h + d, q)? - k(h - d, q)?) / (2.0 * d);
        worst = worst
            .max((c.dk_dq() - fd_q).abs() / fd_q.abs().max(1.0))
            .max((c.dk_dh() - fd_h).abs() / fd_h.abs().max(1.0));
    }
    Ok(worst)
}

fn orthogonality_error(ps: &PressureSolution, gp: &GapProfile, p: &FluidParams) -> Result<f64> {
    let n = ps.x.len() - 1;
    let mut worst = 0.0_f64;
    for i in [0, n / 3, 2 * n / 3, n] {
        let c = ReynoldsCoefficients::at(ps.x[i], ps.q[i], gp, p)?;
        let full = u_eval_unsimplified(ps.x[i], ps.q[i], gp, p)?;
        worst = worst.max((full - c.u).abs() / c.u.abs());
    }
    Ok(worst)
}

/// Run every check on a completed solve.
pub fn validate_outcome(config: &RunConfig, outcome: &RunOutcome) -> Result<ValidationReport> {
    use Tier::{Hard, Warning};
    let p = &config.fluid;
    let gp = &config.gap;
    let ps = &outcome.primary;
    let fields = &outcome.fields;
    let mut checks = Vec::new();

    let grid = shear_grid(200);
    checks.push(Check::at_most(
        "constitutive round-trip",
        round_trip_error(p, &grid)?,
        ROUND_TRIP_TOL,
        Hard,
        "psi inverts phi on a log-spaced shear grid",
    ));
    let (lo, hi) = phi_prime_range(p, &grid);
    let bound_excess = (p.phi_prime_lower() - lo).max(hi - p.nu);
    checks.push(Check::at_most(
        "phi' bounds",
        bound_excess,
        1e-12,
        Hard,
        "nu (1 - 9r/8) <= phi' <= nu",
    ));

    checks.push(Check::at_most(
        "flux constancy",
        flux_residual(ps, gp, p)?,
        FLUX_TOL,
        Hard,
        "gap flux equals the datum at every node",
    ));
    if let Some(ode) = &outcome.secondary {
        checks.push(Check::at_most(
            "flux constancy (ode)",
            flux_residual(ode, gp, p)?,
            FLUX_TOL,
            Hard,
            "gap flux equals the datum at every node",
        ));
    }
    checks.push(Check::at_most(
        "zero-mean pressure",
        zero_mean_residual(ps, gp),
        ZERO_MEAN_TOL,
        Hard,
        "integral of p over the gap domain vanishes",
    ));

    let brackets = check_brackets(ps, gp, p)?;
    checks.push(Check {
        name: "U < 0".into(),
        measured: brackets.u_max,
        threshold: 0.0,
        pass: brackets.u_max < 0.0,
        tier: Hard,
        anchor: "Reynolds coefficient U is strictly negative for r < 2/9".into(),
    });
    checks.push(Check::at_most(
        "U bracket",
        brackets.u_violation,
        BRACKET_TOL,
        Hard,
        "h^3 (m/3 - M/4) <= -U <= h^3 (M/3 - m/4)",
    ));
    checks.push(Check {
        name: "dK/dq < 0".into(),
        measured: brackets.dkdq_max,
        threshold: 0.0,
        pass: brackets.dkdq_max < 0.0,
        tier: Hard,
        anchor: "closure constant decreases with the pressure gradient".into(),
    });
    checks.push(Check::at_most(
        "dK/dq bracket",
        brackets.dkdq_violation,
        BRACKET_TOL,
        Warning,
        "-M h / (2m) <= dK/dq <= -m h / (2M)",
    ));
    checks.push(Check::at_most(
        "U orthogonality",
        orthogonality_error(ps, gp, p)?,
        ORTHOGONALITY_TOL,
        Hard,
        "int (t + dK/dq) psi' = 0: both forms of U agree",
    ));
    checks.push(Check::at_most(
        "closure partials vs differences",
        partials_error(ps, gp, p)?,
        PARTIALS_TOL,
        Hard,
        "implicit-function partials of K match central differences",
    ));

    let ode_vs_pointwise = outcome
        .secondary
        .as_ref()
        .map(|ode| max_relative_deviation(&ode.q, &ps.q));
    if let Some(dev) = ode_vs_pointwise {
        checks.push(Check::at_most(
            "ode vs pointwise",
            dev,
            ORACLE_EQUIVALENCE_TOL,
            Hard,
            "marching U q' = -V reproduces the node-by-node flux solve",
        ));
    }

    let all_finite = [
        &fields.u1,
        &fields.u2,
        &fields.sigma11,
        &fields.sigma12,
        &fields.sigma22,
        &fields.dzu1,
        &fields.dzzu1,
        &fields.dxu1,
    ]
    .iter()
    .all(|a| a.iter().all(|v| v.is_finite()));
    checks.push(Check {
        name: "fields finite".into(),
        measured: if all_finite { 0.0 } else { 1.0 },
        threshold: 0.0,
        pass: all_finite,
        tier: Hard,
        anchor: "limit fields are regular".into(),
    });
    let s_scale = p.s.abs().max(1.0);
    let (wall, u2_top) = fields.wall_errors();
    checks.push(Check::at_most(
        "wall conditions",
        wall / s_scale,
        WALL_TOL,
        Hard,
        "u = (s, 0) at z = 0 and u1 = 0 at z = h",
    ));
    checks.push(Check::at_most(
        "u2 at upper wall",
        u2_top / s_scale,
        U2_TOP_TOL,
        Hard,
        "u2 vanishes at z = h because the flux is x-independent",
    ));
    checks.push(Check::at_most(
        "trace identity",
        fields.trace_error(),
        0.0,
        Hard,
        "sigma11 + sigma22 = 0",
    ));
    let residuals = residual_limit_system(fields, p);
    checks.push(Check::at_most(
        "algebraic closures",
        residuals.algebraic_max(),
        ALGEBRAIC_TOL,
        Hard,
        "Oldroyd stress closures of the limit system",
    ));
    checks.push(Check::at_most(
        "momentum residual",
        residuals.momentum,
        MOMENTUM_TOL,
        Hard,
        "(1 - r) nu dz^2 u1 - dx p + dz sigma12 = 0",
    ));
    checks.push(Check::at_most(
        "divergence residual",
        residuals.divergence,
        DIVERGENCE_TOL,
        Hard,
        "dx u1 + dz u2 = 0",
    ));
    checks.push(Check::at_most(
        "field flux spread",
        fields.flux_spread(),
        FIELD_FLUX_TOL,
        Hard,
        "int_0^h u1 dz is constant along x (independent quadrature)",
    ));

    let flux = config.flux();
    let h0 = gp.h(0.0);
    if gp.is_constant() && (flux - p.s * h0 / 2.0).abs() <= 1e-14 * p.s.abs().max(1.0) {
        let oracle = oracle_couette(p, h0, gp.length, config.n, config.m)?;
        checks.push(Check::at_most(
            "couette oracle",
            field_deviation(fields, &oracle) / s_scale,
            COUETTE_TOL,
            Hard,
            "constant gap: u1 = s (1 - z/h), constant stresses, q = 0",
        ));
    }
    if p.lambda_star == 0.0 {
        let oracle = oracle_newtonian(gp, p, flux, config.n)?;
        checks.push(Check::at_most(
            "newtonian oracle",
            max_relative_deviation(&ps.q, &oracle.q),
            NEWTONIAN_TOL,
            Hard,
            "lambda* = 0 reduces to the classical Reynolds equation",
        ));
    }

    let smallness = check_smallness(fields, p);
    for c in &smallness.conditions {
        checks.push(Check::at_most(
            &format!("smallness: {}", c.name),
            c.measured,
            c.threshold,
            Warning,
            "smallness condition for convergence to the thin-film limit",
        ));
    }

    let warnings = checks
        .iter()
        .filter(|c| c.tier == Warning && !c.pass)
        .map(|c| format!("{}: {:e} > {:e}", c.name, c.measured, c.threshold))
        .collect();
    let verdict = checks.iter().filter(|c| c.tier == Hard).all(|c| c.pass);
    Ok(ValidationReport {
        config: config.clone(),
        checks,
        smallness: Some(smallness),
        brackets: Some(brackets),
        residuals: Some(residuals),
        ode_vs_pointwise,
        error: None,
        warnings,
        verdict,
    })
}

/// Solve and validate; failures are encoded in the report.
pub fn run_all(config: &RunConfig) -> ValidationReport {
    match solve(config).and_then(|o| validate_outcome(config, &o)) {
        Ok(r) => r,
        Err(e) => refused(config, &e),
    }
}

/// Report for a run that could not be solved.
pub fn refused(config: &RunConfig, e: &Error) -> ValidationReport {
    let brackets = bracket_coefficients(&config.fluid);
    ValidationReport {
        config: config.clone(),
        checks: Vec::new(),
        smallness: None,
        brackets: Some(brackets),
        residuals: None,
        ode_vs_pointwise: None,
        error: Some(ReportError {
            kind: e.kind().into(),
            message: e.to_string(),
        }),
        warnings: Vec::new(),
        verdict: false,
    }
}
