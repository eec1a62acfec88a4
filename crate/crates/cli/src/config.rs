//! Flat `key = value` configuration with `[section]` headers.
//!
//! ```text
//! [fluid]
//! nu = 1.0
//! r = 0.2
//! lambda_star = 0.1
//! s = 1.0
//!
//! [gap]
//! kind = linear_slider
//! length = 1.0
//! h1 = 1.0
//! h2 = 2.0
//! ```
//!
//! Lines starting with `#` or `;` are comments. Optional sections: `[flux] q`,
//! `[grid] n, m`, `[solver] method`, `[output] dir, epsilon` (comma list).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thinvisc_core::reynolds::GapShape;
use thinvisc_core::{FluidParams, GapProfile, RunConfig, SolverChoice};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed config:\n  {}", .0.join("\n  "))]
    Parse(Vec<String>),
    #[error("config violates constraints:\n  {}", .0.join("\n  "))]
    Constraint(Vec<String>),
}

/// A run configuration plus the output settings the library does not need.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub run: RunConfig,
    pub out_dir: Option<PathBuf>,
    pub epsilons: Vec<f64>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub grid: Option<(usize, usize)>,
    pub solver: Option<SolverChoice>,
    pub out_dir: Option<PathBuf>,
}

const FLUID_KEYS: &[&str] = &["nu", "r", "lambda_star", "s", "rho"];
const FLUX_KEYS: &[&str] = &["q"];
const GRID_KEYS: &[&str] = &["n", "m"];
const SOLVER_KEYS: &[&str] = &["method"];
const OUTPUT_KEYS: &[&str] = &["dir", "epsilon"];

fn gap_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "constant" => &["kind", "length", "h"],
        "linear_slider" => &["kind", "length", "h1", "h2"],
        "cosine_bump" => &["kind", "length", "base", "amplitude"],
        "table" => &["kind", "length", "xs", "hs"],
        _ => return None,
    })
}

type Section = BTreeMap<String, (String, usize)>;

struct Document {
    sections: BTreeMap<String, Section>,
    errors: Vec<String>,
}

impl Document {
    fn parse(text: &str) -> Self {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut errors = Vec::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    errors.push(format!(
                        "line {line_no}: unterminated section header '{line}'"
                    ));
                    continue;
                };
                let name = name.trim().to_string();
                if !["fluid", "gap", "flux", "grid", "solver", "output"].contains(&name.as_str()) {
                    errors.push(format!("line {line_no}: unknown section [{name}]"));
                }
                sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(format!(
                    "line {line_no}: expected 'key = value', got '{line}'"
                ));
                continue;
            };
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            let Some(section) = &current else {
                errors.push(format!(
                    "line {line_no}: key '{key}' appears before any section"
                ));
                continue;
            };
            if key.is_empty() {
                errors.push(format!("line {line_no}: empty key"));
                continue;
            }
            let entries = sections.get_mut(section).expect("section registered");
            if entries.contains_key(&key) {
                errors.push(format!("line {line_no}: duplicate key {section}.{key}"));
                continue;
            }
            entries.insert(key, (value, line_no));
        }
        Self { sections, errors }
    }

    fn reject_unknown(&mut self, section: &str, allowed: &[&str]) {
        if let Some(entries) = self.sections.get(section) {
            for (key, (_, line)) in entries {
                if !allowed.contains(&key.as_str()) {
                    self.errors
                        .push(format!("line {line}: unknown key {section}.{key}"));
                }
            }
        }
    }

    fn raw(&self, section: &str, key: &str) -> Option<&(String, usize)> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    fn string(&mut self, section: &str, key: &str) -> Option<String> {
        let v = self.raw(section, key).map(|(v, _)| v.clone());
        if v.is_none() {
            self.errors
                .push(format!("missing required key {section}.{key}"));
        }
        v
    }

    fn number(&mut self, section: &str, key: &str, required: bool) -> Option<f64> {
        let Some((v, line)) = self.raw(section, key).cloned() else {
            if required {
                self.errors
                    .push(format!("missing required key {section}.{key}"));
            }
            return None;
        };
        match v.parse::<f64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.errors.push(format!(
                    "line {line}: {section}.{key} = '{v}' is not a number"
                ));
                None
            }
        }
    }

    fn count(&mut self, section: &str, key: &str) -> Option<usize> {
        let (v, line) = self.raw(section, key).cloned()?;
        match v.parse::<usize>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.errors.push(format!(
                    "line {line}: {section}.{key} = '{v}' is not a non-negative integer"
                ));
                None
            }
        }
    }

    fn list(&mut self, section: &str, key: &str, required: bool) -> Option<Vec<f64>> {
        let Some((v, line)) = self.raw(section, key).cloned() else {
            if required {
                self.errors
                    .push(format!("missing required key {section}.{key}"));
            }
            return None;
        };
        let parsed: Result<Vec<f64>, _> = v.split(',').map(|t| t.trim().parse::<f64>()).collect();
        match parsed {
            Ok(xs) => Some(xs),
            Err(_) => {
                self.errors.push(format!(
                    "line {line}: {section}.{key} = '{v}' is not a comma-separated list of numbers"
                ));
                None
            }
        }
    }
}

pub fn read_config(path: &Path, overrides: &Overrides) -> Result<CliConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text, overrides)
}

/// Parse and validate; every problem of the failing phase is reported at once.
pub fn parse_config(text: &str, overrides: &Overrides) -> Result<CliConfig, ConfigError> {
    let mut doc = Document::parse(text);
    doc.reject_unknown("fluid", FLUID_KEYS);
    doc.reject_unknown("flux", FLUX_KEYS);
    doc.reject_unknown("grid", GRID_KEYS);
    doc.reject_unknown("solver", SOLVER_KEYS);
    doc.reject_unknown("output", OUTPUT_KEYS);

    let nu = doc.number("fluid", "nu", true);
    let r = doc.number("fluid", "r", true);
    let lambda_star = doc.number("fluid", "lambda_star", true);
    let s = doc.number("fluid", "s", true);
    let rho = doc.number("fluid", "rho", false).unwrap_or(1.0);

    let kind = doc.string("gap", "kind");
    let mut shape = None;
    let mut length = None;
    if let Some(kind) = &kind {
        match gap_keys(kind) {
            None => {
                let line = doc.raw("gap", "kind").map_or(0, |(_, l)| *l);
                doc.errors.push(format!(
                    "line {line}: unknown gap kind '{kind}' (expected constant | linear_slider | cosine_bump | table)"
                ));
            }
            Some(keys) => {
                doc.reject_unknown("gap", keys);
                let is_table = kind == "table";
                length = doc.number("gap", "length", !is_table);
                shape = match kind.as_str() {
                    "constant" => doc
                        .number("gap", "h", true)
                        .map(|h| GapShape::Constant { h }),
                    "linear_slider" => {
                        let (h1, h2) =
                            (doc.number("gap", "h1", true), doc.number("gap", "h2", true));
                        h1.zip(h2).map(|(h1, h2)| GapShape::LinearSlider { h1, h2 })
                    }
                    "cosine_bump" => {
                        let (b, a) = (
                            doc.number("gap", "base", true),
                            doc.number("gap", "amplitude", true),
                        );
                        b.zip(a)
                            .map(|(base, amplitude)| GapShape::CosineBump { base, amplitude })
                    }
                    _ => {
                        let (xs, hs) = (doc.list("gap", "xs", true), doc.list("gap", "hs", true));
                        if let (Some(xs), None) = (&xs, length) {
                            length = xs.last().copied();
                        }
                        xs.zip(hs).map(|(xs, hs)| GapShape::Table { xs, hs })
                    }
                };
            }
        }
    }

    let flux = doc.number("flux", "q", false);
    let n = doc.count("grid", "n");
    let m = doc.count("grid", "m");
    let solver = doc.raw("solver", "method").cloned().and_then(|(v, line)| {
        match v.parse::<SolverChoice>() {
            Ok(c) => Some(c),
            Err(e) => {
                doc.errors.push(format!("line {line}: {e}"));
                None
            }
        }
    });
    let dir = doc.raw("output", "dir").map(|(v, _)| PathBuf::from(v));
    let epsilons = doc.list("output", "epsilon", false).unwrap_or_default();

    if !doc.errors.is_empty() {
        return Err(ConfigError::Parse(doc.errors));
    }
    let (Some(nu), Some(r), Some(lambda_star), Some(s), Some(shape), Some(length)) =
        (nu, r, lambda_star, s, shape, length)
    else {
        unreachable!("missing values are reported as parse errors")
    };

    let fluid = FluidParams {
        nu,
        r,
        lambda_star,
        s,
        rho,
    };
    let (n, m) = overrides.grid.unwrap_or((
        n.unwrap_or(thinvisc_core::fields::DEFAULT_GRID),
        m.unwrap_or(thinvisc_core::fields::DEFAULT_GRID),
    ));
    let mut errors = RunConfig::check(&fluid, flux, n, m);
    for e in &epsilons {
        if !(e.is_finite() && *e > 0.0) {
            errors.push(format!("epsilon must be finite and > 0 (got {e})"));
        }
    }
    let gap = match GapProfile::new(length, shape) {
        Ok(g) => Some(g),
        Err(e) => {
            errors.push(e.to_string());
            None
        }
    };
    if !errors.is_empty() {
        return Err(ConfigError::Constraint(errors));
    }
    Ok(CliConfig {
        run: RunConfig {
            fluid,
            gap: gap.expect("gap checked above"),
            flux,
            n,
            m,
            solver: overrides
                .solver
                .or(solver)
                .unwrap_or(SolverChoice::Pointwise),
        },
        out_dir: overrides.out_dir.clone().or(dir),
        epsilons,
    })
}

fn list(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Emit a config that parses back to an identical [`CliConfig`].
pub fn dump_config(cfg: &CliConfig) -> String {
    let run = &cfg.run;
    let f = &run.fluid;
    let mut out = String::new();
    let _ = writeln!(out, "[fluid]");
    let _ = writeln!(
        out,
        "nu = {:?}\nr = {:?}\nlambda_star = {:?}\ns = {:?}\nrho = {:?}",
        f.nu, f.r, f.lambda_star, f.s, f.rho
    );
    let _ = writeln!(out, "\n[gap]");
    match &run.gap.shape {
        GapShape::Constant { h } => {
            let _ = writeln!(
                out,
                "kind = constant\nlength = {:?}\nh = {h:?}",
                run.gap.length
            );
        }
        GapShape::LinearSlider { h1, h2 } => {
            let _ = writeln!(
                out,
                "kind = linear_slider\nlength = {:?}\nh1 = {h1:?}\nh2 = {h2:?}",
                run.gap.length
            );
        }
        GapShape::CosineBump { base, amplitude } => {
            let _ = writeln!(
                out,
                "kind = cosine_bump\nlength = {:?}\nbase = {base:?}\namplitude = {amplitude:?}",
                run.gap.length
            );
        }
        GapShape::Table { xs, hs } => {
            let _ = writeln!(
                out,
                "kind = table\nlength = {:?}\nxs = {}\nhs = {}",
                run.gap.length,
                list(xs),
                list(hs)
            );
        }
    }
    if let Some(q) = run.flux {
        let _ = writeln!(out, "\n[flux]\nq = {q:?}");
    }
    let _ = writeln!(out, "\n[grid]\nn = {}\nm = {}", run.n, run.m);
    let _ = writeln!(out, "\n[solver]\nmethod = {}", run.solver);
    if cfg.out_dir.is_some() || !cfg.epsilons.is_empty() {
        let _ = writeln!(out, "\n[output]");
        if let Some(dir) = &cfg.out_dir {
            let _ = writeln!(out, "dir = {}", dir.display());
        }
        if !cfg.epsilons.is_empty() {
            let _ = writeln!(out, "epsilon = {}", list(&cfg.epsilons));
        }
    }
    out
}
