use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thinvisc_core::fields::rescale_to_epsilon;
use thinvisc_core::reynolds::max_relative_deviation;
use thinvisc_core::validate::{
    self, field_deviation, oracle_couette, oracle_newtonian, refused, validate_outcome,
    COUETTE_TOL, NEWTONIAN_TOL, ORACLE_EQUIVALENCE_TOL,
};
use thinvisc_core::{Error, LimitFields, RunConfig, SolverChoice, ValidationReport};

use crate::config::{CliConfig, ConfigError};
use crate::output;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Io = 1,
    Parse = 2,
    Constraint = 3,
    Solver = 4,
    Validation = 5,
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CommandError {
    pub fn status(&self) -> Status {
        match self {
            Self::Config(ConfigError::Io { .. } | ConfigError::Parse(_)) => Status::Parse,
            Self::Config(ConfigError::Constraint(_)) => Status::Constraint,
            Self::Solver(e) => match e {
                Error::InvalidParams(_)
                | Error::MonotonicityViolated { .. }
                | Error::RheologyOutOfRange { .. }
                | Error::InvalidGap { .. }
                | Error::InvalidProfile(_)
                | Error::InvalidEpsilon(_)
                | Error::InvalidGrid(_) => Status::Constraint,
                _ => Status::Solver,
            },
            Self::Io { .. } => Status::Io,
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CommandError> {
    std::fs::create_dir_all(dir).map_err(|source| CommandError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|source| CommandError::Io {
        path: path.clone(),
        source,
    })?;
    Ok((path, BufWriter::new(file)))
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<PathBuf, CommandError> {
    let (path, mut w) = create(dir, name)?;
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|source| CommandError::Io {
            path: path.clone(),
            source,
        })?;
    Ok(path)
}

fn out_dir(cfg: &CliConfig) -> PathBuf {
    cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn verdict(report: &ValidationReport) -> Status {
    if report.error.is_some() {
        Status::Solver
    } else if report.verdict {
        Status::Ok
    } else {
        Status::Validation
    }
}

fn write_rescaled(dir: &Path, fields: &LimitFields, epsilon: f64) -> Result<PathBuf, CommandError> {
    let scaled = rescale_to_epsilon(fields, epsilon)?;
    write_file(dir, &output::rescaled_file_name(epsilon), |w| {
        output::write_rescaled_csv(w, &scaled)
    })
}

/// Solve, validate, and write `pressure.csv`, `fields.csv`, `report.json`
/// plus one rescaled field file per configured epsilon.
pub fn cmd_solve(cfg: &CliConfig) -> Result<Status, CommandError> {
    let dir = out_dir(cfg);
    let outcome = match validate::solve(&cfg.run) {
        Ok(o) => o,
        Err(e) => {
            let report = refused(&cfg.run, &e);
            write_file(&dir, "report.json", |w| output::write_report(w, &report))?;
            return Err(e.into());
        }
    };
    let report = validate_outcome(&cfg.run, &outcome)?;
    write_file(&dir, "pressure.csv", |w| {
        output::write_pressure_csv(w, &outcome.primary)
    })?;
    write_file(&dir, "fields.csv", |w| {
        output::write_fields_csv(w, &outcome.fields)
    })?;
    write_file(&dir, "report.json", |w| output::write_report(w, &report))?;
    for &eps in &cfg.epsilons {
        write_rescaled(&dir, &outcome.fields, eps)?;
    }
    for c in report.hard_failures() {
        eprintln!(
            "hard check failed: {} ({:e} > {:e})",
            c.name, c.measured, c.threshold
        );
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(verdict(&report))
}

/// Print the validation report; also write it when an output directory is set.
pub fn cmd_validate(cfg: &CliConfig) -> Result<Status, CommandError> {
    let report = validate::run_all(&cfg.run);
    let stdout = std::io::stdout();
    output::write_report(&mut stdout.lock(), &report).map_err(|source| CommandError::Io {
        path: "<stdout>".into(),
        source,
    })?;
    if let Some(dir) = &cfg.out_dir {
        write_file(dir, "report.json", |w| output::write_report(w, &report))?;
    }
    Ok(verdict(&report))
}

pub fn cmd_rescale(cfg: &CliConfig, epsilon: f64) -> Result<Status, CommandError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon).into());
    }
    let outcome = validate::solve(&cfg.run)?;
    let path = write_rescaled(&out_dir(cfg), &outcome.fields, epsilon)?;
    println!("{}", path.display());
    Ok(Status::Ok)
}

/// Compare the two solvers with each other and with any closed-form oracle
/// that applies to the configuration.
pub fn cmd_oracle_compare(cfg: &CliConfig) -> Result<Status, CommandError> {
    let run = RunConfig {
        solver: SolverChoice::Both,
        ..cfg.run.clone()
    };
    let outcome = validate::solve(&run)?;
    let ode = outcome.secondary.as_ref().expect("both solvers requested");
    let p = &run.fluid;
    let flux = run.flux();
    let mut rows = vec![(
        "ode vs pointwise",
        max_relative_deviation(&ode.q, &outcome.primary.q),
        ORACLE_EQUIVALENCE_TOL,
    )];
    let h0 = run.gap.h(0.0);
    if run.gap.is_constant() && (flux - p.s * h0 / 2.0).abs() <= 1e-14 * p.s.abs().max(1.0) {
        let oracle = oracle_couette(p, h0, run.gap.length, run.n, run.m)?;
        rows.push((
            "couette",
            field_deviation(&outcome.fields, &oracle) / p.s.abs().max(1.0),
            COUETTE_TOL,
        ));
    }
    if p.lambda_star == 0.0 {
        let oracle = oracle_newtonian(&run.gap, p, flux, run.n)?;
        rows.push((
            "newtonian (pointwise)",
            max_relative_deviation(&outcome.primary.q, &oracle.q),
            NEWTONIAN_TOL,
        ));
        rows.push((
            "newtonian (ode)",
            max_relative_deviation(&ode.q, &oracle.q),
            ORACLE_EQUIVALENCE_TOL,
        ));
    }
    let all_pass = rows.iter().all(|(_, m, t)| m <= t);
    let json = serde_json::json!({
        "comparisons": rows
            .iter()
            .map(|(name, m, t)| serde_json::json!({ "name": name, "measured": m, "threshold": t, "pass": m <= t }))
            .collect::<Vec<_>>(),
        "pass": all_pass,
    });
    let text = serde_json::to_string_pretty(&json).expect("json values serialize");
    println!("{text}");
    if let Some(dir) = &cfg.out_dir {
        write_file(dir, "oracle.json", |w| writeln!(w, "{text}"))?;
    }
    Ok(if all_pass {
        Status::Ok
    } else {
        Status::Validation
    })
}
