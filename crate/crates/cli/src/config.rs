//! JSON run configurations and their compilation into solver problems.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use absubdiff_core::fracops::FracOrder;
use absubdiff_core::solver::{
    CompatibilityPolicy, ProblemSpec, SolverConfig, SpaceTimeGrid, Stepper,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse_expr, EvalError, Expr, ParseError, Var};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    Parse {
        field: &'static str,
        source: ParseError,
    },
    #[error("{field} may not depend on {var}")]
    Variable {
        field: &'static str,
        var: &'static str,
    },
    #[error("{field} at ({x}, {t}): {source}")]
    Eval {
        field: &'static str,
        x: f64,
        t: f64,
        source: EvalError,
    },
    #[error("{field} is not finite at ({x}, {t})")]
    NonFinite { field: &'static str, x: f64, t: f64 },
    #[error("{0}")]
    Invalid(String),
    #[error("output directory for {0} does not exist")]
    OutputDir(PathBuf),
}

/// Problem data in textual form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemText {
    pub alpha: f64,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "one")]
    pub t_end: f64,
    pub n_x: usize,
    pub n_t: usize,
    pub phi: String,
    #[serde(default = "zero_text")]
    pub lambda: String,
    #[serde(default = "zero_text")]
    pub mu: String,
    #[serde(default = "zero_text")]
    pub forcing: String,
}

fn one() -> f64 {
    1.0
}

fn zero_text() -> String {
    "0".into()
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub field: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Outputs {
    pub fn paths(&self) -> impl Iterator<Item = &PathBuf> {
        self.field.iter().chain(&self.report).chain(&self.plot)
    }

    /// Resolves relative paths against `base`.
    pub fn rebased(&self, base: &Path) -> Outputs {
        let f = |p: &Option<PathBuf>| p.as_ref().map(|p| base.join(p));
        Outputs {
            field: f(&self.field),
            report: f(&self.report),
            plot: f(&self.plot),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemText,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub alphas: Vec<f64>,
    pub output_dir: PathBuf,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// Slot for the first evaluation error raised inside the solver's forcing
/// callback, which itself can only return a number.
#[derive(Debug, Clone, Default)]
pub struct EvalTrap(Arc<Mutex<Option<EvalError>>>);

impl EvalTrap {
    fn record(&self, e: EvalError) {
        let mut slot = self.0.lock().unwrap_or_else(|p| p.into_inner());
        slot.get_or_insert(e);
    }

    pub fn take(&self) -> Option<EvalError> {
        self.0.lock().unwrap_or_else(|p| p.into_inner()).take()
    }
}

/// A validated run, ready to solve.
#[derive(Debug)]
pub struct Compiled {
    pub problem: ProblemSpec,
    pub trap: EvalTrap,
}

fn parse_field(field: &'static str, src: &str, allowed: &[Var]) -> Result<Expr, ConfigError> {
    let e = parse_expr(src).map_err(|source| ConfigError::Parse { field, source })?;
    for v in [Var::X, Var::T, Var::U] {
        if !allowed.contains(&v) && e.mentions(v) {
            return Err(ConfigError::Variable {
                field,
                var: v.name(),
            });
        }
    }
    Ok(e)
}

fn probe(field: &'static str, e: &Expr, x: f64, t: f64) -> Result<(), ConfigError> {
    match e.eval(x, t, 0.0) {
        Ok(v) if v.is_finite() => Ok(()),
        Ok(_) => Err(ConfigError::NonFinite { field, x, t }),
        Err(source) => Err(ConfigError::Eval {
            field,
            x,
            t,
            source,
        }),
    }
}

impl RunConfig {
    /// Checks every envelope, parses the expressions and evaluates the data
    /// on the grid, so that a run which passes can only fail inside the
    /// solver. Forcing terms that depend on u are evaluated during the solve.
    pub fn compile(&self) -> Result<Compiled, ConfigError> {
        let p = &self.problem;
        let alpha = FracOrder::new(p.alpha).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let grid = SpaceTimeGrid::new(p.a, p.t_end, p.n_x, p.n_t)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let phi = parse_field("phi", &p.phi, &[Var::X])?;
        let lam = parse_field("lambda", &p.lambda, &[Var::T])?;
        let mu = parse_field("mu", &p.mu, &[Var::T])?;
        let forcing = parse_field("forcing", &p.forcing, &[Var::X, Var::T, Var::U])?;
        let linear = !forcing.mentions(Var::U);

        for i in 0..=grid.n_x() {
            probe("phi", &phi, grid.x(i), 0.0)?;
        }
        for n in 0..=grid.n_t() {
            probe("lambda", &lam, 0.0, grid.t(n))?;
            probe("mu", &mu, 0.0, grid.t(n))?;
            if linear {
                for i in 0..=grid.n_x() {
                    probe("forcing", &forcing, grid.x(i), grid.t(n))?;
                }
            }
        }

        let trap = EvalTrap::default();
        let scalar = |e: Expr, var: Var| {
            move |s: f64| {
                let (x, t) = if var == Var::X { (s, 0.0) } else { (0.0, s) };
                e.eval(x, t, 0.0).unwrap_or(f64::NAN)
            }
        };
        let (phi_f, lam_f, mu_f) = (scalar(phi, Var::X), scalar(lam, Var::T), scalar(mu, Var::T));
        let problem = if linear {
            ProblemSpec::linear(alpha, grid, phi_f, lam_f, mu_f, move |x, t| {
                forcing.eval(x, t, 0.0).unwrap_or(f64::NAN)
            })
        } else {
            let trap = trap.clone();
            ProblemSpec::nonlinear(alpha, grid, phi_f, lam_f, mu_f, move |x, t, u| {
                forcing.eval(x, t, u).unwrap_or_else(|e| {
                    trap.record(e);
                    f64::NAN
                })
            })
        };

        Stepper::new(&problem, self.solver).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.solver.compatibility == CompatibilityPolicy::Strict {
            let gap = problem.compatibility_gap();
            if gap > self.solver.compat_threshold {
                return Err(ConfigError::Invalid(format!(
                    "initial and boundary data disagree at a corner by {gap:e}"
                )));
            }
        }
        for path in self.outputs.paths() {
            check_parent(path)?;
        }
        Ok(Compiled { problem, trap })
    }
}

pub fn check_parent(path: &Path) -> Result<(), ConfigError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(ConfigError::OutputDir(path.to_path_buf()))
        }
        _ => Ok(()),
    }
}
