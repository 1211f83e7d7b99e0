//! Implicit solver for u_t = ∂²_x D_*^{1−α}u + F(x, t, u) on (0, a) × (0, T]
//! with u(x, 0) = φ(x), u(0, t) = λ(t), u(a, t) = μ(t).
//!
//! Backward Euler in time, three-point second difference in space. The
//! order-(1−α) AB derivative at t_n is split as g^n = c·u^n + h^n, with the
//! history part h^n built from the same product-integration weights as
//! [`crate::fracops::ab_derivative`], so every step is one tridiagonal solve
//! (repeated inside a Picard loop when F depends on u).

use std::fmt;
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use log::{debug, warn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fracops::{
    ab_derivative_using, rl_derivative_with, AbWeights, FracError, FracOrder, SampledFunction,
    TimeGrid,
};
use crate::par::Exec;

/// Orders closer than this to 0 or 1 are rejected: both 1/(1−β) and λ_β blow up.
pub const ALPHA_MARGIN: f64 = 1e-4;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ForcingFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("alpha = {alpha} must lie in [{lo}, {hi}]", lo = ALPHA_MARGIN, hi = 1.0 - ALPHA_MARGIN)]
    InvalidOrder { alpha: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("initial and boundary data disagree at a corner by {gap:e} (threshold {threshold:e})")]
    Incompatible { gap: f64, threshold: f64 },
    #[error("fixed-point iteration did not converge at time index {time_index} after {iterations} iterations (last difference {last_difference:e})")]
    NonConvergence {
        time_index: usize,
        iterations: usize,
        last_difference: f64,
    },
    #[error("row {row} is not strictly diagonally dominant")]
    DominanceViolation { row: usize },
    #[error("zero pivot in row {row}")]
    Singular { row: usize },
    #[error("field grid {found:?} does not match problem grid {expected:?}")]
    GridMismatch {
        expected: SpaceTimeGrid,
        found: SpaceTimeGrid,
    },
    #[error("non-finite value at x index {x_index}, time index {time_index}")]
    NonFinite { x_index: usize, time_index: usize },
    #[error(transparent)]
    Frac(#[from] FracError),
}

/// Nodes x_i = i·a/n_x, t_n = n·T/n_t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid {
    a: f64,
    t_end: f64,
    n_x: usize,
    n_t: usize,
}

impl SpaceTimeGrid {
    pub fn new(a: f64, t_end: f64, n_x: usize, n_t: usize) -> Result<Self, SolverError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(SolverError::InvalidGrid(format!(
                "a = {a} must be positive"
            )));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(SolverError::InvalidGrid(format!(
                "t_end = {t_end} must be positive"
            )));
        }
        if n_x < 3 {
            return Err(SolverError::InvalidGrid(format!(
                "n_x = {n_x} must be at least 3"
            )));
        }
        if n_t < 2 {
            return Err(SolverError::InvalidGrid(format!(
                "n_t = {n_t} must be at least 2"
            )));
        }
        Ok(Self { a, t_end, n_x, n_t })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn dx(&self) -> f64 {
        self.a / self.n_x as f64
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.n_t as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.a / self.n_x as f64
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.t_end / self.n_t as f64
    }

    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid::new(self.t_end, self.n_t).expect("validated by construction")
    }
}

/// Data of one initial-boundary value problem.
#[derive(Clone)]
pub struct ProblemSpec {
    pub alpha: FracOrder,
    pub grid: SpaceTimeGrid,
    pub phi: ScalarFn,
    pub lam: ScalarFn,
    pub mu: ScalarFn,
    pub forcing: ForcingFn,
    /// True when the forcing ignores its u argument.
    pub linear_flag: bool,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("alpha", &self.alpha)
            .field("grid", &self.grid)
            .field("linear_flag", &self.linear_flag)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn linear(
        alpha: FracOrder,
        grid: SpaceTimeGrid,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lam: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mu: impl Fn(f64) -> f64 + Send + Sync + 'static,
        forcing: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            alpha,
            grid,
            phi: Arc::new(phi),
            lam: Arc::new(lam),
            mu: Arc::new(mu),
            forcing: Arc::new(move |x, t, _| forcing(x, t)),
            linear_flag: true,
        }
    }

    pub fn nonlinear(
        alpha: FracOrder,
        grid: SpaceTimeGrid,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lam: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mu: impl Fn(f64) -> f64 + Send + Sync + 'static,
        forcing: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            alpha,
            grid,
            phi: Arc::new(phi),
            lam: Arc::new(lam),
            mu: Arc::new(mu),
            forcing: Arc::new(forcing),
            linear_flag: false,
        }
    }

    /// Same problem with different initial data.
    pub fn with_phi(&self, phi: ScalarFn) -> Self {
        Self {
            phi,
            ..self.clone()
        }
    }

    /// Largest corner mismatch max(|φ(0) − λ(0)|, |φ(a) − μ(0)|).
    pub fn compatibility_gap(&self) -> f64 {
        let left = ((self.phi)(0.0) - (self.lam)(0.0)).abs();
        let right = ((self.phi)(self.grid.a) - (self.mu)(0.0)).abs();
        left.max(right)
    }

    /// Largest decrease of λ or μ between consecutive time nodes; the
    /// boundary data are nondecreasing on the grid iff this is ≤ 0.
    pub fn boundary_decrease(&self) -> f64 {
        let g = self.grid;
        let mut worst = f64::NEG_INFINITY;
        for n in 1..=g.n_t {
            for b in [&self.lam, &self.mu] {
                worst = worst.max(b(g.t(n - 1)) - b(g.t(n)));
            }
        }
        worst
    }
}

/// Solution values u(x_i, t_n), stored row-major by time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: SpaceTimeGrid,
    values: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum FieldIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("data do not form a uniform grid: {0}")]
    Shape(String),
}

impl Field {
    pub fn zeros(grid: SpaceTimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; (grid.n_x + 1) * (grid.n_t + 1)],
        }
    }

    pub fn grid(&self) -> SpaceTimeGrid {
        self.grid
    }

    fn idx(&self, i: usize, n: usize) -> usize {
        n * (self.grid.n_x + 1) + i
    }

    pub fn get(&self, i: usize, n: usize) -> f64 {
        self.values[self.idx(i, n)]
    }

    pub fn set(&mut self, i: usize, n: usize, v: f64) {
        let k = self.idx(i, n);
        self.values[k] = v;
    }

    /// Time row n (all spatial nodes).
    pub fn row(&self, n: usize) -> &[f64] {
        let w = self.grid.n_x + 1;
        &self.values[n * w..(n + 1) * w]
    }

    /// Time trace of spatial node i.
    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..=self.grid.n_t).map(|n| self.get(i, n)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// sup over common nodes of |self − other|; the grids must match.
    pub fn sup_distance(&self, other: &Field) -> Result<f64, SolverError> {
        if self.grid != other.grid {
            return Err(SolverError::GridMismatch {
                expected: self.grid,
                found: other.grid,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Restriction to a coarser grid whose nodes are a subset of this one's.
    pub fn restrict(&self, coarse: SpaceTimeGrid) -> Result<Field, SolverError> {
        let g = self.grid;
        let mismatch = || SolverError::GridMismatch {
            expected: g,
            found: coarse,
        };
        if coarse.a != g.a || coarse.t_end != g.t_end {
            return Err(mismatch());
        }
        if !g.n_x.is_multiple_of(coarse.n_x) || !g.n_t.is_multiple_of(coarse.n_t) {
            return Err(mismatch());
        }
        let (sx, st) = (g.n_x / coarse.n_x, g.n_t / coarse.n_t);
        let mut out = Field::zeros(coarse);
        for n in 0..=coarse.n_t {
            for i in 0..=coarse.n_x {
                out.set(i, n, self.get(i * sx, n * st));
            }
        }
        Ok(out)
    }

    /// CSV with header `x,t,u`, one row per node, time-major, 17 significant
    /// digits, LF line endings.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,t,u")?;
        for n in 0..=self.grid.n_t {
            let t = self.grid.t(n);
            for i in 0..=self.grid.n_x {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e}",
                    self.grid.x(i),
                    t,
                    self.get(i, n)
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Inverse of [`Field::write_csv`]; the grid is recovered from the node
    /// coordinates and must reproduce them exactly.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Field, FieldIoError> {
        let mut rows: Vec<[f64; 3]> = Vec::new();
        for (k, line) in r.lines().enumerate() {
            let line = line?;
            let line_no = k + 1;
            if k == 0 {
                if line.trim() != "x,t,u" {
                    return Err(FieldIoError::Parse {
                        line: 1,
                        message: format!("expected header x,t,u, found {line:?}"),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = [0.0; 3];
            let mut fields = line.split(',');
            for slot in parts.iter_mut() {
                let s = fields.next().ok_or_else(|| FieldIoError::Parse {
                    line: line_no,
                    message: "expected three columns".into(),
                })?;
                *slot = s.trim().parse().map_err(|e| FieldIoError::Parse {
                    line: line_no,
                    message: format!("{s:?}: {e}"),
                })?;
            }
            if fields.next().is_some() {
                return Err(FieldIoError::Parse {
                    line: line_no,
                    message: "expected three columns".into(),
                });
            }
            rows.push(parts);
        }
        let first_t = rows
            .first()
            .map(|r| r[1])
            .ok_or_else(|| FieldIoError::Shape("no data".into()))?;
        let width = rows.iter().take_while(|r| r[1] == first_t).count();
        if width < 4 || !rows.len().is_multiple_of(width) {
            return Err(FieldIoError::Shape(format!(
                "{} rows cannot be split into time rows of {width}",
                rows.len()
            )));
        }
        let n_x = width - 1;
        let n_t = rows.len() / width - 1;
        let a = rows[n_x][0];
        let t_end = rows[rows.len() - 1][1];
        let grid = SpaceTimeGrid::new(a, t_end, n_x, n_t)
            .map_err(|e| FieldIoError::Shape(e.to_string()))?;
        let mut field = Field::zeros(grid);
        for (k, r) in rows.iter().enumerate() {
            let (n, i) = (k / width, k % width);
            if r[0] != grid.x(i) || r[1] != grid.t(n) {
                return Err(FieldIoError::Shape(format!(
                    "data row {} has coordinates ({}, {}), expected ({}, {})",
                    k + 1,
                    r[0],
                    r[1],
                    grid.x(i),
                    grid.t(n)
                )));
            }
            field.set(i, n, r[2]);
        }
        Ok(field)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialGuess {
    /// Start the fixed-point iteration from the previous time row.
    #[default]
    Previous,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompatibilityPolicy {
    #[default]
    Warn,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub picard_tol: f64,
    pub picard_max: usize,
    pub damping: f64,
    pub initial_guess: InitialGuess,
    pub compatibility: CompatibilityPolicy,
    pub compat_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            picard_tol: 1e-10,
            picard_max: 100,
            damping: 1.0,
            initial_guess: InitialGuess::Previous,
            compatibility: CompatibilityPolicy::Warn,
            compat_threshold: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.picard_tol > 0.0 && self.picard_tol.is_finite()) {
            return Err(SolverError::InvalidConfig(format!(
                "picard_tol = {} must be positive",
                self.picard_tol
            )));
        }
        if self.picard_max < 1 {
            return Err(SolverError::InvalidConfig(
                "picard_max must be at least 1".into(),
            ));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(SolverError::InvalidConfig(format!(
                "damping = {} must lie in (0, 1]",
                self.damping
            )));
        }
        if !(self.compat_threshold >= 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "compat_threshold = {} must be nonnegative",
                self.compat_threshold
            )));
        }
        Ok(())
    }
}

fn check_order(alpha: FracOrder) -> Result<(), SolverError> {
    let a = alpha.value();
    if (ALPHA_MARGIN..=1.0 - ALPHA_MARGIN).contains(&a) {
        Ok(())
    } else {
        Err(SolverError::InvalidOrder { alpha: a })
    }
}

/// Weights of the order β = 1−α AB derivative on step `dt` (rate
/// λ_β = (1−α)/α). The current-step coefficient c_β = P_β(Δt)/(αΔt) is
/// [`AbWeights::current_coefficient`].
pub fn history_weights(alpha: FracOrder, n_t: usize, dt: f64) -> Result<AbWeights, SolverError> {
    check_order(alpha)?;
    Ok(AbWeights::new(alpha.complement(), dt, n_t)?)
}

/// Thomas algorithm for a strictly diagonally dominant tridiagonal system.
/// `lower[0]` and `upper[m−1]` are ignored.
pub fn tridiagonal_solve(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>, SolverError> {
    let m = diag.len();
    assert!(
        lower.len() == m && upper.len() == m && rhs.len() == m,
        "tridiagonal bands must have equal length"
    );
    for i in 0..m {
        let l = if i > 0 { lower[i].abs() } else { 0.0 };
        let u = if i + 1 < m { upper[i].abs() } else { 0.0 };
        if !(diag[i].abs() > l + u) {
            return Err(SolverError::DominanceViolation { row: i });
        }
    }
    let mut cp = vec![0.0; m];
    let mut dp = vec![0.0; m];
    for i in 0..m {
        let (l, prev_c, prev_d) = if i > 0 {
            (lower[i], cp[i - 1], dp[i - 1])
        } else {
            (0.0, 0.0, 0.0)
        };
        let pivot = diag[i] - l * prev_c;
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(SolverError::Singular { row: i });
        }
        cp[i] = if i + 1 < m { upper[i] / pivot } else { 0.0 };
        dp[i] = (rhs[i] - l * prev_d) / pivot;
    }
    let mut x = dp;
    for i in (0..m.saturating_sub(1)).rev() {
        x[i] -= cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Per-run statistics.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveStats {
    /// Fixed-point iterations per time step (0 for linear steps).
    pub picard_iterations: Vec<usize>,
}

impl SolveStats {
    pub fn max_picard(&self) -> usize {
        self.picard_iterations.iter().copied().max().unwrap_or(0)
    }
}

/// Solves for one time row given the split g = c·u + h at that row.
fn implicit_row(
    problem: &ProblemSpec,
    config: &SolverConfig,
    field: &mut Field,
    n: usize,
    c: f64,
    h: &[f64],
) -> Result<usize, SolverError> {
    let g = problem.grid;
    let nx = g.n_x;
    let (dt, dx2) = (g.dt(), g.dx() * g.dx());
    let t = g.t(n);
    let left = (problem.lam)(t);
    let right = (problem.mu)(t);
    field.set(0, n, left);
    field.set(nx, n, right);

    let m = nx - 1;
    let off = -c / dx2;
    let diag = vec![1.0 / dt + 2.0 * c / dx2; m];
    let band = vec![off; m];
    let known: Vec<f64> = (1..nx)
        .map(|i| {
            let mut k = field.get(i, n - 1) / dt + (h[i - 1] - 2.0 * h[i] + h[i + 1]) / dx2;
            if i == 1 {
                k += c * left / dx2;
            }
            if i == nx - 1 {
                k += c * right / dx2;
            }
            k
        })
        .collect();
    let xs: Vec<f64> = (1..nx).map(|i| g.x(i)).collect();
    let solve_with = |guess: &[f64]| -> Result<Vec<f64>, SolverError> {
        let rhs: Vec<f64> = (0..m)
            .map(|k| known[k] + (problem.forcing)(xs[k], t, guess[k]))
            .collect();
        tridiagonal_solve(&band, &diag, &band, &rhs)
    };
    let check_finite = |v: &[f64]| -> Result<(), SolverError> {
        match v.iter().position(|x| !x.is_finite()) {
            Some(k) => Err(SolverError::NonFinite {
                x_index: k + 1,
                time_index: n,
            }),
            None => Ok(()),
        }
    };

    let mut guess: Vec<f64> = match config.initial_guess {
        InitialGuess::Previous => field.row(n - 1)[1..nx].to_vec(),
        InitialGuess::Zero => vec![0.0; m],
    };
    let (values, iterations) = if problem.linear_flag {
        (solve_with(&guess)?, 0)
    } else {
        let mut last = f64::INFINITY;
        let mut found = None;
        for it in 1..=config.picard_max {
            let next = solve_with(&guess)?;
            check_finite(&next)?;
            last = next
                .iter()
                .zip(&guess)
                .fold(0.0, |d, (a, b)| f64::max(d, (a - b).abs()));
            if last <= config.picard_tol {
                found = Some((next, it));
                break;
            }
            let w = config.damping;
            for (g_k, v_k) in guess.iter_mut().zip(&next) {
                *g_k = (1.0 - w) * *g_k + w * v_k;
            }
        }
        found.ok_or(SolverError::NonConvergence {
            time_index: n,
            iterations: config.picard_max,
            last_difference: last,
        })?
    };
    check_finite(&values)?;
    for (k, v) in values.into_iter().enumerate() {
        field.set(k + 1, n, v);
    }
    if !(left.is_finite() && right.is_finite()) {
        return Err(SolverError::NonFinite {
            x_index: if left.is_finite() { nx } else { 0 },
            time_index: n,
        });
    }
    Ok(iterations)
}

/// Time stepper holding the weight table of one problem.
#[derive(Debug, Clone)]
pub struct Stepper<'p> {
    problem: &'p ProblemSpec,
    config: SolverConfig,
    weights: AbWeights,
}

impl<'p> Stepper<'p> {
    pub fn new(problem: &'p ProblemSpec, config: SolverConfig) -> Result<Self, SolverError> {
        config.validate()?;
        let g = problem.grid;
        let weights = history_weights(problem.alpha, g.n_t, g.dt())?;
        Ok(Self {
            problem,
            config,
            weights,
        })
    }

    pub fn weights(&self) -> &AbWeights {
        &self.weights
    }

    /// Diagonal and off-diagonal entries of every step matrix.
    pub fn system_coefficients(&self) -> (f64, f64) {
        let g = self.problem.grid;
        let c = self.weights.current_coefficient();
        let dx2 = g.dx() * g.dx();
        (1.0 / g.dt() + 2.0 * c / dx2, -c / dx2)
    }

    /// Fills time row n ≥ 1 from rows 0..n; returns the number of
    /// fixed-point iterations used.
    pub fn step(&self, field: &mut Field, n: usize) -> Result<usize, SolverError> {
        let g = self.problem.grid;
        if field.grid != g {
            return Err(SolverError::GridMismatch {
                expected: g,
                found: field.grid,
            });
        }
        assert!(n >= 1 && n <= g.n_t, "time index {n} out of range");
        let w = &self.weights;
        let c = w.current_coefficient();
        let inv = 1.0 / self.problem.alpha.value();
        // g^n = inv Σ_{j<n} (u^{j+1} − u^j) w_{n−j}; the j = n−1 term is c(u^n − u^{n−1})
        let h: Vec<f64> = (0..=g.n_x)
            .map(|i| {
                let mut acc = 0.0;
                let mut prev = field.get(i, 0);
                for j in 0..n - 1 {
                    let next = field.get(i, j + 1);
                    acc += (next - prev) * w.weight(n - j);
                    prev = next;
                }
                inv * acc - c * prev
            })
            .collect();
        implicit_row(self.problem, &self.config, field, n, c, &h)
    }
}

/// Fills time row n of `state` (rows 0..n must be final). Builds the weight
/// table on every call; [`Stepper`] amortizes it.
pub fn step(
    problem: &ProblemSpec,
    config: &SolverConfig,
    state: &mut Field,
    n: usize,
) -> Result<usize, SolverError> {
    Stepper::new(problem, *config)?.step(state, n)
}

fn initial_field(problem: &ProblemSpec, config: &SolverConfig) -> Result<Field, SolverError> {
    config.validate()?;
    check_order(problem.alpha)?;
    let gap = problem.compatibility_gap();
    if gap > config.compat_threshold {
        match config.compatibility {
            CompatibilityPolicy::Strict => {
                return Err(SolverError::Incompatible {
                    gap,
                    threshold: config.compat_threshold,
                })
            }
            CompatibilityPolicy::Warn => warn!(
                "initial and boundary data disagree at a corner by {gap:e}; corners take the initial value"
            ),
        }
    }
    let g = problem.grid;
    let mut field = Field::zeros(g);
    for i in 0..=g.n_x {
        let v = (problem.phi)(g.x(i));
        if !v.is_finite() {
            return Err(SolverError::NonFinite {
                x_index: i,
                time_index: 0,
            });
        }
        field.set(i, 0, v);
    }
    Ok(field)
}

pub fn solve(problem: &ProblemSpec, config: &SolverConfig) -> Result<Field, SolverError> {
    solve_with_stats(problem, config).map(|(f, _)| f)
}

pub fn solve_with_stats(
    problem: &ProblemSpec,
    config: &SolverConfig,
) -> Result<(Field, SolveStats), SolverError> {
    let mut field = initial_field(problem, config)?;
    let stepper = Stepper::new(problem, *config)?;
    let mut stats = SolveStats::default();
    for n in 1..=problem.grid.n_t {
        stats.picard_iterations.push(stepper.step(&mut field, n)?);
    }
    debug!(
        "solved {}x{} grid, max fixed-point iterations {}",
        problem.grid.n_x,
        problem.grid.n_t,
        stats.max_picard()
    );
    Ok((field, stats))
}

fn ensure_grid(field: &Field, problem: &ProblemSpec) -> Result<(), SolverError> {
    if field.grid != problem.grid {
        return Err(SolverError::GridMismatch {
            expected: problem.grid,
            found: field.grid,
        });
    }
    Ok(())
}

/// Order-(1−α) AB derivative of every column's time trace, computed
/// independently of the solver's split form.
pub fn compute_w(field: &Field, alpha: FracOrder) -> Result<Field, SolverError> {
    compute_w_with(field, alpha, Exec::default())
}

pub fn compute_w_with(field: &Field, alpha: FracOrder, exec: Exec) -> Result<Field, SolverError> {
    let g = field.grid;
    let tg = g.time_grid();
    let weights = AbWeights::new(alpha.complement(), g.dt(), g.n_t)?;
    let columns = exec.map_range(g.n_x + 1, |i| {
        let col = SampledFunction::new(tg, field.column(i))?;
        Ok(ab_derivative_using(&col, &weights, Exec::Sequential).into_values())
    });
    let mut w = Field::zeros(g);
    for (i, col) in columns.into_iter().enumerate() {
        let col: Vec<f64> = col.map_err(SolverError::Frac)?;
        for (n, v) in col.into_iter().enumerate() {
            w.set(i, n, v);
        }
    }
    Ok(w)
}

/// sup over interior nodes with n ≥ 2 of |u_t − δ²_x D_*^{1−α}u − F|.
pub fn residual(field: &Field, problem: &ProblemSpec) -> Result<f64, SolverError> {
    residual_with(field, problem, Exec::default())
}

pub fn residual_with(field: &Field, problem: &ProblemSpec, exec: Exec) -> Result<f64, SolverError> {
    ensure_grid(field, problem)?;
    let w = compute_w_with(field, problem.alpha, exec)?;
    let g = problem.grid;
    let (dt, dx2) = (g.dt(), g.dx() * g.dx());
    let rows = exec.map_range(g.n_t + 1, |n| {
        if n < 2 {
            return 0.0;
        }
        let t = g.t(n);
        (1..g.n_x)
            .map(|i| {
                let u = field.get(i, n);
                let ut = (u - field.get(i, n - 1)) / dt;
                let lap = (w.get(i - 1, n) - 2.0 * w.get(i, n) + w.get(i + 1, n)) / dx2;
                (ut - lap - (problem.forcing)(g.x(i), t, u)).abs()
            })
            .fold(0.0, f64::max)
    });
    Ok(rows.into_iter().fold(0.0, f64::max))
}

/// Residual of the equation satisfied by w = D_*^{1−α}u,
/// α w_t + (1−α) D^α w − w_xx − F, with D^α the discrete Riemann-Liouville
/// derivative; sup over interior nodes with n ≥ 2. A loose consistency
/// diagnostic, first order in Δt.
pub fn pr_w_residual(field: &Field, w: &Field, problem: &ProblemSpec) -> Result<f64, SolverError> {
    ensure_grid(field, problem)?;
    ensure_grid(w, problem)?;
    let g = problem.grid;
    let a = problem.alpha.value();
    let tg = g.time_grid();
    let (dt, dx2) = (g.dt(), g.dx() * g.dx());
    let rl: Vec<Vec<f64>> = (0..=g.n_x)
        .map(|i| {
            let col = SampledFunction::new(tg, w.column(i))?;
            Ok(rl_derivative_with(&col, problem.alpha, Exec::Sequential).to_vec_with_nan())
        })
        .collect::<Result<_, FracError>>()?;
    let mut worst = 0.0f64;
    for n in 2..=g.n_t {
        let t = g.t(n);
        for i in 1..g.n_x {
            let wt = (w.get(i, n) - w.get(i, n - 1)) / dt;
            let lap = (w.get(i - 1, n) - 2.0 * w.get(i, n) + w.get(i + 1, n)) / dx2;
            let f = (problem.forcing)(g.x(i), t, field.get(i, n));
            worst = worst.max((a * wt + (1.0 - a) * rl[i][n] - lap - f).abs());
        }
    }
    Ok(worst)
}

/// Comparison of a run with the limiting local equation u_t = ∂²_x(u − φ) + F,
/// which the order-(1−α) derivative approaches as α → 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatLimitReport {
    pub alpha: f64,
    pub sup_gap: f64,
}

/// Backward-Euler solve of u_t = ∂²_x(u − u(·, 0)) + F on the problem's grid.
pub fn solve_heat_limit(
    problem: &ProblemSpec,
    config: &SolverConfig,
) -> Result<Field, SolverError> {
    let mut field = initial_field(problem, config)?;
    let h: Vec<f64> = field.row(0).iter().map(|v| -v).collect();
    for n in 1..=problem.grid.n_t {
        implicit_row(problem, config, &mut field, n, 1.0, &h)?;
    }
    Ok(field)
}

/// Solves `problem` and its local limit and reports their sup distance. Not a
/// pass/fail check.
pub fn heat_limit_diagnostic(
    problem: &ProblemSpec,
    config: &SolverConfig,
) -> Result<HeatLimitReport, SolverError> {
    let frac = solve(problem, config)?;
    let local = solve_heat_limit(problem, config)?;
    Ok(HeatLimitReport {
        alpha: problem.alpha.value(),
        sup_gap: frac.sup_distance(&local)?,
    })
}
