//! Maximum principles, uniqueness and continuous dependence as experiments on
//! solver output.
//!
//! Every check audits its hypotheses on the actual grid data before judging
//! the conclusion; a report whose hypotheses fail is marked not applicable
//! instead of failed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fracops::FracOrder;
use crate::par::Exec;
use crate::report::{CheckReport, Hypothesis};
use crate::solver::{
    solve, Field, InitialGuess, ProblemSpec, ScalarFn, SolverConfig, SolverError, SpaceTimeGrid,
};

/// Default absolute allowance on bounds the discrete scheme enforces exactly.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Step of the central differences used to audit monotonicity of F in u.
pub const AUDIT_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "T3.1")]
    T3_1,
    #[serde(rename = "T3.2")]
    T3_2,
    C1,
    C2,
    #[serde(rename = "T3.3")]
    T3_3,
    #[serde(rename = "T3.4")]
    T3_4,
    #[serde(rename = "T4.1")]
    T4_1,
    #[serde(rename = "T4.2")]
    T4_2,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::T3_1,
        TheoremId::T3_2,
        TheoremId::C1,
        TheoremId::C2,
        TheoremId::T3_3,
        TheoremId::T3_4,
        TheoremId::T4_1,
        TheoremId::T4_2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T3_1 => "T3.1",
            TheoremId::T3_2 => "T3.2",
            TheoremId::C1 => "C1",
            TheoremId::C2 => "C2",
            TheoremId::T3_3 => "T3.3",
            TheoremId::T3_4 => "T3.4",
            TheoremId::T4_1 => "T4.1",
            TheoremId::T4_2 => "T4.2",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let known: Vec<&str> = TheoremId::ALL.iter().map(|i| i.as_str()).collect();
                format!(
                    "unknown theorem id {s:?}; expected one of {}",
                    known.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Nonneg,
    Nonpos,
}

fn grid_hypothesis(problem: &ProblemSpec, field: &Field) -> Hypothesis {
    let same = problem.grid == field.grid();
    Hypothesis::new("field on problem grid", same, if same { 0.0 } else { 1.0 })
}

/// Runs `f` over every node (x_i, t_n, u_i^n) of the field.
fn over_nodes(problem: &ProblemSpec, field: &Field, mut f: impl FnMut(f64, f64, f64)) {
    let g = problem.grid;
    for n in 0..=g.n_t() {
        let t = g.t(n);
        for (i, &u) in field.row(n).iter().enumerate() {
            f(g.x(i), t, u);
        }
    }
}

/// max |F(x, t, u) − F(x, t, 0)| over the nodes: zero iff F ignores u there.
fn audit_u_independent(problem: &ProblemSpec, fields: &[&Field]) -> Hypothesis {
    let mut worst = 0.0f64;
    for field in fields {
        over_nodes(problem, field, |x, t, u| {
            let d = (problem.forcing)(x, t, u) - (problem.forcing)(x, t, 0.0);
            worst = worst.max(d.abs());
        });
    }
    Hypothesis::new(
        "F independent of u",
        problem.linear_flag && worst == 0.0,
        worst,
    )
}

fn audit_forcing_sign(problem: &ProblemSpec, field: &Field, sign: Sign) -> Hypothesis {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    over_nodes(problem, field, |x, t, u| {
        let v = (problem.forcing)(x, t, u);
        lo = lo.min(v);
        hi = hi.max(v);
    });
    match sign {
        Sign::Nonneg => Hypothesis::new("F >= 0 on nodes", lo >= 0.0, lo),
        Sign::Nonpos => Hypothesis::new("F <= 0 on nodes", hi <= 0.0, hi),
    }
}

fn audit_boundary_nondecreasing(problem: &ProblemSpec) -> Hypothesis {
    let d = problem.boundary_decrease();
    Hypothesis::new("lambda, mu nondecreasing on nodes", d <= 0.0, d)
}

fn boundary_sup(problem: &ProblemSpec) -> f64 {
    let g = problem.grid;
    (0..=g.n_t())
        .map(|n| (problem.lam)(g.t(n)).abs().max((problem.mu)(g.t(n)).abs()))
        .fold(0.0, f64::max)
}

fn audit_homogeneous_boundary(problem: &ProblemSpec) -> Hypothesis {
    let s = boundary_sup(problem);
    Hypothesis::new("lambda = mu = 0 on nodes", s == 0.0, s)
}

fn audit_zero_initial(problem: &ProblemSpec) -> Hypothesis {
    let g = problem.grid;
    let s = (0..=g.n_x())
        .map(|i| (problem.phi)(g.x(i)).abs())
        .fold(0.0, f64::max);
    Hypothesis::new("phi = 0 on nodes", s == 0.0, s)
}

/// Largest central-difference slope ∂F/∂u over the values the fields take.
fn audit_nonincreasing_in_u(problem: &ProblemSpec, fields: &[&Field]) -> Hypothesis {
    let mut worst = f64::NEG_INFINITY;
    for field in fields {
        over_nodes(problem, field, |x, t, u| {
            let up = (problem.forcing)(x, t, u + AUDIT_STEP);
            let down = (problem.forcing)(x, t, u - AUDIT_STEP);
            worst = worst.max((up - down) / (2.0 * AUDIT_STEP));
        });
    }
    Hypothesis::new("F nonincreasing in u", worst <= 0.0, worst)
}

fn data_extremes(problem: &ProblemSpec) -> (f64, f64) {
    let g = problem.grid;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for n in 0..=g.n_t() {
        for v in [(problem.lam)(g.t(n)), (problem.mu)(g.t(n))] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    for i in 0..=g.n_x() {
        let v = (problem.phi)(g.x(i));
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Lower bound: with F ≥ 0, F independent of u and λ, μ nondecreasing,
/// u ≥ min{λ, μ, φ} over the grid.
pub fn min_bound_check(problem: &ProblemSpec, field: &Field, tol: f64) -> CheckReport {
    let hyps = vec![
        grid_hypothesis(problem, field),
        audit_u_independent(problem, &[field]),
        audit_forcing_sign(problem, field, Sign::Nonneg),
        audit_boundary_nondecreasing(problem),
    ];
    let (m, _) = data_extremes(problem);
    let measured = field.min();
    let slack = measured - m;
    CheckReport::new(
        TheoremId::T3_1.as_str(),
        hyps,
        m,
        measured,
        slack,
        slack >= -tol,
    )
}

/// Upper bound: with F ≤ 0, F independent of u and λ, μ nondecreasing,
/// u ≤ max{λ, μ, φ} over the grid.
pub fn max_bound_check(problem: &ProblemSpec, field: &Field, tol: f64) -> CheckReport {
    let hyps = vec![
        grid_hypothesis(problem, field),
        audit_u_independent(problem, &[field]),
        audit_forcing_sign(problem, field, Sign::Nonpos),
        audit_boundary_nondecreasing(problem),
    ];
    let (_, m) = data_extremes(problem);
    let measured = field.max();
    let slack = m - measured;
    CheckReport::new(
        TheoremId::T3_2.as_str(),
        hyps,
        m,
        measured,
        slack,
        slack >= -tol,
    )
}

/// With zero initial and boundary data, the solution inherits the sign of F.
pub fn sign_preservation_check(
    problem: &ProblemSpec,
    field: &Field,
    sign: Sign,
    tol: f64,
) -> CheckReport {
    let hyps = vec![
        grid_hypothesis(problem, field),
        audit_u_independent(problem, &[field]),
        audit_zero_initial(problem),
        audit_homogeneous_boundary(problem),
        audit_forcing_sign(problem, field, sign),
    ];
    let (id, measured, slack) = match sign {
        Sign::Nonneg => (TheoremId::C1, field.min(), field.min()),
        Sign::Nonpos => (TheoremId::C2, field.max(), -field.max()),
    };
    CheckReport::new(id.as_str(), hyps, 0.0, measured, slack, slack >= -tol)
}

/// Solves twice with different fixed-point settings; the two fields must agree
/// to 10·max(picard_tol). Linear problems report under T3.3, others under T4.1.
pub fn uniqueness_experiment(
    problem: &ProblemSpec,
    config_a: &SolverConfig,
    config_b: &SolverConfig,
) -> Result<CheckReport, SolverError> {
    let u = solve(problem, config_a)?;
    let v = solve(problem, config_b)?;
    let (id, mut hyps) = if problem.linear_flag {
        (
            TheoremId::T3_3,
            vec![audit_u_independent(problem, &[&u, &v])],
        )
    } else {
        (
            TheoremId::T4_1,
            vec![audit_nonincreasing_in_u(problem, &[&u, &v])],
        )
    };
    let differ =
        config_a.damping != config_b.damping || config_a.initial_guess != config_b.initial_guess;
    hyps.push(Hypothesis::new(
        "iteration settings differ",
        differ,
        (config_a.damping - config_b.damping).abs(),
    ));
    let bound = 10.0 * config_a.picard_tol.max(config_b.picard_tol);
    let measured = u.sup_distance(&v)?;
    Ok(CheckReport::new(
        id.as_str(),
        hyps,
        bound,
        measured,
        bound - measured,
        measured <= bound,
    ))
}

/// Solves with φ and with `phi_alt`; the fields may differ by at most
/// δ = max_i |φ(x_i) − φ_alt(x_i)|. Linear problems (which need homogeneous
/// boundaries) report under T3.4, others under T4.2.
pub fn stability_experiment(
    problem: &ProblemSpec,
    phi_alt: ScalarFn,
    config: &SolverConfig,
    tol: f64,
) -> Result<CheckReport, SolverError> {
    let other = problem.with_phi(phi_alt.clone());
    let u = solve(problem, config)?;
    let v = solve(&other, config)?;
    let (id, hyps) = if problem.linear_flag {
        (
            TheoremId::T3_4,
            vec![
                audit_u_independent(problem, &[&u, &v]),
                audit_homogeneous_boundary(problem),
            ],
        )
    } else {
        (
            TheoremId::T4_2,
            vec![
                audit_nonincreasing_in_u(problem, &[&u, &v]),
                // both runs use the same λ, μ closures
                Hypothesis::new("shared boundary data", true, 0.0),
            ],
        )
    };
    let delta = initial_gap(problem, &phi_alt);
    let measured = u.sup_distance(&v)?;
    Ok(CheckReport::new(
        id.as_str(),
        hyps,
        delta,
        measured,
        delta - measured,
        measured <= delta + tol,
    ))
}

fn initial_gap(problem: &ProblemSpec, phi_alt: &ScalarFn) -> f64 {
    let g = problem.grid;
    (0..=g.n_x())
        .map(|i| ((problem.phi)(g.x(i)) - phi_alt(g.x(i))).abs())
        .fold(0.0, f64::max)
}

/// For a linear problem: (sup|u − ū|, sup of the solution with data φ − φ_alt,
/// zero boundaries and zero forcing). Superposition makes them equal.
pub fn superposition_check(
    problem: &ProblemSpec,
    phi_alt: ScalarFn,
    config: &SolverConfig,
) -> Result<(f64, f64), SolverError> {
    let u = solve(problem, config)?;
    let v = solve(&problem.with_phi(phi_alt.clone()), config)?;
    let phi = problem.phi.clone();
    let diff = ProblemSpec::linear(
        problem.alpha,
        problem.grid,
        move |x| phi(x) - phi_alt(x),
        |_| 0.0,
        |_| 0.0,
        |_, _| 0.0,
    );
    let w = solve(&diff, config)?;
    Ok((u.sup_distance(&v)?, w.sup_norm()))
}

/// What an [`Instance`] checks.
#[derive(Clone)]
pub enum CheckKind {
    MinBound,
    MaxBound,
    Sign(Sign),
    Uniqueness(SolverConfig, SolverConfig),
    Stability(ScalarFn),
}

impl fmt::Debug for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckKind::MinBound => f.write_str("MinBound"),
            CheckKind::MaxBound => f.write_str("MaxBound"),
            CheckKind::Sign(s) => write!(f, "Sign({s:?})"),
            CheckKind::Uniqueness(a, b) => write!(f, "Uniqueness({a:?}, {b:?})"),
            CheckKind::Stability(_) => f.write_str("Stability(..)"),
        }
    }
}

/// A registered experiment: a problem plus the check to run on it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub id: TheoremId,
    pub problem: ProblemSpec,
    pub check: CheckKind,
}

impl Instance {
    pub fn run(&self, config: &SolverConfig, tol: f64) -> Result<CheckReport, SolverError> {
        match &self.check {
            CheckKind::MinBound => Ok(min_bound_check(
                &self.problem,
                &solve(&self.problem, config)?,
                tol,
            )),
            CheckKind::MaxBound => Ok(max_bound_check(
                &self.problem,
                &solve(&self.problem, config)?,
                tol,
            )),
            CheckKind::Sign(s) => Ok(sign_preservation_check(
                &self.problem,
                &solve(&self.problem, config)?,
                *s,
                tol,
            )),
            CheckKind::Uniqueness(a, b) => uniqueness_experiment(&self.problem, a, b),
            CheckKind::Stability(alt) => {
                stability_experiment(&self.problem, alt.clone(), config, tol)
            }
        }
    }
}

/// Second configuration of the uniqueness experiments: damped iteration
/// started from zero.
pub fn alternate_config(base: &SolverConfig) -> SolverConfig {
    SolverConfig {
        damping: 0.5,
        initial_guess: InitialGuess::Zero,
        ..*base
    }
}

fn bump(x: f64) -> f64 {
    4.0 * x * (1.0 - x)
}

/// The registered instances on the unit square with α = 0.5. The first entry
/// for each theorem id forms the canonical suite.
pub fn canonical_instances(n_x: usize, n_t: usize) -> Vec<Instance> {
    let alpha = FracOrder::new(0.5).expect("valid order");
    let g = SpaceTimeGrid::new(1.0, 1.0, n_x, n_t).expect("valid grid");
    let base = SolverConfig::default();
    let alt_phi: ScalarFn = Arc::new(|x| bump(x) + 0.01 * (PI * x).sin());
    let zero = |_: f64| 0.0;
    let mk = |label: &str, id, problem, check| Instance {
        label: label.to_string(),
        id,
        problem,
        check,
    };
    vec![
        mk(
            "min: phi=4x(1-x), lambda=mu=0, F=0",
            TheoremId::T3_1,
            ProblemSpec::linear(alpha, g, bump, zero, zero, |_, _| 0.0),
            CheckKind::MinBound,
        ),
        mk(
            "min: phi=0, lambda=mu=t, F=1",
            TheoremId::T3_1,
            ProblemSpec::linear(alpha, g, zero, |t| t, |t| t, |_, _| 1.0),
            CheckKind::MinBound,
        ),
        mk(
            "min: zero data",
            TheoremId::T3_1,
            ProblemSpec::linear(alpha, g, zero, zero, zero, |_, _| 0.0),
            CheckKind::MinBound,
        ),
        mk(
            "max: phi=sin(pi x), lambda=mu=0, F=0",
            TheoremId::T3_2,
            ProblemSpec::linear(alpha, g, |x| (PI * x).sin(), zero, zero, |_, _| 0.0),
            CheckKind::MaxBound,
        ),
        mk(
            "max: phi=sin(pi x), lambda=mu=0, F=-1",
            TheoremId::T3_2,
            ProblemSpec::linear(alpha, g, |x| (PI * x).sin(), zero, zero, |_, _| -1.0),
            CheckKind::MaxBound,
        ),
        mk(
            "max: zero data",
            TheoremId::T3_2,
            ProblemSpec::linear(alpha, g, zero, zero, zero, |_, _| 0.0),
            CheckKind::MaxBound,
        ),
        mk(
            "sign: F=x(1-x)t",
            TheoremId::C1,
            ProblemSpec::linear(alpha, g, zero, zero, zero, |x, t| x * (1.0 - x) * t),
            CheckKind::Sign(Sign::Nonneg),
        ),
        mk(
            "sign: F=0, nonneg",
            TheoremId::C1,
            ProblemSpec::linear(alpha, g, zero, zero, zero, |_, _| 0.0),
            CheckKind::Sign(Sign::Nonneg),
        ),
        mk(
            "sign: F=-x(1-x)t",
            TheoremId::C2,
            ProblemSpec::linear(alpha, g, zero, zero, zero, |x, t| -x * (1.0 - x) * t),
            CheckKind::Sign(Sign::Nonpos),
        ),
        mk(
            "sign: F=0, nonpos",
            TheoremId::C2,
            ProblemSpec::linear(alpha, g, zero, zero, zero, |_, _| 0.0),
            CheckKind::Sign(Sign::Nonpos),
        ),
        mk(
            "uniqueness: linear, F=x(1-x)t",
            TheoremId::T3_3,
            ProblemSpec::linear(alpha, g, bump, zero, zero, |x, t| x * (1.0 - x) * t),
            CheckKind::Uniqueness(base, alternate_config(&base)),
        ),
        mk(
            "stability: phi=4x(1-x), F=0",
            TheoremId::T3_4,
            ProblemSpec::linear(alpha, g, bump, zero, zero, |_, _| 0.0),
            CheckKind::Stability(alt_phi.clone()),
        ),
        mk(
            "stability: phi=4x(1-x), F=1",
            TheoremId::T3_4,
            ProblemSpec::linear(alpha, g, bump, zero, zero, |_, _| 1.0),
            CheckKind::Stability(alt_phi.clone()),
        ),
        mk(
            "uniqueness: F=-u^3, phi=4x(1-x)",
            TheoremId::T4_1,
            ProblemSpec::nonlinear(alpha, g, bump, zero, zero, |_, _, u| -u * u * u),
            CheckKind::Uniqueness(base, alternate_config(&base)),
        ),
        mk(
            "uniqueness: F=-u, phi=4x(1-x)",
            TheoremId::T4_1,
            ProblemSpec::nonlinear(alpha, g, bump, zero, zero, |_, _, u| -u),
            CheckKind::Uniqueness(base, alternate_config(&base)),
        ),
        mk(
            "stability: F=-u^3, phi=4x(1-x)",
            TheoremId::T4_2,
            ProblemSpec::nonlinear(alpha, g, bump, zero, zero, |_, _, u| -u * u * u),
            CheckKind::Stability(alt_phi),
        ),
    ]
}

/// φ = sin(πx), λ = μ = t, F = 0 on the unit square: every hypothesis of the
/// upper bound holds, yet u(1/2, 1) exceeds max{λ, μ, φ} = 1. Since φ is a
/// stationary solution for constant boundary data, u = φ + v where v is
/// driven upward by the rising boundary values; the upper bound needs
/// nonincreasing λ, μ instead.
pub fn max_bound_counterexample(n_x: usize, n_t: usize) -> Instance {
    let alpha = FracOrder::new(0.5).expect("valid order");
    let g = SpaceTimeGrid::new(1.0, 1.0, n_x, n_t).expect("valid grid");
    Instance {
        label: "max: phi=sin(pi x), lambda=mu=t, F=0 (counterexample)".into(),
        id: TheoremId::T3_2,
        problem: ProblemSpec::linear(alpha, g, |x| (PI * x).sin(), |t| t, |t| t, |_, _| 0.0),
        check: CheckKind::MaxBound,
    }
}

/// One instance per theorem id: the canonical suite.
pub fn canonical_suite(n_x: usize, n_t: usize) -> Vec<Instance> {
    let mut seen = Vec::new();
    canonical_instances(n_x, n_t)
        .into_iter()
        .filter(|inst| {
            if seen.contains(&inst.id) {
                false
            } else {
                seen.push(inst.id);
                true
            }
        })
        .collect()
}

fn coeffs(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// Sine series Σ c_k sin(kπx/a) with the given coefficients.
fn sine_series(c: Vec<f64>, a: f64) -> impl Fn(f64) -> f64 + Send + Sync + Clone + 'static {
    move |x| {
        c.iter()
            .enumerate()
            .map(|(k, ck)| ck * ((k + 1) as f64 * PI * x / a).sin())
            .sum()
    }
}

/// Randomized instances: for every theorem id, `per_theorem` problems with
/// random smooth data drawn to satisfy the hypotheses, α uniform in
/// [0.1, 0.9]. Deterministic in `seed`.
pub fn randomized_instances(
    seed: u64,
    per_theorem: usize,
    n_x: usize,
    n_t: usize,
) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = SpaceTimeGrid::new(1.0, 1.0, n_x, n_t).expect("valid grid");
    let base = SolverConfig::default();
    let mut out = Vec::new();
    for id in TheoremId::ALL {
        for k in 0..per_theorem {
            let alpha = FracOrder::new(rng.gen_range(0.1..=0.9)).expect("inside (0, 1)");
            let phi = sine_series(coeffs(&mut rng, 3), 1.0);
            let offset: f64 = rng.gen_range(-1.0..=1.0);
            let (s1, s2): (f64, f64) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
            let amp: f64 = rng.gen_range(0.0..=2.0);
            let fc = coeffs(&mut rng, 2);
            // nonnegative, smooth, genuinely (x, t)-dependent
            let pos = move |x: f64, t: f64| {
                amp * (1.0 + fc[0] * (PI * x).sin() * t.cos() + fc[1] * x * t).powi(2)
            };
            let pert = sine_series(coeffs(&mut rng, 2), 1.0);
            let delta: f64 = rng.gen_range(0.001..=0.1);
            let label = format!("random {id} #{k} (alpha {:.3})", alpha.value());
            let (problem, check) = match id {
                TheoremId::T3_1 => {
                    let p0 = phi.clone();
                    let phi_b = move |x: f64| p0(x) + offset;
                    let lam = move |t: f64| offset + s1 * t;
                    let mu = move |t: f64| offset + s2 * t;
                    (
                        ProblemSpec::linear(alpha, g, phi_b, lam, mu, pos),
                        CheckKind::MinBound,
                    )
                }
                TheoremId::T3_2 => {
                    // constant boundaries: rising ones break the upper bound, see
                    // `max_bound_counterexample`
                    let p0 = phi.clone();
                    let phi_b = move |x: f64| p0(x) + offset;
                    let neg = move |x, t| -pos(x, t);
                    (
                        ProblemSpec::linear(alpha, g, phi_b, move |_| offset, move |_| offset, neg),
                        CheckKind::MaxBound,
                    )
                }
                TheoremId::C1 => (
                    ProblemSpec::linear(alpha, g, |_| 0.0, |_| 0.0, |_| 0.0, pos),
                    CheckKind::Sign(Sign::Nonneg),
                ),
                TheoremId::C2 => (
                    ProblemSpec::linear(
                        alpha,
                        g,
                        |_| 0.0,
                        |_| 0.0,
                        |_| 0.0,
                        move |x, t| -pos(x, t),
                    ),
                    CheckKind::Sign(Sign::Nonpos),
                ),
                TheoremId::T3_3 => (
                    ProblemSpec::linear(alpha, g, phi, |_| 0.0, |_| 0.0, pos),
                    CheckKind::Uniqueness(base, alternate_config(&base)),
                ),
                TheoremId::T4_1 => (
                    ProblemSpec::nonlinear(
                        alpha,
                        g,
                        phi,
                        |_| 0.0,
                        |_| 0.0,
                        move |_, _, u| -amp * u * u * u - s1 * u,
                    ),
                    CheckKind::Uniqueness(base, alternate_config(&base)),
                ),
                TheoremId::T3_4 | TheoremId::T4_2 => {
                    let p0 = phi.clone();
                    let alt: ScalarFn = Arc::new(move |x| p0(x) + delta * pert(x));
                    let problem = if id == TheoremId::T3_4 {
                        ProblemSpec::linear(alpha, g, phi, |_| 0.0, |_| 0.0, pos)
                    } else {
                        ProblemSpec::nonlinear(
                            alpha,
                            g,
                            phi,
                            |_| 0.0,
                            |_| 0.0,
                            move |_, _, u| -amp * u * u * u - s2 * u,
                        )
                    };
                    (problem, CheckKind::Stability(alt))
                }
            };
            out.push(Instance {
                label,
                id,
                problem,
                check,
            });
        }
    }
    out
}

/// One row of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub label: String,
    #[serde(flatten)]
    pub outcome: SuiteOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SuiteOutcome {
    Report(CheckReport),
    Error {
        theorem_id: TheoremId,
        error: String,
    },
}

impl SuiteEntry {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, SuiteOutcome::Report(r) if r.passed)
    }
}

/// Runs the instances independently (concurrently under [`Exec::Parallel`]).
pub fn run_suite(
    instances: &[Instance],
    config: &SolverConfig,
    tol: f64,
    exec: Exec,
) -> Vec<SuiteEntry> {
    exec.map_slice(instances, |inst| SuiteEntry {
        label: inst.label.clone(),
        outcome: match inst.run(config, tol) {
            Ok(r) => SuiteOutcome::Report(r),
            Err(e) => SuiteOutcome::Error {
                theorem_id: inst.id,
                error: e.to_string(),
            },
        },
    })
}
