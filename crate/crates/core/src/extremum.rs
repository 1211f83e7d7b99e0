//! Extremum lemmas for the Riemann-Liouville and Atangana-Baleanu derivatives,
//! checked on sampled functions.
//!
//! Both discrete derivatives are the exact derivatives of the piecewise-linear
//! interpolant, so the inequalities hold up to rounding; the tolerances only
//! guard against that.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::fracops::{rl_derivative_with, AbWeights, FracOrder, SampledFunction, TimeGrid};
use crate::mlf::MlParams;
use crate::par::Exec;
use crate::special::rgamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumReport {
    pub location_index: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs − rhs for maxima, rhs − lhs for minima.
    pub slack: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtremumError {
    #[error("maximum is only attained at the endpoint node {index} of 0..={n_steps}")]
    BoundaryMaximum { index: usize, n_steps: usize },
}

/// Default RL allowance 10·Δt.
pub fn rl_default_tol(grid: TimeGrid) -> f64 {
    10.0 * grid.dt()
}

/// Default AB allowance 5·Δt² + 1e-9.
pub fn ab_default_tol(grid: TimeGrid) -> f64 {
    5.0 * grid.dt() * grid.dt() + 1e-9
}

fn first_index_of(values: &[f64], target: f64, range: std::ops::Range<usize>) -> Option<usize> {
    range.into_iter().find(|&i| values[i] == target)
}

fn extreme_value(values: &[f64], kind: ExtremumKind) -> f64 {
    match kind {
        ExtremumKind::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ExtremumKind::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// First node attaining the extremum of the given kind.
pub fn arg_extremum(f: &SampledFunction, kind: ExtremumKind) -> usize {
    let v = f.values();
    let target = extreme_value(v, kind);
    first_index_of(v, target, 0..v.len()).expect("extremum is attained")
}

/// First interior node attaining the maximum, if any.
pub fn interior_argmax(f: &SampledFunction) -> Option<usize> {
    let v = f.values();
    let target = extreme_value(v, ExtremumKind::Max);
    first_index_of(v, target, 1..v.len() - 1)
}

/// RL lemma: at an interior maximum t₀, D^α f(t₀) ≥ t₀^{−α} f(t₀)/Γ(1−α),
/// and D^α f(t₀) ≥ 0 when f(t₀) ≥ 0. Tolerance 10·Δt.
pub fn rl_extremum_check(
    f: &SampledFunction,
    alpha: FracOrder,
) -> Result<ExtremumReport, ExtremumError> {
    rl_extremum_check_tol(f, alpha, rl_default_tol(f.grid()))
}

pub fn rl_extremum_check_tol(
    f: &SampledFunction,
    alpha: FracOrder,
    tol: f64,
) -> Result<ExtremumReport, ExtremumError> {
    let grid = f.grid();
    let n0 = interior_argmax(f).ok_or_else(|| ExtremumError::BoundaryMaximum {
        index: arg_extremum(f, ExtremumKind::Max),
        n_steps: grid.n_steps(),
    })?;
    let d = rl_derivative_with(f, alpha, Exec::Sequential);
    let lhs = d.get(n0).expect("interior node");
    let f0 = f.values()[n0];
    let rhs = grid.node(n0).powf(-alpha.value()) * f0 * rgamma(1.0 - alpha.value());
    let slack = lhs - rhs;
    let sign_ok = f0 < 0.0 || lhs >= -tol;
    Ok(ExtremumReport {
        location_index: n0,
        lhs,
        rhs,
        slack,
        tol,
        passed: slack >= -tol && sign_ok,
    })
}

/// AB lemma: at a maximum t₀ (endpoints allowed),
/// D_*^α f(t₀) ≥ E_{α,1}(−αt₀^α/(1−α))(f(t₀) − f(0))/(1−α) ≥ 0;
/// reversed at a minimum. Tolerance 5·Δt² + 1e-9.
pub fn ab_extremum_check(
    f: &SampledFunction,
    alpha: FracOrder,
    kind: ExtremumKind,
) -> ExtremumReport {
    ab_extremum_check_tol(f, alpha, kind, ab_default_tol(f.grid()))
}

pub fn ab_extremum_check_tol(
    f: &SampledFunction,
    alpha: FracOrder,
    kind: ExtremumKind,
    tol: f64,
) -> ExtremumReport {
    let grid = f.grid();
    let weights = AbWeights::new(alpha, grid.dt(), grid.n_steps()).expect("validated grid");
    ab_check_using(f, &weights, kind, tol)
}

fn ab_check_using(
    f: &SampledFunction,
    weights: &AbWeights,
    kind: ExtremumKind,
    tol: f64,
) -> ExtremumReport {
    let grid = f.grid();
    let a = weights.order().value();
    let n0 = arg_extremum(f, kind);
    let v = f.values();
    let lhs = weights.derivative_at(v, n0);
    let e1 = MlParams::new(a, 1.0).expect("0 < α < 1");
    let decay = e1.eval_nonpositive(-weights.order().ab_rate() * grid.node(n0).powf(a));
    let rhs = decay * (v[n0] - v[0]) / (1.0 - a);
    let (slack, sign_ok) = match kind {
        ExtremumKind::Max => (lhs - rhs, rhs >= -tol),
        ExtremumKind::Min => (rhs - lhs, rhs <= tol),
    };
    ExtremumReport {
        location_index: n0,
        lhs,
        rhs,
        slack,
        tol,
        passed: slack >= -tol && sign_ok,
    }
}

fn trig_poly(coeffs: &[f64], degree: usize, t: f64) -> f64 {
    let mut acc = coeffs[0];
    for k in 1..=degree {
        let w = k as f64 * PI * t;
        acc += coeffs[2 * k - 1] * w.cos() + coeffs[2 * k] * w.sin();
    }
    acc
}

/// `count` trigonometric polynomials c₀ + Σ_{k≤degree} a_k cos(kπt) + b_k sin(kπt)
/// with coefficients uniform in [−1, 1], sampled on the standard grid. Draws
/// whose maximum sits only at an endpoint are discarded and redrawn, so every
/// member has an interior maximum.
pub fn random_c1_family(seed: u64, count: usize, degree: usize) -> Vec<SampledFunction> {
    assert!(
        count >= 1 && degree >= 1,
        "count and degree must be positive"
    );
    let grid = TimeGrid::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coeffs: Vec<f64> = (0..=2 * degree)
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect();
        let f = SampledFunction::from_fn(grid, |t| trig_poly(&coeffs, degree, t))
            .expect("trigonometric polynomials are finite");
        if interior_argmax(&f).is_some() {
            out.push(f);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    Rl,
    AbMax,
    AbMin,
}

impl LemmaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LemmaKind::Rl => "rl",
            LemmaKind::AbMax => "ab_max",
            LemmaKind::AbMin => "ab_min",
        }
    }
}

/// One lemma check on one corpus member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub function_id: usize,
    pub alpha: f64,
    pub kind: LemmaKind,
    pub report: ExtremumReport,
}

/// Summary of a corpus run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusOutcome {
    pub rows: Vec<LemmaRow>,
    /// Largest deviation from exact negation between the max check on f and
    /// the min check on −f.
    pub duality_defect: f64,
}

impl CorpusOutcome {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.report.passed)
    }

    pub fn worst_slack(&self, kind: LemmaKind) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.kind == kind)
            .map(|r| r.report.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Runs the RL check and both AB checks for every member of `family` and
/// every order in `alphas`, plus the −f duality comparison. Members whose
/// maximum is not interior skip the RL check.
pub fn check_corpus(family: &[SampledFunction], alphas: &[FracOrder], exec: Exec) -> CorpusOutcome {
    let grid = family
        .first()
        .map(|f| f.grid())
        .unwrap_or_else(TimeGrid::standard);
    let tables: Vec<AbWeights> = alphas
        .iter()
        .map(|&a| AbWeights::new(a, grid.dt(), grid.n_steps()).expect("validated grid"))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..family.len())
        .flat_map(|i| (0..alphas.len()).map(move |k| (i, k)))
        .collect();
    let ab_tol = ab_default_tol(grid);
    let per_job = exec.map_slice(&jobs, |&(i, k)| {
        let f = &family[i];
        let alpha = alphas[k];
        let w = &tables[k];
        let mut rows = Vec::with_capacity(3);
        if let Ok(report) = rl_extremum_check(f, alpha) {
            rows.push(LemmaRow {
                function_id: i,
                alpha: alpha.value(),
                kind: LemmaKind::Rl,
                report,
            });
        }
        let max = ab_check_using(f, w, ExtremumKind::Max, ab_tol);
        let min = ab_check_using(f, w, ExtremumKind::Min, ab_tol);
        let dual = ab_check_using(&f.scale(-1.0), w, ExtremumKind::Min, ab_tol);
        let defect = (dual.lhs + max.lhs).abs().max((dual.rhs + max.rhs).abs());
        for (kind, report) in [(LemmaKind::AbMax, max), (LemmaKind::AbMin, min)] {
            rows.push(LemmaRow {
                function_id: i,
                alpha: alpha.value(),
                kind,
                report,
            });
        }
        (rows, defect)
    });
    let mut rows = Vec::new();
    let mut duality_defect = 0.0f64;
    for (r, d) in per_job {
        rows.extend(r);
        duality_defect = duality_defect.max(d);
    }
    CorpusOutcome {
        rows,
        duality_defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    fn sampled(f: impl Fn(f64) -> f64) -> SampledFunction {
        SampledFunction::from_fn(TimeGrid::standard(), f).unwrap()
    }

    #[test]
    fn rl_sine() {
        let f = sampled(|t| (PI * t).sin());
        let r = rl_extremum_check(&f, order(0.5)).unwrap();
        assert_eq!(r.location_index, 200);
        assert!(r.passed, "{r:?}");
        assert!(r.lhs > 0.0);
    }

    #[test]
    fn rl_zero_function() {
        let r =
            rl_extremum_check(&SampledFunction::zeros(TimeGrid::standard()), order(0.4)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (0.0, 0.0, 0.0));
        assert!(r.passed);
    }

    #[test]
    fn rl_rejects_endpoint_maximum() {
        let f = sampled(|t| t);
        assert_eq!(
            rl_extremum_check(&f, order(0.5)),
            Err(ExtremumError::BoundaryMaximum {
                index: 400,
                n_steps: 400
            })
        );
    }

    #[test]
    fn ab_constant_is_equality() {
        let f = sampled(|_| 1.7);
        for kind in [ExtremumKind::Max, ExtremumKind::Min] {
            let r = ab_extremum_check(&f, order(0.6), kind);
            assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
            assert!(r.passed);
        }
    }

    #[test]
    fn ab_sine_max_and_negated_min() {
        let f = sampled(|t| (PI * t).sin());
        let r = ab_extremum_check(&f, order(0.5), ExtremumKind::Max);
        assert!(r.passed && r.lhs > 0.0 && r.rhs > 0.0, "{r:?}");
        let g = sampled(|t| -(PI * t).sin());
        let r = ab_extremum_check(&g, order(0.3), ExtremumKind::Min);
        assert!(r.passed && r.lhs <= r.rhs && r.rhs <= 0.0, "{r:?}");
    }

    #[test]
    fn ab_nondecreasing_max_at_end() {
        let f = sampled(|t| t * t + t.sqrt());
        let r = ab_extremum_check(&f, order(0.7), ExtremumKind::Max);
        assert_eq!(r.location_index, 400);
        assert!(r.rhs >= 0.0 && r.lhs >= 0.0 && r.passed);
    }

    #[test]
    fn family_is_deterministic_and_seeded() {
        let a = random_c1_family(1, 1, 1);
        let b = random_c1_family(1, 1, 1);
        assert_eq!(a, b);
        let c = random_c1_family(2, 1, 1);
        assert_ne!(a, c);
        let big = random_c1_family(1, 100, 4);
        assert_eq!(big.len(), 100);
        assert!(big.iter().all(|f| interior_argmax(f).is_some()));
    }

    #[test]
    fn corpus_passes_and_duality_is_exact() {
        let fam = random_c1_family(7, 12, 4);
        let alphas = [order(0.2), order(0.8)];
        let out = check_corpus(&fam, &alphas, Exec::default());
        assert!(out.all_passed());
        assert!(out.duality_defect <= 1e-12);
        assert_eq!(out.rows.len(), 12 * 2 * 3);
        let seq = check_corpus(&fam, &alphas, Exec::Sequential);
        assert_eq!(seq, out);
    }
}
