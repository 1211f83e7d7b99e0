//! Two-parameter Mittag-Leffler function on the real line.
//!
//! E_{α,β}(z) = Σ_{k≥0} z^k / Γ(αk + β)
//!
//! Evaluation strategy:
//! - closed forms for (α, β) ∈ {1, 2} × {1, 2};
//! - the power series for z > 0 and for small |z| on the negative axis;
//! - the algebraic asymptotic expansion −Σ z^{−k}/Γ(β−αk), truncated at the
//!   smallest term, for large negative z when 0 < α < 1;
//! - numerical inversion of the Laplace transform s^{α−β}/(s^α − z) on an
//!   optimal parabolic contour (Garrappa's method) everywhere else.
//!
//! The negative axis is the regime every kernel of the AB calculus lives in.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::report::{CheckReport, Hypothesis};
use crate::special::{ln_abs_rgamma, ln_gamma, rgamma};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MlError {
    #[error("{name} = {value} is outside the supported range {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("E_{{{alpha},{beta}}}({z}) exceeds the floating-point range")]
    Overflow { alpha: f64, beta: f64, z: f64 },
}

/// Parameters (α, β) of E_{α,β}, restricted to 0 < α ≤ 2, 0 < β ≤ 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    alpha: f64,
    beta: f64,
}

impl MlParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, MlError> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(MlError::Domain {
                name: "alpha",
                value: alpha,
                range: "(0, 2]",
            });
        }
        if !(beta > 0.0 && beta <= 4.0) {
            return Err(MlError::Domain {
                name: "beta",
                value: beta,
                range: "(0, 4]",
            });
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// E_{α,β}(z).
    pub fn eval(&self, z: f64) -> Result<f64, MlError> {
        if !z.is_finite() {
            return Err(MlError::Domain {
                name: "z",
                value: z,
                range: "finite reals",
            });
        }
        let v = eval_raw(self.alpha, self.beta, z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(MlError::Overflow {
                alpha: self.alpha,
                beta: self.beta,
                z,
            })
        }
    }

    /// Evaluation on the closed negative axis, where the function is bounded
    /// and no error can occur.
    pub(crate) fn eval_nonpositive(&self, z: f64) -> f64 {
        debug_assert!(z <= 0.0 && z.is_finite());
        eval_raw(self.alpha, self.beta, z)
    }
}

/// E_{α,β}(z); see [`MlParams::eval`].
pub fn ml_eval(p: MlParams, z: f64) -> Result<f64, MlError> {
    p.eval(z)
}

/// The primitive P(τ) = ∫₀^τ E_{α,1}(−λ s^α) ds = τ·E_{α,2}(−λ τ^α).
///
/// P(0) = 0 and P is nondecreasing; it is the building block of every
/// product-integration weight for the AB derivative.
pub fn ml_primitive(alpha: f64, lambda: f64, tau: f64) -> Result<f64, MlError> {
    let kernel = PrimitiveKernel::new(alpha, lambda)?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(MlError::Domain {
            name: "tau",
            value: tau,
            range: "[0, inf)",
        });
    }
    Ok(kernel.eval(tau))
}

/// Validated (α, λ) pair for repeated primitive evaluations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PrimitiveKernel {
    alpha: f64,
    lambda: f64,
    ml: MlParams,
}

impl PrimitiveKernel {
    pub(crate) fn new(alpha: f64, lambda: f64) -> Result<Self, MlError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(MlError::Domain {
                name: "alpha",
                value: alpha,
                range: "(0, 1]",
            });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(MlError::Domain {
                name: "lambda",
                value: lambda,
                range: "(0, inf)",
            });
        }
        Ok(Self {
            alpha,
            lambda,
            ml: MlParams::new(alpha, 2.0)?,
        })
    }

    pub(crate) fn eval(&self, tau: f64) -> f64 {
        if tau == 0.0 {
            return 0.0;
        }
        tau * self
            .ml
            .eval_nonpositive(-self.lambda * tau.powf(self.alpha))
    }
}

/// Checks the complete-monotonicity consequences used by the AB extremum
/// lemma: on the grid, E_{α,1}(−τ) is positive and nonincreasing and
/// E_{α,α}(−τ) is positive.
pub fn ml_complete_monotone_probe(alpha: f64, grid: &[f64]) -> Result<CheckReport, MlError> {
    let e1 = MlParams::new(alpha, 1.0)?;
    let ea = MlParams::new(alpha, alpha)?;

    let grid_ok = !grid.is_empty()
        && grid.iter().all(|&t| t > 0.0 && t.is_finite())
        && grid.windows(2).all(|w| w[1] > w[0]);
    let alpha_ok = alpha > 0.0 && alpha <= 1.0;
    let hypotheses = vec![
        Hypothesis::new(
            "grid positive and strictly increasing",
            grid_ok,
            grid.len() as f64,
        ),
        Hypothesis::new("0 < alpha <= 1", alpha_ok, alpha),
    ];
    if !grid_ok || !alpha_ok {
        return Ok(CheckReport::new(
            "ML-complete-monotone",
            hypotheses,
            0.0,
            f64::NAN,
            f64::NAN,
            false,
        ));
    }

    let v1: Vec<f64> = grid.iter().map(|&t| e1.eval_nonpositive(-t)).collect();
    let va: Vec<f64> = grid.iter().map(|&t| ea.eval_nonpositive(-t)).collect();
    let min_e1 = v1.iter().copied().fold(f64::INFINITY, f64::min);
    let min_ea = va.iter().copied().fold(f64::INFINITY, f64::min);
    let max_rise = v1
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);

    let positive = min_e1 > 0.0 && min_ea > 0.0;
    let monotone = v1.len() < 2 || max_rise <= 0.0;
    let measured = min_e1.min(min_ea);
    Ok(CheckReport::new(
        "ML-complete-monotone",
        hypotheses,
        0.0,
        measured,
        if monotone { measured } else { -max_rise },
        positive && monotone,
    ))
}

/// Radius on the negative axis inside which the power series is used.
const SERIES_RADIUS_NEG: f64 = 0.5;
const SERIES_MAX_TERMS: usize = 100_000;
const ASYMPTOTIC_MAX_TERMS: usize = 400;
const TERM_RATIO_STOP: f64 = 1e-16;

fn eval_raw(alpha: f64, beta: f64, z: f64) -> f64 {
    if z == 0.0 {
        return rgamma(beta);
    }
    if let Some(v) = closed_form(alpha, beta, z) {
        return v;
    }
    if z > 0.0 {
        return power_series(alpha, beta, z, SERIES_MAX_TERMS)
            .unwrap_or_else(|| laplace_inversion(alpha, beta, z));
    }
    if -z <= SERIES_RADIUS_NEG {
        if let Some(v) = power_series(alpha, beta, z, SERIES_MAX_TERMS) {
            return v;
        }
    }
    if alpha < 1.0 {
        if let Some(v) = asymptotic_negative(alpha, beta, -z) {
            return v;
        }
    }
    laplace_inversion(alpha, beta, z)
}

fn closed_form(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    if alpha == 1.0 {
        if beta == 1.0 {
            return Some(z.exp());
        }
        if beta == 2.0 {
            return Some(z.exp_m1() / z);
        }
    }
    if alpha == 2.0 {
        let r = z.abs().sqrt();
        if beta == 1.0 {
            return Some(if z > 0.0 { r.cosh() } else { r.cos() });
        }
        if beta == 2.0 {
            return Some(if z > 0.0 { r.sinh() / r } else { r.sin() / r });
        }
    }
    None
}

/// Σ z^k/Γ(αk+β), stopped once a term past the peak drops below
/// `TERM_RATIO_STOP` relative to the partial sum. `None` if the term budget
/// runs out first.
fn power_series(alpha: f64, beta: f64, z: f64, max_terms: usize) -> Option<f64> {
    let ln_abs_z = z.abs().ln();
    let mut sum = 0.0f64;
    let mut prev_abs = f64::INFINITY;
    for k in 0..max_terms {
        let kf = k as f64;
        let arg = alpha * kf + beta;
        let term = if arg <= 170.0 && kf * ln_abs_z < 700.0 && k < i32::MAX as usize {
            z.powi(k as i32) * rgamma(arg)
        } else {
            let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            sign * (kf * ln_abs_z - ln_gamma(arg)).exp()
        };
        sum += term;
        if !sum.is_finite() {
            return Some(sum);
        }
        let a = term.abs();
        if k > 0 && a <= TERM_RATIO_STOP * sum.abs() && a <= prev_abs {
            return Some(sum);
        }
        prev_abs = a;
    }
    None
}

/// E_{α,β}(−x) ≈ −Σ_{k≥1} (−x)^{−k}/Γ(β−αk) for 0 < α < 1, x > 0.
///
/// Accepted only when the term envelope falls below `TERM_RATIO_STOP`
/// relative to the partial sum before it starts growing.
fn asymptotic_negative(alpha: f64, beta: f64, x: f64) -> Option<f64> {
    let ln_x = x.ln();
    let mut sum = 0.0f64;
    let mut prev_env = f64::INFINITY;
    for k in 1..=ASYMPTOTIC_MAX_TERMS {
        let kf = k as f64;
        let y = beta - alpha * kf;
        // |1/Γ(y)| ≤ Γ(1−y)/π for y < 1/2; the envelope ignores the sin(πy)
        // factor so that near-pole terms cannot fake convergence.
        let ln_env_rg = if y >= 0.5 {
            -ln_gamma(y)
        } else {
            ln_gamma(1.0 - y) - PI.ln()
        };
        let env = (-kf * ln_x + ln_env_rg).exp();
        if env > prev_env {
            return None;
        }
        let (ln_rg, s) = ln_abs_rgamma(y);
        if s != 0.0 {
            let mag = (-kf * ln_x + ln_rg).exp();
            let alt = if k % 2 == 1 { -1.0 } else { 1.0 };
            sum += -alt * s * mag;
        }
        if sum != 0.0 && env <= TERM_RATIO_STOP * sum.abs() {
            return Some(sum);
        }
        prev_env = env;
    }
    None
}

/// ln(1e-15): target accuracy of the contour quadrature.
const LOG_EPS_TARGET: f64 = -34.538_776_394_910_684;

/// Laplace-transform inversion of s^{α−β}/(s^α − z) at t = 1 on a parabolic
/// contour s(u) = μ(iu + 1)², with residues of the poles left outside the
/// contour added back.
fn laplace_inversion(alpha: f64, beta: f64, z: f64) -> f64 {
    let t = 1.0;
    let theta = if z < 0.0 { PI } else { 0.0 };
    let radius = z.abs().powf(1.0 / alpha);

    // poles of the transform on the principal sheet
    let kmin = (-alpha / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let kmax = (alpha / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let mut poles: Vec<(Complex64, f64)> = (kmin..=kmax)
        .map(|k| {
            let s = Complex64::from_polar(radius, (theta + 2.0 * PI * k as f64) / alpha);
            (s, (s.re + s.norm()) / 2.0)
        })
        .filter(|&(_, phi)| phi > 1e-15)
        .collect();
    poles.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut s_star = vec![Complex64::new(0.0, 0.0)];
    let mut phi = vec![0.0];
    for &(s, ph) in &poles {
        s_star.push(s);
        phi.push(ph);
    }
    let n_sing = s_star.len();
    let mut p = vec![(2.0 * (beta - alpha - 1.0)).max(0.0)];
    p.extend(std::iter::repeat_n(1.0, n_sing - 1));
    let mut q = vec![1.0; n_sing - 1];
    q.push(f64::INFINITY);
    phi.push(f64::INFINITY);

    let log_mach = f64::EPSILON.ln();
    let mut log_eps = LOG_EPS_TARGET;
    let admissible: Vec<usize> = (0..n_sing)
        .filter(|&j| phi[j] < (log_eps - log_mach) / t && phi[j] < phi[j + 1])
        .collect();

    let mut best = (0.0, 0.0, f64::INFINITY, 0usize);
    for _ in 0..12 {
        best = (0.0, 0.0, f64::INFINITY, 0);
        for &j in &admissible {
            let (mu, h, n) = if j + 1 < n_sing {
                optimal_param_bounded(t, phi[j], phi[j + 1], p[j], q[j], log_eps)
            } else {
                optimal_param_unbounded(t, phi[j], p[j], log_eps)
            };
            if n < best.2 {
                best = (mu, h, n, j);
            }
        }
        if best.2 <= 200.0 {
            break;
        }
        log_eps += 10f64.ln();
    }
    let (mu, h, n, region) = best;
    if !n.is_finite() {
        return f64::NAN;
    }
    let n = n as i64;

    let lam = Complex64::new(z, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -n..=n {
        let u = h * k as f64;
        let s = mu * (i * u + 1.0).powi(2);
        let ds = Complex64::new(-2.0 * mu * u, 2.0 * mu);
        let f = s.powf(alpha - beta) / (s.powf(alpha) - lam) * ds;
        acc += (s * t).exp() * f;
    }
    let integral = acc * h / (2.0 * PI * i);

    let residues: Complex64 = s_star[region + 1..]
        .iter()
        .map(|&s| s.powf(1.0 - beta) * (s * t).exp() / alpha)
        .sum();
    (integral + residues).re
}

/// Contour parameters for a region bounded by two singularities.
fn optimal_param_bounded(
    t: f64,
    phi_j: f64,
    phi_j1: f64,
    pj: f64,
    qj: f64,
    log_eps: f64,
) -> (f64, f64, f64) {
    let log_mach = f64::EPSILON.ln();
    let fac = 1.01;
    let f_max = (log_eps - log_mach).exp();

    let sq_phi_j = phi_j.sqrt();
    let threshold = 2.0 * ((log_eps - log_mach) / t).sqrt();
    let sq_phi_j1 = phi_j1.sqrt().min(threshold - sq_phi_j);

    let tiny = 1.0e-14;
    let (sq_phibar_j, sq_phibar_j1, f_bar) = if pj < tiny && qj < tiny {
        (sq_phi_j, sq_phi_j1, 1.0)
    } else if pj < tiny {
        let f_min = if sq_phi_j > 0.0 {
            fac * (sq_phi_j / (sq_phi_j1 - sq_phi_j)).powf(qj)
        } else {
            fac
        };
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fq = f_bar.powf(-1.0 / qj);
        (
            sq_phi_j,
            (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq),
            f_bar,
        )
    } else if qj < tiny {
        let f_min = fac * (sq_phi_j1 / (sq_phi_j1 - sq_phi_j)).powf(pj);
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        (
            (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp),
            sq_phi_j1,
            f_bar,
        )
    } else {
        let f_min = fac * (sq_phi_j + sq_phi_j1) / (sq_phi_j1 - sq_phi_j).powf(pj.max(qj));
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        let f_min = f_min.max(1.5);
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        let fq = f_bar.powf(-1.0 / qj);
        let w = -phi_j1 * t / log_eps;
        let den = 2.0 + w - (1.0 + w) * fp + fq;
        (
            ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den,
            (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den,
            f_bar,
        )
    };

    let log_eps = log_eps - f_bar.ln();
    let w = -sq_phibar_j1 * sq_phibar_j1 * t / log_eps;
    let mu = (((1.0 + w) * sq_phibar_j + sq_phibar_j1) / (2.0 + w)).powi(2);
    let h = -2.0 * PI / log_eps * (sq_phibar_j1 - sq_phibar_j)
        / ((1.0 + w) * sq_phibar_j + sq_phibar_j1);
    let n = ((1.0 - log_eps / t / mu).sqrt() / h).ceil();
    if !(mu > 0.0 && h > 0.0 && n.is_finite()) {
        return (0.0, 0.0, f64::INFINITY);
    }
    (mu, h, n)
}

/// Contour parameters for the unbounded region right of the last singularity.
fn optimal_param_unbounded(t: f64, phi_j: f64, pj: f64, log_eps: f64) -> (f64, f64, f64) {
    let sq_phi_j = phi_j.sqrt();
    let mut phibar_j = if phi_j > 0.0 { phi_j * 1.01 } else { 0.01 };
    let mut sq_phibar_j = phibar_j.sqrt();

    let (f_min, f_max, f_tar) = (1.0, 10.0, 5.0f64);
    let mut n;
    let mut a;
    let mut sq_mu;
    let mut iterations = 0;
    loop {
        let phi_t = phibar_j * t;
        let log_eps_phi_t = log_eps / phi_t;
        n = (phi_t / PI * (1.0 - 3.0 * log_eps_phi_t / 2.0 + (1.0 - 2.0 * log_eps_phi_t).sqrt()))
            .ceil();
        a = PI * n / phi_t;
        sq_mu = sq_phibar_j * (4.0 - a).abs() / (7.0 - (1.0 + 12.0 * a).sqrt()).abs();
        let f_bar = ((sq_phibar_j - sq_phi_j) / sq_mu).powf(-pj);
        iterations += 1;
        let stop = pj < 1.0e-14 || (f_min < f_bar && f_bar < f_max) || iterations > 100;
        if stop {
            break;
        }
        sq_phibar_j = f_tar.powf(-1.0 / pj) * sq_mu + sq_phi_j;
        phibar_j = sq_phibar_j * sq_phibar_j;
    }
    let mut mu = sq_mu * sq_mu;
    let mut h = (-3.0 * a - 2.0 + 2.0 * (1.0 + 12.0 * a).sqrt()) / (4.0 - a) / n;

    // keep round-off under control
    let log_mach = f64::EPSILON.ln();
    let threshold = (log_eps - log_mach) / t;
    if mu > threshold {
        let q = if pj.abs() < 1.0e-14 {
            0.0
        } else {
            f_tar.powf(-1.0 / pj) * mu.sqrt()
        };
        let phibar = (q + sq_phi_j).powi(2);
        if phibar < threshold {
            let w = (log_mach / (log_mach - log_eps)).sqrt();
            let u = (-phibar * t / log_mach).sqrt();
            mu = threshold;
            n = (w * log_eps / 2.0 / PI / (u * w - 1.0)).ceil();
            h = w / n;
        } else {
            return (0.0, 0.0, f64::INFINITY);
        }
    }
    (mu, h, n)
}
