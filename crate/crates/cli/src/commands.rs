use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use absubdiff_core::extremum::{check_corpus, random_c1_family};
use absubdiff_core::fracops::{
    ab_derivative, ab_derivative_alt, ab_integral, rl_derivative, rl_integral, FracOrder,
    SampledFunction, TimeGrid,
};
use absubdiff_core::mlf::MlParams;
use absubdiff_core::par::Exec;
use absubdiff_core::principles::{
    canonical_suite, randomized_instances, run_suite, SuiteEntry, SuiteOutcome,
};
use absubdiff_core::report::{CheckReport, Hypothesis};
use absubdiff_core::solver::{residual, solve_with_stats, Field, SolverConfig};
use log::{error, info};
use serde::Serialize;

use crate::config::{check_parent, read_json, RunConfig, SweepConfig};
use crate::{LemmaArgs, Operator, Status, TheoremArgs};

/// Allowance on the recomputed equation residual, scaled by max(1, ‖u‖∞).
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub status: String,
    pub passed: usize,
    pub failed: usize,
    pub not_applicable: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_picard_iterations: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport<C: Serialize, K: Serialize> {
    pub version: &'static str,
    pub config: C,
    pub checks: Vec<K>,
    pub summary: Summary,
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Failed => "failed",
        Status::ConfigError => "config_error",
        Status::SolverError => "solver_error",
    }
}

fn tally(reports: &[&CheckReport]) -> (usize, usize, usize) {
    let passed = reports.iter().filter(|r| r.passed).count();
    let na = reports.iter().filter(|r| !r.applicable).count();
    (passed, reports.len() - passed - na, na)
}

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

/// Whitespace-separated `x t u`, one block per time level separated by blank
/// lines.
pub fn write_plot<W: Write>(field: &Field, mut w: W) -> io::Result<()> {
    let g = field.grid();
    for n in 0..=g.n_t() {
        if n > 0 {
            writeln!(w)?;
        }
        for i in 0..=g.n_x() {
            writeln!(
                w,
                "{:.16e} {:.16e} {:.16e}",
                g.x(i),
                g.t(n),
                field.get(i, n)
            )?;
        }
    }
    Ok(())
}

/// Outcome of one configured solve.
#[derive(Debug)]
pub struct RunOutcome {
    pub status: Status,
    pub report: RunReport<RunConfig, CheckReport>,
    pub field: Option<Field>,
}

/// Compiles, solves and checks one configuration without writing anything.
pub fn execute(config: &RunConfig) -> RunOutcome {
    let fail = |status: Status, msg: String| RunOutcome {
        status,
        report: RunReport {
            version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
            checks: Vec::new(),
            summary: Summary {
                status: status_name(status).into(),
                passed: 0,
                failed: 0,
                not_applicable: 0,
                error: Some(msg),
                max_picard_iterations: None,
            },
        },
        field: None,
    };
    let compiled = match config.compile() {
        Ok(c) => c,
        Err(e) => return fail(Status::ConfigError, e.to_string()),
    };
    let problem = &compiled.problem;
    let (field, stats) = match solve_with_stats(problem, &config.solver) {
        Ok(r) => r,
        Err(e) => {
            let msg = match compiled.trap.take() {
                Some(eval) => format!("{e}: {eval}"),
                None => e.to_string(),
            };
            return fail(Status::SolverError, msg);
        }
    };
    let res = match residual(&field, problem) {
        Ok(r) => r,
        Err(e) => return fail(Status::SolverError, e.to_string()),
    };
    let bound = RESIDUAL_TOL * field.sup_norm().max(1.0);
    let max_it = stats.max_picard();
    let check = CheckReport::new(
        "residual",
        vec![Hypothesis::new(
            "fixed-point iteration converged",
            max_it <= config.solver.picard_max,
            max_it as f64,
        )],
        bound,
        res,
        bound - res,
        res <= bound,
    );
    let (passed, failed, na) = tally(&[&check]);
    let status = if check.passed {
        Status::Pass
    } else {
        Status::Failed
    };
    RunOutcome {
        status,
        report: RunReport {
            version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
            checks: vec![check],
            summary: Summary {
                status: status_name(status).into(),
                passed,
                failed,
                not_applicable: na,
                error: None,
                max_picard_iterations: Some(max_it),
            },
        },
        field: Some(field),
    }
}

/// Writes the declared outputs of a run. Configuration errors write
/// nothing; solver errors write only the report.
pub fn write_outputs(config: &RunConfig, outcome: &RunOutcome) -> io::Result<()> {
    if outcome.status == Status::ConfigError {
        return Ok(());
    }
    let out = &config.outputs;
    if let Some(field) = &outcome.field {
        if let Some(path) = &out.field {
            write_file(path, |w| field.write_csv(w))?;
        }
        if let Some(path) = &out.plot {
            write_file(path, |w| write_plot(field, w))?;
        }
    }
    if let Some(path) = &out.report {
        write_json(path, &outcome.report)?;
    }
    Ok(())
}

fn io_failure(what: &Path, e: io::Error) -> Status {
    error!("cannot write {}: {e}", what.display());
    Status::ConfigError
}

pub fn solve(path: &Path) -> Status {
    let config: RunConfig = match read_json(path) {
        Ok(c) => c,
        Err(e) => {
            error!("{e}");
            return Status::ConfigError;
        }
    };
    let outcome = execute(&config);
    if let Some(msg) = &outcome.report.summary.error {
        error!("{msg}");
    }
    if let Err(e) = write_outputs(&config, &outcome) {
        return io_failure(path, e);
    }
    if let Some(c) = outcome.report.checks.first() {
        info!("residual {:e} (bound {:e})", c.measured, c.bound);
    }
    println!("{}", outcome.report.summary.status);
    outcome.status
}

pub fn verify_lemmas(args: &LemmaArgs) -> Status {
    let alphas: Result<Vec<FracOrder>, _> = args.alpha.iter().map(|&a| FracOrder::new(a)).collect();
    let alphas = match alphas {
        Ok(a) if !a.is_empty() => a,
        Ok(_) => {
            error!("at least one alpha is required");
            return Status::ConfigError;
        }
        Err(e) => {
            error!("{e}");
            return Status::ConfigError;
        }
    };
    if args.count == 0 || args.degree == 0 {
        error!("count and degree must be positive");
        return Status::ConfigError;
    }
    if let Some(p) = &args.output {
        if let Err(e) = check_parent(p) {
            error!("{e}");
            return Status::ConfigError;
        }
    }
    let family = random_c1_family(args.seed, args.count, args.degree);
    let outcome = check_corpus(&family, &alphas, Exec::default());
    let emit = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "function_id,alpha,kind,lhs,rhs,slack,passed")?;
        for r in &outcome.rows {
            writeln!(
                w,
                "{},{},{},{:.16e},{:.16e},{:.16e},{}",
                r.function_id,
                r.alpha,
                r.kind.as_str(),
                r.report.lhs,
                r.report.rhs,
                r.report.slack,
                r.report.passed
            )?;
        }
        Ok(())
    };
    let written = match &args.output {
        Some(p) => write_file(p, |w| emit(w)).map_err(|e| (p.clone(), e)),
        None => emit(&mut io::stdout().lock()).map_err(|e| (PathBuf::from("<stdout>"), e)),
    };
    if let Err((p, e)) = written {
        return io_failure(&p, e);
    }
    let failed = outcome.rows.iter().filter(|r| !r.report.passed).count();
    eprintln!(
        "{} checks, {} failed, duality defect {:e}",
        outcome.rows.len(),
        failed,
        outcome.duality_defect
    );
    if failed == 0 {
        Status::Pass
    } else {
        Status::Failed
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSettings {
    pub suite: &'static str,
    pub seed: Option<u64>,
    pub count: usize,
    pub n_x: usize,
    pub n_t: usize,
    pub tol: f64,
    pub only: Vec<String>,
    pub solver: SolverConfig,
}

/// Plain-text table of suite results.
pub fn format_table(entries: &[SuiteEntry]) -> String {
    let mut s = format!(
        "{:<28} {:<5} {:>12} {:>12} {:>12}  {}\n",
        "instance", "id", "measured", "bound", "slack", "result"
    );
    for e in entries {
        match &e.outcome {
            SuiteOutcome::Report(r) => {
                let verdict = if r.passed {
                    "pass"
                } else if r.applicable {
                    "FAIL"
                } else {
                    "not applicable"
                };
                s += &format!(
                    "{:<28} {:<5} {:>12.4e} {:>12.4e} {:>12.4e}  {}\n",
                    e.label, r.id, r.measured, r.bound, r.slack, verdict
                );
            }
            SuiteOutcome::Error { theorem_id, error } => {
                s += &format!("{:<28} {:<5} error: {}\n", e.label, theorem_id, error);
            }
        }
    }
    s
}

pub fn verify_theorems(args: &TheoremArgs) -> Status {
    if args.nx < 2 || args.nt < 2 || args.tol.is_nan() || args.tol < 0.0 {
        error!("need nx >= 2, nt >= 2 and a nonnegative tolerance");
        return Status::ConfigError;
    }
    if let Some(p) = &args.output {
        if let Err(e) = check_parent(p) {
            error!("{e}");
            return Status::ConfigError;
        }
    }
    let mut instances = match args.seed {
        Some(seed) => randomized_instances(seed, args.count, args.nx, args.nt),
        None => canonical_suite(args.nx, args.nt),
    };
    if !args.only.is_empty() {
        instances.retain(|i| args.only.contains(&i.id));
    }
    let solver = SolverConfig::default();
    let entries = run_suite(&instances, &solver, args.tol, Exec::default());

    let reports: Vec<&CheckReport> = entries
        .iter()
        .filter_map(|e| match &e.outcome {
            SuiteOutcome::Report(r) => Some(r),
            SuiteOutcome::Error { .. } => None,
        })
        .collect();
    let errors = entries.len() - reports.len();
    let (passed, failed, na) = tally(&reports);
    let status = if errors > 0 {
        Status::SolverError
    } else if passed == entries.len() {
        Status::Pass
    } else {
        Status::Failed
    };
    let report = RunReport {
        version: env!("CARGO_PKG_VERSION"),
        config: SuiteSettings {
            suite: if args.seed.is_some() {
                "randomized"
            } else {
                "canonical"
            },
            seed: args.seed,
            count: args.count,
            n_x: args.nx,
            n_t: args.nt,
            tol: args.tol,
            only: args.only.iter().map(|i| i.to_string()).collect(),
            solver,
        },
        checks: entries.clone(),
        summary: Summary {
            status: status_name(status).into(),
            passed,
            failed,
            not_applicable: na,
            error: (errors > 0).then(|| format!("{errors} instance(s) hit a solver error")),
            max_picard_iterations: None,
        },
    };
    let table = format_table(&entries);
    let written = match &args.output {
        Some(p) => {
            print!("{table}");
            write_json(p, &report).map_err(|e| (p.clone(), e))
        }
        None => {
            eprint!("{table}");
            serde_json::to_writer_pretty(io::stdout().lock(), &report)
                .map_err(io::Error::from)
                .and_then(|_| writeln!(io::stdout()))
                .map_err(|e| (PathBuf::from("<stdout>"), e))
        }
    };
    if let Err((p, e)) = written {
        return io_failure(&p, e);
    }
    status
}

pub fn mlf_eval(alpha: f64, beta: f64, z: f64) -> Status {
    match MlParams::new(alpha, beta).and_then(|p| p.eval(z)) {
        Ok(v) => {
            println!("{v:.16e}");
            Status::Pass
        }
        Err(e) => {
            error!("{e}");
            Status::ConfigError
        }
    }
}

/// Reads `t,f` samples; the nodes must be j·Δt from zero up to rounding.
pub fn read_samples<R: BufRead>(r: R) -> Result<SampledFunction, String> {
    let mut ts = Vec::new();
    let mut fs = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        let line = line.trim();
        if line.is_empty() || (k == 0 && line.starts_with(|c: char| c.is_ascii_alphabetic())) {
            continue;
        }
        let mut parts = line.split(',');
        let mut next = |name: &str| -> Result<f64, String> {
            parts
                .next()
                .ok_or_else(|| format!("line {}: missing {name}", k + 1))?
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("line {}: {name}: {e}", k + 1))
        };
        ts.push(next("t")?);
        fs.push(next("f")?);
        if parts.next().is_some() {
            return Err(format!("line {}: expected two columns", k + 1));
        }
    }
    if ts.len() < 3 {
        return Err("need at least three samples".into());
    }
    let n = ts.len() - 1;
    let grid = TimeGrid::new(ts[n], n).map_err(|e| e.to_string())?;
    let scale = grid.t_end().abs();
    for (j, &t) in ts.iter().enumerate() {
        if (t - grid.node(j)).abs() > 1e-9 * scale {
            return Err(format!(
                "sample {j} at t = {t} is off the uniform grid from 0"
            ));
        }
    }
    SampledFunction::new(grid, fs).map_err(|e| e.to_string())
}

pub fn apply_operator(op: Operator, alpha: f64, f: &SampledFunction) -> Result<Vec<f64>, String> {
    if op == Operator::RlIntegral {
        return rl_integral(f, alpha)
            .map(SampledFunction::into_values)
            .map_err(|e| e.to_string());
    }
    let order = FracOrder::new(alpha).map_err(|e| e.to_string())?;
    Ok(match op {
        Operator::AbDerivative => ab_derivative(f, order).into_values(),
        Operator::AbDerivativeAlt => ab_derivative_alt(f, order).into_values(),
        Operator::AbIntegral => ab_integral(f, order).into_values(),
        Operator::RlDerivative => rl_derivative(f, order).to_vec_with_nan(),
        Operator::RlIntegral => unreachable!(),
    })
}

pub fn fracops_apply(op: Operator, alpha: f64, input: &Path, output: Option<&Path>) -> Status {
    let f = File::open(input)
        .map_err(|e| format!("{}: {e}", input.display()))
        .and_then(|file| read_samples(BufReader::new(file)));
    let result = f.and_then(|f| {
        if let Some(p) = output {
            check_parent(p).map_err(|e| e.to_string())?;
        }
        apply_operator(op, alpha, &f).map(|v| (f.grid(), v))
    });
    let (grid, values) = match result {
        Ok(r) => r,
        Err(e) => {
            error!("{e}");
            return Status::ConfigError;
        }
    };
    let emit = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "t,value")?;
        for (j, v) in values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", grid.node(j), v)?;
        }
        Ok(())
    };
    let written = match output {
        Some(p) => write_file(p, |w| emit(w)).map_err(|e| (p.to_path_buf(), e)),
        None => emit(&mut io::stdout().lock()).map_err(|e| (PathBuf::from("<stdout>"), e)),
    };
    match written {
        Ok(()) => Status::Pass,
        Err((p, e)) => io_failure(&p, e),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub status: String,
    pub residual: Option<f64>,
    pub report: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The per-order configurations of a sweep, writing into `output_dir`.
pub fn expand_sweep(sweep: &SweepConfig) -> Vec<RunConfig> {
    sweep
        .alphas
        .iter()
        .enumerate()
        .map(|(k, &alpha)| {
            let mut c = sweep.base.clone();
            c.problem.alpha = alpha;
            let stem = format!("run{k:03}");
            c.outputs.field = Some(sweep.output_dir.join(format!("{stem}_field.csv")));
            c.outputs.report = Some(sweep.output_dir.join(format!("{stem}_report.json")));
            c.outputs.plot = Some(sweep.output_dir.join(format!("{stem}_plot.dat")));
            c
        })
        .collect()
}

pub fn sweep(path: &Path, jobs: usize) -> Status {
    let sweep: SweepConfig = match read_json(path) {
        Ok(c) => c,
        Err(e) => {
            error!("{e}");
            return Status::ConfigError;
        }
    };
    if jobs == 0 || sweep.alphas.is_empty() {
        error!("need --jobs >= 1 and at least one alpha");
        return Status::ConfigError;
    }
    if !sweep.output_dir.is_dir() {
        error!(
            "output directory {} does not exist",
            sweep.output_dir.display()
        );
        return Status::ConfigError;
    }
    let runs = expand_sweep(&sweep);
    for c in &runs {
        if let Err(e) = c.compile() {
            error!("alpha = {}: {e}", c.problem.alpha);
            return Status::ConfigError;
        }
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            error!("{e}");
            return Status::ConfigError;
        }
    };
    let outcomes: Vec<(Status, SweepRow)> = pool.install(|| {
        use rayon::prelude::*;
        runs.par_iter()
            .map(|c| {
                let outcome = execute(c);
                let mut status = outcome.status;
                let mut err = outcome.report.summary.error.clone();
                if let Err(e) = write_outputs(c, &outcome) {
                    status = Status::ConfigError;
                    err = Some(e.to_string());
                }
                let row = SweepRow {
                    alpha: c.problem.alpha,
                    status: status_name(status).into(),
                    residual: outcome.report.checks.first().map(|r| r.measured),
                    report: c.outputs.report.clone().unwrap_or_default(),
                    error: err,
                };
                (status, row)
            })
            .collect()
    });
    let status = outcomes
        .iter()
        .fold(Status::Pass, |acc, (s, _)| acc.combine(*s));
    let rows: Vec<SweepRow> = outcomes.into_iter().map(|(_, r)| r).collect();
    for r in &rows {
        println!(
            "alpha {:<8} {:<12} residual {}",
            r.alpha,
            r.status,
            r.residual.map_or("-".into(), |v| format!("{v:.3e}"))
        );
    }
    let summary = sweep.output_dir.join("sweep.json");
    if let Err(e) = write_json(&summary, &rows) {
        return io_failure(&summary, e);
    }
    status
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_round_trip_and_reject_irregular_grids() {
        let text = "t,f\n0,1\n0.5,2\n1,3\n";
        let f = read_samples(text.as_bytes()).unwrap();
        assert_eq!(f.values(), &[1.0, 2.0, 3.0]);
        assert!(read_samples("0,1\n0.4,2\n1,3\n".as_bytes()).is_err());
        assert!(read_samples("0,1\n1,2\n".as_bytes()).is_err());
        assert!(read_samples("0,1,2\n0.5,2,2\n1,3,3\n".as_bytes()).is_err());
    }

    #[test]
    fn rl_derivative_output_has_nan_at_origin() {
        let f = read_samples("0,1\n0.5,1\n1,1\n".as_bytes()).unwrap();
        let v = apply_operator(Operator::RlDerivative, 0.5, &f).unwrap();
        assert!(v[0].is_nan() && v[1].is_finite());
        assert!(apply_operator(Operator::AbDerivative, 1.5, &f).is_err());
        assert!(apply_operator(Operator::RlIntegral, 1.5, &f).is_ok());
    }

    #[test]
    fn plot_blocks_are_separated() {
        let grid = absubdiff_core::solver::SpaceTimeGrid::new(1.0, 1.0, 3, 2).unwrap();
        let mut out = Vec::new();
        write_plot(&Field::zeros(grid), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 12 + 2);
        assert_eq!(text.split("\n\n").count(), 3);
    }

    #[test]
    fn status_combination() {
        assert_eq!(Status::Pass.combine(Status::Failed), Status::Failed);
        assert_eq!(
            Status::SolverError.combine(Status::Failed),
            Status::SolverError
        );
    }
}
