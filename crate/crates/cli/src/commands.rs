use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use kmittag::{
    kml, ml2, residual_report, solve, KineticProblem, MlParameters, ResidualReport,
    SeriesEvaluation, SolutionSeriesConfig, Theorem, TwoParamMl, Variant,
};
use serde::Serialize;

use crate::args::{
    EvalKmlArgs, EvalMlArgs, ProblemArgs, SeriesArgs, SolveArgs, TableArgs, VariantArg, VerifyArgs,
};
use crate::error::{CliError, CliResult};

/// Minimum empirical order for `verify` to pass.
pub const PASS_ORDER: f64 = 1.5;

/// 17 significant digits: enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(CliError::Stdout)
        }
    }
}

fn check_tol(flag: &str, tol: f64) -> CliResult<()> {
    if tol > 0.0 {
        Ok(())
    } else {
        Err(CliError::validation(
            flag,
            format!("{flag} = {tol} is invalid: requires {flag} > 0"),
        ))
    }
}

fn evaluation_csv(e: &SeriesEvaluation) -> String {
    format!(
        "value,terms_used,tail_bound,converged\n{},{},{},{}\n",
        num(e.value),
        e.terms_used,
        num(e.tail_bound),
        e.converged
    )
}

fn require_converged(
    e: SeriesEvaluation,
    what: impl FnOnce() -> String,
) -> CliResult<SeriesEvaluation> {
    if e.converged {
        Ok(e)
    } else {
        Err(CliError::NoConvergence(format!(
            "{} after {} terms (partial sum {})",
            what(),
            e.terms_used,
            num(e.value)
        )))
    }
}

pub fn eval_ml(a: &EvalMlArgs) -> CliResult<()> {
    check_tol("tol", a.tol)?;
    let p = TwoParamMl::new(a.alpha, a.beta).map_err(|e| CliError::from_core(e, "alpha"))?;
    let e = require_converged(ml2(&p, a.x, a.tol), || {
        format!("E_{{{},{}}}({})", a.alpha, a.beta, a.x)
    })?;
    emit(&evaluation_csv(&e), None)
}

pub fn eval_kml(a: &EvalKmlArgs) -> CliResult<()> {
    check_tol("tol", a.tol)?;
    let p = MlParameters::new(a.k, a.alpha, a.beta, a.gamma, a.tau)
        .map_err(|e| CliError::from_core(e, "k"))?;
    let e = kml(&p, a.z, a.tol).map_err(|e| CliError::from_core(e, "z"))?;
    let e = require_converged(e, || format!("k-Mittag-Leffler series at z = {}", a.z))?;
    emit(&evaluation_csv(&e), None)
}

fn series_config(s: &SeriesArgs) -> CliResult<SolutionSeriesConfig> {
    check_tol("outer-tol", s.outer_tol)?;
    check_tol("inner-tol", s.inner_tol)?;
    let cfg = SolutionSeriesConfig {
        outer_tol: s.outer_tol,
        inner_tol: s.inner_tol,
        ..SolutionSeriesConfig::default()
    };
    cfg.validate()
        .map_err(|e| CliError::from_core(e, "outer-tol"))?;
    Ok(cfg)
}

struct Problem {
    prob: KineticProblem,
    theorem: Theorem,
    variant: Variant,
}

fn problem(p: &ProblemArgs) -> CliResult<Problem> {
    let theorem = Theorem::from_number(p.theorem)
        .ok_or_else(|| CliError::validation("theorem", "expected 1, 2 or 3"))?;
    let ml = MlParameters::new(p.k, p.alpha, p.beta, p.gamma, p.tau)
        .map_err(|e| CliError::from_core(e, "k"))?;
    let a = match (theorem, p.a) {
        (Theorem::Three, None) => return Err(CliError::validation("a", "theorem 3 requires --a")),
        (_, Some(a)) => a,
        (_, None) => p.d,
    };
    let prob = KineticProblem::for_theorem(theorem, p.n0, ml, p.d, a, p.nu)
        .map_err(|e| CliError::from_core(e, "d"))?;
    let variant = match p.variant {
        VariantArg::Stated => Variant::Stated,
        VariantArg::Rederived => Variant::Rederived,
    };
    Ok(Problem {
        prob,
        theorem,
        variant,
    })
}

fn check_grid(t_max: f64, steps: usize) -> CliResult<()> {
    if t_max <= 0.0 {
        return Err(CliError::validation(
            "t-max",
            format!("t-max = {t_max} is invalid: requires t-max > 0"),
        ));
    }
    if steps == 0 {
        return Err(CliError::validation(
            "steps",
            "steps = 0 is invalid: requires steps >= 1",
        ));
    }
    Ok(())
}

fn grid_time(t_max: f64, steps: usize, i: usize) -> f64 {
    t_max * i as f64 / steps as f64
}

fn solve_point(
    p: &Problem,
    variant: Variant,
    t: f64,
    cfg: &SolutionSeriesConfig,
) -> CliResult<f64> {
    let e =
        solve(&p.prob, p.theorem, variant, t, cfg).map_err(|e| CliError::from_core(e, "t-max"))?;
    let e = require_converged(e, || {
        format!("theorem {} solution at t = {t}", p.theorem.number())
    })?;
    Ok(e.value)
}

/// The `t,N` table as CSV text; nothing is written unless every point converges.
pub fn solve_csv(a: &SolveArgs) -> CliResult<String> {
    let p = problem(&a.problem)?;
    let cfg = series_config(&a.series)?;
    check_grid(a.t_max, a.steps)?;
    let mut text = String::from("t,N\n");
    for i in 0..=a.steps {
        let t = grid_time(a.t_max, a.steps, i);
        let n = solve_point(&p, p.variant, t, &cfg)?;
        writeln!(text, "{},{}", num(t), num(n)).unwrap();
    }
    Ok(text)
}

pub fn run_solve(a: &SolveArgs) -> CliResult<()> {
    let text = solve_csv(a)?;
    emit(&text, a.out.as_deref())
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub grids: Vec<usize>,
    pub max_residuals: Vec<f64>,
    pub l2_residuals: Vec<f64>,
    pub order_estimate: f64,
    pub pass: bool,
}

pub fn verify_report(a: &VerifyArgs) -> CliResult<(ResidualReport, VerifyReport)> {
    let p = problem(&a.problem)?;
    let cfg = series_config(&a.series)?;
    if a.t_max <= 0.0 {
        return Err(CliError::validation(
            "t-max",
            format!("t-max = {} is invalid: requires t-max > 0", a.t_max),
        ));
    }
    if a.threshold <= 0.0 {
        return Err(CliError::validation("threshold", "threshold must be > 0"));
    }
    let c = p.prob.removal_rate();
    let report = residual_report(
        &p.prob,
        |t| solve(&p.prob, p.theorem, p.variant, t, &cfg),
        c,
        a.t_max,
        &a.grids,
    )
    .map_err(|e| CliError::from_core(e, "grids"))?;
    let json = VerifyReport {
        grids: report.grid_steps.clone(),
        max_residuals: report.max_residuals.clone(),
        l2_residuals: report.l2_residuals.clone(),
        order_estimate: report.order_estimate,
        pass: report.passes(PASS_ORDER, a.threshold),
    };
    Ok((report, json))
}

pub fn run_verify(a: &VerifyArgs) -> CliResult<()> {
    let (report, json) = verify_report(a)?;
    if !report.is_complete() {
        return Err(CliError::NoConvergence(format!(
            "{} grid points did not converge; no report written",
            report.unconverged_points
        )));
    }
    let mut text = serde_json::to_string(&json).expect("report serializes");
    text.push('\n');
    emit(&text, a.out.as_deref())?;
    if json.pass {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!(
            "order {} (need >= {PASS_ORDER}), finest max residual {} (need <= {})",
            json.order_estimate,
            report.final_max_residual(),
            a.threshold
        )))
    }
}

/// The three reference parameter sets: N₀ = 0.05, γ = 2, τ = 1, k = 2,
/// α = 6, β = 7, d = 3, with (theorem, ν, a) varying.
pub const REFERENCE_SETS: [(u32, Theorem, f64, f64); 3] = [
    (1, Theorem::One, 1.0, 3.0),
    (2, Theorem::Two, 5.0, 3.0),
    (3, Theorem::Three, 7.0, 3.0),
];

pub fn reference_problem(theorem: Theorem, nu: f64, a: f64) -> KineticProblem {
    let ml = MlParameters::new(2.0, 6.0, 7.0, 2.0, 1.0).expect("reference parameters are valid");
    KineticProblem::for_theorem(theorem, 0.05, ml, 3.0, a, nu).expect("reference problem is valid")
}

pub fn table_csv(a: &TableArgs) -> CliResult<String> {
    let cfg = series_config(&a.series)?;
    check_grid(a.t_max, a.steps)?;
    let mut text = String::from("set,theorem,t,N_stated,N_rederived\n");
    for (set, theorem, nu, rate) in REFERENCE_SETS {
        let p = Problem {
            prob: reference_problem(theorem, nu, rate),
            theorem,
            variant: Variant::Stated,
        };
        for i in 0..=a.steps {
            let t = grid_time(a.t_max, a.steps, i);
            let stated = solve_point(&p, Variant::Stated, t, &cfg)?;
            let rederived = match theorem {
                Theorem::One => stated,
                _ => solve_point(&p, Variant::Rederived, t, &cfg)?,
            };
            writeln!(
                text,
                "{set},{},{},{},{}",
                theorem.number(),
                num(t),
                num(stated),
                num(rederived)
            )
            .unwrap();
        }
    }
    Ok(text)
}

pub fn run_table(a: &TableArgs) -> CliResult<()> {
    let text = table_csv(a)?;
    emit(&text, a.out.as_deref())
}
