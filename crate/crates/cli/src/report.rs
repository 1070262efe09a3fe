//! Report builders: each subcommand assembles one JSON value (rendered
//! deterministically) and an equivalent plain-text view.

use cone_yamabe::dynamics::{self, DynParams, Equilibrium};
use cone_yamabe::geometry::{self, ConeParams};
use cone_yamabe::ode::{self, IntegrateOptions};
use cone_yamabe::scenario::{Scenario, ScenarioParams};
use cone_yamabe::spectral;

use crate::error::{CliError, CliResult};
use crate::json::Value;

fn verdict_value(v: &spectral::SobolevVerdict) -> Value {
    let mut obj = Value::object();
    obj.push("exponent_q", v.exponent_q);
    obj.push("max_order", i64::from(v.max_order));
    obj.push("in_l2", v.in_l2);
    obj.push("in_h1", v.in_h1);
    obj.push("in_h2", v.in_h2);
    obj
}

fn cone_inputs(cone: &ConeParams) -> Value {
    let mut obj = Value::object();
    obj.push("p", cone.p());
    obj.push("q", cone.q());
    obj.push("rp", cone.r_p());
    obj.push("rq", cone.r_q());
    obj
}

/// `geometry` subcommand: headline constants plus the extremal analysis,
/// with optional pointwise curvature/density evaluation.
pub fn geometry_report(cone: &ConeParams, ell: Option<f64>) -> CliResult<Value> {
    let summary = geometry::geometry_summary(cone);
    let extrema = geometry::lambda_extrema(cone.n(), cone.r_p(), cone.r_q())?;

    let mut report = Value::object();
    report.push("inputs", cone_inputs(cone));
    report.push("n", summary.n);
    report.push("lambda", summary.lambda);
    report.push("mu_sq", summary.mu_sq);
    report.push("mu", summary.mu);
    report.push("case", summary.case.to_string());
    report.push("sigma", dynamics::sigma_exponent(cone));
    report.push("alpha_star", dynamics::alpha_star(cone.n()));
    report.push("alpha_zero", dynamics::alpha_zero(cone));

    let mut ext = Value::object();
    ext.push("p_min", extrema.p_min);
    ext.push("q_min", extrema.q_min);
    ext.push("lambda_min", extrema.lambda_min);
    ext.push("lambda_p1", extrema.lambda_p1);
    ext.push("lambda_pn2", extrema.lambda_pn2);
    report.push("lambda_extrema", ext);

    if let Some(ell) = ell {
        let mut at = Value::object();
        at.push("ell", ell);
        at.push("scalar_curvature", geometry::scalar_curvature(cone, ell)?);
        at.push("volume_density", geometry::volume_density(cone, ell)?);
        report.push("at_ell", at);
    }
    if let Some(w) = cone.dimension_warning() {
        report.push("warning", w);
    }
    Ok(report)
}

/// `spectral` subcommand: one row per mode in the window, the nonpositive
/// modes, and the positivity classification.
pub fn spectral_report(
    cone: &ConeParams,
    i_max: u32,
    j_max: u32,
    integral_r_positive: Option<bool>,
) -> CliResult<Value> {
    let mut report = Value::object();
    report.push("inputs", cone_inputs(cone));
    report.push("n", cone.n());
    report.push("lambda", geometry::lambda_factor(cone));
    report.push("i_max", i_max);
    report.push("j_max", j_max);

    let mut modes = Vec::new();
    for i in 0..=i_max {
        for j in 0..=j_max {
            let mut row = Value::object();
            row.push("i", i);
            row.push("j", j);
            row.push("coupling", spectral::coupling_constant(cone, i, j));
            match spectral::spectral_mode(cone, i, j) {
                Ok(mode) => {
                    row.push("nu_minus", mode.nu_minus);
                    row.push("nu_plus", mode.nu_plus);
                    let membership = spectral::mode_membership_report(cone, i, j)?;
                    row.push("plus_branch", verdict_value(&membership.plus_branch));
                    row.push("minus_branch", verdict_value(&membership.minus_branch));
                }
                Err(err) => {
                    row.push("degenerate", err.to_string());
                }
            }
            modes.push(row);
        }
    }
    report.push("modes", Value::Array(modes));

    let negative: Vec<Value> = spectral::negative_modes(cone, i_max, j_max)
        .into_iter()
        .map(|(i, j, k)| {
            let mut row = Value::object();
            row.push("i", i);
            row.push("j", j);
            row.push("coupling", k);
            row
        })
        .collect();
    report.push("nonpositive_modes", Value::Array(negative));

    match integral_r_positive {
        Some(flag) => {
            report.push(
                "positivity",
                spectral::positivity_report(cone, flag).to_string(),
            );
        }
        None => {
            report.push(
                "positivity_if_integral_positive",
                spectral::positivity_report(cone, true).to_string(),
            );
            report.push(
                "positivity_if_integral_negative",
                spectral::positivity_report(cone, false).to_string(),
            );
        }
    }
    if let Some(w) = cone.dimension_warning() {
        report.push("warning", w);
    }
    Ok(report)
}

/// `series` subcommand: indicial data of the mode and the truncated series
/// on the upper branch, optionally evaluated at sample radii.
pub fn series_report(
    cone: &ConeParams,
    i: u32,
    j: u32,
    q1: f64,
    truncation_m: usize,
    ells: &[f64],
) -> CliResult<Value> {
    let mode = spectral::spectral_mode(cone, i, j)?;
    let sol = spectral::series_coefficients(mode.nu_plus, cone.n(), q1, 1.0, truncation_m)?;

    let mut report = Value::object();
    let mut inputs = cone_inputs(cone);
    inputs.push("i", i);
    inputs.push("j", j);
    inputs.push("q1", q1);
    inputs.push("truncation_m", truncation_m);
    report.push("inputs", inputs);
    report.push("coupling", mode.coupling);
    report.push("nu_minus", mode.nu_minus);
    report.push("nu_plus", mode.nu_plus);
    report.push(
        "coefficients",
        Value::Array(sol.coeffs.iter().map(|&a| Value::Float(a)).collect()),
    );

    if !ells.is_empty() {
        let mut evals = Vec::new();
        for &ell in ells {
            let mut row = Value::object();
            row.push("ell", ell);
            row.push("value", spectral::eval_series(&sol, ell)?);
            row.push(
                "operator_residual",
                spectral::series_ode_residual(&sol, mode.coupling, cone.n(), ell),
            );
            evals.push(row);
        }
        report.push("evaluations", Value::Array(evals));
    }
    Ok(report)
}

fn scenario_inputs(scenario: &Scenario) -> Value {
    let mut obj = Value::object();
    obj.push("name", scenario.name.clone());
    match &scenario.params {
        ScenarioParams::Cone {
            cone,
            alpha,
            q_coef,
        } => {
            obj.push("p", cone.p());
            obj.push("q", cone.q());
            obj.push("rp", cone.r_p());
            obj.push("rq", cone.r_q());
            obj.push("alpha", *alpha);
            obj.push("Q", *q_coef);
        }
        ScenarioParams::Raw {
            a_bar,
            b_bar,
            q_coef,
            alpha,
            n,
        } => {
            obj.push("a_bar", *a_bar);
            obj.push("b_bar", *b_bar);
            obj.push("Q", *q_coef);
            obj.push("alpha", *alpha);
            obj.push("n", *n);
        }
    }
    obj.push("notes", scenario.notes.clone());
    obj
}

fn dyn_params_value(dp: &DynParams) -> Value {
    let mut obj = Value::object();
    obj.push("alpha", dp.alpha);
    obj.push("Q", dp.q_coef);
    obj.push("n", dp.n);
    obj.push("lambda", dp.lambda);
    obj.push("a_bar", dp.a_bar);
    obj.push("b_bar", dp.b_bar);
    obj.push("s", dp.s);
    obj.push("shift", dp.shift);
    obj.push("mu_sq_implied", dp.mu_squared_implied());
    obj.push("case_sign_implied", dp.implied_case_sign().to_string());
    obj
}

fn equilibrium_value(eq: &Equilibrium) -> Value {
    let mut obj = Value::object();
    obj.push("x", eq.location.0);
    obj.push("y", eq.location.1);
    obj.push("kind", eq.kind.to_string());
    let eig = |v: num_complex::Complex64| {
        let mut e = Value::object();
        e.push("re", v.re);
        e.push("im", v.im);
        e
    };
    obj.push(
        "eigenvalues",
        Value::Array(vec![eig(eq.eigenvalues.0), eig(eq.eigenvalues.1)]),
    );
    obj
}

/// `classify` subcommand: coefficients, case label, equilibria and the
/// family table with exponents and membership verdicts.
pub fn classify_report(scenario: &Scenario) -> CliResult<Value> {
    let dp = scenario.dyn_params()?;
    let label = dynamics::classify_case(&dp);
    let families = dynamics::solution_families(&dp, &label);

    let mut report = Value::object();
    report.push("inputs", scenario_inputs(scenario));
    if let Some(cone) = scenario.cone() {
        let summary = geometry::geometry_summary(cone);
        let mut geo = Value::object();
        geo.push("n", summary.n);
        geo.push("lambda", summary.lambda);
        geo.push("mu_sq", summary.mu_sq);
        geo.push("mu", summary.mu);
        geo.push("case_sign", summary.case.to_string());
        geo.push("sigma", dynamics::sigma_exponent(cone));
        report.push("geometry", geo);
    }
    report.push("dyn_params", dyn_params_value(&dp));
    report.push("case", label.id.name());
    report.push("case_description", label.description.clone());

    let eqs = dynamics::equilibria(&dp);
    report.push(
        "equilibria",
        Value::Array(eqs.iter().map(equilibrium_value).collect()),
    );

    let mut rows = Vec::new();
    for fam in &families {
        let mut row = Value::object();
        row.push("family", fam.family.name());
        row.push("w_exponent", fam.w_exponent);
        row.push("u_exponent", fam.u_exponent);
        match &fam.verdict {
            Some(v) => row.push("verdict", verdict_value(v)),
            None => row.push("verdict", Value::Null),
        };
        row.push("in_l2", fam.in_l2);
        row.push("notes", fam.notes.clone());
        rows.push(row);
    }
    report.push("families", Value::Array(rows));

    // case-derived separatrix exponent; recorded with its sign convention
    // because summaries elsewhere state it with the opposite sign
    let mu_implied = dp.mu_squared_implied().max(0.0).sqrt();
    let n = f64::from(dp.n);
    report.push("sigma_case_derived", (n - 2.0) / 2.0 * (mu_implied - 1.0));
    report.push(
        "sigma_sign_note",
        "the separatrix exponent is reported as q = -2/(alpha-1) - lambda_minus \
         (positive sign convention); statements quoting l^{-sigma} for the same \
         solution are treated as a sign typo",
    );
    // conformal factor u^{4/(n-2)} of the extremal metric, u ~ l^sigma
    report.push("yamabe_metric_factor_exponent", 2.0 * (mu_implied - 1.0));
    Ok(report)
}

/// One shooting experiment: eigendirection, analytic rate, fitted rate.
fn shoot_row(
    dp: &DynParams,
    eq: &Equilibrium,
    eq_index: usize,
    dir_index: usize,
    eigenvalue: f64,
    offset: f64,
    tol: f64,
) -> Value {
    let mut row = Value::object();
    row.push("equilibrium", eq_index);
    row.push("direction", dir_index);
    row.push("eigenvalue_analytic", eigenvalue);

    if eigenvalue.abs() < 1e-9 {
        row.push("skipped", "zero eigenvalue: approach is sub-exponential");
        return row;
    }
    let backward = eigenvalue > 0.0;
    row.push("mode", if backward { "backward" } else { "forward" });

    // effective decay rate in the integrated direction
    let decay = -eigenvalue.abs();
    // time to shrink the offset by ~e^9, capped by the onset of
    // contamination from the other eigendirection
    let mut t_max = 9.0 / decay.abs();
    let other = if dir_index == 0 {
        eq.eigenvalues.1.re
    } else {
        eq.eigenvalues.0.re
    };
    let other_eff = if backward { -other } else { other };
    let gap = other_eff - decay;
    if gap > 0.0 {
        let t_cont = 0.8 * (dp.alpha - 1.0) * (-offset.ln()) / gap;
        t_max = t_max.min(t_cont);
    }
    let opts = match IntegrateOptions::new(t_max, tol) {
        Ok(o) => o
            .with_max_step(t_max / 400.0)
            .with_equilibrium_radius(1e-12),
        Err(e) => {
            row.push("error", e.to_string());
            return row;
        }
    };
    let traj = match ode::shoot_separatrix(dp, eq, dir_index, false, offset, backward, &opts) {
        Ok(t) => t,
        Err(e) => {
            row.push("error", e.to_string());
            return row;
        }
    };
    let window = (0.3 * t_max, 0.9 * t_max);
    match ode::estimate_exponent(&traj, window, eq.location) {
        Ok(fit) => {
            let fitted_eigenvalue = if backward { -fit.rate } else { fit.rate };
            row.push("eigenvalue_fitted", fitted_eigenvalue);
            row.push(
                "relative_error",
                (fitted_eigenvalue - eigenvalue).abs() / eigenvalue.abs(),
            );
            row.push("r_squared", fit.r_squared);
            row.push("used_envelope", fit.used_envelope);
            row.push("samples_used", fit.samples_used);
        }
        Err(e) => {
            row.push("error", e.to_string());
        }
    }
    row
}

/// Detect the orbit period and measure first-integral drift over ten
/// periods for the conservative regime.
pub fn fowler_conservation(dp: &DynParams, tol: f64) -> CliResult<Value> {
    let x2 = dp.x2().ok_or_else(|| {
        CliError::Validation("no interior equilibrium: a_bar / Q must be positive".to_string())
    })?;
    let omega_sq = dp.a_bar * (dp.alpha - 1.0);
    if omega_sq <= 0.0 {
        return Err(CliError::Validation(
            "interior equilibrium is not a center".to_string(),
        ));
    }
    let t_lin = 2.0 * std::f64::consts::PI / omega_sq.sqrt();

    // pilot run to estimate the true (amplitude-dependent) period
    let pilot_opts = IntegrateOptions::new(4.0 * t_lin, tol)?;
    let pilot = ode::integrate(dp, (x2 / 2.0, 0.0), &pilot_opts)?;
    let crossings = ode::y_upcrossings(&pilot);
    if crossings.len() < 2 {
        return Err(CliError::Numerical(
            "pilot orbit produced no full revolution".to_string(),
        ));
    }
    let period = crossings[crossings.len() - 1] - crossings[crossings.len() - 2];

    let opts = IntegrateOptions::new(10.5 * period, tol)?;
    let traj = ode::integrate(dp, (x2 / 2.0, 0.0), &opts)?;
    let crossings = ode::y_upcrossings(&traj);
    let drift = ode::hamiltonian_drift(dp, &traj)?;

    let i0 = dynamics::first_integral(dp, x2 / 2.0, 0.0)?;
    let i_w2 = dynamics::first_integral_at_w2(dp)?;
    let mut in_range = true;
    for &(_, x, y) in &traj.samples {
        let i = dynamics::first_integral(dp, x.max(0.0), y)?;
        if !(i > i_w2 && i < 0.0) {
            in_range = false;
        }
    }

    let mut obj = Value::object();
    obj.push("seed_x", x2 / 2.0);
    obj.push("period", period);
    obj.push("periods_detected", crossings.len());
    obj.push("drift", drift);
    obj.push("energy_seed", i0);
    obj.push("energy_w2", i_w2);
    obj.push("energy_in_range", in_range);
    obj.push("tol", tol);
    Ok(obj)
}

/// `phase` subcommand: equilibria, per-eigendirection shooting versus the
/// analytic rates, and conservation data in the critical regime.
pub fn phase_report(scenario: &Scenario, tol: f64, offset: f64) -> CliResult<Value> {
    let dp = scenario.dyn_params()?;
    let label = dynamics::classify_case(&dp);
    let eqs = dynamics::equilibria(&dp);

    let mut report = Value::object();
    report.push("inputs", scenario_inputs(scenario));
    report.push("case", label.id.name());
    report.push(
        "equilibria",
        Value::Array(eqs.iter().map(equilibrium_value).collect()),
    );

    let mut shots = Vec::new();
    for (eq_index, eq) in eqs.iter().enumerate() {
        for (dir_index, (eigenvalue, _)) in eq.real_eigenpairs().iter().enumerate() {
            shots.push(shoot_row(
                &dp,
                eq,
                eq_index,
                dir_index,
                *eigenvalue,
                offset,
                tol,
            ));
        }
    }
    report.push("shooting", Value::Array(shots));

    if dp.at_critical_alpha() && dp.q_coef > 0.0 && dp.x2().is_some() {
        report.push("conservation", fowler_conservation(&dp, tol)?);
    } else {
        report.push("conservation", Value::Null);
    }
    Ok(report)
}

/// `scenarios` subcommand.
pub fn scenarios_report() -> Value {
    let mut rows = Vec::new();
    for s in cone_yamabe::scenario::figure_scenarios() {
        let mut row = scenario_inputs(&s);
        let case = s
            .dyn_params()
            .map(|dp| dynamics::classify_case(&dp).id.name().to_string())
            .unwrap_or_else(|e| format!("error: {e}"));
        row.push("case", case);
        rows.push(row);
    }
    let mut report = Value::object();
    report.push("scenarios", Value::Array(rows));
    report
}

/// Summary block for a portrait run.
pub fn portrait_summary(
    spec: &ode::PortraitSpec,
    trajectories: &[ode::PortraitTrajectory],
) -> Value {
    let mut by_termination: Vec<(String, usize)> = Vec::new();
    let mut failures = 0usize;
    for t in trajectories {
        match &t.result {
            Ok(traj) => {
                let key = traj.terminated.to_string();
                match by_termination.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, count)) => *count += 1,
                    None => by_termination.push((key, 1)),
                }
            }
            Err(_) => failures += 1,
        }
    }
    by_termination.sort();

    let mut obj = Value::object();
    obj.push("trajectories", trajectories.len());
    obj.push("failed_seeds", failures);
    let mut term = Value::object();
    for (k, v) in by_termination {
        term.push(&k, v);
    }
    obj.push("terminations", term);
    let mut grid = Value::object();
    grid.push("nx", spec.nx);
    grid.push("ny", spec.ny);
    grid.push("x_lo", spec.x_range.0);
    grid.push("x_hi", spec.x_range.1);
    grid.push("y_lo", spec.y_range.0);
    grid.push("y_hi", spec.y_range.1);
    grid.push("t_max", spec.t_max);
    grid.push("tol", spec.tol);
    obj.push("grid", grid);
    obj
}
