use std::fs;
use std::path::Path;

use fock_radial::approx::{
    plan_c0, plan_convergent, plan_finite, verify_plan, ApproximationPlan, PlanFile, VerifyReport,
};
use fock_radial::eigenvalues::{gamma_sequence_with, EigenSeq, EngineChoice, QuadConfig};
use fock_radial::json::JsonComplex;
use fock_radial::seqspace::{
    lipschitz_seminorm, modulus_of_continuity, shift_difference_sup, vp_smooth, vp_smooth_prefix,
};
use fock_radial::{eval_symbol, Complex64, SeqWindow, Tail};
use serde_json::{json, Value};

use crate::args::{Command, EngineArg, OutputOpts};
use crate::error::{CliError, CliResult};
use crate::inputs::{load_symbol, load_target};
use crate::output::{emit, num, Report};

pub fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Eigs {
            symbol,
            n_max,
            engine,
            rel_tol,
            max_subdivisions,
            out,
        } => eigs(&symbol, n_max, engine, rel_tol, max_subdivisions, &out),
        Command::Approximate {
            target,
            epsilon,
            plan_out,
            xi,
            n_verify,
            out,
        } => approximate(&target, epsilon, plan_out.as_deref(), xi, n_verify, &out),
        Command::Verify {
            plan,
            n_verify,
            out,
        } => verify(&plan, n_verify, &out),
        Command::SymbolEval { symbol, x, out } => symbol_eval(&symbol, &x, &out),
        Command::Smooth { target, delta, out } => smooth(&target, delta, &out),
        Command::Diagnose { target, n_max, out } => diagnose(&target, n_max, &out),
    }
}

fn eigs(
    symbol: &str,
    n_max: usize,
    engine: EngineArg,
    rel_tol: Option<f64>,
    max_subdivisions: Option<usize>,
    out: &OutputOpts,
) -> CliResult<()> {
    let mut cfg = QuadConfig::default();
    if let Some(t) = rel_tol {
        cfg.rel_tol = t;
    }
    if let Some(m) = max_subdivisions {
        cfg.max_subdivisions = m;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let s = load_symbol(symbol)?;

    let closed = match engine {
        EngineArg::Closed | EngineArg::Both => Some(gamma_sequence_with(
            &s,
            n_max,
            EngineChoice::ClosedForm,
            &cfg,
        )?),
        EngineArg::Quad => None,
    };
    let quad = match engine {
        EngineArg::Quad | EngineArg::Both => Some(gamma_sequence_with(
            &s,
            n_max,
            EngineChoice::Quadrature,
            &cfg,
        )?),
        EngineArg::Closed => None,
    };
    let label = match engine {
        EngineArg::Closed => "closed",
        EngineArg::Quad => "quad",
        EngineArg::Both => "both",
    };

    let primary: &EigenSeq = closed.as_ref().or(quad.as_ref()).expect("an engine ran");
    let mut header = vec!["n", "gamma", "gamma_im", "engine", "est_err"];
    if engine == EngineArg::Both {
        header.push("abs_diff");
    }
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for (i, e) in primary.entries.iter().enumerate() {
        let est_err = quad.as_ref().map_or(0.0, |q| q.entries[i].est_abs_err());
        let mut row = vec![
            e.n.to_string(),
            num(e.value.re),
            num(e.value.im),
            label.to_string(),
            num(est_err),
        ];
        let mut jr = json!({
            "n": e.n,
            "gamma": JsonComplex(e.value),
            "engine": label,
            "est_err": est_err,
        });
        if let (Some(c), Some(q)) = (&closed, &quad) {
            let d = (c.entries[i].value - q.entries[i].value).norm();
            row.push(num(d));
            jr["abs_diff"] = json!(d);
        }
        rows.push(row);
        json_rows.push(jr);
    }
    let report = Report {
        header,
        rows,
        json: json!({ "symbol": primary.symbol, "engine": label, "rows": json_rows }),
    };
    emit(&report, out)?;

    if let Some(q) = &quad {
        let bad: Vec<usize> = q.unconverged().map(|e| e.n).collect();
        if !bad.is_empty() {
            return Err(CliError::Numeric(format!(
                "quadrature did not reach tolerance for n = {bad:?}"
            )));
        }
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> CliResult<()> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(CliError::Usage(format!(
            "--epsilon must be positive and finite, got {epsilon}"
        )));
    }
    Ok(())
}

fn make_plan(target: &SeqWindow, epsilon: f64) -> CliResult<ApproximationPlan> {
    let plan = match target.tail() {
        Tail::Zero => plan_finite(target, epsilon),
        Tail::Limit { p, .. } if p.norm() == 0.0 => plan_c0(target, epsilon),
        Tail::Limit { .. } => plan_convergent(target, epsilon),
        Tail::Unknown => {
            return Err(CliError::Validation(
                "target tail is \"unknown\"; approximation needs a certified tail \
                 (kind \"zero\" or \"limit\")"
                    .into(),
            ))
        }
    };
    Ok(plan?)
}

fn plan_report(plan: &ApproximationPlan, report: &VerifyReport) -> Report {
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                num(r.target.re),
                num(r.gamma.re),
                num(r.abs_error),
                num(r.target.im),
                num(r.gamma.im),
            ]
        })
        .collect();
    let json_rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "target": JsonComplex(r.target),
                "gamma": JsonComplex(r.gamma),
                "abs_error": r.abs_error,
            })
        })
        .collect();
    Report {
        header: vec!["n", "target", "gamma", "abs_error", "target_im", "gamma_im"],
        rows,
        json: json!({
            "plan": PlanFile::from_plan(plan),
            "report": {
                "verified_error": report.verified_error,
                "tail_certificate": report.tail_certificate,
                "tail_certified": report.tail_certified,
                "passed": report.passed,
                "rows": json_rows,
            },
        }),
    }
}

fn summarize(plan: &ApproximationPlan, report: &VerifyReport) -> CliResult<()> {
    eprintln!(
        "epsilon={} N={} xi={} predicted_bound={} verified_error={} tail_certificate={} passed={}",
        num(plan.epsilon),
        plan.n_terms,
        plan.xi,
        num(plan.predicted_bound),
        num(report.verified_error),
        num(report.tail_certificate),
        report.passed
    );
    if !report.tail_certified {
        eprintln!(
            "note: the tail bound assumes a monotone tail; the target carries no certified bound"
        );
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "certification failed: verified_error + tail_certificate = {} exceeds epsilon = {}",
            report.verified_error + report.tail_certificate,
            plan.epsilon
        )))
    }
}

fn check_n_verify(plan: &ApproximationPlan, n: usize) -> CliResult<()> {
    if n < plan.n_terms {
        return Err(CliError::Usage(format!(
            "--n-verify {n} is below the plan's N = {}",
            plan.n_terms
        )));
    }
    Ok(())
}

fn approximate(
    target: &str,
    epsilon: f64,
    plan_out: Option<&Path>,
    xi: Option<u64>,
    n_verify: Option<usize>,
    out: &OutputOpts,
) -> CliResult<()> {
    check_epsilon(epsilon)?;
    let target = load_target(target)?;
    let mut plan = make_plan(&target, epsilon)?;
    if let Some(xi) = xi {
        plan = plan
            .with_xi(xi)
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let n = n_verify.unwrap_or_else(|| plan.default_verify_window());
    check_n_verify(&plan, n)?;
    let (plan, report) = plan.verified(n)?;
    if let Some(path) = plan_out {
        fs::write(path, PlanFile::from_plan(&plan).to_json_string() + "\n")?;
    }
    emit(&plan_report(&plan, &report), out)?;
    summarize(&plan, &report)
}

fn verify(path: &Path, n_verify: Option<usize>, out: &OutputOpts) -> CliResult<()> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read '{}': {e}", path.display())))?;
    let plan = PlanFile::from_json_str(&text)?.to_plan()?;
    let n = n_verify
        .or(plan.verify_window)
        .unwrap_or_else(|| plan.default_verify_window());
    check_n_verify(&plan, n)?;
    let report = verify_plan(&plan, n)?;
    if let (Some(recorded), Some(w)) = (plan.verified_error, plan.verify_window) {
        if w == n && recorded != report.verified_error {
            eprintln!(
                "warning: recorded verified_error {recorded} differs from recomputed {}",
                report.verified_error
            );
        }
    }
    emit(&plan_report(&plan, &report), out)?;
    summarize(&plan, &report)
}

fn symbol_eval(symbol: &str, xs: &[f64], out: &OutputOpts) -> CliResult<()> {
    if let Some(bad) = xs
        .iter()
        .find(|x| x.is_sign_negative() && **x != 0.0 || !x.is_finite())
    {
        return Err(CliError::Usage(format!(
            "evaluation points must be finite and >= 0, got {bad}"
        )));
    }
    let s = load_symbol(symbol)?;
    let values = xs
        .iter()
        .map(|&x| eval_symbol(&s, x))
        .collect::<Result<Vec<Complex64>, _>>()?;
    let rows = xs
        .iter()
        .zip(&values)
        .map(|(x, v)| vec![num(*x), num(v.re), num(v.im)])
        .collect();
    let json_rows: Vec<Value> = xs
        .iter()
        .zip(&values)
        .map(|(x, v)| json!({ "x": x, "value": JsonComplex(*v) }))
        .collect();
    emit(
        &Report {
            header: vec!["x", "re", "im"],
            rows,
            json: json!({ "symbol": s.describe(), "rows": json_rows }),
        },
        out,
    )
}

const SLACK: f64 = 1e-12;

fn smooth(target: &str, delta: f64, out: &OutputOpts) -> CliResult<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CliError::Usage(format!(
            "--delta must lie in (0, 1), got {delta}"
        )));
    }
    let sigma = load_target(target)?;
    let y = if sigma.tail() == Tail::Unknown {
        let y = vp_smooth_prefix(&sigma, delta)?;
        eprintln!(
            "note: tail unknown; smoothed only the first {} indices whose blocks fit in the window",
            y.len()
        );
        y
    } else {
        vp_smooth(&sigma, delta)?
    };
    let omega = modulus_of_continuity(&sigma, delta)?;
    let mut sup_diff = 0.0f64;
    let mut rows = Vec::with_capacity(y.len());
    let mut json_rows = Vec::with_capacity(y.len());
    for (j, (yv, sv)) in y.values().iter().zip(sigma.values()).enumerate() {
        let d = (yv - sv).norm();
        sup_diff = sup_diff.max(d);
        rows.push(vec![
            j.to_string(),
            num(sv.re),
            num(yv.re),
            num(d),
            num(sv.im),
            num(yv.im),
        ]);
        json_rows.push(
            json!({ "j": j, "sigma": JsonComplex(*sv), "y": JsonComplex(*yv), "abs_diff": d }),
        );
    }
    let holds = sup_diff <= omega + SLACK;
    let report = Report {
        header: vec!["j", "sigma", "y", "abs_diff", "sigma_im", "y_im"],
        rows,
        json: json!({
            "delta": delta,
            "summary": {
                "sup_diff": sup_diff,
                "modulus": omega,
                "bound_holds": holds,
                "window": y.len(),
            },
            "rows": json_rows,
        }),
    };
    emit(&report, out)?;
    eprintln!(
        "delta={delta} window={} sup_diff={sup_diff} modulus={omega} bound_holds={holds}",
        y.len()
    );
    if holds {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "smoothing error {sup_diff} exceeds the windowed modulus {omega}"
        )))
    }
}

const DIAGNOSE_DELTAS: [f64; 4] = [0.05, 0.1, 0.2, 0.4];

fn diagnose(target: &str, n_max: Option<usize>, out: &OutputOpts) -> CliResult<()> {
    let mut sigma = load_target(target)?;
    if let Some(n) = n_max {
        sigma = sigma.truncated(n + 1)?;
    }
    let len = sigma.len();
    let mut entries: Vec<(&str, String, f64)> = Vec::new();
    if len >= 2 {
        entries.push((
            "lipschitz_seminorm",
            String::new(),
            lipschitz_seminorm(&sigma)?,
        ));
    }
    for d in DIAGNOSE_DELTAS {
        entries.push((
            "modulus",
            format!("delta={d}"),
            modulus_of_continuity(&sigma, d)?,
        ));
    }
    let mut starts: Vec<usize> = [0, len / 8, len / 4, len / 2, 3 * len / 4]
        .into_iter()
        .filter(|&n| n + 1 < len)
        .collect();
    starts.dedup();
    for n_from in starts {
        entries.push((
            "shift_difference",
            format!("k=1;n_from={n_from}"),
            shift_difference_sup(&sigma, 1, n_from)?,
        ));
    }
    let rows = entries
        .iter()
        .map(|(m, p, v)| vec![m.to_string(), p.clone(), num(*v)])
        .collect();
    let json_rows: Vec<Value> = entries
        .iter()
        .map(|(m, p, v)| json!({ "metric": m, "parameter": p, "value": v }))
        .collect();
    emit(
        &Report {
            header: vec!["metric", "parameter", "value"],
            rows,
            json: json!({ "window": len, "rows": json_rows }),
        },
        out,
    )
}
