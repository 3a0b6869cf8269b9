//! The `mean`, `verify` and `sample` runs.

use ewens_core::cesaro::{geometric_grid, tauber_conditions, thm1_residual, SummabilityInput, TauberRow};
use ewens_core::ewens::{mean_parts, mean_value, mean_value_exact, thm3_residual, MultiplicativeSpec};
use ewens_core::exact::{complex_to_f64, rational_to_f64, ExactComplex};
use ewens_core::kernel::check_lemma2;
use ewens_core::oracle::{brute_mean, brute_mean_exact, mc_mean, mc_statistic};
use ewens_core::thresholds::{Thresholds, Verdict};
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::Value;

use crate::error::{validation, CliResult};
use crate::report::{float, Row, RunReport, ThresholdsReport};
use crate::spec::{prefix, SpecInput};

pub fn parse_grid(text: &str) -> CliResult<Vec<usize>> {
    let bad = || validation(format!("grid `{text}` is not of the form a:b:factor"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, factor] = parts.as_slice() else { return Err(bad()) };
    let a = a.trim().parse::<usize>().map_err(|_| bad())?;
    let b = b.trim().parse::<usize>().map_err(|_| bad())?;
    let factor = factor.trim().parse::<f64>().map_err(|_| bad())?;
    Ok(geometric_grid(a, b, factor)?)
}

fn exact_text(q: &BigRational) -> String {
    q.to_string()
}

fn exact_complex_text(z: &ExactComplex) -> (String, String) {
    (exact_text(&z.re), exact_text(&z.im))
}

pub struct MeanArgs {
    pub exact: bool,
    pub oracle: bool,
}

pub fn mean(input: &SpecInput, args: MeanArgs, report: &mut RunReport) -> CliResult<()> {
    let n = input.n()?;
    let spec = input.resolve(n)?;
    let theta = input.theta()?;
    report.spec = Some(input.resolved_document(&spec)?);
    report.param("exact", args.exact);
    report.param("oracle", args.oracle);
    if args.exact {
        let q = theta.exact()?;
        let fhat = spec.to_exact()?;
        let m = mean_value_exact(&fhat, &q)?;
        let (mean_re, mean_im) = exact_complex_text(&m.mean);
        let (n_re, n_im) = exact_complex_text(&m.n_coeff);
        let mut row = Row::new(n)
            .text("theta", exact_text(&q))
            .complex("mean", complex_to_f64(&m.mean))
            .complex("n_coeff", complex_to_f64(&m.n_coeff))
            .num("weight", rational_to_f64(&m.weight))
            .text("mean_re_exact", mean_re)
            .text("mean_im_exact", mean_im)
            .text("n_coeff_re_exact", n_re)
            .text("n_coeff_im_exact", n_im)
            .text("weight_exact", exact_text(&m.weight));
        if args.oracle {
            let brute = brute_mean_exact(&fhat, &q)?;
            let diff = complex_to_f64(&(m.mean.clone() - brute.clone()));
            row = row.complex("brute", complex_to_f64(&brute)).num("discrepancy", diff.norm()).flag("exact_agreement", brute == m.mean);
        }
        report.rows.push(row);
    } else {
        let x = theta.float()?;
        let (m, big_n, weight) = mean_parts(&spec, x)?;
        let mut row = Row::new(n).num("theta", x).complex("mean", m).complex("n_coeff", big_n).num("weight", weight);
        if args.oracle {
            let brute = brute_mean(&spec, x)?;
            row = row.complex("brute", brute).num("discrepancy", (m - brute).norm());
        }
        report.rows.push(row);
    }
    Ok(())
}

/// The spec over the largest grid point; smaller grid points use its prefixes.
fn grid_spec(input: &SpecInput, grid: &[usize]) -> CliResult<MultiplicativeSpec> {
    let top = *grid.last().expect("grids are non-empty");
    match input.family() {
        Some(_) => input.resolve(top),
        None => {
            let spec = input.resolve(input.n()?)?;
            if top > spec.n() {
                return Err(validation(format!("grid reaches n = {top} but the explicit spec has n = {}", spec.n())));
            }
            Ok(spec)
        }
    }
}

fn grid_param(grid: &[usize]) -> Value {
    Value::from(grid.iter().map(|&n| n as u64).collect::<Vec<_>>())
}

fn set_verdict(report: &mut RunReport, v: Verdict) {
    report.verdict = Some(v);
}

pub fn verify_thm3(input: &SpecInput, p: f64, grid: &[usize], th: &Thresholds, report: &mut RunReport) -> CliResult<()> {
    let theta = input.theta()?.float()?;
    let spec = grid_spec(input, grid)?;
    spec.require_unit_disk()?;
    report.spec = Some(input.resolved_document(&spec)?);
    report.param("theta", float(theta));
    report.param("p", float(p));
    report.param("grid", grid_param(grid));
    let mut results = Vec::with_capacity(grid.len());
    for &n in grid {
        let r = thm3_residual(&prefix(&spec, n)?, theta, p)?;
        report.rows.push(
            Row::new(n)
                .complex("mean", r.mean)
                .complex("asymptotic", r.asymptotic)
                .num("mu", r.mu)
                .num("residual", r.residual)
                .num("ratio", r.ratio),
        );
        results.push(r);
    }
    set_verdict(report, th.thm3_verdict(&results));
    Ok(())
}

/// `alternating`, `alternating_linear`, `geometric:R`, or `exp_of_l` (needs a spec).
pub fn summability_input(name: &str, spec: Option<&MultiplicativeSpec>, theta: f64) -> CliResult<SummabilityInput> {
    let (kind, arg) = name.split_once(':').unwrap_or((name, ""));
    match kind {
        "alternating" => Ok(SummabilityInput::alternating()),
        "alternating_linear" => Ok(SummabilityInput::alternating_linear()),
        "geometric" => {
            let r = arg.parse::<f64>().map_err(|_| validation(format!("cannot parse ratio in `{name}`")))?;
            Ok(SummabilityInput::geometric(r)?)
        }
        "exp_of_l" => match spec {
            Some(spec) => Ok(SummabilityInput::exp_of_l(spec, theta)?),
            None => Err(validation("series exp_of_l needs a cycle-value spec (--spec or --family)")),
        },
        _ => Err(validation(format!(
            "unknown series `{name}` (alternating, alternating_linear, geometric:R, exp_of_l)"
        ))),
    }
}

fn needs_spec(series: &str) -> bool {
    series == "exp_of_l"
}

pub fn verify_thm1(
    input: &SpecInput,
    series: &str,
    grid: &[usize],
    j_cap_factor: f64,
    th: &Thresholds,
    report: &mut RunReport,
) -> CliResult<()> {
    let theta = input.theta()?.float()?;
    report.param("series", series);
    report.param("theta", float(theta));
    report.param("grid", grid_param(grid));
    report.param("j_cap_factor", float(j_cap_factor));
    let spec = if needs_spec(series) { Some(grid_spec(input, grid)?) } else { None };
    if let Some(spec) = &spec {
        report.spec = Some(input.resolved_document(spec)?);
    }
    let mut results = Vec::with_capacity(grid.len());
    for &n in grid {
        let restricted = spec.as_ref().map(|s| prefix(s, n)).transpose()?;
        let a = summability_input(series, restricted.as_ref(), theta)?;
        let r = thm1_residual(&a, theta, n, j_cap_factor)?;
        report.rows.push(
            Row::new(n)
                .int("j_cap", r.j_cap as u64)
                .complex("cesaro", r.cesaro)
                .complex("abel", r.abel)
                .num("lhs", r.lhs)
                .num("first_sum", r.first_sum)
                .num("second_sum", r.second_sum)
                .num("majorant", r.majorant)
                .num("last_term", r.last_term)
                .opt_num("ratio", r.ratio),
        );
        results.push(r);
    }
    set_verdict(report, th.thm1_verdict(&results));
    Ok(())
}

fn tauber_row(kind: &str, r: &TauberRow) -> Row {
    Row::new(r.n).text("kind", kind).complex("abel", r.abel).complex("cesaro", r.cesaro).complex("condition", r.condition)
}

fn describe(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}

pub fn verify_thm2(input: &SpecInput, series: &str, p: f64, grid: &[usize], report: &mut RunReport) -> CliResult<()> {
    let spec = if needs_spec(series) { Some(input.resolve(input.n()?)?) } else { None };
    let a = match &spec {
        Some(spec) => summability_input(series, Some(spec), input.theta()?.float()?)?,
        None => summability_input(series, None, p + 1.0)?,
    };
    if let Some(spec) = &spec {
        report.spec = Some(input.resolved_document(spec)?);
    }
    report.param("series", series);
    report.param("p", float(p));
    report.param("grid", grid_param(grid));
    let r = tauber_conditions(&a, p, grid)?;
    report.rows.extend(r.rows.iter().map(|row| tauber_row("grid", row)));
    report.rows.extend(r.companions.iter().map(|row| tauber_row("companion", row)));
    for (key, v) in [("abel_limit", r.abel_limit), ("cesaro_limit", r.cesaro_limit)] {
        report.summary.insert(format!("{key}_re"), float(v.re));
        report.summary.insert(format!("{key}_im"), float(v.im));
    }
    for (key, v) in [
        ("abel_converges", r.abel_converges),
        ("condition_vanishes", r.condition_vanishes),
        ("cesaro_converges", r.cesaro_converges),
        ("summable", r.summable),
        ("consistent", r.consistent),
    ] {
        report.summary.insert(key.into(), Value::Bool(v));
    }
    report.summary.insert("tol".into(), float(r.tol));
    let detail = if r.summable {
        format!("summable, A ≈ {}", describe(r.abel_limit))
    } else if !r.condition_vanishes {
        format!("not summable: condition does not vanish (Abel value {})", describe(r.abel_limit))
    } else {
        "not summable: Abel means do not settle".to_string()
    };
    set_verdict(report, Verdict { pass: r.consistent, detail });
    Ok(())
}

pub fn verify_lemma2(
    theta: f64,
    m_max: usize,
    j_max: usize,
    probes: &[usize],
    th: &Thresholds,
    report: &mut RunReport,
) -> CliResult<()> {
    report.param("theta", float(theta));
    report.param("m_max", m_max as u64);
    report.param("j_max", j_max as u64);
    report.param("probe_j", grid_param(probes));
    let r = check_lemma2(theta, m_max, j_max, probes)?;
    for d in &r.dyadic {
        for (&m, &e) in d.m.iter().zip(&d.normalized_error) {
            report.rows.push(Row::new(m).int("j", d.j as u64).num("normalized_error", e));
        }
    }
    report.summary.insert("cells".into(), Value::from(r.cells as u64));
    report.summary.insert("violations".into(), Value::from(r.violations as u64));
    report.summary.insert("worst_c_excess".into(), float(r.worst_c_excess));
    report.summary.insert("worst_b_excess".into(), float(r.worst_b_excess));
    report.summary.insert("route_rel_err".into(), float(r.route_rel_err));
    report.summary.insert("max_normalized_error".into(), float(r.max_normalized_error));
    report.summary.insert(
        "dyadic_spread".into(),
        Value::from(r.dyadic.iter().map(|d| float(d.spread)).collect::<Vec<_>>()),
    );
    set_verdict(report, th.lemma2_verdict(&r));
    Ok(())
}

fn z_score(estimate: Complex64, reference: Complex64, stderr: f64) -> f64 {
    let diff = (estimate - reference).norm();
    if diff <= 64.0 * f64::EPSILON * reference.norm().max(1.0) {
        0.0
    } else {
        diff / stderr
    }
}

/// Without a spec the statistic is the number of cycles, whose mean is `Σ θ/(θ+i)`.
pub fn sample(input: &SpecInput, samples: usize, seed: u64, report: &mut RunReport) -> CliResult<()> {
    let n = input.n()?;
    let theta = input.theta()?.float()?;
    report.seed = Some(seed);
    report.param("n", n as u64);
    report.param("theta", float(theta));
    report.param("samples", samples as u64);
    let row = Row::new(n).int("samples", samples as u64);
    let row = if input.source.is_some() {
        let spec = input.resolve(n)?;
        report.spec = Some(input.resolved_document(&spec)?);
        let mc = mc_mean(&spec, theta, samples, seed)?;
        let reference = mean_value(&spec, theta)?;
        row.text("statistic", "f")
            .complex("estimate", mc.estimate)
            .num("stderr", mc.stderr)
            .complex("series", reference)
            .num("z", z_score(mc.estimate, reference, mc.stderr))
    } else {
        let mc = mc_statistic(n, theta, samples, seed, |t| Complex64::new(t.cycles() as f64, 0.0))?;
        let expected: f64 = (0..n).map(|i| theta / (theta + i as f64)).sum();
        let (estimate, stderr) = (mc.estimate, mc.stderr);
        let reference = Complex64::new(expected, 0.0);
        row.text("statistic", "cycles")
            .complex("estimate", estimate)
            .num("stderr", stderr)
            .complex("series", reference)
            .num("z", z_score(estimate, reference, stderr))
    };
    report.rows.push(row);
    Ok(())
}

pub fn thresholds_report(th: Thresholds, overridden: Vec<&'static str>) -> ThresholdsReport {
    ThresholdsReport { values: th, overridden }
}
