//! Browser bindings for three interactive plots. Each export returns a flat
//! `Float64Array` whose row layout is given in its doc comment.

use ewens_core::cesaro::{cesaro_mean, geometric_grid, SummabilityInput};
use ewens_core::ewens::{asymptotic_mean, big_n_coeffs, Family, MultiplicativeSpec};
use ewens_core::kernel::{b_majorant, beta_integral, c_by_recurrence};
use ewens_core::series::TailConfig;
use ewens_core::theta_binom::ThetaWeights;
use wasm_bindgen::prelude::*;

/// Largest n accepted by the curve functions, to keep the page responsive.
pub const MAX_N: usize = 4000;

type Plain<T> = std::result::Result<T, String>;

fn family(kind: &str, param: &str) -> Plain<Family> {
    let float = || param.trim().parse::<f64>().map_err(|_| format!("cannot read `{param}` as a number"));
    match kind {
        "constant" => Ok(Family::Constant { re: float()?, im: 0.0 }),
        "unimodular" => Ok(Family::Unimodular { tau: float()? }),
        "zero_on" => param
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| format!("cannot read `{s}` as a cycle length")))
            .collect::<Plain<Vec<_>>>()
            .map(|lengths| Family::ZeroOn { lengths }),
        "random_disk" => param.trim().parse::<u64>().map(|seed| Family::RandomDisk { seed }).map_err(|e| e.to_string()),
        _ => Err(format!("unknown family `{kind}`")),
    }
}

fn check_n(n: usize) -> Plain<()> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(format!("n must lie in 1..={MAX_N}"))
    }
}

/// Rows `[n, mean_re, mean_im, limit_re, limit_im]` for `n = 1..=n_max`.
/// The coefficient `N_n` only depends on `f̂(1..n)`, so one series serves
/// every prefix.
pub fn mean_curve_rows(kind: &str, param: &str, theta: f64, n_max: usize) -> Plain<Vec<f64>> {
    check_n(n_max)?;
    let fam = family(kind, param)?;
    let spec = fam.build(n_max).map_err(|e| e.to_string())?;
    let big_n = big_n_coeffs(&spec, theta, n_max).map_err(|e| e.to_string())?;
    let weights = ThetaWeights::new(theta, n_max).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(5 * n_max);
    for n in 1..=n_max {
        let mean = big_n.coeffs()[n] / weights.plus()[n];
        let head = MultiplicativeSpec::new(spec.fhat()[..n].to_vec()).map_err(|e| e.to_string())?;
        let limit = asymptotic_mean(&head, theta);
        out.extend([n as f64, mean.re, mean.im, limit.re, limit.im]);
    }
    Ok(out)
}

fn summability(series: &str, ratio: f64) -> Plain<SummabilityInput> {
    match series {
        "alternating" => Ok(SummabilityInput::alternating()),
        "alternating_linear" => Ok(SummabilityInput::alternating_linear()),
        "geometric" => SummabilityInput::geometric(ratio).map_err(|e| e.to_string()),
        _ => Err(format!("unknown series `{series}`")),
    }
}

/// Rows `[n, cesaro_re, cesaro_im, abel_re, abel_im]` on a doubling grid from
/// 10 to `n_max`, with Abel values at `x = e^{−1/n}`.
pub fn cesaro_abel_rows(series: &str, ratio: f64, p: f64, n_max: usize) -> Plain<Vec<f64>> {
    check_n(n_max)?;
    let a = summability(series, ratio)?;
    let grid = geometric_grid(10.min(n_max), n_max, 2.0).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(5 * grid.len());
    for n in grid {
        let c = cesaro_mean(&a, p, n).map_err(|e| e.to_string())?;
        let abel = a.abel_value((-1.0 / n as f64).exp(), TailConfig::default()).map_err(|e| e.to_string())?;
        out.extend([n as f64, c.re, c.im, abel.re, abel.im]);
    }
    Ok(out)
}

/// Rows `[m, c, plus_m B(j, θ+1), b]` for `m = 1..=m_max` at fixed `j`.
pub fn kernel_rows(theta: f64, j: usize, m_max: usize) -> Plain<Vec<f64>> {
    check_n(m_max)?;
    let c = c_by_recurrence(theta, m_max, j).map_err(|e| e.to_string())?;
    let beta = beta_integral(j, theta).map_err(|e| e.to_string())?;
    let weights = ThetaWeights::new(theta, m_max).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(4 * m_max);
    for (m, (&c_m, &plus_m)) in c.iter().zip(weights.plus()).enumerate().skip(1) {
        let b = b_majorant(theta, m, j).map_err(|e| e.to_string())?;
        out.extend([m as f64, c_m, plus_m * beta, b]);
    }
    Ok(out)
}

fn js(result: Plain<Vec<f64>>) -> Result<Vec<f64>, JsError> {
    result.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = meanCurve)]
pub fn mean_curve(kind: &str, param: &str, theta: f64, n_max: usize) -> Result<Vec<f64>, JsError> {
    js(mean_curve_rows(kind, param, theta, n_max))
}

#[wasm_bindgen(js_name = cesaroAbelCurve)]
pub fn cesaro_abel_curve(series: &str, ratio: f64, p: f64, n_max: usize) -> Result<Vec<f64>, JsError> {
    js(cesaro_abel_rows(series, ratio, p, n_max))
}

#[wasm_bindgen(js_name = kernelRow)]
pub fn kernel_row(theta: f64, j: usize, m_max: usize) -> Result<Vec<f64>, JsError> {
    js(kernel_rows(theta, j, m_max))
}
