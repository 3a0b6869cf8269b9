//! Cesàro means with real parameter, the weighted sums `S_θ(f; n)`, and the
//! bounded-ratio and Tauberian checks built on them.
//!
//! With `θ = p + 1`, the (C, p) mean of `Σ a_k` at `n` is
//! `Σ_{k≤n} a_k [z^{n−k}](1−z)^{−θ} / [z^n](1−z)^{−θ}`, and
//! `S_θ(f; n) = Σ_{k=1}^n k a_k [z^{n−k}](1−z)^{−θ} = [z^n] z f'(z) (1−z)^{−θ}`.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::ewens::{l_series, MultiplicativeSpec};
use crate::series::{eval_tail, CoeffStream, Envelope, TailConfig, TruncatedSeries};
use crate::theta_binom::{check_theta, ThetaWeights};

type AbelFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A replayable coefficient stream `a_k` with a certified envelope and, when
/// known, a closed form for `Σ a_k x^k`.
#[derive(Clone)]
pub struct SummabilityInput {
    label: String,
    stream: Arc<dyn CoeffStream + Send + Sync>,
    abel: Option<Arc<AbelFn>>,
}

impl fmt::Debug for SummabilityInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SummabilityInput")
            .field("label", &self.label)
            .field("envelope", &self.stream.envelope())
            .field("closed_form_abel", &self.abel.is_some())
            .finish()
    }
}

struct FnStream<F> {
    f: F,
    envelope: Envelope,
}

impl<F: Fn(usize) -> Complex64> CoeffStream for FnStream<F> {
    fn coeff(&self, k: usize) -> Complex64 {
        (self.f)(k)
    }
    fn envelope(&self) -> Envelope {
        self.envelope
    }
}

/// Coefficients of `exp(g)` for a polynomial `g` with `g(0) = 0`, extended
/// on demand. `Σ_m |h_m| ≤ exp(Σ_j |g_j|)` gives a constant envelope.
struct ExpOfPolynomial {
    weighted: Vec<Complex64>,
    cache: Mutex<Vec<Complex64>>,
    envelope: Envelope,
}

impl ExpOfPolynomial {
    fn new(g: &TruncatedSeries) -> Result<Self> {
        let g = g.truncate(g.degree());
        let head = g.exp()?.into_coeffs();
        let weighted = g.coeffs().iter().enumerate().map(|(j, &c)| c * j as f64).collect();
        let mass: f64 = g.coeffs().iter().map(|c| c.norm()).sum();
        Ok(Self { weighted, cache: Mutex::new(head), envelope: Envelope::polynomial(mass.exp(), 0.0) })
    }
}

impl CoeffStream for ExpOfPolynomial {
    fn coeff(&self, k: usize) -> Complex64 {
        let mut h = self.cache.lock().expect("coefficient cache poisoned");
        let degree = self.weighted.len() - 1;
        while h.len() <= k {
            let m = h.len();
            let mut acc = Complex64::zero();
            for j in 1..=degree.min(m) {
                acc += self.weighted[j] * h[m - j];
            }
            h.push(acc / m as f64);
        }
        h[k]
    }
    fn envelope(&self) -> Envelope {
        self.envelope
    }
}

impl SummabilityInput {
    pub fn from_fn<F>(label: impl Into<String>, envelope: Envelope, f: F) -> Self
    where
        F: Fn(usize) -> Complex64 + Send + Sync + 'static,
    {
        Self { label: label.into(), stream: Arc::new(FnStream { f, envelope }), abel: None }
    }

    /// Attaches a closed form for `x ↦ Σ a_k x^k` used instead of summation.
    pub fn with_abel<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        self.abel = Some(Arc::new(f));
        self
    }

    pub fn polynomial(label: impl Into<String>, series: TruncatedSeries) -> Self {
        let poly = series.clone();
        Self {
            label: label.into(),
            stream: Arc::new(series),
            abel: Some(Arc::new(move |x| poly.eval_polynomial(Complex64::new(x, 0.0)))),
        }
    }

    /// `a_k = (−1)^k`, Abel sum `1/(1+x)`.
    pub fn alternating() -> Self {
        Self::from_fn("alternating", Envelope::polynomial(1.0, 0.0), |k| {
            Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        })
    }

    /// `a_k = (−1)^k k`, Abel sum `−x/(1+x)²`.
    pub fn alternating_linear() -> Self {
        Self::from_fn("alternating_linear", Envelope::polynomial(1.0, 1.0), |k| {
            let v = k as f64;
            Complex64::new(if k % 2 == 0 { v } else { -v }, 0.0)
        })
    }

    /// `a_k = r^k` for `|r| ≤ 1`.
    pub fn geometric(r: f64) -> Result<Self> {
        if r.is_nan() || r.abs() > 1.0 {
            return Err(invalid(format!("geometric ratio {r} must satisfy |r| <= 1")));
        }
        Ok(Self::from_fn(format!("geometric({r})"), Envelope::polynomial(1.0, 0.0), move |k| {
            Complex64::new(r.powi(k as i32), 0.0)
        }))
    }

    /// `a_k = [z^k] exp(θ L_n(z))` for a multiplicative spec. The Abel value
    /// is `exp(θ L_n(x))` with `L_n` evaluated as a polynomial.
    pub fn exp_of_l(spec: &MultiplicativeSpec, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        let g = l_series(spec, spec.n())?.scale(Complex64::new(theta, 0.0));
        let stream = ExpOfPolynomial::new(&g)?;
        Ok(Self {
            label: format!("exp(theta*L_n), n={}", spec.n()),
            stream: Arc::new(stream),
            abel: Some(Arc::new(move |x| g.eval_polynomial(Complex64::new(x, 0.0)).exp())),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `a_0, ..., a_order` as a truncated series.
    pub fn head(&self, order: usize) -> TruncatedSeries {
        TruncatedSeries::new((0..=order).map(|k| self.stream.coeff(k)).collect())
            .expect("order + 1 coefficients")
    }

    /// `Σ a_k x^k`, from the closed form when one is attached.
    pub fn abel_value(&self, x: f64, config: TailConfig) -> Result<Complex64> {
        match &self.abel {
            Some(f) => Ok(f(x)),
            None => Ok(eval_tail(self.stream.as_ref(), x, config)?.value),
        }
    }
}

impl CoeffStream for SummabilityInput {
    fn coeff(&self, k: usize) -> Complex64 {
        self.stream.coeff(k)
    }
    fn envelope(&self) -> Envelope {
        self.stream.envelope()
    }
}

fn theta_from_p(p: f64) -> Result<f64> {
    if p.is_nan() || p <= -1.0 {
        return Err(invalid(format!("Cesàro parameter p must exceed -1, got {p}")));
    }
    Ok(p + 1.0)
}

fn weighted_sum(a: &SummabilityInput, plus: &[f64], n: usize, index_weight: bool) -> Complex64 {
    (0..=n)
        .map(|k| {
            let w = plus[n - k] * if index_weight { k as f64 } else { 1.0 };
            if w == 0.0 {
                Complex64::zero()
            } else {
                a.coeff(k) * w
            }
        })
        .sum()
}

/// The (C, p) mean at `n`.
pub fn cesaro_mean(a: &SummabilityInput, p: f64, n: usize) -> Result<Complex64> {
    let theta = theta_from_p(p)?;
    let weights = ThetaWeights::new(theta, n)?;
    Ok(weighted_sum(a, weights.plus(), n, false) / weights.plus()[n])
}

/// `S_θ(f; n)` by direct summation.
pub fn s_theta(a: &SummabilityInput, theta: f64, n: usize) -> Result<Complex64> {
    let weights = ThetaWeights::new(theta, n)?;
    Ok(weighted_sum(a, weights.plus(), n, true))
}

/// `S_θ(f; 0..=order)` as `[z^k] z f'(z) (1−z)^{−θ}`.
pub fn s_theta_sequence(a: &SummabilityInput, theta: f64, order: usize) -> Result<Vec<Complex64>> {
    let weights = ThetaWeights::new(theta, order)?;
    Ok(a.head(order).derivative_shift().times_plus(&weights).into_coeffs())
}

/// Default multiple of `n` at which the majorant sums are cut.
pub const DEFAULT_J_CAP_FACTOR: f64 = 40.0;
/// The last kept majorant term must be below this fraction of the total.
pub const TRUNCATION_WITNESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm1Report {
    pub label: String,
    pub n: usize,
    pub theta: f64,
    pub j_cap: usize,
    pub cesaro: Complex64,
    pub abel: Complex64,
    pub drift: Complex64,
    pub lhs: f64,
    pub first_sum: f64,
    pub second_sum: f64,
    pub majorant: f64,
    /// Last term included in the majorant; the truncation witness.
    pub last_term: f64,
    /// `lhs / majorant`, absent when the majorant vanishes.
    pub ratio: Option<f64>,
}

/// Compares the Cesàro mean with the Abel value plus drift, against the
/// two-sum majorant truncated at `J = ⌈j_cap_factor · n⌉`.
pub fn thm1_residual(a: &SummabilityInput, theta: f64, n: usize, j_cap_factor: f64) -> Result<Thm1Report> {
    check_theta(theta)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if j_cap_factor.is_nan() || j_cap_factor < 10.0 {
        return Err(invalid(format!("j_cap_factor must be at least 10, got {j_cap_factor}")));
    }
    let j_cap = (j_cap_factor * n as f64).ceil() as usize;
    let s = s_theta_sequence(a, theta, j_cap)?;
    let weights = ThetaWeights::new(theta, n)?;
    let plus_n = weights.plus()[n];
    let nf = n as f64;

    let cesaro = weighted_sum(a, weights.plus(), n, false) / plus_n;
    let abel = a.abel_value((-1.0 / nf).exp(), TailConfig::default())?;
    let drift = s[n] / (nf * plus_n);
    let lhs = (cesaro - abel - drift).norm();

    let mut first_sum = 0.0;
    let mut second_sum = 0.0;
    let mut last_term = 0.0;
    for (j, sj) in s.iter().enumerate().skip(1) {
        let jf = j as f64;
        let damp = (-jf / nf).exp();
        let mag = sj.norm();
        let t1 = mag * jf.powf(-theta) * damp / nf;
        let t2 = if j >= n { mag / jf * damp * nf.powf(-theta) } else { 0.0 };
        first_sum += t1;
        second_sum += t2;
        last_term = t1 + t2;
    }
    let majorant = first_sum + second_sum;
    let limit = TRUNCATION_WITNESS_TOL * majorant;
    if last_term > limit {
        return Err(Error::TruncationTooShort { cap: j_cap, last: last_term, limit });
    }
    Ok(Thm1Report {
        label: a.label.clone(),
        n,
        theta,
        j_cap,
        cesaro,
        abel,
        drift,
        lhs,
        first_sum,
        second_sum,
        majorant,
        last_term,
        ratio: (majorant > 0.0).then(|| lhs / majorant),
    })
}

/// `start, start·factor, ...` below `end`, then `end` itself.
pub fn geometric_grid(start: usize, end: usize, factor: f64) -> Result<Vec<usize>> {
    if start == 0 || end < start || factor.is_nan() || factor <= 1.0 {
        return Err(invalid(format!("bad grid {start}:{end}:{factor}")));
    }
    let mut grid = Vec::new();
    let mut x = start as f64;
    while (x.round() as usize) < end {
        let v = x.round() as usize;
        if grid.last() != Some(&v) {
            grid.push(v);
        }
        x *= factor;
    }
    grid.push(end);
    Ok(grid)
}

/// Closeness tolerance of the finite limit certificate.
pub const TAUBER_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauberRow {
    pub n: usize,
    /// `Σ a_k e^{−k/n}`
    pub abel: Complex64,
    pub cesaro: Complex64,
    /// `S_{p+1}(f; n) / n^{p+1}`
    pub condition: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauberReport {
    pub label: String,
    pub p: f64,
    pub rows: Vec<TauberRow>,
    /// Rows at `n + 1` for the last three grid points; parity oscillation shows here.
    pub companions: Vec<TauberRow>,
    pub abel_limit: Complex64,
    pub cesaro_limit: Complex64,
    /// Abel values settle (first condition).
    pub abel_converges: bool,
    /// `S_{p+1}(f; n)/n^{p+1}` is below tolerance at the tail of the grid (second condition).
    pub condition_vanishes: bool,
    pub cesaro_converges: bool,
    /// Both conditions hold, so the series is (C, p) summable with sum `abel_limit`.
    pub summable: bool,
    /// The observed Cesàro behaviour agrees with the verdict from the two conditions.
    pub consistent: bool,
    pub tol: f64,
}

fn spread(values: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).norm());
        }
    }
    worst
}

fn tauber_row(a: &SummabilityInput, theta: f64, n: usize) -> Result<TauberRow> {
    let weights = ThetaWeights::new(theta, n)?;
    let plus_n = weights.plus()[n];
    let nf = n as f64;
    Ok(TauberRow {
        n,
        abel: a.abel_value((-1.0 / nf).exp(), TailConfig::default())?,
        cesaro: weighted_sum(a, weights.plus(), n, false) / plus_n,
        condition: weighted_sum(a, weights.plus(), n, true) / nf.powf(theta),
    })
}

/// Evaluates both summability conditions and the Cesàro means on `grid`,
/// and certifies limits from the last three grid points (plus `n + 1`).
pub fn tauber_conditions(a: &SummabilityInput, p: f64, grid: &[usize]) -> Result<TauberReport> {
    let theta = theta_from_p(p)?;
    check_theta(theta)?;
    if grid.len() < 3 || grid.contains(&0) {
        return Err(invalid("the n-grid needs at least three positive points"));
    }
    let rows: Vec<TauberRow> = grid.iter().map(|&n| tauber_row(a, theta, n)).collect::<Result<_>>()?;
    let tail = &grid[grid.len() - 3..];
    let companions: Vec<TauberRow> = tail.iter().map(|&n| tauber_row(a, theta, n + 1)).collect::<Result<_>>()?;
    let last_rows: Vec<&TauberRow> = rows[rows.len() - 3..].iter().chain(&companions).collect();

    let abel: Vec<Complex64> = last_rows.iter().map(|r| r.abel).collect();
    let cesaro: Vec<Complex64> = last_rows.iter().map(|r| r.cesaro).collect();
    let abel_converges = spread(&abel) <= TAUBER_TOL;
    let cesaro_converges = spread(&cesaro) <= TAUBER_TOL;
    let condition_vanishes = last_rows.iter().all(|r| r.condition.norm() <= TAUBER_TOL);
    let last = rows.last().expect("non-empty grid");
    let abel_limit = last.abel;
    let cesaro_limit = last.cesaro;
    let summable = abel_converges && condition_vanishes;
    let consistent = if summable {
        cesaro_converges && (cesaro_limit - abel_limit).norm() <= TAUBER_TOL
    } else {
        !cesaro_converges || !abel_converges || (cesaro_limit - abel_limit).norm() > TAUBER_TOL
    };
    Ok(TauberReport {
        label: a.label.clone(),
        p,
        rows,
        companions,
        abel_limit,
        cesaro_limit,
        abel_converges,
        condition_vanishes,
        cesaro_converges,
        summable,
        consistent,
        tol: TAUBER_TOL,
    })
}

/// Max over `1 ≤ n ≤ N` of `|n a_n − Σ_{k=1}^n S_θ(f;k) [z^{n−k}](1−z)^θ|`.
pub fn inversion_check(a: &SummabilityInput, theta: f64, order: usize) -> Result<f64> {
    let weights = ThetaWeights::new(theta, order)?;
    let s: Vec<Complex64> = (0..=order).map(|n| s_theta(a, theta, n)).collect::<Result<_>>()?;
    let minus = weights.minus();
    let mut worst = 0.0f64;
    for n in 1..=order {
        let rhs: Complex64 = (1..=n).map(|k| s[k] * minus[n - k]).sum();
        worst = worst.max((a.coeff(n) * n as f64 - rhs).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn poly(v: &[f64]) -> SummabilityInput {
        SummabilityInput::polynomial("poly", TruncatedSeries::from_real(v).unwrap())
    }

    #[test]
    fn cesaro_examples() {
        let a = poly(&[0.5, -1.0, 3.0, 0.25, 2.0]);
        for n in 0..6 {
            let partial: Complex64 = (0..=n).map(|k| a.coeff(k)).sum();
            assert_eq!(cesaro_mean(&a, 0.0, n).unwrap(), partial);
        }
        let alt = SummabilityInput::alternating();
        assert!((cesaro_mean(&alt, 1.0, 2).unwrap() - 2.0 / 3.0).norm() < 1e-15);
        assert!((cesaro_mean(&alt, 1.0, 3).unwrap() - 0.5).norm() < 1e-15);
        assert!(cesaro_mean(&alt, -1.0, 3).is_err());
    }

    #[test]
    fn s_theta_examples() {
        let one = poly(&[1.0]);
        assert!((1..10).all(|n| s_theta(&one, 1.7, n).unwrap() == Complex64::zero()));
        let z = poly(&[0.0, 1.0]);
        assert!((1..10).all(|n| s_theta(&z, 1.0, n).unwrap() == c(1.0)));
        let ones = SummabilityInput::from_fn("ones", Envelope::polynomial(1.0, 0.0), |_| c(1.0));
        assert_eq!(s_theta(&ones, 1.0, 3).unwrap(), c(6.0));
        // [z^3] z/(1−z)^3 = C(4, 2) = 6
        let seq = s_theta_sequence(&ones, 1.0, 3).unwrap();
        assert_eq!(seq[3], c(6.0));
    }

    #[test]
    fn s_theta_routes_agree() {
        let a = SummabilityInput::from_fn("mixed", Envelope::polynomial(1.0, 0.0), |k| {
            Complex64::from_polar(1.0 / (1.0 + k as f64), 0.3 * k as f64)
        });
        for theta in [0.5, 1.0, 2.0, 2.5] {
            let seq = s_theta_sequence(&a, theta, 60).unwrap();
            for n in 0..=60 {
                let direct = s_theta(&a, theta, n).unwrap();
                assert!((direct - seq[n]).norm() <= 1e-12 * (1.0 + direct.norm()), "theta={theta} n={n}");
            }
        }
    }

    #[test]
    fn thm1_trivial_series() {
        let a = poly(&[1.0]);
        let r = thm1_residual(&a, 1.5, 30, 40.0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.ratio, None);
        assert!(thm1_residual(&a, 1.5, 30, 5.0).is_err());
        assert!(thm1_residual(&a, 1.5, 0, 40.0).is_err());
    }

    #[test]
    fn thm1_alternating_bounded() {
        let a = SummabilityInput::alternating();
        let r = thm1_residual(&a, 1.0, 100, DEFAULT_J_CAP_FACTOR).unwrap();
        assert!(r.ratio.unwrap() <= 10.0);
        assert!(r.last_term <= 1e-12 * r.majorant);
        assert!((r.abel - c(1.0 / (1.0 + (-0.01f64).exp()))).norm() < 1e-13);
    }

    #[test]
    fn thm1_truncation_witness_fires() {
        // a slowly damped cap leaves a visible last term
        let a = SummabilityInput::alternating_linear();
        let err = thm1_residual(&a, 2.0, 50, 10.0).unwrap_err();
        assert!(matches!(err, Error::TruncationTooShort { .. }));
    }

    #[test]
    fn exp_of_l_stream_extends_consistently() {
        let spec = MultiplicativeSpec::random_disk(6, 2).unwrap();
        let a = SummabilityInput::exp_of_l(&spec, 1.5).unwrap();
        let g = l_series(&spec, 80).unwrap().scale(c(1.5)).exp().unwrap();
        for k in (0..=80).rev() {
            assert!((a.coeff(k) - g.coeffs()[k]).norm() < 1e-14);
        }
        let x = 0.7;
        let via_sum = eval_tail(&a, x, TailConfig { tol: 1e-15, max_terms: 100_000 }).unwrap().value;
        let closed = a.abel_value(x, TailConfig::default()).unwrap();
        assert!((via_sum - closed).norm() < 1e-13);
    }

    #[test]
    fn grid_construction() {
        assert_eq!(geometric_grid(100, 1600, 4.0).unwrap(), vec![100, 400, 1600]);
        assert_eq!(geometric_grid(10, 100, 3.0).unwrap(), vec![10, 30, 90, 100]);
        assert!(geometric_grid(0, 10, 2.0).is_err());
        assert!(geometric_grid(10, 100, 1.0).is_err());
    }

    #[test]
    fn tauber_trivial_series() {
        let a = poly(&[1.0]);
        let r = tauber_conditions(&a, 0.5, &[10, 20, 40, 80]).unwrap();
        assert!(r.summable && r.consistent && r.cesaro_converges);
        assert!((r.abel_limit - 1.0).norm() < 1e-15);
        assert!((r.cesaro_limit - 1.0).norm() < 1e-15);
        assert!(r.rows.iter().all(|row| row.condition == Complex64::zero()));
    }

    #[test]
    fn tauber_parity_oscillation_is_caught() {
        // (C,0) partial sums of (−1)^k are 1 at even n and 0 at odd n
        let r = tauber_conditions(&SummabilityInput::alternating(), 0.0, &[1000, 2000, 4000, 8000]).unwrap();
        assert!(r.abel_converges);
        assert!(!r.cesaro_converges);
        assert!(!r.summable);
        assert!(r.consistent);
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(inversion_check(&poly(&[0.0]), 1.3, 20).unwrap(), 0.0);
        let z = poly(&[0.0, 1.0]);
        assert!(inversion_check(&z, 2.0, 40).unwrap() < 1e-13);
        let a = poly(&[0.3, -0.7, 0.2, 0.9, -0.4, 0.1]);
        assert!(inversion_check(&a, 1.0, 50).unwrap() <= 1e-11);
    }

    #[test]
    fn regularity_on_geometric_series() {
        let a = SummabilityInput::geometric(0.5).unwrap();
        for p in [0.5, 1.0, 2.0] {
            let m = cesaro_mean(&a, p, 100_000).unwrap();
            assert!((m - 2.0).norm() <= 1e-4, "p={p} mean={m}");
        }
    }
}
