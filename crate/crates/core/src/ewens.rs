//! Mean values of multiplicative functions on `S_n` under the Ewens measure.
//!
//! `M_n(f) = N_n / [z^n](1 - z)^{-θ}` where `N_m` are the Taylor coefficients of
//! `F(z) = exp(θ Σ f̂(j) z^j / j)`. With `f̂(j) = 1` for `j > n` this factors as
//! `exp(θ L_n(z)) / (1 - z)^θ`, `L_n(z) = Σ_{j≤n} (f̂(j) − 1) z^j / j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::exact::{self, ExactComplex};
use crate::series::TruncatedSeries;
use crate::theta_binom::{self, check_theta, ThetaWeights};

/// Relative disagreement between the two `N_m` routes that aborts a run.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// Rounding slack when testing `|f̂(j)| ≤ 1` (unimodular values land on 1 ± ulp).
const UNIT_DISK_SLACK: f64 = 4.0 * f64::EPSILON;

/// Cycle values `f̂(1), ..., f̂(n)` of a multiplicative function on `S_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicativeSpec {
    fhat: Vec<Complex64>,
}

impl MultiplicativeSpec {
    pub fn new(fhat: Vec<Complex64>) -> Result<Self> {
        if fhat.is_empty() {
            return Err(invalid("a multiplicative spec needs n >= 1 cycle values"));
        }
        if let Some(j) = fhat.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(invalid(format!("fhat({}) is not finite", j + 1)));
        }
        Ok(Self { fhat })
    }

    /// `f̂ ≡ u`.
    pub fn constant(n: usize, u: Complex64) -> Result<Self> {
        Self::new(vec![u; n])
    }

    /// `f̂ ≡ e^{iτ}`.
    pub fn unimodular(n: usize, tau: f64) -> Result<Self> {
        Self::constant(n, Complex64::from_polar(1.0, tau))
    }

    /// `f̂(j) = 0` for `j` in `lengths`, 1 otherwise: the indicator of avoiding
    /// those cycle lengths.
    pub fn zero_on(n: usize, lengths: &[usize]) -> Result<Self> {
        let mut fhat = vec![Complex64::one(); n];
        for &j in lengths {
            if j == 0 || j > n {
                return Err(invalid(format!("cycle length {j} outside 1..={n}")));
            }
            fhat[j - 1] = Complex64::zero();
        }
        Self::new(fhat)
    }

    /// Values drawn uniformly from the closed unit disk (ChaCha8, seeded).
    pub fn random_disk(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fhat = (0..n)
            .map(|_| {
                let r: f64 = rng.gen::<f64>().sqrt();
                let phi: f64 = 2.0 * PI * rng.gen::<f64>();
                Complex64::from_polar(r, phi)
            })
            .collect();
        Self::new(fhat)
    }

    pub fn n(&self) -> usize {
        self.fhat.len()
    }

    pub fn fhat(&self) -> &[Complex64] {
        &self.fhat
    }

    /// `f̂(j)` with the convention `f̂(j) = 1` for `j > n`.
    pub fn value(&self, j: usize) -> Complex64 {
        assert!(j >= 1, "cycle lengths start at 1");
        self.fhat.get(j - 1).copied().unwrap_or_else(Complex64::one)
    }

    pub fn in_unit_disk(&self) -> bool {
        self.fhat.iter().all(|c| c.norm() <= 1.0 + UNIT_DISK_SLACK)
    }

    pub fn require_unit_disk(&self) -> Result<()> {
        match self.fhat.iter().position(|c| c.norm() > 1.0 + UNIT_DISK_SLACK) {
            None => Ok(()),
            Some(j) => Err(invalid(format!(
                "|fhat({})| = {} exceeds 1",
                j + 1,
                self.fhat[j].norm()
            ))),
        }
    }

    /// Exact rational copy of the cycle values (every finite float is rational).
    pub fn to_exact(&self) -> Result<Vec<ExactComplex>> {
        self.fhat.iter().map(|&c| exact::complex_from_f64(c)).collect()
    }
}

/// Named spec families, resolved to explicit cycle values before computing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Constant {
        #[serde(default)]
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Unimodular { tau: f64 },
    ZeroOn { lengths: Vec<usize> },
    RandomDisk { seed: u64 },
}

impl Family {
    pub fn build(&self, n: usize) -> Result<MultiplicativeSpec> {
        match self {
            Family::Constant { re, im } => MultiplicativeSpec::constant(n, Complex64::new(*re, *im)),
            Family::Unimodular { tau } => MultiplicativeSpec::unimodular(n, *tau),
            Family::ZeroOn { lengths } => MultiplicativeSpec::zero_on(n, lengths),
            Family::RandomDisk { seed } => MultiplicativeSpec::random_disk(n, *seed),
        }
    }
}

/// `L_n(z)` as a series of the given order (`order ≥ n`).
pub fn l_series(spec: &MultiplicativeSpec, order: usize) -> Result<TruncatedSeries> {
    if order < spec.n() {
        return Err(invalid(format!("order {order} is below n = {}", spec.n())));
    }
    let mut coeffs = vec![Complex64::zero(); order + 1];
    for (j, &f) in spec.fhat.iter().enumerate() {
        coeffs[j + 1] = (f - 1.0) / (j + 1) as f64;
    }
    TruncatedSeries::new(coeffs)
}

/// `N_0..N_order`, the coefficients of `F(z)`.
///
/// Route (a) multiplies `exp(θ L_n)` by the `(1 - z)^{-θ}` weights; route (b)
/// exponentiates `θ Σ_{j≤order} f̂(j) z^j / j` directly. Route (a) is returned.
/// Disagreement is measured against `max(|N_k|, [z^k](1 - z)^{-θ})`, the
/// natural size of `N_k` for cycle values in the unit disk.
pub fn big_n_coeffs(spec: &MultiplicativeSpec, theta: f64, order: usize) -> Result<TruncatedSeries> {
    check_theta(theta)?;
    let weights = ThetaWeights::new(theta, order)?;
    let via_l = l_series(spec, order)?.scale(Complex64::new(theta, 0.0)).exp()?.times_plus(&weights);

    let mut g = vec![Complex64::zero(); order + 1];
    for (j, slot) in g.iter_mut().enumerate().skip(1) {
        *slot = spec.value(j) * (theta / j as f64);
    }
    let direct = TruncatedSeries::new(g)?.exp()?;

    let mut worst = 0.0f64;
    for k in 0..=order {
        let a = via_l.coeffs()[k];
        let b = direct.coeffs()[k];
        let scale = weights.plus()[k].max(a.norm()).max(b.norm());
        worst = worst.max((a - b).norm() / scale);
    }
    if !worst.is_finite() || worst > CROSS_CHECK_TOL {
        return Err(Error::CrossCheck { what: "N_m coefficients", rel_err: worst, tol: CROSS_CHECK_TOL });
    }
    Ok(via_l)
}

/// `M_n(f) = N_n / [z^n](1 - z)^{-θ}`.
pub fn mean_value(spec: &MultiplicativeSpec, theta: f64) -> Result<Complex64> {
    Ok(mean_parts(spec, theta)?.0)
}

/// `(M_n(f), N_n, plus_n)`.
pub fn mean_parts(spec: &MultiplicativeSpec, theta: f64) -> Result<(Complex64, Complex64, f64)> {
    let n = spec.n();
    let big_n = big_n_coeffs(spec, theta, n)?.coeffs()[n];
    let weight = theta_binom::coeff_plus(theta, n)?;
    Ok((big_n / weight, big_n, weight))
}

/// Exact `M_n(f)` for rational θ and rational cycle values.
pub fn mean_value_exact(fhat: &[ExactComplex], theta: &BigRational) -> Result<ExactMean> {
    let n = fhat.len();
    if n == 0 {
        return Err(invalid("a multiplicative spec needs n >= 1 cycle values"));
    }
    let mut g = vec![ExactComplex::zero(); n + 1];
    for (j, f) in fhat.iter().enumerate() {
        g[j + 1] = f.scale(theta / BigRational::from_integer((j + 1).into()));
    }
    let big_n = exact::exp_series(&g)?.pop().expect("order n series");
    let weight = theta_binom::exact::coeff_plus(theta, n)?;
    let mean = big_n.unscale(weight.clone());
    Ok(ExactMean { mean, n_coeff: big_n, weight })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactMean {
    pub mean: ExactComplex,
    pub n_coeff: ExactComplex,
    pub weight: BigRational,
}

/// `μ_n(p) = ((1/n) Σ |f̂(k) − 1|^p)^{1/p}`.
pub fn mu_n(spec: &MultiplicativeSpec, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid(format!("p must be a positive real, got {p}")));
    }
    let n = spec.n() as f64;
    let s: f64 = spec.fhat.iter().map(|f| (f - 1.0).norm().powf(p)).sum();
    Ok((s / n).powf(1.0 / p))
}

/// `exp(θ Σ_{k≤n} (f̂(k) − 1)/k) = exp(θ L_n(1))`.
pub fn asymptotic_mean(spec: &MultiplicativeSpec, theta: f64) -> Complex64 {
    let l_at_one: Complex64 =
        spec.fhat.iter().enumerate().map(|(j, &f)| (f - 1.0) / (j + 1) as f64).sum();
    (l_at_one * theta).exp()
}

/// Serializes infinities as the string `"+inf"` so JSON stays lossless.
pub(crate) fn ratio_or_marker<S: Serializer>(value: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if value.is_infinite() {
        s.serialize_str("+inf")
    } else {
        s.serialize_f64(*value)
    }
}

/// Mean value against its exponential approximation and the `μ_n(p)` gauge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanReport {
    pub n: usize,
    pub theta: f64,
    pub p: f64,
    pub mean: Complex64,
    pub n_coeff: Complex64,
    pub weight: f64,
    pub asymptotic: Complex64,
    pub mu: f64,
    pub residual: f64,
    /// `residual / mu`; `+inf` when `mu = 0 < residual`, 0 when both vanish.
    #[serde(serialize_with = "ratio_or_marker")]
    pub ratio: f64,
}

/// Checks `M_n(f) = exp(θ Σ (f̂(k)−1)/k) + O(μ_n(p))` at one `n`.
/// Requires `p > max(1, 1/θ)` and `|f̂(j)| ≤ 1`.
pub fn thm3_residual(spec: &MultiplicativeSpec, theta: f64, p: f64) -> Result<MeanReport> {
    check_theta(theta)?;
    let p_min = 1.0f64.max(1.0 / theta);
    if !(p > p_min && p.is_finite()) {
        return Err(invalid(format!("p = {p} must exceed max(1, 1/theta) = {p_min}")));
    }
    spec.require_unit_disk()?;
    let (mean, n_coeff, weight) = mean_parts(spec, theta)?;
    let asymptotic = asymptotic_mean(spec, theta);
    let mu = mu_n(spec, p)?;
    let residual = (mean - asymptotic).norm();
    let ratio = if mu > 0.0 {
        residual / mu
    } else if residual > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(MeanReport { n: spec.n(), theta, p, mean, n_coeff, weight, asymptotic, mu, residual, ratio })
}

/// `S_θ(f; m)` for `f = exp(θ L_n)`, `m = 0..=order`, via the identity
/// `z f'(z) / (1 - z)^θ = θ F(z) Σ_k (f̂(k) − 1) z^k`.
pub fn kernel_sums(spec: &MultiplicativeSpec, theta: f64, order: usize) -> Result<Vec<Complex64>> {
    let order = order.max(spec.n());
    let big_n = big_n_coeffs(spec, theta, order)?;
    let mut d = vec![Complex64::zero(); order + 1];
    for (k, slot) in d.iter_mut().enumerate().skip(1).take(spec.n()) {
        *slot = (spec.value(k) - 1.0) * theta;
    }
    Ok(TruncatedSeries::new(d)?.mul(&big_n).into_coeffs())
}
