//! Truncated power series with complex coefficients.
//!
//! A [`TruncatedSeries`] of order N stands for a power series modulo
//! `z^{N+1}`. Binary operations truncate to the smaller order so no result
//! ever claims coefficients that its inputs did not determine.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::theta_binom::ThetaWeights;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    /// Wraps `c_0..c_N`; an empty vector is rejected.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("a truncated series needs at least the constant term"));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Complex64::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Complex64::new(1.0, 0.0);
        s
    }

    /// `scale · Σ_{j≥1} z^j / j`, the series of `−scale·log(1 − z)`.
    pub fn log_reciprocal(order: usize, scale: Complex64) -> Self {
        let mut s = Self::zero(order);
        for j in 1..=order {
            s.coeffs[j] = scale / j as f64;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<Complex64> {
        self.coeffs.get(k).copied()
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&a| a * c).collect() }
    }

    /// Index of the last nonzero coefficient (0 for the zero series).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![Complex64::zero(); order + 1];
        for (i, &a) in self.coeffs.iter().take(order + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, &b) in out[i..].iter_mut().zip(&other.coeffs) {
                *o += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: self.coeffs[..=order]
                .iter()
                .zip(&other.coeffs[..=order])
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `exp(g)` through the order of `g`, by h_m = (1/m) Σ_{j=1}^m j g_j h_{m−j}.
    /// Only the nonzero prefix of `g` is visited, so sparse exponents of
    /// low degree cost O(deg · N).
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(invalid("exp_series requires a zero constant term"));
        }
        let order = self.order();
        let degree = self.degree();
        let weighted: Vec<Complex64> =
            self.coeffs.iter().enumerate().map(|(j, &g)| g * j as f64).collect();
        let mut h = Vec::with_capacity(order + 1);
        h.push(Complex64::new(1.0, 0.0));
        for m in 1..=order {
            let top = m.min(degree);
            let mut acc = Complex64::zero();
            for j in 1..=top {
                acc += weighted[j] * h[m - j];
            }
            h.push(acc / m as f64);
        }
        Ok(Self { coeffs: h })
    }

    /// Coefficients of `z·a'(z)`: `k·a_k` at index `k`.
    pub fn derivative_shift(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().enumerate().map(|(k, &a)| a * k as f64).collect(),
        }
    }

    /// Product with `(1 - z)^{-θ}` truncated at the smaller order. For integer
    /// θ this is θ running sums; otherwise a direct convolution.
    pub fn times_plus(&self, weights: &ThetaWeights) -> Self {
        let order = self.order().min(weights.order());
        let mut out = self.coeffs[..=order].to_vec();
        match weights.integer_theta() {
            Some(t) => {
                for _ in 0..t {
                    for k in 1..out.len() {
                        let prev = out[k - 1];
                        out[k] += prev;
                    }
                }
                Self { coeffs: out }
            }
            None => {
                let plus = TruncatedSeries::from_real(&weights.plus()[..=order])
                    .expect("weights are non-empty");
                Self { coeffs: out }.mul(&plus)
            }
        }
    }

    /// Horner evaluation of the stored polynomial.
    pub fn eval_polynomial(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * x + c)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::add(self, rhs)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}

/// Polynomial majorant `|a_k| ≤ scale·(k+1)^degree`, optionally with a
/// known finite support (all coefficients past `support` vanish).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub scale: f64,
    pub degree: f64,
    pub support: Option<usize>,
}

impl Envelope {
    pub fn polynomial(scale: f64, degree: f64) -> Self {
        Self { scale, degree, support: None }
    }

    pub fn finite(last_index: usize, scale: f64) -> Self {
        Self { scale, degree: 0.0, support: Some(last_index) }
    }

    pub fn bound(&self, k: usize) -> f64 {
        match self.support {
            Some(last) if k > last => 0.0,
            _ => self.scale * ((k + 1) as f64).powf(self.degree),
        }
    }

    /// Upper bound for `Σ_{k≥start} |a_k| x^k`.
    pub fn tail_bound(&self, start: usize, x: f64) -> f64 {
        if let Some(last) = self.support {
            if start > last {
                return 0.0;
            }
        }
        let growth = ((start + 2) as f64 / (start + 1) as f64).powf(self.degree.max(0.0));
        let ratio = growth * x;
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        self.bound(start) * x.powf(start as f64) / (1.0 - ratio)
    }
}

/// A replayable, indexable coefficient sequence with a certified envelope.
pub trait CoeffStream {
    fn coeff(&self, k: usize) -> Complex64;
    fn envelope(&self) -> Envelope;
}

impl CoeffStream for TruncatedSeries {
    fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_else(Complex64::zero)
    }

    fn envelope(&self) -> Envelope {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Envelope::finite(self.degree(), scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailConfig {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for TailConfig {
    fn default() -> Self {
        Self { tol: 1e-14, max_terms: 50_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSum {
    pub value: Complex64,
    pub terms: usize,
    pub tail_bound: f64,
}

/// Sums `Σ a_k x^k` until the envelope certifies the remainder below `tol`.
pub fn eval_tail<S: CoeffStream + ?Sized>(stream: &S, x: f64, config: TailConfig) -> Result<TailSum> {
    if !(0.0..1.0).contains(&x) {
        return Err(invalid(format!("evaluation point must lie in [0, 1), got {x}")));
    }
    if config.tol <= 0.0 || config.tol.is_nan() {
        return Err(invalid("tail tolerance must be positive"));
    }
    let env = stream.envelope();
    let ln_x = x.ln();
    let mut value = Complex64::zero();
    if let Some(last) = env.support {
        // polynomials are summed exactly whatever the tolerance
        let mut w = 1.0;
        for k in 0..=last {
            value += stream.coeff(k) * w;
            w *= x;
        }
        return Ok(TailSum { value, terms: last + 1, tail_bound: 0.0 });
    }
    let mut k = 0usize;
    loop {
        let bound = env.tail_bound(k, x);
        if bound <= config.tol {
            return Ok(TailSum { value, terms: k, tail_bound: bound });
        }
        if k >= config.max_terms {
            return Err(Error::TailNotCertified { terms: k, bound, tol: config.tol });
        }
        let a = stream.coeff(k);
        if !a.is_zero() {
            let w = if k == 0 { 1.0 } else { (k as f64 * ln_x).exp() };
            value += a * w;
        }
        k += 1;
    }
}
