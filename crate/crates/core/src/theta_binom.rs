//! Rising factorials and the coefficients of `(1 - z)^{-θ}` and `(1 - z)^{θ}`.
//!
//! Every other module is built on these two coefficient sequences. The float
//! path uses first-order recurrences; [`exact`] provides the same quantities
//! over arbitrary-precision rationals for oracle comparisons.

use serde::Serialize;

use crate::error::{invalid, Result};

/// Largest θ accepted in double precision.
pub const MAX_FLOAT_THETA: f64 = 50.0;

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(invalid(format!("theta must be a positive finite real, got {theta}")));
    }
    if theta > MAX_FLOAT_THETA {
        return Err(invalid(format!(
            "theta = {theta} exceeds the float-mode limit {MAX_FLOAT_THETA}"
        )));
    }
    Ok(())
}

/// Rising factorial θ(θ+1)...(θ+n−1); the empty product for `n = 0` is 1.
pub fn pochhammer(theta: f64, n: usize) -> Result<f64> {
    check_theta(theta)?;
    Ok((0..n).fold(1.0, |acc, k| acc * (theta + k as f64)))
}

/// `[z^n] (1 - z)^{-θ}`, i.e. θ_(n)/n!, via a_k = a_{k-1}(θ+k−1)/k.
pub fn coeff_plus(theta: f64, n: usize) -> Result<f64> {
    check_theta(theta)?;
    Ok((1..=n).fold(1.0, |acc, k| acc * (theta + k as f64 - 1.0) / k as f64))
}

/// `[z^n] (1 - z)^{θ}`, via c_k = c_{k-1}(k−1−θ)/k.
pub fn coeff_minus(theta: f64, n: usize) -> Result<f64> {
    check_theta(theta)?;
    Ok((1..=n).fold(1.0, |acc, k| acc * (k as f64 - 1.0 - theta) / k as f64))
}

/// Cached coefficient tables of `(1 - z)^{∓θ}` up to a truncation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaWeights {
    theta: f64,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl ThetaWeights {
    /// Builds both tables for indices `0..=order`.
    pub fn new(theta: f64, order: usize) -> Result<Self> {
        check_theta(theta)?;
        let mut plus = Vec::with_capacity(order + 1);
        let mut minus = Vec::with_capacity(order + 1);
        plus.push(1.0);
        minus.push(1.0);
        for k in 1..=order {
            let kf = k as f64;
            plus.push(plus[k - 1] * (theta + kf - 1.0) / kf);
            minus.push(minus[k - 1] * (kf - 1.0 - theta) / kf);
        }
        Ok(Self { theta, plus, minus })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Truncation order N; the tables hold N+1 entries.
    pub fn order(&self) -> usize {
        self.plus.len() - 1
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `[z^k](1 - z)^{-θ}`.
    pub fn plus(&self) -> &[f64] {
        &self.plus
    }

    /// `[z^k](1 - z)^{θ}`.
    pub fn minus(&self) -> &[f64] {
        &self.minus
    }

    /// Returns `Some(θ)` when θ is a small positive integer, in which case
    /// `(1 - z)^{θ}` is a polynomial and multiplication by `(1 - z)^{-θ}`
    /// reduces to θ cumulative sums.
    pub fn integer_theta(&self) -> Option<usize> {
        let r = self.theta.round();
        (r == self.theta && (1.0..=16.0).contains(&r)).then_some(r as usize)
    }
}

/// Exact rational counterparts of the float routines above.
pub mod exact {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};

    use crate::error::{invalid, Result};

    fn check(theta: &BigRational) -> Result<()> {
        if !theta.is_positive() {
            return Err(invalid(format!("theta must be positive, got {theta}")));
        }
        Ok(())
    }

    pub fn pochhammer(theta: &BigRational, n: usize) -> Result<BigRational> {
        check(theta)?;
        let mut acc = BigRational::one();
        let mut t = theta.clone();
        for _ in 0..n {
            acc *= &t;
            t += BigRational::one();
        }
        Ok(acc)
    }

    pub fn factorial(n: usize) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
    }

    /// Exact `[z^k](1 - z)^{-θ}` for `k = 0..=order`.
    pub fn plus_table(theta: &BigRational, order: usize) -> Result<Vec<BigRational>> {
        check(theta)?;
        let mut out = Vec::with_capacity(order + 1);
        out.push(BigRational::one());
        for k in 1..=order {
            let kq = BigRational::from_integer(BigInt::from(k));
            let next = &out[k - 1] * (theta + &kq - BigRational::one()) / kq;
            out.push(next);
        }
        Ok(out)
    }

    /// Exact `[z^k](1 - z)^{θ}` for `k = 0..=order`.
    pub fn minus_table(theta: &BigRational, order: usize) -> Result<Vec<BigRational>> {
        check(theta)?;
        let mut out = Vec::with_capacity(order + 1);
        out.push(BigRational::one());
        for k in 1..=order {
            let kq = BigRational::from_integer(BigInt::from(k));
            let next = &out[k - 1] * (&kq - BigRational::one() - theta) / kq;
            out.push(next);
        }
        Ok(out)
    }

    pub fn coeff_plus(theta: &BigRational, n: usize) -> Result<BigRational> {
        Ok(plus_table(theta, n)?.pop().unwrap_or_else(BigRational::zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(1.0, 5).unwrap(), 120.0);
        assert_eq!(pochhammer(2.0, 0).unwrap(), 1.0);
        assert!(close(pochhammer(0.5, 3).unwrap(), 1.875, 1e-15));
    }

    #[test]
    fn rejects_bad_theta() {
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY, 50.5] {
            assert!(pochhammer(bad, 3).is_err());
            assert!(coeff_plus(bad, 3).is_err());
            assert!(coeff_minus(bad, 3).is_err());
            assert!(ThetaWeights::new(bad, 3).is_err());
        }
    }

    #[test]
    fn coeff_plus_examples() {
        for n in 0..20 {
            assert_eq!(coeff_plus(1.0, n).unwrap(), 1.0);
        }
        assert_eq!(coeff_plus(2.0, 4).unwrap(), 5.0);
        assert!(close(coeff_plus(0.5, 2).unwrap(), 0.375, 1e-15));
    }

    #[test]
    fn coeff_minus_examples() {
        let m: Vec<f64> = (0..5).map(|n| coeff_minus(1.0, n).unwrap()).collect();
        assert_eq!(m, vec![1.0, -1.0, 0.0, 0.0, 0.0]);
        assert_eq!(coeff_minus(2.0, 2).unwrap(), 1.0);
        assert!(close(coeff_minus(0.5, 2).unwrap(), -0.125, 1e-15));
        // alternation stops: for θ = 0.5 all coefficients past the first are negative
        assert!((1..50).all(|k| coeff_minus(0.5, k).unwrap() < 0.0));
    }

    #[test]
    fn weights_examples() {
        let w = ThetaWeights::new(1.0, 3).unwrap();
        assert_eq!(w.plus(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(w.minus(), &[1.0, -1.0, 0.0, 0.0]);
        let w = ThetaWeights::new(2.0, 2).unwrap();
        assert_eq!(w.plus(), &[1.0, 2.0, 3.0]);
        assert_eq!(w.minus(), &[1.0, -2.0, 1.0]);
        assert_eq!(w.integer_theta(), Some(2));
        assert_eq!(ThetaWeights::new(0.5, 2).unwrap().integer_theta(), None);
    }

    #[test]
    fn convolution_identity() {
        for theta in [0.3, 0.5, 1.0, 2.0, 3.7] {
            let w = ThetaWeights::new(theta, 500).unwrap();
            for k in 0..=500 {
                let (mut s, mut scale) = (0.0, 0.0);
                for j in 0..=k {
                    let t = w.plus()[j] * w.minus()[k - j];
                    s += t;
                    scale += t.abs();
                }
                let expect = if k == 0 { 1.0 } else { 0.0 };
                assert!((s - expect).abs() <= 1e-12 * scale.max(1.0), "theta={theta} k={k} s={s}");
            }
            assert!(w.plus().iter().all(|&p| p > 0.0));
        }
    }

    #[test]
    fn plus_asymptotic_against_gamma() {
        // plus[n] = n^{θ-1}/Γ(θ) (1 + O(1/n))
        for theta in [0.3, 0.5, 1.0, 2.0, 3.7] {
            let w = ThetaWeights::new(theta, 5000).unwrap();
            let g = libm::tgamma(theta);
            for n in (100..=5000).step_by(100) {
                let rel = (w.plus()[n] * g / (n as f64).powf(theta - 1.0) - 1.0).abs();
                assert!(rel * n as f64 <= 10.0 * theta, "theta={theta} n={n} rel={rel}");
            }
        }
    }

    #[test]
    fn exact_matches_pochhammer_over_factorial() {
        use num_rational::BigRational;
        for (p, q) in [(1, 2), (1, 1), (2, 1), (5, 3), (37, 10)] {
            let theta = BigRational::new(p.into(), q.into());
            let table = exact::plus_table(&theta, 30).unwrap();
            for (n, value) in table.iter().enumerate() {
                let direct = exact::pochhammer(&theta, n).unwrap()
                    / BigRational::from_integer(exact::factorial(n));
                assert_eq!(*value, direct);
            }
            let minus = exact::minus_table(&theta, 30).unwrap();
            for k in 1..=30 {
                let s: BigRational = (0..=k).map(|j| &table[j] * &minus[k - j]).sum();
                assert_eq!(s, BigRational::from_integer(0.into()));
            }
        }
    }
}
