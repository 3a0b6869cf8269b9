//! Arbitrary-precision rational scalars for oracle comparisons.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// Complex number with exact rational parts.
pub type ExactComplex = Complex<BigRational>;

/// Converts a finite float to the rational it represents exactly.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| invalid(format!("{x} has no rational value")))
}

pub fn complex_from_f64(z: Complex64) -> Result<ExactComplex> {
    Ok(Complex::new(rational_from_f64(z.re)?, rational_from_f64(z.im)?))
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn complex_to_f64(z: &ExactComplex) -> Complex64 {
    Complex64::new(rational_to_f64(&z.re), rational_to_f64(&z.im))
}

/// Parses `p/q`, an integer, or a plain decimal like `0.25` without rounding.
/// Anything else (exponents, `inf`) is rejected.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || invalid(format!("cannot read {text:?} as an exact rational"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let q = BigRational::new(numer, denom);
    Ok(if neg { -q } else { q })
}

/// Taylor coefficients of `exp(g)` through the order of `g`, exactly.
/// Requires `g[0] == 0`.
pub fn exp_series(g: &[ExactComplex]) -> Result<Vec<ExactComplex>> {
    if g.first().is_some_and(|c| !c.is_zero()) {
        return Err(invalid("exp_series needs a zero constant term"));
    }
    let order = g.len().saturating_sub(1);
    let degree = g.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    let mut h: Vec<ExactComplex> = Vec::with_capacity(order + 1);
    h.push(Complex::new(BigRational::from_integer(1.into()), BigRational::zero()));
    for m in 1..=order {
        let mut acc = ExactComplex::zero();
        for j in 1..=m.min(degree) {
            acc += (&g[j] * &h[m - j]).scale(BigRational::from_integer(j.into()));
        }
        h.push(acc.unscale(BigRational::from_integer(m.into())));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("5/3").unwrap(), BigRational::new(5.into(), 3.into()));
        assert_eq!(parse_rational("0.1").unwrap(), BigRational::new(1.into(), 10.into()));
        assert_eq!(parse_rational("-2.50").unwrap(), BigRational::new((-5).into(), 2.into()));
        assert_eq!(parse_rational("7").unwrap(), BigRational::from_integer(7.into()));
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn exp_of_z_is_reciprocal_factorials() {
        let one = BigRational::from_integer(1.into());
        let zero = BigRational::zero();
        let g = vec![
            Complex::new(zero.clone(), zero.clone()),
            Complex::new(one.clone(), zero.clone()),
            Complex::new(zero.clone(), zero.clone()),
            Complex::new(zero.clone(), zero.clone()),
            Complex::new(zero.clone(), zero),
        ];
        let h = exp_series(&g).unwrap();
        let re: Vec<BigRational> = h.into_iter().map(|c| c.re).collect();
        let expect: Vec<BigRational> =
            [1, 1, 2, 6, 24].iter().map(|d| BigRational::new(1.into(), (*d).into())).collect();
        assert_eq!(re, expect);
    }
}
