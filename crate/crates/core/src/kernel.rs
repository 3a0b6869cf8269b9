//! The kernel `c_{m,j} = Σ_{s≤m} [z^{m−s}](1−z)^{−θ} · [z^s](1−z)^{θ} / (s + j)`.
//!
//! It is computed two ways (the defining convolution and the first-order
//! recurrence `c_{m,j} = θ/(m+j) Σ_{s<m} c_{s,j}`), bounded by the closed-form
//! majorant `b_{m,j} = (θ/j²)(1 + θ/j)^{m−1}`, and compared with its leading
//! asymptotic `[z^m](1−z)^{−θ} · B(j, θ+1)`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad;
use crate::theta_binom::{check_theta, ThetaWeights};

/// Relative slack allowed in the positivity and majorant inequalities.
pub const LEMMA2_SLACK: f64 = 1e-12;
/// Normalized-error entries whose absolute error is below this many ulps of
/// the compared values are treated as exact agreement.
const EXACT_FLOOR_ULPS: f64 = 64.0;

fn check_j(j: usize) -> Result<()> {
    if j == 0 {
        return Err(invalid("kernel index j starts at 1"));
    }
    Ok(())
}

/// The defining sum, accumulated as a compensated dot product. For integer θ
/// the terms cancel by a factor of order j², which plain summation cannot
/// absorb at j ~ 100.
fn convolution_with(weights: &ThetaWeights, m: usize, j: usize) -> f64 {
    let (plus, minus) = (weights.plus(), weights.minus());
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for s in 0..=m {
        let d = (s + j) as f64;
        let q = minus[s] / d;
        let q_err = (-q).mul_add(d, minus[s]) / d;
        let p = plus[m - s] * q;
        let p_err = plus[m - s].mul_add(q, -p) + plus[m - s] * q_err;
        // two-sum of hi + p
        let t = hi + p;
        let z = t - hi;
        lo += (hi - (t - z)) + (p - z) + p_err;
        hi = t;
    }
    hi + lo
}

/// `c_{m,j}` from its defining finite sum.
pub fn c_by_convolution(theta: f64, m: usize, j: usize) -> Result<f64> {
    check_j(j)?;
    let weights = ThetaWeights::new(theta, m)?;
    Ok(convolution_with(&weights, m, j))
}

/// `c_{0,j}, ..., c_{M,j}` from the recurrence with a running prefix sum.
pub fn c_by_recurrence(theta: f64, m_max: usize, j: usize) -> Result<Vec<f64>> {
    check_theta(theta)?;
    check_j(j)?;
    let mut c = Vec::with_capacity(m_max + 1);
    c.push(1.0 / j as f64);
    let mut prefix = c[0];
    for m in 1..=m_max {
        let next = theta / (m + j) as f64 * prefix;
        c.push(next);
        prefix += next;
    }
    Ok(c)
}

/// `c_{m,j}` for `0 ≤ m ≤ M`, `1 ≤ j ≤ J`, built by the recurrence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelTable {
    theta: f64,
    /// `values[m][j - 1]`
    values: Vec<Vec<f64>>,
}

impl KernelTable {
    pub fn new(theta: f64, m_max: usize, j_max: usize) -> Result<Self> {
        check_j(j_max)?;
        let columns: Vec<Vec<f64>> =
            (1..=j_max).map(|j| c_by_recurrence(theta, m_max, j)).collect::<Result<_>>()?;
        let values = (0..=m_max).map(|m| columns.iter().map(|col| col[m]).collect()).collect();
        Ok(Self { theta, values })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn m_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn j_max(&self) -> usize {
        self.values[0].len()
    }

    pub fn get(&self, m: usize, j: usize) -> f64 {
        self.values[m][j - 1]
    }
}

/// `b_{m,j} = (θ/j²)(1 + θ/j)^{m−1}` for `m ≥ 1`.
pub fn b_majorant(theta: f64, m: usize, j: usize) -> Result<f64> {
    check_theta(theta)?;
    check_j(j)?;
    if m == 0 {
        return Err(invalid("the closed-form majorant starts at m = 1"));
    }
    let jf = j as f64;
    Ok(theta / (jf * jf) * (1.0 + theta / jf).powi(m as i32 - 1))
}

/// `(θ/j²) e^{θm/j}`.
pub fn exp_majorant(theta: f64, m: usize, j: usize) -> f64 {
    let jf = j as f64;
    theta / (jf * jf) * (theta * m as f64 / jf).exp()
}

/// `B(j, θ+1) = ∫_0^1 (1−y)^θ y^{j−1} dy`, via `B(j+1) = B(j) · j/(j+θ+1)`.
pub fn beta_integral(j: usize, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    check_j(j)?;
    let mut b = 1.0 / (theta + 1.0);
    for i in 1..j {
        b *= i as f64 / (i as f64 + theta + 1.0);
    }
    Ok(b)
}

/// One `(m, j)` cell that broke `0 ≤ c ≤ b ≤ (θ/j²)e^{θm/j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub m: usize,
    pub j: usize,
    pub c: f64,
    pub b: f64,
    pub exp_bound: f64,
}

/// Spread of the normalized asymptotic error along `m = j, 2j, 4j, ...`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicSpread {
    pub j: usize,
    pub m: Vec<usize>,
    pub normalized_error: Vec<f64>,
    /// max/min over entries above the rounding floor; 1 when fewer than two remain.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma2Report {
    pub theta: f64,
    pub m_max: usize,
    pub j_max: usize,
    pub cells: usize,
    pub violations: usize,
    /// `max(c − b)/b` over `m ≥ 1` (negative when the bound holds strictly).
    pub worst_c_excess: f64,
    /// `max(b − e)/e` against the exponential majorant `e`.
    pub worst_b_excess: f64,
    /// Max relative disagreement between the convolution and recurrence routes.
    pub route_rel_err: f64,
    /// Largest normalized error `|c − plus_m B(j,θ+1)| / (m^{θ−2} j^{−θ} + m^{−2})`, `m ≥ 2`.
    pub max_normalized_error: f64,
    pub dyadic: Vec<DyadicSpread>,
}

/// Runs the positivity, majorant and asymptotic checks over `m ≤ M`, `j ≤ J`.
/// `probe_j` selects the columns whose normalized error is followed along
/// dyadic `m`. Any violation of the inequality chain is an error.
pub fn check_lemma2(theta: f64, m_max: usize, j_max: usize, probe_j: &[usize]) -> Result<Lemma2Report> {
    let table = KernelTable::new(theta, m_max, j_max)?;
    let weights = ThetaWeights::new(theta, m_max)?;
    let plus = weights.plus();
    let mut violations = Vec::new();
    let mut worst_c_excess = f64::NEG_INFINITY;
    let mut worst_b_excess = f64::NEG_INFINITY;
    let mut route_rel_err = 0.0f64;
    let mut max_normalized_error = 0.0f64;
    let mut normalized = vec![vec![0.0; j_max]; m_max + 1];

    for j in 1..=j_max {
        let beta = beta_integral(j, theta)?;
        for m in 0..=m_max {
            let c = table.get(m, j);
            let conv = convolution_with(&weights, m, j);
            route_rel_err = route_rel_err.max((conv - c).abs() / c.abs().max(f64::MIN_POSITIVE));
            if c < -LEMMA2_SLACK * c.abs() {
                violations.push(Violation { m, j, c, b: f64::NAN, exp_bound: f64::NAN });
            }
            if m >= 1 {
                let b = b_majorant(theta, m, j)?;
                let e = exp_majorant(theta, m, j);
                worst_c_excess = worst_c_excess.max((c - b) / b);
                worst_b_excess = worst_b_excess.max((b - e) / e);
                if c > b * (1.0 + LEMMA2_SLACK) || b > e * (1.0 + LEMMA2_SLACK) {
                    violations.push(Violation { m, j, c, b, exp_bound: e });
                }
            }
            if m >= 2 {
                let lead = plus[m] * beta;
                let diff = (c - lead).abs();
                let mf = m as f64;
                let gauge = mf.powf(theta - 2.0) * (j as f64).powf(-theta) + mf.powi(-2);
                let e = if diff <= EXACT_FLOOR_ULPS * f64::EPSILON * c.abs().max(lead.abs()) {
                    0.0
                } else {
                    diff / gauge
                };
                normalized[m][j - 1] = e;
                max_normalized_error = max_normalized_error.max(e);
            }
        }
    }

    if let Some(v) = violations.first() {
        return Err(Error::InvariantViolation(format!(
            "kernel bound chain fails at m={}, j={} (c={:e}, b={:e}, exp bound={:e}); {} cells in total",
            v.m,
            v.j,
            v.c,
            v.b,
            v.exp_bound,
            violations.len()
        )));
    }

    let dyadic = probe_j
        .iter()
        .copied()
        .filter(|&j| j >= 1 && j <= j_max)
        .map(|j| {
            let m: Vec<usize> =
                std::iter::successors(Some(j.max(2)), |&m| Some(m * 2)).take_while(|&m| m <= m_max).collect();
            let normalized_error: Vec<f64> = m.iter().map(|&mm| normalized[mm][j - 1]).collect();
            let live: Vec<f64> = normalized_error.iter().copied().filter(|&e| e > 0.0).collect();
            let spread = if live.len() < 2 {
                1.0
            } else {
                live.iter().copied().fold(0.0, f64::max) / live.iter().copied().fold(f64::INFINITY, f64::min)
            };
            DyadicSpread { j, m, normalized_error, spread }
        })
        .collect();

    Ok(Lemma2Report {
        theta,
        m_max,
        j_max,
        cells: (m_max + 1) * j_max,
        violations: 0,
        worst_c_excess,
        worst_b_excess,
        route_rel_err,
        max_normalized_error,
        dyadic,
    })
}

/// Agreement tolerance between the discrete tail sum and its integral form.
pub const TAIL_AGREEMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailIdentity {
    pub theta: f64,
    pub j: usize,
    pub n: usize,
    /// `Σ_{k≥j} [z^{k−j}](1−z)^θ e^{−k/n} / k`
    pub sum: f64,
    pub terms: usize,
    /// `∫_{1/n}^∞ (1 − e^{−y})^θ e^{−jy} dy`
    pub integral: f64,
    pub quadrature_error: f64,
    /// `∫_{upper}^∞ e^{−jy} dy = e^{−j·upper}/j`, which dominates the truncated part.
    pub remainder_bound: f64,
    /// `e^{−j/n} / (j n^θ)`
    pub bound: f64,
    pub ratio: f64,
}

/// Evaluates the tail sum, its integral representation and the decay bound.
/// Errors when the two routes disagree beyond [`TAIL_AGREEMENT_TOL`].
pub fn tail_identity(theta: f64, j: usize, n: usize) -> Result<TailIdentity> {
    check_theta(theta)?;
    check_j(j)?;
    if n == 0 {
        return Err(invalid("n starts at 1"));
    }
    let nf = n as f64;
    let jf = j as f64;
    let one_minus_x = -(-1.0 / nf).exp_m1();

    const MAX_TERMS: usize = 100_000_000;
    let mut sum = 0.0;
    let mut coeff = 1.0; // [z^s](1 - z)^θ
    let mut s = 0usize;
    loop {
        if coeff == 0.0 {
            // θ is an integer and the polynomial has ended
            break;
        }
        let k = (j + s) as f64;
        let term = coeff * (-k / nf).exp() / k;
        sum += term;
        s += 1;
        if term.abs() / one_minus_x <= 1e-16 * sum.abs() && s > theta as usize + 1 {
            break;
        }
        if s >= MAX_TERMS {
            return Err(Error::TailNotCertified { terms: s, bound: term.abs() / one_minus_x, tol: 1e-16 * sum.abs() });
        }
        coeff *= (s as f64 - 1.0 - theta) / s as f64;
    }

    let lower = 1.0 / nf;
    let upper = lower + 60.0 / jf;
    let bound = (-jf / nf).exp() / (jf * nf.powf(theta));
    let abs_tol = 1e-13 * bound.min(1.0);
    let q = quad::integrate(|y: f64| (-(-y).exp_m1()).powf(theta) * (-jf * y).exp(), lower, upper, abs_tol, 0.0)?;
    let integral = q.value;
    let remainder_bound = (-jf * upper).exp() / jf;

    let diff = (sum - integral).abs();
    let limit = TAIL_AGREEMENT_TOL * (1.0 + sum.abs());
    if diff > limit {
        return Err(Error::CrossCheck { what: "tail sum vs integral", rel_err: diff / (1.0 + sum.abs()), tol: TAIL_AGREEMENT_TOL });
    }
    Ok(TailIdentity {
        theta,
        j,
        n,
        sum,
        terms: s,
        integral,
        quadrature_error: q.error,
        remainder_bound,
        bound,
        ratio: sum / bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn convolution_examples() {
        for theta in [0.5, 1.0, 2.0, 3.3] {
            assert!((c_by_convolution(theta, 0, 5).unwrap() - 0.2).abs() < 1e-16);
        }
        assert!((c_by_convolution(1.0, 1, 1).unwrap() - 0.5).abs() < 1e-16);
        let rec = c_by_recurrence(2.0, 2, 3).unwrap();
        assert!(rel(c_by_convolution(2.0, 2, 3).unwrap(), rec[2]) < 1e-13);
        assert!(c_by_convolution(1.0, 1, 0).is_err());
    }

    #[test]
    fn recurrence_examples() {
        let c = c_by_recurrence(1.0, 1, 1).unwrap();
        assert_eq!(c, vec![1.0, 0.5]);
        assert_eq!(c_by_recurrence(0.7, 0, 4).unwrap(), vec![0.25]);
        let c = c_by_recurrence(0.5, 100, 10).unwrap();
        for (m, &v) in c.iter().enumerate() {
            assert!(v >= 0.0);
            assert!(rel(c_by_convolution(0.5, m, 10).unwrap(), v) < 1e-12, "m={m}");
        }
    }

    #[test]
    fn majorant_examples() {
        assert_eq!(b_majorant(1.0, 1, 1).unwrap(), 1.0);
        assert!((b_majorant(2.0, 3, 2).unwrap() - 2.0).abs() < 1e-15);
        let row: Vec<f64> = (1..20).map(|m| b_majorant(0.4, m, 3).unwrap()).collect();
        assert!(row.windows(2).all(|w| w[1] > w[0]));
        assert!(b_majorant(1.0, 0, 1).is_err());
    }

    #[test]
    fn beta_examples() {
        assert!((beta_integral(1, 1.0).unwrap() - 0.5).abs() < 1e-16);
        assert!((beta_integral(2, 1.0).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        for theta in [0.3, 2.0, 7.5] {
            assert!((beta_integral(1, theta).unwrap() - 1.0 / (theta + 1.0)).abs() < 1e-16);
        }
    }

    #[test]
    fn beta_against_quadrature() {
        for theta in [0.5, 1.0, 2.0] {
            for j in [1, 3, 10, 40] {
                let q = quad::integrate(|y: f64| (1.0 - y).powf(theta) * y.powi(j as i32 - 1), 0.0, 1.0, 1e-15, 1e-13)
                    .unwrap();
                assert!(rel(beta_integral(j, theta).unwrap(), q.value) < 1e-10, "theta={theta} j={j}");
            }
        }
    }

    #[test]
    fn lemma2_grid_examples() {
        let r = check_lemma2(1.0, 200, 50, &[20]).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.worst_c_excess <= 0.0);

        let c = c_by_recurrence(2.0, 50, 40).unwrap()[50];
        let b = b_majorant(2.0, 50, 40).unwrap();
        assert!(c <= b && b <= 2.0 / 1600.0 * 2.5f64.exp());
    }

    #[test]
    fn normalized_error_stable_for_j20() {
        let r = check_lemma2(1.5, 200, 20, &[20]).unwrap();
        let picks: Vec<f64> = [50usize, 100, 200]
            .iter()
            .map(|&m| {
                let c = c_by_recurrence(1.5, m, 20).unwrap()[m];
                let lead = crate::theta_binom::coeff_plus(1.5, m).unwrap() * beta_integral(20, 1.5).unwrap();
                let mf = m as f64;
                (c - lead).abs() / (mf.powf(-0.5) * 20f64.powf(-1.5) + mf.powi(-2))
            })
            .collect();
        let spread = picks.iter().cloned().fold(0.0, f64::max) / picks.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 8.0, "{picks:?}");
        assert!(r.dyadic[0].spread < 8.0);
    }

    #[test]
    fn kernel_theta_one_is_exactly_beta() {
        // with θ = 1 the kernel is constant in m
        let c = c_by_recurrence(1.0, 30, 7).unwrap();
        for v in &c[1..] {
            assert!(rel(*v, 1.0 / 56.0) < 1e-14);
        }
    }

    #[test]
    fn generating_function_at_half() {
        let x: f64 = 0.5;
        for theta in [0.5, 1.0, 2.0] {
            for j in [1usize, 4, 15] {
                let c = c_by_recurrence(theta, 400, j).unwrap();
                let series: f64 = c.iter().enumerate().map(|(m, v)| v * x.powi(m as i32)).sum();
                let q = quad::integrate(|t: f64| (1.0 - t * x).powf(theta) * t.powi(j as i32 - 1), 0.0, 1.0, 1e-15, 1e-13)
                    .unwrap();
                let closed = (1.0 - x).powf(-theta) * q.value;
                assert!(rel(series, closed) < 1e-9, "theta={theta} j={j}");
            }
        }
    }

    #[test]
    fn tail_identity_examples() {
        let t = tail_identity(1.0, 4, 2).unwrap();
        assert!((t.sum - t.integral).abs() < 1e-10);
        let t = tail_identity(1.0, 1, 1).unwrap();
        let closed = (-1.0f64).exp() - (-2.0f64).exp() / 2.0;
        assert!((t.integral - closed).abs() < 1e-13);
        assert!((t.sum - closed).abs() < 1e-13);
        let bounds: Vec<f64> = (1..10).map(|j| tail_identity(1.5, j, 3).unwrap().bound).collect();
        assert!(bounds.iter().all(|&b| b > 0.0));
        assert!(bounds.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn tail_identity_fractional_theta() {
        for theta in [0.5, 1.5] {
            for (j, n) in [(1, 1), (3, 10), (20, 5)] {
                let t = tail_identity(theta, j, n).unwrap();
                assert!((t.sum - t.integral).abs() <= 1e-10 * (1.0 + t.sum.abs()));
            }
        }
    }

    #[test]
    fn truncated_integral_remainder_is_negligible() {
        for (j, n) in [(1, 1), (5, 10), (50, 100)] {
            let t = tail_identity(1.5, j, n).unwrap();
            assert!(t.remainder_bound <= 1e-20 * t.integral, "j={j} n={n}");
        }
    }
}
