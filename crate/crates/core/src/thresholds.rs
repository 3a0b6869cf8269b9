//! Versioned pass/fail thresholds for the bounded-ratio checks.
//!
//! The implied constants of the asymptotic bounds are unknown, so each check
//! compares ratios across an n-grid against the limits pinned here.

use serde::Serialize;

use crate::cesaro::{Thm1Report, TRUNCATION_WITNESS_TOL};
use crate::ewens::MeanReport;
use crate::kernel::{Lemma2Report, LEMMA2_SLACK};

pub const THRESHOLDS_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub version: &'static str,
    /// Max of `ratio(n)/ratio(n_0)` over the mean-value grid.
    pub thm3_ratio_growth: f64,
    /// Allowed growth of the residual between consecutive grid points.
    pub thm3_residual_slack: f64,
    /// Max/min of `lhs/majorant` across the Cesàro grid.
    pub thm1_ratio_spread: f64,
    /// Max/min of the normalized kernel error along dyadic `m`.
    pub lemma2_dyadic_spread: f64,
    /// Upper bound on tail-sum/decay-bound for `j > n/2`.
    pub tail_ratio_bound: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            version: THRESHOLDS_VERSION,
            thm3_ratio_growth: 8.0,
            thm3_residual_slack: 2.0,
            thm1_ratio_spread: 4.0,
            lemma2_dyadic_spread: 8.0,
            tail_ratio_bound: 2.0,
        }
    }
}

/// Outcome of a bounded-ratio check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

/// Max/min of a list of positive values.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Residuals this close to zero relative to the limit are rounding noise.
pub fn residual_floor(r: &MeanReport) -> f64 {
    64.0 * f64::EPSILON * r.asymptotic.norm().max(1.0)
}

impl Thresholds {
    /// Ratio growth and residual decay along an increasing n-grid.
    pub fn thm3_verdict(&self, reports: &[MeanReport]) -> Verdict {
        let (Some(first), Some(last)) = (reports.first(), reports.last()) else {
            return Verdict { pass: false, detail: "empty grid".into() };
        };
        let effective = |r: &MeanReport| if r.residual <= residual_floor(r) { 0.0 } else { r.ratio };
        let base = effective(first);
        let growth = reports
            .iter()
            .map(|r| {
                let e = effective(r);
                if e == 0.0 {
                    0.0
                } else if base == 0.0 {
                    f64::INFINITY
                } else {
                    e / base
                }
            })
            .fold(0.0, f64::max);
        let steps_ok = reports
            .windows(2)
            .all(|w| w[1].residual <= (self.thm3_residual_slack * w[0].residual).max(residual_floor(&w[1])));
        let shrinks = last.residual < first.residual || last.residual <= residual_floor(last);
        Verdict {
            pass: growth <= self.thm3_ratio_growth && steps_ok && shrinks,
            detail: format!(
                "growth {growth:.2} (<= {}), residual {:.1e} -> {:.1e}, steps within x{}: {steps_ok}",
                self.thm3_ratio_growth, first.residual, last.residual, self.thm3_residual_slack
            ),
        }
    }

    /// `lhs/majorant` spread and truncation witness across an n-grid.
    pub fn thm1_verdict(&self, reports: &[Thm1Report]) -> Verdict {
        if reports.is_empty() {
            return Verdict { pass: false, detail: "empty grid".into() };
        }
        let ratios: Vec<f64> = reports.iter().map(|r| r.ratio.unwrap_or(f64::NAN)).collect();
        let bounded = ratios.iter().all(|r| r.is_finite());
        let witness_ok = reports.iter().all(|r| r.last_term <= TRUNCATION_WITNESS_TOL * r.majorant);
        let s = spread(&ratios);
        Verdict {
            pass: bounded && witness_ok && s < self.thm1_ratio_spread,
            detail: format!("ratio spread {s:.2} (< {}), bounded: {bounded}, witness: {witness_ok}", self.thm1_ratio_spread),
        }
    }

    /// Chain violations, route agreement and dyadic spread of the kernel grid.
    pub fn lemma2_verdict(&self, report: &Lemma2Report) -> Verdict {
        let worst = report.dyadic.iter().map(|d| d.spread).fold(0.0, f64::max);
        let pass = report.violations == 0 && report.route_rel_err <= LEMMA2_SLACK && worst < self.lemma2_dyadic_spread;
        Verdict {
            pass,
            detail: format!(
                "violations {}, route err {:.1e} (<= {LEMMA2_SLACK:e}), max dyadic spread {worst:.2} (< {})",
                report.violations, report.route_rel_err, self.lemma2_dyadic_spread
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn report(n: usize, residual: f64, mu: f64) -> MeanReport {
        let one = Complex64::new(1.0, 0.0);
        MeanReport {
            n,
            theta: 1.0,
            p: 2.0,
            mean: one,
            n_coeff: one,
            weight: 1.0,
            asymptotic: one,
            mu,
            residual,
            ratio: residual / mu,
        }
    }

    #[test]
    fn thm3_verdict_ignores_rounding_noise() {
        let noise = [report(50, 5e-17, 1.0), report(100, 9e-17, 0.5), report(200, 5e-17, 0.25)];
        assert!(Thresholds::default().thm3_verdict(&noise).pass);
    }

    #[test]
    fn thm3_verdict_rejects_growing_ratio() {
        let bad = [report(50, 1e-2, 1.0), report(100, 1e-2, 0.1), report(200, 5e-3, 0.01)];
        assert!(!Thresholds::default().thm3_verdict(&bad).pass);
        let good = [report(50, 1e-2, 1.0), report(100, 5e-3, 0.5), report(200, 2.5e-3, 0.25)];
        assert!(Thresholds::default().thm3_verdict(&good).pass);
    }

    #[test]
    fn spread_of_constant_is_one() {
        assert_eq!(spread(&[2.0, 2.0, 2.0]), 1.0);
        assert_eq!(spread(&[1.0, 4.0]), 4.0);
    }
}
