//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Panel { a, b, value: kron * half, error: ((kron - gauss) * half).abs() }
}

/// Integrates `f` over `[a, b]`, bisecting the worst panel until the summed
/// error estimate is at most `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature> {
    const MAX_PANELS: usize = 4000;
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, a, b);
    let (mut value, mut error) = (first.value, first.error);
    heap.push(first);
    loop {
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            return Ok(Quadrature { value, error, intervals: heap.len() });
        }
        if heap.len() >= MAX_PANELS || !value.is_finite() {
            return Err(Error::QuadratureNonConvergence { a, b, tol: target, estimate: error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_exponentials() {
        let q = integrate(|x| x * x, 0.0, 3.0, 1e-14, 0.0).unwrap();
        assert!((q.value - 9.0).abs() < 1e-13);
        let q = integrate(|x: f64| (-x).exp(), 0.0, 40.0, 1e-14, 0.0).unwrap();
        assert!((q.value - (1.0 - (-40.0f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_is_subdivided() {
        let q = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12, 0.0).unwrap();
        assert!((q.value - 2.0 / 3.0).abs() < 1e-11);
        assert!(q.intervals > 1);
    }

    #[test]
    fn reports_non_convergence() {
        let r = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-12, 0.0);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }
}
