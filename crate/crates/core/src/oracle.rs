//! Ground truth at desk scale: exact enumeration over cycle types of `S_n`
//! under the Ewens measure, and a seeded Chinese-restaurant sampler.
//!
//! Random streams come from ChaCha8 (`rand_chacha`). A sampling run with seed
//! `s` splits its draws into chunks of [`CHUNK`] samples; chunk `i` uses
//! `ChaCha8Rng::seed_from_u64(s)` with stream number `i`. Results are merged
//! in chunk order, so the output depends only on `(seed, samples)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::ewens::MultiplicativeSpec;
use crate::exact::{self, ExactComplex};
use crate::theta_binom::{self, check_theta};

/// Largest `n` accepted by the enumerators (p(60) = 966467 cycle types).
pub const MAX_ENUMERATION_N: usize = 60;
/// Samples per independent RNG stream.
pub const CHUNK: usize = 10_000;

/// Multiplicities `s_1..s_n` of cycle lengths, with `Σ j s_j = n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CycleType {
    mult: Vec<usize>,
}

impl CycleType {
    pub fn new(mult: Vec<usize>) -> Result<Self> {
        let n = mult.len();
        let total: usize = mult.iter().enumerate().map(|(i, s)| (i + 1) * s).sum();
        if n == 0 || total != n {
            return Err(invalid(format!("multiplicities weigh {total}, expected {n}")));
        }
        Ok(Self { mult })
    }

    pub fn n(&self) -> usize {
        self.mult.len()
    }

    /// `s_j` for `j = 1..=n`.
    pub fn multiplicity(&self, j: usize) -> usize {
        self.mult[j - 1]
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.mult
    }

    /// Number of cycles `k(σ)`.
    pub fn cycles(&self) -> usize {
        self.mult.iter().sum()
    }

    /// `∏ f̂(j)^{s_j}`.
    pub fn evaluate(&self, spec: &MultiplicativeSpec) -> Complex64 {
        self.mult
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0)
            .map(|(i, &s)| spec.value(i + 1).powu(s as u32))
            .product()
    }

    fn from_cycle_sizes(n: usize, sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut mult = vec![0; n];
        for size in sizes {
            mult[size - 1] += 1;
        }
        Self { mult }
    }
}

/// All cycle types of `S_n`, in decreasing lexicographic order of
/// `(s_1, s_2, ..., s_n)`: `1^n` first, the single `n`-cycle last.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partitions {
    n: usize,
}

/// Cycle-type enumeration for `1 ≤ n ≤ MAX_ENUMERATION_N`.
pub fn partitions(n: usize) -> Result<Partitions> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(invalid(format!("n = {n} outside 1..={MAX_ENUMERATION_N}")));
    }
    Ok(Partitions { n })
}

impl Partitions {
    pub fn iter(&self) -> PartitionIter {
        let mut mult = vec![0; self.n];
        mult[0] = self.n;
        PartitionIter { mult: Some(mult) }
    }
}

impl IntoIterator for Partitions {
    type Item = CycleType;
    type IntoIter = PartitionIter;
    fn into_iter(self) -> PartitionIter {
        self.iter()
    }
}

pub struct PartitionIter {
    mult: Option<Vec<usize>>,
}

/// Lexicographically largest fill of `mass` into positions `from..=n`
/// (1-based lengths), assuming `mass == 0` or `mass ≥ from`.
fn fill_max(mult: &mut [usize], from: usize, mut mass: usize) {
    let n = mult.len();
    for len in from..=n {
        if mass == 0 {
            mult[len - 1] = 0;
            continue;
        }
        // largest count leaving a remainder representable by parts > len
        let mut count = mass / len;
        while count > 0 {
            let rest = mass - count * len;
            if rest == 0 || rest > len {
                break;
            }
            count -= 1;
        }
        mult[len - 1] = count;
        mass -= count * len;
    }
    debug_assert_eq!(mass, 0);
}

impl Iterator for PartitionIter {
    type Item = CycleType;

    fn next(&mut self) -> Option<CycleType> {
        let current = self.mult.take()?;
        let out = CycleType { mult: current.clone() };
        let n = current.len();
        let mut next = current;
        // rightmost length i whose count can drop by the smallest d >= 1 such
        // that the freed mass d*i + tail still fits into lengths > i
        let mut tail_mass = 0usize;
        for i in (1..=n).rev() {
            let s = next[i - 1];
            if s > 0 {
                let d = if tail_mass >= 1 { 1 } else { 2 };
                if d <= s && i < n {
                    next[i - 1] -= d;
                    fill_max(&mut next, i + 1, d * i + tail_mass);
                    self.mult = Some(next);
                    return Some(out);
                }
            }
            tail_mass += i * s;
        }
        Some(out)
    }
}

/// `ν_{n,θ}` of a cycle type: `(n!/θ_(n)) ∏ (θ/j)^{s_j} / s_j!`.
pub fn ewens_weight(t: &CycleType, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    // product of n/θ_(n)-style ratios kept near 1 by interleaving
    let n = t.n();
    let mut log_w = 0.0;
    for k in 1..=n {
        log_w += (k as f64).ln() - (theta + k as f64 - 1.0).ln();
    }
    for (i, &s) in t.mult.iter().enumerate() {
        if s == 0 {
            continue;
        }
        let j = (i + 1) as f64;
        log_w += s as f64 * (theta / j).ln();
        log_w -= (1..=s).map(|q| (q as f64).ln()).sum::<f64>();
    }
    Ok(log_w.exp())
}

/// Exact `ν_{n,θ}` for rational θ.
pub fn ewens_weight_exact(t: &CycleType, theta: &BigRational) -> Result<BigRational> {
    let n = t.n();
    let mut w = BigRational::from_integer(theta_binom::exact::factorial(n))
        / theta_binom::exact::pochhammer(theta, n)?;
    for (i, &s) in t.mult.iter().enumerate() {
        if s == 0 {
            continue;
        }
        let ratio = theta / BigRational::from_integer(BigInt::from(i + 1));
        w *= num_traits::pow(ratio, s);
        w /= BigRational::from_integer(theta_binom::exact::factorial(s));
    }
    Ok(w)
}

/// `Σ_σ f(σ) ν_{n,θ}(σ)` by summing over cycle types.
pub fn brute_mean(spec: &MultiplicativeSpec, theta: f64) -> Result<Complex64> {
    let mut total = Complex64::zero();
    for t in partitions(spec.n())? {
        total += t.evaluate(spec) * ewens_weight(&t, theta)?;
    }
    Ok(total)
}

/// Exact brute-force mean for rational θ and rational cycle values.
pub fn brute_mean_exact(fhat: &[ExactComplex], theta: &BigRational) -> Result<ExactComplex> {
    let mut total = ExactComplex::zero();
    for t in partitions(fhat.len())? {
        let mut value = ExactComplex::new(BigRational::one(), BigRational::zero());
        for (i, &s) in t.mult.iter().enumerate() {
            if s > 0 {
                value *= fhat[i].powu(s as u32);
            }
        }
        total += value.scale(ewens_weight_exact(&t, theta)?);
    }
    Ok(total)
}

/// Convenience: exact brute mean of a float spec with its values read exactly.
pub fn brute_mean_exact_spec(spec: &MultiplicativeSpec, theta: &BigRational) -> Result<Complex64> {
    Ok(exact::complex_to_f64(&brute_mean_exact(&spec.to_exact()?, theta)?))
}

fn sample_with<R: Rng>(n: usize, theta: f64, rng: &mut R) -> CycleType {
    // owner[e] is the cycle holding element e; sizes[c] is the cycle length
    let mut owner: Vec<usize> = Vec::with_capacity(n);
    let mut sizes: Vec<usize> = Vec::new();
    for i in 1..=n {
        let new_cycle = i == 1 || rng.gen::<f64>() * (theta + (i - 1) as f64) < theta;
        if new_cycle {
            owner.push(sizes.len());
            sizes.push(1);
        } else {
            let after = rng.gen_range(0..i - 1);
            let c = owner[after];
            owner.push(c);
            sizes[c] += 1;
        }
    }
    CycleType::from_cycle_sizes(n, sizes)
}

/// One Ewens(θ) cycle type by sequential insertion, deterministic in `seed`.
pub fn crp_sample(n: usize, theta: f64, seed: u64) -> Result<CycleType> {
    check_theta(theta)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_with(n, theta, &mut rng))
}

/// Draws `samples` cycle types, visiting them in the documented chunk order.
pub fn crp_samples(n: usize, theta: f64, samples: usize, seed: u64, mut visit: impl FnMut(&CycleType)) -> Result<()> {
    check_theta(theta)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut done = 0usize;
    let mut chunk = 0u64;
    while done < samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let take = CHUNK.min(samples - done);
        for _ in 0..take {
            visit(&sample_with(n, theta, &mut rng));
        }
        done += take;
        chunk += 1;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: Complex64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Monte-Carlo estimate of `M_n(f)` with the standard error of the mean.
pub fn mc_mean(spec: &MultiplicativeSpec, theta: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    mc_statistic(spec.n(), theta, samples, seed, |t| t.evaluate(spec))
}

/// Monte-Carlo mean of any cycle-type statistic. Running (Welford) updates
/// keep a constant statistic exact.
pub fn mc_statistic(
    n: usize,
    theta: f64,
    samples: usize,
    seed: u64,
    statistic: impl Fn(&CycleType) -> Complex64,
) -> Result<McEstimate> {
    if samples < 100 {
        return Err(invalid(format!("need at least 100 samples, got {samples}")));
    }
    let mut mean = Complex64::zero();
    let mut m2 = 0.0f64;
    let mut count = 0.0f64;
    crp_samples(n, theta, samples, seed, |t| {
        let x = statistic(t);
        count += 1.0;
        let delta = x - mean;
        mean += delta / count;
        m2 += (delta.conj() * (x - mean)).re;
    })?;
    let var = m2 / (count - 1.0);
    Ok(McEstimate { estimate: mean, stderr: (var / count).sqrt(), samples, seed })
}
