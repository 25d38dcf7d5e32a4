//! Mutual information between a noisy hidden level and the input / labels.
//!
//! Each pattern `x` contributes a mean vector `μ(x)`: its level activations
//! scaled by their own largest absolute entry. The hidden variable is
//! `T = μ(X) + N(0, σ² I)`, a Gaussian mixture weighted by the pattern
//! weights, and
//!
//! * `I(X;T) = H(T) − H(T|X)` with `H(T|X) = d/2 · log₂(2πeσ²)`,
//! * `I(T;Y) = H(T) − H(T|Y)` using the class-conditional mixtures.
//!
//! `H(T)` and `H(T|Y)` are Monte Carlo estimates. Every sample draws `x` by
//! weight and `ε ~ N(0, I)`, then evaluates the mixture densities at
//! `T = μ(x) + σε` relative to `N(T; μ(x), σ²I)`. Working with that ratio
//! removes the `|ε|²` term, whose expectation is known exactly, so the
//! estimate is exactly zero when all means coincide.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::MetricsError;

pub const DEFAULT_SIGMA: f64 = 0.05;
pub const DEFAULT_MC_SAMPLES: usize = 10_000;

/// Number of batches used for the standard-error estimate.
const SE_BATCHES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct MiEstimate {
    /// `I(X;T)` in bits.
    pub mi_input: f64,
    /// `I(T;Y)` in bits.
    pub mi_label: f64,
    /// Batch-means standard errors, in bits.
    pub mi_input_se: f64,
    pub mi_label_se: f64,
    /// `H(T)` and `H(T|X)` in bits.
    pub entropy_t: f64,
    pub entropy_t_given_x: f64,
    pub dim: usize,
    pub mc_samples: usize,
    pub sigma: f64,
    pub seed: u64,
}

/// Scales a vector by its largest absolute entry; zero vectors stay zero.
pub fn sup_normalize(v: &[f64]) -> Vec<f64> {
    let m = v.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    if m > 0.0 {
        v.iter().map(|&x| x / m).collect()
    } else {
        v.to_vec()
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn batch_se(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return f64::NAN;
    }
    let batches = SE_BATCHES.min(n);
    let size = n / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| samples[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

/// Estimates `I(X;T)` and `I(T;Y)` in bits.
///
/// `activations[x]`, `weights[x]` and `labels[x]` describe pattern `x`.
/// Samples come from ChaCha8 seeded with `seed`; for each sample the pattern
/// index is drawn first, then `d` standard normals in coordinate order.
pub fn estimate_mutual_information(
    activations: &[Vec<f64>],
    weights: &[f64],
    labels: &[usize],
    sigma: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<MiEstimate, MetricsError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(MetricsError::NonPositiveSigma(sigma));
    }
    if mc_samples == 0 {
        return Err(MetricsError::NoSamples);
    }
    let n = activations.len();
    if n == 0 {
        return Err(MetricsError::NoPatterns);
    }
    if weights.len() != n || labels.len() != n {
        return Err(MetricsError::LengthMismatch);
    }
    let dim = activations[0].len();
    if activations.iter().any(|a| a.len() != dim) {
        return Err(MetricsError::LengthMismatch);
    }
    if activations.iter().flatten().any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFiniteActivation);
    }

    let means: Vec<Vec<f64>> = activations.iter().map(|a| sup_normalize(a)).collect();
    let total: f64 = weights.iter().sum();
    let log_w: Vec<f64> = weights.iter().map(|w| (w / total).ln()).collect();
    let mut class_weight = std::collections::BTreeMap::<usize, f64>::new();
    for (x, &y) in labels.iter().enumerate() {
        *class_weight.entry(y).or_default() += weights[x] / total;
    }

    // |μ_x − μ_x'|² for every pair.
    let dist2: Vec<Vec<f64>> = means
        .iter()
        .map(|a| {
            means
                .iter()
                .map(|b| a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum())
                .collect()
        })
        .collect();

    let picker = WeightedIndex::new(weights).map_err(|_| MetricsError::BadWeights)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_var = 2.0 * sigma * sigma;
    let mut eps = vec![0.0; dim];
    let mut dots = vec![0.0; n];
    let mut ix = Vec::with_capacity(mc_samples);
    let mut iy = Vec::with_capacity(mc_samples);

    for _ in 0..mc_samples {
        let x = picker.sample(&mut rng);
        for e in eps.iter_mut() {
            *e = rng.sample(StandardNormal);
        }
        for (d, mu) in dots.iter_mut().zip(&means) {
            *d = mu.iter().zip(&eps).map(|(m, e)| m * e).sum();
        }
        // log N(T; μ_x', σ²) − log N(T; μ_x, σ²) with T = μ_x + σε
        //   = −(|μ_x − μ_x'|² + 2σ (μ_x − μ_x')·ε) / 2σ²
        let rel = |xp: usize| -(dist2[x][xp] + 2.0 * sigma * (dots[x] - dots[xp])) / two_var;
        let all = log_sum_exp((0..n).map(|xp| log_w[xp] + rel(xp)));
        let y = labels[x];
        let log_wy = class_weight[&y].ln();
        let within = log_sum_exp((0..n).filter(|&xp| labels[xp] == y).map(|xp| log_w[xp] - log_wy + rel(xp)));
        ix.push(-all);
        iy.push(within - all);
    }

    let to_bits = std::f64::consts::LN_2;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mi_input = mean(&ix) / to_bits;
    let mi_label = mean(&iy) / to_bits;
    let h_tx = 0.5 * dim as f64 * (2.0 * std::f64::consts::PI * std::f64::consts::E * sigma * sigma).log2();
    Ok(MiEstimate {
        mi_input,
        mi_label,
        mi_input_se: batch_se(&ix) / to_bits,
        mi_label_se: batch_se(&iy) / to_bits,
        entropy_t: h_tx + mi_input,
        entropy_t_given_x: h_tx,
        dim,
        mc_samples,
        sigma,
        seed,
    })
}
