//! Numerical helpers shared by the simulator and the sampler.
//!
//! Everything that touches probabilities works in log space. Dirichlet draws
//! are produced from log-gamma variates so that tiny concentrations never
//! underflow to an all-zero vector.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
pub use statrs::function::gamma::ln_gamma;

/// Smallest concentration accepted by [`sample_dirichlet`].
pub const CONCENTRATION_FLOOR: f64 = 1e-12;

/// Rising products of this length or shorter are multiplied out directly.
const DIRECT_RISING_MAX: u32 = 48;

/// `ln(x (x+1) ... (x+n-1))`, the log of the rising factorial.
pub fn ln_rising(x: f64, n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= DIRECT_RISING_MAX {
        // multiply in blocks, taking one log per block
        let mut acc = 0.0;
        let mut prod = 1.0;
        for s in 0..n {
            prod *= x + s as f64;
            if prod > 1e200 {
                acc += prod.ln();
                prod = 1.0;
            }
        }
        acc + prod.ln()
    } else {
        ln_gamma(x + n as f64) - ln_gamma(x)
    }
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = xs.iter().map(|x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Turns log weights into a probability vector in place.
///
/// Returns `false` (and leaves a uniform vector) when every weight is `-inf`.
pub fn normalize_log_weights(weights: &mut [f64]) -> bool {
    let lse = log_sum_exp(weights);
    if !lse.is_finite() {
        let u = 1.0 / weights.len() as f64;
        weights.iter_mut().for_each(|w| *w = u);
        return false;
    }
    let mut total = 0.0;
    for w in weights.iter_mut() {
        *w = (*w - lse).exp();
        total += *w;
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
    true
}

/// Draws an index from a normalized probability vector.
pub fn sample_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // round-off: fall back to the last index with positive mass
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Draws an index proportional to `exp(log_weights)`.
pub fn sample_log_categorical<R: Rng + ?Sized>(log_weights: &[f64], rng: &mut R) -> usize {
    let mut probs = log_weights.to_vec();
    normalize_log_weights(&mut probs);
    sample_categorical(&probs, rng)
}

/// Log of a Gamma(shape, 1) variate, stable for very small shapes.
pub fn sample_ln_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    let shape = shape.max(CONCENTRATION_FLOOR);
    if shape >= 1.0 {
        let g = Gamma::new(shape, 1.0).expect("valid gamma shape").sample(rng);
        g.ln()
    } else {
        // Gamma(a) = Gamma(a + 1) * U^(1/a)
        let g = Gamma::new(shape + 1.0, 1.0)
            .expect("valid gamma shape")
            .sample(rng);
        let u: f64 = rng.random::<f64>();
        let u = if u > 0.0 { u } else { f64::MIN_POSITIVE };
        g.ln() + u.ln() / shape
    }
}

/// Draws from a Dirichlet distribution via normalized gamma variates.
pub fn sample_dirichlet<R: Rng + ?Sized>(concentration: &[f64], rng: &mut R) -> Vec<f64> {
    let mut out: Vec<f64> = concentration
        .iter()
        .map(|&a| sample_ln_gamma(a, rng))
        .collect();
    normalize_log_weights(&mut out);
    out
}

/// Log density of a Dirichlet distribution at `x`.
pub fn ln_dirichlet_pdf(x: &[f64], concentration: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), concentration.len());
    let total: f64 = concentration.iter().sum();
    let mut acc = ln_gamma(total);
    for (&xi, &a) in x.iter().zip(concentration) {
        acc -= ln_gamma(a);
        acc += (a - 1.0) * xi.ln();
    }
    acc
}

/// Log Poisson probability mass.
pub fn ln_poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k as f64 * mean.ln() - mean - ln_gamma(k as f64 + 1.0)
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn ln_norm_cdf(x: f64) -> f64 {
    norm_cdf(x).ln()
}

/// Log density (up to the Gaussian constant) of a normal at `x`.
pub fn ln_normal_kernel(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * z * z - sd.ln()
}

/// Draws from Normal(mean, sd) truncated to `(0, inf)`; `mean` must be
/// non-negative so that rejection needs at most two tries on average.
pub fn sample_positive_normal<R: Rng + ?Sized>(mean: f64, sd: f64, rng: &mut R) -> f64 {
    debug_assert!(mean >= 0.0);
    loop {
        let z: f64 = StandardNormal.sample(rng);
        let x = mean + sd * z;
        if x > 0.0 {
            return x;
        }
    }
}

/// Log-ratio `ln q(current | proposed) - ln q(proposed | current)` for a
/// random walk whose proposals are Normal(current, sd) truncated at zero.
pub fn truncated_walk_log_correction(current: f64, proposed: f64, sd: f64) -> f64 {
    ln_norm_cdf(current / sd) - ln_norm_cdf(proposed / sd)
}

/// Overflow-safe logistic function.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Binomial coefficient as an exact integer.
pub fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}
