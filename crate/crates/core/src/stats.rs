//! Small statistics toolkit: sample moments, batch means and the one-sample
//! Kolmogorov–Smirnov test.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSem {
    pub mean: f64,
    pub sem: f64,
    pub count: usize,
}

/// Sample mean and standard error of the mean (unbiased variance).
pub fn mean_sem(xs: &[f64]) -> MeanSem {
    let n = xs.len();
    if n == 0 {
        return MeanSem {
            mean: f64::NAN,
            sem: f64::NAN,
            count: 0,
        };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sem = if n > 1 {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        f64::NAN
    };
    MeanSem { mean, sem, count: n }
}

/// Batch-means estimate: the batches are treated as independent samples.
pub fn batch_means(batch_values: &[f64]) -> MeanSem {
    mean_sem(batch_values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub samples: usize,
}

/// One-sample KS test of `samples` against the continuous CDF `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    for (k, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let above = (k + 1) as f64 / nf - f;
        let below = f - k as f64 / nf;
        d = d.max(above).max(below);
    }
    let sqrt_n = nf.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    KsResult {
        statistic: d,
        p_value: kolmogorov_survival(lambda),
        samples: n,
    }
}

/// `P[K > lambda]` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series converges fast for small arguments.
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (0..50)
            .map(|k| (-((2 * k + 1) as f64).powi(2) * c).exp())
            .sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
