use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{check_rho, sample_pair_unchecked, CounterRng, PairDist};
use crate::{Error, Result};

pub const MIN_SAMPLES: usize = 100;

/// Estimate of `sup_v P(|Z - v| < epsilon)` from samples of `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationEstimate {
    pub epsilon: f64,
    pub estimate: f64,
    /// Width `2 epsilon` of the sliding window.
    #[serde(skip)]
    pub grid_width: f64,
    pub samples: usize,
}

/// Exact for the empirical measure: an open window of width `2 epsilon` can
/// always be slid right until its left end touches a sample, so it suffices
/// to count samples in `[x_k, x_k + 2 epsilon)` for each sample `x_k`.
pub fn levy_concentration(samples: &[f64], epsilon: f64) -> Result<ConcentrationEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::argument(format!("epsilon must be positive, got {epsilon}")));
    }
    if samples.len() < MIN_SAMPLES {
        return Err(Error::argument(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::argument("samples contain NaN"));
    }
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let width = 2.0 * epsilon;
    let mut best = 0;
    let mut hi = 0;
    for lo in 0..x.len() {
        while hi < x.len() && x[hi] - x[lo] < width {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    Ok(ConcentrationEstimate {
        epsilon,
        estimate: best as f64 / x.len() as f64,
        grid_width: width,
        samples: x.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SbpConfig {
    pub delta: f64,
    pub tau: f64,
    /// Upper bound on `|b_i / a_i|`.
    pub max_ratio: f64,
    pub realizations: usize,
    pub pair_dist: PairDist,
    pub seed: u64,
}

impl Default for SbpConfig {
    fn default() -> Self {
        SbpConfig {
            delta: 0.1,
            tau: 0.5,
            max_ratio: 10.0,
            realizations: 100_000,
            pair_dist: PairDist::Gaussian,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SbpOutcome {
    pub estimate: ConcentrationEstimate,
    /// `C eps / sqrt(1 - rho^2) + C1 / ((1 - rho^2)^{3/2} sqrt(n))` with `C = C1 = 2`.
    pub bound: f64,
    /// Standard deviation of `sum a_i xi_i + b_i eta_i`.
    pub sigma: f64,
}

/// Small-ball probability of `sum_i a_i xi_i + b_i eta_i` over correlated pairs.
pub fn sbp_clt_experiment(rho: f64, a: &[f64], b: &[f64], epsilon: f64, cfg: &SbpConfig) -> Result<SbpOutcome> {
    check_rho(rho)?;
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(Error::argument("coefficient sequences must be nonempty and of equal length"));
    }
    let nf = n as f64;
    let lo = cfg.tau / (2.0 * nf).sqrt();
    let hi = 1.0 / (cfg.delta * nf).sqrt();
    for (i, (&ai, &bi)) in a.iter().zip(b).enumerate() {
        if !(ai.abs() >= lo && ai.abs() <= hi) {
            return Err(Error::argument(format!(
                "a[{i}] = {ai} outside [{lo}, {hi}] required by the scaling"
            )));
        }
        if !(bi.abs() <= cfg.max_ratio * ai.abs()) {
            return Err(Error::argument(format!("|b[{i}] / a[{i}]| exceeds {}", cfg.max_ratio)));
        }
    }
    let base = CounterRng::new(cfg.seed);
    let sums: Vec<f64> = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = base.aux(r, 0);
            a.iter()
                .zip(b)
                .map(|(ai, bi)| {
                    let (xi, eta) = sample_pair_unchecked(rho, cfg.pair_dist, &mut rng);
                    ai * xi + bi * eta
                })
                .sum()
        })
        .collect();
    let estimate = levy_concentration(&sums, epsilon)?;
    let sigma = a
        .iter()
        .zip(b)
        .map(|(ai, bi)| ai * ai + bi * bi + 2.0 * rho * ai * bi)
        .sum::<f64>()
        .sqrt();
    let q = 1.0 - rho * rho;
    let bound = 2.0 * epsilon / q.sqrt() + 2.0 / (q.powf(1.5) * nf.sqrt());
    Ok(SbpOutcome { estimate, bound, sigma })
}
