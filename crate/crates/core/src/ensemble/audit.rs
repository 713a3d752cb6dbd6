//! Pooled moment audit over drawn matrices.

use serde::Serialize;

use super::MatrixSample;
use crate::{Error, Result};

/// Width of the acceptance band, in standard errors.
const BAND_SIGMAS: f64 = 4.0;

/// One pooled moment with its standard error and target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_err: f64,
    pub target: f64,
    pub within_band: bool,
}

impl MomentEstimate {
    fn new(value: f64, std_err: f64, target: f64) -> Self {
        // exact-valued moments (Rademacher) have zero standard error
        let slack = BAND_SIGMAS * std_err + 1e-12 * target.abs().max(1.0);
        Self {
            value,
            std_err,
            target,
            within_band: (value - target).abs() <= slack,
        }
    }
}

/// Moments pooled over every off-diagonal entry of every sample.
///
/// `second_moment` is `E X^2` about the known zero mean, and
/// `pair_correlation` is the mean of `X_ij X_ji` over unordered pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub samples: usize,
    pub entries: usize,
    pub pairs: usize,
    pub mean: MomentEstimate,
    pub second_moment: MomentEstimate,
    pub pair_correlation: MomentEstimate,
    pub fourth_moment: MomentEstimate,
}

impl MomentReport {
    pub fn all_within_band(&self) -> bool {
        [
            &self.mean,
            &self.second_moment,
            &self.pair_correlation,
            &self.fourth_moment,
        ]
        .iter()
        .all(|m| m.within_band)
    }
}

#[derive(Default)]
struct Sums {
    count: f64,
    s1: f64,
    s2: f64,
    s4: f64,
    s8: f64,
    pairs: f64,
    p1: f64,
    p2: f64,
}

/// Audits pooled off-diagonal moments against their (C0) targets.
///
/// Samples may come from different draws but must share `rho` and the pair
/// distribution of the first sample.
pub fn moment_audit(samples: &[MatrixSample]) -> Result<MomentReport> {
    let first = samples
        .first()
        .ok_or_else(|| Error::argument("moment audit needs at least one sample"))?;
    let (rho, dist) = (first.spec.rho(), first.spec.pair_dist());
    if samples
        .iter()
        .any(|s| s.spec.rho() != rho || s.spec.pair_dist() != dist)
    {
        return Err(Error::argument("moment audit samples mix ensembles"));
    }

    let mut acc = Sums::default();
    for sample in samples {
        let m = &sample.entries;
        let n = m.nrows();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                for x in [a, b] {
                    let x2 = x * x;
                    let x4 = x2 * x2;
                    acc.count += 1.0;
                    acc.s1 += x;
                    acc.s2 += x2;
                    acc.s4 += x4;
                    acc.s8 += x4 * x4;
                }
                let p = a * b;
                acc.pairs += 1.0;
                acc.p1 += p;
                acc.p2 += p * p;
            }
        }
    }
    if acc.pairs == 0.0 {
        return Err(Error::argument(
            "moment audit needs off-diagonal entries (n >= 2)",
        ));
    }

    let count = acc.count;
    let mean = acc.s1 / count;
    let m2 = acc.s2 / count;
    let m4 = acc.s4 / count;
    let m8 = acc.s8 / count;
    let corr = acc.p1 / acc.pairs;
    let corr_var = (acc.p2 / acc.pairs - corr * corr).max(0.0);

    Ok(MomentReport {
        samples: samples.len(),
        entries: count as usize,
        pairs: acc.pairs as usize,
        mean: MomentEstimate::new(mean, ((m2 - mean * mean).max(0.0) / count).sqrt(), 0.0),
        second_moment: MomentEstimate::new(m2, ((m4 - m2 * m2).max(0.0) / count).sqrt(), 1.0),
        pair_correlation: MomentEstimate::new(corr, (corr_var / acc.pairs).sqrt(), rho),
        fourth_moment: MomentEstimate::new(
            m4,
            ((m8 - m4 * m4).max(0.0) / count).sqrt(),
            dist.fourth_moment(),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_matrix, EnsembleSpec, PairDist};

    fn draws(rho: f64, dist: PairDist, n: usize, k: u64) -> Vec<MatrixSample> {
        let spec = EnsembleSpec::new(n, rho, dist, 99).unwrap();
        (0..k).map(|d| sample_matrix(&spec, d)).collect()
    }

    #[test]
    fn empty_input_is_an_argument_error() {
        assert!(matches!(moment_audit(&[]), Err(Error::Argument(_))));
    }

    #[test]
    fn gaussian_fourth_moment_near_three() {
        let report = moment_audit(&draws(0.3, PairDist::Gaussian, 120, 4)).unwrap();
        assert!(report.fourth_moment.within_band, "{report:?}");
        assert!(report.all_within_band(), "{report:?}");
        assert_eq!(report.pairs, 4 * 120 * 119 / 2);
    }

    #[test]
    fn rademacher_fourth_moment_is_exact() {
        let report = moment_audit(&draws(0.2, PairDist::Rademacher, 50, 2)).unwrap();
        assert_eq!(report.fourth_moment.value, 1.0);
        assert_eq!(report.second_moment.value, 1.0);
        assert!(report.all_within_band(), "{report:?}");
    }

    #[test]
    fn negative_rho_correlation_in_band() {
        let report = moment_audit(&draws(-0.5, PairDist::Gaussian, 150, 3)).unwrap();
        assert!(report.pair_correlation.within_band, "{report:?}");
        assert!((report.pair_correlation.value + 0.5).abs() < 0.02);
    }

    #[test]
    fn wrong_target_is_flagged() {
        let mut samples = draws(0.5, PairDist::Gaussian, 150, 2);
        // relabel the same entries as a rho = -0.5 ensemble
        let spec = EnsembleSpec::new(150, -0.5, PairDist::Gaussian, 99).unwrap();
        for s in &mut samples {
            s.spec = spec;
        }
        let report = moment_audit(&samples).unwrap();
        assert!(!report.pair_correlation.within_band);
        assert!(!report.all_within_band());
    }
}
