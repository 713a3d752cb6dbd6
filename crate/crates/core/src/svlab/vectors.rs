use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorLabel {
    Sparse,
    Compressible,
    Incompressible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorClass {
    pub delta: f64,
    pub tau: f64,
    pub label: VectorLabel,
    /// Distance to the nearest vector with at most `floor(delta n)` nonzeros.
    pub dist_to_sparse: f64,
    pub support: usize,
}

fn check_unit(x: &[f64], delta: f64, tau: f64) -> Result<()> {
    if x.is_empty() {
        return Err(Error::argument("empty vector"));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= 1e-10) {
        return Err(Error::argument(format!("vector norm {norm} is not 1")));
    }
    if !(delta > 0.0 && delta < 1.0 && tau > 0.0 && tau < 1.0) {
        return Err(Error::argument(format!("delta and tau must lie in (0, 1), got {delta} and {tau}")));
    }
    Ok(())
}

pub fn classify_vector(x: &[f64], delta: f64, tau: f64) -> Result<VectorClass> {
    check_unit(x, delta, tau)?;
    let n = x.len();
    let keep = (delta * n as f64).floor() as usize;
    let mut sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    // the nearest sparse vector keeps the largest coordinates
    let dist_to_sparse = sq[keep.min(n)..].iter().sum::<f64>().sqrt();
    let support = x.iter().filter(|&&v| v != 0.0).count();
    let label = if support <= keep {
        VectorLabel::Sparse
    } else if dist_to_sparse <= tau {
        VectorLabel::Compressible
    } else {
        VectorLabel::Incompressible
    };
    Ok(VectorClass {
        delta,
        tau,
        label,
        dist_to_sparse,
        support,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadCheck {
    /// Coordinates with `tau / sqrt(2n) <= |x_k| <= 1 / sqrt(delta n)`.
    pub count: usize,
    /// `delta tau^2 n / 2`
    pub required: f64,
    pub holds: bool,
}

/// Counts the spread coordinates that every incompressible vector must have.
pub fn spread_check(x: &[f64], delta: f64, tau: f64) -> Result<SpreadCheck> {
    check_unit(x, delta, tau)?;
    let n = x.len() as f64;
    let lo = tau / (2.0 * n).sqrt();
    let hi = 1.0 / (delta * n).sqrt();
    let count = x.iter().filter(|v| (lo..=hi).contains(&v.abs())).count();
    let required = 0.5 * delta * tau * tau * n;
    Ok(SpreadCheck {
        count,
        required,
        holds: count as f64 >= required,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_pair, CounterRng, PairDist};
    use itertools::Itertools;

    fn normalize(mut v: Vec<f64>) -> Vec<f64> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        v
    }

    fn gaussian(n: usize, rng: &mut impl rand::RngCore) -> Vec<f64> {
        (0..n).map(|_| sample_pair(0.0, PairDist::Gaussian, rng).unwrap().0).collect()
    }

    /// Minimum over all supports of size `k` of the distance from `x`.
    fn brute_force(x: &[f64], k: usize) -> f64 {
        let total: f64 = x.iter().map(|v| v * v).sum();
        (0..x.len())
            .combinations(k)
            .map(|s| (total - s.iter().map(|&i| x[i] * x[i]).sum::<f64>()).max(0.0).sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn basis_vector_is_sparse() {
        let mut e = vec![0.0; 20];
        e[4] = 1.0;
        let c = classify_vector(&e, 0.05, 0.5).unwrap();
        assert_eq!(c.label, VectorLabel::Sparse);
        assert_eq!(c.dist_to_sparse, 0.0);
    }

    #[test]
    fn flat_vector_is_incompressible() {
        let n = 50;
        let x = vec![1.0 / (n as f64).sqrt(); n];
        let c = classify_vector(&x, 0.1, 0.5).unwrap();
        assert_eq!(c.label, VectorLabel::Incompressible);
        assert!((c.dist_to_sparse - 0.9f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn compressible_between() {
        let mut x = vec![0.1; 10];
        x[0] = (1.0 - 0.09f64).sqrt();
        let c = classify_vector(&x, 0.1, 0.5).unwrap();
        assert_eq!(c.label, VectorLabel::Compressible);
        assert!((c.dist_to_sparse - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unit() {
        assert!(classify_vector(&[1.0, 1.0], 0.5, 0.5).is_err());
        assert!(classify_vector(&[1.0], 1.0, 0.5).is_err());
        assert!(classify_vector(&[], 0.5, 0.5).is_err());
    }

    #[test]
    fn matches_exhaustive_oracle() {
        let mut rng = CounterRng::new(9).aux(1, 0);
        for n in 1..=12 {
            for delta in [0.1, 0.25, 0.5, 0.9] {
                let x = normalize(gaussian(n, &mut rng));
                let k = (delta * n as f64).floor() as usize;
                let c = classify_vector(&x, delta, 0.5).unwrap();
                assert!((c.dist_to_sparse - brute_force(&x, k)).abs() < 1e-12, "n {n} delta {delta}");
            }
        }
    }

    #[test]
    fn incompressible_vectors_are_spread() {
        let mut rng = CounterRng::new(10).aux(2, 0);
        let mut seen = 0;
        while seen < 200 {
            let x = normalize(gaussian(60, &mut rng));
            if classify_vector(&x, 0.1, 0.5).unwrap().label == VectorLabel::Incompressible {
                assert!(spread_check(&x, 0.1, 0.5).unwrap().holds);
                seen += 1;
            }
        }
    }
}
