use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{sample_matrix, EnsembleSpec, MatrixSample};
use crate::spectral::singular_values;
use crate::{Error, Result};

/// One trial for `A = X - z sqrt(n) I`: the scaled minimum `sqrt(n) s_n(A)`,
/// which equals `n s_n(X / sqrt(n) - z)` and is of order one, so that
/// `scaled_min <= eps` is the event `s_n(A) <= eps / sqrt(n)`; and whether
/// `||A|| <= 3 K sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LsvTrial {
    pub scaled_min: f64,
    pub norm_ok: bool,
}

pub fn lsv_trial(m: &MatrixSample, z: Complex64, k: f64) -> Result<LsvTrial> {
    let sv = singular_values(m, z)?;
    Ok(LsvTrial {
        scaled_min: m.n() as f64 * sv.smallest(),
        norm_ok: sv.largest() <= 3.0 * k,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LsvTrialBatch {
    pub spec: EnsembleSpec,
    pub z: Complex64,
    pub k: f64,
    /// Number of successful trials.
    pub trials: usize,
    /// Draw index of each successful trial.
    pub draw_indices: Vec<u64>,
    pub scaled_minima: Vec<f64>,
    pub norm_ok: Vec<bool>,
    pub norm_exceedances: usize,
    /// Draw indices whose decomposition failed; excluded above.
    pub failed: Vec<u64>,
}

impl LsvTrialBatch {
    /// Fraction of trials with scaled minimum `<= eps`.
    pub fn tail_probability(&self, eps: f64) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.scaled_minima.iter().filter(|&&s| s <= eps).count() as f64 / self.trials as f64
    }

    pub fn median(&self) -> f64 {
        let mut v = self.scaled_minima.clone();
        v.sort_by(f64::total_cmp);
        match v.len() {
            0 => f64::NAN,
            l if l % 2 == 1 => v[l / 2],
            l => 0.5 * (v[l / 2 - 1] + v[l / 2]),
        }
    }
}

/// Runs draws `0..trials` of `spec`. Results are ordered by draw index, so the
/// batch does not depend on the thread count.
pub fn least_singular_mc(spec: &EnsembleSpec, z: Complex64, trials: usize, k: f64) -> Result<LsvTrialBatch> {
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    if !(k > 1.0) {
        return Err(Error::config("k", format!("must exceed 1, got {k}")));
    }
    let results: Vec<(u64, Result<LsvTrial>)> = (0..trials as u64)
        .into_par_iter()
        .map(|d| (d, lsv_trial(&sample_matrix(spec, d), z, k)))
        .collect();
    let mut batch = LsvTrialBatch {
        spec: spec.clone(),
        z,
        k,
        trials: 0,
        draw_indices: Vec::new(),
        scaled_minima: Vec::new(),
        norm_ok: Vec::new(),
        norm_exceedances: 0,
        failed: Vec::new(),
    };
    for (d, r) in results {
        match r {
            Ok(t) => {
                batch.trials += 1;
                batch.draw_indices.push(d);
                batch.scaled_minima.push(t.scaled_min);
                batch.norm_ok.push(t.norm_ok);
                batch.norm_exceedances += usize::from(!t.norm_ok);
            }
            Err(e) if e.is_numerical() => batch.failed.push(d),
            Err(e) => return Err(e),
        }
    }
    Ok(batch)
}
