//! Eigenvalues, singular values and the Hermitization `V(z)`.
//!
//! All spectra are of the scaled matrix `Y = X / sqrt(n)`. For a shift `z`,
//! `V(z)` is the `2n x 2n` Hermitian block matrix
//! `[[0, Y - zI], [Y^T - conj(z) I, 0]]` whose eigenvalues are `+-s_i(Y - zI)`.
//! Singular values are taken from a direct SVD; the Hermitization route is kept
//! as an independent cross-check.

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, MatRef, Side};
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ensemble::{EnsembleSpec, MatrixSample};
use crate::{Error, Result};

/// The `n` eigenvalues of `X / sqrt(n)`, in solver order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexSpectrum {
    pub values: Vec<Complex64>,
    pub source_spec: EnsembleSpec,
}

impl ComplexSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    /// Spectrum of `-X`.
    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
            source_spec: self.source_spec,
        }
    }

    /// Largest distance from a value to the nearest conjugate of another
    /// value. Zero (up to rounding) for real input matrices.
    pub fn conjugate_defect(&self) -> f64 {
        let mut pending: Vec<Complex64> = self.values.clone();
        let mut worst: f64 = 0.0;
        while let Some(v) = pending.pop() {
            let target = v.conj();
            if let Some((k, d)) = pending
                .iter()
                .map(|w| (w - target).norm())
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
            {
                // a real eigenvalue is its own conjugate
                if d < (v - target).norm() {
                    worst = worst.max(d);
                    pending.swap_remove(k);
                    continue;
                }
            }
            worst = worst.max(v.im.abs());
        }
        worst
    }
}

/// Singular values of `X / sqrt(n) - zI`, sorted so that `values[0]` is `s_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularSpectrum {
    pub z: Complex64,
    pub values: Vec<f64>,
}

impl SingularSpectrum {
    /// Builds a spectrum from arbitrary nonnegative values (sorted here).
    pub fn from_values(z: Complex64, mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::argument("singular values must be finite and nonnegative"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { z, values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// The `2n` eigenvalues `+-s_i` of `V(z)`, ascending.
    pub fn symmetrized(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.values.iter().map(|s| -s).collect();
        out.extend(self.values.iter().rev());
        out
    }

    /// Distribution function of the singular values at `x`.
    pub fn singular_cdf(&self, x: f64) -> f64 {
        let count = self.values.iter().filter(|&&s| s <= x).count();
        count as f64 / self.n() as f64
    }

    /// Distribution function of the symmetrized (`V(z)` eigenvalue) measure.
    pub fn symmetrized_cdf(&self, x: f64) -> f64 {
        let count = self.symmetrized().iter().filter(|&&s| s <= x).count();
        count as f64 / (2 * self.n()) as f64
    }

    /// `sum log s_i`; `-inf` when a singular value is exactly zero.
    pub fn log_abs_det(&self) -> f64 {
        self.values.iter().map(|s| s.ln()).sum()
    }
}

/// Short hex digest identifying a matrix in error reports.
pub fn matrix_fingerprint(m: MatRef<'_, f64>) -> String {
    let mut hasher = Sha256::new();
    hasher.update((m.nrows() as u64).to_le_bytes());
    hasher.update((m.ncols() as u64).to_le_bytes());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            hasher.update(m[(i, j)].to_bits().to_le_bytes());
        }
    }
    hasher.finalize()[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn check_finite(m: &MatrixSample) -> Result<()> {
    if m.entries.col_iter().flat_map(|c| c.iter()).all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::argument("matrix has non-finite entries"))
    }
}

/// Eigenvalues of `X / sqrt(n)`.
pub fn eigenvalues(m: &MatrixSample) -> Result<ComplexSpectrum> {
    check_finite(m)?;
    let values = m.scaled().eigenvalues().map_err(|_| Error::Decomposition {
        routine: "nonsymmetric eigensolver",
        fingerprint: matrix_fingerprint(m.entries.as_ref()),
    })?;
    Ok(ComplexSpectrum {
        values,
        source_spec: m.spec,
    })
}

/// `X / sqrt(n) - zI` as a complex matrix.
pub fn shifted(m: &MatrixSample, z: Complex64) -> Mat<Complex64> {
    let n = m.n();
    let scale = 1.0 / (n as f64).sqrt();
    Mat::from_fn(n, n, |i, j| {
        let x = Complex64::new(m.entries[(i, j)] * scale, 0.0);
        if i == j {
            x - z
        } else {
            x
        }
    })
}

/// The Hermitization `V(z) = [[0, Y - zI], [Y^T - conj(z) I, 0]]`.
pub fn hermitize(m: &MatrixSample, z: Complex64) -> Mat<Complex64> {
    let n = m.n();
    let a = shifted(m, z);
    Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, false) => a[(i, j - n)],
        (false, true) => a[(j, i - n)].conj(),
        _ => Complex64::new(0.0, 0.0),
    })
}

/// Singular values of `X / sqrt(n) - zI` by direct SVD.
pub fn singular_values(m: &MatrixSample, z: Complex64) -> Result<SingularSpectrum> {
    check_finite(m)?;
    let fail = || Error::Decomposition {
        routine: "singular value decomposition",
        fingerprint: matrix_fingerprint(m.entries.as_ref()),
    };
    let values = if z.im == 0.0 {
        let mut a = m.scaled();
        for i in 0..m.n() {
            a[(i, i)] -= z.re;
        }
        a.singular_values().map_err(|_| fail())?
    } else {
        shifted(m, z).singular_values().map_err(|_| fail())?
    };
    SingularSpectrum::from_values(z, values)
}

/// Singular values read off the nonnegative half of the spectrum of `V(z)`.
pub fn singular_values_hermitized(m: &MatrixSample, z: Complex64) -> Result<SingularSpectrum> {
    check_finite(m)?;
    let n = m.n();
    let eig = hermitize(m, z)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Decomposition {
            routine: "Hermitian eigensolver",
            fingerprint: matrix_fingerprint(m.entries.as_ref()),
        })?;
    // ascending: -s_1 <= ... <= -s_n <= s_n <= ... <= s_1
    let values = eig[n..].iter().map(|v| v.abs()).collect();
    SingularSpectrum::from_values(z, values)
}

/// `log |det(X / sqrt(n) - zI)|` as `sum log s_i`.
pub fn log_determinant(m: &MatrixSample, z: Complex64) -> Result<f64> {
    Ok(singular_values(m, z)?.log_abs_det())
}

/// The same quantity from eigenvalues: `sum log |lambda_i - z|`.
pub fn log_determinant_from_eigenvalues(spectrum: &ComplexSpectrum, z: Complex64) -> f64 {
    spectrum.values.iter().map(|l| (l - z).norm().ln()).sum()
}

fn check_upper(alpha: Complex64) -> Result<()> {
    if alpha.im > 0.0 && alpha.re.is_finite() && alpha.im.is_finite() {
        Ok(())
    } else {
        Err(Error::argument(format!(
            "spectral parameter must lie in the upper half-plane, got {alpha}"
        )))
    }
}

/// `S_n(alpha, z) = (1/2n) Tr (V(z) - alpha)^{-1}` from the singular values.
pub fn empirical_stieltjes(spectrum: &SingularSpectrum, alpha: Complex64) -> Result<Complex64> {
    check_upper(alpha)?;
    let total: Complex64 = spectrum
        .values
        .iter()
        .map(|&s| 1.0 / (s - alpha) + 1.0 / (-s - alpha))
        .sum();
    Ok(total / (2 * spectrum.n()) as f64)
}

/// Block traces of the resolvent `R = (V(z) - alpha)^{-1}`, normalized by `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolventTraces {
    /// `(1/n) sum_{j<n} R_jj`
    pub first_block: Complex64,
    /// `(1/n) sum_{j>=n} R_jj`
    pub second_block: Complex64,
    /// `(1/n) sum_j R_{j+n, j}`
    pub t: Complex64,
    /// `(1/n) sum_j R_{j, j+n}`
    pub u: Complex64,
}

/// Assembles the resolvent explicitly and reads off its block traces.
pub fn resolvent_traces(m: &MatrixSample, z: Complex64, alpha: Complex64) -> Result<ResolventTraces> {
    check_upper(alpha)?;
    check_finite(m)?;
    let n = m.n();
    let mut shifted = hermitize(m, z);
    for i in 0..2 * n {
        shifted[(i, i)] -= alpha;
    }
    let r = shifted.partial_piv_lu().inverse();
    let scale = 1.0 / n as f64;
    let mut out = ResolventTraces {
        first_block: Complex64::new(0.0, 0.0),
        second_block: Complex64::new(0.0, 0.0),
        t: Complex64::new(0.0, 0.0),
        u: Complex64::new(0.0, 0.0),
    };
    for j in 0..n {
        out.first_block += r[(j, j)] * scale;
        out.second_block += r[(j + n, j + n)] * scale;
        out.t += r[(j + n, j)] * scale;
        out.u += r[(j, j + n)] * scale;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_matrix, PairDist};

    fn explicit(rows: &[&[f64]]) -> MatrixSample {
        let n = rows.len();
        let spec = EnsembleSpec::new(n, 0.0, PairDist::Gaussian, 0).unwrap();
        MatrixSample::from_entries(spec, Mat::from_fn(n, n, |i, j| rows[i][j])).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_eigenvalues_are_scaled() {
        let m = explicit(&[&[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 1., 0.], &[0., 0., 0., 1.]]);
        for v in eigenvalues(&m).unwrap().values {
            assert!((v - c(0.5, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_eigenvalues() {
        let m = explicit(&[&[0., 1.], &[-1., 0.]]);
        let mut ims: Vec<f64> = eigenvalues(&m).unwrap().values.iter().map(|v| v.im).collect();
        ims.sort_by(f64::total_cmp);
        let r = 1.0 / 2f64.sqrt();
        assert!((ims[0] + r).abs() < 1e-14 && (ims[1] - r).abs() < 1e-14);
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let spec = EnsembleSpec::new(5, 0.4, PairDist::Gaussian, 3).unwrap();
        let m = sample_matrix(&spec, 0);
        let trace: f64 = (0..5).map(|i| m.entries[(i, i)]).sum::<f64>() / 5f64.sqrt();
        let spectrum = eigenvalues(&m).unwrap();
        assert!((spectrum.sum() - c(trace, 0.0)).norm() < 1e-9);
        assert!(spectrum.conjugate_defect() < 1e-9);
    }

    #[test]
    fn scalar_hermitization() {
        let m = explicit(&[&[3.0]]);
        let v = hermitize(&m, c(0.0, 0.0));
        assert_eq!(v[(0, 1)], c(3.0, 0.0));
        assert_eq!(v[(1, 0)], c(3.0, 0.0));
        assert_eq!(v[(0, 0)], c(0.0, 0.0));
        let sv = singular_values_hermitized(&m, c(0.0, 0.0)).unwrap();
        assert!((sv.values[0] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn hermitization_is_hermitian_with_zero_diagonal_blocks_at_origin() {
        let spec = EnsembleSpec::new(6, -0.3, PairDist::Rademacher, 1).unwrap();
        let m = sample_matrix(&spec, 2);
        let v0 = hermitize(&m, c(0.0, 0.0));
        let vz = hermitize(&m, c(0.3, -0.7));
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(vz[(i, j)], vz[(j, i)].conj());
                if (i < 6) == (j < 6) {
                    assert_eq!(v0[(i, j)], c(0.0, 0.0));
                    assert_eq!(vz[(i, j)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn diagonal_singular_values() {
        let r2 = 2f64.sqrt();
        let m = explicit(&[&[2.0 * r2, 0.0], &[0.0, r2]]);
        let sv = singular_values(&m, c(0.0, 0.0)).unwrap();
        assert!((sv.values[0] - 2.0).abs() < 1e-14);
        assert!((sv.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn large_shift_singular_values_near_modulus() {
        let spec = EnsembleSpec::new(8, 0.5, PairDist::Gaussian, 9).unwrap();
        let m = sample_matrix(&spec, 0);
        let s1 = singular_values(&m, c(0.0, 0.0)).unwrap().largest();
        let z = c(30.0, 40.0);
        for s in singular_values(&m, z).unwrap().values {
            assert!((s - 50.0).abs() <= 2.0 * s1);
        }
    }

    #[test]
    fn symmetrized_cdf_relation() {
        let spec = EnsembleSpec::new(7, 0.2, PairDist::Gaussian, 4).unwrap();
        let sv = singular_values(&sample_matrix(&spec, 1), c(0.4, 0.1)).unwrap();
        let mut points = sv.symmetrized();
        points.extend([0.0, -10.0, 10.0, 0.123, -0.123]);
        for x in points {
            let lhs = sv.symmetrized_cdf(x);
            let rhs = if x > 0.0 {
                (1.0 + sv.singular_cdf(x.abs())) / 2.0
            } else if x < 0.0 {
                (1.0 - sv.singular_cdf(x.abs())) / 2.0
            } else {
                0.5
            };
            // at x = -s_i the left-closed count differs by one atom
            let atom = if sv.values.contains(&x.abs()) && x < 0.0 { 1.0 / 14.0 } else { 0.0 };
            assert!((lhs - rhs).abs() <= atom + 1e-15, "x = {x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn scalar_log_determinant() {
        let m = explicit(&[&[-2.5]]);
        assert!((log_determinant(&m, c(0.0, 0.0)).unwrap() - 2.5f64.ln()).abs() < 1e-15);
        let zero = explicit(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(log_determinant(&zero, c(0.0, 0.0)).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn far_field_log_determinant() {
        let spec = EnsembleSpec::new(50, 0.2, PairDist::Gaussian, 8).unwrap();
        let m = sample_matrix(&spec, 0);
        let per_n = log_determinant(&m, c(10.0, 0.0)).unwrap() / 50.0;
        assert!((per_n - 10f64.ln()).abs() < 1e-2);
    }

    #[test]
    fn zero_matrix_stieltjes_is_point_mass() {
        let m = explicit(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let sv = singular_values(&m, c(0.0, 0.0)).unwrap();
        let alpha = c(0.3, 1.7);
        let s = empirical_stieltjes(&sv, alpha).unwrap();
        assert!((s + 1.0 / alpha).norm() < 1e-15);
        assert!(empirical_stieltjes(&sv, c(1.0, 0.0)).is_err());
        assert!(empirical_stieltjes(&sv, c(1.0, -1.0)).is_err());
    }

    #[test]
    fn stieltjes_first_block_matches_resolvent() {
        let spec = EnsembleSpec::new(12, 0.5, PairDist::Gaussian, 12).unwrap();
        let m = sample_matrix(&spec, 0);
        let z = c(0.7, 0.2);
        let alpha = c(0.1, 0.5);
        let traces = resolvent_traces(&m, z, alpha).unwrap();
        let s = empirical_stieltjes(&singular_values(&m, z).unwrap(), alpha).unwrap();
        assert!(((traces.first_block + traces.second_block) / 2.0 - s).norm() < 1e-10);
        // the two diagonal blocks of the resolvent have equal traces exactly
        assert!((traces.first_block - traces.second_block).norm() < 1e-10);
    }

    #[test]
    fn fingerprint_is_stable_and_sensitive() {
        let a = explicit(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = explicit(&[&[1.0, 2.0], &[3.0, 4.5]]);
        assert_eq!(matrix_fingerprint(a.entries.as_ref()), matrix_fingerprint(a.entries.as_ref()));
        assert_ne!(matrix_fingerprint(a.entries.as_ref()), matrix_fingerprint(b.entries.as_ref()));
        assert_eq!(matrix_fingerprint(a.entries.as_ref()).len(), 16);
    }

    #[test]
    fn non_finite_entries_rejected() {
        let m = explicit(&[&[f64::NAN]]);
        assert!(eigenvalues(&m).is_err());
        assert!(singular_values(&m, c(0.0, 0.0)).is_err());
    }
}
