//! Logarithmic potentials `U_m(z) = -integral log|z - w| m(dw)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::EllipticLaw;
use crate::ensemble::MatrixSample;
use crate::quadrature::integrate_over_ellipse;
use crate::spectral::{self, ComplexSpectrum, SingularSpectrum};
use crate::{Error, Result};

/// Angular nodes for interior points (periodic trapezoid).
const RAY_NODES: usize = 4096;
/// Tensor rule for exterior points.
const EXTERIOR_RADIAL: usize = 64;
const EXTERIOR_ANGULAR: usize = 1024;

/// Potential of the empirical spectral measure at `z`, by two routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalPotential {
    pub z: Complex64,
    /// `-(1/n) sum log s_i(X/sqrt(n) - z)`
    pub via_singular_values: f64,
    /// `-(1/n) sum log |lambda_i - z|`
    pub via_eigenvalues: f64,
    /// A singular value was exactly zero; the potential is `+inf`.
    pub infinite: bool,
}

impl EmpiricalPotential {
    pub fn value(&self) -> f64 {
        self.via_singular_values
    }

    pub fn path_gap(&self) -> f64 {
        if self.infinite {
            0.0
        } else {
            (self.via_singular_values - self.via_eigenvalues).abs()
        }
    }
}

pub fn log_potential_from_spectra(eigen: &ComplexSpectrum, singular: &SingularSpectrum) -> Result<EmpiricalPotential> {
    if eigen.len() != singular.n() {
        return Err(Error::argument("eigenvalue and singular value counts differ"));
    }
    let n = singular.n() as f64;
    let via_singular_values = -singular.log_abs_det() / n;
    let via_eigenvalues = -spectral::log_determinant_from_eigenvalues(eigen, singular.z) / n;
    Ok(EmpiricalPotential {
        z: singular.z,
        via_singular_values,
        via_eigenvalues,
        infinite: via_singular_values == f64::INFINITY,
    })
}

/// `U_{mu_n}(z)` of the eigenvalue measure of `X / sqrt(n)`.
pub fn log_potential_empirical(m: &MatrixSample, z: Complex64) -> Result<EmpiricalPotential> {
    let eigen = spectral::eigenvalues(m)?;
    let singular = spectral::singular_values(m, z)?;
    log_potential_from_spectra(&eigen, &singular)
}

/// Potential of the uniform law on the ellipse.
///
/// For `z` in the closed ellipse the area integral is taken along rays from
/// `z`: a ray of length `R` contributes `(R^2 / 4)(1 - 2 log R)` in closed form,
/// and the remaining angular integral is smooth and periodic. Outside the
/// ellipse the integrand is smooth and an elliptic-polar tensor rule is used.
pub fn reference_potential(law: &EllipticLaw, z: Complex64) -> f64 {
    let (a, b) = (law.semi_axis_x, law.semi_axis_y);
    let (x0, y0) = (z.re, z.im);
    let c = (x0 / a).powi(2) + (y0 / b).powi(2) - 1.0;
    if c <= 0.0 {
        let dt = 2.0 * PI / RAY_NODES as f64;
        let total: f64 = (0..RAY_NODES)
            .map(|k| {
                let (s, co) = (k as f64 * dt).sin_cos();
                let qa = (co / a).powi(2) + (s / b).powi(2);
                let qb = 2.0 * (x0 * co / (a * a) + y0 * s / (b * b));
                let disc = (qb * qb - 4.0 * qa * c).max(0.0);
                let r = ((-qb + disc.sqrt()) / (2.0 * qa)).max(0.0);
                if r > 0.0 {
                    r * r * (1.0 - 2.0 * r.ln()) / 4.0
                } else {
                    0.0
                }
            })
            .sum();
        total * dt * law.density_value
    } else {
        -law.density_value
            * integrate_over_ellipse(a, b, EXTERIOR_RADIAL, EXTERIOR_ANGULAR, |x, y| {
                0.5 * ((x - x0).powi(2) + (y - y0).powi(2)).ln()
            })
    }
}

/// Empirical, limiting and reference potentials at one shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialReport {
    pub z: Complex64,
    pub u_empirical: f64,
    pub u_limit: f64,
    pub u_reference: f64,
    pub empirical_vs_reference: f64,
    pub limit_vs_reference: f64,
    pub empirical_vs_limit: f64,
}

impl PotentialReport {
    pub fn new(z: Complex64, u_empirical: f64, u_limit: f64, u_reference: f64) -> Self {
        Self {
            z,
            u_empirical,
            u_limit,
            u_reference,
            empirical_vs_reference: (u_empirical - u_reference).abs(),
            limit_vs_reference: (u_limit - u_reference).abs(),
            empirical_vs_limit: (u_empirical - u_limit).abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_matrix, EnsembleSpec, PairDist};
    use crate::Mat;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Interior potential of a uniform ellipse with `a + b = 2`, the unique
    /// quadratic with Laplacian `-2 pi g`, the law's symmetries and `U(0) = 1/2`.
    fn interior_closed_form(law: &EllipticLaw, z: Complex64) -> f64 {
        0.5 - z.re * z.re / (2.0 * law.semi_axis_x) - z.im * z.im / (2.0 * law.semi_axis_y)
    }

    /// Brute-force masked tensor midpoint rule on the bounding box, with the
    /// singular cell around `z` handled by its mean-value integral.
    fn masked_box(law: &EllipticLaw, z: Complex64, k: usize) -> f64 {
        let (a, b) = (law.semi_axis_x, law.semi_axis_y);
        let (dx, dy) = (2.0 * a / k as f64, 2.0 * b / k as f64);
        let mut total = 0.0;
        for i in 0..k {
            for j in 0..k {
                let (x, y) = (-a + (i as f64 + 0.5) * dx, -b + (j as f64 + 0.5) * dy);
                if law.contains(x, y, 1.0) {
                    let d = ((x - z.re).powi(2) + (y - z.im).powi(2)).sqrt();
                    let d = d.max(0.5 * (dx * dy / PI).sqrt());
                    total -= d.ln();
                }
            }
        }
        total * dx * dy * law.density_value
    }

    #[test]
    fn disk_centre_and_exterior() {
        let law = EllipticLaw::new(0.0).unwrap();
        assert!((reference_potential(&law, c(0.0, 0.0)) - 0.5).abs() < 1e-10);
        assert!((reference_potential(&law, c(2.0, 0.0)) + 2f64.ln()).abs() < 1e-10);
        assert!((reference_potential(&law, c(0.0, -2.0)) + 2f64.ln()).abs() < 1e-10);
        assert!((reference_potential(&law, c(0.5, 0.0)) - 0.375).abs() < 1e-10);
    }

    #[test]
    fn central_symmetry() {
        let law = EllipticLaw::new(0.5).unwrap();
        for z in [c(0.3, 0.2), c(1.2, -0.1), c(2.0, 1.0)] {
            let gap = reference_potential(&law, z) - reference_potential(&law, -z);
            assert!(gap.abs() < 1e-10, "{z}: {gap}");
        }
    }

    #[test]
    fn interior_matches_quadratic_form() {
        for rho in [0.5, -0.5, 0.8] {
            let law = EllipticLaw::new(rho).unwrap();
            for z in [c(0.0, 0.0), c(0.3, 0.1), c(0.9 * law.semi_axis_x, 0.0), c(0.0, 0.5 * law.semi_axis_y)] {
                let got = reference_potential(&law, z);
                assert!((got - interior_closed_form(&law, z)).abs() < 1e-4, "rho {rho} z {z}: {got}");
            }
        }
    }

    #[test]
    fn agrees_with_masked_box_rule() {
        let law = EllipticLaw::new(0.5).unwrap();
        for z in [c(1.0, 0.0), c(0.0, 0.25), c(2.0, 0.5)] {
            let fine = masked_box(&law, z, 600);
            assert!((reference_potential(&law, z) - fine).abs() < 2e-3, "z {z}");
        }
    }

    #[test]
    fn exterior_is_continuous_across_boundary() {
        let law = EllipticLaw::new(0.5).unwrap();
        let inside = reference_potential(&law, c(1.5 - 1e-3, 0.0));
        let outside = reference_potential(&law, c(1.5 + 1e-3, 0.0));
        assert!((inside - outside).abs() < 5e-3);
    }

    #[test]
    fn scalar_matrix_potential() {
        let spec = EnsembleSpec::new(1, 0.0, PairDist::Gaussian, 0).unwrap();
        let m = MatrixSample::from_entries(spec, Mat::from_fn(1, 1, |_, _| -0.7)).unwrap();
        let u = log_potential_empirical(&m, c(0.0, 0.0)).unwrap();
        assert!((u.value() + 0.7f64.ln()).abs() < 1e-15);
        assert!(u.path_gap() < 1e-15);
    }

    #[test]
    fn two_paths_agree_and_far_field() {
        let spec = EnsembleSpec::new(50, -0.3, PairDist::Rademacher, 21).unwrap();
        let m = sample_matrix(&spec, 0);
        let u = log_potential_empirical(&m, c(0.4, -0.2)).unwrap();
        assert!(u.path_gap() < 1e-8);
        let far = log_potential_empirical(&m, c(6.0, 8.0)).unwrap();
        assert!((far.value() + 10f64.ln()).abs() < 1e-2);
    }

    #[test]
    fn singular_matrix_flags_infinite() {
        let spec = EnsembleSpec::new(2, 0.0, PairDist::Gaussian, 0).unwrap();
        let m = MatrixSample::from_entries(spec, Mat::zeros(2, 2)).unwrap();
        let u = log_potential_empirical(&m, c(0.0, 0.0)).unwrap();
        assert!(u.infinite);
    }
}
