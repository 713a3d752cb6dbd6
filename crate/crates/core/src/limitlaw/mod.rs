//! The limiting system for the Hermitized resolvent.
//!
//! For `Y = X / sqrt(n)` and `V(z) = [[0, Y - z], [Y^T - conj z, 0]]`, the
//! normalized block traces of `(V(z) - alpha)^{-1}` converge to `(s, t, u)`
//! solving
//!
//! ```text
//! 1 + alpha s + s^2 + (rho/2) t^2 + (z/2) t + (rho/2) u^2 + (conj z/2) u = 0
//! (alpha + s) t + rho s u + conj(z) s = 0
//! (alpha + s) u + rho s t + z s = 0
//! ```
//!
//! The last two are linear in `(t, u)`; eliminating them leaves one scalar
//! equation in `s`, solved by Newton continuation from large `Im alpha`.

mod inversion;
mod solver;
mod system;

use num_complex::Complex64;
use serde::Serialize;

use crate::empirics::{reference_potential, EllipticLaw};
use crate::Result;

pub use inversion::{
    default_x_grid, invert_density, limit_density, limit_log_potential, stieltjes_density, DensityCurve,
    DensityPoint, LimitPotential, DEFAULT_X_STEP, EXTRAPOLATION_GAP,
};
pub use solver::{geometric_ladder, solve_grid, solve_point, solve_point_with, LadderSolution, SolverOptions};
pub use system::{circular_reduced_residuals, raw_residuals};

/// A solution `(s, t, u)` at one `(alpha, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StieltjesTriple {
    pub alpha: Complex64,
    pub z: Complex64,
    pub rho: f64,
    pub s: Complex64,
    pub t: Complex64,
    pub u: Complex64,
    pub residuals: [f64; 3],
}

impl StieltjesTriple {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub z: Complex64,
    pub u_limit: f64,
    pub u_reference: f64,
    pub difference: f64,
    pub total_mass: f64,
    pub first_cell_flagged: bool,
    pub low_confidence_points: usize,
}

/// Compare the potential recovered from the limiting system with the
/// potential of the uniform law on the ellipse.
pub fn elliptic_consistency(z_list: &[Complex64], rho: f64) -> Result<Vec<ConsistencyRow>> {
    let law = EllipticLaw::new(rho)?;
    let opts = SolverOptions::default();
    z_list
        .iter()
        .map(|&z| {
            let curve = limit_density(z, rho, &opts, DEFAULT_X_STEP)?;
            let u = limit_log_potential(&curve)?;
            let u_reference = reference_potential(&law, z);
            Ok(ConsistencyRow {
                z,
                u_limit: u.value,
                u_reference,
                difference: (u.value - u_reference).abs(),
                total_mass: curve.total_mass,
                first_cell_flagged: u.flagged,
                low_confidence_points: curve.low_confidence.len(),
            })
        })
        .collect()
}
