//! Simulation and verification toolkit for the elliptic law.
//!
//! Real `n x n` matrices whose off-diagonal pairs `(X_ij, X_ji)` are i.i.d. with
//! correlation `rho` have eigenvalues (of `X / sqrt(n)`) that fill the ellipse
//! with semi-axes `1 + rho` and `1 - rho` uniformly as `n` grows. This crate
//! samples such ensembles, computes their spectra, solves the limiting
//! Stieltjes-transform system of the Hermitized problem, and compares the two
//! sides through logarithmic potentials and Monte Carlo statistics.
//!
//! Layout:
//!
//! * [`ensemble`] draws matrices with a counter-based RNG and audits moments.
//! * [`spectral`] computes eigenvalues, singular values, Hermitizations,
//!   log-determinants and empirical Stieltjes transforms.
//! * [`empirics`] holds the limit law itself and the finite-`n` diagnostics.
//! * [`limitlaw`] solves the limiting `(s, t, u)` system and inverts it.
//! * [`svlab`] is the least-singular-value and small-ball laboratory.

pub mod empirics;
pub mod ensemble;
mod error;
pub mod limitlaw;
pub mod quadrature;
pub mod spectral;
pub mod svlab;

pub use error::{Error, Result};

pub use faer::Mat;
pub use num_complex::Complex64;

pub use empirics::{EllipticLaw, PotentialReport, SpectralHistogram};
pub use ensemble::{DiagDist, EnsembleSpec, MatrixSample, PairDist};
pub use limitlaw::{DensityCurve, StieltjesTriple};
pub use spectral::{ComplexSpectrum, SingularSpectrum};
