//! The elliptic law and the finite-`n` statistics compared against it.

mod coverage;
mod diagnostics;
mod law;
mod potential;

pub use coverage::{coverage_report, discrepancy, histogram2d, CoverageReport, Rect, SpectralHistogram};
pub use diagnostics::{
    largest_sv_check, log_moment_diagnostics, sv_profile_check, LargestSvCheck, LogMoments, SvProfile,
};
pub use law::EllipticLaw;
pub use potential::{
    log_potential_empirical, log_potential_from_spectra, reference_potential, EmpiricalPotential,
    PotentialReport,
};
