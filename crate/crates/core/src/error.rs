use std::fmt;

use num_complex::Complex64;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An ensemble or solver configuration value is out of range.
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: &'static str, reason: String },

    /// A call-site argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A decomposition did not converge.
    #[error("{routine} failed to converge on matrix {fingerprint}")]
    Decomposition {
        routine: &'static str,
        fingerprint: String,
    },

    /// Newton iteration for the limiting system did not converge.
    #[error("limit solver did not converge at {location} after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        location: Location,
        iterations: usize,
        residual: f64,
        trace: Vec<(f64, Complex64)>,
    },

    /// A converged root left the upper half-plane.
    #[error("limit solver landed on the wrong branch at {location}: Im s = {im_s:.3e}")]
    Branch { location: Location, im_s: f64 },

    /// A denominator of the closed-form elimination vanished.
    #[error("singular elimination at {location}: |{which}| < 1e-14")]
    Singular {
        location: Location,
        which: &'static str,
    },
}

/// Where in `(alpha, z)` space a limit-system failure happened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub alpha: Complex64,
    pub z: Complex64,
    pub rho: f64,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha = {}{:+}i, z = {}{:+}i, rho = {}",
            self.alpha.re, self.alpha.im, self.z.re, self.z.im, self.rho
        )
    }
}

impl Error {
    pub(crate) fn config(key: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            key,
            reason: reason.into(),
        }
    }

    pub(crate) fn argument(reason: impl Into<String>) -> Self {
        Error::Argument(reason.into())
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Config { .. } | Error::Argument(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
