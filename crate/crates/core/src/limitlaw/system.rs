//! Algebra of the limiting system: elimination of `t` and `u`, the scalar
//! residual in `s`, and the raw three-equation residuals.

use num_complex::Complex64;

use crate::error::Location;
use crate::{Error, Result};

const GUARD: f64 = 1e-14;

/// `t`, `u` as functions of `s`, with `dt/ds` when asked for.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Elimination {
    pub t: Complex64,
    pub u: Complex64,
    pub dt: Complex64,
}

pub(crate) fn eliminate(alpha: Complex64, z: Complex64, rho: f64, s: Complex64) -> Result<Elimination> {
    let loc = || Location { alpha, z, rho };
    let a = alpha + s;
    if a.norm() < GUARD {
        return Err(Error::Singular {
            location: loc(),
            which: "alpha + s",
        });
    }
    let s2 = s * s;
    let delta = a - rho * rho * s2 / a;
    if delta.norm() < GUARD {
        return Err(Error::Singular {
            location: loc(),
            which: "delta",
        });
    }
    let zc = z.conj();
    let n_t = rho * z * s2 / a - zc * s;
    let n_u = rho * zc * s2 / a - z * s;
    // d/ds of s^2 / (alpha + s)
    let q = (2.0 * s * a - s2) / (a * a);
    let dn_t = rho * z * q - zc;
    let ddelta = 1.0 - rho * rho * q;
    Ok(Elimination {
        t: n_t / delta,
        u: n_u / delta,
        dt: (dn_t * delta - n_t * ddelta) / (delta * delta),
    })
}

/// `Phi(s) = 1 + alpha s + s^2 + rho t^2 + z t` and its derivative.
pub(crate) fn phi(alpha: Complex64, z: Complex64, rho: f64, s: Complex64) -> Result<(Complex64, Complex64, Elimination)> {
    let e = eliminate(alpha, z, rho, s)?;
    let f = 1.0 + alpha * s + s * s + rho * e.t * e.t + z * e.t;
    let df = alpha + 2.0 * s + 2.0 * rho * e.t * e.dt + z * e.dt;
    Ok((f, df, e))
}

/// Residuals of the three equations in their original, symmetric form:
///
/// * `1 + alpha s + s^2 + (rho/2) t^2 + (z/2) t + (rho/2) u^2 + (conj z/2) u`
/// * `alpha t + s t + rho s u + conj(z) s`
/// * `alpha u + s u + rho s t + z s`
pub fn raw_residuals(alpha: Complex64, z: Complex64, rho: f64, s: Complex64, t: Complex64, u: Complex64) -> [f64; 3] {
    let zc = z.conj();
    let r1 = 1.0 + alpha * s + s * s + 0.5 * rho * (t * t + u * u) + 0.5 * z * t + 0.5 * zc * u;
    let r2 = alpha * t + s * t + rho * s * u + zc * s;
    let r3 = alpha * u + s * u + rho * s * t + z * s;
    [r1.norm(), r2.norm(), r3.norm()]
}

/// Residuals of the `rho = 0` system in the variables `y = s`,
/// `w = alpha + z t / y`:
/// `1 + w y + y^2` and `(w - alpha) + (w - alpha)^2 y - |z|^2 y`.
pub fn circular_reduced_residuals(alpha: Complex64, z: Complex64, s: Complex64, t: Complex64) -> [f64; 2] {
    let y = s;
    let w = alpha + z * t / y;
    let d = w - alpha;
    [(1.0 + w * y + y * y).norm(), (d + d * d * y - z.norm_sqr() * y).norm()]
}
