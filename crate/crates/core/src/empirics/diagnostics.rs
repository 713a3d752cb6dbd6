//! Singular-value diagnostics behind the log-integrability argument.

use serde::Serialize;

use crate::ensemble::MatrixSample;
use crate::spectral::{self, SingularSpectrum};
use crate::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogMoments {
    /// `(1/n) sum s_i^p`
    pub moment_p: f64,
    /// `(1/n) sum_{s_i^p > t} s_i^p`, the uniform-integrability tail of `x^p`.
    pub tail_p_above_t: f64,
    /// `(1/n) sum_{|log s_i| > t} |log s_i|`, the same tail for `log`.
    pub log_tail_above_t: f64,
    /// `(1/n) sum s_i^{-q}`; `+inf` when some `s_i = 0`.
    pub moment_neg_q: f64,
}

pub fn log_moment_diagnostics(spectrum: &SingularSpectrum, p: f64, q: f64, t: f64) -> Result<LogMoments> {
    if !(p > 0.0) {
        return Err(Error::argument(format!("p must be positive, got {p}")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::argument(format!("q must lie in (0, 1), got {q}")));
    }
    if !(t > 0.0) {
        return Err(Error::argument(format!("t must be positive, got {t}")));
    }
    let n = spectrum.n() as f64;
    let mut out = LogMoments {
        moment_p: 0.0,
        tail_p_above_t: 0.0,
        log_tail_above_t: 0.0,
        moment_neg_q: 0.0,
    };
    for &s in &spectrum.values {
        let sp = s.powf(p);
        out.moment_p += sp;
        if sp > t {
            out.tail_p_above_t += sp;
        }
        let l = s.ln().abs();
        if l > t {
            out.log_tail_above_t += l;
        }
        out.moment_neg_q += if s > 0.0 { s.powf(-q) } else { f64::INFINITY };
    }
    out.moment_p /= n;
    out.tail_p_above_t /= n;
    out.log_tail_above_t /= n;
    out.moment_neg_q /= n;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SvProfile {
    pub holds: bool,
    /// Index `i` minimizing `s_{n-i} / (c i / n)` over the checked range.
    pub worst_index: Option<usize>,
    pub worst_ratio: f64,
}

/// Checks `s_{n-i} >= c i / n` for every integer `i` in `[n^{1-gamma}, n-1]`
/// (singular values indexed from 1, largest first).
pub fn sv_profile_check(spectrum: &SingularSpectrum, c: f64, gamma: f64) -> Result<SvProfile> {
    if !(c > 0.0) {
        return Err(Error::argument(format!("c must be positive, got {c}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::argument(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let n = spectrum.n();
    let start = (n as f64).powf(1.0 - gamma).ceil() as usize;
    let mut out = SvProfile {
        holds: true,
        worst_index: None,
        worst_ratio: f64::INFINITY,
    };
    for i in start.max(1)..n {
        // s_{n-i} is values[n - i - 1]
        let s = spectrum.values[n - i - 1];
        let ratio = s / (c * i as f64 / n as f64);
        if ratio < out.worst_ratio {
            out.worst_ratio = ratio;
            out.worst_index = Some(i);
        }
    }
    out.holds = out.worst_ratio >= 1.0;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargestSvCheck {
    /// `s_1(X) / sqrt(n)`
    pub scaled_norm: f64,
    /// `sqrt(2(1+rho)) + sqrt(2(1-rho)) + margin`
    pub bound: f64,
    pub holds: bool,
}

/// Operator-norm bound from splitting `X` into symmetric and skew parts.
pub fn largest_sv_check(m: &MatrixSample, margin: f64) -> Result<LargestSvCheck> {
    if !(margin > 0.0) {
        return Err(Error::argument(format!("margin must be positive, got {margin}")));
    }
    let rho = m.spec.rho();
    let bound = (2.0 * (1.0 + rho)).sqrt() + (2.0 * (1.0 - rho)).sqrt() + margin;
    let scaled_norm = spectral::singular_values(m, Complex64::new(0.0, 0.0))?.largest();
    Ok(LargestSvCheck {
        scaled_norm,
        bound,
        holds: scaled_norm <= bound,
    })
}
