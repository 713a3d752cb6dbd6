//! Newton continuation down a ladder in `Im alpha`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::system::{phi, raw_residuals};
use super::StieltjesTriple;
use crate::error::Location;
use crate::ensemble::check_rho;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Step multiplier applied when a Newton step is rejected.
    pub damping: f64,
    pub ladder_factor: f64,
    pub v_top: f64,
    pub v_min: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-12,
            max_iter: 200,
            damping: 0.5,
            ladder_factor: 0.8,
            v_top: 10.0,
            v_min: 1e-4,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::config("tol", format!("must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::config("max_iter", "must be at least 1"));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::config("damping", format!("must lie in (0, 1), got {}", self.damping)));
        }
        if !(self.ladder_factor > 0.0 && self.ladder_factor < 1.0) {
            return Err(Error::config(
                "ladder_factor",
                format!("must lie in (0, 1), got {}", self.ladder_factor),
            ));
        }
        if !(self.v_min > 0.0) {
            return Err(Error::config("v_min", format!("must be positive, got {}", self.v_min)));
        }
        if !(self.v_top > self.v_min) {
            return Err(Error::config("v_top", format!("must exceed v_min, got {}", self.v_top)));
        }
        Ok(())
    }
}

/// Decreasing geometric ladder `v_top >= ... > v_min`. Built upward from
/// `v_min` so that the two bottom rungs are exactly `v_min` and `v_min / factor`.
pub fn geometric_ladder(v_top: f64, v_min: f64, factor: f64) -> Result<Vec<f64>> {
    if !(v_min > 0.0 && v_top > v_min) {
        return Err(Error::argument(format!("need 0 < v_min < v_top, got {v_min} and {v_top}")));
    }
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::argument(format!("ladder factor must lie in (0, 1), got {factor}")));
    }
    let mut ladder = vec![v_min];
    let mut v = v_min;
    while v < v_top {
        v /= factor;
        ladder.push(v);
    }
    ladder.reverse();
    Ok(ladder)
}

/// Damped Newton on `Phi` from `s0`. Steps that leave the upper half-plane or
/// increase `|Phi|` are shrunk by `damping`.
fn newton(alpha: Complex64, z: Complex64, rho: f64, s0: Complex64, opts: &SolverOptions) -> Result<StieltjesTriple> {
    let location = Location { alpha, z, rho };
    let mut s = s0;
    let mut trace = Vec::new();
    for iteration in 0..=opts.max_iter {
        let (f, df, e) = phi(alpha, z, rho, s)?;
        let residuals = raw_residuals(alpha, z, rho, s, e.t, e.u);
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        trace.push((worst, s));
        if worst <= opts.tol {
            if s.im < -opts.tol {
                return Err(Error::Branch { location, im_s: s.im });
            }
            return Ok(StieltjesTriple {
                alpha,
                z,
                rho,
                s,
                t: e.t,
                u: e.u,
                residuals,
            });
        }
        if iteration == opts.max_iter {
            break;
        }
        let step = -f / df;
        let mut lambda = 1.0;
        let mut next = s + step;
        loop {
            if next.im > 0.0 {
                if let Ok((fn_, _, _)) = phi(alpha, z, rho, next) {
                    if fn_.norm() < f.norm() {
                        break;
                    }
                }
            }
            lambda *= opts.damping;
            next = s + lambda * step;
            if lambda < 1e-12 {
                break;
            }
        }
        if next == s || !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        s = next;
    }
    let residual = trace.last().map_or(f64::NAN, |t| t.0);
    Err(Error::NoConvergence {
        location,
        iterations: trace.len() - 1,
        residual,
        trace,
    })
}

/// Solve along `alpha = x + i v` for each rung of `ladder`, warm-starting each
/// rung from the previous one and the first from `-1 / alpha`.
fn continue_down(x: f64, ladder: &[f64], z: Complex64, rho: f64, opts: &SolverOptions) -> Result<Vec<StieltjesTriple>> {
    let mut out: Vec<StieltjesTriple> = Vec::with_capacity(ladder.len());
    for &v in ladder {
        let alpha = Complex64::new(x, v);
        let start = out.last().map_or(-1.0 / alpha, |p| p.s);
        out.push(newton(alpha, z, rho, start, opts)?);
    }
    Ok(out)
}

/// Solve the limiting system at one `alpha` in the upper half-plane.
pub fn solve_point(alpha: Complex64, z: Complex64, rho: f64, tol: f64) -> Result<StieltjesTriple> {
    let opts = SolverOptions {
        tol,
        ..SolverOptions::default()
    };
    solve_point_with(alpha, z, rho, &opts)
}

pub fn solve_point_with(alpha: Complex64, z: Complex64, rho: f64, opts: &SolverOptions) -> Result<StieltjesTriple> {
    check_rho(rho)?;
    opts.validate()?;
    if !(alpha.im > 0.0) {
        return Err(Error::argument(format!("alpha must lie in the upper half-plane, got {alpha}")));
    }
    let top = opts.v_top.max(2.0 * alpha.re.abs());
    let ladder = if alpha.im >= top {
        vec![alpha.im]
    } else {
        geometric_ladder(top, alpha.im, opts.ladder_factor)?
    };
    let column = continue_down(alpha.re, &ladder, z, rho, opts)?;
    Ok(*column.last().expect("ladder is never empty"))
}

/// Triples on an `x` grid times a `v` ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderSolution {
    pub z: Complex64,
    pub rho: f64,
    pub x_grid: Vec<f64>,
    pub v_ladder: Vec<f64>,
    /// `columns[j][k]` is the triple at `x_grid[j] + i v_ladder[k]`.
    pub columns: Vec<Vec<StieltjesTriple>>,
}

impl LadderSolution {
    /// Triples at the bottom rung, one per grid point.
    pub fn bottom(&self) -> impl Iterator<Item = &StieltjesTriple> + '_ {
        self.columns.iter().filter_map(|c| c.last())
    }

    /// All triples in `(x, v)` row-major order.
    pub fn iter(&self) -> impl Iterator<Item = &StieltjesTriple> + '_ {
        self.columns.iter().flatten()
    }
}

pub fn solve_grid(
    z: Complex64,
    rho: f64,
    x_grid: &[f64],
    v_ladder: &[f64],
    opts: &SolverOptions,
) -> Result<LadderSolution> {
    check_rho(rho)?;
    opts.validate()?;
    if x_grid.windows(2).any(|w| !(w[0] < w[1])) || x_grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::argument("x grid must be finite and strictly increasing"));
    }
    if v_ladder.is_empty() || v_ladder.windows(2).any(|w| !(w[0] > w[1])) || !(v_ladder[v_ladder.len() - 1] > 0.0) {
        return Err(Error::argument("v ladder must be nonempty, strictly decreasing and positive"));
    }
    let columns = x_grid
        .par_iter()
        .map(|&x| continue_down(x, v_ladder, z, rho, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(LadderSolution {
        z,
        rho,
        x_grid: x_grid.to_vec(),
        v_ladder: v_ladder.to_vec(),
        columns,
    })
}
