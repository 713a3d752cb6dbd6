//! Stieltjes inversion of ladder solutions and the limiting log-potential.

use num_complex::Complex64;
use serde::Serialize;

use super::solver::{geometric_ladder, solve_grid, LadderSolution, SolverOptions};
use crate::{Error, Result};

/// Absolute gap in `f_F` between the two bottom rungs above which a point is
/// marked low-confidence.
pub const EXTRAPOLATION_GAP: f64 = 1e-2;

/// Default `x` spacing of density grids.
pub const DEFAULT_X_STEP: f64 = 2e-3;

/// Density of the symmetrized singular-value law `F` at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub x: f64,
    /// `(1/pi) Im s(x + i0)`, extrapolated and clamped at 0.
    pub f: f64,
    pub low_confidence: bool,
}

/// Density of `nu_z`, the limiting law of the singular values of `Y - z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve {
    pub z: Complex64,
    pub rho: f64,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub total_mass: f64,
    /// Grid indices whose extrapolation was unreliable.
    pub low_confidence: Vec<usize>,
}

impl DensityCurve {
    /// `(x, density)` of the largest density value.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.grid
            .iter()
            .zip(&self.density)
            .map(|(&x, &f)| (x, f))
            .fold(None, |best: Option<(f64, f64)>, p| match best {
                Some(b) if b.1 >= p.1 => Some(b),
                _ => Some(p),
            })
    }
}

/// Richardson-extrapolated `f_F` on every grid point of `sol`.
pub fn stieltjes_density(sol: &LadderSolution) -> Result<Vec<DensityPoint>> {
    let k = sol.v_ladder.len();
    if k < 2 {
        return Err(Error::argument("inversion needs at least two ladder rungs"));
    }
    let (v2, v1) = (sol.v_ladder[k - 2], sol.v_ladder[k - 1]);
    Ok(sol
        .x_grid
        .iter()
        .zip(&sol.columns)
        .map(|(&x, col)| {
            let f2 = col[k - 2].s.im / std::f64::consts::PI;
            let f1 = col[k - 1].s.im / std::f64::consts::PI;
            // linear in v through (v1, f1) and (v2, f2), evaluated at v = 0
            let f0 = (v2 * f1 - v1 * f2) / (v2 - v1);
            DensityPoint {
                x,
                f: f0.max(0.0),
                low_confidence: (f1 - f2).abs() > EXTRAPOLATION_GAP,
            }
        })
        .collect())
}

fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
        .sum()
}

/// Density of `nu_z` on the nonnegative part of the grid: twice the density
/// of the symmetrized law.
pub fn invert_density(sol: &LadderSolution) -> Result<DensityCurve> {
    let points = stieltjes_density(sol)?;
    let mut grid = Vec::new();
    let mut density = Vec::new();
    let mut low_confidence = Vec::new();
    for p in points.iter().filter(|p| p.x >= 0.0) {
        if p.low_confidence {
            low_confidence.push(grid.len());
        }
        grid.push(p.x);
        density.push(2.0 * p.f);
    }
    let total_mass = trapezoid(&grid, &density);
    Ok(DensityCurve {
        z: sol.z,
        rho: sol.rho,
        grid,
        density,
        total_mass,
        low_confidence,
    })
}

/// Uniform grid `0, h, 2h, ...` reaching past the support of `nu_z`, which
/// lies in `[0, |z| + 1 + |rho| + 1]`.
pub fn default_x_grid(z: Complex64, step: f64) -> Vec<f64> {
    let x_max = z.norm() + 3.5;
    let count = (x_max / step).ceil() as usize;
    (0..=count).map(|j| j as f64 * step).collect()
}

/// Solve and invert on the default grid with spacing `x_step`, on a ladder
/// reaching from above `2 x_max` down to `opts.v_min`.
pub fn limit_density(z: Complex64, rho: f64, opts: &SolverOptions, x_step: f64) -> Result<DensityCurve> {
    if !(x_step > 0.0) {
        return Err(Error::argument(format!("x step must be positive, got {x_step}")));
    }
    let grid = default_x_grid(z, x_step);
    let top = opts.v_top.max(2.0 * grid[grid.len() - 1]);
    let ladder = geometric_ladder(top, opts.v_min, opts.ladder_factor)?;
    invert_density(&solve_grid(z, rho, &grid, &ladder, opts)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitPotential {
    pub value: f64,
    /// Contribution of the cell `[0, x_1]`, integrated exactly for a linear density.
    pub first_cell: f64,
    /// Set when the first cell carries more than 10% of the total.
    pub flagged: bool,
}

/// `-int log x nu_z(dx)`.
pub fn limit_log_potential(curve: &DensityCurve) -> Result<LimitPotential> {
    if (curve.total_mass - 1.0).abs() > 1e-2 {
        return Err(Error::argument(format!(
            "density mass {} is not within 1e-2 of 1",
            curve.total_mass
        )));
    }
    let (x, f) = (&curve.grid, &curve.density);
    if x.len() < 2 || x[0] != 0.0 {
        return Err(Error::argument("density grid must start at 0 and have two points"));
    }
    let h = x[1];
    let slope = (f[1] - f[0]) / h;
    let lh = h.ln();
    // int_0^h log(x) (f0 + slope x) dx
    let first_cell = f[0] * h * (lh - 1.0) + slope * h * h * (lh / 2.0 - 0.25);
    let weighted: Vec<f64> = x[1..].iter().zip(&f[1..]).map(|(x, f)| x.ln() * f).collect();
    let integral = first_cell + trapezoid(&x[1..], &weighted);
    Ok(LimitPotential {
        value: -integral,
        first_cell,
        flagged: first_cell.abs() > 0.1 * integral.abs(),
    })
}
