//! Coverage, quadrant balance and binned discrepancy of eigenvalue clouds.

use num_complex::Complex64;
use serde::Serialize;

use super::EllipticLaw;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub n_points: usize,
    pub fraction_inside: f64,
    /// Mass in quadrants I..IV (counter-clockwise from `x > 0, y > 0`).
    /// Points on an axis are split evenly between the adjacent quadrants.
    pub quadrant_masses: [f64; 4],
}

/// Fraction of points inside the inflated ellipse, plus quadrant masses.
pub fn coverage_report(points: &[Complex64], law: &EllipticLaw, inflation: f64) -> Result<CoverageReport> {
    if points.is_empty() {
        return Err(Error::argument("coverage needs a nonempty spectrum"));
    }
    if !(inflation >= 1.0) {
        return Err(Error::argument(format!("inflation must be >= 1, got {inflation}")));
    }
    let mut inside = 0usize;
    let mut quadrants = [0.0; 4];
    for p in points {
        if law.contains(p.re, p.im, inflation) {
            inside += 1;
        }
        let xs = side(p.re);
        let ys = side(p.im);
        // quadrant index from (x >= 0 side, y >= 0 side)
        for (wx, right) in [(xs.0, true), (xs.1, false)] {
            for (wy, up) in [(ys.0, true), (ys.1, false)] {
                let q = match (right, up) {
                    (true, true) => 0,
                    (false, true) => 1,
                    (false, false) => 2,
                    (true, false) => 3,
                };
                quadrants[q] += wx * wy;
            }
        }
    }
    let total = points.len() as f64;
    Ok(CoverageReport {
        n_points: points.len(),
        fraction_inside: inside as f64 / total,
        quadrant_masses: quadrants.map(|m| m / total),
    })
}

/// Weights on the (positive, negative) side of an axis.
fn side(v: f64) -> (f64, f64) {
    if v > 0.0 {
        (1.0, 0.0)
    } else if v < 0.0 {
        (0.0, 1.0)
    } else {
        (0.5, 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rect {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        if !(x_lo < x_hi && y_lo < y_hi) {
            return Err(Error::argument("histogram bounds must have positive width and height"));
        }
        Ok(Self { x_lo, x_hi, y_lo, y_hi })
    }

    /// Box with half-widths `max(semi-axis, 1) + 0.1`: `[-1.6, 1.6] x [-1.1, 1.1]`
    /// at `rho = 0.5`, and its transpose at `rho = -0.5`.
    pub fn standard(law: &EllipticLaw) -> Self {
        let a = law.semi_axis_x.max(1.0) + 0.1;
        let b = law.semi_axis_y.max(1.0) + 0.1;
        Self { x_lo: -a, x_hi: a, y_lo: -b, y_hi: b }
    }
}

/// Binned empirical measure. `mass` is indexed `[ix * ny + iy]`; points outside
/// the bounds go to `overflow`, so `sum(mass) + overflow == 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralHistogram {
    pub bounds: Rect,
    pub nx: usize,
    pub ny: usize,
    pub mass: Vec<f64>,
    pub overflow: f64,
    pub n_points: usize,
}

/// One bin as `(x_lo, x_hi, y_lo, y_hi, mass)`.
pub type Cell = (f64, f64, f64, f64, f64);

impl SpectralHistogram {
    pub fn cell_bounds(&self, ix: usize, iy: usize) -> (f64, f64, f64, f64) {
        let b = &self.bounds;
        let dx = (b.x_hi - b.x_lo) / self.nx as f64;
        let dy = (b.y_hi - b.y_lo) / self.ny as f64;
        (
            b.x_lo + ix as f64 * dx,
            if ix + 1 == self.nx { b.x_hi } else { b.x_lo + (ix + 1) as f64 * dx },
            b.y_lo + iy as f64 * dy,
            if iy + 1 == self.ny { b.y_hi } else { b.y_lo + (iy + 1) as f64 * dy },
        )
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.nx).flat_map(move |ix| {
            (0..self.ny).map(move |iy| {
                let (x0, x1, y0, y1) = self.cell_bounds(ix, iy);
                (x0, x1, y0, y1, self.mass[ix * self.ny + iy])
            })
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum::<f64>() + self.overflow
    }
}

fn bin(v: f64, lo: f64, hi: f64, bins: usize) -> Option<usize> {
    if !(v >= lo && v <= hi) {
        return None;
    }
    let k = ((v - lo) / (hi - lo) * bins as f64) as usize;
    Some(k.min(bins - 1))
}

/// Bins points (possibly pooled over several spectra) on an `nx x ny` grid.
pub fn histogram2d<I>(points: I, bounds: Rect, nx: usize, ny: usize) -> Result<SpectralHistogram>
where
    I: IntoIterator<Item = Complex64>,
{
    if nx == 0 || ny == 0 {
        return Err(Error::argument("histogram needs at least one bin per axis"));
    }
    let mut counts = vec![0u64; nx * ny];
    let mut overflow = 0u64;
    let mut total = 0u64;
    for p in points {
        total += 1;
        match (
            bin(p.re, bounds.x_lo, bounds.x_hi, nx),
            bin(p.im, bounds.y_lo, bounds.y_hi, ny),
        ) {
            (Some(ix), Some(iy)) => counts[ix * ny + iy] += 1,
            _ => overflow += 1,
        }
    }
    if total == 0 {
        return Err(Error::argument("histogram needs at least one point"));
    }
    let denom = total as f64;
    Ok(SpectralHistogram {
        bounds,
        nx,
        ny,
        mass: counts.iter().map(|&c| c as f64 / denom).collect(),
        overflow: overflow as f64 / denom,
        n_points: total as usize,
    })
}

/// Largest absolute difference between a bin's empirical mass and the law's
/// mass of that bin; the overflow region counts as one more bin.
pub fn discrepancy(hist: &SpectralHistogram, law: &EllipticLaw) -> f64 {
    let mut inside_law = 0.0;
    let mut worst: f64 = 0.0;
    for (x0, x1, y0, y1, mass) in hist.cells() {
        let expected = law.rect_mass(x0, x1, y0, y1);
        inside_law += expected;
        worst = worst.max((mass - expected).abs());
    }
    let expected_overflow = (1.0 - inside_law).max(0.0);
    worst.max((hist.overflow - expected_overflow).abs())
}
