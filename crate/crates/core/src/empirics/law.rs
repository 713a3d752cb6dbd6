use std::f64::consts::PI;

use serde::Serialize;

use crate::quadrature::GaussLegendre;
use crate::{ensemble::check_rho, Result};

/// Uniform law on the ellipse `x^2/(1+rho)^2 + y^2/(1-rho)^2 <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticLaw {
    pub rho: f64,
    pub semi_axis_x: f64,
    pub semi_axis_y: f64,
    pub density_value: f64,
}

impl EllipticLaw {
    pub fn new(rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(Self {
            rho,
            semi_axis_x: 1.0 + rho,
            semi_axis_y: 1.0 - rho,
            density_value: 1.0 / (PI * (1.0 - rho * rho)),
        })
    }

    pub fn area(&self) -> f64 {
        PI * self.semi_axis_x * self.semi_axis_y
    }

    /// Membership in the ellipse scaled by `inflation >= 1` (closed set).
    pub fn contains(&self, x: f64, y: f64, inflation: f64) -> bool {
        let a = self.semi_axis_x * inflation;
        let b = self.semi_axis_y * inflation;
        (x / a).powi(2) + (y / b).powi(2) <= 1.0
    }

    /// Density `g(x, y)`.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        if self.contains(x, y, 1.0) {
            self.density_value
        } else {
            0.0
        }
    }

    /// Probability of the rectangle `[x_lo, x_hi] x [y_lo, y_hi]`.
    ///
    /// Integrates the clipped vertical chord length in the angle variable
    /// `x = a cos(phi)`, split at the angles where the chord meets the
    /// rectangle's horizontal edges, so every piece is smooth.
    pub fn rect_mass(&self, x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> f64 {
        let (a, b) = (self.semi_axis_x, self.semi_axis_y);
        let x_lo = x_lo.max(-a);
        let x_hi = x_hi.min(a);
        if x_lo >= x_hi || y_lo >= y_hi || y_lo >= b || y_hi <= -b {
            return 0.0;
        }
        // phi decreases as x increases
        let phi_hi = (x_lo / a).clamp(-1.0, 1.0).acos();
        let phi_lo = (x_hi / a).clamp(-1.0, 1.0).acos();
        let mut cuts = vec![phi_lo, phi_hi];
        for y in [y_lo, y_hi] {
            if y.abs() < b {
                let s = (y.abs() / b).asin();
                for phi in [s, PI - s] {
                    if phi > phi_lo && phi < phi_hi {
                        cuts.push(phi);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let rule = GaussLegendre::new(16);
        let chord = |phi: f64| {
            let h = b * phi.sin();
            let len = h.min(y_hi) - (-h).max(y_lo);
            len.max(0.0) * a * phi.sin()
        };
        let area: f64 = cuts.windows(2).map(|w| rule.integrate(w[0], w[1], chord)).sum();
        area * self.density_value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_over_ellipse;

    #[test]
    fn density_values() {
        let law = EllipticLaw::new(0.5).unwrap();
        assert!((law.density(0.0, 0.0) - 1.0 / (PI * 0.75)).abs() < 1e-15);
        assert!((law.density(0.0, 0.0) - 0.4244).abs() < 1e-4);
        assert_eq!(law.density(1.51, 0.0), 0.0);
        let circ = EllipticLaw::new(0.0).unwrap();
        assert_eq!(circ.density(0.5, 0.5), 1.0 / PI);
        assert_eq!(circ.density(0.8, 0.7), 0.0);
    }

    #[test]
    fn density_times_area_is_one() {
        for rho in [-0.9, -0.5, 0.0, 0.3, 0.99] {
            let law = EllipticLaw::new(rho).unwrap();
            assert!((law.density_value * law.area() - 1.0).abs() < 1e-14);
            let total = integrate_over_ellipse(law.semi_axis_x, law.semi_axis_y, 8, 16, |x, y| law.density(x * 0.999_999, y * 0.999_999));
            assert!((total - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn containment_edges() {
        let rho = 0.3;
        let law = EllipticLaw::new(rho).unwrap();
        assert!(law.contains(1.0 + rho, 0.0, 1.0));
        assert!(!law.contains(0.0, 1.0 - rho + 1e-12, 1.0));
        assert!(law.contains(0.0, 1.0 - rho + 1e-12, 1.05));
        let circ = EllipticLaw::new(0.0).unwrap();
        for (x, y, infl) in [(0.6, 0.8, 1.0), (0.61, 0.8, 1.0), (0.9, 0.9, 1.3), (1.0, 0.9, 1.3)] {
            assert_eq!(circ.contains(x, y, infl), x * x + y * y <= infl * infl);
        }
    }

    #[test]
    fn rect_mass_whole_and_halves() {
        let law = EllipticLaw::new(-0.4).unwrap();
        assert!((law.rect_mass(-3.0, 3.0, -3.0, 3.0) - 1.0).abs() < 1e-12);
        assert!((law.rect_mass(0.0, 3.0, -3.0, 3.0) - 0.5).abs() < 1e-12);
        assert!((law.rect_mass(-3.0, 3.0, 0.0, 3.0) - 0.5).abs() < 1e-12);
        assert!((law.rect_mass(0.0, 3.0, 0.0, 3.0) - 0.25).abs() < 1e-12);
        assert_eq!(law.rect_mass(2.0, 3.0, -1.0, 1.0), 0.0);
    }

    #[test]
    fn rect_mass_matches_fine_lattice() {
        let law = EllipticLaw::new(0.5).unwrap();
        let (x0, x1, y0, y1) = (1.2, 1.6, -0.275, 0.0);
        let k = 1000;
        let (dx, dy) = ((x1 - x0) / k as f64, (y1 - y0) / k as f64);
        let mut hits = 0usize;
        for i in 0..k {
            for j in 0..k {
                if law.contains(x0 + (i as f64 + 0.5) * dx, y0 + (j as f64 + 0.5) * dy, 1.0) {
                    hits += 1;
                }
            }
        }
        let lattice = hits as f64 * dx * dy * law.density_value;
        assert!((law.rect_mass(x0, x1, y0, y1) - lattice).abs() < 1e-5);
    }
}
