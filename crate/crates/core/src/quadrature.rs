//! Gauss-Legendre rules and the uniform-ellipse integrals built on them.

use std::f64::consts::PI;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `degree`-point rule, nodes by Newton iteration on `P_degree`.
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 1, "Gauss-Legendre rule needs at least one node");
        let n = degree;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..n.div_ceil(2) {
            // Tricomi initial guess
            let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        Self { nodes, weights }
    }

    /// `integral_a^b f`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `integral over {x^2/a^2 + y^2/b^2 <= 1} of f dA` in elliptic polar
/// coordinates `(a r cos t, b r sin t)`: Gauss-Legendre in `r`, trapezoid in
/// the periodic angle.
pub fn integrate_over_ellipse(
    a: f64,
    b: f64,
    radial: usize,
    angular: usize,
    mut f: impl FnMut(f64, f64) -> f64,
) -> f64 {
    let rule = GaussLegendre::new(radial);
    let dt = 2.0 * PI / angular as f64;
    let mut total = 0.0;
    for k in 0..angular {
        let (sin, cos) = (k as f64 * dt).sin_cos();
        total += rule.integrate(0.0, 1.0, |r| f(a * r * cos, b * r * sin) * r);
    }
    total * a * b * dt
}
