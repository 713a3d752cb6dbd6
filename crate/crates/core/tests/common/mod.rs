#![allow(dead_code)]

/// Eigenvalues of a real symmetric matrix (row-major, `dim x dim`) by cyclic
/// Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, dim: usize) -> Vec<f64> {
    let idx = |i: usize, j: usize| i * dim + j;
    for _sweep in 0..100 {
        let off: f64 = (0..dim)
            .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[idx(i, j)].powi(2))
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let (akp, akq) = (a[idx(k, p)], a[idx(k, q)]);
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let (apk, aqk) = (a[idx(p, k)], a[idx(q, k)]);
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..dim).map(|i| a[idx(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Upper branch of the semicircle Stieltjes transform.
pub fn semicircle(alpha: elliptic_core::Complex64) -> elliptic_core::Complex64 {
    let r = (alpha * alpha - 4.0).sqrt();
    let s = (-alpha + r) / 2.0;
    if s.im > 0.0 {
        s
    } else {
        (-alpha - r) / 2.0
    }
}
