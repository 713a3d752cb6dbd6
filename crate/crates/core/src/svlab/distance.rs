use faer::MatRef;
use serde::Serialize;

use crate::{Error, Result};

/// Both sides of `sum_i s_i(A)^-2 = sum_i dist(R_i, H_i)^-2`, where `R_i` is
/// row `i` and `H_i` the span of the other rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceIdentity {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / lhs`
    pub residual: f64,
}

/// Component of `v` orthogonal to the span of the orthonormal `basis`.
fn orthogonal_residual(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    // project twice; one pass loses orthogonality when v is nearly in the span
    for _ in 0..2 {
        for q in basis {
            let c: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
    }
    r
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Orthonormal basis of the span of `rows` by Gram-Schmidt with
/// reorthogonalization. Numerically dependent rows are dropped.
fn orthonormal_basis<'a>(rows: impl Iterator<Item = &'a Vec<f64>>, scale: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let r = orthogonal_residual(row, &basis);
        let d = norm(&r);
        if d > 1e-13 * scale {
            basis.push(r.into_iter().map(|x| x / d).collect());
        }
    }
    basis
}

pub fn distance_identity_check(a: MatRef<'_, f64>) -> Result<DistanceIdentity> {
    let (m, n) = (a.nrows(), a.ncols());
    if m == 0 || m > n {
        return Err(Error::argument(format!("need 1 <= rows <= columns, got {m} x {n}")));
    }
    let sv = a.singular_values().map_err(|_| Error::Decomposition {
        routine: "svd",
        fingerprint: String::from("rectangular"),
    })?;
    let (s1, sm) = (sv[0], sv[m - 1]);
    if !(sm > 1e-10 * s1) {
        return Err(Error::argument(format!(
            "matrix is not of full row rank: s_min = {sm:e}, s_1 = {s1:e}"
        )));
    }
    let lhs: f64 = sv.iter().map(|s| s.powi(-2)).sum();

    let rows: Vec<Vec<f64>> = (0..m).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let rhs: f64 = (0..m)
        .map(|i| {
            let others = rows.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, r)| r);
            let basis = orthonormal_basis(others, s1);
            norm(&orthogonal_residual(&rows[i], &basis)).powi(-2)
        })
        .sum();
    Ok(DistanceIdentity {
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / lhs,
    })
}
