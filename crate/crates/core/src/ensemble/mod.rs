//! Sampling of real matrices with i.i.d. correlated off-diagonal pairs.
//!
//! An ensemble is described by an [`EnsembleSpec`]: every unordered index
//! pair `{i, j}` receives one draw `(X_ij, X_ji)` with zero means, unit
//! variances and correlation `rho`, and the diagonal is drawn independently.
//! Draws are addressed through [`CounterRng`], so a matrix is a pure function
//! of `(seed, draw_index)`.

mod audit;
mod rng;

use std::f64::consts::PI;

use faer::Mat;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use audit::{moment_audit, MomentEstimate, MomentReport};
pub use rng::{CounterRng, WORDS_PER_SLOT};

use rng::unit_f64;

/// Joint law of an off-diagonal pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairDist {
    /// Bivariate normal with covariance `[[1, rho], [rho, 1]]`.
    Gaussian,
    /// `{+1, -1}^2` valued with `P(+1,+1) = P(-1,-1) = (1 + rho) / 4`.
    Rademacher,
}

impl PairDist {
    /// `E X^4` of either marginal.
    pub fn fourth_moment(self) -> f64 {
        match self {
            PairDist::Gaussian => 3.0,
            PairDist::Rademacher => 1.0,
        }
    }
}

/// Law of the diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagDist {
    #[default]
    StandardGaussian,
    Zero,
    /// Same law as one marginal of the pair distribution.
    SameAsOffdiagMarginal,
}

/// Full description of an ensemble. Construction validates `n >= 1` and
/// `|rho| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct EnsembleSpec {
    n: usize,
    rho: f64,
    pair_dist: PairDist,
    diag_dist: DiagDist,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    n: usize,
    rho: f64,
    pair_dist: PairDist,
    #[serde(default)]
    diag_dist: DiagDist,
    seed: u64,
}

impl TryFrom<RawSpec> for EnsembleSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        EnsembleSpec::new(raw.n, raw.rho, raw.pair_dist, raw.seed)
            .map(|spec| spec.with_diag(raw.diag_dist))
    }
}

impl From<EnsembleSpec> for RawSpec {
    fn from(spec: EnsembleSpec) -> Self {
        RawSpec {
            n: spec.n,
            rho: spec.rho,
            pair_dist: spec.pair_dist,
            diag_dist: spec.diag_dist,
            seed: spec.seed,
        }
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(Error::config(
            "rho",
            format!("pair correlation must satisfy |rho| < 1, got {rho}"),
        ));
    }
    Ok(())
}

impl EnsembleSpec {
    /// Spec with the default standard Gaussian diagonal.
    pub fn new(n: usize, rho: f64, pair_dist: PairDist, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("n", "matrix dimension must be at least 1"));
        }
        check_rho(rho)?;
        Ok(Self {
            n,
            rho,
            pair_dist,
            diag_dist: DiagDist::default(),
            seed,
        })
    }

    pub fn with_diag(mut self, diag_dist: DiagDist) -> Self {
        self.diag_dist = diag_dist;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn pair_dist(&self) -> PairDist {
        self.pair_dist
    }

    pub fn diag_dist(&self) -> DiagDist {
        self.diag_dist
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// One drawn matrix `X` (unscaled) together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSample {
    pub spec: EnsembleSpec,
    pub entries: Mat<f64>,
    pub draw_index: u64,
}

impl MatrixSample {
    /// Wraps an explicit matrix, e.g. a hand-built test case. `spec.n` must
    /// match the matrix size.
    pub fn from_entries(spec: EnsembleSpec, entries: Mat<f64>) -> Result<Self> {
        if entries.nrows() != spec.n || entries.ncols() != spec.n {
            return Err(Error::argument(format!(
                "matrix is {}x{}, spec expects n = {}",
                entries.nrows(),
                entries.ncols(),
                spec.n
            )));
        }
        Ok(Self {
            spec,
            entries,
            draw_index: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// `X / sqrt(n)`.
    pub fn scaled(&self) -> Mat<f64> {
        let scale = 1.0 / (self.n() as f64).sqrt();
        Mat::from_fn(self.n(), self.n(), |i, j| self.entries[(i, j)] * scale)
    }
}

/// Standard normal pair from two uniforms (Box-Muller). Always consumes exactly
/// two `u64` draws.
#[inline]
fn normal_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u1 = 1.0 - unit_f64(rng.next_u64());
    let u2 = unit_f64(rng.next_u64());
    let r = (-2.0 * u1.ln()).sqrt();
    let (sin, cos) = (2.0 * PI * u2).sin_cos();
    (r * cos, r * sin)
}

/// Draws one off-diagonal pair `(X_ij, X_ji)`.
///
/// Exactly two `u64` words are consumed per call for both distributions, which
/// keeps slot addressing in [`CounterRng`] uniform.
pub fn sample_pair<R: RngCore + ?Sized>(rho: f64, dist: PairDist, rng: &mut R) -> Result<(f64, f64)> {
    check_rho(rho)?;
    Ok(sample_pair_unchecked(rho, dist, rng))
}

#[inline]
pub(crate) fn sample_pair_unchecked<R: RngCore + ?Sized>(rho: f64, dist: PairDist, rng: &mut R) -> (f64, f64) {
    match dist {
        PairDist::Gaussian => {
            let (xi, eta) = normal_pair(rng);
            (xi, rho * xi + (1.0 - rho * rho).sqrt() * eta)
        }
        PairDist::Rademacher => {
            let u = unit_f64(rng.next_u64());
            let _ = rng.next_u64();
            let [pp, mm, pm, _] = rademacher_cells(rho);
            if u < pp {
                (1.0, 1.0)
            } else if u < pp + mm {
                (-1.0, -1.0)
            } else if u < pp + mm + pm {
                (1.0, -1.0)
            } else {
                (-1.0, 1.0)
            }
        }
    }
}

/// Cell probabilities `[P(+,+), P(-,-), P(+,-), P(-,+)]` of the Rademacher pair.
pub fn rademacher_cells(rho: f64) -> [f64; 4] {
    let same = (1.0 + rho) / 4.0;
    let diff = (1.0 - rho) / 4.0;
    [same, same, diff, diff]
}

fn sample_diag<R: RngCore + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> f64 {
    match spec.diag_dist {
        DiagDist::Zero => {
            rng.next_u64();
            rng.next_u64();
            0.0
        }
        DiagDist::StandardGaussian => normal_pair(rng).0,
        DiagDist::SameAsOffdiagMarginal => match spec.pair_dist {
            PairDist::Gaussian => normal_pair(rng).0,
            PairDist::Rademacher => {
                let u = unit_f64(rng.next_u64());
                rng.next_u64();
                if u < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
        },
    }
}

/// Slot of the pair `{i, j}`, `i < j`, in row-major upper-triangle order.
#[inline]
pub(crate) fn pair_slot(n: usize, i: usize, j: usize) -> u64 {
    debug_assert!(i < j && j < n);
    let (n, i, j) = (n as u64, i as u64, j as u64);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

#[inline]
fn diag_slot(n: usize, i: usize) -> u64 {
    let n = n as u64;
    n * (n - 1) / 2 + i as u64
}

/// Draws matrix number `draw_index` of the ensemble.
pub fn sample_matrix(spec: &EnsembleSpec, draw_index: u64) -> MatrixSample {
    let n = spec.n;
    let rng = CounterRng::new(spec.seed);
    let mut entries = Mat::<f64>::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        let mut row = rng.at(draw_index, pair_slot(n, i, i + 1));
        for j in i + 1..n {
            let (a, b) = sample_pair_unchecked(spec.rho, spec.pair_dist, &mut row);
            entries[(i, j)] = a;
            entries[(j, i)] = b;
        }
    }
    let mut diag = rng.at(draw_index, diag_slot(n, 0));
    for i in 0..n {
        entries[(i, i)] = sample_diag(spec, &mut diag);
    }
    MatrixSample {
        spec: *spec,
        entries,
        draw_index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, rho: f64, dist: PairDist) -> EnsembleSpec {
        EnsembleSpec::new(n, rho, dist, 7).unwrap()
    }

    #[test]
    fn rejects_boundary_rho() {
        for rho in [1.0, -1.0, 1.5, f64::NAN] {
            let err = EnsembleSpec::new(4, rho, PairDist::Gaussian, 0).unwrap_err();
            assert!(matches!(err, Error::Config { key: "rho", .. }));
        }
        assert!(matches!(
            EnsembleSpec::new(0, 0.0, PairDist::Gaussian, 0),
            Err(Error::Config { key: "n", .. })
        ));
        let mut rng = CounterRng::new(0).at(0, 0);
        assert!(sample_pair(1.0, PairDist::Rademacher, &mut rng).is_err());
    }

    #[test]
    fn rademacher_cells_are_a_pmf() {
        for k in 0..=200 {
            let rho = -1.0 + k as f64 / 100.0;
            let cells = rademacher_cells(rho);
            assert!(cells.iter().all(|&p| p >= 0.0));
            assert!((cells.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            // E[xy] = P(same) - P(diff)
            assert!((cells[0] + cells[1] - cells[2] - cells[3] - rho).abs() < 1e-15);
        }
        assert_eq!(rademacher_cells(0.5)[0], 0.375);
    }

    #[test]
    fn gaussian_rho_zero_correlation_band() {
        let rng = CounterRng::new(11);
        let mut stream = rng.aux(0, 0);
        let draws = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..draws {
            let (x, y) = sample_pair_unchecked(0.0, PairDist::Gaussian, &mut stream);
            sum += x * y;
        }
        assert!((sum / draws as f64).abs() <= 0.004);
    }

    #[test]
    fn rademacher_plus_plus_frequency() {
        let mut stream = CounterRng::new(5).aux(1, 0);
        let draws = 400_000;
        let hits = (0..draws)
            .filter(|_| sample_pair_unchecked(0.5, PairDist::Rademacher, &mut stream) == (1.0, 1.0))
            .count();
        let p = hits as f64 / draws as f64;
        let se = (0.375f64 * 0.625 / draws as f64).sqrt();
        assert!((p - 0.375).abs() < 4.0 * se, "p = {p}");
    }

    #[test]
    fn one_by_one_uses_diagonal_law() {
        let zero = sample_matrix(&spec(1, 0.3, PairDist::Gaussian).with_diag(DiagDist::Zero), 0);
        assert_eq!(zero.entries[(0, 0)], 0.0);
        let rad = spec(1, 0.3, PairDist::Rademacher).with_diag(DiagDist::SameAsOffdiagMarginal);
        let v = sample_matrix(&rad, 4).entries[(0, 0)];
        assert!(v == 1.0 || v == -1.0);
    }

    #[test]
    fn draws_are_deterministic_and_distinct() {
        let s = spec(30, 0.5, PairDist::Gaussian);
        let a = sample_matrix(&s, 3);
        let b = sample_matrix(&s, 3);
        assert_eq!(a, b);
        for (x, y) in a.entries.col_iter().flat_map(|c| c.iter()).zip(b.entries.col_iter().flat_map(|c| c.iter())) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_ne!(a.entries, sample_matrix(&s, 4).entries);
        assert_ne!(a.entries, sample_matrix(&s.with_seed(8), 3).entries);
    }

    #[test]
    fn pair_slots_tile_the_upper_triangle() {
        let n = 9;
        let mut slots = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                slots.push(pair_slot(n, i, j));
            }
        }
        assert_eq!(slots, (0..(n * (n - 1) / 2) as u64).collect::<Vec<_>>());
        assert_eq!(diag_slot(n, 0), slots.len() as u64);
    }

    #[test]
    fn pooled_pair_product_matches_rho() {
        let s = spec(200, 0.5, PairDist::Gaussian);
        let m = sample_matrix(&s, 0);
        let n = s.n();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sum += m.entries[(i, j)] * m.entries[(j, i)];
                }
            }
        }
        let mean = sum / (n * n - n) as f64;
        assert!((mean - 0.5).abs() <= 0.02, "mean = {mean}");
    }

    #[test]
    fn spec_serde_validates() {
        let s = spec(5, -0.25, PairDist::Rademacher).with_diag(DiagDist::Zero);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<EnsembleSpec>(&json).unwrap(), s);
        let bad = json.replace("-0.25", "1.0");
        assert!(serde_json::from_str::<EnsembleSpec>(&bad).is_err());
        let unknown = json.replace("\"seed\"", "\"sed\"");
        assert!(serde_json::from_str::<EnsembleSpec>(&unknown).is_err());
    }
}
