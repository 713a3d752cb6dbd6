use std::time::Instant;

use elliptic_core::empirics::{
    coverage_report, discrepancy, histogram2d, log_potential_empirical, reference_potential, Rect,
};
use elliptic_core::ensemble::{moment_audit, sample_matrix};
use elliptic_core::limitlaw::{
    default_x_grid, geometric_ladder, invert_density, limit_density, limit_log_potential, solve_grid,
};
use elliptic_core::spectral;
use elliptic_core::svlab::least_singular_mc;
use elliptic_core::{EllipticLaw, MatrixSample, PotentialReport};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::output::{create_dir, write_csv, write_json};
use crate::CliError;

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub cfg_hash: String,
    pub version: String,
    pub status: &'static str,
    pub seed: u64,
    /// The only field that varies between identical runs.
    pub wall_time_s: f64,
    pub config: RunConfig,
    pub payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    hash: String,
}

impl Ctx<'_> {
    fn csv<I: IntoIterator<Item = String>>(&self, name: &str, header: &str, rows: I) -> Result<(), CliError> {
        write_csv(&self.cfg.output.join(name), &self.hash, header, rows)
    }

    /// Runs `f` on draws `0..trials` in parallel; results come back in draw order.
    fn per_trial<T, F>(&self, f: F) -> Result<Vec<T>, CliError>
    where
        T: Send,
        F: Fn(&MatrixSample) -> elliptic_core::Result<T> + Sync,
    {
        (0..self.cfg.trials as u64)
            .into_par_iter()
            .map(|d| f(&sample_matrix(&self.cfg.ensemble, d)).map_err(|e| CliError::numerical(Some(d), e)))
            .collect()
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serializes")
}

/// Runs the configured command, writing data files and `report.json` into
/// the output directory. On numerical failure the report is still written,
/// with `status: "failed"` and the error, which names the failing trial or
/// `(alpha, z)` location.
pub fn run(cfg: &RunConfig) -> Result<ReportEnvelope, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    create_dir(&cfg.output)?;
    let ctx = Ctx { cfg, hash: cfg.hash() };
    let result = match cfg.command {
        Command::Sample => sample(&ctx),
        Command::Spectrum => spectrum(&ctx),
        Command::Ellipse => ellipse(&ctx),
        Command::Limit => limit(&ctx),
        Command::Lsv => lsv(&ctx),
        Command::Potential => potential(&ctx),
        Command::Audit => audit(&ctx),
    };
    let (status, payload, error) = match &result {
        Ok(p) => ("ok", p.clone(), None),
        Err(e @ CliError::Numerical { .. }) => ("failed", Value::Null, Some(e.to_string())),
        Err(_) => return result.map(|_| unreachable!()),
    };
    let envelope = ReportEnvelope {
        cfg_hash: ctx.hash.clone(),
        version: format!("elliptic {}", env!("CARGO_PKG_VERSION")),
        status,
        seed: cfg.ensemble.seed(),
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
        payload,
        error,
    };
    write_json(&cfg.output.join("report.json"), &envelope)?;
    result.map(|_| envelope)
}

fn sample(ctx: &Ctx) -> Result<Value, CliError> {
    let draws = ctx.per_trial(|m| Ok(m.clone()))?;
    let n = ctx.cfg.ensemble.n();
    ctx.csv(
        "entries.csv",
        "trial,i,j,value",
        draws.iter().enumerate().flat_map(|(t, m)| {
            (0..n).flat_map(move |i| (0..n).map(move |j| format!("{t},{i},{j},{}", m.entries[(i, j)])))
        }),
    )?;
    let fingerprints: Vec<String> = draws
        .iter()
        .map(|m| spectral::matrix_fingerprint(m.entries.as_ref()))
        .collect();
    Ok(json!({ "n": n, "trials": draws.len(), "fingerprints": fingerprints }))
}

fn spectrum(ctx: &Ctx) -> Result<Value, CliError> {
    let z = ctx.cfg.z;
    let spectra = ctx.per_trial(|m| Ok((spectral::eigenvalues(m)?, spectral::singular_values(m, z)?)))?;
    ctx.csv(
        "eigenvalues.csv",
        "trial,re,im",
        spectra
            .iter()
            .enumerate()
            .flat_map(|(t, (ev, _))| ev.values.iter().map(move |l| format!("{t},{},{}", l.re, l.im))),
    )?;
    ctx.csv(
        "singular_values.csv",
        "trial,index,value",
        spectra
            .iter()
            .enumerate()
            .flat_map(|(t, (_, sv))| sv.values.iter().enumerate().map(move |(k, s)| format!("{t},{},{s}", k + 1))),
    )?;
    let rows: Vec<Value> = spectra
        .iter()
        .map(|(ev, sv)| {
            json!({
                "largest_sv": sv.largest(),
                "smallest_sv": sv.smallest(),
                "log_abs_det": sv.log_abs_det(),
                "conjugate_defect": ev.conjugate_defect(),
            })
        })
        .collect();
    Ok(json!({ "z": z, "n": ctx.cfg.ensemble.n(), "trials": rows.len(), "per_trial": rows }))
}

fn ellipse(ctx: &Ctx) -> Result<Value, CliError> {
    let spec = &ctx.cfg.ensemble;
    let params = &ctx.cfg.ellipse;
    let law = EllipticLaw::new(spec.rho())?;
    let spectra = ctx.per_trial(spectral::eigenvalues)?;
    let pooled: Vec<_> = spectra.iter().flat_map(|s| s.values.iter().copied()).collect();
    let coverage = coverage_report(&pooled, &law, params.inflation)?;
    let hist = histogram2d(pooled.iter().copied(), Rect::standard(&law), params.bins, params.bins)?;
    let disc = discrepancy(&hist, &law);
    ctx.csv(
        "eigenvalues.csv",
        "trial,re,im",
        spectra
            .iter()
            .enumerate()
            .flat_map(|(t, s)| s.values.iter().map(move |l| format!("{t},{},{}", l.re, l.im))),
    )?;
    ctx.csv(
        "histogram.csv",
        "x_lo,x_hi,y_lo,y_hi,mass",
        hist.cells().map(|(x0, x1, y0, y1, m)| format!("{x0},{x1},{y0},{y1},{m}")),
    )?;
    Ok(json!({
        "rho": spec.rho(),
        "n": spec.n(),
        "trials": spectra.len(),
        "seed": spec.seed(),
        "pair_dist": spec.pair_dist(),
        "inflation": params.inflation,
        "fraction_inside": coverage.fraction_inside,
        "quadrant_masses": coverage.quadrant_masses,
        "discrepancy": disc,
        "overflow": hist.overflow,
        "bounds": hist.bounds,
    }))
}

fn limit(ctx: &Ctx) -> Result<Value, CliError> {
    let (z, rho) = (ctx.cfg.z, ctx.cfg.ensemble.rho());
    let p = &ctx.cfg.limit;
    let grid = default_x_grid(z, p.x_step);
    let top = p.solver.v_top.max(2.0 * grid[grid.len() - 1]);
    let ladder = geometric_ladder(top, p.solver.v_min, p.solver.ladder_factor)?;
    let sol = solve_grid(z, rho, &grid, &ladder, &p.solver).map_err(|e| CliError::numerical(None, e))?;
    let curve = invert_density(&sol)?;
    let potential = limit_log_potential(&curve).map_err(|source| CliError::Numerical { trial: None, source })?;
    let u_reference = reference_potential(&EllipticLaw::new(rho)?, z);
    let k = ladder.len();
    ctx.csv(
        "grid.csv",
        "x,v,re_s,im_s,re_t,im_t,re_u,im_u,res1,res2,res3",
        sol.columns.iter().flat_map(|col| {
            col[k.saturating_sub(2)..].iter().map(|p| {
                format!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    p.alpha.re,
                    p.alpha.im,
                    p.s.re,
                    p.s.im,
                    p.t.re,
                    p.t.im,
                    p.u.re,
                    p.u.im,
                    p.residuals[0],
                    p.residuals[1],
                    p.residuals[2]
                )
            })
        }),
    )?;
    ctx.csv(
        "density.csv",
        "x,f",
        curve.grid.iter().zip(&curve.density).map(|(x, f)| format!("{x},{f}")),
    )?;
    let (peak_x, peak) = curve.peak().unwrap_or((f64::NAN, f64::NAN));
    Ok(json!({
        "z": z,
        "rho": rho,
        "u_limit": potential.value,
        "u_reference": u_reference,
        "difference": (potential.value - u_reference).abs(),
        "first_cell": potential.first_cell,
        "first_cell_flagged": potential.flagged,
        "total_mass": curve.total_mass,
        "peak_x": peak_x,
        "peak_density": peak,
        "low_confidence_points": curve.low_confidence.len(),
        "grid_points": grid.len(),
        "ladder_rungs": k,
    }))
}

fn lsv(ctx: &Ctx) -> Result<Value, CliError> {
    let cfg = ctx.cfg;
    let batch = least_singular_mc(&cfg.ensemble, cfg.z, cfg.trials, cfg.lsv.k)?;
    ctx.csv(
        "batch.csv",
        "trial,scaled_min,norm_ok",
        batch
            .draw_indices
            .iter()
            .zip(&batch.scaled_minima)
            .zip(&batch.norm_ok)
            .map(|((d, s), ok)| format!("{d},{s},{ok}")),
    )?;
    let tail: Vec<Value> = cfg
        .lsv
        .epsilons
        .iter()
        .map(|&e| json!({ "epsilon": e, "probability": batch.tail_probability(e) }))
        .collect();
    Ok(json!({
        "z": cfg.z,
        "rho": cfg.ensemble.rho(),
        "n": cfg.ensemble.n(),
        "k": cfg.lsv.k,
        "trials": batch.trials,
        "failed_trials": batch.failed,
        "median_scaled_min": batch.median(),
        "norm_exceedances": batch.norm_exceedances,
        "tail": tail,
    }))
}

fn potential(ctx: &Ctx) -> Result<Value, CliError> {
    let cfg = ctx.cfg;
    let (z, rho) = (cfg.z, cfg.ensemble.rho());
    let per_trial = ctx.per_trial(|m| log_potential_empirical(m, z))?;
    let values: Vec<f64> = per_trial.iter().map(|p| p.value()).collect();
    let u_empirical = values.iter().sum::<f64>() / values.len() as f64;
    let curve = limit_density(z, rho, &cfg.limit.solver, cfg.limit.x_step).map_err(|e| CliError::numerical(None, e))?;
    let u_limit = limit_log_potential(&curve)
        .map_err(|source| CliError::Numerical { trial: None, source })?
        .value;
    let u_reference = reference_potential(&EllipticLaw::new(rho)?, z);
    ctx.csv(
        "potentials.csv",
        "trial,via_singular_values,via_eigenvalues",
        per_trial
            .iter()
            .enumerate()
            .map(|(t, p)| format!("{t},{},{}", p.via_singular_values, p.via_eigenvalues)),
    )?;
    let report = PotentialReport::new(z, u_empirical, u_limit, u_reference);
    Ok(json!({
        "rho": rho,
        "n": cfg.ensemble.n(),
        "trials": values.len(),
        "seed": cfg.ensemble.seed(),
        "z": z,
        "u_empirical": u_empirical,
        "u_reference": u_reference,
        "u_limit": u_limit,
        "residuals": to_value(&report),
        "max_path_gap": per_trial.iter().map(|p| p.path_gap()).fold(0.0, f64::max),
    }))
}

fn audit(ctx: &Ctx) -> Result<Value, CliError> {
    let samples = ctx.per_trial(|m| Ok(m.clone()))?;
    let report = moment_audit(&samples)?;
    let mut v = to_value(&report);
    v["all_within_band"] = json!(report.all_within_band());
    Ok(v)
}
