//! Convergence experiments: sweeps over `n`, Jackson-type bound pairing,
//! log-log rate fits and the stability suite.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::density::SymmetrizedDensity;
use crate::error::{Error, Result};
use crate::functions::{self, Extension, FunctionSpec};
use crate::moduli;
use crate::operator::{NetworkOperator, OperatorConfig};
use crate::summation::NeumaierSum;

pub const DEFAULT_N_LIST: [u32; 7] = [8, 16, 32, 64, 128, 256, 512];

/// Fraction of `[-a, a]` used for rate measurements, away from the clamp
/// boundary layer.
pub const INTERIOR_FRACTION: f64 = 0.8;

/// Lattice offsets in `[0, 1)` sampled for the second-moment column.
pub const MOMENT_OFFSETS: usize = 32;

/// Tolerance added to the stability bound.
pub const STABILITY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub n: u32,
    pub sup_error: f64,
    /// `ω(f, 1/n)`.
    pub omega_bound: f64,
    /// `ω₂(f, 1/n)`.
    pub omega2_bound: f64,
    /// `max_x n² Σ_k (k/n − x)² W(nx − k)`.
    pub second_moment_scaled: f64,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityOutcome {
    pub gap: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `points` equally spaced values on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| if i == points - 1 { hi } else { lo + i as f64 * step })
                .collect()
        }
    }
}

/// Uniform grid on `[-0.8a, 0.8a]`.
pub fn interior_grid(half_width: f64, points: usize) -> Vec<f64> {
    let r = INTERIOR_FRACTION * half_width;
    linspace(-r, r, points)
}

/// Grid step for modulus estimates at scale `t`.
pub fn modulus_step(half_width: f64, t: f64) -> f64 {
    (2.0 * half_width / 2000.0).min(t / 8.0)
}

/// `n² Σ_k (k/n − x)² W(nx − k)` over the certified window around `nx`.
pub fn scaled_second_moment(d: &SymmetrizedDensity, n: u32, x: f64, eps: f64) -> Result<f64> {
    let n = n as f64;
    let u = n * x;
    let (lo, hi) = SymmetrizedDensity::window(u, d.tail_cutoff(eps)?);
    let acc: NeumaierSum = (lo..=hi)
        .map(|k| {
            let dx = k as f64 / n - x;
            dx * dx * d.w(u - k as f64)
        })
        .collect();
    Ok(n * n * acc.value())
}

/// One row per `n`: measured sup error next to `ω(f, 1/n)`, `ω₂(f, 1/n)` and
/// the scaled second moment. Rows are computed in parallel and returned in
/// `n_list` order.
pub fn convergence_sweep(
    f: &FunctionSpec,
    d: &SymmetrizedDensity,
    cfg_template: &OperatorConfig,
    n_list: &[u32],
    grid: &[f64],
) -> Result<Vec<ConvergenceRecord>> {
    if n_list.is_empty() {
        return Err(Error::Input("n list is empty".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input("n list must be strictly increasing".into()));
    }
    if grid.is_empty() {
        return Err(Error::Input("evaluation grid is empty".into()));
    }
    let a = f.half_width();
    let offsets = linspace(0.0, 1.0 - 1.0 / MOMENT_OFFSETS as f64, MOMENT_OFFSETS);
    n_list
        .par_iter()
        .map(|&n| {
            let started = Instant::now();
            let op = NetworkOperator::new(cfg_template.with_n(n)?, d.clone());
            let sup_error = op.sup_error(f, grid)?;
            let t = 1.0 / n as f64;
            let step = modulus_step(a, t);
            let omega_bound = moduli::modulus(f, t, step)?.value;
            let omega2_bound = moduli::modulus2(f, t, step)?.value;
            let mut second_moment_scaled = 0.0f64;
            for &u in &offsets {
                let m = scaled_second_moment(d, n, u / n as f64, cfg_template.truncation_eps())?;
                second_moment_scaled = second_moment_scaled.max(m);
            }
            Ok(ConvergenceRecord {
                n,
                sup_error,
                omega_bound,
                omega2_bound,
                second_moment_scaled,
                wall_time: started.elapsed(),
            })
        })
        .collect()
}

/// Least-squares line through `(ln n, ln sup_error)` over records with a
/// positive error.
pub fn fit_loglog_slope(records: &[ConvergenceRecord]) -> Result<RateFit> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.sup_error > 0.0 && r.sup_error.is_finite() && r.n > 0)
        .map(|r| ((r.n as f64).ln(), r.sup_error.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::Input(format!(
            "rate fit needs at least 3 records with positive error, got {}",
            points.len()
        )));
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Input("rate fit needs at least two distinct n".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

/// For each `n`, the largest `n² Σ_k (k/n − x)² W(nx − k)` over `x = u/n`,
/// `u` in `u_grid`.
pub fn second_moment_uniformity(
    d: &SymmetrizedDensity,
    n_list: &[u32],
    u_grid: &[f64],
    eps: f64,
) -> Result<Vec<(u32, f64)>> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::Input("n list must be nonempty and positive".into()));
    }
    if u_grid.is_empty() {
        return Err(Error::Input("offset grid is empty".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            let mut best = f64::NEG_INFINITY;
            for &u in u_grid {
                best = best.max(scaled_second_moment(d, n, u / n as f64, eps)?);
            }
            Ok((n, best))
        })
        .collect()
}

/// Stability gap and bound for each pair; `pass` iff `gap <= bound + 1e-10`.
pub fn stability_suite(
    d: &SymmetrizedDensity,
    cfg: &OperatorConfig,
    pairs: &[(FunctionSpec, FunctionSpec)],
    grid: &[f64],
) -> Result<Vec<StabilityOutcome>> {
    if pairs.is_empty() {
        return Err(Error::Input("no function pairs given".into()));
    }
    let op = NetworkOperator::new(*cfg, d.clone());
    pairs
        .iter()
        .map(|(f, g)| {
            let (gap, bound) = op.stability_gap(f, g, grid)?;
            Ok(StabilityOutcome {
                gap,
                bound,
                pass: gap <= bound + STABILITY_SLACK,
            })
        })
        .collect()
}

/// Seeded piecewise-linear pairs `(pwlin:2i, pwlin:2i+1)`.
pub fn pwlin_pairs(count: usize, half_width: f64, extension: Extension) -> Result<Vec<(FunctionSpec, FunctionSpec)>> {
    (0..count)
        .map(|i| {
            let f = functions::build(&format!("pwlin:{}", 2 * i), half_width, extension)?;
            let g = functions::build(&format!("pwlin:{}", 2 * i + 1), half_width, extension)?;
            Ok((f, g))
        })
        .collect()
}
