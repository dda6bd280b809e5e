//! Grid estimates of moduli of continuity, norms and Hölder constants.
//!
//! Every estimate is a supremum over a uniform grid on `[-a, a]` and is
//! therefore a lower bound of the true supremum. The grid actually used is
//! reported alongside: `M = ceil(2a / grid_step)` intervals, so the effective
//! step never exceeds the requested one.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::functions::FunctionSpec;
use crate::quadrature::{self, DEFAULT_MAX_PANELS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusEstimate {
    pub t: f64,
    pub value: f64,
    pub grid_step: f64,
}

/// Samples of `f` on the uniform grid; returns the values and the effective step.
pub fn sample(f: &FunctionSpec, grid_step: f64) -> Result<(Vec<f64>, f64)> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::param("grid_step", format!("must be positive, got {grid_step}")));
    }
    let a = f.half_width();
    let intervals = (2.0 * a / grid_step - 1e-9).ceil().max(1.0);
    if intervals > 1e8 {
        return Err(Error::param("grid_step", format!("{grid_step} gives more than 1e8 grid intervals")));
    }
    let m = intervals as usize;
    let step = 2.0 * a / m as f64;
    let values = (0..=m)
        .map(|i| f.eval(if i == m { a } else { -a + i as f64 * step }))
        .collect();
    Ok((values, step))
}

fn check_t(t: f64, grid_step: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    if !(grid_step > 0.0 && grid_step <= t) {
        return Err(Error::param("grid_step", format!("must lie in (0, t = {t}], got {grid_step}")));
    }
    Ok(())
}

fn window_len(t: f64, step: f64) -> usize {
    (t / step + 1e-9).floor() as usize
}

/// Largest `max − min` over every run of `span + 1` consecutive samples.
pub fn sliding_range(values: &[f64], span: usize) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let width = (span + 1).min(values.len());
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for (i, &v) in values.iter().enumerate() {
        while maxq.back().is_some_and(|&j| values[j] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(i);
        while minq.back().is_some_and(|&j| values[j] >= v) {
            minq.pop_back();
        }
        minq.push_back(i);
        if i + 1 >= width {
            let start = i + 1 - width;
            while maxq.front().is_some_and(|&j| j < start) {
                maxq.pop_front();
            }
            while minq.front().is_some_and(|&j| j < start) {
                minq.pop_front();
            }
            best = best.max(values[maxq[0]] - values[minq[0]]);
        }
    }
    best
}

/// `ω(f, t) = sup_{|x − y| <= t} |f(x) − f(y)|`.
pub fn modulus(f: &FunctionSpec, t: f64, grid_step: f64) -> Result<ModulusEstimate> {
    check_t(t, grid_step)?;
    let (values, step) = sample(f, grid_step)?;
    Ok(ModulusEstimate {
        t,
        value: sliding_range(&values, window_len(t, step)),
        grid_step: step,
    })
}

/// `ω₂(f, t) = sup_{0 < h <= t} |f(x + h) − 2f(x) + f(x − h)|` with `x ± h` in the domain.
pub fn modulus2(f: &FunctionSpec, t: f64, grid_step: f64) -> Result<ModulusEstimate> {
    check_t(t, grid_step)?;
    let (v, step) = sample(f, grid_step)?;
    let span = window_len(t, step);
    let mut best = 0.0f64;
    for i in 1..v.len().saturating_sub(1) {
        let reach = span.min(i).min(v.len() - 1 - i);
        for j in 1..=reach {
            best = best.max((v[i + j] - 2.0 * v[i] + v[i - j]).abs());
        }
    }
    Ok(ModulusEstimate {
        t,
        value: best,
        grid_step: step,
    })
}

/// `(∫_{-a}^{a} |f|^p)^{1/p}` by adaptive quadrature; `tol` bounds the integral's error.
pub fn norm_lp(f: &FunctionSpec, p: f64, tol: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::param("p", format!("must be finite and >= 1, got {p}")));
    }
    let a = f.half_width();
    let integral = quadrature::integrate(|x| f.eval(x).abs().powf(p), &[-a, 0.0, a], tol, DEFAULT_MAX_PANELS)?;
    Ok(integral.value.max(0.0).powf(1.0 / p))
}

/// `max |f|` over the grid.
pub fn norm_sup(f: &FunctionSpec, grid_step: f64) -> Result<f64> {
    let (values, _) = sample(f, grid_step)?;
    Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// `sup |f(x) − f(y)| / |x − y|^γ` over grid pairs at least one step apart.
///
/// Computed as `max_j ω(j·h) / (j·h)^γ`: the pair attaining the supremum at
/// distance `d` is also counted by `ω(d)`, and `ω(t)/t^γ` never exceeds the
/// pair supremum.
pub fn holder_constant(f: &FunctionSpec, gamma: f64, grid_step: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param("gamma", format!("must lie in (0, 1], got {gamma}")));
    }
    let (values, step) = sample(f, grid_step)?;
    let mut best = 0.0f64;
    for span in 1..values.len() {
        let range = sliding_range(&values, span);
        best = best.max(range / (span as f64 * step).powf(gamma));
    }
    Ok(best)
}
