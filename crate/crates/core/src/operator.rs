//! The operator `S_n(f; x) = Σ_k f(k/n) W(nx − k)`.
//!
//! Sums run over the window `|k − nx| <= K` with `K` the density's tail
//! cutoff for the configured truncation tolerance. Lattice points inside
//! `[-a, a]` are summed one by one. Outside the domain a clamped or zeroed
//! target is constant, so those stretches of the window are added through
//! the kernel's telescoped block mass.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::activation::ActivationMode;
use crate::density::SymmetrizedDensity;
use crate::error::{Error, Result};
use crate::functions::{Extension, FunctionSpec};
use crate::summation::NeumaierSum;

/// Below this magnitude the window's kernel mass is treated as zero and
/// renormalization is refused.
pub const MIN_RENORMALIZATION_MASS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EvalMode {
    /// The bare lattice sum.
    Raw,
    /// The lattice sum divided by the window's kernel mass.
    #[default]
    Renormalized,
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalMode::Raw => "raw",
            EvalMode::Renormalized => "renormalized",
        })
    }
}

impl FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(EvalMode::Raw),
            "renormalized" => Ok(EvalMode::Renormalized),
            other => Err(Error::param(
                "eval-mode",
                format!("expected `raw` or `renormalized`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorConfig {
    n: u32,
    truncation_eps: f64,
    eval_mode: EvalMode,
}

impl OperatorConfig {
    pub fn new(n: u32, truncation_eps: f64, eval_mode: EvalMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "sampling density must be at least 1"));
        }
        if !(truncation_eps > 0.0 && truncation_eps.is_finite()) {
            return Err(Error::param("eps", format!("truncation tolerance must be positive, got {truncation_eps}")));
        }
        Ok(OperatorConfig {
            n,
            truncation_eps,
            eval_mode,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn truncation_eps(&self) -> f64 {
        self.truncation_eps
    }

    pub fn eval_mode(&self) -> EvalMode {
        self.eval_mode
    }

    pub fn with_n(self, n: u32) -> Result<Self> {
        OperatorConfig::new(n, self.truncation_eps, self.eval_mode)
    }

    pub fn with_eval_mode(self, eval_mode: EvalMode) -> Self {
        OperatorConfig { eval_mode, ..self }
    }
}

/// Numerator and kernel mass of one window sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSum {
    pub weighted: f64,
    pub mass: f64,
}

/// `S_n` bound to a kernel.
#[derive(Debug, Clone)]
pub struct NetworkOperator {
    config: OperatorConfig,
    density: SymmetrizedDensity,
}

impl NetworkOperator {
    pub fn new(config: OperatorConfig, density: SymmetrizedDensity) -> Self {
        NetworkOperator { config, density }
    }

    pub fn config(&self) -> &OperatorConfig {
        &self.config
    }

    pub fn density(&self) -> &SymmetrizedDensity {
        &self.density
    }

    /// False for literal-mode kernels, whose lattice translates sum to zero
    /// instead of one.
    pub fn is_normalized(&self) -> bool {
        self.density.mode() == ActivationMode::Sigmoid
    }

    /// Numerator and kernel mass of the window sum at `x`.
    pub fn window_sum(&self, f: &FunctionSpec, x: f64) -> Result<WindowSum> {
        if !x.is_finite() || !f.contains(x) {
            return Err(Error::Domain(format!(
                "evaluation point {x} lies outside [-{a}, {a}]",
                a = f.half_width()
            )));
        }
        let n = self.config.n as f64;
        let a = f.half_width();
        let u = n * x;
        let radius = self.density.tail_cutoff(self.config.truncation_eps)?;
        let (lo, hi) = SymmetrizedDensity::window(u, radius);
        let inner_lo = (-n * a - 1e-9).ceil() as i64;
        let inner_hi = (n * a + 1e-9).floor() as i64;

        let mut weighted = NeumaierSum::new();
        let mut mass = NeumaierSum::new();
        let mut points = 0usize;
        for k in lo.max(inner_lo)..=hi.min(inner_hi) {
            let w = self.density.w(u - k as f64);
            weighted.add(f.eval(k as f64 / n) * w);
            mass.add(w);
            points += 1;
        }

        if f.extension() != Extension::None {
            let left = self.density.block_mass(u, lo, hi.min(inner_lo - 1));
            let right = self.density.block_mass(u, lo.max(inner_hi + 1), hi);
            if f.extension() == Extension::Clamp {
                weighted.add(f.eval(-a) * left);
                weighted.add(f.eval(a) * right);
            }
            mass.add(left);
            mass.add(right);
            points += (hi.min(inner_lo - 1) - lo + 1).max(0) as usize;
            points += (hi - lo.max(inner_hi + 1) + 1).max(0) as usize;
        }
        if points == 0 {
            return Err(Error::Domain(format!("no lattice points of the window around x = {x} lie in the domain")));
        }
        Ok(WindowSum {
            weighted: weighted.value(),
            mass: mass.value(),
        })
    }

    /// `S_n(f; x)`.
    pub fn apply(&self, f: &FunctionSpec, x: f64) -> Result<f64> {
        let sum = self.window_sum(f, x)?;
        match self.config.eval_mode {
            EvalMode::Raw => Ok(sum.weighted),
            EvalMode::Renormalized => {
                if sum.mass.abs() < MIN_RENORMALIZATION_MASS {
                    return Err(Error::Numerical(format!(
                        "kernel mass {:.3e} at x = {x} is too small to renormalize{}",
                        sum.mass,
                        if self.is_normalized() {
                            ""
                        } else {
                            " (literal-mode kernels sum to zero over the lattice; use raw mode)"
                        }
                    )));
                }
                Ok(sum.weighted / sum.mass)
            }
        }
    }

    /// Pointwise application; output order follows `grid`.
    pub fn apply_grid(&self, f: &FunctionSpec, grid: &[f64]) -> Result<Vec<f64>> {
        grid.par_iter().map(|&x| self.apply(f, x)).collect()
    }

    /// `max_x |S_n f(x) − f(x)|` over the grid.
    pub fn sup_error(&self, f: &FunctionSpec, grid: &[f64]) -> Result<f64> {
        let values = self.apply_grid(f, grid)?;
        Ok(grid
            .iter()
            .zip(values)
            .map(|(&x, s)| (s - f.eval(x)).abs())
            .fold(0.0, f64::max))
    }

    /// `(max_x |S_n f − S_n g|, max over sampled lattice values of |f − g|)`.
    pub fn stability_gap(&self, f: &FunctionSpec, g: &FunctionSpec, grid: &[f64]) -> Result<(f64, f64)> {
        f.check_compatible(g)?;
        let sf = self.apply_grid(f, grid)?;
        let sg = self.apply_grid(g, grid)?;
        let gap = sf.iter().zip(&sg).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Ok((gap, self.lattice_sup_difference(f, g)))
    }

    /// `max |f(k/n) − g(k/n)|` over every value the window sums can read:
    /// the lattice inside the domain plus the extension values outside it.
    pub fn lattice_sup_difference(&self, f: &FunctionSpec, g: &FunctionSpec) -> f64 {
        let n = self.config.n as f64;
        let a = f.half_width();
        let inner_lo = (-n * a - 1e-9).ceil() as i64;
        let inner_hi = (n * a + 1e-9).floor() as i64;
        let mut bound = (inner_lo..=inner_hi)
            .map(|k| (f.eval(k as f64 / n) - g.eval(k as f64 / n)).abs())
            .fold(0.0, f64::max);
        if f.extension() == Extension::Clamp {
            bound = bound.max((f.eval(-a) - g.eval(-a)).abs()).max((f.eval(a) - g.eval(a)).abs());
        }
        bound
    }
}
