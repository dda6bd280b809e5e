//! The symmetrized density `W(x) = ½(φ(x+1) − φ(x−1))`.
//!
//! Lattice sums over `k` of `W(u − k)` are taken over the window
//! `|k − u| <= K`, where `K` comes from [`SymmetrizedDensity::tail_cutoff`].
//! Outside a window the kernel is one-signed (nonnegative in sigmoid mode,
//! sign of `-x` in literal mode) and its lattice sums telescope, which gives
//! both the tail certificate and closed-form block masses.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::activation::{ActivationMode, ActivationParams};
use crate::error::{Error, Result};
use crate::quadrature::{self, DEFAULT_MAX_PANELS};
use crate::summation::NeumaierSum;

/// Radius of the explicitly summed core of [`SymmetrizedDensity::partition_sum`].
/// Blocks of the window further out are added through their telescoped
/// closed form.
pub const PARTITION_CORE_RADIUS: f64 = 4096.0;

const MAX_DOUBLINGS: u32 = 200;
const INITIAL_RADIUS: f64 = 2.0;

/// A continuous moment `∫ x^order W(x) dx` with its error estimate
/// (quadrature estimate plus the certified tail bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub order: u32,
    pub value: f64,
    pub quadrature_error_estimate: f64,
}

#[derive(Debug)]
pub struct SymmetrizedDensity {
    params: ActivationParams,
    cutoffs: RwLock<HashMap<u64, f64>>,
}

impl Clone for SymmetrizedDensity {
    fn clone(&self) -> Self {
        let cutoffs = self.cutoffs.read().map(|m| m.clone()).unwrap_or_default();
        SymmetrizedDensity {
            params: self.params,
            cutoffs: RwLock::new(cutoffs),
        }
    }
}

impl From<ActivationParams> for SymmetrizedDensity {
    fn from(params: ActivationParams) -> Self {
        SymmetrizedDensity::new(params)
    }
}

impl SymmetrizedDensity {
    pub fn new(params: ActivationParams) -> Self {
        SymmetrizedDensity {
            params,
            cutoffs: RwLock::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> &ActivationParams {
        &self.params
    }

    pub fn mode(&self) -> ActivationMode {
        self.params.mode()
    }

    /// Checked evaluation of `W(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Input(format!("density argument must be finite, got {x}")));
        }
        Ok(self.w(x))
    }

    /// Unchecked evaluation of `W(x)`.
    #[inline]
    pub fn w(&self, x: f64) -> f64 {
        0.5 * self.phi_diff(x + 1.0, x - 1.0)
    }

    /// `φ(a) − φ(b)` without cancellation when both points sit on the
    /// saturated side of the sigmoid.
    #[inline]
    fn phi_diff(&self, a: f64, b: f64) -> f64 {
        let p = &self.params;
        if p.mode() == ActivationMode::Sigmoid && a > 0.0 && b > 0.0 {
            p.tail(b) - p.tail(a)
        } else {
            p.phi(a) - p.phi(b)
        }
    }

    /// Closed form of `Σ_{k=lo}^{hi} W(u − k)`; zero when `lo > hi`.
    pub fn block_mass(&self, u: f64, lo: i64, hi: i64) -> f64 {
        if lo > hi {
            return 0.0;
        }
        let top = u - lo as f64;
        let bottom = u - hi as f64;
        0.5 * (self.phi_diff(top + 1.0, bottom) + self.phi_diff(top, bottom - 1.0))
    }

    /// Upper bound on `Σ |x|^weight_power |W(x)|` over `|x| > radius`, valid for
    /// lattice sums at any offset and for the integral alike.
    pub fn tail_bound(&self, radius: f64, weight_power: u32) -> f64 {
        if radius < 1.0 {
            return f64::INFINITY;
        }
        let mut acc = NeumaierSum::new();
        let mut start = radius;
        let mut previous = f64::INFINITY;
        for _ in 0..4096 {
            let end = 2.0 * start;
            if !end.is_finite() {
                return f64::INFINITY;
            }
            let mass = 2.0 * self.params.tail(start - 1.0);
            let term = end.powi(weight_power as i32) * mass;
            if !term.is_finite() {
                return f64::INFINITY;
            }
            acc.add(term);
            if term == 0.0 || (term < previous && term <= 1e-20 * acc.value()) {
                return acc.value();
            }
            previous = term;
            start = end;
        }
        f64::INFINITY
    }

    fn radius_for(&self, eps: f64, weight_power: u32) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::param("eps", format!("must be positive, got {eps}")));
        }
        let mut radius = INITIAL_RADIUS;
        for _ in 0..MAX_DOUBLINGS {
            if self.tail_bound(radius, weight_power) < eps {
                return Ok(radius);
            }
            radius *= 2.0;
        }
        Err(Error::Numerical(format!(
            "tail of the density not certified below {eps:e} within {MAX_DOUBLINGS} doublings"
        )))
    }

    /// Window radius `K` such that the lattice terms with `|k − u| > K` contribute
    /// less than `eps` to both the partition sum and the second lattice moment,
    /// at every offset `u`. The radius doubles from 2 until the certified tail
    /// bound drops below `eps`; results are memoized per tolerance.
    pub fn tail_cutoff(&self, eps: f64) -> Result<f64> {
        let key = eps.to_bits();
        if let Some(&k) = self.cutoffs.read().ok().and_then(|m| m.get(&key).copied()).as_ref() {
            return Ok(k);
        }
        let k = self.radius_for(eps, 2)?;
        if let Ok(mut map) = self.cutoffs.write() {
            map.entry(key).or_insert(k);
        }
        Ok(k)
    }

    /// Integer range of the window `|k − u| <= radius`.
    pub fn window(u: f64, radius: f64) -> (i64, i64) {
        ((u - radius).ceil() as i64, (u + radius).floor() as i64)
    }

    fn weighted_lattice_sum(&self, u: f64, eps: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
        if !u.is_finite() {
            return Err(Error::Input(format!("lattice offset must be finite, got {u}")));
        }
        let radius = self.tail_cutoff(eps)?;
        let (lo, hi) = Self::window(u, radius);
        let acc: NeumaierSum = (lo..=hi)
            .map(|k| {
                let d = k as f64 - u;
                weight(d) * self.w(-d)
            })
            .collect();
        Ok(acc.value())
    }

    /// `Σ_k W(u − k)` over the certified window.
    pub fn partition_sum(&self, u: f64, eps: f64) -> Result<f64> {
        if !u.is_finite() {
            return Err(Error::Input(format!("lattice offset must be finite, got {u}")));
        }
        let radius = self.tail_cutoff(eps)?;
        let (lo, hi) = Self::window(u, radius);
        let (core_lo, core_hi) = Self::window(u, radius.min(PARTITION_CORE_RADIUS));
        let mut acc: NeumaierSum = (core_lo..=core_hi).map(|k| self.w(u - k as f64)).collect();
        acc.add(self.block_mass(u, lo, core_lo - 1));
        acc.add(self.block_mass(u, core_hi + 1, hi));
        Ok(acc.value())
    }

    /// `Σ_k (k − u) W(u − k)` over the certified window.
    pub fn first_lattice_moment(&self, u: f64, eps: f64) -> Result<f64> {
        self.weighted_lattice_sum(u, eps, |d| d)
    }

    /// `Σ_k (k − u)² W(u − k)` over the certified window.
    pub fn second_lattice_moment(&self, u: f64, eps: f64) -> Result<f64> {
        self.weighted_lattice_sum(u, eps, |d| d * d)
    }

    /// `∫ x^order W(x) dx` by adaptive Simpson over a certified finite interval.
    /// Half of `tol` goes to the truncated tails, half to the quadrature.
    pub fn continuous_moment(&self, order: u32, tol: f64) -> Result<MomentReport> {
        if !(tol > 0.0) {
            return Err(Error::param("tol", format!("must be positive, got {tol}")));
        }
        let radius = self.radius_for(0.5 * tol, order)?;
        let tail = self.tail_bound(radius, order);

        // W has kinks at ±1 when α < 1; dyadic breaks keep the tails resolved.
        let mut right = vec![0.0, 1.0];
        let mut b = 2.0;
        while b < radius {
            right.push(b);
            b *= 2.0;
        }
        right.push(radius);
        let mut breaks: Vec<f64> = right.iter().skip(1).rev().map(|x| -x).collect();
        breaks.extend(right);

        let integrand = |x: f64| {
            let w = self.w(x);
            if order == 0 {
                w
            } else {
                x.powi(order as i32) * w
            }
        };
        let quad = quadrature::integrate(integrand, &breaks, 0.5 * tol, DEFAULT_MAX_PANELS)?;
        Ok(MomentReport {
            order,
            value: quad.value,
            quadrature_error_estimate: quad.error_estimate + tail,
        })
    }

    /// `∫ W(x) dx`.
    pub fn integrate(&self, tol: f64) -> Result<f64> {
        Ok(self.continuous_moment(0, tol)?.value)
    }
}
