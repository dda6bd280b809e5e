//! Globally adaptive Simpson quadrature.
//!
//! Every panel carries a one-level Simpson estimate and its two-half
//! refinement; the difference of the two (divided by 15) is the panel's
//! error estimate. The panel with the largest estimate is bisected until the
//! summed estimate falls below the absolute tolerance. Working from a global
//! error budget instead of recursive `tol / 2` splitting lets the rule settle
//! on integrable cusps such as `|x - 1|^0.3` without exhausting recursion
//! depth.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

/// Upper bound on the number of live panels.
pub const DEFAULT_MAX_PANELS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fq1: f64,
    fm: f64,
    fq3: f64,
    fb: f64,
    refined: f64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> Self {
        let m = 0.5 * (a + b);
        let fq1 = f(0.5 * (a + m));
        let fq3 = f(0.5 * (m + b));
        let h = b - a;
        let coarse = h / 6.0 * (fa + 4.0 * fm + fb);
        let fine = h / 12.0 * (fa + 4.0 * fq1 + 2.0 * fm + 4.0 * fq3 + fb);
        let delta = fine - coarse;
        Panel {
            a,
            b,
            fa,
            fq1,
            fm,
            fq3,
            fb,
            refined: fine + delta / 15.0,
            error: delta.abs() / 15.0,
        }
    }

    fn split<F: Fn(f64) -> f64>(&self, f: &F) -> (Panel, Panel) {
        let m = 0.5 * (self.a + self.b);
        (
            Panel::new(f, self.a, m, self.fa, self.fq1, self.fm),
            Panel::new(f, m, self.b, self.fm, self.fq3, self.fb),
        )
    }

    fn splittable(&self) -> bool {
        let m = 0.5 * (self.a + self.b);
        let q = 0.5 * (self.a + m);
        self.a < q && q < m && m < self.b
    }
}

struct ByError(Panel);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Integrate `f` over `[breaks[0], breaks[last]]`, starting from one panel per
/// consecutive pair of break points. Break points should sit on any known
/// kinks of the integrand.
pub fn integrate<F>(f: F, breaks: &[f64], tol: f64, max_panels: usize) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    if breaks.len() < 2 {
        return Err(Error::Input("quadrature needs at least two break points".into()));
    }
    if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
        return Err(Error::Input("break points must be finite and strictly increasing".into()));
    }

    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel> = Vec::new();
    let mut fa = f(breaks[0]);
    for w in breaks.windows(2) {
        let fb = f(w[1]);
        let fm = f(0.5 * (w[0] + w[1]));
        heap.push(ByError(Panel::new(&f, w[0], w[1], fa, fm, fb)));
        fa = fb;
    }

    let total_error = |heap: &BinaryHeap<ByError>, settled: &[Panel]| -> f64 {
        heap.iter()
            .map(|p| p.0.error)
            .chain(settled.iter().map(|p| p.error))
            .collect::<NeumaierSum>()
            .value()
    };

    let mut running = total_error(&heap, &settled);
    loop {
        if !running.is_finite() {
            return Err(Error::Numerical("integrand produced a non-finite value".into()));
        }
        if running <= tol {
            running = total_error(&heap, &settled);
            if running <= tol {
                break;
            }
        }
        if heap.len() + settled.len() >= max_panels {
            return Err(Error::Numerical(format!(
                "quadrature did not reach tolerance {tol:e} within {max_panels} panels (error estimate {running:e})"
            )));
        }
        let Some(ByError(worst)) = heap.pop() else {
            return Err(Error::Numerical(format!(
                "quadrature panels exhausted floating-point resolution (error estimate {running:e}, tolerance {tol:e})"
            )));
        };
        if !worst.splittable() {
            settled.push(worst);
            continue;
        }
        let (left, right) = worst.split(&f);
        running += left.error + right.error - worst.error;
        heap.push(ByError(left));
        heap.push(ByError(right));
    }

    let value = heap
        .iter()
        .map(|p| p.0.refined)
        .chain(settled.iter().map(|p| p.refined))
        .collect::<NeumaierSum>()
        .value();
    Ok(QuadratureResult {
        value,
        error_estimate: running,
        panels: heap.len() + settled.len(),
    })
}
