//! Fractional q-deformed logistic activation.
//!
//! The activation is `1 / (1 + q^(A·θ·|x|^α))` in its literal form. That
//! form is even in `x`, so it decays to zero on both sides and the kernel
//! built from it integrates to zero. The sigmoid form puts the sign of `x`
//! back into the exponent, `1 / (1 + q^(-A·θ·sign(x)·|x|^α))`, which rises
//! monotonically from 0 to 1 and is the form the operator theory needs.
//!
//! Powers are evaluated as `exp(exponent · ln q)`. The base enters only
//! through `|ln q|`, so `q` and `1/q` describe the same activation and the
//! sigmoid form is increasing for every accepted `q`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationMode {
    /// Even form, exactly as written with `|x|^α`.
    Literal,
    /// Signed, monotone form.
    #[default]
    Sigmoid,
}

impl fmt::Display for ActivationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActivationMode::Literal => "literal",
            ActivationMode::Sigmoid => "sigmoid",
        })
    }
}

impl FromStr for ActivationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(ActivationMode::Literal),
            "sigmoid" => Ok(ActivationMode::Sigmoid),
            other => Err(Error::param(
                "mode",
                format!("expected `literal` or `sigmoid`, got `{other}`"),
            )),
        }
    }
}

/// Parameters `(q, θ, α, A, mode)` of the activation. Validated on
/// construction and immutable afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationParams {
    q: f64,
    theta: f64,
    alpha: f64,
    scale: f64,
    mode: ActivationMode,
    rate: f64,
}

impl Default for ActivationParams {
    fn default() -> Self {
        ActivationParams::new(2.0, 1.0, 1.0, 1.0, ActivationMode::Sigmoid)
            .expect("default activation parameters are valid")
    }
}

impl ActivationParams {
    /// `scale` is the auxiliary factor `A` multiplying `θ` in the exponent.
    pub fn new(q: f64, theta: f64, alpha: f64, scale: f64, mode: ActivationMode) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) || q == 1.0 {
            return Err(Error::param("q", format!("must be positive, finite and != 1, got {q}")));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::param("theta", format!("must be positive and finite, got {theta}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param("alpha", format!("must lie in (0, 1], got {alpha}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::param("A", format!("must be positive and finite, got {scale}")));
        }
        let rate = scale * theta * q.ln().abs();
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::param("q", format!("A·θ·|ln q| must be positive and finite, got {rate}")));
        }
        Ok(ActivationParams {
            q,
            theta,
            alpha,
            scale,
            mode,
            rate,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mode(&self) -> ActivationMode {
        self.mode
    }

    /// Effective decay rate `A·θ·|ln q|`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn with_mode(self, mode: ActivationMode) -> Self {
        ActivationParams { mode, ..self }
    }

    /// Evaluate the activation at a finite point.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Input(format!("activation argument must be finite, got {x}")));
        }
        Ok(self.phi(x))
    }

    /// Unchecked evaluation for hot loops; `x` must be finite.
    #[inline]
    pub fn phi(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.5;
        }
        let t = self.decay(x.abs());
        match self.mode {
            ActivationMode::Literal => t / (1.0 + t),
            ActivationMode::Sigmoid if x > 0.0 => 1.0 / (1.0 + t),
            ActivationMode::Sigmoid => t / (1.0 + t),
        }
    }

    /// Distance of the activation from its limiting value at distance
    /// `r >= 0` from the origin: `1 - φ(r)` in sigmoid mode, `φ(r)` in
    /// literal mode. Both are `q^(-Aθ r^α) / (1 + q^(-Aθ r^α))` and decrease
    /// in `r`.
    #[inline]
    pub fn tail(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.5;
        }
        let t = self.decay(r);
        t / (1.0 + t)
    }

    #[inline]
    fn decay(&self, r: f64) -> f64 {
        let power = if self.alpha == 1.0 { r } else { r.powf(self.alpha) };
        (-self.rate * power).exp()
    }
}
