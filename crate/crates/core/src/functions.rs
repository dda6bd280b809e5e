//! Target functions on `[-a, a]` and the built-in registry.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// How a target is read at lattice points `k/n` outside `[-a, a]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Extension {
    /// Constant extension by the boundary values.
    #[default]
    Clamp,
    /// Zero outside the domain.
    Zero,
    /// Points outside the domain are dropped from the sums.
    None,
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Extension::Clamp => "clamp",
            Extension::Zero => "zero",
            Extension::None => "none",
        })
    }
}

impl FromStr for Extension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clamp" => Ok(Extension::Clamp),
            "zero" => Ok(Extension::Zero),
            "none" => Ok(Extension::None),
            other => Err(Error::param(
                "extension",
                format!("expected one of clamp, zero, none; got `{other}`"),
            )),
        }
    }
}

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real target function on `[-a, a]`.
#[derive(Clone)]
pub struct FunctionSpec {
    name: String,
    params: Vec<f64>,
    half_width: f64,
    extension: Extension,
    eval: Eval,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("half_width", &self.half_width)
            .field("extension", &self.extension)
            .finish_non_exhaustive()
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, p) in self.params.iter().enumerate() {
            write!(f, "{}{p}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

impl FunctionSpec {
    pub fn new<F>(name: impl Into<String>, params: Vec<f64>, half_width: f64, extension: Extension, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::param("a", format!("half-width must be positive and finite, got {half_width}")));
        }
        Ok(FunctionSpec {
            name: name.into(),
            params,
            half_width,
            extension,
            eval: Arc::new(f),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn with_extension(mut self, extension: Extension) -> Self {
        self.extension = extension;
        self
    }

    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.half_width * (1.0 + 1e-12)
    }

    /// Value at a point of the domain; arguments are clamped into `[-a, a]`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x.clamp(-self.half_width, self.half_width))
    }

    /// Value under the extension policy; `None` when the point is dropped.
    pub fn extended(&self, x: f64) -> Option<f64> {
        if self.contains(x) {
            return Some(self.eval(x));
        }
        match self.extension {
            Extension::Clamp => Some(self.eval(x)),
            Extension::Zero => Some(0.0),
            Extension::None => None,
        }
    }

    /// `α·f + β·g` on the common domain of `f` and `g`.
    pub fn linear_combination(alpha: f64, f: &FunctionSpec, beta: f64, g: &FunctionSpec) -> Result<Self> {
        f.check_compatible(g)?;
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        FunctionSpec::new(
            format!("lincomb({alpha}*{f}+{beta}*{g})"),
            vec![alpha, beta],
            f.half_width,
            f.extension,
            move |x| alpha * fe(x) + beta * ge(x),
        )
    }

    /// `f + δ`.
    pub fn shifted(&self, delta: f64) -> Self {
        let fe = self.eval.clone();
        FunctionSpec {
            name: format!("{self}+{delta}"),
            params: self.params.clone(),
            half_width: self.half_width,
            extension: self.extension,
            eval: Arc::new(move |x| fe(x) + delta),
        }
    }

    pub(crate) fn check_compatible(&self, other: &FunctionSpec) -> Result<()> {
        if self.half_width != other.half_width || self.extension != other.extension {
            return Err(Error::Input(format!(
                "functions live on different domains: {self} on [-{}, {}] ({}) vs {other} on [-{}, {}] ({})",
                self.half_width, self.half_width, self.extension, other.half_width, other.half_width, other.extension
            )));
        }
        Ok(())
    }
}

/// Number of parameters a registry entry accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Exact(usize),
    AtLeast(usize),
}

impl Arity {
    fn accepts(self, count: usize) -> bool {
        match self {
            Arity::Exact(n) => count == n,
            Arity::AtLeast(n) => count >= n,
        }
    }
}

type Constructor = fn(&[f64], f64) -> Result<Eval>;

#[derive(Debug, Clone)]
pub struct FunctionRegistryEntry {
    pub name: &'static str,
    pub arity: Arity,
    pub defaults: &'static [f64],
    /// Whether the target is at least twice continuously differentiable.
    pub smooth: bool,
    pub description: &'static str,
    constructor: Constructor,
}

impl FunctionRegistryEntry {
    /// Build the target; an empty parameter list selects the defaults.
    pub fn build(&self, params: &[f64], half_width: f64, extension: Extension) -> Result<FunctionSpec> {
        let params = if params.is_empty() { self.defaults } else { params };
        if !self.arity.accepts(params.len()) {
            return Err(Error::Input(format!(
                "function `{}` takes {:?} parameters, got {}",
                self.name,
                self.arity,
                params.len()
            )));
        }
        if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::Input(format!("function `{}` parameter {bad} is not finite", self.name)));
        }
        let eval = (self.constructor)(params, half_width)?;
        let mut spec = FunctionSpec::new(self.name, params.to_vec(), half_width, extension, |_| 0.0)?;
        spec.eval = eval;
        Ok(spec)
    }
}

fn build_const(p: &[f64], _: f64) -> Result<Eval> {
    let c = p[0];
    Ok(Arc::new(move |_| c))
}

fn build_linear(_: &[f64], _: f64) -> Result<Eval> {
    Ok(Arc::new(|x| x))
}

fn build_poly(p: &[f64], _: f64) -> Result<Eval> {
    let coeffs = p.to_vec();
    Ok(Arc::new(move |x| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)))
}

fn build_sin(p: &[f64], _: f64) -> Result<Eval> {
    let freq = p[0];
    Ok(Arc::new(move |x| (freq * x).sin()))
}

fn build_abs_pow(p: &[f64], _: f64) -> Result<Eval> {
    let gamma = p[0];
    if !(gamma > 0.0) {
        return Err(Error::param("gamma", format!("abs_pow exponent must be positive, got {gamma}")));
    }
    Ok(Arc::new(move |x: f64| x.abs().powf(gamma)))
}

fn build_runge(p: &[f64], _: f64) -> Result<Eval> {
    let k = p[0];
    if !(k >= 0.0) {
        return Err(Error::param("runge", format!("coefficient must be nonnegative, got {k}")));
    }
    Ok(Arc::new(move |x| 1.0 / (1.0 + k * x * x)))
}

fn build_osc(p: &[f64], _: f64) -> Result<Eval> {
    let freq = p[0];
    Ok(Arc::new(move |x| (freq * x).sin() * x))
}

/// Pieces of the random piecewise-linear target.
pub const PWLIN_PIECES: usize = 8;

fn build_pwlin(p: &[f64], half_width: f64) -> Result<Eval> {
    let seed = p[0];
    if !(seed >= 0.0 && seed.fract() == 0.0 && seed <= u64::MAX as f64) {
        return Err(Error::param("seed", format!("pwlin seed must be a nonnegative integer, got {seed}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let values: Vec<f64> = (0..=PWLIN_PIECES).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let width = 2.0 * half_width / PWLIN_PIECES as f64;
    Ok(Arc::new(move |x| {
        let s = ((x + half_width) / width).clamp(0.0, PWLIN_PIECES as f64);
        let i = (s.floor() as usize).min(PWLIN_PIECES - 1);
        let t = s - i as f64;
        values[i] + t * (values[i + 1] - values[i])
    }))
}

static BUILTINS: &[FunctionRegistryEntry] = &[
    FunctionRegistryEntry {
        name: "const",
        arity: Arity::Exact(1),
        defaults: &[1.0],
        smooth: true,
        description: "f(x) = c",
        constructor: build_const,
    },
    FunctionRegistryEntry {
        name: "linear",
        arity: Arity::Exact(0),
        defaults: &[],
        smooth: true,
        description: "f(x) = x",
        constructor: build_linear,
    },
    FunctionRegistryEntry {
        name: "poly",
        arity: Arity::AtLeast(1),
        defaults: &[0.0, 0.0, 1.0],
        smooth: true,
        description: "f(x) = c0 + c1 x + ... + ck x^k",
        constructor: build_poly,
    },
    FunctionRegistryEntry {
        name: "sin",
        arity: Arity::Exact(1),
        defaults: &[std::f64::consts::FRAC_PI_2],
        smooth: true,
        description: "f(x) = sin(freq x)",
        constructor: build_sin,
    },
    FunctionRegistryEntry {
        name: "abs_pow",
        arity: Arity::Exact(1),
        defaults: &[0.5],
        smooth: false,
        description: "f(x) = |x|^gamma",
        constructor: build_abs_pow,
    },
    FunctionRegistryEntry {
        name: "runge",
        arity: Arity::Exact(1),
        defaults: &[25.0],
        smooth: true,
        description: "f(x) = 1 / (1 + k x^2)",
        constructor: build_runge,
    },
    FunctionRegistryEntry {
        name: "osc",
        arity: Arity::Exact(1),
        defaults: &[10.0],
        smooth: true,
        description: "f(x) = x sin(freq x)",
        constructor: build_osc,
    },
    FunctionRegistryEntry {
        name: "pwlin",
        arity: Arity::Exact(1),
        defaults: &[0.0],
        smooth: false,
        description: "seeded random piecewise-linear function with 8 pieces",
        constructor: build_pwlin,
    },
];

pub fn builtin_functions() -> &'static [FunctionRegistryEntry] {
    BUILTINS
}

pub fn lookup(name: &str) -> Result<&'static FunctionRegistryEntry> {
    BUILTINS.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = BUILTINS.iter().map(|e| e.name).collect();
        Error::Input(format!("unknown function `{name}`; available: {}", names.join(", ")))
    })
}

/// Parse `name` or `name:p1,p2,...` into a name and parameter list.
pub fn parse_target(text: &str) -> Result<(String, Vec<f64>)> {
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (text, None),
    };
    let params = match rest {
        None => Vec::new(),
        Some(r) => r
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::param("fn", format!("parameter `{s}` of `{text}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    lookup(name)?;
    Ok((name.to_string(), params))
}

/// Build a registered target from `name:params` text.
pub fn build(text: &str, half_width: f64, extension: Extension) -> Result<FunctionSpec> {
    let (name, params) = parse_target(text)?;
    lookup(&name)?.build(&params, half_width, extension)
}
