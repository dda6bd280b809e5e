//! Run configuration: defaults, `key=value` config files and flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::activation::{ActivationMode, ActivationParams};
use crate::error::{Error, Result};
use crate::functions::{self, Extension, FunctionSpec};
use crate::operator::{EvalMode, OperatorConfig};
use crate::study::DEFAULT_N_LIST;

/// Environment variable naming the directory for output files when no
/// explicit path is given.
pub const OUTPUT_DIR_ENV: &str = "FRACSYM_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::param("format", format!("expected `csv` or `json`, got `{other}`"))),
        }
    }
}

/// Every setting a subcommand can read. Keys in config files and long flag
/// names coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub q: f64,
    pub theta: f64,
    pub alpha: f64,
    pub scale: f64,
    pub mode: ActivationMode,
    pub n: u32,
    pub n_list: Vec<u32>,
    pub eps: f64,
    pub eval_mode: EvalMode,
    pub extension: Extension,
    pub target: String,
    pub half_width: f64,
    pub grid: usize,
    pub pairs: usize,
    pub timing: bool,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: 2.0,
            theta: 1.0,
            alpha: 1.0,
            scale: 1.0,
            mode: ActivationMode::Sigmoid,
            n: 64,
            n_list: DEFAULT_N_LIST.to_vec(),
            eps: 1e-10,
            eval_mode: EvalMode::Renormalized,
            extension: Extension::Clamp,
            target: "sin".into(),
            half_width: 1.0,
            grid: 1001,
            pairs: 50,
            timing: false,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Recognised keys, in serialization order.
pub const KEYS: &[&str] = &[
    "q",
    "theta",
    "alpha",
    "scale",
    "mode",
    "n",
    "n-list",
    "eps",
    "eval-mode",
    "extension",
    "fn",
    "half-width",
    "grid",
    "pairs",
    "timing",
    "out",
    "format",
];

fn number<T: FromStr>(key: &'static str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::param(key, format!("`{value}` is not a valid number")))
}

fn canonical_key(key: &str) -> Option<&'static str> {
    let normalized = key.trim().replace('_', "-");
    let normalized = match normalized.as_str() {
        "A" | "a-scale" => "scale",
        "a" => "half-width",
        "target" => "fn",
        other => other,
    }
    .to_string();
    KEYS.iter().copied().find(|k| *k == normalized)
}

impl RunConfig {
    /// Set one key from its textual value. Structural validity is checked by
    /// [`RunConfig::validate`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let Some(key) = canonical_key(key) else {
            return Err(Error::Input(format!(
                "unknown configuration key `{key}`; known keys: {}",
                KEYS.join(", ")
            )));
        };
        let value = value.trim();
        match key {
            "q" => self.q = number(key, value)?,
            "theta" => self.theta = number(key, value)?,
            "alpha" => self.alpha = number(key, value)?,
            "scale" => self.scale = number(key, value)?,
            "mode" => self.mode = value.parse()?,
            "n" => self.n = number(key, value)?,
            "n-list" => {
                self.n_list = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| number::<u32>(key, s))
                    .collect::<Result<_>>()?
            }
            "eps" => self.eps = number(key, value)?,
            "eval-mode" => self.eval_mode = value.parse()?,
            "extension" => self.extension = value.parse()?,
            "fn" => self.target = value.to_string(),
            "half-width" => self.half_width = number(key, value)?,
            "grid" => self.grid = number(key, value)?,
            "pairs" => self.pairs = number(key, value)?,
            "timing" => {
                self.timing = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    other => return Err(Error::param("timing", format!("expected true or false, got `{other}`"))),
                }
            }
            "out" => self.out = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
            "format" => self.format = value.parse()?,
            _ => unreachable!("key list and match arms agree"),
        }
        Ok(())
    }

    /// Apply a `key=value` document. Blank lines and `#` comments are skipped.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Input(format!("config line {}: expected key=value, got `{line}`", lineno + 1)));
            };
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn to_config_string(&self) -> String {
        let n_list: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        let mut lines = vec![
            format!("q={}", self.q),
            format!("theta={}", self.theta),
            format!("alpha={}", self.alpha),
            format!("scale={}", self.scale),
            format!("mode={}", self.mode),
            format!("n={}", self.n),
            format!("n-list={}", n_list.join(",")),
            format!("eps={}", self.eps),
            format!("eval-mode={}", self.eval_mode),
            format!("extension={}", self.extension),
            format!("fn={}", self.target),
            format!("half-width={}", self.half_width),
            format!("grid={}", self.grid),
            format!("pairs={}", self.pairs),
            format!("timing={}", self.timing),
        ];
        if let Some(out) = &self.out {
            lines.push(format!("out={}", out.display()));
        }
        lines.push(format!("format={}", self.format));
        lines.join("\n") + "\n"
    }

    pub fn activation(&self) -> Result<ActivationParams> {
        ActivationParams::new(self.q, self.theta, self.alpha, self.scale, self.mode)
    }

    pub fn operator(&self) -> Result<OperatorConfig> {
        OperatorConfig::new(self.n, self.eps, self.eval_mode)
    }

    pub fn function(&self) -> Result<FunctionSpec> {
        functions::build(&self.target, self.half_width, self.extension)
    }

    /// Re-check every owning module's constraints.
    pub fn validate(&self) -> Result<()> {
        self.activation()?;
        self.operator()?;
        self.function()?;
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(Error::param("n-list", "must be a nonempty list of positive integers"));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("n-list", "must be strictly increasing"));
        }
        if self.grid < 2 {
            return Err(Error::param("grid", format!("needs at least 2 points, got {}", self.grid)));
        }
        if self.pairs == 0 {
            return Err(Error::param("pairs", "must be at least 1"));
        }
        Ok(())
    }

    /// Explicit `out`, else `$FRACSYM_OUTPUT_DIR/<name>.<ext>`, else `./<name>.<ext>`.
    pub fn output_path(&self, subcommand: &str) -> PathBuf {
        if let Some(out) = &self.out {
            return out.clone();
        }
        let file = format!("{subcommand}.{}", self.format.extension());
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Path::new(&dir).join(file),
            _ => PathBuf::from(file),
        }
    }
}
