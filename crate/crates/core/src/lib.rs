//! Fractional symmetrized neural network operators.
//!
//! `S_n(f; x) = Σ_k f(k/n) W(nx − k)` built from a fractional q-deformed
//! logistic activation, together with the tooling to check its
//! quasi-interpolation identities and measure its convergence:
//!
//! - [`activation`]: the activation `φ` in literal and sigmoid form.
//! - [`density`]: the kernel `W`, lattice sums, moments, tail certificates.
//! - [`operator`]: applying `S_n`, sup errors and stability gaps.
//! - [`moduli`]: moduli of continuity, norms and Hölder constants.
//! - [`study`]: convergence sweeps and rate fits.
//! - [`cli`]: configuration and subcommands of the `fracsym` binary.

pub mod activation;
pub mod cli;
pub mod density;
pub mod error;
pub mod functions;
pub mod moduli;
pub mod operator;
pub mod quadrature;
pub mod study;
pub mod summation;

pub use activation::{ActivationMode, ActivationParams};
pub use density::{MomentReport, SymmetrizedDensity};
pub use error::{Error, Result};
pub use functions::{builtin_functions, Extension, FunctionSpec};
pub use operator::{EvalMode, NetworkOperator, OperatorConfig};
