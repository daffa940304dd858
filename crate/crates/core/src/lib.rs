//! Dopant-enhanced optomechanical coupling of a membrane-in-the-middle
//! Fabry-Pérot cavity.
//!
//! * [`medium`]: closed-form Λ-medium susceptibility and local-field
//!   enhancement.
//! * [`oracle`]: steady state of the Λ-system master equation, used to check
//!   the closed form and as an independent susceptibility engine.
//! * [`cavity`]: coupled-mode coefficients, couplings, decay and
//!   cooperativity.
//! * [`sweep`]: parameter grids, gain boundaries, strong-coupling regions and
//!   a constrained optimizer.
//! * [`config`] and [`presets`]: flat key-value run configuration and the
//!   built-in case studies.

pub mod adjudication;
pub mod cavity;
pub mod config;
pub mod error;
pub mod medium;
pub mod oracle;
pub mod presets;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use medium::{ClosedForm, DopantSpec, LambdaDriveParams, Susceptibility};
