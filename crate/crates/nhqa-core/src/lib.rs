//! Non-Hermitian quantum annealing of the transverse-field Ising chain.
//!
//! Each momentum pair ±k is a driven two-level system with a complex sweep
//! g̃(t) = (g + iδ)(1 − t/τ). The crate integrates those systems numerically
//! (`tdse`), solves them exactly with parabolic cylinder functions (`lz`,
//! `weber`), aggregates kink densities and ground-state probabilities
//! (`observables`), and cross-checks everything against brute-force spin
//! chains (`oracle`) and generalized Bloch equations (`bloch`).

pub mod bloch;
pub mod error;
pub mod gamma;
pub mod lz;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod quad;
pub mod scaled;
pub mod tdse;
pub mod weber;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{NhqaError, Result};
pub use lz::{Amplitudes, LZContext, ModeState};
pub use model::{ChainParams, ModeContext, Spectrum};
pub use observables::{AnnealResult, Engine};
pub use scaled::Scaled;
pub use tdse::{Initial, IntegratorConfig};
