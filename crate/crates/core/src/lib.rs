//! Post-quench coherence dynamics of the periodic transverse-field Ising chain.
//!
//! The pipeline runs `spectrum` → `kernel` → `correlators` → `coherence`:
//! Bogoliubov data per momentum, the time-dependent contraction `G_j(t)`,
//! string correlators as Toeplitz minors, then the maximal quantum Fisher
//! information, Loschmidt echo and their rate functions. `oracle` holds the
//! independent references (real-space Majorana/Pfaffian route, exact
//! diagonalization, per-mode 2×2 blocks).

pub mod coherence;
pub mod correlators;
pub mod error;
pub mod kernel;
pub mod oracle;
pub mod spectrum;
pub mod toeplitz;

pub use error::{Error, Result};
