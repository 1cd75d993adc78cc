//! Entanglement-assisted classical–quantum (EACQ) coding over erasure channels.
//!
//! * [`hilbert`]: dense density matrices, partial traces, entropies.
//! * [`sparse`]: sparse vectors, operators and low-rank mixtures for larger
//!   code simulations.
//! * [`channels`]: erasure, block erasure and degrading channels.
//! * [`lemmas`]: subset-average entropy profiles and randomized checks of the
//!   entropy inequalities used by the converse.
//! * [`converse`]: one-shot converse bounds and their erasure closed forms.
//! * [`region`]: exact rational rate regions, elimination and geometry.
//! * [`codes`]: Reed–Solomon, teleportation, dense coding and small EAQ codes,
//!   with an exact pipeline simulator.

pub mod channels;
pub mod codes;
pub mod config;
pub mod converse;
pub mod error;
pub mod hilbert;
pub mod lemmas;
pub mod region;
pub mod sparse;

pub use error::{Error, Result};
