//! Exact Markov measures over free groups, their support graphs, the
//! cocycle machinery for recoding them, edge-sliding orbit equivalences and
//! the full-group steps that turn a generator-ergodic chain into a Bernoulli
//! shift.

pub mod catalog;
pub mod chainspec;
pub mod check;
pub mod cocycle;
pub mod edgeslide;
pub mod error;
pub mod freegroup;
pub mod fullgroup;
pub mod graphs;
pub mod suite;

pub use chainspec::{Configuration, Kernel, MarkovSpec, Rational, Symbol, Window, ZKernel};
pub use check::Check;
pub use cocycle::TauSpec;
pub use error::{Error, Result};
pub use freegroup::{ball, LeftConnectedSet, Letter, Word};
