//! Monogamy-of-entanglement games on coset and BB84 states, the operator
//! bounds that control them, and the unclonable primitives built on top.

pub mod analysis;
pub mod coset;
pub mod crypto;
pub mod error;
pub mod games;
pub mod gf2;
pub mod qsim;

pub use error::{Error, Result};
