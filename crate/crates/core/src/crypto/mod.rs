//! Classical primitives, transparent obfuscation and the unclonable schemes.

pub mod bits;
pub mod cppf;
pub mod cpprf;
pub mod prf;
pub mod profile;
pub mod program;
pub mod sd;
pub mod ts;
pub mod ue;

pub use bits::BitString;
pub use prf::{PrfKey, PuncturedKey};
pub use profile::{LengthProfile, ProfileKind};
pub use program::{Input, ObfProgram, Output, Program};
