//! Bound formulas, permutation families, operator-norm checks and the
//! see-saw optimizer.

pub mod bounds;
pub mod family;
pub mod overlap;
pub mod seesaw;

pub use bounds::{bound_bb84_chain, bound_identical_bb84, bound_parallel, ln_bound_parallel};
pub use family::{build_base_family, lift_family, verify_family, FamilyReport, PermutationFamily};
pub use overlap::{
    check_overlap_bound, check_overlap_ops, check_step2, check_tfkw_lemma, game_operator,
    game_operators, BasisOverlap, GameOperator, OverlapCheck, TfkwCheck,
};
pub use seesaw::{seesaw, SeesawConfig, SeesawResult};
