//! Built-in group families: full pipelines for `PSL(2,q)` and `PSU(3,q)`, and the
//! witness computations for Suzuki, Ree and symplectic groups.

mod linear;
mod pipeline;
mod unitary;
mod witnesses;

pub use linear::{sl2_cover, sl2_cover_with, sl2_family, sl2_level, sl2_x, SL2_MAX_Q};
pub use pipeline::{
    analyze_branches, analyze_character, cached_closure, common_checks, matrix_closure, sweep, ClosureCache, BranchRecord, CharacterRecord, Check, FamilyError, FamilyOptions,
    FamilyReport, KeyRecord, INDEPENDENCE_CAP, SCHEMA_VERSION,
};
pub use unitary::{psu3_parameters_closed_form, su3_cover, su3_cover_with, su3_eta, su3_family, su3_level, su3_order, su3_x, su3_xi, HermitianForm};
pub use witnesses::{
    ree_refutation, suzuki_refutation, symplectic_witness, symplectic_witness_with, Ree, ReeReport, Suzuki, SuzukiReport, SymplecticReport, SymplecticSpace,
    Tally,
};
