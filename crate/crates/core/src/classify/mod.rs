//! The two censuses: categorifications graded by `Z/p` with trivial
//! component `Vec_{(Z/q)²}`, and categorifications of `R_{3,A}`.

mod census;
mod fq2;
mod matrix;
pub mod verify;

pub use census::{
    census_pq2, census_r3a, census_r3a_table, Branch, CensusInput, CensusOptions, CensusReport,
    ExtensionDatum, Mode, OracleCheck, Payload,
};
pub use fq2::{pth_roots, Fq2Elem, FqSquared};
pub use matrix::{
    build_m, invariant_lagrangian, is_group_theoretical, lagrangian_case_analysis,
    root_pair_values, CaseAnalysis, ProjectionCase, RootPair, RootPairValues,
};
