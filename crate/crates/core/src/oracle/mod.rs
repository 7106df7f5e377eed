//! Brute-force ground truth. Everything here enumerates; nothing is clever.
//! All enumerations are capped, and a cap that would be exceeded is an
//! error rather than a silent skip.

mod gamma;
mod lagrangian;
mod orbit;
mod orthogonal;

use serde::Serialize;

use crate::error::{Error, Result};

pub use gamma::{
    automorphism_generators, enumerate_automorphisms, exhaustive_gamma_solutions, gamma_orbits,
    generated_subgroup, predicates, ElementTable,
};
pub use lagrangian::{enumerate_lagrangians, Lagrangian};
pub use orbit::{orbit_count, OrbitPartition};
pub use orthogonal::enumerate_orthogonal_group;

/// Environment variable that overrides every cap at once.
pub const CAP_ENV: &str = "FUSION_CENSUS_CAP";

/// Enumeration limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Maximum `|A|`.
    pub elements: u64,
    /// Maximum `|A ⊕ A*| = |A|²` for orthogonal-group and Lagrangian scans.
    pub pair_space: u64,
    /// Maximum number of candidate homomorphisms in a scan.
    pub hom_scan: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            elements: 1_000_000,
            pair_space: 10_000,
            hom_scan: 100_000_000,
        }
    }
}

impl Caps {
    pub fn uniform(cap: u64) -> Self {
        Caps {
            elements: cap,
            pair_space: cap,
            hom_scan: cap,
        }
    }

    /// Defaults, unless [`CAP_ENV`] is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAP_ENV) {
            Ok(v) => v.trim().parse::<u64>().map(Caps::uniform).map_err(|_| {
                Error::Parse(format!(
                    "{CAP_ENV} must be a non-negative integer, got {v:?}"
                ))
            }),
            Err(_) => Ok(Caps::default()),
        }
    }

    pub(crate) fn check(&self, what: &str, size: u64, cap: u64) -> Result<()> {
        if size > cap {
            return Err(Error::Resource(format!(
                "{what}: {size} exceeds cap {cap} (set {CAP_ENV} to raise it)"
            )));
        }
        Ok(())
    }
}
