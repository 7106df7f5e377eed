use std::fmt;

use serde::Serialize;

use super::decompose::block_diagonal;
use super::{decompose, FormBlockTag};
use crate::error::{domain, Result};
use crate::finab::{FinAbGroup, GroupHom};

/// Number of skew and special blocks on one homogeneous factor `(Z/q^n)^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassComponent {
    pub prime: u64,
    pub exponent: u32,
    pub skew: u32,
    pub special: u32,
}

/// An equivalence class of valid `γ`, described by its block counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GammaClass {
    pub components: Vec<ClassComponent>,
}

impl GammaClass {
    /// The block-diagonal representative: on each factor, skew blocks first.
    pub fn materialize(&self, a: &FinAbGroup) -> Result<GroupHom> {
        let tags = self.components.iter().flat_map(|c| {
            std::iter::repeat_n(FormBlockTag::Skew, c.skew as usize).chain(std::iter::repeat_n(
                FormBlockTag::Special(1),
                c.special as usize,
            ))
        });
        block_diagonal(a, tags)
    }
}

impl fmt::Display for GammaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("empty");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                format!(
                    "{}^{}:skew={},special={}",
                    c.prime, c.exponent, c.skew, c.special
                )
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// All classes of non-degenerate `γ` with `γ*γ⁻¹γ*` alternating: on each
/// factor `(Z/q^n)^a` (with `a` even) choose the number of skew blocks
/// `k ∈ [0, a/2]`. Any odd multiplicity leaves no valid `γ`.
pub fn enumerate_gamma_classes(a: &FinAbGroup) -> Result<Vec<GammaClass>> {
    if a.order().is_multiple_of(3) {
        return Err(domain("group order is divisible by 3"));
    }
    if a.factors().iter().any(|f| f.multiplicity % 2 == 1) {
        return Ok(Vec::new());
    }
    let mut classes = vec![Vec::new()];
    for f in a.factors() {
        let half = f.multiplicity / 2;
        classes = classes
            .into_iter()
            .flat_map(|prefix: Vec<ClassComponent>| {
                (0..=half).map(move |k| {
                    let mut c = prefix.clone();
                    c.push(ClassComponent {
                        prime: f.prime,
                        exponent: f.exponent,
                        skew: k,
                        special: half - k,
                    });
                    c
                })
            })
            .collect();
    }
    Ok(classes
        .into_iter()
        .map(|components| GammaClass { components })
        .collect())
}

/// The class of a valid `γ`, by decomposing each primary part.
pub fn classify_gamma(gamma: &GroupHom) -> Result<GammaClass> {
    let a = gamma.source();
    let mut components = Vec::new();
    for q in a.primes() {
        let d = decompose(&gamma.restrict_to_prime(q)?)?;
        let (part, _) = a.primary_part(q);
        for f in part.factors() {
            let count = |tag_is_skew: bool| {
                d.blocks
                    .iter()
                    .filter(|b| {
                        b.exponent == f.exponent && (b.tag == FormBlockTag::Skew) == tag_is_skew
                    })
                    .count() as u32
            };
            components.push(ClassComponent {
                prime: q,
                exponent: f.exponent,
                skew: count(true),
                special: count(false),
            });
        }
    }
    Ok(GammaClass { components })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts() {
        let count =
            |s: &str| enumerate_gamma_classes(&FinAbGroup::parse(s).unwrap()).map(|v| v.len());
        assert_eq!(count("2^1:2"), Ok(2));
        assert_eq!(count("5^1:1"), Ok(0));
        assert_eq!(count("2^1:2+7^1:2"), Ok(4));
        assert_eq!(count("2^1:2+7^1:4"), Ok(6));
        assert_eq!(count("1"), Ok(1));
        assert!(count("3^1:2").is_err());
    }

    #[test]
    fn materialised_classes_classify_back() {
        for s in ["2^1:2", "2^1:4", "2^1:2+2^2:2", "2^1:2+5^1:2", "7^1:4"] {
            let a = FinAbGroup::parse(s).unwrap();
            for class in enumerate_gamma_classes(&a).unwrap() {
                let gamma = class.materialize(&a).unwrap();
                assert_eq!(classify_gamma(&gamma).unwrap(), class, "{s}: {class}");
            }
        }
    }
}
