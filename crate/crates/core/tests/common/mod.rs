#![allow(dead_code)]

use fusion_census::finab::{FinAbGroup, GroupHom};
use fusion_census::formsolve::{enumerate_gamma_classes, GammaClass};
use rand::Rng;

pub fn group(s: &str) -> FinAbGroup {
    FinAbGroup::parse(s).unwrap()
}

/// A uniformly random endomorphism of `a`.
pub fn random_endo(a: &FinAbGroup, rng: &mut impl Rng) -> GroupHom {
    let orders: Vec<u64> = a.cyclics().iter().map(|c| c.order).collect();
    let entries = (0..a.rank())
        .map(|i| {
            (0..a.rank())
                .map(|j| {
                    let step = GroupHom::entry_step(a, a, i, j);
                    rng.gen_range(0..orders[i] / step) * step
                })
                .collect()
        })
        .collect();
    GroupHom::new(a.clone(), a.clone(), entries).unwrap()
}

pub fn random_automorphism(a: &FinAbGroup, rng: &mut impl Rng) -> GroupHom {
    loop {
        let h = random_endo(a, rng);
        if h.is_isomorphism().unwrap() {
            return h;
        }
    }
}

/// A random valid `γ`: a random class representative moved by a random
/// change of basis.
pub fn random_valid_gamma(a: &FinAbGroup, rng: &mut impl Rng) -> (GammaClass, GroupHom) {
    let classes = enumerate_gamma_classes(a).unwrap();
    let class = classes[rng.gen_range(0..classes.len())].clone();
    let psi = random_automorphism(a, rng);
    let canon = class.materialize(a).unwrap();
    let gamma = psi.dual().compose(&canon).unwrap().compose(&psi).unwrap();
    (class, gamma)
}
