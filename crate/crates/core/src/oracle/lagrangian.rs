use std::collections::{BTreeSet, HashSet};

use super::Caps;
use crate::error::Result;
use crate::finab::{FinAbGroup, GroupElem};
use crate::orthogroup::OrthElem;

/// Addition and pairing tables for `D = A ⊕ A*`, whose elements are encoded
/// as `index(a) · |A| + index(f)`.
struct DoubleGroup {
    n: usize,
    exponent: u64,
    add: Vec<u32>,
    pair: Vec<u64>,
}

impl DoubleGroup {
    fn new(a: &FinAbGroup) -> Self {
        let els: Vec<GroupElem> = a.elements().collect();
        let n = els.len();
        let mut add = vec![0u32; n * n];
        let mut pair = vec![0u64; n * n];
        for (i, x) in els.iter().enumerate() {
            for (j, y) in els.iter().enumerate() {
                add[i * n + j] = a.index_of(&a.add(x, y)) as u32;
                pair[i * n + j] = a.pair(x, y);
            }
        }
        DoubleGroup {
            n,
            exponent: a.exponent(),
            add,
            pair,
        }
    }

    fn size(&self) -> usize {
        self.n * self.n
    }

    fn add(&self, u: u32, v: u32) -> u32 {
        let n = self.n;
        let (ua, uf) = (u as usize / n, u as usize % n);
        let (va, vf) = (v as usize / n, v as usize % n);
        self.add[ua * n + va] * n as u32 + self.add[uf * n + vf]
    }

    /// `q(a ⊕ f) = ⟨f, a⟩`.
    fn q(&self, u: u32) -> u64 {
        let n = self.n;
        self.pair[(u as usize % n) * n + u as usize / n]
    }

    /// Polar form `q(u + v) - q(u) - q(v)`.
    fn polar(&self, u: u32, v: u32) -> u64 {
        let n = self.n;
        let (ua, uf) = (u as usize / n, u as usize % n);
        let (va, vf) = (v as usize / n, v as usize % n);
        (self.pair[uf * n + va] + self.pair[vf * n + ua]) % self.exponent
    }
}

/// A Lagrangian subgroup of `A ⊕ A*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Lagrangian {
    group: FinAbGroup,
    /// Sorted element encodings.
    members: Vec<u32>,
}

impl Lagrangian {
    /// Wrap a set of pairs `(a, f)`; it is not checked to be Lagrangian.
    pub fn from_elements(
        group: &FinAbGroup,
        elements: impl IntoIterator<Item = (GroupElem, GroupElem)>,
    ) -> Self {
        let n = group.order();
        let mut members: Vec<u32> = elements
            .into_iter()
            .map(|(a, f)| (group.index_of(&a) * n + group.index_of(&f)) as u32)
            .collect();
        members.sort_unstable();
        members.dedup();
        Lagrangian {
            group: group.clone(),
            members,
        }
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn decode(&self, u: u32) -> (GroupElem, GroupElem) {
        let n = self.group.order();
        (
            self.group.element_at(u as u64 / n),
            self.group.element_at(u as u64 % n),
        )
    }

    pub fn elements(&self) -> Vec<(GroupElem, GroupElem)> {
        self.members.iter().map(|&u| self.decode(u)).collect()
    }

    pub fn contains(&self, a: &GroupElem, f: &GroupElem) -> bool {
        let n = self.group.order();
        let code = (self.group.index_of(a) * n + self.group.index_of(f)) as u32;
        self.members.binary_search(&code).is_ok()
    }

    /// `M·L = L`.
    pub fn is_invariant(&self, m: &OrthElem) -> bool {
        self.elements().iter().all(|(a, f)| {
            let (a2, f2) = m.apply(a, f);
            self.contains(&a2, &f2)
        })
    }

    /// `|π(L)|` for the projection `π: A ⊕ A* -> A`.
    pub fn projection_size(&self) -> usize {
        let n = self.group.order() as u32;
        self.members
            .iter()
            .map(|u| u / n)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Re-check from the definition: a subgroup of order `|A|` on which `q`
    /// vanishes and which equals its own orthogonal complement.
    pub fn verify(&self) -> bool {
        let d = DoubleGroup::new(&self.group);
        let set: HashSet<u32> = self.members.iter().copied().collect();
        let closed = self
            .members
            .iter()
            .all(|&u| self.members.iter().all(|&v| set.contains(&d.add(u, v))));
        let isotropic = self.members.iter().all(|&u| d.q(u) == 0);
        let perp = (0..d.size() as u32)
            .filter(|&w| self.members.iter().all(|&u| d.polar(u, w) == 0))
            .count();
        closed
            && set.contains(&0)
            && isotropic
            && self.len() as u64 == self.group.order()
            && perp == self.len()
    }
}

/// All Lagrangian subgroups of `A ⊕ A*` in increasing order of their sorted
/// element encodings.
///
/// Depth-first search over isotropic subgroups: a subgroup `H` is extended
/// by a singular vector polar-orthogonal to `H`, each child subgroup is
/// visited once, and subgroups of order `|A|` are recorded.
pub fn enumerate_lagrangians(a: &FinAbGroup, caps: &Caps) -> Result<Vec<Lagrangian>> {
    let n = a.order();
    caps.check(
        "|A|^2 for Lagrangian enumeration",
        n.saturating_mul(n),
        caps.pair_space,
    )?;
    let d = DoubleGroup::new(a);
    let singular: Vec<u32> = (0..d.size() as u32).filter(|&u| d.q(u) == 0).collect();
    let mut search = Search {
        d: &d,
        singular: &singular,
        found: BTreeSet::new(),
        visited: HashSet::new(),
    };
    search.visit(vec![0], &[]);
    Ok(search
        .found
        .into_iter()
        .map(|members| Lagrangian {
            group: a.clone(),
            members,
        })
        .collect())
}

struct Search<'a> {
    d: &'a DoubleGroup,
    singular: &'a [u32],
    found: BTreeSet<Vec<u32>>,
    visited: HashSet<Vec<u32>>,
}

impl Search<'_> {
    fn visit(&mut self, h: Vec<u32>, gens: &[u32]) {
        if h.len() == self.d.n {
            self.found.insert(h);
            return;
        }
        let mut in_h = vec![false; self.d.size()];
        for &x in &h {
            in_h[x as usize] = true;
        }
        let mut covered = vec![false; self.d.size()];
        for &s in self.singular {
            if in_h[s as usize]
                || covered[s as usize]
                || gens.iter().any(|&g| self.d.polar(g, s) != 0)
            {
                continue;
            }
            // Cosets H + j·s until j·s falls back into H.
            let mut cosets: Vec<Vec<u32>> = vec![h.clone()];
            let mut c = s;
            while !in_h[c as usize] {
                cosets.push(h.iter().map(|&x| self.d.add(x, c)).collect());
                c = self.d.add(c, s);
            }
            let k = cosets.len();
            for (j, coset) in cosets.iter().enumerate().skip(1) {
                if gcd(j, k) == 1 {
                    for &x in coset {
                        covered[x as usize] = true;
                    }
                }
            }
            let mut child: Vec<u32> = cosets.concat();
            child.sort_unstable();
            if self.visited.insert(child.clone()) {
                let mut child_gens = gens.to_vec();
                child_gens.push(s);
                self.visit(child, &child_gens);
            }
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    crate::finab::arith::gcd(a as u64, b as u64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(s: &str) -> usize {
        enumerate_lagrangians(&FinAbGroup::parse(s).unwrap(), &Caps::default())
            .unwrap()
            .len()
    }

    #[test]
    fn known_counts() {
        assert_eq!(count("1"), 1);
        assert_eq!(count("2^1:1"), 2);
        assert_eq!(count("3^1:1"), 2);
        // Totally singular planes of O+(4, q): 2(q + 1).
        assert_eq!(count("2^1:2"), 6);
        assert_eq!(count("3^1:2"), 8);
        assert_eq!(count("5^1:2"), 12);
        // Z/4: A, A* and 2A ⊕ 2A*.
        assert_eq!(count("2^2:1"), 3);
    }

    #[test]
    fn every_result_is_lagrangian() {
        for s in ["2^1:2", "2^2:1", "2^1:1+2^2:1", "3^1:2", "2^1:1+3^1:1"] {
            let a = FinAbGroup::parse(s).unwrap();
            let ls = enumerate_lagrangians(&a, &Caps::default()).unwrap();
            assert!(ls.iter().all(|l| l.verify()), "{s}");
            let mut sorted = ls.clone();
            sorted.sort();
            assert_eq!(sorted, ls);
        }
    }

    #[test]
    fn a_and_dual_are_lagrangian_and_identity_fixes_all() {
        let a = FinAbGroup::parse("2^1:1").unwrap();
        let ls = enumerate_lagrangians(&a, &Caps::default()).unwrap();
        let horiz = Lagrangian::from_elements(&a, a.elements().map(|x| (x, a.identity())));
        let vert = Lagrangian::from_elements(&a, a.elements().map(|x| (a.identity(), x)));
        assert!(ls.contains(&horiz) && ls.contains(&vert));
        assert!(ls.iter().all(|l| l.is_invariant(&OrthElem::identity(&a))));
        assert_eq!(horiz.projection_size(), 2);
        assert_eq!(vert.projection_size(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let a = FinAbGroup::parse("11^1:2").unwrap();
        assert!(matches!(
            enumerate_lagrangians(&a, &Caps::default()),
            Err(crate::Error::Resource(_))
        ));
    }
}
