use std::collections::{BTreeSet, VecDeque};

use super::{orbit_count, Caps, OrbitPartition};
use crate::error::Result;
use crate::finab::arith::{gcd, inv_mod};
use crate::finab::{FinAbGroup, GroupElem, GroupHom};

/// Addition and pairing tables of a small group, used to evaluate maps
/// elementwise instead of through matrix algebra.
pub struct ElementTable {
    group: FinAbGroup,
    n: usize,
    add: Vec<u32>,
    pair: Vec<u64>,
    /// Index of the last nonzero coordinate of each element.
    last_nonzero: Vec<usize>,
    strides: Vec<usize>,
}

impl ElementTable {
    pub fn new(a: &FinAbGroup, caps: &Caps) -> Result<Self> {
        let n = a.order();
        caps.check(
            "|A|^2 for element tables",
            n.saturating_mul(n),
            caps.pair_space.max(caps.elements),
        )?;
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
        let last_nonzero = els
            .iter()
            .map(|e| e.0.iter().rposition(|&c| c != 0).unwrap_or(0))
            .collect();
        let mut strides = vec![1usize; a.rank()];
        for i in (0..a.rank().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * a.cyclics()[i + 1].order as usize;
        }
        Ok(ElementTable {
            group: a.clone(),
            n,
            add,
            pair,
            last_nonzero,
            strides,
        })
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn add(&self, u: u32, v: u32) -> u32 {
        self.add[u as usize * self.n + v as usize]
    }

    /// `⟨f, a⟩` for element indices.
    pub fn pair(&self, f: u32, a: u32) -> u64 {
        self.pair[f as usize * self.n + a as usize]
    }

    /// Image index of every element under `h`, built by adding generator
    /// images one coordinate step at a time.
    pub fn images(&self, h: &GroupHom) -> Vec<u32> {
        let gen_img: Vec<u32> = (0..self.group.rank())
            .map(|j| self.group.index_of(&h.apply(&self.group.generator(j))) as u32)
            .collect();
        let mut img = vec![0u32; self.n];
        for idx in 1..self.n {
            let j = self.last_nonzero[idx];
            img[idx] = self.add(img[idx - self.strides[j]], gen_img[j]);
        }
        img
    }

    /// Inverse permutation, if `img` is a bijection.
    pub fn invert(&self, img: &[u32]) -> Option<Vec<u32>> {
        let mut inv = vec![u32::MAX; self.n];
        for (i, &y) in img.iter().enumerate() {
            if inv[y as usize] != u32::MAX {
                return None;
            }
            inv[y as usize] = i as u32;
        }
        Some(inv)
    }

    /// Index of `k·v` for every `v`.
    pub fn multiple(&self, k: i64) -> Vec<u32> {
        (0..self.n as u64)
            .map(|i| {
                self.group
                    .index_of(&self.group.scale(k, &self.group.element_at(i)))
                    as u32
            })
            .collect()
    }
}

/// Elementwise predicates on candidate maps `γ: A -> A*`.
pub mod predicates {
    use super::ElementTable;
    use crate::finab::GroupHom;

    pub fn nondegenerate(t: &ElementTable, gamma: &GroupHom) -> bool {
        t.invert(&t.images(gamma)).is_some()
    }

    /// `y = γ*γ⁻¹γ*` as an element map, when `γ` is invertible.
    fn y_map(t: &ElementTable, gamma: &GroupHom) -> Option<Vec<u32>> {
        let g_inv = t.invert(&t.images(gamma))?;
        let gd = t.images(&gamma.dual());
        Some(gd.iter().map(|&v| gd[g_inv[v as usize] as usize]).collect())
    }

    /// `γ` invertible and `⟨y(a), a⟩ = 0` for all `a`.
    pub fn alternating_condition(t: &ElementTable, gamma: &GroupHom) -> bool {
        y_map(t, gamma).is_some_and(|y| (0..t.order()).all(|a| t.pair(y[a], a as u32) == 0))
    }

    /// `γ` invertible and `⟨y(u), v⟩ = -⟨y(v), u⟩` for all `u, v`.
    pub fn skew_condition(t: &ElementTable, gamma: &GroupHom) -> bool {
        let l = t.group().exponent();
        y_map(t, gamma).is_some_and(|y| {
            (0..t.order() as u32).all(|u| {
                (0..t.order() as u32).all(|v| {
                    (t.pair(y[u as usize], v) + t.pair(y[v as usize], u)).is_multiple_of(l)
                })
            })
        })
    }

    pub fn nondegenerate_alternating(t: &ElementTable, gamma: &GroupHom) -> bool {
        let img = t.images(gamma);
        t.invert(&img).is_some() && (0..t.order()).all(|a| t.pair(img[a], a as u32) == 0)
    }

    pub fn nondegenerate_skew(t: &ElementTable, gamma: &GroupHom) -> bool {
        let l = t.group().exponent();
        let img = t.images(gamma);
        t.invert(&img).is_some()
            && (0..t.order() as u32).all(|u| {
                (0..t.order() as u32).all(|v| {
                    (t.pair(img[u as usize], v) + t.pair(img[v as usize], u)).is_multiple_of(l)
                })
            })
    }

    /// `γ` invertible and `x² = a·x - 1` for `x = γ⁻¹γ*`, elementwise.
    pub fn special_relation(a: i64) -> impl Fn(&ElementTable, &GroupHom) -> bool {
        move |t, gamma| {
            let Some(g_inv) = t.invert(&t.images(gamma)) else {
                return false;
            };
            let gd = t.images(&gamma.dual());
            let x: Vec<u32> = gd.iter().map(|&v| g_inv[v as usize]).collect();
            let times_a = t.multiple(a);
            let neg = t.multiple(-1);
            (0..t.order()).all(|v| x[x[v] as usize] == t.add(times_a[x[v] as usize], neg[v]))
        }
    }
}

/// All `γ ∈ Hom(A, A*)` satisfying `predicate`, in enumeration order.
pub fn exhaustive_gamma_solutions(
    a: &FinAbGroup,
    predicate: &dyn Fn(&ElementTable, &GroupHom) -> bool,
    caps: &Caps,
) -> Result<Vec<GroupHom>> {
    let count = GroupHom::hom_count(a, a).unwrap_or(u64::MAX);
    caps.check("|Hom(A, A*)| scan", count, caps.hom_scan)?;
    let t = ElementTable::new(a, caps)?;
    Ok(GroupHom::all(a, a).filter(|g| predicate(&t, g)).collect())
}

/// `Aut(A)` by exhaustive bijectivity check.
pub fn enumerate_automorphisms(a: &FinAbGroup, caps: &Caps) -> Result<Vec<GroupHom>> {
    exhaustive_gamma_solutions(a, &predicates::nondegenerate, caps)
}

/// Elementary generators of `Aut(A)`: unit scalings of one factor and
/// transvections `e_j ↦ e_j + c·e_i` between factors of the same prime
/// with the least admissible `c`.
pub fn automorphism_generators(a: &FinAbGroup) -> Vec<GroupHom> {
    let mut gens = BTreeSet::new();
    let cyc = a.cyclics();
    for (j, c) in cyc.iter().enumerate() {
        for u in 2..c.order {
            if inv_mod(u, c.order).is_some() {
                let h = GroupHom::from_fn(a, a, |r, s| {
                    if r == s {
                        if r == j {
                            u as i64
                        } else {
                            1
                        }
                    } else {
                        0
                    }
                });
                gens.insert(h.expect("unit scaling is valid"));
            }
        }
    }
    for i in 0..cyc.len() {
        for j in 0..cyc.len() {
            if i == j || cyc[i].prime != cyc[j].prime {
                continue;
            }
            let step = (cyc[i].order / gcd(cyc[i].order, cyc[j].order)) as i64;
            let h = GroupHom::from_fn(a, a, |r, s| {
                i64::from(r == s) + if (r, s) == (i, j) { step } else { 0 }
            });
            gens.insert(h.expect("transvection is valid"));
        }
    }
    gens.into_iter().collect()
}

/// Orbits of `γ ↦ ψ*γψ` on a set of solutions, for `ψ` in `generators`.
pub fn gamma_orbits(
    solutions: Vec<GroupHom>,
    generators: &[GroupHom],
) -> Result<OrbitPartition<GroupHom>> {
    let duals: Vec<(GroupHom, GroupHom)> = generators
        .iter()
        .map(|psi| (psi.dual(), psi.clone()))
        .collect();
    let actions: Vec<_> = duals
        .iter()
        .map(|(psi_dual, psi)| {
            move |g: &GroupHom| {
                psi_dual
                    .compose(g)
                    .and_then(|x| x.compose(psi))
                    .expect("same group")
            }
        })
        .collect();
    let refs: Vec<&dyn Fn(&GroupHom) -> GroupHom> = actions
        .iter()
        .map(|f| f as &dyn Fn(&GroupHom) -> GroupHom)
        .collect();
    orbit_count(solutions, &refs)
}

/// The subgroup generated by `gens`, by breadth-first closure.
pub fn generated_subgroup(a: &FinAbGroup, gens: &[GroupHom]) -> BTreeSet<GroupHom> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([GroupHom::identity(a)]);
    while let Some(x) = queue.pop_front() {
        if !seen.insert(x.clone()) {
            continue;
        }
        for g in gens {
            let y = g.compose(&x).expect("same group");
            if !seen.contains(&y) {
                queue.push_back(y);
            }
        }
    }
    seen
}
