//! Finite abelian groups in primary decomposition, their elements,
//! homomorphisms and the Pontryagin pairing with the dual group.
//!
//! A group is stored as a sorted list of factors `(Z/q^n)^a`. Elements are
//! coordinate vectors over the expanded list of cyclic factors. The dual `A*`
//! is identified with `A` through the same factor list: the functional with
//! coordinates `f` sends `a` to `Σ f_j a_j / ord_j ∈ Q/Z`.

pub mod arith;
mod hom;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use arith::{add_mod, gcd, is_prime, mul_mod, neg_mod};

pub use hom::GroupHom;

/// Default cap on exhaustive element enumeration.
pub const DEFAULT_ELEMENT_CAP: u64 = 1_000_000;

/// One homogeneous block `(Z/q^n)^a` of the primary decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Factor {
    pub prime: u64,
    pub exponent: u32,
    pub multiplicity: u32,
}

/// A single cyclic factor `Z/q^n` of the expanded factor list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cyclic {
    pub prime: u64,
    pub exponent: u32,
    pub order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinAbGroup {
    factors: Vec<Factor>,
    cyclics: Vec<Cyclic>,
    order: u64,
    exponent: u64,
}

/// Coordinates of an element with respect to the cyclic factors of its group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElem(pub Vec<u64>);

impl FinAbGroup {
    /// Build a group from factors in any order. Terms with the same `(q, n)`
    /// are merged; terms with zero exponent or multiplicity are dropped.
    pub fn new(factors: impl IntoIterator<Item = Factor>) -> Result<Self> {
        let mut merged: BTreeMap<(u64, u32), u32> = BTreeMap::new();
        for f in factors {
            if !is_prime(f.prime) {
                return Err(domain(format!("{} is not prime", f.prime)));
            }
            if f.exponent == 0 || f.multiplicity == 0 {
                continue;
            }
            let slot = merged.entry((f.prime, f.exponent)).or_insert(0);
            *slot = slot
                .checked_add(f.multiplicity)
                .ok_or_else(|| domain("multiplicity overflow"))?;
        }
        let factors: Vec<Factor> = merged
            .into_iter()
            .map(|((prime, exponent), multiplicity)| Factor {
                prime,
                exponent,
                multiplicity,
            })
            .collect();
        let mut cyclics = Vec::new();
        let mut order = 1u64;
        let mut exp_by_prime: BTreeMap<u64, u64> = BTreeMap::new();
        for f in &factors {
            let ord = f
                .prime
                .checked_pow(f.exponent)
                .ok_or_else(|| domain(format!("{}^{} overflows u64", f.prime, f.exponent)))?;
            for _ in 0..f.multiplicity {
                order = order
                    .checked_mul(ord)
                    .ok_or_else(|| domain("group order overflows u64"))?;
                cyclics.push(Cyclic {
                    prime: f.prime,
                    exponent: f.exponent,
                    order: ord,
                });
            }
            let e = exp_by_prime.entry(f.prime).or_insert(1);
            *e = (*e).max(ord);
        }
        let exponent = exp_by_prime.values().product();
        Ok(FinAbGroup {
            factors,
            cyclics,
            order,
            exponent,
        })
    }

    pub fn trivial() -> Self {
        FinAbGroup {
            factors: Vec::new(),
            cyclics: Vec::new(),
            order: 1,
            exponent: 1,
        }
    }

    /// `(Z/q^n)^a`.
    pub fn homogeneous(prime: u64, exponent: u32, multiplicity: u32) -> Result<Self> {
        Self::new([Factor {
            prime,
            exponent,
            multiplicity,
        }])
    }

    pub fn cyclic(prime: u64, exponent: u32) -> Result<Self> {
        Self::homogeneous(prime, exponent, 1)
    }

    /// Parse a descriptor such as `2^1:2 + 2^2:2`. `1`, `trivial` and the
    /// empty string denote the trivial group.
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_lowercase();
        if compact.is_empty() || compact == "1" || compact == "trivial" {
            return Ok(Self::trivial());
        }
        let mut factors = Vec::new();
        for term in compact.split('+') {
            let bad = || Error::Parse(format!("malformed term {term:?}; expected q^n:a"));
            let (base, mult) = match term.split_once(':') {
                Some((b, m)) => (b, m.parse::<u32>().map_err(|_| bad())?),
                None => (term, 1),
            };
            let (q, n) = match base.split_once('^') {
                Some((q, n)) => (
                    q.parse::<u64>().map_err(|_| bad())?,
                    n.parse::<u32>().map_err(|_| bad())?,
                ),
                None => (base.parse::<u64>().map_err(|_| bad())?, 1),
            };
            if n == 0 || mult == 0 {
                return Err(bad());
            }
            factors.push(Factor {
                prime: q,
                exponent: n,
                multiplicity: mult,
            });
        }
        Self::new(factors)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn cyclics(&self) -> &[Cyclic] {
        &self.cyclics
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.cyclics.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_trivial(&self) -> bool {
        self.cyclics.is_empty()
    }

    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.factors.iter().map(|f| f.prime).collect();
        ps.dedup();
        ps
    }

    /// The single prime of a nontrivial `q`-group.
    pub fn single_prime(&self) -> Option<u64> {
        match self.primes().as_slice() {
            [q] => Some(*q),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem(vec![0; self.rank()])
    }

    /// The `i`-th standard generator.
    pub fn generator(&self, i: usize) -> GroupElem {
        let mut e = self.identity();
        e.0[i] = 1 % self.cyclics[i].order;
        e
    }

    pub fn contains(&self, e: &GroupElem) -> bool {
        e.0.len() == self.rank() && e.0.iter().zip(&self.cyclics).all(|(x, c)| *x < c.order)
    }

    pub fn add(&self, x: &GroupElem, y: &GroupElem) -> GroupElem {
        GroupElem(
            self.cyclics
                .iter()
                .enumerate()
                .map(|(i, c)| add_mod(x.0[i], y.0[i], c.order))
                .collect(),
        )
    }

    pub fn neg(&self, x: &GroupElem) -> GroupElem {
        GroupElem(
            self.cyclics
                .iter()
                .zip(&x.0)
                .map(|(c, v)| neg_mod(*v, c.order))
                .collect(),
        )
    }

    pub fn sub(&self, x: &GroupElem, y: &GroupElem) -> GroupElem {
        self.add(x, &self.neg(y))
    }

    /// `k · x` for a signed integer `k`.
    pub fn scale(&self, k: i64, x: &GroupElem) -> GroupElem {
        GroupElem(
            self.cyclics
                .iter()
                .zip(&x.0)
                .map(|(c, v)| mul_mod(arith::reduce_i64(k, c.order), *v, c.order))
                .collect(),
        )
    }

    pub fn element_order(&self, x: &GroupElem) -> u64 {
        let mut ord = 1u64;
        for (c, v) in self.cyclics.iter().zip(&x.0) {
            let o = c.order / gcd(*v, c.order);
            ord = ord / gcd(ord, o) * o;
        }
        ord
    }

    /// Mixed-radix index of an element, first coordinate most significant.
    pub fn index_of(&self, x: &GroupElem) -> u64 {
        self.cyclics
            .iter()
            .zip(&x.0)
            .fold(0u64, |acc, (c, v)| acc * c.order + v)
    }

    pub fn element_at(&self, mut idx: u64) -> GroupElem {
        let mut coords = vec![0; self.rank()];
        for (i, c) in self.cyclics.iter().enumerate().rev() {
            coords[i] = idx % c.order;
            idx /= c.order;
        }
        GroupElem(coords)
    }

    /// All elements in lexicographic coordinate order. No cap is applied.
    pub fn elements(&self) -> Elements<'_> {
        Elements {
            group: self,
            next: Some(self.identity()),
        }
    }

    /// Like [`FinAbGroup::elements`], but refuses groups larger than `cap`.
    pub fn elements_capped(&self, cap: u64) -> Result<Elements<'_>> {
        if self.order > cap {
            return Err(Error::Resource(format!(
                "group of order {} exceeds element cap {cap}",
                self.order
            )));
        }
        Ok(self.elements())
    }

    /// Pontryagin pairing `⟨f, a⟩ ∈ Q/Z`, returned as a residue modulo the
    /// exponent `L` of the group (the value represents `r / L`).
    pub fn pair(&self, f: &GroupElem, a: &GroupElem) -> u64 {
        let l = self.exponent;
        let mut acc = 0u64;
        for (j, c) in self.cyclics.iter().enumerate() {
            let term = mul_mod(mul_mod(f.0[j], a.0[j], c.order), l / c.order, l);
            acc = add_mod(acc, term, l);
        }
        acc
    }

    /// Order of a pairing value in `Q/Z`.
    pub fn pairing_value_order(&self, r: u64) -> u64 {
        self.exponent / gcd(r, self.exponent)
    }

    /// External direct sum. Returns the sum together with the positions of
    /// the cyclic factors of `self` and of `other` inside it.
    pub fn direct_sum(&self, other: &FinAbGroup) -> (FinAbGroup, Vec<usize>, Vec<usize>) {
        let sum = FinAbGroup::new(self.factors.iter().chain(other.factors.iter()).copied())
            .expect("direct sum of valid groups is valid");
        let mut tagged: Vec<(u64, u32, usize, usize)> = Vec::new();
        for (i, c) in self.cyclics.iter().enumerate() {
            tagged.push((c.prime, c.exponent, 0, i));
        }
        for (i, c) in other.cyclics.iter().enumerate() {
            tagged.push((c.prime, c.exponent, 1, i));
        }
        tagged.sort();
        let mut left = vec![0; self.rank()];
        let mut right = vec![0; other.rank()];
        for (pos, t) in tagged.iter().enumerate() {
            if t.2 == 0 {
                left[t.3] = pos;
            } else {
                right[t.3] = pos;
            }
        }
        (sum, left, right)
    }

    /// The `q`-primary part and the indices of its cyclic factors.
    pub fn primary_part(&self, q: u64) -> (FinAbGroup, Vec<usize>) {
        let idx: Vec<usize> = (0..self.rank())
            .filter(|&i| self.cyclics[i].prime == q)
            .collect();
        let g = FinAbGroup::new(self.factors.iter().filter(|f| f.prime == q).copied())
            .expect("primary part of a valid group is valid");
        (g, idx)
    }

    /// Reconstruct a `q`-group from `log_q |A[q^k]|` for `k = 1, 2, ...`,
    /// stopping once the sequence stabilises.
    pub fn from_torsion_logs(q: u64, logs: &[u32]) -> Result<Self> {
        // Number of cyclic factors of exponent >= k is logs[k] - logs[k-1].
        let mut at_least: Vec<u32> = Vec::new();
        let mut prev = 0u32;
        for &l in logs {
            if l < prev {
                return Err(domain("torsion sizes must be non-decreasing"));
            }
            at_least.push(l - prev);
            prev = l;
        }
        let mut factors = Vec::new();
        for k in 0..at_least.len() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            if at_least[k] < next {
                return Err(domain("torsion sizes are not those of an abelian group"));
            }
            let m = at_least[k] - next;
            if m > 0 {
                factors.push(Factor {
                    prime: q,
                    exponent: k as u32 + 1,
                    multiplicity: m,
                });
            }
        }
        Self::new(factors)
    }

    /// Canonical descriptor string.
    pub fn descriptor(&self) -> String {
        if self.is_trivial() {
            return "1".to_string();
        }
        self.factors
            .iter()
            .map(|f| format!("{}^{}:{}", f.prime, f.exponent, f.multiplicity))
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for FinAbGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for FinAbGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.descriptor())
    }
}

impl<'de> Deserialize<'de> for FinAbGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Lexicographic odometer over the elements of a group.
pub struct Elements<'a> {
    group: &'a FinAbGroup,
    next: Option<GroupElem>,
}

impl Iterator for Elements<'_> {
    type Item = GroupElem;

    fn next(&mut self) -> Option<GroupElem> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.0.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ.0[i] += 1;
            if succ.0[i] < self.group.cyclics[i].order {
                self.next = Some(succ);
                break;
            }
            succ.0[i] = 0;
        }
        Some(current)
    }
}
