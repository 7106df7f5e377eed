use std::fmt;

use serde::{Deserialize, Serialize};

use super::arith::{add_mod, gcd, inv_mod, mul_mod, neg_mod, reduce_i64};
use super::{FinAbGroup, GroupElem};
use crate::error::{consistency, domain, Error, Result};

/// A homomorphism between finite abelian groups in coordinates.
///
/// `entries[i][j]` is the `i`-th coordinate of the image of the `j`-th
/// generator of the source, reduced modulo the order of the `i`-th target
/// factor. It is well defined iff `entries[i][j] · ord_j ≡ 0 (mod ord_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawHom")]
pub struct GroupHom {
    source: FinAbGroup,
    target: FinAbGroup,
    entries: Vec<Vec<u64>>,
}

#[derive(Deserialize)]
struct RawHom {
    source: FinAbGroup,
    target: FinAbGroup,
    entries: Vec<Vec<i64>>,
}

impl TryFrom<RawHom> for GroupHom {
    type Error = Error;
    fn try_from(raw: RawHom) -> Result<Self> {
        GroupHom::from_signed(raw.source, raw.target, raw.entries)
    }
}

impl GroupHom {
    pub fn new(source: FinAbGroup, target: FinAbGroup, entries: Vec<Vec<u64>>) -> Result<Self> {
        let signed = entries
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| i64::try_from(x).map_err(|_| domain("entry out of range")))
                    .collect()
            })
            .collect::<Result<Vec<Vec<i64>>>>()?;
        Self::from_signed(source, target, signed)
    }

    /// Build from signed integer entries, reducing them into range.
    pub fn from_signed(
        source: FinAbGroup,
        target: FinAbGroup,
        entries: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if entries.len() != target.rank() || entries.iter().any(|r| r.len() != source.rank()) {
            return Err(domain(format!(
                "matrix shape does not match {} -> {}",
                source.descriptor(),
                target.descriptor()
            )));
        }
        let mut reduced = vec![vec![0u64; source.rank()]; target.rank()];
        for (i, row) in entries.iter().enumerate() {
            let oi = target.cyclics()[i].order;
            for (j, &x) in row.iter().enumerate() {
                let oj = source.cyclics()[j].order;
                let v = reduce_i64(x, oi);
                if mul_mod(v, oj % oi, oi) != 0 {
                    return Err(domain(format!(
                        "entry ({i},{j}) = {x} does not define a map Z/{oj} -> Z/{oi}"
                    )));
                }
                reduced[i][j] = v;
            }
        }
        Ok(GroupHom {
            source,
            target,
            entries: reduced,
        })
    }

    /// Entrywise construction; `f(i, j)` is reduced and validated.
    pub fn from_fn(
        source: &FinAbGroup,
        target: &FinAbGroup,
        f: impl Fn(usize, usize) -> i64,
    ) -> Result<Self> {
        let entries = (0..target.rank())
            .map(|i| (0..source.rank()).map(|j| f(i, j)).collect())
            .collect();
        Self::from_signed(source.clone(), target.clone(), entries)
    }

    pub fn zero(source: &FinAbGroup, target: &FinAbGroup) -> Self {
        GroupHom {
            source: source.clone(),
            target: target.clone(),
            entries: vec![vec![0; source.rank()]; target.rank()],
        }
    }

    pub fn identity(a: &FinAbGroup) -> Self {
        Self::scalar(a, 1)
    }

    /// Multiplication by the integer `k` on `a`.
    pub fn scalar(a: &FinAbGroup, k: i64) -> Self {
        let mut h = Self::zero(a, a);
        for (i, c) in a.cyclics().iter().enumerate() {
            h.entries[i][i] = reduce_i64(k, c.order);
        }
        h
    }

    pub fn source(&self) -> &FinAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FinAbGroup {
        &self.target
    }

    pub fn entries(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i][j]
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    /// Smallest positive value an `(i, j)` entry may take; every valid value
    /// is a multiple of it.
    pub fn entry_step(source: &FinAbGroup, target: &FinAbGroup, i: usize, j: usize) -> u64 {
        let oi = target.cyclics()[i].order;
        let oj = source.cyclics()[j].order;
        oi / gcd(oi, oj)
    }

    /// `|Hom(source, target)|`, or `None` on overflow.
    pub fn hom_count(source: &FinAbGroup, target: &FinAbGroup) -> Option<u64> {
        let mut n = 1u64;
        for ci in target.cyclics() {
            for cj in source.cyclics() {
                n = n.checked_mul(gcd(ci.order, cj.order))?;
            }
        }
        Some(n)
    }

    /// Every homomorphism `source -> target`, row-major odometer order.
    pub fn all(source: &FinAbGroup, target: &FinAbGroup) -> impl Iterator<Item = GroupHom> {
        let (s, t) = (source.clone(), target.clone());
        let (rows, cols) = (t.rank(), s.rank());
        let steps: Vec<u64> = (0..rows * cols)
            .map(|k| Self::entry_step(&s, &t, k / cols, k % cols))
            .collect();
        let bounds: Vec<u64> = (0..rows * cols)
            .map(|k| t.cyclics()[k / cols].order)
            .collect();
        let mut state: Option<Vec<u64>> = Some(vec![0; rows * cols]);
        std::iter::from_fn(move || {
            let cur = state.take()?;
            let mut next = cur.clone();
            let mut k = next.len();
            while k > 0 {
                k -= 1;
                next[k] += steps[k];
                if next[k] < bounds[k] {
                    state = Some(next);
                    break;
                }
                next[k] = 0;
            }
            let entries = (0..rows)
                .map(|i| cur[i * cols..(i + 1) * cols].to_vec())
                .collect();
            Some(GroupHom {
                source: s.clone(),
                target: t.clone(),
                entries,
            })
        })
    }

    pub fn apply(&self, x: &GroupElem) -> GroupElem {
        GroupElem(
            self.entries
                .iter()
                .zip(self.target.cyclics())
                .map(|(row, c)| {
                    row.iter().zip(&x.0).fold(0u64, |acc, (e, v)| {
                        add_mod(acc, mul_mod(*e, *v, c.order), c.order)
                    })
                })
                .collect(),
        )
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom> {
        if inner.target != self.source {
            return Err(domain("composition of incompatible homomorphisms"));
        }
        let mut out = Self::zero(&inner.source, &self.target);
        for (i, c) in self.target.cyclics().iter().enumerate() {
            for k in 0..inner.source.rank() {
                let mut acc = 0u64;
                for j in 0..self.source.rank() {
                    acc = add_mod(
                        acc,
                        mul_mod(self.entries[i][j], inner.entries[j][k], c.order),
                        c.order,
                    );
                }
                out.entries[i][k] = acc;
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &GroupHom, op: impl Fn(u64, u64, u64) -> u64) -> Result<GroupHom> {
        if self.source != other.source || self.target != other.target {
            return Err(domain("homomorphisms with different source or target"));
        }
        let mut out = self.clone();
        for (i, c) in self.target.cyclics().iter().enumerate() {
            for j in 0..self.source.rank() {
                out.entries[i][j] = op(self.entries[i][j], other.entries[i][j], c.order);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &GroupHom) -> Result<GroupHom> {
        self.zip_with(other, add_mod)
    }

    pub fn sub(&self, other: &GroupHom) -> Result<GroupHom> {
        self.zip_with(other, |a, b, m| add_mod(a, neg_mod(b, m), m))
    }

    pub fn neg(&self) -> GroupHom {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> GroupHom {
        let mut out = self.clone();
        for (i, c) in self.target.cyclics().iter().enumerate() {
            for e in out.entries[i].iter_mut() {
                *e = mul_mod(*e, reduce_i64(k, c.order), c.order);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|&e| e == 0)
    }

    /// The dual map `f*: B* -> A*` for `f: A -> B`, characterised by
    /// `⟨f*(φ), a⟩ = ⟨φ, f(a)⟩`.
    pub fn dual(&self) -> GroupHom {
        let mut out = Self::zero(&self.target, &self.source);
        for (j, cj) in self.source.cyclics().iter().enumerate() {
            for (i, ci) in self.target.cyclics().iter().enumerate() {
                let e = self.entries[i][j];
                if cj.prime != ci.prime || e == 0 {
                    continue;
                }
                out.entries[j][i] = if cj.order >= ci.order {
                    mul_mod(e, cj.order / ci.order, cj.order)
                } else {
                    let d = ci.order / cj.order;
                    debug_assert_eq!(e % d, 0);
                    (e / d) % cj.order
                };
            }
        }
        out
    }

    /// `γ* = -γ` for an endomorphism read as a map `A -> A*`.
    pub fn is_skew(&self) -> bool {
        self.is_endomorphism() && self.dual() == self.neg()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_endomorphism() && self.dual() == *self
    }

    /// `⟨γ(a), a⟩ = 0` for all `a`. Equivalent to skew with zero diagonal.
    pub fn is_alternating(&self) -> bool {
        self.is_skew() && (0..self.source.rank()).all(|i| self.entries[i][i] == 0)
    }

    /// Indices of the cyclic factors grouped by equal `(q, n)`.
    fn layers(group: &FinAbGroup) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut last = None;
        for (i, c) in group.cyclics().iter().enumerate() {
            let key = (c.prime, c.exponent);
            if last == Some(key) {
                out.last_mut().unwrap().push(i);
            } else {
                out.push(vec![i]);
                last = Some(key);
            }
        }
        out
    }

    /// Whether the map is bijective. Requires `|source| = |target|`.
    pub fn is_isomorphism(&self) -> Result<bool> {
        if self.source.order() != self.target.order() {
            return Err(domain("isomorphism test between groups of different order"));
        }
        if self.source != self.target {
            return Ok(false);
        }
        for layer in Self::layers(&self.source) {
            let q = self.source.cyclics()[layer[0]].prime;
            let block: Vec<Vec<u64>> = layer
                .iter()
                .map(|&i| layer.iter().map(|&j| self.entries[i][j] % q).collect())
                .collect();
            if invert_matrix_mod(&block, q).is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Inverse of a bijective map. Non-bijective input is a domain error.
    pub fn inverse(&self) -> Result<GroupHom> {
        if !self.is_isomorphism()? {
            return Err(domain("homomorphism is not invertible"));
        }
        // Invert the diagonal layer blocks, then correct by a Neumann series
        // in the nilpotent remainder.
        let a = &self.source;
        let mut d = Self::zero(a, a);
        for layer in Self::layers(a) {
            let m = a.cyclics()[layer[0]].order;
            let block: Vec<Vec<u64>> = layer
                .iter()
                .map(|&i| layer.iter().map(|&j| self.entries[i][j]).collect())
                .collect();
            let inv = invert_matrix_mod(&block, m)
                .ok_or_else(|| consistency("layer block unexpectedly singular"))?;
            for (bi, &i) in layer.iter().enumerate() {
                for (bj, &j) in layer.iter().enumerate() {
                    d.entries[i][j] = inv[bi][bj];
                }
            }
        }
        let id = Self::identity(a);
        let n = d.compose(self)?.sub(&id)?;
        let minus_n = n.neg();
        let mut term = id.clone();
        let mut sum = id.clone();
        let bound = 4 * a
            .cyclics()
            .iter()
            .map(|c| c.exponent as usize)
            .sum::<usize>()
            + 8;
        for _ in 0..bound {
            term = term.compose(&minus_n)?;
            if term.is_zero() {
                let inv = sum.compose(&d)?;
                debug_assert_eq!(inv.compose(self)?, id);
                return Ok(inv);
            }
            sum = sum.add(&term)?;
        }
        Err(consistency(
            "remainder of the layer inverse is not nilpotent",
        ))
    }

    pub fn pow(&self, mut k: u64) -> Result<GroupHom> {
        if !self.is_endomorphism() {
            return Err(domain("power of a non-endomorphism"));
        }
        let mut acc = Self::identity(&self.source);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            base = base.compose(&base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Restrict an endomorphism to the `q`-primary part.
    pub fn restrict_to_prime(&self, q: u64) -> Result<GroupHom> {
        if !self.is_endomorphism() {
            return Err(domain("restriction of a non-endomorphism"));
        }
        let (part, idx) = self.source.primary_part(q);
        let entries = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.entries[i][j]).collect())
            .collect();
        Ok(GroupHom {
            source: part.clone(),
            target: part,
            entries,
        })
    }

    /// Assemble a map `A ⊕ C -> B ⊕ D` from the four blocks
    /// `[[A->B, C->B], [A->D, C->D]]`.
    pub fn from_blocks(
        top_left: &GroupHom,
        top_right: &GroupHom,
        bottom_left: &GroupHom,
        bottom_right: &GroupHom,
    ) -> Result<GroupHom> {
        let (src, sl, sr) = top_left.source.direct_sum(&top_right.source);
        let (tgt, tl, tr) = top_left.target.direct_sum(&bottom_left.target);
        if bottom_left.source != top_left.source
            || bottom_right.source != top_right.source
            || top_right.target != top_left.target
            || bottom_right.target != bottom_left.target
        {
            return Err(domain("block shapes do not match"));
        }
        let mut out = Self::zero(&src, &tgt);
        let place = |out: &mut GroupHom, h: &GroupHom, rows: &[usize], cols: &[usize]| {
            for (i, &ri) in rows.iter().enumerate() {
                for (j, &cj) in cols.iter().enumerate() {
                    out.entries[ri][cj] = h.entries[i][j];
                }
            }
        };
        place(&mut out, top_left, &tl, &sl);
        place(&mut out, top_right, &tl, &sr);
        place(&mut out, bottom_left, &tr, &sl);
        place(&mut out, bottom_right, &tr, &sr);
        Ok(out)
    }
}

impl fmt::Display for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| {
                format!(
                    "[{}]",
                    r.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Gauss-Jordan inverse over `Z/m` for `m` a prime power, using unit pivots.
pub(crate) fn invert_matrix_mod(mat: &[Vec<u64>], m: u64) -> Option<Vec<Vec<u64>>> {
    let n = mat.len();
    let mut a: Vec<Vec<u64>> = mat
        .iter()
        .map(|r| r.iter().map(|x| x % m).collect())
        .collect();
    let mut inv: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j) % m).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| inv_mod(a[r][col], m).is_some())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let u = inv_mod(a[col][col], m)?;
        for j in 0..n {
            a[col][j] = mul_mod(a[col][j], u, m);
            inv[col][j] = mul_mod(inv[col][j], u, m);
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                for j in 0..n {
                    a[r][j] = add_mod(a[r][j], neg_mod(mul_mod(f, a[col][j], m), m), m);
                    inv[r][j] = add_mod(inv[r][j], neg_mod(mul_mod(f, inv[col][j], m), m), m);
                }
            }
        }
    }
    Some(inv)
}
