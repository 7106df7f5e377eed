use std::collections::BTreeSet;

use serde::Serialize;

use super::{hensel_lift_quadratic, FormBlockTag};
use crate::error::{consistency, domain, Error, Result};
use crate::finab::arith::{inv_mod, valuation};
use crate::finab::{FinAbGroup, GroupElem, GroupHom};
use crate::orthogroup::x_of;

/// One orthogonal summand `C ⊕ C`, `C = Z/q^n`, with its adapted basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormBlock {
    pub prime: u64,
    pub exponent: u32,
    pub tag: FormBlockTag,
    pub basis: [GroupElem; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub blocks: Vec<FormBlock>,
    /// Column `j` is the `j`-th adapted basis vector.
    pub change_of_basis: GroupHom,
    /// `ψ*γψ`: block diagonal with skew and special blocks.
    pub canonical: GroupHom,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSummary {
    pub prime: u64,
    pub exponent: u32,
    pub tag: FormBlockTag,
}

/// JSON shape of a decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub blocks: Vec<BlockSummary>,
    pub basis: Vec<Vec<u64>>,
}

impl Decomposition {
    pub fn report(&self) -> DecompositionReport {
        DecompositionReport {
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockSummary {
                    prime: b.prime,
                    exponent: b.exponent,
                    tag: b.tag,
                })
                .collect(),
            basis: self
                .blocks
                .iter()
                .flat_map(|b| b.basis.iter().map(|v| v.0.clone()))
                .collect(),
        }
    }

    pub fn skew_count(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.tag == FormBlockTag::Skew)
            .count()
    }
}

struct Form<'a> {
    group: &'a FinAbGroup,
    gamma: &'a GroupHom,
    q: u64,
}

impl Form<'_> {
    /// `b(u, v) = ⟨γu, v⟩` as a residue mod `exp(A)`.
    fn b(&self, u: &GroupElem, v: &GroupElem) -> u64 {
        self.group.pair(&self.gamma.apply(u), v)
    }

    fn log_order(&self, g: &GroupElem) -> u32 {
        valuation(self.group.element_order(g), self.q)
    }

    fn value_log_order(&self, r: u64) -> u32 {
        valuation(self.group.pairing_value_order(r), self.q)
    }

    /// `r / exp(A)` written as `u / q^n`; returns `u mod q^n`.
    fn numerator(&self, r: u64, n: u32) -> u64 {
        let scale = self.group.exponent() / self.q.pow(n);
        debug_assert_eq!(r % scale, 0);
        (r / scale) % self.q.pow(n)
    }

    fn orthogonal_complement(&self, s: &[GroupElem], basis: &[GroupElem; 2]) -> Vec<GroupElem> {
        s.iter()
            .filter(|v| basis.iter().all(|f| self.b(f, v) == 0 && self.b(v, f) == 0))
            .cloned()
            .collect()
    }
}

/// Split a non-degenerate `γ` on a `q`-group (`q ≠ 3`) with `γ*γ⁻¹γ*`
/// alternating into mutually orthogonal skew and special blocks.
///
/// `A' = Ker(x + I)` carries the skew blocks and `A'' = Im(x + I)` the
/// special ones, where `x = γ⁻¹γ*`. Within each part, blocks are peeled at
/// the largest remaining exponent from the lexicographically smallest
/// admissible generator.
pub fn decompose(gamma: &GroupHom) -> Result<Decomposition> {
    let a = gamma.source();
    if !gamma.is_endomorphism() {
        return Err(domain("gamma must be a map A -> A*"));
    }
    if a.is_trivial() {
        return Ok(Decomposition {
            blocks: Vec::new(),
            change_of_basis: gamma.clone(),
            canonical: gamma.clone(),
        });
    }
    let q = a
        .single_prime()
        .ok_or_else(|| domain("decompose needs a q-group; split by prime first"))?;
    if q == 3 {
        return Err(Error::Unsupported(
            "3-groups are outside the scope of the block decomposition".into(),
        ));
    }
    if !gamma.is_isomorphism()? {
        return Err(domain("gamma is degenerate"));
    }
    let gd = gamma.dual();
    if !gd
        .compose(&gamma.inverse()?)?
        .compose(&gd)?
        .is_alternating()
    {
        return Err(domain("gamma* gamma^-1 gamma* is not alternating"));
    }
    let x = x_of(gamma)?;
    let xp = x.add(&GroupHom::identity(a))?;
    let form = Form { group: a, gamma, q };

    let elements: Vec<GroupElem> = a.elements().collect();
    let kernel: Vec<GroupElem> = elements
        .iter()
        .filter(|v| xp.apply(v) == a.identity())
        .cloned()
        .collect();
    let image: Vec<GroupElem> = elements
        .iter()
        .map(|v| xp.apply(v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if (kernel.len() as u64) * (image.len() as u64) != a.order()
        || kernel
            .iter()
            .filter(|v| image.binary_search(v).is_ok())
            .count()
            != 1
    {
        return Err(consistency("Ker(x+I) and Im(x+I) do not split A"));
    }

    let mut blocks = peel_skew(&form, kernel)?;
    blocks.extend(peel_special(&form, &x, image)?);
    blocks.sort_by_key(|b| (b.prime, b.exponent, b.tag));

    // Place the blocks on the cyclic factors of A, in order.
    let mut columns: Vec<GroupElem> = Vec::with_capacity(a.rank());
    for blk in &blocks {
        let pos = columns.len();
        for k in 0..2 {
            if a.cyclics().get(pos + k).map(|c| c.exponent) != Some(blk.exponent) {
                return Err(consistency("block exponents do not match the factors of A"));
            }
        }
        columns.extend(blk.basis.iter().cloned());
    }
    if columns.len() != a.rank() {
        return Err(consistency("blocks do not exhaust A"));
    }
    let psi = GroupHom::from_fn(a, a, |i, j| columns[j].0[i] as i64)?;
    if !psi.is_isomorphism()? {
        return Err(consistency("adapted basis is not a basis"));
    }
    let canonical = block_diagonal(a, blocks.iter().map(|b| b.tag))?;
    if psi.dual().compose(gamma)?.compose(&psi)? != canonical {
        return Err(consistency(
            "transported gamma differs from the block-diagonal form",
        ));
    }
    for (i, bi) in blocks.iter().enumerate() {
        for bj in &blocks[i + 1..] {
            for u in &bi.basis {
                for v in &bj.basis {
                    if form.b(u, v) != 0 || form.b(v, u) != 0 {
                        return Err(consistency("blocks are not mutually orthogonal"));
                    }
                }
            }
        }
    }
    Ok(Decomposition {
        blocks,
        change_of_basis: psi,
        canonical,
    })
}

fn max_log_order(form: &Form<'_>, s: &[GroupElem]) -> u32 {
    s.iter().map(|v| form.log_order(v)).max().unwrap_or(0)
}

fn peel_skew(form: &Form<'_>, mut s: Vec<GroupElem>) -> Result<Vec<FormBlock>> {
    let a = form.group;
    let mut out = Vec::new();
    while s.len() > 1 {
        let n = max_log_order(form, &s);
        let qn = form.q.pow(n);
        let g = s
            .iter()
            .find(|v| form.log_order(v) == n)
            .expect("nonempty")
            .clone();
        let h = s
            .iter()
            .find(|v| form.value_log_order(form.b(&g, v)) == n)
            .ok_or_else(|| consistency("skew part is degenerate"))?
            .clone();
        let u = form.numerator(form.b(&g, &h), n);
        let u_inv = inv_mod(u, qn).ok_or_else(|| consistency("pairing numerator is not a unit"))?;
        // b(f0, f1) = -1/q^n, hence b(f1, f0) = 1/q^n.
        let f1 = a.scale(-(u_inv as i64), &h);
        let basis = [g, f1];
        let before = s.len() as u64;
        s = form.orthogonal_complement(&s, &basis);
        if (s.len() as u64) * qn * qn != before {
            return Err(consistency("orthogonal complement has the wrong size"));
        }
        out.push(FormBlock {
            prime: form.q,
            exponent: n,
            tag: FormBlockTag::Skew,
            basis,
        });
    }
    Ok(out)
}

fn peel_special(form: &Form<'_>, x: &GroupHom, mut s: Vec<GroupElem>) -> Result<Vec<FormBlock>> {
    let a = form.group;
    let mut out = Vec::new();
    while s.len() > 1 {
        let n = max_log_order(form, &s);
        let qn = form.q.pow(n);
        let g = s
            .iter()
            .find(|v| form.log_order(v) == n && form.value_log_order(form.b(v, v)) == n)
            .ok_or_else(|| consistency("special part has no anisotropic generator"))?
            .clone();
        // In the basis (xg, g) the form is d·[[1, 0], [1, 1]].
        let d = form.numerator(form.b(&g, &g), n);
        let d_inv =
            inv_mod(d, qn).ok_or_else(|| consistency("b(g, g) is not a unit multiple of 1/q^n"))?;
        let (y, t) = hensel_lift_quadratic(1, d_inv as i64, form.q, n)?;
        let (y, t) = (y as i64, t as i64);
        let xg = x.apply(&g);
        let f0 = a.sub(&a.scale(y + t, &xg), &a.scale(y, &g));
        let f1 = a.add(&a.scale(y, &xg), &a.scale(t, &g));
        let unit = a.exponent() / qn;
        if form.b(&f0, &f0) != unit
            || form.b(&f1, &f1) != unit
            || form.b(&f0, &f1) != unit
            || form.b(&f1, &f0) != 0
        {
            return Err(consistency("special block did not normalise"));
        }
        let basis = [f0, f1];
        let before = s.len() as u64;
        s = form.orthogonal_complement(&s, &basis);
        if (s.len() as u64) * qn * qn != before {
            return Err(consistency("orthogonal complement has the wrong size"));
        }
        out.push(FormBlock {
            prime: form.q,
            exponent: n,
            tag: FormBlockTag::Special(1),
            basis,
        });
    }
    Ok(out)
}

/// Block-diagonal `γ` on `A` from a sequence of tags, consecutive pairs of
/// cyclic factors forming each block.
pub(crate) fn block_diagonal(
    a: &FinAbGroup,
    tags: impl IntoIterator<Item = FormBlockTag>,
) -> Result<GroupHom> {
    let mut entries = vec![vec![0i64; a.rank()]; a.rank()];
    let mut pos = 0;
    for tag in tags {
        if pos + 1 >= a.rank() || a.cyclics()[pos] != a.cyclics()[pos + 1] {
            return Err(domain("blocks need two equal cyclic factors"));
        }
        let blk: [[i64; 2]; 2] = match tag {
            FormBlockTag::Skew => [[0, 1], [-1, 0]],
            FormBlockTag::Special(a) => [[1, a as i64 - 1], [1, 1]],
        };
        for i in 0..2 {
            for j in 0..2 {
                entries[pos + i][pos + j] = blk[i][j];
            }
        }
        pos += 2;
    }
    if pos != a.rank() {
        return Err(domain("blocks do not cover the group"));
    }
    GroupHom::from_signed(a.clone(), a.clone(), entries)
}
