//! The split orthogonal group `O(A ⊕ A*)` of the hyperbolic form
//! `q(a ⊕ f) = ⟨f, a⟩`, with elements written as block matrices
//! `[[α, β], [γ, δ]]` acting on columns `(a, f)`.

use serde::{Deserialize, Serialize};

use crate::error::{consistency, domain, Error, Result};
use crate::finab::{FinAbGroup, GroupElem, GroupHom};

/// Groups with `|A|² ≤` this are also checked by exhaustive evaluation.
pub const EXHAUSTIVE_MEMBERSHIP_LIMIT: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawOrth", into = "RawOrth")]
pub struct OrthElem {
    group: FinAbGroup,
    alpha: GroupHom,
    beta: GroupHom,
    gamma: GroupHom,
    delta: GroupHom,
}

#[derive(Serialize, Deserialize)]
struct RawOrth {
    group: FinAbGroup,
    alpha: Vec<Vec<i64>>,
    beta: Vec<Vec<i64>>,
    gamma: Vec<Vec<i64>>,
    delta: Vec<Vec<i64>>,
}

impl From<OrthElem> for RawOrth {
    fn from(m: OrthElem) -> Self {
        let conv = |h: &GroupHom| {
            h.entries()
                .iter()
                .map(|r| r.iter().map(|&x| x as i64).collect())
                .collect()
        };
        RawOrth {
            alpha: conv(&m.alpha),
            beta: conv(&m.beta),
            gamma: conv(&m.gamma),
            delta: conv(&m.delta),
            group: m.group,
        }
    }
}

impl TryFrom<RawOrth> for OrthElem {
    type Error = Error;
    fn try_from(raw: RawOrth) -> Result<Self> {
        let g = &raw.group;
        let mk = |e: Vec<Vec<i64>>| GroupHom::from_signed(g.clone(), g.clone(), e);
        OrthElem::new(
            mk(raw.alpha)?,
            mk(raw.beta)?,
            mk(raw.gamma)?,
            mk(raw.delta)?,
        )
    }
}

/// An equivalence move on extension data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivMove {
    /// Change of basis of `A` by an automorphism `ψ`; conjugates by
    /// `diag(ψ, ψ*⁻¹)`.
    BasisChange(GroupHom),
    /// Conjugation by `[[I, 0], [φ, I]]` with `φ` alternating.
    LowerUnipotent(GroupHom),
}

impl EquivMove {
    pub fn apply(&self, m: &OrthElem) -> Result<OrthElem> {
        match self {
            EquivMove::BasisChange(psi) => {
                let nu = OrthElem::basis_change(psi)?;
                nu.inverse()?.mul(m)?.mul(&nu)
            }
            EquivMove::LowerUnipotent(phi) => {
                let c = OrthElem::lower_unipotent(phi)?;
                c.mul(m)?.mul(&c.inverse()?)
            }
        }
    }
}

impl OrthElem {
    /// Assemble from blocks; all four must be endomorphisms of the same `A`
    /// (with `A*` written in the coordinates of `A`).
    pub fn new(alpha: GroupHom, beta: GroupHom, gamma: GroupHom, delta: GroupHom) -> Result<Self> {
        let group = alpha.source().clone();
        for h in [&alpha, &beta, &gamma, &delta] {
            if h.source() != &group || h.target() != &group {
                return Err(domain(
                    "orthogonal blocks must all be maps over the same group",
                ));
            }
        }
        Ok(OrthElem {
            group,
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    pub fn identity(a: &FinAbGroup) -> Self {
        let (i, z) = (GroupHom::identity(a), GroupHom::zero(a, a));
        OrthElem {
            group: a.clone(),
            alpha: i.clone(),
            beta: z.clone(),
            gamma: z,
            delta: i,
        }
    }

    /// `diag(ψ, ψ*⁻¹)` for an automorphism `ψ`.
    pub fn basis_change(psi: &GroupHom) -> Result<Self> {
        let a = psi.source().clone();
        let z = GroupHom::zero(&a, &a);
        let dual_inv = psi.dual().inverse()?;
        OrthElem::new(psi.clone(), z.clone(), z, dual_inv)
    }

    /// `[[I, 0], [φ, I]]`; orthogonal iff `φ` is alternating.
    pub fn lower_unipotent(phi: &GroupHom) -> Result<Self> {
        let a = phi.source().clone();
        let i = GroupHom::identity(&a);
        OrthElem::new(i.clone(), GroupHom::zero(&a, &a), phi.clone(), i)
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn alpha(&self) -> &GroupHom {
        &self.alpha
    }

    pub fn beta(&self) -> &GroupHom {
        &self.beta
    }

    pub fn gamma(&self) -> &GroupHom {
        &self.gamma
    }

    pub fn delta(&self) -> &GroupHom {
        &self.delta
    }

    /// The hyperbolic form `q(a ⊕ f) = ⟨f, a⟩`, as a residue mod `exp(A)`.
    pub fn form(a_grp: &FinAbGroup, a: &GroupElem, f: &GroupElem) -> u64 {
        a_grp.pair(f, a)
    }

    pub fn apply(&self, a: &GroupElem, f: &GroupElem) -> (GroupElem, GroupElem) {
        let g = &self.group;
        (
            g.add(&self.alpha.apply(a), &self.beta.apply(f)),
            g.add(&self.gamma.apply(a), &self.delta.apply(f)),
        )
    }

    /// The three identities obtained by polarising `q(Mv) = q(v)`:
    /// `α*γ` and `β*δ` alternating, `β*γ + δ*α = I`.
    pub fn preserves_form_algebraic(&self) -> bool {
        let ag = self.alpha.dual().compose(&self.gamma).expect("same group");
        let bd = self.beta.dual().compose(&self.delta).expect("same group");
        let cross = self
            .beta
            .dual()
            .compose(&self.gamma)
            .and_then(|x| x.add(&self.delta.dual().compose(&self.alpha)?))
            .expect("same group");
        ag.is_alternating() && bd.is_alternating() && cross == GroupHom::identity(&self.group)
    }

    /// `q(Mv) = q(v)` for every `v ∈ A ⊕ A*`, by enumeration.
    pub fn preserves_form_exhaustive(&self) -> bool {
        let g = &self.group;
        let els: Vec<GroupElem> = g.elements().collect();
        els.iter().all(|a| {
            els.iter().all(|f| {
                let (a2, f2) = self.apply(a, f);
                g.pair(&f2, &a2) == g.pair(f, a)
            })
        })
    }

    /// Membership in `O(A ⊕ A*)`: form-preserving and invertible. Small groups
    /// are additionally checked by enumeration.
    pub fn is_orthogonal(&self) -> bool {
        let algebraic = self.preserves_form_algebraic();
        let n = self.group.order();
        if n.saturating_mul(n) <= EXHAUSTIVE_MEMBERSHIP_LIMIT {
            debug_assert_eq!(
                algebraic,
                self.preserves_form_exhaustive(),
                "membership paths disagree"
            );
        }
        algebraic && self.to_hom().is_isomorphism().unwrap_or(false)
    }

    /// The block matrix as a single endomorphism of `A ⊕ A`.
    pub fn to_hom(&self) -> GroupHom {
        GroupHom::from_blocks(&self.alpha, &self.beta, &self.gamma, &self.delta)
            .expect("blocks share a group")
    }

    pub fn mul(&self, other: &OrthElem) -> Result<OrthElem> {
        if self.group != other.group {
            return Err(domain(
                "product of orthogonal elements over different groups",
            ));
        }
        let c = |x: &GroupHom, y: &GroupHom| x.compose(y);
        let alpha = c(&self.alpha, &other.alpha)?.add(&c(&self.beta, &other.gamma)?)?;
        let beta = c(&self.alpha, &other.beta)?.add(&c(&self.beta, &other.delta)?)?;
        let gamma = c(&self.gamma, &other.alpha)?.add(&c(&self.delta, &other.gamma)?)?;
        let delta = c(&self.gamma, &other.beta)?.add(&c(&self.delta, &other.delta)?)?;
        OrthElem::new(alpha, beta, gamma, delta)
    }

    pub fn pow(&self, mut k: u64) -> Result<OrthElem> {
        let mut acc = OrthElem::identity(&self.group);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Inverse of an orthogonal element: `[[δ*, β*], [γ*, α*]]`.
    pub fn inverse(&self) -> Result<OrthElem> {
        let inv = OrthElem::new(
            self.delta.dual(),
            self.beta.dual(),
            self.gamma.dual(),
            self.alpha.dual(),
        )?;
        if inv.mul(self)? != OrthElem::identity(&self.group) {
            return Err(domain(
                "element is not orthogonal, adjoint inverse does not apply",
            ));
        }
        Ok(inv)
    }

    /// Conjugate by the unique `[[I, 0], [φ, I]]` that kills the `δ` block.
    /// Requires `β` invertible; `φ = -δβ⁻¹`.
    pub fn normalize_delta_zero(&self) -> Result<(OrthElem, EquivMove)> {
        if !self.beta.is_isomorphism()? {
            return Err(Error::NormalForm("beta block is not invertible".into()));
        }
        let phi = self.delta.compose(&self.beta.inverse()?)?.neg();
        if !phi.is_alternating() {
            return Err(consistency(
                "normalising map is not alternating; input is not orthogonal",
            ));
        }
        let mv = EquivMove::LowerUnipotent(phi);
        let out = mv.apply(self)?;
        if !out.delta.is_zero() || out.beta != self.beta {
            return Err(consistency("delta block survived normalisation"));
        }
        Ok((out, mv))
    }
}

/// `(α, γ) ↦ (ψ⁻¹αψ, ψ*γψ)`.
pub fn act_basis_change(
    psi: &GroupHom,
    alpha: &GroupHom,
    gamma: &GroupHom,
) -> Result<(GroupHom, GroupHom)> {
    let inv = psi.inverse()?;
    let a2 = inv.compose(alpha)?.compose(psi)?;
    let g2 = psi.dual().compose(gamma)?.compose(psi)?;
    Ok((a2, g2))
}

/// `x = γ⁻¹γ*`. When `γ*γ⁻¹γ*` is alternating this satisfies `x³ = -I`,
/// which is checked.
pub fn x_of(gamma: &GroupHom) -> Result<GroupHom> {
    let inv = gamma.inverse()?;
    let gd = gamma.dual();
    let x = inv.compose(&gd)?;
    if gd.compose(&x)?.is_alternating() {
        let a = gamma.source();
        if x.pow(3)? != GroupHom::scalar(a, -1) {
            return Err(consistency(
                "x^3 != -I although gamma* gamma^-1 gamma* is alternating",
            ));
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FinAbGroup {
        FinAbGroup::parse(s).unwrap()
    }

    fn hom(a: &FinAbGroup, e: Vec<Vec<i64>>) -> GroupHom {
        GroupHom::from_signed(a.clone(), a.clone(), e).unwrap()
    }

    fn swap(a: &FinAbGroup) -> OrthElem {
        let (i, z) = (GroupHom::identity(a), GroupHom::zero(a, a));
        OrthElem::new(z.clone(), i.clone(), i, z).unwrap()
    }

    #[test]
    fn swap_and_identity_are_orthogonal() {
        for s in ["2^1:1", "3^1:1", "2^1:2", "2^2:1+3^1:1"] {
            let a = g(s);
            assert!(OrthElem::identity(&a).is_orthogonal());
            let w = swap(&a);
            assert!(w.is_orthogonal());
            assert!(w.preserves_form_exhaustive());
            assert_eq!(w.pow(2).unwrap(), OrthElem::identity(&a));
            assert_eq!(w.inverse().unwrap(), w);
        }
    }

    #[test]
    fn non_member_detected() {
        let a = g("3^1:1");
        let z = GroupHom::zero(&a, &a);
        // a -> 2a on A and f -> f on A* scales the form by 2.
        let m = OrthElem::new(
            GroupHom::scalar(&a, 2),
            z.clone(),
            z,
            GroupHom::identity(&a),
        )
        .unwrap();
        assert!(!m.preserves_form_algebraic());
        assert!(!m.preserves_form_exhaustive());
        assert!(!m.is_orthogonal());
        assert!(m.inverse().is_err());
    }

    #[test]
    fn normalize_kills_delta_and_keeps_beta() {
        let a = g("5^1:2");
        let gamma = hom(&a, vec![vec![1, 0], vec![1, 1]]);
        let beta = gamma.dual().inverse().unwrap();
        let x = x_of(&gamma).unwrap();
        let m = OrthElem::new(x, beta, gamma, GroupHom::zero(&a, &a)).unwrap();
        assert!(m.is_orthogonal());
        // Move away from delta = 0 with an alternating phi, then come back.
        let phi = hom(&a, vec![vec![0, 2], vec![-2, 0]]);
        let moved = EquivMove::LowerUnipotent(phi.clone()).apply(&m).unwrap();
        assert!(!moved.delta().is_zero());
        assert!(moved.is_orthogonal());
        let (back, mv) = moved.normalize_delta_zero().unwrap();
        assert_eq!(back, m);
        assert_eq!(mv, EquivMove::LowerUnipotent(phi.neg()));
        // Idempotent.
        let (again, _) = back.normalize_delta_zero().unwrap();
        assert_eq!(again, back);
    }

    #[test]
    fn normalize_requires_invertible_beta() {
        let a = g("2^1:1");
        assert!(matches!(
            OrthElem::identity(&a).normalize_delta_zero(),
            Err(Error::NormalForm(_))
        ));
    }

    #[test]
    fn x_of_examples() {
        let a = g("5^1:2");
        let sym = hom(&a, vec![vec![1, 2], vec![2, 3]]);
        assert_eq!(x_of(&sym).unwrap(), GroupHom::identity(&a));
        let skew = hom(&a, vec![vec![0, 1], vec![-1, 0]]);
        assert_eq!(x_of(&skew).unwrap(), GroupHom::scalar(&a, -1));
        let a2 = g("2^1:2");
        let special = hom(&a2, vec![vec![1, 0], vec![1, 1]]);
        // gamma^-1 = [[1,0],[1,1]], gamma* = [[1,1],[0,1]].
        assert_eq!(
            x_of(&special).unwrap(),
            hom(&a2, vec![vec![1, 1], vec![1, 0]])
        );
        assert!(x_of(&GroupHom::zero(&a2, &a2)).is_err());
    }

    #[test]
    fn basis_change_examples() {
        let a = g("5^1:2");
        let alpha = hom(&a, vec![vec![1, 2], vec![3, 4]]);
        let gamma = hom(&a, vec![vec![0, 1], vec![-1, 0]]);
        let id = GroupHom::identity(&a);
        assert_eq!(
            act_basis_change(&id, &alpha, &gamma).unwrap(),
            (alpha.clone(), gamma.clone())
        );
        let c = GroupHom::scalar(&a, 2);
        let (a2, g2) = act_basis_change(&c, &alpha, &gamma).unwrap();
        assert_eq!(a2, alpha);
        assert_eq!(g2, gamma.scale(4));
        assert!(act_basis_change(&GroupHom::zero(&a, &a), &alpha, &gamma).is_err());
    }

    #[test]
    fn basis_change_move_matches_pair_action() {
        let a = g("2^1:1+2^2:1");
        let psi = hom(&a, vec![vec![1, 1], vec![2, 3]]);
        let gamma = hom(&a, vec![vec![1, 1], vec![2, 1]]);
        let beta = gamma.dual().inverse().unwrap();
        let alpha = GroupHom::identity(&a);
        let m = OrthElem::new(alpha.clone(), beta, gamma.clone(), GroupHom::zero(&a, &a)).unwrap();
        let moved = EquivMove::BasisChange(psi.clone()).apply(&m).unwrap();
        let (a2, g2) = act_basis_change(&psi, &alpha, &gamma).unwrap();
        assert_eq!(moved.alpha(), &a2);
        assert_eq!(moved.gamma(), &g2);
        assert!(moved.delta().is_zero());
    }

    #[test]
    fn json_round_trip() {
        let a = g("2^1:2");
        let m = swap(&a);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            r#"{"group":"2^1:2","alpha":[[0,0],[0,0]],"beta":[[1,0],[0,1]],"gamma":[[1,0],[0,1]],"delta":[[0,0],[0,0]]}"#
        );
        let back: OrthElem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    /// Lemma: for (α, γ) with γ invertible and α*γ alternating, α commutes
    /// with x = γ⁻¹γ*. Exhaustive over 2×2 matrices for small moduli.
    #[test]
    fn alpha_commutes_with_x_exhaustively() {
        for (q, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let a = FinAbGroup::homogeneous(q, n, 2).unwrap();
            let homs: Vec<GroupHom> = GroupHom::all(&a, &a).collect();
            let mut witnesses = 0;
            for gamma in homs.iter().filter(|h| h.is_isomorphism().unwrap()) {
                let x = x_of(gamma).unwrap();
                for alpha in &homs {
                    if alpha.dual().compose(gamma).unwrap().is_alternating() {
                        witnesses += 1;
                        assert_eq!(alpha.compose(&x).unwrap(), x.compose(alpha).unwrap());
                    }
                }
            }
            assert!(witnesses > 0);
        }
    }
}
