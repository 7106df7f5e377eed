use serde::Serialize;

use super::fq2::{Fq2Elem, FqSquared};
use crate::error::{consistency, domain, Error, Result};
use crate::finab::arith::is_prime;
use crate::finab::{FinAbGroup, GroupElem, GroupHom};
use crate::oracle::{enumerate_lagrangians, Caps, Lagrangian};
use crate::orthogroup::OrthElem;

/// An unordered pair `{ζ^e1, ζ^e2}` of `p`-th roots of unity, stored by
/// exponents relative to a fixed primitive root `ζ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RootPair {
    pub p: u64,
    pub exponents: [u64; 2],
}

impl RootPair {
    pub fn new(p: u64, e1: i64, e2: i64) -> Self {
        let (a, b) = (
            e1.rem_euclid(p as i64) as u64,
            e2.rem_euclid(p as i64) as u64,
        );
        RootPair {
            p,
            exponents: [a.min(b), a.max(b)],
        }
    }

    /// `ζ1 = ζ2` or `ζ1ζ2 = 1`.
    pub fn is_pointed(&self) -> bool {
        let [a, b] = self.exponents;
        a == b || (a + b) % self.p == 0
    }

    /// Exponent of `λ = ζ1ζ2`.
    pub fn lambda_exponent(&self) -> u64 {
        (self.exponents[0] + self.exponents[1]) % self.p
    }

    /// `{ζ1^g, ζ2^g}`.
    pub fn power(&self, g: i64) -> Self {
        RootPair::new(
            self.p,
            self.exponents[0] as i64 * g,
            self.exponents[1] as i64 * g,
        )
    }

    pub fn inverse(&self) -> Self {
        self.power(-1)
    }

    /// `λ ∈ F_q` decided from exponents alone: `λ^(q-1) = 1`.
    pub fn lambda_in_base_field(&self, q: u64) -> bool {
        (self.lambda_exponent() as u128 * (q as u128 - 1)).is_multiple_of(self.p as u128)
    }

    /// All pairs with `ζ1 ≠ ζ2`, `ζ1ζ2 ≠ 1`, in increasing order.
    pub fn admissible(p: u64) -> Vec<RootPair> {
        (0..p)
            .flat_map(|a| {
                (a + 1..p).map(move |b| RootPair {
                    p,
                    exponents: [a, b],
                })
            })
            .filter(|r| !r.is_pointed())
            .collect()
    }
}

/// The concrete roots and derived quantities of a pair inside `F_{q²}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootPairValues {
    pub zeta: [Fq2Elem; 2],
    pub a: Fq2Elem,
    pub lambda: Fq2Elem,
}

pub fn root_pair_values(field: &FqSquared, pair: &RootPair) -> Result<RootPairValues> {
    let z = field.primitive_root_of_unity(pair.p).ok_or_else(|| {
        domain(format!(
            "{} does not divide q^2 - 1 for q = {}",
            pair.p,
            field.q()
        ))
    })?;
    let zeta = pair.exponents.map(|e| field.pow(z, e));
    Ok(RootPairValues {
        zeta,
        a: field.add(zeta[0], zeta[1]),
        lambda: field.mul(zeta[0], zeta[1]),
    })
}

fn check_pq(p: u64, q: u64) -> Result<()> {
    if !is_prime(p) || !is_prime(q) || p == 2 {
        return Err(domain(format!(
            "need an odd prime p and a prime q, got p = {p}, q = {q}"
        )));
    }
    if p == q {
        return Err(domain("p and q must differ"));
    }
    if !(q * q - 1).is_multiple_of(p) {
        return Err(domain(format!("{p} does not divide q^2 - 1 for q = {q}")));
    }
    Ok(())
}

/// The census matrix `[[α, β], [γ, 0]]` on `(Z/q)² ⊕ (Z/q)²*` for an
/// admissible root pair, with
///
/// ```text
/// α = [[a/(λ+1), -a/(λ+1)], [a/(λ+1), a(λ²+λ+1)/(λ²+λ)]]
/// β = [[-λ/(λ+1)², -λ/(λ+1)²], [(λ²+λ+1)/(λ+1)², -λ/(λ+1)²]]
/// γ = [[-1, -(λ²+λ+1)/λ], [1, -1]]
/// ```
///
/// Every entry is computed in `F_{q²}` and must land in `F_q`.
pub fn build_m(p: u64, q: u64, pair: &RootPair) -> Result<OrthElem> {
    check_pq(p, q)?;
    if pair.p != p {
        return Err(domain("root pair belongs to a different p"));
    }
    if pair.exponents[0] == pair.exponents[1] {
        return Err(domain("roots must be distinct"));
    }
    if pair.is_pointed() {
        return Err(domain("zeta1 * zeta2 = 1 is the pointed stratum"));
    }
    let f = FqSquared::new(q)?;
    let RootPairValues { a, lambda: l, .. } = root_pair_values(&f, pair)?;
    let one = f.one();
    let l1 = f.add(l, one);
    if l1 == f.zero() {
        return Err(Error::Singularity(format!(
            "lambda = -1 for pair {:?} at q = {q}",
            pair.exponents
        )));
    }
    let l2 = f.mul(l1, l1);
    let tri = f.add(f.mul(l, l), l1);
    let div = |x: Fq2Elem, y: Fq2Elem| f.div(x, y).expect("denominators are nonzero");
    let neg = |x| f.neg(x);

    let a_l1 = div(a, l1);
    let alpha = [[a_l1, neg(a_l1)], [a_l1, div(f.mul(a, tri), f.mul(l, l1))]];
    let b = neg(div(l, l2));
    let beta = [[b, b], [div(tri, l2), b]];
    let gamma = [[neg(one), neg(div(tri, l))], [one, neg(one)]];

    let grp = FinAbGroup::homogeneous(q, 1, 2)?;
    let to_hom = |m: [[Fq2Elem; 2]; 2]| -> Result<GroupHom> {
        if m.iter().flatten().any(|x| !x.is_in_base_field()) {
            return Err(consistency(format!(
                "census matrix entry outside F_{q} for pair {:?}",
                pair.exponents
            )));
        }
        GroupHom::new(
            grp.clone(),
            grp.clone(),
            m.iter().map(|r| r.iter().map(|x| x.u0).collect()).collect(),
        )
    };
    let m = OrthElem::new(
        to_hom(alpha)?,
        to_hom(beta)?,
        to_hom(gamma)?,
        GroupHom::zero(&grp, &grp),
    )?;
    if !m.is_orthogonal() {
        return Err(consistency("census matrix is not orthogonal"));
    }
    Ok(m)
}

/// First Lagrangian in `candidates` that `m` maps to itself.
pub fn invariant_lagrangian<'a>(
    m: &OrthElem,
    candidates: &'a [Lagrangian],
) -> Option<&'a Lagrangian> {
    candidates.iter().find(|l| l.is_invariant(m))
}

/// Exhaustive search for an `m`-invariant Lagrangian; the first one found
/// is returned as a certificate of group-theoreticity.
pub fn is_group_theoretical(m: &OrthElem, caps: &Caps) -> Result<Option<Lagrangian>> {
    let all = enumerate_lagrangians(m.group(), caps)?;
    Ok(invariant_lagrangian(m, &all).cloned())
}

/// Dimension of the projection of a Lagrangian to `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionCase {
    Dim0,
    Dim1,
    Dim2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseAnalysis {
    pub case: ProjectionCase,
    pub invariant: bool,
    /// For an invariant `L` with one-dimensional projection: the basis
    /// `v, w` (with `w` in `A*`) and `M·v = c0·v + c1·w`, `M·w = d0·v + d1·w`.
    pub basis: Option<[(GroupElem, GroupElem); 2]>,
    pub mv: Option<[u64; 2]>,
    pub mw: Option<[u64; 2]>,
}

/// Sort a Lagrangian of `(Z/q)² ⊕ (Z/q)²*` by the dimension of its
/// projection to `A` and decide invariance under `m`.
pub fn lagrangian_case_analysis(m: &OrthElem, l: &Lagrangian) -> Result<CaseAnalysis> {
    let a = m.group();
    let q = match a.single_prime() {
        Some(q) if *a == FinAbGroup::homogeneous(q, 1, 2)? => q,
        _ => return Err(domain("case analysis needs A = (Z/q)^2")),
    };
    if l.group() != a {
        return Err(domain("Lagrangian lives over a different group"));
    }
    let case = match l.projection_size() as u64 {
        1 => ProjectionCase::Dim0,
        s if s == q => ProjectionCase::Dim1,
        _ => ProjectionCase::Dim2,
    };
    let invariant = l.is_invariant(m);
    let mut out = CaseAnalysis {
        case,
        invariant,
        basis: None,
        mv: None,
        mw: None,
    };
    if case != ProjectionCase::Dim1 || !invariant {
        return Ok(out);
    }

    let leading_one = |x: &GroupElem| x.0.iter().find(|&&c| c != 0) == Some(&1);
    let trailing_one = |x: &GroupElem| x.0.iter().rev().find(|&&c| c != 0) == Some(&1);
    let elems = l.elements();
    let v = elems
        .iter()
        .find(|(x, _)| leading_one(x))
        .cloned()
        .expect("projection is a line");
    let w = elems
        .iter()
        .find(|(x, f)| *x == a.identity() && trailing_one(f))
        .cloned()
        .expect("kernel of the projection is a line");
    let coords = |target: &(GroupElem, GroupElem)| -> Result<[u64; 2]> {
        for c0 in 0..q {
            for c1 in 0..q {
                let x = a.add(&a.scale(c0 as i64, &v.0), &a.scale(c1 as i64, &w.0));
                let f = a.add(&a.scale(c0 as i64, &v.1), &a.scale(c1 as i64, &w.1));
                if (x, f) == *target {
                    return Ok([c0, c1]);
                }
            }
        }
        Err(consistency("image of a basis vector left the Lagrangian"))
    };
    out.mv = Some(coords(&m.apply(&v.0, &v.1))?);
    out.mw = Some(coords(&m.apply(&w.0, &w.1))?);
    out.basis = Some([v, w]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finab::arith::{inv_mod, reduce_i64};

    #[test]
    fn admissible_pairs() {
        assert_eq!(
            RootPair::admissible(3),
            vec![RootPair::new(3, 0, 1), RootPair::new(3, 0, 2)]
        );
        assert_eq!(RootPair::admissible(5).len(), 8);
        assert_eq!(RootPair::new(5, 4, -1), RootPair::new(5, 4, 4));
        assert_eq!(RootPair::new(5, 1, 2).inverse(), RootPair::new(5, 3, 4));
    }

    #[test]
    fn census_matrices_are_orthogonal_of_order_p() {
        for (p, q) in [
            (3, 2),
            (3, 5),
            (3, 7),
            (5, 11),
            (5, 19),
            (7, 13),
            (3, 11),
            (5, 29),
        ] {
            for pair in RootPair::admissible(p) {
                let m = build_m(p, q, &pair).unwrap();
                assert!(m.is_orthogonal());
                assert!(m.beta().is_isomorphism().unwrap());
                assert!(m.delta().is_zero());
                assert_eq!(
                    m.pow(p).unwrap(),
                    OrthElem::identity(m.group()),
                    "({p},{q}) {pair:?}"
                );
                assert_ne!(m, OrthElem::identity(m.group()));
            }
        }
    }

    #[test]
    fn build_m_rejections() {
        let id = RootPair::new(3, 1, 1);
        assert!(matches!(build_m(3, 7, &id), Err(Error::Domain(_))));
        assert!(matches!(
            build_m(3, 7, &RootPair::new(3, 1, 2)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            build_m(5, 2, &RootPair::new(5, 0, 1)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            build_m(3, 3, &RootPair::new(3, 0, 1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exponent_and_field_tests_agree_on_lambda() {
        for (p, q) in [(3, 2), (3, 7), (5, 19), (5, 11), (7, 13), (3, 5)] {
            let f = FqSquared::new(q).unwrap();
            for pair in RootPair::admissible(p) {
                let v = root_pair_values(&f, &pair).unwrap();
                assert_eq!(v.lambda.is_in_base_field(), pair.lambda_in_base_field(q));
                // a itself need not be rational, but λ + λ⁻¹ and a/(λ+1) are.
                let l_inv = f.inv(v.lambda).unwrap();
                assert!(f.add(v.lambda, l_inv).is_in_base_field());
                assert!(f
                    .div(v.a, f.add(v.lambda, f.one()))
                    .unwrap()
                    .is_in_base_field());
                assert_eq!(v.a.is_in_base_field(), (q - 1) % p == 0);
            }
        }
    }

    #[test]
    fn identity_fixes_dual_lagrangian() {
        let a = FinAbGroup::homogeneous(2, 1, 2).unwrap();
        let cert = is_group_theoretical(&OrthElem::identity(&a), &Caps::default()).unwrap();
        assert!(cert.is_some());
        let dual = Lagrangian::from_elements(&a, a.elements().map(|x| (a.identity(), x)));
        let ca = lagrangian_case_analysis(&OrthElem::identity(&a), &dual).unwrap();
        assert_eq!(ca.case, ProjectionCase::Dim0);
        assert!(ca.invariant);
    }

    #[test]
    fn non_split_lambda_is_not_group_theoretical() {
        let pair = RootPair::new(3, 0, 1);
        let m = build_m(3, 2, &pair).unwrap();
        assert!(!pair.lambda_in_base_field(2));
        assert!(is_group_theoretical(&m, &Caps::default())
            .unwrap()
            .is_none());
        let a = m.group().clone();
        for l in enumerate_lagrangians(&a, &Caps::default()).unwrap() {
            let ca = lagrangian_case_analysis(&m, &l).unwrap();
            assert!(!ca.invariant);
        }
    }

    #[test]
    fn split_lambda_has_case_two_certificate() {
        // {1, ζ} at (3, 7): λ = ζ lies in F_7.
        let (p, q) = (3, 7);
        let pair = RootPair::new(p, 0, 1);
        let f = FqSquared::new(q).unwrap();
        let vals = root_pair_values(&f, &pair).unwrap();
        let (a, l) = (vals.a.u0, vals.lambda.u0);
        let m = build_m(p, q, &pair).unwrap();
        let grp = m.group().clone();
        let e = |x: i64, y: i64| GroupElem(vec![reduce_i64(x, q), reduce_i64(y, q)]);
        let v = (e(1, -(l as i64)), e(0, 0));
        let w = (e(0, 0), e(l as i64, 1));
        let span: Vec<_> = (0..q as i64)
            .flat_map(|s| (0..q as i64).map(move |t| (s, t)))
            .map(|(s, t)| {
                (
                    grp.add(&grp.scale(s, &v.0), &grp.scale(t, &w.0)),
                    grp.add(&grp.scale(s, &v.1), &grp.scale(t, &w.1)),
                )
            })
            .collect();
        let lag = Lagrangian::from_elements(&grp, span);
        assert!(lag.verify());
        let ca = lagrangian_case_analysis(&m, &lag).unwrap();
        assert_eq!(ca.case, ProjectionCase::Dim1);
        assert!(ca.invariant);
        assert_eq!(ca.basis.as_ref().unwrap()[0], v);
        assert_eq!(ca.basis.as_ref().unwrap()[1], w);
        // M·v = a·v + (λ+1)·w.
        assert_eq!(ca.mv, Some([a, (l + 1) % q]));
        // M·w = -(λ/(λ+1))·v.
        let coeff = reduce_i64(-((l * inv_mod(l + 1, q).unwrap()) as i64), q);
        assert_eq!(ca.mw, Some([coeff, 0]));
        assert!(is_group_theoretical(&m, &Caps::default())
            .unwrap()
            .is_some());
    }
}
