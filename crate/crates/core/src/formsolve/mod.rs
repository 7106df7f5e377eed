//! Normal forms for non-degenerate maps `γ: A -> A*`.
//!
//! Two rank-2 building blocks occur over `C = Z/q^n`: the skew block
//! `[[0, 1], [-1, 0]]` and the special block `[[1, a-1], [1, 1]]`, whose
//! `x = γ⁻¹γ*` satisfies `x² = a·x - I`. A `q`-group with `q ≠ 3` and
//! `γ*γ⁻¹γ*` alternating splits into an orthogonal sum of such blocks.

mod classes;
mod decompose;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{consistency, domain, Error, Result};
use crate::finab::arith::{add_mod, inv_mod, is_prime, mul_mod, reduce_i64, sub_mod};
use crate::finab::{FinAbGroup, GroupHom};

pub use classes::{classify_gamma, enumerate_gamma_classes, ClassComponent, GammaClass};
pub use decompose::{decompose, Decomposition, DecompositionReport, FormBlock};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormBlockTag {
    Skew,
    /// `x² = a·x - I` on the block, `a` stored as a residue.
    Special(u64),
}

impl fmt::Display for FormBlockTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormBlockTag::Skew => f.write_str("skew"),
            FormBlockTag::Special(a) => write!(f, "special({a})"),
        }
    }
}

impl Serialize for FormBlockTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn check_prime(q: u64) -> Result<()> {
    if is_prime(q) {
        Ok(())
    } else {
        Err(domain(format!("{q} is not prime")))
    }
}

fn doubled(q: u64, n: u32) -> Result<FinAbGroup> {
    check_prime(q)?;
    if n == 0 {
        return Err(domain("exponent must be positive"));
    }
    FinAbGroup::homogeneous(q, n, 2)
}

/// The standard skew form `[[0, 1], [-1, 0]]` on `(Z/q^n)²`.
pub fn canonical_skew(q: u64, n: u32) -> Result<GroupHom> {
    let c = doubled(q, n)?;
    GroupHom::from_signed(c.clone(), c, vec![vec![0, 1], vec![-1, 0]])
}

/// The special form `[[1, a-1], [1, 1]]` on `(Z/q^n)²`, requiring
/// `q ∤ a² - 4`. Its `x = γ⁻¹γ*` is `[[a, 1], [-1, 0]]`.
pub fn solve_special_gamma(a: i64, q: u64, n: u32) -> Result<GroupHom> {
    let c = doubled(q, n)?;
    let disc = (a as i128) * (a as i128) - 4;
    if disc.rem_euclid(q as i128) == 0 {
        return Err(domain(format!("{q} divides a^2 - 4 for a = {a}")));
    }
    let gamma = GroupHom::from_signed(c.clone(), c, vec![vec![1, a - 1], vec![1, 1]])?;
    if !satisfies_special_relation(&gamma, a)? {
        return Err(consistency("special form fails its own relation"));
    }
    Ok(gamma)
}

/// `γ` invertible and `(γ⁻¹γ*)² = a·γ⁻¹γ* - I`.
pub fn satisfies_special_relation(gamma: &GroupHom, a: i64) -> Result<bool> {
    if !gamma.is_endomorphism() || !gamma.is_isomorphism()? {
        return Ok(false);
    }
    let x = gamma.inverse()?.compose(&gamma.dual())?;
    let rhs = x.scale(a).sub(&GroupHom::identity(gamma.source()))?;
    Ok(x.compose(&x)? == rhs)
}

/// Find `(y, t)` with `y² + a·y·t + t² ≡ target (mod q^n)`.
///
/// A solution with unit derivative `2y + at` is found by search modulo `q`
/// (modulo 8 when `q = 2`), then `y` is Newton-lifted with `t` fixed.
/// The search runs over `t` first, then `y`.
pub fn hensel_lift_quadratic(a: i64, target: i64, q: u64, n: u32) -> Result<(u64, u64)> {
    check_prime(q)?;
    if n == 0 {
        return Err(domain("exponent must be positive"));
    }
    let modulus = q.checked_pow(n).ok_or_else(|| domain("q^n overflows"))?;
    let f = |y: u64, t: u64, m: u64| {
        let (a, c) = (reduce_i64(a, m), reduce_i64(target, m));
        let v = add_mod(
            add_mod(mul_mod(y, y, m), mul_mod(mul_mod(a, y, m), t, m), m),
            mul_mod(t, t, m),
            m,
        );
        sub_mod(v, c, m)
    };
    let deriv =
        |y: u64, t: u64, m: u64| add_mod(mul_mod(2, y, m), mul_mod(reduce_i64(a, m), t, m), m);

    let base_exp = if q == 2 { n.min(3) } else { 1 };
    let m0 = q.pow(base_exp);
    let (mut y, t) = (0..m0)
        .flat_map(|t| (0..m0).map(move |y| (y, t)))
        .find(|&(y, t)| f(y, t, m0) == 0 && deriv(y, t, m0) % q != 0)
        .ok_or_else(|| Error::Solve(format!("no solution with unit derivative modulo {m0}")))?;

    let mut prec = base_exp;
    while prec < n {
        prec = (2 * prec).min(n);
        let m = q.pow(prec);
        let d_inv = inv_mod(deriv(y, t, m), m)
            .ok_or_else(|| consistency("derivative lost its unit status"))?;
        y = sub_mod(y, mul_mod(f(y, t, m), d_inv, m), m);
    }
    let (y, t) = (y % modulus, t % modulus);
    if f(y, t, modulus) != 0 {
        return Err(consistency("Hensel lift does not solve the congruence"));
    }
    Ok((y, t))
}

/// An automorphism `ψ` of `(Z/q^n)²` with `ψ*γψ = solve_special_gamma(a)`,
/// for any invertible `γ` satisfying the special relation with parameter `a`.
pub fn normalize_special(gamma: &GroupHom, a: i64) -> Result<GroupHom> {
    let c = gamma.source().clone();
    let (q, n) = match c.factors() {
        [f] if f.multiplicity == 2 => (f.prime, f.exponent),
        _ => return Err(domain("special normalisation needs a group (Z/q^n)^2")),
    };
    let target = solve_special_gamma(a, q, n)?;
    if !satisfies_special_relation(gamma, a)? {
        return Err(domain("map does not satisfy the special relation"));
    }
    let m = q.pow(n);
    let x = gamma.inverse()?.compose(&gamma.dual())?;
    // Basis (x·v, v) with v = (y, 1) turns x into its companion form.
    let (x00, x01, x10, x11) = (x.entry(0, 0), x.entry(0, 1), x.entry(1, 0), x.entry(1, 1));
    let psi1 = (0..q)
        .map(|y| {
            let c0 = add_mod(mul_mod(x00, y, m), x01, m);
            let c1 = add_mod(mul_mod(x10, y, m), x11, m);
            GroupHom::new(c.clone(), c.clone(), vec![vec![c0, y], vec![c1, 1]])
                .expect("valid entries")
        })
        .find(|p| p.is_isomorphism().unwrap_or(false))
        .ok_or_else(|| consistency("no cyclic vector for x"))?;
    let g1 = psi1.dual().compose(gamma)?.compose(&psi1)?;
    let d = g1.entry(0, 0);
    let d_inv = inv_mod(d, m).ok_or_else(|| consistency("normalised form has non-unit scale"))?;
    let (y, t) = hensel_lift_quadratic(a, d_inv as i64, q, n)?;
    let (y, t) = (y as i64, t as i64);
    let psi2 = GroupHom::from_signed(c.clone(), c, vec![vec![a * y + t, y], vec![-y, t]])?;
    let psi = psi1.compose(&psi2)?;
    if psi.dual().compose(gamma)?.compose(&psi)? != target {
        return Err(consistency(
            "special normalisation did not reach the canonical form",
        ));
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_skew_examples() {
        assert_eq!(
            canonical_skew(5, 1).unwrap().entries(),
            &[vec![0, 1], vec![4, 0]]
        );
        assert_eq!(
            canonical_skew(2, 2).unwrap().entries(),
            &[vec![0, 1], vec![3, 0]]
        );
        let s = canonical_skew(7, 2).unwrap();
        assert!(s.is_alternating() && s.is_isomorphism().unwrap());
    }

    #[test]
    fn special_gamma_examples() {
        let g2 = solve_special_gamma(1, 2, 1).unwrap();
        assert_eq!(g2.entries(), &[vec![1, 0], vec![1, 1]]);
        let g5 = solve_special_gamma(1, 5, 1).unwrap();
        assert!(satisfies_special_relation(&g5, 1).unwrap());
        // q = 3 is allowed when 3 does not divide a^2 - 4.
        assert!(solve_special_gamma(0, 3, 1).is_ok());
        assert!(matches!(
            solve_special_gamma(1, 3, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            solve_special_gamma(2, 7, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            solve_special_gamma(1, 4, 1),
            Err(Error::Domain(_))
        ));
        for (q, n, a) in [(2, 3, 1), (5, 2, 4), (7, 1, 3), (11, 1, -1)] {
            assert!(satisfies_special_relation(&solve_special_gamma(a, q, n).unwrap(), a).unwrap());
        }
    }

    #[test]
    fn hensel_examples() {
        assert_eq!(hensel_lift_quadratic(1, 1, 5, 1).unwrap(), (1, 0));
        let check = |a: i64, target: i64, q: u64, n: u32| {
            let (y, t) = hensel_lift_quadratic(a, target, q, n).unwrap();
            let m = q.pow(n) as i128;
            let (y, t) = (y as i128, t as i128);
            assert_eq!(
                (y * y + a as i128 * y * t + t * t - target as i128).rem_euclid(m),
                0
            );
        };
        check(1, 1, 2, 3);
        check(1, 3, 7, 2);
        check(1, 5, 2, 10);
        check(4, 2, 5, 4);
        check(1, 1, 19, 3);
        // Even target at q = 2 has no unit-derivative solution.
        assert!(matches!(
            hensel_lift_quadratic(1, 2, 2, 3),
            Err(Error::Solve(_))
        ));
        assert!(matches!(
            hensel_lift_quadratic(0, 1, 2, 1),
            Err(Error::Solve(_))
        ));
    }

    #[test]
    fn hensel_mod_eight_agrees_with_brute_force() {
        // Brute force: a pair exists for each odd target.
        for target in [1i64, 3, 5, 7] {
            let brute = (0..8u64)
                .flat_map(|y| (0..8u64).map(move |t| (y, t)))
                .any(|(y, t)| (y * y + y * t + t * t) as i64 % 8 == target);
            assert!(brute);
            assert!(hensel_lift_quadratic(1, target, 2, 3).is_ok());
        }
    }

    #[test]
    fn every_special_solution_normalises() {
        for (q, n, a) in [
            (2u64, 1u32, 1i64),
            (2, 2, 1),
            (5, 1, 1),
            (7, 1, 1),
            (5, 1, 4),
            (3, 1, 0),
        ] {
            let c = FinAbGroup::homogeneous(q, n, 2).unwrap();
            let target = solve_special_gamma(a, q, n).unwrap();
            let mut solutions = 0;
            for gamma in GroupHom::all(&c, &c) {
                if satisfies_special_relation(&gamma, a).unwrap() {
                    solutions += 1;
                    let psi = normalize_special(&gamma, a).unwrap();
                    assert_eq!(
                        psi.dual().compose(&gamma).unwrap().compose(&psi).unwrap(),
                        target
                    );
                }
            }
            assert!(solutions > 0, "({q},{n},{a})");
        }
    }
}
