//! Based fusion rings given by structure constants, the `R_{p,G}` family,
//! Frobenius-Perron dimensions and detection of the `Z/p` grading.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::finab::FinAbGroup;

/// Multiplication table of a finite group with the identity at index 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    mul: Vec<Vec<usize>>,
}

impl GroupTable {
    /// Validate closure, identity at 0, associativity and inverses.
    pub fn new(mul: Vec<Vec<usize>>) -> Result<Self> {
        let n = mul.len();
        if n == 0 {
            return Err(domain("empty group table"));
        }
        if mul
            .iter()
            .any(|r| r.len() != n || r.iter().any(|&x| x >= n))
        {
            return Err(domain("group table is not a closed square table"));
        }
        for (i, row) in mul.iter().enumerate() {
            if row[0] != i || mul[0][i] != i {
                return Err(domain("element 0 is not the identity"));
            }
            if !row.contains(&0) {
                return Err(domain(format!("element {i} has no inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(domain(format!("table is not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(GroupTable { mul })
    }

    /// Table of a finite abelian group in lexicographic element order.
    pub fn from_abelian(a: &FinAbGroup) -> Self {
        let els: Vec<_> = a.elements().collect();
        let mul = els
            .iter()
            .map(|x| {
                els.iter()
                    .map(|y| a.index_of(&a.add(x, y)) as usize)
                    .collect()
            })
            .collect();
        GroupTable { mul }
    }

    /// The dihedral group of order `2n`, elements `r^i s^j` at index `i + n j`.
    pub fn dihedral(n: usize) -> Self {
        let idx = |i: usize, j: usize| i % n + n * (j % 2);
        let mut mul = vec![vec![0; 2 * n]; 2 * n];
        for (x, row) in mul.iter_mut().enumerate() {
            let (i1, j1) = (x % n, x / n);
            for (y, cell) in row.iter_mut().enumerate() {
                let (i2, j2) = (y % n, y / n);
                // r^i1 s^j1 r^i2 s^j2 = r^(i1 ± i2) s^(j1 + j2)
                let i = if j1 == 0 { i1 + i2 } else { i1 + n - i2 };
                *cell = idx(i, j1 + j2);
            }
        }
        GroupTable { mul }
    }

    /// Direct product, element `(x, y)` at index `x * |other| + y`.
    pub fn product(&self, other: &GroupTable) -> Self {
        let (n, m) = (self.order(), other.order());
        let mul = (0..n * m)
            .map(|u| {
                (0..n * m)
                    .map(|v| self.mul[u / m][v / m] * m + other.mul[u % m][v % m])
                    .collect()
            })
            .collect();
        GroupTable { mul }
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.mul[a]
            .iter()
            .position(|&x| x == 0)
            .expect("validated table")
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..a).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let (mut x, mut k) = (a, 1);
        while x != 0 {
            x = self.mul[x][a];
            k += 1;
        }
        k
    }

    /// The isomorphism type of an abelian table, recovered from the sizes
    /// of its `q^k`-torsion subgroups.
    pub fn to_abelian(&self) -> Result<FinAbGroup> {
        if !self.is_abelian() {
            return Err(domain("group table is not abelian"));
        }
        let orders: Vec<usize> = (0..self.order()).map(|a| self.element_order(a)).collect();
        let mut parts = Vec::new();
        for (q, e) in crate::finab::arith::factorize(self.order() as u64) {
            let mut logs = Vec::new();
            let mut qk = 1usize;
            for _ in 0..e {
                qk *= q as usize;
                let count = orders.iter().filter(|&&o| qk.is_multiple_of(o)).count() as u64;
                logs.push(crate::finab::arith::valuation(count, q));
            }
            parts.extend(
                FinAbGroup::from_torsion_logs(q, &logs)?
                    .factors()
                    .iter()
                    .copied(),
            );
        }
        FinAbGroup::new(parts)
    }
}

/// A based ring with a distinguished basis `X_0 = 1, X_1, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionRing {
    labels: Vec<String>,
    star: Vec<usize>,
    /// `products[i][j]` lists `(k, N_ij^k)` with nonzero multiplicity, sorted by `k`.
    products: Vec<Vec<Vec<(usize, u64)>>>,
}

#[derive(Serialize, Deserialize)]
struct RawRing {
    basis: Vec<String>,
    star: Vec<usize>,
    #[serde(rename = "N")]
    n: Vec<[u64; 4]>,
}

impl Serialize for FusionRing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut n = Vec::new();
        for (i, row) in self.products.iter().enumerate() {
            for (j, prod) in row.iter().enumerate() {
                for &(k, v) in prod {
                    n.push([i as u64, j as u64, k as u64, v]);
                }
            }
        }
        RawRing {
            basis: self.labels.clone(),
            star: self.star.clone(),
            n,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FusionRing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawRing::deserialize(d)?;
        let m = raw.basis.len();
        let mut dense = BTreeMap::new();
        for [i, j, k, v] in raw.n {
            if i as usize >= m || j as usize >= m || k as usize >= m {
                return Err(serde::de::Error::custom(
                    "structure constant index out of range",
                ));
            }
            dense.insert((i as usize, j as usize, k as usize), v);
        }
        FusionRing::from_constants(raw.basis, raw.star, |i, j, k| {
            dense.get(&(i, j, k)).copied().unwrap_or(0)
        })
        .map_err(serde::de::Error::custom)
    }
}

/// Result of [`FusionRing::verify_axioms`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum AxiomReport {
    Pass,
    Fail { axiom: Axiom, witness: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    Unit,
    Involution,
    Duality,
    StarAntiHomomorphism,
    Associativity,
}

/// A `Z/p` grading of a ring, `degree[i]` being the component of `X_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Grading {
    pub order: u64,
    pub group: FinAbGroup,
    pub degree: Vec<u64>,
}

impl FusionRing {
    pub fn from_constants(
        labels: Vec<String>,
        star: Vec<usize>,
        n: impl Fn(usize, usize, usize) -> u64,
    ) -> Result<Self> {
        let m = labels.len();
        if m == 0 || star.len() != m || star.iter().any(|&s| s >= m) {
            return Err(domain("basis and involution have inconsistent sizes"));
        }
        let products = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        (0..m)
                            .filter_map(|k| Some((k, n(i, j, k))).filter(|x| x.1 > 0))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(FusionRing {
            labels,
            star,
            products,
        })
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn star(&self, i: usize) -> usize {
        self.star[i]
    }

    pub fn n(&self, i: usize, j: usize, k: usize) -> u64 {
        self.products[i][j]
            .iter()
            .find(|x| x.0 == k)
            .map_or(0, |x| x.1)
    }

    /// Nonzero terms of `X_i X_j`.
    pub fn product(&self, i: usize, j: usize) -> &[(usize, u64)] {
        &self.products[i][j]
    }

    /// Replace a single structure constant, e.g. to build corrupted rings.
    pub fn with_constant(mut self, i: usize, j: usize, k: usize, value: u64) -> Self {
        let prod = &mut self.products[i][j];
        prod.retain(|x| x.0 != k);
        if value > 0 {
            prod.push((k, value));
            prod.sort();
        }
        self
    }

    pub fn group_ring(g: &GroupTable) -> Self {
        let m = g.order();
        FusionRing {
            labels: (0..m).map(|i| format!("g{i}")).collect(),
            star: (0..m).map(|i| g.inverse(i)).collect(),
            products: (0..m)
                .map(|i| (0..m).map(|j| vec![(g.mul(i, j), 1)]).collect())
                .collect(),
        }
    }

    /// `R_{p,G}`: basis `G ∪ {X_1, .., X_{p-1}}` with `gX_i = X_i g = X_i`,
    /// `X_i X_j = √|G| X_{i+j}` for `i + j ≠ p` and `Σ_g g` for `i + j = p`.
    pub fn r_pg(p: usize, g: &GroupTable) -> Result<Self> {
        if p == 0 {
            return Err(domain("p must be at least 1"));
        }
        let n = g.order();
        let root = (n as f64).sqrt().round() as usize;
        let square = root * root == n;
        if p >= 3 && !square {
            return Err(domain(format!("|G| = {n} is not a perfect square")));
        }
        let m = n + p - 1;
        let x = |i: usize| n + i - 1; // index of X_i
        let mut labels: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
        labels.extend((1..p).map(|i| format!("X{i}")));
        let mut star: Vec<usize> = (0..n).map(|i| g.inverse(i)).collect();
        star.extend((1..p).map(|i| x(p - i)));
        let mut products = vec![vec![Vec::new(); m]; m];
        for (a, row) in products.iter_mut().enumerate().take(n) {
            for (b, cell) in row.iter_mut().enumerate().take(n) {
                *cell = vec![(g.mul(a, b), 1)];
            }
        }
        for i in 1..p {
            for row in products.iter_mut().take(n) {
                row[x(i)] = vec![(x(i), 1)];
            }
            for cell in products[x(i)].iter_mut().take(n) {
                *cell = vec![(x(i), 1)];
            }
        }
        for i in 1..p {
            for j in 1..p {
                products[x(i)][x(j)] = if i + j == p {
                    (0..n).map(|h| (h, 1)).collect()
                } else {
                    vec![(x((i + j) % p), root as u64)]
                };
            }
        }
        Ok(FusionRing {
            labels,
            star,
            products,
        })
    }

    /// Check unit, involution, duality, anti-multiplicativity of `*` and
    /// associativity. Returns the first failure with witness indices.
    pub fn verify_axioms(&self) -> AxiomReport {
        let m = self.rank();
        let fail = |axiom, witness| AxiomReport::Fail { axiom, witness };
        for j in 0..m {
            for k in 0..m {
                let d = u64::from(j == k);
                if self.n(0, j, k) != d || self.n(j, 0, k) != d {
                    return fail(Axiom::Unit, vec![j, k]);
                }
            }
        }
        for i in 0..m {
            if self.star[self.star[i]] != i {
                return fail(Axiom::Involution, vec![i]);
            }
        }
        for i in 0..m {
            for j in 0..m {
                if self.n(i, self.star[j], 0) != u64::from(i == j) {
                    return fail(Axiom::Duality, vec![i, j]);
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if self.n(i, j, k) != self.n(self.star[j], self.star[i], self.star[k]) {
                        return fail(Axiom::StarAntiHomomorphism, vec![i, j, k]);
                    }
                }
            }
        }
        // (X_i X_j) X_k = X_i (X_j X_k), compared as sparse vectors.
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let mut left: BTreeMap<usize, u64> = BTreeMap::new();
                    for &(t, a) in &self.products[i][j] {
                        for &(l, b) in &self.products[t][k] {
                            *left.entry(l).or_insert(0) += a * b;
                        }
                    }
                    let mut right: BTreeMap<usize, u64> = BTreeMap::new();
                    for &(t, a) in &self.products[j][k] {
                        for &(l, b) in &self.products[i][t] {
                            *right.entry(l).or_insert(0) += a * b;
                        }
                    }
                    if left != right {
                        return fail(Axiom::Associativity, vec![i, j, k]);
                    }
                }
            }
        }
        AxiomReport::Pass
    }

    /// `X_i` is invertible iff `X_i X_i* = 1`.
    pub fn is_invertible(&self, i: usize) -> bool {
        self.products[i][self.star[i]] == [(0, 1)]
    }

    /// Frobenius-Perron dimensions. Invertible basis elements get exactly 1;
    /// the rest use power iteration on `N_i + I` from the all-ones vector.
    pub fn fp_dims(&self) -> Result<Vec<f64>> {
        (0..self.rank())
            .map(|i| {
                if self.is_invertible(i) {
                    Ok(1.0)
                } else {
                    self.perron_root(i)
                }
            })
            .collect()
    }

    fn perron_root(&self, i: usize) -> Result<f64> {
        const TOL: f64 = 1e-9;
        const MAX_ITER: usize = 100_000;
        let m = self.rank();
        // (N_i)_{kj} = N(i, j, k): left multiplication by X_i. The shift by
        // I makes the matrix primitive without moving the eigenvectors.
        let mut v = vec![1.0f64; m];
        for _ in 0..MAX_ITER {
            let mut w = v.clone();
            for (j, vj) in v.iter().enumerate() {
                for &(k, c) in &self.products[i][j] {
                    w[k] += c as f64 * vj;
                }
            }
            // Collatz-Wielandt bounds on the Perron root of N_i + I.
            let ratios = w
                .iter()
                .zip(&v)
                .filter(|(_, &b)| b > 0.0)
                .map(|(a, b)| a / b);
            let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
                (lo.min(r), hi.max(r))
            });
            let norm = w.iter().fold(0.0f64, |acc, x| acc.max(*x));
            if hi - lo < TOL {
                return Ok((lo + hi) / 2.0 - 1.0);
            }
            v = w.into_iter().map(|x| x / norm).collect();
        }
        Err(Error::Numeric(format!(
            "power iteration for {} did not converge",
            self.labels[i]
        )))
    }

    /// Detect the `Z/p` grading of a ring shaped like `R_{p,G}`: invertible
    /// elements first, then `p - 1` non-invertible ones.
    pub fn detect_grading(&self) -> Result<Grading> {
        let m = self.rank();
        let n = (0..m).take_while(|&i| self.is_invertible(i)).count();
        if (n..m).any(|i| self.is_invertible(i)) {
            return Err(Error::Unsupported(
                "invertible elements are not a prefix of the basis".into(),
            ));
        }
        let p = m - n + 1;
        let mut degree = vec![0u64; m];
        if p > 1 {
            // X_1 has degree 1 and X_1^k spans the degree-k component.
            degree[n] = 1;
            let mut current = n;
            for k in 2..p {
                let next = match self.products[n][current].as_slice() {
                    [(t, _)] if *t >= n => *t,
                    _ => {
                        return Err(Error::Unsupported(
                            "non-invertible products do not follow the cyclic pattern".into(),
                        ))
                    }
                };
                if degree[next] != 0 {
                    return Err(Error::Unsupported("cyclic pattern repeats early".into()));
                }
                degree[next] = k as u64;
                current = next;
            }
        }
        for i in 0..m {
            for j in 0..m {
                for &(k, _) in &self.products[i][j] {
                    if degree[k] != (degree[i] + degree[j]) % p as u64 {
                        return Err(Error::Unsupported(format!(
                            "support of X{i}X{j} breaks the grading"
                        )));
                    }
                }
            }
        }
        Ok(Grading {
            order: p as u64,
            group: cyclic_group(p as u64)?,
            degree,
        })
    }
}

/// `Z/n` as a finite abelian group in primary decomposition.
fn cyclic_group(n: u64) -> Result<FinAbGroup> {
    FinAbGroup::new(crate::finab::arith::factorize(n).into_iter().map(|(q, e)| {
        crate::finab::Factor {
            prime: q,
            exponent: e,
            multiplicity: 1,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abelian(s: &str) -> GroupTable {
        GroupTable::from_abelian(&FinAbGroup::parse(s).unwrap())
    }

    #[test]
    fn tables_validate() {
        assert!(GroupTable::new(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(GroupTable::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(GroupTable::new(vec![vec![1, 0], vec![0, 1]]).is_err());
        let d4 = GroupTable::dihedral(4);
        assert!(GroupTable::new(d4.mul.clone()).is_ok());
        assert!(!d4.is_abelian());
        assert_eq!(GroupTable::dihedral(3).order(), 6);
        assert!(GroupTable::new(d4.product(&abelian("2^1:1")).mul).is_ok());
    }

    #[test]
    fn abelian_type_recovered() {
        for s in ["2^1:2+2^2:2", "2^3:1+5^1:2", "1", "7^2:1"] {
            let a = FinAbGroup::parse(s).unwrap();
            assert_eq!(GroupTable::from_abelian(&a).to_abelian().unwrap(), a);
        }
        assert!(GroupTable::dihedral(4).to_abelian().is_err());
    }

    #[test]
    fn group_rings() {
        let triv = FusionRing::group_ring(&abelian("1"));
        assert_eq!(triv.rank(), 1);
        let z2 = FusionRing::group_ring(&abelian("2^1:1"));
        assert_eq!(z2.n(1, 1, 0), 1);
        assert_eq!(z2.fp_dims().unwrap(), vec![1.0, 1.0]);
        let v4 = FusionRing::group_ring(&abelian("2^1:2"));
        assert!((0..4).all(|i| v4.is_invertible(i)));
        assert_eq!(v4.verify_axioms(), AxiomReport::Pass);
        assert_eq!(FusionRing::r_pg(1, &abelian("2^1:2")).unwrap(), v4);
    }

    #[test]
    fn r3_of_klein_four() {
        let r = FusionRing::r_pg(3, &abelian("2^1:2")).unwrap();
        assert_eq!(r.rank(), 6);
        assert_eq!(r.verify_axioms(), AxiomReport::Pass);
        assert_eq!(r.product(4, 5), &[(0, 1), (1, 1), (2, 1), (3, 1)]);
        assert_eq!(r.product(4, 4), &[(5, 2)]);
        let d = r.fp_dims().unwrap();
        assert!(d[..4].iter().all(|&x| x == 1.0));
        assert!((d[4] - 2.0).abs() < 1e-6 && (d[5] - 2.0).abs() < 1e-6);
        let total: f64 = d.iter().map(|x| x * x).sum();
        assert!((total - 12.0).abs() < 1e-4);
        let gr = r.detect_grading().unwrap();
        assert_eq!(gr.order, 3);
        assert_eq!(gr.degree, vec![0, 0, 0, 0, 1, 2]);
    }

    #[test]
    fn r_pg_requires_square_order() {
        assert!(FusionRing::r_pg(3, &abelian("2^1:1")).is_err());
        // p = 2 needs no square: Tambara-Yamagami ring of Z/2.
        let ty = FusionRing::r_pg(2, &abelian("2^1:1")).unwrap();
        assert_eq!(ty.verify_axioms(), AxiomReport::Pass);
        assert!((ty.fp_dims().unwrap()[2] - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn corrupted_ring_fails_with_witness() {
        let r = FusionRing::r_pg(3, &abelian("2^1:2"))
            .unwrap()
            .with_constant(1, 1, 0, 0);
        assert_eq!(
            r.verify_axioms(),
            AxiomReport::Fail {
                axiom: Axiom::Duality,
                witness: vec![1, 1]
            }
        );
    }

    #[test]
    fn two_dimensional_rings_pass() {
        // X^2 = 1 + nX
        for n in 0..4u64 {
            let r =
                FusionRing::from_constants(vec!["1".into(), "X".into()], vec![0, 1], |i, j, k| {
                    match (i, j, k) {
                        (0, j, k) => u64::from(j == k),
                        (i, 0, k) => u64::from(i == k),
                        (_, _, 0) => 1,
                        _ => n,
                    }
                })
                .unwrap();
            assert_eq!(r.verify_axioms(), AxiomReport::Pass, "n = {n}");
            let expected = (n as f64 + ((n * n + 4) as f64).sqrt()) / 2.0;
            assert!((r.fp_dims().unwrap()[1] - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn gradings() {
        assert_eq!(
            FusionRing::group_ring(&abelian("2^1:2"))
                .detect_grading()
                .unwrap()
                .order,
            1
        );
        let ty = FusionRing::r_pg(2, &abelian("3^1:2")).unwrap();
        let gr = ty.detect_grading().unwrap();
        assert_eq!(gr.order, 2);
        assert_eq!(gr.group, FinAbGroup::parse("2^1:1").unwrap());
        let r5 = FusionRing::r_pg(5, &abelian("2^2:1")).unwrap();
        assert_eq!(r5.detect_grading().unwrap().degree[4..], [1, 2, 3, 4]);
    }

    #[test]
    fn non_abelian_inputs() {
        let g = GroupTable::dihedral(4).product(&abelian("2^1:1"));
        let r = FusionRing::r_pg(3, &g).unwrap();
        assert_eq!(r.verify_axioms(), AxiomReport::Pass);
        let d = r.fp_dims().unwrap();
        assert!((d[16] - 4.0).abs() < 1e-6);
        let s3 = FusionRing::r_pg(2, &GroupTable::dihedral(3)).unwrap();
        assert_eq!(s3.verify_axioms(), AxiomReport::Pass);
    }

    #[test]
    fn json_round_trip() {
        let r = FusionRing::r_pg(3, &abelian("2^1:2")).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.starts_with(
            r#"{"basis":["g0","g1","g2","g3","X1","X2"],"star":[0,1,2,3,5,4],"N":[[0,0,0,1]"#
        ));
        let back: FusionRing = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
