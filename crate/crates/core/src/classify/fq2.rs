use std::fmt;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::finab::arith::{add_mod, is_prime, mul_mod, neg_mod, sub_mod};

/// An element `u0 + u1·t` of `F_{q²}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fq2Elem {
    pub u0: u64,
    pub u1: u64,
}

impl Fq2Elem {
    pub fn is_in_base_field(&self) -> bool {
        self.u1 == 0
    }
}

impl fmt::Display for Fq2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.u1 {
            0 => write!(f, "{}", self.u0),
            _ => write!(f, "{}+{}t", self.u0, self.u1),
        }
    }
}

/// `F_q[t] / (t² - c1·t - c0)`.
///
/// The modulus is the first irreducible one in the scan `c = 1, 2, ...`
/// trying `t² - c` before `t² - t - c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqSquared {
    q: u64,
    c0: u64,
    c1: u64,
}

impl FqSquared {
    pub fn new(q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(domain(format!("{q} is not prime")));
        }
        for c in 1..q.max(2) + 1 {
            for c1 in [0, 1] {
                let c0 = c % q;
                let has_root = (0..q)
                    .any(|y| sub_mod(mul_mod(y, y, q), add_mod(mul_mod(c1, y, q), c0, q), q) == 0);
                if !has_root {
                    return Ok(FqSquared { q, c0, c1 });
                }
            }
        }
        unreachable!("an irreducible quadratic of the scanned shape always exists")
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `(c0, c1)` with `t² = c0 + c1·t`.
    pub fn modulus(&self) -> (u64, u64) {
        (self.c0, self.c1)
    }

    pub fn from_base(&self, x: i64) -> Fq2Elem {
        Fq2Elem {
            u0: crate::finab::arith::reduce_i64(x, self.q),
            u1: 0,
        }
    }

    pub fn zero(&self) -> Fq2Elem {
        Fq2Elem { u0: 0, u1: 0 }
    }

    pub fn one(&self) -> Fq2Elem {
        Fq2Elem { u0: 1, u1: 0 }
    }

    pub fn add(&self, x: Fq2Elem, y: Fq2Elem) -> Fq2Elem {
        Fq2Elem {
            u0: add_mod(x.u0, y.u0, self.q),
            u1: add_mod(x.u1, y.u1, self.q),
        }
    }

    pub fn sub(&self, x: Fq2Elem, y: Fq2Elem) -> Fq2Elem {
        Fq2Elem {
            u0: sub_mod(x.u0, y.u0, self.q),
            u1: sub_mod(x.u1, y.u1, self.q),
        }
    }

    pub fn neg(&self, x: Fq2Elem) -> Fq2Elem {
        Fq2Elem {
            u0: neg_mod(x.u0, self.q),
            u1: neg_mod(x.u1, self.q),
        }
    }

    pub fn mul(&self, x: Fq2Elem, y: Fq2Elem) -> Fq2Elem {
        let q = self.q;
        let hi = mul_mod(x.u1, y.u1, q);
        let u0 = add_mod(mul_mod(x.u0, y.u0, q), mul_mod(hi, self.c0, q), q);
        let mid = add_mod(mul_mod(x.u0, y.u1, q), mul_mod(x.u1, y.u0, q), q);
        Fq2Elem {
            u0,
            u1: add_mod(mid, mul_mod(hi, self.c1, q), q),
        }
    }

    pub fn pow(&self, mut x: Fq2Elem, mut e: u64) -> Fq2Elem {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: Fq2Elem) -> Option<Fq2Elem> {
        (x != self.zero()).then(|| self.pow(x, self.q * self.q - 2))
    }

    pub fn div(&self, x: Fq2Elem, y: Fq2Elem) -> Option<Fq2Elem> {
        self.inv(y).map(|i| self.mul(x, i))
    }

    pub fn frobenius(&self, x: Fq2Elem) -> Fq2Elem {
        self.pow(x, self.q)
    }

    /// All `q²` elements, ordered by `u1` then `u0`.
    pub fn elements(&self) -> impl Iterator<Item = Fq2Elem> + '_ {
        (0..self.q * self.q).map(|i| Fq2Elem {
            u0: i % self.q,
            u1: i / self.q,
        })
    }

    /// The first element (in [`elements`](Self::elements) order) of
    /// multiplicative order exactly `p`, if `p | q² - 1`.
    pub fn primitive_root_of_unity(&self, p: u64) -> Option<Fq2Elem> {
        let n = self.q * self.q - 1;
        if p < 2 || !n.is_multiple_of(p) || !is_prime(p) {
            return None;
        }
        self.elements()
            .skip(1)
            .map(|z| self.pow(z, n / p))
            .find(|&z| z != self.one())
    }
}

/// The `p`-th roots of unity in `F_{q²}` as `[1, ζ, ζ², ...]` for the fixed
/// primitive root `ζ`; just `[1]` when `p ∤ q² - 1`.
pub fn pth_roots(p: u64, q: u64) -> Result<Vec<Fq2Elem>> {
    if !is_prime(p) || !is_prime(q) {
        return Err(domain(format!("p = {p} and q = {q} must both be prime")));
    }
    if p == q {
        return Err(domain("p and q must differ"));
    }
    let f = FqSquared::new(q)?;
    Ok(match f.primitive_root_of_unity(p) {
        Some(z) => (0..p).map(|k| f.pow(z, k)).collect(),
        None => vec![f.one()],
    })
}
