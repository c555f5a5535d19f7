//! Faithful rational model `Z^m[M^-1] ⋊ Z` of the group.
//!
//! `t^p v t^-q` is sent to `(v·M^-p, p - q)`; products follow
//! `(a, i)·(b, j) = (a + b·M^-i, i + j)`. The model shares no code path with
//! Britton reduction, so agreement between the two is a meaningful check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::group::{GroupElement, GroupParams, GroupWord};
use crate::linalg::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OracleElement {
    a: Vec<BigRational>,
    d: i64,
}

impl OracleElement {
    pub fn new(a: Vec<BigRational>, d: i64) -> Self {
        OracleElement { a, d }
    }

    pub fn identity(dim: usize) -> Self {
        OracleElement { a: vec![BigRational::zero(); dim], d: 0 }
    }

    pub fn from_ints(a: &[i64], d: i64) -> Self {
        OracleElement { a: a.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect(), d }
    }

    pub fn base(&self) -> &[BigRational] {
        &self.a
    }

    /// Exponent sum of `t`.
    pub fn t_component(&self) -> i64 {
        self.d
    }

    pub fn is_identity(&self) -> bool {
        self.d == 0 && self.a.iter().all(Zero::is_zero)
    }
}

fn rat_mul_mat(a: &[BigRational], m: &IntMatrix) -> Vec<BigRational> {
    let n = m.dim();
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            let e = &m.rows()[i][j];
            if !e.is_zero() {
                *o += x * BigRational::from_integer(e.clone());
            }
        }
    }
    out
}

impl GroupParams {
    /// `a·M^k` for any integer `k`, exact over the rationals.
    pub fn rational_phi(&self, a: &[BigRational], k: i64) -> Vec<BigRational> {
        if k >= 0 {
            let mk = self.matrix().pow(k as u64);
            rat_mul_mat(a, &mk)
        } else {
            let n = k.unsigned_abs();
            let adj = self.adjugate().pow(n);
            let scale = BigRational::from_integer(num_traits::pow(self.det().clone(), n as usize));
            rat_mul_mat(a, &adj).into_iter().map(|x| x / &scale).collect()
        }
    }

    pub fn oracle_embed(&self, g: &GroupElement) -> OracleElement {
        let a: Vec<BigRational> = g.v().entries().iter().map(|x| BigRational::from_integer(x.clone())).collect();
        OracleElement { a: self.rational_phi(&a, -(g.p() as i64)), d: g.t_exponent() }
    }

    pub fn oracle_multiply(&self, x: &OracleElement, y: &OracleElement) -> OracleElement {
        let shifted = self.rational_phi(&y.a, -x.d);
        OracleElement { a: x.a.iter().zip(&shifted).map(|(p, q)| p + q).collect(), d: x.d + y.d }
    }

    pub fn oracle_invert(&self, x: &OracleElement) -> OracleElement {
        // (a, i)^-1 = (-a·M^i, -i)
        let a = self.rational_phi(&x.a, x.d).into_iter().map(|v| -v).collect();
        OracleElement { a, d: -x.d }
    }

    /// Image of a word computed letter by letter in the rational model.
    pub fn oracle_word(&self, w: &GroupWord) -> Result<OracleElement> {
        let mut acc = OracleElement::identity(self.dim());
        for &tok in w.tokens() {
            let letter = self.letter(tok)?;
            acc = self.oracle_multiply(&acc, &self.oracle_embed(&letter));
        }
        Ok(acc)
    }

    /// Whether every denominator of `x` divides a power of `det M`.
    pub fn oracle_is_valid(&self, x: &OracleElement) -> bool {
        x.a.iter().all(|r| {
            let mut den = r.denom().clone();
            loop {
                if den.is_one() {
                    return true;
                }
                let g = num_integer::Integer::gcd(&den, self.det());
                if g.is_one() {
                    return false;
                }
                den /= g;
            }
        })
    }
}
