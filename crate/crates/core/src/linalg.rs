//! Exact integer vectors and matrices.
//!
//! Vectors are rows and matrices act on the right: `v ↦ v·M`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn zero(dim: usize) -> Self {
        IntVector(vec![BigInt::zero(); dim])
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Unit vector `e_i` (0-indexed).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = BigInt::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|x| x * k).collect())
    }

    /// Row vector times matrix.
    pub fn mul_mat(&self, m: &IntMatrix) -> IntVector {
        debug_assert_eq!(self.dim(), m.dim());
        let n = m.dim();
        let mut out = vec![BigInt::zero(); n];
        for (i, x) in self.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let e = &m.rows[i][j];
                if !e.is_zero() {
                    *o += x * e;
                }
            }
        }
        IntVector(out)
    }

    /// Exact division of every entry; `None` if some entry is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Option<IntVector> {
        let mut out = Vec::with_capacity(self.dim());
        for x in &self.0 {
            let (q, r) = x.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(IntVector(out))
    }
}

impl Add for &IntVector {
    type Output = IntVector;
    fn add(self, rhs: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVector {
    type Output = IntVector;
    fn sub(self, rhs: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// Square integer matrix with nonzero determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    /// Builds a matrix, rejecting ragged, empty or singular input.
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let m = Self::new_unchecked(rows)?;
        if m.determinant().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(m)
    }

    pub fn from_i64s(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub(crate) fn new_unchecked(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedMatrix);
        }
        Ok(IntMatrix { rows })
    }

    pub fn identity(n: usize) -> Self {
        let mut rows = vec![vec![BigInt::zero(); n]; n];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = BigInt::one();
        }
        IntMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix { rows: self.rows.iter().map(|r| IntVector(r.clone()).mul_mat(other).0).collect() }
    }

    /// `self^k` by square-and-multiply.
    pub fn pow(&self, mut k: u64) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.dim());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Fraction-free Gaussian elimination (Bareiss).
    pub fn determinant(&self) -> BigInt {
        bareiss_det(self.rows.clone())
    }

    /// Classical adjoint: `self · adj = det · I`.
    pub fn adjugate(&self) -> IntMatrix {
        let n = self.dim();
        if n == 1 {
            return IntMatrix::identity(1);
        }
        let mut adj = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<BigInt>> = self
                    .rows
                    .iter()
                    .enumerate()
                    .filter(|&(r, _)| r != j)
                    .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != i).map(|(_, x)| x.clone()).collect())
                    .collect();
                let d = bareiss_det(minor);
                adj[i][j] = if (i + j) % 2 == 0 { d } else { -d };
            }
        }
        IntMatrix { rows: adj }
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.rows.iter().flatten().map(|x| x.abs()).max().unwrap_or_default()
    }
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

/// Number of bits in `|x|`; 0 for zero.
pub fn bitlength(x: &BigInt) -> u64 {
    x.magnitude().bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64s(rows).unwrap()
    }

    #[test]
    fn determinant_and_adjugate() {
        let a = m(&[vec![2, 1], vec![0, 3]]);
        assert_eq!(a.determinant(), BigInt::from(6));
        let adj = a.adjugate();
        assert_eq!(adj, m(&[vec![3, -1], vec![0, 2]]));
        let b = m(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]);
        assert_eq!(b.determinant(), BigInt::from(-2));
        let prod = b.mul(&b.adjugate());
        let expect: Vec<Vec<BigInt>> =
            IntMatrix::identity(3).rows.iter().map(|r| r.iter().map(|x| x * -2).collect()).collect();
        assert_eq!(prod.rows, expect);
    }

    #[test]
    fn singular_rejected() {
        assert!(matches!(IntMatrix::from_i64s(&[vec![1, 2], vec![2, 4]]), Err(Error::SingularMatrix)));
        assert!(matches!(IntMatrix::from_i64s(&[vec![1, 2]]), Err(Error::MalformedMatrix)));
        assert!(matches!(IntMatrix::from_i64s(&[]), Err(Error::MalformedMatrix)));
    }

    #[test]
    fn pow_matches_iteration() {
        let a = m(&[vec![2, 1], vec![0, 3]]);
        let mut it = IntMatrix::identity(2);
        for k in 0..12u64 {
            assert_eq!(a.pow(k), it);
            it = it.mul(&a);
        }
    }

    #[test]
    fn bitlengths() {
        assert_eq!(bitlength(&BigInt::from(0)), 0);
        assert_eq!(bitlength(&BigInt::from(8)), 4);
        assert_eq!(bitlength(&BigInt::from(-7)), 3);
    }
}
