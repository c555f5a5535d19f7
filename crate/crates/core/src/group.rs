//! Arithmetic in the ascending HNN-extension `Z^m *_M`.
//!
//! The group is generated by the standard basis `x1..xm` of `Z^m` and a stable
//! letter `t` subject to `t^-1 x t = x·M`. Every element has a unique
//! Britton-reduced form `t^p v t^-q` with `p, q ≥ 0` and either `p = 0`,
//! `q = 0`, or `v ∉ Z^m·M`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{bitlength, IntMatrix, IntVector};

/// Default cap on the number of tokens `to_word` may emit.
pub const DEFAULT_EXPANSION_CAP: usize = 10_000;

/// A letter of the group alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    /// `x<index+1>` or its inverse.
    Gen {
        index: usize,
        inverse: bool,
    },
    T,
    TInv,
}

impl Token {
    pub fn gen(index: usize) -> Self {
        Token::Gen { index, inverse: false }
    }

    pub fn gen_inv(index: usize) -> Self {
        Token::Gen { index, inverse: true }
    }

    pub fn inverse(self) -> Self {
        match self {
            Token::Gen { index, inverse } => Token::Gen { index, inverse: !inverse },
            Token::T => Token::TInv,
            Token::TInv => Token::T,
        }
    }

    /// Whether the token belongs to the alphabet of a rank-`dim` group.
    pub fn fits(self, dim: usize) -> bool {
        match self {
            Token::Gen { index, .. } => index < dim,
            _ => true,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Gen { index, inverse: false } => write!(f, "x{}", index + 1),
            Token::Gen { index, inverse: true } => write!(f, "x{}^-1", index + 1),
            Token::T => write!(f, "t"),
            Token::TInv => write!(f, "t^-1"),
        }
    }
}

impl FromStr for Token {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" => return Ok(Token::T),
            "t^-1" => return Ok(Token::TInv),
            _ => {}
        }
        let bad = || Error::UnknownToken(s.to_string());
        let body = s.strip_prefix('x').ok_or_else(bad)?;
        let (digits, inverse) = match body.strip_suffix("^-1") {
            Some(d) => (d, true),
            None => (body, false),
        };
        // canonical decimal only: no sign, no leading zeros
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(bad());
        }
        let n: usize = digits.parse().map_err(|_| bad())?;
        Ok(Token::Gen { index: n - 1, inverse })
    }
}

/// A word over the group alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupWord(pub Vec<Token>);

impl GroupWord {
    pub fn new(tokens: Vec<Token>) -> Self {
        GroupWord(tokens)
    }

    pub fn parse<S: AsRef<str>>(tokens: &[S]) -> Result<Self> {
        tokens.iter().map(|s| s.as_ref().parse()).collect::<Result<Vec<_>>>().map(GroupWord)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Formal inverse: reversed, every letter inverted.
    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|t| t.inverse()).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.to_strings();
        write!(f, "{}", parts.join(" "))
    }
}

/// Parameters of `G = Z^m *_M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupParams {
    matrix: IntMatrix,
    det: BigInt,
    adj: IntMatrix,
}

impl GroupParams {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        let det = matrix.determinant();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let adj = matrix.adjugate();
        Ok(GroupParams { matrix, det, adj })
    }

    pub fn from_i64s(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_i64s(rows)?)
    }

    /// `BS(1, n)` presented as `Z *_[n]`.
    pub fn baumslag_solitar(n: i64) -> Result<Self> {
        Self::from_i64s(&[vec![n]])
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn adjugate(&self) -> &IntMatrix {
        &self.adj
    }

    fn check_dim(&self, v: &IntVector) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.dim() });
        }
        Ok(())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { p: 0, v: IntVector::zero(self.dim()), q: 0 }
    }

    /// The base-group element `v`.
    pub fn from_base(&self, v: IntVector) -> GroupElement {
        assert_eq!(v.dim(), self.dim(), "vector dimension");
        GroupElement { p: 0, v, q: 0 }
    }

    /// `t^k` for `k ∈ Z`.
    pub fn stable_power(&self, k: i64) -> GroupElement {
        let (p, q) = if k >= 0 { (k as u64, 0) } else { (0, k.unsigned_abs()) };
        GroupElement { p, v: IntVector::zero(self.dim()), q }
    }

    /// Returns the preimage `w` with `w·M = v` when one exists in `Z^m`.
    pub fn im_m_test(&self, v: &IntVector) -> Option<IntVector> {
        v.mul_mat(&self.adj).div_exact(&self.det)
    }

    pub fn is_reduced(&self, p: u64, v: &IntVector, q: u64) -> bool {
        p == 0 || q == 0 || self.im_m_test(v).is_none()
    }

    pub fn britton_reduce(&self, mut p: u64, mut v: IntVector, mut q: u64) -> GroupElement {
        assert_eq!(v.dim(), self.dim(), "vector dimension");
        while p > 0 && q > 0 {
            match self.im_m_test(&v) {
                Some(w) => {
                    v = w;
                    p -= 1;
                    q -= 1;
                }
                None => break,
            }
        }
        GroupElement { p, v, q }
    }

    /// Validated constructor for an already-reduced triple.
    pub fn element(&self, p: u64, v: IntVector, q: u64) -> Result<GroupElement> {
        self.check_dim(&v)?;
        if !self.is_reduced(p, &v, q) {
            return Err(Error::NotReduced);
        }
        Ok(GroupElement { p, v, q })
    }

    /// `v·M^k` via square-and-multiply on `M`.
    pub fn phi_power(&self, v: &IntVector, k: u64) -> IntVector {
        match k {
            0 => v.clone(),
            1 => v.mul_mat(&self.matrix),
            _ => v.mul_mat(&self.matrix.pow(k)),
        }
    }

    /// `v·M^k` by `k` successive vector-matrix products.
    pub fn phi_power_naive(&self, v: &IntVector, k: u64) -> IntVector {
        (0..k).fold(v.clone(), |acc, _| acc.mul_mat(&self.matrix))
    }

    pub fn checked_multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_dim(&g.v)?;
        self.check_dim(&h.v)?;
        Ok(self.multiply_unchecked(g, h))
    }

    /// Group product. Panics if either operand has the wrong dimension.
    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.checked_multiply(g, h).expect("operands belong to this group")
    }

    fn multiply_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        if g.q >= h.p {
            let k = g.q - h.p;
            let v = &g.v + &self.phi_power(&h.v, k);
            self.britton_reduce(g.p, v, k + h.q)
        } else {
            let k = h.p - g.q;
            let v = &self.phi_power(&g.v, k) + &h.v;
            self.britton_reduce(g.p + k, v, h.q)
        }
    }

    pub fn product<'a, I>(&self, factors: I) -> GroupElement
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        factors.into_iter().fold(self.identity(), |acc, x| self.multiply(&acc, x))
    }

    pub fn invert(&self, g: &GroupElement) -> GroupElement {
        GroupElement { p: g.q, v: -&g.v, q: g.p }
    }

    /// `t^-k g t^k`.
    pub fn conj_by_stable(&self, g: &GroupElement, k: i64) -> GroupElement {
        let left = self.stable_power(-k);
        let right = self.stable_power(k);
        self.multiply(&self.multiply(&left, g), &right)
    }

    pub fn letter(&self, token: Token) -> Result<GroupElement> {
        if !token.fits(self.dim()) {
            return Err(Error::TokenOutOfAlphabet { token: token.to_string(), dim: self.dim() });
        }
        Ok(match token {
            Token::Gen { index, inverse } => {
                let mut v = IntVector::unit(self.dim(), index);
                if inverse {
                    v = -&v;
                }
                GroupElement { p: 0, v, q: 0 }
            }
            Token::T => self.stable_power(1),
            Token::TInv => self.stable_power(-1),
        })
    }

    pub fn evaluate_word(&self, w: &GroupWord) -> Result<GroupElement> {
        let mut acc = self.identity();
        for &tok in w.tokens() {
            acc = self.multiply_unchecked(&acc, &self.letter(tok)?);
        }
        Ok(acc)
    }

    /// Spells `g` as `t^p x.. t^-q`, refusing words longer than `cap`.
    pub fn to_word(&self, g: &GroupElement, cap: usize) -> Result<GroupWord> {
        let mut needed = BigInt::from(g.p) + BigInt::from(g.q);
        for x in g.v.entries() {
            needed += x.abs();
        }
        let needed = match needed.to_usize() {
            Some(n) if n <= cap => n,
            n => {
                return Err(Error::ExpansionCap { needed: n.unwrap_or(usize::MAX), cap });
            }
        };
        let mut out = Vec::with_capacity(needed);
        out.extend(std::iter::repeat_n(Token::T, g.p as usize));
        for (i, x) in g.v.entries().iter().enumerate() {
            let tok = if x.is_negative() { Token::gen_inv(i) } else { Token::gen(i) };
            let n = x.abs().to_usize().expect("bounded by cap");
            out.extend(std::iter::repeat_n(tok, n));
        }
        out.extend(std::iter::repeat_n(Token::TInv, g.q as usize));
        Ok(GroupWord(out))
    }

    /// Word spelling the base vector `v`.
    pub fn vector_word(&self, v: &IntVector, cap: usize) -> Result<GroupWord> {
        self.check_dim(v)?;
        self.to_word(&GroupElement { p: 0, v: v.clone(), q: 0 }, cap)
    }
}

/// Britton-reduced element `t^p v t^-q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    p: u64,
    v: IntVector,
    q: u64,
}

impl GroupElement {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn v(&self) -> &IntVector {
        &self.v
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn is_identity(&self) -> bool {
        self.p == 0 && self.q == 0 && self.v.is_zero()
    }

    /// Exponent sum of `t`.
    pub fn t_exponent(&self) -> i64 {
        self.p as i64 - self.q as i64
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.p, self.v, self.q)
    }
}

/// A length function on reduced elements.
pub trait Length: Sync {
    fn length(&self, g: &GroupElement) -> u64;
}

/// `p + q + Σ bitlength(|v_i|)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BitLength;

impl Length for BitLength {
    fn length(&self, g: &GroupElement) -> u64 {
        g.p + g.q + g.v.entries().iter().map(bitlength).sum::<u64>()
    }
}

/// `p + q + Σ |v_i|`, saturating; the length of the word `to_word` spells.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnaryLength;

impl Length for UnaryLength {
    fn length(&self, g: &GroupElement) -> u64 {
        g.v.entries()
            .iter()
            .fold(g.p.saturating_add(g.q), |acc, x| acc.saturating_add(x.abs().to_u64().unwrap_or(u64::MAX)))
    }
}

impl<F: Fn(&GroupElement) -> u64 + Sync> Length for F {
    fn length(&self, g: &GroupElement) -> u64 {
        self(g)
    }
}
