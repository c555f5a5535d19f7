//! Hermite normal form and membership in orbit lattices.
//!
//! The subgroup generated by `{ t^-k g t^k }` lives in the normal closure of
//! `Z^m`, which the oracle represents as rational vectors with `det M`-power
//! denominators. Restricting `k` to a window `lo..=hi` with `|k| ≤ K` and
//! scaling by `det^K` turns membership into an integer lattice problem.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::group::GroupParams;
use crate::linalg::IntVector;
use crate::oracle::OracleElement;

/// Row-style Hermite normal form: nonzero rows in echelon order with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    cols: usize,
}

impl Hnf {
    pub fn new(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..cols {
            if top >= rows.len() {
                break;
            }
            loop {
                // smallest nonzero entry at or below `top` becomes the pivot
                let Some(best) = (top..rows.len())
                    .filter(|&r| !rows[r][col].is_zero())
                    .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()))
                else {
                    break;
                };
                rows.swap(top, best);
                let mut done = true;
                for r in top + 1..rows.len() {
                    if rows[r][col].is_zero() {
                        continue;
                    }
                    let q = rows[r][col].div_floor(&rows[top][col]);
                    let pivot_row = rows[top].clone();
                    for (x, p) in rows[r].iter_mut().zip(&pivot_row) {
                        *x -= &q * p;
                    }
                    if !rows[r][col].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if rows[top][col].is_zero() {
                continue;
            }
            if rows[top][col].is_negative() {
                for x in rows[top].iter_mut() {
                    *x = -&*x;
                }
            }
            let pivot_row = rows[top].clone();
            for r in 0..top {
                let q = rows[r][col].div_floor(&pivot_row[col]);
                if !q.is_zero() {
                    for (x, p) in rows[r].iter_mut().zip(&pivot_row) {
                        *x -= &q * p;
                    }
                }
            }
            pivots.push(col);
            top += 1;
            rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        }
        rows.truncate(pivots.len());
        Hnf { rows, pivots, cols }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Exact integer-span membership.
    pub fn contains(&self, target: &[BigInt]) -> bool {
        assert_eq!(target.len(), self.cols);
        let mut t = target.to_vec();
        let mut next_col = 0;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if t[next_col..pc].iter().any(|x| !x.is_zero()) {
                return false;
            }
            let (q, r) = t[pc].div_rem(&row[pc]);
            if !r.is_zero() {
                return false;
            }
            for (x, b) in t.iter_mut().zip(row) {
                *x -= &q * b;
            }
            next_col = pc + 1;
        }
        t.iter().all(Zero::is_zero)
    }

    /// Residual after rounding each pivot coordinate to the nearest multiple
    /// (Babai-style rounding against the echelon basis).
    pub fn residual(&self, target: &[BigInt]) -> Vec<BigInt> {
        let mut t = target.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let p = &row[pc];
            // round(t/p) = floor((2t + p) / 2p)
            let q = (BigInt::from(2) * &t[pc] + p).div_floor(&(BigInt::from(2) * p));
            if !q.is_zero() {
                for (x, b) in t.iter_mut().zip(row) {
                    *x -= &q * b;
                }
            }
        }
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Member,
    NonMemberInWindow,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MembershipVerdict {
    pub value: Verdict,
    pub window: u64,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        self.value == Verdict::Member
    }
}

/// The lattice spanned by `{ gen·M^k : k ∈ lo..=hi }`, scaled by `det^K`.
#[derive(Clone, Debug)]
pub struct WindowLattice {
    window: u64,
    scale: BigInt,
    hnf: Hnf,
}

impl WindowLattice {
    /// `exponents` must lie within `-window..=window`.
    pub fn new(params: &GroupParams, gen: &IntVector, window: u64, exponents: RangeInclusive<i64>) -> Self {
        let k = window as i64;
        assert!(*exponents.start() >= -k && *exponents.end() <= k, "exponents outside window");
        let det = params.det();
        let scale = num_traits::pow(det.clone(), window as usize);
        let mut rows = Vec::new();
        // gen·M^-j·det^K = gen·adj^j·det^(K-j)
        let mut neg = gen.clone();
        for j in 1..=(-*exponents.start()).max(0) {
            neg = neg.mul_mat(params.adjugate());
            if -j >= *exponents.start() && -j <= *exponents.end() {
                let f = num_traits::pow(det.clone(), (k - j) as usize);
                rows.push(neg.scale(&f).into_entries());
            }
        }
        let mut pos = gen.clone();
        for j in 0..=(*exponents.end()).max(-1) {
            if j > 0 {
                pos = pos.mul_mat(params.matrix());
            }
            if j >= *exponents.start() {
                rows.push(pos.scale(&scale).into_entries());
            }
        }
        WindowLattice { window, scale, hnf: Hnf::new(rows, params.dim()) }
    }

    pub fn symmetric(params: &GroupParams, gen: &IntVector, window: u64) -> Self {
        let k = window as i64;
        Self::new(params, gen, window, -k..=k)
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn hnf(&self) -> &Hnf {
        &self.hnf
    }

    /// `det^K · a` when integral.
    fn scaled(&self, a: &[BigRational]) -> Option<Vec<BigInt>> {
        a.iter()
            .map(|x| {
                let s = x * BigRational::from_integer(self.scale.clone());
                s.is_integer().then(|| s.to_integer())
            })
            .collect()
    }

    pub fn verdict(&self, x: &OracleElement) -> MembershipVerdict {
        let value = if x.t_component() != 0 {
            Verdict::NonMemberInWindow
        } else {
            match self.scaled(x.base()) {
                None => Verdict::Unknown,
                Some(v) if self.hnf.contains(&v) => Verdict::Member,
                Some(_) => Verdict::NonMemberInWindow,
            }
        };
        MembershipVerdict { value, window: self.window }
    }

    /// Rounding residual of the base vector, in unscaled coordinates.
    /// `None` when the vector does not fit the window's denominators.
    pub fn residual(&self, a: &[BigRational]) -> Option<Vec<BigRational>> {
        let v = self.scaled(a)?;
        let denom = BigRational::from_integer(self.scale.clone());
        Some(self.hnf.residual(&v).into_iter().map(|x| BigRational::from_integer(x) / &denom).collect())
    }
}

/// Membership of `x` in the span of `{ gen·M^k : -K ≤ k ≤ K }`.
pub fn lattice_member(params: &GroupParams, x: &OracleElement, gen: &IntVector, window: u64) -> MembershipVerdict {
    WindowLattice::symmetric(params, gen, window).verdict(x)
}

pub fn lattice_member_vector(params: &GroupParams, v: &IntVector, gen: &IntVector, window: u64) -> MembershipVerdict {
    let x = OracleElement::new(v.entries().iter().map(|e| BigRational::from_integer(e.clone())).collect(), 0);
    lattice_member(params, &x, gen, window)
}

/// `log2(1 + |x|)` for an exact rational, as a float.
pub fn soft_bits(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let lg = |n: &BigInt| -> f64 {
        let bits = n.magnitude().bits();
        if bits <= 900 {
            let f: f64 = n.magnitude().to_string().parse().unwrap_or(f64::MAX);
            f.log2()
        } else {
            let shifted = n.magnitude() >> (bits - 64) as usize;
            let f: f64 = shifted.to_string().parse().unwrap_or(f64::MAX);
            f.log2() + (bits - 64) as f64
        }
    };
    let l = lg(x.numer()) - lg(x.denom());
    if l > 60.0 {
        l
    } else {
        (1.0 + l.exp2()).log2()
    }
}
