//! Random instances shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subset_kex::{GroupElement, GroupParams, GroupWord, IntVector, Token};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random nonsingular `m×m` matrix with entries in `-bound..=bound`.
pub fn random_params<R: Rng>(rng: &mut R, m: usize, bound: i64) -> GroupParams {
    loop {
        let rows: Vec<Vec<i64>> = (0..m).map(|_| (0..m).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
        if let Ok(g) = GroupParams::from_i64s(&rows) {
            return g;
        }
    }
}

pub fn random_token<R: Rng>(rng: &mut R, m: usize) -> Token {
    match rng.gen_range(0..2 * m + 2) {
        i if i < m => Token::gen(i),
        i if i < 2 * m => Token::gen_inv(i - m),
        i if i == 2 * m => Token::T,
        _ => Token::TInv,
    }
}

pub fn random_word<R: Rng>(rng: &mut R, m: usize, max_len: usize) -> GroupWord {
    let n = rng.gen_range(0..=max_len);
    GroupWord::new((0..n).map(|_| random_token(rng, m)).collect())
}

pub fn random_element<R: Rng>(rng: &mut R, g: &GroupParams, max_len: usize) -> GroupElement {
    g.evaluate_word(&random_word(rng, g.dim(), max_len)).unwrap()
}

pub fn random_vector<R: Rng>(rng: &mut R, m: usize, bound: i64) -> IntVector {
    IntVector::from_i64s(&(0..m).map(|_| rng.gen_range(-bound..=bound)).collect::<Vec<_>>())
}

pub fn nonzero_vector<R: Rng>(rng: &mut R, m: usize, bound: i64) -> IntVector {
    loop {
        let v = random_vector(rng, m, bound);
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn upper() -> GroupParams {
    GroupParams::from_i64s(&[vec![2, 1], vec![0, 3]]).unwrap()
}
