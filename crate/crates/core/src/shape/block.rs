//! Block-sum linearity: two block factorizations of [[A, C],[0, A']] sharing
//! the diagonal factors combine to one for a·C^(1) + b·C^(2).

use crate::error::{Error, Result};
use crate::rings::{FieldElem, Matrix, SeriesMatrix};

/// The shared diagonal data: A = A1·A0 and A' = A'1·A'0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockFactorization {
    pub a: SeriesMatrix,
    pub a_prime: SeriesMatrix,
    pub a1: SeriesMatrix,
    pub a0: SeriesMatrix,
    pub a1_prime: SeriesMatrix,
    pub a0_prime: SeriesMatrix,
}

/// An off-diagonal block with C = A1·C0 + C1·A'0, so that
/// [[A, C],[0, A']] = [[A1, C1],[0, A'1]]·[[A0, C0],[0, A'0]].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtClass {
    pub c: SeriesMatrix,
    pub c1: SeriesMatrix,
    pub c0: SeriesMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSum {
    pub class: ExtClass,
    pub full: SeriesMatrix,
    pub left: SeriesMatrix,
    pub right: SeriesMatrix,
}

fn zero_block(rows: usize, cols: usize, like: &SeriesMatrix) -> SeriesMatrix {
    Matrix::zeros_like(rows, cols, like.get(0, 0))
}

fn class_holds(f: &BlockFactorization, x: &ExtClass) -> bool {
    f.a1.mul(&x.c0).add(&x.c1.mul(&f.a0_prime)).agrees_with(&x.c)
}

pub fn ext_block_sum(
    f: &BlockFactorization,
    x: &ExtClass,
    y: &ExtClass,
    a: FieldElem,
    b: FieldElem,
) -> Result<BlockSum> {
    let (d, dp) = (f.a.rows(), f.a_prime.rows());
    for (name, m, r, c) in [("C", &x.c, d, dp), ("C1", &x.c1, d, dp), ("C0", &x.c0, d, dp)] {
        if m.rows() != r || m.cols() != c || y.c.rows() != d || y.c.cols() != dp {
            return Err(Error::DimensionMismatch(format!("{name} must be {r}x{c}")));
        }
    }
    if !f.a1.mul(&f.a0).agrees_with(&f.a) || !f.a1_prime.mul(&f.a0_prime).agrees_with(&f.a_prime) {
        return Err(Error::InputNotFactored("diagonal blocks do not factor".into()));
    }
    if !class_holds(f, x) || !class_holds(f, y) {
        return Err(Error::InputNotFactored("off-diagonal block is not A1·C0 + C1·A'0".into()));
    }
    let comb = |p: &SeriesMatrix, q: &SeriesMatrix| p.map(|s| s.scale(a)).add(&q.map(|s| s.scale(b)));
    let class = ExtClass { c: comb(&x.c, &y.c), c1: comb(&x.c1, &y.c1), c0: comb(&x.c0, &y.c0) };
    let z = zero_block(dp, d, &f.a);
    let full = Matrix::block(&f.a, &class.c, &z, &f.a_prime);
    let left = Matrix::block(&f.a1, &class.c1, &z, &f.a1_prime);
    let right = Matrix::block(&f.a0, &class.c0, &z, &f.a0_prime);
    if !left.mul(&right).agrees_with(&full) {
        return Err(Error::InputNotFactored("combined block identity failed".into()));
    }
    Ok(BlockSum { class, full, left, right })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{random, FiniteField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance(k: FiniteField, seed: u64) -> (BlockFactorization, ExtClass, ExtClass) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 12;
        let (a1, a0) = (random::gl_series(k, 2, n, &mut rng), random::gl_series(k, 2, n, &mut rng));
        let (b1, b0) = (random::gl_series(k, 1, n, &mut rng), random::gl_series(k, 1, n, &mut rng));
        let f = BlockFactorization { a: a1.mul(&a0), a_prime: b1.mul(&b0), a1, a0, a1_prime: b1, a0_prime: b0 };
        let mut class = || {
            let c1 = Matrix::from_fn(2, 1, |_, _| random::series(k, n, &mut rng));
            let c0 = Matrix::from_fn(2, 1, |_, _| random::series(k, n, &mut rng));
            ExtClass { c: f.a1.mul(&c0).add(&c1.mul(&f.a0_prime)), c1, c0 }
        };
        let (x, y) = (class(), class());
        (f, x, y)
    }

    #[test]
    fn unit_combination_returns_first() {
        let k = FiniteField::prime(3).unwrap();
        let (f, x, y) = instance(k, 1);
        let s = ext_block_sum(&f, &x, &y, k.one(), k.zero()).unwrap();
        assert_eq!(s.class, x);
    }

    #[test]
    fn linear_combinations_hold() {
        let k = FiniteField::prime(5).unwrap();
        for seed in 0..5 {
            let (f, x, y) = instance(k, seed);
            ext_block_sum(&f, &x, &y, k.from_int(2), k.from_int(3)).unwrap();
        }
    }

    #[test]
    fn unfactored_input_is_rejected() {
        let k = FiniteField::prime(3).unwrap();
        let (f, mut x, y) = instance(k, 2);
        x.c = x.c.add(&Matrix::from_fn(2, 1, |_, _| crate::rings::TruncSeries::one(k, 12)));
        assert!(matches!(ext_block_sum(&f, &x, &y, k.one(), k.one()), Err(Error::InputNotFactored(_))));
    }
}
