//! Seeded samplers for test instances. Everything takes an explicit `Rng`;
//! rejection loops terminate quickly because a random matrix over F_q is
//! invertible with probability at least 1 - 1/q - 1/q^2 > 1/4.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{FiniteField, KMatrix, Matrix, Poly, SeriesMatrix, TruncSeries};

pub fn series<R: Rng + ?Sized>(k: FiniteField, n: usize, rng: &mut R) -> TruncSeries {
    TruncSeries::new(k, (0..n).map(|_| k.random(rng)).collect())
}

pub fn unit_series<R: Rng + ?Sized>(k: FiniteField, n: usize, rng: &mut R) -> TruncSeries {
    let mut coeffs = series(k, n, rng).coeffs().to_vec();
    coeffs[0] = k.random_nonzero(rng);
    TruncSeries::new(k, coeffs)
}

/// Uniform polynomial of degree < `bound` (possibly zero).
pub fn poly_below<R: Rng + ?Sized>(k: FiniteField, bound: usize, rng: &mut R) -> Poly {
    Poly::new(k, (0..bound).map(|_| k.random(rng)).collect())
}

pub fn gl_const<R: Rng + ?Sized>(k: FiniteField, d: usize, rng: &mut R) -> KMatrix {
    loop {
        let m = Matrix::from_fn(d, d, |_, _| k.random(rng));
        if m.is_invertible() {
            return m;
        }
    }
}

pub fn unipotent<R: Rng + ?Sized>(k: FiniteField, d: usize, rng: &mut R) -> KMatrix {
    Matrix::from_fn(d, d, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => k.one(),
        std::cmp::Ordering::Less => k.random(rng),
        std::cmp::Ordering::Greater => k.zero(),
    })
}

/// Invertible upper-triangular matrix over k_E.
pub fn upper_gl_const<R: Rng + ?Sized>(k: FiniteField, d: usize, rng: &mut R) -> KMatrix {
    Matrix::from_fn(d, d, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => k.random_nonzero(rng),
        std::cmp::Ordering::Less => k.random(rng),
        std::cmp::Ordering::Greater => k.zero(),
    })
}

/// Element of GL_d(k_E + u^j k_E[[u]]) at precision n: an invertible constant
/// matrix plus u^j times a random series matrix.
pub fn gl_const_plus_u_pow<R: Rng + ?Sized>(k: FiniteField, d: usize, j: usize, n: usize, rng: &mut R) -> SeriesMatrix {
    let c = gl_const(k, d, rng).to_series(n);
    let tail = Matrix::from_fn(d, d, |_, _| series(k, n, rng).shift_up(j));
    c.add(&tail)
}

/// Element of GL_d(k_E[[u]]) at precision n.
pub fn gl_series<R: Rng + ?Sized>(k: FiniteField, d: usize, n: usize, rng: &mut R) -> SeriesMatrix {
    gl_const_plus_u_pow(k, d, 1, n, rng)
}

/// Invertible upper-triangular element of GL_d(k_E[[u]]).
pub fn upper_gl_series<R: Rng + ?Sized>(k: FiniteField, d: usize, n: usize, rng: &mut R) -> SeriesMatrix {
    Matrix::from_fn(d, d, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => unit_series(k, n, rng),
        std::cmp::Ordering::Less => series(k, n, rng),
        std::cmp::Ordering::Greater => TruncSeries::zero(k, n),
    })
}

pub fn permutation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<usize> {
    let mut sigma: Vec<usize> = (0..d).collect();
    sigma.shuffle(rng);
    sigma
}
