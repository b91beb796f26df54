//! Instance generators shared by the suites and the integration tests.

use rand::Rng;

use crate::error::{Error, Result};
use crate::kisin::HTWeights;
use crate::rings::{random, FiniteField, KMatrix, Matrix, Poly, PolyMatrix, SeriesMatrix, Valuation};
use crate::shape::ShapedMatrix;

/// A shape-lemma instance X = X1·X0 with X1 in (DEG) (diagonal u^δ), X0 in (P)
/// (diagonal u^t, |t_a - t_b| > max δ) and A ∈ GL_d(k_E) with u^{t_j} dividing
/// column j of X·A. Writing X0 = D·Y, the admissible A are exactly Y^{-1}·A'
/// with A' invertible and supported where t_i >= t_j.
pub fn sample_shape_instance<R: Rng + ?Sized>(
    k: FiniteField,
    d: usize,
    rng: &mut R,
) -> (ShapedMatrix, KMatrix, Vec<usize>, Vec<usize>) {
    let deltas: Vec<usize> = (0..d).map(|_| rng.gen_range(0..3)).collect();
    let gap = deltas.iter().copied().max().unwrap_or(0) + 1;
    let mut levels = Vec::with_capacity(d);
    let mut next = rng.gen_range(0..2);
    for _ in 0..d {
        levels.push(next);
        next += gap + rng.gen_range(0..2);
    }
    let sigma = random::permutation(d, rng);
    let t: Vec<usize> = sigma.iter().map(|&s| levels[s]).collect();

    let x1: PolyMatrix = Matrix::from_fn(d, d, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => random::poly_below(k, deltas[j], rng),
        std::cmp::Ordering::Equal => Poly::u_pow(k, deltas[i]),
        std::cmp::Ordering::Greater => Poly::zero(k),
    });
    let y: KMatrix = Matrix::from_fn(d, d, |i, j| {
        if i == j {
            k.one()
        } else if i < j && t[i] < t[j] {
            k.random(rng)
        } else {
            k.zero()
        }
    });
    let x0: PolyMatrix = Matrix::from_fn(d, d, |i, j| Poly::monomial(*y.get(i, j), t[i]));
    let ap: KMatrix = Matrix::from_fn(d, d, |i, j| {
        if i == j {
            k.random_nonzero(rng)
        } else if t[i] >= t[j] {
            k.random(rng)
        } else {
            k.zero()
        }
    });
    let a = y.invert().expect("unipotent").mul(&ap);
    let s: Vec<usize> = (0..d).map(|i| t[i] + deltas[i]).collect();
    let x = ShapedMatrix::new(x1.mul(&x0), s).expect("product of upper triangular shaped matrices");
    (x, a, t, deltas)
}

fn tame_row<R: Rng + ?Sized>(p: usize, d: usize, rng: &mut R) -> Option<Vec<Vec<usize>>> {
    let mut r1 = vec![0];
    for _ in 1..d {
        r1.push(r1.last().unwrap() + rng.gen_range(1..=2));
    }
    let r1d = r1[d - 1];
    let mut r0 = vec![0];
    for _ in 1..d {
        r0.push(r0.last().unwrap() + r1d + 1 + rng.gen_range(0..=1));
    }
    (r0[d - 1] + r1d + 2 <= p).then_some(vec![r0, r1])
}

/// Weights with e = 2 satisfying A1 and A2, f <= f_max and d <= d_max. When
/// no weights of the drawn d exist for this p, d is lowered.
pub fn sample_tame_weights<R: Rng + ?Sized>(p: u32, f_max: usize, d_max: usize, rng: &mut R) -> HTWeights {
    let f = rng.gen_range(1..=f_max.max(1));
    let mut d = rng.gen_range(1..=d_max.max(1));
    loop {
        let rows: Option<Vec<Vec<Vec<usize>>>> =
            (0..f).map(|_| (0..64).find_map(|_| tame_row(p as usize, d, rng))).collect();
        if let Some(r) = rows {
            let w = HTWeights::new(p, r).expect("generated weights are valid");
            debug_assert!(w.a1() && w.a2());
            return w;
        }
        d -= 1;
    }
}

/// Row reduction over k_E[[u]]: returns (M2, M1) with M2 invertible,
/// M1 = M2·N upper triangular, both exact at the precision of N.
pub fn triangularize(nm: &SeriesMatrix) -> Result<(SeriesMatrix, SeriesMatrix)> {
    let d = nm.rows();
    let n = nm.precision();
    let mut a = nm.truncate(n);
    let mut m2 = Matrix::identity_like(d, a.get(0, 0));
    for c in 0..d {
        let piv = (c..d)
            .filter_map(|r| a.get(r, c).u_valuation().finite().map(|v| (v, r)))
            .min()
            .ok_or_else(|| Error::NotInvertible(format!("column {c} vanishes below the diagonal")))?;
        let (v, pr) = (piv.0 as usize, piv.1);
        for m in [&mut a, &mut m2] {
            for col in 0..d {
                let (x, y) = (m.get(c, col).clone(), m.get(pr, col).clone());
                m.set(c, col, y);
                m.set(pr, col, x);
            }
        }
        let winv = a.get(c, c).div_u_pow(v)?.invert()?;
        for r in c + 1..d {
            if a.get(r, c).u_valuation() == Valuation::Infinity {
                continue;
            }
            let factor = (&a.get(r, c).div_u_pow(v)? * &winv).pad(n);
            for m in [&mut a, &mut m2] {
                for col in 0..d {
                    let e = m.get(r, col) - &(&factor * m.get(c, col));
                    m.set(r, col, e);
                }
            }
        }
    }
    Ok((m2, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triangularize_multiplies_back() {
        let k = FiniteField::prime(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let nm = random::gl_series(k, 3, 20, &mut rng).diag_u_pow_mul(&[0, 1, 3]);
            let (m2, m1) = triangularize(&nm).unwrap();
            assert!(m1.is_upper_triangular());
            assert!(m2.is_invertible());
            assert!(m2.mul(&nm).agrees_with(&m1));
        }
    }

    #[test]
    fn tame_weights_satisfy_hypotheses() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [11, 13] {
            for _ in 0..50 {
                let w = sample_tame_weights(p, 2, 4, &mut rng);
                assert!(w.a1() && w.a2() && w.d <= 3);
            }
        }
    }
}
