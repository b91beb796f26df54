use kisinlab::rings::{random, FiniteField, KMatrix, Matrix, Poly, PolyMatrix};
use kisinlab::shape::{check_deg, check_p, shape_factorize, ShapedMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exponents t with pairwise gaps above max δ, and δ.
fn exponents<R: Rng>(d: usize, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let deltas: Vec<usize> = (0..d).map(|_| rng.gen_range(0..3)).collect();
    let gap = deltas.iter().copied().max().unwrap() + 1;
    let mut levels: Vec<usize> = (0..d).map(|i| i * gap + rng.gen_range(0..2) * (i > 0) as usize).collect();
    for i in 1..d {
        levels[i] = levels[i].max(levels[i - 1] + gap);
    }
    let sigma = random::permutation(d, rng);
    (sigma.iter().map(|&s| levels[s]).collect(), deltas)
}

fn sample<R: Rng>(k: FiniteField, d: usize, rng: &mut R) -> (ShapedMatrix, KMatrix, Vec<usize>, Vec<usize>) {
    let (t, deltas) = exponents(d, rng);
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
    // A' supported where t_i >= t_j with units on the diagonal; A = Y^{-1}·A'.
    let ap: KMatrix = Matrix::from_fn(d, d, |i, j| {
        if i == j {
            k.random_nonzero(rng)
        } else if t[i] >= t[j] {
            k.random(rng)
        } else {
            k.zero()
        }
    });
    let a = y.invert().unwrap().mul(&ap);
    let s: Vec<usize> = (0..d).map(|i| t[i] + deltas[i]).collect();
    (ShapedMatrix::new(x1.mul(&x0), s).unwrap(), a, t, deltas)
}

#[test]
fn five_hundred_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..500 {
        let k = [FiniteField::prime(3).unwrap(), FiniteField::prime(5).unwrap(), FiniteField::new(2, 2).unwrap()]
            [trial % 3];
        let d = 1 + trial % 4;
        let (x, a, t, deltas) = sample(k, d, &mut rng);
        let n = t.iter().max().unwrap() + deltas.iter().max().unwrap() + 8;
        let f = shape_factorize(&x, &a.to_series(n), &t, &deltas, None)
            .unwrap_or_else(|e| panic!("trial {trial}: {e} for t = {t:?}, δ = {deltas:?}"));
        assert_eq!(&f.x1.matrix().mul(f.x0.matrix()), x.matrix());
        assert!(check_p(&f.x0) && check_deg(&f.x1));
        assert_eq!(f.x0.exponents(), t.as_slice());
        let delta = *deltas.iter().max().unwrap();
        assert!(f.b.in_gl_const_plus_u_pow(delta));
    }
}

#[test]
fn gamma_variant_matches_constant_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let k = FiniteField::prime(5).unwrap();
    for _ in 0..100 {
        let d = rng.gen_range(1..=3);
        let (x, a, t, deltas) = sample(k, d, &mut rng);
        let gamma = (t.iter().max().unwrap() + deltas.iter().max().unwrap()).max(1);
        let n = gamma + 10;
        let tail = Matrix::from_fn(d, d, |_, _| random::series(k, n, &mut rng).shift_up(gamma));
        let full = a.to_series(n).add(&tail);
        let g = shape_factorize(&x, &full, &t, &deltas, Some(gamma)).unwrap();
        let c = shape_factorize(&x, &a.to_series(n), &t, &deltas, None).unwrap();
        assert_eq!(g.x0, c.x0);
        assert_eq!(g.x1, c.x1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn factorization_multiplies_back(seed in any::<u64>(), d in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = FiniteField::prime(7).unwrap();
        let (x, a, t, deltas) = sample(k, d, &mut rng);
        let f = shape_factorize(&x, &a.to_series(30), &t, &deltas, None).unwrap();
        prop_assert_eq!(&f.x1.matrix().mul(f.x0.matrix()), x.matrix());
        let back = f.x0.matrix().to_series(30).mul(&a.to_series(30));
        prop_assert!(back.agrees_with(&f.b.raise_columns_u_pow(&t)));
    }
}
