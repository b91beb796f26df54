use kisinlab::filtration::{build_h, check_coe2, check_coe2_u_basis, check_property_a, taylor_twist};
use kisinlab::localfield::{
    check_property_b, eisenstein_roots_lf, expand_at, LPolynomial, LocalCtx, LocalFieldElem, LocalRingElem,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ring_elem<R: Rng>(ctx: LocalCtx, rng: &mut R) -> LocalRingElem {
    let q = (ctx.p() as i64).pow(ctx.big_m());
    let c: Vec<i64> = (0..ctx.e0()).map(|_| rng.gen_range(0..q)).collect();
    LocalRingElem::from_coeffs(ctx, &c).unwrap()
}

/// Σ b_i (u - π)^i with v(b_i) >= floor_i.
fn with_expansion<R: Rng>(ctx: LocalCtx, pi: &LocalFieldElem, floors: &[i64], rng: &mut R) -> LPolynomial {
    let b: Vec<LocalFieldElem> = floors
        .iter()
        .map(|&k| &LocalFieldElem::from_ring(&ring_elem(ctx, rng)) * &LocalFieldElem::uniformizer(ctx).pow_signed(k))
        .collect();
    LPolynomial::from_expansion(&b, pi)
}

trait PowSigned {
    fn pow_signed(&self, k: i64) -> LocalFieldElem;
}

impl PowSigned for LocalFieldElem {
    fn pow_signed(&self, k: i64) -> LocalFieldElem {
        if k >= 0 {
            self.pow(k as u64)
        } else {
            self.inv().unwrap().pow((-k) as u64)
        }
    }
}

#[test]
fn property_a_and_coe2_grid() {
    for (e0, p) in [(2u32, 5u64), (4, 5), (2, 13), (4, 13)] {
        let ctx = LocalCtx::new(p, 8, e0).unwrap();
        let pis = eisenstein_roots_lf(ctx);
        for r in 1..=3 {
            for j in 1..e0 as usize {
                let rec = build_h(j, &pis, &vec![r; j]).unwrap();
                assert!(check_property_a(&rec).unwrap(), "A: e0={e0} p={p} r={r} j={j}");
                for l in 1..p as usize {
                    assert!(check_coe2(&rec, l).unwrap(), "Coe-2: e0={e0} p={p} r={r} j={j} ℓ={l}");
                }
            }
        }
    }
}

#[test]
fn coe2_u_basis_cross_check() {
    for (e0, p) in [(2u32, 5u64), (4, 5), (2, 7)] {
        let ctx = LocalCtx::new(p, 10, e0).unwrap();
        let pis = eisenstein_roots_lf(ctx);
        for r in 1..=3 {
            let rec = build_h(1, &pis, &[r]).unwrap();
            for l in 1..p as usize {
                assert_eq!(check_coe2(&rec, l).unwrap(), check_coe2_u_basis(&rec, l).unwrap());
            }
        }
    }
}

#[test]
fn tame_differences_have_valuation_one() {
    for (e0, p) in [(2u32, 3u64), (2, 5), (2, 7), (2, 13), (4, 5), (4, 13)] {
        let ctx = LocalCtx::new(p, 6, e0).unwrap();
        let pis = eisenstein_roots_lf(ctx);
        for a in 0..pis.len() {
            for b in 0..pis.len() {
                if a != b {
                    let v = (&pis[a] - &pis[b]).valuation().unwrap();
                    assert_eq!(v, kisinlab::rings::Valuation::Finite(1), "e0={e0} p={p} ({a},{b})");
                }
            }
        }
    }
}

#[test]
fn valuation_combination_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ctx = LocalCtx::new(5, 12, 2).unwrap();
    let pis = eisenstein_roots_lf(ctx);
    let p = 5i64;
    for _ in 0..100 {
        let pi = &pis[rng.gen_range(0..2)];
        let g_floors: Vec<i64> = (0..rng.gen_range(1..5)).map(|i: i64| -i).collect();
        let w_floors: Vec<i64> = (0..rng.gen_range(1..5)).map(|i: i64| p - i).collect();
        let g = with_expansion(ctx, pi, &g_floors, &mut rng);
        let w = with_expansion(ctx, pi, &w_floors, &mut rng);
        for (m, b) in expand_at(&(&g * &w), pi).iter().enumerate() {
            assert_eq!(b.valuation_at_least(p - m as i64), Some(true));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn property_b_closed_under_products(seed in any::<u64>(), d1 in 1usize..5, d2 in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = LocalCtx::new(7, 10, 2).unwrap();
        let pis = eisenstein_roots_lf(ctx);
        let pi = &pis[rng.gen_range(0..2)];
        let floors = |d: usize| (0..d as i64).map(|i| -i).collect::<Vec<_>>();
        let f1 = with_expansion(ctx, pi, &floors(d1), &mut rng);
        let f2 = with_expansion(ctx, pi, &floors(d2), &mut rng);
        prop_assert!(check_property_b(&f1, pi).unwrap());
        prop_assert!(check_property_b(&(&f1 * &f2), pi).unwrap());
    }

    #[test]
    fn twist_preserves_values_at_lower_roots(seed in any::<u64>(), deg in 0usize..6, n in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = LocalCtx::new(5, 10, 4).unwrap();
        let pis = eisenstein_roots_lf(ctx);
        let j = rng.gen_range(1..4);
        let rbars: Vec<usize> = (0..j).map(|_| rng.gen_range(0..4)).collect();
        let rec = build_h(j, &pis, &rbars).unwrap();
        let f = LPolynomial::new(ctx, (0..=deg).map(|_| LocalFieldElem::from_ring(&ring_elem(ctx, &mut rng))).collect());
        let t = taylor_twist(std::slice::from_ref(&f), &rec, n).unwrap();
        for pi in &pis[..=j] {
            prop_assert!(t[0].eval(pi).agrees_with(&f.eval(pi)));
        }
    }
}
