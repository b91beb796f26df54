//! Seeded φ-family generators: the adapted-basis shape modulo ω_E and planted
//! upper-triangular instances with prescribed permutations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{HTWeights, PhiFamily, PhiWitness};
use crate::error::{Error, Result};
use crate::rings::{random, FiniteField, KMatrix, Matrix, SeriesMatrix, TruncSeries};
use crate::shape::normalize_to_deg;

fn compose(r: &[usize], sigma: &[usize]) -> Vec<usize> {
    sigma.iter().map(|&s| r[s]).collect()
}

fn is_permutation(sigma: &[usize], d: usize) -> bool {
    let mut seen = vec![false; d];
    sigma.len() == d && sigma.iter().all(|&s| s < d && !std::mem::replace(&mut seen[s], true))
}

/// F_i = X̄_i·(∏_{j=1}^{e-1} diag(u^{r_{i,e-j}})·Z̄_{i,e-j})·diag(u^{r_{i,0}}), with
/// T_i = S_i = Id as witnesses.
pub fn make_adapted_phi(w: &HTWeights, k: FiniteField, n: usize, seed: u64) -> Result<PhiFamily> {
    w.validate()?;
    if k.p() != w.p {
        return Err(Error::BadParameters(format!("field characteristic {} but weights for p = {}", k.p(), w.p)));
    }
    if !w.a0() {
        return Err(Error::HypothesisViolation("weights fail A0".into()));
    }
    if w.e.is_multiple_of(w.p as usize) {
        return Err(Error::HypothesisViolation(format!("p = {} divides e = {}", w.p, w.e)));
    }
    let top: usize = w.r.iter().map(|ri| ri.iter().map(|rij| rij[w.d - 1]).sum::<usize>()).max().unwrap_or(0);
    if top >= n {
        return Err(Error::PrecisionExhausted(format!("weights reach u^{top} at precision {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = Matrix::identity_like(w.d, &TruncSeries::one(k, n));
    let mut mats = Vec::with_capacity(w.f);
    let mut witnesses = Vec::with_capacity(w.f);
    for i in 0..w.f {
        let x = random::gl_series(k, w.d, n, &mut rng);
        let middle = (1..w.e).rev().map(|j| (w.r(i, j).to_vec(), random::gl_const(k, w.d, &mut rng))).collect();
        let wit = PhiWitness { t: id.clone(), x, middle, lambda0: w.r(i, 0).to_vec(), s: id.clone() };
        mats.push(wit.product());
        witnesses.push(wit);
    }
    PhiFamily::new(mats, Some(witnesses))
}

/// F_i = X'_i·diag(u^{r_{i,1}∘σ1})·Z'_i·diag(u^{r_{i,0}∘σ0}) for given upper
/// triangular X'_i, Z'_i, without normalization.
///
/// Witnesses: T = W0, X = W0^{-1}X'W1, Z1 = W1^{-1}Z'W0, S = W0^{-1}. The
/// cyclic condition S_i = φ(T_{i-1}^{-1}) then needs σ0 independent of i.
pub fn make_triangular_from_factors(
    w: &HTWeights,
    xs: &[SeriesMatrix],
    zs: &[KMatrix],
    sigma0: &[Vec<usize>],
    sigma1: &[Vec<usize>],
) -> Result<PhiFamily> {
    w.validate()?;
    if w.e != 2 || !w.a1() || !w.a2() {
        return Err(Error::HypothesisViolation("planted instances need e = 2 and weights satisfying A1, A2".into()));
    }
    let (f, d) = (w.f, w.d);
    if xs.len() != f || zs.len() != f || sigma0.len() != f || sigma1.len() != f {
        return Err(Error::DimensionMismatch(format!("need {f} factors and permutations")));
    }
    if sigma0.iter().chain(sigma1).any(|s| !is_permutation(s, d)) {
        return Err(Error::BadParameters(format!("σ must be permutations of 0..{d}")));
    }
    if sigma0.iter().any(|s| *s != sigma0[0]) {
        return Err(Error::HypothesisViolation("σ0 must not depend on i for consistent witnesses".into()));
    }
    let mut mats = Vec::with_capacity(f);
    let mut witnesses = Vec::with_capacity(f);
    for i in 0..f {
        let (x, z) = (&xs[i], &zs[i]);
        if x.rows() != d
            || !x.is_upper_triangular()
            || !x.is_invertible()
            || !z.is_upper_triangular()
            || !z.is_invertible()
        {
            return Err(Error::HypothesisViolation(format!(
                "X'_{i}, Z'_{i} must be invertible upper triangular of size {d}"
            )));
        }
        let n = x.precision();
        let sample = x.get(0, 0);
        let k = x.field();
        let w0 = Matrix::permutation(&sigma0[i], sample);
        let w1 = Matrix::permutation(&sigma1[i], sample);
        let (w0k, w1k) = (Matrix::permutation(&sigma0[i], &k.one()), Matrix::permutation(&sigma1[i], &k.one()));
        let planted = x
            .mul_diag_u_pow(&compose(w.r(i, 1), &sigma1[i]))
            .mul(&z.to_series(n))
            .mul_diag_u_pow(&compose(w.r(i, 0), &sigma0[i]));
        let wit = PhiWitness {
            t: w0.clone(),
            x: w0.transpose().mul(x).mul(&w1),
            middle: vec![(w.r(i, 1).to_vec(), w1k.transpose().mul(z).mul(&w0k))],
            lambda0: w.r(i, 0).to_vec(),
            s: w0.transpose(),
        };
        mats.push(planted);
        witnesses.push(wit);
    }
    PhiFamily::new(mats, Some(witnesses))
}

/// Planted instance with seeded-random X', Z', brought to (DEG) by
/// `normalize_to_deg` (witnesses transported along).
pub fn make_triangular_instance(
    w: &HTWeights,
    k: FiniteField,
    n: usize,
    sigma0: &[Vec<usize>],
    sigma1: &[Vec<usize>],
    seed: u64,
) -> Result<PhiFamily> {
    if k.p() != w.p {
        return Err(Error::BadParameters(format!("field characteristic {} but weights for p = {}", k.p(), w.p)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<SeriesMatrix> = (0..w.f).map(|_| random::upper_gl_series(k, w.d, n, &mut rng)).collect();
    let zs: Vec<KMatrix> = (0..w.f).map(|_| random::upper_gl_const(k, w.d, &mut rng)).collect();
    let raw = make_triangular_from_factors(w, &xs, &zs, sigma0, sigma1)?;
    Ok(normalize_to_deg(&raw)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::Valuation;

    fn w11() -> HTWeights {
        HTWeights::uniform(11, 1, vec![vec![0, 5], vec![0, 1]]).unwrap()
    }

    #[test]
    fn adapted_scalar_collapse() {
        let k = FiniteField::prime(7).unwrap();
        let w = HTWeights::uniform(7, 1, vec![vec![0], vec![0]]).unwrap();
        let fam = make_adapted_phi(&w, k, 28, 1).unwrap();
        let wit = &fam.witnesses().unwrap()[0];
        let xz = wit.x.get(0, 0).scale(*wit.middle[0].1.get(0, 0));
        assert_eq!(fam.mats()[0].get(0, 0), &xz);
        fam.check_witnesses().unwrap();
    }

    #[test]
    fn adapted_is_deterministic_with_right_determinant() {
        let k = FiniteField::new(11, 1).unwrap();
        let w = HTWeights::new(11, vec![vec![vec![0, 3], vec![0, 2]], vec![vec![0, 1], vec![0, 4]]]).unwrap();
        let a = make_adapted_phi(&w, k, 44, 9).unwrap();
        let b = make_adapted_phi(&w, k, 44, 9).unwrap();
        assert_eq!(a.to_value().to_string(), b.to_value().to_string());
        assert_ne!(a, make_adapted_phi(&w, k, 44, 10).unwrap());
        assert_eq!(a.mats()[0].det().u_valuation(), Valuation::Finite(5));
        assert_eq!(a.mats()[1].det().u_valuation(), Valuation::Finite(5));
    }

    #[test]
    fn adapted_rejects_wild_e() {
        let k = FiniteField::prime(2).unwrap();
        let w = HTWeights::uniform(2, 1, vec![vec![0], vec![0]]).unwrap();
        assert!(matches!(make_adapted_phi(&w, k, 8, 0), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn identity_factors_give_diagonal() {
        let k = FiniteField::prime(11).unwrap();
        let n = 44;
        let id = Matrix::identity_like(2, &TruncSeries::one(k, n));
        let idk = Matrix::identity_like(2, &k.one());
        let fam = make_triangular_from_factors(&w11(), &[id], &[idk], &[vec![0, 1]], &[vec![0, 1]]).unwrap();
        assert!(fam.mats()[0].is_diagonal());
        assert_eq!(fam.mats()[0].diag_valuations(), vec![Valuation::Finite(0), Valuation::Finite(6)]);
        fam.check_witnesses().unwrap();
    }

    #[test]
    fn swapped_permutations() {
        let k = FiniteField::prime(11).unwrap();
        let fam = make_triangular_instance(&w11(), k, 44, &[vec![1, 0]], &[vec![1, 0]], 3).unwrap();
        let f = &fam.mats()[0];
        assert!(f.is_upper_triangular());
        assert_eq!(f.diag_valuations(), vec![Valuation::Finite(6), Valuation::Finite(0)]);
        assert_eq!(f.det().u_valuation(), Valuation::Finite(6));
        fam.check_witnesses().unwrap();
    }
}
