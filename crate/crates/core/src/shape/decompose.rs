//! F_i = C_i·(F_i)_1·(F_i)_0 for e = 2 under A1 and A2, driven by the
//! witness factorization F = T·X·Λ1·Z1·Λ0·S.
//!
//! With C = diag(a_x) the leading coefficients, F·C^{-1} = X_F satisfies
//! (DEG) with monic diagonal. First pass: A = C·S^{-1}·W0^{-1}, exponents
//! r0∘σ0 + r1∘σ1, γ = p, giving X_F = F1·F0. Second pass on F1 with
//! A = B·W0·Z1^{-1}·W1^{-1}, δ = 0 and γ = r_{1,d} certifies (P) for F1.
//! Conjugating both factors by C moves C to the left.

use serde_json::{json, Value};

use super::{check_deg, check_p, shape_factorize, ShapedMatrix};
use crate::error::{Error, Result};
use crate::kisin::{diag_shape_verify, HTWeights, PhiFamily};
use crate::rings::wire::matrix_to_value;
use crate::rings::{FieldElem, Matrix, Poly, PolyMatrix, SeriesMatrix, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiShapeFactors {
    pub c: Vec<FieldElem>,
    pub f1: ShapedMatrix,
    pub f0: ShapedMatrix,
    pub sigma0: Vec<usize>,
    pub sigma1: Vec<usize>,
}

impl PhiShapeFactors {
    /// C·F1·F0 at precision n.
    pub fn product(&self, n: usize) -> SeriesMatrix {
        let m = self.f1.matrix().mul(self.f0.matrix());
        Matrix::from_fn(m.rows(), m.cols(), |x, y| m.get(x, y).scale(self.c[x]).to_series(n))
    }

    pub fn to_value(&self, n: usize) -> Value {
        json!({
            "C": self.c.iter().map(|a| a.coeffs().to_vec()).collect::<Vec<_>>(),
            "F1": matrix_to_value(&self.f1.matrix().to_series(n)),
            "F0": matrix_to_value(&self.f0.matrix().to_series(n)),
            "sigma0": self.sigma0,
            "sigma1": self.sigma1,
        })
    }
}

fn compose(r: &[usize], sigma: &[usize]) -> Vec<usize> {
    sigma.iter().map(|&s| r[s]).collect()
}

/// Entry (x, y) scaled by c_y / c_x, i.e. C^{-1}·M·C.
fn conjugate(m: &PolyMatrix, c: &[FieldElem]) -> PolyMatrix {
    Matrix::from_fn(m.rows(), m.cols(), |x, y| m.get(x, y).scale(c[y] * c[x].inv().expect("nonzero")))
}

pub fn shape_decompose_phi(fam: &PhiFamily, w: &HTWeights) -> Result<Vec<PhiShapeFactors>> {
    if w.e != 2 {
        return Err(Error::HypothesisViolation(format!("e = {} (need 2)", w.e)));
    }
    if !w.a1() {
        return Err(Error::HypothesisViolation("weights fail A1".into()));
    }
    if !w.a2() {
        return Err(Error::HypothesisViolation("weights fail A2".into()));
    }
    if fam.f() != w.f || fam.dim() != w.d {
        return Err(Error::DimensionMismatch("family and weights disagree on f or d".into()));
    }
    fam.check_witnesses()?;
    let ws = fam.witnesses().expect("checked above");
    let (d, n) = (w.d, fam.precision());
    let k = fam.field();
    let p = w.p as usize;

    let mut out = Vec::with_capacity(w.f);
    for (i, (f, wit)) in fam.mats().iter().zip(ws).enumerate() {
        if wit.middle.len() != 1 {
            return Err(Error::WitnessMismatch(format!("witness {i} needs exactly one middle factor")));
        }
        let (lam1, z1) = &wit.middle[0];
        if lam1.as_slice() != w.r(i, 1) || wit.lambda0.as_slice() != w.r(i, 0) {
            return Err(Error::WitnessMismatch(format!("witness {i} exponents differ from the weights")));
        }
        if !wit.s.entries().all(|e| e.in_u_p_subring()) {
            return Err(Error::WitnessMismatch(format!("S_{i} is not over k_E[[u^p]]")));
        }
        if !f.is_upper_triangular() {
            return Err(Error::HypothesisViolation(format!("F_{i} is not upper triangular")));
        }

        // Diagonal a_x·u^{t_x} and (DEG) for F·C^{-1}.
        let mut t = Vec::with_capacity(d);
        let mut c = Vec::with_capacity(d);
        for x in 0..d {
            let Valuation::Finite(tx) = f.get(x, x).u_valuation() else {
                return Err(Error::HypothesisViolation(format!("F_{i} has a zero diagonal entry")));
            };
            let tx = tx as usize;
            let a = f.get(x, x).coeff(tx);
            if !f.get(x, x).coeffs()[tx + 1..].iter().all(|e| e.is_zero()) {
                return Err(Error::HypothesisViolation(format!("diagonal entry {x} of F_{i} is not a monomial")));
            }
            t.push(tx);
            c.push(a);
        }
        let cinv: Vec<FieldElem> = c.iter().map(|a| a.inv().expect("nonzero")).collect();
        let xf: PolyMatrix = Matrix::from_fn(d, d, |x, y| f.get(x, y).to_poly().scale(cinv[y]));
        let xf = ShapedMatrix::new(xf, t.clone())?;
        if !check_deg(&xf) {
            return Err(Error::HypothesisViolation(format!("F_{i} does not satisfy (DEG)")));
        }

        let Some(pairs) = diag_shape_verify(
            &[t.clone()],
            &HTWeights::uniform(w.p, 1, vec![w.r(i, 0).to_vec(), w.r(i, 1).to_vec()])?,
        )?
        else {
            return Err(Error::HypothesisViolation(format!("diagonal of F_{i} is not r0∘σ0 + r1∘σ1")));
        };
        let (sigma0, sigma1) = pairs.into_iter().next().expect("f = 1");
        let t0 = compose(w.r(i, 0), &sigma0);
        let t1 = compose(w.r(i, 1), &sigma1);

        let sample = f.get(0, 0);
        let w0 = Matrix::permutation(&sigma0, sample);
        let w1 = Matrix::permutation(&sigma1, sample);
        let cmat = Matrix::diagonal(&c.iter().map(|&a| crate::rings::TruncSeries::constant(a, n)).collect::<Vec<_>>());
        let a_first = cmat.mul(&wit.s.invert()?).mul(&w0.transpose());
        let first = shape_factorize(&xf, &a_first, &t0, &t1, Some(p))?;

        let z1inv = z1.invert()?.to_series(first.b.precision());
        let a_second = first
            .b
            .mul(&w0.truncate(first.b.precision()))
            .mul(&z1inv)
            .mul(&w1.transpose().truncate(first.b.precision()));
        let second = shape_factorize(&first.x1, &a_second, &t1, &vec![0; d], Some(w.r(i, 1)[d - 1]))?;
        let id: PolyMatrix = Matrix::identity_like(d, &Poly::one(k));
        if second.x1.matrix() != &id || second.x0 != first.x1 || !check_p(&first.x1) || !check_p(&first.x0) {
            return Err(Error::HypothesisViolation(format!("F_{i}: first factor is not in (P)")));
        }

        let f1 = ShapedMatrix::new(conjugate(first.x1.matrix(), &c), t1)?;
        let f0 = ShapedMatrix::new(conjugate(first.x0.matrix(), &c), t0)?;
        let factors = PhiShapeFactors { c, f1, f0, sigma0, sigma1 };
        if !factors.product(n).agrees_with(f) {
            return Err(Error::HypothesisViolation(format!("C·F1·F0 differs from F_{i}")));
        }
        out.push(factors);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kisin::make_triangular_instance;
    use crate::rings::FiniteField;

    #[test]
    fn two_by_two_generated() {
        let k = FiniteField::prime(11).unwrap();
        let w = HTWeights::uniform(11, 1, vec![vec![0, 5], vec![0, 1]]).unwrap();
        for (s0, s1) in [([0, 1], [0, 1]), ([1, 0], [1, 0]), ([1, 0], [0, 1]), ([0, 1], [1, 0])] {
            for seed in 0..4 {
                let fam = make_triangular_instance(&w, k, 44, &[s0.to_vec()], &[s1.to_vec()], seed).unwrap();
                let got = shape_decompose_phi(&fam, &w).unwrap();
                assert!(check_p(&got[0].f1) && check_p(&got[0].f0));
                assert_eq!(got[0].sigma0, s0.to_vec());
                assert_eq!(got[0].sigma1, s1.to_vec());
            }
        }
    }

    #[test]
    fn rank_one() {
        let k = FiniteField::prime(7).unwrap();
        let w = HTWeights::uniform(7, 1, vec![vec![0], vec![0]]).unwrap();
        let fam = crate::kisin::make_triangular_from_factors(
            &w,
            &[Matrix::diagonal(&[crate::rings::TruncSeries::constant(k.from_int(3), 28)])],
            &[Matrix::diagonal(&[k.one()])],
            &[vec![0]],
            &[vec![0]],
        )
        .unwrap();
        let got = shape_decompose_phi(&fam, &w).unwrap();
        assert_eq!(got[0].c, vec![k.from_int(3)]);
        assert_eq!(got[0].f1, ShapedMatrix::diagonal(k, &[0]));
    }

    #[test]
    fn weights_outside_a2_are_refused() {
        let k = FiniteField::prime(5).unwrap();
        let w = HTWeights::uniform(5, 1, vec![vec![0, 3], vec![0, 1]]).unwrap();
        let fam = PhiFamily::new(vec![Matrix::identity_like(2, &crate::rings::TruncSeries::one(k, 20))], None).unwrap();
        assert!(matches!(shape_decompose_phi(&fam, &w), Err(Error::HypothesisViolation(_))));
    }
}
