//! The diagonal-shape verifier and φ-shape membership for e = 2.

use super::{next_permutation, HTWeights, PhiFamily};
use crate::error::{Error, Result};
use crate::rings::{FieldElem, Matrix, Poly, PolyMatrix, SeriesMatrix, Valuation};
use crate::shape::{check_p, PhiShapeFactors, ShapedMatrix};

pub type SigmaPair = (Vec<usize>, Vec<usize>);

/// σ1 forced by σ0: r_1(σ1(x)) = t_x - r_0(σ0(x)), with r_1 strictly increasing.
fn forced_sigma1(t: &[usize], r0: &[usize], r1: &[usize], sigma0: &[usize]) -> Option<Vec<usize>> {
    let d = t.len();
    let mut used = vec![false; d];
    let mut sigma1 = Vec::with_capacity(d);
    for x in 0..d {
        let rest = t[x].checked_sub(r0[sigma0[x]])?;
        let b = r1.binary_search(&rest).ok()?;
        if std::mem::replace(&mut used[b], true) {
            return None;
        }
        sigma1.push(b);
    }
    Some(sigma1)
}

fn sigma_pairs(t: &[usize], r0: &[usize], r1: &[usize]) -> Vec<SigmaPair> {
    let mut sigma0: Vec<usize> = (0..t.len()).collect();
    let mut out = Vec::new();
    loop {
        if let Some(s1) = forced_sigma1(t, r0, r1, &sigma0) {
            out.push((sigma0.clone(), s1));
        }
        if !next_permutation(&mut sigma0) {
            return out;
        }
    }
}

/// For each i, the lexicographically least (σ0, σ1) with
/// t_{i,x} = r_{i,0,σ0(x)} + r_{i,1,σ1(x)}; `None` when some i has none.
pub fn diag_shape_verify(t: &[Vec<usize>], w: &HTWeights) -> Result<Option<Vec<SigmaPair>>> {
    if w.e != 2 {
        return Err(Error::HypothesisViolation(format!("e = {} (need 2)", w.e)));
    }
    if w.d > 5 {
        return Err(Error::SearchSpaceTooLarge(format!("d = {} > 5", w.d)));
    }
    if t.len() != w.f || t.iter().any(|ti| ti.len() != w.d) {
        return Err(Error::DimensionMismatch(format!("valuations must be {}x{}", w.f, w.d)));
    }
    let mut out = Vec::with_capacity(w.f);
    for (i, ti) in t.iter().enumerate() {
        match sigma_pairs(ti, w.r(i, 0), w.r(i, 1)).into_iter().next() {
            Some(pair) => out.push(pair),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Diagonal valuations of each F_i, all finite.
pub fn family_diag_valuations(fam: &PhiFamily) -> Result<Vec<Vec<usize>>> {
    fam.mats()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            m.diag_valuations()
                .into_iter()
                .map(|v| match v {
                    Valuation::Finite(t) => Ok(t as usize),
                    Valuation::Infinity => Err(Error::HypothesisViolation(format!("F_{i} has a zero diagonal entry"))),
                })
                .collect()
        })
        .collect()
}

/// C·F1·F0 = F_i at the precision of F_i, with both factors in (P).
pub fn verify_e_phi_certificate(fam: &PhiFamily, cert: &[PhiShapeFactors]) -> bool {
    cert.len() == fam.f()
        && cert.iter().zip(fam.mats()).all(|(c, f)| {
            c.f1.dim() == f.rows() && check_p(&c.f1) && check_p(&c.f0) && c.product(f.precision()).agrees_with(f)
        })
}

/// Exhaustive membership search: for each admissible (σ0, σ1) and each
/// (P)-patterned F0 with diagonal u^{r_0∘σ0}, solve F1·F0 = C^{-1}F_i and test
/// F1 for (P).
pub fn check_e_phi_shape(fam: &PhiFamily, w: &HTWeights) -> Result<Option<Vec<PhiShapeFactors>>> {
    if w.e != 2 {
        return Err(Error::HypothesisViolation(format!("e = {} (need 2)", w.e)));
    }
    let k = fam.field();
    if w.d > 3 || k.order() > 5 {
        return Err(Error::SearchSpaceTooLarge(format!("d = {}, |k_E| = {}", w.d, k.order())));
    }
    if fam.f() != w.f || fam.dim() != w.d {
        return Err(Error::DimensionMismatch("family and weights disagree on f or d".into()));
    }
    if fam.mats().iter().any(|m| !m.is_upper_triangular()) {
        return Err(Error::HypothesisViolation("F must be upper triangular".into()));
    }
    let tv = family_diag_valuations(fam)?;
    let mut out = Vec::with_capacity(w.f);
    for (i, f) in fam.mats().iter().enumerate() {
        match search_index(f, &tv[i], w.r(i, 0), w.r(i, 1))? {
            Some(c) => out.push(c),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn search_index(f: &SeriesMatrix, t: &[usize], r0: &[usize], r1: &[usize]) -> Result<Option<PhiShapeFactors>> {
    let d = t.len();
    let k = f.field();
    let c: Vec<FieldElem> = (0..d).map(|x| f.get(x, x).coeff(t[x])).collect();
    let cinv: Vec<FieldElem> = c.iter().map(|a| a.inv().expect("leading coefficient")).collect();
    let g = Matrix::from_fn(d, d, |x, y| f.get(x, y).scale(cinv[x]));
    let elems: Vec<FieldElem> = k.elements().collect();
    for (sigma0, sigma1) in sigma_pairs(t, r0, r1) {
        let s0: Vec<usize> = sigma0.iter().map(|&s| r0[s]).collect();
        let s1: Vec<usize> = sigma1.iter().map(|&s| r1[s]).collect();
        let free: Vec<(usize, usize)> =
            (0..d).flat_map(|y| (0..y).map(move |x| (x, y))).filter(|&(x, y)| s0[x] < s0[y]).collect();
        let mut digits = vec![0usize; free.len()];
        loop {
            let mut f0 = Matrix::diagonal(&s0.iter().map(|&e| Poly::u_pow(k, e)).collect::<Vec<_>>());
            for (&(x, y), &dg) in free.iter().zip(&digits) {
                f0.set(x, y, Poly::monomial(elems[dg], s0[x]));
            }
            if let Some(f1) = solve_left(&g, &f0, &s0) {
                if let (Ok(f1), Ok(f0)) = (ShapedMatrix::new(f1, s1.clone()), ShapedMatrix::new(f0, s0.clone())) {
                    if check_p(&f1) {
                        return Ok(Some(PhiShapeFactors { c, f1, f0, sigma0, sigma1 }));
                    }
                }
            }
            // Odometer over the free (P) coefficients.
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    break;
                }
                digits[pos] += 1;
                if digits[pos] < elems.len() {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
            if pos == digits.len() {
                break;
            }
        }
    }
    Ok(None)
}

/// F1 with F1·F0 = G by column back-substitution; `None` when a division by
/// u^{s0_y} is inexact. F1 is returned as polynomials from the known terms.
fn solve_left(g: &SeriesMatrix, f0: &PolyMatrix, s0: &[usize]) -> Option<PolyMatrix> {
    let d = s0.len();
    let n = g.precision();
    let mut f1: Vec<Vec<crate::rings::TruncSeries>> = vec![Vec::with_capacity(d); d];
    for y in 0..d {
        for x in 0..d {
            let mut acc = g.get(x, y).clone();
            for z in 0..y {
                acc = &acc - &(&f1[x][z] * &f0.get(z, y).to_series(n));
            }
            let q = acc.div_u_pow(s0[y]).ok()?;
            f1[x].push(q.pad(n));
        }
    }
    Some(Matrix::from_fn(d, d, |x, y| f1[x][y].to_poly()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{FiniteField, TruncSeries};

    fn w(p: u32, r0: &[usize], r1: &[usize]) -> HTWeights {
        HTWeights::uniform(p, 1, vec![r0.to_vec(), r1.to_vec()]).unwrap()
    }

    #[test]
    fn least_witness_is_identity() {
        let ws = w(11, &[0, 5], &[0, 1]);
        let got = diag_shape_verify(&[vec![0, 6]], &ws).unwrap().unwrap();
        assert_eq!(got, vec![(vec![0, 1], vec![0, 1])]);
    }

    #[test]
    fn swapped_and_impossible() {
        let ws = w(11, &[0, 5], &[0, 1]);
        assert_eq!(diag_shape_verify(&[vec![6, 0]], &ws).unwrap().unwrap(), vec![(vec![1, 0], vec![1, 0])]);
        assert_eq!(diag_shape_verify(&[vec![7, 0]], &ws).unwrap(), None);
    }

    #[test]
    fn diagonal_family_is_in_shape() {
        let k = FiniteField::prime(5).unwrap();
        let ws = w(5, &[0, 2], &[0, 1]);
        let f = Matrix::diagonal(&[
            TruncSeries::monomial(k.from_int(2), 0, 20),
            TruncSeries::monomial(k.from_int(3), 3, 20),
        ]);
        let fam = PhiFamily::new(vec![f], None).unwrap();
        let cert = check_e_phi_shape(&fam, &ws).unwrap().unwrap();
        assert!(cert[0].f1.matrix().is_diagonal() && cert[0].f0.matrix().is_diagonal());
        assert!(verify_e_phi_certificate(&fam, &cert));
    }

    #[test]
    fn search_space_is_bounded() {
        let k = FiniteField::prime(7).unwrap();
        let ws = w(7, &[0, 2], &[0, 1]);
        let fam = PhiFamily::new(vec![Matrix::identity_like(2, &TruncSeries::one(k, 8))], None).unwrap();
        assert!(matches!(check_e_phi_shape(&fam, &ws), Err(Error::SearchSpaceTooLarge(_))));
    }
}
