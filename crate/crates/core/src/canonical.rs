//! Column canonical forms over k_E + u^Δ·k_E[[u]]: the Property-Z corrector,
//! the ordering lemma for products M2·diag(u^r)·M4, and the Q-factorization.
//!
//! Orderings are 0-based: `ordering[x]` is the pivot row k_x of column x.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rings::{FieldElem, KMatrix, Matrix, SeriesMatrix, Valuation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyZCertificate {
    #[serde(serialize_with = "ser_kmatrix")]
    pub c: KMatrix,
    pub ordering: Vec<usize>,
    #[serde(serialize_with = "ser_series_matrix")]
    pub m: SeriesMatrix,
}

fn ser_kmatrix<S: serde::Serializer>(c: &KMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::rings::wire::matrix_to_value(&c.to_series(1)).serialize(s)
}

fn ser_series_matrix<S: serde::Serializer>(m: &SeriesMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::rings::wire::matrix_to_value(m).serialize(s)
}

/// Whether entry m is "zero" in the Property-Z sense: divisible by u^Δ, or
/// exactly zero when Δ = 0.
fn z_small(m: &crate::rings::TruncSeries, delta: usize) -> bool {
    if delta == 0 {
        m.is_zero()
    } else {
        m.coeffs().iter().take(delta).all(|c| c.is_zero())
    }
}

/// Scan columns left to right; in each, the topmost unit is the pivot. Every
/// entry above a pivot and to the right of it in its row must be u^Δ-small.
pub fn check_property_z(m: &SeriesMatrix, delta: usize) -> Option<Vec<usize>> {
    if !m.is_square() {
        return None;
    }
    let d = m.rows();
    let mut ordering = Vec::with_capacity(d);
    for x in 0..d {
        let k = (0..d).find(|&z| m.get(z, x).is_unit())?;
        if (0..k).any(|z| !z_small(m.get(z, x), delta)) {
            return None;
        }
        if (x + 1..d).any(|y| !z_small(m.get(k, y), delta)) {
            return None;
        }
        ordering.push(k);
    }
    Some(ordering)
}

/// Constant column elimination: the unique unipotent C over k_E such that
/// A0·C has, per column, a topmost nonzero entry with zeros to its right.
fn constant_corrector(a0: &KMatrix) -> Result<(KMatrix, Vec<usize>)> {
    let d = a0.rows();
    let k = a0.get(0, 0).field();
    let mut m = a0.clone();
    let mut c = Matrix::identity_like(d, &k.one());
    let mut ordering = Vec::with_capacity(d);
    for x in 0..d {
        let piv = (0..d)
            .find(|&z| !m.get(z, x).is_zero())
            .ok_or_else(|| Error::NotInvertible(format!("column {x} vanishes modulo u")))?;
        let inv = m.get(piv, x).inv().expect("nonzero in a field");
        for y in x + 1..d {
            let f: FieldElem = *m.get(piv, y) * inv;
            if f.is_zero() {
                continue;
            }
            // column y -= f * column x, on both A0·C and C
            for z in 0..d {
                let v = *m.get(z, y) - f * *m.get(z, x);
                m.set(z, y, v);
                let w = *c.get(z, y) - f * *c.get(z, x);
                c.set(z, y, w);
            }
        }
        ordering.push(piv);
    }
    Ok((c, ordering))
}

/// The unipotent C ∈ GL_d(k_E) with A·C in Property-Z form.
pub fn property_z_canonicalize(a: &SeriesMatrix, delta: usize) -> Result<PropertyZCertificate> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", a.rows(), a.cols())));
    }
    let n = a.precision();
    if delta >= n {
        return Err(Error::PrecisionExhausted(format!("Δ = {delta} at precision {n}")));
    }
    if !a.in_const_plus_u_pow(delta) {
        return Err(Error::EntryOutsideRing(format!("some entry has a term u^j with 0 < j < {delta}")));
    }
    let a0 = a.constant_matrix();
    if !a0.is_invertible() {
        return Err(Error::NotInvertible("constant matrix is singular".into()));
    }
    let (c, ordering) = constant_corrector(&a0)?;
    let m = a.mul(&c.to_series(n));
    match check_property_z(&m, delta) {
        Some(o) if o == ordering => Ok(PropertyZCertificate { c, ordering, m }),
        _ => Err(Error::EntryOutsideRing("non-constant entries obstruct the exact zeros required at Δ = 0".into())),
    }
}

/// Every unipotent C over k_E (exhaustive) for which A·C has Property Z.
pub fn all_property_z_correctors(a: &SeriesMatrix, delta: usize) -> Vec<KMatrix> {
    let d = a.rows();
    let k = a.field();
    let n = a.precision();
    let slots: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let q = k.order() as u64;
    let total = q.pow(slots.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = Matrix::identity_like(d, &k.one());
        let mut rest = code;
        for &(i, j) in &slots {
            c.set(i, j, k.element((rest % q) as u32));
            rest /= q;
        }
        if check_property_z(&a.mul(&c.to_series(n)), delta).is_some() {
            out.push(c);
        }
    }
    out
}

fn diag_valuations_finite(m: &SeriesMatrix) -> Result<Vec<usize>> {
    m.diag_valuations()
        .into_iter()
        .enumerate()
        .map(|(x, v)| match v {
            Valuation::Finite(t) => Ok(t as usize),
            Valuation::Infinity => Err(Error::HypothesisViolation(format!("diagonal entry {x} of M1 vanishes"))),
        })
        .collect()
}

/// For M1 = M2·diag(u^r)·M4 upper triangular with diagonal valuations t, the
/// Property-Z ordering k of M4 satisfies r_{k_x} <= t_x, with equality when M2
/// is invertible. The bound is verified, not assumed.
pub fn ordering_from_product(
    m1: &SeriesMatrix,
    r: &[usize],
    m4: &SeriesMatrix,
    delta: usize,
    m2_invertible: bool,
) -> Result<Vec<usize>> {
    let d = m4.rows();
    if m1.rows() != d || r.len() != d {
        return Err(Error::DimensionMismatch("M1, r and M4 disagree on d".into()));
    }
    if !m1.is_upper_triangular() {
        return Err(Error::HypothesisViolation("M1 is not upper triangular".into()));
    }
    if r.windows(2).any(|w| w[0] > w[1]) || r.last().is_some_and(|&rd| rd > delta) {
        return Err(Error::HypothesisViolation(format!("r = {r:?} must be nondecreasing and at most Δ = {delta}")));
    }
    let t = diag_valuations_finite(m1)?;
    let cert = property_z_canonicalize(m4, delta)?;
    let k = cert.ordering;
    for x in 0..d {
        let rk = r[k[x]];
        if rk > t[x] || (m2_invertible && rk != t[x]) {
            return Err(Error::HypothesisViolation(format!(
                "column {x}: r_(k_x) = {rk} against t_x = {}{}",
                t[x],
                if m2_invertible { " (equality required)" } else { "" }
            )));
        }
    }
    Ok(k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFactorization {
    pub m7: KMatrix,
    pub q: SeriesMatrix,
    pub ordering: Vec<usize>,
}

/// diag(u^r)·M4·M7 = Q·diag(u^{r_{k_x}}) with Q ∈ GL_d(k_E + u^δ·k_E[[u]]).
/// Column x of Q keeps precision N - r_{k_x}.
pub fn q_factorize(r: &[usize], m4: &SeriesMatrix, delta: usize, small_delta: usize) -> Result<QFactorization> {
    let d = m4.rows();
    if r.len() != d {
        return Err(Error::DimensionMismatch(format!("{} weights for d = {d}", r.len())));
    }
    if r.windows(2).any(|w| w[1] < w[0] + small_delta) {
        return Err(Error::GapViolation(format!("consecutive gaps of r = {r:?} below δ = {small_delta}")));
    }
    if r.last().is_some_and(|&rd| delta < rd + small_delta) {
        return Err(Error::GapViolation(format!("Δ - r_d < δ = {small_delta}")));
    }
    let cert = property_z_canonicalize(m4, delta)?;
    let k = cert.ordering;
    let lhs = cert.m.diag_u_pow_mul(r);
    let rk: Vec<usize> = k.iter().map(|&z| r[z]).collect();
    let q = lhs.div_columns_u_pow_exact(&rk)?;
    if !q_pattern_holds(&q, &k, small_delta) {
        return Err(Error::HypothesisViolation("Q misses the constant-plus-u^δ pattern".into()));
    }
    Ok(QFactorization { m7: cert.c, q, ordering: k })
}

/// Pivot (k_x, x) has a nonzero constant term; every other entry of column x
/// is divisible by u^δ (and the whole matrix lies in k_E + u^δ·k_E[[u]]).
pub fn q_pattern_holds(q: &SeriesMatrix, ordering: &[usize], small_delta: usize) -> bool {
    let d = q.rows();
    if !q.in_const_plus_u_pow(small_delta) || !q.constant_matrix().is_invertible() {
        return false;
    }
    (0..d).all(|x| {
        q.get(ordering[x], x).is_unit()
            && (small_delta == 0 || (0..d).filter(|&z| z != ordering[x]).all(|z| z_small(q.get(z, x), small_delta)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{FiniteField, TruncSeries};

    fn poly_matrix(k: FiniteField, rows: &[&[&[i64]]], n: usize) -> SeriesMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|c| TruncSeries::from_ints(k, c, n)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn identity_is_canonical() {
        let k = FiniteField::prime(5).unwrap();
        let a = Matrix::identity_like(3, &TruncSeries::one(k, 6));
        let cert = property_z_canonicalize(&a, 2).unwrap();
        assert!(cert.c.is_unipotent() && cert.c.is_diagonal());
        assert_eq!(cert.ordering, vec![0, 1, 2]);
    }

    #[test]
    fn antidiagonal_over_f2() {
        let k = FiniteField::prime(2).unwrap();
        let a = poly_matrix(k, &[&[&[0], &[1]], &[&[1], &[0]]], 4);
        let cert = property_z_canonicalize(&a, 1).unwrap();
        assert!(cert.c.is_diagonal());
        assert_eq!(cert.ordering, vec![1, 0]);
        assert_eq!(all_property_z_correctors(&a, 1).len(), 1);
    }

    #[test]
    fn clears_row_to_the_right_over_f2() {
        let k = FiniteField::prime(2).unwrap();
        let a = poly_matrix(k, &[&[&[1], &[1]], &[&[1], &[0]]], 4);
        let cert = property_z_canonicalize(&a, 1).unwrap();
        assert_eq!(cert.c.get(0, 1), &k.one());
        assert_eq!(cert.ordering, vec![0, 1]);
        assert_eq!(cert.m, poly_matrix(k, &[&[&[1], &[0]], &[&[1], &[1]]], 4));
        assert_eq!(all_property_z_correctors(&a, 1), vec![cert.c]);
    }

    #[test]
    fn property_z_scan_examples() {
        let k = FiniteField::prime(3).unwrap();
        assert_eq!(check_property_z(&poly_matrix(k, &[&[&[0, 1], &[1]], &[&[1], &[0]]], 4), 1), Some(vec![1, 0]));
        assert_eq!(check_property_z(&poly_matrix(k, &[&[&[1], &[1]], &[&[0], &[1]]], 4), 1), None);
    }

    #[test]
    fn low_order_terms_are_outside_the_ring() {
        let k = FiniteField::prime(3).unwrap();
        let a = poly_matrix(k, &[&[&[1, 1], &[0]], &[&[0], &[1]]], 6);
        assert!(matches!(property_z_canonicalize(&a, 2), Err(Error::EntryOutsideRing(_))));
    }

    #[test]
    fn ordering_for_swap_instance() {
        let k = FiniteField::prime(5).unwrap();
        let m1 = poly_matrix(k, &[&[&[0, 1], &[0]], &[&[0], &[1]]], 8);
        let m4 = poly_matrix(k, &[&[&[0], &[1]], &[&[1], &[0]]], 8);
        assert_eq!(ordering_from_product(&m1, &[0, 1], &m4, 1, true).unwrap(), vec![1, 0]);
    }

    #[test]
    fn ordering_with_singular_m2() {
        // M2 = [[0,u],[1,0]] makes M1 = [[u^2,0],[0,1]], t = (2,0).
        let k = FiniteField::prime(5).unwrap();
        let m4 = poly_matrix(k, &[&[&[0], &[1]], &[&[1], &[0]]], 8);
        let m2 = poly_matrix(k, &[&[&[0], &[0, 1]], &[&[1], &[0]]], 8);
        let m1 = m2.mul(&m4.diag_u_pow_mul(&[0, 1]));
        assert_eq!(m1.diag_valuations(), vec![Valuation::Finite(2), Valuation::Finite(0)]);
        assert_eq!(ordering_from_product(&m1, &[0, 1], &m4, 1, false).unwrap(), vec![1, 0]);
        assert!(ordering_from_product(&m1, &[0, 1], &m4, 1, true).is_err());
    }

    #[test]
    fn q_for_swap() {
        let k = FiniteField::prime(5).unwrap();
        let m4 = poly_matrix(k, &[&[&[0], &[1]], &[&[1], &[0]]], 10);
        let qf = q_factorize(&[0, 2], &m4, 3, 1).unwrap();
        assert_eq!(qf.ordering, vec![1, 0]);
        assert!(qf.q.agrees_with(&poly_matrix(k, &[&[&[0], &[1]], &[&[1], &[0]]], 10)));
        assert!(qf.q.in_gl_const_plus_u_pow(1));
    }

    #[test]
    fn gap_violation() {
        let k = FiniteField::prime(5).unwrap();
        let m4 = Matrix::identity_like(2, &TruncSeries::one(k, 10));
        assert!(matches!(q_factorize(&[0, 1], &m4, 3, 2), Err(Error::GapViolation(_))));
        assert!(matches!(q_factorize(&[0, 2], &m4, 3, 2), Err(Error::GapViolation(_))));
    }
}
