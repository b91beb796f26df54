//! Upper-triangular polynomial matrices with monomial diagonals: the (DEG)
//! and (P) predicates, allowable procedures, the two-factor shape
//! factorization and the φ-family drivers built on it.

mod block;
mod decompose;
mod factorize;
mod normalize;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rings::{FieldElem, FiniteField, Matrix, Poly, PolyMatrix};

pub use block::{ext_block_sum, BlockFactorization, BlockSum, ExtClass};
pub use decompose::{shape_decompose_phi, PhiShapeFactors};
pub use factorize::{shape_factorize, ShapeFactorization};
pub use normalize::normalize_to_deg;

/// Upper triangular X over k_E[u] with diag X = [u^{s_1}, ..., u^{s_d}]
/// exactly. Unit scalars on the diagonal are carried separately by callers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapedMatrix {
    x: PolyMatrix,
    s: Vec<usize>,
}

impl ShapedMatrix {
    pub fn new(x: PolyMatrix, s: Vec<usize>) -> Result<ShapedMatrix> {
        if !x.is_square() || x.rows() != s.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix with {} exponents",
                x.rows(),
                x.cols(),
                s.len()
            )));
        }
        if !x.is_upper_triangular() {
            return Err(Error::Malformed("shaped matrix must be upper triangular".into()));
        }
        let k = x.get(0, 0).field();
        for (i, &si) in s.iter().enumerate() {
            if *x.get(i, i) != Poly::u_pow(k, si) {
                return Err(Error::Malformed(format!("diagonal entry {i} is not u^{si}")));
            }
        }
        Ok(ShapedMatrix { x, s })
    }

    pub fn diagonal(k: FiniteField, s: &[usize]) -> ShapedMatrix {
        let d: Vec<Poly> = s.iter().map(|&e| Poly::u_pow(k, e)).collect();
        ShapedMatrix { x: Matrix::diagonal(&d), s: s.to_vec() }
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.x
    }

    pub fn exponents(&self) -> &[usize] {
        &self.s
    }

    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn field(&self) -> FiniteField {
        self.x.get(0, 0).field()
    }

    pub fn into_parts(self) -> (PolyMatrix, Vec<usize>) {
        (self.x, self.s)
    }
}

/// (DEG): deg x_{ij} < s_j for every i < j.
pub fn check_deg(x: &ShapedMatrix) -> bool {
    let d = x.dim();
    (0..d).all(|j| (0..j).all(|i| x.x.get(i, j).degree().is_none_or(|deg| deg < x.s[j])))
}

/// (P): x_{ij} = u^{s_i}·y_{ij} with y_{ij} ∈ k_E when s_i < s_j and
/// y_{ij} = 0 when s_i > s_j.
pub fn check_p(x: &ShapedMatrix) -> bool {
    let d = x.dim();
    (0..d).all(|j| (0..j).all(|i| p_entry(x.x.get(i, j), x.s[i], x.s[j]).is_some()))
}

/// The constant y with entry = u^{s_i}·y, if the entry has the (P) form.
fn p_entry(e: &Poly, si: usize, sj: usize) -> Option<FieldElem> {
    let k = e.field();
    if e.is_zero() {
        return Some(k.zero());
    }
    if si > sj {
        return None;
    }
    let y = e.div_u_pow(si)?;
    if y.is_constant() {
        Some(y.coeff(0))
    } else {
        None
    }
}

/// X -> X·(Id - c·E_{ij}) for i < j with s_i < s_j. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AllowableStep {
    pub i: usize,
    pub j: usize,
    #[serde(serialize_with = "ser_field_elem")]
    pub c: FieldElem,
}

fn ser_field_elem<S: serde::Serializer>(c: &FieldElem, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.coeffs().serialize(s)
}

pub fn allowable_step(x: &ShapedMatrix, step: &AllowableStep) -> Result<ShapedMatrix> {
    let AllowableStep { i, j, c } = *step;
    if i >= j || j >= x.dim() || x.s[i] >= x.s[j] {
        return Err(Error::IllegalStep(format!("({i},{j}) needs i < j and s_i < s_j, s = {:?}", x.s)));
    }
    let mut m = x.x.clone();
    for r in 0..=i {
        let v = m.get(r, j) - &x.x.get(r, i).scale(c);
        m.set(r, j, v);
    }
    Ok(ShapedMatrix { x: m, s: x.s.clone() })
}

/// Steps taking a (P) matrix to diag(u^{s_i}): columns left to right, rows
/// bottom-up, at most d(d-1)/2 of them.
pub fn reduce_p_to_diagonal(x: &ShapedMatrix) -> Result<Vec<AllowableStep>> {
    if !check_p(x) {
        return Err(Error::NotPropertyP("input does not satisfy (P)".into()));
    }
    let d = x.dim();
    let mut cur = x.clone();
    let mut steps = Vec::new();
    for j in 1..d {
        for i in (0..j).rev() {
            let y = p_entry(cur.x.get(i, j), cur.s[i], cur.s[j]).expect("(P) is preserved by allowable steps");
            if y.is_zero() {
                continue;
            }
            let step = AllowableStep { i, j, c: y };
            cur = allowable_step(&cur, &step)?;
            steps.push(step);
        }
    }
    debug_assert!(cur.x.is_diagonal());
    Ok(steps)
}
