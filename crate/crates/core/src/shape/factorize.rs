//! X = X1·X0 for X satisfying (DEG) with diag u^{t_i + δ_i}, given A with
//! u^{t_i} dividing column i of X·A.
//!
//! Recursion on the index k of the largest t: allowable steps (i, k) clear
//! column k of A above a_kk and leave x_ik = u^{t_k}·x'_ik; the minor without
//! row and column k is factored recursively; row k of X1 is recovered from
//! the (P) shape of the minor's X0. The end cases k = d and k = 1 are the two
//! special cases of the classical argument.

use crate::error::{Error, Result};
use crate::rings::{FieldElem, KMatrix, Matrix, Poly, PolyMatrix, SeriesMatrix};

use super::{check_deg, check_p, ShapedMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeFactorization {
    pub x1: ShapedMatrix,
    pub x0: ShapedMatrix,
    pub b: SeriesMatrix,
}

/// `gamma = None` asks for A ∈ GL_d(k_E); `Some(γ)` allows A ∈ GL_d(k_E + u^γ·k_E[[u]])
/// with γ >= max t + max δ, in which case the constant part drives the
/// factorization and B is recomputed from the full A.
pub fn shape_factorize(
    x: &ShapedMatrix,
    a: &SeriesMatrix,
    t: &[usize],
    deltas: &[usize],
    gamma: Option<usize>,
) -> Result<ShapeFactorization> {
    let d = x.dim();
    if a.rows() != d || a.cols() != d || t.len() != d || deltas.len() != d {
        return Err(Error::DimensionMismatch(format!("d = {d} against A, t or δ")));
    }
    for i in 0..d {
        if x.s[i] != t[i] + deltas[i] {
            return Err(Error::HypothesisViolation(format!(
                "diagonal exponent {} at {i} is not t + δ = {}",
                x.s[i],
                t[i] + deltas[i]
            )));
        }
    }
    let delta = deltas.iter().copied().max().unwrap_or(0);
    for i in 0..d {
        for j in i + 1..d {
            if t[i].abs_diff(t[j]) <= delta {
                return Err(Error::GapViolation(format!("|t_{i} - t_{j}| = {} <= δ = {delta}", t[i].abs_diff(t[j]))));
            }
        }
    }
    if !check_deg(x) {
        return Err(Error::HypothesisViolation("X does not satisfy (DEG)".into()));
    }
    let tmax = t.iter().copied().max().unwrap_or(0);
    match gamma {
        None if !a.is_constant() => {
            return Err(Error::EntryOutsideRing("A must be constant when no γ is given".into()))
        }
        Some(g) if g < tmax + delta => {
            return Err(Error::HypothesisViolation(format!("γ = {g} below max t + max δ = {}", tmax + delta)))
        }
        Some(g) if !a.in_const_plus_u_pow(g) => {
            return Err(Error::EntryOutsideRing(format!("A is not in k_E + u^{g}·k_E[[u]]")))
        }
        _ => {}
    }
    let a1 = a.constant_matrix();
    if !a1.is_invertible() {
        return Err(Error::NotInvertible("A is singular modulo u".into()));
    }
    let xa = x.x.mul(&a1.to_poly());
    for j in 0..d {
        for i in 0..d {
            if xa.get(i, j).valuation().is_some_and(|v| v < t[j]) {
                return Err(Error::DivisibilityViolation(format!("u^{} does not divide column {j} of X·A", t[j])));
            }
        }
    }

    let (x1, x0) = factor(&x.x, t, deltas, &a1)?;
    let x1 = ShapedMatrix::new(x1, deltas.to_vec())?;
    let x0 = ShapedMatrix::new(x0, t.to_vec())?;
    if x1.x.mul(&x0.x) != x.x || !check_p(&x0) || !check_deg(&x1) {
        return Err(Error::HypothesisViolation("factorization failed its own audit".into()));
    }

    let n = a.precision();
    if tmax >= n {
        return Err(Error::PrecisionExhausted(format!("max t = {tmax} at precision {n}")));
    }
    let b = x0.x.to_series(n).mul(a).div_columns_u_pow_exact(t)?;
    if !b.in_gl_const_plus_u_pow(delta) {
        return Err(Error::HypothesisViolation(format!("B is not in GL_d(k_E + u^{delta}·k_E[[u]])")));
    }
    Ok(ShapeFactorization { x1, x0, b })
}

fn factor(x: &PolyMatrix, t: &[usize], deltas: &[usize], a: &KMatrix) -> Result<(PolyMatrix, PolyMatrix)> {
    let d = t.len();
    let k_e = x.get(0, 0).field();
    if d == 1 {
        return Ok((Matrix::diagonal(&[Poly::u_pow(k_e, deltas[0])]), Matrix::diagonal(&[Poly::u_pow(k_e, t[0])])));
    }
    let k = (0..d).max_by_key(|&i| t[i]).expect("d >= 1");
    let mut x = x.clone();
    let mut a = a.clone();

    if (k + 1..d).any(|m| !a.get(m, k).is_zero()) {
        return Err(Error::DivisibilityViolation(format!("column {k} of A has entries below the diagonal")));
    }
    let akk_inv = a.get(k, k).inv().ok_or_else(|| Error::DivisibilityViolation(format!("a_({k},{k}) vanishes")))?;

    // Allowable steps (i, k, y): X <- X(I - yE_ik), A <- (I + yE_ik)A.
    let mut steps: Vec<(usize, FieldElem)> = Vec::new();
    for i in (0..k).rev() {
        let y = -(*a.get(i, k) * akk_inv);
        if y.is_zero() {
            continue;
        }
        for r in 0..=i {
            let v = x.get(r, k) - &x.get(r, i).scale(y);
            x.set(r, k, v);
        }
        for c in 0..d {
            let v = *a.get(i, c) + y * *a.get(k, c);
            a.set(i, c, v);
        }
        steps.push((i, y));
    }
    let mut xprime = Vec::with_capacity(k);
    for i in 0..k {
        let q = x
            .get(i, k)
            .div_u_pow(t[k])
            .ok_or_else(|| Error::DivisibilityViolation(format!("u^{} does not divide x_({i},{k})", t[k])))?;
        xprime.push(q);
    }

    let rest: Vec<usize> = (0..d).filter(|&i| i != k).collect();
    let t_hat: Vec<usize> = rest.iter().map(|&i| t[i]).collect();
    let d_hat: Vec<usize> = rest.iter().map(|&i| deltas[i]).collect();
    let (x1_hat, x0_hat) = factor(&x.select(&rest, &rest), &t_hat, &d_hat, &a.select(&rest, &rest))?;

    // Row k of X1 to the right of k: x_{k,J} = z·(X0)_{J,J} with (X0)_{J,J} = D_J·Y_J.
    let jpos: Vec<usize> = (k..d - 1).collect();
    let y_j: KMatrix = Matrix::from_fn(jpos.len(), jpos.len(), |r, c| {
        let (mr, mc) = (jpos[r], jpos[c]);
        x0_hat.get(mr, mc).div_u_pow(t_hat[mr]).map(|p| p.coeff(0)).unwrap_or_else(|| k_e.zero())
    });
    let y_inv = y_j.invert()?;
    let mut z = Vec::with_capacity(jpos.len());
    for c in 0..jpos.len() {
        let mut w = Poly::zero(k_e);
        for (r, &mr) in jpos.iter().enumerate() {
            w = &w + &x.get(k, mr + 1).scale(*y_inv.get(r, c));
        }
        let full = jpos[c] + 1;
        let q = w.div_u_pow(t[full]).ok_or_else(|| {
            Error::DivisibilityViolation(format!("u^{} does not divide row {k} at column {full}", t[full]))
        })?;
        z.push(q);
    }

    let zero = Poly::zero(k_e);
    let embed = |m: usize| if m < k { m } else { m - 1 };
    let mut x1 =
        Matrix::from_fn(
            d,
            d,
            |i, j| {
                if i != k && j != k {
                    x1_hat.get(embed(i), embed(j)).clone()
                } else {
                    zero.clone()
                }
            },
        );
    for (i, q) in xprime.into_iter().enumerate() {
        x1.set(i, k, q);
    }
    x1.set(k, k, Poly::u_pow(k_e, deltas[k]));
    for (c, q) in z.into_iter().enumerate() {
        x1.set(k, k + 1 + c, q);
    }
    let mut x0 =
        Matrix::from_fn(
            d,
            d,
            |i, j| {
                if i != k && j != k {
                    x0_hat.get(embed(i), embed(j)).clone()
                } else {
                    zero.clone()
                }
            },
        );
    x0.set(k, k, Poly::u_pow(k_e, t[k]));

    // X = X_mod·U^{-1}; fold U^{-1} into X0 (allowable for the exponents t).
    for &(i, y) in steps.iter().rev() {
        for r in 0..=i {
            let v = x0.get(r, k) + &x0.get(r, i).scale(y);
            x0.set(r, k, v);
        }
    }
    Ok((x1, x0))
}
