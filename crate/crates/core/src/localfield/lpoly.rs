//! Polynomials over the model field and (u - π)-expansions.

use std::ops::{Add, Mul, Neg, Sub};

use super::{LocalCtx, LocalFieldElem};
use crate::error::{Error, Result};

/// f(u) = Σ a_k u^k over L. Coefficients may be zero only to a finite
/// precision, so trailing zeros are kept and the length is the degree bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    ctx: LocalCtx,
    coeffs: Vec<LocalFieldElem>,
}

impl LPolynomial {
    pub fn new(ctx: LocalCtx, coeffs: Vec<LocalFieldElem>) -> LPolynomial {
        let coeffs = if coeffs.is_empty() { vec![LocalFieldElem::zero(ctx)] } else { coeffs };
        LPolynomial { ctx, coeffs }
    }

    pub fn constant(c: LocalFieldElem) -> LPolynomial {
        LPolynomial::new(c.ctx(), vec![c])
    }

    pub fn zero(ctx: LocalCtx) -> LPolynomial {
        LPolynomial::constant(LocalFieldElem::zero(ctx))
    }

    pub fn one(ctx: LocalCtx) -> LPolynomial {
        LPolynomial::constant(LocalFieldElem::one(ctx))
    }

    pub fn from_ints(ctx: LocalCtx, coeffs: &[i64]) -> LPolynomial {
        LPolynomial::new(ctx, coeffs.iter().map(|&c| LocalFieldElem::from_int(ctx, c)).collect())
    }

    /// u - a
    pub fn linear(a: &LocalFieldElem) -> LPolynomial {
        LPolynomial::new(a.ctx(), vec![-a, LocalFieldElem::one(a.ctx())])
    }

    pub fn ctx(&self) -> LocalCtx {
        self.ctx
    }

    pub fn coeffs(&self) -> &[LocalFieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> LocalFieldElem {
        self.coeffs.get(k).cloned().unwrap_or_else(|| LocalFieldElem::zero(self.ctx))
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scale(&self, c: &LocalFieldElem) -> LPolynomial {
        LPolynomial::new(self.ctx, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> LPolynomial {
        let mut r = LPolynomial::one(self.ctx);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Horner evaluation f(a).
    pub fn eval(&self, a: &LocalFieldElem) -> LocalFieldElem {
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &(&acc * a) + c;
        }
        acc
    }

    /// f'(u)
    pub fn derivative(&self) -> LPolynomial {
        if self.coeffs.len() == 1 {
            return LPolynomial::zero(self.ctx);
        }
        let c = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(k, a)| a * &LocalFieldElem::from_int(self.ctx, k as i64 + 1))
            .collect();
        LPolynomial::new(self.ctx, c)
    }

    /// Synthetic division by (u - a): f = (u - a)·q + r.
    pub fn divide_linear(&self, a: &LocalFieldElem) -> (LPolynomial, LocalFieldElem) {
        let n = self.coeffs.len();
        if n == 1 {
            return (LPolynomial::zero(self.ctx), self.coeffs[0].clone());
        }
        let mut q = vec![LocalFieldElem::zero(self.ctx); n - 1];
        let mut acc = self.coeffs[n - 1].clone();
        for k in (0..n - 1).rev() {
            q[k] = acc.clone();
            acc = &(&acc * a) + &self.coeffs[k];
        }
        (LPolynomial::new(self.ctx, q), acc)
    }

    /// Σ b_i (u - a)^i rebuilt in the u-basis from its expansion coefficients.
    pub fn from_expansion(b: &[LocalFieldElem], a: &LocalFieldElem) -> LPolynomial {
        let ctx = a.ctx();
        let lin = LPolynomial::linear(a);
        let mut acc = LPolynomial::constant(b.last().cloned().unwrap_or_else(|| LocalFieldElem::zero(ctx)));
        for c in b.iter().rev().skip(1) {
            acc = &(&acc * &lin) + &LPolynomial::constant(c.clone());
        }
        acc
    }

    /// Equality coefficientwise to the common precision.
    pub fn agrees_with(&self, o: &LPolynomial) -> bool {
        let n = self.coeffs.len().max(o.coeffs.len());
        (0..n).all(|k| self.coeff(k).agrees_with(&o.coeff(k)))
    }
}

impl Add for &LPolynomial {
    type Output = LPolynomial;
    fn add(self, o: &LPolynomial) -> LPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        LPolynomial::new(self.ctx, (0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }
}

impl Sub for &LPolynomial {
    type Output = LPolynomial;
    fn sub(self, o: &LPolynomial) -> LPolynomial {
        self + &(-o)
    }
}

impl Neg for &LPolynomial {
    type Output = LPolynomial;
    fn neg(self) -> LPolynomial {
        LPolynomial::new(self.ctx, self.coeffs.iter().map(|a| -a).collect())
    }
}

impl Mul for &LPolynomial {
    type Output = LPolynomial;
    fn mul(self, o: &LPolynomial) -> LPolynomial {
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let mut c: Vec<Option<LocalFieldElem>> = vec![None; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                let t = a * b;
                c[i + j] = Some(match c[i + j].take() {
                    None => t,
                    Some(s) => &s + &t,
                });
            }
        }
        LPolynomial::new(self.ctx, c.into_iter().map(|x| x.expect("every slot is hit")).collect())
    }
}

/// Coefficients a_i of f = Σ a_i (u - π)^i by iterated synthetic division.
pub fn expand_at(f: &LPolynomial, pi: &LocalFieldElem) -> Vec<LocalFieldElem> {
    let mut out = Vec::with_capacity(f.coeffs.len());
    let mut cur = f.clone();
    for _ in 0..f.coeffs.len() {
        let (q, r) = cur.divide_linear(pi);
        out.push(r);
        cur = q;
    }
    out
}

/// Whether v(a_i) >= -i for every expansion coefficient. A coefficient that
/// is zero only to a precision below -i cannot be decided.
pub fn check_property_b(f: &LPolynomial, pi: &LocalFieldElem) -> Result<bool> {
    property_b_of_expansion(&expand_at(f, pi))
}

pub(crate) fn property_b_of_expansion(a: &[LocalFieldElem]) -> Result<bool> {
    for (i, c) in a.iter().enumerate() {
        match c.valuation_at_least(-(i as i64)) {
            Some(true) => {}
            Some(false) => return Ok(false),
            None => {
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient {i} is zero only modulo ϖ^{}",
                    c.abs_precision()
                )))
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::eisenstein_roots_lf;
    use super::*;

    fn setup() -> (LocalCtx, Vec<LocalFieldElem>) {
        let ctx = LocalCtx::new(5, 8, 2).unwrap();
        (ctx, eisenstein_roots_lf(ctx))
    }

    #[test]
    fn expansion_of_u() {
        let (ctx, pis) = setup();
        let u = LPolynomial::from_ints(ctx, &[0, 1]);
        let a = expand_at(&u, &pis[1]);
        assert!(a[0].agrees_with(&pis[1]));
        assert!(a[1].agrees_with(&LocalFieldElem::one(ctx)));
    }

    #[test]
    fn expansion_at_a_root_of_eisenstein() {
        let (ctx, pis) = setup();
        let e = LPolynomial::from_ints(ctx, &[-5, 0, 1]);
        let a = expand_at(&e, &pis[0]);
        assert!(a[0].is_zero_to_precision());
        assert!(a[1].agrees_with(&(&pis[0] * &LocalFieldElem::from_int(ctx, 2))));
        assert!(a[2].agrees_with(&LocalFieldElem::one(ctx)));
    }

    #[test]
    fn normalized_linear_factor_has_property_b() {
        let (_, pis) = setup();
        let c = (&pis[1] - &pis[0]).inv().unwrap();
        let f = LPolynomial::linear(&pis[0]).scale(&c);
        let a = expand_at(&f, &pis[1]);
        assert!(a[0].agrees_with(&LocalFieldElem::one(pis[0].ctx())));
        assert!(a[1].agrees_with(&c));
        assert!(check_property_b(&f, &pis[1]).unwrap());
    }

    #[test]
    fn deep_denominator_breaks_property_b() {
        let (ctx, pis) = setup();
        let s = LocalFieldElem::uniformizer(ctx).pow(2).inv().unwrap();
        let f = LPolynomial::linear(&pis[1]).scale(&s);
        assert!(!check_property_b(&f, &pis[1]).unwrap());
    }

    #[test]
    fn eisenstein_polynomial_factors() {
        for &(p, e0) in &[(5u64, 2u32), (5, 4), (13, 4), (7, 2), (7, 3)] {
            let ctx = LocalCtx::new(p, 6, e0).unwrap();
            let mut prod = LPolynomial::one(ctx);
            for pi in eisenstein_roots_lf(ctx) {
                prod = &prod * &LPolynomial::linear(&pi);
            }
            let mut target = vec![0i64; e0 as usize + 1];
            target[0] = -(p as i64);
            target[e0 as usize] = 1;
            assert!(prod.agrees_with(&LPolynomial::from_ints(ctx, &target)), "p={p} e0={e0}");
        }
    }
}
