//! Polynomial-level checks over the local-field model: the monodromy
//! operator N = -u·d/du, the correction polynomial H with its companions Q
//! and G, Property A, the Coe-2 condition and the Taylor twist.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::localfield::{check_property_b, property_b_of_expansion};
use crate::localfield::{LPolynomial, LocalFieldElem, LocalFieldJson, LocalRingElem};

/// N(f) = -u·f'(u).
pub fn n_operator(f: &LPolynomial) -> LPolynomial {
    let ctx = f.ctx();
    let mut coeffs = vec![LocalFieldElem::zero(ctx)];
    coeffs.extend(f.derivative().coeffs().iter().map(|c| -c));
    LPolynomial::new(ctx, coeffs)
}

/// f(π) for π in the ring of integers.
pub fn evaluate_f_ij(f: &LPolynomial, pi: &LocalRingElem) -> LocalFieldElem {
    f.eval(&LocalFieldElem::from_ring(pi))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRecord {
    pub h: LPolynomial,
    pub g: LPolynomial,
    pub q: LPolynomial,
    pub j: usize,
    pub pis: Vec<LocalFieldElem>,
    pub rbars: Vec<usize>,
}

impl HRecord {
    fn m(&self, q: usize) -> usize {
        self.rbars[q].max(1)
    }

    pub fn to_value(&self) -> Value {
        let poly = |f: &LPolynomial| f.coeffs().iter().map(|c| json!(LocalFieldJson::from(c))).collect::<Vec<_>>();
        json!({
            "j": self.j,
            "rbars": self.rbars,
            "pis": self.pis.iter().map(|c| json!(LocalFieldJson::from(c))).collect::<Vec<_>>(),
            "H": poly(&self.h),
            "G": poly(&self.g),
            "Q": poly(&self.q),
        })
    }
}

/// H = (u - π_j)/π_j · ∏_{q<j} ((u - π_q)/(π_j - π_q))^{max(r_q, 1)},
/// Q = ∏_{q<j} (u - π_q)^{r_q}, G = Q / ∏_{q<j} (π_j - π_q)^{r_q}.
pub fn build_h(j: usize, pis: &[LocalFieldElem], rbars: &[usize]) -> Result<HRecord> {
    if j == 0 || j >= pis.len() || rbars.len() != j {
        return Err(Error::BadParameters(format!(
            "need 1 <= j < {} and {j} exponents, got j = {j} with {}",
            pis.len(),
            rbars.len()
        )));
    }
    let ctx = pis[0].ctx();
    let pj = &pis[j];
    let mut num = LPolynomial::linear(pj);
    let mut den = pj.clone();
    let mut q = LPolynomial::one(ctx);
    let mut gden = LocalFieldElem::one(ctx);
    for (qi, &r) in rbars.iter().enumerate() {
        let lin = LPolynomial::linear(&pis[qi]);
        let diff = pj - &pis[qi];
        let m = r.max(1) as u32;
        num = &num * &lin.pow(m);
        den = &den * &diff.pow(m as u64);
        q = &q * &lin.pow(r as u32);
        gden = &gden * &diff.pow(r as u64);
    }
    Ok(HRecord { h: num.scale(&den.inv()?), g: q.scale(&gden.inv()?), q, j, pis: pis.to_vec(), rbars: rbars.to_vec() })
}

/// (u - π_j) | N(H) + 1: the remainder N(H)(π_j) + 1 vanishes.
pub fn check_property_a(rec: &HRecord) -> Result<bool> {
    let ctx = rec.h.ctx();
    let nh1 = &n_operator(&rec.h) + &LPolynomial::one(ctx);
    let (_, rem) = nh1.divide_linear(&rec.pis[rec.j]);
    if !rem.is_zero_to_precision() {
        return Ok(false);
    }
    if rem.abs_precision() < 1 {
        return Err(Error::PrecisionExhausted(format!("remainder known only modulo ϖ^{}", rem.abs_precision())));
    }
    Ok(true)
}

fn factorial(ctx: crate::localfield::LocalCtx, l: usize) -> LocalFieldElem {
    (1..=l).fold(LocalFieldElem::one(ctx), |acc, k| &acc * &LocalFieldElem::from_int(ctx, k as i64))
}

/// Coefficients of H^ℓ/(G·ℓ!) in powers of w = u - π_j, from the factored form
/// (w/π_j)^ℓ·∏_{q<j}(1 + w/c_q)^{ℓ·m_q - r_q}/ℓ! with c_q = π_j - π_q.
pub fn coe2_expansion(rec: &HRecord, l: usize) -> Result<Vec<LocalFieldElem>> {
    let ctx = rec.h.ctx();
    let p = ctx.p() as usize;
    if l == 0 || l >= p {
        return Err(Error::BadParameters(format!("ℓ = {l} outside 1..{p}")));
    }
    let pj = &rec.pis[rec.j];
    let mut acc = LPolynomial::one(ctx);
    for (qi, &r) in rec.rbars.iter().enumerate() {
        let cinv = (pj - &rec.pis[qi]).inv()?;
        let e = l * rec.m(qi) - r;
        acc = &acc * &LPolynomial::new(ctx, vec![LocalFieldElem::one(ctx), cinv]).pow(e as u32);
    }
    let scale = &pj.inv()?.pow(l as u64) * &factorial(ctx, l).inv()?;
    let mut coeffs = vec![LocalFieldElem::zero(ctx); l];
    coeffs.extend(acc.scale(&scale).coeffs().iter().cloned());
    Ok(coeffs)
}

/// H^ℓ/(G·ℓ!) in the u-basis, dividing out each (u - π_q)^{r_q} exactly.
pub fn coe2_polynomial(rec: &HRecord, l: usize) -> Result<LPolynomial> {
    let ctx = rec.h.ctx();
    if l == 0 || l >= ctx.p() as usize {
        return Err(Error::BadParameters(format!("ℓ = {l} outside 1..{}", ctx.p())));
    }
    let mut f = rec.h.pow(l as u32);
    for (qi, &r) in rec.rbars.iter().enumerate() {
        for _ in 0..r {
            let (quot, rem) = f.divide_linear(&rec.pis[qi]);
            if !rem.is_zero_to_precision() {
                return Err(Error::DivisibilityViolation(format!("G does not divide H^{l} at π_{qi}")));
            }
            f = quot;
        }
    }
    let pj = &rec.pis[rec.j];
    let gden: LocalFieldElem = rec
        .rbars
        .iter()
        .enumerate()
        .fold(LocalFieldElem::one(ctx), |acc, (qi, &r)| &acc * &(pj - &rec.pis[qi]).pow(r as u64));
    Ok(f.scale(&(&gden * &factorial(ctx, l).inv()?)))
}

/// Coe-2: H^ℓ/(G·ℓ!) satisfies Property B at π_j.
pub fn check_coe2(rec: &HRecord, l: usize) -> Result<bool> {
    property_b_of_expansion(&coe2_expansion(rec, l)?)
}

/// Same check through the u-basis polynomial and a Taylor expansion at π_j.
pub fn check_coe2_u_basis(rec: &HRecord, l: usize) -> Result<bool> {
    check_property_b(&coe2_polynomial(rec, l)?, &rec.pis[rec.j])
}

/// f̃ = Σ_{ℓ=0}^{n} H^ℓ·N^ℓ(f)/ℓ!, coordinatewise.
pub fn taylor_twist(fvec: &[LPolynomial], rec: &HRecord, n: usize) -> Result<Vec<LPolynomial>> {
    let ctx = rec.h.ctx();
    if n >= ctx.p() as usize {
        return Err(Error::BadParameters(format!("n = {n} must be below p = {}", ctx.p())));
    }
    let inv_fact: Vec<LocalFieldElem> = (0..=n).map(|l| factorial(ctx, l).inv()).collect::<Result<Vec<_>>>()?;
    fvec.iter()
        .map(|f| {
            let mut out = f.clone();
            let mut nl = f.clone();
            let mut hl = LPolynomial::one(ctx);
            for fact in inv_fact.iter().skip(1) {
                nl = n_operator(&nl);
                hl = &hl * &rec.h;
                out = &out + &(&hl * &nl).scale(fact);
            }
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{eisenstein_roots_lf, expand_at, LocalCtx};
    use crate::rings::Valuation;

    fn setup(p: u64, m: u32, e0: u32) -> (LocalCtx, Vec<LocalFieldElem>) {
        let ctx = LocalCtx::new(p, m, e0).unwrap();
        (ctx, eisenstein_roots_lf(ctx))
    }

    #[test]
    fn n_on_monomials() {
        let (ctx, _) = setup(5, 4, 2);
        let u = LPolynomial::from_ints(ctx, &[0, 1]);
        assert!(n_operator(&u).agrees_with(&LPolynomial::from_ints(ctx, &[0, -1])));
        assert!(n_operator(&LPolynomial::from_ints(ctx, &[7])).agrees_with(&LPolynomial::zero(ctx)));
        let u2 = LPolynomial::from_ints(ctx, &[0, 0, 1]);
        assert!(n_operator(&u2).agrees_with(&LPolynomial::from_ints(ctx, &[0, 0, -2])));
    }

    #[test]
    fn h_for_e2_r1() {
        let (_, pis) = setup(5, 8, 2);
        let rec = build_h(1, &pis, &[1]).unwrap();
        let expect = (&LPolynomial::linear(&pis[1]) * &LPolynomial::linear(&pis[0]))
            .scale(&(&pis[1] * &(&pis[1] - &pis[0])).inv().unwrap());
        assert!(rec.h.agrees_with(&expect));
        assert!(rec.h.eval(&pis[0]).is_zero_to_precision());
        assert!(rec.h.eval(&pis[1]).is_zero_to_precision());
        let nh = n_operator(&rec.h).eval(&pis[1]);
        assert!(nh.agrees_with(&LocalFieldElem::from_int(pis[0].ctx(), -1)));
        assert!(check_property_a(&rec).unwrap());
    }

    #[test]
    fn h_numerator_with_square() {
        let (_, pis) = setup(5, 8, 2);
        let rec = build_h(1, &pis, &[2]).unwrap();
        let num = &LPolynomial::linear(&pis[1]) * &LPolynomial::linear(&pis[0]).pow(2);
        let den = &pis[1] * &(&pis[1] - &pis[0]).pow(2);
        assert!(rec.h.scale(&den).agrees_with(&num));
    }

    #[test]
    fn perturbed_h_fails_property_a() {
        let (_, pis) = setup(5, 8, 2);
        let mut rec = build_h(1, &pis, &[1]).unwrap();
        rec.h = LPolynomial::linear(&pis[0]).scale(&(&pis[1] * &(&pis[1] - &pis[0])).inv().unwrap());
        assert!(!check_property_a(&rec).unwrap());
    }

    #[test]
    fn coe2_bases_agree() {
        let (_, pis) = setup(5, 14, 2);
        let rec = build_h(1, &pis, &[1]).unwrap();
        for l in 1..5 {
            assert!(check_coe2(&rec, l).unwrap());
            assert!(check_coe2_u_basis(&rec, l).unwrap());
            let a = coe2_expansion(&rec, l).unwrap();
            let b = expand_at(&coe2_polynomial(&rec, l).unwrap(), &pis[1]);
            assert!(a.iter().zip(&b).all(|(x, y)| x.agrees_with(y)));
        }
        assert!(matches!(check_coe2(&rec, 5), Err(Error::BadParameters(_))));
    }

    #[test]
    fn twist_examples() {
        let (ctx, pis) = setup(5, 8, 2);
        let rec = build_h(1, &pis, &[1]).unwrap();
        let u = LPolynomial::from_ints(ctx, &[0, 1]);
        assert_eq!(taylor_twist(std::slice::from_ref(&u), &rec, 0).unwrap()[0], u);
        let t = taylor_twist(std::slice::from_ref(&u), &rec, 1).unwrap();
        let expect = &u + &(&rec.h * &LPolynomial::from_ints(ctx, &[0, -1]));
        assert!(t[0].agrees_with(&expect));
        for pi in &pis {
            assert!(t[0].eval(pi).agrees_with(&u.eval(pi)));
        }
    }

    #[test]
    fn evaluation_examples() {
        let ctx = LocalCtx::new(5, 6, 2).unwrap();
        let roots = crate::localfield::eisenstein_roots(2, 5, 6).unwrap();
        let lin = LPolynomial::linear(&LocalFieldElem::from_ring(&roots[1]));
        assert!(evaluate_f_ij(&lin, &roots[1]).is_zero_to_precision());
        let e = LPolynomial::from_ints(ctx, &[-5, 0, 1]);
        assert!(evaluate_f_ij(&e, &roots[0]).is_zero_to_precision());
        let sq = LPolynomial::linear(&LocalFieldElem::from_ring(&roots[0])).pow(2);
        assert_eq!(evaluate_f_ij(&sq, &roots[1]).valuation().unwrap(), Valuation::Finite(2));
    }
}
