use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{FieldElem, FiniteField, Ring, TruncSeries};

/// Polynomial in k_E[u], coefficients ascending, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: FiniteField,
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn new(field: FiniteField, mut coeffs: Vec<FieldElem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: FiniteField) -> Poly {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: FiniteField) -> Poly {
        Poly::constant(field.one())
    }

    pub fn constant(c: FieldElem) -> Poly {
        Poly::new(c.field(), vec![c])
    }

    /// c·u^k
    pub fn monomial(c: FieldElem, k: usize) -> Poly {
        let mut coeffs = vec![c.field().zero(); k + 1];
        coeffs[k] = c;
        Poly::new(c.field(), coeffs)
    }

    pub fn u_pow(field: FiniteField, k: usize) -> Poly {
        Poly::monomial(field.one(), k)
    }

    pub fn from_ints(field: FiniteField, coeffs: &[i64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn field(&self) -> FiniteField {
        self.field
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> FieldElem {
        self.coeffs.get(k).copied().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest exponent with a nonzero coefficient; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: FieldElem) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Multiply by u^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { field: self.field, coeffs }
    }

    /// Exact division by u^k, `None` when u^k does not divide.
    pub fn div_u_pow(&self, k: usize) -> Option<Poly> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
            return None;
        }
        Some(Poly::new(self.field, self.coeffs.iter().skip(k).copied().collect()))
    }

    /// (low, high) with self = low + u^k·high and deg low < k.
    pub fn split_at(&self, k: usize) -> (Poly, Poly) {
        let cut = k.min(self.coeffs.len());
        (Poly::new(self.field, self.coeffs[..cut].to_vec()), Poly::new(self.field, self.coeffs[cut..].to_vec()))
    }

    /// Truncation to precision `n`; use `to_series_exact` when nothing may be lost.
    pub fn to_series(&self, n: usize) -> TruncSeries {
        let coeffs = (0..n).map(|k| self.coeff(k)).collect();
        TruncSeries::new(self.field, coeffs)
    }

    /// `None` if the degree does not fit below `n`.
    pub fn to_series_exact(&self, n: usize) -> Option<TruncSeries> {
        match self.degree() {
            Some(d) if d >= n => None,
            _ => Some(self.to_series(n)),
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c:?}")?,
                1 => write!(f, "{c:?}u")?,
                _ => write!(f, "{c:?}u^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(self.field, (0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(self.field, (0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { field: self.field, coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Poly::new(self.field, out)
    }
}

impl Ring for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.field)
    }
    fn one_like(&self) -> Self {
        Poly::one(self.field)
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
}
