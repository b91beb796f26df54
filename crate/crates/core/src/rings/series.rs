use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{FieldElem, FiniteField, LocalRing, Poly, Ring, Valuation};
use crate::error::{Error, Result};

/// Element of k_E[[u]] known modulo u^N, N = `precision()`.
///
/// Binary operations return precision min(N_a, N_b). Division by u^k drops
/// the precision to N - k.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    field: FiniteField,
    coeffs: Vec<FieldElem>,
}

/// Result of the Frobenius substitution u -> u^p. `truncated` is set when a
/// nonzero term was pushed past the precision and dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phi<T> {
    pub value: T,
    pub truncated: bool,
}

impl TruncSeries {
    /// Precision is `coeffs.len()`, which must be positive.
    pub fn new(field: FiniteField, coeffs: Vec<FieldElem>) -> TruncSeries {
        assert!(!coeffs.is_empty(), "series precision must be positive");
        TruncSeries { field, coeffs }
    }

    pub fn zero(field: FiniteField, n: usize) -> TruncSeries {
        TruncSeries::new(field, vec![field.zero(); n])
    }

    pub fn one(field: FiniteField, n: usize) -> TruncSeries {
        TruncSeries::constant(field.one(), n)
    }

    pub fn constant(c: FieldElem, n: usize) -> TruncSeries {
        TruncSeries::monomial(c, 0, n)
    }

    /// c·u^k at precision n (zero when k >= n).
    pub fn monomial(c: FieldElem, k: usize, n: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(c.field(), n);
        if k < n {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_ints(field: FiniteField, coeffs: &[i64], n: usize) -> TruncSeries {
        Poly::from_ints(field, coeffs).to_series(n)
    }

    pub fn field(&self) -> FiniteField {
        self.field
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> FieldElem {
        self.coeffs[k]
    }

    pub fn constant_term(&self) -> FieldElem {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// The known coefficients as a polynomial.
    pub fn to_poly(&self) -> Poly {
        Poly::new(self.field, self.coeffs.clone())
    }

    /// Smallest k with a nonzero coefficient, or `Infinity` if zero to precision.
    pub fn u_valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(k) => Valuation::Finite(k as i64),
            None => Valuation::Infinity,
        }
    }

    /// Whether u^k divides the series. Only decidable for k < N.
    pub fn u_divides(&self, k: usize) -> Result<bool> {
        if k >= self.precision() {
            return Err(Error::PrecisionExhausted(format!(
                "u^{k} divisibility asked at precision {}",
                self.precision()
            )));
        }
        Ok(self.coeffs[..k].iter().all(|c| c.is_zero()))
    }

    /// Whether the series lies in k_E + u^k·k_E[[u]]: no terms u^j with 0 < j < k.
    pub fn in_const_plus_u_pow(&self, k: usize) -> bool {
        self.coeffs.iter().take(k).skip(1).all(|c| c.is_zero())
    }

    pub fn truncate(&self, n: usize) -> TruncSeries {
        assert!(n >= 1 && n <= self.precision());
        TruncSeries::new(self.field, self.coeffs[..n].to_vec())
    }

    /// Same series at precision n >= N, the new coefficients set to zero.
    /// Only meaningful when the caller knows the series is a polynomial.
    pub fn pad(&self, n: usize) -> TruncSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n.max(self.precision()), self.field.zero());
        TruncSeries::new(self.field, coeffs)
    }

    pub fn scale(&self, c: FieldElem) -> TruncSeries {
        TruncSeries::new(self.field, self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Multiply by u^k, keeping the precision.
    pub fn shift_up(&self, k: usize) -> TruncSeries {
        let n = self.precision();
        let coeffs = (0..n).map(|i| if i < k { self.field.zero() } else { self.coeffs[i - k] }).collect();
        TruncSeries::new(self.field, coeffs)
    }

    /// Multiply by u^k, raising the precision to N + k. Nothing is lost.
    pub fn raise_u_pow(&self, k: usize) -> TruncSeries {
        self.pad(self.precision() + k).shift_up(k)
    }

    /// Exact division by u^k; the result has precision N - k.
    pub fn div_u_pow(&self, k: usize) -> Result<TruncSeries> {
        if !self.u_divides(k)? {
            return Err(Error::DivisibilityViolation(format!("u^{k} does not divide {self:?}")));
        }
        Ok(TruncSeries::new(self.field, self.coeffs[k..].to_vec()))
    }

    /// Multiplicative inverse modulo u^N.
    pub fn invert(&self) -> Result<TruncSeries> {
        let c0inv =
            self.coeffs[0].inv().ok_or_else(|| Error::NotAUnit(format!("constant term of {self:?} is zero")))?;
        let n = self.precision();
        let mut g = vec![self.field.zero(); n];
        g[0] = c0inv;
        for k in 1..n {
            let mut acc = self.field.zero();
            for i in 1..=k {
                acc = acc + self.coeffs[i] * g[k - i];
            }
            g[k] = -(acc * c0inv);
        }
        Ok(TruncSeries::new(self.field, g))
    }

    /// u -> u^p with coefficients fixed.
    pub fn phi_substitute(&self) -> Phi<TruncSeries> {
        let p = self.field.p() as usize;
        let n = self.precision();
        let mut out = vec![self.field.zero(); n];
        let mut truncated = false;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match k.checked_mul(p) {
                Some(e) if e < n => out[e] = c,
                _ => truncated = true,
            }
        }
        Phi { value: TruncSeries::new(self.field, out), truncated }
    }

    /// Whether only exponents divisible by p occur, i.e. the series lies in k_E[[u^p]].
    pub fn in_u_p_subring(&self) -> bool {
        let p = self.field.p() as usize;
        self.coeffs.iter().enumerate().all(|(k, c)| k % p == 0 || c.is_zero())
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + O(u^{})", self.to_poly(), self.precision())
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, o: &TruncSeries) -> TruncSeries {
        let n = self.precision().min(o.precision());
        TruncSeries::new(self.field, (0..n).map(|k| self.coeffs[k] + o.coeffs[k]).collect())
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, o: &TruncSeries) -> TruncSeries {
        let n = self.precision().min(o.precision());
        TruncSeries::new(self.field, (0..n).map(|k| self.coeffs[k] - o.coeffs[k]).collect())
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries::new(self.field, self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, o: &TruncSeries) -> TruncSeries {
        let n = self.precision().min(o.precision());
        let mut out = vec![self.field.zero(); n];
        for (i, &a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().take(n - i).enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        TruncSeries::new(self.field, out)
    }
}

impl Ring for TruncSeries {
    fn zero_like(&self) -> Self {
        TruncSeries::zero(self.field, self.precision())
    }
    fn one_like(&self) -> Self {
        TruncSeries::one(self.field, self.precision())
    }
    fn is_zero(&self) -> bool {
        TruncSeries::is_zero(self)
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

impl LocalRing for TruncSeries {
    fn is_unit(&self) -> bool {
        TruncSeries::is_unit(self)
    }
    fn unit_inverse(&self) -> Option<Self> {
        self.invert().ok()
    }
}
