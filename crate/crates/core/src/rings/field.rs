//! F_{p^m} for small p, m. Extension fields use a fixed monic irreducible
//! polynomial per (p, m); elements are coefficient vectors in the power basis.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};

/// Monic irreducible x^m + c_{m-1} x^{m-1} + ... + c_0, stored as (p, m, [c_0, c_1, c_2]).
/// Lexicographically least choice with c_0 != 0; irreducibility is re-checked in tests.
const IRREDUCIBLE: &[(u16, u8, [u16; 3])] = &[
    (2, 2, [1, 1, 0]),
    (2, 3, [1, 0, 1]),
    (3, 2, [1, 0, 0]),
    (3, 3, [1, 0, 2]),
    (5, 2, [1, 1, 0]),
    (5, 3, [1, 0, 1]),
    (7, 2, [1, 0, 0]),
    (7, 3, [1, 0, 1]),
    (11, 2, [1, 0, 0]),
    (11, 3, [1, 0, 4]),
    (13, 2, [1, 3, 0]),
    (13, 3, [1, 0, 4]),
];

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// The field k_E = F_{p^m}. Small and `Copy`, so every element carries it.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiniteField {
    p: u16,
    m: u8,
    modulus: [u16; 3],
}

impl FiniteField {
    /// Prime fields accept any prime below 2^15; extensions need p <= 13 and m <= 3.
    ///
    /// p = 2 is accepted: the characteristic-2 examples of the canonical-form
    /// lemma need it, and nothing at this layer depends on p being odd.
    pub fn new(p: u32, m: u32) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 15 {
            return Err(Error::BadParameters(format!("p = {p} is not a supported prime")));
        }
        match m {
            1 => Ok(FiniteField { p: p as u16, m: 1, modulus: [0; 3] }),
            2 | 3 => IRREDUCIBLE
                .iter()
                .find(|(q, k, _)| *q as u32 == p && *k as u32 == m)
                .map(|&(q, k, modulus)| FiniteField { p: q, m: k, modulus })
                .ok_or_else(|| Error::BadParameters(format!("no irreducible polynomial shipped for F_{{{p}^{m}}}"))),
            _ => Err(Error::BadParameters(format!("extension degree m = {m} not in 1..=3"))),
        }
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn m(&self) -> u32 {
        self.m as u32
    }

    pub fn order(&self) -> u32 {
        self.p().pow(self.m())
    }

    /// Coefficients c_0..c_{m-1} of the defining polynomial (empty for prime fields).
    pub fn modulus(&self) -> &[u16] {
        if self.m == 1 {
            &[]
        } else {
            &self.modulus[..self.m as usize]
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { field: *self, c: [0; 3] }
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        let mut c = [0u16; 3];
        c[0] = n.rem_euclid(self.p as i64) as u16;
        FieldElem { field: *self, c }
    }

    /// Element from its power-basis coordinates (length m, each reduced mod p).
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FieldElem> {
        if coeffs.len() != self.m as usize {
            return Err(Error::Malformed(format!("field element needs {} coordinates, got {}", self.m, coeffs.len())));
        }
        let mut c = [0u16; 3];
        for (slot, &v) in c.iter_mut().zip(coeffs) {
            *slot = v.rem_euclid(self.p as i64) as u16;
        }
        Ok(FieldElem { field: *self, c })
    }

    /// The `index`-th element, reading `index` in base p as coordinates.
    pub fn element(&self, index: u32) -> FieldElem {
        let mut c = [0u16; 3];
        let mut n = index % self.order();
        for slot in c.iter_mut().take(self.m as usize) {
            *slot = (n % self.p()) as u16;
            n /= self.p();
        }
        FieldElem { field: *self, c }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        self.element(rng.gen_range(0..self.order()))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        self.element(rng.gen_range(1..self.order()))
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.m)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    field: FiniteField,
    c: [u16; 3],
}

impl FieldElem {
    pub fn field(&self) -> FiniteField {
        self.field
    }

    pub fn coeffs(&self) -> &[u16] {
        &self.c[..self.field.m as usize]
    }

    /// Inverse of `FiniteField::element`.
    pub fn index(&self) -> u32 {
        self.coeffs().iter().rev().fold(0, |acc, &c| acc * self.field.p() + c as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.c == [0; 3]
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1] == 0 && self.c[2] == 0
    }

    pub fn pow(&self, mut e: u64) -> FieldElem {
        let mut base = *self;
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Option<FieldElem> {
        if self.is_zero() {
            None
        } else {
            Some(self.pow(self.field.order() as u64 - 2))
        }
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.m == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "{:?}", self.coeffs())
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, o: FieldElem) -> FieldElem {
        debug_assert_eq!(self.field, o.field);
        let p = self.field.p;
        let mut c = [0u16; 3];
        for k in 0..3 {
            c[k] = (self.c[k] + o.c[k]) % p;
        }
        FieldElem { field: self.field, c }
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, o: FieldElem) -> FieldElem {
        self + (-o)
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        let p = self.field.p;
        let mut c = [0u16; 3];
        for k in 0..3 {
            c[k] = (p - self.c[k]) % p;
        }
        FieldElem { field: self.field, c }
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, o: FieldElem) -> FieldElem {
        debug_assert_eq!(self.field, o.field);
        let p = self.field.p as u32;
        let m = self.field.m as usize;
        if m == 1 {
            let mut c = [0u16; 3];
            c[0] = ((self.c[0] as u32 * o.c[0] as u32) % p) as u16;
            return FieldElem { field: self.field, c };
        }
        let mut prod = [0u32; 5];
        for i in 0..m {
            for j in 0..m {
                prod[i + j] = (prod[i + j] + self.c[i] as u32 * o.c[j] as u32) % p;
            }
        }
        // x^m = -(c_0 + ... + c_{m-1} x^{m-1})
        for k in (m..2 * m - 1).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &mi) in self.field.modulus[..m].iter().enumerate() {
                let sub = top * mi as u32 % p;
                prod[k - m + i] = (prod[k - m + i] + p - sub) % p;
            }
        }
        let mut c = [0u16; 3];
        for k in 0..m {
            c[k] = prod[k] as u16;
        }
        FieldElem { field: self.field, c }
    }
}
