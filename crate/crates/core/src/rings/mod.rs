//! Coefficient rings: k_E = F_{p^m}, polynomials k_E[u], the truncated series
//! ring k_E[[u]]/(u^N), and dense matrices over any of them.

mod field;
mod matrix;
mod poly;
pub mod random;
mod series;
pub mod wire;

use std::fmt::Debug;

pub(crate) use field::is_prime;
pub use field::{FieldElem, FiniteField};
pub use matrix::{KMatrix, Matrix, PolyMatrix, SeriesMatrix};
pub use poly::Poly;
pub use series::{Phi, TruncSeries};

/// Valuation with a top element. `Finite` sorts below `Infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinity
    }
}

/// The minimum a generic matrix needs from its entries. Entries carry their
/// own context (field, precision), so constants are produced "like" a sample.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
}

/// Rings whose non-units form an ideal, so pivoting on any unit is enough
/// for Gauss–Jordan inversion.
pub trait LocalRing: Ring {
    fn is_unit(&self) -> bool;
    fn unit_inverse(&self) -> Option<Self>;
}

impl Ring for FieldElem {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    fn is_zero(&self) -> bool {
        FieldElem::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        *self + *o
    }
    fn minus(&self, o: &Self) -> Self {
        *self - *o
    }
    fn times(&self, o: &Self) -> Self {
        *self * *o
    }
    fn negate(&self) -> Self {
        -*self
    }
}

impl LocalRing for FieldElem {
    fn is_unit(&self) -> bool {
        !FieldElem::is_zero(self)
    }
    fn unit_inverse(&self) -> Option<Self> {
        self.inv()
    }
}

pub fn series_invert(f: &TruncSeries) -> crate::Result<TruncSeries> {
    f.invert()
}

pub fn u_valuation(f: &TruncSeries) -> Valuation {
    f.u_valuation()
}

pub fn mat_invert(m: &SeriesMatrix) -> crate::Result<SeriesMatrix> {
    m.invert()
}

pub fn phi_substitute(m: &SeriesMatrix) -> Phi<SeriesMatrix> {
    m.phi_substitute()
}
