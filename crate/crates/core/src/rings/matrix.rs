use std::fmt;

use super::{FieldElem, LocalRing, Phi, Poly, Ring, TruncSeries};
use crate::error::{Error, Result};

/// Dense row-major matrix. Shapes are checked with assertions: a mismatch is
/// a bug in the caller, not bad input. Input-facing code validates first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Matrices over k_E.
pub type KMatrix = Matrix<FieldElem>;
/// Matrices over k_E[u].
pub type PolyMatrix = Matrix<Poly>;
/// Matrices over k_E[[u]]/(u^N).
pub type SeriesMatrix = Matrix<TruncSeries>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged or empty matrix".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        assert!(self.is_square());
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<S: Clone>(&self, f: impl FnMut(&T) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Rows `rs`, columns `cs`, in the given order.
    pub fn select(&self, rs: &[usize], cs: &[usize]) -> Self {
        Matrix::from_fn(rs.len(), cs.len(), |i, j| self.get(rs[i], cs[j]).clone())
    }

    /// Delete row and column `k` of a square matrix.
    pub fn minor(&self, k: usize) -> Self {
        let keep: Vec<usize> = (0..self.rows).filter(|&i| i != k).collect();
        self.select(&keep, &keep)
    }

    /// [[a, b], [c, d]].
    pub fn block(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert!(a.rows == b.rows && c.rows == d.rows && a.cols == c.cols && b.cols == d.cols);
        Matrix::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < a.rows, j < a.cols) {
            (true, true) => a.get(i, j).clone(),
            (true, false) => b.get(i, j - a.cols).clone(),
            (false, true) => c.get(i - a.rows, j).clone(),
            (false, false) => d.get(i - a.rows, j - a.cols).clone(),
        })
    }
}

impl<T: Ring> Matrix<T> {
    pub fn zeros_like(rows: usize, cols: usize, sample: &T) -> Self {
        Matrix::from_fn(rows, cols, |_, _| sample.zero_like())
    }

    pub fn identity_like(n: usize, sample: &T) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { sample.one_like() } else { sample.zero_like() })
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { entries[0].zero_like() })
    }

    pub fn diag_entries(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// Permutation matrix W with W[x][sigma[x]] = 1, so (W D W^{-1})_{xx} = D_{sigma(x)}.
    pub fn permutation(sigma: &[usize], sample: &T) -> Self {
        let n = sigma.len();
        Matrix::from_fn(n, n, |i, j| if sigma[i] == j { sample.one_like() } else { sample.zero_like() })
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let sample = &self.data[0];
        Matrix::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = sample.zero_like();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let b = o.get(k, j);
                if b.is_zero() {
                    continue;
                }
                acc = acc.plus(&a.times(b));
            }
            acc
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols);
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).plus(o.get(i, j)))
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols);
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).minus(o.get(i, j)))
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.negate())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.times(c))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Upper triangular with every diagonal entry equal to one.
    pub fn is_unipotent(&self) -> bool {
        self.is_square()
            && self.is_upper_triangular()
            && (0..self.rows).all(|i| *self.get(i, i) == self.get(i, i).one_like())
    }

    /// Laplace expansion along the first row. Exponential, used for d <= 5.
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        if n == 1 {
            return self.data[0].clone();
        }
        let mut acc = self.data[0].zero_like();
        let rest: Vec<usize> = (1..n).collect();
        for j in 0..n {
            let a = self.get(0, j);
            if a.is_zero() {
                continue;
            }
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let term = a.times(&self.select(&rest, &cols).det());
            acc = if j % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
        }
        acc
    }
}

impl<T: LocalRing> Matrix<T> {
    /// Gauss–Jordan inversion pivoting on units. Over a local ring this
    /// succeeds exactly when the reduction to the residue field is invertible.
    pub fn invert(&self) -> Result<Self> {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let mut a = self.clone();
        let mut inv = Matrix::identity_like(n, &self.data[0]);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a.get(r, col).is_unit())
                .ok_or_else(|| Error::NotInvertible(format!("no unit pivot in column {col}")))?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let pinv = a.get(col, col).unit_inverse().expect("pivot is a unit");
            a.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                a.row_axpy(r, col, &factor);
                inv.row_axpy(r, col, &factor);
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.invert().is_ok()
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for j in 0..self.cols {
            self.data.swap(r1 * self.cols + j, r2 * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &T) {
        for j in 0..self.cols {
            let v = self.get(r, j).times(c);
            self.set(r, j, v);
        }
    }

    /// row_r -= factor * row_src
    fn row_axpy(&mut self, r: usize, src: usize, factor: &T) {
        for j in 0..self.cols {
            let v = self.get(r, j).minus(&factor.times(self.get(src, j)));
            self.set(r, j, v);
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<&T> = (0..self.cols).map(|j| &self.data[i * self.cols + j]).collect();
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

impl KMatrix {
    pub fn to_series(&self, n: usize) -> SeriesMatrix {
        self.map(|&c| TruncSeries::constant(c, n))
    }

    pub fn to_poly(&self) -> PolyMatrix {
        self.map(|&c| Poly::constant(c))
    }
}

impl PolyMatrix {
    /// Truncating conversion; see `to_series_exact`.
    pub fn to_series(&self, n: usize) -> SeriesMatrix {
        self.map(|f| f.to_series(n))
    }

    pub fn to_series_exact(&self, n: usize) -> Option<SeriesMatrix> {
        let entries: Option<Vec<TruncSeries>> = self.entries().map(|f| f.to_series_exact(n)).collect();
        let entries = entries?;
        Some(Matrix { rows: self.rows(), cols: self.cols(), data: entries })
    }

    /// Every entry constant; returns the k_E matrix.
    pub fn to_constant(&self) -> Option<KMatrix> {
        if self.entries().all(|f| f.is_constant()) {
            Some(self.map(|f| f.coeff(0)))
        } else {
            None
        }
    }
}

impl SeriesMatrix {
    /// Common precision: the minimum over the entries.
    pub fn precision(&self) -> usize {
        self.entries().map(|s| s.precision()).min().unwrap_or(0)
    }

    pub fn field(&self) -> super::FiniteField {
        self.get(0, 0).field()
    }

    /// Reduction modulo u.
    pub fn constant_matrix(&self) -> KMatrix {
        self.map(|s| s.constant_term())
    }

    /// All entries constant (at the known precision).
    pub fn is_constant(&self) -> bool {
        self.entries().all(|s| s.is_constant())
    }

    pub fn to_poly(&self) -> PolyMatrix {
        self.map(|s| s.to_poly())
    }

    pub fn truncate(&self, n: usize) -> SeriesMatrix {
        self.map(|s| s.truncate(n))
    }

    /// Bring every entry to a common precision (the minimum).
    pub fn equalize(&self) -> SeriesMatrix {
        let n = self.precision();
        self.truncate(n)
    }

    /// Entrywise u -> u^p. `truncated` reports whether any nonzero term fell off.
    pub fn phi_substitute(&self) -> Phi<SeriesMatrix> {
        let mut truncated = false;
        let value = self.map(|s| {
            let phi = s.phi_substitute();
            truncated |= phi.truncated;
            phi.value
        });
        Phi { value, truncated }
    }

    /// Every entry in k_E + u^k·k_E[[u]].
    pub fn in_const_plus_u_pow(&self, k: usize) -> bool {
        self.entries().all(|s| s.in_const_plus_u_pow(k))
    }

    /// Membership in GL_d(k_E + u^k k_E[[u]]).
    pub fn in_gl_const_plus_u_pow(&self, k: usize) -> bool {
        self.is_square() && self.in_const_plus_u_pow(k) && self.constant_matrix().is_invertible()
    }

    /// Right-multiply by diag(u^{e_j}): column j shifted up by e_j.
    pub fn mul_diag_u_pow(&self, e: &[usize]) -> SeriesMatrix {
        assert_eq!(e.len(), self.cols());
        Matrix::from_fn(self.rows(), self.cols(), |i, j| self.get(i, j).shift_up(e[j]))
    }

    /// Left-multiply by diag(u^{e_i}): row i shifted up by e_i.
    pub fn diag_u_pow_mul(&self, e: &[usize]) -> SeriesMatrix {
        assert_eq!(e.len(), self.rows());
        Matrix::from_fn(self.rows(), self.cols(), |i, j| self.get(i, j).shift_up(e[i]))
    }

    /// Divide column j exactly by u^{e_j}; precision drops to N - max e.
    pub fn div_columns_u_pow(&self, e: &[usize]) -> Result<SeriesMatrix> {
        assert_eq!(e.len(), self.cols());
        let n = self.precision();
        let emax = e.iter().copied().max().unwrap_or(0);
        if emax >= n {
            return Err(Error::PrecisionExhausted(format!("division by u^{emax} at precision {n}")));
        }
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let q =
                    self.get(i, j).truncate(n).div_u_pow(e[j]).map_err(|_| {
                        Error::DivisibilityViolation(format!("u^{} does not divide entry ({i},{j})", e[j]))
                    })?;
                out.push(q.truncate(n - emax));
            }
        }
        Ok(Matrix { rows: self.rows(), cols: self.cols(), data: out })
    }

    /// Divide column j by u^{e_j} keeping per-column precision N - e_j.
    pub fn div_columns_u_pow_exact(&self, e: &[usize]) -> Result<SeriesMatrix> {
        assert_eq!(e.len(), self.cols());
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let q = self.get(i, j).div_u_pow(e[j]).map_err(|err| match err {
                    Error::PrecisionExhausted(m) => Error::PrecisionExhausted(m),
                    _ => Error::DivisibilityViolation(format!("u^{} does not divide entry ({i},{j})", e[j])),
                })?;
                out.push(q);
            }
        }
        Ok(Matrix { rows: self.rows(), cols: self.cols(), data: out })
    }

    /// Right-multiply by diag(u^{e_j}) raising each column's precision by e_j.
    pub fn raise_columns_u_pow(&self, e: &[usize]) -> SeriesMatrix {
        assert_eq!(e.len(), self.cols());
        Matrix::from_fn(self.rows(), self.cols(), |i, j| self.get(i, j).raise_u_pow(e[j]))
    }

    /// u-adic valuation of each diagonal entry.
    pub fn diag_valuations(&self) -> Vec<super::Valuation> {
        (0..self.rows().min(self.cols())).map(|i| self.get(i, i).u_valuation()).collect()
    }

    /// Equality at the common precision of the two matrices.
    pub fn agrees_with(&self, o: &SeriesMatrix) -> bool {
        if self.rows() != o.rows() || self.cols() != o.cols() {
            return false;
        }
        self.entries().zip(o.entries()).all(|(a, b)| (a - b).is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::super::FiniteField;
    use super::*;

    fn s(k: FiniteField, c: &[i64], n: usize) -> TruncSeries {
        TruncSeries::from_ints(k, c, n)
    }

    #[test]
    fn unipotent_inverse() {
        let k = FiniteField::prime(5).unwrap();
        let m =
            Matrix::from_rows(vec![vec![s(k, &[1], 6), s(k, &[0, 1], 6)], vec![s(k, &[0], 6), s(k, &[1], 6)]]).unwrap();
        let inv = m.invert().unwrap();
        assert_eq!(*inv.get(0, 1), s(k, &[0, -1], 6));
        assert_eq!(inv.mul(&m), Matrix::identity_like(2, m.get(0, 0)));
    }

    #[test]
    fn singular_constant_part_is_rejected() {
        let k = FiniteField::prime(3).unwrap();
        let m = Matrix::from_rows(vec![vec![s(k, &[1, 1], 4), s(k, &[1], 4)], vec![s(k, &[1], 4), s(k, &[1, 2], 4)]])
            .unwrap();
        assert!(matches!(m.invert(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn det_of_permutation_is_sign() {
        let k = FiniteField::prime(7).unwrap();
        let w = KMatrix::permutation(&[1, 2, 0], &k.one());
        assert!(w.det().is_one());
        let t = KMatrix::permutation(&[1, 0, 2], &k.one());
        assert_eq!(t.det(), k.from_int(-1));
    }

    #[test]
    fn permutation_conjugates_diagonal() {
        let k = FiniteField::prime(11).unwrap();
        let d = KMatrix::diagonal(&[k.from_int(2), k.from_int(3), k.from_int(5)]);
        let sigma = [2, 0, 1];
        let w = KMatrix::permutation(&sigma, &k.one());
        let conj = w.mul(&d).mul(&w.invert().unwrap());
        for x in 0..3 {
            assert_eq!(conj.get(x, x), d.get(sigma[x], sigma[x]));
        }
    }
}
