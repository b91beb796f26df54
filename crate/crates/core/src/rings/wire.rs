//! JSON forms of series and matrices.
//!
//! A series is `{"p":5,"m":1,"N":20,"coeffs":[[0],[1],...]}` with each
//! F_{p^m} coefficient written as its m coordinates over F_p. A matrix is
//! `{"d":2,"entries":[[s, s],[s, s]]}`; non-square blocks use "rows"/"cols".

use serde::{Deserialize, Serialize};

use super::{FiniteField, Matrix, SeriesMatrix, TruncSeries};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub p: u32,
    pub m: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub coeffs: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cols: Option<usize>,
    pub entries: Vec<Vec<SeriesJson>>,
}

impl From<&TruncSeries> for SeriesJson {
    fn from(s: &TruncSeries) -> Self {
        let k = s.field();
        SeriesJson {
            p: k.p(),
            m: k.m(),
            n: s.precision(),
            coeffs: s.coeffs().iter().map(|c| c.coeffs().iter().map(|&x| x as i64).collect()).collect(),
        }
    }
}

impl TryFrom<&SeriesJson> for TruncSeries {
    type Error = Error;
    fn try_from(j: &SeriesJson) -> Result<Self> {
        let k = FiniteField::new(j.p, j.m)?;
        if j.n == 0 {
            return Err(Error::Malformed("series precision N must be positive".into()));
        }
        if j.coeffs.len() > j.n {
            return Err(Error::Malformed(format!("{} coefficients exceed precision N = {}", j.coeffs.len(), j.n)));
        }
        let mut coeffs = Vec::with_capacity(j.n);
        for c in &j.coeffs {
            coeffs.push(k.from_coeffs(c)?);
        }
        coeffs.resize(j.n, k.zero());
        Ok(TruncSeries::new(k, coeffs))
    }
}

impl From<&SeriesMatrix> for MatrixJson {
    fn from(m: &SeriesMatrix) -> Self {
        let entries = m.to_rows().iter().map(|row| row.iter().map(SeriesJson::from).collect()).collect();
        if m.is_square() {
            MatrixJson { d: Some(m.rows()), rows: None, cols: None, entries }
        } else {
            MatrixJson { d: None, rows: Some(m.rows()), cols: Some(m.cols()), entries }
        }
    }
}

impl TryFrom<&MatrixJson> for SeriesMatrix {
    type Error = Error;
    fn try_from(j: &MatrixJson) -> Result<Self> {
        let rows: Result<Vec<Vec<TruncSeries>>> =
            j.entries.iter().map(|row| row.iter().map(TruncSeries::try_from).collect()).collect();
        let m = Matrix::from_rows(rows?).map_err(|e| Error::Malformed(e.to_string()))?;
        let (r, c) = match (j.d, j.rows, j.cols) {
            (Some(d), None, None) => (d, d),
            (None, Some(r), Some(c)) => (r, c),
            _ => return Err(Error::Malformed("matrix needs either \"d\" or both \"rows\" and \"cols\"".into())),
        };
        if m.rows() != r || m.cols() != c {
            return Err(Error::Malformed(format!("declared {r}x{c}, found {}x{}", m.rows(), m.cols())));
        }
        let field = m.field();
        if m.entries().any(|s| s.field() != field) {
            return Err(Error::Malformed("entries over different fields".into()));
        }
        Ok(m)
    }
}

pub fn series_to_value(s: &TruncSeries) -> serde_json::Value {
    serde_json::to_value(SeriesJson::from(s)).expect("series serializes")
}

pub fn matrix_to_value(m: &SeriesMatrix) -> serde_json::Value {
    serde_json::to_value(MatrixJson::from(m)).expect("matrix serializes")
}

pub fn matrix_from_value(v: &serde_json::Value) -> Result<SeriesMatrix> {
    let j: MatrixJson = serde_json::from_value(v.clone()).map_err(|e| Error::Malformed(e.to_string()))?;
    SeriesMatrix::try_from(&j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_round_trip_in_extension_field() {
        let k = FiniteField::new(5, 2).unwrap();
        let s = TruncSeries::new(k, vec![k.element(7), k.element(0), k.element(24)]);
        let j = SeriesJson::from(&s);
        assert_eq!(j.coeffs[0], vec![2, 1]);
        assert_eq!(TruncSeries::try_from(&j).unwrap(), s);
    }

    #[test]
    fn matrix_shape_is_checked() {
        let v = serde_json::json!({"d": 2, "entries": [[{"p":5,"m":1,"N":2,"coeffs":[[1]]}]]});
        assert!(matrix_from_value(&v).is_err());
    }

    #[test]
    fn short_coefficient_list_is_zero_padded() {
        let j = SeriesJson { p: 3, m: 1, n: 5, coeffs: vec![vec![1], vec![2]] };
        let s = TruncSeries::try_from(&j).unwrap();
        assert_eq!(s.precision(), 5);
        assert_eq!(s, TruncSeries::from_ints(FiniteField::prime(3).unwrap(), &[1, 2], 5));
    }
}
