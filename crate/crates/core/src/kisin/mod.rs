//! Kisin-module data modulo ω_E: Hodge–Tate weight arrays, rank-one
//! modules, φ-matrix families with witness factorizations, generators and
//! verifiers.
//!
//! A family F_0, ..., F_{f-1} lists the matrices of φ from index i-1 to i
//! (indices mod f). φ fixes k_E and sends u to u^p.

mod generate;
mod verify;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::localfield::LocalRingElem;
use crate::rings::wire::{matrix_from_value, matrix_to_value};
use crate::rings::{FieldElem, FiniteField, KMatrix, Matrix, SeriesMatrix, TruncSeries};

pub use generate::{make_adapted_phi, make_triangular_from_factors, make_triangular_instance};
pub use verify::{check_e_phi_shape, diag_shape_verify, family_diag_valuations, verify_e_phi_certificate, SigmaPair};

/// Labelled weights r[i][j][x]: embedding index i < f, j < e, x < d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HTWeights {
    pub p: u32,
    pub f: usize,
    pub e: usize,
    pub d: usize,
    pub r: Vec<Vec<Vec<usize>>>,
}

impl HTWeights {
    pub fn new(p: u32, r: Vec<Vec<Vec<usize>>>) -> Result<HTWeights> {
        let f = r.len();
        let e = r.first().map_or(0, |ri| ri.len());
        let d = r.first().and_then(|ri| ri.first()).map_or(0, |rij| rij.len());
        let w = HTWeights { p, f, e, d, r };
        w.validate()?;
        Ok(w)
    }

    /// The same weights (r_0, r_1, ...) at every embedding index.
    pub fn uniform(p: u32, f: usize, per_j: Vec<Vec<usize>>) -> Result<HTWeights> {
        HTWeights::new(p, vec![per_j; f])
    }

    pub fn validate(&self) -> Result<()> {
        if self.f == 0 || self.e == 0 || self.d == 0 {
            return Err(Error::ConfigError("f, e and d must be positive".into()));
        }
        if self.r.len() != self.f {
            return Err(Error::ConfigError(format!("{} rows of weights for f = {}", self.r.len(), self.f)));
        }
        for (i, ri) in self.r.iter().enumerate() {
            if ri.len() != self.e {
                return Err(Error::ConfigError(format!("index {i}: {} weight lists for e = {}", ri.len(), self.e)));
            }
            for (j, rij) in ri.iter().enumerate() {
                if rij.len() != self.d {
                    return Err(Error::ConfigError(format!(
                        "r[{i}][{j}] has {} entries for d = {}",
                        rij.len(),
                        self.d
                    )));
                }
                if rij[0] != 0 || rij.windows(2).any(|w| w[0] >= w[1]) || rij[self.d - 1] > self.p as usize {
                    return Err(Error::ConfigError(format!(
                        "r[{i}][{j}] = {rij:?} must start at 0, increase strictly and stay <= p"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn r(&self, i: usize, j: usize) -> &[usize] {
        &self.r[i][j]
    }

    /// Σ_j r_{i,j,d} <= p for every i.
    pub fn a0(&self) -> bool {
        self.r.iter().all(|ri| ri.iter().map(|rij| rij[self.d - 1]).sum::<usize>() <= self.p as usize)
    }

    /// (e = 2) r_{i,0,x+1} - r_{i,0,x} > r_{i,1,d}.
    pub fn a1(&self) -> bool {
        self.e == 2 && self.r.iter().all(|ri| ri[0].windows(2).all(|w| w[1] - w[0] > ri[1][self.d - 1]))
    }

    /// (e = 2) r_{i,0,d} + r_{i,1,d} <= p - 2.
    pub fn a2(&self) -> bool {
        self.e == 2 && self.r.iter().all(|ri| ri[0][self.d - 1] + ri[1][self.d - 1] + 2 <= self.p as usize)
    }

    /// Weights {0, 1, ..., d-1} at every j != 0.
    pub fn serre_type(&self) -> bool {
        self.r.iter().all(|ri| ri.iter().skip(1).all(|rij| rij.iter().enumerate().all(|(x, &v)| v == x)))
    }
}

/// Rank one over k_E: φ(e_{i-1}) = (a)_i u^{t_i} e_i, (a)_0 = a, (a)_i = 1 otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneBar {
    pub t: Vec<usize>,
    pub a: FieldElem,
}

impl RankOneBar {
    pub fn to_family(&self, n: usize) -> PhiFamily {
        let k = self.a.field();
        let mats = self
            .t
            .iter()
            .enumerate()
            .map(|(i, &ti)| {
                let c = if i == 0 { self.a } else { k.one() };
                Matrix::diagonal(&[TruncSeries::monomial(c, ti, n)])
            })
            .collect();
        PhiFamily::new(mats, None).expect("1x1 families are well formed")
    }
}

/// Rank one at the O-level: φ(ê_{i-1}) = (â)_i ∏_j (u - π_{ij})^{r_{i,j}} ê_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneO {
    pub rmatrix: Vec<Vec<usize>>,
    pub ahat: LocalRingElem,
}

/// Reduction modulo ω_E: every π_{ij} reduces to 0, so t_i = Σ_j r_{i,j} and
/// a is the residue of â in F_p.
pub fn rank1_reduce(m: &RankOneO) -> Result<RankOneBar> {
    let ctx = m.ahat.ctx();
    if !m.ahat.is_unit() {
        return Err(Error::NotAUnit("â must be a unit".into()));
    }
    let k = FiniteField::prime(ctx.p() as u32)?;
    let a = k.from_int((m.ahat.coeffs()[0] % ctx.p()) as i64);
    Ok(RankOneBar { t: m.rmatrix.iter().map(|row| row.iter().sum()).collect(), a })
}

/// F_i = T·X·(∏ diag(u^{λ_j})·Z_j)·diag(u^{λ_0})·S, the middle product taken
/// from j = e-1 down to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiWitness {
    pub t: SeriesMatrix,
    pub x: SeriesMatrix,
    pub middle: Vec<(Vec<usize>, KMatrix)>,
    pub lambda0: Vec<usize>,
    pub s: SeriesMatrix,
}

impl PhiWitness {
    pub fn product(&self) -> SeriesMatrix {
        let n = self.x.precision();
        let mut m = self.t.mul(&self.x);
        for (lam, z) in &self.middle {
            m = m.mul_diag_u_pow(lam).mul(&z.to_series(n));
        }
        m.mul_diag_u_pow(&self.lambda0).mul(&self.s)
    }

    fn to_value(&self) -> Value {
        let n = self.x.precision();
        json!({
            "T": matrix_to_value(&self.t),
            "X": matrix_to_value(&self.x),
            "middle": self.middle.iter().map(|(lam, z)| json!({"Lambda": lam, "Z": matrix_to_value(&z.to_series(n))})).collect::<Vec<_>>(),
            "Lambda0": self.lambda0,
            "S": matrix_to_value(&self.s),
        })
    }

    fn from_value(v: &Value) -> Result<PhiWitness> {
        let get = |key: &str| v.get(key).ok_or_else(|| Error::Malformed(format!("witness lacks \"{key}\"")));
        let exps = |v: &Value| -> Result<Vec<usize>> {
            serde_json::from_value(v.clone()).map_err(|e| Error::Malformed(e.to_string()))
        };
        let middle = get("middle")?
            .as_array()
            .ok_or_else(|| Error::Malformed("\"middle\" must be an array".into()))?
            .iter()
            .map(|m| {
                let lam = exps(m.get("Lambda").ok_or_else(|| Error::Malformed("middle factor lacks Lambda".into()))?)?;
                let z = matrix_from_value(m.get("Z").ok_or_else(|| Error::Malformed("middle factor lacks Z".into()))?)?;
                if !z.is_constant() {
                    return Err(Error::Malformed("Z must be constant".into()));
                }
                Ok((lam, z.constant_matrix()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PhiWitness {
            t: matrix_from_value(get("T")?)?,
            x: matrix_from_value(get("X")?)?,
            middle,
            lambda0: exps(get("Lambda0")?)?,
            s: matrix_from_value(get("S")?)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiFamily {
    mats: Vec<SeriesMatrix>,
    witnesses: Option<Vec<PhiWitness>>,
}

impl PhiFamily {
    pub fn new(mats: Vec<SeriesMatrix>, witnesses: Option<Vec<PhiWitness>>) -> Result<PhiFamily> {
        let Some(first) = mats.first() else {
            return Err(Error::Malformed("empty family".into()));
        };
        let d = first.rows();
        if mats.iter().any(|m| !m.is_square() || m.rows() != d) {
            return Err(Error::DimensionMismatch("family matrices must share one square size".into()));
        }
        if witnesses.as_ref().is_some_and(|w| w.len() != mats.len()) {
            return Err(Error::DimensionMismatch("one witness per index".into()));
        }
        Ok(PhiFamily { mats, witnesses })
    }

    pub fn f(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn field(&self) -> FiniteField {
        self.mats[0].field()
    }

    pub fn precision(&self) -> usize {
        self.mats.iter().map(|m| m.precision()).min().unwrap_or(0)
    }

    pub fn mats(&self) -> &[SeriesMatrix] {
        &self.mats
    }

    pub fn witnesses(&self) -> Option<&[PhiWitness]> {
        self.witnesses.as_deref()
    }

    /// Witness products reproduce F_i and S_i = φ(T_{i-1}^{-1}).
    pub fn check_witnesses(&self) -> Result<()> {
        let Some(ws) = &self.witnesses else {
            return Err(Error::WitnessMismatch("family carries no witnesses".into()));
        };
        let f = self.f();
        for i in 0..f {
            if !ws[i].product().agrees_with(&self.mats[i]) {
                return Err(Error::WitnessMismatch(format!("witness product differs from F_{i}")));
            }
            let tprev = ws[(i + f - 1) % f].t.invert()?;
            if !tprev.phi_substitute().value.agrees_with(&ws[i].s) {
                return Err(Error::WitnessMismatch(format!("S_{i} is not φ(T_{}^-1)", (i + f - 1) % f)));
            }
        }
        Ok(())
    }

    pub fn to_value(&self) -> Value {
        let mut v = json!({
            "f": self.f(),
            "d": self.dim(),
            "F": self.mats.iter().map(matrix_to_value).collect::<Vec<_>>(),
        });
        if let Some(ws) = &self.witnesses {
            v["witnesses"] = Value::Array(ws.iter().map(PhiWitness::to_value).collect());
        }
        v
    }

    pub fn from_value(v: &Value) -> Result<PhiFamily> {
        let mats = v
            .get("F")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("family needs an \"F\" array".into()))?
            .iter()
            .map(matrix_from_value)
            .collect::<Result<Vec<_>>>()?;
        let witnesses = match v.get("witnesses") {
            None | Some(Value::Null) => None,
            Some(Value::Array(ws)) => Some(ws.iter().map(PhiWitness::from_value).collect::<Result<Vec<_>>>()?),
            Some(_) => return Err(Error::Malformed("\"witnesses\" must be an array".into())),
        };
        PhiFamily::new(mats, witnesses)
    }
}

/// Block upper-triangular family [[F^sub_i, C_i], [0, F^quot_i]].
pub fn build_extension(sub: &PhiFamily, quot: &PhiFamily, classes: &[SeriesMatrix]) -> Result<PhiFamily> {
    if sub.f() != quot.f() || classes.len() != sub.f() {
        return Err(Error::DimensionMismatch("sub, quotient and classes disagree on f".into()));
    }
    let (ds, dq) = (sub.dim(), quot.dim());
    let mut mats = Vec::with_capacity(sub.f());
    for (i, c) in classes.iter().enumerate() {
        if c.rows() != ds || c.cols() != dq {
            return Err(Error::DimensionMismatch(format!(
                "class {i} is {}x{}, expected {ds}x{dq}",
                c.rows(),
                c.cols()
            )));
        }
        let zero = Matrix::zeros_like(dq, ds, c.get(0, 0));
        mats.push(Matrix::block(&sub.mats[i], c, &zero, &quot.mats[i]));
    }
    PhiFamily::new(mats, None)
}

/// Next permutation in lexicographic order, in place; false after the last.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).expect("v[i+1] > v[i]");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::LocalCtx;

    #[test]
    fn rank1_sums_rows() {
        let ctx = LocalCtx::new(5, 4, 2).unwrap();
        let m = RankOneO { rmatrix: vec![vec![1, 2], vec![3, 0]], ahat: LocalRingElem::one(ctx) };
        let r = rank1_reduce(&m).unwrap();
        assert_eq!(r.t, vec![3, 3]);
        assert!(r.a.is_one());
        let zero = RankOneO { rmatrix: vec![vec![0, 0]; 3], ahat: LocalRingElem::from_int(ctx, 7) };
        assert_eq!(rank1_reduce(&zero).unwrap().t, vec![0, 0, 0]);
        let col = RankOneO { rmatrix: vec![vec![4], vec![1]], ahat: LocalRingElem::one(ctx) };
        assert_eq!(rank1_reduce(&col).unwrap().t, vec![4, 1]);
    }

    #[test]
    fn weight_predicates() {
        let w = HTWeights::uniform(11, 1, vec![vec![0, 5], vec![0, 1]]).unwrap();
        assert!(w.a0() && w.a1() && w.a2() && w.serre_type());
        let bad = HTWeights::uniform(11, 1, vec![vec![0, 5], vec![0, 6]]).unwrap();
        assert!(!bad.a1());
        assert!(HTWeights::uniform(11, 1, vec![vec![0, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn permutations_in_lex_order() {
        let mut v = vec![0, 1, 2];
        let mut seen = vec![v.clone()];
        while next_permutation(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 6);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn extension_of_rank_ones() {
        let k = FiniteField::prime(5).unwrap();
        let a = RankOneBar { t: vec![2], a: k.from_int(3) }.to_family(10);
        let b = RankOneBar { t: vec![1], a: k.one() }.to_family(10);
        let c = Matrix::diagonal(&[TruncSeries::monomial(k.from_int(2), 3, 10)]);
        let ext = build_extension(&a, &b, &[c]).unwrap();
        assert!(ext.mats()[0].is_upper_triangular());
        assert_eq!(ext.mats()[0].det().u_valuation(), crate::rings::Valuation::Finite(3));
        let bad = Matrix::zeros_like(2, 1, &TruncSeries::zero(k, 10));
        assert!(matches!(build_extension(&a, &b, &[bad]), Err(Error::DimensionMismatch(_))));
    }
}
