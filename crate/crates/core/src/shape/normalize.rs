//! Bringing an upper-triangular φ-family to (DEG) by φ-conjugation
//! F_i -> T_i·F_i·φ(T_{i-1}^{-1}) with elementary T_i.
//!
//! Each elimination clears an entry of F_i exactly mod u^N and disturbs
//! F_{i+1} only through φ of the correction, which raises u-adic valuation
//! because every diagonal exponent is at most p - 2.

use crate::error::{Error, Result};
use crate::kisin::{PhiFamily, PhiWitness};
use crate::rings::{Matrix, SeriesMatrix, TruncSeries, Valuation};

fn row_scale(m: &mut SeriesMatrix, x: usize, v: &TruncSeries) {
    for c in 0..m.cols() {
        let e = m.get(x, c) * v;
        m.set(x, c, e);
    }
}

fn col_scale(m: &mut SeriesMatrix, x: usize, v: &TruncSeries) {
    for r in 0..m.rows() {
        let e = m.get(r, x) * v;
        m.set(r, x, e);
    }
}

/// row x += c·row y
fn row_add(m: &mut SeriesMatrix, x: usize, y: usize, c: &TruncSeries) {
    for col in 0..m.cols() {
        let e = m.get(x, col) + &(c * m.get(y, col));
        m.set(x, col, e);
    }
}

/// column y -= c·column x
fn col_sub(m: &mut SeriesMatrix, y: usize, x: usize, c: &TruncSeries) {
    for r in 0..m.rows() {
        let e = m.get(r, y) - &(c * m.get(r, x));
        m.set(r, y, e);
    }
}

pub fn normalize_to_deg(fam: &PhiFamily) -> Result<(Vec<SeriesMatrix>, PhiFamily)> {
    let (f, d, n) = (fam.f(), fam.dim(), fam.precision());
    let k = fam.field();
    let p = k.p() as usize;
    let mut mats: Vec<SeriesMatrix> = fam.mats().iter().map(|m| m.truncate(n)).collect();
    let mut t = vec![vec![0usize; d]; f];
    let mut lead = vec![vec![k.one(); d]; f];
    for (i, m) in mats.iter().enumerate() {
        if !m.is_upper_triangular() {
            return Err(Error::NotNormalizable(format!("F_{i} is not upper triangular")));
        }
        for (x, v) in m.diag_valuations().into_iter().enumerate() {
            match v {
                Valuation::Finite(e) if (e as usize) + 2 <= p && (e as usize) < n => {
                    t[i][x] = e as usize;
                    lead[i][x] = m.get(x, x).coeff(e as usize);
                }
                _ => {
                    return Err(Error::NotNormalizable(format!(
                        "diagonal valuation {v:?} of F_{i} at {x} exceeds p - 2"
                    )))
                }
            }
        }
        let mut sorted = t[i].clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotNormalizable(format!("repeated diagonal valuations in F_{i}")));
        }
    }

    let one = TruncSeries::one(k, n);
    let mut tacc: Vec<SeriesMatrix> = vec![Matrix::identity_like(d, &one); f];
    let budget = 4 * p * d * d * f;
    let mut ops = 0usize;
    loop {
        let mut changed = false;
        for i in 0..f {
            let j = (i + 1) % f;
            for x in 0..d {
                let v = mats[i].get(x, x).div_u_pow(t[i][x])?.scale(lead[i][x].inv().expect("nonzero"));
                if v.coeffs().iter().skip(1).all(|c| c.is_zero()) {
                    continue;
                }
                let vinv = v.invert()?.pad(n);
                let back = vinv.invert()?.phi_substitute().value;
                row_scale(&mut mats[i], x, &vinv);
                row_scale(&mut tacc[i], x, &vinv);
                col_scale(&mut mats[j], x, &back);
                ops += 1;
                changed = true;
            }
            for y in 1..d {
                let ty = t[i][y];
                let ainv = lead[i][y].inv().expect("nonzero");
                for x in (0..y).rev() {
                    let e = mats[i].get(x, y);
                    if e.coeffs()[ty..].iter().all(|c| c.is_zero()) {
                        continue;
                    }
                    let c = TruncSeries::new(k, e.coeffs()[ty..].to_vec()).pad(n).scale(-ainv);
                    let back = c.phi_substitute().value;
                    row_add(&mut mats[i], x, y, &c);
                    row_add(&mut tacc[i], x, y, &c);
                    col_sub(&mut mats[j], y, x, &back);
                    ops += 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        if ops > budget {
            return Err(Error::NotNormalizable(format!("no (DEG) form after {ops} eliminations")));
        }
    }

    let witnesses = match fam.witnesses() {
        None => None,
        Some(ws) => {
            let mut out = Vec::with_capacity(f);
            for i in 0..f {
                let prev = (i + f - 1) % f;
                let w = &ws[i];
                out.push(PhiWitness {
                    t: tacc[i].mul(&w.t),
                    s: w.s.mul(&tacc[prev].invert()?.phi_substitute().value),
                    ..w.clone()
                });
            }
            Some(out)
        }
    };
    let out = PhiFamily::new(mats, witnesses)?;
    Ok((tacc, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{random, FiniteField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn conjugates(before: &PhiFamily, ts: &[SeriesMatrix], after: &PhiFamily) -> bool {
        let f = before.f();
        (0..f).all(|i| {
            let back = ts[(i + f - 1) % f].invert().unwrap().phi_substitute().value;
            ts[i].mul(&before.mats()[i]).mul(&back).agrees_with(&after.mats()[i])
        })
    }

    fn is_deg(m: &SeriesMatrix) -> bool {
        let d = m.rows();
        (0..d).all(|y| {
            let ty = m.get(y, y).u_valuation().finite().unwrap() as usize;
            m.get(y, y).coeffs()[ty + 1..].iter().all(|c| c.is_zero())
                && (0..y).all(|x| m.get(x, y).coeffs()[ty..].iter().all(|c| c.is_zero()))
        })
    }

    #[test]
    fn deg_input_is_fixed() {
        let k = FiniteField::prime(7).unwrap();
        let f = Matrix::from_rows(vec![
            vec![TruncSeries::from_ints(k, &[0, 2], 28), TruncSeries::from_ints(k, &[1, 3], 28)],
            vec![TruncSeries::zero(k, 28), TruncSeries::from_ints(k, &[0, 0, 0, 4], 28)],
        ])
        .unwrap();
        let fam = PhiFamily::new(vec![f], None).unwrap();
        let (ts, out) = normalize_to_deg(&fam).unwrap();
        assert_eq!(out, fam);
        assert_eq!(ts[0], Matrix::identity_like(2, &TruncSeries::one(k, 28)));
    }

    #[test]
    fn rank_one_unit_is_absorbed() {
        let k = FiniteField::prime(5).unwrap();
        let v = TruncSeries::from_ints(k, &[0, 0, 3, 1, 4, 0, 2], 20);
        let fam = PhiFamily::new(vec![Matrix::diagonal(&[v])], None).unwrap();
        let (ts, out) = normalize_to_deg(&fam).unwrap();
        assert_eq!(out.mats()[0].get(0, 0), &TruncSeries::monomial(k.from_int(3), 2, 20));
        assert!(conjugates(&fam, &ts, &out));
    }

    #[test]
    fn random_conjugate_of_deg_form() {
        let k = FiniteField::prime(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in 1..=3 {
            let mats: Vec<SeriesMatrix> = (0..f)
                .map(|_| {
                    let u = random::upper_gl_series(k, 2, 28, &mut rng);
                    u.mul_diag_u_pow(&[1, 4])
                })
                .collect();
            let fam = PhiFamily::new(mats, None).unwrap();
            let (ts, out) = normalize_to_deg(&fam).unwrap();
            assert!(conjugates(&fam, &ts, &out));
            assert!(out.mats().iter().all(is_deg));
            assert_eq!(out.mats()[0].diag_valuations(), fam.mats()[0].diag_valuations());
        }
    }

    #[test]
    fn large_exponent_is_refused() {
        let k = FiniteField::prime(5).unwrap();
        let fam = PhiFamily::new(vec![Matrix::diagonal(&[TruncSeries::monomial(k.one(), 4, 20)])], None).unwrap();
        assert!(matches!(normalize_to_deg(&fam), Err(Error::NotNormalizable(_))));
    }
}
