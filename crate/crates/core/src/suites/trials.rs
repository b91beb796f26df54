//! Per-suite parameter resolution and trial bodies. A trial returns
//! `Ok(detail)` on pass and `Err(detail)` on failure; errors raised by the
//! library during a trial are failures, recorded with their message.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::samplers::{sample_shape_instance, sample_tame_weights, triangularize};
use super::{Params, Resolved};
use crate::canonical::{
    all_property_z_correctors, check_property_z, ordering_from_product, property_z_canonicalize, q_factorize,
    q_pattern_holds,
};
use crate::error::{Error, Result};
use crate::filtration::{build_h, check_coe2, check_property_a, taylor_twist};
use crate::kisin::{
    diag_shape_verify, family_diag_valuations, make_triangular_instance, rank1_reduce, verify_e_phi_certificate,
    HTWeights, RankOneO,
};
use crate::localfield::{check_property_b, eisenstein_roots_lf, LPolynomial, LocalCtx, LocalFieldElem, LocalRingElem};
use crate::rings::{random, FiniteField, Matrix, Poly, SeriesMatrix, TruncSeries, Valuation};
use crate::shape::{
    allowable_step, check_deg, check_p, ext_block_sum, reduce_p_to_diagonal, shape_decompose_phi, shape_factorize,
    AllowableStep, BlockFactorization, ExtClass, ShapedMatrix,
};

const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

/// Suites that only touch k_E[[u]] and accept p = 2.
const RING_SUITES: [&str; 6] = [
    "property-z-uniqueness",
    "ordering-audit",
    "q-factorization",
    "shape-roundtrip",
    "allowable-biconditional",
    "block-linearity",
];

const ENUMERATION_CAP: usize = 200_000;

pub(super) struct Prepared {
    name: &'static str,
    res: Resolved,
    data: Data,
}

enum Data {
    Field(FiniteField),
    PropZ(Vec<SeriesMatrix>),
    Rank1 { ctx: LocalCtx, pis: Vec<LocalFieldElem>, grids: Vec<Vec<Vec<usize>>> },
    Local { ctx: LocalCtx, pis: Vec<LocalFieldElem> },
    Pairs { pis: Vec<LocalFieldElem>, pairs: Vec<(usize, usize)> },
    Coe2 { pis: Vec<LocalFieldElem>, grid: Vec<(usize, usize, usize)> },
}

fn defaults(name: &str) -> Resolved {
    let r = |p, e, d, f, n, big_m, delta| Resolved { p, m: 1, e, d, f, n, big_m, delta };
    match name {
        "property-z-uniqueness" => r(2, 1, 2, 1, 8, 1, 1),
        "ordering-audit" => r(5, 1, 4, 1, 24, 1, 3),
        "q-factorization" => r(3, 1, 3, 1, 30, 1, 1),
        "shape-roundtrip" => r(5, 1, 4, 1, 40, 1, 0),
        "allowable-biconditional" => r(5, 1, 4, 1, 1, 1, 0),
        "tameinertia" | "prop-shape" => r(11, 2, 3, 2, 44, 1, 0),
        "rank1-reduction" => r(5, 2, 1, 2, 1, 4, 0),
        "tame-differences" => r(5, 2, 1, 1, 1, 6, 0),
        "property-b-closure" | "taylor-twist" => r(5, if name == "taylor-twist" { 4 } else { 2 }, 1, 1, 1, 10, 0),
        "property-a-coe2" => r(5, 2, 1, 1, 1, 8, 0),
        "block-linearity" => r(5, 1, 3, 1, 12, 1, 0),
        _ => unreachable!("registry names only"),
    }
}

fn config<E: std::fmt::Display>(e: E) -> Error {
    Error::ConfigError(e.to_string())
}

fn resolve(name: &'static str, p: &Params) -> Result<Resolved> {
    let mut r = defaults(name);
    r.p = p.p.unwrap_or(r.p);
    r.m = p.m.unwrap_or(r.m);
    r.e = p.e.unwrap_or(r.e);
    r.d = p.d.unwrap_or(r.d);
    r.f = p.f.unwrap_or(r.f);
    r.n = p.n.unwrap_or(r.n);
    r.big_m = p.big_m.unwrap_or(r.big_m);
    r.delta = p.delta.unwrap_or(if name == "property-z-uniqueness" && r.p != 2 { 0 } else { r.delta });
    if !PRIMES.contains(&r.p) || (r.p == 2 && !RING_SUITES.contains(&name)) {
        return Err(config(format!("p = {} is not available for {name}", r.p)));
    }
    if r.d == 0 || r.d > 5 {
        return Err(config(format!("d = {} outside 1..=5", r.d)));
    }
    if r.f == 0 || r.f > 4 {
        return Err(config(format!("f = {} outside 1..=4", r.f)));
    }
    if r.n == 0 {
        return Err(config("N must be positive"));
    }
    Ok(r)
}

fn local(r: &Resolved, min_e: u32) -> Result<(LocalCtx, Vec<LocalFieldElem>)> {
    if ![1, 2, 4].contains(&r.e) || r.e < min_e {
        return Err(config(format!("e = {} must be in {{1, 2, 4}} and at least {min_e}", r.e)));
    }
    let ctx = LocalCtx::new(r.p as u64, r.big_m, r.e).map_err(config)?;
    Ok((ctx, eisenstein_roots_lf(ctx)))
}

pub(super) fn prepare(name: &'static str, params: &Params) -> Result<Prepared> {
    let res = resolve(name, params)?;
    let field = || FiniteField::new(res.p, res.m).map_err(config);
    let data = match name {
        "property-z-uniqueness" => Data::PropZ(enumerate_prop_z(field()?, res.d, res.delta, res.n)?),
        "tameinertia" | "prop-shape" if res.e != 2 => return Err(config(format!("e = {} (need 2)", res.e))),
        "rank1-reduction" => {
            let (ctx, pis) = local(&res, 1)?;
            let mut grids = Vec::new();
            for f in 1..=res.f {
                for e in 1..=res.e as usize {
                    for code in 0..4usize.pow((f * e) as u32) {
                        let mut rest = code;
                        let grid = (0..f)
                            .map(|_| {
                                (0..e)
                                    .map(|_| {
                                        let v = rest % 4;
                                        rest /= 4;
                                        v
                                    })
                                    .collect()
                            })
                            .collect();
                        grids.push(grid);
                    }
                }
            }
            Data::Rank1 { ctx, pis, grids }
        }
        "tame-differences" => {
            let (_, pis) = local(&res, 2)?;
            let n = pis.len();
            let pairs = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
            Data::Pairs { pis, pairs }
        }
        "property-a-coe2" => {
            let (_, pis) = local(&res, 2)?;
            let mut grid = Vec::new();
            for r in 1..=3 {
                for j in 1..res.e as usize {
                    for l in 1..res.p as usize {
                        grid.push((r, j, l));
                    }
                }
            }
            Data::Coe2 { pis, grid }
        }
        "property-b-closure" => {
            let (ctx, pis) = local(&res, 1)?;
            Data::Local { ctx, pis }
        }
        "taylor-twist" => {
            let (ctx, pis) = local(&res, 2)?;
            Data::Local { ctx, pis }
        }
        _ => Data::Field(field()?),
    };
    Ok(Prepared { name, res, data })
}

/// Entries c_0 + c_Δ·u^Δ + c_{Δ+1}·u^{Δ+1} (constants when Δ = 0); all d×d
/// matrices over them with invertible constant part.
fn enumerate_prop_z(k: FiniteField, d: usize, delta: usize, n: usize) -> Result<Vec<SeriesMatrix>> {
    if delta + 2 > n {
        return Err(config(format!("N = {n} must exceed Δ + 1 = {}", delta + 1)));
    }
    let exps: Vec<usize> = if delta == 0 { vec![0] } else { vec![0, delta, delta + 1] };
    let q = k.order() as usize;
    let entries: Vec<TruncSeries> = (0..q.pow(exps.len() as u32))
        .map(|code| {
            let mut c = vec![k.zero(); n];
            let mut rest = code;
            for &e in &exps {
                c[e] = k.element((rest % q) as u32);
                rest /= q;
            }
            TruncSeries::new(k, c)
        })
        .collect();
    let total = (entries.len() as u128).pow((d * d) as u32);
    if total > ENUMERATION_CAP as u128 {
        return Err(config(format!("{total} matrices to enumerate (cap {ENUMERATION_CAP})")));
    }
    let mut out = Vec::new();
    for code in 0..total as usize {
        let mut rest = code;
        let m = Matrix::from_fn(d, d, |_, _| {
            let e = entries[rest % entries.len()].clone();
            rest /= entries.len();
            e
        });
        if m.constant_matrix().is_invertible() {
            out.push(m);
        }
    }
    Ok(out)
}

type Outcome = std::result::Result<Value, Value>;

fn failure(what: &str, detail: Value) -> Value {
    json!({ "failed": what, "instance": detail })
}

fn ensure(ok: bool, what: &str, detail: &Value) -> std::result::Result<(), Value> {
    if ok {
        Ok(())
    } else {
        Err(failure(what, detail.clone()))
    }
}

fn lift<T>(r: Result<T>, detail: &Value) -> std::result::Result<T, Value> {
    r.map_err(|e| failure(&e.to_string(), detail.clone()))
}

fn ring_elem(ctx: LocalCtx, rng: &mut ChaCha8Rng) -> LocalRingElem {
    let q = (ctx.p() as i64).pow(ctx.big_m());
    let c: Vec<i64> = (0..ctx.e0()).map(|_| rng.gen_range(0..q)).collect();
    LocalRingElem::from_coeffs(ctx, &c).expect("coefficients below p^M")
}

impl Prepared {
    pub(super) fn resolved(&self) -> &Resolved {
        &self.res
    }

    pub(super) fn enumerated(&self) -> Option<usize> {
        match &self.data {
            Data::PropZ(v) => Some(v.len()),
            Data::Rank1 { grids, .. } => Some(grids.len()),
            Data::Pairs { pairs, .. } => Some(pairs.len()),
            Data::Coe2 { grid, .. } => Some(grid.len()),
            Data::Field(_) | Data::Local { .. } => None,
        }
    }

    pub(super) fn trial(&self, i: usize, rng: &mut ChaCha8Rng) -> Outcome {
        let r = &self.res;
        match (&self.data, self.name) {
            (Data::PropZ(mats), _) => prop_z(&mats[i], r.delta),
            (Data::Field(k), "ordering-audit") => ordering_audit(*k, r, rng),
            (Data::Field(k), "q-factorization") => q_factorization(*k, r, rng),
            (Data::Field(k), "shape-roundtrip") => shape_roundtrip(*k, r, rng),
            (Data::Field(k), "allowable-biconditional") => allowable(*k, r, rng),
            (Data::Field(k), "tameinertia") => tame_inertia(*k, r, rng, false),
            (Data::Field(k), "prop-shape") => tame_inertia(*k, r, rng, true),
            (Data::Field(k), "block-linearity") => block_linearity(*k, r, rng),
            (Data::Rank1 { ctx, pis, grids }, _) => rank1(*ctx, pis, &grids[i], rng),
            (Data::Pairs { pis, pairs }, _) => tame_difference(pis, pairs[i]),
            (Data::Coe2 { pis, grid }, _) => coe2(pis, grid[i]),
            (Data::Local { ctx, pis }, "property-b-closure") => property_b(*ctx, pis, rng),
            (Data::Local { ctx, pis }, _) => twist(*ctx, pis, rng),
            (Data::Field(_), name) => unreachable!("no trial body for {name}"),
        }
    }
}

fn prop_z(a: &SeriesMatrix, delta: usize) -> Outcome {
    let detail = json!({ "A": crate::rings::wire::matrix_to_value(a), "delta": delta });
    let cert = lift(property_z_canonicalize(a, delta), &detail)?;
    let all = all_property_z_correctors(a, delta);
    ensure(all.len() == 1 && all[0] == cert.c, "corrector is not unique or differs", &detail)?;
    ensure(check_property_z(&cert.m, delta).as_ref() == Some(&cert.ordering), "A·C lacks Property Z", &detail)?;
    Ok(json!({ "ordering": cert.ordering }))
}

fn ordering_audit(k: FiniteField, res: &Resolved, rng: &mut ChaCha8Rng) -> Outcome {
    let d = rng.gen_range(1..=res.d);
    let delta = rng.gen_range(1..=res.delta.max(1));
    let mut r: Vec<usize> = (0..d).map(|_| rng.gen_range(0..=delta)).collect();
    r.sort_unstable();
    let m4 = random::gl_const_plus_u_pow(k, d, delta, res.n, rng);
    let detail = json!({ "d": d, "delta": delta, "r": r });
    let (m2, m1) = lift(triangularize(&m4.diag_u_pow_mul(&r)), &detail)?;
    let u = random::upper_gl_series(k, d, res.n, rng);
    let (m2, m1) = (u.mul(&m2), u.mul(&m1));
    ensure(m2.is_invertible(), "M2 is singular", &detail)?;
    let ordering = lift(ordering_from_product(&m1, &r, &m4, delta, true), &detail)?;
    let t: Vec<i64> = m1.diag_valuations().iter().filter_map(|v| v.finite()).collect();
    ensure(t.len() == d, "M1 has a zero diagonal entry", &detail)?;
    ensure(
        (0..d).all(|x| r[ordering[x]] as i64 == t[x]) && r.iter().sum::<usize>() as i64 == t.iter().sum::<i64>(),
        "r_(k_x) differs from t_x",
        &detail,
    )?;
    Ok(json!({ "d": d, "delta": delta, "r": r, "t": t, "ordering": ordering }))
}

fn q_factorization(k: FiniteField, res: &Resolved, rng: &mut ChaCha8Rng) -> Outcome {
    let d = rng.gen_range(1..=res.d);
    let small = rng.gen_range(0..=res.delta);
    let mut r = vec![rng.gen_range(0..=1)];
    for _ in 1..d {
        r.push(r.last().unwrap() + small + rng.gen_range(0..=1));
    }
    let delta = (r[d - 1] + small + rng.gen_range(0..=1)).max(1);
    let detail = json!({ "d": d, "r": r, "Delta": delta, "delta": small });
    if delta + r[d - 1] >= res.n {
        return Err(failure("N too small for the drawn weights", detail));
    }
    let m4 = random::gl_const_plus_u_pow(k, d, delta, res.n, rng);
    let qf = lift(q_factorize(&r, &m4, delta, small), &detail)?;
    let lhs = m4.diag_u_pow_mul(&r).mul(&qf.m7.to_series(res.n));
    let rk: Vec<usize> = qf.ordering.iter().map(|&z| r[z]).collect();
    ensure(qf.q.raise_columns_u_pow(&rk).agrees_with(&lhs), "Q·diag(u^{r_k}) differs", &detail)?;
    ensure(q_pattern_holds(&qf.q, &qf.ordering, small), "Q pattern fails", &detail)?;
    ensure(qf.m7.is_unipotent(), "M7 is not unipotent", &detail)?;
    Ok(json!({ "d": d, "r": r, "Delta": delta, "delta": small, "ordering": qf.ordering }))
}

fn shape_roundtrip(k: FiniteField, res: &Resolved, rng: &mut ChaCha8Rng) -> Outcome {
    let d = rng.gen_range(1..=res.d);
    let (x, a, t, deltas) = sample_shape_instance(k, d, rng);
    let detail = json!({ "d": d, "t": t, "deltas": deltas });
    let a = a.to_series(res.n);
    let sf = lift(shape_factorize(&x, &a, &t, &deltas, None), &detail)?;
    ensure(sf.x1.matrix().mul(sf.x0.matrix()) == *x.matrix(), "X1·X0 differs from X", &detail)?;
    ensure(check_p(&sf.x0) && sf.x0.exponents() == t.as_slice(), "X0 is not (P) with exponents t", &detail)?;
    ensure(check_deg(&sf.x1) && sf.x1.exponents() == deltas.as_slice(), "X1 is not (DEG)", &detail)?;
    let delta = deltas.iter().copied().max().unwrap_or(0);
    ensure(sf.b.in_gl_const_plus_u_pow(delta), "B outside GL_d(k_E + u^δ)", &detail)?;
    let lhs = sf.x0.matrix().to_series(res.n).mul(&a);
    ensure(sf.b.raise_columns_u_pow(&t).agrees_with(&lhs), "X0·A differs from B·diag(u^t)", &detail)?;
    Ok(detail)
}

fn reduces(x: &ShapedMatrix) -> bool {
    let d = x.dim();
    let Ok(steps) = reduce_p_to_diagonal(x) else { return false };
    let mut cur = x.clone();
    for s in &steps {
        match allowable_step(&cur, s) {
            Ok(next) => cur = next,
            Err(_) => return false,
        }
    }
    steps.len() <= d * (d - 1) / 2 && cur.matrix().is_diagonal()
}

fn allowable(k: FiniteField, res: &Resolved, rng: &mut ChaCha8Rng) -> Outcome {
    let d = rng.gen_range(2..=res.d.max(2));
    let (s, legal) = loop {
        let mut pool: Vec<usize> = (0..=2 * d).collect();
        rand::seq::SliceRandom::shuffle(pool.as_mut_slice(), rng);
        let s: Vec<usize> = pool[..d].to_vec();
        let legal: Vec<(usize, usize)> =
            (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).filter(|&(i, j)| s[i] < s[j]).collect();
        if !legal.is_empty() {
            break (s, legal);
        }
    };
    let mut m = Matrix::from_fn(d, d, |i, j| {
        if i == j {
            Poly::u_pow(k, s[i])
        } else if i < j && s[i] < s[j] {
            Poly::monomial(k.random(rng), s[i])
        } else {
            Poly::zero(k)
        }
    });
    let want_p = rng.gen_bool(0.5);
    if !want_p {
        let i = rng.gen_range(0..d - 1);
        let j = rng.gen_range(i + 1..d);
        let e = if s[i] < s[j] {
            let choices: Vec<usize> = (0..=s[j] + 1).filter(|&e| e != s[i]).collect();
            choices[rng.gen_range(0..choices.len())]
        } else {
            rng.gen_range(0..=s[i])
        };
        let v = m.get(i, j) + &Poly::monomial(k.random_nonzero(rng), e);
        m.set(i, j, v);
    }
    let x = ShapedMatrix::new(m, s.clone()).expect("upper triangular with diagonal u^s");
    let (i, j) = legal[rng.gen_range(0..legal.len())];
    let step = AllowableStep { i, j, c: k.random(rng) };
    let detail = json!({ "d": d, "s": s, "step": [i, j], "p_input": check_p(&x) });
    ensure(check_p(&x) == want_p, "sampler produced the wrong kind of input", &detail)?;
    let y = lift(allowable_step(&x, &step), &detail)?;
    ensure(check_p(&y) == check_p(&x), "(P) changed under an allowable step", &detail)?;
    if want_p {
        ensure(reduces(&x) && reduces(&y), "(P) matrix did not reduce to diagonal", &detail)?;
    }
    Ok(detail)
}

fn compose(r: &[usize], sigma: &[usize]) -> Vec<usize> {
    sigma.iter().map(|&s| r[s]).collect()
}

fn tame_inertia(k: FiniteField, res: &Resolved, rng: &mut ChaCha8Rng, decompose: bool) -> Outcome {
    let w: HTWeights = sample_tame_weights(res.p, res.f, res.d, rng);
    let sigma0 = random::permutation(w.d, rng);
    let s0: Vec<Vec<usize>> = vec![sigma0; w.f];
    let s1: Vec<Vec<usize>> = (0..w.f).map(|_| random::permutation(w.d, rng)).collect();
    let seed: u64 = rng.gen();
    let detail = json!({ "weights": w.r, "sigma0": s0[0], "sigma1": s1, "seed": seed });
    let fam = lift(make_triangular_instance(&w, k, res.n, &s0, &s1, seed), &detail)?;
    lift(fam.check_witnesses(), &detail)?;
    let t = lift(family_diag_valuations(&fam), &detail)?;
    let planted: Vec<Vec<usize>> = (0..w.f)
        .map(|i| {
            let (a, b) = (compose(w.r(i, 0), &s0[i]), compose(w.r(i, 1), &s1[i]));
            a.iter().zip(&b).map(|(x, y)| x + y).collect()
        })
        .collect();
    ensure(t == planted, "diagonal valuations differ from the planted sums", &detail)?;
    let found = lift(diag_shape_verify(&t, &w), &detail)?;
    let Some(pairs) = found else { return Err(failure("no permutation pair fits", detail)) };
    for (i, (a, b)) in pairs.iter().enumerate() {
        let sum: Vec<usize> = compose(w.r(i, 0), a).iter().zip(compose(w.r(i, 1), b)).map(|(x, y)| x + y).collect();
        ensure(sum == t[i] && *a == s0[i] && *b == s1[i], "recovered pair differs", &detail)?;
    }
    if decompose {
        let factors = lift(shape_decompose_phi(&fam, &w), &detail)?;
        for (i, fi) in factors.iter().enumerate() {
            ensure(fi.product(fam.precision()).agrees_with(&fam.mats()[i]), "C·F1·F0 differs", &detail)?;
            ensure(check_p(&fi.f1) && check_p(&fi.f0), "a factor is not (P)", &detail)?;
        }
        ensure(verify_e_phi_certificate(&fam, &factors), "certificate rejected", &detail)?;
    }
    Ok(json!({ "d": w.d, "f": w.f, "t": t }))
}

fn block_linearity(k: FiniteField, res: &Resolved, rng: &mut ChaCha8Rng) -> Outcome {
    let (d, dp, n) = (rng.gen_range(1..=res.d), rng.gen_range(1..=res.d), res.n);
    let (a1, a0) = (random::gl_series(k, d, n, rng), random::gl_series(k, d, n, rng));
    let (b1, b0) = (random::gl_series(k, dp, n, rng), random::gl_series(k, dp, n, rng));
    let f = BlockFactorization { a: a1.mul(&a0), a_prime: b1.mul(&b0), a1, a0, a1_prime: b1, a0_prime: b0 };
    let class = |rng: &mut ChaCha8Rng| {
        let c1 = Matrix::from_fn(d, dp, |_, _| random::series(k, n, rng));
        let c0 = Matrix::from_fn(d, dp, |_, _| random::series(k, n, rng));
        ExtClass { c: f.a1.mul(&c0).add(&c1.mul(&f.a0_prime)), c1, c0 }
    };
    let (x, y) = (class(rng), class(rng));
    let (a, b) = (k.random(rng), k.random(rng));
    let detail = json!({ "d": d, "d_prime": dp, "a": a.coeffs(), "b": b.coeffs() });
    let s = lift(ext_block_sum(&f, &x, &y, a, b), &detail)?;
    let expect = x.c.map(|e| e.scale(a)).add(&y.c.map(|e| e.scale(b)));
    ensure(s.class.c.agrees_with(&expect), "combined class is not a·C1 + b·C2", &detail)?;
    ensure(s.left.mul(&s.right).agrees_with(&s.full), "block product differs", &detail)?;
    Ok(detail)
}

fn rank1(ctx: LocalCtx, pis: &[LocalFieldElem], grid: &[Vec<usize>], rng: &mut ChaCha8Rng) -> Outcome {
    let p = ctx.p();
    let mut ahat = ring_elem(ctx, rng);
    if !ahat.is_unit() {
        let c0 = ahat.coeffs()[0];
        let mut c: Vec<i64> = ahat.coeffs().iter().map(|&x| x as i64).collect();
        c[0] = (c0 - c0 % p + rng.gen_range(1..p)) as i64;
        ahat = LocalRingElem::from_coeffs(ctx, &c).expect("coefficients below p^M");
    }
    let detail = json!({ "r": grid, "ahat0": ahat.coeffs()[0] });
    let bar = lift(rank1_reduce(&RankOneO { rmatrix: grid.to_vec(), ahat: ahat.clone() }), &detail)?;
    // Oracle: reduce â·∏(u - π_ij)^{r_ij} coefficientwise modulo ϖ.
    let a_hat = LocalFieldElem::from_ring(&ahat);
    for (i, row) in grid.iter().enumerate() {
        let mut g = LPolynomial::constant(if i == 0 { a_hat.clone() } else { LocalFieldElem::one(ctx) });
        for (j, &rij) in row.iter().enumerate() {
            g = &g * &LPolynomial::linear(&pis[j]).pow(rij as u32);
        }
        let top = row.iter().sum::<usize>();
        ensure(bar.t[i] == top, "t_i differs from Σ_j r_ij", &detail)?;
        for c in 0..top {
            ensure(g.coeff(c).valuation_at_least(1) == Some(true), "lower coefficient is a unit", &detail)?;
        }
        let lead = g.coeff(top);
        ensure(lead.valuation_at_least(1) == Some(false), "leading coefficient is not a unit", &detail)?;
        ensure(lead.shift() == 0, "leading coefficient has a denominator", &detail)?;
        let (num, _) = lead.numerator();
        let expect = if i == 0 { bar.a } else { bar.a.field().one() };
        ensure(bar.a.field().from_int((num.coeffs()[0] % p) as i64) == expect, "a differs from â mod ϖ", &detail)?;
    }
    let fam = bar.to_family(bar.t.iter().max().unwrap_or(&0) + 2);
    let vals: Vec<Valuation> = fam.mats().iter().map(|m| m.get(0, 0).u_valuation()).collect();
    ensure(
        vals.iter().zip(&bar.t).all(|(v, &t)| *v == Valuation::Finite(t as i64)),
        "reduced family has the wrong valuations",
        &detail,
    )?;
    Ok(json!({ "r": grid, "t": bar.t, "a": bar.a.coeffs() }))
}

fn tame_difference(pis: &[LocalFieldElem], (a, b): (usize, usize)) -> Outcome {
    let detail = json!({ "j": a, "q": b });
    let v = lift((&pis[a] - &pis[b]).valuation(), &detail)?;
    let shown = v.finite();
    ensure(v == Valuation::Finite(1), "valuation is not 1", &json!({ "j": a, "q": b, "valuation": shown }))?;
    Ok(json!({ "j": a, "q": b, "valuation": shown }))
}

fn coe2(pis: &[LocalFieldElem], (r, j, l): (usize, usize, usize)) -> Outcome {
    let detail = json!({ "r": r, "j": j, "l": l });
    let rec = lift(build_h(j, pis, &vec![r; j]), &detail)?;
    let a = lift(check_property_a(&rec), &detail)?;
    let c = lift(check_coe2(&rec, l), &detail)?;
    let out = json!({ "r": r, "j": j, "l": l, "property_a": a, "coe2": c });
    if a && c {
        Ok(out)
    } else {
        Err(failure("property check failed", out))
    }
}

/// Σ b_i (u - π)^i with v(b_i) >= -i.
fn property_b_poly(ctx: LocalCtx, pi: &LocalFieldElem, len: usize, rng: &mut ChaCha8Rng) -> LPolynomial {
    let inv = LocalFieldElem::uniformizer(ctx).inv().expect("uniformizer is invertible");
    let b: Vec<LocalFieldElem> =
        (0..len).map(|i| &LocalFieldElem::from_ring(&ring_elem(ctx, rng)) * &inv.pow(i as u64)).collect();
    LPolynomial::from_expansion(&b, pi)
}

fn property_b(ctx: LocalCtx, pis: &[LocalFieldElem], rng: &mut ChaCha8Rng) -> Outcome {
    let q = rng.gen_range(0..pis.len());
    let (l1, l2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
    let f1 = property_b_poly(ctx, &pis[q], l1, rng);
    let f2 = property_b_poly(ctx, &pis[q], l2, rng);
    let detail = json!({ "root": q, "len1": l1, "len2": l2 });
    ensure(lift(check_property_b(&f1, &pis[q]), &detail)?, "first factor lacks Property B", &detail)?;
    ensure(lift(check_property_b(&f2, &pis[q]), &detail)?, "second factor lacks Property B", &detail)?;
    ensure(lift(check_property_b(&(&f1 * &f2), &pis[q]), &detail)?, "product lacks Property B", &detail)?;
    Ok(detail)
}

fn twist(ctx: LocalCtx, pis: &[LocalFieldElem], rng: &mut ChaCha8Rng) -> Outcome {
    let j = rng.gen_range(1..pis.len());
    let rbars: Vec<usize> = (0..j).map(|_| rng.gen_range(0..4)).collect();
    let n = rng.gen_range(0..ctx.p() as usize);
    let count = rng.gen_range(1..=3);
    let fvec: Vec<LPolynomial> = (0..count)
        .map(|_| {
            let deg = rng.gen_range(0..6);
            LPolynomial::new(ctx, (0..=deg).map(|_| LocalFieldElem::from_ring(&ring_elem(ctx, rng))).collect())
        })
        .collect();
    let detail = json!({ "j": j, "rbars": rbars, "n": n, "count": count });
    let rec = lift(build_h(j, pis, &rbars), &detail)?;
    let tw = lift(taylor_twist(&fvec, &rec, n), &detail)?;
    for (f, g) in fvec.iter().zip(&tw) {
        for pi in &pis[..=j] {
            ensure(g.eval(pi).agrees_with(&f.eval(pi)), "twist moved a value at π_q", &detail)?;
        }
    }
    Ok(detail)
}
