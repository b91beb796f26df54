//! The tame model field L = Frac((Z/p^M)[x]/(x^{e0} - p)) with uniformizer
//! ϖ = x, v(ϖ) = 1 and v(p) = e0.
//!
//! Ring elements are exact residues modulo p^M = ϖ^{e0·M}. Field elements are
//! stored in floating form ϖ^val·unit with the unit known modulo ϖ^rel, so
//! every value is known modulo ϖ^{val + rel} (its absolute precision).
//! Division by ϖ is the only operation that loses digits.

mod lpoly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rings::{is_prime, Valuation};

pub(crate) use lpoly::property_b_of_expansion;
pub use lpoly::{check_property_b, expand_at, LPolynomial};

/// Parameters (p, M, e0). Requires p an odd prime, e0 | p - 1 and p^M < 2^64.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalCtx {
    p: u64,
    big_m: u32,
    e0: u32,
    q: u64,
}

impl LocalCtx {
    pub fn new(p: u64, big_m: u32, e0: u32) -> Result<LocalCtx> {
        if p < 3 || p > u32::MAX as u64 || !is_prime(p as u32) {
            return Err(Error::BadParameters(format!("p = {p} is not an odd prime")));
        }
        if e0 == 0 || !(p - 1).is_multiple_of(e0 as u64) {
            return Err(Error::BadParameters(format!("e0 = {e0} does not divide p - 1 = {}", p - 1)));
        }
        if big_m == 0 {
            return Err(Error::BadParameters("M must be positive".into()));
        }
        let q =
            p.checked_pow(big_m).ok_or_else(|| Error::BadParameters(format!("{p}^{big_m} does not fit in 64 bits")))?;
        Ok(LocalCtx { p, big_m, e0, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn big_m(&self) -> u32 {
        self.big_m
    }

    pub fn e0(&self) -> u32 {
        self.e0
    }

    /// ϖ-adic capacity of the ring, e0·M.
    pub fn capacity(&self) -> u32 {
        self.e0 * self.big_m
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    fn addmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.q as u128) as u64
    }

    fn submod(&self, a: u64, b: u64) -> u64 {
        self.addmod(a, self.q - b % self.q)
    }

    fn powmod(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.q;
        b %= self.q;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mulmod(r, b);
            }
            b = self.mulmod(b, b);
            e >>= 1;
        }
        r
    }

    /// p-adic valuation of a nonzero residue; M for zero.
    fn vp(&self, mut c: u64) -> u32 {
        if c == 0 {
            return self.big_m;
        }
        let mut v = 0;
        while c.is_multiple_of(self.p) {
            c /= self.p;
            v += 1;
        }
        v
    }
}

impl fmt::Debug for LocalCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L(p={}, M={}, e0={})", self.p, self.big_m, self.e0)
    }
}

/// Element Σ c_k x^k (k < e0) of (Z/p^M)[x]/(x^{e0} - p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LocalRingElem {
    ctx: LocalCtx,
    c: Vec<u64>,
}

impl LocalRingElem {
    pub fn zero(ctx: LocalCtx) -> LocalRingElem {
        LocalRingElem { ctx, c: vec![0; ctx.e0 as usize] }
    }

    pub fn from_int(ctx: LocalCtx, n: i64) -> LocalRingElem {
        let mut r = LocalRingElem::zero(ctx);
        r.c[0] = (n as i128).rem_euclid(ctx.q as i128) as u64;
        r
    }

    pub fn one(ctx: LocalCtx) -> LocalRingElem {
        LocalRingElem::from_int(ctx, 1)
    }

    /// Coordinates on 1, x, ..., x^{e0-1}; missing ones are zero.
    pub fn from_coeffs(ctx: LocalCtx, coeffs: &[i64]) -> Result<LocalRingElem> {
        if coeffs.len() > ctx.e0 as usize {
            return Err(Error::Malformed(format!("{} coordinates for e0 = {}", coeffs.len(), ctx.e0)));
        }
        let mut r = LocalRingElem::zero(ctx);
        for (k, &a) in coeffs.iter().enumerate() {
            r.c[k] = (a as i128).rem_euclid(ctx.q as i128) as u64;
        }
        Ok(r)
    }

    /// ϖ itself (equal to p when e0 = 1).
    pub fn uniformizer(ctx: LocalCtx) -> LocalRingElem {
        LocalRingElem::one(ctx).times_pi(1)
    }

    pub fn ctx(&self) -> LocalCtx {
        self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&a| a == 0)
    }

    pub fn is_unit(&self) -> bool {
        !self.c[0].is_multiple_of(self.ctx.p)
    }

    /// Multiply by ϖ^k.
    pub fn times_pi(&self, k: u32) -> LocalRingElem {
        let e0 = self.ctx.e0 as usize;
        let mut c = self.c.clone();
        for _ in 0..k {
            let top = c[e0 - 1];
            for i in (1..e0).rev() {
                c[i] = c[i - 1];
            }
            c[0] = self.ctx.mulmod(top, self.ctx.p);
        }
        LocalRingElem { ctx: self.ctx, c }
    }

    /// Divide by ϖ, assuming ϖ divides. The top digit becomes ambiguous, which
    /// callers account for by lowering the precision by one.
    fn div_pi(&self) -> LocalRingElem {
        debug_assert!(self.c[0].is_multiple_of(self.ctx.p));
        let e0 = self.ctx.e0 as usize;
        let mut c = vec![0; e0];
        c[..e0 - 1].copy_from_slice(&self.c[1..e0]);
        c[e0 - 1] = self.c[0] / self.ctx.p;
        LocalRingElem { ctx: self.ctx, c }
    }

    /// Canonical representative modulo ϖ^r.
    fn reduce(&self, r: u32) -> LocalRingElem {
        let e0 = self.ctx.e0;
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                let need = (r as i64 - k as i64).max(0) as u32;
                let digits = need.div_ceil(e0).min(self.ctx.big_m);
                a % self.ctx.p.pow(digits)
            })
            .collect();
        LocalRingElem { ctx: self.ctx, c }
    }

    /// Valuation when the element is nonzero modulo ϖ^r.
    fn valuation_below(&self, r: u32) -> Option<u32> {
        let e0 = self.ctx.e0;
        self.c
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(k, &a)| e0 * self.ctx.vp(a) + k as u32)
            .filter(|&v| v < r)
            .min()
    }

    /// ϖ-adic valuation; `Infinity` for the zero residue.
    pub fn valuation(&self) -> Valuation {
        match self.valuation_below(self.ctx.capacity()) {
            Some(v) => Valuation::Finite(v as i64),
            None => Valuation::Infinity,
        }
    }

    /// Inverse of a unit by Newton iteration y <- y(2 - wy).
    pub fn unit_inverse(&self) -> Result<LocalRingElem> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(format!("{self:?} is divisible by ϖ")));
        }
        let p = self.ctx.p;
        let c0 = self.c[0] % p;
        let inv0 = (1..p).find(|&y| c0 * y % p == 1).expect("F_p is a field");
        let mut y = LocalRingElem::from_int(self.ctx, inv0 as i64);
        let one = LocalRingElem::one(self.ctx);
        let two = LocalRingElem::from_int(self.ctx, 2);
        for _ in 0..64 {
            let wy = self * &y;
            if wy == one {
                return Ok(y);
            }
            y = &y * &(&two - &wy);
        }
        unreachable!("Newton iteration doubles the precision each step")
    }

    pub fn pow(&self, mut e: u64) -> LocalRingElem {
        let mut r = LocalRingElem::one(self.ctx);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        r
    }
}

impl fmt::Debug for LocalRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(k, a)| match k {
                0 => format!("{a}"),
                1 => format!("{a}ϖ"),
                _ => format!("{a}ϖ^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for &LocalRingElem {
    type Output = LocalRingElem;
    fn add(self, o: &LocalRingElem) -> LocalRingElem {
        let c = self.c.iter().zip(&o.c).map(|(&a, &b)| self.ctx.addmod(a, b)).collect();
        LocalRingElem { ctx: self.ctx, c }
    }
}

impl Sub for &LocalRingElem {
    type Output = LocalRingElem;
    fn sub(self, o: &LocalRingElem) -> LocalRingElem {
        let c = self.c.iter().zip(&o.c).map(|(&a, &b)| self.ctx.submod(a, b)).collect();
        LocalRingElem { ctx: self.ctx, c }
    }
}

impl Neg for &LocalRingElem {
    type Output = LocalRingElem;
    fn neg(self) -> LocalRingElem {
        let c = self.c.iter().map(|&a| self.ctx.submod(0, a)).collect();
        LocalRingElem { ctx: self.ctx, c }
    }
}

impl Mul for &LocalRingElem {
    type Output = LocalRingElem;
    fn mul(self, o: &LocalRingElem) -> LocalRingElem {
        let ctx = self.ctx;
        let e0 = ctx.e0 as usize;
        let mut c = vec![0u64; e0];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                let mut t = ctx.mulmod(a, b);
                let mut k = i + j;
                if k >= e0 {
                    t = ctx.mulmod(t, ctx.p);
                    k -= e0;
                }
                c[k] = ctx.addmod(c[k], t);
            }
        }
        LocalRingElem { ctx, c }
    }
}

/// Element ϖ^val·unit of L with the unit known modulo ϖ^rel. A value known
/// only to be 0 modulo ϖ^A is stored with a zero unit, rel = 0 and val = A.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LocalFieldElem {
    ctx: LocalCtx,
    val: i64,
    unit: LocalRingElem,
    rel: u32,
}

impl LocalFieldElem {
    /// Zero known modulo ϖ^abs.
    pub fn zero_to(ctx: LocalCtx, abs: i64) -> LocalFieldElem {
        LocalFieldElem { ctx, val: abs, unit: LocalRingElem::zero(ctx), rel: 0 }
    }

    /// Zero at the full capacity of the model.
    pub fn zero(ctx: LocalCtx) -> LocalFieldElem {
        LocalFieldElem::zero_to(ctx, ctx.capacity() as i64)
    }

    pub fn one(ctx: LocalCtx) -> LocalFieldElem {
        LocalFieldElem::from_int(ctx, 1)
    }

    pub fn from_int(ctx: LocalCtx, n: i64) -> LocalFieldElem {
        LocalFieldElem::from_ring(&LocalRingElem::from_int(ctx, n))
    }

    /// A ring element, known modulo ϖ^{e0·M}.
    pub fn from_ring(r: &LocalRingElem) -> LocalFieldElem {
        LocalFieldElem::from_num(0, r.clone(), r.ctx.capacity())
    }

    /// ϖ^k·w for a unit w known to full capacity.
    pub fn from_parts(k: i64, w: &LocalRingElem) -> Result<LocalFieldElem> {
        if !w.is_unit() {
            return Err(Error::NotAUnit(format!("{w:?} is not a unit")));
        }
        let rel = w.ctx.capacity();
        Ok(LocalFieldElem { ctx: w.ctx, val: k, unit: w.reduce(rel), rel })
    }

    /// ϖ^{-s}·num with num known modulo ϖ^prec.
    pub fn from_shifted(s: u32, num: &LocalRingElem, prec: u32) -> LocalFieldElem {
        LocalFieldElem::from_num(-(s as i64), num.clone(), prec.min(num.ctx.capacity()))
    }

    pub fn uniformizer(ctx: LocalCtx) -> LocalFieldElem {
        LocalFieldElem::from_parts(1, &LocalRingElem::one(ctx)).expect("1 is a unit")
    }

    /// ϖ^base·num with num known modulo ϖ^prec, brought to floating form.
    fn from_num(base: i64, num: LocalRingElem, prec: u32) -> LocalFieldElem {
        let ctx = num.ctx;
        match num.valuation_below(prec) {
            None => LocalFieldElem::zero_to(ctx, base + prec as i64),
            Some(w) => {
                let mut u = num;
                for _ in 0..w {
                    u = u.div_pi();
                }
                let rel = prec - w;
                LocalFieldElem { ctx, val: base + w as i64, unit: u.reduce(rel), rel }
            }
        }
    }

    pub fn ctx(&self) -> LocalCtx {
        self.ctx
    }

    /// The value is known modulo ϖ^abs_precision.
    pub fn abs_precision(&self) -> i64 {
        self.val + self.rel as i64
    }

    /// Zero to the known precision (which may be far below capacity).
    pub fn is_zero_to_precision(&self) -> bool {
        self.rel == 0
    }

    /// Lower bound on the valuation that is always certified.
    pub fn valuation_lower_bound(&self) -> i64 {
        self.val
    }

    /// Denominator exponent s of the ϖ^{-s}·num form.
    pub fn shift(&self) -> u32 {
        (-self.val).max(0) as u32
    }

    /// Numerator of the ϖ^{-s}·num form and its precision.
    pub fn numerator(&self) -> (LocalRingElem, u32) {
        let s = self.shift() as i64;
        let lift = (self.val + s) as u32;
        let prec = (self.abs_precision() + s).clamp(0, self.ctx.capacity() as i64) as u32;
        (self.unit.times_pi(lift).reduce(prec), prec)
    }

    /// Certified ϖ-adic valuation; `Infinity` only for a zero known to the
    /// full capacity e0·M.
    pub fn valuation(&self) -> Result<Valuation> {
        if self.rel > 0 {
            Ok(Valuation::Finite(self.val))
        } else if self.val >= self.ctx.capacity() as i64 {
            Ok(Valuation::Infinity)
        } else {
            Err(Error::PrecisionExhausted(format!("zero known only modulo ϖ^{}", self.val)))
        }
    }

    /// Whether v(self) >= k is certified; `None` when the precision cannot decide.
    pub fn valuation_at_least(&self, k: i64) -> Option<bool> {
        if self.rel > 0 {
            Some(self.val >= k)
        } else if self.val >= k {
            Some(true)
        } else {
            None
        }
    }

    pub fn inv(&self) -> Result<LocalFieldElem> {
        if self.rel == 0 {
            return Err(Error::NotAUnit(format!("cannot invert {self:?}")));
        }
        let u = self.unit.unit_inverse()?.reduce(self.rel);
        Ok(LocalFieldElem { ctx: self.ctx, val: -self.val, unit: u, rel: self.rel })
    }

    pub fn pow(&self, e: u64) -> LocalFieldElem {
        let mut r = LocalFieldElem::one(self.ctx);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Equality to the common precision.
    pub fn agrees_with(&self, o: &LocalFieldElem) -> bool {
        (self - o).is_zero_to_precision()
    }
}

impl fmt::Debug for LocalFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rel == 0 {
            write!(f, "O(ϖ^{})", self.val)
        } else {
            write!(f, "ϖ^{}·({:?}) + O(ϖ^{})", self.val, self.unit, self.abs_precision())
        }
    }
}

impl Add for &LocalFieldElem {
    type Output = LocalFieldElem;
    fn add(self, o: &LocalFieldElem) -> LocalFieldElem {
        let abs = self.abs_precision().min(o.abs_precision());
        let base = self.val.min(o.val);
        if abs <= base {
            return LocalFieldElem::zero_to(self.ctx, abs);
        }
        let prec = (abs - base) as u32;
        let a = self.unit.times_pi((self.val - base) as u32);
        let b = o.unit.times_pi((o.val - base) as u32);
        LocalFieldElem::from_num(base, (&a + &b).reduce(prec), prec)
    }
}

impl Neg for &LocalFieldElem {
    type Output = LocalFieldElem;
    fn neg(self) -> LocalFieldElem {
        LocalFieldElem { ctx: self.ctx, val: self.val, unit: (-&self.unit).reduce(self.rel), rel: self.rel }
    }
}

impl Sub for &LocalFieldElem {
    type Output = LocalFieldElem;
    fn sub(self, o: &LocalFieldElem) -> LocalFieldElem {
        self + &(-o)
    }
}

impl Mul for &LocalFieldElem {
    type Output = LocalFieldElem;
    fn mul(self, o: &LocalFieldElem) -> LocalFieldElem {
        match (self.rel, o.rel) {
            (0, 0) => LocalFieldElem::zero_to(self.ctx, self.val + o.val),
            (0, _) | (_, 0) => {
                LocalFieldElem::zero_to(self.ctx, (self.abs_precision() + o.val).min(o.abs_precision() + self.val))
            }
            (r1, r2) => {
                let rel = r1.min(r2);
                let unit = (&self.unit * &o.unit).reduce(rel);
                LocalFieldElem { ctx: self.ctx, val: self.val + o.val, unit, rel }
            }
        }
    }
}

/// Roots π_j = ζ^j·ϖ (j = 0..e0) of u^{e0} - p, ζ the Teichmüller lift of
/// g^{(p-1)/e0} for the least primitive root g mod p.
pub fn eisenstein_roots(e0: u32, p: u64, big_m: u32) -> Result<Vec<LocalRingElem>> {
    let ctx = LocalCtx::new(p, big_m, e0)?;
    let zeta = LocalRingElem::from_int(ctx, teichmuller_root_of_unity(ctx) as i64);
    let pi = LocalRingElem::uniformizer(ctx);
    Ok((0..e0).map(|j| &zeta.pow(j as u64) * &pi).collect())
}

/// π_j as field elements at full relative precision.
pub fn eisenstein_roots_lf(ctx: LocalCtx) -> Vec<LocalFieldElem> {
    let zeta = LocalRingElem::from_int(ctx, teichmuller_root_of_unity(ctx) as i64);
    (0..ctx.e0).map(|j| LocalFieldElem::from_parts(1, &zeta.pow(j as u64)).expect("roots of unity are units")).collect()
}

fn teichmuller_root_of_unity(ctx: LocalCtx) -> u64 {
    let p = ctx.p;
    let g = least_primitive_root(p);
    let z0 = (1..=(p - 1) / ctx.e0 as u64).fold(1u64, |acc, _| acc * g % p);
    // x -> x^p fixes exactly the Teichmüller lifts; M - 1 steps reach precision p^M.
    let mut z = z0;
    for _ in 1..ctx.big_m {
        z = ctx.powmod(z, p);
    }
    z
}

fn least_primitive_root(p: u64) -> u64 {
    let n = p - 1;
    let mut factors = Vec::new();
    let mut m = n;
    let mut k = 2;
    while k * k <= m {
        if m.is_multiple_of(k) {
            factors.push(k);
            while m.is_multiple_of(k) {
                m /= k;
            }
        }
        k += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let pow = |b: u64, e: u64| (0..e).fold(1u64, |acc, _| acc * b % p);
    (2..p).find(|&g| factors.iter().all(|&f| pow(g, n / f) != 1)).unwrap_or(1)
}

/// `ϖ-adic valuation` entry point mirroring the operation list.
pub fn lf_valuation(x: &LocalFieldElem) -> Result<Valuation> {
    x.valuation()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFieldJson {
    pub p: u64,
    #[serde(rename = "M")]
    pub big_m: u32,
    pub e0: u32,
    pub shift: u32,
    pub num: Vec<u64>,
    pub prec: u32,
}

impl From<&LocalFieldElem> for LocalFieldJson {
    fn from(x: &LocalFieldElem) -> Self {
        let (num, prec) = x.numerator();
        LocalFieldJson { p: x.ctx.p, big_m: x.ctx.big_m, e0: x.ctx.e0, shift: x.shift(), num: num.c, prec }
    }
}

impl TryFrom<&LocalFieldJson> for LocalFieldElem {
    type Error = Error;
    fn try_from(j: &LocalFieldJson) -> Result<Self> {
        let ctx = LocalCtx::new(j.p, j.big_m, j.e0)?;
        if j.num.len() != j.e0 as usize || j.num.iter().any(|&c| c >= ctx.q) {
            return Err(Error::Malformed("numerator needs e0 residues below p^M".into()));
        }
        let num = LocalRingElem { ctx, c: j.num.clone() };
        Ok(LocalFieldElem::from_shifted(j.shift, &num, j.prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, m: u32, e0: u32) -> LocalCtx {
        LocalCtx::new(p, m, e0).unwrap()
    }

    #[test]
    fn quadratic_roots_are_plus_minus_uniformizer() {
        let r = eisenstein_roots(2, 5, 6).unwrap();
        let c = ctx(5, 6, 2);
        assert_eq!(r[0], LocalRingElem::uniformizer(c));
        assert_eq!(r[1], -&LocalRingElem::uniformizer(c));
    }

    #[test]
    fn quartic_root_of_unity_squares_to_minus_one() {
        let c = ctx(5, 4, 4);
        let z = LocalRingElem::from_int(c, teichmuller_root_of_unity(c) as i64);
        assert_eq!(&z * &z, LocalRingElem::from_int(c, -1));
        assert_eq!(z.pow(4), LocalRingElem::one(c));
        // reduces to a square root of -1 mod 5
        assert!(z.coeffs()[0] % 5 == 2 || z.coeffs()[0] % 5 == 3);
    }

    #[test]
    fn cubic_model_rejected_for_p5() {
        assert!(matches!(eisenstein_roots(3, 5, 4), Err(Error::BadParameters(_))));
    }

    #[test]
    fn basic_valuations() {
        let c = ctx(5, 6, 2);
        assert_eq!(LocalFieldElem::from_int(c, 5).valuation().unwrap(), Valuation::Finite(2));
        let x = LocalFieldElem::from_shifted(3, &LocalRingElem::from_int(c, 25), 12);
        assert_eq!(x.valuation().unwrap(), Valuation::Finite(1));
        let pis = eisenstein_roots_lf(c);
        assert_eq!((&pis[1] - &pis[0]).valuation().unwrap(), Valuation::Finite(1));
        assert_eq!(LocalFieldElem::zero(c).valuation().unwrap(), Valuation::Infinity);
        assert!(LocalFieldElem::zero_to(c, 3).valuation().is_err());
    }

    #[test]
    fn ring_valuation_reads_coordinates() {
        let c = ctx(7, 4, 2);
        // 7ϖ = ϖ^3
        let x = LocalRingElem::from_coeffs(c, &[0, 7]).unwrap();
        assert_eq!(x.valuation(), Valuation::Finite(3));
        assert_eq!(LocalRingElem::zero(c).valuation(), Valuation::Infinity);
    }

    #[test]
    fn inverse_round_trip() {
        let c = ctx(13, 5, 4);
        let x = LocalFieldElem::from_shifted(2, &LocalRingElem::from_coeffs(c, &[3, 1, 0, 2]).unwrap(), 20);
        let y = x.inv().unwrap();
        let one = &x * &y;
        assert!(one.agrees_with(&LocalFieldElem::one(c)));
        assert_eq!(one.abs_precision(), 20);
    }

    #[test]
    fn cancellation_keeps_absolute_precision() {
        let c = ctx(5, 4, 2);
        let a = LocalFieldElem::from_int(c, 7);
        let d = &a - &a;
        assert!(d.is_zero_to_precision());
        assert_eq!(d.abs_precision(), 8);
    }

    #[test]
    fn json_round_trip() {
        let c = ctx(5, 8, 2);
        let pis = eisenstein_roots_lf(c);
        let x = (&pis[1] - &pis[0]).inv().unwrap();
        let j = LocalFieldJson::from(&x);
        assert_eq!(j.shift, 1);
        assert_eq!(LocalFieldElem::try_from(&j).unwrap(), x);
    }
}
