//! p-adic numbers at capped precision and the Iwasawa algebra Λ = Z_p[[X]].

pub mod constants;
pub mod family;

use crate::arith;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PadicError {
    #[error("precision exhausted: need {need} digits, have {have}")]
    Precision { need: i32, have: i32 },
    #[error("{0} is not a one-unit")]
    NotOneUnit(String),
    #[error("division by a non-unit or zero")]
    NotUnit,
    #[error("p^M = {p}^{m} exceeds the 63-bit residue budget")]
    Budget { p: u64, m: u32 },
}

pub fn ppow(p: u64, e: u32) -> u128 {
    (p as u128).pow(e)
}

/// Largest M with p^M < 2^63.
pub fn max_prec(p: u64) -> u32 {
    let mut m = 0;
    let mut x: u128 = 1;
    while x * (p as u128) < (1u128 << 63) {
        x *= p as u128;
        m += 1;
    }
    m
}

/// p^val · (unit mod p^rel); unit = 0, rel = 0 means O(p^val).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    pub p: u64,
    pub val: i32,
    pub unit: u128,
    pub rel: u32,
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "O({}^{})", self.p, self.val)
        } else {
            write!(f, "{}^{}·{} + O({}^{})", self.p, self.val, self.unit, self.p, self.abs_prec())
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

fn modinv(a: u128, m: u128) -> u128 {
    arith::invmod(a as i128, m as i128).expect("unit") as u128
}

impl PadicScalar {
    pub fn zero(p: u64, prec: i32) -> Self {
        PadicScalar { p, val: prec, unit: 0, rel: 0 }
    }
    pub fn one(p: u64, prec: u32) -> Self {
        Self::from_int(p, 1, prec as i32)
    }
    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }
    pub fn abs_prec(&self) -> i32 {
        self.val + self.rel as i32
    }
    fn make(p: u64, val: i32, x: u128, rel: i32) -> Self {
        if rel <= 0 {
            return Self::zero(p, val + rel.max(0));
        }
        let rel = rel as u32;
        assert!(rel <= max_prec(p), "p-adic budget exceeded: {p}^{rel}");
        let m = ppow(p, rel);
        let mut x = x % m;
        if x == 0 {
            return Self::zero(p, val + rel as i32);
        }
        let mut v = 0;
        while x % p as u128 == 0 {
            x /= p as u128;
            v += 1;
        }
        let rel = rel - v;
        PadicScalar { p, val: val + v as i32, unit: x % ppow(p, rel), rel }
    }
    /// An integer known to absolute precision `prec`.
    pub fn from_int(p: u64, n: i128, prec: i32) -> Self {
        if n == 0 {
            return Self::zero(p, prec);
        }
        let v = arith::val_i128(n, p as i128) as i32;
        let rel = prec - v;
        if rel <= 0 {
            return Self::zero(p, prec);
        }
        let u = n / (p as i128).pow(v as u32);
        let m = ppow(p, rel as u32) as i128;
        Self::make(p, v, u.rem_euclid(m) as u128, rel)
    }
    pub fn from_bigint(p: u64, n: &BigInt, prec: i32) -> Self {
        if n.is_zero() {
            return Self::zero(p, prec);
        }
        let pb = BigInt::from(p);
        let mut v = 0;
        let mut u = n.clone();
        while (&u % &pb).is_zero() {
            u /= &pb;
            v += 1;
        }
        let rel = prec - v;
        if rel <= 0 {
            return Self::zero(p, prec);
        }
        let m = BigInt::from(ppow(p, rel as u32));
        let r = ((u % &m) + &m) % &m;
        Self::make(p, v, r.to_u128().unwrap(), rel)
    }
    /// num/den with relative precision `rel`.
    pub fn from_rational(p: u64, x: &BigRational, rel: u32) -> Self {
        if x.is_zero() {
            return Self::zero(p, rel as i32);
        }
        let n = Self::from_bigint_rel(p, x.numer(), rel);
        let d = Self::from_bigint_rel(p, x.denom(), rel);
        n.div(&d)
    }
    fn from_bigint_rel(p: u64, n: &BigInt, rel: u32) -> Self {
        let pb = BigInt::from(p);
        let mut v = 0;
        let mut u = n.clone();
        while (&u % &pb).is_zero() {
            u /= &pb;
            v += 1;
        }
        Self::from_bigint(p, &u, rel as i32).shift(v)
    }
    /// Multiply by p^k.
    pub fn shift(&self, k: i32) -> Self {
        PadicScalar { val: self.val + k, ..*self }
    }
    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        let p = self.p;
        let n = self.abs_prec().min(o.abs_prec());
        let vmin = self.val.min(o.val);
        if n <= vmin {
            return Self::zero(p, n);
        }
        let r = (n - vmin) as u32;
        let m = ppow(p, r);
        let term = |s: &Self| -> u128 {
            if s.is_zero() || s.val >= n {
                0
            } else {
                s.unit % m * ppow(p, (s.val - vmin) as u32) % m
            }
        };
        Self::make(p, vmin, (term(self) + term(o)) % m, r as i32)
    }
    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let m = ppow(self.p, self.rel);
        PadicScalar { unit: (m - self.unit) % m, ..*self }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        let rel = self.rel.min(o.rel);
        if rel == 0 {
            let n = (self.val + o.abs_prec()).min(o.val + self.abs_prec());
            return Self::zero(self.p, n);
        }
        let m = ppow(self.p, rel);
        PadicScalar { p: self.p, val: self.val + o.val, unit: (self.unit % m) * (o.unit % m) % m, rel }
    }
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of O(p^{})", self.val);
        let m = ppow(self.p, self.rel);
        PadicScalar { p: self.p, val: -self.val, unit: modinv(self.unit, m), rel: self.rel }
    }
    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().pow(-e);
        }
        if self.is_zero() {
            return if e == 0 { Self::one(self.p, 1) } else { Self::zero(self.p, self.val * e as i32) };
        }
        let m = ppow(self.p, self.rel);
        let u = arith::powmod(self.unit as i128, e as u128, m as i128) as u128;
        PadicScalar { p: self.p, val: self.val * e as i32, unit: u, rel: self.rel }
    }
    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.val == 0
    }
    /// Truncate to absolute precision n.
    pub fn truncate(&self, n: i32) -> Self {
        if self.abs_prec() <= n {
            return *self;
        }
        if self.is_zero() || n <= self.val {
            return Self::zero(self.p, n.min(self.abs_prec()));
        }
        Self::make(self.p, self.val, self.unit, n - self.val)
    }
    /// Teichmüller lift of a unit: lim x^{p^n}.
    pub fn teichmuller(&self) -> Self {
        assert!(self.is_unit(), "Teichmüller of non-unit");
        let m = ppow(self.p, self.rel);
        let mut t = self.unit;
        for _ in 0..self.rel {
            t = arith::powmod(t as i128, self.p as u128, m as i128) as u128;
        }
        PadicScalar { unit: t, ..*self }
    }
    /// x/ω(x) for a unit x.
    pub fn one_unit_part(&self) -> Self {
        self.div(&self.teichmuller())
    }
    /// Valuation of self − o, capped by available precision.
    pub fn agreement(&self, o: &Self) -> i32 {
        let d = self.sub(o);
        d.val.min(d.abs_prec())
    }
    pub fn eq_mod(&self, o: &Self, n: i32) -> bool {
        self.agreement(o) >= n
    }
    /// Residue mod p^n as an integer (requires integrality and precision).
    pub fn residue(&self, n: u32) -> Result<u128, PadicError> {
        if self.abs_prec() < n as i32 {
            return Err(PadicError::Precision { need: n as i32, have: self.abs_prec() });
        }
        if self.val < 0 {
            return Err(PadicError::NotUnit);
        }
        if self.is_zero() || self.val >= n as i32 {
            return Ok(0);
        }
        let m = ppow(self.p, n);
        Ok(self.unit % m * ppow(self.p, self.val as u32) % m)
    }

    /// p-adic logarithm of a one-unit, to the precision of the input.
    pub fn log(&self) -> Result<Self, PadicError> {
        if !self.is_unit() || self.unit % self.p as u128 != 1 % self.p as u128 {
            return Err(PadicError::NotOneUnit(format!("{self:?}")));
        }
        let p = self.p;
        let n = self.rel as i32;
        // guard digits for the 1/k division
        let mut g = 1;
        while (p as i64).pow(g) < 4 * n as i64 + 8 {
            g += 1;
        }
        let work = (n + g as i32) as u32;
        assert!(work <= max_prec(p), "log precision budget");
        let m = ppow(p, work);
        let z = (self.unit + m - 1) % m;
        let mut acc = PadicScalar::zero(p, n);
        let mut zk = 1u128;
        let mut k = 1i64;
        loop {
            zk = zk * z % m;
            // v(z^k/k) ≥ k − v_p(k)
            let vk = arith::val(k, p as i64) as i32;
            if k as i32 - vk >= n && k as i32 > n {
                break;
            }
            let num = PadicScalar::make(p, 0, zk, work as i32);
            let den = PadicScalar::from_int(p, k as i128, work as i32);
            let mut term = num.div(&den).truncate(n);
            if k % 2 == 0 {
                term = term.neg();
            }
            acc = acc.add(&term);
            k += 1;
        }
        Ok(acc.truncate(n))
    }

    /// Exponential of x with v(x) ≥ 1.
    pub fn exp(&self) -> Self {
        assert!(self.val >= 1 || self.is_zero());
        let p = self.p;
        let n = self.abs_prec();
        let mut acc = PadicScalar::one(p, n as u32);
        let w = (n + 4).min(max_prec(p) as i32);
        let mut term = PadicScalar::one(p, w as u32);
        for k in 1..(4 * n as i64 + 10) {
            term = term.mul(self).div(&PadicScalar::from_int(p, k as i128, w));
            acc = acc.add(&term);
        }
        acc.truncate(n)
    }
}

/// A truncated power series Σ c_j X^j, j ≤ D, over Z/p^M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaSeries {
    pub p: u64,
    pub m: u32,
    pub coeffs: Vec<u128>,
}

impl LambdaSeries {
    pub fn zero(p: u64, m: u32, d: usize) -> Self {
        LambdaSeries { p, m, coeffs: vec![0; d + 1] }
    }
    pub fn constant(p: u64, m: u32, d: usize, c: &PadicScalar) -> Self {
        let mut s = Self::zero(p, m, d);
        s.coeffs[0] = c.residue(m).expect("integral constant");
        s
    }
    pub fn one(p: u64, m: u32, d: usize) -> Self {
        Self::constant(p, m, d, &PadicScalar::one(p, m))
    }
    pub fn x(p: u64, m: u32, d: usize) -> Self {
        let mut s = Self::zero(p, m, d);
        s.coeffs[1] = 1;
        s
    }
    pub fn degree_cap(&self) -> usize {
        self.coeffs.len() - 1
    }
    fn modulus(&self) -> u128 {
        ppow(self.p, self.m)
    }
    pub fn add(&self, o: &Self) -> Self {
        let m = self.modulus();
        LambdaSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| (a + b) % m).collect(), ..*self }
    }
    pub fn sub(&self, o: &Self) -> Self {
        let m = self.modulus();
        LambdaSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| (a + m - b) % m).collect(), ..*self }
    }
    pub fn scale(&self, c: &PadicScalar) -> Self {
        let m = self.modulus();
        let c = c.residue(self.m).expect("integral scalar");
        LambdaSeries { coeffs: self.coeffs.iter().map(|a| a * c % m).collect(), ..*self }
    }
    pub fn mul(&self, o: &Self) -> Self {
        let m = self.modulus();
        let d = self.degree_cap();
        let mut out = vec![0u128; d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs[..=d - i].iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % m;
            }
        }
        LambdaSeries { coeffs: out, ..*self }
    }
    pub fn is_unit(&self) -> bool {
        self.coeffs[0] % self.p as u128 != 0
    }
    pub fn inv(&self) -> Self {
        assert!(self.is_unit());
        let m = self.modulus();
        let d = self.degree_cap();
        let c0 = modinv(self.coeffs[0], m);
        let mut out = vec![0u128; d + 1];
        out[0] = c0;
        for n in 1..=d {
            let mut s = 0u128;
            for k in 1..=n {
                s = (s + self.coeffs[k] * out[n - k]) % m;
            }
            out[n] = (m - s) % m * c0 % m;
        }
        LambdaSeries { coeffs: out, ..*self }
    }
    pub fn pow_u(&self, mut e: u128) -> Self {
        let mut r = Self::one(self.p, self.m, self.degree_cap());
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }
    /// Guard digits needed for binomial coefficients up to X^D.
    pub fn guard(p: u64, d: usize) -> u32 {
        (d as u32) / (p as u32 - 1) + 2
    }
    /// (1+X)^e for e ∈ Z_p (e known to at least M + guard digits).
    pub fn one_plus_x_pow(p: u64, m: u32, d: usize, e: &PadicScalar) -> Self {
        let g = Self::guard(p, d);
        let k = m + g;
        let big = e.residue(k).expect("exponent precision");
        Self::one_plus_x_pow_int(p, m, d, big as i128)
    }
    pub fn one_plus_x_pow_int(p: u64, m: u32, d: usize, e: i128) -> Self {
        let base = Self::one(p, m, d).add(&Self::x(p, m, d));
        if e >= 0 {
            base.pow_u(e as u128)
        } else {
            base.pow_u((-e) as u128).inv()
        }
    }
    /// Evaluate at x with v(x) ≥ 1.
    pub fn eval(&self, x: &PadicScalar) -> PadicScalar {
        let p = self.p;
        let mut acc = PadicScalar::zero(p, self.m as i32);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&PadicScalar::from_int(p, *c as i128, self.m as i32)).truncate(self.m as i32);
        }
        acc
    }
    /// Substitute X ↦ c(1+X) − 1 with c ∈ 1 + pZ_p.
    pub fn rescale(&self, c: &PadicScalar) -> Self {
        let (p, m, d) = (self.p, self.m, self.degree_cap());
        let cr = c.residue(m).unwrap();
        let md = ppow(p, m);
        let mut lin = Self::zero(p, m, d);
        lin.coeffs[0] = (cr + md - 1) % md;
        if d >= 1 {
            lin.coeffs[1] = cr;
        }
        let mut acc = Self::zero(p, m, d);
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&lin);
            acc.coeffs[0] = (acc.coeffs[0] + a) % md;
        }
        acc
    }
}

/// The point P_m: X ↦ (1+p)^m − 1.
pub fn point(p: u64, m: i64, prec: u32) -> PadicScalar {
    let g = PadicScalar::from_int(p, 1 + p as i128, prec as i32);
    g.pow(m).sub(&PadicScalar::one(p, prec))
}

pub fn specialize_p_m(f: &LambdaSeries, m: i64) -> PadicScalar {
    f.eval(&point(f.p, m, f.m))
}

/// log_Γ(u) = log u / log(1+p).
pub fn log_gamma(u: &PadicScalar) -> Result<PadicScalar, PadicError> {
    let l = u.log()?;
    let lg = PadicScalar::from_int(u.p, 1 + u.p as i128, u.rel as i32).log()?;
    Ok(l.div(&lg))
}

/// [u] = (1+X)^{log_Γ u}; requires u to M + guard + 1 digits.
pub fn one_unit_to_lambda(u: &PadicScalar, m: u32, d: usize) -> Result<LambdaSeries, PadicError> {
    let need = (m + LambdaSeries::guard(u.p, d)) as i32;
    if u.abs_prec() < need + 1 {
        return Err(PadicError::Precision { need: need + 1, have: u.abs_prec() });
    }
    let e = log_gamma(u)?;
    Ok(LambdaSeries::one_plus_x_pow(u.p, m, d, &e))
}

/// Working precision for scalars feeding [·] at (M, D).
pub fn working_prec(p: u64, m: u32, d: usize) -> u32 {
    m + LambdaSeries::guard(p, d) + 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u64 = 11;

    #[test]
    fn scalar_basics() {
        let a = PadicScalar::from_int(P, 13, 10);
        let t = a.teichmuller();
        assert_eq!(t.pow(10), PadicScalar::one(P, 10));
        assert!(t.eq_mod(&PadicScalar::from_int(P, 2, 10).teichmuller(), 10));
        let b = PadicScalar::from_int(P, 22, 10);
        assert_eq!(b.val, 1);
        assert!(a.mul(&b.inv()).mul(&b).eq_mod(&a, 9));
        let h = PadicScalar::from_rational(P, &BigRational::new(3.into(), 22.into()), 8);
        assert_eq!(h.val, -1);
        assert!(h.mul(&PadicScalar::from_int(P, 22, 9)).eq_mod(&PadicScalar::from_int(P, 3, 9), 8));
    }

    #[test]
    fn log_exp_inverse() {
        let u = PadicScalar::from_int(P, 1 + 11 * 7, 12);
        let l = u.log().unwrap();
        assert_eq!(l.val, 1);
        assert!(l.exp().eq_mod(&u, 12));
        let lg = log_gamma(&PadicScalar::from_int(P, 12, 12)).unwrap();
        assert!(lg.eq_mod(&PadicScalar::one(P, 12), 11));
    }

    #[test]
    fn points_and_lambda() {
        let (m, d) = (8, 16);
        let x = LambdaSeries::x(P, m, d);
        assert!(specialize_p_m(&x, 0).eq_mod(&PadicScalar::zero(P, 8), 8));
        assert!(specialize_p_m(&x, 2).eq_mod(&PadicScalar::from_int(P, 12 * 12 - 1, 8), 8));
        let wp = working_prec(P, m, d);
        let one = one_unit_to_lambda(&PadicScalar::one(P, wp), m, d).unwrap();
        assert_eq!(one, LambdaSeries::one(P, m, d));
        let g = one_unit_to_lambda(&PadicScalar::from_int(P, 12, wp as i32), m, d).unwrap();
        assert_eq!(g, LambdaSeries::one(P, m, d).add(&x));
        let g2 = one_unit_to_lambda(&PadicScalar::from_int(P, 144, wp as i32), m, d).unwrap();
        assert!(specialize_p_m(&g2, 3).eq_mod(&PadicScalar::from_int(P, 12i128.pow(6), 8), 8));
    }

    proptest! {
        #[test]
        fn p_m_is_ring_hom(a in prop::collection::vec(0u128..1_000_000, 9), b in prop::collection::vec(0u128..1_000_000, 9), mm in 0i64..40) {
            let (m, d) = (8u32, 8usize);
            let md = ppow(P, m);
            let fa = LambdaSeries { p: P, m, coeffs: a.iter().map(|x| x % md).collect() };
            let fb = LambdaSeries { p: P, m, coeffs: b.iter().map(|x| x % md).collect() };
            let _ = d;
            let pa = specialize_p_m(&fa, mm);
            let pb = specialize_p_m(&fb, mm);
            prop_assert!(specialize_p_m(&fa.add(&fb), mm).eq_mod(&pa.add(&pb), 8));
            prop_assert!(specialize_p_m(&fa.mul(&fb), mm).eq_mod(&pa.mul(&pb), 8));
        }

        #[test]
        fn one_unit_lambda_multiplicative(a in 0i128..100_000, b in 0i128..100_000) {
            let (m, d) = (6u32, 12usize);
            let wp = working_prec(P, m, d) as i32;
            let u = PadicScalar::from_int(P, 1 + 11 * a, wp);
            let v = PadicScalar::from_int(P, 1 + 11 * b, wp);
            let lu = one_unit_to_lambda(&u, m, d).unwrap();
            let lv = one_unit_to_lambda(&v, m, d).unwrap();
            let luv = one_unit_to_lambda(&u.mul(&v), m, d).unwrap();
            prop_assert_eq!(lu.mul(&lv), luv);
            prop_assert!(specialize_p_m(&lu, 5).eq_mod(&u.pow(5), m as i32));
        }
    }
}
