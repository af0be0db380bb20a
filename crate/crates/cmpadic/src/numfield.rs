//! Exact arithmetic in Q(ζ_n)(√D).
//!
//! Elements are coefficient vectors on ζ^i s^j (0 ≤ i < φ(n), j ∈ {0,1}),
//! s² = D. When √D already lies in Q(ζ_n) (D = −d, d | n) it is written as a
//! Gauss sum and no separate generator is used.

use crate::arith;
use crate::quadfield::{Elem, QuadField};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::Arc;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}
pub fn qfrac(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Nf(pub Vec<Q>);

#[derive(Debug, PartialEq, Eq)]
pub struct NumField {
    pub n: u32,
    /// Φ_n, monic, low degree first.
    pub phi: Vec<i64>,
    /// D with s² = D adjoined as a separate generator.
    pub quad: Option<i64>,
    /// √D inside Q(ζ_n), when absorbed.
    pub absorbed: Option<(i64, Vec<Q>)>,
}

fn poly_divexact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dn = den.len() - 1;
    let mut out = vec![0; r.len() - dn];
    for i in (0..out.len()).rev() {
        let c = r[i + dn];
        out[i] = c;
        for j in 0..=dn {
            r[i + j] -= c * den[j];
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    out
}

pub fn cyclotomic(n: u32) -> Vec<i64> {
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in arith::divisors(n as i64) {
        if d < n as i64 {
            p = poly_divexact(&p, &cyclotomic(d as u32));
        }
    }
    p
}

fn squarefree_part(mut d: i64) -> i64 {
    let s = d.signum();
    d = d.abs();
    s * arith::factor(d).iter().filter(|(_, e)| e % 2 == 1).map(|(q, _)| *q).product::<i64>()
}

impl NumField {
    /// Q(ζ_n) with √D adjoined (D = 1 or None for no quadratic part).
    pub fn new(n: u32, d: Option<i64>) -> Arc<Self> {
        let n = if n % 2 == 1 && n > 1 { 2 * n } else { n.max(1) };
        let phi = cyclotomic(n);
        let mut f = NumField { n, phi, quad: None, absorbed: None };
        if let Some(dd) = d {
            let sd = squarefree_part(dd);
            if sd != 1 {
                if sd < 0 && (-sd) % 4 == 3 && n as i64 % (-sd) == 0 {
                    let dabs = -sd;
                    let step = n as i64 / dabs;
                    let mut v = f.zero().0;
                    let mut acc = f.zero();
                    for a in 1..dabs {
                        let k = arith::kronecker(sd, a);
                        if k != 0 {
                            let z = f.zeta((a * step) as i64);
                            acc = f.add(&acc, &f.scale(&z, &q(k)));
                        }
                    }
                    v.clone_from(&acc.0);
                    f.absorbed = Some((dd, v));
                } else {
                    f.quad = Some(dd);
                }
            }
        }
        Arc::new(f)
    }
    pub fn rational() -> Arc<Self> {
        Self::new(1, None)
    }
    pub fn dc(&self) -> usize {
        self.phi.len() - 1
    }
    pub fn dim(&self) -> usize {
        self.dc() * if self.quad.is_some() { 2 } else { 1 }
    }
    pub fn zero(&self) -> Nf {
        Nf(vec![Q::zero(); self.dim()])
    }
    pub fn one(&self) -> Nf {
        self.from_q(Q::one())
    }
    pub fn from_q(&self, x: Q) -> Nf {
        let mut v = self.zero();
        v.0[0] = x;
        v
    }
    pub fn from_int(&self, x: i64) -> Nf {
        self.from_q(q(x))
    }
    pub fn is_zero(&self, a: &Nf) -> bool {
        a.0.iter().all(|c| c.is_zero())
    }
    /// The rational number a, if a ∈ Q.
    pub fn as_rational(&self, a: &Nf) -> Option<Q> {
        if a.0[1..].iter().all(|c| c.is_zero()) {
            Some(a.0[0].clone())
        } else {
            None
        }
    }

    /// ζ_n^e.
    pub fn zeta(&self, e: i64) -> Nf {
        let e = e.rem_euclid(self.n as i64) as usize;
        let mut poly = vec![Q::zero(); e + 1];
        poly[e] = Q::one();
        let red = self.reduce_cyc(poly);
        let mut v = self.zero();
        v.0[..self.dc()].clone_from_slice(&red);
        v
    }
    /// ζ_N^e for N | n.
    pub fn root_of_unity(&self, e: i64, order: u32) -> Nf {
        assert!(self.n % order == 0, "ζ_{order} not in Q(ζ_{})", self.n);
        self.zeta(e * (self.n / order) as i64)
    }
    /// √D for the adjoined or absorbed D.
    pub fn sqrt_d(&self) -> Nf {
        if let Some((_, v)) = &self.absorbed {
            let mut out = self.zero();
            out.0[..self.dc()].clone_from_slice(v);
            return out;
        }
        assert!(self.quad.is_some(), "no quadratic generator");
        let mut v = self.zero();
        v.0[self.dc()] = Q::one();
        v
    }
    pub fn disc_d(&self) -> Option<i64> {
        self.quad.or(self.absorbed.as_ref().map(|x| x.0))
    }
    /// Image of x + yω ∈ O_K, K = Q(√−d); requires −d to be the field's D.
    pub fn from_elem(&self, k: &QuadField, u: Elem) -> Nf {
        assert_eq!(self.disc_d().map(squarefree_part), Some(-k.d));
        let s = self.sqrt_d();
        let y = Q::new(BigInt::from(u.y), BigInt::from(2));
        let re = Q::from_integer(BigInt::from(u.x)) + &y;
        self.add(&self.from_q(re), &self.scale(&s, &y))
    }

    fn reduce_cyc(&self, mut p: Vec<Q>) -> Vec<Q> {
        let dc = self.dc();
        for i in (dc..p.len()).rev() {
            let c = std::mem::take(&mut p[i]);
            if c.is_zero() {
                continue;
            }
            for j in 0..dc {
                if self.phi[j] != 0 {
                    p[i - dc + j] -= &c * q(self.phi[j]);
                }
            }
        }
        p.resize(dc, Q::zero());
        p
    }

    fn cyc_mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        self.reduce_cyc(out)
    }

    pub fn add(&self, a: &Nf, b: &Nf) -> Nf {
        Nf(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }
    pub fn sub(&self, a: &Nf, b: &Nf) -> Nf {
        Nf(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }
    pub fn neg(&self, a: &Nf) -> Nf {
        Nf(a.0.iter().map(|x| -x).collect())
    }
    pub fn scale(&self, a: &Nf, c: &Q) -> Nf {
        Nf(a.0.iter().map(|x| x * c).collect())
    }
    pub fn mul(&self, a: &Nf, b: &Nf) -> Nf {
        let dc = self.dc();
        match self.quad {
            None => Nf(self.cyc_mul(&a.0, &b.0)),
            Some(d) => {
                let (a0, a1) = a.0.split_at(dc);
                let (b0, b1) = b.0.split_at(dc);
                let mut r0 = self.cyc_mul(a0, b0);
                let t = self.cyc_mul(a1, b1);
                for (x, y) in r0.iter_mut().zip(t) {
                    *x += y * q(d);
                }
                let mut r1 = self.cyc_mul(a0, b1);
                for (x, y) in r1.iter_mut().zip(self.cyc_mul(a1, b0)) {
                    *x += y;
                }
                r0.extend(r1);
                Nf(r0)
            }
        }
    }
    pub fn pow(&self, a: &Nf, e: u32) -> Nf {
        let mut r = self.one();
        let mut b = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        r
    }
    /// Complex conjugation: ζ ↦ ζ⁻¹, √D ↦ −√D for D < 0.
    pub fn conj(&self, a: &Nf) -> Nf {
        let dc = self.dc();
        let n = self.n as i64;
        let mut out = self.zero();
        let mut add_part = |coefs: &[Q], sign: i64, off_s: bool| {
            for (i, c) in coefs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let z = self.zeta(n - i as i64);
                let mut term = self.scale(&z, &(c * q(sign)));
                if off_s {
                    term = self.mul(&term, &self.sqrt_d());
                }
                out = self.add(&out, &term);
            }
        };
        add_part(&a.0[..dc], 1, false);
        if let Some(d) = self.quad {
            add_part(&a.0[dc..], if d < 0 { -1 } else { 1 }, true);
        }
        out
    }
    /// Inverse via the norm down to Q, using conjugates over the Galois group.
    pub fn inv(&self, a: &Nf) -> Nf {
        assert!(!self.is_zero(a), "inverse of zero");
        // product of all Galois conjugates except a
        let mut prod = self.one();
        for sigma in self.galois() {
            if sigma == (1, 1) {
                continue;
            }
            prod = self.mul(&prod, &self.apply_galois(a, sigma));
        }
        let nrm = self.mul(a, &prod);
        let r = self.as_rational(&nrm).expect("norm is rational");
        self.scale(&prod, &(Q::one() / r))
    }
    pub fn div(&self, a: &Nf, b: &Nf) -> Nf {
        self.mul(a, &self.inv(b))
    }
    fn galois(&self) -> Vec<(i64, i64)> {
        let n = self.n as i64;
        let units: Vec<i64> = (1..=n.max(1)).filter(|&u| arith::gcd(u, n) == 1).collect();
        let signs: Vec<i64> = if self.quad.is_some() { vec![1, -1] } else { vec![1] };
        let mut out = Vec::new();
        for &u in &units {
            for &s in &signs {
                out.push((if n == 1 { 1 } else { u }, s));
            }
        }
        out
    }
    /// ζ ↦ ζ^u, s ↦ sign·s.
    fn apply_galois(&self, a: &Nf, (u, sign): (i64, i64)) -> Nf {
        let dc = self.dc();
        let mut out = self.zero();
        for (i, c) in a.0[..dc].iter().enumerate() {
            if !c.is_zero() {
                out = self.add(&out, &self.scale(&self.zeta(u * i as i64), c));
            }
        }
        if self.quad.is_some() {
            let mut t = self.zero();
            for (i, c) in a.0[dc..].iter().enumerate() {
                if !c.is_zero() {
                    t = self.add(&t, &self.scale(&self.zeta(u * i as i64), &(c * q(sign))));
                }
            }
            out = self.add(&out, &self.mul(&t, &self.sqrt_d()));
        }
        out
    }

    pub fn to_complex(&self, a: &Nf) -> Complex64 {
        let dc = self.dc();
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.n as f64);
        let ev = |cs: &[Q]| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut zp = Complex64::new(1.0, 0.0);
            for c in cs {
                acc += zp * c.to_f64().unwrap();
                zp *= z;
            }
            acc
        };
        let mut r = ev(&a.0[..dc]);
        if let Some(d) = self.quad {
            let s = if d < 0 {
                Complex64::new(0.0, (-d as f64).sqrt())
            } else {
                Complex64::new((d as f64).sqrt(), 0.0)
            };
            r += ev(&a.0[dc..]) * s;
        }
        r
    }

    /// Image under ζ ↦ z, s ↦ s_p in Z/p^M (z, s_p given as residues).
    pub fn to_padic_parts(&self, a: &Nf, z: i128, s: i128, pm: i128) -> Option<i128> {
        let dc = self.dc();
        let ev = |cs: &[Q]| -> Option<i128> {
            let mut acc = 0i128;
            let mut zp = 1i128;
            for c in cs {
                if !c.is_zero() {
                    let num = (c.numer() % BigInt::from(pm)).to_i128().unwrap();
                    let den = (c.denom() % BigInt::from(pm)).to_i128().unwrap();
                    let di = arith::invmod(den, pm)?;
                    acc = (acc + num.rem_euclid(pm) * di % pm * zp) % pm;
                }
                zp = zp * z % pm;
            }
            Some(acc)
        };
        let mut r = ev(&a.0[..dc])?;
        if self.quad.is_some() {
            r = (r + ev(&a.0[dc..])? * s) % pm;
        }
        Some(r.rem_euclid(pm))
    }

    pub fn fmt(&self, a: &Nf) -> String {
        let dc = self.dc();
        let mut parts = Vec::new();
        for (idx, c) in a.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j) = (idx % dc, idx / dc);
            let mut m = String::new();
            if i > 0 {
                m += &format!("z{}^{}", self.n, i);
            }
            if j > 0 {
                if !m.is_empty() {
                    m += "*";
                }
                m += &format!("sqrt({})", self.quad.unwrap());
            }
            parts.push(if m.is_empty() {
                c.to_string()
            } else if c.is_one() {
                m
            } else {
                format!("({})*{}", c, m)
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Parse "p/q", "a+bi" style Gaussian rationals into (re, im).
pub fn parse_gaussian(s: &str) -> Option<(Q, Q)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(body) = s.strip_suffix('i') {
        // split at the last +/- that is not leading and not after '/'
        let bytes: Vec<char> = body.chars().collect();
        let mut cut = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == '+' || bytes[i] == '-') && bytes[i - 1] != '/' {
                cut = Some(i);
                break;
            }
        }
        let (re, im) = match cut {
            Some(i) => (bytes[..i].iter().collect::<String>(), bytes[i..].iter().collect::<String>()),
            None => ("0".to_string(), body.to_string()),
        };
        let im = match im.as_str() {
            "" | "+" => "1".to_string(),
            "-" => "-1".to_string(),
            x => x.trim_start_matches('+').to_string(),
        };
        Some((parse_rational(&re)?, parse_rational(&im)?))
    } else {
        Some((parse_rational(&s)?, Q::zero()))
    }
}

pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim().trim_start_matches('+');
    match s.split_once('/') {
        Some((a, b)) => {
            let b: BigInt = b.parse().ok()?;
            if b.is_zero() {
                return None;
            }
            Some(Q::new(a.parse().ok()?, b))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic(10), vec![1, -1, 1, -1, 1]);
        assert_eq!(cyclotomic(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn gauss_sum_absorption() {
        let f = NumField::new(6, Some(-3));
        assert!(f.quad.is_none());
        let s = f.sqrt_d();
        assert_eq!(f.mul(&s, &s), f.from_int(-3));
        let f7 = NumField::new(14, Some(-7));
        let s = f7.sqrt_d();
        assert_eq!(f7.mul(&s, &s), f7.from_int(-7));
        assert!((f7.to_complex(&s) - Complex64::new(0.0, 7f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn tower_arith() {
        let f = NumField::new(8, Some(-7));
        let z = f.zeta(1);
        assert_eq!(f.pow(&z, 8), f.one());
        assert_eq!(f.pow(&z, 4), f.from_int(-1));
        let s = f.sqrt_d();
        assert_eq!(f.mul(&s, &s), f.from_int(-7));
        let x = f.add(&z, &s);
        let y = f.inv(&x);
        assert_eq!(f.mul(&x, &y), f.one());
        let cx = f.conj(&x);
        assert!((f.to_complex(&cx) - f.to_complex(&x).conj()).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn embedding_is_homomorphism(a in prop::collection::vec(-5i64..5, 8), b in prop::collection::vec(-5i64..5, 8)) {
            let f = NumField::new(8, Some(-3));
            let x = Nf(a.iter().map(|&v| q(v)).collect());
            let y = Nf(b.iter().map(|&v| q(v)).collect());
            let lhs = f.to_complex(&f.mul(&x, &y));
            let rhs = f.to_complex(&x) * f.to_complex(&y);
            prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
            let c = f.to_complex(&f.conj(&x));
            prop_assert!((c - f.to_complex(&x).conj()).norm() < 1e-9 * (1.0 + c.norm()));
        }
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_gaussian("3/4"), Some((qfrac(3, 4), q(0))));
        assert_eq!(parse_gaussian("1-2i"), Some((q(1), q(-2))));
        assert_eq!(parse_gaussian("-1/2+3/5i"), Some((qfrac(-1, 2), qfrac(3, 5))));
        assert_eq!(parse_gaussian("-i"), Some((q(0), q(-1))));
        assert_eq!(parse_gaussian("x"), None);
    }
}
