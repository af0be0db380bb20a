//! Local triple-product factors at finite primes and the Whittaker-model oracle.

use crate::arith;
use crate::numfield::{q, Q};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalError {
    #[error("unsupported local case: {0}")]
    Unsupported(String),
    #[error("parameters outside the convergence range (|ratio| = {0})")]
    Divergent(f64),
    #[error("α = ±1: use the limit form")]
    Pole,
    #[error("central characters do not multiply to 1")]
    Central,
}

/// Local component at q, up to unramified twist.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalKind {
    /// π(χ, χ⁻¹) with χ(ϖ) = α
    Unramified { alpha: Complex64 },
    /// Steinberg (twist), conductor 1
    Special,
    /// π(μχ, μ⁻¹), χ of conductor 1 with χ(ϖ)=1, χ(g^a) = e^{2πi·chi·a/(q−1)}
    RamifiedPsC1 { mu: Complex64, chi: i64 },
    /// dihedral from the unramified quadratic extension, conductor n (even)
    SupercuspidalType1 { n: u32 },
    /// anything else, with its conductor
    Other { conductor: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalRep {
    pub q: i64,
    pub kind: LocalKind,
    /// central character at ϖ (after normalization)
    pub central: Complex64,
}

impl LocalRep {
    pub fn conductor(&self) -> u32 {
        match &self.kind {
            LocalKind::Unramified { .. } => 0,
            LocalKind::Special | LocalKind::RamifiedPsC1 { .. } => 1,
            LocalKind::SupercuspidalType1 { n } => *n,
            LocalKind::Other { conductor } => *conductor,
        }
    }
    pub fn is_tempered(&self) -> bool {
        match &self.kind {
            LocalKind::Unramified { alpha } => (alpha.norm() - 1.0).abs() < 1e-12,
            LocalKind::RamifiedPsC1 { mu, .. } => (mu.norm() - 1.0).abs() < 1e-12,
            _ => true,
        }
    }
}

/// Haar volumes of B γ_i K₂(ϖⁿ), i = 0..n.
pub fn coset_volumes(qq: i64, n: u32) -> Vec<Q> {
    let qi = Q::one() / q(qq);
    let d = Q::one() + &qi;
    (0..=n)
        .map(|i| {
            if n == 0 {
                Q::one()
            } else if i == 0 {
                Q::one() / &d
            } else if i < n {
                (Q::one() - &qi) * pow_q(&qi, i) / &d
            } else {
                pow_q(&qi, n) / &d
            }
        })
        .collect()
}

fn pow_q(x: &Q, e: u32) -> Q {
    (0..e).fold(Q::one(), |acc, _| acc * x)
}

/// χ on units mod q via a primitive root.
fn dlog_table(qq: i64) -> Vec<i64> {
    let g = arith::primitive_root(qq);
    let mut t = vec![0i64; qq as usize];
    let mut x = 1i64;
    for a in 0..qq - 1 {
        t[x as usize] = a;
        x = x * g % qq;
    }
    t
}

fn char_val(qq: i64, j: i64, u: i64, tab: &[i64]) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (j * tab[u.rem_euclid(qq) as usize]) as f64 / (qq - 1) as f64)
}

/// ε(1/2, χ, ψ^{±1}) as a normalized Gauss sum.
pub fn epsilon_half(qq: i64, chi: i64, psi_sign: f64) -> Complex64 {
    let tab = dlog_table(qq);
    let s: Complex64 = (1..qq)
        .map(|u| char_val(qq, -chi, u, &tab) * Complex64::from_polar(1.0, psi_sign * 2.0 * PI * u as f64 / qq as f64))
        .sum();
    s / (qq as f64).sqrt()
}

/// Normalized Whittaker newvector of π(μχ, μ⁻¹) w.r.t. ψ (or ψ̄).
#[derive(Clone, Debug)]
pub struct WhittakerTable {
    pub q: i64,
    pub mu: Complex64,
    pub chi: i64,
    pub psi_sign: f64,
    eps: Complex64,
    tab: Vec<i64>,
}

impl WhittakerTable {
    pub fn new(rep: &LocalRep, conj_psi: bool) -> Result<Self, LocalError> {
        match rep.kind {
            LocalKind::RamifiedPsC1 { mu, chi } => {
                if chi.rem_euclid(rep.q - 1) == 0 {
                    return Err(LocalError::Unsupported("χ must be ramified".into()));
                }
                let psi_sign = if conj_psi { -1.0 } else { 1.0 };
                // ε(1/2, χ, ψ̄) for W^ψ
                let eps = epsilon_half(rep.q, chi, -psi_sign);
                Ok(WhittakerTable { q: rep.q, mu, chi, psi_sign, eps, tab: dlog_table(rep.q) })
            }
            _ => Err(LocalError::Unsupported("Whittaker table needs a conductor-1 principal series".into())),
        }
    }
    /// W(a(ϖ^v u) γ_i) for a unit residue u.
    pub fn value(&self, v: i64, u: i64, i: u8) -> Complex64 {
        let qf = self.q as f64;
        let norm = (1.0 - 1.0 / qf).sqrt();
        let absy = qf.powf(-(v as f64) / 2.0);
        match i {
            1 if v >= 0 => char_val(self.q, self.chi, u, &self.tab) * self.mu.powi(v as i32) * absy * norm,
            0 if v >= -1 => {
                let psi = if v == -1 { Complex64::from_polar(1.0, self.psi_sign * 2.0 * PI * u as f64 / qf) } else { Complex64::new(1.0, 0.0) };
                self.mu.powi(-(v as i32) - 2) * absy * norm / qf.sqrt() * psi * self.eps
            }
            _ => Complex64::new(0.0, 0.0),
        }
    }
    /// Σ_v |W(a(ϖ^v))|² truncated at v ≤ vmax.
    pub fn norm_sq(&self, vmax: i64) -> f64 {
        (-2..=vmax).map(|v| self.value(v, 1, 1).norm_sqr()).sum()
    }
}

pub fn whittaker_value(rep: &LocalRep, v: i64, i: u8) -> Result<Complex64, LocalError> {
    Ok(WhittakerTable::new(rep, false)?.value(v, 1, i))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BruteValue {
    pub re: f64,
    pub im: f64,
    pub tail: f64,
}

impl BruteValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn params(p2: &LocalRep, p3: &LocalRep) -> Result<(i64, Complex64, Complex64, i64, i64), LocalError> {
    match (&p2.kind, &p3.kind) {
        (LocalKind::RamifiedPsC1 { mu, chi: c2 }, LocalKind::RamifiedPsC1 { mu: nu, chi: c3 }) if p2.q == p3.q => {
            if (c2 + c3).rem_euclid(p2.q - 1) != 0 {
                return Err(LocalError::Central);
            }
            Ok((p2.q, *mu, *nu, *c2, *c3))
        }
        _ => Err(LocalError::Unsupported("J needs two conductor-1 principal series at the same prime".into())),
    }
}

/// J(π₂,π₃;s) by the double-coset decomposition, v(y) truncated at V.
/// `twist` multiplies W₂ by t(det) and W₃ by t⁻¹(det).
pub fn rs_integral_brute(p2: &LocalRep, p3: &LocalRep, s: Complex64, vmax: i64, twist: Complex64) -> Result<BruteValue, LocalError> {
    let (qq, mu, nu, _, _) = params(p2, p3)?;
    let qf = qq as f64;
    let ratio = (mu * nu).norm().max((mu * nu).inv().norm()) * qf.powf(-0.5 - s.re);
    if ratio >= 1.0 {
        return Err(LocalError::Divergent(ratio));
    }
    let w2 = WhittakerTable::new(p2, false)?;
    let w3 = WhittakerTable::new(p3, true)?;
    let vols: Vec<f64> = coset_volumes(qq, 1).iter().map(|x| num_traits::ToPrimitive::to_f64(x).unwrap()).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, vol) in vols.iter().enumerate() {
        for v in -1..=vmax {
            let ys = Complex64::new(qf, 0.0).powc(-(s - 0.5) * v as f64);
            let tw = twist.powi(v as i32) * twist.inv().powi(v as i32);
            let mut shell = Complex64::new(0.0, 0.0);
            for u in 1..qq {
                shell += w2.value(v, u, i as u8) * w3.value(v, u, i as u8);
            }
            acc += shell / (qf - 1.0) * ys * tw * vol;
        }
    }
    let tail = 4.0 * ratio.powi(vmax as i32 + 1) / (1.0 - ratio);
    Ok(BruteValue { re: acc.re, im: acc.im, tail })
}

/// ζ_q(1+2s)/L(π₂×π₃, 1/2+s).
pub fn rs_normalizer(p2: &LocalRep, p3: &LocalRep, s: Complex64) -> Result<Complex64, LocalError> {
    let (qq, mu, nu, _, _) = params(p2, p3)?;
    let qf = qq as f64;
    let xi = Complex64::new(qf, 0.0).powc(-s);
    let r = qf.powf(-0.5);
    let x = xi * mu * nu;
    let y = xi / (mu * nu);
    Ok((1.0 - x * r) * (1.0 - y * r) / (1.0 - xi * xi / qf))
}

/// Closed forms: (J, J*).
pub fn rs_integral_closed(p2: &LocalRep, p3: &LocalRep, s: Complex64) -> Result<(Complex64, Complex64), LocalError> {
    let (qq, mu, nu, _, _) = params(p2, p3)?;
    let qf = qq as f64;
    let xi = Complex64::new(qf, 0.0).powc(-s);
    let r = qf.powf(-0.5);
    let x = xi * mu * nu;
    let y = xi / (mu * nu);
    let c = (1.0 - 1.0 / qf) / (1.0 + 1.0 / qf);
    let j = c / qf * x.inv() * qf.sqrt() * (1.0 - xi * xi / qf) / ((1.0 - y * r) * (1.0 - x * r));
    let jstar = c * r * x.inv();
    Ok((j, jstar))
}

pub fn contragredient(p: &LocalRep) -> LocalRep {
    let kind = match &p.kind {
        LocalKind::Unramified { alpha } => LocalKind::Unramified { alpha: alpha.inv() },
        LocalKind::RamifiedPsC1 { mu, chi } => LocalKind::RamifiedPsC1 { mu: mu.inv(), chi: -chi },
        k => k.clone(),
    };
    LocalRep { q: p.q, kind, central: p.central.inv() }
}

/// I*(π(ξ,ξ⁻¹),π₂,π₃) from brute-force J at s and the contragredient pair at −s.
pub fn i_star_brute(p2: &LocalRep, p3: &LocalRep, s: Complex64, vmax: i64) -> Result<(Complex64, f64), LocalError> {
    let qf = p2.q as f64;
    let a = rs_integral_brute(p2, p3, s, vmax, Complex64::new(1.0, 0.0))?;
    let (c2, c3) = (contragredient(p2), contragredient(p3));
    let b = rs_integral_brute(&c2, &c3, -s, vmax, Complex64::new(1.0, 0.0))?;
    let ja = a.value() * rs_normalizer(p2, p3, s)?;
    let jb = b.value() * rs_normalizer(&c2, &c3, -s)?;
    let lad = 1.0 / (1.0 - 1.0 / qf);
    let v = (1.0 + 1.0 / qf).powi(2) * lad * lad * ja * jb;
    Ok((v, 8.0 * (a.tail + b.tail)))
}

/// L_q(ad π, 1) for the local kinds that occur.
pub fn l_ad(rep: &LocalRep) -> Result<Q, LocalError> {
    let qi = Q::one() / q(rep.q);
    Ok(match &rep.kind {
        LocalKind::Special => Q::one() / (Q::one() - &qi * &qi),
        LocalKind::RamifiedPsC1 { .. } => Q::one() / (Q::one() - qi),
        LocalKind::SupercuspidalType1 { .. } => Q::one() / (Q::one() + qi),
        LocalKind::Unramified { .. } => return Err(LocalError::Unsupported("unramified L(ad) depends on Satake data".into())),
        LocalKind::Other { .. } => return Err(LocalError::Unsupported("adjoint factor".into())),
    })
}

/// The modified adjoint factor L^H_q at a bad prime, by the level/character case table.
pub fn l_h(qq: i64, level_exp: u32, char_cond_exp: u32) -> Q {
    let qi = Q::one() / q(qq);
    let a = Q::one() / (Q::one() - &qi * &qi);
    let b = Q::one() / (Q::one() + &qi);
    if level_exp == 0 {
        panic!("good prime: use the naive factor");
    }
    if level_exp == 1 && char_cond_exp == 0 {
        a * b
    } else if level_exp == char_cond_exp {
        a
    } else {
        b
    }
}

/// 𝓔_q = Π L^H_q(ad)/L_q(ad) over the ramified members of the triple.
pub fn e_q_factor(reps: &[&LocalRep]) -> Result<Q, LocalError> {
    let mut out = Q::one();
    for r in reps {
        let c = r.conductor();
        if c == 0 {
            continue;
        }
        let chi_exp = match r.kind {
            LocalKind::RamifiedPsC1 { .. } => 1,
            _ => 0,
        };
        out *= l_h(r.q, c, chi_exp) / l_ad(r)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalFactor {
    pub case: String,
    pub i_star: Option<[f64; 2]>,
    pub e_q: Option<String>,
    pub e_i: [f64; 2],
}

/// 𝓔_q I* for a resolved triple (π₃ is the largest conductor).
pub fn ichino_e_i_star(p1: &LocalRep, p2: &LocalRep, p3: &LocalRep) -> Result<LocalFactor, LocalError> {
    let prod = p1.central * p2.central * p3.central;
    if (prod - 1.0).norm() > 1e-9 {
        return Err(LocalError::Central);
    }
    let qf = p1.q as f64;
    let d2 = (1.0 + 1.0 / qf).powi(-2);
    let unr = |p: &LocalRep| p.conductor() == 0;
    let mut v = [p1, p2, p3];
    v.sort_by_key(|p| p.conductor());
    let [a, b, c] = v;
    if unr(a) && unr(b) && unr(c) {
        return Ok(LocalFactor { case: "unramified".into(), i_star: Some([1.0, 0.0]), e_q: Some("1".into()), e_i: [1.0, 0.0] });
    }
    if unr(a) && unr(b) {
        let n = c.conductor() as i32;
        return Ok(LocalFactor { case: "two-unramified".into(), i_star: None, e_q: None, e_i: [qf.powi(-n) * d2, 0.0] });
    }
    if unr(a) {
        match (&b.kind, &c.kind) {
            (LocalKind::RamifiedPsC1 { .. }, LocalKind::RamifiedPsC1 { .. }) => {
                let e = e_q_factor(&[b, c])?;
                let ef = num_traits::ToPrimitive::to_f64(&e).unwrap();
                return Ok(LocalFactor { case: "two-conductor-1-principal-series".into(), i_star: Some([1.0 / qf, 0.0]), e_q: Some(e.to_string()), e_i: [ef / qf, 0.0] });
            }
            (LocalKind::SupercuspidalType1 { n: n2 }, LocalKind::SupercuspidalType1 { n: n3 }) if n2 == n3 => {
                let alpha = match a.kind {
                    LocalKind::Unramified { alpha } => alpha,
                    _ => unreachable!(),
                };
                let st = match star_supercuspidal_q(alpha, *n2, qf) {
                    Err(LocalError::Pole) => Complex64::new(star_supercuspidal_limit(*n2, qf), 0.0),
                    r => r?,
                };
                let val = st * qf.powi(-(*n2 as i32)) * d2;
                return Ok(LocalFactor { case: "two-supercuspidal-type-1".into(), i_star: None, e_q: None, e_i: [val.re, val.im] });
            }
            _ => {}
        }
    }
    Err(LocalError::Unsupported(format!("conductors ({}, {}, {}) at q = {}", a.conductor(), b.conductor(), c.conductor(), p1.q)))
}

/// ((α^{n/2+1}−α^{−n/2−1}) − q⁻¹(α^{n/2−1}−α^{1−n/2}))² / (α−α⁻¹)².
pub fn star_supercuspidal_q(alpha: Complex64, n: u32, qq: f64) -> Result<Complex64, LocalError> {
    if (alpha - 1.0).norm() < 1e-12 || (alpha + 1.0).norm() < 1e-12 {
        return Err(LocalError::Pole);
    }
    let h = (n / 2) as i32;
    let num = (alpha.powi(h + 1) - alpha.powi(-h - 1)) - (alpha.powi(h - 1) - alpha.powi(1 - h)) / qq;
    let r = num / (alpha - alpha.inv());
    Ok(r * r)
}

/// Limit at α = ±1: ((n/2+1) − q⁻¹(n/2−1))² (sign (±1)^n drops out).
pub fn star_supercuspidal_limit(n: u32, qq: f64) -> f64 {
    let h = (n / 2) as f64;
    ((h + 1.0) - (h - 1.0) / qq).powi(2)
}

/// Σ_{i=a}^{b} x^{2i−c}.
fn sym_sum(x: Complex64, a: i64, b: i64, c: i64) -> Complex64 {
    (a..=b).map(|i| x.powi((2 * i - c) as i32)).sum()
}

/// (*)_{f,λ} with x = α/λ^{(k−1)/2}: the two-supercuspidal factor at n = 2c_λ.
pub fn star_f_lambda(x: Complex64, lambda: i64, c_lambda: u32) -> Complex64 {
    let c = c_lambda as i64;
    let r = sym_sum(x, 0, c, c) - sym_sum(x, 1, c - 1, c) / lambda as f64;
    r * r
}

/// Exact rational (*)_{f,λ} when x is rational.
pub fn star_f_lambda_exact(x: &Q, lambda: i64, c_lambda: u32) -> Q {
    let c = c_lambda as i64;
    let pw = |e: i64| if e >= 0 { pow_q(x, e as u32) } else { Q::one() / pow_q(x, (-e) as u32) };
    let s1: Q = (0..=c).map(|i| pw(2 * i - c)).fold(Q::zero(), |a, b| a + b);
    let s2: Q = (1..c).map(|i| pw(2 * i - c)).fold(Q::zero(), |a, b| a + b);
    let r = s1 - s2 / q(lambda);
    &r * &r
}

/// Variant with lower index 0 in the second sum and no square; gives 9/5 at x = 1, λ = 5.
pub fn star_f_lambda_variant(x: &Q, lambda: i64, c_lambda: u32) -> Q {
    let c = c_lambda as i64;
    let pw = |e: i64| if e >= 0 { pow_q(x, e as u32) } else { Q::one() / pow_q(x, (-e) as u32) };
    let s1: Q = (0..=c).map(|i| pw(2 * i - c)).fold(Q::zero(), |a, b| a + b);
    let s2: Q = (0..c).map(|i| pw(2 * i - c)).fold(Q::zero(), |a, b| a + b);
    s1 - s2 / q(lambda)
}

/// Rational part of 3²(m−2)!(k−1)!(m−k−1)! / (2^{4m−2} M) together with the π-exponent −(2m+2).
pub fn classical_ichino_scalar(m: u32, k: u32, m_total: &Q) -> (Q, i32) {
    let num = Q::from_integer(arith::factorial(m - 2) * arith::factorial(k - 1) * arith::factorial(m - k - 1) * 9);
    let den = Q::from_integer(num_bigint::BigInt::from(2).pow(4 * m - 2)) * m_total;
    (num / den, -(2 * m as i32 + 2))
}

/// Global scalar of the CM-case formula, with Π(1+q⁻¹)⁻² over q | cNdλ, excluding (*) and L-values.
pub fn explicit_ichino_cm_scalar(m: u32, k: u32, d: i64, lambda: i64, c_lambda: u32, c: i64, n: i64) -> (Q, i32) {
    let c2n = q(c * c * n);
    let big = pow_q(&c2n, m + 1) * q(d) * pow_q(&q(lambda), 2 * c_lambda);
    let (r, e) = classical_ichino_scalar(m, k, &big);
    let mut primes: Vec<i64> = arith::prime_divisors(c * n * d * lambda);
    primes.dedup();
    let fac = primes.iter().fold(Q::one(), |acc, &p| {
        let t = Q::one() + Q::one() / q(p);
        acc / (&t * &t)
    });
    (r * fac, e)
}

/// Same scalar from the classical formula and per-prime 𝓔_q I* values.
pub fn explicit_ichino_cm_from_local(m: u32, k: u32, d: i64, lambda: i64, c_lambda: u32, c: i64, n: i64) -> (Q, i32) {
    let c2n = q(c * c * n);
    let (mut r, e) = classical_ichino_scalar(m, k, &pow_q(&c2n, m));
    let d2 = |p: i64| {
        let t = Q::one() + Q::one() / q(p);
        Q::one() / (&t * &t)
    };
    for (p, e) in arith::factor(n) {
        r *= pow_q(&(Q::one() / q(p)), e) * d2(p);
    }
    for (p, e) in arith::factor(c) {
        r *= pow_q(&(Q::one() / q(p)), 2 * e) * d2(p);
    }
    for p in arith::prime_divisors(d) {
        // 𝓔_q I* = q⁻¹ · (1+q⁻¹)⁻² at q | d
        r *= Q::one() / q(p) * d2(p);
    }
    r *= pow_q(&(Q::one() / q(lambda)), 2 * c_lambda) * d2(lambda);
    (r, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(qq: i64, mu: Complex64, chi: i64) -> LocalRep {
        LocalRep { q: qq, kind: LocalKind::RamifiedPsC1 { mu, chi }, central: Complex64::new(1.0, 0.0) }
    }

    #[test]
    fn volumes_sum_to_one() {
        for qq in [2, 3, 5, 7] {
            for n in 0..5 {
                let s: Q = coset_volumes(qq, n).into_iter().fold(Q::zero(), |a, b| a + b);
                assert_eq!(s, Q::one());
            }
        }
    }

    #[test]
    fn whittaker_examples() {
        let r = ps(5, Complex64::from_polar(1.0, 0.7), 1);
        let w = WhittakerTable::new(&r, false).unwrap();
        assert!((w.value(0, 1, 1) - Complex64::new((1.0f64 - 0.2).sqrt(), 0.0)).norm() < 1e-14);
        assert_eq!(w.value(-2, 1, 0), Complex64::new(0.0, 0.0));
        assert_eq!(w.value(-1, 1, 1), Complex64::new(0.0, 0.0));
        assert!((w.norm_sq(60) - 1.0).abs() < 1e-12);
        assert!((epsilon_half(7, 2, 1.0).norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn closed_form_examples() {
        let one = Complex64::new(1.0, 0.0);
        let r2 = ps(5, one, 1);
        let r3 = ps(5, one, -1);
        let (_, js) = rs_integral_closed(&r2, &r3, Complex64::new(0.0, 0.0)).unwrap();
        assert!((js.re - 2.0 / 3.0 / 5f64.sqrt()).abs() < 1e-14);
        let b = rs_integral_brute(&r2, &r3, Complex64::new(0.0, 0.0), 60, one).unwrap();
        let (j, _) = rs_integral_closed(&r2, &r3, Complex64::new(0.0, 0.0)).unwrap();
        assert!((b.value() - j).norm() < 1e-12);
        // i=1 piece alone is the geometric series q⁻¹(1 − (ξμν)(ϖ)q^{−1/2})⁻¹ up to its volume
    }

    #[test]
    fn table_examples() {
        let u = |qq: i64| LocalRep { q: qq, kind: LocalKind::Unramified { alpha: Complex64::new(1.0, 0.0) }, central: Complex64::new(1.0, 0.0) };
        let other = LocalRep { q: 3, kind: LocalKind::Other { conductor: 2 }, central: Complex64::new(1.0, 0.0) };
        let f = ichino_e_i_star(&u(3), &u(3), &other).unwrap();
        assert!((f.e_i[0] - 1.0 / 16.0).abs() < 1e-15);
        let one = Complex64::new(1.0, 0.0);
        let f = ichino_e_i_star(&u(7), &ps(7, one, 1), &ps(7, one, -1)).unwrap();
        assert_eq!(f.i_star, Some([1.0 / 7.0, 0.0]));
        assert_eq!(f.e_q.as_deref(), Some("49/64"));
        assert!(ichino_e_i_star(&ps(7, one, 1), &ps(7, one, 2), &ps(7, one, -3)).is_err());
    }

    #[test]
    fn star_factors() {
        let i = Complex64::new(0.0, 1.0);
        assert!(star_supercuspidal_q(i, 2, 5.0).unwrap().norm() < 1e-14);
        assert_eq!(star_supercuspidal_q(Complex64::new(1.0, 0.0), 2, 5.0), Err(LocalError::Pole));
        assert_eq!(star_supercuspidal_limit(2, 5.0), 4.0);
        // limit by approach
        let near = star_supercuspidal_q(Complex64::from_polar(1.0, 1e-5), 2, 5.0).unwrap();
        assert!((near.re - 4.0).abs() < 1e-8);
        assert_eq!(star_f_lambda_variant(&q(1), 5, 1), q(9) / q(5));
        assert_eq!(star_f_lambda_exact(&q(1), 5, 1), q(4));
    }

    #[test]
    fn cm_scalar_consistent() {
        for (m, k, d, l, cl, c, n) in [(20u32, 8u32, 7i64, 5i64, 1u32, 1i64, 2i64), (18, 6, 3, 5, 2, 11, 4), (14, 12, 7, 3, 1, 1, 1)] {
            assert_eq!(explicit_ichino_cm_scalar(m, k, d, l, cl, c, n), explicit_ichino_cm_from_local(m, k, d, l, cl, c, n));
        }
    }

    proptest! {
        #[test]
        fn brute_matches_closed(qi in 0usize..3, si in 0usize..4, a in 0.0f64..6.283, b in 0.0f64..6.283, j in 1i64..6) {
            let qq = [3i64, 5, 7][qi];
            let s = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.3), Complex64::new(0.0, -0.3), Complex64::new(0.1, 0.0)][si];
            let j = 1 + j % (qq - 2);
            let r2 = ps(qq, Complex64::from_polar(1.0, a), j);
            let r3 = ps(qq, Complex64::from_polar(1.0, b), -j);
            let br = rs_integral_brute(&r2, &r3, s, 80, Complex64::new(1.0, 0.0)).unwrap();
            let (jc, js) = rs_integral_closed(&r2, &r3, s).unwrap();
            prop_assert!((br.value() - jc).norm() < 1e-10);
            prop_assert!((br.value() * rs_normalizer(&r2, &r3, s).unwrap() - js).norm() < 1e-10);
            let (istar, _) = i_star_brute(&r2, &r3, s, 80).unwrap();
            prop_assert!((istar - 1.0 / qq as f64).norm() < 1e-10);
            let tw = rs_integral_brute(&r2, &r3, s, 80, Complex64::from_polar(1.0, 1.1)).unwrap();
            prop_assert!((tw.value() - br.value()).norm() < 1e-12);
            // root swap symmetry of (*)
            let x = Complex64::from_polar(1.0, a);
            prop_assert!((star_f_lambda(x, qq, 3) - star_f_lambda(x.inv(), qq, 3)).norm() < 1e-10);
            if (x - 1.0).norm() > 1e-3 && (x + 1.0).norm() > 1e-3 {
                prop_assert!((star_f_lambda(x, qq, 2) - star_supercuspidal_q(x, 4, qq as f64).unwrap()).norm() < 1e-9);
            }
        }
    }
}
