//! Petersson products on Γ₀(N) by quadrature over coset translates of the
//! standard fundamental domain.

use crate::arith;
use crate::exec::Exec;
use crate::qexp::{basic_eval, Basic, DirChar, QExpansion, Realization, Scalar};
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeterssonError {
    #[error("weights differ: {0} vs {1}")]
    Weight(i64, i64),
    #[error("form has no realization away from the cusp at infinity")]
    NotEvaluable,
    #[error("Γ₀({from}) is not contained in Γ₀({to})'s supergroup chain")]
    Containment { from: i64, to: i64 },
    #[error("hypothesis: {0}")]
    Hypothesis(String),
    #[error("{0}")]
    Qexp(#[from] crate::qexp::QexpError),
}

pub type Mat = [i64; 4];

#[derive(Clone, Debug, PartialEq)]
pub struct CosetDecomposition {
    pub level: i64,
    pub reps: Vec<Mat>,
}

impl CosetDecomposition {
    pub fn index(&self) -> usize {
        self.reps.len()
    }
}

pub fn index_gamma0(n: i64) -> i64 {
    arith::prime_divisors(n).iter().fold(n, |acc, q| acc / q * (q + 1))
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.signum() * a, a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Complete a coprime bottom row (c, d) to an SL₂(Z) matrix.
fn complete(c: i64, d: i64) -> Mat {
    let (g, x, y) = ext_gcd(d, c);
    assert_eq!(g, 1);
    // a d − b c = 1 with a = x, b = −y
    [x, -y, c, d]
}

/// Integers (c', d') ≡ (c, d) mod n, coprime, with m | c'.
fn lift_row(c: i64, d: i64, n: i64, m: i64) -> (i64, i64) {
    for i in 0..=n {
        let c1 = c + i * n;
        if c1 % m != 0 || (c1 == 0 && i > 0) {
            continue;
        }
        for t in 0..(4 * n + 4) {
            for d1 in [d + t * n, d - t * n] {
                if arith::gcd(c1, d1) == 1 {
                    return (c1, d1);
                }
            }
        }
    }
    unreachable!("bottom row has no coprime lift")
}

fn p1_key(c: i64, d: i64, n: i64) -> (i64, i64) {
    (1..=n.max(1))
        .filter(|&u| arith::gcd(u, n) == 1)
        .map(|u| ((u * c).rem_euclid(n), (u * d).rem_euclid(n)))
        .min()
        .unwrap()
}

/// Right cosets Γ₀(N)γ, one per point of P¹(Z/N).
pub fn coset_reps(n: i64) -> CosetDecomposition {
    coset_reps_within(n, 1)
}

/// Representatives of Γ₀(N)\Γ₀(M) for M | N.
pub fn coset_reps_within(n: i64, m: i64) -> CosetDecomposition {
    assert!(n >= 1 && n % m == 0);
    let mut seen = std::collections::BTreeSet::new();
    let mut reps = Vec::new();
    for c in 0..n.max(1) {
        for d in 0..n.max(1) {
            if arith::gcd(arith::gcd(c, d), n) != 1 && n > 1 {
                continue;
            }
            let key = p1_key(c, d, n);
            if c.rem_euclid(m) != 0 || !seen.insert(key) {
                continue;
            }
            let (c1, d1) = if n == 1 { (0, 1) } else { lift_row(c, d, n, m) };
            reps.push(complete(c1, d1));
        }
    }
    CosetDecomposition { level: n, reps }
}

/// γ₁ γ₂⁻¹ ∈ Γ₀(N)?
pub fn equivalent(n: i64, g1: &Mat, g2: &Mat) -> bool {
    // γ₂⁻¹ = [d, −b; −c, a]; bottom-left of γ₁γ₂⁻¹ is c₁d₂ − d₁c₂
    (g1[2] * g2[3] - g1[3] * g2[2]).rem_euclid(n) == 0
}

fn mobius(g: &Mat, z: Complex64) -> Complex64 {
    (z * g[0] as f64 + g[1] as f64) / (z * g[2] as f64 + g[3] as f64)
}

/// A realization compiled for repeated evaluation: each B(Mz) computed once per point.
#[derive(Clone, Debug)]
struct Compiled {
    keys: Vec<(Basic, i64)>,
    terms: Vec<(Complex64, Vec<usize>)>,
}

impl Compiled {
    fn new(rs: &[&Realization]) -> (Vec<(Basic, i64)>, Vec<Compiled>) {
        let mut idx: HashMap<(Basic, i64), usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut out = Vec::new();
        for r in rs {
            let mut terms = Vec::new();
            for (c, mono) in &r.terms {
                let ids = mono
                    .iter()
                    .map(|k| {
                        *idx.entry(*k).or_insert_with(|| {
                            keys.push(*k);
                            keys.len() - 1
                        })
                    })
                    .collect();
                terms.push((*c, ids));
            }
            out.push(Compiled { keys: vec![], terms });
        }
        for c in out.iter_mut() {
            c.keys = keys.clone();
        }
        (keys, out)
    }
    fn eval(&self, vals: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(c, ids)| ids.iter().fold(*c, |acc, &i| acc * vals[i])).sum()
    }
}

fn key_values(keys: &[(Basic, i64)], z: Complex64) -> Vec<Complex64> {
    keys.iter().map(|&(b, m)| basic_eval(b, z * m as f64)).collect()
}

/// Σ c · χ̄(d) (f|_k γ)(z): the output of the trace operator.
#[derive(Clone, Debug)]
pub struct SlashSum {
    pub weight: i64,
    pub level: i64,
    pub base: Realization,
    pub terms: Vec<(Complex64, Mat)>,
}

impl SlashSum {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, g)| {
                let j = z * g[2] as f64 + g[3] as f64;
                c * self.base.eval(mobius(g, z)) / j.powi(self.weight as i32)
            })
            .sum()
    }
}

/// Anything the quadrature can evaluate on all of H.
#[derive(Clone, Debug)]
pub enum Form {
    Real { weight: i64, level: i64, real: Realization },
    Slash(SlashSum),
}

impl Form {
    pub fn from_qexp(f: &QExpansion) -> Result<Form, PeterssonError> {
        let real = f.real.clone().ok_or(PeterssonError::NotEvaluable)?;
        Ok(Form::Real { weight: f.weight, level: f.level.max(real.level()), real })
    }
    pub fn weight(&self) -> i64 {
        match self {
            Form::Real { weight, .. } => *weight,
            Form::Slash(s) => s.weight,
        }
    }
    pub fn level(&self) -> i64 {
        match self {
            Form::Real { level, .. } => *level,
            Form::Slash(s) => s.level,
        }
    }
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Form::Real { real, .. } => real.eval(z),
            Form::Slash(s) => s.eval(z),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeterssonParams {
    /// Gauss-Legendre nodes across x ∈ [−1/2, 1/2]
    pub x_nodes: usize,
    /// nodes per unit panel in y
    pub y_nodes: usize,
    /// cutoff height (None: chosen from weight and level)
    pub y_max: Option<f64>,
    pub precision_digits: u32,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for PeterssonParams {
    fn default() -> Self {
        PeterssonParams { x_nodes: 40, y_nodes: 20, y_max: None, precision_digits: 15, exec: Exec::Parallel }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeterssonValue {
    pub re: f64,
    pub im: f64,
    pub error: f64,
    pub level: i64,
    pub params: PeterssonParams,
}

impl PeterssonValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn nodes(n: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(n).unwrap().as_node_weight_pairs().into_iter().copied().collect()
}

fn raw_integral(f: &Form, g: &Form, n: i64, cosets: &CosetDecomposition, xn: usize, yn: usize, ymax: f64, ex: Exec) -> Complex64 {
    let k = f.weight();
    let xs = nodes(xn);
    let ys = nodes(yn);
    let compiled = match (f, g) {
        (Form::Real { real: a, .. }, Form::Real { real: b, .. }) => Some(Compiled::new(&[a, b])),
        _ => None,
    };
    let integrand = |w: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for gm in &cosets.reps {
            let z = mobius(gm, w);
            let (fv, gv) = match &compiled {
                Some((keys, cs)) => {
                    let v = key_values(keys, z);
                    (cs[0].eval(&v), cs[1].eval(&v))
                }
                None => (f.eval(z), g.eval(z)),
            };
            acc += fv * gv.conj() * z.im.powi(k as i32);
        }
        acc / (w.im * w.im)
    };
    // panels in y: [√(1−x²), 1], then unit panels up to ymax
    let per_x = |&(xt, xw): &(f64, f64)| -> Complex64 {
        let x = 0.5 * xt;
        let y0 = (1.0 - x * x).sqrt();
        let mut edges = vec![y0];
        let mut e = 1.0;
        while e < ymax {
            e += 1.0;
            edges.push(e.min(ymax));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for win in edges.windows(2) {
            let (a, b) = (win[0], win[1]);
            if b <= a {
                continue;
            }
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            for &(yt, yw) in &ys {
                acc += integrand(Complex64::new(x, mid + half * yt)) * (yw * half);
            }
        }
        acc * (0.5 * xw)
    };
    let parts = ex.map(&xs, per_x);
    let total: Complex64 = parts.iter().sum();
    total * (3.0 / (PI * index_gamma0(n) as f64))
}

fn default_ymax(k: i64, n: i64) -> f64 {
    (n as f64 * (k as f64 + 20.0) / 4.0).max(10.0)
}

/// ⟨f, g⟩ on Γ₀(N), normalized by the volume of X₀(N).
pub fn petersson_product(f: &QExpansion, g: &QExpansion, n: Option<i64>, params: &PeterssonParams) -> Result<PeterssonValue, PeterssonError> {
    petersson_forms(&Form::from_qexp(f)?, &Form::from_qexp(g)?, n, params)
}

pub fn petersson_forms(f: &Form, g: &Form, n: Option<i64>, params: &PeterssonParams) -> Result<PeterssonValue, PeterssonError> {
    if f.weight() != g.weight() {
        return Err(PeterssonError::Weight(f.weight(), g.weight()));
    }
    let lvl = arith::lcm(f.level(), g.level());
    let n = match n {
        Some(n) if n % lvl == 0 => n,
        Some(n) => return Err(PeterssonError::Hypothesis(format!("level {n} is not a multiple of {lvl}"))),
        None => lvl,
    };
    let cosets = coset_reps(n);
    let ymax = params.y_max.unwrap_or_else(|| default_ymax(f.weight(), n));
    let ex = params.exec;
    let v1 = raw_integral(f, g, n, &cosets, params.x_nodes, params.y_nodes, ymax, ex);
    let v2 = raw_integral(f, g, n, &cosets, params.x_nodes * 3 / 2, params.y_nodes * 3 / 2, ymax * 1.25, ex);
    let err = (v1 - v2).norm() + 1e-15 * v2.norm();
    Ok(PeterssonValue { re: v2.re, im: v2.im, error: err, level: n, params: *params })
}

/// trc(f) = Σ_γ χ̄(γ) f|γ over Γ₀(N)\Γ₀(target).
pub fn trace_down(f: &QExpansion, target: i64, chi: &DirChar) -> Result<SlashSum, PeterssonError> {
    let real = f.real.clone().ok_or(PeterssonError::NotEvaluable)?;
    let n = f.level.max(real.level());
    if n % target != 0 || target % chi.modulus != 0 {
        return Err(PeterssonError::Containment { from: n, to: target });
    }
    let reps = coset_reps_within(n, target);
    let terms = reps
        .reps
        .iter()
        .map(|g| {
            let c = chi.eval(g[3]).map_or(Complex64::new(0.0, 0.0), |z| z.to_complex().conj());
            (c, *g)
        })
        .collect();
    Ok(SlashSum { weight: f.weight, level: target, base: real, terms })
}

/// The identities relating p-stabilized pairings to newform pairings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Identity {
    Scaling,
    SelfTranslate,
    AdjointToTp,
    AtkinLehner,
    EulerDenominator,
    EulerPrimeToP,
    EulerPPartGe2,
    EulerPPart1,
}

impl Identity {
    pub const ALL: [Identity; 8] = [
        Identity::Scaling,
        Identity::SelfTranslate,
        Identity::AdjointToTp,
        Identity::AtkinLehner,
        Identity::EulerDenominator,
        Identity::EulerPrimeToP,
        Identity::EulerPPartGe2,
        Identity::EulerPPart1,
    ];
    pub fn name(self) -> &'static str {
        match self {
            Identity::Scaling => "scaling",
            Identity::SelfTranslate => "self-translate",
            Identity::AdjointToTp => "adjoint-to-Tp",
            Identity::AtkinLehner => "atkin-lehner",
            Identity::EulerDenominator => "euler-denominator",
            Identity::EulerPrimeToP => "euler-numerator-prime-to-p",
            Identity::EulerPPartGe2 => "euler-numerator-p-part-ge2",
            Identity::EulerPPart1 => "euler-numerator-p-part-1",
        }
    }
    pub fn parse(s: &str) -> Option<Identity> {
        Identity::ALL.iter().copied().find(|i| i.name() == s)
    }
}

/// Concrete forms for an identity: f weight k, g weight m−k, h weight m.
#[derive(Clone, Debug)]
pub struct Instance {
    pub p: i64,
    pub f: QExpansion,
    pub g: Option<QExpansion>,
    pub h: Option<QExpansion>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: Identity,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub rel_error: f64,
    pub quad_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn c(x: Complex64) -> Scalar {
    Scalar::Complex(x)
}

fn require(cond: bool, msg: &str) -> Result<(), PeterssonError> {
    if cond {
        Ok(())
    } else {
        Err(PeterssonError::Hypothesis(msg.into()))
    }
}

/// Default instance for each identity at p = 2.
pub fn default_instance(id: Identity, b: usize) -> Result<Instance, PeterssonError> {
    use crate::qexp::builtin_or_load;
    let delta = || builtin_or_load("delta", b);
    let inst = match id {
        Identity::Scaling | Identity::SelfTranslate | Identity::EulerDenominator => Instance { p: 2, f: delta()?, g: None, h: None },
        Identity::AdjointToTp => Instance { p: 2, f: builtin_or_load("eta8_8", b)?, g: None, h: None },
        Identity::AtkinLehner | Identity::EulerPrimeToP => Instance { p: 2, f: delta()?, g: Some(delta()?), h: Some(builtin_or_load("weight24a", b)?) },
        Identity::EulerPPartGe2 => Instance { p: 2, f: builtin_or_load("eta2_12", b)?, g: Some(delta()?), h: Some(builtin_or_load("delta_e6", b)?) },
        Identity::EulerPPart1 => Instance { p: 2, f: builtin_or_load("eta8_8", b)?, g: Some(delta()?), h: Some(builtin_or_load("delta_e4sq", b)?) },
    };
    Ok(inst)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Both sides of an identity, computed from Petersson products and Hecke data.
pub fn verify_identity(id: Identity, inst: &Instance, params: &PeterssonParams, tol: f64) -> Result<IdentityReport, PeterssonError> {
    let p = inst.p;
    let pf = p as f64;
    let pp = |a: &QExpansion, b: &QExpansion| -> Result<PeterssonValue, PeterssonError> { petersson_product(a, b, None, params) };
    let pp_at = |a: &QExpansion, b: &QExpansion, n: i64| -> Result<PeterssonValue, PeterssonError> { petersson_product(a, b, Some(n), params) };
    let f = &inst.f;
    let (lhs, rhs, qerr): (Complex64, Complex64, f64) = match id {
        Identity::Scaling => {
            require(f.level % p != 0, "f must have prime-to-p level")?;
            let fp = f.shift(p, 1);
            let n = f.level * p;
            let a = pp_at(&fp, &fp, n)?;
            let b = pp_at(f, f, n)?;
            (a.value(), b.value() * pf.powi(-(f.weight as i32)), a.error + b.error)
        }
        Identity::SelfTranslate => {
            require(f.level % p != 0, "h must have prime-to-p level")?;
            let a = pp(f, &f.shift(p, 1))?;
            let b = pp_at(f, f, f.level * p)?;
            let ap = f.coef_complex(p as usize);
            let m = f.weight;
            (a.value(), b.value() * ap / (pf.powi(m as i32 - 1) * (pf + 1.0)), a.error + b.error)
        }
        Identity::AdjointToTp => {
            require(f.level % p == 0, "f must have level divisible by p")?;
            let tf = f.hecke_t(p)?;
            let tf = QExpansion { real: Some(crate::qexp::fit_realization(&tf)?), ..tf };
            let n = f.level * p;
            let a = pp_at(&tf, f, n)?;
            let b = pp_at(f, &f.shift(p, 1), n)?;
            (a.value(), b.value() * pf.powi(f.weight as i32), a.error + b.error)
        }
        Identity::AtkinLehner => {
            let (g, h) = (inst.g.as_ref().unwrap(), inst.h.as_ref().unwrap());
            require(f.weight + g.weight == h.weight, "weights must satisfy k + (m−k) = m")?;
            require(f.level % p != 0 && g.level % p != 0 && h.level % p != 0, "levels must be prime to p")?;
            let a = pp(&f.shift(p, 1).multiply(g), h)?;
            let b = pp(&f.multiply(&g.shift(p, 1)), &h.shift(p, 1))?;
            let chi = f.chi.eval(p).map_or(Complex64::new(0.0, 0.0), |z| z.to_complex().conj());
            (a.value(), b.value() * chi * pf.powi((h.weight - f.weight) as i32), a.error + b.error)
        }
        Identity::EulerDenominator => {
            require(f.level % p != 0, "h must have prime-to-p level")?;
            let r = f.hecke_roots(p)?;
            let hs = f.p_stabilize(p, &c(r.beta));
            let hn = f.p_natural(p, &c(r.beta));
            let a = pp(&hs, &hn)?;
            let b = pp_at(f, f, f.level * p)?;
            let (al, be) = (r.alpha, r.beta);
            let fac = (-al / be) * (1.0 - be / al) * (1.0 - be / (al * pf)) / (1.0 + 1.0 / pf);
            (a.value(), b.value() * fac, a.error + b.error * fac.norm())
        }
        Identity::EulerPrimeToP => {
            let (g, h) = (inst.g.as_ref().unwrap(), inst.h.as_ref().unwrap());
            require(f.weight + g.weight == h.weight, "weights must satisfy k + (m−k) = m")?;
            require(f.level % p != 0 && g.level % p != 0 && h.level % p != 0, "levels must be prime to p")?;
            let (rf, rg, rh) = (f.hecke_roots(p)?, g.hecke_roots(p)?, h.hecke_roots(p)?);
            let gs = g.p_stabilize(p, &c(rg.beta));
            let hn = h.p_natural(p, &c(rh.beta));
            let a = pp(&f.multiply(&gs), &hn)?;
            let b = pp_at(&f.multiply(g), h, arith::lcm(f.level * p, h.level))?;
            let fac = (-rh.alpha / rh.beta) / (1.0 + 1.0 / pf) * (1.0 - rg.beta * rf.alpha / rh.alpha) * (1.0 - rg.beta * rf.beta / rh.alpha);
            (a.value(), b.value() * fac, a.error + b.error * fac.norm())
        }
        Identity::EulerPPartGe2 | Identity::EulerPPart1 => {
            let (g, h) = (inst.g.as_ref().unwrap(), inst.h.as_ref().unwrap());
            require(f.weight + g.weight == h.weight, "weights must satisfy k + (m−k) = m")?;
            require(g.level % p != 0 && h.level % p != 0, "g and h must have prime-to-p level")?;
            let r0 = arith::val(f.level, p) as i64;
            match id {
                Identity::EulerPPartGe2 => require(r0 >= 2, "f must be new at p^r with r ≥ 2")?,
                _ => require(r0 == 1, "f must be new at p exactly")?,
            }
            let (rg, rh) = (g.hecke_roots(p)?, h.hecke_roots(p)?);
            let gs = g.p_stabilize(p, &c(rg.beta));
            let hn = h.p_natural(p, &c(rh.beta)).shift(p.pow(r0 as u32 - 1), 1);
            let a = pp(&f.multiply(&gs), &hn)?;
            let b = pp(&f.multiply(g), &h.shift(p.pow(r0 as u32), 1))?;
            let mut fac = -pf * rh.beta.conj();
            if id == Identity::EulerPPart1 {
                fac *= 1.0 - rg.beta * f.coef_complex(p as usize) / rh.alpha;
            }
            (a.value(), b.value() * fac, a.error + b.error * fac.norm())
        }
    };
    let re = rel(lhs, rhs);
    Ok(IdentityReport {
        identity: id,
        lhs: [lhs.re, lhs.im],
        rhs: [rhs.re, rhs.im],
        rel_error: re,
        quad_error: qerr / rhs.norm().max(1e-300),
        tolerance: tol,
        pass: re <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexp::{builtin_or_load, delta};

    #[test]
    fn coset_counts() {
        for (n, idx) in [(1, 1), (2, 3), (4, 6), (6, 12), (11, 12), (12, 24)] {
            let c = coset_reps(n);
            assert_eq!(c.index(), idx, "N = {n}");
            assert_eq!(index_gamma0(n) as usize, idx);
            for (i, a) in c.reps.iter().enumerate() {
                assert_eq!(a[0] * a[3] - a[1] * a[2], 1);
                for b in &c.reps[..i] {
                    assert!(!equivalent(n, a, b));
                }
            }
        }
        let c = coset_reps_within(8, 2);
        assert_eq!(c.index(), 4);
        assert!(c.reps.iter().all(|g| g[2] % 2 == 0));
    }

    fn quick() -> PeterssonParams {
        PeterssonParams { x_nodes: 24, y_nodes: 14, ..Default::default() }
    }

    #[test]
    fn delta_norm_and_levels() {
        let d = delta(40);
        let p = PeterssonParams::default();
        let v1 = petersson_product(&d, &d, None, &p).unwrap();
        let v2 = petersson_product(&d, &d, Some(2), &quick()).unwrap();
        // ⟨Δ,Δ⟩ with measure 3/π dx dy/y²: 1.035362e-6 · 3/π
        let known = 1.035_362_056_804_3e-6 * 3.0 / PI;
        assert!((v1.re - known).abs() < 1e-8 * known, "{}", v1.re);
        assert!(v1.im.abs() < 1e-12 * known);
        assert!(v1.error < 1e-8 * known);
        assert!((v2.re - v1.re).abs() < 1e-7 * known);
    }

    #[test]
    fn orthogonal_weight24() {
        let h1 = builtin_or_load("weight24a", 40).unwrap();
        let h2 = builtin_or_load("weight24b", 40).unwrap();
        let p = quick();
        let a = petersson_product(&h1, &h2, None, &p).unwrap();
        let n1 = petersson_product(&h1, &h1, None, &p).unwrap();
        let n2 = petersson_product(&h2, &h2, None, &p).unwrap();
        assert!(a.value().norm() < 1e-8 * (n1.re * n2.re).sqrt());
        let b = petersson_product(&h2, &h1, None, &p).unwrap();
        assert!((a.value() - b.value().conj()).norm() <= 2.0 * (a.error + b.error) + 1e-12 * n1.re);
    }

    #[test]
    fn trace_operator() {
        let p = quick();
        let d = delta(40);
        // already at the target level: multiplied by 1
        let t = trace_down(&d, 1, &DirChar::trivial(1)).unwrap();
        let z = Complex64::new(0.2, 0.9);
        assert!((t.eval(z) - d.eval(z)).norm() < 1e-12 * d.eval(z).norm());
        // new at 2, traced to level 1: zero
        let f = builtin_or_load("eta8_8", 40).unwrap();
        let t = trace_down(&f, 1, &DirChar::trivial(1)).unwrap();
        for z in [Complex64::new(0.1, 1.2), Complex64::new(-0.3, 0.8)] {
            assert!(t.eval(z).norm() < 1e-10 * f.eval(z).norm());
        }
        // pairing constant = index
        let d2 = d.shift(2, 1);
        let t = trace_down(&d2, 1, &DirChar::trivial(1)).unwrap();
        let lhs = petersson_forms(&Form::Slash(t), &Form::from_qexp(&d).unwrap(), None, &p).unwrap();
        let rhs = petersson_product(&d2, &d, None, &p).unwrap();
        assert!((lhs.value() - rhs.value() * 3.0).norm() < 1e-7 * rhs.value().norm());
    }

    #[test]
    fn scaling_identity_small() {
        let inst = default_instance(Identity::Scaling, 40).unwrap();
        let r = verify_identity(Identity::Scaling, &inst, &quick(), 1e-6).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
