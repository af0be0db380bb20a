//! Truncated q-expansions: CM forms, Hecke operators, stabilizations.

use crate::arith;
use crate::exec::Exec;
use crate::heckechar::{HeckeCharacter, Zeta};
use crate::numfield::{parse_gaussian, q, Nf, NumField, Q};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QexpError {
    #[error("need {need} coefficients, have {have}")]
    Truncation { need: usize, have: usize },
    #[error("infinity-type must be (m, 0), got {0:?}")]
    InfinityType((i64, i64)),
    #[error("not an eigenform of T({q}) (first failure at n = {n})")]
    NotEigen { q: i64, n: usize },
    #[error("weights differ: {0} vs {1}")]
    Weight(i64, i64),
    #[error("malformed newform file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("a_1 = {0}, expected 1")]
    LeadingCoefficient(String),
    #[error("unknown builtin form '{0}'")]
    Unknown(String),
    #[error("no realization found")]
    NoRealization,
}

/// Dirichlet character mod N with values ζ^e (None = 0).
#[derive(Clone, Debug, PartialEq)]
pub struct DirChar {
    pub modulus: i64,
    pub values: Vec<Option<Zeta>>,
}

impl DirChar {
    pub fn trivial(n: i64) -> Self {
        DirChar::from_fn(n, |_| Some(Zeta::one()))
    }
    pub fn from_fn(n: i64, f: impl Fn(i64) -> Option<Zeta>) -> Self {
        let n = n.max(1);
        let values = (0..n).map(|a| if arith::gcd(a, n) == 1 { f(a) } else { None }).collect();
        DirChar { modulus: n, values }
    }
    pub fn kronecker(d: i64, n: i64) -> Self {
        DirChar::from_fn(n, |a| {
            let a = if a == 0 { n } else { a };
            match arith::kronecker(d, a) {
                1 => Some(Zeta::one()),
                -1 => Some(Zeta::new(1, 2)),
                _ => None,
            }
        })
    }
    pub fn eval(&self, n: i64) -> Option<Zeta> {
        self.values[n.rem_euclid(self.modulus) as usize]
    }
    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.map_or(true, |z| z == Zeta::one()))
    }
    /// The same character read modulo a multiple of the modulus.
    pub fn lift(&self, n: i64) -> Self {
        assert_eq!(n % self.modulus, 0);
        DirChar::from_fn(n, |a| self.eval(a))
    }
    pub fn mul(&self, o: &DirChar) -> Self {
        let n = arith::lcm(self.modulus, o.modulus);
        DirChar::from_fn(n, |a| Some(self.eval(a)?.mul(&o.eval(a)?)))
    }
    pub fn conj(&self) -> Self {
        DirChar { modulus: self.modulus, values: self.values.iter().map(|v| v.map(|z| z.inv())).collect() }
    }
    pub fn order(&self) -> i64 {
        self.values.iter().flatten().fold(1, |acc, z| arith::lcm(acc, z.n))
    }
    pub fn label(&self) -> String {
        if self.is_trivial() {
            "trivial".into()
        } else {
            format!("mod {} order {}", self.modulus, self.order())
        }
    }
}

/// A single coefficient, exact or complex.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Nf),
    Complex(Complex64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coeffs {
    Exact(Arc<NumField>, Vec<Nf>),
    Complex(Vec<Complex64>),
}

impl Coeffs {
    pub fn len(&self) -> usize {
        match self {
            Coeffs::Exact(_, v) => v.len(),
            Coeffs::Complex(v) => v.len(),
        }
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn complex(&self, i: usize) -> Complex64 {
        match self {
            Coeffs::Exact(f, v) => f.to_complex(&v[i]),
            Coeffs::Complex(v) => v[i],
        }
    }
    pub fn to_complex(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.complex(i)).collect()
    }
    fn truncate(&mut self, n: usize) {
        match self {
            Coeffs::Exact(_, v) => v.truncate(n),
            Coeffs::Complex(v) => v.truncate(n),
        }
    }
}

/// Level-one building blocks of realizations (E2* is the weight-2 non-holomorphic completion).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basic {
    E2s,
    E4,
    E6,
    Delta,
}

impl Basic {
    pub fn weight(self) -> i64 {
        match self {
            Basic::E2s => 2,
            Basic::E4 => 4,
            Basic::E6 => 6,
            Basic::Delta => 12,
        }
    }
    /// Integer q-coefficients (E2 for E2*).
    pub fn coeffs(self, b: usize) -> Vec<BigInt> {
        match self {
            Basic::E2s => eisenstein_int(2, b),
            Basic::E4 => eisenstein_int(4, b),
            Basic::E6 => eisenstein_int(6, b),
            Basic::Delta => eta_product(&[(1, 24)], b),
        }
    }
}

const EVAL_TERMS: usize = 48;

fn basic_table() -> &'static [Vec<f64>; 4] {
    static T: OnceLock<[Vec<f64>; 4]> = OnceLock::new();
    T.get_or_init(|| {
        let conv = |v: Vec<BigInt>| v.iter().map(|x| x.to_f64().unwrap()).collect::<Vec<f64>>();
        [
            conv(Basic::E2s.coeffs(EVAL_TERMS)),
            conv(Basic::E4.coeffs(EVAL_TERMS)),
            conv(Basic::E6.coeffs(EVAL_TERMS)),
            conv(Basic::Delta.coeffs(EVAL_TERMS)),
        ]
    })
}

/// Value of a level-one block at an arbitrary point of H, by reduction to the
/// standard fundamental domain.
pub fn basic_eval(b: Basic, z: Complex64) -> Complex64 {
    let mut w = z;
    let mut j = Complex64::new(1.0, 0.0);
    for _ in 0..10_000 {
        w.re -= w.re.round();
        if w.norm_sqr() < 1.0 - 1e-15 {
            j *= w;
            w = -1.0 / w;
        } else {
            break;
        }
    }
    let qv = Complex64::from_polar((-2.0 * PI * w.im).exp(), 2.0 * PI * w.re);
    let tab = &basic_table()[b as usize];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qp = Complex64::new(1.0, 0.0);
    for c in tab.iter() {
        acc += qp * *c;
        qp *= qv;
    }
    if b == Basic::E2s {
        acc -= 3.0 / (PI * w.im);
    }
    acc / j.powi(b.weight() as i32)
}

/// f(z) = Σ c · Π B_i(M_i z).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Realization {
    pub terms: Vec<(Complex64, Vec<(Basic, i64)>)>,
}

impl Realization {
    pub fn monomial(b: Basic, m: i64) -> Self {
        Realization { terms: vec![(Complex64::new(1.0, 0.0), vec![(b, m)])] }
    }
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, mono)| mono.iter().fold(*c, |acc, &(b, m)| acc * basic_eval(b, z * m as f64)))
            .sum()
    }
    pub fn add(&self, o: &Realization) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Realization { terms }.simplify()
    }
    pub fn scale(&self, c: Complex64) -> Self {
        Realization { terms: self.terms.iter().map(|(x, m)| (x * c, m.clone())).collect() }
    }
    pub fn mul(&self, o: &Realization) -> Self {
        let mut terms = Vec::new();
        for (c1, m1) in &self.terms {
            for (c2, m2) in &o.terms {
                let mut m = m1.clone();
                m.extend(m2.iter().cloned());
                m.sort();
                terms.push((c1 * c2, m));
            }
        }
        Realization { terms }.simplify()
    }
    pub fn shift(&self, m: i64) -> Self {
        Realization { terms: self.terms.iter().map(|(c, mono)| (*c, mono.iter().map(|&(b, s)| (b, s * m)).collect())).collect() }
    }
    pub fn conj(&self) -> Self {
        Realization { terms: self.terms.iter().map(|(c, m)| (c.conj(), m.clone())).collect() }
    }
    fn simplify(mut self) -> Self {
        for (_, m) in self.terms.iter_mut() {
            m.sort();
        }
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut out: Vec<(Complex64, Vec<(Basic, i64)>)> = Vec::new();
        for (c, m) in self.terms {
            match out.last_mut() {
                Some((c0, m0)) if *m0 == m => *c0 += c,
                _ => out.push((c, m)),
            }
        }
        out.retain(|(c, _)| c.norm() > 0.0);
        Realization { terms: out }
    }
    /// Lcm of all scales: the form is Γ₀(level)-modular.
    pub fn level(&self) -> i64 {
        self.terms.iter().flat_map(|(_, m)| m.iter().map(|&(_, s)| s)).fold(1, arith::lcm)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    pub weight: i64,
    pub level: i64,
    pub chi: DirChar,
    /// coefficient j sits at q^{j/denom}
    pub denom: i64,
    pub coeffs: Coeffs,
    pub real: Option<Realization>,
}

/// Roots of x² − a_q x + χ(q) q^{k−1}, nonnegative imaginary part first.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckeRootPair {
    pub q: i64,
    pub a: Scalar,
    pub c: Scalar,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl HeckeRootPair {
    pub fn a_complex(&self) -> Complex64 {
        self.alpha + self.beta
    }
    pub fn swapped(&self) -> Self {
        HeckeRootPair { alpha: self.beta, beta: self.alpha, ..self.clone() }
    }
}

fn bigq(x: &BigInt) -> Q {
    Q::from_integer(x.clone())
}

impl QExpansion {
    pub fn from_rationals(weight: i64, level: i64, chi: DirChar, cs: Vec<Q>) -> Self {
        let f = NumField::rational();
        let v = cs.into_iter().map(|c| f.from_q(c)).collect();
        QExpansion { weight, level, chi, denom: 1, coeffs: Coeffs::Exact(f, v), real: None }
    }
    pub fn from_ints(weight: i64, level: i64, cs: &[BigInt]) -> Self {
        Self::from_rationals(weight, level, DirChar::trivial(level), cs.iter().map(bigq).collect())
    }
    pub fn bound(&self) -> usize {
        (self.coeffs.len() - 1) / self.denom as usize
    }
    pub fn field(&self) -> Option<&Arc<NumField>> {
        match &self.coeffs {
            Coeffs::Exact(f, _) => Some(f),
            _ => None,
        }
    }
    pub fn coef(&self, n: usize) -> Scalar {
        let j = n * self.denom as usize;
        match &self.coeffs {
            Coeffs::Exact(_, v) => Scalar::Exact(v[j].clone()),
            Coeffs::Complex(v) => Scalar::Complex(v[j]),
        }
    }
    pub fn coef_complex(&self, n: usize) -> Complex64 {
        self.coeffs.complex(n * self.denom as usize)
    }
    pub fn coef_rational(&self, n: usize) -> Option<Q> {
        match &self.coeffs {
            Coeffs::Exact(f, v) => f.as_rational(&v[n * self.denom as usize]),
            _ => None,
        }
    }
    pub fn truncate(&self, b: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(b * self.denom as usize + 1);
        out
    }
    pub fn to_complex(&self) -> Self {
        QExpansion { coeffs: Coeffs::Complex(self.coeffs.to_complex()), ..self.clone() }
    }
    fn scalar_complex(&self, s: &Scalar) -> Complex64 {
        match s {
            Scalar::Complex(c) => *c,
            Scalar::Exact(x) => self.field().expect("exact scalar on complex form").to_complex(x),
        }
    }
    fn char_scalar(&self, z: Zeta) -> Scalar {
        match &self.coeffs {
            Coeffs::Exact(f, _) => Scalar::Exact(f.root_of_unity(z.e, z.n as u32)),
            Coeffs::Complex(_) => Scalar::Complex(z.to_complex()),
        }
    }

    /// Coefficientwise a·self + b·other, same q-grid.
    fn combine(&self, other: &QExpansion, a: &Scalar, b: &Scalar) -> QExpansion {
        assert_eq!(self.denom, other.denom);
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = match (&self.coeffs, &other.coeffs, a, b) {
            (Coeffs::Exact(f, x), Coeffs::Exact(g, y), Scalar::Exact(sa), Scalar::Exact(sb)) if f == g => {
                Coeffs::Exact(f.clone(), (0..n).map(|i| f.add(&f.mul(sa, &x[i]), &f.mul(sb, &y[i]))).collect())
            }
            _ => {
                let (ca, cb) = (self.scalar_complex(a), other.scalar_complex(b));
                Coeffs::Complex((0..n).map(|i| ca * self.coeffs.complex(i) + cb * other.coeffs.complex(i)).collect())
            }
        };
        let real = match (&self.real, &other.real) {
            (Some(r), Some(s)) => Some(r.scale(self.scalar_complex(a)).add(&s.scale(other.scalar_complex(b)))),
            _ => None,
        };
        QExpansion {
            weight: self.weight,
            level: arith::lcm(self.level, other.level),
            chi: if self.chi.modulus == arith::lcm(self.level, other.level) { self.chi.clone() } else { self.chi.lift(arith::lcm(self.chi.modulus, other.chi.modulus)) },
            denom: self.denom,
            coeffs,
            real,
        }
    }
    fn one_scalar(&self) -> Scalar {
        match &self.coeffs {
            Coeffs::Exact(f, _) => Scalar::Exact(f.one()),
            _ => Scalar::Complex(Complex64::new(1.0, 0.0)),
        }
    }
    fn neg_scalar(&self, s: &Scalar) -> Scalar {
        match s {
            Scalar::Exact(x) => Scalar::Exact(self.field().unwrap().neg(x)),
            Scalar::Complex(c) => Scalar::Complex(-c),
        }
    }
    pub fn add(&self, o: &QExpansion) -> QExpansion {
        self.combine(o, &self.one_scalar(), &o.one_scalar())
    }
    pub fn sub(&self, o: &QExpansion) -> QExpansion {
        self.combine(o, &self.one_scalar(), &self.neg_scalar(&o.one_scalar()))
    }
    pub fn scale(&self, c: &Scalar) -> QExpansion {
        let zero = match &self.coeffs {
            Coeffs::Exact(f, _) => Scalar::Exact(f.zero()),
            _ => Scalar::Complex(Complex64::new(0.0, 0.0)),
        };
        let mut out = self.combine(self, c, &zero);
        out.real = self.real.as_ref().map(|r| r.scale(self.scalar_complex(c)));
        out
    }

    /// g(Mz/L).
    pub fn shift(&self, m: i64, l: i64) -> QExpansion {
        assert_eq!(arith::gcd(m, l), 1);
        let len = self.coeffs.len();
        let new_len = (len - 1) * m as usize + 1;
        let coeffs = match &self.coeffs {
            Coeffs::Exact(f, v) => {
                let mut out = vec![f.zero(); new_len];
                for (j, c) in v.iter().enumerate() {
                    out[j * m as usize] = c.clone();
                }
                Coeffs::Exact(f.clone(), out)
            }
            Coeffs::Complex(v) => {
                let mut out = vec![Complex64::new(0.0, 0.0); new_len];
                for (j, c) in v.iter().enumerate() {
                    out[j * m as usize] = *c;
                }
                Coeffs::Complex(out)
            }
        };
        let real = if l == 1 { self.real.as_ref().map(|r| r.shift(m)) } else { None };
        let level = self.level * m;
        let mut out = QExpansion { weight: self.weight, level, chi: self.chi.lift(self.chi.modulus * m), denom: self.denom * l, coeffs, real };
        // keep the grid reduced when possible
        if l == 1 {
            out.coeffs.truncate(((len - 1) / self.denom as usize) * out.denom as usize + 1);
        }
        out
    }

    /// Product, truncated at the common bound.
    pub fn multiply(&self, o: &QExpansion) -> QExpansion {
        assert_eq!(self.denom, o.denom, "multiply needs a common q-grid");
        let n = self.coeffs.len().min(o.coeffs.len());
        let coeffs = match (&self.coeffs, &o.coeffs) {
            (Coeffs::Exact(f, x), Coeffs::Exact(g, y)) if f == g => {
                let out = Exec::Parallel.map_range(0, n, |i| {
                    let mut acc = f.zero();
                    for j in 0..=i {
                        if !f.is_zero(&x[j]) && !f.is_zero(&y[i - j]) {
                            acc = f.add(&acc, &f.mul(&x[j], &y[i - j]));
                        }
                    }
                    acc
                });
                Coeffs::Exact(f.clone(), out)
            }
            _ => {
                let x = self.coeffs.to_complex();
                let y = o.coeffs.to_complex();
                Coeffs::Complex(Exec::Parallel.map_range(0, n, |i| (0..=i).map(|j| x[j] * y[i - j]).sum()))
            }
        };
        let level = arith::lcm(self.level, o.level);
        let real = match (&self.real, &o.real) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        QExpansion { weight: self.weight + o.weight, level, chi: self.chi.lift(arith::lcm(self.chi.modulus, level)).mul(&o.chi.lift(arith::lcm(o.chi.modulus, level))), denom: self.denom, coeffs, real }
    }

    /// Σ ā_n q^n, character inverted.
    pub fn rho_conjugate(&self) -> QExpansion {
        let coeffs = match &self.coeffs {
            Coeffs::Exact(f, v) => Coeffs::Exact(f.clone(), v.iter().map(|x| f.conj(x)).collect()),
            Coeffs::Complex(v) => Coeffs::Complex(v.iter().map(|x| x.conj()).collect()),
        };
        QExpansion { chi: self.chi.conj(), coeffs, real: self.real.as_ref().map(|r| r.conj()), ..self.clone() }
    }

    /// T(n) at the form's level; result certified to ⌊B/n⌋.
    pub fn hecke_t(&self, n: i64) -> Result<QExpansion, QexpError> {
        assert_eq!(self.denom, 1);
        let b = self.bound();
        let nb = b / n as usize;
        if nb == 0 {
            return Err(QexpError::Truncation { need: n as usize, have: b });
        }
        let k1 = (self.weight - 1) as u32;
        let ds: Vec<i64> = arith::divisors(n).into_iter().filter(|&d| arith::gcd(d, self.level) == 1).collect();
        let coeffs = match &self.coeffs {
            Coeffs::Exact(f, v) => {
                let dfac: Vec<(i64, Nf)> = ds
                    .iter()
                    .filter_map(|&d| {
                        let z = self.chi.eval(d)?;
                        let s = f.scale(&f.root_of_unity(z.e, z.n as u32), &Q::from_integer(BigInt::from(d).pow(k1)));
                        Some((d, s))
                    })
                    .collect();
                Coeffs::Exact(
                    f.clone(),
                    Exec::Parallel.map_range(0, nb + 1, |m| {
                        let mut acc = f.zero();
                        for (d, s) in &dfac {
                            if m as i64 % d == 0 {
                                acc = f.add(&acc, &f.mul(s, &v[m * n as usize / (d * d) as usize]));
                            }
                        }
                        acc
                    }),
                )
            }
            Coeffs::Complex(v) => {
                let dfac: Vec<(i64, Complex64)> = ds.iter().filter_map(|&d| Some((d, self.chi.eval(d)?.to_complex() * (d as f64).powi(k1 as i32)))).collect();
                Coeffs::Complex(
                    (0..=nb)
                        .map(|m| dfac.iter().filter(|(d, _)| m as i64 % d == 0).map(|(d, s)| s * v[m * n as usize / (d * d) as usize]).sum())
                        .collect(),
                )
            }
        };
        Ok(QExpansion { coeffs, real: None, ..self.clone() })
    }

    /// First n ≤ bound at which self ≠ λ·other, comparing exactly (or to 1e−9 relative).
    pub fn proportional_to(&self, other: &QExpansion, lambda: &Scalar, upto: usize) -> Option<usize> {
        for n in 0..=upto.min(self.bound()).min(other.bound()) {
            let ok = match (&self.coeffs, &other.coeffs, lambda) {
                (Coeffs::Exact(f, x), Coeffs::Exact(g, y), Scalar::Exact(l)) if f == g => x[n] == f.mul(l, &y[n]),
                _ => {
                    let lhs = self.coef_complex(n);
                    let rhs = self.scalar_complex(lambda) * other.coef_complex(n);
                    (lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm())
                }
            };
            if !ok {
                return Some(n);
            }
        }
        None
    }

    /// Checks T(q) f = a_q f to ⌊B/q⌋.
    pub fn check_eigen(&self, q: i64) -> Result<(), QexpError> {
        let t = self.hecke_t(q)?;
        let a = self.coef(q as usize);
        match t.proportional_to(self, &a, t.bound()) {
            None => Ok(()),
            Some(n) => Err(QexpError::NotEigen { q, n }),
        }
    }

    pub fn hecke_roots(&self, q: i64) -> Result<HeckeRootPair, QexpError> {
        self.check_eigen(q)?;
        let a = self.coef(q as usize);
        let c = match self.chi.eval(q) {
            None => match &self.coeffs {
                Coeffs::Exact(f, _) => Scalar::Exact(f.zero()),
                _ => Scalar::Complex(Complex64::new(0.0, 0.0)),
            },
            Some(z) => match self.char_scalar(z) {
                Scalar::Exact(x) => {
                    let f = self.field().unwrap();
                    Scalar::Exact(f.scale(&x, &Q::from_integer(BigInt::from(q).pow((self.weight - 1) as u32))))
                }
                Scalar::Complex(x) => Scalar::Complex(x * (q as f64).powi((self.weight - 1) as i32)),
            },
        };
        let (ac, cc) = (self.scalar_complex(&a), self.scalar_complex(&c));
        let disc = (ac * ac - 4.0 * cc).sqrt();
        let (mut r1, mut r2) = ((ac + disc) / 2.0, (ac - disc) / 2.0);
        if r1.im < r2.im || (r1.im == r2.im && r1.re < r2.re) {
            std::mem::swap(&mut r1, &mut r2);
        }
        Ok(HeckeRootPair { q, a, c, alpha: r1, beta: r2 })
    }

    /// f − β f(pz).
    pub fn p_stabilize(&self, p: i64, beta: &Scalar) -> QExpansion {
        let fp = self.shift(p, 1);
        let mut out = self.combine(&fp, &self.one_scalar(), &self.neg_scalar(beta));
        out.level = self.level * p;
        out.chi = self.chi.lift(self.chi.modulus * p);
        out
    }
    /// f − pβ f(pz).
    pub fn p_natural(&self, p: i64, beta: &Scalar) -> QExpansion {
        let pb = match beta {
            Scalar::Exact(x) => Scalar::Exact(self.field().unwrap().scale(x, &q(p))),
            Scalar::Complex(c) => Scalar::Complex(c * p as f64),
        };
        self.p_stabilize(p, &pb)
    }

    /// Value at a point of H: through the realization if there is one.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.real {
            Some(r) => r.eval(z),
            None => {
                let qv = Complex64::from_polar((-2.0 * PI * z.im / self.denom as f64).exp(), 2.0 * PI * z.re / self.denom as f64);
                let mut acc = Complex64::new(0.0, 0.0);
                let mut qp = Complex64::new(1.0, 0.0);
                for i in 0..self.coeffs.len() {
                    acc += qp * self.coeffs.complex(i);
                    qp *= qv;
                }
                acc
            }
        }
    }

    /// Exact rational coefficients, if all are rational.
    pub fn rationals(&self) -> Option<Vec<Q>> {
        match &self.coeffs {
            Coeffs::Exact(f, v) => v.iter().map(|x| f.as_rational(x)).collect(),
            _ => None,
        }
    }
}

/// E_k q-coefficients (k = 2, 4, 6), normalized with constant term 1.
pub fn eisenstein_int(k: u32, b: usize) -> Vec<BigInt> {
    let c: i64 = match k {
        2 => -24,
        4 => 240,
        6 => -504,
        _ => panic!("integral normalization only for k = 2, 4, 6"),
    };
    let mut out = vec![BigInt::zero(); b + 1];
    out[0] = BigInt::one();
    for (n, o) in out.iter_mut().enumerate().skip(1) {
        *o = arith::sigma(n as i64, k - 1) * c;
    }
    out
}

/// Π η(M z)^{e} as a q-series (Σ M e ≡ 0 mod 24, e ≥ 0).
pub fn eta_product(factors: &[(i64, u32)], b: usize) -> Vec<BigInt> {
    let lead: i64 = factors.iter().map(|&(m, e)| m * e as i64).sum();
    assert_eq!(lead % 24, 0, "η-quotient must have integral q-order");
    let lead = (lead / 24) as usize;
    let mut prod = vec![BigInt::zero(); b + 1];
    if lead > b {
        return prod;
    }
    prod[0] = BigInt::one();
    let cap = b - lead;
    for &(m, e) in factors {
        for n in 1..=cap {
            let step = n * m as usize;
            if step > cap {
                break;
            }
            for _ in 0..e {
                for i in (step..=cap).rev() {
                    let t = prod[i - step].clone();
                    prod[i] -= t;
                }
            }
        }
    }
    let mut out = vec![BigInt::zero(); b + 1];
    for i in 0..=cap {
        out[i + lead] = prod[i].clone();
    }
    out
}

pub fn delta(b: usize) -> QExpansion {
    let mut f = QExpansion::from_ints(12, 1, &Basic::Delta.coeffs(b));
    f.real = Some(Realization::monomial(Basic::Delta, 1));
    f
}

pub fn e4(b: usize) -> QExpansion {
    let mut f = QExpansion::from_ints(4, 1, &eisenstein_int(4, b));
    f.real = Some(Realization::monomial(Basic::E4, 1));
    f
}

pub fn e6(b: usize) -> QExpansion {
    let mut f = QExpansion::from_ints(6, 1, &eisenstein_int(6, b));
    f.real = Some(Realization::monomial(Basic::E6, 1));
    f
}

/// Level-one cusp eigenform of weight k when dim S_k = 1: Δ E4^i E6^j.
pub fn level_one_eigenform(k: i64, b: usize) -> Option<QExpansion> {
    let r = k - 12;
    let (i, j) = match r {
        0 => (0, 0),
        4 => (1, 0),
        6 => (0, 1),
        8 => (2, 0),
        10 => (1, 1),
        14 => (2, 1),
        _ => return None,
    };
    let mut f = delta(b);
    for _ in 0..i {
        f = f.multiply(&e4(b));
    }
    for _ in 0..j {
        f = f.multiply(&e6(b));
    }
    Some(f)
}

/// The two normalized eigenforms spanning S_24(SL₂(Z)), exact over Q(√D).
pub fn weight24_eigenbasis(b: usize) -> [QExpansion; 2] {
    let b = b.max(4);
    let e43 = e4(b).multiply(&e4(b)).multiply(&e4(b));
    let b1 = delta(b).multiply(&e43);
    let b2 = delta(b).multiply(&delta(b));
    let r = |f: &QExpansion, n: usize| f.coef_rational(n).unwrap();
    // h = b1 + t b2; a_4(h) + 2^23 = a_2(h)² gives t² + Bt + C = 0
    let two23 = Q::from_integer(BigInt::from(2).pow(23));
    let bb = q(2) * r(&b1, 2) - r(&b2, 4);
    let cc = r(&b1, 2) * r(&b1, 2) - r(&b1, 4) - two23;
    let disc = &bb * &bb - q(4) * &cc;
    assert!(disc.is_integer());
    let dint = disc.to_integer().to_i64().unwrap();
    let mut sq = 1i64;
    let mut core = 1i64;
    for (p, e) in arith::factor(dint) {
        sq *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
    }
    let fld = NumField::new(1, Some(core));
    let s = fld.sqrt_d();
    let mk = |sign: i64| {
        // t = (−B ± sq √core)/2
        let t = fld.add(&fld.from_q(-bb.clone() / q(2)), &fld.scale(&s, &(q(sign * sq) / q(2))));
        let x = b1.rationals().unwrap();
        let y = b2.rationals().unwrap();
        let v: Vec<Nf> = x.iter().zip(&y).map(|(u, w)| fld.add(&fld.from_q(u.clone()), &fld.scale(&t, w))).collect();
        let tc = fld.to_complex(&t);
        let real = b1.real.as_ref().unwrap().add(&b2.real.as_ref().unwrap().scale(tc));
        QExpansion { weight: 24, level: 1, chi: DirChar::trivial(1), denom: 1, coeffs: Coeffs::Exact(fld.clone(), v), real: Some(real) }
    };
    [mk(1), mk(-1)]
}

/// The CM form Σ_𝔞 ψ(𝔞) q^{N𝔞} for ψ of infinity-type (m, 0).
pub fn cm_form(psi: &HeckeCharacter, b: usize) -> Result<QExpansion, QexpError> {
    cm_form_with(psi, b, Exec::Parallel)
}

pub fn cm_form_with(psi: &HeckeCharacter, b: usize, ex: Exec) -> Result<QExpansion, QexpError> {
    if psi.b != 0 || psi.a < 0 {
        return Err(QexpError::InfinityType(psi.weight()));
    }
    let k = psi.k;
    let m = psi.modulus();
    let level = k.d * psi.conductor().norm();
    let weight = psi.a + 1;
    let ft = psi.ft.clone();
    let chi = DirChar::from_fn(level, |n| {
        let kr = arith::kronecker(-k.d, n);
        let z = ft.eval(&k, crate::quadfield::Elem::int(n as i128))?;
        Some(if kr == -1 { z.mul(&Zeta::new(1, 2)) } else { z })
    });
    if psi.ext.is_some() {
        let v = ex.map_range(0, b + 1, |n| {
            if n == 0 {
                return Complex64::new(0.0, 0.0);
            }
            k.ideals_of_norm(n as i64).iter().filter(|id| k.coprime(id, &m)).map(|id| psi.eval_complex(id)).sum()
        });
        return Ok(QExpansion { weight, level, chi, denom: 1, coeffs: Coeffs::Complex(v), real: None });
    }
    let f = psi.value_field();
    let v = ex.map_range(0, b + 1, |n| {
        let mut acc = f.zero();
        if n > 0 {
            for id in k.ideals_of_norm(n as i64) {
                let val = psi.eval(&id);
                if !val.is_zero() {
                    acc = f.add(&acc, &val.to_nf(&k, &f).unwrap());
                }
            }
        }
        acc
    });
    Ok(QExpansion { weight, level, chi, denom: 1, coeffs: Coeffs::Exact(f, v), real: None })
}

/// Sum over ideals coprime to an extra ideal (used for stabilized CM forms).
pub fn cm_form_coprime(psi: &HeckeCharacter, avoid: &crate::quadfield::QuadIdeal, b: usize) -> Result<QExpansion, QexpError> {
    let mut g = cm_form(psi, 0)?;
    let k = psi.k;
    let m = k.mul_ideal(&psi.modulus(), avoid);
    let f = psi.value_field();
    let v = Exec::Parallel.map_range(0, b + 1, |n| {
        let mut acc = f.zero();
        if n > 0 {
            for id in k.ideals_of_norm(n as i64) {
                if k.coprime(&id, &m) {
                    acc = f.add(&acc, &psi.eval(&id).to_nf(&k, &f).unwrap());
                }
            }
        }
        acc
    });
    g.coeffs = Coeffs::Exact(f, v);
    Ok(g)
}

/// Parse the newform text format.
pub fn parse_newform(text: &str) -> Result<QExpansion, QexpError> {
    let mut weight = None;
    let mut level = None;
    let mut chi_label = String::from("trivial");
    let mut entries: Vec<(usize, Q, Q)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| QexpError::Parse { line: i + 1, msg: msg.into() };
        if let Some((k, v)) = line.split_once('=') {
            let v = v.trim();
            match k.trim() {
                "weight" => weight = Some(v.parse::<i64>().map_err(|_| err("bad weight"))?),
                "level" => level = Some(v.parse::<i64>().map_err(|_| err("bad level"))?),
                "character" => chi_label = v.to_string(),
                other => return Err(err(&format!("unknown header '{other}'"))),
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let n: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| err("bad index"))?;
        let lit: String = it.collect::<Vec<_>>().join("");
        let (re, im) = parse_gaussian(&lit).ok_or_else(|| err("bad coefficient"))?;
        entries.push((n, re, im));
    }
    let weight = weight.ok_or(QexpError::Parse { line: 0, msg: "missing weight".into() })?;
    let level = level.ok_or(QexpError::Parse { line: 0, msg: "missing level".into() })?;
    let chi = if chi_label == "trivial" {
        DirChar::trivial(level)
    } else if let Some(d) = chi_label.strip_prefix("kronecker:") {
        let d: i64 = d.trim().parse().map_err(|_| QexpError::Parse { line: 0, msg: "bad kronecker label".into() })?;
        DirChar::kronecker(d, level)
    } else {
        return Err(QexpError::Parse { line: 0, msg: format!("unknown character '{chi_label}'") });
    };
    let b = entries.iter().map(|e| e.0).max().unwrap_or(0);
    let gaussian = entries.iter().any(|e| !e.2.is_zero());
    let fld = if gaussian { NumField::new(4, None) } else { NumField::rational() };
    let i = if gaussian { fld.zeta(1) } else { fld.zero() };
    let mut v = vec![fld.zero(); b + 1];
    for (n, re, im) in entries {
        v[n] = fld.add(&fld.from_q(re), &fld.scale(&i, &im));
    }
    if b == 0 || v[1] != fld.one() {
        return Err(QexpError::LeadingCoefficient(if b == 0 { "missing".into() } else { fld.fmt(&v[1]) }));
    }
    let f = QExpansion { weight, level, chi, denom: 1, coeffs: Coeffs::Exact(fld, v), real: None };
    // eigenform spot check on small primes not dividing the level
    for p in [2i64, 3, 5, 7] {
        if level % p != 0 && (p as usize) * 2 <= b {
            f.check_eigen(p)?;
        }
    }
    Ok(f)
}

/// Built-in test forms, or a newform file.
pub fn builtin_or_load(source: &str, b: usize) -> Result<QExpansion, QexpError> {
    let f = match source {
        "delta" => delta(b),
        "delta_e4" | "weight16" => level_one_eigenform(16, b).unwrap(),
        "delta_e6" | "weight18" => level_one_eigenform(18, b).unwrap(),
        "delta_e4sq" | "weight20" => level_one_eigenform(20, b).unwrap(),
        "weight24a" => weight24_eigenbasis(b)[0].clone(),
        "weight24b" => weight24_eigenbasis(b)[1].clone(),
        "eta8_8" => with_fit(QExpansion::from_ints(8, 2, &eta_product(&[(1, 8), (2, 8)], b))),
        "eta2_12" => with_fit(QExpansion::from_ints(6, 4, &eta_product(&[(2, 12)], b))),
        path => {
            let text = std::fs::read_to_string(path).map_err(|_| QexpError::Unknown(path.to_string()))?;
            let f = parse_newform(&text)?;
            if f.bound() < b {
                return Err(QexpError::Truncation { need: b, have: f.bound() });
            }
            let f = f.truncate(b);
            match fit_realization(&f) {
                Ok(r) => QExpansion { real: Some(r), ..f },
                Err(_) => f,
            }
        }
    };
    Ok(f)
}

fn with_fit(f: QExpansion) -> QExpansion {
    let r = fit_realization(&f).expect("built-in forms are realizable");
    QExpansion { real: Some(r), ..f }
}

/// Weight-2 and higher pieces from which realizations are assembled.
#[derive(Clone, Debug)]
enum Piece {
    Phi(i64),
    Scaled(Basic, i64),
}

impl Piece {
    fn weight(&self) -> i64 {
        match self {
            Piece::Phi(_) => 2,
            Piece::Scaled(b, _) => b.weight(),
        }
    }
    fn realization(&self) -> Realization {
        match self {
            Piece::Phi(m) => Realization::monomial(Basic::E2s, 1).add(&Realization::monomial(Basic::E2s, *m).scale(Complex64::new(-(*m as f64), 0.0))),
            Piece::Scaled(b, m) => Realization::monomial(*b, *m),
        }
    }
    fn series(&self, b: usize) -> Vec<Q> {
        let sc = |v: Vec<BigInt>, m: i64| {
            let mut out = vec![Q::zero(); b + 1];
            for (j, c) in v.iter().enumerate() {
                if j * (m as usize) <= b {
                    out[j * m as usize] = bigq(c);
                }
            }
            out
        };
        match self {
            Piece::Phi(m) => {
                let e = Basic::E2s.coeffs(b);
                let a = sc(e.clone(), 1);
                let c = sc(e, *m);
                a.iter().zip(&c).map(|(x, y)| x - y * q(*m)).collect()
            }
            Piece::Scaled(bb, m) => sc(bb.coeffs(b), *m),
        }
    }
}

fn qmul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().min(b.len());
    (0..n).map(|i| (0..=i).map(|j| &a[j] * &b[i - j]).sum()).collect()
}

/// Express a rational q-expansion on Γ₀(N) through level-one blocks.
pub fn fit_realization(f: &QExpansion) -> Result<Realization, QexpError> {
    let target = f.rationals().ok_or(QexpError::NoRealization)?;
    let n = f.level;
    let divs = arith::divisors(n);
    let mut pieces: Vec<Piece> = divs.iter().filter(|&&m| m > 1).map(|&m| Piece::Phi(m)).collect();
    for &m in &divs {
        for bb in [Basic::E4, Basic::E6, Basic::Delta] {
            pieces.push(Piece::Scaled(bb, m));
        }
    }
    // multisets of pieces of total weight k
    let mut cands: Vec<Vec<usize>> = Vec::new();
    fn rec(pieces: &[Piece], start: usize, left: i64, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..pieces.len() {
            if pieces[i].weight() <= left {
                cur.push(i);
                rec(pieces, i, left - pieces[i].weight(), cur, out);
                cur.pop();
            }
        }
    }
    rec(&pieces, 0, f.weight, &mut vec![], &mut cands);
    let nb = f.bound().min(f.weight as usize * 4 + 40);
    let series: Vec<Vec<Q>> = cands
        .iter()
        .map(|c| c.iter().fold(None::<Vec<Q>>, |acc, &i| {
            let s = pieces[i].series(nb);
            Some(match acc {
                None => s,
                Some(a) => qmul(&a, &s),
            })
        }).unwrap())
        .collect();
    // solve Σ x_j series_j = target on the first nb coefficients
    let cols = series.len();
    let mut rows: Vec<Vec<Q>> = (0..=nb).map(|i| {
        let mut r: Vec<Q> = series.iter().map(|s| s[i].clone()).collect();
        r.push(target[i].clone());
        r
    }).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) {
            rows.swap(r, pr);
            let inv = Q::one() / rows[r][c].clone();
            for x in rows[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..rows.len() {
                if i != r && !rows[i][c].is_zero() {
                    let fct = rows[i][c].clone();
                    for j in 0..=cols {
                        let t = &rows[r][j] * &fct;
                        rows[i][j] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    if rows[r..].iter().any(|row| !row[cols].is_zero()) {
        return Err(QexpError::NoRealization);
    }
    let mut real = Realization::default();
    for (i, &c) in pivots.iter().enumerate() {
        let x = rows[i][cols].clone();
        if x.is_zero() {
            continue;
        }
        let prod = cands[c].iter().fold(None::<Realization>, |acc, &j| {
            let p = pieces[j].realization();
            Some(match acc {
                None => p,
                Some(a) => a.mul(&p),
            })
        }).unwrap();
        real = real.add(&prod.scale(Complex64::new(x.to_f64().unwrap(), 0.0)));
    }
    // check: agreement on the full bound (exact combination of series)
    let full = f.bound();
    let mut combo = vec![Q::zero(); full + 1];
    for (i, &c) in pivots.iter().enumerate() {
        let x = &rows[i][cols];
        if x.is_zero() {
            continue;
        }
        let s = cands[c].iter().fold(None::<Vec<Q>>, |acc, &j| {
            let s = pieces[j].series(full);
            Some(match acc {
                None => s,
                Some(a) => qmul(&a, &s),
            })
        }).unwrap();
        for (o, y) in combo.iter_mut().zip(s) {
            *o += x * y;
        }
    }
    if combo != target {
        return Err(QexpError::NoRealization);
    }
    Ok(real)
}

/// Largest |a_n| / n^{(k−1)/2} over 1 ≤ n ≤ B (a Ramanujan sanity number).
pub fn normalized_size(f: &QExpansion) -> f64 {
    (1..=f.bound()).map(|n| f.coef_complex(n).norm() / (n as f64).powf((f.weight - 1) as f64 / 2.0)).fold(0.0, f64::max)
}

pub fn rational_abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heckechar::{inert_character, FiniteType};
    use crate::quadfield::QuadField;

    #[test]
    fn delta_coefficients() {
        let d = delta(300);
        let t = |n: usize| d.coef_rational(n).unwrap();
        assert_eq!(t(1), q(1));
        assert_eq!(t(2), q(-24));
        assert_eq!(t(3), q(252));
        // independent: (E4³ − E6²)/1728
        let e = e4(300).multiply(&e4(300)).multiply(&e4(300)).sub(&e6(300).multiply(&e6(300)));
        for n in 0..=300 {
            assert_eq!(e.coef_rational(n).unwrap() / q(1728), t(n));
        }
    }

    #[test]
    fn hecke_on_delta() {
        let d = delta(300);
        let t2 = d.hecke_t(2).unwrap();
        assert_eq!(t2.bound(), 150);
        assert_eq!(t2.proportional_to(&d, &d.coef(2), 100), None);
        assert_eq!(d.hecke_t(1).unwrap(), QExpansion { real: None, ..d.clone() });
        // multiplicativity and prime-power recursion
        let t = |n: usize| d.coef_rational(n).unwrap();
        for m in 1..=17usize {
            for n in 1..=17usize {
                if arith::gcd(m as i64, n as i64) == 1 {
                    assert_eq!(t(m * n), t(m) * t(n));
                }
            }
        }
        for p in [2usize, 3, 5, 7] {
            let mut pr = p;
            while pr * p <= 300 {
                assert_eq!(t(pr * p), t(p) * t(pr) - Q::from_integer(BigInt::from(p).pow(11)) * t(pr / p));
                pr *= p;
            }
        }
        let r = d.hecke_roots(2).unwrap();
        assert!((r.alpha + r.beta - Complex64::new(-24.0, 0.0)).norm() < 1e-9);
        assert!((r.alpha * r.beta - Complex64::new(2048.0, 0.0)).norm() < 1e-9);
        assert!(r.alpha.im >= 0.0);
    }

    #[test]
    fn products_and_shifts() {
        let d = delta(20);
        let dd = d.multiply(&d);
        assert_eq!(dd.coef_rational(3).unwrap(), q(-48));
        assert_eq!(dd.weight, 24);
        assert_eq!(d.shift(1, 1), d);
        let d2 = d.shift(2, 1);
        assert_eq!(d2.coef_rational(4).unwrap(), q(-24));
        assert_eq!(d2.coef_rational(3).unwrap(), q(0));
        assert_eq!(d.rho_conjugate(), d);
    }

    #[test]
    fn weight24() {
        let [h1, h2] = weight24_eigenbasis(60);
        for h in [&h1, &h2] {
            h.check_eigen(2).unwrap();
            h.check_eigen(3).unwrap();
        }
        assert_eq!(h1.field().unwrap().quad, Some(144169));
        // a_2 = 540 ± 12√144169
        let a2 = h1.coef_complex(2).re;
        assert!((a2 - (540.0 + 12.0 * 144169f64.sqrt())).abs() < 1e-6);
    }

    #[test]
    fn realization_matches_series() {
        let z = Complex64::new(0.1, 1.1);
        let d = delta(60);
        assert!((d.eval(z) - d.real.as_ref().unwrap().eval(z)).norm() < 1e-12 * d.eval(z).norm());
        let f = builtin_or_load("eta8_8", 60).unwrap();
        let g = QExpansion { real: None, ..f.clone() };
        assert!((f.eval(z) - g.eval(z)).norm() < 1e-10 * g.eval(z).norm());
        assert_eq!(f.coef_rational(2).unwrap(), q(-8));
        let f = builtin_or_load("eta2_12", 60).unwrap();
        let g = QExpansion { real: None, ..f.clone() };
        assert!((f.eval(z) - g.eval(z)).norm() < 1e-10 * g.eval(z).norm());
        // modularity at a small height: Δ(−1/z) = z^12 Δ(z)
        let w = Complex64::new(0.3, 0.2);
        let lhs = basic_eval(Basic::Delta, -1.0 / w);
        let rhs = w.powi(12) * basic_eval(Basic::Delta, w);
        assert!((lhs - rhs).norm() < 1e-9 * rhs.norm());
    }

    #[test]
    fn cm_form_d3() {
        let k = QuadField::new(3).unwrap();
        let nu = inert_character(&k, 5, 8, 1).unwrap();
        let psi = HeckeCharacter::new(k, FiniteType::single(nu), 3, 0).unwrap();
        let g = cm_form(&psi, 120).unwrap();
        assert_eq!(g.level, 75);
        assert_eq!(g.weight, 4);
        assert_eq!(g.coef(1), Scalar::Exact(g.field().unwrap().one()));
        // inert q: a_q = 0
        assert!(g.field().unwrap().is_zero(match &g.coef(2) {
            Scalar::Exact(x) => x,
            _ => unreachable!(),
        }));
        for p in [7i64, 11, 13] {
            g.check_eigen(p).unwrap();
        }
        assert!(g.hecke_t(200).is_err());
    }

    #[test]
    fn newform_file_roundtrip() {
        let d = delta(20);
        let mut text = String::from("weight=12\nlevel=1\ncharacter=trivial\n");
        for n in 1..=20 {
            text += &format!("{} {}\n", n, d.coef_rational(n).unwrap());
        }
        let f = parse_newform(&text).unwrap();
        assert_eq!(f.coef_rational(11), d.coef_rational(11));
        let bad = text.replacen("1 1\n", "1 2\n", 1);
        assert!(matches!(parse_newform(&bad), Err(QexpError::LeadingCoefficient(_))));
        let bad = text.replacen("2 -24\n", "2 -23\n", 1);
        assert!(matches!(parse_newform(&bad), Err(QexpError::NotEigen { .. })));
        assert!(matches!(parse_newform("weight=x\n"), Err(QexpError::Parse { line: 1, .. })));
    }
}
