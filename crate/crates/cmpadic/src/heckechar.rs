//! Hecke characters of K in classical and p-adic guise.
//!
//! Classical convention: φ((β)) = φ_fin(β) β^a β̄^b for β coprime to the
//! modulus, (a, b) the infinity-type.

use crate::arith;
use crate::numfield::{Nf, NumField};
use crate::padic::{LambdaSeries, PadicScalar};
use crate::quadfield::{ClassGroup, Elem, QuadField, QuadIdeal, Splitting};
use num_complex::Complex64;
use std::collections::{HashMap, VecDeque};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharError {
    #[error("generators do not define a character: conflicting value at {0:?}")]
    Inconsistent(Elem),
    #[error("generators span {got} of {want} unit residues")]
    NotGenerating { got: usize, want: usize },
    #[error("unit condition fails at unit {0:?}")]
    UnitCondition(Elem),
    #[error("p = {0} is not split in K")]
    NotSplit(i64),
    #[error("p = {p} divides h_K = {h}")]
    DividesClassNumber { p: i64, h: usize },
    #[error("p = {0} divides 2d")]
    BadPrime(i64),
    #[error("class group is not cyclic (h = {0})")]
    NonCyclic(usize),
    #[error("branch {branch} invalid: only {valid} branches")]
    Branch { branch: i64, valid: i64 },
    #[error("value order {0} does not divide p − 1")]
    ValueOrder(i64),
    #[error("weight mismatch: expected {expected:?}, got {got:?}")]
    Weight { expected: (i64, i64), got: (i64, i64) },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("not algebraic: class values are only complex")]
    NotAlgebraic,
}

/// ζ_n^e.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zeta {
    pub e: i64,
    pub n: i64,
}

impl Zeta {
    pub fn new(e: i64, n: i64) -> Self {
        let g = arith::gcd(e.rem_euclid(n), n);
        let g = if g == 0 { n } else { g };
        Zeta { e: e.rem_euclid(n) / g, n: n / g }
    }
    pub fn one() -> Self {
        Zeta { e: 0, n: 1 }
    }
    pub fn mul(&self, o: &Zeta) -> Zeta {
        let n = arith::lcm(self.n, o.n);
        Zeta::new(self.e * (n / self.n) + o.e * (n / o.n), n)
    }
    pub fn pow(&self, k: i64) -> Zeta {
        Zeta::new(self.e * k, self.n)
    }
    pub fn inv(&self) -> Zeta {
        self.pow(-1)
    }
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.e as f64 / self.n as f64)
    }
}

/// Character of (O_K/𝔮^e)^× with values ζ_order^{table[x]}.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub modulus: QuadIdeal,
    pub order: i64,
    pub table: HashMap<Elem, i64>,
}

impl Component {
    /// Build by closure from generators g_i ↦ ζ_order^{e_i}.
    pub fn from_generators(k: &QuadField, modulus: QuadIdeal, gens: &[(Elem, i64)], order: i64) -> Result<Self, CharError> {
        let units = k.unit_residues(&modulus);
        let mut table: HashMap<Elem, i64> = HashMap::new();
        let one = k.residue(&modulus, Elem::ONE);
        table.insert(one, 0);
        let mut queue = VecDeque::from([one]);
        let gens: Vec<(Elem, i64)> = gens.iter().map(|&(g, e)| (k.residue(&modulus, g), e.rem_euclid(order))).collect();
        while let Some(x) = queue.pop_front() {
            let ex = table[&x];
            for &(g, e) in &gens {
                let y = k.mul_mod(&modulus, x, g);
                let ey = (ex + e) % order;
                match table.get(&y) {
                    Some(&old) if old != ey => return Err(CharError::Inconsistent(y)),
                    Some(_) => {}
                    None => {
                        table.insert(y, ey);
                        queue.push_back(y);
                    }
                }
            }
        }
        if table.len() != units.len() {
            return Err(CharError::NotGenerating { got: table.len(), want: units.len() });
        }
        Ok(Component { modulus, order, table })
    }

    pub fn from_fn(k: &QuadField, modulus: QuadIdeal, order: i64, f: impl Fn(Elem) -> i64) -> Self {
        let table = k.unit_residues(&modulus).into_iter().map(|u| (u, f(u).rem_euclid(order))).collect();
        Component { modulus, order, table }
    }

    /// ω_𝔭^e on residues mod a degree-one prime 𝔭 of norm p; ω_𝔭(g) = ζ_{p−1}.
    pub fn teichmuller(k: &QuadField, prime: QuadIdeal, p: i64, g: i64, e: i64) -> Self {
        let dlog: HashMap<i128, i64> = (0..p - 1).map(|j| (arith::powmod(g as i128, j as u128, p as i128), j)).collect();
        Component::from_fn(k, prime, p - 1, |u| dlog[&u.x] * e)
    }

    /// Smallest generator of the cyclic group (O/𝔪)^×, if cyclic.
    pub fn cyclic_generator(k: &QuadField, modulus: &QuadIdeal) -> Option<Elem> {
        let units = k.unit_residues(modulus);
        let n = units.len() as i64;
        let fs = arith::prime_divisors(n.max(1));
        let one = k.residue(modulus, Elem::ONE);
        let pw = |mut x: Elem, mut e: i64| {
            let mut r = one;
            while e > 0 {
                if e & 1 == 1 {
                    r = k.mul_mod(modulus, r, x);
                }
                x = k.mul_mod(modulus, x, x);
                e >>= 1;
            }
            r
        };
        units.into_iter().find(|&u| fs.iter().all(|&q| pw(u, n / q) != one))
    }

    pub fn eval(&self, k: &QuadField, u: Elem) -> Option<Zeta> {
        self.table.get(&k.residue(&self.modulus, u)).map(|&e| Zeta::new(e, self.order))
    }
    pub fn pow(&self, e: i64) -> Self {
        Component {
            modulus: self.modulus,
            order: self.order,
            table: self.table.iter().map(|(&u, &x)| (u, (x * e).rem_euclid(self.order))).collect(),
        }
    }
    pub fn is_trivial(&self) -> bool {
        self.table.values().all(|&e| e == 0)
    }
    /// Smallest divisor 𝔣 | modulus with the character trivial on 1 + 𝔣.
    pub fn conductor(&self, k: &QuadField) -> QuadIdeal {
        let fac = k.factor_ideal(&self.modulus);
        let mut best = self.modulus;
        // all divisors of the modulus
        let mut divs = vec![QuadIdeal::unit()];
        for (pr, e) in &fac {
            let cur = divs.clone();
            for j in 1..=*e {
                let pj = k.pow_ideal(pr, j);
                divs.extend(cur.iter().map(|d| k.mul_ideal(d, &pj)));
            }
        }
        divs.sort_by_key(|d| d.norm());
        for f in divs {
            let ok = self.table.iter().all(|(&u, &e)| {
                let diff = Elem::new(u.x - 1, u.y);
                !(diff == Elem::new(0, 0) || k.contains(&f, diff)) || e == 0
            });
            if ok {
                best = f;
                break;
            }
        }
        best
    }
    /// Same character, read on a multiple of the modulus.
    pub fn lift(&self, k: &QuadField, bigger: QuadIdeal) -> Self {
        Component::from_fn(k, bigger, self.order, |u| {
            self.eval(k, u).map(|z| z.e * (self.order / z.n)).expect("unit stays unit")
        })
    }
}

/// Product of prime-power components.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FiniteType {
    pub comps: Vec<Component>,
}

fn prime_support(k: &QuadField, m: &QuadIdeal) -> Vec<QuadIdeal> {
    k.factor_ideal(m).into_iter().map(|(p, _)| p).collect()
}

impl FiniteType {
    pub fn trivial() -> Self {
        FiniteType { comps: vec![] }
    }
    pub fn single(c: Component) -> Self {
        FiniteType { comps: vec![c] }
    }
    pub fn eval(&self, k: &QuadField, u: Elem) -> Option<Zeta> {
        let mut z = Zeta::one();
        for c in &self.comps {
            z = z.mul(&c.eval(k, u)?);
        }
        Some(z)
    }
    pub fn modulus(&self, k: &QuadField) -> QuadIdeal {
        self.comps.iter().fold(QuadIdeal::unit(), |acc, c| k.mul_ideal(&acc, &c.modulus))
    }
    pub fn conductor(&self, k: &QuadField) -> QuadIdeal {
        self.comps.iter().fold(QuadIdeal::unit(), |acc, c| k.mul_ideal(&acc, &c.conductor(k)))
    }
    pub fn mul(&self, k: &QuadField, o: &FiniteType) -> FiniteType {
        let mut comps = self.comps.clone();
        for c in &o.comps {
            let sup = prime_support(k, &c.modulus);
            if let Some(pos) = comps.iter().position(|d| prime_support(k, &d.modulus) == sup) {
                let d = &comps[pos];
                let big = if d.modulus.norm() >= c.modulus.norm() { d.modulus } else { c.modulus };
                let order = arith::lcm(d.order, c.order);
                let (dd, cc) = (d.clone(), c.clone());
                comps[pos] = Component::from_fn(k, big, order, |u| {
                    let z = dd.eval(k, u).unwrap().mul(&cc.eval(k, u).unwrap());
                    z.e * (order / z.n)
                });
            } else {
                comps.push(c.clone());
            }
        }
        comps.retain(|c| !c.is_trivial());
        FiniteType { comps }
    }
    pub fn pow(&self, e: i64) -> FiniteType {
        let mut comps: Vec<Component> = self.comps.iter().map(|c| c.pow(e)).collect();
        comps.retain(|c| !c.is_trivial());
        FiniteType { comps }
    }
    /// φ_fin(β̄), on conjugate moduli.
    pub fn conj_c(&self, k: &QuadField) -> FiniteType {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let m = k.conj_ideal(&c.modulus);
                Component::from_fn(k, m, c.order, |u| c.table[&k.residue(&c.modulus, k.conj(u))])
            })
            .collect();
        FiniteType { comps }
    }
    /// Lcm of value orders.
    pub fn value_order(&self) -> i64 {
        self.comps.iter().fold(1, |acc, c| {
            let o = c.table.values().fold(c.order, |g, &e| arith::gcd(g, e));
            arith::lcm(acc, c.order / o.max(1))
        })
    }
}

/// A character value: ζ · β^a β̄^b, possibly with a complex class factor.
#[derive(Clone, Debug, PartialEq)]
pub enum CharValue {
    Zero,
    Val { z: Zeta, beta: Elem, a: i64, b: i64, class: Option<Complex64> },
}

impl CharValue {
    pub fn is_zero(&self) -> bool {
        matches!(self, CharValue::Zero)
    }
    pub fn to_complex(&self, k: &QuadField) -> Complex64 {
        match self {
            CharValue::Zero => Complex64::new(0.0, 0.0),
            CharValue::Val { z, beta, a, b, class } => {
                let bc = k.to_complex(*beta);
                z.to_complex() * bc.powi(*a as i32) * bc.conj().powi(*b as i32) * class.unwrap_or(Complex64::new(1.0, 0.0))
            }
        }
    }
    /// Exact value in a number field containing ζ and √−d.
    pub fn to_nf(&self, k: &QuadField, f: &NumField) -> Result<Nf, CharError> {
        match self {
            CharValue::Zero => Ok(f.zero()),
            CharValue::Val { class: Some(_), .. } => Err(CharError::NotAlgebraic),
            CharValue::Val { z, beta, a, b, class: None } => {
                let bt = f.from_elem(k, *beta);
                let bb = f.from_elem(k, k.conj(*beta));
                let nb = k.norm(*beta);
                let pw = |x: &Nf, xc: &Nf, e: i64| -> Nf {
                    if e >= 0 {
                        f.pow(x, e as u32)
                    } else {
                        let num = f.pow(xc, (-e) as u32);
                        let den = num_rational::BigRational::from_integer(num_bigint::BigInt::from(nb).pow((-e) as u32));
                        f.scale(&num, &(num_rational::BigRational::from_integer(1.into()) / den))
                    }
                };
                let v = f.mul(&pw(&bt, &bb, *a), &pw(&bb, &bt, *b));
                Ok(f.mul(&f.root_of_unity(z.e, z.n as u32), &v))
            }
        }
    }
}

/// Class-group extension data for h > 1 (complex values on representatives).
#[derive(Clone, Debug)]
pub struct ClassExt {
    pub cg: ClassGroup,
    pub reps: Vec<QuadIdeal>,
    pub values: Vec<Complex64>,
    pub branch: i64,
}

#[derive(Clone, Debug)]
pub struct HeckeCharacter {
    pub k: QuadField,
    pub ft: FiniteType,
    pub a: i64,
    pub b: i64,
    pub ext: Option<ClassExt>,
}

impl HeckeCharacter {
    /// Character with given finite type and infinity-type; h_K = 1 only
    /// (use `with_branch` otherwise).
    pub fn new(k: QuadField, ft: FiniteType, a: i64, b: i64) -> Result<Self, CharError> {
        let ch = HeckeCharacter { k, ft, a, b, ext: None };
        ch.check_units()?;
        Ok(ch)
    }

    pub fn trivial(k: QuadField) -> Self {
        HeckeCharacter { k, ft: FiniteType::trivial(), a: 0, b: 0, ext: None }
    }
    pub fn norm(k: QuadField) -> Self {
        HeckeCharacter { k, ft: FiniteType::trivial(), a: 1, b: 1, ext: None }
    }

    /// φ_fin(u) u^a ū^b = 1 on O_K^×.
    pub fn check_units(&self) -> Result<(), CharError> {
        let k = &self.k;
        let w = k.w();
        for (j, u) in k.units().into_iter().enumerate() {
            // u = ζ_w^j (for w = 2: ±1)
            let j = if w == 2 { j as i64 } else { j as i64 };
            let inf = Zeta::new(j * (self.a - self.b), w);
            let fin = match self.ft.eval(k, u) {
                Some(z) => z,
                None => continue,
            };
            if fin.mul(&inf) != Zeta::one() {
                return Err(CharError::UnitCondition(u));
            }
        }
        Ok(())
    }

    /// Extend to h > 1 through the h-th root on a generator class; `branch`
    /// selects among the h roots.
    pub fn with_branch(mut self, branch: i64) -> Result<Self, CharError> {
        let cg = self.k.class_group();
        if cg.h == 1 {
            if branch != 0 {
                return Err(CharError::Branch { branch, valid: 1 });
            }
            return Ok(self);
        }
        let gen = cg.cyclic_generator().ok_or(CharError::NonCyclic(cg.h))?;
        let m = self.ft.modulus(&self.k).norm();
        let reps = cg.reps_coprime_to(m * self.k.d);
        let h = cg.h as i64;
        let r1 = reps[gen];
        let k = self.k;
        let pvals = |id: &QuadIdeal, me: &HeckeCharacter| -> Complex64 {
            let g = k.principal_generator(id).expect("principal");
            me.principal_value(g).to_complex(&k)
        };
        let big = k.pow_ideal(&r1, h as u32);
        let v = pvals(&big, &self);
        let root = Complex64::from_polar(v.norm().powf(1.0 / h as f64), (v.arg() + 2.0 * std::f64::consts::PI * branch as f64) / h as f64);
        let n1 = Complex64::new(r1.norm() as f64, 0.0).powi((self.a + self.b) as i32) * self.ft.eval(&k, Elem::int(r1.norm() as i128)).unwrap().to_complex();
        let mut values = vec![Complex64::new(0.0, 0.0); cg.h];
        let mut cls = cg.identity;
        let mut pw = Complex64::new(1.0, 0.0);
        let mut npw = Complex64::new(1.0, 0.0);
        let mut rj = QuadIdeal::unit();
        for _ in 0..h {
            // 𝔯_c · conj(𝔯_1)^j = (γ_c)
            let rc = reps[cls];
            let prod = k.mul_ideal(&rc, &k.conj_ideal(&rj));
            let gamma = pvals(&prod, &self);
            values[cls] = gamma * pw / npw;
            pw *= root;
            npw *= n1;
            rj = k.mul_ideal(&rj, &r1);
            cls = cg.table[cls][gen];
        }
        self.ext = Some(ClassExt { cg, reps, values, branch });
        Ok(self)
    }

    pub fn weight(&self) -> (i64, i64) {
        (self.a, self.b)
    }
    pub fn modulus(&self) -> QuadIdeal {
        self.ft.modulus(&self.k)
    }
    pub fn conductor(&self) -> QuadIdeal {
        self.ft.conductor(&self.k)
    }

    fn principal_value(&self, beta: Elem) -> CharValue {
        match self.ft.eval(&self.k, beta) {
            None => CharValue::Zero,
            Some(z) => CharValue::Val { z, beta, a: self.a, b: self.b, class: None },
        }
    }

    /// Value on an integral ideal; zero when not coprime to the modulus.
    pub fn eval(&self, id: &QuadIdeal) -> CharValue {
        let k = &self.k;
        if !k.coprime(id, &self.modulus()) {
            return CharValue::Zero;
        }
        match &self.ext {
            None => {
                let g = k.principal_generator(id).expect("h_K = 1 requires principal ideals; use with_branch");
                self.principal_value(g)
            }
            Some(ext) => {
                let c = ext.cg.dlog(id);
                let r = ext.reps[c];
                let prod = k.mul_ideal(id, &k.conj_ideal(&r));
                let g = k.principal_generator(&prod).unwrap();
                let nr = r.norm();
                let nval = self.principal_value(Elem::int(nr as i128)).to_complex(k);
                match self.principal_value(g) {
                    CharValue::Zero => CharValue::Zero,
                    CharValue::Val { z, beta, a, b, .. } => CharValue::Val { z, beta, a, b, class: Some(ext.values[c] / nval) },
                }
            }
        }
    }
    pub fn eval_complex(&self, id: &QuadIdeal) -> Complex64 {
        self.eval(id).to_complex(&self.k)
    }

    pub fn mul(&self, o: &HeckeCharacter) -> HeckeCharacter {
        let ft = self.ft.mul(&self.k, &o.ft);
        let mut out = HeckeCharacter { k: self.k, ft, a: self.a + o.a, b: self.b + o.b, ext: None };
        if self.ext.is_some() || o.ext.is_some() {
            out.ext = self.product_ext(o, &out);
        }
        out
    }
    fn product_ext(&self, o: &HeckeCharacter, out: &HeckeCharacter) -> Option<ClassExt> {
        let base = self.ext.as_ref().or(o.ext.as_ref())?.clone();
        let cg = base.cg.clone();
        let m = out.modulus().norm();
        let reps = cg.reps_coprime_to(m * self.k.d);
        let values = reps.iter().map(|r| self.eval_complex(r) * o.eval_complex(r)).collect();
        Some(ClassExt { cg, reps, values, branch: base.branch })
    }
    pub fn pow(&self, e: i64) -> HeckeCharacter {
        let mut out = HeckeCharacter { k: self.k, ft: self.ft.pow(e), a: self.a * e, b: self.b * e, ext: None };
        if let Some(ext) = &self.ext {
            let values = ext.reps.iter().map(|r| self.eval_complex(r).powi(e as i32)).collect();
            out.ext = Some(ClassExt { values, ..ext.clone() });
        }
        out
    }
    pub fn inv(&self) -> HeckeCharacter {
        self.pow(-1)
    }
    /// φ^c(𝔞) = φ(𝔞̄).
    pub fn conj_c(&self) -> HeckeCharacter {
        let mut out = HeckeCharacter { k: self.k, ft: self.ft.conj_c(&self.k), a: self.b, b: self.a, ext: None };
        if let Some(ext) = &self.ext {
            let values = ext.reps.iter().map(|r| self.eval_complex(&self.k.conj_ideal(r))).collect();
            out.ext = Some(ClassExt { values, ..ext.clone() });
        }
        out
    }
    /// φ^ρ(𝔞) = conj(φ(𝔞)).
    pub fn conj_rho(&self) -> HeckeCharacter {
        let mut out = HeckeCharacter { k: self.k, ft: self.ft.pow(-1), a: self.b, b: self.a, ext: None };
        if let Some(ext) = &self.ext {
            let values = ext.reps.iter().map(|r| self.eval_complex(r).conj()).collect();
            out.ext = Some(ClassExt { values, ..ext.clone() });
        }
        out
    }
    pub fn value_order(&self) -> i64 {
        self.ft.value_order()
    }
    /// Smallest cyclotomic order holding all values, together with √−d.
    pub fn value_field(&self) -> Arc<NumField> {
        NumField::new(self.value_order().max(1) as u32, Some(-self.k.d))
    }
}

/// The embedding ι_p and the prime 𝔭 it singles out.
#[derive(Clone, Debug)]
pub struct PadicCtx {
    pub k: QuadField,
    pub p: i64,
    pub prec: u32,
    /// 𝔭 = ker ι_p ∩ O_K.
    pub frak_p: QuadIdeal,
    pub frak_pbar: QuadIdeal,
    /// ι_p(√−d).
    pub s: PadicScalar,
    /// primitive root g mod p, ι_p(ζ_{p−1}) = ω(g).
    pub g: i64,
    pub zeta: PadicScalar,
    pub h: usize,
    cg: ClassGroup,
}

impl PadicCtx {
    pub fn new(k: QuadField, p: i64, prec: u32) -> Result<Self, CharError> {
        if p == 2 || k.d % p == 0 {
            return Err(CharError::BadPrime(p));
        }
        let (pp, pb) = match k.factor_rational_prime(p).map_err(|_| CharError::NotSplit(p))? {
            Splitting::Split(a, b) => (a, b),
            _ => return Err(CharError::NotSplit(p)),
        };
        let cg = k.class_group();
        if cg.h as i64 % p == 0 {
            return Err(CharError::DividesClassNumber { p, h: cg.h });
        }
        // ι_p(ω) ≡ −b_𝔭 mod p, i.e. (1+s)/2 ≡ −b.
        let r0 = arith::sqrt_mod_prime(-k.d, p).unwrap() as i128;
        let mut r = arith::hensel_sqrt(-k.d as i128, r0, p as i128, prec);
        let pm = (p as i128).pow(prec);
        let want = (-2 * pp.b as i128 - 1).rem_euclid(p as i128);
        if r.rem_euclid(p as i128) != want {
            r = (pm - r) % pm;
        }
        let s = PadicScalar::from_int(p as u64, r, prec as i32);
        let g = arith::primitive_root(p);
        let zeta = PadicScalar::from_int(p as u64, g as i128, prec as i32).teichmuller();
        Ok(PadicCtx { k, p, prec, frak_p: pp, frak_pbar: pb, s, g, zeta, h: cg.h, cg })
    }
    pub fn pu(&self) -> u64 {
        self.p as u64
    }
    pub fn int(&self, n: i128) -> PadicScalar {
        PadicScalar::from_int(self.pu(), n, self.prec as i32)
    }
    pub fn one(&self) -> PadicScalar {
        self.int(1)
    }
    pub fn iota(&self, u: Elem) -> PadicScalar {
        // x + y(1+s)/2
        let half = self.int(2).inv();
        let om = self.one().add(&self.s).mul(&half);
        self.int(u.x).add(&self.int(u.y).mul(&om))
    }
    pub fn iota_zeta(&self, z: &Zeta) -> Result<PadicScalar, CharError> {
        if (self.p - 1) % z.n != 0 {
            return Err(CharError::ValueOrder(z.n));
        }
        Ok(self.zeta.pow(z.e * (self.p - 1) / z.n))
    }
    /// ι_p on Q(ζ_n)(√−d), n | p − 1.
    pub fn iota_nf(&self, f: &NumField, x: &Nf) -> Result<PadicScalar, CharError> {
        if (self.p - 1) % f.n as i64 != 0 {
            return Err(CharError::ValueOrder(f.n as i64));
        }
        if let Some(d) = f.quad {
            assert_eq!(d, -self.k.d, "embedding needs √−d");
        }
        // evaluate with exact rationals coefficientwise
        let z = self.zeta.pow((self.p - 1) / f.n as i64);
        let dc = f.dc();
        let mut acc = PadicScalar::zero(self.pu(), self.prec as i32);
        for (idx, c) in x.0.iter().enumerate() {
            if num_traits::Zero::is_zero(c) {
                continue;
            }
            let (i, j) = (idx % dc, idx / dc);
            let mut t = PadicScalar::from_rational(self.pu(), c, self.prec).mul(&z.pow(i as i64));
            if j == 1 {
                t = t.mul(&self.s);
            }
            acc = acc.add(&t);
        }
        Ok(acc.truncate(self.prec as i32))
    }
    pub fn ord_p(&self, id: &QuadIdeal) -> u32 {
        self.k.ord(id, &self.frak_p)
    }
    pub fn ord_pbar(&self, id: &QuadIdeal) -> u32 {
        self.k.ord(id, &self.frak_pbar)
    }
    /// ω_𝔭^e as a finite-type component.
    pub fn omega_comp(&self, e: i64) -> Component {
        Component::teichmuller(&self.k, self.frak_p, self.p, self.g, e)
    }
    /// ω_𝔭̄^e: x ↦ ω(ι_p(x̄)).
    pub fn omega_bar_comp(&self, e: i64) -> Component {
        Component::teichmuller(&self.k, self.frak_pbar, self.p, self.g, e)
    }

    /// ι_p of a classical value.
    pub fn iota_value(&self, v: &CharValue) -> Result<PadicScalar, CharError> {
        match v {
            CharValue::Zero => Ok(PadicScalar::zero(self.pu(), self.prec as i32)),
            CharValue::Val { class: Some(_), .. } => Err(CharError::NotAlgebraic),
            CharValue::Val { z, beta, a, b, class: None } => {
                let zb = self.iota_zeta(z)?;
                let ib = self.iota(*beta);
                let ibb = self.iota(self.k.conj(*beta));
                let mut v = zb;
                if *a != 0 {
                    v = v.mul(&ib.pow(*a));
                }
                if *b != 0 {
                    v = v.mul(&ibb.pow(*b));
                }
                Ok(v)
            }
        }
    }
    /// p-adic avatar: ι_p(φ_C(𝔞)) p^{−a·ord_𝔭 − b·ord_𝔭̄}.
    pub fn avatar(&self, ch: &HeckeCharacter, id: &QuadIdeal) -> Result<PadicScalar, CharError> {
        let v = self.iota_value(&ch.eval(id))?;
        let sh = ch.a * self.ord_p(id) as i64 + ch.b * self.ord_pbar(id) as i64;
        Ok(v.shift(-(sh as i32)))
    }
    /// Inverse of `avatar`.
    pub fn from_avatar(&self, ch: &HeckeCharacter, id: &QuadIdeal, v: &PadicScalar) -> PadicScalar {
        let sh = ch.a * self.ord_p(id) as i64 + ch.b * self.ord_pbar(id) as i64;
        v.shift(sh as i32)
    }

    /// α(𝔞) ∈ 1 + pZ_p: α((β)) = u/ω(u), u = ι_p(β)/p^{ord_𝔭 β}; for h > 1
    /// the unique h-th root in 1 + pZ_p of α(𝔞^h).
    pub fn alpha(&self, id: &QuadIdeal) -> PadicScalar {
        let k = &self.k;
        let (pid, h) = if self.h == 1 { (*id, 1) } else { (k.pow_ideal(id, self.h as u32), self.h as i64) };
        let beta = k.principal_generator(&pid).expect("principal");
        let v = self.ord_p(&pid) as i32;
        let u = self.iota(beta).shift(-v);
        let one_unit = u.one_unit_part();
        if h == 1 {
            return one_unit;
        }
        // h-th root: exponent h⁻¹ mod p^{prec−1}
        let md = (self.p as i128).pow(self.prec - 1);
        let hinv = arith::invmod(h as i128, md).unwrap();
        one_unit.pow(hinv as i64)
    }
    pub fn alpha_c(&self, id: &QuadIdeal) -> PadicScalar {
        self.alpha(&self.k.conj_ideal(id))
    }
    /// α_C(𝔞) = α(𝔞) p^{ord_𝔭 𝔞} (uniformizer p).
    pub fn alpha_classical_padic(&self, id: &QuadIdeal) -> PadicScalar {
        self.alpha(id).shift(self.ord_p(id) as i32)
    }
    /// (ω∘N)(𝔞) = ω(N𝔞 / p^{v_p(N𝔞)}).
    pub fn omega_norm(&self, id: &QuadIdeal) -> PadicScalar {
        let n = id.norm() as i128;
        let v = arith::val_i128(n, self.p as i128);
        self.int(n / (self.p as i128).pow(v)).teichmuller()
    }
    /// p-adic avatar of the norm character.
    pub fn norm_p(&self, id: &QuadIdeal) -> PadicScalar {
        let n = id.norm() as i128;
        let v = arith::val_i128(n, self.p as i128);
        self.int(n / (self.p as i128).pow(v))
    }
    /// α^ρ = (ω∘N)·α^c.
    pub fn alpha_rho(&self, id: &QuadIdeal) -> PadicScalar {
        self.omega_norm(id).mul(&self.alpha_c(id))
    }

    /// Classical α: finite type ω_𝔭⁻¹, weight (1,0) (h = 1).
    pub fn alpha_character(&self) -> HeckeCharacter {
        HeckeCharacter { k: self.k, ft: FiniteType::single(self.omega_comp(-1)), a: 1, b: 0, ext: None }
    }
    pub fn alpha_c_character(&self) -> HeckeCharacter {
        self.alpha_character().conj_c()
    }
    pub fn alpha_rho_character(&self) -> HeckeCharacter {
        self.alpha_character().conj_rho()
    }
    pub fn omega_norm_character(&self) -> HeckeCharacter {
        HeckeCharacter {
            k: self.k,
            ft: FiniteType::single(self.omega_comp(1)).mul(&self.k, &FiniteType::single(self.omega_bar_comp(1))),
            a: 0,
            b: 0,
            ext: None,
        }
    }
    pub fn class_group(&self) -> &ClassGroup {
        &self.cg
    }
}

/// Checked construction of α: p odd, split, p ∤ 2d h_K; only branch 0 exists.
pub fn build_alpha(k: QuadField, p: i64, branch: i64, prec: u32) -> Result<PadicCtx, CharError> {
    let ctx = PadicCtx::new(k, p, prec)?;
    if branch != 0 {
        return Err(CharError::Branch { branch, valid: 1 });
    }
    Ok(ctx)
}

/// Θ = θ₀ · α^i (α^c)^j (ω∘N)^l N^n · 𝒜^s (𝒜^c)^t.
#[derive(Clone, Debug)]
pub struct CharacterFamily {
    pub base: HeckeCharacter,
    pub i: i64,
    pub j: i64,
    pub l: i64,
    pub n: i64,
    pub s: i64,
    pub t: i64,
    /// residue class of clean specializations mod p − 1
    pub a: i64,
}

impl CharacterFamily {
    /// Classical character P_m(Θ).
    pub fn specialize(&self, ctx: &PadicCtx, m: i64) -> HeckeCharacter {
        let mut ch = self.base.clone();
        let ea = self.i + self.s * m;
        let ec = self.j + self.t * m;
        if ea != 0 {
            ch = ch.mul(&ctx.alpha_character().pow(ea));
        }
        if ec != 0 {
            ch = ch.mul(&ctx.alpha_c_character().pow(ec));
        }
        if self.l != 0 {
            ch = ch.mul(&ctx.omega_norm_character().pow(self.l));
        }
        if self.n != 0 {
            ch = ch.mul(&HeckeCharacter::norm(self.base.k).pow(self.n));
        }
        ch
    }
    /// p-adic value of the scalar part θ₀ α^i (α^c)^j (ω∘N)^l N^n.
    pub fn scalar_part(&self, ctx: &PadicCtx, id: &QuadIdeal) -> Result<PadicScalar, CharError> {
        let mut v = ctx.avatar(&self.base, id)?;
        v = v.mul(&ctx.alpha(id).pow(self.i)).mul(&ctx.alpha_c(id).pow(self.j));
        v = v.mul(&ctx.omega_norm(id).pow(self.l)).mul(&ctx.norm_p(id).pow(self.n));
        Ok(v)
    }
    /// Λ-value Θ(𝔞).
    pub fn eval_lambda(&self, ctx: &PadicCtx, id: &QuadIdeal, m: u32, d: usize) -> Result<LambdaSeries, CharError> {
        let sc = self.scalar_part(ctx, id)?;
        let p = ctx.pu();
        let mut out = LambdaSeries::constant(p, m, d, &sc.truncate(m as i32));
        if self.s != 0 {
            let u = ctx.alpha(id).pow(self.s);
            out = out.mul(&crate::padic::one_unit_to_lambda(&u, m, d).map_err(|e| CharError::Hypothesis(e.to_string()))?);
        }
        if self.t != 0 {
            let u = ctx.alpha_c(id).pow(self.t);
            out = out.mul(&crate::padic::one_unit_to_lambda(&u, m, d).map_err(|e| CharError::Hypothesis(e.to_string()))?);
        }
        Ok(out)
    }
    /// p-adic value of P_m(Θ)(𝔞) without passing through Λ.
    pub fn specialize_padic(&self, ctx: &PadicCtx, id: &QuadIdeal, m: i64) -> Result<PadicScalar, CharError> {
        let sc = self.scalar_part(ctx, id)?;
        Ok(sc.mul(&ctx.alpha(id).pow(self.s * m)).mul(&ctx.alpha_c(id).pow(self.t * m)))
    }
    pub fn weight_at(&self, m: i64) -> (i64, i64) {
        (self.base.a + self.i + self.s * m + self.n, self.base.b + self.j + self.t * m + self.n)
    }
}

/// Ξ = ξ_a α^{−a} (α^c)^a 𝒜 (𝒜^c)⁻¹ for ξ_a of weight (a−1, −a+k+1).
pub fn build_xi_family(xi_a: &HeckeCharacter, a: i64, k: i64) -> Result<CharacterFamily, CharError> {
    if xi_a.weight() != (a - 1, -a + k + 1) {
        return Err(CharError::Weight { expected: (a - 1, -a + k + 1), got: xi_a.weight() });
    }
    Ok(CharacterFamily { base: xi_a.clone(), i: -a, j: a, l: 0, n: 0, s: 1, t: -1, a })
}

/// Ψ = ψ α⁻¹ 𝒜 for a finite-order ψ: P_m(Ψ) = ψ α^{m−1}.
pub fn build_cm_family(psi: &HeckeCharacter, a: i64) -> CharacterFamily {
    CharacterFamily { base: psi.clone(), i: -1, j: 0, l: 0, n: 0, s: 1, t: 0, a }
}

/// Ψ^ρ = ψ^ρ (α^ρ)^{a−1} (α^c)^{−a} 𝒜^c: P_m(Ψ^ρ) = ψ^ρ (α^ρ)^{a−1} (α^c)^{m−a}.
/// The finite parts at 𝔭 cancel inside the base, so it is built as one character.
pub fn build_cm_family_rho(ctx: &PadicCtx, psi: &HeckeCharacter, a: i64) -> CharacterFamily {
    let base = psi.conj_rho().mul(&ctx.alpha_rho_character().pow(a - 1));
    CharacterFamily { base, i: 0, j: -a, l: 0, n: 0, s: 0, t: 1, a }
}

/// The characters φ, ψ, η of the auxiliary construction.
#[derive(Clone, Debug)]
pub struct PhiPsi {
    pub phi: HeckeCharacter,
    pub psi: HeckeCharacter,
    pub eta: HeckeCharacter,
    pub a: i64,
    pub k: i64,
}

/// Inert-prime character ν on (O/λ)^× with ν(γ) = ζ_order^{e}, γ the
/// smallest generator.
pub fn inert_character(k: &QuadField, lambda: i64, order: i64, e: i64) -> Result<Component, CharError> {
    let m = k.int_ideal(lambda);
    let gen = Component::cyclic_generator(k, &m).ok_or_else(|| CharError::Hypothesis("(O/λ)^× not cyclic".into()))?;
    Component::from_generators(k, m, &[(gen, e)], order)
}

pub fn build_phi_psi(
    ctx: &PadicCtx,
    xi_a: &HeckeCharacter,
    a: i64,
    k: i64,
    lambda: i64,
    c_lambda: u32,
    nu: &Component,
    level_n: i64,
) -> Result<PhiPsi, CharError> {
    let kf = ctx.k;
    let p = ctx.p;
    if ctx.h != 1 {
        return Err(CharError::Hypothesis("construction implemented for h_K = 1".into()));
    }
    if xi_a.weight() != (a - 1, -a + k + 1) {
        return Err(CharError::Weight { expected: (a - 1, -a + k + 1), got: xi_a.weight() });
    }
    let cond = xi_a.conductor();
    let c = cond.g;
    if !(cond.a == 1 && cond.b == 0) {
        return Err(CharError::Hypothesis("conductor of ξ_a is not (c) with c ∈ Z".into()));
    }
    if arith::gcd(c, p * kf.d * level_n) != 1 {
        return Err(CharError::Hypothesis("c coprime to p, d, N".into()));
    }
    if arith::gcd(kf.d, level_n) != 1 {
        return Err(CharError::Hypothesis("d coprime to N".into()));
    }
    if !arith::is_prime(lambda) || (2 * p * c * kf.d * level_n) % lambda == 0 {
        return Err(CharError::Hypothesis("λ prime not dividing 2pcdN".into()));
    }
    if !matches!(kf.factor_rational_prime(lambda).unwrap(), Splitting::Inert(_)) {
        return Err(CharError::Hypothesis("λ inert in K".into()));
    }
    let lam_m = kf.int_ideal(lambda.pow(c_lambda));
    if nu.modulus != lam_m {
        return Err(CharError::Hypothesis("ν is a character mod λ^{c_λ}".into()));
    }
    let nu_ft = FiniteType::single(nu.clone());
    if nu.conductor(&kf) != lam_m {
        return Err(CharError::Hypothesis("ν has conductor λ^{c_λ}".into()));
    }
    for x in 1..lambda.pow(c_lambda) {
        if x % lambda != 0 && nu.eval(&kf, Elem::int(x as i128)) != Some(Zeta::one()) {
            return Err(CharError::Hypothesis("ν trivial on (Z/λ^{c_λ})^×".into()));
        }
    }
    for u in kf.units() {
        if nu.eval(&kf, u) != Some(Zeta::one()) {
            return Err(CharError::Hypothesis("ν trivial on O_K^×".into()));
        }
    }
    if (a - 1) % 2 != 0 || k % 2 != 0 {
        return Err(CharError::Hypothesis("a − 1 ≡ k ≡ 0 mod 2".into()));
    }
    if kf.d == 3 && (a - 1) % 6 != 0 {
        return Err(CharError::Hypothesis("a − 1 ≡ 0 mod 6 for d = 3".into()));
    }
    let om = |e: i64| FiniteType::single(ctx.omega_comp(e));
    let phi_ft = om(a - k - 1).mul(&kf, &xi_a.ft).mul(&kf, &nu_ft.pow(-1));
    let psi_ft = om(a - 1).mul(&kf, &nu_ft);
    let phi = HeckeCharacter::new(kf, phi_ft, 0, 0)?;
    let psi = HeckeCharacter::new(kf, psi_ft, 0, 0)?;
    let eta = phi.inv().mul(&psi).mul(&ctx.alpha_character().pow(k));
    Ok(PhiPsi { phi, psi, eta, a, k })
}

impl PhiPsi {
    pub fn phi_m(&self, ctx: &PadicCtx, m: i64) -> HeckeCharacter {
        self.phi.mul(&ctx.alpha_character().pow(m - 1))
    }
    pub fn psi_m(&self, ctx: &PadicCtx, m: i64) -> HeckeCharacter {
        self.psi.mul(&ctx.alpha_character().pow(m - 1))
    }
    /// Check the four clauses on ideals of norm ≤ bound; returns failures.
    pub fn check_clauses(&self, ctx: &PadicCtx, xi_a: &HeckeCharacter, lambda: i64, c_lambda: u32, ms: &[i64], bound: i64) -> Vec<String> {
        let kf = ctx.k;
        let mut bad = Vec::new();
        let lam = kf.int_ideal(lambda.pow(c_lambda));
        let c = xi_a.conductor();
        let cl = kf.mul_ideal(&c, &lam);
        let pcl = kf.mul_ideal(&ctx.frak_p, &cl);
        let pl = kf.mul_ideal(&ctx.frak_p, &lam);
        let (a, k) = (self.a, self.k);
        // (1)
        let cphi = self.phi.conductor();
        if cphi != cl && cphi != pcl {
            bad.push(format!("(1) conductor of φ is {:?}", cphi));
        }
        let phi_ak = self.phi_m(ctx, a - k);
        let want1 = xi_a.ft.mul(&kf, &FiniteType::single(self.psi.ft.comps.iter().find(|c| c.modulus == lam).cloned().unwrap_or_else(|| Component::from_fn(&kf, lam, 1, |_| 0))).pow(-1));
        if phi_ak.conductor() != cl || !same_ft(&kf, &phi_ak.ft, &want1, bound) {
            bad.push("(1) φ_{m−k} finite type at m = a".into());
        }
        // (2)
        let cpsi = self.psi.conductor();
        if cpsi != lam && cpsi != pl {
            bad.push(format!("(2) conductor of ψ is {:?}", cpsi));
        }
        for &m in ms {
            let pm = self.psi_m(ctx, m);
            if pm.conductor() != lam {
                bad.push(format!("(2) conductor of ψ_{m}"));
            }
        }
        // (3)
        if self.eta.conductor() != cl {
            bad.push(format!("(3) conductor of η is {:?}", self.eta.conductor()));
        }
        if self.eta.weight() != (k, 0) {
            bad.push("(3) η weight".into());
        }
        // (4)
        for &m in ms {
            let lhs = self.phi_m(ctx, m - k).mul(&self.psi_m(ctx, m)).mul(&HeckeCharacter::norm(kf).pow(-(m - k - 1)));
            let xi_m = xi_a.mul(&ctx.alpha_character().pow(m - a)).mul(&ctx.alpha_c_character().pow(a - m));
            for n in 1..=bound {
                for id in kf.ideals_of_norm(n) {
                    if !kf.coprime(&id, &kf.mul_ideal(&pcl, &kf.conj_ideal(&ctx.frak_p))) {
                        continue;
                    }
                    if !values_equal(&kf, &lhs.eval(&id), &xi_m.eval(&id)) {
                        bad.push(format!("(4) m = {m} at {:?}", id));
                    }
                }
            }
            for n in 1..=bound {
                for id in kf.ideals_of_norm(n) {
                    let e1 = self.phi_m(ctx, m - k).inv().mul(&self.psi_m(ctx, m));
                    if kf.coprime(&id, &kf.mul_ideal(&pcl, &kf.conj_ideal(&ctx.frak_p))) && !values_equal(&kf, &e1.eval(&id), &self.eta.eval(&id)) {
                        bad.push(format!("(3) η independent of m fails at m = {m}"));
                    }
                }
            }
        }
        bad
    }
}

fn same_ft(k: &QuadField, x: &FiniteType, y: &FiniteType, bound: i64) -> bool {
    let bnd = bound as i128;
    for xx in -bnd..=bnd {
        for yy in -3..=3 {
            let u = Elem::new(xx, yy);
            if x.eval(k, u) != y.eval(k, u) {
                return false;
            }
        }
    }
    true
}

/// Exact equality of two symbolic values (via the value field).
pub fn values_equal(k: &QuadField, x: &CharValue, y: &CharValue) -> bool {
    match (x, y) {
        (CharValue::Zero, CharValue::Zero) => true,
        (CharValue::Val { z: z1, .. }, CharValue::Val { z: z2, .. }) => {
            let n = arith::lcm(z1.n, z2.n);
            let f = NumField::new(n as u32, Some(-k.d));
            match (x.to_nf(k, &f), y.to_nf(k, &f)) {
                (Ok(a), Ok(b)) => a == b,
                _ => (x.to_complex(k) - y.to_complex(k)).norm() < 1e-9 * (1.0 + x.to_complex(k).norm()),
            }
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k7() -> QuadField {
        QuadField::new(7).unwrap()
    }

    #[test]
    fn norm_and_trivial() {
        let k = k7();
        let n = HeckeCharacter::norm(k);
        let id = k.primes_above(11)[0];
        assert!((n.eval_complex(&id) - Complex64::new(11.0, 0.0)).norm() < 1e-12);
        let inv = n.inv();
        assert!((inv.eval_complex(&id) - Complex64::new(1.0 / 11.0, 0.0)).norm() < 1e-12);
        assert!((HeckeCharacter::trivial(k).eval_complex(&id) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(n.conj_c().weight(), (1, 1));
        assert_eq!(n.conj_rho().weight(), (1, 1));
    }

    #[test]
    fn alpha_values() {
        let k = k7();
        let ctx = build_alpha(k, 11, 0, 10).unwrap();
        assert!(build_alpha(k, 11, 1, 10).is_err());
        assert!(matches!(build_alpha(k, 13, 0, 10), Err(CharError::NotSplit(13))));
        assert!(matches!(build_alpha(k, 7, 0, 10), Err(CharError::BadPrime(7))));
        // α((13)) = 13/ω(13)
        let a13 = ctx.alpha(&k.int_ideal(13));
        let want = ctx.int(13).div(&ctx.int(2).teichmuller());
        assert!(a13.eq_mod(&want, 10));
        // β ≡ 1 mod 𝔭: α((β)) = ι_p(β)
        let mut found = false;
        for x in -30i128..30 {
            for y in -30i128..30 {
                let b = Elem::new(x, y);
                if k.norm(b) == 0 || k.norm(b) % 11 == 0 {
                    continue;
                }
                if ctx.iota(b).sub(&ctx.one()).val >= 1 {
                    let v = ctx.alpha(&k.principal(b));
                    assert!(v.eq_mod(&ctx.iota(b).div(&ctx.iota(b).teichmuller()), 10));
                    assert!(ctx.iota(b).teichmuller().eq_mod(&ctx.one(), 10));
                    found = true;
                }
            }
        }
        assert!(found);
        // α is the avatar of the classical α
        let ac = ctx.alpha_character();
        for n in 1..60 {
            for id in k.ideals_of_norm(n) {
                if !k.coprime(&id, &ctx.frak_p) {
                    continue;
                }
                assert!(ctx.avatar(&ac, &id).unwrap().eq_mod(&ctx.alpha(&id), 10));
                let acc = ctx.alpha_c_character();
                if k.coprime(&id, &ctx.frak_pbar) {
                    assert!(ctx.avatar(&acc, &id).unwrap().eq_mod(&ctx.alpha_c(&id), 10));
                    let arho = ctx.alpha_rho_character();
                    assert!(ctx.avatar(&arho, &id).unwrap().eq_mod(&ctx.alpha_rho(&id), 10));
                }
            }
        }
    }

    #[test]
    fn teichmuller_on_roots_of_unity() {
        let k = QuadField::new(3).unwrap();
        let ctx = PadicCtx::new(k, 7, 10).unwrap();
        for u in k.units() {
            let om = ctx.omega_comp(1).eval(&k, u).unwrap();
            assert!(ctx.iota_zeta(&om).unwrap().eq_mod(&ctx.iota(u), 10));
        }
    }

    #[test]
    fn class_number_three_extension() {
        let k = QuadField::new(23).unwrap();
        let ch = HeckeCharacter { k, ft: FiniteType::trivial(), a: 2, b: 0, ext: None }.with_branch(0).unwrap();
        let all: Vec<QuadIdeal> = (1..40).flat_map(|n| k.ideals_of_norm(n)).collect();
        for x in &all {
            let vx = ch.eval_complex(x);
            assert!((vx.norm() - (x.norm() as f64)).abs() < 1e-8 * x.norm() as f64);
            for y in &all {
                let xy = k.mul_ideal(x, y);
                let lhs = ch.eval_complex(&xy);
                let rhs = vx * ch.eval_complex(y);
                assert!((lhs - rhs).norm() < 1e-8 * rhs.norm());
            }
        }
        // p ∤ h: α is multiplicative on non-principal ideals too
        let ctx = PadicCtx::new(k, 13, 10).unwrap();
        let p2 = k.primes_above(2)[0];
        let x = ctx.alpha(&p2);
        assert!(x.pow(3).eq_mod(&ctx.alpha(&k.pow_ideal(&p2, 3)), 9));
        assert_eq!(x.sub(&ctx.one()).val >= 1, true);
        assert!(matches!(PadicCtx::new(k, 3, 10), Err(_)));
    }

    proptest! {
        #[test]
        fn alpha_times_alpha_c(i in 0usize..200) {
            let k = k7();
            let ctx = PadicCtx::new(k, 11, 10).unwrap();
            let all: Vec<QuadIdeal> = (1..120).filter(|n| n % 11 != 0).flat_map(|n| k.ideals_of_norm(n)).collect();
            let id = all[i % all.len()];
            let lhs = ctx.alpha(&id).mul(&ctx.alpha_c(&id));
            let n = ctx.int(id.norm() as i128);
            let rhs = n.div(&n.teichmuller());
            prop_assert!(lhs.eq_mod(&rhs, 10));
        }

        #[test]
        fn multiplicativity(i in 0usize..500, j in 0usize..500) {
            let k = QuadField::new(3).unwrap();
            let nu = inert_character(&k, 5, 8, 1).unwrap();
            let ch = HeckeCharacter::new(k, FiniteType::single(nu), 3, 0).unwrap();
            let all: Vec<QuadIdeal> = (1..100).flat_map(|n| k.ideals_of_norm(n)).collect();
            let x = all[i % all.len()];
            let y = all[j % all.len()];
            let f = ch.value_field();
            let vx = ch.eval(&x).to_nf(&k, &f).unwrap();
            let vy = ch.eval(&y).to_nf(&k, &f).unwrap();
            let vxy = ch.eval(&k.mul_ideal(&x, &y)).to_nf(&k, &f).unwrap();
            prop_assert_eq!(f.mul(&vx, &vy), vxy);
        }
    }
}
