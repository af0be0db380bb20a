//! Imaginary quadratic fields K = Q(√−d), d ≡ 3 mod 4 squarefree.
//!
//! Elements of O_K are x + yω with ω = (1+√−d)/2, ω² = ω − t, t = (1+d)/4.

use crate::arith;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("d = {0} is not a squarefree positive integer ≡ 3 mod 4")]
    BadDiscriminant(i64),
    #[error("{0} is not prime")]
    NotPrime(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadField {
    pub d: i64,
    pub t: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    pub x: i128,
    pub y: i128,
}

impl Elem {
    pub const ONE: Elem = Elem { x: 1, y: 0 };
    pub fn new(x: i128, y: i128) -> Self {
        Elem { x, y }
    }
    pub fn int(n: i128) -> Self {
        Elem { x: n, y: 0 }
    }
}

/// g·(Z a + Z(b+ω)) with a | b² + b + t, 0 ≤ b < a.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadIdeal {
    pub g: i64,
    pub a: i64,
    pub b: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Splitting {
    Split(QuadIdeal, QuadIdeal),
    Inert(QuadIdeal),
    Ramified(QuadIdeal),
}

impl QuadIdeal {
    pub fn unit() -> Self {
        QuadIdeal { g: 1, a: 1, b: 0 }
    }
    pub fn norm(&self) -> i64 {
        self.g * self.g * self.a
    }
    /// HNF basis (A, B, C): ideal = Z·A + Z·(B + Cω).
    pub fn hnf(&self) -> (i64, i64, i64) {
        (self.g * self.a, self.g * self.b, self.g)
    }
    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }
}

/// Hermite normal form of the Z-span of vectors (x, y) ↦ x + yω.
fn hnf2(vs: &[(i128, i128)]) -> (i128, i128, i128) {
    let mut rows: Vec<(i128, i128)> = vs.iter().copied().filter(|v| *v != (0, 0)).collect();
    // Euclid on the y column.
    let mut pivot: Option<(i128, i128)> = None;
    let mut zero_y: Vec<i128> = Vec::new();
    for r in rows.drain(..) {
        if r.1 == 0 {
            zero_y.push(r.0);
            continue;
        }
        match pivot {
            None => pivot = Some(r),
            Some(mut p) => {
                let mut q = r;
                while q.1 != 0 {
                    let k = p.1.div_euclid(q.1);
                    let nr = (p.0 - k * q.0, p.1 - k * q.1);
                    p = q;
                    q = nr;
                }
                zero_y.push(q.0);
                pivot = Some(p);
            }
        }
    }
    let (mut bx, mut c) = pivot.expect("lattice of rank 2");
    if c < 0 {
        bx = -bx;
        c = -c;
    }
    let a = zero_y.iter().fold(0i128, |acc, &x| num_integer::Integer::gcd(&acc, &x));
    assert!(a > 0, "lattice of rank 2");
    (a, bx.rem_euclid(a), c)
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self, QuadError> {
        if d <= 0 || d % 4 != 3 || arith::factor(d).iter().any(|&(_, e)| e > 1) {
            return Err(QuadError::BadDiscriminant(d));
        }
        Ok(QuadField { d, t: (1 + d) / 4 })
    }
    pub fn disc(&self) -> i64 {
        -self.d
    }
    pub fn w(&self) -> i64 {
        if self.d == 3 {
            6
        } else {
            2
        }
    }
    pub fn units(&self) -> Vec<Elem> {
        if self.d == 3 {
            vec![
                Elem::new(1, 0),
                Elem::new(0, 1),
                Elem::new(-1, 1),
                Elem::new(-1, 0),
                Elem::new(0, -1),
                Elem::new(1, -1),
            ]
        } else {
            vec![Elem::new(1, 0), Elem::new(-1, 0)]
        }
    }

    // ---- element arithmetic ----
    pub fn mul(&self, u: Elem, v: Elem) -> Elem {
        let t = self.t as i128;
        Elem::new(u.x * v.x - t * u.y * v.y, u.x * v.y + u.y * v.x + u.y * v.y)
    }
    pub fn add(&self, u: Elem, v: Elem) -> Elem {
        Elem::new(u.x + v.x, u.y + v.y)
    }
    pub fn conj(&self, u: Elem) -> Elem {
        Elem::new(u.x + u.y, -u.y)
    }
    pub fn norm(&self, u: Elem) -> i128 {
        u.x * u.x + u.x * u.y + (self.t as i128) * u.y * u.y
    }
    pub fn trace(&self, u: Elem) -> i128 {
        2 * u.x + u.y
    }
    pub fn pow(&self, u: Elem, e: u32) -> Elem {
        (0..e).fold(Elem::ONE, |acc, _| self.mul(acc, u))
    }
    /// Exact division, if u/v ∈ O_K.
    pub fn div(&self, u: Elem, v: Elem) -> Option<Elem> {
        let n = self.norm(v);
        let w = self.mul(u, self.conj(v));
        if w.x % n == 0 && w.y % n == 0 {
            Some(Elem::new(w.x / n, w.y / n))
        } else {
            None
        }
    }
    /// Real and imaginary parts of u in C under ω ↦ (1+i√d)/2.
    pub fn to_complex(&self, u: Elem) -> num_complex::Complex64 {
        let sd = (self.d as f64).sqrt();
        num_complex::Complex64::new(u.x as f64 + u.y as f64 / 2.0, u.y as f64 * sd / 2.0)
    }

    // ---- ideals ----
    pub fn ideal_from_hnf(&self, a: i128, b: i128, c: i128) -> QuadIdeal {
        debug_assert!(a % c == 0 && b % c == 0);
        let id = QuadIdeal { g: c as i64, a: (a / c) as i64, b: (b / c) as i64 };
        debug_assert!(self.is_ideal(&id));
        id
    }
    pub fn is_ideal(&self, id: &QuadIdeal) -> bool {
        id.g > 0 && id.a > 0 && (0..id.a).contains(&id.b) && (id.b * id.b + id.b + self.t) % id.a == 0
    }
    pub fn principal(&self, u: Elem) -> QuadIdeal {
        assert!(u != Elem::new(0, 0));
        let om = Elem::new(0, 1);
        let v = self.mul(u, om);
        let (a, b, c) = hnf2(&[(u.x, u.y), (v.x, v.y)]);
        self.ideal_from_hnf(a, b, c)
    }
    pub fn int_ideal(&self, n: i64) -> QuadIdeal {
        QuadIdeal { g: n.abs(), a: 1, b: 0 }
    }
    pub fn contains(&self, id: &QuadIdeal, u: Elem) -> bool {
        let (a, b, c) = id.hnf();
        let (a, b, c) = (a as i128, b as i128, c as i128);
        if u.y.rem_euclid(c) != 0 {
            return false;
        }
        let k = u.y / c;
        (u.x - k * b).rem_euclid(a) == 0
    }
    /// 𝔞 ⊆ 𝔟.
    pub fn ideal_le(&self, a: &QuadIdeal, b: &QuadIdeal) -> bool {
        let (aa, ab, ac) = a.hnf();
        self.contains(b, Elem::int(aa as i128)) && self.contains(b, Elem::new(ab as i128, ac as i128))
    }
    pub fn basis(&self, id: &QuadIdeal) -> [Elem; 2] {
        let (a, b, c) = id.hnf();
        [Elem::int(a as i128), Elem::new(b as i128, c as i128)]
    }
    pub fn mul_ideal(&self, p: &QuadIdeal, q: &QuadIdeal) -> QuadIdeal {
        let bp = self.basis(p);
        let bq = self.basis(q);
        let mut gens = Vec::with_capacity(4);
        for u in bp {
            for v in bq {
                let w = self.mul(u, v);
                gens.push((w.x, w.y));
            }
        }
        let (a, b, c) = hnf2(&gens);
        self.ideal_from_hnf(a, b, c)
    }
    pub fn pow_ideal(&self, p: &QuadIdeal, e: u32) -> QuadIdeal {
        (0..e).fold(QuadIdeal::unit(), |acc, _| self.mul_ideal(&acc, p))
    }
    pub fn conj_ideal(&self, id: &QuadIdeal) -> QuadIdeal {
        QuadIdeal { g: id.g, a: id.a, b: (-id.b - 1).rem_euclid(id.a) }
    }
    /// Divide by a rational integer n, if n | 𝔞.
    pub fn div_int(&self, id: &QuadIdeal, n: i64) -> Option<QuadIdeal> {
        let (a, b, c) = id.hnf();
        if a % n == 0 && b % n == 0 && c % n == 0 {
            Some(self.ideal_from_hnf((a / n) as i128, (b / n) as i128, (c / n) as i128))
        } else {
            None
        }
    }
    /// 𝔞/𝔮 for a prime 𝔮 ⊇ 𝔞.
    pub fn div_prime(&self, id: &QuadIdeal, q: &QuadIdeal) -> Option<QuadIdeal> {
        if !self.ideal_le(id, q) {
            return None;
        }
        let n = q.norm();
        let prod = self.mul_ideal(id, &self.conj_ideal(q));
        self.div_int(&prod, n)
    }
    pub fn gcd_ideal(&self, p: &QuadIdeal, q: &QuadIdeal) -> QuadIdeal {
        let mut gens = Vec::new();
        for u in self.basis(p).iter().chain(self.basis(q).iter()) {
            gens.push((u.x, u.y));
        }
        let (a, b, c) = hnf2(&gens);
        self.ideal_from_hnf(a, b, c)
    }
    pub fn coprime(&self, p: &QuadIdeal, q: &QuadIdeal) -> bool {
        self.gcd_ideal(p, q).is_unit()
    }
    pub fn coprime_elem(&self, u: Elem, m: &QuadIdeal) -> bool {
        self.coprime(&self.principal(u), m)
    }

    pub fn factor_rational_prime(&self, q: i64) -> Result<Splitting, QuadError> {
        if !arith::is_prime(q) {
            return Err(QuadError::NotPrime(q));
        }
        let roots: Vec<i64> = (0..q).filter(|&b| (b * b + b + self.t) % q == 0).collect();
        Ok(match roots.len() {
            0 => Splitting::Inert(self.int_ideal(q)),
            1 => Splitting::Ramified(QuadIdeal { g: 1, a: q, b: roots[0] }),
            _ => Splitting::Split(
                QuadIdeal { g: 1, a: q, b: roots[0] },
                QuadIdeal { g: 1, a: q, b: roots[1] },
            ),
        })
    }

    /// Prime ideals above q.
    pub fn primes_above(&self, q: i64) -> Vec<QuadIdeal> {
        match self.factor_rational_prime(q).unwrap() {
            Splitting::Split(a, b) => vec![a, b],
            Splitting::Inert(a) | Splitting::Ramified(a) => vec![a],
        }
    }

    pub fn ord(&self, id: &QuadIdeal, pr: &QuadIdeal) -> u32 {
        let mut cur = *id;
        let mut e = 0;
        while let Some(n) = self.div_prime(&cur, pr) {
            cur = n;
            e += 1;
        }
        e
    }

    pub fn factor_ideal(&self, id: &QuadIdeal) -> Vec<(QuadIdeal, u32)> {
        let mut out = Vec::new();
        for q in arith::prime_divisors(id.norm()) {
            for pr in self.primes_above(q) {
                let e = self.ord(id, &pr);
                if e > 0 {
                    out.push((pr, e));
                }
            }
        }
        out
    }

    pub fn ideals_of_norm(&self, n: i64) -> Vec<QuadIdeal> {
        let mut out = Vec::new();
        let mut g = 1;
        while g * g <= n {
            if n % (g * g) == 0 {
                let a = n / (g * g);
                for b in 0..a {
                    if (b * b + b + self.t) % a == 0 {
                        out.push(QuadIdeal { g, a, b });
                    }
                }
            }
            g += 1;
        }
        out.sort_by_key(|i| (i.g * i.a, i.g * i.b, i.g));
        out
    }

    /// Some β with (β) = 𝔞, by lattice search.
    pub fn principal_generator(&self, id: &QuadIdeal) -> Option<Elem> {
        let n = id.norm() as i128;
        let d = self.d as i128;
        let t = self.t as i128;
        // 4N = (2x+y)² + d y²
        let ymax = ((4 * n / d) as f64).sqrt() as i128 + 1;
        let mut best: Option<Elem> = None;
        for y in -ymax..=ymax {
            let r = 4 * n - d * y * y;
            if r < 0 {
                continue;
            }
            let s = (r as f64).sqrt().round() as i128;
            for s in [s - 1, s, s + 1] {
                if s < 0 || s * s != r {
                    continue;
                }
                for sg in [s, -s] {
                    if (sg - y) % 2 != 0 {
                        continue;
                    }
                    let x = (sg - y) / 2;
                    let u = Elem::new(x, y);
                    debug_assert_eq!(x * x + x * y + t * y * y, n);
                    if self.contains(id, u) {
                        let cand = u;
                        if best.map_or(true, |b| (cand.y.abs(), -cand.x, cand.y) < (b.y.abs(), -b.x, b.y)) {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
        best
    }

    // ---- residues ----
    /// Canonical representative of u mod 𝔪: (x, y) with 0 ≤ y < g, 0 ≤ x < g·a.
    pub fn residue(&self, m: &QuadIdeal, u: Elem) -> Elem {
        let (a, b, c) = m.hnf();
        let (a, b, c) = (a as i128, b as i128, c as i128);
        let y = u.y.rem_euclid(c);
        let k = (u.y - y) / c;
        let x = (u.x - k * b).rem_euclid(a);
        Elem::new(x, y)
    }
    pub fn residues(&self, m: &QuadIdeal) -> Vec<Elem> {
        let (a, _, c) = m.hnf();
        let mut out = Vec::with_capacity((a * c) as usize);
        for y in 0..c as i128 {
            for x in 0..a as i128 {
                out.push(Elem::new(x, y));
            }
        }
        out
    }
    pub fn unit_residues(&self, m: &QuadIdeal) -> Vec<Elem> {
        let primes: Vec<QuadIdeal> = self.factor_ideal(m).into_iter().map(|(p, _)| p).collect();
        self.residues(m)
            .into_iter()
            .filter(|&u| primes.iter().all(|p| !self.contains(p, u)))
            .collect()
    }
    pub fn mul_mod(&self, m: &QuadIdeal, u: Elem, v: Elem) -> Elem {
        self.residue(m, self.mul(u, v))
    }

    // ---- class group ----
    pub fn reduced_forms(&self) -> Vec<(i64, i64, i64)> {
        let d = self.d;
        let mut out = Vec::new();
        let mut a = 1;
        while 3 * a * a <= d {
            for b in -a + 1..=a {
                if (b * b + d) % (4 * a) == 0 {
                    let c = (b * b + d) / (4 * a);
                    if c < a || (c == a && b < 0) {
                        continue;
                    }
                    out.push((a, b, c));
                }
            }
            a += 1;
        }
        out
    }

    fn reduce_form(&self, f: (i128, i128, i128)) -> (i64, i64, i64) {
        let (mut a, mut b, mut c) = f;
        loop {
            if b > a || b <= -a {
                // b ← b mod 2a into (−a, a]
                let k = (a - b).div_euclid(2 * a);
                let nb = b + 2 * a * k;
                c = (nb * nb + self.d as i128) / (4 * a);
                b = nb;
                continue;
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return (a as i64, b as i64, c as i64);
        }
    }

    /// Reduced form attached to an ideal; equal forms ⇔ same class.
    pub fn ideal_form(&self, id: &QuadIdeal) -> (i64, i64, i64) {
        let a = id.a as i128;
        let b = id.b as i128;
        let c = (b * b + b + self.t as i128) / a;
        self.reduce_form((a, 2 * b + 1, c))
    }

    pub fn class_group(&self) -> ClassGroup {
        let forms = self.reduced_forms();
        let h = forms.len();
        let reps: Vec<QuadIdeal> = forms
            .iter()
            .map(|&(a, b, _)| QuadIdeal { g: 1, a, b: ((b - 1) / 2).rem_euclid(a) })
            .collect();
        let index: HashMap<(i64, i64, i64), usize> =
            reps.iter().enumerate().map(|(i, r)| (self.ideal_form(r), i)).collect();
        assert_eq!(index.len(), h);
        let mut table = vec![vec![0usize; h]; h];
        for i in 0..h {
            for j in 0..h {
                let p = self.mul_ideal(&reps[i], &reps[j]);
                table[i][j] = index[&self.ideal_form(&p)];
            }
        }
        let identity = index[&self.ideal_form(&QuadIdeal::unit())];
        ClassGroup { field: *self, h, reps, table, index, identity }
    }
}

#[derive(Clone, Debug)]
pub struct ClassGroup {
    pub field: QuadField,
    pub h: usize,
    pub reps: Vec<QuadIdeal>,
    pub table: Vec<Vec<usize>>,
    index: HashMap<(i64, i64, i64), usize>,
    pub identity: usize,
}

impl ClassGroup {
    pub fn dlog(&self, id: &QuadIdeal) -> usize {
        self.index[&self.field.ideal_form(id)]
    }
    pub fn is_principal(&self, id: &QuadIdeal) -> bool {
        self.dlog(id) == self.identity
    }
    /// One ideal of least norm per class, coprime to n.
    pub fn reps_coprime_to(&self, n: i64) -> Vec<QuadIdeal> {
        let mut found: Vec<Option<QuadIdeal>> = vec![None; self.h];
        let mut left = self.h;
        let mut nn = 1;
        while left > 0 {
            if arith::gcd(nn, n) == 1 {
                for id in self.field.ideals_of_norm(nn) {
                    let c = self.dlog(&id);
                    if found[c].is_none() {
                        found[c] = Some(id);
                        left -= 1;
                    }
                }
            }
            nn += 1;
        }
        found.into_iter().map(|x| x.unwrap()).collect()
    }
    /// Order of a class.
    pub fn order(&self, c: usize) -> usize {
        let mut x = c;
        let mut n = 1;
        while x != self.identity {
            x = self.table[x][c];
            n += 1;
        }
        n
    }
    /// A generator when the group is cyclic.
    pub fn cyclic_generator(&self) -> Option<usize> {
        (0..self.h).find(|&c| self.order(c) == self.h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zeta_coeff(d: i64, n: i64) -> usize {
        arith::divisors(n).iter().map(|&m| arith::kronecker(-d, m)).sum::<i64>() as usize
    }

    #[test]
    fn splitting_examples() {
        let k = QuadField::new(3).unwrap();
        assert!(matches!(k.factor_rational_prime(3).unwrap(), Splitting::Ramified(_)));
        assert!(matches!(k.factor_rational_prime(5).unwrap(), Splitting::Inert(_)));
        match k.factor_rational_prime(7).unwrap() {
            Splitting::Split(p, q) => {
                assert_eq!(q, k.conj_ideal(&p));
                assert_eq!(k.mul_ideal(&p, &q), k.int_ideal(7));
                let g = k.principal_generator(&p).unwrap();
                assert_eq!(k.norm(g), 7);
                assert_eq!(k.principal(g), p);
            }
            _ => panic!(),
        }
        assert!(k.factor_rational_prime(9).is_err());
        assert!(QuadField::new(5).is_err());
        assert!(QuadField::new(27).is_err());
    }

    #[test]
    fn norms_and_classes() {
        let k = QuadField::new(3).unwrap();
        assert_eq!(k.ideals_of_norm(1), vec![QuadIdeal::unit()]);
        assert!(k.ideals_of_norm(2).is_empty());
        assert_eq!(k.ideals_of_norm(7).len(), 2);
        for d in [3, 7, 11, 19, 23, 31, 43, 47, 59, 71] {
            let k = QuadField::new(d).unwrap();
            for n in 1..=500 {
                assert_eq!(k.ideals_of_norm(n).len(), zeta_coeff(d, n), "d={d} n={n}");
            }
        }
        assert_eq!(QuadField::new(3).unwrap().class_group().h, 1);
        assert_eq!(QuadField::new(7).unwrap().class_group().h, 1);
        let k23 = QuadField::new(23).unwrap();
        let cg = k23.class_group();
        assert_eq!(cg.h, 3);
        for row in &cg.table {
            let mut r = row.clone();
            r.sort();
            assert_eq!(r, vec![0, 1, 2]);
        }
        let p2 = k23.primes_above(2)[0];
        assert!(k23.principal_generator(&p2).is_none());
        assert!(!cg.is_principal(&p2));
        assert!(cg.is_principal(&k23.pow_ideal(&p2, 3)));
        assert_eq!(QuadField::new(47).unwrap().class_group().h, 5);
        assert_eq!(QuadField::new(71).unwrap().class_group().h, 7);
    }

    #[test]
    fn factorization_roundtrip() {
        let k = QuadField::new(23).unwrap();
        for n in 1..200 {
            for id in k.ideals_of_norm(n) {
                let f = k.factor_ideal(&id);
                let back = f.iter().fold(QuadIdeal::unit(), |acc, (p, e)| k.mul_ideal(&acc, &k.pow_ideal(p, *e)));
                assert_eq!(back, id);
            }
        }
    }

    proptest! {
        #[test]
        fn ideal_laws(d in prop::sample::select(vec![3i64, 7, 11, 23, 31]), i in 0usize..1000, j in 0usize..1000) {
            let k = QuadField::new(d).unwrap();
            let all: Vec<QuadIdeal> = (1..80).flat_map(|n| k.ideals_of_norm(n)).collect();
            let a = all[i % all.len()];
            let b = all[j % all.len()];
            let (n1, n2) = (a.norm(), b.norm());
            let ab = k.mul_ideal(&a, &b);
            prop_assert_eq!(ab.norm(), n1 * n2);
            prop_assert_eq!(ab, k.mul_ideal(&b, &a));
            prop_assert_eq!(k.mul_ideal(&a, &k.conj_ideal(&a)), k.int_ideal(n1));
            prop_assert_eq!(k.conj_ideal(&k.conj_ideal(&a)), a);
            prop_assert_eq!(k.mul_ideal(&a, &QuadIdeal::unit()), a);
            let cg = k.class_group();
            prop_assert_eq!(cg.dlog(&ab), cg.table[cg.dlog(&a)][cg.dlog(&b)]);
        }

        #[test]
        fn principal_generator_consistent(d in prop::sample::select(vec![3i64, 7, 11, 19]), x in -30i128..30, y in -30i128..30) {
            prop_assume!((x, y) != (0, 0));
            let k = QuadField::new(d).unwrap();
            let u = Elem::new(x, y);
            let id = k.principal(u);
            prop_assert_eq!(id.norm() as i128, k.norm(u));
            let g = k.principal_generator(&id).unwrap();
            prop_assert_eq!(k.principal(g), id);
            prop_assert!(k.div(u, g).is_some());
        }
    }
}
