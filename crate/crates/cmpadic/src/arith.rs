//! Small-integer number theory used everywhere else.

use num_integer::Integer;

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut q = 3;
    while q * q <= n {
        if n % q == 0 {
            return false;
        }
        q += 2;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factor(mut n: i64) -> Vec<(i64, u32)> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: i64) -> Vec<i64> {
    factor(n).into_iter().map(|(q, _)| q).collect()
}

pub fn divisors(n: i64) -> Vec<i64> {
    let mut ds = vec![1i64];
    for (q, e) in factor(n) {
        let cur = ds.clone();
        let mut pw = 1;
        for _ in 0..e {
            pw *= q;
            ds.extend(cur.iter().map(|d| d * pw));
        }
    }
    ds.sort_unstable();
    ds
}

/// p-adic valuation of a nonzero integer.
pub fn val(mut n: i64, p: i64) -> u32 {
    assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn val_i128(mut n: i128, p: i128) -> u32 {
    assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn modp(a: i128, m: i128) -> i128 {
    a.rem_euclid(m)
}

pub fn powmod(base: i128, mut e: u128, m: i128) -> i128 {
    let mut b = base.rem_euclid(m);
    let mut r = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Inverse of a modulo m, if a is a unit.
pub fn invmod(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 && !(m == 1) {
        return None;
    }
    Some(s0.rem_euclid(m))
}

/// Smallest primitive root mod an odd prime (or 2).
pub fn primitive_root(p: i64) -> i64 {
    if p == 2 {
        return 1;
    }
    let fs = prime_divisors(p - 1);
    (2..p)
        .find(|&g| fs.iter().all(|&q| powmod(g as i128, ((p - 1) / q) as u128, p as i128) != 1))
        .unwrap()
}

/// Kronecker symbol (D/n) for a discriminant D ≡ 0,1 mod 4 and n ≥ 1.
pub fn kronecker(d: i64, n: i64) -> i64 {
    assert!(n >= 1);
    let mut res = 1;
    for (q, e) in factor(n) {
        let s = if q == 2 {
            if d % 2 == 0 {
                0
            } else if d.rem_euclid(8) == 1 || d.rem_euclid(8) == 7 {
                1
            } else {
                -1
            }
        } else {
            legendre(d, q)
        };
        if e % 2 == 1 {
            res *= s;
        } else if s == 0 {
            res = 0;
        }
    }
    res
}

/// Legendre symbol for an odd prime.
pub fn legendre(a: i64, p: i64) -> i64 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    if powmod(a as i128, ((p - 1) / 2) as u128, p as i128) == 1 {
        1
    } else {
        -1
    }
}

/// A square root of a mod an odd prime p (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: i64, p: i64) -> Option<i64> {
    let a = a.rem_euclid(p);
    if a == 0 {
        return Some(0);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    let (p_, a_) = (p as i128, a as i128);
    let mut q = p_ - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p_).find(|&z| legendre(z as i64, p) == -1).unwrap();
    let mut m = s;
    let mut c = powmod(z, q as u128, p_);
    let mut t = powmod(a_, q as u128, p_);
    let mut r = powmod(a_, ((q + 1) / 2) as u128, p_);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = tt * tt % p_;
            i += 1;
        }
        let b = powmod(c, 1u128 << (m - i - 1), p_);
        m = i;
        c = b * b % p_;
        t = t * c % p_;
        r = r * b % p_;
    }
    Some(r as i64)
}

/// Lift a simple square root r of a mod p to a root mod p^k.
pub fn hensel_sqrt(a: i128, r: i128, p: i128, k: u32) -> i128 {
    let mut r = r;
    let mut m = p;
    for _ in 1..k {
        m *= p;
        let f = (r * r - a).rem_euclid(m);
        let inv = invmod(2 * r, m).expect("simple root");
        r = (r - f * inv % m).rem_euclid(m);
    }
    r.rem_euclid(m)
}

pub fn factorial(n: u32) -> num_bigint::BigInt {
    (1..=n).fold(num_bigint::BigInt::from(1), |acc, i| acc * i)
}

/// Sum of d^k over divisors d of n.
pub fn sigma(n: i64, k: u32) -> num_bigint::BigInt {
    divisors(n).into_iter().map(|d| num_bigint::BigInt::from(d).pow(k)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_facts() {
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(primitive_root(11), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(kronecker(-3, 7), 1);
        assert_eq!(kronecker(-3, 5), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(sigma(6, 1), 12.into());
    }

    proptest! {
        #[test]
        fn sqrt_roundtrip(p in prop::sample::select(vec![3i64,5,7,11,13,17,101,193,257]), a in 1i64..1000) {
            if let Some(r) = sqrt_mod_prime(a, p) {
                prop_assert_eq!((r * r - a).rem_euclid(p), 0);
                if a % p != 0 {
                    let rr = hensel_sqrt(a as i128, r as i128, p as i128, 6);
                    prop_assert_eq!((rr * rr - a as i128).rem_euclid((p as i128).pow(6)), 0);
                }
            } else {
                prop_assert_eq!(legendre(a, p), -1);
            }
        }

        #[test]
        fn kronecker_multiplicative(m in 1i64..200, n in 1i64..200) {
            prop_assert_eq!(kronecker(-23, m * n), kronecker(-23, m) * kronecker(-23, n));
        }
    }
}
