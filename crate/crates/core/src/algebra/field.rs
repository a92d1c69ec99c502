use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly;
use crate::error::{Error, Result};

/// Element of a [`Field`], stored as the integer whose base-p digits are the
/// polynomial coefficients (lowest degree = least significant digit).
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

const MAX_SIZE: u64 = 1 << 16;
const ADD_TABLE_LIMIT: usize = 1024;
const IRREDUCIBLE_TRIES: usize = 100_000;

/// GF(p^n) with an explicit monic irreducible modulus and log/antilog tables.
#[derive(Clone)]
pub struct Field {
    p: u32,
    n: u32,
    q: usize,
    modulus: Vec<u32>,
    generator: Fe,
    exp: Vec<u16>,
    log: Vec<u16>,
    neg: Vec<u16>,
    add: Option<Vec<u16>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) modulus {}", self.p, self.n, self.modulus_string())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_size(p: u32, n: u32) -> Result<usize> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if n == 0 {
        return Err(Error::InvalidParams("extension degree must be positive".into()));
    }
    let mut q: u64 = 1;
    for _ in 0..n {
        q *= p as u64;
        if q > MAX_SIZE {
            return Err(Error::FieldTooLarge(q));
        }
    }
    Ok(q as usize)
}

impl Field {
    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Field> {
        check_size(p, 1)?;
        Field::build(p, vec![0, 1])
    }

    /// GF(p^n) with a modulus drawn at random from `seed` and certified irreducible.
    pub fn create(p: u32, n: u32, seed: u64) -> Result<Field> {
        check_size(p, n)?;
        if n == 1 {
            return Field::prime(p);
        }
        let fp = Field::prime(p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..IRREDUCIBLE_TRIES {
            let mut m: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
            m.push(1);
            if m[0] == 0 {
                continue;
            }
            let as_fe: Vec<Fe> = m.iter().map(|&c| Fe(c as u16)).collect();
            if poly::is_irreducible(&fp, &as_fe) {
                return Field::build(p, m);
            }
        }
        Err(Error::NoIrreducible)
    }

    /// GF(p^n) from a given monic modulus (lowest-degree coefficient first).
    pub fn from_modulus(p: u32, modulus: &[u32]) -> Result<Field> {
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidParams("modulus must be monic of positive degree".into()));
        }
        let n = (modulus.len() - 1) as u32;
        check_size(p, n)?;
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidParams("modulus coefficient out of range".into()));
        }
        if n > 1 {
            let fp = Field::prime(p)?;
            let as_fe: Vec<Fe> = modulus.iter().map(|&c| Fe(c as u16)).collect();
            if !poly::is_irreducible(&fp, &as_fe) {
                return Err(Error::InvalidParams("modulus is reducible".into()));
            }
        }
        Field::build(p, modulus.to_vec())
    }

    fn build(p: u32, modulus: Vec<u32>) -> Result<Field> {
        let n = (modulus.len() - 1) as u32;
        let q = (p as usize).pow(n);
        let digits = |mut x: usize| -> Vec<u32> {
            (0..n)
                .map(|_| {
                    let d = (x % p as usize) as u32;
                    x /= p as usize;
                    d
                })
                .collect()
        };
        let undigits = |d: &[u32]| -> usize { d.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize) };
        let raw_mul = |a: usize, b: usize| -> usize {
            let (da, db) = (digits(a), digits(b));
            let mut prod = vec![0u32; 2 * n as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            for deg in (n as usize..prod.len()).rev() {
                let c = prod[deg];
                if c != 0 {
                    for (t, &mc) in modulus.iter().enumerate().take(n as usize) {
                        let idx = deg - n as usize + t;
                        prod[idx] = (prod[idx] + p - (c * mc) % p) % p;
                    }
                    prod[deg] = 0;
                }
            }
            undigits(&prod[..n as usize])
        };

        let order = q - 1;
        let mut generator = None;
        for g in 1..q {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = raw_mul(x, g);
                k += 1;
                if k > order {
                    break;
                }
            }
            if x == 1 && k == order {
                generator = Some(g);
                break;
            }
        }
        let g = generator.ok_or_else(|| Error::Invariant("no primitive element found".into()))?;
        let mut exp = vec![0u16; 2 * order.max(1)];
        let mut log = vec![0u16; q];
        let mut x = 1usize;
        for i in 0..order {
            exp[i] = x as u16;
            exp[i + order] = x as u16;
            log[x] = i as u16;
            x = raw_mul(x, g);
        }
        let neg: Vec<u16> = (0..q)
            .map(|a| undigits(&digits(a).iter().map(|&d| (p - d) % p).collect::<Vec<_>>()) as u16)
            .collect();
        let add = if p != 2 && q <= ADD_TABLE_LIMIT {
            let mut t = vec![0u16; q * q];
            for a in 0..q {
                let da = digits(a);
                for b in 0..q {
                    let s: Vec<u32> = da.iter().zip(digits(b)).map(|(&x, y)| (x + y) % p).collect();
                    t[a * q + b] = undigits(&s) as u16;
                }
            }
            Some(t)
        } else {
            None
        };
        Ok(Field { p, n, q, modulus, generator: Fe(g as u16), exp, log, neg, add })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn modulus_string(&self) -> String {
        self.modulus.iter().map(|&d| digit_char(d)).collect()
    }

    /// The smallest-index element of multiplicative order q - 1.
    pub fn primitive_element(&self) -> Fe {
        self.generator
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q as u32).map(|i| Fe(i as u16))
    }

    #[inline]
    pub fn from_int(&self, v: u64) -> Fe {
        Fe((v % self.p as u64) as u16)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        match &self.add {
            Some(t) => Fe(t[a.index() * self.q + b.index()]),
            None => self.add_digits(a, b),
        }
    }

    fn add_digits(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p as usize;
        let (mut x, mut y) = (a.index(), b.index());
        let (mut out, mut place) = (0usize, 1usize);
        for _ in 0..self.n {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Fe(out as u16)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        Fe(self.exp[self.log[a.index()] as usize + self.log[b.index()] as usize])
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(!a.is_zero(), "inverse of zero");
        let order = self.q - 1;
        Fe(self.exp[(order - self.log[a.index()] as usize) % order])
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = (self.log[a.index()] as u64 * (e % order)) % order;
        Fe(self.exp[l as usize])
    }

    /// a^e for a possibly negative exponent (a nonzero when e < 0).
    pub fn pow_i(&self, a: Fe, e: i64) -> Fe {
        if e >= 0 {
            self.pow(a, e as u64)
        } else {
            self.pow(self.inv(a), e.unsigned_abs())
        }
    }

    /// dst += a * src, elementwise.
    pub fn axpy(&self, dst: &mut [Fe], a: Fe, src: &[Fe]) {
        if a.is_zero() {
            return;
        }
        let la = self.log[a.index()] as usize;
        if self.p == 2 {
            for (d, &s) in dst.iter_mut().zip(src) {
                if s.0 != 0 {
                    d.0 ^= self.exp[la + self.log[s.index()] as usize];
                }
            }
        } else {
            for (d, &s) in dst.iter_mut().zip(src) {
                if s.0 != 0 {
                    *d = self.add(*d, Fe(self.exp[la + self.log[s.index()] as usize]));
                }
            }
        }
    }

    pub fn scale(&self, v: &mut [Fe], a: Fe) {
        for x in v.iter_mut() {
            *x = self.mul(*x, a);
        }
    }

    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        a.iter().zip(b).fold(Fe::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    pub fn add_vec(&self, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_vec(&self, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    /// Discrete logarithm to the primitive element.
    pub fn log(&self, a: Fe) -> Option<u64> {
        (!a.is_zero()).then(|| self.log[a.index()] as u64)
    }

    pub fn multiplicative_order(&self, a: Fe) -> u64 {
        assert!(!a.is_zero());
        let order = (self.q - 1) as u64;
        let l = self.log[a.index()] as u64;
        order / gcd(order, l)
    }

    /// Coefficients over GF(p), lowest degree first.
    pub fn digits(&self, a: Fe) -> Vec<u32> {
        let mut x = a.index();
        (0..self.n)
            .map(|_| {
                let d = (x % self.p as usize) as u32;
                x /= self.p as usize;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u32]) -> Result<Fe> {
        if d.len() != self.n as usize || d.iter().any(|&c| c >= self.p) {
            return Err(Error::Parse(format!("bad digit vector {d:?} for GF({}^{})", self.p, self.n)));
        }
        Ok(Fe(d.iter().rev().fold(0usize, |acc, &c| acc * self.p as usize + c as usize) as u16))
    }

    pub fn to_digit_string(&self, a: Fe) -> String {
        self.digits(a).into_iter().map(digit_char).collect()
    }

    pub fn parse(&self, s: &str) -> Result<Fe> {
        let d = parse_digits(s)?;
        self.from_digits(&d)
    }

    /// Elements of the subfield of size `r` (those with a^r = a).
    pub fn subfield(&self, r: usize) -> Vec<Fe> {
        self.elements().filter(|&a| self.pow(a, r as u64) == a).collect()
    }

    /// r-th root under the Frobenius a -> a^r, which is a bijection.
    pub fn frobenius_root(&self, a: Fe, r: u64) -> Fe {
        // (a^(r^(k-1)))^r = a^(r^k) = a once r^k ≡ 1 on the multiplicative group.
        if a.is_zero() {
            return a;
        }
        let mut x = a;
        loop {
            let y = self.pow(x, r);
            if y == a {
                return x;
            }
            x = y;
        }
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn digit_char(d: u32) -> char {
    std::char::from_digit(d, 36).expect("digit below 36")
}

pub fn parse_digits(s: &str) -> Result<Vec<u32>> {
    s.chars()
        .map(|c| c.to_digit(36).ok_or_else(|| Error::Parse(format!("bad digit {c:?}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_is_trivial() {
        let f = Field::create(2, 1, 9).unwrap();
        assert_eq!(f.size(), 2);
        assert_eq!(f.primitive_element(), Fe::ONE);
        assert_eq!(f.modulus().len(), 2);
    }

    #[test]
    fn gf5_generator_is_two() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.primitive_element(), Fe(2));
        let powers: Vec<u16> = (1..=4).map(|e| f.pow(Fe(2), e).0).collect();
        assert_eq!(powers, vec![2, 4, 3, 1]);
    }

    #[test]
    fn rejects_composite_characteristic() {
        assert!(matches!(Field::create(6, 1, 0), Err(Error::NotPrime(6))));
    }

    #[test]
    fn frobenius_fixes_everything_in_gf16() {
        let f = Field::create(2, 4, 3).unwrap();
        for a in f.elements() {
            assert_eq!(f.pow(a, 16), a);
        }
    }

    #[test]
    fn same_seed_same_field() {
        let a = Field::create(5, 2, 11).unwrap();
        let b = Field::create(5, 2, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(Field::from_modulus(5, a.modulus()).unwrap(), a);
    }

    #[test]
    fn digit_round_trip() {
        let f = Field::create(7, 2, 1).unwrap();
        for a in f.elements() {
            assert_eq!(f.parse(&f.to_digit_string(a)).unwrap(), a);
        }
    }

    #[test]
    fn frobenius_root_inverts_power() {
        let f = Field::create(5, 2, 4).unwrap();
        for a in f.elements() {
            assert_eq!(f.pow(f.frobenius_root(a, 5), 5), a);
        }
    }
}
