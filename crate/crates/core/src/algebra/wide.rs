//! Table-free GF(p^n) for sizes beyond the lookup-table range, plus a view of it as an
//! extension of a table-based [`Field`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{Fe, Field};
use super::linalg::{affine_solutions, Matrix};
use super::poly;
use super::series::Scalars;
use crate::error::{Error, Result};

/// GF(p^n) with p^n < 2^62; elements are base-p digit indices, lowest degree least significant.
#[derive(Clone, Debug)]
pub struct WideField {
    p: u64,
    n: usize,
    size: u64,
    /// Monic modulus, lowest-degree first, length n + 1.
    modulus: Vec<u64>,
    /// For p = 2: the modulus minus X^n as a bit mask.
    low_bits: u64,
}

impl WideField {
    pub fn create(p: u32, n: usize, seed: u64) -> Result<WideField> {
        let size = (p as u64)
            .checked_pow(n as u32)
            .filter(|&s| s < 1 << 62 && n <= MAX_DEGREE && p < 1 << 16)
            .ok_or(Error::FieldTooLarge(u64::MAX))?;
        let fp = Field::prime(p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let mut m: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p as u64)).collect();
            m.push(1);
            if m[0] == 0 {
                continue;
            }
            let as_fe: Vec<Fe> = m.iter().map(|&c| Fe(c as u16)).collect();
            if n == 1 || poly::is_irreducible(&fp, &as_fe) {
                let low_bits = m[..n].iter().enumerate().fold(0u64, |acc, (i, &c)| acc | (c << i));
                return Ok(WideField { p: p as u64, n, size, modulus: m, low_bits });
            }
        }
        Err(Error::NoIrreducible)
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn digits(&self, a: u64) -> Vec<u64> {
        let mut buf = [0u32; MAX_DEGREE];
        self.unpack(a, &mut buf);
        buf[..self.n].iter().map(|&d| d as u64).collect()
    }

    pub fn from_digits(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn unpack(&self, mut a: u64, out: &mut [u32; MAX_DEGREE]) {
        for slot in out.iter_mut().take(self.n) {
            *slot = (a % self.p) as u32;
            a /= self.p;
        }
    }

    fn pack(&self, d: &[u32]) -> u64 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c as u64)
    }

    fn mul_binary(&self, mut a: u64, mut b: u64) -> u64 {
        let top = 1u64 << (self.n - 1);
        let mask = (top << 1) - 1;
        let mut acc = 0u64;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            let carry = a & top != 0;
            a = (a << 1) & mask;
            if carry {
                a ^= self.low_bits;
            }
        }
        acc
    }

    /// The class of X.
    pub fn variable(&self) -> u64 {
        if self.n == 1 {
            0
        } else {
            self.p
        }
    }

    /// The unique c with c^r = a, r a power of the characteristic.
    pub fn frobenius_root(&self, a: u64, r: u64) -> u64 {
        Scalars::pow(self, a, self.size / r)
    }
}

const MAX_DEGREE: usize = 64;

impl Scalars for WideField {
    type Elem = u64;

    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut da, mut db) = ([0u32; MAX_DEGREE], [0u32; MAX_DEGREE]);
        self.unpack(a, &mut da);
        self.unpack(b, &mut db);
        let p = self.p as u32;
        for (x, y) in da.iter_mut().zip(&db).take(self.n) {
            *x += y;
            if *x >= p {
                *x -= p;
            }
        }
        self.pack(&da[..self.n])
    }

    fn neg(&self, a: u64) -> u64 {
        if self.p == 2 {
            return a;
        }
        let mut da = [0u32; MAX_DEGREE];
        self.unpack(a, &mut da);
        let p = self.p as u32;
        for x in da.iter_mut().take(self.n) {
            *x = (p - *x) % p;
        }
        self.pack(&da[..self.n])
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.n;
        let p = self.p;
        if p == 2 {
            return self.mul_binary(a, b);
        }
        let (mut da, mut db) = ([0u32; MAX_DEGREE], [0u32; MAX_DEGREE]);
        self.unpack(a, &mut da);
        self.unpack(b, &mut db);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..n {
            let x = da[i] as u64;
            if x == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] += x * db[j] as u64;
            }
        }
        for deg in (n..2 * n - 1).rev() {
            let c = prod[deg] % p;
            if c != 0 {
                for t in 0..n {
                    prod[deg - n + t] += (p - c) * self.modulus[t];
                }
            }
        }
        let mut out = [0u32; MAX_DEGREE];
        for i in 0..n {
            out[i] = (prod[i] % p) as u32;
        }
        self.pack(&out[..n])
    }

    fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        Scalars::pow(self, a, self.size - 2)
    }
}

/// `wide` = GF(q^d) viewed over the table field GF(q), with coordinates in the basis 1, X, ..., X^{d-1}.
pub struct WideExtension {
    pub wide: WideField,
    d: usize,
    /// θ^u for u < deg(q), θ a root of the base modulus.
    theta_pows: Vec<u64>,
    /// Column j: F_p coordinates of the j-th F_p basis element of `wide`.
    coord_cols: Vec<Vec<Fe>>,
    base_degree: usize,
    fp: Field,
}

impl WideExtension {
    pub fn create(base: &Field, d: usize, seed: u64) -> Result<WideExtension> {
        let p = base.characteristic();
        let nq = base.degree() as usize;
        let wide = WideField::create(p, nq * d, seed)?;
        let theta = find_root(&wide, base)?;
        let mut theta_pows = vec![1u64];
        for u in 1..nq {
            theta_pows.push(wide.mul(theta_pows[u - 1], theta));
        }
        let fp = Field::prime(p)?;
        let total = nq * d;
        // Column (i, u) of M holds the digits of θ^u X^i.
        let x = wide.variable();
        let mut m = Matrix::zeros(total, total);
        let mut xi = 1u64;
        for i in 0..d {
            for (u, &tp) in theta_pows.iter().enumerate() {
                let v = wide.mul(tp, xi);
                for (row, dgt) in wide.digits(v).into_iter().enumerate() {
                    m.set(row, i * nq + u, Fe(dgt as u16));
                }
            }
            xi = wide.mul(xi, x);
        }
        let mut coord_cols = Vec::with_capacity(total);
        for j in 0..total {
            let mut e = vec![Fe::ZERO; total];
            e[j] = Fe::ONE;
            let sol = affine_solutions(&fp, &m, &e)
                .filter(|s| s.dim() == 0)
                .ok_or_else(|| Error::Invariant("powers of X do not form a basis".into()))?;
            coord_cols.push(sol.offset().to_vec());
        }
        Ok(WideExtension { wide, d, theta_pows, coord_cols, base_degree: nq, fp })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn embed(&self, f: &Field, a: Fe) -> u64 {
        let mut acc = 0u64;
        for (u, dgt) in f.digits(a).into_iter().enumerate() {
            for _ in 0..dgt {
                acc = self.wide.add(acc, self.theta_pows[u]);
            }
        }
        acc
    }

    /// b_0..b_{d-1} in GF(q) with a = sum b_i X^i.
    pub fn coordinates(&self, f: &Field, a: u64) -> Result<Vec<Fe>> {
        let total = self.d * self.base_degree;
        let mut acc = vec![Fe::ZERO; total];
        for (j, dgt) in self.wide.digits(a).into_iter().enumerate() {
            if dgt != 0 {
                self.fp.axpy(&mut acc, Fe(dgt as u16), &self.coord_cols[j]);
            }
        }
        acc.chunks(self.base_degree)
            .map(|c| f.from_digits(&c.iter().map(|x| x.0 as u32).collect::<Vec<_>>()))
            .collect()
    }
}

/// A root in `wide` of the modulus defining `base`.
fn find_root(wide: &WideField, base: &Field) -> Result<u64> {
    let modulus: Vec<u64> = base.modulus().iter().map(|&c| c as u64).collect();
    let eval = |x: u64| {
        modulus.iter().rev().fold(0u64, |acc, &c| {
            let mut s = wide.mul(acc, x);
            for _ in 0..c {
                s = wide.add(s, 1);
            }
            s
        })
    };
    if base.degree() == 1 {
        return Ok(0);
    }
    let q = base.size() as u64;
    let cofactor = (wide.size() - 1) / (q - 1);
    for seed in 2..wide.size().min(10_000) {
        let g = Scalars::pow(wide, seed, cofactor);
        let mut x = g;
        for _ in 0..q - 1 {
            if eval(x) == 0 {
                return Ok(x);
            }
            x = wide.mul(x, g);
        }
    }
    Err(Error::Invariant("no embedding of the base field".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_is_a_homomorphism() {
        let base = Field::create(5, 2, 1).unwrap();
        let ext = WideExtension::create(&base, 5, 3).unwrap();
        for a in base.elements().step_by(3) {
            for b in base.elements().step_by(5) {
                let w = &ext.wide;
                assert_eq!(ext.embed(&base, base.mul(a, b)), w.mul(ext.embed(&base, a), ext.embed(&base, b)));
                assert_eq!(ext.embed(&base, base.add(a, b)), w.add(ext.embed(&base, a), ext.embed(&base, b)));
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let base = Field::create(2, 2, 4).unwrap();
        let ext = WideExtension::create(&base, 3, 9).unwrap();
        let w = &ext.wide;
        let x = w.variable();
        for a in [0u64, 1, 17, 40, 63] {
            let c = ext.coordinates(&base, a).unwrap();
            let mut back = 0u64;
            let mut xi = 1u64;
            for &b in &c {
                back = w.add(back, w.mul(ext.embed(&base, b), xi));
                xi = w.mul(xi, x);
            }
            assert_eq!(back, a);
        }
    }

    #[test]
    fn inverse_and_frobenius_root() {
        let w = WideField::create(5, 10, 2).unwrap();
        let a = 123_456u64;
        assert_eq!(w.mul(a, w.inv(a)), 1);
        let c = w.frobenius_root(a, 5);
        assert_eq!(Scalars::pow(&w, c, 5), a);
    }
}
