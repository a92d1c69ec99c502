//! Large extension fields GF(q^D) together with the F_q-linear coordinate maps rho.
//!
//! Two backends: a bit-packed GF(2^{nD}) with a sparse modulus over GF(2) for
//! characteristic 2, and GF(q)[X]/M(X) for everything else.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{digit_char, parse_digits, Fe, Field};
use super::poly;
use crate::error::{Error, Result};

pub trait BigField: Send + Sync {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn base(&self) -> &Arc<Field>;
    /// Degree D over the base field.
    fn digits(&self) -> usize;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem);
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Adds rho(c * e_j) to `acc`.
    fn add_rho_term(&self, acc: &mut Self::Elem, j: usize, c: Fe);
    fn rho_inv(&self, a: &Self::Elem) -> Vec<Fe>;
    /// Whether the last `count` coordinates of rho^{-1}(a) vanish.
    fn trailing_digits_zero(&self, a: &Self::Elem, count: usize) -> bool;
    fn random(&self, rng: &mut dyn RngCore) -> Self::Elem;
    /// Prime-field digits, lowest first.
    fn to_digit_string(&self, a: &Self::Elem) -> String;
    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;
    fn modulus_string(&self) -> String;

    fn rho(&self, v: &[Fe]) -> Self::Elem {
        assert!(v.len() <= self.digits());
        let mut acc = self.zero();
        for (j, &c) in v.iter().enumerate() {
            self.add_rho_term(&mut acc, j, c);
        }
        acc
    }

    /// Horner evaluation of sum coeffs[i] x^i.
    fn eval_poly(&self, coeffs: &[Self::Elem], x: &Self::Elem) -> Self::Elem {
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            self.add_assign(&mut acc, c);
        }
        acc
    }

    fn random_nonzero(&self, rng: &mut dyn RngCore) -> Self::Elem {
        loop {
            let a = self.random(rng);
            if !self.is_zero(&a) {
                return a;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// GF(2)[X] word arithmetic

#[inline]
fn clmul64_soft(a: u64, b: u64) -> (u64, u64) {
    let (mut lo, mut hi) = (0u64, 0u64);
    for i in 0..64 {
        if (b >> i) & 1 == 1 {
            lo ^= a << i;
            if i > 0 {
                hi ^= a >> (64 - i);
            }
        }
    }
    (lo, hi)
}

fn mul_words_soft(a: &[u64], b: &[u64], out: &mut [u64]) {
    out.fill(0);
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let (lo, hi) = clmul64_soft(x, y);
            out[i + j] ^= lo;
            out[i + j + 1] ^= hi;
        }
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn mul_words_clmul(a: &[u64], b: &[u64], out: &mut [u64]) {
    use std::arch::x86_64::*;
    out.fill(0);
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let xa = _mm_set_epi64x(0, x as i64);
        for (j, &y) in b.iter().enumerate() {
            let r = _mm_clmulepi64_si128(xa, _mm_set_epi64x(0, y as i64), 0x00);
            out[i + j] ^= _mm_cvtsi128_si64(r) as u64;
            out[i + j + 1] ^= _mm_cvtsi128_si64(_mm_unpackhi_epi64(r, r)) as u64;
        }
    }
}

fn has_clmul() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::is_x86_feature_detected!("pclmulqdq") && std::is_x86_feature_detected!("sse2")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// Full product of two word vectors into `out` (length a.len() + b.len()).
fn mul_words(clmul: bool, a: &[u64], b: &[u64], out: &mut [u64]) {
    #[cfg(target_arch = "x86_64")]
    if clmul {
        // SAFETY: `clmul` is only set after runtime detection of the required features.
        unsafe { mul_words_clmul(a, b, out) };
        return;
    }
    let _ = clmul;
    mul_words_soft(a, b, out);
}

fn bit(a: &[u64], i: usize) -> bool {
    (a[i / 64] >> (i % 64)) & 1 == 1
}

fn flip(a: &mut [u64], i: usize) {
    a[i / 64] ^= 1 << (i % 64);
}

/// Removes and returns the `len <= 64` bits of `a` starting at `lo`.
fn take_bits(a: &mut [u64], lo: usize, len: usize) -> u64 {
    let (w, b) = (lo / 64, lo % 64);
    let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
    let mut v = a[w] >> b;
    if b > 0 && b + len > 64 {
        v |= a[w + 1] << (64 - b);
    }
    v &= mask;
    a[w] &= !(mask << b);
    if b > 0 && b + len > 64 {
        a[w + 1] &= !(mask >> (64 - b));
    }
    v
}

/// XOR of `v << pos` into `a`.
fn xor_bits(a: &mut [u64], pos: usize, v: u64) {
    let (w, b) = (pos / 64, pos % 64);
    a[w] ^= v << b;
    if b > 0 {
        let spill = v >> (64 - b);
        if spill != 0 {
            a[w + 1] ^= spill;
        }
    }
}

fn bit_degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&w| w != 0).map(|i| i * 64 + 63 - a[i].leading_zeros() as usize)
}

/// XOR of `src << shift` into `dst` (bits falling past `dst` are dropped).
fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    for (i, &w) in src.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let k = i + ws;
        if k < dst.len() {
            dst[k] ^= w << bs;
        }
        if bs > 0 && k + 1 < dst.len() {
            dst[k + 1] ^= w >> (64 - bs);
        }
    }
}

/// Sparse modulus X^N + sum_{e in terms} X^e with every e < N.
#[derive(Clone, Debug, PartialEq, Eq)]
struct SparseModulus {
    n: usize,
    terms: Vec<usize>,
}

impl SparseModulus {
    fn words(&self) -> usize {
        self.n.div_ceil(64)
    }

    /// Reduces `p` in place; on return only the low `words()` words can be nonzero.
    fn reduce(&self, p: &mut [u64], _hi: &mut Vec<u64>) {
        let n = self.n;
        let tmax = self.terms.iter().copied().max().unwrap_or(0);
        let Some(mut top) = bit_degree(p) else { return };
        while top >= n {
            let lo = n.max(top.saturating_sub(63));
            let chunk = take_bits(p, lo, top - lo + 1);
            if chunk != 0 {
                for &t in &self.terms {
                    xor_bits(p, lo - n + t, chunk);
                }
            }
            top = (lo.saturating_sub(1)).max(top - n + tmax);
            if top < n {
                break;
            }
        }
    }

    fn as_bits(&self) -> Vec<u64> {
        let mut m = vec![0u64; (self.n + 1).div_ceil(64)];
        flip(&mut m, self.n);
        for &e in &self.terms {
            flip(&mut m, e);
        }
        m
    }
}

/// Remainder of general bit polynomials.
fn bit_rem(a: &[u64], m: &[u64]) -> Vec<u64> {
    let dm = bit_degree(m).expect("nonzero modulus");
    let mut r = a.to_vec();
    while let Some(d) = bit_degree(&r) {
        if d < dm {
            break;
        }
        xor_shifted(&mut r, m, d - dm);
    }
    r
}

fn bit_gcd(a: &[u64], b: &[u64]) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while bit_degree(&y).is_some() {
        let r = bit_rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test for a sparse binary modulus.
fn sparse_is_irreducible(m: &SparseModulus, clmul: bool) -> bool {
    let n = m.n;
    let w = m.words();
    let checkpoints: Vec<usize> = prime_factors(n as u64).into_iter().map(|l| n / l as usize).collect();
    let mut x = vec![0u64; w];
    flip(&mut x, 1 % n.max(2));
    if n == 1 {
        return true;
    }
    let mut h = x.clone();
    let mut prod = vec![0u64; 2 * w];
    let mut scratch = Vec::new();
    let mbits = m.as_bits();
    for i in 1..=n {
        mul_words(clmul, &h, &h, &mut prod);
        m.reduce(&mut prod, &mut scratch);
        h.copy_from_slice(&prod[..w]);
        if checkpoints.contains(&i) {
            let mut diff = h.clone();
            diff[0] ^= 2;
            if bit_degree(&diff).is_none() {
                return false;
            }
            let g = bit_gcd(&mbits, &diff);
            if bit_degree(&g) != Some(0) {
                return false;
            }
        }
    }
    h == x
}

fn find_sparse_modulus(n: usize, rng: &mut ChaCha8Rng, clmul: bool) -> Result<SparseModulus> {
    if n == 1 {
        return Ok(SparseModulus { n, terms: vec![0] });
    }
    let half = (n / 2).max(1);
    let mut middles: Vec<usize> = (1..=half).collect();
    middles.shuffle(rng);
    for a in middles {
        let m = SparseModulus { n, terms: vec![0, a] };
        if sparse_is_irreducible(&m, clmul) {
            return Ok(m);
        }
    }
    if n >= 4 {
        let hi = half.max(3);
        for _ in 0..200_000 {
            let mut t: Vec<usize> = Vec::with_capacity(3);
            while t.len() < 3 {
                let e = rng.gen_range(1..=hi.min(n - 1));
                if !t.contains(&e) {
                    t.push(e);
                }
            }
            t.sort_unstable();
            let mut terms = vec![0];
            terms.extend(t);
            let m = SparseModulus { n, terms };
            if sparse_is_irreducible(&m, clmul) {
                return Ok(m);
            }
        }
    }
    Err(Error::NoIrreducible)
}

// ---------------------------------------------------------------------------
// Binary backend

pub struct BinaryExt {
    base: Arc<Field>,
    digits: usize,
    bits: usize,
    words: usize,
    modulus: SparseModulus,
    clmul: bool,
    /// rho_table[j * q + c] = emb(c) * X^j.
    rho_table: Vec<Vec<u64>>,
    /// Row k of the inverse coordinate matrix: bit k of rho^{-1}(a) is the parity of (row & a).
    inv_rows: Vec<Vec<u64>>,
}

impl fmt::Debug for BinaryExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) terms {:?}", self.bits, self.modulus.terms)
    }
}

impl BinaryExt {
    /// GF(q^digits) for q = 2^n, modulus chosen from `seed`.
    pub fn create(base: Arc<Field>, digits: usize, seed: u64) -> Result<BinaryExt> {
        if base.characteristic() != 2 {
            return Err(Error::InvalidParams("binary backend needs characteristic 2".into()));
        }
        let bits = base.degree() as usize * digits;
        let clmul = has_clmul();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modulus = find_sparse_modulus(bits, &mut rng, clmul)?;
        BinaryExt::with_modulus(base, digits, modulus, clmul)
    }

    fn with_modulus(base: Arc<Field>, digits: usize, modulus: SparseModulus, clmul: bool) -> Result<BinaryExt> {
        let bits = modulus.n;
        let words = bits.div_ceil(64);
        let mut ext = BinaryExt {
            base,
            digits,
            bits,
            words,
            modulus,
            clmul,
            rho_table: Vec::new(),
            inv_rows: Vec::new(),
        };
        let theta = ext.base_root()?;
        let n = ext.base.degree() as usize;
        let q = ext.base.size();
        // Powers of theta give the embedding of the base power basis.
        let mut theta_pows = vec![ext.one_words()];
        for i in 1..n {
            let next = ext.mul_words(&theta_pows[i - 1], &theta);
            theta_pows.push(next);
        }
        let emb: Vec<Vec<u64>> = (0..q)
            .map(|c| {
                let mut acc = vec![0u64; words];
                for (i, d) in ext.base.digits(Fe(c as u16)).into_iter().enumerate() {
                    if d == 1 {
                        for (a, b) in acc.iter_mut().zip(&theta_pows[i]) {
                            *a ^= b;
                        }
                    }
                }
                acc
            })
            .collect();
        let mut table = Vec::with_capacity(digits * q);
        for j in 0..digits {
            for e in &emb {
                let mut p = vec![0u64; 2 * words + 1];
                xor_shifted(&mut p, e, j);
                ext.modulus.reduce(&mut p, &mut Vec::new());
                p.truncate(words);
                table.push(p);
            }
        }
        ext.rho_table = table;
        ext.inv_rows = ext.invert_coordinates()?;
        Ok(ext)
    }

    fn one_words(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.words];
        v[0] = 1;
        v
    }

    fn mul_words(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut prod = vec![0u64; 2 * self.words];
        mul_words(self.clmul, a, b, &mut prod);
        self.modulus.reduce(&mut prod, &mut Vec::new());
        prod.truncate(self.words);
        prod
    }

    fn pow_words(&self, a: &[u64], e: &[u64]) -> Vec<u64> {
        // e given as little-endian words
        let mut acc = self.one_words();
        for i in (0..e.len() * 64).rev() {
            acc = self.mul_words(&acc, &acc);
            if bit(e, i) {
                acc = self.mul_words(&acc, a);
            }
        }
        acc
    }

    /// A root of the base-field modulus inside this field (the numerically smallest one).
    fn base_root(&self) -> Result<Vec<u64>> {
        let n = self.base.degree() as usize;
        let sub_order: u64 = (1u64 << n) - 1;
        let modulus = self.base.modulus().to_vec();
        if n == 1 {
            // base modulus is X + c with c in {0, 1}; the root is c.
            let mut v = vec![0u64; self.words];
            v[0] = modulus[0] as u64;
            return Ok(v);
        }
        // Norm-like map z -> z^{(2^N - 1)/(2^n - 1)} = prod_j z^{2^{nj}} lands in GF(2^n).
        let norm = |z: &[u64]| -> Vec<u64> {
            let mut acc = self.one_words();
            let mut conj = z.to_vec();
            for _ in 0..self.digits {
                acc = self.mul_words(&acc, &conj);
                for _ in 0..n {
                    conj = self.mul_words(&conj, &conj);
                }
            }
            acc
        };
        let factors = prime_factors(sub_order);
        let mut counter: u64 = 2;
        let w = loop {
            let mut z = vec![0u64; self.words];
            for i in 0..64 {
                if (counter >> i) & 1 == 1 && i < self.bits {
                    flip(&mut z, i);
                }
            }
            counter += 1;
            if counter > 1 << 20 {
                return Err(Error::Invariant("no subfield generator found".into()));
            }
            let w = norm(&z);
            if bit_degree(&w).is_none() {
                continue;
            }
            let primitive = factors.iter().all(|&l| self.pow_words(&w, &[sub_order / l]) != self.one_words());
            if primitive {
                break w;
            }
        };
        let mut roots = Vec::new();
        let mut x = self.one_words();
        for _ in 0..sub_order {
            // evaluate the base modulus (0/1 coefficients) at x
            let mut acc = vec![0u64; self.words];
            let mut pw = self.one_words();
            for &c in &modulus {
                if c == 1 {
                    for (a, b) in acc.iter_mut().zip(&pw) {
                        *a ^= b;
                    }
                }
                pw = self.mul_words(&pw, &x);
            }
            if bit_degree(&acc).is_none() {
                roots.push(x.clone());
            }
            x = self.mul_words(&x, &w);
        }
        roots.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        roots.into_iter().next().ok_or_else(|| Error::Invariant("base modulus has no root in the extension".into()))
    }

    fn invert_coordinates(&self) -> Result<Vec<Vec<u64>>> {
        let n = self.base.degree() as usize;
        let q = self.base.size();
        let size = self.bits;
        let w = self.words;
        // Column k = j*n + i is rho(Y^i e_j); build rows of [M | I].
        let mut rows: Vec<Vec<u64>> = vec![vec![0u64; 2 * w]; size];
        for j in 0..self.digits {
            for i in 0..n {
                let k = j * n + i;
                let col = &self.rho_table[j * q + (1usize << i)];
                for (r, row) in rows.iter_mut().enumerate() {
                    if bit(col, r) {
                        flip(&mut row[..w], k);
                    }
                }
            }
        }
        for (r, row) in rows.iter_mut().enumerate() {
            flip(&mut row[w..], r);
        }
        for c in 0..size {
            let pr = (c..size).find(|&r| bit(&rows[r][..w], c)).ok_or_else(|| Error::Invariant("coordinate map is singular".into()))?;
            rows.swap(c, pr);
            let pivot = rows[c].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != c && bit(&row[..w], c) {
                    for (a, b) in row.iter_mut().zip(&pivot) {
                        *a ^= b;
                    }
                }
            }
        }
        // Now rows hold [I | M^{-1}].
        Ok(rows.into_iter().map(|r| r[w..].to_vec()).collect())
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn modulus_terms(&self) -> &[usize] {
        &self.modulus.terms
    }

    /// Rebuilds the field from a modulus string of N+1 binary digits.
    pub fn from_modulus_string(base: Arc<Field>, digits: usize, s: &str) -> Result<BinaryExt> {
        let d = parse_digits(s)?;
        let n = base.degree() as usize * digits;
        if d.len() != n + 1 || d[n] != 1 || d.iter().any(|&x| x > 1) {
            return Err(Error::Parse("binary modulus has the wrong shape".into()));
        }
        let terms: Vec<usize> = (0..n).filter(|&i| d[i] == 1).collect();
        let m = SparseModulus { n, terms };
        let clmul = has_clmul();
        if !sparse_is_irreducible(&m, clmul) {
            return Err(Error::InvalidParams("binary modulus is reducible".into()));
        }
        BinaryExt::with_modulus(base, digits, m, clmul)
    }

    /// In-place Horner step acc = acc * x + c using caller scratch.
    fn horner_step(&self, acc: &mut [u64], x: &[u64], c: &[u64], prod: &mut [u64], scratch: &mut Vec<u64>) {
        mul_words(self.clmul, acc, x, prod);
        self.modulus.reduce(prod, scratch);
        for ((a, p), cc) in acc.iter_mut().zip(prod.iter()).zip(c) {
            *a = p ^ cc;
        }
    }

    fn digit_bit(&self, a: &[u64], k: usize) -> u32 {
        let row = &self.inv_rows[k];
        let mut par = 0u32;
        for (x, y) in row.iter().zip(a) {
            par ^= (x & y).count_ones();
        }
        par & 1
    }
}

impl BigField for BinaryExt {
    type Elem = Vec<u64>;

    fn base(&self) -> &Arc<Field> {
        &self.base
    }

    fn digits(&self) -> usize {
        self.digits
    }

    fn zero(&self) -> Vec<u64> {
        vec![0u64; self.words]
    }

    fn one(&self) -> Vec<u64> {
        self.one_words()
    }

    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&w| w == 0)
    }

    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| x ^ y).collect()
    }

    fn add_assign(&self, a: &mut Vec<u64>, b: &Vec<u64>) {
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= y;
        }
    }

    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        self.mul_words(a, b)
    }

    fn add_rho_term(&self, acc: &mut Vec<u64>, j: usize, c: Fe) {
        if c.is_zero() {
            return;
        }
        let t = &self.rho_table[j * self.base.size() + c.index()];
        for (x, y) in acc.iter_mut().zip(t) {
            *x ^= y;
        }
    }

    fn rho_inv(&self, a: &Vec<u64>) -> Vec<Fe> {
        let n = self.base.degree() as usize;
        (0..self.digits)
            .map(|j| {
                let v: u32 = (0..n).map(|i| self.digit_bit(a, j * n + i) << i).sum();
                Fe(v as u16)
            })
            .collect()
    }

    fn trailing_digits_zero(&self, a: &Vec<u64>, count: usize) -> bool {
        let n = self.base.degree() as usize;
        ((self.digits - count) * n..self.digits * n).all(|k| self.digit_bit(a, k) == 0)
    }

    fn random(&self, rng: &mut dyn RngCore) -> Vec<u64> {
        let mut v: Vec<u64> = (0..self.words).map(|_| rng.next_u64()).collect();
        let extra = self.words * 64 - self.bits;
        if extra > 0 {
            *v.last_mut().unwrap() &= u64::MAX >> extra;
        }
        v
    }

    fn to_digit_string(&self, a: &Vec<u64>) -> String {
        (0..self.bits).map(|i| if bit(a, i) { '1' } else { '0' }).collect()
    }

    fn parse_elem(&self, s: &str) -> Result<Vec<u64>> {
        let d = parse_digits(s)?;
        if d.len() != self.bits || d.iter().any(|&x| x > 1) {
            return Err(Error::Parse(format!("expected {} binary digits", self.bits)));
        }
        let mut v = vec![0u64; self.words];
        for (i, &x) in d.iter().enumerate() {
            if x == 1 {
                flip(&mut v, i);
            }
        }
        Ok(v)
    }

    fn modulus_string(&self) -> String {
        let m = self.modulus.as_bits();
        (0..=self.bits).map(|i| if bit(&m, i) { '1' } else { '0' }).collect()
    }

    fn eval_poly(&self, coeffs: &[Vec<u64>], x: &Vec<u64>) -> Vec<u64> {
        let mut acc = self.zero();
        let mut prod = vec![0u64; 2 * self.words];
        let mut scratch = Vec::with_capacity(self.words + 1);
        for c in coeffs.iter().rev() {
            self.horner_step(&mut acc, x, c, &mut prod, &mut scratch);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Generic backend

pub struct PolyExt {
    base: Arc<Field>,
    modulus: Vec<Fe>,
}

impl fmt::Debug for PolyExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) over {:?}", self.base.size(), self.digits(), self.base)
    }
}

impl PolyExt {
    pub fn create(base: Arc<Field>, digits: usize, seed: u64) -> Result<PolyExt> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = base.size() as u32;
        if digits == 1 {
            return Ok(PolyExt { base, modulus: vec![Fe::ZERO, Fe::ONE] });
        }
        for _ in 0..100_000 {
            let mut m: Vec<Fe> = (0..digits).map(|_| Fe(rng.gen_range(0..q) as u16)).collect();
            m.push(Fe::ONE);
            if m[0].is_zero() {
                continue;
            }
            if poly::is_irreducible(&base, &m) {
                return Ok(PolyExt { base, modulus: m });
            }
        }
        Err(Error::NoIrreducible)
    }

    pub fn from_modulus_string(base: Arc<Field>, digits: usize, s: &str) -> Result<PolyExt> {
        let n = base.degree() as usize;
        let d = parse_digits(s)?;
        if d.len() != (digits + 1) * n {
            return Err(Error::Parse("extension modulus has the wrong length".into()));
        }
        let m: Vec<Fe> = d.chunks(n).map(|c| base.from_digits(c)).collect::<Result<_>>()?;
        if m[digits] != Fe::ONE || !poly::is_irreducible(&base, &m) {
            return Err(Error::InvalidParams("extension modulus is not monic irreducible".into()));
        }
        Ok(PolyExt { base, modulus: m })
    }
}

impl BigField for PolyExt {
    type Elem = Vec<Fe>;

    fn base(&self) -> &Arc<Field> {
        &self.base
    }

    fn digits(&self) -> usize {
        self.modulus.len() - 1
    }

    fn zero(&self) -> Vec<Fe> {
        vec![Fe::ZERO; self.digits()]
    }

    fn one(&self) -> Vec<Fe> {
        let mut v = self.zero();
        v[0] = Fe::ONE;
        v
    }

    fn is_zero(&self, a: &Vec<Fe>) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    fn add(&self, a: &Vec<Fe>, b: &Vec<Fe>) -> Vec<Fe> {
        self.base.add_vec(a, b)
    }

    fn add_assign(&self, a: &mut Vec<Fe>, b: &Vec<Fe>) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = self.base.add(*x, y);
        }
    }

    fn mul(&self, a: &Vec<Fe>, b: &Vec<Fe>) -> Vec<Fe> {
        let f = &self.base;
        let d = self.digits();
        let mut prod = vec![Fe::ZERO; 2 * d];
        for (i, &x) in a.iter().enumerate() {
            f.axpy(&mut prod[i..i + d], x, b);
        }
        for deg in (d..2 * d).rev() {
            let c = prod[deg];
            if !c.is_zero() {
                let nc = f.neg(c);
                f.axpy(&mut prod[deg - d..deg], nc, &self.modulus[..d]);
                prod[deg] = Fe::ZERO;
            }
        }
        prod.truncate(d);
        prod
    }

    fn add_rho_term(&self, acc: &mut Vec<Fe>, j: usize, c: Fe) {
        acc[j] = self.base.add(acc[j], c);
    }

    fn rho_inv(&self, a: &Vec<Fe>) -> Vec<Fe> {
        a.clone()
    }

    fn trailing_digits_zero(&self, a: &Vec<Fe>, count: usize) -> bool {
        a[a.len() - count..].iter().all(|c| c.is_zero())
    }

    fn random(&self, rng: &mut dyn RngCore) -> Vec<Fe> {
        let q = self.base.size() as u32;
        (0..self.digits()).map(|_| Fe(rng.gen_range(0..q) as u16)).collect()
    }

    fn to_digit_string(&self, a: &Vec<Fe>) -> String {
        a.iter().map(|&c| self.base.to_digit_string(c)).collect()
    }

    fn parse_elem(&self, s: &str) -> Result<Vec<Fe>> {
        let n = self.base.degree() as usize;
        let d = parse_digits(s)?;
        if d.len() != n * self.digits() {
            return Err(Error::Parse(format!("expected {} digits", n * self.digits())));
        }
        d.chunks(n).map(|c| self.base.from_digits(c)).collect()
    }

    fn modulus_string(&self) -> String {
        self.modulus.iter().flat_map(|&c| self.base.digits(c)).map(digit_char).collect()
    }
}

// ---------------------------------------------------------------------------

/// One level GF(q^{iΔ}) of an extension tower.
#[derive(Clone, Debug)]
pub enum ExtField {
    Binary(Arc<BinaryExt>),
    Poly(Arc<PolyExt>),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Binary,
    Poly,
}

impl Backend {
    pub fn default_for(base: &Field) -> Backend {
        if base.characteristic() == 2 {
            Backend::Binary
        } else {
            Backend::Poly
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Binary => "binary",
            Backend::Poly => "poly",
        }
    }
}

impl ExtField {
    pub fn create(base: Arc<Field>, digits: usize, backend: Backend, seed: u64) -> Result<ExtField> {
        Ok(match backend {
            Backend::Binary => ExtField::Binary(Arc::new(BinaryExt::create(base, digits, seed)?)),
            Backend::Poly => ExtField::Poly(Arc::new(PolyExt::create(base, digits, seed)?)),
        })
    }

    pub fn digits(&self) -> usize {
        match self {
            ExtField::Binary(b) => b.digits(),
            ExtField::Poly(p) => p.digits(),
        }
    }
}

/// GF(q^{iΔ}) for i = 1..=b, each with its coordinate map rho_i.
pub fn extension_tower(base: Arc<Field>, delta: usize, b: usize, backend: Backend, seed: u64) -> Result<Vec<ExtField>> {
    if delta == 0 || b == 0 {
        return Err(Error::InvalidParams("tower needs positive Δ and b".into()));
    }
    (1..=b)
        .map(|i| ExtField::create(base.clone(), i * delta, backend, seed.wrapping_add(i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
        .collect()
}
