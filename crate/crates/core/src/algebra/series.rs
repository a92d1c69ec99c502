//! Truncated Laurent series with absolute-precision tracking, over any field
//! implementing [`Scalars`].

use std::fmt::Debug;

use super::field::{Fe, Field};
use crate::error::{Error, Result};

/// Field arithmetic needed by [`Series`].
pub trait Scalars {
    type Elem: Copy + Eq + Default + Debug;

    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Self::Elem;

    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        self.add(a, self.neg(b))
    }

    fn pow(&self, a: Self::Elem, mut e: u64) -> Self::Elem {
        let (mut acc, mut base) = (self.one(), a);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// dst += a * src
    fn axpy(&self, dst: &mut [Self::Elem], a: Self::Elem, src: &[Self::Elem]) {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = self.add(*d, self.mul(a, s));
        }
    }
}

impl Scalars for Field {
    type Elem = Fe;

    fn one(&self) -> Fe {
        Fe::ONE
    }
    fn add(&self, a: Fe, b: Fe) -> Fe {
        Field::add(self, a, b)
    }
    fn neg(&self, a: Fe) -> Fe {
        Field::neg(self, a)
    }
    fn sub(&self, a: Fe, b: Fe) -> Fe {
        Field::sub(self, a, b)
    }
    fn mul(&self, a: Fe, b: Fe) -> Fe {
        Field::mul(self, a, b)
    }
    fn inv(&self, a: Fe) -> Fe {
        Field::inv(self, a)
    }
    fn pow(&self, a: Fe, e: u64) -> Fe {
        Field::pow(self, a, e)
    }
    fn axpy(&self, dst: &mut [Fe], a: Fe, src: &[Fe]) {
        Field::axpy(self, dst, a, src)
    }
}

/// `sum_{e = start}^{prec - 1} coeffs[e - start] z^e + O(z^prec)`; everything below `start` is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series<E> {
    start: i64,
    coeffs: Vec<E>,
    prec: i64,
}

pub type Laurent = Series<Fe>;

impl<E: Copy + Eq + Default + Debug> Series<E> {
    pub fn zero(prec: i64) -> Series<E> {
        Series { start: prec, coeffs: Vec::new(), prec }
    }

    pub fn monomial(c: E, e: i64, prec: i64) -> Series<E> {
        let mut s = Series::zero(prec);
        if e < prec {
            s.start = e;
            s.coeffs = vec![E::default(); (prec - e) as usize];
            s.coeffs[0] = c;
        }
        s
    }

    pub fn constant(c: E, prec: i64) -> Series<E> {
        Series::monomial(c, 0, prec)
    }

    /// Series with `coeffs[i]` at exponent `start + i`, known up to `prec`.
    pub fn new(start: i64, mut coeffs: Vec<E>, prec: i64) -> Series<E> {
        if prec <= start {
            return Series::zero(prec);
        }
        coeffs.resize((prec - start) as usize, E::default());
        Series { start, coeffs, prec }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn coeff(&self, e: i64) -> E {
        assert!(e < self.prec, "coefficient {e} beyond precision {}", self.prec);
        if e < self.start {
            E::default()
        } else {
            self.coeffs[(e - self.start) as usize]
        }
    }

    /// Coefficients for exponents `from..to` (all must be known).
    pub fn window(&self, from: i64, to: i64) -> Vec<E> {
        (from..to).map(|e| self.coeff(e)).collect()
    }

    /// First exponent with a nonzero coefficient, if any below the precision.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| *c != E::default()).map(|i| self.start + i as i64)
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn truncate(&self, prec: i64) -> Series<E> {
        if prec >= self.prec {
            return self.clone();
        }
        if prec <= self.start {
            return Series::zero(prec);
        }
        Series { start: self.start, coeffs: self.coeffs[..(prec - self.start) as usize].to_vec(), prec }
    }

    fn normalized(mut self) -> Series<E> {
        match self.valuation() {
            Some(v) => {
                let skip = (v - self.start) as usize;
                self.coeffs.drain(..skip);
                self.start = v;
                self
            }
            None => Series::zero(self.prec),
        }
    }

    pub fn add<S: Scalars<Elem = E>>(&self, f: &S, o: &Series<E>) -> Series<E> {
        let prec = self.prec.min(o.prec);
        let start = self.start.min(o.start).min(prec);
        let coeffs = (start..prec)
            .map(|e| {
                let a = if e >= self.start { self.coeffs[(e - self.start) as usize] } else { E::default() };
                let b = if e >= o.start { o.coeffs[(e - o.start) as usize] } else { E::default() };
                f.add(a, b)
            })
            .collect();
        Series { start, coeffs, prec }.normalized()
    }

    pub fn neg<S: Scalars<Elem = E>>(&self, f: &S) -> Series<E> {
        Series { start: self.start, coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(), prec: self.prec }
    }

    pub fn sub<S: Scalars<Elem = E>>(&self, f: &S, o: &Series<E>) -> Series<E> {
        self.add(f, &o.neg(f))
    }

    pub fn scale<S: Scalars<Elem = E>>(&self, f: &S, c: E) -> Series<E> {
        if c == E::default() {
            return Series::zero(self.prec);
        }
        Series { start: self.start, coeffs: self.coeffs.iter().map(|&x| f.mul(x, c)).collect(), prec: self.prec }
    }

    /// Multiply by z^k.
    pub fn shift(&self, k: i64) -> Series<E> {
        Series { start: self.start + k, coeffs: self.coeffs.clone(), prec: self.prec + k }
    }

    pub fn mul<S: Scalars<Elem = E>>(&self, f: &S, o: &Series<E>) -> Series<E> {
        let va = self.valuation();
        let vb = o.valuation();
        let (va_eff, vb_eff) = (va.unwrap_or(self.prec), vb.unwrap_or(o.prec));
        let prec = (va_eff + o.prec).min(vb_eff + self.prec);
        let (Some(va), Some(vb)) = (va, vb) else {
            return Series::zero(prec);
        };
        let start = va + vb;
        if prec <= start {
            return Series::zero(prec);
        }
        let n = (prec - start) as usize;
        let a = &self.coeffs[(va - self.start) as usize..];
        let b = &o.coeffs[(vb - o.start) as usize..];
        let mut out = vec![E::default(); n];
        for (i, &x) in a.iter().enumerate().take(n) {
            if x == E::default() {
                continue;
            }
            let len = (n - i).min(b.len());
            f.axpy(&mut out[i..i + len], x, &b[..len]);
        }
        Series { start, coeffs: out, prec }
    }

    /// Product known only below `target`; inputs are cut before multiplying.
    pub fn mul_to<S: Scalars<Elem = E>>(&self, f: &S, o: &Series<E>, target: i64) -> Series<E> {
        let (Some(va), Some(vb)) = (self.valuation(), o.valuation()) else {
            return self.mul(f, o).truncate(target);
        };
        self.truncate((target - vb).max(va + 1)).mul(f, &o.truncate((target - va).max(vb + 1))).truncate(target)
    }

    /// Applies `g` to every coefficient; `g` must fix zero and be injective.
    pub fn map_coeffs(&self, g: impl Fn(E) -> E) -> Series<E> {
        Series { start: self.start, coeffs: self.coeffs.iter().map(|&c| g(c)).collect(), prec: self.prec }
    }

    /// Multiplicative inverse, keeping the relative precision.
    pub fn inverse<S: Scalars<Elem = E>>(&self, f: &S) -> Result<Series<E>> {
        let v = self.valuation().ok_or(Error::ZeroSeries)?;
        let a = &self.coeffs[(v - self.start) as usize..];
        let n = a.len();
        let a0_inv = f.inv(a[0]);
        let mut c = vec![E::default(); n];
        c[0] = a0_inv;
        for j in 1..n {
            let mut acc = E::default();
            for i in 1..=j {
                acc = f.add(acc, f.mul(a[i], c[j - i]));
            }
            c[j] = f.neg(f.mul(acc, a0_inv));
        }
        Ok(Series { start: -v, coeffs: c, prec: -v + n as i64 })
    }

    pub fn pow<S: Scalars<Elem = E>>(&self, f: &S, mut e: u64) -> Series<E> {
        if e == 0 {
            return Series::constant(f.one(), self.prec - self.valuation().unwrap_or(self.prec).min(self.prec));
        }
        let mut acc: Option<Series<E>> = None;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(f, &base),
                    None => base.clone(),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base);
            }
        }
        acc.expect("positive exponent")
    }

    /// self^r where r is a power of the characteristic: coefficients and exponents map to their r-th powers.
    pub fn frobenius<S: Scalars<Elem = E>>(&self, f: &S, r: u64) -> Series<E> {
        let ri = r as i64;
        let Some(v) = self.valuation() else {
            return Series::zero(self.prec.saturating_mul(ri));
        };
        let prec = self.prec * ri;
        let start = v * ri;
        let mut coeffs = vec![E::default(); (prec - start) as usize];
        for e in v..self.prec {
            coeffs[((e - v) * ri) as usize] = f.pow(self.coeff(e), r);
        }
        Series { start, coeffs, prec }
    }

    /// Substitute z = t where t is a series of positive valuation.
    pub fn compose<S: Scalars<Elem = E>>(&self, f: &S, t: &Series<E>) -> Result<Series<E>> {
        self.compose_to(f, t, i64::MAX)
    }

    /// Like [`Series::compose`], with the result truncated at absolute precision `target`.
    pub fn compose_to<S: Scalars<Elem = E>>(&self, f: &S, t: &Series<E>, target: i64) -> Result<Series<E>> {
        let vt = t.valuation().ok_or(Error::ZeroSeries)?;
        assert!(vt > 0, "substitution needs positive valuation");
        let Some(v) = self.valuation() else {
            return Ok(Series::zero(self.prec.saturating_mul(vt).min(target)));
        };
        // Horner on the polynomial part; the tail O(z^prec) becomes O(t^(prec - v)).
        let bound = ((self.prec - v) * vt).min(target.saturating_sub(v * vt));
        if bound <= 0 {
            return Ok(Series::zero(target.min(v * vt)));
        }
        let t = &t.truncate(bound + vt);
        let mut acc = Series::zero(bound);
        for e in (v..self.prec).rev() {
            acc = acc.mul(f, t).truncate(bound).add(f, &Series::constant(self.coeff(e), bound));
        }
        let tv = if v == 0 {
            Series::constant(f.one(), bound)
        } else if v > 0 {
            t.pow(f, v as u64)
        } else {
            t.inverse(f)?.pow(f, (-v) as u64)
        };
        Ok(acc.mul(f, &tv))
    }
}

/// Solves y^r + y = a for a of positive valuation, the unique solution of positive valuation.
pub fn artin_schreier_positive<S: Scalars>(f: &S, a: &Series<S::Elem>, r: u64) -> Series<S::Elem> {
    let Some(v) = a.valuation() else {
        return Series::zero(a.prec());
    };
    assert!(v > 0, "right-hand side must vanish at the place");
    let ri = r as i64;
    let n = (a.prec() - v) as usize;
    let mut y = vec![S::Elem::default(); n];
    for idx in 0..n {
        let e = v + idx as i64;
        let mut c = a.coeff(e);
        if e % ri == 0 && e / ri >= v {
            let prev = y[(e / ri - v) as usize];
            c = f.sub(c, f.pow(prev, r));
        }
        y[idx] = c;
    }
    Series::new(v, y, a.prec())
}
