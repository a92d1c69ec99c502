//! Dense univariate polynomials over a [`Field`], lowest-degree coefficient first.

use super::field::{Fe, Field};

pub fn trim(a: &mut Vec<Fe>) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

pub fn degree(a: &[Fe]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

pub fn add(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut out: Vec<Fe> = (0..a.len().max(b.len()))
        .map(|i| f.add(*a.get(i).unwrap_or(&Fe::ZERO), *b.get(i).unwrap_or(&Fe::ZERO)))
        .collect();
    trim(&mut out);
    out
}

pub fn sub(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let nb: Vec<Fe> = b.iter().map(|&c| f.neg(c)).collect();
    add(f, a, &nb)
}

pub fn mul(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Fe::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder; panics when `b` is zero.
pub fn divrem(f: &Field, a: &[Fe], b: &[Fe]) -> (Vec<Fe>, Vec<Fe>) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = f.inv(b[db]);
    let mut rem: Vec<Fe> = a.to_vec();
    trim(&mut rem);
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Fe::ZERO; rem.len() - db];
    for i in (db..rem.len()).rev() {
        let c = rem[i];
        if c.is_zero() {
            continue;
        }
        let t = f.mul(c, lead_inv);
        quot[i - db] = t;
        for (j, &bj) in b.iter().enumerate().take(db + 1) {
            rem[i - db + j] = f.sub(rem[i - db + j], f.mul(t, bj));
        }
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

pub fn rem(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    divrem(f, a, b).1
}

pub fn gcd(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    if let Some(d) = degree(&x) {
        let inv = f.inv(x[d]);
        x.iter_mut().for_each(|c| *c = f.mul(*c, inv));
    }
    x
}

pub fn mulmod(f: &Field, a: &[Fe], b: &[Fe], m: &[Fe]) -> Vec<Fe> {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod(f: &Field, a: &[Fe], mut e: u128, m: &[Fe]) -> Vec<Fe> {
    let mut base = rem(f, a, m);
    let mut acc = rem(f, &[Fe::ONE], m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &base, m);
        }
        base = mulmod(f, &base, &base, m);
        e >>= 1;
    }
    acc
}

pub fn eval(f: &Field, a: &[Fe], x: Fe) -> Fe {
    a.iter().rev().fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Ben-Or test: `m` of degree n is irreducible iff gcd(X^{q^d} - X, m) = 1 for all d <= n/2.
pub fn is_irreducible(f: &Field, m: &[Fe]) -> bool {
    let n = match degree(m) {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    let x = vec![Fe::ZERO, Fe::ONE];
    let mut xp = x.clone();
    for _ in 1..=n / 2 {
        xp = powmod(f, &xp, f.size() as u128, m);
        let g = gcd(f, m, &sub(f, &xp, &x));
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

pub fn roots(f: &Field, a: &[Fe]) -> Vec<Fe> {
    f.elements().filter(|&x| eval(f, a, x).is_zero()).collect()
}
