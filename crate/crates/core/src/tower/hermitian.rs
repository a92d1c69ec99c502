//! The Hermitian tower x_{i+1}^r + x_{i+1} = x_i^{r+1} over GF(r^2).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{artin_schreier_table, ipow, place_key, prime_power, RrSpace, Tower, TowerKind};
use crate::algebra::series::artin_schreier_positive;
use crate::algebra::{Fe, Field, Laurent};
use crate::error::{Error, Result};

pub struct Hermitian {
    r: usize,
    e: usize,
    field: Arc<Field>,
    gamma: Fe,
    places: Vec<Vec<Fe>>,
    orbit_places: Vec<Vec<Fe>>,
    /// Per-coordinate place multipliers γ^{-(r+1)^{i-1}}.
    place_mult: Vec<Fe>,
}

/// Closed-form genus of the e-th Hermitian function field.
pub fn hermitian_genus(r: usize, e: usize) -> usize {
    let mut sum = 0usize;
    for i in 1..e {
        sum += ipow(r, e - i + 1) * ipow(r + 1, i - 1);
    }
    (sum + 1 - ipow(r + 1, e - 1)) / 2
}

impl Hermitian {
    pub fn new(r: usize, e: usize, field_seed: u64) -> Result<Hermitian> {
        let (p, k) = prime_power(r).ok_or_else(|| Error::InvalidParams(format!("r = {r} is not a prime power")))?;
        if e < 2 {
            return Err(Error::InvalidParams("the tower needs e >= 2".into()));
        }
        if r < 2 * e {
            return Err(Error::InvalidParams(format!("r = {r} must be at least 2e = {}", 2 * e)));
        }
        let field = Arc::new(Field::create(p, 2 * k, field_seed)?);
        Hermitian::with_field(r, e, field)
    }

    pub fn with_field(r: usize, e: usize, field: Arc<Field>) -> Result<Hermitian> {
        if field.size() != r * r {
            return Err(Error::InvalidParams("field size must be r^2".into()));
        }
        let f = &*field;
        let gamma = f.primitive_element();
        let table = artin_schreier_table(f, r);
        let mut places: Vec<Vec<Fe>> = f.elements().map(|a| vec![a]).collect();
        for _ in 1..e {
            let mut next = Vec::with_capacity(places.len() * r);
            for p in &places {
                let last = *p.last().unwrap();
                let rhs = f.pow(last, r as u64 + 1);
                for &b in &table[rhs.index()] {
                    let mut np = p.clone();
                    np.push(b);
                    next.push(np);
                }
            }
            places = next;
        }
        places.sort_by_key(|p| place_key(f, p));
        let orbit_places = places.iter().filter(|p| !p[0].is_zero()).cloned().collect();
        let gamma_inv = f.inv(gamma);
        let place_mult = (0..e).map(|i| f.pow(gamma_inv, ipow(r + 1, i) as u64)).collect();
        Ok(Hermitian { r, e, field, gamma, places, orbit_places, place_mult })
    }

    pub fn gamma(&self) -> Fe {
        self.gamma
    }

    /// All affine rational places (P∞ excluded).
    pub fn places(&self) -> &[Vec<Fe>] {
        &self.places
    }

    /// Pole order of x_i at P∞ (1-based i).
    pub fn pole_of_x(&self, i: usize) -> usize {
        ipow(self.r, self.e - i) * ipow(self.r + 1, i - 1)
    }

    /// Expansion of x_i at P_0 in the parameter x = x_1, known below exponent `n`.
    pub fn local_expansion_xi(&self, i: usize, n: i64) -> Laurent {
        assert!((1..=self.e).contains(&i) && n >= 1);
        let f = &*self.field;
        let mut x = Laurent::monomial(Fe::ONE, 1, n);
        for _ in 1..i {
            let rhs = x.frobenius(f, self.r as u64).mul(f, &x).truncate(n);
            x = artin_schreier_positive(f, &rhs, self.r as u64);
        }
        x.truncate(n)
    }

    /// Monomial exponent tuples (j_1, ..., j_e) with pole order at most l and j_i < r for i >= 2,
    /// sorted by pole order.
    pub fn monomials(&self, l: usize) -> Vec<(Vec<usize>, usize)> {
        let mut out = Vec::new();
        let mut cur = vec![0usize; self.e];
        self.collect_monomials(1, l, &mut cur, &mut out);
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    fn collect_monomials(&self, i: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, usize)>) {
        if i > self.e {
            let pole = cur.iter().enumerate().map(|(k, &j)| j * self.pole_of_x(k + 1)).sum();
            out.push((cur.clone(), pole));
            return;
        }
        let w = self.pole_of_x(i);
        let cap = if i == 1 { budget / w } else { (budget / w).min(self.r - 1) };
        for j in 0..=cap {
            cur[i - 1] = j;
            self.collect_monomials(i + 1, budget - j * w, cur, out);
        }
        cur[i - 1] = 0;
    }
}

impl Tower for Hermitian {
    fn kind(&self) -> TowerKind {
        TowerKind::Hermitian
    }

    fn field(&self) -> &Arc<Field> {
        &self.field
    }

    fn r(&self) -> usize {
        self.r
    }

    fn e(&self) -> usize {
        self.e
    }

    fn genus(&self) -> usize {
        hermitian_genus(self.r, self.e)
    }

    fn sigma_order(&self) -> usize {
        self.field.size() - 1
    }

    fn orbit_places(&self) -> &[Vec<Fe>] {
        &self.orbit_places
    }

    fn sigma(&self, place: &[Fe], j: i64) -> Vec<Fe> {
        let f = &*self.field;
        let order = self.sigma_order() as i64;
        let j = j.rem_euclid(order) as u64;
        place.iter().zip(&self.place_mult).map(|(&a, &m)| f.mul(a, f.pow(m, j))).collect()
    }

    fn rr_space(&self, l: usize) -> Result<Arc<dyn RrSpace>> {
        let monos = self.monomials(l);
        Ok(Arc::new(MonomialBasis {
            field: self.field.clone(),
            r: self.r,
            e: self.e,
            budget: l,
            exponents: monos.iter().map(|m| m.0.clone()).collect(),
            poles: monos.iter().map(|m| m.1).collect(),
            curve_x: HermitianSeries { r: self.r, e: self.e, field: self.field.clone() },
        }))
    }

    fn message_shift(&self, _l: usize) -> i64 {
        0
    }

    fn local_scale(&self) -> Fe {
        self.place_mult[0]
    }
}

#[derive(Clone)]
struct HermitianSeries {
    r: usize,
    e: usize,
    field: Arc<Field>,
}

impl HermitianSeries {
    fn xs(&self, n: i64) -> Vec<Laurent> {
        let f = &*self.field;
        let mut out = vec![Laurent::monomial(Fe::ONE, 1, n)];
        for i in 1..self.e {
            let x = &out[i - 1];
            let rhs = x.frobenius(f, self.r as u64).mul(f, x).truncate(n);
            out.push(artin_schreier_positive(f, &rhs, self.r as u64).truncate(n));
        }
        out
    }
}

/// Monomials x_1^{j_1} ... x_e^{j_e} spanning L(lP∞).
pub struct MonomialBasis {
    field: Arc<Field>,
    r: usize,
    e: usize,
    budget: usize,
    exponents: Vec<Vec<usize>>,
    poles: Vec<usize>,
    curve_x: HermitianSeries,
}

impl MonomialBasis {
    pub fn exponents(&self) -> &[Vec<usize>] {
        &self.exponents
    }
}

impl RrSpace for MonomialBasis {
    fn budget(&self) -> usize {
        self.budget
    }

    fn pole_orders(&self) -> &[usize] {
        &self.poles
    }

    fn values_at(&self, place: &[Fe]) -> Vec<Fe> {
        let f = &*self.field;
        self.exponents
            .iter()
            .map(|js| js.iter().zip(place).fold(Fe::ONE, |acc, (&j, &a)| f.mul(acc, f.pow(a, j as u64))))
            .collect()
    }

    fn expansions(&self, prec: i64) -> Result<Vec<Laurent>> {
        let f = &*self.field;
        let n = prec.max(1);
        let xs = self.curve_x.xs(n);
        let mut powers: Vec<Vec<Laurent>> = Vec::with_capacity(self.e);
        for (i, x) in xs.iter().enumerate() {
            let max_j = self.exponents.iter().map(|js| js[i]).max().unwrap_or(0);
            let mut pw = vec![Laurent::constant(Fe::ONE, n)];
            if i > 0 {
                for j in 1..=max_j {
                    pw.push(pw[j - 1].mul(f, x).truncate(n));
                }
            }
            powers.push(pw);
        }
        // Products over x_2..x_e are shared between monomials; x_1 = x is a shift.
        let mut tails: HashMap<Vec<usize>, Laurent> = HashMap::new();
        let mut out = Vec::with_capacity(self.exponents.len());
        for js in &self.exponents {
            let tail = tails
                .entry(js[1..].to_vec())
                .or_insert_with(|| {
                    let mut acc = Laurent::constant(Fe::ONE, n);
                    for (i, &j) in js.iter().enumerate().skip(1) {
                        acc = acc.mul(f, &powers[i][j]).truncate(n);
                    }
                    acc
                })
                .clone();
            out.push(tail.shift(js[0] as i64).truncate(n));
        }
        debug_assert!(self.r >= 2);
        Ok(out)
    }

    fn dump(&self) -> String {
        let mut s = String::new();
        for (js, pole) in self.exponents.iter().zip(&self.poles) {
            let tuple: Vec<String> = js.iter().map(|j| j.to_string()).collect();
            let _ = writeln!(s, "{} : {}", tuple.join(","), pole);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_values() {
        assert_eq!(hermitian_genus(4, 2), 6);
        assert_eq!(hermitian_genus(7, 3), 336);
        assert_eq!(hermitian_genus(8, 2), 28);
    }

    #[test]
    fn small_curve_places() {
        let h = Hermitian::new(4, 2, 1).unwrap();
        assert_eq!(h.places().len(), 64);
        assert_eq!(h.orbit_places().len(), 60);
        assert_eq!(h.places().iter().filter(|p| p[0].is_zero()).count(), 4);
    }

    #[test]
    fn basis_count_at_twenty() {
        let h = Hermitian::new(4, 2, 1).unwrap();
        let b = h.rr_space(20).unwrap();
        assert_eq!(b.dim(), 15);
        assert_eq!(h.rr_space(0).unwrap().dim(), 1);
    }

    #[test]
    fn rejects_small_r() {
        assert!(Hermitian::new(4, 3, 0).is_err());
        assert!(Hermitian::new(6, 2, 0).is_err());
    }
}
