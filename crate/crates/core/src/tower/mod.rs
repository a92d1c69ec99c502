//! Function-field towers: rational places, the folding automorphism, Riemann-Roch
//! bases and local expansions.

pub mod gs;
pub mod hermitian;
pub mod rational;

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Fe, Field, Laurent};
use crate::error::{Error, Result};

pub use gs::GarciaStichtenoth;
pub use hermitian::Hermitian;
pub use rational::RationalLine;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerKind {
    Hermitian,
    Gs,
    Rational,
}

impl TowerKind {
    pub fn name(self) -> &'static str {
        match self {
            TowerKind::Hermitian => "hermitian",
            TowerKind::Gs => "gs",
            TowerKind::Rational => "rational",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Infinity,
    Affine(Vec<Fe>),
}

/// A basis of L(lP∞) with evaluation and local expansions at the tower's expansion point.
pub trait RrSpace: Send + Sync {
    fn budget(&self) -> usize;
    /// Pole order at P∞ of each basis function; pairwise distinct.
    fn pole_orders(&self) -> &[usize];
    fn values_at(&self, place: &[Fe]) -> Vec<Fe>;
    /// Expansions of every basis function known at least up to (excluding) exponent `prec`.
    fn expansions(&self, prec: i64) -> Result<Vec<Laurent>>;
    /// One line per basis function.
    fn dump(&self) -> String;

    fn dim(&self) -> usize {
        self.pole_orders().len()
    }
}

pub trait Tower: Send + Sync {
    fn kind(&self) -> TowerKind;
    fn field(&self) -> &Arc<Field>;
    fn r(&self) -> usize;
    fn e(&self) -> usize;
    fn genus(&self) -> usize;
    /// Order of the folding automorphism σ.
    fn sigma_order(&self) -> usize;
    /// The rational places that the code may use, sorted by their digit strings.
    fn orbit_places(&self) -> &[Vec<Fe>];
    /// P^{σ^j}.
    fn sigma(&self, place: &[Fe], j: i64) -> Vec<Fe>;
    fn rr_space(&self, l: usize) -> Result<Arc<dyn RrSpace>>;
    /// Exponent of the local parameter carrying message coordinate 0, for message budget l.
    fn message_shift(&self, l: usize) -> i64;
    /// μ with f(P^σ) = f^τ(P), where f^τ has its z^n expansion coefficient scaled by μ^n.
    fn local_scale(&self) -> Fe;
    /// Largest N admissible for folding parameter m.
    fn max_columns(&self, m: usize) -> usize {
        (self.orbit_places().len() / self.sigma_order()) * (self.sigma_order() / m)
    }

    /// N windows of m consecutive σ-images, taken orbit by orbit; each orbit is
    /// represented by its smallest place and windows start at multiples of m.
    fn orbit_sample(&self, m: usize, n: usize) -> Result<Vec<Vec<Fe>>> {
        let order = self.sigma_order();
        if m == 0 || m > order {
            return Err(Error::InvalidParams(format!("folding m = {m} must lie in 1..={order}")));
        }
        let cap = self.max_columns(m);
        if n > cap {
            return Err(Error::InvalidParams(format!("N = {n} exceeds the {cap} available windows")));
        }
        let mut seen: HashSet<Vec<Fe>> = HashSet::new();
        let mut out = Vec::with_capacity(n * m);
        let mut windows = 0;
        for p in self.orbit_places() {
            if windows == n {
                break;
            }
            if seen.contains(p) {
                continue;
            }
            let orbit: Vec<Vec<Fe>> = (0..order as i64).map(|j| self.sigma(p, j)).collect();
            seen.extend(orbit.iter().cloned());
            for w in 0..order / m {
                if windows == n {
                    break;
                }
                out.extend(orbit[w * m..(w + 1) * m].iter().cloned());
                windows += 1;
            }
        }
        Ok(out)
    }
}

/// Sort key: concatenated coordinate digit strings.
pub(crate) fn place_key(f: &Field, p: &[Fe]) -> Vec<u32> {
    p.iter().flat_map(|&a| f.digits(a)).collect()
}

/// Element of L(lP∞) as coordinates over a basis.
#[derive(Clone)]
pub struct FunctionRepr {
    pub space: Arc<dyn RrSpace>,
    pub coeffs: Vec<Fe>,
}

impl FunctionRepr {
    pub fn new(space: Arc<dyn RrSpace>, coeffs: Vec<Fe>) -> FunctionRepr {
        assert_eq!(space.dim(), coeffs.len());
        FunctionRepr { space, coeffs }
    }

    pub fn evaluate(&self, f: &Field, place: &Place) -> Result<Fe> {
        match place {
            Place::Infinity => Err(Error::EvalAtInfinity),
            Place::Affine(p) => Ok(f.dot(&self.coeffs, &self.space.values_at(p))),
        }
    }

    pub fn expansion(&self, f: &Field, prec: i64) -> Result<Laurent> {
        let exps = self.space.expansions(prec)?;
        Ok(combine(f, &self.coeffs, &exps, prec))
    }
}

/// sum coeffs[i] * series[i], truncated to `prec`.
pub fn combine(f: &Field, coeffs: &[Fe], series: &[Laurent], prec: i64) -> Laurent {
    let mut acc = Laurent::zero(prec);
    for (&c, s) in coeffs.iter().zip(series) {
        if !c.is_zero() {
            acc = acc.add(f, &s.scale(f, c).truncate(prec));
        }
    }
    acc
}

/// Smallest r-power structure check: returns (p, k) with r = p^k.
pub(crate) fn prime_power(r: usize) -> Option<(u32, u32)> {
    if r < 2 {
        return None;
    }
    let mut p = 2;
    while r % p != 0 {
        p += 1;
    }
    let (mut x, mut k) = (r, 0);
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    (x == 1).then_some((p as u32, k))
}

pub(crate) fn ipow(b: usize, e: usize) -> usize {
    b.pow(e as u32)
}

/// All β in the field with β^r + β = c, for every c (indexed by element).
pub(crate) fn artin_schreier_table(f: &Field, r: usize) -> Vec<Vec<Fe>> {
    let mut table = vec![Vec::new(); f.size()];
    for b in f.elements() {
        let c = f.add(f.pow(b, r as u64), b);
        table[c.index()].push(b);
    }
    table
}
