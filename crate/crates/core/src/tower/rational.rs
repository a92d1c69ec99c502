//! The projective line over GF(q): polynomials of degree at most l, folded along
//! powers of a primitive element (folded Reed-Solomon codes).

use std::fmt::Write as _;
use std::sync::Arc;

use super::{prime_power, RrSpace, Tower, TowerKind};
use crate::algebra::{Fe, Field, Laurent};
use crate::error::{Error, Result};

pub struct RationalLine {
    field: Arc<Field>,
    places: Vec<Vec<Fe>>,
    gamma_inv: Fe,
}

impl RationalLine {
    pub fn new(q: usize, field_seed: u64) -> Result<RationalLine> {
        let (p, n) = prime_power(q).ok_or_else(|| Error::InvalidParams(format!("q = {q} is not a prime power")))?;
        let field = Arc::new(Field::create(p, n, field_seed)?);
        Ok(RationalLine::with_field(field))
    }

    pub fn with_field(field: Arc<Field>) -> RationalLine {
        let gamma_inv = field.inv(field.primitive_element());
        let mut places: Vec<Vec<Fe>> = field.elements().filter(|a| !a.is_zero()).map(|a| vec![a]).collect();
        places.sort_by_key(|p| super::place_key(&field, p));
        RationalLine { field, places, gamma_inv }
    }
}

impl Tower for RationalLine {
    fn kind(&self) -> TowerKind {
        TowerKind::Rational
    }

    fn field(&self) -> &Arc<Field> {
        &self.field
    }

    fn r(&self) -> usize {
        self.field.size()
    }

    fn e(&self) -> usize {
        1
    }

    fn genus(&self) -> usize {
        0
    }

    fn sigma_order(&self) -> usize {
        self.field.size() - 1
    }

    fn orbit_places(&self) -> &[Vec<Fe>] {
        &self.places
    }

    fn sigma(&self, place: &[Fe], j: i64) -> Vec<Fe> {
        let j = j.rem_euclid(self.sigma_order() as i64) as u64;
        vec![self.field.mul(place[0], self.field.pow(self.gamma_inv, j))]
    }

    fn rr_space(&self, l: usize) -> Result<Arc<dyn RrSpace>> {
        Ok(Arc::new(PowerBasis { field: self.field.clone(), poles: (0..=l).collect() }))
    }

    fn message_shift(&self, _l: usize) -> i64 {
        0
    }

    fn local_scale(&self) -> Fe {
        self.gamma_inv
    }
}

/// 1, x, ..., x^l.
pub struct PowerBasis {
    field: Arc<Field>,
    poles: Vec<usize>,
}

impl RrSpace for PowerBasis {
    fn budget(&self) -> usize {
        self.poles.len() - 1
    }

    fn pole_orders(&self) -> &[usize] {
        &self.poles
    }

    fn values_at(&self, place: &[Fe]) -> Vec<Fe> {
        let f = &*self.field;
        let mut acc = Fe::ONE;
        self.poles
            .iter()
            .map(|_| {
                let v = acc;
                acc = f.mul(acc, place[0]);
                v
            })
            .collect()
    }

    fn expansions(&self, prec: i64) -> Result<Vec<Laurent>> {
        Ok(self.poles.iter().map(|&j| Laurent::monomial(Fe::ONE, j as i64, prec.max(1))).collect())
    }

    fn dump(&self) -> String {
        let mut s = String::new();
        for &j in &self.poles {
            let _ = writeln!(s, "{j} : {j}");
        }
        s
    }
}
