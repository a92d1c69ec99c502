//! Linear-algebraic list decoding of folded codes: interpolate Q = A_0 + A_1 Y_1 + ... + A_s Y_s
//! through the received windows, then solve the functional equation Q(f, f^τ, ..., f^{τ^{s-1}}) = 0
//! for the message coordinates, which form a periodic affine subspace.

use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::first_null_vector;
use crate::algebra::{Fe, Field, Laurent, Matrix};
use crate::code::{CodeParams, Codeword, FoldedCode};
use crate::error::{Error, Result};
use crate::periodic::PeriodicSubspace;
use crate::tower::{combine, RrSpace, TowerKind};

/// ⌊(N(m-s+1) - k + (s-1)g + 1) / (s+1)⌋, or None when negative.
pub fn degree_param(n: usize, m: usize, s: usize, k: usize, g: usize) -> Option<usize> {
    let num = (n * (m + 1 - s) + (s - 1) * g + 1) as i64 - k as i64;
    (num >= 0).then(|| num as usize / (s + 1))
}

/// Least t with t(m-s+1) > D + l.
pub fn agreement_threshold(d: usize, l: usize, m: usize, s: usize) -> usize {
    (d + l) / (m + 1 - s) + 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeParams {
    pub code: CodeParams,
    pub s: usize,
    pub d: usize,
    pub t_min: usize,
}

impl DecodeParams {
    pub fn new(code: CodeParams, s: usize) -> Result<DecodeParams> {
        if s == 0 || s > code.m {
            return Err(Error::InvalidParams(format!("s = {s} must lie in 1..={}", code.m)));
        }
        let d = degree_param(code.n, code.m, s, code.k, code.genus)
            .ok_or_else(|| Error::InvalidParams("the degree parameter D is negative".into()))?;
        let t_min = agreement_threshold(d, code.l, code.m, s);
        let dp = DecodeParams { code, s, d, t_min };
        if dp.freedoms() <= dp.equations() as i64 {
            return Err(Error::InvalidParams(format!(
                "{} unknowns do not exceed {} equations",
                dp.freedoms(),
                dp.equations()
            )));
        }
        if t_min > dp.code.n {
            return Err(Error::InvalidParams(format!("t_min = {t_min} exceeds N = {}", dp.code.n)));
        }
        Ok(dp)
    }

    /// s(D - g + 1) + D + k + g.
    pub fn freedoms(&self) -> i64 {
        let (s, d, g, k) = (self.s as i64, self.d as i64, self.code.genus as i64, self.code.k as i64);
        s * (d - g + 1) + d + k + g
    }

    pub fn equations(&self) -> usize {
        self.code.n * (self.code.m + 1 - self.s)
    }

    /// Column errors tolerated: N - t_min.
    pub fn max_errors(&self) -> usize {
        self.code.n - self.t_min
    }

    /// The closed-form error fraction. The genus term uses g itself for the Hermitian and
    /// rational towers and the bound r^e for the Garcia-Stichtenoth tower.
    pub fn tau_closed(&self) -> Ratio<i64> {
        let c = &self.code;
        let (s, m, n, k) = (self.s as i64, c.m as i64, c.n as i64, c.k as i64);
        let genus_term = match c.kind {
            TowerKind::Gs => (c.r as i64).pow(c.e as u32),
            TowerKind::Hermitian | TowerKind::Rational => c.genus as i64,
        };
        let w = m - s + 1;
        Ratio::new(s, s + 1) * (Ratio::from_integer(1) - Ratio::new(k, n * w)) - Ratio::new(3 * m * genus_term, w * m * n)
    }

    /// (τ_closed, t_min).
    pub fn decoding_radius(&self) -> (Ratio<i64>, usize) {
        (self.tau_closed(), self.t_min)
    }

    /// Bound (s-1)⌈k/Δ⌉ on the affine dimension of the candidate space.
    pub fn dimension_bound(&self, delta: usize) -> usize {
        (self.s - 1) * self.code.k.div_ceil(delta)
    }
}

/// Q = A_0 + sum A_t Y_t, each A as coordinates over its Riemann-Roch basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationPoly {
    pub a0: Vec<Fe>,
    pub a: Vec<Vec<Fe>>,
}

impl InterpolationPoly {
    pub fn higher_all_zero(&self) -> bool {
        self.a.iter().all(|v| v.iter().all(|c| c.is_zero()))
    }
}

pub struct ListDecoder {
    code: Arc<FoldedCode>,
    params: DecodeParams,
    /// Basis of L((D + l)P∞) for A_0.
    big: Arc<dyn RrSpace>,
    /// Basis of L(DP∞) for A_1..A_s.
    small: Arc<dyn RrSpace>,
    big_vals: Vec<Vec<Fe>>,
    small_vals: Vec<Vec<Fe>>,
}

impl ListDecoder {
    pub fn new(code: Arc<FoldedCode>, s: usize) -> Result<ListDecoder> {
        let params = DecodeParams::new(code.params().clone(), s)?;
        let tower = code.tower().clone();
        let big = tower.rr_space(params.d + params.code.l)?;
        let small = tower.rr_space(params.d)?;
        let big_vals = code.places().iter().map(|p| big.values_at(p)).collect();
        let small_vals = code.places().iter().map(|p| small.values_at(p)).collect();
        Ok(ListDecoder { code, params, big, small, big_vals, small_vals })
    }

    pub fn params(&self) -> &DecodeParams {
        &self.params
    }

    pub fn code(&self) -> &Arc<FoldedCode> {
        &self.code
    }

    fn field(&self) -> &Field {
        self.code.field()
    }

    /// (rows, columns) of the interpolation system.
    pub fn system_shape(&self) -> (usize, usize) {
        (self.params.equations(), self.big.dim() + self.params.s * self.small.dim())
    }

    fn constraint_rows(&self, rx: &Codeword) -> Vec<Vec<Fe>> {
        let f = self.field();
        let (m, s) = (self.params.code.m, self.params.s);
        let (nb, ns) = (self.big.dim(), self.small.dim());
        let mut rows = Vec::with_capacity(self.params.equations());
        for (i, col) in rx.columns.iter().enumerate() {
            for j in 0..=m - s {
                let idx = i * m + j;
                let mut row = vec![Fe::ZERO; nb + s * ns];
                row[..nb].copy_from_slice(&self.big_vals[idx]);
                for t in 1..=s {
                    let y = col[j + t - 1];
                    let dst = &mut row[nb + (t - 1) * ns..nb + t * ns];
                    f.axpy(dst, y, &self.small_vals[idx]);
                }
                rows.push(row);
            }
        }
        rows
    }

    pub fn interpolate(&self, rx: &Codeword) -> Result<InterpolationPoly> {
        let c = &self.params.code;
        if rx.len() != c.n || rx.m() != c.m {
            return Err(Error::InvalidParams(format!("received word must be {} × {}", c.n, c.m)));
        }
        let f = self.field();
        let (_, cols) = self.system_shape();
        let rows = self.constraint_rows(rx);
        let v = first_null_vector(f, &Matrix::from_rows(&rows, cols))
            .ok_or_else(|| Error::Invariant("interpolation system has only the zero solution".into()))?;
        if rows.iter().any(|row| !f.dot(row, &v).is_zero()) {
            return Err(Error::Invariant("interpolation solution fails a constraint".into()));
        }
        let nb = self.big.dim();
        let ns = self.small.dim();
        Ok(InterpolationPoly {
            a0: v[..nb].to_vec(),
            a: (0..self.params.s).map(|t| v[nb + t * ns..nb + (t + 1) * ns].to_vec()).collect(),
        })
    }

    /// Whether every interpolation constraint holds for `q` on `rx`.
    pub fn satisfies(&self, q: &InterpolationPoly, rx: &Codeword) -> bool {
        let f = self.field();
        let mut v = q.a0.clone();
        for a in &q.a {
            v.extend_from_slice(a);
        }
        self.constraint_rows(rx).iter().all(|row| f.dot(row, &v).is_zero())
    }

    /// Expansions of A_0 and A_1..A_s, known below `prec0` and `prec` respectively.
    pub fn expand(&self, q: &InterpolationPoly, prec0: i64, prec: i64) -> Result<(Laurent, Vec<Laurent>)> {
        let f = self.field();
        let big = self.big.expansions(prec0)?;
        let small = self.small.expansions(prec)?;
        Ok((combine(f, &q.a0, &big, prec0), q.a.iter().map(|a| combine(f, a, &small, prec)).collect()))
    }

    /// Message coordinates of every f in the code's message space with Q(f, f^τ, ...) = 0,
    /// as a periodic subspace of period equal to the order of σ.
    pub fn extract_subspace(&self, q: &InterpolationPoly) -> Result<PeriodicSubspace> {
        let f = self.field();
        let tower = self.code.tower();
        let k = self.params.code.k;
        let delta = tower.sigma_order();
        let field = tower.field().clone();
        if q.higher_all_zero() {
            return Ok(PeriodicSubspace::empty(field, delta, k));
        }
        let shift = tower.message_shift(self.params.code.l);
        let mu = tower.local_scale();
        let span = k.max(delta) as i64;
        let limit = self.params.d as i64 + span + 1;
        let small = &*self.small;
        let mut prec = span;
        let (u, a_exp) = loop {
            let exps = small.expansions(prec)?;
            let series: Vec<Laurent> = q.a.iter().map(|a| combine(f, a, &exps, prec)).collect();
            match series.iter().filter_map(|s| s.valuation()).min() {
                Some(u) if prec >= u + span => break (u, series),
                Some(u) => prec = u + span,
                None if prec > limit => {
                    return Err(Error::Invariant("nonzero coefficient function with vanishing expansion".into()))
                }
                None => prec *= 2,
            }
        };
        let base0 = u + shift;
        let a0_exp = combine(f, &q.a0, &self.big.expansions(base0 + span)?, base0 + span);
        if a0_exp.valuation().is_some_and(|v| v < base0) {
            return Ok(PeriodicSubspace::empty(field, delta, k));
        }
        let s = q.a.len();
        let coeff = |t: usize, j: usize| a_exp[t].coeff(u + j as i64);
        let point = |d: usize| f.pow_i(mu, d as i64 + shift);
        // B_j(X) = sum_t a_{t,j} X^{t-1}
        let b_at = |j: usize, x: Fe| (0..s).rev().fold(Fe::ZERO, |acc, t| f.add(f.mul(acc, x), coeff(t, j)));
        let free: Vec<usize> = (0..delta).filter(|&d| b_at(0, point(d)).is_zero()).collect();
        let rule = |d: usize| {
            let scale = f.neg(f.inv(b_at(0, point(d))));
            let coef: Vec<Fe> = (0..d).map(|i| f.mul(scale, b_at(d - i, point(i)))).collect();
            (coef, f.mul(scale, a0_exp.coeff(base0 + d as i64)))
        };
        PeriodicSubspace::from_recurrence(field, delta, k, &free, rule)
    }

    pub fn decode_subspace(&self, rx: &Codeword) -> Result<PeriodicSubspace> {
        let q = self.interpolate(rx)?;
        self.extract_subspace(&q)
    }
}
