//! The Garcia-Stichtenoth tower x_{i+1}^r + x_{i+1} = x_i^r / (x_i^{r-1} + 1) over GF(r^2).
//!
//! Riemann-Roch bases are computed as the kernel of regularity conditions: every
//! function with poles only at P∞ is a combination of
//! x_1^a x_2^{i_2} ... x_e^{i_e} / (x_1^r + x_1)^E with i_j < r, and regularity is
//! imposed through local expansions at the places over the zeros of x_1^r + x_1.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use super::{artin_schreier_table, ipow, place_key, prime_power, RrSpace, Tower, TowerKind};
use crate::algebra::linalg::{affine_solutions, nullspace, rref, Matrix};
use crate::algebra::series::{artin_schreier_positive, Scalars, Series};
use crate::algebra::{Fe, Field, Laurent, WideExtension, WideField};
use crate::error::{Error, Result};

pub fn gs_genus(r: usize, e: usize) -> usize {
    if e % 2 == 0 {
        let a = ipow(r, e / 2) - 1;
        a * a
    } else {
        (ipow(r, (e - 1) / 2) - 1) * (ipow(r, (e + 1) / 2) - 1)
    }
}

/// Coordinate expansions along one place: (x_1, ..., x_e) in a local uniformizer, and the
/// ramification index over the x_1-line.
type Chain<E> = (Vec<Series<E>>, usize);

/// Places over one zero α of x_1^r + x_1. When some of them are not rational the
/// expansions live in an extension GF(q^d).
pub enum BranchSet {
    Rational(Vec<Chain<Fe>>),
    Extended(Arc<WideExtension>, Vec<Chain<u64>>),
}

pub struct SingularPoint {
    pub over: Fe,
    pub branches: BranchSet,
}

impl SingularPoint {
    /// (ramification index, degree of the coefficient field over GF(q)) per branch; extended
    /// branches are listed once per conjugacy class.
    pub fn summary(&self) -> Vec<(usize, usize)> {
        match &self.branches {
            BranchSet::Rational(c) => c.iter().map(|b| (b.1, 1)).collect(),
            BranchSet::Extended(ext, c) => c.iter().map(|b| (b.1, ext.degree())).collect(),
        }
    }
}

pub struct GarciaStichtenoth {
    r: usize,
    e: usize,
    field: Arc<Field>,
    omega: Fe,
    places: Vec<Vec<Fe>>,
    as_table: Vec<Vec<Fe>>,
    denom_power: Mutex<usize>,
    branch_cache: Mutex<Option<(i64, Arc<Vec<SingularPoint>>)>>,
    column_cache: Mutex<ColumnCache>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Candidate {
    a: usize,
    i: Vec<usize>,
    pole: i64,
}

/// Field operations used while following branches.
trait BranchArith: Scalars {
    fn root_of_frobenius(&self, a: Self::Elem, r: u64) -> Self::Elem;
    fn artin_schreier_roots(&self, c: Self::Elem, r: u64) -> Vec<Self::Elem>;
}

impl BranchArith for Field {
    fn root_of_frobenius(&self, a: Fe, r: u64) -> Fe {
        self.frobenius_root(a, r)
    }

    fn artin_schreier_roots(&self, c: Fe, r: u64) -> Vec<Fe> {
        self.elements().filter(|&b| Field::add(self, Field::pow(self, b, r), b) == c).collect()
    }
}

impl BranchArith for WideField {
    fn root_of_frobenius(&self, a: u64, r: u64) -> u64 {
        self.frobenius_root(a, r)
    }

    /// y -> y^r + y is linear over the prime field.
    fn artin_schreier_roots(&self, c: u64, r: u64) -> Vec<u64> {
        let p = self.characteristic();
        let fp = Field::prime(p as u32).expect("prime characteristic");
        let n = self.degree();
        let mut m = Matrix::zeros(n, n);
        let mut basis = 1u64;
        for j in 0..n {
            let img = self.add(Scalars::pow(self, basis, r), basis);
            for (row, d) in self.digits(img).into_iter().enumerate() {
                m.set(row, j, Fe(d as u16));
            }
            basis *= p;
        }
        let rhs: Vec<Fe> = self.digits(c).into_iter().map(|d| Fe(d as u16)).collect();
        let Some(space) = affine_solutions(&fp, &m, &rhs) else {
            return Vec::new();
        };
        let digits = |v: Vec<Fe>| self.from_digits(&v.iter().map(|x| x.0 as u64).collect::<Vec<_>>());
        space.enumerate(&fp, 1 << 20).map(|it| it.map(digits).collect()).unwrap_or_default()
    }
}

fn trunc_rel<E: Copy + Eq + Default + std::fmt::Debug>(s: &Series<E>, rel: i64) -> Series<E> {
    match s.valuation() {
        Some(v) => s.truncate(v + rel),
        None => s.clone(),
    }
}

fn plus_const<S: Scalars>(f: &S, s: &Series<S::Elem>, c: S::Elem) -> Series<S::Elem> {
    s.add(f, &Series::constant(c, s.prec()))
}

fn infinity_series(f: &Field, r: usize, e: usize, rel: i64) -> Result<Vec<Laurent>> {
    let mut xs = vec![Laurent::monomial(Fe::ONE, -1, rel - 1)];
    for _ in 1..e {
        let x = &xs[0];
        let a = x.frobenius(f, r as u64).add(f, x).inverse(f)?;
        let y = artin_schreier_positive(f, &a, r as u64);
        xs.insert(0, trunc_rel(&y.inverse(f)?, rel));
    }
    Ok(xs)
}

/// All branches over x_1 = α, or None when a residue field extension is needed.
fn follow_branches<S: BranchArith>(
    f: &S,
    r: usize,
    e: usize,
    alpha: S::Elem,
    rel: i64,
) -> Result<Option<Vec<Chain<S::Elem>>>> {
    let start = Series::new(0, vec![alpha, f.one()], rel);
    let mut cur = vec![(vec![start], 1usize)];
    for _ in 1..e {
        let mut next = Vec::new();
        for (xs, ram) in cur {
            match extend_branch(f, r, xs, ram, rel)? {
                Some(v) => next.extend(v),
                None => return Ok(None),
            }
        }
        cur = next;
    }
    Ok(Some(cur))
}

/// Solves X^r + X = x^r / (x^{r-1} + 1) for the last series x of a branch.
fn extend_branch<S: BranchArith>(
    f: &S,
    r: usize,
    xs: Vec<Series<S::Elem>>,
    ram: usize,
    rel: i64,
) -> Result<Option<Vec<Chain<S::Elem>>>> {
    let ru = r as u64;
    let ri = r as i64;
    let x = xs.last().unwrap();
    let h = plus_const(f, &x.pow(f, ru - 1), f.one());
    let mut w = trunc_rel(&x.frobenius(f, ru).mul(f, &h.inverse(f)?), rel);
    // Peel off pole terms that are r-th powers: X = acc + Y with Y^r + Y = w.
    let mut acc: Vec<(S::Elem, i64)> = Vec::new();
    while let Some(v) = w.valuation() {
        if v >= 0 || (-v) % ri != 0 {
            break;
        }
        let c = f.root_of_frobenius(w.coeff(v), ru);
        acc.push((c, v / ri));
        let p = w.prec();
        w = w.sub(f, &Series::monomial(f.pow(c, ru), v, p)).sub(f, &Series::monomial(c, v / ri, p));
    }
    let acc_series =
        |prec: i64| acc.iter().fold(Series::zero(prec), |s, &(c, e)| s.add(f, &Series::monomial(c, e, prec)));
    match w.valuation() {
        Some(-1) => {
            let tser = ramified_parameter(f, r, &w.inverse(f)?, rel)?;
            let mut new_xs = Vec::with_capacity(xs.len() + 1);
            for x in &xs {
                let v = x.valuation().unwrap_or(0);
                new_xs.push(trunc_rel(&x.compose_to(f, &tser, ri * v + rel)?, rel));
            }
            let acc_s = acc_series(rel);
            let acc_v = acc_s.valuation().unwrap_or(0);
            let acc_s = acc_s.compose_to(f, &tser, ri * acc_v + rel)?;
            let prec = acc_s.prec().min(rel - 1);
            new_xs.push(acc_s.truncate(prec).add(f, &Series::monomial(f.one(), -1, prec)));
            Ok(Some(vec![(new_xs, ram * r)]))
        }
        Some(v) if v < 0 => Err(Error::Branch(format!("unsupported pole order {} in Artin-Schreier step", -v))),
        _ => {
            if w.prec() <= 0 {
                return Err(Error::Branch("precision exhausted".into()));
            }
            let w0 = w.coeff(0);
            let roots = f.artin_schreier_roots(w0, ru);
            if roots.is_empty() {
                return Ok(None);
            }
            let rest = plus_const(f, &w, f.neg(w0));
            let y = artin_schreier_positive(f, &rest, ru);
            let base = acc_series(y.prec()).add(f, &y);
            Ok(Some(
                roots
                    .into_iter()
                    .map(|b| {
                        let mut nx = xs.clone();
                        nx.push(plus_const(f, &base, b));
                        (nx, ram)
                    })
                    .collect(),
            ))
        }
    }
}

/// Given W = 1/(Y^r + Y) of valuation 1 in t, returns t(s) for the new uniformizer s = 1/Y,
/// solving W(t(s)) = s^r / (1 + s^{r-1}).
fn ramified_parameter<S: Scalars>(f: &S, r: usize, wv: &Series<S::Elem>, rel: i64) -> Result<Series<S::Elem>> {
    let ri = r as i64;
    let zero = S::Elem::default();
    if wv.valuation() != Some(1) {
        return Err(Error::Branch("expected a simple zero".into()));
    }
    let n = (ri + rel).min(ri * wv.prec());
    let mut denom = vec![zero; r];
    denom[0] = f.one();
    denom[r - 1] = f.one();
    let v = Series::new(0, denom, n).inverse(f)?.shift(ri);
    let nu = n as usize;
    let b1_inv = f.inv(wv.coeff(1));
    let mut t = vec![zero; nu];
    let mut pw = vec![vec![zero; nu]; nu / r + 2];
    for m in r..nu {
        let mut s = v.coeff(m as i64);
        for k in 2..=m / r {
            let mut acc = zero;
            for j in r..=m - (k - 1) * r {
                if t[j] != zero {
                    acc = f.add(acc, f.mul(t[j], pw[k - 1][m - j]));
                }
            }
            pw[k][m] = acc;
            s = f.sub(s, f.mul(wv.coeff(k as i64), acc));
        }
        t[m] = f.mul(s, b1_inv);
        pw[1][m] = t[m];
    }
    Ok(Series::new(ri, t[r..].to_vec(), n))
}

/// Expansions of every candidate given the coordinate series at one place.
fn candidate_series<S: Scalars>(
    f: &S,
    r: usize,
    xs: &[Series<S::Elem>],
    cands: &[Candidate],
    big_e: usize,
    rel: i64,
) -> Result<Vec<Series<S::Elem>>> {
    let max_a = cands.iter().map(|c| c.a).max().unwrap_or(0);
    let one = Series::constant(f.one(), xs[0].prec().max(rel));
    let mut p1 = vec![one.clone()];
    for a in 1..=max_a {
        p1.push(trunc_rel(&p1[a - 1].mul(f, &xs[0]), rel));
    }
    let mut pj: Vec<Vec<Series<S::Elem>>> = vec![Vec::new()];
    for x in &xs[1..] {
        let mut pw = vec![one.clone()];
        for i in 1..r {
            pw.push(trunc_rel(&pw[i - 1].mul(f, x), rel));
        }
        pj.push(pw);
    }
    let d = if big_e == 0 {
        one.clone()
    } else {
        let base = xs[0].frobenius(f, r as u64).add(f, &xs[0]).inverse(f)?;
        trunc_rel(&base.pow(f, big_e as u64), rel)
    };
    let mut tails: HashMap<&[usize], Series<S::Elem>> = HashMap::new();
    let mut out = Vec::with_capacity(cands.len());
    for c in cands {
        if !tails.contains_key(&c.i[..]) {
            let mut acc = d.clone();
            for (j, &ij) in c.i.iter().enumerate().skip(1) {
                if ij > 0 {
                    acc = trunc_rel(&acc.mul(f, &pj[j][ij]), rel);
                }
            }
            tails.insert(&c.i[..], acc);
        }
        out.push(trunc_rel(&tails[&c.i[..]].mul(f, &p1[c.a]), rel));
    }
    Ok(out)
}

/// One representative per orbit of the q-power Frobenius; conjugate branches impose
/// the same conditions over GF(q).
fn distinct_up_to_conjugation(w: &WideField, q: u64, d: usize, chains: Vec<Chain<u64>>) -> Vec<Chain<u64>> {
    let mut kept: Vec<Chain<u64>> = Vec::new();
    for chain in chains {
        let mut cur = chain.0.clone();
        let mut seen = false;
        for _ in 1..d {
            cur = cur.iter().map(|s| s.map_coeffs(|c| Scalars::pow(w, c, q))).collect();
            if kept.iter().any(|k| k.0 == cur) {
                seen = true;
                break;
            }
        }
        if !seen {
            kept.push(chain);
        }
    }
    kept
}

/// Pole part of every candidate along one branch, coefficient of T^{-1-j} at index j;
/// None if the branch precision ran out.
fn pole_parts<S: Scalars>(
    f: &S,
    r: usize,
    xs: &[Series<S::Elem>],
    cands: &[&Candidate],
    big_e: usize,
) -> Result<Option<Vec<Vec<S::Elem>>>> {
    let neg: Vec<i64> = xs.iter().map(|x| (-x.valuation().unwrap_or(0)).max(0)).collect();
    let room = |i: &[usize], from: usize| -> i64 { (from..i.len()).map(|j| i[j] as i64 * neg[j]).sum() };
    let widest = (r as i64 - 1) * neg[1..].iter().sum::<i64>();
    let d = if big_e == 0 {
        Series::constant(f.one(), widest)
    } else {
        let base = xs[0].frobenius(f, r as u64).add(f, &xs[0]).inverse(f)?;
        let v = base.valuation().unwrap_or(0);
        base.truncate(widest - (big_e as i64 - 1) * v).pow(f, big_e as u64)
    };
    let deepest = d.valuation().unwrap_or(0) - widest;
    let mut pj: Vec<Vec<Series<S::Elem>>> = vec![Vec::new()];
    for x in &xs[1..] {
        let mut pw = vec![Series::constant(f.one(), widest - deepest)];
        for i in 1..r {
            pw.push(pw[i - 1].mul_to(f, x, widest - deepest));
        }
        pj.push(pw);
    }
    let max_a = cands.iter().map(|c| c.a).max().unwrap_or(0);
    let mut p1 = vec![Series::constant(f.one(), -deepest + 1)];
    for a in 1..=max_a {
        p1.push(p1[a - 1].mul_to(f, &xs[0], -deepest));
    }
    let mut tails: HashMap<&[usize], Series<S::Elem>> = HashMap::new();
    let mut out = Vec::with_capacity(cands.len());
    for c in cands {
        if !tails.contains_key(&c.i[..]) {
            let mut acc = d.truncate(room(&c.i, 1));
            for (j, &ij) in c.i.iter().enumerate().skip(1) {
                if ij > 0 {
                    acc = acc.mul_to(f, &pj[j][ij], room(&c.i, j + 1));
                }
            }
            tails.insert(&c.i[..], acc);
        }
        let s = tails[&c.i[..]].mul_to(f, &p1[c.a], 0);
        if s.prec() < 0 {
            return Ok(None);
        }
        let v = s.valuation().unwrap_or(0).min(0);
        out.push((v..0).rev().map(|ex| s.coeff(ex)).collect());
    }
    Ok(Some(out))
}

/// Pole-part columns keyed by (a, i, E), valid for one branch precision.
#[derive(Default)]
struct ColumnCache {
    rel: i64,
    columns: HashMap<(usize, Vec<usize>, usize), Arc<Vec<Vec<Fe>>>>,
}

impl GarciaStichtenoth {
    pub fn new(r: usize, e: usize, field_seed: u64) -> Result<GarciaStichtenoth> {
        let (p, k) = prime_power(r).ok_or_else(|| Error::InvalidParams(format!("r = {r} is not a prime power")))?;
        if e < 2 {
            return Err(Error::InvalidParams("the tower needs e >= 2".into()));
        }
        if r < 3 {
            return Err(Error::InvalidParams("σ is trivial for r = 2".into()));
        }
        let field = Arc::new(Field::create(p, 2 * k, field_seed)?);
        GarciaStichtenoth::with_field(r, e, field)
    }

    pub fn with_field(r: usize, e: usize, field: Arc<Field>) -> Result<GarciaStichtenoth> {
        if field.size() != r * r {
            return Err(Error::InvalidParams("field size must be r^2".into()));
        }
        let f = &*field;
        let omega = f.pow(f.primitive_element(), r as u64 + 1);
        let as_table = artin_schreier_table(f, r);
        let mut places: Vec<Vec<Fe>> = f
            .elements()
            .filter(|&a| !f.add(f.pow(a, r as u64), a).is_zero())
            .map(|a| vec![a])
            .collect();
        for _ in 1..e {
            let mut next = Vec::with_capacity(places.len() * r);
            for p in &places {
                let a = *p.last().unwrap();
                let rhs = f.div(f.pow(a, r as u64), f.add(f.pow(a, r as u64 - 1), Fe::ONE));
                for &b in &as_table[rhs.index()] {
                    let mut np = p.clone();
                    np.push(b);
                    next.push(np);
                }
            }
            places = next;
        }
        places.sort_by_key(|p| place_key(f, p));
        Ok(GarciaStichtenoth {
            r,
            e,
            field,
            omega,
            places,
            as_table,
            denom_power: Mutex::new(0),
            branch_cache: Mutex::new(None),
            column_cache: Mutex::new(ColumnCache::default()),
        })
    }

    /// The primitive element of GF(r) by which σ scales every x_i.
    pub fn omega(&self) -> Fe {
        self.omega
    }

    /// Expansion of x_i at P∞ in T = 1/x_e, with relative precision at least `rel`.
    pub fn local_expansion_xi(&self, i: usize, rel: i64) -> Result<Laurent> {
        assert!((1..=self.e).contains(&i));
        Ok(infinity_series(&self.field, self.r, self.e, rel)?.swap_remove(i - 1))
    }

    /// The places over every zero of x_1^r + x_1, expanded to relative precision `rel`.
    pub fn singular_points(&self, rel: i64) -> Result<Vec<SingularPoint>> {
        let f = &*self.field;
        let p = f.characteristic() as usize;
        let mut out = Vec::new();
        for &alpha in &self.as_table[0] {
            let branches = match follow_branches(f, self.r, self.e, alpha, rel)? {
                Some(c) => BranchSet::Rational(c),
                None => {
                    let mut d = p;
                    loop {
                        if d > self.r * p {
                            return Err(Error::Branch("residue field extension too large".into()));
                        }
                        let ext = WideExtension::create(f, d, d as u64)?;
                        let a = ext.embed(f, alpha);
                        if let Some(c) = follow_branches(&ext.wide, self.r, self.e, a, rel)? {
                            break BranchSet::Extended(Arc::new(ext), c);
                        }
                        d *= p;
                    }
                }
            };
            let point = SingularPoint { over: alpha, branches };
            let total: usize = point.summary().iter().map(|b| b.0).sum();
            if total != ipow(self.r, self.e - 1) {
                return Err(Error::Branch(format!(
                    "ramification over x_1 = {} sums to {total}",
                    f.to_digit_string(alpha)
                )));
            }
            out.push(match point.branches {
                BranchSet::Extended(ext, chains) => {
                    let chains = distinct_up_to_conjugation(&ext.wide, f.size() as u64, ext.degree(), chains);
                    SingularPoint { over: alpha, branches: BranchSet::Extended(ext, chains) }
                }
                rational => SingularPoint { over: alpha, branches: rational },
            });
        }
        Ok(out)
    }

    fn branches(&self, rel: i64) -> Result<Arc<Vec<SingularPoint>>> {
        let mut guard = self.branch_cache.lock().unwrap();
        if let Some((have, b)) = guard.as_ref() {
            if *have >= rel {
                return Ok(b.clone());
            }
        }
        let b = Arc::new(self.singular_points(rel)?);
        *guard = Some((rel, b.clone()));
        Ok(b)
    }

    fn candidates(&self, l: i64, big_e: usize) -> Vec<Candidate> {
        let r = self.r;
        let e = self.e;
        let unit = ipow(r, e - 1) as i64;
        let mut out = Vec::new();
        let tails = ipow(r, e - 1);
        for code in 0..tails {
            let mut i = vec![0usize; e];
            let mut c = code;
            for slot in i.iter_mut().skip(1) {
                *slot = c % r;
                c /= r;
            }
            let tail_pole: i64 = (2..=e).map(|j| (i[j - 1] * ipow(r, e - j)) as i64).sum();
            let base = tail_pole - (big_e * ipow(r, e)) as i64;
            let mut a = 0usize;
            while base + a as i64 * unit <= l {
                out.push(Candidate { a, i: i.clone(), pole: base + a as i64 * unit });
                a += 1;
            }
        }
        out.sort_by(|x, y| y.pole.cmp(&x.pole));
        out
    }

    /// Pole parts of `cands` along every singular branch, one vector over GF(q) per branch.
    fn pole_columns(&self, cands: &[&Candidate], big_e: usize, rel: i64) -> Result<Option<Vec<Vec<Vec<Fe>>>>> {
        let f = &*self.field;
        let branches = self.branches(rel)?;
        let mut cols = vec![Vec::new(); cands.len()];
        for point in branches.iter() {
            match &point.branches {
                BranchSet::Rational(chains) => {
                    for (xs, _) in chains {
                        let Some(parts) = pole_parts(f, self.r, xs, cands, big_e)? else {
                            return Ok(None);
                        };
                        for (col, part) in cols.iter_mut().zip(parts) {
                            col.push(part);
                        }
                    }
                }
                BranchSet::Extended(ext, chains) => {
                    for (xs, _) in chains {
                        let Some(parts) = pole_parts(&ext.wide, self.r, xs, cands, big_e)? else {
                            return Ok(None);
                        };
                        for (col, part) in cols.iter_mut().zip(parts) {
                            let mut flat = Vec::with_capacity(part.len() * ext.degree());
                            for c in part {
                                flat.extend(ext.coordinates(f, c)?);
                            }
                            col.push(flat);
                        }
                    }
                }
            }
        }
        Ok(Some(cols))
    }

    /// Kernel of the regularity conditions, echelonized by pole order (highest first).
    fn regular_combinations(&self, cands: &[Candidate], big_e: usize) -> Result<Vec<Vec<Fe>>> {
        let f = &*self.field;
        let key = |c: &Candidate| (c.a, c.i.clone(), big_e);
        let columns: Vec<Arc<Vec<Vec<Fe>>>> = {
            let mut cache = self.column_cache.lock().unwrap();
            if cache.rel == 0 {
                cache.rel = 64;
            }
            loop {
                let missing: Vec<&Candidate> = cands.iter().filter(|c| !cache.columns.contains_key(&key(c))).collect();
                if missing.is_empty() {
                    break cands.iter().map(|c| cache.columns[&key(c)].clone()).collect();
                }
                match self.pole_columns(&missing, big_e, cache.rel)? {
                    Some(cols) => {
                        for (c, col) in missing.iter().zip(cols) {
                            cache.columns.insert(key(c), Arc::new(col));
                        }
                    }
                    None => {
                        cache.rel *= 2;
                        cache.columns.clear();
                    }
                }
            }
        };
        let mut rows: Vec<Vec<Fe>> = Vec::new();
        let blocks = columns.first().map_or(0, |c| c.len());
        for b in 0..blocks {
            let height = columns.iter().map(|c| c[b].len()).max().unwrap_or(0);
            for k in 0..height {
                rows.push(columns.iter().map(|c| c[b].get(k).copied().unwrap_or(Fe::ZERO)).collect());
            }
        }
        let m = Matrix::from_rows(&rows, cands.len());
        let kernel = nullspace(f, &m);
        if kernel.is_empty() {
            return Ok(kernel);
        }
        let red = rref(f, &Matrix::from_rows(&kernel, cands.len()));
        Ok(red.matrix.to_rows().into_iter().take(red.rank).collect())
    }

    fn basis_with(&self, l: usize, big_e: usize) -> Result<GsBasis> {
        let cands = self.candidates(l as i64, big_e);
        let combos = self.regular_combinations(&cands, big_e)?;
        let mut funcs = Vec::with_capacity(combos.len());
        for row in combos {
            let lead = row.iter().position(|c| !c.is_zero()).expect("nonzero row");
            let pole = cands[lead].pole;
            if pole < 0 {
                return Err(Error::Invariant("regular function vanishing at P∞".into()));
            }
            let support: Vec<(usize, Fe)> =
                row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, &c)| (j, c)).collect();
            funcs.push((pole as usize, lead, support));
        }
        funcs.reverse();
        Ok(GsBasis {
            field: self.field.clone(),
            r: self.r,
            e: self.e,
            budget: l,
            big_e,
            poles: funcs.iter().map(|f| f.0).collect(),
            leads: funcs.iter().map(|f| f.1).collect(),
            support: funcs.into_iter().map(|f| f.2).collect(),
            cands,
        })
    }

    /// Basis of L(lP∞): the denominator power grows until the dimension at
    /// max(l, 2g - 1) matches Riemann-Roch.
    pub fn basis(&self, l: usize) -> Result<GsBasis> {
        let g = self.genus();
        let big_l = l.max(2 * g - 1);
        let target = big_l + 1 - g;
        let mut big_e = *self.denom_power.lock().unwrap();
        loop {
            let b = self.basis_with(big_l, big_e)?;
            match b.poles.len().cmp(&target) {
                std::cmp::Ordering::Equal => {
                    let mut dp = self.denom_power.lock().unwrap();
                    *dp = (*dp).max(big_e);
                    return Ok(if big_l == l { b } else { b.restrict(l) });
                }
                std::cmp::Ordering::Greater => {
                    return Err(Error::Invariant(format!("dimension {} exceeds {target}", b.poles.len())))
                }
                std::cmp::Ordering::Less => big_e += 1,
            }
            if big_e > 4 * self.e + 4 {
                return Err(Error::Invariant("denominator search did not converge".into()));
            }
        }
    }
}

impl Tower for GarciaStichtenoth {
    fn kind(&self) -> TowerKind {
        TowerKind::Gs
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
        gs_genus(self.r, self.e)
    }

    fn sigma_order(&self) -> usize {
        self.r - 1
    }

    fn orbit_places(&self) -> &[Vec<Fe>] {
        &self.places
    }

    fn sigma(&self, place: &[Fe], j: i64) -> Vec<Fe> {
        let f = &*self.field;
        let j = j.rem_euclid(self.sigma_order() as i64) as u64;
        let m = f.pow(f.inv(self.omega), j);
        place.iter().map(|&a| f.mul(a, m)).collect()
    }

    fn rr_space(&self, l: usize) -> Result<Arc<dyn RrSpace>> {
        Ok(Arc::new(self.basis(l)?))
    }

    fn message_shift(&self, l: usize) -> i64 {
        -(l as i64)
    }

    fn local_scale(&self) -> Fe {
        self.omega
    }
}

/// Echelonized basis of L(lP∞) as combinations of candidate quotients.
pub struct GsBasis {
    field: Arc<Field>,
    r: usize,
    e: usize,
    budget: usize,
    big_e: usize,
    poles: Vec<usize>,
    leads: Vec<usize>,
    support: Vec<Vec<(usize, Fe)>>,
    cands: Vec<Candidate>,
}

impl GsBasis {
    pub fn denominator_power(&self) -> usize {
        self.big_e
    }

    fn restrict(mut self, l: usize) -> GsBasis {
        let keep: Vec<bool> = self.poles.iter().map(|&p| p <= l).collect();
        let mut k = keep.iter();
        self.poles.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        self.leads.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        self.support.retain(|_| *k.next().unwrap());
        self.budget = l;
        self
    }

    fn candidate_values(&self, place: &[Fe]) -> Vec<Fe> {
        let f = &*self.field;
        let r = self.r as u64;
        let d = f.inv(f.pow(f.add(f.pow(place[0], r), place[0]), self.big_e as u64));
        self.cands
            .iter()
            .map(|c| {
                let mut v = f.mul(d, f.pow(place[0], c.a as u64));
                for (j, &ij) in c.i.iter().enumerate().skip(1) {
                    v = f.mul(v, f.pow(place[j], ij as u64));
                }
                v
            })
            .collect()
    }
}

impl RrSpace for GsBasis {
    fn budget(&self) -> usize {
        self.budget
    }

    fn pole_orders(&self) -> &[usize] {
        &self.poles
    }

    fn values_at(&self, place: &[Fe]) -> Vec<Fe> {
        let f = &*self.field;
        let cv = self.candidate_values(place);
        self.support
            .iter()
            .map(|s| s.iter().fold(Fe::ZERO, |acc, &(j, c)| f.add(acc, f.mul(c, cv[j]))))
            .collect()
    }

    fn expansions(&self, prec: i64) -> Result<Vec<Laurent>> {
        let f = &*self.field;
        let spread = self.cands.iter().map(|c| c.pole).max().unwrap_or(0).max(0);
        let rel = prec + spread + 1;
        let xs = infinity_series(f, self.r, self.e, rel.max(2))?;
        let used: Vec<usize> = {
            let mut u: Vec<usize> = self.support.iter().flatten().map(|&(j, _)| j).collect();
            u.sort_unstable();
            u.dedup();
            u
        };
        let sub: Vec<Candidate> = used.iter().map(|&j| self.cands[j].clone()).collect();
        let series = candidate_series(f, self.r, &xs, &sub, self.big_e, rel.max(2))?;
        let index: HashMap<usize, usize> = used.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        let mut out = Vec::with_capacity(self.support.len());
        for s in &self.support {
            let mut acc = Laurent::zero(prec);
            for &(j, c) in s {
                acc = acc.add(f, &series[index[&j]].scale(f, c).truncate(prec));
            }
            if acc.prec() < prec {
                return Err(Error::Invariant("expansion precision below request".into()));
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# (a; i_1,...,i_e) = x_1^a x_1^i_1 ... x_e^i_e / (x_1^r + x_1)^{}, leading term of each basis function",
            self.big_e
        );
        for (&lead, &pole) in self.leads.iter().zip(&self.poles) {
            let c = &self.cands[lead];
            let tuple: Vec<String> = c.i.iter().map(|j| j.to_string()).collect();
            let _ = writeln!(s, "({}; {}) : {}", c.a, tuple.join(","), pole);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_table() {
        assert_eq!(gs_genus(4, 2), 9);
        assert_eq!(gs_genus(4, 3), 45);
        assert_eq!(gs_genus(5, 2), 16);
        for r in [3, 4, 5, 7, 8] {
            for e in 2..6 {
                assert!(gs_genus(r, e) <= ipow(r, e));
            }
        }
    }

    #[test]
    fn place_counts() {
        let t = GarciaStichtenoth::new(4, 2, 1).unwrap();
        assert_eq!(t.orbit_places().len(), 48);
        let t = GarciaStichtenoth::new(5, 2, 1).unwrap();
        assert_eq!(t.orbit_places().len(), 100);
    }

    #[test]
    fn infinity_expansions() {
        let t = GarciaStichtenoth::new(4, 2, 1).unwrap();
        let x2 = t.local_expansion_xi(2, 10).unwrap();
        assert_eq!(x2.valuation(), Some(-1));
        assert_eq!(x2.window(-1, 8), {
            let mut v = vec![Fe::ZERO; 9];
            v[0] = Fe::ONE;
            v
        });
        assert_eq!(t.local_expansion_xi(1, 10).unwrap().valuation(), Some(-4));
    }

    #[test]
    fn branch_ramification_small() {
        let t = GarciaStichtenoth::new(4, 2, 1).unwrap();
        let pts = t.singular_points(32).unwrap();
        assert_eq!(pts.len(), 4);
        for p in &pts {
            assert_eq!(p.summary().iter().map(|b| b.0).sum::<usize>(), 4);
        }
    }

    #[test]
    fn basis_at_two_g_minus_one() {
        let t = GarciaStichtenoth::new(4, 2, 1).unwrap();
        let b = t.basis(17).unwrap();
        assert_eq!(b.poles.len(), 9);
        assert_eq!(t.basis(0).unwrap().poles, vec![0]);
    }
}
