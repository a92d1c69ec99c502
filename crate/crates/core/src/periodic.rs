//! Periodic affine subspaces: every Δ-block, given the prefix before it, ranges over
//! a coset `C_i · prefix + v_i + span(U)` of one fixed low-dimensional U.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::algebra::field::parse_digits;
use crate::algebra::linalg::{rref, AffineSpace, Matrix};
use crate::algebra::{Fe, Field};
use crate::error::{Error, Result};

/// Coordinates `t1..=t2` (1-based, inclusive).
pub fn proj_range(y: &[Fe], t1: usize, t2: usize) -> Result<Vec<Fe>> {
    if t1 == 0 || t1 > t2 || t2 > y.len() {
        return Err(Error::IndexRange { t1, t2, len: y.len() });
    }
    Ok(y[t1 - 1..t2].to_vec())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMap {
    /// width × start matrix acting on the prefix.
    pub c: Matrix,
    pub v: Vec<Fe>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Body {
    /// Reduced basis of U inside F_q^Δ.
    u: Vec<Vec<Fe>>,
    blocks: Vec<BlockMap>,
}

#[derive(Clone, Debug)]
pub struct PeriodicSubspace {
    field: Arc<Field>,
    delta: usize,
    len: usize,
    body: Option<Body>,
}

fn reduced_basis(f: &Field, vectors: &[Vec<Fe>], width: usize) -> Vec<Vec<Fe>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let red = rref(f, &Matrix::from_rows(vectors, width));
    (0..red.rank).map(|r| red.matrix.row(r).to_vec()).collect()
}

impl PeriodicSubspace {
    pub fn new(field: Arc<Field>, delta: usize, len: usize, u: Vec<Vec<Fe>>, blocks: Vec<BlockMap>) -> Result<Self> {
        if delta == 0 || len == 0 {
            return Err(Error::InvalidParams("period and length must be positive".into()));
        }
        let b = len.div_ceil(delta);
        if blocks.len() != b {
            return Err(Error::InvalidParams(format!("expected {b} blocks, got {}", blocks.len())));
        }
        if u.iter().any(|x| x.len() != delta) {
            return Err(Error::InvalidParams("U vectors must have length Δ".into()));
        }
        for (i, blk) in blocks.iter().enumerate() {
            let width = delta.min(len - i * delta);
            if blk.c.rows() != width || blk.c.cols() != i * delta || blk.v.len() != width {
                return Err(Error::InvalidParams(format!("block {} has the wrong shape", i + 1)));
            }
        }
        let u = reduced_basis(&field, &u, delta);
        Ok(PeriodicSubspace { field, delta, len, body: Some(Body { u, blocks }) })
    }

    pub fn empty(field: Arc<Field>, delta: usize, len: usize) -> Self {
        PeriodicSubspace { field, delta, len, body: None }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_none()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn block_count(&self) -> usize {
        self.len.div_ceil(self.delta)
    }

    pub fn dim_u(&self) -> usize {
        self.body.as_ref().map_or(0, |b| b.u.len())
    }

    pub fn u_basis(&self) -> &[Vec<Fe>] {
        self.body.as_ref().map_or(&[], |b| &b.u)
    }

    pub fn block(&self, i: usize) -> Option<&BlockMap> {
        self.body.as_ref().map(|b| &b.blocks[i])
    }

    /// Half-open coordinate range of block `i` (0-based).
    pub fn block_range(&self, i: usize) -> (usize, usize) {
        (i * self.delta, ((i + 1) * self.delta).min(self.len))
    }

    /// Independent basis of U restricted to its first `width` coordinates.
    pub fn u_projected(&self, width: usize) -> Vec<Vec<Fe>> {
        let proj: Vec<Vec<Fe>> = self.u_basis().iter().map(|u| u[..width].to_vec()).collect();
        reduced_basis(&self.field, &proj, width)
    }

    fn base_value(&self, body: &Body, i: usize, prefix: &[Fe], with_offset: bool) -> Vec<Fe> {
        let blk = &body.blocks[i];
        let mut out = blk.c.mul_vec(&self.field, prefix);
        if with_offset {
            out = self.field.add_vec(&out, &blk.v);
        }
        out
    }

    pub fn contains(&self, y: &[Fe]) -> bool {
        let Some(body) = &self.body else { return false };
        if y.len() != self.len {
            return false;
        }
        let f = &self.field;
        let mut spaces: Vec<Option<AffineSpace>> = vec![None; self.delta + 1];
        for i in 0..self.block_count() {
            let (s, e) = self.block_range(i);
            let base = self.base_value(body, i, &y[..s], true);
            let width = e - s;
            let space = spaces[width]
                .get_or_insert_with(|| AffineSpace::new(f, vec![Fe::ZERO; width], self.u_projected(width)));
            if !space.contains(f, &f.sub_vec(&y[s..e], &base)) {
                return false;
            }
        }
        true
    }

    /// All values of the block following `prefix` (whose length must be a multiple of Δ).
    pub fn block_extensions(&self, prefix: &[Fe]) -> Vec<Vec<Fe>> {
        let Some(body) = &self.body else { return Vec::new() };
        assert!(prefix.len() % self.delta == 0 && prefix.len() < self.len, "prefix must end on a block boundary");
        let i = prefix.len() / self.delta;
        let (s, e) = self.block_range(i);
        let base = self.base_value(body, i, prefix, true);
        let dirs = self.u_projected(e - s);
        let q = self.field.size();
        let count = q.pow(dirs.len() as u32);
        (0..count)
            .map(|mut idx| {
                let mut v = base.clone();
                for d in &dirs {
                    self.field.axpy(&mut v, Fe((idx % q) as u16), d);
                    idx /= q;
                }
                v
            })
            .collect()
    }

    /// All values of the next `width` coordinates after `prefix`; `width` must be a multiple
    /// of Δ or reach the end.
    pub fn extensions(&self, prefix: &[Fe], width: usize) -> Vec<Vec<Fe>> {
        let end = (prefix.len() + width).min(self.len);
        let mut partial: Vec<Vec<Fe>> = vec![prefix.to_vec()];
        while partial.first().is_some_and(|y| y.len() < end) {
            partial = partial
                .iter()
                .flat_map(|y| {
                    self.block_extensions(y).into_iter().map(move |ext| {
                        let mut z = y.clone();
                        z.extend(ext);
                        z
                    })
                })
                .collect();
        }
        partial.into_iter().map(|y| y[prefix.len()..].to_vec()).collect()
    }

    /// Fills blocks `from..to` of `y` (prefix already set) using the block maps and
    /// optionally their offsets; `dir` adds a direction vector to the first filled block.
    fn propagate(&self, body: &Body, y: &mut [Fe], from: usize, to: usize, with_offset: bool, dir: Option<&[Fe]>) {
        for i in from..to {
            let (s, e) = self.block_range(i);
            let mut val = self.base_value(body, i, &y[..s], with_offset);
            if i == from {
                if let Some(d) = dir {
                    val = self.field.add_vec(&val, d);
                }
            }
            y[s..e].copy_from_slice(&val);
        }
    }

    /// The same point set as a flat affine space, or None when empty.
    pub fn as_affine(&self) -> Option<AffineSpace> {
        let body = self.body.as_ref()?;
        let b = self.block_count();
        let mut offset = vec![Fe::ZERO; self.len];
        self.propagate(body, &mut offset, 0, b, true, None);
        let mut vectors = Vec::new();
        for i in 0..b {
            let (s, e) = self.block_range(i);
            for d in self.u_projected(e - s) {
                let mut y = vec![Fe::ZERO; self.len];
                self.propagate(body, &mut y, i, b, false, Some(&d));
                vectors.push(y);
            }
        }
        Some(AffineSpace::new(&self.field, offset, vectors))
    }

    /// Regroups `u` consecutive blocks into one block of width uΔ with the same point set.
    pub fn coarsen(&self, u: usize) -> Result<PeriodicSubspace> {
        let b = self.block_count();
        if u == 0 || b % u != 0 {
            return Err(Error::InvalidParams(format!("{u} does not divide the block count {b}")));
        }
        let new_delta = self.delta * u;
        let Some(body) = &self.body else {
            return Ok(PeriodicSubspace::empty(self.field.clone(), new_delta, self.len));
        };
        if u == 1 {
            return Ok(self.clone());
        }
        let f = &self.field;
        let mut blocks = Vec::new();
        let mut dirs_per_super: Vec<Vec<Vec<Fe>>> = Vec::new();
        for sup in 0..b / u {
            let (first, last) = (sup * u, sup * u + u);
            let s = first * self.delta;
            let e = self.block_range(last - 1).1;
            let width = e - s;
            let mut y = vec![Fe::ZERO; e];
            self.propagate(body, &mut y, first, last, true, None);
            let v = y[s..e].to_vec();
            let mut c = Matrix::zeros(width, s);
            for p in 0..s {
                let mut y = vec![Fe::ZERO; e];
                y[p] = Fe::ONE;
                self.propagate(body, &mut y, first, last, false, None);
                for r in 0..width {
                    c.set(r, p, y[s + r]);
                }
            }
            let mut dirs = Vec::new();
            for t in first..last {
                let (ts, te) = self.block_range(t);
                for d in self.u_projected(te - ts) {
                    let mut y = vec![Fe::ZERO; e];
                    self.propagate(body, &mut y, t, last, false, Some(&d));
                    dirs.push(y[s..e].to_vec());
                }
            }
            dirs_per_super.push(reduced_basis(f, &dirs, width));
            blocks.push(BlockMap { c, v });
        }
        let first = &dirs_per_super[0];
        let mut u_new: Vec<Vec<Fe>> = first.clone();
        for d in u_new.iter_mut() {
            d.resize(new_delta, Fe::ZERO);
        }
        let out = PeriodicSubspace::new(f.clone(), new_delta, self.len, u_new, blocks)?;
        for (sup, dirs) in dirs_per_super.iter().enumerate() {
            let (s, e) = out.block_range(sup);
            if out.u_projected(e - s) != *dirs {
                return Err(Error::NonUniformCoupling);
            }
        }
        Ok(out)
    }

    /// Builds the subspace solved by a block-causal recurrence.
    ///
    /// Coordinate `d` is free when `d % delta` is in `free`; otherwise
    /// `f_d = rule(d).1 + sum_{j<d} rule(d).0[j] f_j`. The rule must be shift-invariant
    /// in its linear part (depends on `d - j` and `j % delta` only) and is queried for
    /// every `d < max(len, delta)`.
    pub fn from_recurrence<R>(field: Arc<Field>, delta: usize, len: usize, free: &[usize], mut rule: R) -> Result<Self>
    where
        R: FnMut(usize) -> (Vec<Fe>, Fe),
    {
        let f = &*field;
        let is_free = |d: usize| free.contains(&(d % delta));
        let span = len.max(delta);
        let rules: Vec<Option<(Vec<Fe>, Fe)>> = (0..span).map(|d| (!is_free(d)).then(|| rule(d))).collect();
        // Affine forms over [prefix (s vars) | free vars of block | constant].
        let block_forms = |s: usize, e: usize| -> (Vec<Vec<Fe>>, usize) {
            let free_here: Vec<usize> = (s..e).filter(|&d| is_free(d)).collect();
            let nv = s + free_here.len() + 1;
            let mut forms: Vec<Vec<Fe>> = Vec::with_capacity(e - s);
            for d in s..e {
                let mut form = vec![Fe::ZERO; nv];
                match &rules[d] {
                    None => {
                        let k = free_here.iter().position(|&x| x == d).unwrap();
                        form[s + k] = Fe::ONE;
                    }
                    Some((coef, c0)) => {
                        form[nv - 1] = *c0;
                        for (j, &a) in coef.iter().enumerate().take(s) {
                            form[j] = f.add(form[j], a);
                        }
                        for (j, &a) in coef.iter().enumerate().take(d).skip(s) {
                            f.axpy(&mut form, a, &forms[j - s]);
                        }
                    }
                }
                forms.push(form);
            }
            (forms, free_here.len())
        };
        let (u_forms, nfree) = block_forms(0, delta);
        let u: Vec<Vec<Fe>> = (0..nfree).map(|k| u_forms.iter().map(|form| form[k]).collect()).collect();
        let u_space = reduced_basis(f, &u, delta);
        let mut blocks = Vec::new();
        for i in 0..len.div_ceil(delta) {
            let (s, e) = (i * delta, ((i + 1) * delta).min(len));
            let (forms, nfree) = block_forms(s, e);
            let mut c = Matrix::zeros(e - s, s);
            let mut v = Vec::with_capacity(e - s);
            for (r, form) in forms.iter().enumerate() {
                c.row_mut(r).copy_from_slice(&form[..s]);
                v.push(form[form.len() - 1]);
            }
            if e - s == delta {
                let dirs: Vec<Vec<Fe>> = (0..nfree).map(|k| forms.iter().map(|form| form[s + k]).collect()).collect();
                if reduced_basis(f, &dirs, delta) != u_space {
                    return Err(Error::Invariant(format!("block {} has a different direction space", i + 1)));
                }
            }
            blocks.push(BlockMap { c, v });
        }
        PeriodicSubspace::new(field, delta, len, u, blocks)
    }

    /// Random instance with arbitrary block maps and a random U of the given dimension.
    pub fn random(field: Arc<Field>, delta: usize, blocks: usize, dim: usize, rng: &mut dyn RngCore) -> Self {
        assert!(dim <= delta);
        let q = field.size() as u32;
        let mut rand_vec = |n: usize| -> Vec<Fe> { (0..n).map(|_| Fe(rng.gen_range(0..q) as u16)).collect() };
        let mut u = Vec::new();
        while reduced_basis(&field, &u, delta).len() < dim {
            u.push(rand_vec(delta));
            u = reduced_basis(&field, &u, delta);
        }
        let maps = (0..blocks)
            .map(|i| {
                let rows: Vec<Vec<Fe>> = (0..delta).map(|_| rand_vec(i * delta)).collect();
                BlockMap { c: Matrix::from_rows(&rows, i * delta), v: rand_vec(delta) }
            })
            .collect();
        PeriodicSubspace::new(field, delta, delta * blocks, u, maps).expect("consistent shapes")
    }

    /// Random instance generated by a shift-invariant recurrence with the given free offsets.
    pub fn random_recurrent(field: Arc<Field>, delta: usize, blocks: usize, free: &[usize], rng: &mut dyn RngCore) -> Self {
        let q = field.size() as u32;
        let len = delta * blocks;
        let span = len.max(delta);
        // kernel[lag][phase]
        let kernel: Vec<Vec<Fe>> = (0..span + 1)
            .map(|_| (0..delta).map(|_| Fe(rng.gen_range(0..q) as u16)).collect())
            .collect();
        let consts: Vec<Fe> = (0..span).map(|_| Fe(rng.gen_range(0..q) as u16)).collect();
        PeriodicSubspace::from_recurrence(field, delta, len, free, |d| {
            ((0..d).map(|j| kernel[d - j][j % delta]).collect(), consts[d])
        })
        .expect("shift-invariant rule")
    }

    pub fn to_text(&self) -> String {
        let f = &self.field;
        let mut s = String::new();
        let digits = |v: &[Fe]| v.iter().map(|&x| f.to_digit_string(x)).collect::<Vec<_>>().join(" ");
        let _ = write!(
            s,
            "periodic q={} p={} modulus={} delta={} len={} blocks={}",
            f.size(),
            f.characteristic(),
            f.modulus_string(),
            self.delta,
            self.len,
            self.block_count()
        );
        let Some(body) = &self.body else {
            s.push_str(" empty\n");
            return s;
        };
        let _ = writeln!(s, " dimU={}", body.u.len());
        for u in &body.u {
            let _ = writeln!(s, "U {}", digits(u));
        }
        for (i, blk) in body.blocks.iter().enumerate() {
            let _ = writeln!(s, "block {}", i + 1);
            for r in 0..blk.c.rows() * usize::from(blk.c.cols() > 0) {
                let _ = writeln!(s, "C {}", digits(blk.c.row(r)));
            }
            let _ = writeln!(s, "v {}", digits(&blk.v));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<PeriodicSubspace> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let mut words = header.split_whitespace();
        if words.next() != Some("periodic") {
            return Err(Error::Parse("not a periodic subspace".into()));
        }
        let mut kv = std::collections::HashMap::new();
        let mut empty = false;
        for w in words {
            match w.split_once('=') {
                Some((k, v)) => {
                    kv.insert(k.to_string(), v.to_string());
                }
                None if w == "empty" => empty = true,
                None => return Err(Error::Parse(format!("unexpected token {w}"))),
            }
        }
        let get = |k: &str| kv.get(k).cloned().ok_or_else(|| Error::Parse(format!("missing {k}")));
        let num = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| Error::Parse(format!("bad {k}"))) };
        let p = num("p")? as u32;
        let field = Arc::new(Field::from_modulus(p, &parse_digits(&get("modulus")?)?)?);
        let (delta, len) = (num("delta")?, num("len")?);
        if empty {
            return Ok(PeriodicSubspace::empty(field, delta, len));
        }
        let parse_row = |l: &str, tag: &str| -> Result<Vec<Fe>> {
            let rest = l.strip_prefix(tag).ok_or_else(|| Error::Parse(format!("expected {tag} line")))?;
            rest.split_whitespace().map(|t| field.parse(t)).collect()
        };
        let dim = num("dimU")?;
        let mut u = Vec::new();
        for _ in 0..dim {
            u.push(parse_row(lines.next().unwrap_or(""), "U")?);
        }
        let mut blocks = Vec::new();
        for i in 0..len.div_ceil(delta) {
            let tag = lines.next().unwrap_or("");
            if tag.trim() != format!("block {}", i + 1) {
                return Err(Error::Parse(format!("expected block {}", i + 1)));
            }
            let width = delta.min(len - i * delta);
            let mut rows = Vec::new();
            for _ in 0..width {
                if i == 0 {
                    break;
                }
                rows.push(parse_row(lines.next().unwrap_or(""), "C")?);
            }
            let c = if i == 0 { Matrix::zeros(width, 0) } else { Matrix::from_rows(&rows, i * delta) };
            let v = parse_row(lines.next().unwrap_or(""), "v")?;
            blocks.push(BlockMap { c, v });
        }
        PeriodicSubspace::new(field, delta, len, u, blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf4() -> Arc<Field> {
        Arc::new(Field::create(2, 2, 1).unwrap())
    }

    #[test]
    fn proj_basics() {
        let y = vec![Fe(1), Fe(2), Fe(3)];
        assert_eq!(proj_range(&y, 1, 3).unwrap(), y);
        assert_eq!(proj_range(&y, 2, 2).unwrap(), vec![Fe(2)]);
        assert!(proj_range(&y, 0, 2).is_err());
        assert!(proj_range(&y, 2, 4).is_err());
    }

    #[test]
    fn zero_u_is_single_point() {
        let f = gf4();
        let blocks = vec![
            BlockMap { c: Matrix::zeros(2, 0), v: vec![Fe(1), Fe(2)] },
            BlockMap { c: Matrix::zeros(2, 2), v: vec![Fe(3), Fe(0)] },
        ];
        let w = PeriodicSubspace::new(f, 2, 4, vec![], blocks).unwrap();
        assert!(w.contains(&[Fe(1), Fe(2), Fe(3), Fe(0)]));
        assert!(!w.contains(&[Fe(1), Fe(2), Fe(3), Fe(1)]));
        assert_eq!(w.as_affine().unwrap().dim(), 0);
    }

    #[test]
    fn empty_marker() {
        let w = PeriodicSubspace::empty(gf4(), 3, 6);
        assert!(w.as_affine().is_none());
        assert!(w.block_extensions(&[]).is_empty());
        let back = PeriodicSubspace::from_text(&w.to_text()).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = PeriodicSubspace::random(gf4(), 3, 3, 2, &mut rng);
        let back = PeriodicSubspace::from_text(&w.to_text()).unwrap();
        assert_eq!(back.to_text(), w.to_text());
    }

    #[test]
    fn coarsen_rejects_bad_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = PeriodicSubspace::random(gf4(), 2, 3, 1, &mut rng);
        assert!(w.coarsen(2).is_err());
        assert_eq!(w.coarsen(1).unwrap().to_text(), w.to_text());
    }
}
