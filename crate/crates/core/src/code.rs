//! Folded codes over σ-orbits: parameter checks, the local-expansion message map,
//! encoding, and a column-corrupting channel.

use std::fmt::Write as _;
use std::sync::Arc;

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::linalg::rref;
use crate::algebra::{Fe, Field, Matrix};
use crate::error::{Error, Result};
use crate::tower::{RrSpace, Tower, TowerKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub kind: TowerKind,
    pub r: usize,
    pub q: usize,
    pub e: usize,
    /// Folding parameter.
    pub m: usize,
    /// Block length in columns.
    pub n: usize,
    pub k: usize,
    pub genus: usize,
    /// Pole budget k + 2g - 1 of the message functions.
    pub l: usize,
}

impl CodeParams {
    pub fn validate(tower: &dyn Tower, m: usize, n: usize, k: usize) -> Result<CodeParams> {
        let q = tower.field().size();
        let g = tower.genus();
        if k == 0 || n == 0 {
            return Err(Error::InvalidParams("k and N must be positive".into()));
        }
        let l = k + 2 * g - 1;
        let max_m = tower.sigma_order();
        if m == 0 || m > max_m {
            return Err(Error::InvalidParams(format!("m = {m} must lie in 1..={max_m}")));
        }
        let cap = tower.max_columns(m);
        if n > cap {
            return Err(Error::InvalidParams(format!("N = {n} exceeds {cap} for m = {m}")));
        }
        let enough = match tower.kind() {
            TowerKind::Gs => l < n * m,
            TowerKind::Hermitian | TowerKind::Rational => l <= n * m,
        };
        if !enough {
            return Err(Error::InvalidParams(format!("l/m = {l}/{m} is too large for N = {n}")));
        }
        Ok(CodeParams { kind: tower.kind(), r: tower.r(), q, e: tower.e(), m, n, k, genus: g, l })
    }

    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.k as u64, (self.n * self.m) as u64)
    }

    /// N - l/m.
    pub fn distance_bound(&self) -> Ratio<i64> {
        Ratio::from_integer(self.n as i64) - Ratio::new(self.l as i64, self.m as i64)
    }

    /// Short fingerprint of the parameters and the field modulus, written into word files.
    pub fn hash(&self, field: &Field) -> String {
        let canon = format!(
            "{}:r={}:q={}:e={}:m={}:N={}:k={}:mod={}",
            self.kind.name(),
            self.r,
            self.q,
            self.e,
            self.m,
            self.n,
            self.k,
            field.modulus_string()
        );
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

/// N columns of m symbols; received words share the type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Codeword {
    pub columns: Vec<Vec<Fe>>,
}

impl Codeword {
    pub fn zeros(n: usize, m: usize) -> Codeword {
        Codeword { columns: vec![vec![Fe::ZERO; m]; n] }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn m(&self) -> usize {
        self.columns.first().map_or(0, |c| c.len())
    }

    /// Number of columns equal in both words.
    pub fn agreements(&self, other: &Codeword) -> usize {
        self.columns.iter().zip(&other.columns).filter(|(a, b)| a == b).count()
    }

    pub fn to_text(&self, f: &Field, params_hash: &str) -> String {
        let mut s = format!("# foldlist word params={params_hash} N={} m={}\n", self.len(), self.m());
        for col in &self.columns {
            let line: Vec<String> = col.iter().map(|&a| f.to_digit_string(a)).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses a word file, returning the word and the params hash from its header.
    pub fn from_text(f: &Field, text: &str) -> Result<(Codeword, String)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty word file".into()))?;
        let hash = header
            .split_whitespace()
            .find_map(|t| t.strip_prefix("params="))
            .ok_or_else(|| Error::Parse("missing params hash in header".into()))?
            .to_string();
        let field_of = |key: &str| -> Result<usize> {
            header
                .split_whitespace()
                .find_map(|t| t.strip_prefix(key))
                .ok_or_else(|| Error::Parse(format!("missing {key} in header")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad {key} in header")))
        };
        let (n, m) = (field_of("N=")?, field_of("m=")?);
        let columns = lines
            .map(|l| l.split_whitespace().map(|t| f.parse(t)).collect::<Result<Vec<Fe>>>())
            .collect::<Result<Vec<_>>>()?;
        if columns.len() != n || columns.iter().any(|c| c.len() != m) {
            return Err(Error::Parse(format!("expected {n} lines of {m} symbols")));
        }
        Ok((Codeword { columns }, hash))
    }
}

/// A folded code with its local-expansion message map κ and its inverse ev.
pub struct FoldedCode {
    tower: Arc<dyn Tower>,
    params: CodeParams,
    space: Arc<dyn RrSpace>,
    /// Column i, row j lives at places[i * m + j] = P_i^{σ^j}.
    places: Vec<Vec<Fe>>,
    /// Basis values at every place, one row per place.
    values: Matrix,
    /// k × dim: message coordinates of each basis function.
    ev: Matrix,
    /// dim × k.
    kappa: Matrix,
    /// Nm × k.
    generator: Matrix,
}

impl FoldedCode {
    pub fn new(tower: Arc<dyn Tower>, params: CodeParams) -> Result<FoldedCode> {
        let f = tower.field().clone();
        let space = tower.rr_space(params.l)?;
        let dim = space.dim();
        let places = tower.orbit_sample(params.m, params.n)?;
        let mut values = Matrix::zeros(places.len(), dim);
        for (i, p) in places.iter().enumerate() {
            values.row_mut(i).copy_from_slice(&space.values_at(p));
        }
        let shift = tower.message_shift(params.l);
        let k = params.k;
        let exps = space.expansions(shift + k as i64)?;
        let mut ev = Matrix::zeros(k, dim);
        for (b, s) in exps.iter().enumerate() {
            for d in 0..k {
                ev.set(d, b, s.coeff(shift + d as i64));
            }
        }
        let red = rref(&f, &ev);
        if red.rank < k {
            return Err(Error::Invariant(format!("local expansion map has rank {} < k = {k}", red.rank)));
        }
        let mut aug = Matrix::zeros(k, 2 * k);
        for d in 0..k {
            for (i, &p) in red.pivots.iter().enumerate() {
                aug.set(d, i, ev.get(d, p));
            }
            aug.set(d, k + d, Fe::ONE);
        }
        let inv = rref(&f, &aug).matrix;
        let mut kappa = Matrix::zeros(dim, k);
        for (i, &p) in red.pivots.iter().enumerate() {
            kappa.row_mut(p).copy_from_slice(&inv.row(i)[k..]);
        }
        let generator = values.mul(&f, &kappa);
        Ok(FoldedCode { tower, params, space, places, values, ev, kappa, generator })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn tower(&self) -> &Arc<dyn Tower> {
        &self.tower
    }

    pub fn field(&self) -> &Arc<Field> {
        self.tower.field()
    }

    pub fn space(&self) -> &Arc<dyn RrSpace> {
        &self.space
    }

    /// The N·m evaluation places, column-major.
    pub fn places(&self) -> &[Vec<Fe>] {
        &self.places
    }

    pub fn column_places(&self, i: usize) -> &[Vec<Fe>] {
        let m = self.params.m;
        &self.places[i * m..(i + 1) * m]
    }

    /// Basis coordinates of κ(msg).
    pub fn kappa(&self, msg: &[Fe]) -> Vec<Fe> {
        self.kappa.mul_vec(self.field(), msg)
    }

    /// First k local-expansion coefficients of the function with basis coordinates `coeffs`.
    pub fn ev(&self, coeffs: &[Fe]) -> Vec<Fe> {
        self.ev.mul_vec(self.field(), coeffs)
    }

    pub fn encode_raw(&self, coeffs: &[Fe]) -> Codeword {
        self.fold(self.values.mul_vec(self.field(), coeffs))
    }

    pub fn encode(&self, msg: &[Fe]) -> Result<Codeword> {
        if msg.len() != self.params.k {
            return Err(Error::InvalidParams(format!("message has length {} instead of {}", msg.len(), self.params.k)));
        }
        Ok(self.fold(self.generator.mul_vec(self.field(), msg)))
    }

    fn fold(&self, flat: Vec<Fe>) -> Codeword {
        Codeword { columns: flat.chunks(self.params.m).map(|c| c.to_vec()).collect() }
    }

    pub fn params_hash(&self) -> String {
        self.params.hash(self.field())
    }
}

/// Replaces exactly `t` uniformly chosen columns by uniformly chosen different values.
pub fn corrupt<R: Rng + ?Sized>(f: &Field, cw: &Codeword, t: usize, rng: &mut R) -> Codeword {
    assert!(t <= cw.len(), "cannot corrupt {t} of {} columns", cw.len());
    let positions: Vec<usize> = sample(rng, cw.len(), t).into_vec();
    replace_columns(f, cw, &positions, rng)
}

/// Corrupts the `t` consecutive columns starting at `start`, wrapping around.
pub fn corrupt_burst<R: Rng + ?Sized>(f: &Field, cw: &Codeword, start: usize, t: usize, rng: &mut R) -> Codeword {
    assert!(t <= cw.len(), "cannot corrupt {t} of {} columns", cw.len());
    let positions: Vec<usize> = (0..t).map(|i| (start + i) % cw.len()).collect();
    replace_columns(f, cw, &positions, rng)
}

fn replace_columns<R: Rng + ?Sized>(f: &Field, cw: &Codeword, positions: &[usize], rng: &mut R) -> Codeword {
    let mut out = cw.clone();
    let q = f.size() as u64;
    for &i in positions {
        // A uniform nonzero offset makes the new column uniform among the other values.
        let offset = loop {
            let v: Vec<Fe> = (0..cw.m()).map(|_| Fe(rng.gen_range(0..q) as u16)).collect();
            if v.iter().any(|a| !a.is_zero()) {
                break v;
            }
        };
        out.columns[i] = f.add_vec(&out.columns[i], &offset);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{GarciaStichtenoth, Hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hermitian_small_params() {
        let t = Hermitian::new(4, 2, 1).unwrap();
        let p = CodeParams::validate(&t, 5, 12, 14).unwrap();
        assert_eq!(p.l, 25);
        assert_eq!(p.rate(), Ratio::new(14, 60));
        assert_eq!(p.distance_bound(), Ratio::from_integer(7));
        assert!(CodeParams::validate(&t, 5, 13, 14).is_err());
        assert!(CodeParams::validate(&t, 16, 1, 1).is_err());
        // l/m = N is admissible here.
        assert!(CodeParams::validate(&t, 5, 5, 14).is_ok());
    }

    #[test]
    fn gs_small_params() {
        let t = GarciaStichtenoth::new(5, 2, 1).unwrap();
        let p = CodeParams::validate(&t, 4, 25, 8).unwrap();
        assert_eq!(p.l, 39);
        assert_eq!(p.rate(), Ratio::new(8, 100));
        assert_eq!(p.distance_bound(), Ratio::new(61, 4));
        assert!(CodeParams::validate(&t, 5, 10, 8).is_err());
        // l = 39 = N m with N = 39/3 is rejected because the inequality is strict.
        assert!(CodeParams::validate(&t, 3, 13, 8).is_err());
        assert!(CodeParams::validate(&t, 3, 14, 8).is_ok());
    }

    #[test]
    fn word_file_round_trip() {
        let f = Field::create(2, 4, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cw = Codeword {
            columns: (0..6).map(|_| (0..3).map(|_| Fe(rng.gen_range(0..16))).collect()).collect(),
        };
        let text = cw.to_text(&f, "abc123");
        let (back, hash) = Codeword::from_text(&f, &text).unwrap();
        assert_eq!(back, cw);
        assert_eq!(hash, "abc123");
        assert!(Codeword::from_text(&f, "# foldlist word params=x N=2 m=1\n1\n").is_err());
    }

    #[test]
    fn corruption_counts() {
        let f = Field::create(2, 2, 0).unwrap();
        let cw = Codeword::zeros(10, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for t in 0..=10 {
            let rx = corrupt(&f, &cw, t, &mut rng);
            assert_eq!(rx.agreements(&cw), 10 - t);
        }
        let rx = corrupt_burst(&f, &cw, 8, 4, &mut rng);
        let bad: Vec<usize> = (0..10).filter(|&i| rx.columns[i] != cw.columns[i]).collect();
        assert_eq!(bad, vec![0, 1, 8, 9]);
    }
}
