//! Hierarchically subspace-evasive pre-coding.
//!
//! A message x ∈ F_q^{(1-3ζ)k} is split into b chunks; block i of the output is chunk i
//! followed by the lexicographically first β_i ∈ F_q^{3ζΔ} for which
//! P_i(ρ_i(y_1 ∘ ... ∘ y_i)) and Q_i(ρ_i(y_1 ∘ ... ∘ y_i)) both land in Λ_i, the elements of
//! GF(q^{iΔ}) whose last ζΔ coordinates vanish.

use std::fmt::Write as _;
use std::sync::Arc;

use num_rational::Ratio;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::field::parse_digits;
use crate::algebra::{extension_tower, Backend, BigField, BinaryExt, ExtField, Fe, Field, PolyExt};
use crate::error::{Error, Result};
use crate::periodic::PeriodicSubspace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HseParams {
    pub delta: usize,
    pub b: usize,
    /// ζ as numerator / denominator.
    pub zeta: (usize, usize),
    /// Degree of every P_i and Q_i.
    pub lambda: usize,
    /// Family exponent, used for sizing λ and for report lines.
    pub c: usize,
}

impl HseParams {
    /// Parameters with λ = max(6k, ck + 1).
    pub fn new(delta: usize, b: usize, zeta: (usize, usize), c: usize) -> Result<HseParams> {
        let k = delta * b;
        HseParams::with_lambda(delta, b, zeta, c, (6 * k).max(c * k + 1))
    }

    pub fn with_lambda(delta: usize, b: usize, zeta: (usize, usize), c: usize, lambda: usize) -> Result<HseParams> {
        let p = HseParams { delta, b, zeta, lambda, c };
        if delta == 0 || b == 0 || zeta.1 == 0 {
            return Err(Error::InvalidParams("Δ, b and the denominator of ζ must be positive".into()));
        }
        if (zeta.0 * delta) % zeta.1 != 0 || p.zeta_delta() == 0 {
            return Err(Error::InvalidParams(format!("ζΔ = {}·{delta}/{} must be a positive integer", zeta.0, zeta.1)));
        }
        if 3 * p.zeta_delta() >= delta {
            return Err(Error::InvalidParams("3ζΔ must be smaller than Δ so that messages are nonempty".into()));
        }
        if lambda == 0 {
            return Err(Error::InvalidParams("λ must be positive".into()));
        }
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.delta * self.b
    }

    pub fn zeta_delta(&self) -> usize {
        self.zeta.0 * self.delta / self.zeta.1
    }

    /// Length 3ζΔ of each check block β_i.
    pub fn check_len(&self) -> usize {
        3 * self.zeta_delta()
    }

    /// Message symbols per block, (1 - 3ζ)Δ.
    pub fn chunk_len(&self) -> usize {
        self.delta - self.check_len()
    }

    pub fn message_len(&self) -> usize {
        self.chunk_len() * self.b
    }

    pub fn zeta_ratio(&self) -> Ratio<usize> {
        Ratio::new(self.zeta.0, self.zeta.1)
    }

    /// The asymptotic preconditions of the evasiveness theorem for decoder parameter s:
    /// s < ζΔ/10 and q^{ζΔ} ≥ (2cqk)^{10/9}. Reported, never enforced.
    pub fn compliance(&self, q: usize, s: usize) -> Vec<(String, bool)> {
        let zd = self.zeta_delta() as f64;
        let lhs = zd * (q as f64).ln();
        let rhs = (10.0 / 9.0) * ((2 * self.c * q * self.k()) as f64).ln();
        vec![
            (format!("s = {s} < ζΔ/10 = {:.3}", zd / 10.0), (s as f64) < zd / 10.0),
            (format!("q^ζΔ = e^{lhs:.2} >= (2cqk)^(10/9) = e^{rhs:.2}"), lhs >= rhs),
        ]
    }
}

/// Coefficients of the two polynomial families at one level.
struct Level<F: BigField> {
    field: Arc<F>,
    p: Vec<F::Elem>,
    q: Vec<F::Elem>,
}

impl<F: BigField> Level<F> {
    fn sample(field: Arc<F>, lambda: usize, rng: &mut dyn RngCore) -> Level<F> {
        let draw = |rng: &mut dyn RngCore| {
            let mut c: Vec<F::Elem> = (0..lambda).map(|_| field.random(rng)).collect();
            c.push(field.random_nonzero(rng));
            c
        };
        let p = draw(rng);
        let q = draw(rng);
        Level { field, p, q }
    }

    fn images(&self, y: &[Fe]) -> (F::Elem, F::Elem) {
        let a = self.field.rho(y);
        (self.field.eval_poly(&self.p, &a), self.field.eval_poly(&self.q, &a))
    }

    fn passes(&self, y: &[Fe], zd: usize) -> bool {
        let a = self.field.rho(y);
        self.field.trailing_digits_zero(&self.field.eval_poly(&self.p, &a), zd)
            && self.field.trailing_digits_zero(&self.field.eval_poly(&self.q, &a), zd)
    }

    fn write(&self, out: &mut String) {
        let f = &*self.field;
        let _ = writeln!(out, "modulus {}", f.modulus_string());
        for (tag, coeffs) in [("P", &self.p), ("Q", &self.q)] {
            let list: Vec<String> = coeffs.iter().map(|c| f.to_digit_string(c)).collect();
            let _ = writeln!(out, "{tag} {}", list.join(" "));
        }
    }

    fn read(field: Arc<F>, p_line: &str, q_line: &str) -> Result<Level<F>> {
        let parse = |line: &str, tag: &str| -> Result<Vec<F::Elem>> {
            let body = line
                .strip_prefix(tag)
                .ok_or_else(|| Error::Parse(format!("expected a {tag}-line")))?;
            body.split_whitespace().map(|t| field.parse_elem(t)).collect()
        };
        let p = parse(p_line, "P ")?;
        let q = parse(q_line, "Q ")?;
        Ok(Level { field, p, q })
    }
}

enum AnyLevel {
    Binary(Level<BinaryExt>),
    Poly(Level<PolyExt>),
}

impl AnyLevel {
    fn passes(&self, y: &[Fe], zd: usize) -> bool {
        match self {
            AnyLevel::Binary(l) => l.passes(y, zd),
            AnyLevel::Poly(l) => l.passes(y, zd),
        }
    }

    /// Prime-field digit strings of (P_i(ρ(y)), Q_i(ρ(y))).
    fn image_strings(&self, y: &[Fe]) -> (String, String) {
        match self {
            AnyLevel::Binary(l) => {
                let (a, b) = l.images(y);
                (l.field.to_digit_string(&a), l.field.to_digit_string(&b))
            }
            AnyLevel::Poly(l) => {
                let (a, b) = l.images(y);
                (l.field.to_digit_string(&a), l.field.to_digit_string(&b))
            }
        }
    }

    fn lambda_member(&self, a: &str, zd: usize) -> Result<bool> {
        Ok(match self {
            AnyLevel::Binary(l) => l.field.trailing_digits_zero(&l.field.parse_elem(a)?, zd),
            AnyLevel::Poly(l) => l.field.trailing_digits_zero(&l.field.parse_elem(a)?, zd),
        })
    }

    fn write(&self, out: &mut String) {
        match self {
            AnyLevel::Binary(l) => l.write(out),
            AnyLevel::Poly(l) => l.write(out),
        }
    }

    fn p_coeffs(&self) -> Vec<String> {
        match self {
            AnyLevel::Binary(l) => l.p.iter().map(|c| l.field.to_digit_string(c)).collect(),
            AnyLevel::Poly(l) => l.p.iter().map(|c| l.field.to_digit_string(c)).collect(),
        }
    }
}

pub struct HseKey {
    params: HseParams,
    base: Arc<Field>,
    backend: Backend,
    seed: u64,
    levels: Vec<AnyLevel>,
}

/// Outcome of pruning a periodic subspace against the key.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PruneTrace {
    /// Prefixes y_1..y_i in proj(H) ∩ proj(W) after each level.
    pub survivors: Vec<usize>,
    /// Messages whose encoding lies in W, sorted.
    pub messages: Vec<Vec<Fe>>,
    /// Their encodings, in the same order.
    pub words: Vec<Vec<Fe>>,
}

impl HseKey {
    pub fn sample(base: Arc<Field>, params: HseParams, backend: Backend, seed: u64) -> Result<HseKey> {
        let fields = extension_tower(base.clone(), params.delta, params.b, backend, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_0F_C0EF);
        let levels = fields
            .into_iter()
            .map(|ef| match ef {
                ExtField::Binary(f) => AnyLevel::Binary(Level::sample(f, params.lambda, &mut rng)),
                ExtField::Poly(f) => AnyLevel::Poly(Level::sample(f, params.lambda, &mut rng)),
            })
            .collect();
        Ok(HseKey { params, base, backend, seed, levels })
    }

    pub fn params(&self) -> &HseParams {
        &self.params
    }

    pub fn base(&self) -> &Arc<Field> {
        &self.base
    }

    /// Coefficients of P_level as digit strings (level is 1-based).
    pub fn p_coefficients(&self, level: usize) -> Vec<String> {
        self.levels[level - 1].p_coeffs()
    }

    /// Digit strings of P_i(ρ_i(prefix)) and Q_i(ρ_i(prefix)), prefix of length iΔ.
    pub fn images(&self, level: usize, prefix: &[Fe]) -> (String, String) {
        self.levels[level - 1].image_strings(prefix)
    }

    /// Membership in Λ_level of an element of GF(q^{level·Δ}) given as a digit string.
    pub fn lambda_member(&self, level: usize, a: &str) -> Result<bool> {
        self.levels[level - 1].lambda_member(a, self.params.zeta_delta())
    }

    /// The Γ condition for both families at `level`, given the prefix y_1 ∘ ... ∘ y_level.
    pub fn gamma_level(&self, level: usize, prefix: &[Fe]) -> bool {
        assert_eq!(prefix.len(), level * self.params.delta);
        self.levels[level - 1].passes(prefix, self.params.zeta_delta())
    }

    pub fn h_member(&self, y: &[Fe]) -> bool {
        y.len() == self.params.k() && (1..=self.params.b).all(|i| self.gamma_level(i, &y[..i * self.params.delta]))
    }

    pub fn encode(&self, x: &[Fe]) -> Result<Vec<Fe>> {
        let p = &self.params;
        if x.len() != p.message_len() {
            return Err(Error::InvalidParams(format!("message has length {} instead of {}", x.len(), p.message_len())));
        }
        let q = self.base.size() as u64;
        let cl = p.check_len();
        let total = q.pow(cl as u32);
        let mut y = Vec::with_capacity(p.k());
        for (i, chunk) in x.chunks(p.chunk_len()).enumerate() {
            y.extend_from_slice(chunk);
            let at = y.len();
            y.resize(at + cl, Fe::ZERO);
            let found = (0..total).any(|c| {
                let mut rest = c;
                for slot in y[at..].iter_mut().rev() {
                    *slot = Fe((rest % q) as u16);
                    rest /= q;
                }
                self.gamma_level(i + 1, &y)
            });
            if !found {
                return Err(Error::EncodingFailure { block: i + 1 });
            }
        }
        Ok(y)
    }

    /// The message chunks of y, without any range check.
    pub fn strip(&self, y: &[Fe]) -> Vec<Fe> {
        let p = &self.params;
        y.chunks(p.delta).flat_map(|blk| blk[..p.chunk_len()].to_vec()).collect()
    }

    pub fn decode(&self, y: &[Fe]) -> Result<Vec<Fe>> {
        if y.len() != self.params.k() {
            return Err(Error::NotInRange);
        }
        let x = self.strip(y);
        match self.encode(&x) {
            Ok(back) if back == y => Ok(x),
            _ => Err(Error::NotInRange),
        }
    }

    /// All x with encode(x) ∈ W, expanding W block by block and filtering by Γ at each level.
    /// The period of W must divide Δ.
    pub fn prune(&self, w: &PeriodicSubspace, cap: usize) -> Result<PruneTrace> {
        let p = &self.params;
        if w.is_empty() {
            return Ok(PruneTrace { survivors: vec![0; p.b], messages: Vec::new(), words: Vec::new() });
        }
        if p.delta % w.delta() != 0 || w.len() != p.k() {
            return Err(Error::InvalidParams(format!(
                "subspace has period {} and length {}, key needs a divisor of {} and {}",
                w.delta(),
                w.len(),
                p.delta,
                p.k()
            )));
        }
        let mut cands: Vec<Vec<Fe>> = vec![Vec::new()];
        let mut survivors = Vec::with_capacity(p.b);
        for level in 1..=p.b {
            let mut next = Vec::new();
            for prefix in &cands {
                for ext in w.extensions(prefix, p.delta) {
                    let mut y = prefix.clone();
                    y.extend(ext);
                    if self.gamma_level(level, &y) {
                        next.push(y);
                    }
                }
                if next.len() > cap {
                    return Err(Error::CandidateExplosion { level, count: next.len(), cap });
                }
            }
            survivors.push(next.len());
            cands = next;
        }
        let mut found: Vec<(Vec<Fe>, Vec<Fe>)> =
            cands.into_iter().filter_map(|y| self.decode(&y).ok().map(|x| (x, y))).collect();
        found.sort();
        let (messages, words) = found.into_iter().unzip();
        Ok(PruneTrace { survivors, messages, words })
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = format!(
            "# foldlist hse-key q={} delta={} b={} zeta={}/{} lambda={} c={} seed={} backend={}\n",
            self.base.size(),
            p.delta,
            p.b,
            p.zeta.0,
            p.zeta.1,
            p.lambda,
            p.c,
            self.seed,
            self.backend.name()
        );
        let _ = writeln!(s, "base p={} modulus={}", self.base.characteristic(), self.base.modulus_string());
        for (i, level) in self.levels.iter().enumerate() {
            let _ = writeln!(s, "level {}", i + 1);
            level.write(&mut s);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<HseKey> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut next = || lines.next().ok_or_else(|| Error::Parse("truncated key file".into()));
        let header = next()?;
        let get = |line: &str, key: &str| -> Result<String> {
            line.split_whitespace()
                .find_map(|t| t.strip_prefix(key).map(str::to_string))
                .ok_or_else(|| Error::Parse(format!("missing {key}")))
        };
        let num = |line: &str, key: &str| -> Result<usize> {
            get(line, key)?.parse().map_err(|_| Error::Parse(format!("bad {key}")))
        };
        let zeta = get(header, "zeta=")?;
        let (zn, zd) = zeta.split_once('/').ok_or_else(|| Error::Parse("bad zeta".into()))?;
        let zeta = (
            zn.parse().map_err(|_| Error::Parse("bad zeta".into()))?,
            zd.parse().map_err(|_| Error::Parse("bad zeta".into()))?,
        );
        let params = HseParams::with_lambda(num(header, "delta=")?, num(header, "b=")?, zeta, num(header, "c=")?, num(header, "lambda=")?)?;
        let seed: u64 = get(header, "seed=")?.parse().map_err(|_| Error::Parse("bad seed".into()))?;
        let backend = match get(header, "backend=")?.as_str() {
            "binary" => Backend::Binary,
            "poly" => Backend::Poly,
            other => return Err(Error::Parse(format!("unknown backend {other}"))),
        };
        let base_line = next()?;
        let p = num(base_line, "p=")? as u32;
        let base = Arc::new(Field::from_modulus(p, &parse_digits(&get(base_line, "modulus=")?)?)?);
        if base.size() != num(header, "q=")? {
            return Err(Error::Parse("base field size does not match q".into()));
        }
        let mut levels = Vec::with_capacity(params.b);
        for i in 1..=params.b {
            if next()? != format!("level {i}") {
                return Err(Error::Parse(format!("expected level {i}")));
            }
            let modulus = next()?
                .strip_prefix("modulus ")
                .ok_or_else(|| Error::Parse("expected a modulus line".into()))?
                .to_string();
            let (pl, ql) = (next()?, next()?);
            let digits = i * params.delta;
            levels.push(match backend {
                Backend::Binary => AnyLevel::Binary(Level::read(
                    Arc::new(BinaryExt::from_modulus_string(base.clone(), digits, &modulus)?),
                    pl,
                    ql,
                )?),
                Backend::Poly => AnyLevel::Poly(Level::read(
                    Arc::new(PolyExt::from_modulus_string(base.clone(), digits, &modulus)?),
                    pl,
                    ql,
                )?),
            });
        }
        for level in &levels {
            let (np, nq) = match level {
                AnyLevel::Binary(l) => (l.p.len(), l.q.len()),
                AnyLevel::Poly(l) => (l.p.len(), l.q.len()),
            };
            if np != params.lambda + 1 || nq != params.lambda + 1 {
                return Err(Error::Parse("polynomial length does not match λ".into()));
            }
        }
        Ok(HseKey { params, base, backend, seed, levels })
    }
}

/// Intersection statistics of H with sampled periodic subspaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvasiveReport {
    pub trials: usize,
    /// Largest |proj_{iΔ}(H) ∩ proj_{iΔ}(W)| seen at each level.
    pub max_per_level: Vec<usize>,
    pub mean_per_level: Vec<f64>,
    /// Largest |H ∩ W|.
    pub max_final: usize,
    /// Largest number of messages with encoding in W.
    pub max_messages: usize,
    /// Reference lines L = ck and ℓ = 20c/ζ.
    pub reference_l: usize,
    pub reference_ell: f64,
}

/// Prunes every subspace from `source` and records intersection sizes.
pub fn verify_evasive<I>(key: &HseKey, source: I, cap: usize) -> Result<EvasiveReport>
where
    I: IntoIterator<Item = PeriodicSubspace>,
{
    let p = key.params();
    let mut max_per_level = vec![0; p.b];
    let mut sum_per_level = vec![0usize; p.b];
    let (mut trials, mut max_messages) = (0, 0);
    for w in source {
        let trace = key.prune(&w, cap)?;
        for (i, &c) in trace.survivors.iter().enumerate() {
            max_per_level[i] = max_per_level[i].max(c);
            sum_per_level[i] += c;
        }
        max_messages = max_messages.max(trace.messages.len());
        trials += 1;
    }
    let z = p.zeta_ratio();
    Ok(EvasiveReport {
        trials,
        mean_per_level: sum_per_level.iter().map(|&s| s as f64 / trials.max(1) as f64).collect(),
        max_final: *max_per_level.last().unwrap_or(&0),
        max_per_level,
        max_messages,
        reference_l: p.c * p.k(),
        reference_ell: 20.0 * p.c as f64 * *z.denom() as f64 / *z.numer() as f64,
    })
}

/// Uniformly random vector over the base field.
pub fn random_vector<R: Rng + ?Sized>(f: &Field, len: usize, rng: &mut R) -> Vec<Fe> {
    (0..len).map(|_| Fe(rng.gen_range(0..f.size()) as u16)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_key(seed: u64) -> HseKey {
        let base = Arc::new(Field::create(2, 2, 0).unwrap());
        let params = HseParams::with_lambda(4, 2, (1, 4), 1, 6).unwrap();
        HseKey::sample(base, params, Backend::Binary, seed).unwrap()
    }

    #[test]
    fn params_shape() {
        let p = HseParams::new(15, 2, (1, 15), 2).unwrap();
        assert_eq!((p.zeta_delta(), p.check_len(), p.chunk_len(), p.message_len()), (1, 3, 12, 24));
        assert_eq!(p.lambda, 180);
        assert!(HseParams::new(15, 2, (1, 2), 1).is_err());
        assert!(HseParams::new(4, 2, (1, 3), 1).is_err());
    }

    #[test]
    fn encode_lands_in_h_and_decodes() {
        let key = tiny_key(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut ok = 0;
        for _ in 0..50 {
            let x = random_vector(key.base(), key.params().message_len(), &mut rng);
            if let Ok(y) = key.encode(&x) {
                assert!(key.h_member(&y));
                assert_eq!(key.decode(&y).unwrap(), x);
                assert_eq!(key.strip(&y), x);
                ok += 1;
            }
        }
        assert!(ok > 0);
    }

    #[test]
    fn key_text_round_trip() {
        for backend in [Backend::Binary, Backend::Poly] {
            let base = Arc::new(Field::create(2, 2, 0).unwrap());
            let params = HseParams::with_lambda(4, 2, (1, 4), 1, 5).unwrap();
            let key = HseKey::sample(base, params, backend, 7).unwrap();
            let text = key.to_text();
            let back = HseKey::from_text(&text).unwrap();
            assert_eq!(back.to_text(), text);
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for _ in 0..20 {
                let y = random_vector(key.base(), 8, &mut rng);
                assert_eq!(key.h_member(&y), back.h_member(&y));
            }
        }
    }

    #[test]
    fn zero_is_in_every_lambda() {
        let key = tiny_key(1);
        let digits = |n: usize| "0".repeat(n * 2);
        assert!(key.lambda_member(1, &digits(4)).unwrap());
        assert!(key.lambda_member(2, &digits(8)).unwrap());
    }
}
