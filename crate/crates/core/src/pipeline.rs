//! The composed code: HSE pre-coding followed by folded encoding, and its full decoder
//! (interpolate, extract the periodic subspace, coarsen, prune, filter by agreement).

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Backend, Fe, Field};
use crate::code::{corrupt, CodeParams, Codeword, FoldedCode};
use crate::decoder::{DecodeParams, ListDecoder};
use crate::error::{Error, Result};
use crate::hse::{random_vector, HseKey, HseParams};
use crate::tower::{GarciaStichtenoth, Hermitian, RationalLine, Tower, TowerKind};

pub const DEFAULT_PRUNE_CAP: usize = 10_000;

fn default_cap() -> usize {
    DEFAULT_PRUNE_CAP
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub tower: TowerKind,
    /// Tower parameter r; the field size q for the rational line.
    pub r: usize,
    #[serde(default)]
    pub e: usize,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub b: usize,
    /// ζ as [numerator, denominator].
    pub zeta: (usize, usize),
    #[serde(default = "default_c")]
    pub c: usize,
    #[serde(default)]
    pub lambda: Option<usize>,
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default)]
    pub field_seed: u64,
    #[serde(default)]
    pub key_seed: u64,
    #[serde(default = "default_cap")]
    pub prune_cap: usize,
}

fn default_c() -> usize {
    2
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<PipelineConfig> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The tower's message period Δ = k / b.
    pub fn delta(&self) -> Result<usize> {
        if self.b == 0 || self.k % self.b != 0 {
            return Err(Error::InvalidParams(format!("b = {} must divide k = {}", self.b, self.k)));
        }
        Ok(self.k / self.b)
    }

    pub fn build_tower(&self) -> Result<Arc<dyn Tower>> {
        Ok(match self.tower {
            TowerKind::Hermitian => Arc::new(Hermitian::new(self.r, self.e, self.field_seed)?),
            TowerKind::Gs => Arc::new(GarciaStichtenoth::new(self.r, self.e, self.field_seed)?),
            TowerKind::Rational => Arc::new(RationalLine::new(self.r, self.field_seed)?),
        })
    }

    /// Checks that Δ fits the folding automorphism: equal to its order, or for the
    /// Garcia-Stichtenoth tower a multiple u of it. Returns u.
    pub fn coarsening(&self, tower: &dyn Tower) -> Result<usize> {
        let delta = self.delta()?;
        let order = tower.sigma_order();
        match self.tower {
            TowerKind::Gs if delta % order == 0 => Ok(delta / order),
            TowerKind::Hermitian | TowerKind::Rational if delta == order => Ok(1),
            _ => Err(Error::InvalidParams(format!(
                "Δ = k/b = {delta} does not fit the automorphism order {order} of the {} tower",
                self.tower.name()
            ))),
        }
    }

    pub fn hse_params(&self) -> Result<HseParams> {
        let delta = self.delta()?;
        match self.lambda {
            Some(l) => HseParams::with_lambda(delta, self.b, self.zeta, self.c, l),
            None => HseParams::new(delta, self.b, self.zeta, self.c),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub interpolate_ms: f64,
    pub extract_ms: f64,
    pub prune_ms: f64,
    pub filter_ms: f64,
}

impl Timings {
    pub fn total_ms(&self) -> f64 {
        self.interpolate_ms + self.extract_ms + self.prune_ms + self.filter_ms
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    /// Affine dimension of the candidate subspace, None when it is empty.
    pub subspace_dim: Option<usize>,
    pub subspace_period: usize,
    /// Whether the subspace was regrouped to the key's period before pruning.
    pub coarsened: bool,
    pub survivors_per_level: Vec<usize>,
    pub candidates: Vec<Vec<u16>>,
    pub agreements: Vec<usize>,
    pub accepted: Vec<Vec<u16>>,
    pub timings: Timings,
}

fn indices(v: &[Fe]) -> Vec<u16> {
    v.iter().map(|x| x.0).collect()
}

pub struct Pipeline {
    cfg: PipelineConfig,
    decoder: ListDecoder,
    key: HseKey,
    coarsen: usize,
}

impl Pipeline {
    /// Builds the tower, code and decoder, and samples the key from `cfg.key_seed`.
    pub fn build(cfg: PipelineConfig) -> Result<Pipeline> {
        let tower = cfg.build_tower()?;
        let hp = cfg.hse_params()?;
        let backend = cfg.backend.unwrap_or_else(|| Backend::default_for(tower.field()));
        let key = HseKey::sample(tower.field().clone(), hp, backend, cfg.key_seed)?;
        Pipeline::assemble(cfg, tower, key)
    }

    pub fn with_key(cfg: PipelineConfig, key: HseKey) -> Result<Pipeline> {
        let tower = cfg.build_tower()?;
        if key.base().modulus_string() != tower.field().modulus_string() {
            return Err(Error::InvalidParams("key and code use different base fields".into()));
        }
        if *key.params() != cfg.hse_params()? {
            return Err(Error::InvalidParams("key parameters do not match the configuration".into()));
        }
        Pipeline::assemble(cfg, tower, key)
    }

    fn assemble(cfg: PipelineConfig, tower: Arc<dyn Tower>, key: HseKey) -> Result<Pipeline> {
        let coarsen = cfg.coarsening(&*tower)?;
        let params = CodeParams::validate(&*tower, cfg.m, cfg.n, cfg.k)?;
        let code = Arc::new(FoldedCode::new(tower, params)?);
        let decoder = ListDecoder::new(code, cfg.s)?;
        Ok(Pipeline { cfg, decoder, key, coarsen })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn key(&self) -> &HseKey {
        &self.key
    }

    pub fn decoder(&self) -> &ListDecoder {
        &self.decoder
    }

    pub fn code(&self) -> &Arc<FoldedCode> {
        self.decoder.code()
    }

    pub fn decode_params(&self) -> &DecodeParams {
        self.decoder.params()
    }

    pub fn field(&self) -> &Arc<Field> {
        self.code().field()
    }

    pub fn message_len(&self) -> usize {
        self.key.params().message_len()
    }

    /// (1 - 3ζ)k / (Nm).
    pub fn rate(&self) -> Ratio<usize> {
        Ratio::new(self.message_len(), self.cfg.n * self.cfg.m)
    }

    pub fn encode(&self, x: &[Fe]) -> Result<Codeword> {
        let y = self.key.encode(x)?;
        self.code().encode(&y)
    }

    pub fn decode(&self, rx: &Codeword) -> Result<DecodeReport> {
        let mut timings = Timings::default();
        let clock = Instant::now();
        let q = self.decoder.interpolate(rx)?;
        timings.interpolate_ms = ms(clock);
        let clock = Instant::now();
        let raw = self.decoder.extract_subspace(&q)?;
        timings.extract_ms = ms(clock);
        let clock = Instant::now();
        let (w, coarsened) = match raw.coarsen(self.coarsen) {
            Ok(w) => (w, self.coarsen > 1),
            Err(Error::NonUniformCoupling) => (raw, false),
            Err(e) => return Err(e),
        };
        let trace = self.key.prune(&w, self.cfg.prune_cap)?;
        timings.prune_ms = ms(clock);
        let clock = Instant::now();
        let t_min = self.decode_params().t_min;
        let mut agreements = Vec::with_capacity(trace.messages.len());
        let mut accepted = Vec::new();
        for (x, y) in trace.messages.iter().zip(&trace.words) {
            let a = self.code().encode(y)?.agreements(rx);
            if a >= t_min {
                accepted.push(indices(x));
            }
            agreements.push(a);
        }
        let candidates = trace.messages;
        timings.filter_ms = ms(clock);
        Ok(DecodeReport {
            subspace_dim: w.as_affine().map(|a| a.dim()),
            subspace_period: w.delta(),
            coarsened,
            survivors_per_level: trace.survivors,
            candidates: candidates.iter().map(|x| indices(x)).collect(),
            agreements,
            accepted,
            timings,
        })
    }

    /// Every message whose encoding agrees with `rx` in at least t_min columns, by enumeration.
    pub fn oracle(&self, rx: &Codeword, cap: u128) -> Result<Vec<Vec<u16>>> {
        Ok(self.oracle_in(&self.message_table(cap)?, rx))
    }

    /// All encodable messages with their codewords, in increasing message order.
    pub fn message_table(&self, cap: u128) -> Result<Vec<(Vec<Fe>, Codeword)>> {
        let q = self.field().size() as u128;
        let len = self.message_len();
        let count = q.checked_pow(len as u32).unwrap_or(u128::MAX);
        if count > cap {
            return Err(Error::CapExceeded { count, cap });
        }
        let mut out = Vec::new();
        let mut x = vec![Fe::ZERO; len];
        for idx in 0..count {
            let mut rest = idx;
            for slot in x.iter_mut().rev() {
                *slot = Fe((rest % q) as u16);
                rest /= q;
            }
            match self.encode(&x) {
                Ok(cw) => out.push((x.clone(), cw)),
                Err(Error::EncodingFailure { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// The oracle list for `rx` from a precomputed message table.
    pub fn oracle_in(&self, table: &[(Vec<Fe>, Codeword)], rx: &Codeword) -> Vec<Vec<u16>> {
        let t_min = self.decode_params().t_min;
        table.iter().filter(|(_, cw)| cw.agreements(rx) >= t_min).map(|(x, _)| indices(x)).collect()
    }

    /// Samples a message the key can encode.
    pub fn random_message<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<Fe>, Codeword)> {
        for _ in 0..1000 {
            let x = random_vector(self.field(), self.message_len(), rng);
            match self.encode(&x) {
                Ok(cw) => return Ok((x, cw)),
                Err(Error::EncodingFailure { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Invariant("the key failed to encode 1000 random messages".into()))
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// The folded Reed-Solomon decoder over the rational line, for cross-checking the generic path.
pub fn folded_rs_baseline(q: usize, m: usize, n: usize, k: usize, s: usize, field_seed: u64) -> Result<ListDecoder> {
    if m * n >= q {
        return Err(Error::InvalidParams(format!("mN = {} must be smaller than q = {q}", m * n)));
    }
    let tower: Arc<dyn Tower> = Arc::new(RationalLine::new(q, field_seed)?);
    let params = CodeParams::validate(&*tower, m, n, k)?;
    ListDecoder::new(Arc::new(FoldedCode::new(tower, params)?), s)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub tower: Option<TowerKind>,
    pub r: Option<usize>,
    pub e: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub s: Option<usize>,
    /// Target rate of the folded code k/(Nm), used when k is not given.
    pub rate: Option<(usize, usize)>,
    /// Required error fraction.
    pub tau: Option<(usize, usize)>,
    pub zeta_delta: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub config: PipelineConfig,
    pub genus: usize,
    /// Rational places available to the folding.
    pub places: usize,
    pub d: usize,
    pub t_min: usize,
    pub tau_closed: f64,
    pub code_rate: f64,
    pub overall_rate: f64,
    /// 3mg / ((m-s+1)mN), the genus term subtracted in τ_closed.
    pub genus_penalty: f64,
    pub compliance: Vec<(String, bool)>,
}

impl PlanReport {
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let _ = writeln!(s, "tower        {} r={} e={}", c.tower.name(), c.r, c.e);
        let _ = writeln!(s, "foldable     {} places, genus {}", self.places, self.genus);
        let _ = writeln!(s, "code         m={} N={} k={} s={}", c.m, c.n, c.k, c.s);
        let _ = writeln!(s, "hse          b={} zeta={}/{}", c.b, c.zeta.0, c.zeta.1);
        let _ = writeln!(s, "D            {}", self.d);
        let _ = writeln!(s, "t_min        {} (tolerates {} column errors)", self.t_min, c.n - self.t_min);
        let _ = writeln!(s, "tau_closed   {:.4}", self.tau_closed);
        let _ = writeln!(s, "genus term   {:.4}", self.genus_penalty);
        let _ = writeln!(s, "rate         {:.4} folded, {:.4} overall", self.code_rate, self.overall_rate);
        for (line, ok) in &self.compliance {
            let _ = writeln!(s, "asymptotic   [{}] {line}", if *ok { "ok" } else { "violated" });
        }
        s
    }
}

fn to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Fills unspecified parameters and validates the result. When m or s is free, the choice
/// maximising τ_closed is taken.
pub fn plan_params(req: &PlanRequest) -> Result<PlanReport> {
    let kind = req.tower.unwrap_or(TowerKind::Hermitian);
    let r = req.r.unwrap_or(4);
    let e = req.e.unwrap_or(2);
    if let (Some((tn, td)), Some(s)) = (req.tau, req.s) {
        if Ratio::new(tn, td) >= Ratio::new(s, s + 1) {
            return Err(Error::Infeasible(format!("τ = {tn}/{td} is not below s/(s+1) = {s}/{}", s + 1)));
        }
    }
    let skeleton = PipelineConfig {
        tower: kind,
        r,
        e,
        m: 1,
        n: 1,
        k: 1,
        s: 1,
        b: 1,
        zeta: (1, 1),
        c: default_c(),
        lambda: None,
        backend: None,
        field_seed: 0,
        key_seed: 0,
        prune_cap: DEFAULT_PRUNE_CAP,
    };
    let tower = skeleton.build_tower()?;
    let order = tower.sigma_order();
    let ms: Vec<usize> = match req.m {
        Some(m) => vec![m],
        None => (1..=order).collect(),
    };
    let mut best: Option<(Ratio<i64>, DecodeParams)> = None;
    let mut last_err = None;
    for &m in &ms {
        let n = req.n.unwrap_or_else(|| tower.max_columns(m));
        let k = match (req.k, req.rate) {
            (Some(k), _) => k,
            (None, Some((a, b))) => {
                let raw = (n * m * a).div_ceil(b);
                raw.div_ceil(order).max(1) * order
            }
            (None, None) => order,
        };
        let ss: Vec<usize> = match req.s {
            Some(s) => vec![s],
            None => (1..=m).collect(),
        };
        for s in ss {
            let dp = CodeParams::validate(&*tower, m, n, k).and_then(|cp| DecodeParams::new(cp, s));
            match dp {
                Ok(dp) => {
                    let tau = dp.tau_closed();
                    if let Some((tn, td)) = req.tau {
                        if tau < Ratio::new(tn as i64, td as i64) {
                            last_err = Some(format!("m={m} s={s}: τ_closed {} is below the target", to_f64(tau)));
                            continue;
                        }
                    }
                    if best.as_ref().map_or(true, |(b, _)| tau > *b) {
                        best = Some((tau, dp));
                    }
                }
                Err(err) => last_err = Some(format!("m={m} s={s}: {err}")),
            }
        }
    }
    let Some((tau, dp)) = best else {
        return Err(Error::Infeasible(last_err.unwrap_or_else(|| "no parameters to try".into())));
    };
    let cp = &dp.code;
    let zd = req.zeta_delta.unwrap_or(1);
    let cfg = PipelineConfig {
        m: cp.m,
        n: cp.n,
        k: cp.k,
        s: dp.s,
        b: (cp.k / order).max(1),
        zeta: (zd, order),
        ..skeleton
    };
    let report = describe_with(&cfg, &*tower)?;
    debug_assert_eq!(to_f64(tau), report.tau_closed);
    Ok(report)
}

/// Derived quantities of a fixed configuration, without sampling a key.
pub fn describe(cfg: &PipelineConfig) -> Result<PlanReport> {
    let tower = cfg.build_tower()?;
    describe_with(cfg, &*tower)
}

fn describe_with(cfg: &PipelineConfig, tower: &dyn Tower) -> Result<PlanReport> {
    let cp = CodeParams::validate(tower, cfg.m, cfg.n, cfg.k)?;
    let dp = DecodeParams::new(cp, cfg.s)?;
    let cp = &dp.code;
    let (compliance, msg_len) = match cfg.hse_params() {
        Ok(hp) => (hp.compliance(tower.field().size(), dp.s), hp.message_len()),
        Err(err) => (vec![(format!("pre-coding parameters: {err}"), false)], 0),
    };
    let w = (cp.m + 1 - dp.s) as f64;
    let genus_term = match cfg.tower {
        TowerKind::Gs => (cfg.r as f64).powi(cfg.e as i32),
        _ => cp.genus as f64,
    };
    Ok(PlanReport {
        genus: tower.genus(),
        places: tower.orbit_places().len(),
        d: dp.d,
        t_min: dp.t_min,
        tau_closed: to_f64(dp.tau_closed()),
        code_rate: cp.k as f64 / (cp.n * cp.m) as f64,
        overall_rate: msg_len as f64 / (cp.n * cp.m) as f64,
        genus_penalty: 3.0 * genus_term / (w * cp.n as f64),
        compliance,
        config: cfg.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub errors: usize,
    pub trials: usize,
    pub recovery: f64,
    pub mean_list: f64,
    pub mean_ms: f64,
}

pub const SWEEP_HEADER: &str = "# foldlist sweep v1\nerrors,trials,recovery,mean_list,mean_decode_ms";

/// Planted-message recovery for each error count; trial seeds derive from `seed`, t and the
/// trial index.
pub fn sweep(p: &Pipeline, error_counts: &[usize], trials: usize, seed: u64) -> Result<Vec<SweepRow>> {
    let n = p.config().n;
    let mut rows = Vec::with_capacity(error_counts.len());
    for &t in error_counts {
        if t > n {
            return Err(Error::InvalidParams(format!("{t} errors exceed N = {n}")));
        }
        let (mut hits, mut list, mut total_ms) = (0usize, 0usize, 0.0);
        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((t as u64) << 32) ^ trial as u64);
            let (x, cw) = p.random_message(&mut rng)?;
            let rx = corrupt(p.field(), &cw, t, &mut rng);
            let clock = Instant::now();
            let outcome = p.decode(&rx);
            total_ms += ms(clock);
            match outcome {
                Ok(report) => {
                    list += report.accepted.len();
                    if report.accepted.contains(&indices(&x)) {
                        hits += 1;
                    }
                }
                Err(Error::CandidateExplosion { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let denom = trials.max(1) as f64;
        rows.push(SweepRow {
            errors: t,
            trials,
            recovery: hits as f64 / denom,
            mean_list: list as f64 / denom,
            mean_ms: total_ms / denom,
        });
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{:.4},{:.4},{:.3}", r.errors, r.trials, r.recovery, r.mean_list, r.mean_ms);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_gs() -> PipelineConfig {
        PipelineConfig {
            tower: TowerKind::Gs,
            r: 5,
            e: 2,
            m: 4,
            n: 25,
            k: 8,
            s: 2,
            b: 2,
            zeta: (1, 4),
            c: 2,
            lambda: None,
            backend: None,
            field_seed: 1,
            key_seed: 3,
            prune_cap: DEFAULT_PRUNE_CAP,
        }
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = tiny_gs();
        assert_eq!(PipelineConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let minimal = r#"{"tower":"hermitian","r":4,"e":2,"m":5,"n":12,"k":15,"s":2,"b":1,"zeta":[1,15]}"#;
        let c = PipelineConfig::from_json(minimal).unwrap();
        assert_eq!((c.c, c.prune_cap, c.delta().unwrap()), (2, DEFAULT_PRUNE_CAP, 15));
        assert!(PipelineConfig::from_json(r#"{"tower":"gs","bogus":1}"#).is_err());
    }

    #[test]
    fn delta_must_match_automorphism() {
        let mut cfg = tiny_gs();
        cfg.b = 1;
        let t = cfg.build_tower().unwrap();
        assert_eq!(cfg.coarsening(&*t).unwrap(), 2);
        cfg.b = 8;
        assert!(cfg.coarsening(&*t).is_err());
    }

    #[test]
    fn planted_recovery_tiny_gs() {
        let p = Pipeline::build(tiny_gs()).unwrap();
        assert_eq!(p.rate(), Ratio::new(2, 100));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for t in [0, 2] {
            let (x, cw) = p.random_message(&mut rng).unwrap();
            let rx = corrupt(p.field(), &cw, t, &mut rng);
            let rep = p.decode(&rx).unwrap();
            assert!(rep.accepted.contains(&indices(&x)));
        }
    }

    #[test]
    fn plan_rejects_unreachable_radius() {
        let req = PlanRequest { s: Some(2), tau: Some((2, 3)), ..Default::default() };
        assert!(matches!(plan_params(&req), Err(Error::Infeasible(_))));
    }

    #[test]
    fn sweep_csv_shape() {
        let rows = vec![SweepRow { errors: 0, trials: 2, recovery: 1.0, mean_list: 1.0, mean_ms: 0.5 }];
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("# foldlist sweep v1\n"));
        assert_eq!(csv.lines().nth(2).unwrap(), "0,2,1.0000,1.0000,0.500");
    }
}
