use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use foldlist::algebra::{Fe, Field};
use foldlist::code::{corrupt, corrupt_burst, Codeword};
use foldlist::hse::{verify_evasive, HseKey};
use foldlist::periodic::PeriodicSubspace;
use foldlist::pipeline::{describe, folded_rs_baseline, plan_params, sweep, sweep_csv, Pipeline, PipelineConfig, PlanRequest};
use foldlist::tower::TowerKind;
use foldlist::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type CliResult<T> = std::result::Result<T, Error>;

#[derive(Parser)]
#[command(name = "foldlist", version, about = "Folded AG codes with list decoding and subspace-evasive pre-coding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Pipeline configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override a configuration field, e.g. `--set n=40` or `--set zeta=[1,15]`.
    #[arg(long = "set", value_name = "FIELD=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Clone)]
struct KeyedArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Key file from `keygen`; sampled from the configured key seed when omitted.
    #[arg(long)]
    key: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Derived parameters of a configuration.
    Params {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        json: bool,
    },
    /// Search for parameters meeting the given targets.
    Plan {
        #[arg(long, default_value = "hermitian")]
        tower: String,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        e: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        /// Folded-code rate as a fraction, e.g. 1/4.
        #[arg(long)]
        rate: Option<String>,
        /// Required error fraction, e.g. 1/10.
        #[arg(long)]
        tau: Option<String>,
        /// Write the chosen configuration here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the pre-coding key.
    Keygen {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a message, given as digit strings, or a random one.
    Encode {
        #[command(flatten)]
        keyed: KeyedArgs,
        /// Whitespace-separated field elements.
        #[arg(long, conflicts_with = "random")]
        message: Option<String>,
        /// Encode a random message drawn from this seed; the message goes to stderr.
        #[arg(long)]
        random: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace columns of a word with random different columns.
    Corrupt {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        errors: usize,
        /// Corrupt consecutive columns starting here instead of random ones.
        #[arg(long)]
        burst: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full decode: candidate subspace, pruning and agreement filter.
    Decode {
        #[command(flatten)]
        keyed: KeyedArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// The periodic subspace of candidate pre-coded words.
    DecodeSubspace {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        input: PathBuf,
    },
    /// Exhaustive list of messages within the decoding radius.
    Oracle {
        #[command(flatten)]
        keyed: KeyedArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u128,
    },
    /// Pre-code a message: the word in the key's set that carries it.
    HseEncode {
        #[command(flatten)]
        keyed: KeyedArgs,
        /// Whitespace-separated field elements.
        #[arg(long)]
        message: String,
    },
    /// Recover the message from a pre-coded word; exit code 2 when the word is not in range.
    HseDecode {
        #[command(flatten)]
        keyed: KeyedArgs,
        #[arg(long)]
        word: String,
    },
    /// Intersection statistics of the key's set with random periodic subspaces.
    HseVerify {
        #[command(flatten)]
        keyed: KeyedArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Dimension of the sampled subspaces; defaults to s - 1.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Planted-message recovery rates over a list of error counts, as CSV.
    Sweep {
        #[command(flatten)]
        keyed: KeyedArgs,
        /// Comma-separated error counts.
        #[arg(long, value_delimiter = ',')]
        errors: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Planted recovery with the folded Reed-Solomon decoder.
    BaselineRs {
        #[arg(long, default_value_t = 64)]
        q: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 15)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// Column errors per trial; defaults to N - t_min.
        #[arg(long)]
        errors: Option<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &PathBuf) -> CliResult<String> {
    Ok(fs::read_to_string(path)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(args: &ConfigArgs) -> CliResult<PipelineConfig> {
    let mut value: Value = serde_json::from_str(&read(&args.config)?)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Parse("configuration must be a JSON object".into()))?;
    for o in &args.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("override {o} is not FIELD=VALUE")))?;
        let parsed = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        obj.insert(k.to_string(), parsed);
    }
    Ok(serde_json::from_value(value)?)
}

fn load_pipeline(args: &KeyedArgs) -> CliResult<Pipeline> {
    let cfg = load_config(&args.cfg)?;
    match &args.key {
        Some(p) => Pipeline::with_key(cfg, HseKey::from_text(&read(p)?)?),
        None => Pipeline::build(cfg),
    }
}

fn parse_fraction(s: &str) -> CliResult<(usize, usize)> {
    let bad = || Error::Parse(format!("{s} is not a fraction a/b"));
    let (a, b) = s.split_once('/').ok_or_else(bad)?;
    let (a, b) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_tower(s: &str) -> CliResult<TowerKind> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| Error::Parse(format!("unknown tower {s}")))
}

fn message_text(f: &Field, x: &[Fe]) -> String {
    x.iter().map(|&a| f.to_digit_string(a)).collect::<Vec<_>>().join(" ")
}

fn parse_vector(f: &Field, text: &str) -> CliResult<Vec<Fe>> {
    text.split_whitespace().map(|t| f.parse(t)).collect()
}

fn word_file(p: &Pipeline, path: &PathBuf) -> CliResult<Codeword> {
    let (word, hash) = Codeword::from_text(p.field(), &read(path)?)?;
    let expected = p.code().params_hash();
    if hash != expected {
        return Err(Error::InvalidParams(format!("word was made for parameters {hash}, configuration is {expected}")));
    }
    Ok(word)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Params { cfg, json } => {
            let report = describe(&load_config(&cfg)?)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.to_text());
            }
        }
        Command::Plan { tower, r, e, m, n, k, s, rate, tau, out } => {
            let req = PlanRequest {
                tower: Some(parse_tower(&tower)?),
                r,
                e,
                m,
                n,
                k,
                s,
                rate: rate.as_deref().map(parse_fraction).transpose()?,
                tau: tau.as_deref().map(parse_fraction).transpose()?,
                zeta_delta: None,
            };
            let report = plan_params(&req)?;
            print!("{}", report.to_text());
            if let Some(path) = out {
                fs::write(path, report.config.to_json() + "\n")?;
            }
        }
        Command::Keygen { cfg, seed, out } => {
            let mut cfg = load_config(&cfg)?;
            if let Some(seed) = seed {
                cfg.key_seed = seed;
            }
            let p = Pipeline::build(cfg)?;
            emit(&out, &p.key().to_text())?;
        }
        Command::Encode { keyed, message, random, out } => {
            let p = load_pipeline(&keyed)?;
            let f = p.field().clone();
            let cw = match (message, random) {
                (Some(text), _) => {
                    let x = parse_vector(&f, &text)?;
                    p.encode(&x)?
                }
                (None, seed) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
                    let (x, cw) = p.random_message(&mut rng)?;
                    eprintln!("message {}", message_text(&f, &x));
                    cw
                }
            };
            emit(&out, &cw.to_text(&f, &p.code().params_hash()))?;
        }
        Command::Corrupt { cfg, input, errors, burst, seed, out } => {
            let cfg = load_config(&cfg)?;
            let tower = cfg.build_tower()?;
            let f = tower.field().clone();
            let (word, hash) = Codeword::from_text(&f, &read(&input)?)?;
            if errors > word.len() {
                return Err(Error::InvalidParams(format!("{errors} errors exceed N = {}", word.len())));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bad = match burst {
                Some(start) => corrupt_burst(&f, &word, start, errors, &mut rng),
                None => corrupt(&f, &word, errors, &mut rng),
            };
            emit(&out, &bad.to_text(&f, &hash))?;
        }
        Command::Decode { keyed, input, json } => {
            let p = load_pipeline(&keyed)?;
            let rx = word_file(&p, &input)?;
            let report = p.decode(&rx)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                let f = p.field();
                println!(
                    "# subspace dim {:?} period {} survivors {:?} candidates {} accepted {}",
                    report.subspace_dim,
                    report.subspace_period,
                    report.survivors_per_level,
                    report.candidates.len(),
                    report.accepted.len()
                );
                for x in &report.accepted {
                    let x: Vec<Fe> = x.iter().map(|&v| Fe(v)).collect();
                    println!("{}", message_text(f, &x));
                }
            }
        }
        Command::DecodeSubspace { cfg, input } => {
            let p = Pipeline::build(load_config(&cfg)?)?;
            let rx = word_file(&p, &input)?;
            print!("{}", p.decoder().decode_subspace(&rx)?.to_text());
        }
        Command::Oracle { keyed, input, cap } => {
            let p = load_pipeline(&keyed)?;
            let rx = word_file(&p, &input)?;
            for x in p.oracle(&rx, cap)? {
                let x: Vec<Fe> = x.iter().map(|&v| Fe(v)).collect();
                println!("{}", message_text(p.field(), &x));
            }
        }
        Command::HseEncode { keyed, message } => {
            let p = load_pipeline(&keyed)?;
            let x = parse_vector(p.field(), &message)?;
            println!("{}", message_text(p.field(), &p.key().encode(&x)?));
        }
        Command::HseDecode { keyed, word } => {
            let p = load_pipeline(&keyed)?;
            let y = parse_vector(p.field(), &word)?;
            println!("{}", message_text(p.field(), &p.key().decode(&y)?));
        }
        Command::HseVerify { keyed, trials, dim, seed } => {
            let p = load_pipeline(&keyed)?;
            let hp = p.key().params().clone();
            let dim = dim.unwrap_or(p.config().s.saturating_sub(1)).min(hp.delta - 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let field = p.field().clone();
            let source: Vec<PeriodicSubspace> = (0..trials)
                .map(|_| PeriodicSubspace::random(field.clone(), hp.delta, hp.b, dim, &mut rng))
                .collect();
            let report = verify_evasive(p.key(), source, p.config().prune_cap)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            for (line, ok) in hp.compliance(field.size(), p.config().s) {
                println!("# [{}] {line}", if ok { "ok" } else { "violated" });
            }
        }
        Command::Sweep { keyed, errors, trials, seed, out } => {
            let p = load_pipeline(&keyed)?;
            let rows = sweep(&p, &errors, trials, seed)?;
            emit(&out, &sweep_csv(&rows))?;
        }
        Command::BaselineRs { q, m, n, k, s, errors, trials, seed } => {
            let dec = folded_rs_baseline(q, m, n, k, s, seed)?;
            let f = dec.code().field().clone();
            let t = errors.unwrap_or(dec.params().max_errors());
            let mut hits = 0;
            let mut max_dim = 0;
            for trial in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
                let msg: Vec<Fe> = foldlist::hse::random_vector(&f, k, &mut rng);
                let rx = corrupt(&f, &dec.code().encode(&msg)?, t, &mut rng);
                let w = dec.decode_subspace(&rx)?;
                if w.contains(&msg) {
                    hits += 1;
                }
                max_dim = max_dim.max(w.as_affine().map_or(0, |a| a.dim()));
            }
            let dp = dec.params();
            println!("D {} t_min {} errors {t}", dp.d, dp.t_min);
            println!("recovered {hits}/{trials}, largest subspace dimension {max_dim}");
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Infeasible(_) | Error::NotInRange => 2,
        Error::Invariant(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
