use std::path::PathBuf;
use std::sync::Arc;

use foldlist::algebra::{Fe, Field};
use foldlist::code::{corrupt, CodeParams, Codeword, FoldedCode};
use foldlist::decoder::ListDecoder;
use foldlist::pipeline::{describe, plan_params, sweep, Pipeline, PipelineConfig, PlanRequest};
use foldlist::tower::{Hermitian, Tower, TowerKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(name: &str) -> PipelineConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    PipelineConfig::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn random_word(f: &Field, n: usize, m: usize, rng: &mut impl Rng) -> Codeword {
    Codeword { columns: (0..n).map(|_| (0..m).map(|_| Fe(rng.gen_range(0..f.size()) as u16)).collect()).collect() }
}

#[test]
fn shipped_configs_are_consistent() {
    let h = describe(&config("h-small.json")).unwrap();
    assert_eq!((h.genus, h.places, h.d, h.t_min), (6, 60, 13, 10));
    let g = describe(&config("tiny-gs.json")).unwrap();
    assert_eq!((g.genus, g.places, g.d, g.t_min), (16, 100, 28, 23));
    let e = describe(&config("e2e-demo.json")).unwrap();
    assert_eq!((e.genus, e.places, e.d, e.t_min), (28, 504, 80, 38));
    assert!((e.overall_rate - 120.0 / 504.0).abs() < 1e-12);
}

#[test]
fn tiny_gs_pipeline_equals_oracle() {
    let p = Pipeline::build(config("tiny-gs.json")).unwrap();
    let f = p.field().clone();
    let table = p.message_table(1 << 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for trial in 0..6 {
        let rx = if trial < 4 {
            let (_, cw) = p.random_message(&mut rng).unwrap();
            corrupt(&f, &cw, trial, &mut rng)
        } else {
            random_word(&f, 25, 4, &mut rng)
        };
        let mut got = p.decode(&rx).unwrap().accepted;
        got.sort();
        assert_eq!(got, p.oracle_in(&table, &rx), "trial {trial}");
    }
}

#[test]
fn hermitian_tiny_subspace_contains_radius_list() {
    let tower = Arc::new(Hermitian::new(4, 2, 1).unwrap());
    let code = Arc::new(FoldedCode::new(tower.clone(), CodeParams::validate(&*tower, 5, 12, 4).unwrap()).unwrap());
    let dec = ListDecoder::new(code.clone(), 2).unwrap();
    assert_eq!((dec.params().d, dec.params().t_min), (17, 9));
    let f = tower.field().clone();
    let all: Vec<(Vec<Fe>, Codeword)> = (0..1u32 << 16)
        .map(|i| {
            let msg: Vec<Fe> = (0..4).map(|j| Fe(((i >> (4 * j)) & 15) as u16)).collect();
            let cw = code.encode(&msg).unwrap();
            (msg, cw)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut nonempty = 0;
    for trial in 0..4 {
        let planted = &all[rng.gen_range(0..all.len())].1;
        let rx = corrupt(&f, planted, 3, &mut rng);
        let w = dec.decode_subspace(&rx).unwrap();
        for (msg, cw) in &all {
            if cw.agreements(&rx) >= 9 {
                nonempty += 1;
                assert!(w.contains(msg), "trial {trial}");
            }
        }
    }
    assert!(nonempty >= 4);
}

#[test]
fn planner_threshold_is_consistent() {
    for (tower, r) in [(TowerKind::Hermitian, 4), (TowerKind::Gs, 4), (TowerKind::Gs, 5)] {
        for s in 1..=3 {
            let req = PlanRequest { tower: Some(tower), r: Some(r), s: Some(s), ..Default::default() };
            let Ok(rep) = plan_params(&req) else { continue };
            let n = rep.config.n;
            assert!(n - rep.t_min >= (rep.tau_closed * n as f64).floor() as usize);
            assert!(rep.tau_closed < s as f64 / (s + 1) as f64);
        }
    }
}

#[test]
fn sweep_reports_full_recovery_within_radius() {
    let p = Pipeline::build(config("tiny-gs.json")).unwrap();
    let rows = sweep(&p, &[0, 2], 3, 11).unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row.recovery, 1.0);
        assert!(row.mean_list >= 1.0);
    }
    assert!(sweep(&p, &[26], 1, 0).is_err());
}

#[test]
fn key_must_match_configuration() {
    let cfg = config("tiny-gs.json");
    let p = Pipeline::build(cfg.clone()).unwrap();
    let mut other = cfg.clone();
    other.zeta = (1, 8);
    other.b = 1;
    assert!(Pipeline::with_key(other, foldlist::hse::HseKey::from_text(&p.key().to_text()).unwrap()).is_err());
    assert!(Pipeline::with_key(cfg, foldlist::hse::HseKey::from_text(&p.key().to_text()).unwrap()).is_ok());
}
