use std::sync::Arc;

use foldlist::algebra::{Backend, Fe, Field};
use foldlist::hse::{random_vector, verify_evasive, HseKey, HseParams};
use foldlist::periodic::PeriodicSubspace;
use foldlist::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tiny_key(seed: u64) -> HseKey {
    let base = Arc::new(Field::create(2, 2, 0).unwrap());
    let params = HseParams::with_lambda(4, 2, (1, 4), 1, 6).unwrap();
    HseKey::sample(base, params, Backend::Binary, seed).unwrap()
}

fn small_key(seed: u64) -> HseKey {
    let base = Arc::new(Field::create(2, 4, 0).unwrap());
    HseKey::sample(base, HseParams::new(15, 2, (1, 15), 2).unwrap(), Backend::Binary, seed).unwrap()
}

fn all_vectors(f: &Field, len: usize) -> impl Iterator<Item = Vec<Fe>> + '_ {
    let q = f.size();
    (0..q.pow(len as u32)).map(move |mut i| {
        (0..len)
            .map(|_| {
                let d = Fe((i % q) as u16);
                i /= q;
                d
            })
            .collect()
    })
}

fn brute_force(key: &HseKey, w: &PeriodicSubspace) -> Vec<Vec<Fe>> {
    let mut out: Vec<Vec<Fe>> = all_vectors(key.base(), key.params().message_len())
        .filter(|x| key.encode(x).is_ok_and(|y| w.contains(&y)))
        .collect();
    out.sort();
    out
}

#[test]
fn small_encodings_are_in_h_and_decode() {
    let key = small_key(4);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let x = random_vector(key.base(), key.params().message_len(), &mut rng);
        let y = key.encode(&x).unwrap();
        assert!(key.h_member(&y));
        assert_eq!(key.decode(&y).unwrap(), x);
    }
}

#[test]
fn altered_check_symbols_are_out_of_range() {
    let key = small_key(4);
    let f = key.base().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = random_vector(&f, key.params().message_len(), &mut rng);
    let y = key.encode(&x).unwrap();
    let p = key.params();
    for block in 0..p.b {
        for j in p.chunk_len()..p.delta {
            let mut z = y.clone();
            let at = block * p.delta + j;
            z[at] = f.add(z[at], Fe::ONE);
            assert!(matches!(key.decode(&z), Err(Error::NotInRange)), "block {block} slot {j}");
        }
    }
    assert!(matches!(key.decode(&y[1..]), Err(Error::NotInRange)));
}

#[test]
fn encoding_picks_the_smallest_check_block() {
    let key = tiny_key(2);
    let f = key.base().clone();
    let p = key.params().clone();
    for x in all_vectors(&f, p.message_len()) {
        let Ok(y) = key.encode(&x) else { continue };
        let first = all_vectors(&f, p.check_len())
            .map(|beta| {
                let mut z = y[..p.chunk_len()].to_vec();
                z.extend(beta);
                z
            })
            .filter(|z| key.gamma_level(1, z))
            .min_by_key(|z| z.iter().map(|a| a.0).collect::<Vec<u16>>())
            .unwrap();
        assert_eq!(y[..p.delta], first[..]);
    }
}

#[test]
fn prune_matches_brute_force() {
    let key = tiny_key(5);
    let f = key.base().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..12 {
        let (period, dim) = [(4, 2), (4, 3), (2, 1), (4, 4)][trial % 4];
        let w = PeriodicSubspace::random(f.clone(), period, 8 / period, dim, &mut rng);
        let trace = key.prune(&w, 1 << 16).unwrap();
        assert_eq!(trace.messages, brute_force(&key, &w), "trial {trial}");
        for (x, y) in trace.messages.iter().zip(&trace.words) {
            assert_eq!(key.encode(x).unwrap(), *y);
        }
    }
}

#[test]
fn prune_of_full_space_lists_every_encodable_message() {
    let key = tiny_key(1);
    let f = key.base().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let w = PeriodicSubspace::random(f.clone(), 4, 2, 4, &mut rng);
    let trace = key.prune(&w, 1 << 16).unwrap();
    let expect = all_vectors(&f, 2).filter(|x| key.encode(x).is_ok()).count();
    assert_eq!(trace.messages.len(), expect);
}

#[test]
fn prune_respects_cap_and_period() {
    let key = tiny_key(1);
    let f = key.base().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let w = PeriodicSubspace::random(f.clone(), 4, 2, 4, &mut rng);
    assert!(matches!(key.prune(&w, 2), Err(Error::CandidateExplosion { level: 1, .. })));
    let w = PeriodicSubspace::random(f.clone(), 8, 1, 2, &mut rng);
    assert!(key.prune(&w, 100).is_err());
}

#[test]
fn lambda_has_exact_density() {
    let key = tiny_key(3);
    let f = key.base().clone();
    let members = all_vectors(&f, 4)
        .filter(|v| {
            let s: String = v.iter().map(|&a| f.to_digit_string(a)).collect();
            key.lambda_member(1, &s).unwrap()
        })
        .count();
    assert_eq!(members, 64);
}

#[test]
fn key_text_round_trip() {
    let key = tiny_key(9);
    let back = HseKey::from_text(&key.to_text()).unwrap();
    assert_eq!(back.to_text(), key.to_text());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let y = random_vector(key.base(), 8, &mut rng);
        assert_eq!(key.h_member(&y), back.h_member(&y));
    }
}

#[test]
fn evasive_report_on_random_subspaces() {
    let key = tiny_key(6);
    let f = key.base().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ws: Vec<PeriodicSubspace> = (0..20).map(|_| PeriodicSubspace::random(f.clone(), 4, 2, 1, &mut rng)).collect();
    let rep = verify_evasive(&key, ws, 1 << 12).unwrap();
    assert_eq!(rep.trials, 20);
    assert_eq!(rep.max_per_level.len(), 2);
    assert!(rep.max_messages <= rep.max_final);
    assert_eq!(rep.reference_l, 8);
}
