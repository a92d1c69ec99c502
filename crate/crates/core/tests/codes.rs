use std::collections::HashSet;
use std::sync::Arc;

use foldlist::algebra::{Fe, Field};
use foldlist::code::{corrupt, corrupt_burst, CodeParams, Codeword, FoldedCode};
use foldlist::tower::{GarciaStichtenoth, Hermitian, Tower};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn code(tower: Arc<dyn Tower>, m: usize, n: usize, k: usize) -> FoldedCode {
    let params = CodeParams::validate(&*tower, m, n, k).unwrap();
    FoldedCode::new(tower, params).unwrap()
}

fn h_small() -> FoldedCode {
    code(Arc::new(Hermitian::new(4, 2, 1).unwrap()), 5, 12, 14)
}

fn gs_small() -> FoldedCode {
    code(Arc::new(GarciaStichtenoth::new(5, 2, 1).unwrap()), 4, 25, 8)
}

fn random_vec(f: &Field, k: usize, rng: &mut impl Rng) -> Vec<Fe> {
    (0..k).map(|_| Fe(rng.gen_range(0..f.size()) as u16)).collect()
}

fn weight(cw: &Codeword) -> usize {
    cw.columns.iter().filter(|c| c.iter().any(|a| !a.is_zero())).count()
}

#[test]
fn rate_and_distance_bounds() {
    let c = h_small();
    assert_eq!(c.params().l, 25);
    assert_eq!(c.params().rate(), Ratio::new(14, 60));
    assert_eq!(c.params().distance_bound(), Ratio::from_integer(7));
    let c = gs_small();
    assert_eq!(c.params().l, 39);
    assert_eq!(c.params().rate(), Ratio::new(8, 100));
    assert_eq!(c.params().distance_bound().ceil(), Ratio::from_integer(16));
}

#[test]
fn ev_inverts_kappa() {
    for c in [h_small(), gs_small()] {
        let f = c.field().clone();
        let k = c.params().k;
        for d in 0..k {
            let mut unit = vec![Fe::ZERO; k];
            unit[d] = Fe::ONE;
            assert_eq!(c.ev(&c.kappa(&unit)), unit);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let msg = random_vec(&f, k, &mut rng);
            assert_eq!(c.ev(&c.kappa(&msg)), msg);
            assert_eq!(c.encode(&msg).unwrap(), c.encode_raw(&c.kappa(&msg)));
        }
    }
}

#[test]
fn encode_raw_is_pointwise_evaluation() {
    let c = h_small();
    let f = c.field().clone();
    let dim = c.space().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let coeffs = random_vec(&f, dim, &mut rng);
    let cw = c.encode_raw(&coeffs);
    for i in 0..c.params().n {
        for (j, p) in c.column_places(i).iter().enumerate() {
            assert_eq!(cw.columns[i][j], f.dot(&coeffs, &c.space().values_at(p)));
        }
    }
    assert_eq!(weight(&c.encode_raw(&vec![Fe::ZERO; dim])), 0);
    let mut one = vec![Fe::ZERO; dim];
    let pos = c.space().pole_orders().iter().position(|&p| p == 0).unwrap();
    one[pos] = Fe::ONE;
    assert!(c.encode_raw(&one).columns.iter().flatten().all(|&a| a == Fe::ONE));
}

#[test]
fn evaluation_places_are_distinct() {
    for c in [h_small(), gs_small()] {
        let set: HashSet<&Vec<Fe>> = c.places().iter().collect();
        assert_eq!(set.len(), c.params().n * c.params().m);
        let t = c.tower();
        for i in 0..c.params().n {
            let col = c.column_places(i);
            for j in 1..col.len() {
                assert_eq!(col[j], t.sigma(&col[0], j as i64));
            }
        }
    }
}

#[test]
fn two_coordinate_subcode_meets_distance_bound() {
    let c = h_small();
    let f = c.field().clone();
    let mut min = usize::MAX;
    for a in f.elements() {
        for b in f.elements() {
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let mut msg = vec![Fe::ZERO; 14];
            msg[0] = a;
            msg[1] = b;
            min = min.min(weight(&c.encode(&msg).unwrap()));
        }
    }
    assert!(min >= 7, "minimum weight {min}");
}

#[test]
fn encoding_is_injective_at_small_k() {
    let c = code(Arc::new(Hermitian::new(4, 2, 1).unwrap()), 5, 12, 2);
    let f = c.field().clone();
    let mut seen = HashSet::new();
    for a in f.elements() {
        for b in f.elements() {
            assert!(seen.insert(c.encode(&[a, b]).unwrap()));
        }
    }
    assert_eq!(seen.len(), 256);
}

#[test]
fn wrong_message_length_is_rejected() {
    assert!(h_small().encode(&[Fe::ONE; 3]).is_err());
}

#[test]
fn word_text_round_trip() {
    let c = gs_small();
    let f = c.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cw = c.encode(&random_vec(&f, 8, &mut rng)).unwrap();
    let text = cw.to_text(&f, &c.params_hash());
    let (back, hash) = Codeword::from_text(&f, &text).unwrap();
    assert_eq!((back, hash), (cw, c.params_hash()));
    let truncated: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
    assert!(Codeword::from_text(&f, &truncated).is_err());
    assert_ne!(c.params_hash(), h_small().params_hash());
}

#[test]
fn corruption_touches_exactly_t_columns() {
    let c = h_small();
    let f = c.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cw = c.encode(&random_vec(&f, 14, &mut rng)).unwrap();
    for t in 0..=12 {
        let rx = corrupt(&f, &cw, t, &mut rng);
        assert_eq!(rx.agreements(&cw), 12 - t);
        let rx = corrupt_burst(&f, &cw, 10, t, &mut rng);
        assert_eq!(rx.agreements(&cw), 12 - t);
        for i in 0..12 {
            let hit = (i + 2) % 12 < t;
            assert_eq!(rx.columns[i] != cw.columns[i], hit, "t={t} column {i}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encode_is_linear(seed in any::<u64>(), a in 0u16..16) {
        let c = h_small();
        let f = c.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_vec(&f, 14, &mut rng);
        let v = random_vec(&f, 14, &mut rng);
        let mix: Vec<Fe> = u.iter().zip(&v).map(|(&x, &y)| f.add(f.mul(Fe(a), x), y)).collect();
        let cu = c.encode(&u).unwrap();
        let cv = c.encode(&v).unwrap();
        let expect: Vec<Vec<Fe>> = cu.columns.iter().zip(&cv.columns)
            .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| f.add(f.mul(Fe(a), p), q)).collect())
            .collect();
        prop_assert_eq!(c.encode(&mix).unwrap().columns, expect);
    }
}
