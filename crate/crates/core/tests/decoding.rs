use std::sync::Arc;

use foldlist::algebra::{Fe, Field};
use foldlist::code::{corrupt, CodeParams, FoldedCode};
use foldlist::decoder::{degree_param, DecodeParams, ListDecoder};
use foldlist::tower::{GarciaStichtenoth, Hermitian, RationalLine, Tower};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_msg(f: &Field, k: usize, rng: &mut ChaCha8Rng) -> Vec<Fe> {
    (0..k).map(|_| Fe(rng.gen_range(0..f.size()) as u16)).collect()
}

fn decoder(tower: Arc<dyn Tower>, m: usize, n: usize, k: usize, s: usize) -> ListDecoder {
    let params = CodeParams::validate(&*tower, m, n, k).unwrap();
    let code = Arc::new(FoldedCode::new(tower, params).unwrap());
    ListDecoder::new(code, s).unwrap()
}

#[test]
fn small_parameter_values() {
    assert_eq!(degree_param(12, 5, 2, 14, 6), Some(13));
    assert_eq!(degree_param(25, 4, 2, 8, 16), Some(28));
    let h = Hermitian::new(4, 2, 1).unwrap();
    let dp = DecodeParams::new(CodeParams::validate(&h, 5, 12, 14).unwrap(), 2).unwrap();
    assert_eq!((dp.d, dp.t_min, dp.max_errors()), (13, 10, 2));
    assert_eq!(dp.freedoms(), 49);
    assert_eq!(dp.equations(), 48);
    let tau = dp.tau_closed();
    assert!((*tau.numer() as f64 / *tau.denom() as f64 - 0.0972).abs() < 1e-4);
    let g = GarciaStichtenoth::new(5, 2, 1).unwrap();
    let dp = DecodeParams::new(CodeParams::validate(&g, 4, 25, 8).unwrap(), 2).unwrap();
    assert_eq!((dp.d, dp.t_min, dp.max_errors()), (28, 23, 2));
    // Genus-zero D coincides with the general formula at g = 0.
    let rs = RationalLine::new(64, 1).unwrap();
    let dp = DecodeParams::new(CodeParams::validate(&rs, 4, 15, 10).unwrap(), 2).unwrap();
    assert_eq!(dp.d, degree_param(15, 4, 2, 10, 0).unwrap());
    assert_eq!(dp.tau_closed(), Ratio::new(2, 3) * (Ratio::from_integer(1) - Ratio::new(10, 45)));
}

#[test]
fn interpolation_shape_hermitian_small() {
    let dec = decoder(Arc::new(Hermitian::new(4, 2, 1).unwrap()), 5, 12, 14, 2);
    assert_eq!(dec.system_shape(), (48, 49));
}

fn planted(tower: Arc<dyn Tower>, m: usize, n: usize, k: usize, s: usize, trials: u64) {
    let dec = decoder(tower.clone(), m, n, k, s);
    let f = tower.field().clone();
    let delta = tower.sigma_order();
    let bound = dec.params().dimension_bound(delta);
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let msg = random_msg(&f, k, &mut rng);
        let cw = dec.code().encode(&msg).unwrap();
        let rx = corrupt(&f, &cw, dec.params().max_errors(), &mut rng);
        let w = dec.decode_subspace(&rx).unwrap();
        assert!(w.contains(&msg), "seed {seed}");
        assert!(w.as_affine().unwrap().dim() <= bound, "seed {seed}");
    }
}

#[test]
fn planted_hermitian() {
    planted(Arc::new(Hermitian::new(4, 2, 1).unwrap()), 5, 12, 14, 2, 20);
}

#[test]
fn planted_gs() {
    planted(Arc::new(GarciaStichtenoth::new(5, 2, 1).unwrap()), 4, 25, 8, 2, 20);
}

#[test]
fn planted_folded_rs() {
    planted(Arc::new(RationalLine::new(64, 1).unwrap()), 4, 15, 10, 2, 20);
}
