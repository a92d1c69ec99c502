use std::collections::HashSet;
use std::sync::Arc;

use foldlist::algebra::linalg::{nullspace, rank, rref};
use foldlist::algebra::{Fe, Field, Matrix};
use foldlist::periodic::PeriodicSubspace;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fields() -> Vec<Field> {
    vec![
        Field::prime(2).unwrap(),
        Field::create(2, 4, 0).unwrap(),
        Field::create(5, 2, 0).unwrap(),
        Field::create(2, 6, 0).unwrap(),
    ]
}

fn random_matrix(f: &Field, rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    let data: Vec<Vec<Fe>> =
        (0..rows).map(|_| (0..cols).map(|_| Fe(rng.gen_range(0..f.size()) as u16)).collect()).collect();
    Matrix::from_rows(&data, cols)
}

proptest! {
    #[test]
    fn field_axioms(which in 0usize..4, a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
        let fs = fields();
        let f = &fs[which];
        let q = f.size() as u16;
        let (a, b, c) = (Fe(a % q), Fe(b % q), Fe(c % q));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.mul(a, Fe::ONE), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a)), Fe::ONE);
            prop_assert_eq!(f.pow(a, q as u64 - 1), Fe::ONE);
        }
    }

    #[test]
    fn rank_plus_nullity(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..9) {
        let f = Field::create(2, 4, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&f, rows, cols, &mut rng);
        let null = nullspace(&f, &m);
        prop_assert_eq!(rank(&f, &m) + null.len(), cols);
        for v in &null {
            prop_assert!(m.mul_vec(&f, v).iter().all(|a| a.is_zero()));
        }
        prop_assert_eq!(rank(&f, &m), rank(&f, &m.transpose()));
    }
}

#[test]
fn multiplicative_groups_are_cyclic() {
    for f in fields() {
        let g = f.primitive_element();
        assert_eq!(f.multiplicative_order(g), f.size() as u64 - 1);
        let powers: HashSet<Fe> = (0..f.size() as u64 - 1).map(|e| f.pow(g, e)).collect();
        assert_eq!(powers.len(), f.size() - 1);
    }
}

#[test]
fn rref_is_idempotent_and_preserves_row_space() {
    let f = Field::create(5, 2, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let m = random_matrix(&f, 5, 7, &mut rng);
        let red = rref(&f, &m);
        assert_eq!(rref(&f, &red.matrix).matrix, red.matrix);
        let mut stacked = m.to_rows();
        stacked.extend(red.matrix.to_rows());
        assert_eq!(rank(&f, &Matrix::from_rows(&stacked, 7)), red.rank);
    }
}

fn all_vectors(f: &Field, len: usize) -> Vec<Vec<Fe>> {
    let q = f.size();
    (0..q.pow(len as u32))
        .map(|mut i| {
            (0..len)
                .map(|_| {
                    let d = Fe((i % q) as u16);
                    i /= q;
                    d
                })
                .collect()
        })
        .collect()
}

#[test]
fn periodic_membership_matches_affine_form() {
    let f = Arc::new(Field::create(2, 2, 0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for dim in 0..3 {
        let w = PeriodicSubspace::random(f.clone(), 3, 2, dim, &mut rng);
        let aff = w.as_affine().unwrap();
        let members: Vec<Vec<Fe>> = all_vectors(&f, 6).into_iter().filter(|y| w.contains(y)).collect();
        assert!(all_vectors(&f, 6).iter().all(|y| w.contains(y) == aff.contains(&f, y)));
        assert_eq!(members.len() as u128, aff.count(&f));
        assert_eq!(members.len(), 4usize.pow(2 * dim as u32));
    }
}

#[test]
fn extensions_reproduce_projections() {
    let f = Arc::new(Field::create(2, 2, 0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = PeriodicSubspace::random_recurrent(f.clone(), 2, 4, &[1], &mut rng);
    let aff = w.as_affine().unwrap();
    let points: Vec<Vec<Fe>> = aff.enumerate(&f, 1 << 16).unwrap().collect();
    for i in 1..=4 {
        let proj: HashSet<Vec<Fe>> = points.iter().map(|y| y[..2 * i].to_vec()).collect();
        assert!(proj.len() <= 4usize.pow(i as u32));
        let grown: HashSet<Vec<Fe>> = w.extensions(&[], 2 * i).into_iter().collect();
        assert_eq!(grown, proj, "i={i}");
    }
}

#[test]
fn coarsening_keeps_the_point_set() {
    let f = Arc::new(Field::create(2, 2, 0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let w = PeriodicSubspace::random_recurrent(f.clone(), 2, 4, &[0], &mut rng);
    let wide = w.coarsen(2).unwrap();
    assert_eq!((wide.delta(), wide.block_count()), (4, 2));
    for y in all_vectors(&f, 8) {
        assert_eq!(w.contains(&y), wide.contains(&y));
    }
    assert!(w.coarsen(3).is_err());
}

#[test]
fn text_round_trip() {
    let f = Arc::new(Field::create(5, 2, 0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = PeriodicSubspace::random(f.clone(), 3, 3, 1, &mut rng);
    let back = PeriodicSubspace::from_text(&w.to_text()).unwrap();
    let aff = w.as_affine().unwrap();
    for y in aff.enumerate(&f, 1 << 16).unwrap() {
        assert!(back.contains(&y));
    }
    assert_eq!(back.as_affine().unwrap().count(&f), aff.count(&f));
}
