use std::collections::HashSet;

use foldlist::algebra::linalg::rank;
use foldlist::algebra::{Fe, Field, Laurent, Matrix};
use foldlist::tower::gs::gs_genus;
use foldlist::tower::hermitian::hermitian_genus;
use foldlist::tower::{GarciaStichtenoth, Hermitian, RationalLine, Tower};

fn orbit_sizes(t: &dyn Tower) -> Vec<usize> {
    let mut seen = HashSet::new();
    let mut sizes = Vec::new();
    for p in t.orbit_places() {
        if seen.contains(p) {
            continue;
        }
        let mut orbit = HashSet::new();
        let mut cur = p.clone();
        loop {
            orbit.insert(cur.clone());
            cur = t.sigma(&cur, 1);
            if cur == *p {
                break;
            }
        }
        sizes.push(orbit.len());
        seen.extend(orbit);
    }
    sizes
}

#[test]
fn hermitian_counts() {
    let h = Hermitian::new(4, 2, 1).unwrap();
    assert_eq!(h.places().len(), 64);
    assert_eq!(h.genus(), 6);
    assert_eq!(orbit_sizes(&h), vec![15; 4]);
}

#[test]
fn gs_counts() {
    let g = GarciaStichtenoth::new(4, 2, 1).unwrap();
    assert_eq!((g.orbit_places().len(), g.genus()), (48, 9));
    assert_eq!(orbit_sizes(&g), vec![3; 16]);
    let g = GarciaStichtenoth::new(5, 2, 1).unwrap();
    assert_eq!((g.orbit_places().len(), g.genus()), (100, 16));
    assert_eq!(orbit_sizes(&g), vec![4; 25]);
}

#[test]
fn genus_formulas_by_recursion() {
    for (r, e) in [(4, 2), (8, 2), (7, 3)] {
        let g = hermitian_genus(r, e);
        let poles: Vec<usize> = (1..=e).map(|i| r.pow((e - i) as u32) * (r + 1).pow(i as u32 - 1)).collect();
        // The pole-order semigroup has exactly g gaps; count them directly.
        let limit = 2 * g + 2;
        let mut reach = vec![false; limit + 1];
        reach[0] = true;
        for n in 1..=limit {
            reach[n] = poles.iter().any(|&p| n >= p && reach[n - p]);
        }
        assert_eq!(reach.iter().filter(|&&b| !b).count(), g, "r={r} e={e}");
    }
    assert_eq!(gs_genus(4, 2), 9);
    assert_eq!(gs_genus(5, 2), 16);
    assert_eq!(gs_genus(4, 3), 45);
}

#[test]
fn sigma_permutes_places_with_full_order() {
    let towers: Vec<Box<dyn Tower>> = vec![
        Box::new(Hermitian::new(4, 2, 1).unwrap()),
        Box::new(GarciaStichtenoth::new(4, 2, 1).unwrap()),
        Box::new(GarciaStichtenoth::new(5, 2, 1).unwrap()),
        Box::new(RationalLine::new(16, 1).unwrap()),
    ];
    for t in &towers {
        let all: HashSet<Vec<Fe>> = t.orbit_places().iter().cloned().collect();
        let order = t.sigma_order() as i64;
        for p in t.orbit_places() {
            assert!(all.contains(&t.sigma(p, 1)));
            assert_eq!(t.sigma(p, order), *p);
            assert_eq!(t.sigma(&t.sigma(p, 1), -1), *p);
        }
    }
}

#[test]
fn places_satisfy_curve_equations() {
    let h = Hermitian::new(4, 2, 1).unwrap();
    let f = h.field().clone();
    for p in h.places() {
        assert_eq!(f.add(f.pow(p[1], 4), p[1]), f.pow(p[0], 5));
    }
    let g = GarciaStichtenoth::new(5, 2, 1).unwrap();
    let f = g.field().clone();
    for p in g.orbit_places() {
        let lhs = f.mul(f.add(f.pow(p[1], 5), p[1]), f.add(f.pow(p[0], 4), Fe::ONE));
        assert_eq!(lhs, f.pow(p[0], 5));
    }
}

fn known_terms(s: &Laurent) -> i64 {
    s.prec() - s.valuation().unwrap_or(s.prec())
}

#[test]
fn hermitian_residuals_vanish() {
    let h = Hermitian::new(4, 2, 1).unwrap();
    let f = h.field().clone();
    let n = 80;
    let x1 = h.local_expansion_xi(1, n);
    let x2 = h.local_expansion_xi(2, n);
    let lhs = x2.pow(&*f, 4).add(&*f, &x2);
    let res = lhs.sub(&*f, &x1.pow(&*f, 5)).truncate(n);
    assert!(res.is_zero_to_precision());
    assert!(res.prec() >= 60);
}

#[test]
fn hermitian_x2_expansion() {
    let h = Hermitian::new(4, 2, 1).unwrap();
    let x2 = h.local_expansion_xi(2, 30);
    let nz: Vec<(i64, Fe)> = (0..30).map(|e| (e, x2.coeff(e))).filter(|(_, c)| *c != Fe::ZERO).collect();
    assert_eq!(nz, vec![(5, Fe::ONE), (20, Fe::ONE)]);
}

#[test]
fn gs_residuals_vanish() {
    for r in [4usize, 5] {
        let g = GarciaStichtenoth::new(r, 2, 1).unwrap();
        let f: &Field = g.field();
        let x1 = g.local_expansion_xi(1, 80).unwrap();
        let x2 = g.local_expansion_xi(2, 80).unwrap();
        assert!(known_terms(&x1) >= 60 && known_terms(&x2) >= 60);
        let left = x2.pow(f, r as u64).add(f, &x2).mul(f, &x1.pow(f, r as u64 - 1).add(f, &Laurent::constant(Fe::ONE, x1.prec())));
        let res = left.sub(f, &x1.pow(f, r as u64));
        assert!(res.is_zero_to_precision(), "r={r}");
        let lead = x1.pow(f, r as u64).valuation().unwrap();
        assert!(res.prec() - lead >= 60, "r={r}: only {} terms checked", res.prec() - lead);
    }
}

fn expansion_rank(f: &Field, series: &[Laurent]) -> usize {
    let lo = series.iter().filter_map(|s| s.valuation()).min().unwrap_or(0);
    let hi = series.iter().map(|s| s.prec()).min().unwrap();
    let rows: Vec<Vec<Fe>> = series.iter().map(|s| s.window(lo, hi)).collect();
    rank(f, &Matrix::from_rows(&rows, (hi - lo) as usize))
}

#[test]
fn riemann_roch_dimensions_and_expansion_rank() {
    let towers: Vec<Box<dyn Tower>> = vec![
        Box::new(Hermitian::new(4, 2, 1).unwrap()),
        Box::new(GarciaStichtenoth::new(4, 2, 1).unwrap()),
        Box::new(GarciaStichtenoth::new(5, 2, 1).unwrap()),
    ];
    for t in &towers {
        let g = t.genus();
        for l in (2 * g - 1)..=(2 * g + 15) {
            let b = t.rr_space(l).unwrap();
            assert_eq!(b.dim(), l - g + 1, "{:?} l={l}", t.kind());
            let mut poles = b.pole_orders().to_vec();
            poles.sort();
            poles.dedup();
            assert_eq!(poles.len(), b.dim());
            assert!(poles.iter().all(|&p| p <= l));
            let prec = t.message_shift(l) + l as i64 + 2;
            let ex = b.expansions(prec).unwrap();
            assert_eq!(expansion_rank(t.field(), &ex), b.dim(), "{:?} l={l}", t.kind());
        }
    }
}

#[test]
fn gs_basis_dimension_grid_deeper() {
    for (r, e) in [(4, 3)] {
        let t = GarciaStichtenoth::new(r, e, 3).unwrap();
        let g = gs_genus(r, e);
        for l in [2 * g - 1, 2 * g + 7, 2 * g + 15] {
            assert_eq!(t.rr_space(l).unwrap().dim(), l - g + 1, "r={r} e={e} l={l}");
        }
    }
}

#[test]
fn rational_line_is_genus_zero() {
    let t = RationalLine::new(64, 1).unwrap();
    assert_eq!((t.genus(), t.sigma_order()), (0, 63));
    for l in 0..20 {
        assert_eq!(t.rr_space(l).unwrap().dim(), l + 1);
    }
}
