use std::sync::OnceLock;

use hdescent::equivalence::{
    all_functors, factorize, fiber_power, fiber_power_size, is_weak_equivalence, morita_equivalent, small_groupoids,
    strong_equivalence,
};
use hdescent::groupoid::{FiniteGroupoid, GroupoidFunctor};
use hdescent::holonomy::{
    jandl_holonomy, oriented_holonomy, shift_by_curvature, trivialize, DiscreteBundleConnection, DiscreteTwoForm, GerbeData,
    OrientifoldData, SolveOrder, Q,
};
use hdescent::site::{Cover, CoverClass, FiniteSet, TriangulatedSurface};
use proptest::prelude::*;

fn groupoids() -> &'static [FiniteGroupoid] {
    static G: OnceLock<Vec<FiniteGroupoid>> = OnceLock::new();
    G.get_or_init(|| small_groupoids(4).into_iter().filter(|g| g.n_objects() > 0).collect())
}

fn weak_pairs() -> &'static [(usize, usize, GroupoidFunctor)] {
    static W: OnceLock<Vec<(usize, usize, GroupoidFunctor)>> = OnceLock::new();
    W.get_or_init(|| {
        let gs = groupoids();
        let mut out = Vec::new();
        for (i, a) in gs.iter().enumerate() {
            for (j, b) in gs.iter().enumerate() {
                for f in all_functors(a, b) {
                    if is_weak_equivalence(&f, a, b, CoverClass::Surjection) {
                        out.push((i, j, f));
                    }
                }
            }
        }
        out
    })
}

fn rational() -> impl Strategy<Value = Q> {
    (-24i64..=24, 1i64..=8).prop_map(|(n, d)| Q::new(n, d))
}

fn oriented_surface() -> impl Strategy<Value = TriangulatedSurface> {
    prop_oneof![Just(TriangulatedSurface::tetrahedron()), Just(TriangulatedSurface::torus_grid())]
}

fn form() -> impl Strategy<Value = DiscreteTwoForm> {
    oriented_surface().prop_flat_map(|s| {
        let n = s.faces.len();
        proptest::collection::vec(rational(), n).prop_map(move |v| DiscreteTwoForm::new(s.clone(), v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(i in 0usize..64, a in 0usize..64, b in 0usize..64, c in 0usize..64) {
        let g = &groupoids()[i % groupoids().len()];
        let m = g.n_morphisms();
        let (a, b) = (a % m, b % m);
        prop_assume!(g.target[a] == g.source[b]);
        let cs: Vec<usize> = (0..m).filter(|&x| g.source[x] == g.target[b]).collect();
        let c = cs[c % cs.len()];
        prop_assert_eq!(g.compose(g.compose(a, b), c), g.compose(a, g.compose(b, c)));
        prop_assert_eq!(g.compose(a, g.inverse[a]), g.identity[g.source[a]]);
    }

    #[test]
    fn weak_equivalences_factor(k in 0usize..10_000) {
        let (i, j, f) = &weak_pairs()[k % weak_pairs().len()];
        let (src, dst) = (&groupoids()[*i], &groupoids()[*j]);
        let fac = factorize(f, src, dst).unwrap();
        prop_assert_eq!(&fac.g.then(&fac.h), f);
        prop_assert!(fac.violations(f, src, dst).is_empty());
        let se = strong_equivalence(&fac.g, src, &fac.middle).expect("first factor is strong");
        prop_assert!(se.violations(&fac.g, src, &fac.middle).is_empty());
    }

    #[test]
    fn fiber_power_size_is_exact(k in 0usize..10_000, n in 1usize..=3) {
        let (i, _, f) = &weak_pairs()[k % weak_pairs().len()];
        let fp = fiber_power(f, &groupoids()[*i], n);
        prop_assert_eq!(fiber_power_size(f, n), (fp.groupoid.n_objects(), fp.groupoid.n_morphisms()));
        prop_assert!(fp.groupoid.check_axioms().is_empty());
    }

    #[test]
    fn morita_is_symmetric(i in 0usize..64, j in 0usize..64) {
        let gs = groupoids();
        let (a, b) = (&gs[i % gs.len()], &gs[j % gs.len()]);
        prop_assert_eq!(morita_equivalent(a, b).holds(), morita_equivalent(b, a).holds());
    }

    #[test]
    fn covers_have_requested_fibers(sizes in proptest::collection::vec(1usize..4, 1..4)) {
        let base = FiniteSet::numbered("b", sizes.len());
        let c = Cover::from_fibers(&base, &sizes, CoverClass::Surjection).unwrap();
        prop_assert_eq!(c.map.domain.len(), sizes.iter().sum::<usize>());
        for (b, &n) in sizes.iter().enumerate() {
            prop_assert_eq!(c.map.images().iter().filter(|&&x| x == b).count(), n);
        }
    }

    #[test]
    fn subdivision_keeps_holonomy(w in form(), f in 0usize..64, x in rational(), y in rational()) {
        let f = f % w.values.len();
        let parts = [x, y, w.values[f] - x - y];
        prop_assert_eq!(oriented_holonomy(&w.subdivided(f, parts).unwrap()).unwrap(), oriented_holonomy(&w).unwrap());
    }

    #[test]
    fn integral_shifts_keep_holonomy(w in form(), raw in proptest::collection::vec(rational(), 54)) {
        let nf = w.surface.faces.len();
        let mut sides: Vec<[Q; 3]> = (0..nf).map(|f| [raw[3 * f], raw[3 * f + 1], raw[3 * f + 2]]).collect();
        let total: Q = sides.iter().flatten().sum();
        sides[0][0] -= total - total.floor();
        let l = DiscreteBundleConnection { surface: w.surface.clone(), sides };
        prop_assert_eq!(oriented_holonomy(&shift_by_curvature(&w, &l).unwrap()).unwrap(), oriented_holonomy(&w).unwrap());
    }

    #[test]
    fn unoriented_formula_extends_oriented(w in form()) {
        let o = OrientifoldData::from_form(&w).unwrap();
        prop_assert_eq!(jandl_holonomy(&o).unwrap(), oriented_holonomy(&w).unwrap());
    }

    #[test]
    fn solver_orders_agree(w in form(), raw in proptest::collection::vec(rational(), 54)) {
        let lambda: Vec<[Q; 3]> = (0..w.values.len()).map(|f| [raw[3 * f], raw[3 * f + 1], raw[3 * f + 2]]).collect();
        let g = GerbeData::trivial(&w).twisted(&lambda, &[]);
        let fw = trivialize(&g, SolveOrder::Forward).unwrap();
        let rv = trivialize(&g, SolveOrder::Reverse).unwrap();
        prop_assert_eq!(fw.holonomy(), rv.holonomy());
        prop_assert_eq!(fw.holonomy(), oriented_holonomy(&w).unwrap());
    }
}
