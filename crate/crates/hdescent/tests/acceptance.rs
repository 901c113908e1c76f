//! Acceptance suite: one line per criterion with its time limit.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use hdescent::equivalence::{all_functors, factorize, morita_by_search, morita_equivalent, small_groupoids, strong_equivalence};
use hdescent::equivariant::{descent_grid, eval_homotopy, eval_on_groupoid, exchange, pullback_equivariant, pullback_harness, Strength};
use hdescent::descent::is_equivalence;
use hdescent::group::FiniteGroup;
use hdescent::groupoid::{FiniteGroupoid, GroupoidFunctor};
use hdescent::holonomy::{
    closed_edge_sets, fan, jandl_holonomy, oriented_holonomy, orientation_double_cover, shift_by_curvature, trivialize,
    DiscreteBundleConnection, DiscreteTwoForm, GerbeData, OrientifoldData, PairValue, SolveOrder, Q,
};
use hdescent::plus::{covering_groupoid, plus_on_groupoid, verify_stack};
use hdescent::prestacks::CyclicInstance;
use hdescent::site::{fiber_vectors, Cover, CoverClass, Edge, FiniteSet, TriangulatedSurface};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn covers_up_to(max_base: usize, max_total: usize) -> Vec<Cover> {
    let mut out = Vec::new();
    for n in 1..=max_base {
        let base = FiniteSet::numbered("m", n);
        for v in fiber_vectors(n, max_total) {
            for class in [CoverClass::Split, CoverClass::Surjection] {
                out.push(Cover::from_fibers(&base, &v, class).unwrap());
            }
        }
    }
    out
}

/// Prestack and stack axioms for trivial gerbes and their plus construction.
fn c1() -> Outcome {
    let covers = covers_up_to(3, 5);
    let mut bad = Vec::new();
    let mut checked = 0;
    for p in [2, 3] {
        let inst = CyclicInstance::grbtriv(p);
        for y in &covers {
            let r = verify_stack(&inst, y, 1).unwrap();
            checked += 1;
            if !(r.passed() && r.tau_witness) {
                bad.push(format!("{} {:?}: {:?}", inst.name, r.fibers, r.failures));
            }
        }
    }
    Outcome { ok: bad.is_empty(), detail: format!("{checked} covers checked; failures: {bad:?}") }
}

// ---------------------------------------------------------------- oracles

/// Hom-set bijectivity and essential surjectivity read straight off the tables.
fn weak_oracle(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> bool {
    for x in 0..src.n_objects() {
        for y in 0..src.n_objects() {
            let imgs: HashSet<usize> = (0..src.n_morphisms())
                .filter(|&m| src.source[m] == x && src.target[m] == y)
                .map(|m| f.f1[m])
                .collect();
            let here = (0..src.n_morphisms()).filter(|&m| src.source[m] == x && src.target[m] == y).count();
            let there = (0..dst.n_morphisms()).filter(|&m| dst.source[m] == f.f0[x] && dst.target[m] == f.f0[y]).count();
            if imgs.len() != here || here != there {
                return false;
            }
        }
    }
    let hit: HashSet<usize> = f.f0.iter().copied().collect();
    (0..dst.n_objects()).all(|w| (0..dst.n_morphisms()).any(|m| dst.target[m] == w && hit.contains(&dst.source[m])))
}

/// Composable strings of length `n` (objects when `n = 0`).
fn strings(g: &FiniteGroupoid, n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return (0..g.n_objects()).map(|o| vec![o]).collect();
    }
    let mut out: Vec<Vec<usize>> = (0..g.n_morphisms()).map(|m| vec![m]).collect();
    for _ in 1..n {
        out = out
            .into_iter()
            .flat_map(|s| {
                let t = g.target[*s.last().unwrap()];
                (0..g.n_morphisms()).filter(move |&m| g.source[m] == t).map(move |m| {
                    let mut s2 = s.clone();
                    s2.push(m);
                    s2
                })
            })
            .collect();
    }
    out
}

fn levelwise_surjective(h: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid, top: usize) -> bool {
    (0..=top).all(|n| {
        let f = |x: usize| if n == 0 { h.f0[x] } else { h.f1[x] };
        let imgs: HashSet<Vec<usize>> = strings(src, n).into_iter().map(|s| s.into_iter().map(f).collect()).collect();
        strings(dst, n).into_iter().all(|s| imgs.contains(&s))
    })
}

/// `|H^k(ℤ/n; ℤ/n)|` with trivial action, by enumerating every cochain on `(ℤ/n)^k`.
fn group_cohomology_order(n: u64, k: u32) -> u64 {
    let tuples = |k: u32| -> Vec<Vec<u64>> { (0..k).map(|_| 0..n).multi_cartesian_product().collect() };
    let index = |t: &[u64]| t.iter().fold(0u64, |a, &x| a * n + x) as usize;
    let coboundary = |c: &[u64], k: u32| -> Vec<u64> {
        let ts: Vec<Vec<u64>> = if k + 1 == 0 { vec![vec![]] } else { tuples(k + 1) };
        ts.iter()
            .map(|g| {
                let mut v: i64 = c[index(&g[1..])] as i64;
                for i in 0..k as usize {
                    let mut h: Vec<u64> = g[..i].to_vec();
                    h.push((g[i] + g[i + 1]) % n);
                    h.extend_from_slice(&g[i + 2..]);
                    let sgn = if i % 2 == 0 { -1 } else { 1 };
                    v += sgn * c[index(&h)] as i64;
                }
                let last = if k % 2 == 0 { -1 } else { 1 };
                v += last * c[index(&g[..k as usize])] as i64;
                v.rem_euclid(n as i64) as u64
            })
            .collect()
    };
    let all = |k: u32| -> Vec<Vec<u64>> {
        let size = n.pow(k) as usize;
        (0..size).map(|_| 0..n).multi_cartesian_product().collect()
    };
    let cocycles = all(k).into_iter().filter(|c| coboundary(c, k).iter().all(|&x| x == 0)).count() as u64;
    let boundaries: BTreeSet<Vec<u64>> = if k == 0 { BTreeSet::from([vec![0]]) } else { all(k - 1).iter().map(|c| coboundary(c, k - 1)).collect() };
    cocycles / boundaries.len() as u64
}

// ---------------------------------------------------------------- generated weak equivalences

struct Case {
    name: String,
    src: FiniteGroupoid,
    dst: FiniteGroupoid,
    f: GroupoidFunctor,
}

fn to_point(g: &FiniteGroupoid) -> GroupoidFunctor {
    GroupoidFunctor { f0: vec![0; g.n_objects()], f1: vec![0; g.n_morphisms()] }
}

fn first_weak(src: &FiniteGroupoid, dst: &FiniteGroupoid, surjective: bool) -> GroupoidFunctor {
    all_functors(src, dst)
        .into_iter()
        .find(|f| weak_oracle(f, src, dst) && (!surjective || f.f0.iter().collect::<HashSet<_>>().len() == dst.n_objects()))
        .expect("a weak equivalence exists")
}

fn weak_cases() -> Vec<Case> {
    let z2 = FiniteGroup::cyclic(2);
    let point = FiniteGroupoid::point();
    let bz2 = FiniteGroupoid::delooping(&z2);
    let bz3 = FiniteGroupoid::delooping(&FiniteGroup::cyclic(3));
    let pair2 = FiniteGroupoid::pair(&FiniteSet::numbered("p", 2));
    let two = FiniteSet::new(["x", "y"]).unwrap();
    let four = FiniteSet::new(["a", "b", "c", "d"]).unwrap();
    let mut out = Vec::new();
    let mut add = |name: &str, src: &FiniteGroupoid, dst: &FiniteGroupoid, f: GroupoidFunctor| {
        assert!(f.violations(src, dst).is_empty(), "{name}");
        out.push(Case { name: name.into(), src: src.clone(), dst: dst.clone(), f });
    };

    for (name, g, sizes) in [("Π^Y pair over point", &point, vec![2]), ("Π^Y over B Z/2", &bz2, vec![2])] {
        let c = Cover::from_fibers(&g.objects, &sizes, CoverClass::Surjection).unwrap();
        let cg = covering_groupoid(g, &c).unwrap();
        add(name, &cg.groupoid, g, cg.projection);
    }
    let disc = FiniteGroupoid::trivial(&two);
    let c = Cover::from_fibers(&two, &[2, 1], CoverClass::Surjection).unwrap();
    let cg = covering_groupoid(&disc, &c).unwrap();
    add("Π^Y over two points", &cg.groupoid, &disc, cg.projection);

    let free2 = FiniteGroupoid::action(&z2, &two, &[vec![0, 1], vec![1, 0]]).unwrap();
    add("free quotient {x,y}//Z2", &free2, &point, to_point(&free2));
    let free4 = FiniteGroupoid::action(&z2, &four, &[vec![0, 1, 2, 3], vec![1, 0, 3, 2]]).unwrap();
    let orbits = FiniteGroupoid::trivial(&FiniteSet::new(["ab", "cd"]).unwrap());
    add("free quotient {a,b,c,d}//Z2", &free4, &orbits, first_weak(&free4, &orbits, true));

    let a = pair2.objects.index("p0").unwrap();
    add("point into pair groupoid", &point, &pair2, GroupoidFunctor { f0: vec![a], f1: vec![pair2.identity[a]] });
    add("pair groupoid collapse", &pair2, &point, to_point(&pair2));
    let mixed = pair2.disjoint_union(&bz2);
    let target = point.disjoint_union(&bz2);
    add("pair ⊔ B Z/2 collapse", &mixed, &target, first_weak(&mixed, &target, true));

    let (cyl, i0, i1) = bz2.cylinder();
    add("cylinder end 0", &bz2, &cyl, i0);
    add("cylinder end 1", &bz2, &cyl, i1);
    add("cylinder projection", &cyl, &bz2, first_weak(&cyl, &bz2, true));

    let (skel, inc) = free2.skeleton();
    add("skeleton inclusion", &skel, &free2, inc);
    let square = GroupoidFunctor { f0: vec![0], f1: (0..3).map(|g| bz3.compose(g, g)).collect() };
    add("automorphism of B Z/3", &bz3, &bz3, square);
    let twice = bz2.disjoint_union(&bz2);
    let swap = all_functors(&twice, &twice).into_iter().find(|f| f.f0 == vec![1, 0] && weak_oracle(f, &twice, &twice)).unwrap();
    add("swap of B Z/2 ⊔ B Z/2", &twice, &twice, swap);
    out
}

/// Route through the factorization and the direct decision agree, plus the enumeration engine on small cases.
fn c2() -> Outcome {
    let cases = weak_cases();
    let insts = [CyclicInstance::grbtriv(2), CyclicInstance::grbtriv(3), CyclicInstance::bun(2)];
    let mut bad = Vec::new();
    let (mut runs, mut engine) = (0, 0);
    for c in &cases {
        assert!(c.src.n_morphisms() <= 8 && c.dst.n_morphisms() <= 8, "{}", c.name);
        if !weak_oracle(&c.f, &c.src, &c.dst) {
            bad.push(format!("{}: not a weak equivalence", c.name));
            continue;
        }
        for inst in &insts {
            for mode in [Strength::Prestack, Strength::Stack] {
                runs += 1;
                match pullback_harness(inst, &c.f, &c.src, &c.dst, mode) {
                    Ok(r) if r.route && r.direct && r.agree => {}
                    Ok(r) => bad.push(format!("{} {} {mode:?}: {r:?}", c.name, inst.name)),
                    Err(e) => bad.push(format!("{} {}: {e}", c.name, inst.name)),
                }
            }
            if c.src.n_morphisms() <= 4 && c.dst.n_morphisms() <= 4 {
                engine += 1;
                let pb = pullback_equivariant(inst, &c.f, &c.src, &c.dst, true, 1 << 16).unwrap();
                if !is_equivalence(&pb.functor, &pb.over_dst, &pb.over_src).equivalence() {
                    bad.push(format!("{} {}: enumeration engine disagrees", c.name, inst.name));
                }
            }
        }
    }
    Outcome {
        ok: bad.is_empty() && cases.len() >= 10,
        detail: format!("{} weak equivalences, {runs} harness runs, {engine} engine cross-checks; failures: {bad:?}", cases.len()),
    }
}

/// Every weak equivalence factors as a strong equivalence then a levelwise surjection.
fn c3() -> Outcome {
    let mut cases = weak_cases();
    let small: Vec<FiniteGroupoid> = small_groupoids(4).into_iter().filter(|g| g.n_objects() > 0).collect();
    for (i, a) in small.iter().enumerate() {
        for (j, b) in small.iter().enumerate() {
            for f in all_functors(a, b) {
                if weak_oracle(&f, a, b) {
                    cases.push(Case { name: format!("small {i}->{j}"), src: a.clone(), dst: b.clone(), f });
                }
            }
        }
    }
    let mut bad = Vec::new();
    for c in &cases {
        let fac = match factorize(&c.f, &c.src, &c.dst) {
            Ok(x) => x,
            Err(e) => {
                bad.push(format!("{}: {e}", c.name));
                continue;
            }
        };
        let composite = fac.g.then(&fac.h);
        let strong = strong_equivalence(&fac.g, &c.src, &fac.middle).is_some_and(|se| se.violations(&fac.g, &c.src, &fac.middle).is_empty());
        let surj = levelwise_surjective(&fac.h, &fac.middle, &c.dst, 3);
        if composite != c.f || !strong || !surj {
            bad.push(format!("{}: composite {} strong {strong} surjective {surj}", c.name, composite == c.f));
        }
    }
    Outcome { ok: bad.is_empty(), detail: format!("{} factorizations; failures: {bad:?}", cases.len()) }
}

/// Iso-class counts against brute-force group cohomology.
fn c4() -> Outcome {
    let cases = [(CyclicInstance::bun(2), 2u64, 1u32, 2u64), (CyclicInstance::grbtriv(2), 2, 2, 2), (CyclicInstance::grbtriv(3), 3, 2, 3)];
    let mut bad = Vec::new();
    let mut lines = Vec::new();
    for (inst, n, k, expected) in cases {
        let g = FiniteGroupoid::delooping(&FiniteGroup::cyclic(n as usize));
        let oracle = group_cohomology_order(n, k);
        let eval = eval_on_groupoid(&inst, &g, true, 1 << 16).unwrap().n_iso_classes() as u64;
        let plus = plus_on_groupoid(&inst, &g, CoverClass::Surjection, 1, 1 << 16).unwrap();
        let hit = plus.classes.len() as u64;
        lines.push(format!("|H^{k}(Z/{n})| oracle {oracle} eval {eval} plus {hit}/{}", plus.base_classes));
        if oracle != expected || eval != oracle || hit != oracle || plus.base_classes != oracle || !plus.witnesses_verified {
            bad.push(inst.name.clone());
        }
    }
    Outcome { ok: bad.is_empty(), detail: format!("{}; failures: {bad:?}", lines.join(", ")) }
}

/// Exchange of iterated limits on grids from covering groupoids.
fn c5() -> Outcome {
    let two = FiniteSet::new(["x", "y"]).unwrap();
    let grids: Vec<(&str, FiniteGroupoid, Vec<usize>)> = vec![
        ("point, 2 sheets", FiniteGroupoid::point(), vec![2]),
        ("point, 3 sheets", FiniteGroupoid::point(), vec![3]),
        ("B Z/2, 2 sheets", FiniteGroupoid::delooping(&FiniteGroup::cyclic(2)), vec![2]),
        ("B Z/3, 2 sheets", FiniteGroupoid::delooping(&FiniteGroup::cyclic(3)), vec![2]),
        ("interval, sheets 2+1", FiniteGroupoid::interval(), vec![2, 1]),
        ("two points, sheets 2+1", FiniteGroupoid::trivial(&two), vec![2, 1]),
    ];
    let mut bad = Vec::new();
    let mut checked = 0;
    for (name, g, sizes) in &grids {
        let c = Cover::from_fibers(&g.objects, sizes, CoverClass::Surjection).unwrap();
        let cg = covering_groupoid(g, &c).unwrap();
        let dg = descent_grid(&cg.projection, &cg.groupoid, g, 3);
        for inst in [CyclicInstance::grbtriv(2), CyclicInstance::bun(2)] {
            checked += 1;
            let r = exchange(&dg.grid, &inst).unwrap();
            let base = eval_homotopy(&inst, g).unwrap();
            if !(r.is_isomorphism() && r.involutive && r.first.pi0 == base.pi0 && r.first.pi1 == base.pi1) {
                bad.push(format!("{name} {}: {r:?}", inst.name));
            }
        }
    }
    Outcome { ok: bad.is_empty() && grids.len() >= 5, detail: format!("{} grids, {checked} exchanges; failures: {bad:?}", grids.len()) }
}

// ---------------------------------------------------------------- holonomy

fn rq(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.gen_range(-12..=12), rng.gen_range(1..=6))
}

fn random_form(s: &TriangulatedSurface, rng: &mut ChaCha8Rng) -> DiscreteTwoForm {
    DiscreteTwoForm::new(s.clone(), (0..s.faces.len()).map(|_| rq(rng)).collect()).unwrap()
}

fn random_bundle(s: &TriangulatedSurface, rng: &mut ChaCha8Rng, integral: bool) -> DiscreteBundleConnection {
    let mut sides: Vec<[Q; 3]> = (0..s.faces.len()).map(|_| [rq(rng), rq(rng), rq(rng)]).collect();
    let total: Q = sides.iter().flatten().sum();
    let frac = total - total.floor();
    if integral {
        sides[0][0] -= frac;
    } else if frac == Q::from_integer(0) {
        sides[0][0] += Q::new(1, rng.gen_range(2..=7));
    }
    DiscreteBundleConnection { surface: s.clone(), sides }
}

fn random_gerbe(s: &TriangulatedSurface, rng: &mut ChaCha8Rng) -> GerbeData {
    let w = random_form(s, rng);
    let lambda: Vec<[Q; 3]> = (0..s.faces.len()).map(|_| [rq(rng), rq(rng), rq(rng)]).collect();
    let mut psi = Vec::new();
    for v in 0..s.vertices.len() {
        let star: Vec<usize> = fan(s, v).into_iter().sorted().collect();
        for p in star.iter().copied().combinations(2) {
            psi.push(PairValue { vertex: v, faces: [p[0], p[1]], value: rq(rng) });
        }
    }
    let mut g = GerbeData::trivial(&w).twisted(&lambda, &psi);
    for t in g.cocycle.iter_mut() {
        t.value += rng.gen_range(-2..=2);
    }
    g
}

/// A random `ℤ/2` edge cocycle: a random sum of a closed-edge-set basis.
fn random_kappa(s: &TriangulatedSurface, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut k = vec![false; s.edges().len()];
    for b in closed_edge_sets(s) {
        if rng.gen_bool(0.5) {
            k.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);
        }
    }
    k
}

fn random_orientifold(s: &TriangulatedSurface, rng: &mut ChaCha8Rng) -> OrientifoldData {
    let values: Vec<Q> = (0..s.faces.len()).map(|_| rq(rng)).collect();
    OrientifoldData::new(s.clone(), &values, random_kappa(s, rng)).unwrap()
}

/// Subdivides face `f` of orientifold data, extending the edge cocycle to the three new edges.
fn subdivide_orientifold(o: &OrientifoldData, values: &[Q], f: usize, parts: [Q; 3]) -> OrientifoldData {
    let s = &o.surface;
    let t = s.subdivide(f);
    let lab = |surf: &TriangulatedSurface, e: Edge| (surf.vertices.label(e.a).to_string(), surf.vertices.label(e.b).to_string());
    let old: std::collections::HashMap<(String, String), bool> = s.edges().into_iter().zip(&o.kappa).map(|(e, &k)| (lab(s, e), k)).collect();
    let [a, b, d] = s.faces[f];
    let k_of = |x: usize, y: usize| {
        let (x, y) = (s.vertices.label(x).to_string(), s.vertices.label(y).to_string());
        old.get(&(x.clone(), y.clone())).or_else(|| old.get(&(y, x))).copied().unwrap()
    };
    let centre = format!("~c{f}");
    let spoke = |v: &str| -> bool {
        let v = s.vertices.index(v).unwrap();
        if v == a {
            false
        } else if v == b {
            k_of(a, b)
        } else {
            assert_eq!(v, d);
            k_of(a, b) ^ k_of(b, d)
        }
    };
    let kappa: Vec<bool> = t
        .edges()
        .into_iter()
        .map(|e| {
            let (x, y) = lab(&t, e);
            if x == centre {
                spoke(&y)
            } else if y == centre {
                spoke(&x)
            } else {
                old[&(x, y)]
            }
        })
        .collect();
    let mut vals = values.to_vec();
    vals[f] = parts[0];
    vals.extend([parts[1], parts[2]]);
    OrientifoldData::new(t, &vals, kappa).unwrap()
}

fn split(rng: &mut ChaCha8Rng, v: Q) -> [Q; 3] {
    let (x, y) = (rq(rng), rq(rng));
    [x, y, v - x - y]
}

/// Invariance suite on four closed surfaces.
fn c6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let surfaces = [
        ("tetrahedron", TriangulatedSurface::tetrahedron()),
        ("torus", TriangulatedSurface::torus_grid()),
        ("RP2", TriangulatedSurface::rp2()),
        ("Klein", TriangulatedSurface::klein_bottle()),
    ];
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    for (name, s) in &surfaces {
        let orientable = s.validate().orientable;
        // (a) integral bundles leave holonomy unchanged; non-integral ones are rejected
        let (mut kept, mut rejected) = (0, 0);
        for _ in 0..200 {
            let l = random_bundle(s, &mut rng, true);
            let junk = random_bundle(s, &mut rng, false);
            if orientable {
                let w = random_form(s, &mut rng);
                let h = oriented_holonomy(&w).unwrap();
                kept += (oriented_holonomy(&shift_by_curvature(&w, &l).unwrap()).unwrap() == h) as usize;
                rejected += shift_by_curvature(&w, &junk).is_err() as usize;
            } else {
                let o = random_orientifold(s, &mut rng);
                let h = jandl_holonomy(&o).unwrap();
                kept += (jandl_holonomy(&o.shifted(&l).unwrap()).unwrap() == h) as usize;
                rejected += o.shifted(&junk).is_err() as usize;
            }
        }
        if kept != 200 || rejected != 200 {
            bad.push(format!("{name} (a): {kept}/200 unchanged, {rejected}/200 rejected"));
        }
        // (b) both solver orders agree with each other and with the direct formula
        let gerbe_surface = if orientable { s.clone() } else { orientation_double_cover(s).unwrap().total };
        for _ in 0..10 {
            let g = random_gerbe(&gerbe_surface, &mut rng);
            let fw = trivialize(&g, SolveOrder::Forward).unwrap();
            let rv = trivialize(&g, SolveOrder::Reverse).unwrap();
            let direct = g.holonomy().unwrap();
            if fw.holonomy() != rv.holonomy() || fw.holonomy() != direct || !fw.violations(&g).is_empty() || !rv.violations(&g).is_empty() {
                bad.push(format!("{name} (b): {} vs {} vs {direct}", fw.holonomy(), rv.holonomy()));
            }
        }
        // (c) subdividing any face keeps the holonomy
        for f in 0..s.faces.len() {
            if orientable {
                let w = random_form(s, &mut rng);
                let parts = split(&mut rng, w.values[f]);
                if oriented_holonomy(&w.subdivided(f, parts).unwrap()).unwrap() != oriented_holonomy(&w).unwrap() {
                    bad.push(format!("{name} (c): face {f}"));
                }
            } else {
                let values: Vec<Q> = (0..s.faces.len()).map(|_| rq(&mut rng)).collect();
                let o = OrientifoldData::new(s.clone(), &values, random_kappa(s, &mut rng)).unwrap();
                let parts = split(&mut rng, values[f]);
                if jandl_holonomy(&subdivide_orientifold(&o, &values, f, parts)).unwrap() != jandl_holonomy(&o).unwrap() {
                    bad.push(format!("{name} (c): face {f}"));
                }
            }
        }
        // (d) fundamental domains and local orientations
        if !orientable {
            let o = random_orientifold(s, &mut rng);
            let h = jandl_holonomy(&o).unwrap();
            let nf = s.faces.len();
            let domains = o.all_domain_values().unwrap();
            if domains != BTreeSet::from([h]) {
                bad.push(format!("{name} (d): domain values {domains:?}"));
            }
            let exhaustive = nf <= 12;
            let flips: Vec<Vec<bool>> = if exhaustive {
                (0..1u64 << nf).map(|b| (0..nf).map(|f| (b >> f) & 1 == 1).collect()).collect()
            } else {
                (0..256).map(|_| (0..nf).map(|_| rng.gen_bool(0.5)).collect()).collect()
            };
            let mut same = 0;
            for fl in &flips {
                let r = o.reoriented(fl);
                let ok = if exhaustive { r.all_domain_values().unwrap() == BTreeSet::from([h]) } else { jandl_holonomy(&r).unwrap() == h };
                same += ok as usize;
            }
            if same != flips.len() {
                bad.push(format!("{name} (d): {same}/{} orientation choices agree", flips.len()));
            }
            notes.push(format!(
                "{name}: 2^{nf} domains, {} orientation choices{}",
                flips.len(),
                if exhaustive { " x all domains" } else { " (sampled)" }
            ));
        }
    }
    Outcome { ok: bad.is_empty(), detail: format!("{}; failures: {bad:?}", notes.join(", ")) }
}

/// With trivial edge data the unoriented formula reduces to the oriented one.
fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let surfaces = [TriangulatedSurface::tetrahedron(), TriangulatedSurface::torus_grid()];
    let mut bad = 0;
    for i in 0..50 {
        let w = random_form(&surfaces[i % 2], &mut rng);
        let o = OrientifoldData::from_form(&w).unwrap();
        if jandl_holonomy(&o).unwrap() != oriented_holonomy(&w).unwrap() {
            bad += 1;
        }
    }
    Outcome { ok: bad == 0, detail: format!("50 random forms, {bad} mismatches") }
}

/// Invariant-based Morita decision against the zigzag search.
fn c8() -> Outcome {
    let gs = small_groupoids(6);
    let mut pairs = 0;
    let mut bad = Vec::new();
    for i in 0..gs.len() {
        for j in i..gs.len() {
            pairs += 1;
            let fast = morita_equivalent(&gs[i], &gs[j]);
            let slow = morita_by_search(&gs[i], &gs[j], 6);
            let witness_ok = match &fast {
                hdescent::equivalence::MoritaVerdict::Equivalent(z) => z.violations(&gs[i], &gs[j]).is_empty(),
                _ => true,
            };
            if fast.holds() != slow.is_some() || !witness_ok {
                bad.push((i, j));
            }
        }
    }
    Outcome { ok: bad.is_empty(), detail: format!("{} groupoids, {pairs} unordered pairs; disagreements: {bad:?}", gs.len()) }
}

fn main() {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("C1 prestack/stack axioms", Duration::from_secs(60), c1),
        ("C2 pullback along weak equivalences", Duration::from_secs(300), c2),
        ("C3 factorization", Duration::from_secs(300), c3),
        ("C4 cohomology counts", Duration::from_secs(30), c4),
        ("C5 exchange of limits", Duration::from_secs(60), c5),
        ("C6 holonomy invariance", Duration::from_secs(120), c6),
        ("C7 orientation reduction", Duration::from_secs(60), c7),
        ("C8 Morita decision", Duration::from_secs(300), c8),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut all = true;
    for (name, limit, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(o.as_str())) {
            continue;
        }
        let t = Instant::now();
        let out = run();
        let el = t.elapsed();
        let ok = out.ok && el <= limit;
        all &= ok;
        println!("{} {name}: {:.2}s (limit {}s) {}", if ok { "PASS" } else { "FAIL" }, el.as_secs_f64(), limit.as_secs(), out.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
