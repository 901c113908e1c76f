//! The plus construction: objects are covers of the base together with
//! descent data on them, 1-cells live on common refinements.
//!
//! Everything is phrased over a groupoid base `Γ`; a set base `M` is the
//! trivial groupoid, for which the covering groupoid `Γ^Y` is the Čech groupoid.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::descent::explicit::{DescentMorphism, DescentObject, DescentSpace};
use crate::descent::window::{functor_windows, pullback_inverse, prism_homotopy, window_homotopy, Shift, Window};
use crate::equivalence::strong_equivalence;
use crate::error::{Error, Result};
use crate::groupoid::{cech_functor, FiniteGroupoid, GroupoidFunctor, GroupoidNerve, RawGroupoid};
use crate::linear::{Echelon, SparseMat};
use crate::prestacks::CyclicInstance;
use crate::site::{canonical_common_refinement, fiber_product, fiber_vectors, Cover, CoverClass, FiniteSet, SetMap};

/// `Γ^Y` with objects `Y` and morphisms `(y, γ, y′)` for `γ: π y → π y′`.
#[derive(Clone, Debug)]
pub struct CoveringGroupoid {
    pub cover: Cover,
    pub groupoid: FiniteGroupoid,
    /// `Π: Γ^Y → Γ`.
    pub projection: GroupoidFunctor,
    pub triples: Vec<(usize, usize, usize)>,
}

pub fn covering_groupoid(gamma: &FiniteGroupoid, c: &Cover) -> Result<CoveringGroupoid> {
    if c.base() != &gamma.objects {
        return Err(Error::BaseMismatch("cover does not cover the object set".into()));
    }
    let y = c.total();
    let fibers = c.map.fibers();
    let mut triples = Vec::new();
    for g in 0..gamma.n_morphisms() {
        for &a in &fibers[gamma.source[g]] {
            for &b in &fibers[gamma.target[g]] {
                triples.push((a, g, b));
            }
        }
    }
    let index: HashMap<(usize, usize, usize), usize> = triples.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let label = |&(a, g, b): &(usize, usize, usize)| format!("({},{},{})", y.label(a), gamma.morphisms.label(g), y.label(b));
    let raw = RawGroupoid {
        objects: y.labels().to_vec(),
        morphisms: triples.iter().map(label).collect(),
        source: triples.iter().map(|t| t.0).collect(),
        target: triples.iter().map(|t| t.2).collect(),
        identity: (0..y.len()).map(|a| index[&(a, gamma.identity[c.map.apply(a)], a)]).collect(),
        inverse: triples.iter().map(|&(a, g, b)| index[&(b, gamma.inverse[g], a)]).collect(),
        composition: HashMap::new(),
    }
    .with_composition(|f, h| index[&(triples[f].0, gamma.compose(triples[f].1, triples[h].1), triples[h].2)]);
    let groupoid = FiniteGroupoid::from_raw(raw)?;
    let mut sorted = vec![(0, 0, 0); triples.len()];
    for t in &triples {
        sorted[groupoid.morphisms.index(&label(t)).expect("label present")] = *t;
    }
    let projection = GroupoidFunctor {
        f0: c.map.images().to_vec(),
        f1: sorted.iter().map(|t| t.1).collect(),
    };
    Ok(CoveringGroupoid { cover: c.clone(), groupoid, projection, triples: sorted })
}

impl CoveringGroupoid {
    /// `Γ^Z → Γ^Y` induced by a map `Z → Y` over `Γ₀`.
    pub fn refinement_functor(&self, to: &CoveringGroupoid, map: &SetMap) -> Result<GroupoidFunctor> {
        for z in 0..self.cover.total().len() {
            if to.cover.map.apply(map.apply(z)) != self.cover.map.apply(z) {
                return Err(Error::BaseMismatch(format!("refinement map moves `{}` off its fiber", self.cover.total().label(z))));
            }
        }
        let index: HashMap<(usize, usize, usize), usize> = to.triples.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        Ok(GroupoidFunctor {
            f0: map.images().to_vec(),
            f1: self.triples.iter().map(|&(a, g, b)| index[&(map.apply(a), g, map.apply(b))]).collect(),
        })
    }
}

/// True iff the functor is bijective on objects and morphisms and respects all tables.
pub fn is_isomorphism(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> bool {
    let bij = |v: &[usize], n: usize| v.len() == n && {
        let mut s = v.to_vec();
        s.sort_unstable();
        s.dedup();
        s.len() == n
    };
    bij(&f.f0, dst.n_objects()) && bij(&f.f1, dst.n_morphisms()) && f.violations(src, dst).is_empty()
}

/// A common refinement `Z ↠ Γ₀` with maps to the source and target covers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refinement {
    pub cover: Cover,
    pub to_source: SetMap,
    pub to_target: SetMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlusObject {
    pub cover: Cover,
    pub data: DescentObject,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlusMorphism {
    pub refinement: Refinement,
    pub data: DescentMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Plus2Morphism {
    pub refinement: Refinement,
    pub beta: Vec<u64>,
}

/// Hom category on the canonical common refinement.
#[derive(Clone, Debug, Serialize)]
pub struct StableHom {
    pub refinement: Refinement,
    pub morphisms: Vec<DescentMorphism>,
    /// Number of 2-isomorphism classes among `morphisms`.
    pub classes: usize,
}

/// Nerve and covering groupoid of one cover, computed once.
struct Level {
    cg: CoveringGroupoid,
    nerve: GroupoidNerve,
}

/// The plus construction of an instance over a fixed groupoid base.
pub struct PlusSpace<'a> {
    pub inst: &'a CyclicInstance,
    pub base: &'a FiniteGroupoid,
    pub normalized: bool,
    pub limit: u64,
    cache: std::cell::RefCell<BTreeMap<Vec<usize>, std::rc::Rc<Level>>>,
}

fn pull(levels: &[Vec<usize>], lvl: usize, d: &[u64]) -> Vec<u64> {
    levels[lvl].iter().map(|&i| d[i]).collect()
}

impl<'a> PlusSpace<'a> {
    pub fn new(inst: &'a CyclicInstance, base: &'a FiniteGroupoid, normalized: bool) -> Self {
        PlusSpace { inst, base, normalized, limit: crate::descent::explicit::DEFAULT_LIMIT, cache: Default::default() }
    }

    fn level(&self, c: &Cover) -> Result<std::rc::Rc<Level>> {
        let key = c.map.images().to_vec();
        if let Some(l) = self.cache.borrow().get(&key) {
            if l.cg.cover.total() == c.total() {
                return Ok(l.clone());
            }
        }
        let cg = covering_groupoid(self.base, c)?;
        let nerve = cg.groupoid.nerve(3);
        let l = std::rc::Rc::new(Level { cg, nerve });
        self.cache.borrow_mut().insert(key, l.clone());
        Ok(l)
    }

    fn space<T>(&self, c: &Cover, f: impl FnOnce(&DescentSpace, &Level) -> Result<T>) -> Result<T> {
        let l = self.level(c)?;
        let s = DescentSpace::new(self.inst, &l.nerve.simplicial, self.normalized)?;
        f(&s, &l)
    }

    /// Simplicial map `N(Γ^Z) → N(Γ^Y)` of a refinement map.
    fn nerve_map(&self, from: &Cover, to: &Cover, map: &SetMap) -> Result<Vec<Vec<usize>>> {
        let (a, b) = (self.level(from)?, self.level(to)?);
        let f = a.cg.refinement_functor(&b.cg, map)?;
        Ok(f.on_nerves(&a.nerve, &b.nerve).levels)
    }

    pub fn pull_object(&self, o: &PlusObject, to: &Cover, map: &SetMap) -> Result<DescentObject> {
        let lv = self.nerve_map(to, &o.cover, map)?;
        Ok(DescentObject { p: pull(&lv, 1, &o.data.p), mu: pull(&lv, 2, &o.data.mu) })
    }

    pub fn pull_morphism(&self, m: &DescentMorphism, from: &Cover, to: &Cover, map: &SetMap) -> Result<DescentMorphism> {
        let lv = self.nerve_map(to, from, map)?;
        Ok(DescentMorphism { a: pull(&lv, 0, &m.a), alpha: pull(&lv, 1, &m.alpha) })
    }

    pub fn object_violations(&self, o: &PlusObject) -> Result<Vec<String>> {
        self.space(&o.cover, |s, _| Ok(s.object_violations(&o.data)))
    }

    /// Object of `X(Γ)` seen in `X⁺(Γ)` through the identity cover.
    pub fn embed(&self, data: DescentObject) -> PlusObject {
        PlusObject { cover: Cover::identity(&self.base.objects), data }
    }

    fn check_refinement(&self, r: &Refinement, src: &Cover, dst: &Cover) -> Result<()> {
        for z in 0..r.cover.total().len() {
            let m = r.cover.map.apply(z);
            if src.map.apply(r.to_source.apply(z)) != m || dst.map.apply(r.to_target.apply(z)) != m {
                return Err(Error::BaseMismatch("refinement triangle does not commute".into()));
            }
        }
        Ok(())
    }

    pub fn morphism_violations(&self, src: &PlusObject, dst: &PlusObject, m: &PlusMorphism) -> Result<Vec<String>> {
        let r = &m.refinement;
        if let Err(e) = self.check_refinement(r, &src.cover, &dst.cover) {
            return Ok(vec![e.to_string()]);
        }
        let (a, b) = (self.pull_object(src, &r.cover, &r.to_source)?, self.pull_object(dst, &r.cover, &r.to_target)?);
        self.space(&r.cover, |s, _| Ok(s.morphism_violations(&a, &b, &m.data)))
    }

    pub fn canonical_refinement(&self, c: &Cover, d: &Cover) -> Result<Refinement> {
        let r = canonical_common_refinement(c, d)?;
        Ok(Refinement { cover: r.cover, to_source: r.to_first, to_target: r.to_second })
    }

    pub fn identity(&self, o: &PlusObject) -> PlusMorphism {
        let n = o.cover.total();
        let data = DescentMorphism { a: vec![0; n.len()], alpha: vec![0; o.data.p.len()] };
        PlusMorphism {
            refinement: Refinement { cover: o.cover.clone(), to_source: SetMap::identity(n), to_target: SetMap::identity(n) },
            data,
        }
    }

    /// `m` then `m′`, on `Z ×_{Y′} Z′`.
    pub fn compose_plus(&self, m: &PlusMorphism, m2: &PlusMorphism) -> Result<PlusMorphism> {
        let (r, r2) = (&m.refinement, &m2.refinement);
        if r.to_target.codomain != r2.to_source.codomain {
            return Err(Error::Precondition("target of the first morphism is not the source of the second".into()));
        }
        let fp = fiber_product(&r.to_target, &r2.to_source)?;
        let cover = Cover::new(fp.p1.then(&r.cover.map)?, CoverClass::Surjection, None)?;
        let a = self.pull_morphism(&m.data, &r.cover, &cover, &fp.p1)?;
        let b = self.pull_morphism(&m2.data, &r2.cover, &cover, &fp.p2)?;
        let data = self.space(&cover, |s, _| Ok(s.compose_morphisms(&a, &b)))?;
        Ok(PlusMorphism {
            refinement: Refinement { to_source: fp.p1.then(&r.to_source)?, to_target: fp.p2.then(&r2.to_target)?, cover },
            data,
        })
    }

    /// A 2-isomorphism between two parallel morphisms, decided on `Z₁ ×_{Y×Y′} Z₂`.
    pub fn two_isomorphic(&self, dst: &PlusObject, m1: &PlusMorphism, m2: &PlusMorphism) -> Result<Option<Plus2Morphism>> {
        let (r1, r2) = (&m1.refinement, &m2.refinement);
        let pairs: Vec<(usize, usize)> = (0..r1.cover.total().len())
            .flat_map(|a| {
                (0..r2.cover.total().len())
                    .filter(move |&b| r1.to_source.apply(a) == r2.to_source.apply(b) && r1.to_target.apply(a) == r2.to_target.apply(b))
                    .map(move |b| (a, b))
            })
            .collect();
        if pairs.is_empty() && !r1.cover.total().is_empty() {
            return Err(Error::Inconsistent("refinements have no common points".into()));
        }
        let labels: Vec<String> =
            pairs.iter().map(|&(a, b)| format!("({},{})", r1.cover.total().label(a), r2.cover.total().label(b))).collect();
        let set = FiniteSet::new(labels.clone())?;
        let order: Vec<usize> = labels.iter().map(|l| set.index(l).unwrap()).collect();
        let mut sorted = vec![(0, 0); pairs.len()];
        for (i, &p) in pairs.iter().enumerate() {
            sorted[order[i]] = p;
        }
        let p1 = SetMap::new(set.clone(), r1.cover.total().clone(), sorted.iter().map(|p| p.0).collect())?;
        let p2 = SetMap::new(set.clone(), r2.cover.total().clone(), sorted.iter().map(|p| p.1).collect())?;
        let cover = Cover::new(p1.then(&r1.cover.map)?, CoverClass::Surjection, None)?;
        let a = self.pull_morphism(&m1.data, &r1.cover, &cover, &p1)?;
        let b = self.pull_morphism(&m2.data, &r2.cover, &cover, &p2)?;
        let target = self.pull_object(dst, &cover, &p1.then(&r1.to_target)?)?;
        let cells = self.space(&cover, |s, _| s.two_cells(&target, &a, &b, self.limit))?;
        let refinement = Refinement { to_source: p1.then(&r1.to_source)?, to_target: p1.then(&r1.to_target)?, cover };
        Ok(cells.into_iter().next().map(|beta| Plus2Morphism { refinement, beta }))
    }

    /// Hom category between two plus objects on their canonical common refinement.
    pub fn stable_hom(&self, o: &PlusObject, o2: &PlusObject) -> Result<StableHom> {
        let refinement = self.canonical_refinement(&o.cover, &o2.cover)?;
        let a = self.pull_object(o, &refinement.cover, &refinement.to_source)?;
        let b = self.pull_object(o2, &refinement.cover, &refinement.to_target)?;
        let (morphisms, classes) = self.space(&refinement.cover, |s, _| {
            let ms = s.morphisms(&a, &b, self.limit)?;
            let mut reps: Vec<usize> = Vec::new();
            for (i, m) in ms.iter().enumerate() {
                let mut fresh = true;
                for &j in &reps {
                    if !s.two_cells(&b, &ms[j], m, self.limit)?.is_empty() {
                        fresh = false;
                        break;
                    }
                }
                if fresh {
                    reps.push(i);
                }
            }
            Ok((ms, reps.len()))
        })?;
        Ok(StableHom { refinement, morphisms, classes })
    }

    /// All objects over one cover, enumerated by the explicit solver.
    pub fn objects_over(&self, c: &Cover) -> Result<Vec<PlusObject>> {
        self.space(c, |s, _| s.objects(self.limit))
            .map(|v| v.into_iter().map(|data| PlusObject { cover: c.clone(), data }).collect())
    }
}

/// Covers of `Γ₀` with total size `≤ |Γ₀| + extra`, in the requested class.
pub fn bounded_covers(base: &FiniteSet, extra: usize, class: CoverClass) -> Result<Vec<Cover>> {
    if base.is_empty() {
        return Ok(vec![Cover::identity(base)]);
    }
    fiber_vectors(base.len(), base.len() + extra).iter().map(|v| Cover::from_fibers(base, v, class)).collect()
}

/// Default cover bound `|Y| ≤ 2|M| + 2`, expressed as the number of extra points.
pub fn default_extra(base: &FiniteSet) -> usize {
    base.len() + 2
}

/// Degree-2 window coordinates of a descent object.
pub fn window_vector(inst: &CyclicInstance, o: &DescentObject) -> Result<Vec<u64>> {
    match Shift::of(inst)?.0 {
        Shift::Gerbe => Ok(o.mu.clone()),
        Shift::Bundle => Ok(o.p.clone()),
    }
}

/// Iso-class summary of `X⁺(Γ)` over a bounded family of covers.
#[derive(Clone, Debug, Serialize)]
pub struct PlusSummary {
    pub instance: String,
    pub base_objects: usize,
    pub covers: Vec<Vec<usize>>,
    pub objects: usize,
    /// Iso classes hit, as normal forms in `H²(Γ)`.
    pub classes: Vec<Vec<u64>>,
    /// `|H²(Γ)|`, the number of iso classes of `X(Γ)`.
    pub base_classes: u64,
    /// Each object was linked to its class by a verified 1-isomorphism.
    pub witnesses_verified: bool,
}

/// Reduction of plus objects to `X(Γ)` along a section of `Γ^W → Γ`.
struct SectionReduction {
    section_pull: SparseMat,
    prism: SparseMat,
    d1: SparseMat,
    projection_pull: SparseMat,
}

fn section_reduction(inst: &CyclicInstance, gamma: &FiniteGroupoid, base_nerve: &GroupoidNerve, c: &Cover) -> Result<SectionReduction> {
    let (shift, p) = Shift::of(inst)?;
    let cg = covering_groupoid(gamma, c)?;
    let se = strong_equivalence(&cg.projection, &cg.groupoid, gamma)
        .ok_or_else(|| Error::Inconsistent("covering projection is not a strong equivalence".into()))?;
    let nerve = cg.groupoid.nerve(3);
    let w = Window::from_simplicial(&nerve.simplicial, p, shift)?;
    let wb = Window::from_simplicial(&base_nerve.simplicial, p, shift)?;
    let s_map = se.quasi_inverse.on_nerves(base_nerve, &nerve);
    let pi_map = cg.projection.on_nerves(&nerve, base_nerve);
    let level = |n: usize| match shift {
        Shift::Gerbe => n,
        Shift::Bundle => n - 1,
    };
    let section_pull = SparseMat::from_function(&s_map.levels[level(2)], w.dims[2], p);
    let projection_pull = SparseMat::from_function(&pi_map.levels[level(2)], wb.dims[2], p);
    let id = GroupoidFunctor::identity(&cg.groupoid);
    let h = prism_homotopy(&se.unit, &cg.projection.then(&se.quasi_inverse), &id, &cg.groupoid, &nerve, &nerve, p, 3);
    let hw = window_homotopy(&h, shift, &w, &w, 1);
    Ok(SectionReduction { section_pull, prism: hw[1].clone(), d1: w.d[1].clone(), projection_pull })
}

/// Iso classes of plus objects over `Γ`, each reduced to `X(Γ)` with a checked witness
/// `δα = g − Π*S*g` coming from the prism of `Π·S ⇒ 1`.
pub fn plus_on_groupoid(inst: &CyclicInstance, gamma: &FiniteGroupoid, class: CoverClass, extra: usize, limit: u64) -> Result<PlusSummary> {
    let (shift, p) = Shift::of(inst)?;
    let base_nerve = gamma.nerve(3);
    let wb = Window::from_simplicial(&base_nerve.simplicial, p, shift)?;
    let boundaries: Echelon = wb.d[1].transpose().to_dense().echelon();
    let covers = bounded_covers(&gamma.objects, extra, class)?;
    let space = PlusSpace { limit, ..PlusSpace::new(inst, gamma, true) };
    let mut classes: Vec<Vec<u64>> = Vec::new();
    let mut objects = 0;
    let mut verified = true;
    for c in &covers {
        let red = section_reduction(inst, gamma, &base_nerve, c)?;
        for o in space.objects_over(c)? {
            objects += 1;
            let g = window_vector(inst, &o.data)?;
            let reduced = red.section_pull.apply(&g);
            let alpha = red.prism.apply(&g);
            let back = red.projection_pull.apply(&reduced);
            let lhs = red.d1.apply(&alpha);
            let rhs: Vec<u64> = g.iter().zip(&back).map(|(x, y)| (x + p - y) % p).collect();
            verified &= lhs == rhs;
            let nf = boundaries.normal_form(&reduced);
            if !classes.contains(&nf) {
                classes.push(nf);
            }
        }
    }
    classes.sort();
    Ok(PlusSummary {
        instance: inst.name.clone(),
        base_objects: gamma.n_objects(),
        covers: covers.iter().map(Cover::fiber_sizes).collect(),
        objects,
        classes,
        base_classes: wb.homotopy().pi0,
        witnesses_verified: verified,
    })
}

/// `X⁺(M)` over a set base.
pub fn plus_eval(inst: &CyclicInstance, m: &FiniteSet, class: CoverClass, extra: usize, limit: u64) -> Result<PlusSummary> {
    plus_on_groupoid(inst, &FiniteGroupoid::trivial(m), class, extra, limit)
}

/// Outcome of checking `τ_Y` for `X` and for `X⁺` along one cover.
#[derive(Clone, Debug, Serialize)]
pub struct StackReport {
    pub instance: String,
    pub base: usize,
    pub fibers: Vec<usize>,
    /// `τ_Y` for `X` is an equivalence on Hom categories.
    pub prestack: bool,
    /// `τ_Y` for `X` is an equivalence.
    pub stack: bool,
    /// The homotopy inverse of `τ_Y` for `X` re-checked exactly.
    pub tau_witness: bool,
    /// Pairs of source covers whose Hom functor was certified.
    pub plus_pairs: usize,
    /// Target covers whose objects were glued back.
    pub plus_targets: usize,
    /// Quasi-inverse on covers: `W ↠ Y` goes to the composite `W ↠ M` (fiber sizes).
    pub gluing: Vec<(Vec<usize>, Vec<usize>)>,
    /// `τ_Y` for `X⁺` is an equivalence.
    pub plus_stack: bool,
    pub failures: Vec<String>,
}

impl StackReport {
    pub fn passed(&self) -> bool {
        self.prestack && self.plus_stack && self.failures.is_empty()
    }
}

/// Certifies that `φ*` is a homotopy equivalence for `φ: Č(Z′) → Č(Z)`; returns failures.
fn certify_pullback(inst: &CyclicInstance, from: &Cover, to: &Cover, map: &SetMap) -> Result<Vec<String>> {
    let f = cech_functor(from, to, map)?;
    let (a, b) = (FiniteGroupoid::cech(from), FiniteGroupoid::cech(to));
    let Some(se) = strong_equivalence(&f, &a, &b) else {
        return Ok(vec!["refinement functor has no quasi-inverse".into()]);
    };
    let fw = functor_windows(&f, &a, &b, inst)?;
    let he = pullback_inverse(&fw, &f, &a, &b, &se.quasi_inverse, &se.unit, &se.counit);
    Ok(he.violations(&fw.over_dst, &fw.over_src))
}

/// `τ_Y` for `X` and `X⁺` on a set base, certified by homotopy witnesses.
///
/// Source plus objects range over covers with at most `extra` extra points, target
/// plus objects over covers of `Y` with at most `extra` extra points.
pub fn verify_stack(inst: &CyclicInstance, y: &Cover, extra: usize) -> Result<StackReport> {
    let m = y.base();
    let mut failures = Vec::new();
    let trivial = FiniteGroupoid::trivial(m);
    let (cech, _, pi) = crate::groupoid::cech_projection(y);
    let fw = functor_windows(&pi, &cech, &trivial, inst)?;
    let rep = fw.pullback.quasi_iso_report(&fw.over_dst, &fw.over_src);
    let tau_witness = match strong_equivalence(&pi, &cech, &trivial) {
        Some(se) => pullback_inverse(&fw, &pi, &cech, &trivial, &se.quasi_inverse, &se.unit, &se.counit)
            .violations(&fw.over_dst, &fw.over_src)
            .is_empty(),
        None => false,
    };
    // Hom functors of τ⁺: pullback along Č(Z ×_M Y) → Č(Z) for Z = V ×_M V′.
    let sources = bounded_covers(m, extra, y.class)?;
    let mut pairs = 0;
    let mut certified: BTreeMap<Vec<usize>, bool> = BTreeMap::new();
    for v in &sources {
        for v2 in &sources {
            let z = canonical_common_refinement(v, v2)?.cover;
            pairs += 1;
            let key = z.map.images().to_vec();
            if certified.contains_key(&key) {
                continue;
            }
            let fp = fiber_product(&z.map, &y.map)?;
            let z2 = Cover::new(fp.p1.then(&z.map)?, CoverClass::Surjection, None)?;
            let bad = certify_pullback(inst, &z2, &z, &fp.p1)?;
            for b in &bad {
                failures.push(format!("Hom over {:?}: {b}", z.fiber_sizes()));
            }
            certified.insert(key, bad.is_empty());
        }
    }
    // Essential surjectivity of τ⁺: (W ↠ Y, h) is glued to (W ↠ M, h); the comparison
    // lives on W itself with maps id and w ↦ (w, π w), and Č(Y)^W = Č(W ↠ M).
    let cech_y = FiniteGroupoid::cech(y);
    let mut gluing = Vec::new();
    let targets = bounded_covers(y.total(), extra, y.class)?;
    for w in &targets {
        let composite = y.compose(w)?;
        let cg = covering_groupoid(&cech_y, w)?;
        let cw = FiniteGroupoid::cech(&composite);
        let ident = GroupoidFunctor {
            f0: (0..cw.n_objects()).collect(),
            f1: cg.triples.iter().map(|&(a, _, b)| cw.hom(a, b)[0]).collect(),
        };
        if !is_isomorphism(&ident, &cg.groupoid, &cw) {
            failures.push(format!("covering groupoid over {:?} differs from the Čech groupoid of the composite", w.fiber_sizes()));
        }
        let back = y.pullback(&composite.map)?;
        let fp = fiber_product(&composite.map, &y.map)?;
        let j = SetMap::new(
            w.total().clone(),
            fp.set.clone(),
            (0..w.total().len())
                .map(|a| fp.pairs.iter().position(|&(x, b)| x == a && b == w.map.apply(a)).expect("graph point"))
                .collect(),
        )?;
        let round = j.then(&fp.p1)?;
        if round != SetMap::identity(w.total()) || back.total() != &fp.set {
            failures.push(format!("gluing section fails over {:?}", w.fiber_sizes()));
        }
        gluing.push((w.fiber_sizes(), composite.fiber_sizes()));
    }
    let plus_stack = failures.is_empty() && certified.values().all(|&b| b);
    Ok(StackReport {
        instance: inst.name.clone(),
        base: m.len(),
        fibers: y.fiber_sizes(),
        prestack: rep.fully_faithful(),
        stack: rep.is_quasi_iso(),
        tau_witness,
        plus_pairs: pairs,
        plus_targets: targets.len(),
        gluing,
        plus_stack,
        failures,
    })
}
