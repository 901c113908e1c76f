//! Fully faithful and essentially surjective functors, weak and strong
//! equivalences, the factorization through a surjective equivalence, and
//! Morita equivalence of finite groupoids.

use std::collections::HashMap;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::groupoid::{FiniteGroupoid, GroupoidFunctor, NatIso, RawGroupoid};
use crate::site::{Cover, CoverClass, FiniteSet, SetMap};

/// A pair of objects whose hom-sets are not matched bijectively.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberDefect {
    pub source: String,
    pub target: String,
    pub domain_count: usize,
    pub codomain_count: usize,
    pub injective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub fully_faithful: bool,
    pub fiber_defect: Option<FiberDefect>,
    pub essentially_surjective_surjection: bool,
    pub essentially_surjective_split: bool,
    /// For each target object `ω`, a chosen `(x, λ: F x → ω)`.
    pub section: Option<Vec<(usize, usize)>>,
}

impl EquivalenceReport {
    pub fn essentially_surjective(&self, class: CoverClass) -> bool {
        match class {
            CoverClass::Surjection => self.essentially_surjective_surjection,
            CoverClass::Split => self.essentially_surjective_split,
        }
    }

    pub fn weak(&self, class: CoverClass) -> bool {
        self.fully_faithful && self.essentially_surjective(class)
    }
}

/// Hom-set comparison `Γ₁ → Γ₀×Γ₀ ×_{Λ₀×Λ₀} Λ₁`; `None` when it is a bijection.
pub fn fully_faithful_defect(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Option<FiberDefect> {
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for m in 0..src.n_morphisms() {
        by_pair.entry((src.source[m], src.target[m])).or_default().push(f.f1[m]);
    }
    for (x, y) in (0..src.n_objects()).cartesian_product(0..src.n_objects()) {
        let imgs = by_pair.remove(&(x, y)).unwrap_or_default();
        let want = dst.hom(f.f0[x], f.f0[y]).len();
        let injective = imgs.iter().all_unique();
        if imgs.len() != want || !injective {
            return Some(FiberDefect {
                source: src.objects.label(x).to_string(),
                target: src.objects.label(y).to_string(),
                domain_count: imgs.len(),
                codomain_count: want,
                injective,
            });
        }
    }
    None
}

pub fn is_fully_faithful(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> bool {
    fully_faithful_defect(f, src, dst).is_none()
}

/// The map `Γ₀ ×_{Λ₀} Λ₁ → Λ₀`, `(x, λ) ↦ t(λ)`, as a list of pairs.
pub fn essential_image_pairs(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Vec<(usize, usize)> {
    let from = dst.morphisms_from();
    (0..src.n_objects()).flat_map(|x| from[f.f0[x]].iter().map(move |&l| (x, l))).collect()
}

/// First-match section of the essential image map, if it is surjective.
pub fn essential_section(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Option<Vec<(usize, usize)>> {
    essential_section_by(f, src, dst, &|_, _| 0)
}

/// Section choosing, for each target object, the pair `(x, λ)` of least `rank`; ties go to the first match.
pub fn essential_section_by(
    f: &GroupoidFunctor,
    src: &FiniteGroupoid,
    dst: &FiniteGroupoid,
    rank: &dyn Fn(usize, usize) -> u64,
) -> Option<Vec<(usize, usize)>> {
    let pairs = essential_image_pairs(f, src, dst);
    (0..dst.n_objects())
        .map(|w| pairs.iter().copied().filter(|&(_, l)| dst.target[l] == w).min_by_key(|&(x, l)| rank(x, l)))
        .collect()
}

/// For bare finite maps, a section exists iff the map is surjective, and
/// singleton pieces make any surjection split.
pub fn is_essentially_surjective(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid, _class: CoverClass) -> bool {
    essential_section(f, src, dst).is_some()
}

pub fn equivalence_report(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> EquivalenceReport {
    let fiber_defect = fully_faithful_defect(f, src, dst);
    let section = essential_section(f, src, dst);
    let es = section.is_some();
    EquivalenceReport {
        fully_faithful: fiber_defect.is_none(),
        fiber_defect,
        essentially_surjective_surjection: es,
        essentially_surjective_split: es,
        section,
    }
}

pub fn is_weak_equivalence(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid, class: CoverClass) -> bool {
    equivalence_report(f, src, dst).weak(class)
}

/// Quasi-inverse `G` with `η: F·G ⇒ id_Γ` and `ε: G·F ⇒ id_Λ` (`·` = "then").
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongEquivalence {
    pub quasi_inverse: GroupoidFunctor,
    pub unit: NatIso,
    pub counit: NatIso,
}

impl StrongEquivalence {
    /// Re-checks functoriality and both natural isomorphisms.
    pub fn violations(&self, f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Vec<String> {
        let g = &self.quasi_inverse;
        let mut out = g.violations(dst, src);
        if !out.is_empty() {
            return out;
        }
        out.extend(self.unit.violations(&f.then(g), &GroupoidFunctor::identity(src), src, src));
        out.extend(self.counit.violations(&g.then(f), &GroupoidFunctor::identity(dst), dst, dst));
        out
    }
}

/// Builds a quasi-inverse from a section of the essential image map when `F` is fully faithful.
pub fn strong_equivalence(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Option<StrongEquivalence> {
    strong_equivalence_by(f, src, dst, &|_, _| 0)
}

/// As [`strong_equivalence`], with the section picked by [`essential_section_by`].
pub fn strong_equivalence_by(
    f: &GroupoidFunctor,
    src: &FiniteGroupoid,
    dst: &FiniteGroupoid,
    rank: &dyn Fn(usize, usize) -> u64,
) -> Option<StrongEquivalence> {
    if !is_fully_faithful(f, src, dst) {
        return None;
    }
    let section = essential_section_by(f, src, dst, rank)?;
    let lift: HashMap<(usize, usize, usize), usize> =
        (0..src.n_morphisms()).map(|m| ((src.source[m], src.target[m], f.f1[m]), m)).collect();
    let g0: Vec<usize> = section.iter().map(|p| p.0).collect();
    let g1 = (0..dst.n_morphisms())
        .map(|mu| {
            let (w, w2) = (dst.source[mu], dst.target[mu]);
            let (l, l2) = (section[w].1, section[w2].1);
            let img = dst.compose(dst.compose(l, mu), dst.inverse[l2]);
            lift[&(g0[w], g0[w2], img)]
        })
        .collect();
    let quasi_inverse = GroupoidFunctor { f0: g0.clone(), f1: g1 };
    let counit = NatIso { component: section.iter().map(|p| p.1).collect() };
    let unit = NatIso {
        component: (0..src.n_objects())
            .map(|x| lift[&(g0[f.f0[x]], x, section[f.f0[x]].1)])
            .collect(),
    };
    Some(StrongEquivalence { quasi_inverse, unit, counit })
}

/// Result of factoring `F = G·H` with `G` strong and `H` a surjective equivalence.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub middle: FiniteGroupoid,
    pub g: GroupoidFunctor,
    pub h: GroupoidFunctor,
    /// `Λ₀` as pairs `(γ, ω)` with `s(ω) = F₀ γ`.
    pub objects: Vec<(usize, usize)>,
}

/// `Λ₀ = Γ₀ ×_{F₀,s} Ω₁`, `Λ₁ = Λ₀ ×_{Ω₀} Ω₁ ×_{Ω₀} Λ₀`, `H = target / middle`, `G₀ γ = (γ, id)`.
pub fn factorize(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Result<Factorization> {
    if let Some(d) = fully_faithful_defect(f, src, dst) {
        return Err(Error::Precondition(format!(
            "functor is not fully faithful: hom({}, {}) has {} preimages for {} morphisms",
            d.source, d.target, d.domain_count, d.codomain_count
        )));
    }
    if essential_section(f, src, dst).is_none() {
        return Err(Error::Precondition("functor is not essentially surjective".into()));
    }
    let objects = essential_image_pairs(f, src, dst);
    let h0: Vec<usize> = objects.iter().map(|&(_, w)| dst.target[w]).collect();
    let mut by_h0: Vec<Vec<usize>> = vec![Vec::new(); dst.n_objects()];
    for (i, &o) in h0.iter().enumerate() {
        by_h0[o].push(i);
    }
    let triples: Vec<(usize, usize, usize)> = (0..objects.len())
        .flat_map(|l| {
            let by_h0 = &by_h0;
            let h0 = &h0;
            dst.morphisms_from()[h0[l]]
                .clone()
                .into_iter()
                .flat_map(move |mu| by_h0[dst.target[mu]].iter().map(move |&l2| (l, mu, l2)))
        })
        .collect();
    let index: HashMap<(usize, usize, usize), usize> = triples.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let obj_label = |i: usize| {
        let (x, w) = objects[i];
        format!("[{}|{}]", src.objects.label(x), dst.morphisms.label(w))
    };
    let raw = RawGroupoid {
        objects: (0..objects.len()).map(obj_label).collect(),
        morphisms: triples
            .iter()
            .map(|&(l, mu, l2)| format!("[{}|{}|{}]", obj_label(l), dst.morphisms.label(mu), obj_label(l2)))
            .collect(),
        source: triples.iter().map(|t| t.0).collect(),
        target: triples.iter().map(|t| t.2).collect(),
        identity: (0..objects.len()).map(|l| index[&(l, dst.identity[h0[l]], l)]).collect(),
        inverse: triples.iter().map(|&(l, mu, l2)| index[&(l2, dst.inverse[mu], l)]).collect(),
        composition: HashMap::new(),
    }
    .with_composition(|a, b| {
        let (l, mu, _) = triples[a];
        let (_, nu, l3) = triples[b];
        index[&(l, dst.compose(mu, nu), l3)]
    });
    let middle = FiniteGroupoid::from_raw(raw)?;
    // re-index through labels
    let obj_pos: Vec<usize> = (0..objects.len()).map(|i| middle.objects.index(&obj_label(i)).unwrap()).collect();
    let mor_pos: Vec<usize> = triples
        .iter()
        .map(|&(l, mu, l2)| {
            middle
                .morphisms
                .index(&format!("[{}|{}|{}]", obj_label(l), dst.morphisms.label(mu), obj_label(l2)))
                .unwrap()
        })
        .collect();
    let mut sorted_objects = vec![(0, 0); objects.len()];
    let mut hf0 = vec![0; objects.len()];
    for i in 0..objects.len() {
        sorted_objects[obj_pos[i]] = objects[i];
        hf0[obj_pos[i]] = h0[i];
    }
    let mut hf1 = vec![0; triples.len()];
    for (i, &(_, mu, _)) in triples.iter().enumerate() {
        hf1[mor_pos[i]] = mu;
    }
    let obj_of: HashMap<(usize, usize), usize> = objects.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let g0: Vec<usize> = (0..src.n_objects()).map(|x| obj_of[&(x, dst.identity[f.f0[x]])]).collect();
    let g1 = (0..src.n_morphisms())
        .map(|m| mor_pos[index[&(g0[src.source[m]], f.f1[m], g0[src.target[m]])]])
        .collect();
    let g = GroupoidFunctor { f0: g0.iter().map(|&i| obj_pos[i]).collect(), f1: g1 };
    Ok(Factorization { middle, g, h: GroupoidFunctor { f0: hf0, f1: hf1 }, objects: sorted_objects })
}

impl Factorization {
    /// Every property the construction promises, as a list of failures.
    pub fn violations(&self, f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Vec<String> {
        let mut out = self.middle.check_axioms();
        out.extend(self.g.violations(src, &self.middle).into_iter().map(|v| format!("G: {v}")));
        out.extend(self.h.violations(&self.middle, dst).into_iter().map(|v| format!("H: {v}")));
        if !out.is_empty() {
            return out;
        }
        if self.g.then(&self.h) != *f {
            out.push("H∘G differs from F".into());
        }
        match strong_equivalence(&self.g, src, &self.middle) {
            Some(s) if s.violations(&self.g, src, &self.middle).is_empty() => {}
            _ => out.push("G is not a strong equivalence".into()),
        }
        if !is_fully_faithful(&self.h, &self.middle, dst) {
            out.push("H is not fully faithful".into());
        }
        let (nm, nd) = (self.middle.nerve(3), dst.nerve(3));
        let map = self.h.on_nerves(&nm, &nd);
        for (lvl, images) in map.levels.iter().enumerate() {
            if images.iter().unique().count() != nd.simplicial.size(lvl) {
                out.push(format!("H is not surjective on nerve level {lvl}"));
            }
        }
        out
    }
}

/// Iso class of (component, vertex group) data, listed per component.
pub fn morita_invariant(g: &FiniteGroupoid) -> Vec<(usize, FiniteGroup)> {
    g.components().iter().map(|c| (c[0], g.vertex_group(c[0]).0)).collect()
}

/// Zigzag `Γ ← Ω → Λ` of weak equivalences.
#[derive(Clone, Debug)]
pub struct Zigzag {
    pub middle: FiniteGroupoid,
    pub to_first: GroupoidFunctor,
    pub to_second: GroupoidFunctor,
}

impl Zigzag {
    pub fn violations(&self, first: &FiniteGroupoid, second: &FiniteGroupoid) -> Vec<String> {
        let mut out = self.to_first.violations(&self.middle, first);
        out.extend(self.to_second.violations(&self.middle, second));
        if out.is_empty() {
            if !is_weak_equivalence(&self.to_first, &self.middle, first, CoverClass::Surjection) {
                out.push("left leg is not a weak equivalence".into());
            }
            if !is_weak_equivalence(&self.to_second, &self.middle, second, CoverClass::Surjection) {
                out.push("right leg is not a weak equivalence".into());
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum MoritaVerdict {
    Equivalent(Zigzag),
    /// Human-readable reason, e.g. differing vertex groups.
    Distinct(String),
}

impl MoritaVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, MoritaVerdict::Equivalent(_))
    }
}

/// Decides Morita equivalence by matching components with isomorphic vertex
/// groups, and builds the zigzag through the skeleton of the first groupoid.
pub fn morita_equivalent(a: &FiniteGroupoid, b: &FiniteGroupoid) -> MoritaVerdict {
    let ia = morita_invariant(a);
    let ib = morita_invariant(b);
    if ia.len() != ib.len() {
        return MoritaVerdict::Distinct(format!("{} components vs {}", ia.len(), ib.len()));
    }
    let mut used = vec![false; ib.len()];
    let mut matching = Vec::new();
    for (x, ga) in &ia {
        let hit = ib
            .iter()
            .enumerate()
            .find_map(|(j, (y, gb))| if used[j] { None } else { ga.isomorphism_to(gb).map(|iso| (j, *y, iso)) });
        match hit {
            Some((j, y, iso)) => {
                used[j] = true;
                matching.push((*x, y, iso));
            }
            None => {
                return MoritaVerdict::Distinct(format!(
                    "no component matches the vertex group of order {} at {}",
                    ga.order(),
                    a.objects.label(*x)
                ))
            }
        }
    }
    let reps: Vec<usize> = matching.iter().map(|m| m.0).collect();
    let (middle, incl) = a.full_subgroupoid(&reps);
    let mut f0 = vec![0; middle.n_objects()];
    let mut f1 = vec![0; middle.n_morphisms()];
    for (x, y, iso) in &matching {
        let xi = incl.f0.iter().position(|v| v == x).unwrap();
        f0[xi] = *y;
        let (_, ea) = a.vertex_group(*x);
        let (_, eb) = b.vertex_group(*y);
        for (k, &m) in ea.iter().enumerate() {
            let mi = incl.f1.iter().position(|v| *v == m).unwrap();
            f1[mi] = eb[iso[k]];
        }
    }
    MoritaVerdict::Equivalent(Zigzag { middle, to_first: incl, to_second: GroupoidFunctor { f0, f1 } })
}

/// Every functor between two finite groupoids, by exhaustive search.
pub fn all_functors(src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Vec<GroupoidFunctor> {
    let mut out = Vec::new();
    let no = src.n_objects();
    if no == 0 {
        return vec![GroupoidFunctor { f0: vec![], f1: vec![] }];
    }
    for f0 in std::iter::repeat(0..dst.n_objects()).take(no).multi_cartesian_product() {
        let choices: Vec<Vec<usize>> =
            (0..src.n_morphisms()).map(|m| dst.hom(f0[src.source[m]], f0[src.target[m]])).collect();
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        for f1 in choices.iter().map(|c| c.iter().copied()).multi_cartesian_product() {
            let f = GroupoidFunctor { f0: f0.clone(), f1 };
            if f.violations(src, dst).is_empty() {
                out.push(f);
            }
        }
    }
    out
}

/// All finite groupoids with at most `max_morphisms` morphisms, up to isomorphism.
///
/// Connected pieces are deloopings `BG` with `|G| ≤ 6` and the pair groupoid
/// on two points; nothing else fits under six morphisms.
pub fn small_groupoids(max_morphisms: usize) -> Vec<FiniteGroupoid> {
    assert!(max_morphisms <= 6, "enumeration is complete only up to six morphisms");
    let mut pieces: Vec<FiniteGroupoid> = vec![
        FiniteGroupoid::delooping(&FiniteGroup::cyclic(1)),
        FiniteGroupoid::delooping(&FiniteGroup::cyclic(2)),
        FiniteGroupoid::delooping(&FiniteGroup::cyclic(3)),
        FiniteGroupoid::delooping(&FiniteGroup::cyclic(4)),
        FiniteGroupoid::delooping(&FiniteGroup::cyclic(2).product(&FiniteGroup::cyclic(2))),
        FiniteGroupoid::delooping(&FiniteGroup::cyclic(5)),
        FiniteGroupoid::delooping(&FiniteGroup::cyclic(6)),
        FiniteGroupoid::delooping(&FiniteGroup::s3()),
        FiniteGroupoid::pair(&FiniteSet::numbered("p", 2)),
    ];
    pieces.retain(|p| p.n_morphisms() <= max_morphisms);
    let mut out = vec![FiniteGroupoid::empty()];
    // multisets as non-decreasing index sequences
    fn rec(pieces: &[FiniteGroupoid], start: usize, cur: FiniteGroupoid, budget: usize, out: &mut Vec<FiniteGroupoid>) {
        for i in start..pieces.len() {
            if pieces[i].n_morphisms() <= budget {
                let next = cur.disjoint_union(&pieces[i]);
                out.push(next.clone());
                rec(pieces, i, next, budget - pieces[i].n_morphisms(), out);
            }
        }
    }
    rec(&pieces, 0, FiniteGroupoid::empty(), max_morphisms, &mut out);
    out
}

/// Oracle: searches for a middle groupoid with at most `max_morphisms`
/// morphisms and weak equivalences to both sides.
pub fn morita_by_search(a: &FiniteGroupoid, b: &FiniteGroupoid, max_morphisms: usize) -> Option<Zigzag> {
    for middle in small_groupoids(max_morphisms) {
        let weak = |dst: &FiniteGroupoid| {
            all_functors(&middle, dst)
                .into_iter()
                .find(|f| is_weak_equivalence(f, &middle, dst, CoverClass::Surjection))
        };
        if let Some(to_first) = weak(a) {
            if let Some(to_second) = weak(b) {
                return Some(Zigzag { middle, to_first, to_second });
            }
        }
    }
    None
}

/// `Γ^{[n]} = Γ ×_Λ ⋯ ×_Λ Γ` for a functor `F: Γ → Λ`, with the diagonal
/// `Γ → Γ^{[n]}` and the first projection `Γ^{[n]} → Γ`.
#[derive(Clone, Debug)]
pub struct FiberPower {
    pub groupoid: FiniteGroupoid,
    pub object_tuples: Vec<Vec<usize>>,
    pub morphism_tuples: Vec<Vec<usize>>,
    pub diagonal: GroupoidFunctor,
    /// `projections[k]` forgets all but the `k`-th factor.
    pub projections: Vec<GroupoidFunctor>,
}

pub fn fiber_power(f: &GroupoidFunctor, src: &FiniteGroupoid, n: usize) -> FiberPower {
    build_fiber_power(f, src, n, true)
}

/// The objects of `Γ^{[n]}` with identities only. Enough wherever just level 0 of the nerve is read.
/// The diagonal then has no morphism part.
pub fn fiber_power_objects(f: &GroupoidFunctor, src: &FiniteGroupoid, n: usize) -> FiberPower {
    build_fiber_power(f, src, n, false)
}

/// `(objects, morphisms)` of `Γ^{[n]}` without building it.
pub fn fiber_power_size(f: &GroupoidFunctor, n: usize) -> (usize, usize) {
    let count = |img: &[usize]| -> usize {
        img.iter().counts().values().map(|&c| c.pow(n as u32)).sum()
    };
    (count(&f.f0), count(&f.f1))
}

fn build_fiber_power(f: &GroupoidFunctor, src: &FiniteGroupoid, n: usize, full: bool) -> FiberPower {
    assert!(n >= 1);
    let tuples = |count: usize, img: &[usize]| -> Vec<Vec<usize>> {
        let mut by_img: HashMap<usize, Vec<usize>> = HashMap::new();
        for x in 0..count {
            by_img.entry(img[x]).or_default().push(x);
        }
        by_img
            .into_values()
            .flat_map(|cls| std::iter::repeat(cls).take(n).multi_cartesian_product().collect::<Vec<_>>())
            .collect()
    };
    let names = |labels: &[String], t: &[usize]| format!("<{}>", t.iter().map(|&i| labels[i].as_str()).join(";"));
    let objs = tuples(src.n_objects(), &f.f0);
    let mors = if full {
        tuples(src.n_morphisms(), &f.f1)
    } else {
        objs.iter().map(|t| t.iter().map(|&x| src.identity[x]).collect()).collect()
    };
    let oi: HashMap<Vec<usize>, usize> = objs.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let mi: HashMap<Vec<usize>, usize> = mors.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let raw = RawGroupoid {
        objects: objs.iter().map(|t| names(src.objects.labels(), t)).collect(),
        morphisms: mors.iter().map(|t| names(src.morphisms.labels(), t)).collect(),
        source: mors.iter().map(|t| oi[&t.iter().map(|&m| src.source[m]).collect::<Vec<_>>()]).collect(),
        target: mors.iter().map(|t| oi[&t.iter().map(|&m| src.target[m]).collect::<Vec<_>>()]).collect(),
        identity: objs.iter().map(|t| mi[&t.iter().map(|&x| src.identity[x]).collect::<Vec<_>>()]).collect(),
        inverse: mors.iter().map(|t| mi[&t.iter().map(|&m| src.inverse[m]).collect::<Vec<_>>()]).collect(),
        composition: HashMap::new(),
    }
    .with_composition(|a, b| mi[&mors[a].iter().zip(&mors[b]).map(|(&x, &y)| src.compose(x, y)).collect::<Vec<_>>()]);
    let groupoid = FiniteGroupoid::from_raw(raw).expect("tuple labels are distinct");
    let mut object_tuples = vec![vec![]; objs.len()];
    for t in &objs {
        object_tuples[groupoid.objects.index(&names(src.objects.labels(), t)).unwrap()] = t.clone();
    }
    let mut morphism_tuples = vec![vec![]; mors.len()];
    for t in &mors {
        morphism_tuples[groupoid.morphisms.index(&names(src.morphisms.labels(), t)).unwrap()] = t.clone();
    }
    let diagonal = GroupoidFunctor {
        f0: (0..src.n_objects()).map(|x| groupoid.objects.index(&names(src.objects.labels(), &vec![x; n])).unwrap()).collect(),
        f1: if full {
            (0..src.n_morphisms())
                .map(|m| groupoid.morphisms.index(&names(src.morphisms.labels(), &vec![m; n])).unwrap())
                .collect()
        } else {
            Vec::new()
        },
    };
    let projections = (0..n)
        .map(|k| GroupoidFunctor {
            f0: object_tuples.iter().map(|t| t[k]).collect(),
            f1: morphism_tuples.iter().map(|t| t[k]).collect(),
        })
        .collect();
    FiberPower { groupoid, object_tuples, morphism_tuples, diagonal, projections }
}

/// Product `π × π′` of two covers, checked to be a cover of the product base.
pub fn product_cover(c: &Cover, d: &Cover) -> Result<Cover> {
    let (total, tp) = c.total().product(d.total());
    let (base, bp) = c.base().product(d.base());
    let bidx: HashMap<(usize, usize), usize> = bp.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let images = tp.iter().map(|&(y, z)| bidx[&(c.map.apply(y), d.map.apply(z))]).collect();
    let map = SetMap::new(total, base, images)?;
    match (c.class, d.class) {
        (CoverClass::Split, CoverClass::Split) => {
            let (pc, pd) = (c.pieces.as_ref().unwrap(), d.pieces.as_ref().unwrap());
            let width = pd.iter().max().map_or(0, |m| m + 1);
            let pieces = tp.iter().map(|&(y, z)| pc[y] * width + pd[z]).collect();
            Cover::new(map, CoverClass::Split, Some(pieces))
        }
        _ => Cover::new(map, CoverClass::Surjection, None),
    }
}

pub fn product_cover_check(c: &Cover, d: &Cover) -> bool {
    product_cover(c, d).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::cech_projection;

    fn two_to_one() -> Cover {
        Cover::from_fibers(&FiniteSet::new(["*"]).unwrap(), &[2], CoverClass::Surjection).unwrap()
    }

    fn bz(n: usize) -> FiniteGroupoid {
        FiniteGroupoid::delooping(&FiniteGroup::cyclic(n))
    }

    fn point_into(g: &FiniteGroupoid) -> GroupoidFunctor {
        GroupoidFunctor { f0: vec![0], f1: vec![g.identity[0]] }
    }

    #[test]
    fn fully_faithful_examples() {
        let b = bz(2);
        let pt = FiniteGroupoid::point();
        assert!(is_fully_faithful(&GroupoidFunctor::identity(&b), &b, &b));
        let d = fully_faithful_defect(&point_into(&b), &pt, &b).unwrap();
        assert_eq!((d.domain_count, d.codomain_count), (1, 2));
        let (cech, base, pi) = cech_projection(&two_to_one());
        assert!(is_fully_faithful(&pi, &cech, &base));
        assert!(is_essentially_surjective(&pi, &cech, &base, CoverClass::Split));
        let empty = FiniteGroupoid::empty();
        let f = GroupoidFunctor { f0: vec![], f1: vec![] };
        assert!(!is_essentially_surjective(&f, &empty, &pt, CoverClass::Surjection));
    }

    #[test]
    fn strong_equivalence_witnesses() {
        let (cech, base, pi) = cech_projection(&two_to_one());
        let s = strong_equivalence(&pi, &cech, &base).unwrap();
        assert!(s.violations(&pi, &cech, &base).is_empty());
        assert!(strong_equivalence(&point_into(&bz(2)), &FiniteGroupoid::point(), &bz(2)).is_none());
        // diagonal into a fiber power, with the first projection as left inverse
        let fp = fiber_power(&pi, &cech, 3);
        assert!(fp.groupoid.check_axioms().is_empty());
        assert_eq!(fp.diagonal.then(&fp.projections[0]), GroupoidFunctor::identity(&cech));
        let s = strong_equivalence(&fp.diagonal, &cech, &fp.groupoid).unwrap();
        assert!(s.violations(&fp.diagonal, &cech, &fp.groupoid).is_empty());
    }

    #[test]
    fn factorization_examples() {
        let b = bz(3);
        let id = GroupoidFunctor::identity(&b);
        let fz = factorize(&id, &b, &b).unwrap();
        assert!(fz.violations(&id, &b, &b).is_empty());
        // Λ₀ collects every morphism out of an object, so only equivalent to Γ
        assert_eq!(fz.middle.n_objects(), 3);
        let m = FiniteGroupoid::trivial(&FiniteSet::numbered("m", 3));
        let id = GroupoidFunctor::identity(&m);
        let fz = factorize(&id, &m, &m).unwrap();
        assert!(fz.violations(&id, &m, &m).is_empty());
        assert_eq!((fz.middle.n_objects(), fz.middle.n_morphisms()), (3, 3));
        assert_eq!(fz.g, id);

        let (cech, base, pi) = cech_projection(&two_to_one());
        let fz = factorize(&pi, &cech, &base).unwrap();
        assert_eq!(fz.middle.n_objects(), 2);
        assert!(fz.violations(&pi, &cech, &base).is_empty());

        assert!(factorize(&point_into(&b), &FiniteGroupoid::point(), &b).is_err());
    }

    #[test]
    fn morita_examples() {
        let pair = FiniteGroupoid::pair(&FiniteSet::numbered("x", 3));
        let pt = FiniteGroupoid::point();
        match morita_equivalent(&pair, &pt) {
            MoritaVerdict::Equivalent(z) => assert!(z.violations(&pair, &pt).is_empty()),
            MoritaVerdict::Distinct(r) => panic!("{r}"),
        }
        assert!(!morita_equivalent(&bz(2), &bz(3)).holds());
        assert!(morita_by_search(&bz(2), &bz(3), 6).is_none());
        let z = morita_by_search(&pair, &pt, 6).unwrap();
        assert!(z.violations(&pair, &pt).is_empty());
    }

    #[test]
    fn small_groupoid_count() {
        let all = small_groupoids(6);
        assert!(all.iter().all(|g| g.check_axioms().is_empty() && g.n_morphisms() <= 6));
        let sizes: Vec<usize> = all.iter().map(|g| g.n_morphisms()).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 1).count(), 1);
        // two non-isomorphic connected groupoids with 4 morphisms plus unions
        assert!(sizes.iter().filter(|&&s| s == 4).count() >= 3);
    }

    #[test]
    fn product_covers() {
        let m = FiniteSet::new(["*"]).unwrap();
        let id = Cover::identity(&m);
        assert_eq!(product_cover(&id, &id).unwrap().total().len(), 1);
        let p = product_cover(&two_to_one(), &two_to_one()).unwrap();
        assert_eq!(p.fiber_sizes(), vec![4]);
        let s = Cover::from_fibers(&FiniteSet::numbered("m", 2), &[2, 1], CoverClass::Split).unwrap();
        let ps = product_cover(&s, &s).unwrap();
        assert_eq!(ps.class, CoverClass::Split);
    }
}
