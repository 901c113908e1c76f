//! Finite groupoids, functors, natural isomorphisms, nerves and the standard
//! constructions: trivial, delooping, action, Čech, pair, interval, cylinder.
//!
//! `compose(f, g)` means "first `f`, then `g`" and needs `t(f) = s(g)`.
//! For action groupoids this gives `(g,m)∘(h,n) = (gh,n)`.

use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::simplicial::{SimplicialMap, SimplicialSet};
use crate::site::{tuple_name, Cover, FiniteSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    pub objects: FiniteSet,
    pub morphisms: FiniteSet,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub identity: Vec<usize>,
    pub inverse: Vec<usize>,
    /// Composable pairs `(f, g)` with `t(f) = s(g)`, mapped to "f then g".
    pub composition: HashMap<(usize, usize), usize>,
}

/// Groupoid data in construction order, before sorting labels.
pub struct RawGroupoid {
    pub objects: Vec<String>,
    pub morphisms: Vec<String>,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub identity: Vec<usize>,
    pub inverse: Vec<usize>,
    pub composition: HashMap<(usize, usize), usize>,
}

impl RawGroupoid {
    /// Fills the composition table from a closure on composable pairs.
    pub fn with_composition(mut self, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); self.objects.len()];
        for (m, &s) in self.source.iter().enumerate() {
            by_source[s].push(m);
        }
        for a in 0..self.morphisms.len() {
            for &b in &by_source[self.target[a]] {
                self.composition.insert((a, b), f(a, b));
            }
        }
        self
    }
}

impl FiniteGroupoid {
    /// Sorts labels and re-indexes; only shape is validated here, laws via [`check_axioms`](Self::check_axioms).
    pub fn from_raw(raw: RawGroupoid) -> Result<Self> {
        let no = raw.objects.len();
        let nm = raw.morphisms.len();
        if [raw.source.len(), raw.target.len(), raw.inverse.len()].iter().any(|&l| l != nm)
            || raw.identity.len() != no
        {
            return Err(Error::InvalidGroupoid("structure tables have wrong lengths".into()));
        }
        if raw.source.iter().chain(&raw.target).any(|&x| x >= no)
            || raw.identity.iter().chain(&raw.inverse).any(|&x| x >= nm)
        {
            return Err(Error::InvalidGroupoid("structure table entry out of range".into()));
        }
        let objects = FiniteSet::new(raw.objects.clone())?;
        let morphisms = FiniteSet::new(raw.morphisms.clone())?;
        let ro: Vec<usize> = raw.objects.iter().map(|l| objects.index(l).unwrap()).collect();
        let rm: Vec<usize> = raw.morphisms.iter().map(|l| morphisms.index(l).unwrap()).collect();
        let mut source = vec![0; nm];
        let mut target = vec![0; nm];
        let mut inverse = vec![0; nm];
        for m in 0..nm {
            source[rm[m]] = ro[raw.source[m]];
            target[rm[m]] = ro[raw.target[m]];
            inverse[rm[m]] = rm[raw.inverse[m]];
        }
        let mut identity = vec![0; no];
        for o in 0..no {
            identity[ro[o]] = rm[raw.identity[o]];
        }
        let composition = raw.composition.iter().map(|(&(a, b), &c)| ((rm[a], rm[b]), rm[c])).collect();
        Ok(FiniteGroupoid { objects, morphisms, source, target, identity, inverse, composition })
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    /// "first `f`, then `g`".
    pub fn compose(&self, f: usize, g: usize) -> usize {
        self.composition[&(f, g)]
    }

    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.n_morphisms()).filter(|&m| self.source[m] == x && self.target[m] == y).collect()
    }

    pub fn morphisms_from(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_objects()];
        for m in 0..self.n_morphisms() {
            out[self.source[m]].push(m);
        }
        out
    }

    /// All violated groupoid axioms; empty iff the data is a groupoid.
    pub fn check_axioms(&self) -> Vec<String> {
        let mut out = Vec::new();
        let lbl = |m: usize| self.morphisms.label(m).to_string();
        let from = self.morphisms_from();
        for (&(a, b), &c) in &self.composition {
            if self.target[a] != self.source[b] {
                out.push(format!("composite defined on non-composable pair ({}, {})", lbl(a), lbl(b)));
            } else if self.source[c] != self.source[a] || self.target[c] != self.target[b] {
                out.push(format!("composite of ({}, {}) has wrong endpoints", lbl(a), lbl(b)));
            }
        }
        for a in 0..self.n_morphisms() {
            for &b in &from[self.target[a]] {
                if !self.composition.contains_key(&(a, b)) {
                    out.push(format!("composite of ({}, {}) missing", lbl(a), lbl(b)));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for x in 0..self.n_objects() {
            let i = self.identity[x];
            if self.source[i] != x || self.target[i] != x {
                out.push(format!("identity of {} has wrong endpoints", self.objects.label(x)));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for a in 0..self.n_morphisms() {
            if self.compose(self.identity[self.source[a]], a) != a || self.compose(a, self.identity[self.target[a]]) != a
            {
                out.push(format!("unit law fails at {}", lbl(a)));
            }
            let v = self.inverse[a];
            if self.source[v] != self.target[a]
                || self.target[v] != self.source[a]
                || self.compose(a, v) != self.identity[self.source[a]]
                || self.compose(v, a) != self.identity[self.target[a]]
            {
                out.push(format!("inverse law fails at {}", lbl(a)));
            }
            for &b in &from[self.target[a]] {
                for &c in &from[self.target[b]] {
                    if self.compose(self.compose(a, b), c) != self.compose(a, self.compose(b, c)) {
                        out.push(format!("associativity fails at ({}, {}, {})", lbl(a), lbl(b), lbl(c)));
                    }
                }
            }
        }
        out
    }

    pub fn empty() -> Self {
        Self::from_raw(RawGroupoid {
            objects: vec![],
            morphisms: vec![],
            source: vec![],
            target: vec![],
            identity: vec![],
            inverse: vec![],
            composition: HashMap::new(),
        })
        .unwrap()
    }

    /// `M ⇉ M` with identities only.
    pub fn trivial(m: &FiniteSet) -> Self {
        let n = m.len();
        Self::from_raw(
            RawGroupoid {
                objects: m.labels().to_vec(),
                morphisms: m.labels().iter().map(|l| format!("1_{l}")).collect(),
                source: (0..n).collect(),
                target: (0..n).collect(),
                identity: (0..n).collect(),
                inverse: (0..n).collect(),
                composition: HashMap::new(),
            }
            .with_composition(|a, _| a),
        )
        .unwrap()
    }

    pub fn point() -> Self {
        Self::trivial(&FiniteSet::new(["*"]).unwrap())
    }

    /// One object, morphisms the group elements; `compose(g, h) = h·g`.
    pub fn delooping(g: &FiniteGroup) -> Self {
        let n = g.order();
        Self::from_raw(
            RawGroupoid {
                objects: vec!["*".into()],
                morphisms: g.names.clone(),
                source: vec![0; n],
                target: vec![0; n],
                identity: vec![g.unit],
                inverse: (0..n).map(|a| g.inverse(a)).collect(),
                composition: HashMap::new(),
            }
            .with_composition(|a, b| g.mul[b][a]),
        )
        .unwrap()
    }

    /// Action groupoid `M//G`: morphisms `(g,m): m → g·m`, `(g,m)∘(h,n) = (gh,n)`.
    /// `act[g][m]` is `g·m`.
    pub fn action(g: &FiniteGroup, m: &FiniteSet, act: &[Vec<usize>]) -> Result<Self> {
        let (ng, nm) = (g.order(), m.len());
        if act.len() != ng || act.iter().any(|r| r.len() != nm || r.iter().any(|&x| x >= nm)) {
            return Err(Error::Precondition("action table has wrong shape".into()));
        }
        for x in 0..nm {
            if act[g.unit][x] != x {
                return Err(Error::Precondition("unit does not act trivially".into()));
            }
            for a in 0..ng {
                for b in 0..ng {
                    if act[g.mul[a][b]][x] != act[a][act[b][x]] {
                        return Err(Error::Precondition("table is not an action".into()));
                    }
                }
            }
        }
        let idx = |a: usize, x: usize| a * nm + x;
        let mut raw = RawGroupoid {
            objects: m.labels().to_vec(),
            morphisms: Vec::new(),
            source: Vec::new(),
            target: Vec::new(),
            identity: (0..nm).map(|x| idx(g.unit, x)).collect(),
            inverse: Vec::new(),
            composition: HashMap::new(),
        };
        for a in 0..ng {
            for x in 0..nm {
                raw.morphisms.push(format!("({},{})", g.names[a], m.label(x)));
                raw.source.push(x);
                raw.target.push(act[a][x]);
                raw.inverse.push(idx(g.inverse(a), act[a][x]));
            }
        }
        // first (h,n), then (g,hn): (gh, n)
        let raw = raw.with_composition(|first, second| idx(g.mul[second / nm][first / nm], first % nm));
        Self::from_raw(raw)
    }

    /// Čech groupoid: objects `Y`, morphisms `Y ×_M Y`, composition omits the middle element.
    pub fn cech(c: &Cover) -> Self {
        let y = c.total();
        let fibers = c.map.fibers();
        let pairs: Vec<(usize, usize)> = fibers
            .iter()
            .flat_map(|f| f.iter().copied().cartesian_product(f.iter().copied()))
            .sorted()
            .collect();
        let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let raw = RawGroupoid {
            objects: y.labels().to_vec(),
            morphisms: pairs.iter().map(|&(a, b)| format!("({},{})", y.label(a), y.label(b))).collect(),
            source: pairs.iter().map(|p| p.0).collect(),
            target: pairs.iter().map(|p| p.1).collect(),
            identity: (0..y.len()).map(|a| index[&(a, a)]).collect(),
            inverse: pairs.iter().map(|&(a, b)| index[&(b, a)]).collect(),
            composition: HashMap::new(),
        }
        .with_composition(|f, g| index[&(pairs[f].0, pairs[g].1)]);
        Self::from_raw(raw).unwrap()
    }

    /// Pair (indiscrete) groupoid on a set.
    pub fn pair(m: &FiniteSet) -> Self {
        let pt = FiniteSet::new(["*"]).unwrap();
        let map = crate::site::SetMap::constant(m, &pt, 0);
        if m.is_empty() {
            return Self::empty();
        }
        Self::cech(&Cover::new(map, crate::site::CoverClass::Surjection, None).unwrap())
    }

    /// Interval groupoid: objects `a, b`, morphisms `1_a, 1_b, l: a → b, l^-1`.
    pub fn interval() -> Self {
        let raw = RawGroupoid {
            objects: vec!["a".into(), "b".into()],
            morphisms: vec!["1_a".into(), "1_b".into(), "l".into(), "l^-1".into()],
            source: vec![0, 1, 0, 1],
            target: vec![0, 1, 1, 0],
            identity: vec![0, 1],
            inverse: vec![0, 1, 3, 2],
            composition: HashMap::new(),
        }
        .with_composition(|f, g| match (f, g) {
            (0, x) | (x, 0) | (1, x) | (x, 1) => x,
            (2, 3) => 0,
            (3, 2) => 1,
            _ => unreachable!(),
        });
        Self::from_raw(raw).unwrap()
    }

    pub fn product(&self, other: &FiniteGroupoid) -> Self {
        let (no, mo) = (other.n_objects(), other.n_morphisms());
        let raw = RawGroupoid {
            objects: (0..self.n_objects())
                .cartesian_product(0..no)
                .map(|(a, b)| format!("({},{})", self.objects.label(a), other.objects.label(b)))
                .collect(),
            morphisms: (0..self.n_morphisms())
                .cartesian_product(0..mo)
                .map(|(a, b)| format!("({},{})", self.morphisms.label(a), other.morphisms.label(b)))
                .collect(),
            source: (0..self.n_morphisms())
                .cartesian_product(0..mo)
                .map(|(a, b)| self.source[a] * no + other.source[b])
                .collect(),
            target: (0..self.n_morphisms())
                .cartesian_product(0..mo)
                .map(|(a, b)| self.target[a] * no + other.target[b])
                .collect(),
            identity: (0..self.n_objects())
                .cartesian_product(0..no)
                .map(|(a, b)| self.identity[a] * mo + other.identity[b])
                .collect(),
            inverse: (0..self.n_morphisms())
                .cartesian_product(0..mo)
                .map(|(a, b)| self.inverse[a] * mo + other.inverse[b])
                .collect(),
            composition: HashMap::new(),
        }
        .with_composition(|f, g| self.compose(f / mo, g / mo) * mo + other.compose(f % mo, g % mo));
        Self::from_raw(raw).unwrap()
    }

    pub fn disjoint_union(&self, other: &FiniteGroupoid) -> Self {
        let (no, nm) = (self.n_objects(), self.n_morphisms());
        let tag = |p: &str, l: &str| format!("{p}:{l}");
        let raw = RawGroupoid {
            objects: self
                .objects
                .labels()
                .iter()
                .map(|l| tag("0", l))
                .chain(other.objects.labels().iter().map(|l| tag("1", l)))
                .collect(),
            morphisms: self
                .morphisms
                .labels()
                .iter()
                .map(|l| tag("0", l))
                .chain(other.morphisms.labels().iter().map(|l| tag("1", l)))
                .collect(),
            source: self.source.iter().copied().chain(other.source.iter().map(|&x| x + no)).collect(),
            target: self.target.iter().copied().chain(other.target.iter().map(|&x| x + no)).collect(),
            identity: self.identity.iter().copied().chain(other.identity.iter().map(|&x| x + nm)).collect(),
            inverse: self.inverse.iter().copied().chain(other.inverse.iter().map(|&x| x + nm)).collect(),
            composition: HashMap::new(),
        }
        .with_composition(|f, g| if f < nm { self.compose(f, g) } else { other.compose(f - nm, g - nm) + nm });
        Self::from_raw(raw).unwrap()
    }

    /// Cylinder `Γ × 𝕀` with inclusions at the ends `a` and `b`.
    pub fn cylinder(&self) -> (FiniteGroupoid, GroupoidFunctor, GroupoidFunctor) {
        let i = Self::interval();
        let cyl = self.product(&i);
        let end = |o: usize, m: usize| -> GroupoidFunctor {
            let f0 = (0..self.n_objects())
                .map(|x| cyl.objects.index(&format!("({},{})", self.objects.label(x), i.objects.label(o))).unwrap())
                .collect();
            let f1 = (0..self.n_morphisms())
                .map(|x| {
                    cyl.morphisms
                        .index(&format!("({},{})", self.morphisms.label(x), i.morphisms.label(m)))
                        .unwrap()
                })
                .collect();
            GroupoidFunctor { f0, f1 }
        };
        let (i0, i1) = (end(0, 0), end(1, 1));
        (cyl, i0, i1)
    }

    /// Connected components as lists of objects.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n_objects()];
        let mut out = Vec::new();
        let from = self.morphisms_from();
        for s in 0..self.n_objects() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &m in &from[x] {
                    let y = self.target[m];
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                        stack.push(y);
                    }
                }
            }
            members.sort();
            out.push(members);
        }
        out
    }

    /// Automorphism group of an object, with the morphism indices of its elements.
    pub fn vertex_group(&self, x: usize) -> (FiniteGroup, Vec<usize>) {
        let elems = self.hom(x, x);
        let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let mul = elems.iter().map(|&a| elems.iter().map(|&b| pos[&self.compose(b, a)]).collect()).collect();
        let names = elems.iter().map(|&m| self.morphisms.label(m).to_string()).collect();
        (FiniteGroup { names, mul, unit: pos[&self.identity[x]] }, elems)
    }

    pub fn nerve(&self, max_level: usize) -> GroupoidNerve {
        let mut tuples: Vec<Vec<Vec<usize>>> = vec![(0..self.n_objects()).map(|x| vec![x]).collect()];
        let from = self.morphisms_from();
        if max_level >= 1 {
            tuples.push((0..self.n_morphisms()).map(|m| vec![m]).collect());
        }
        for _ in 2..=max_level {
            let prev = tuples.last().unwrap();
            let next: Vec<Vec<usize>> = prev
                .iter()
                .flat_map(|t| {
                    from[self.target[*t.last().unwrap()]].iter().map(move |&g| {
                        let mut u = t.clone();
                        u.push(g);
                        u
                    })
                })
                .collect();
            tuples.push(next);
        }
        let index: Vec<HashMap<&[usize], usize>> =
            tuples.iter().map(|l| l.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect()).collect();
        let mut names = vec![self.objects.labels().to_vec()];
        for lvl in tuples.iter().skip(1) {
            names.push(lvl.iter().map(|t| tuple_name(self.morphisms.labels(), t)).collect());
        }
        let mut faces = vec![Vec::new()];
        for n in 1..=max_level {
            let per_i: Vec<Vec<usize>> = (0..=n)
                .map(|i| {
                    tuples[n]
                        .iter()
                        .map(|t| {
                            if n == 1 {
                                return if i == 0 { self.target[t[0]] } else { self.source[t[0]] };
                            }
                            let mut u = t.clone();
                            if i == 0 {
                                u.remove(0);
                            } else if i == n {
                                u.pop();
                            } else {
                                let c = self.compose(u[i - 1], u[i]);
                                u.splice(i - 1..=i, [c]);
                            }
                            index[n - 1][u.as_slice()]
                        })
                        .collect()
                })
                .collect();
            faces.push(per_i);
        }
        let mut degens = Vec::new();
        for n in 0..max_level {
            let per_i: Vec<Vec<usize>> = (0..=n)
                .map(|i| {
                    tuples[n]
                        .iter()
                        .map(|t| {
                            if n == 0 {
                                return index[1][[self.identity[t[0]]].as_slice()];
                            }
                            // vertex i of the simplex
                            let v = if i == 0 { self.source[t[0]] } else { self.target[t[i - 1]] };
                            let mut u = t.clone();
                            u.insert(i, self.identity[v]);
                            index[n + 1][u.as_slice()]
                        })
                        .collect()
                })
                .collect();
            degens.push(per_i);
        }
        GroupoidNerve { tuples, simplicial: SimplicialSet { names, faces, degens } }
    }
}

impl FiniteGroupoid {
    /// Full subgroupoid on the given objects, with its inclusion.
    pub fn full_subgroupoid(&self, objs: &[usize]) -> (FiniteGroupoid, GroupoidFunctor) {
        let keep: Vec<bool> = (0..self.n_objects()).map(|x| objs.contains(&x)).collect();
        let obj: Vec<usize> = (0..self.n_objects()).filter(|&x| keep[x]).collect();
        let mor: Vec<usize> =
            (0..self.n_morphisms()).filter(|&m| keep[self.source[m]] && keep[self.target[m]]).collect();
        let op: HashMap<usize, usize> = obj.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mp: HashMap<usize, usize> = mor.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let raw = RawGroupoid {
            objects: obj.iter().map(|&x| self.objects.label(x).to_string()).collect(),
            morphisms: mor.iter().map(|&m| self.morphisms.label(m).to_string()).collect(),
            source: mor.iter().map(|&m| op[&self.source[m]]).collect(),
            target: mor.iter().map(|&m| op[&self.target[m]]).collect(),
            identity: obj.iter().map(|&x| mp[&self.identity[x]]).collect(),
            inverse: mor.iter().map(|&m| mp[&self.inverse[m]]).collect(),
            composition: HashMap::new(),
        }
        .with_composition(|a, b| mp[&self.compose(mor[a], mor[b])]);
        // labels are a sorted subset, so indices stay in order
        let sub = Self::from_raw(raw).unwrap();
        (sub, GroupoidFunctor { f0: obj, f1: mor })
    }

    /// One object from each component, with the full subgroupoid on them.
    pub fn skeleton(&self) -> (FiniteGroupoid, GroupoidFunctor) {
        let reps: Vec<usize> = self.components().iter().map(|c| c[0]).collect();
        self.full_subgroupoid(&reps)
    }
}

/// Functor `Π^Y: Č(Y) → M ⇉ M` of a cover.
pub fn cech_projection(c: &Cover) -> (FiniteGroupoid, FiniteGroupoid, GroupoidFunctor) {
    let cech = FiniteGroupoid::cech(c);
    let base = FiniteGroupoid::trivial(c.base());
    let f0 = c.map.images().to_vec();
    let f1 = (0..cech.n_morphisms()).map(|m| f0[cech.source[m]]).collect();
    (cech, base, GroupoidFunctor { f0, f1 })
}

/// Functor `Č(Y) → Č(Y′)` induced by a map `Y → Y′` over the common base.
pub fn cech_functor(from: &Cover, to: &Cover, map: &crate::site::SetMap) -> Result<GroupoidFunctor> {
    if from.base() != to.base() || map.domain != *from.total() || map.codomain != *to.total() {
        return Err(Error::BaseMismatch("map is not between the cover totals".into()));
    }
    for y in 0..from.total().len() {
        if to.map.apply(map.apply(y)) != from.map.apply(y) {
            return Err(Error::BaseMismatch(format!("map does not commute with projections at {}", from.total().label(y))));
        }
    }
    let (a, b) = (FiniteGroupoid::cech(from), FiniteGroupoid::cech(to));
    let f1 = (0..a.n_morphisms())
        .map(|m| {
            let (s, t) = (map.apply(a.source[m]), map.apply(a.target[m]));
            b.hom(s, t)[0]
        })
        .collect();
    Ok(GroupoidFunctor { f0: map.images().to_vec(), f1 })
}

/// Nerve `Γ_0, Γ_1, …` of a groupoid; level `n ≥ 1` holds composable `n`-tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidNerve {
    pub tuples: Vec<Vec<Vec<usize>>>,
    pub simplicial: SimplicialSet,
}

impl GroupoidNerve {
    pub fn index_of(&self, level: usize, t: &[usize]) -> Option<usize> {
        self.tuples[level].binary_search_by(|u| u.as_slice().cmp(t)).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupoidFunctor {
    pub f0: Vec<usize>,
    pub f1: Vec<usize>,
}

impl GroupoidFunctor {
    pub fn identity(g: &FiniteGroupoid) -> Self {
        GroupoidFunctor { f0: (0..g.n_objects()).collect(), f1: (0..g.n_morphisms()).collect() }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &GroupoidFunctor) -> GroupoidFunctor {
        GroupoidFunctor {
            f0: self.f0.iter().map(|&x| other.f0[x]).collect(),
            f1: self.f1.iter().map(|&x| other.f1[x]).collect(),
        }
    }

    pub fn violations(&self, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Vec<String> {
        let mut out = Vec::new();
        if self.f0.len() != src.n_objects() || self.f1.len() != src.n_morphisms() {
            return vec!["functor tables have wrong length".into()];
        }
        if self.f0.iter().any(|&x| x >= dst.n_objects()) || self.f1.iter().any(|&x| x >= dst.n_morphisms()) {
            return vec!["functor image out of range".into()];
        }
        for m in 0..src.n_morphisms() {
            let l = src.morphisms.label(m);
            if dst.source[self.f1[m]] != self.f0[src.source[m]] || dst.target[self.f1[m]] != self.f0[src.target[m]] {
                out.push(format!("source/target not preserved at {l}"));
            }
            if dst.inverse[self.f1[m]] != self.f1[src.inverse[m]] {
                out.push(format!("inverse not preserved at {l}"));
            }
        }
        for x in 0..src.n_objects() {
            if dst.identity[self.f0[x]] != self.f1[src.identity[x]] {
                out.push(format!("identity not preserved at {}", src.objects.label(x)));
            }
        }
        if out.is_empty() {
            for (&(a, b), &c) in &src.composition {
                if dst.compose(self.f1[a], self.f1[b]) != self.f1[c] {
                    out.push(format!(
                        "composition not preserved at ({}, {})",
                        src.morphisms.label(a),
                        src.morphisms.label(b)
                    ));
                }
            }
        }
        out.sort();
        out
    }

    /// Level-wise map of nerves `F_n(f_1,…,f_n) = (F f_1, …, F f_n)`.
    pub fn on_nerves(&self, src: &GroupoidNerve, dst: &GroupoidNerve) -> SimplicialMap {
        self.on_nerve_levels(src, dst, src.tuples.len() - 1)
    }

    /// [`on_nerves`](Self::on_nerves) restricted to levels `0..=max_level`.
    pub fn on_nerve_levels(&self, src: &GroupoidNerve, dst: &GroupoidNerve, max_level: usize) -> SimplicialMap {
        let levels = src
            .tuples
            .iter()
            .take(max_level + 1)
            .enumerate()
            .map(|(n, lvl)| {
                lvl.iter()
                    .map(|t| {
                        let img: Vec<usize> =
                            if n == 0 { vec![self.f0[t[0]]] } else { t.iter().map(|&m| self.f1[m]).collect() };
                        dst.index_of(n, &img).expect("functor maps composable tuples to composable tuples")
                    })
                    .collect()
            })
            .collect();
        SimplicialMap { levels }
    }
}

/// Natural isomorphism `η: F ⇒ G` with components `η_x: F x → G x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NatIso {
    pub component: Vec<usize>,
}

impl NatIso {
    pub fn identity(f: &GroupoidFunctor, dst: &FiniteGroupoid) -> Self {
        NatIso { component: f.f0.iter().map(|&y| dst.identity[y]).collect() }
    }

    pub fn violations(
        &self,
        f: &GroupoidFunctor,
        g: &GroupoidFunctor,
        src: &FiniteGroupoid,
        dst: &FiniteGroupoid,
    ) -> Vec<String> {
        let mut out = Vec::new();
        for x in 0..src.n_objects() {
            let e = self.component[x];
            if dst.source[e] != f.f0[x] || dst.target[e] != g.f0[x] {
                out.push(format!("component at {} has wrong endpoints", src.objects.label(x)));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for m in 0..src.n_morphisms() {
            let (x, y) = (src.source[m], src.target[m]);
            if dst.compose(f.f1[m], self.component[y]) != dst.compose(self.component[x], g.f1[m]) {
                out.push(format!("naturality fails at {}", src.morphisms.label(m)));
            }
        }
        out
    }

    /// Vertical composite `η` then `θ`.
    pub fn then(&self, theta: &NatIso, dst: &FiniteGroupoid) -> NatIso {
        NatIso { component: self.component.iter().zip(&theta.component).map(|(&a, &b)| dst.compose(a, b)).collect() }
    }

    /// Encodes `η: F ⇒ G` as a functor on the cylinder `Γ × 𝕀`.
    pub fn to_cylinder(&self, f: &GroupoidFunctor, g: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> GroupoidFunctor {
        let (cyl, _, _) = src.cylinder();
        let int = FiniteGroupoid::interval();
        let f0 = (0..cyl.n_objects())
            .map(|o| {
                let (x, e) = (o / 2, o % 2);
                if e == 0 { f.f0[x] } else { g.f0[x] }
            })
            .collect();
        // product morphism index = m * 4 + k, interval morphisms in sorted order
        let k_of = |name: &str| int.morphisms.index(name).unwrap();
        let (ka, kb, kl, kli) = (k_of("1_a"), k_of("1_b"), k_of("l"), k_of("l^-1"));
        let f1 = (0..cyl.n_morphisms())
            .map(|pm| {
                let (m, k) = (pm / 4, pm % 4);
                let y = src.target[m];
                let x = src.source[m];
                if k == ka {
                    f.f1[m]
                } else if k == kb {
                    g.f1[m]
                } else if k == kl {
                    dst.compose(f.f1[m], self.component[y])
                } else {
                    debug_assert_eq!(k, kli);
                    dst.compose(dst.inverse[self.component[x]], f.f1[m])
                }
            })
            .collect();
        let mut h = GroupoidFunctor { f0, f1 };
        // product objects/morphisms are stored in label order; re-index through labels
        h = reindex_cylinder(&h, src, &cyl);
        h
    }

    /// Recovers `(F, G, η)` from a cylinder functor: `F = H∘i₀`, `G = H∘i₁`, `η_x = H(1_x × l)`.
    pub fn from_cylinder(h: &GroupoidFunctor, src: &FiniteGroupoid) -> (GroupoidFunctor, GroupoidFunctor, NatIso) {
        let (cyl, i0, i1) = src.cylinder();
        let comp = (0..src.n_objects())
            .map(|x| {
                let lbl = format!("({},l)", src.morphisms.label(src.identity[x]));
                h.f1[cyl.morphisms.index(&lbl).unwrap()]
            })
            .collect();
        (i0.then(h), i1.then(h), NatIso { component: comp })
    }
}

/// The cylinder functor above is built in "product order"; translate to the label order of `cyl`.
fn reindex_cylinder(h: &GroupoidFunctor, src: &FiniteGroupoid, cyl: &FiniteGroupoid) -> GroupoidFunctor {
    let int = FiniteGroupoid::interval();
    let mut f0 = vec![0; cyl.n_objects()];
    for x in 0..src.n_objects() {
        for e in 0..2 {
            let l = format!("({},{})", src.objects.label(x), int.objects.label(e));
            f0[cyl.objects.index(&l).unwrap()] = h.f0[x * 2 + e];
        }
    }
    let mut f1 = vec![0; cyl.n_morphisms()];
    for m in 0..src.n_morphisms() {
        for k in 0..4 {
            let l = format!("({},{})", src.morphisms.label(m), int.morphisms.label(k));
            f1[cyl.morphisms.index(&l).unwrap()] = h.f1[m * 4 + k];
        }
    }
    GroupoidFunctor { f0, f1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::site::CoverClass;

    fn z2_on_two() -> FiniteGroupoid {
        let m = FiniteSet::new(["p", "q"]).unwrap();
        FiniteGroupoid::action(&FiniteGroup::cyclic(2), &m, &[vec![0, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn constructions_satisfy_axioms() {
        let c = Cover::from_fibers(&FiniteSet::numbered("m", 2), &[2, 3], CoverClass::Surjection).unwrap();
        let all = [
            FiniteGroupoid::empty(),
            FiniteGroupoid::point(),
            FiniteGroupoid::delooping(&FiniteGroup::s3()),
            z2_on_two(),
            FiniteGroupoid::cech(&c),
            FiniteGroupoid::pair(&FiniteSet::numbered("x", 3)),
            FiniteGroupoid::interval(),
            z2_on_two().product(&FiniteGroupoid::interval()),
            z2_on_two().disjoint_union(&FiniteGroupoid::point()),
        ];
        for g in &all {
            assert!(g.check_axioms().is_empty(), "{:?}", g.check_axioms());
        }
        assert_eq!(FiniteGroupoid::cech(&c).n_morphisms(), 4 + 9);
    }

    #[test]
    fn action_composition_convention() {
        let g = FiniteGroup::cyclic(3);
        let m = FiniteSet::numbered("m", 3);
        let act: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|x| (a + x) % 3).collect()).collect();
        let gr = FiniteGroupoid::action(&g, &m, &act).unwrap();
        let idx = |a: usize, x: usize| gr.morphisms.index(&format!("({},{})", g.names[a], m.label(x))).unwrap();
        // first (1, m0) : m0 -> m1, then (2, m1): composite (2+1, m0)
        assert_eq!(gr.compose(idx(1, 0), idx(2, 1)), idx(0, 0));
        assert_eq!(gr.components().len(), 1);
        assert_eq!(gr.vertex_group(0).0.order(), 1);
    }

    #[test]
    fn broken_groupoid_is_reported() {
        let mut g = z2_on_two();
        let key = *g.composition.keys().next().unwrap();
        let v = g.composition[&key];
        g.composition.insert(key, (v + 1) % g.n_morphisms());
        assert!(!g.check_axioms().is_empty());
    }

    #[test]
    fn nerve_identities_and_sizes() {
        let g = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
        let n = g.nerve(4);
        assert_eq!((0..=4).map(|l| n.simplicial.size(l)).collect::<Vec<_>>(), vec![1, 2, 4, 8, 16]);
        assert!(n.simplicial.identity_violations().is_empty());
        let p = z2_on_two().nerve(3);
        assert!(p.simplicial.identity_violations().is_empty());
        // level 1: d1 = source, d0 = target
        let e = z2_on_two();
        let f = (0..e.n_morphisms()).find(|&m| e.source[m] != e.target[m]).unwrap();
        assert_eq!(p.simplicial.face(1, 1, f), e.source[f]);
        assert_eq!(p.simplicial.face(1, 0, f), e.target[f]);
    }

    #[test]
    fn functor_and_nerve_map() {
        let g = z2_on_two();
        let pt = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
        let f = GroupoidFunctor {
            f0: vec![0, 0],
            f1: (0..g.n_morphisms())
                .map(|m| pt.morphisms.index(&g.morphisms.label(m)[1..2]).unwrap())
                .collect(),
        };
        assert!(f.violations(&g, &pt).is_empty());
        let nm = f.on_nerves(&g.nerve(3), &pt.nerve(3));
        assert!(nm.violations(&g.nerve(3).simplicial, &pt.nerve(3).simplicial).is_empty());
    }

    #[test]
    fn cylinder_round_trip() {
        let g = z2_on_two();
        let id = GroupoidFunctor::identity(&g);
        // η: id ⇒ swap-conjugate; use the nontrivial natural automorphism of id on a free action: identity components
        let eta = NatIso::identity(&id, &g);
        assert!(eta.violations(&id, &id, &g, &g).is_empty());
        let h = eta.to_cylinder(&id, &id, &g, &g);
        let (cyl, i0, i1) = g.cylinder();
        assert!(cyl.check_axioms().is_empty());
        assert!(i0.violations(&g, &cyl).is_empty() && i1.violations(&g, &cyl).is_empty());
        assert!(h.violations(&cyl, &g).is_empty());
        let (f2, g2, e2) = NatIso::from_cylinder(&h, &g);
        assert_eq!((f2, g2, e2), (id.clone(), id, eta));
    }

    #[test]
    fn cylinder_round_trip_nontrivial() {
        let b = FiniteGroupoid::delooping(&FiniteGroup::s3());
        let id = GroupoidFunctor::identity(&b);
        for c in 0..6 {
            // conjugation by c is naturally isomorphic to id
            let conj = GroupoidFunctor {
                f0: vec![0],
                f1: (0..6).map(|m| b.compose(b.compose(b.inverse[c], m), c)).collect(),
            };
            assert!(conj.violations(&b, &b).is_empty());
            let eta = NatIso { component: vec![c] };
            assert!(eta.violations(&id, &conj, &b, &b).is_empty());
            let h = eta.to_cylinder(&id, &conj, &b, &b);
            let (cyl, _, _) = b.cylinder();
            assert!(h.violations(&cyl, &b).is_empty());
            assert_eq!(NatIso::from_cylinder(&h, &b), (id.clone(), conj, eta));
        }
    }

    proptest::proptest! {
        #[test]
        fn cyclic_nerves_are_simplicial(n in 1usize..5, top in 1usize..4) {
            let b = FiniteGroupoid::delooping(&FiniteGroup::cyclic(n));
            let nerve = b.nerve(top);
            proptest::prop_assert!(nerve.simplicial.identity_violations().is_empty());
            proptest::prop_assert_eq!(nerve.simplicial.size(top), n.pow(top as u32));
        }

        #[test]
        fn cech_groupoid_has_pair_hom_sets(sizes in proptest::collection::vec(1usize..4, 1..4)) {
            let c = Cover::from_fibers(&FiniteSet::numbered("m", sizes.len()), &sizes, CoverClass::Surjection).unwrap();
            let g = FiniteGroupoid::cech(&c);
            proptest::prop_assert!(g.check_axioms().is_empty());
            proptest::prop_assert_eq!(g.n_morphisms(), sizes.iter().map(|s| s * s).sum::<usize>());
        }
    }
}
