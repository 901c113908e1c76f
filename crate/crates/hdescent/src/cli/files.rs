//! Label-based JSON formats read and written by `hd`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupoidFunctor, RawGroupoid};
use crate::holonomy::{DiscreteTwoForm, OrientifoldData, Q};
use crate::site::{Cover, CoverClass, Edge, FiniteSet, SetMap, TriangulatedSurface};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFile {
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismEntry {
    pub name: String,
    pub source: String,
    pub target: String,
}

/// `composition` lists triples `[f, g, h]` meaning "f then g is h".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidFile {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismEntry>,
    pub identities: BTreeMap<String, String>,
    pub inverses: BTreeMap<String, String>,
    pub composition: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorFile {
    pub source: GroupoidFile,
    pub target: GroupoidFile,
    pub objects: BTreeMap<String, String>,
    pub morphisms: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    pub base: Vec<String>,
    pub total: Vec<String>,
    pub map: BTreeMap<String, String>,
    pub class: CoverClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<BTreeMap<String, usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub vertices: Vec<String>,
    pub faces: Vec<[String; 3]>,
}

/// A rational written as a JSON integer or as a string `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalEntry {
    Int(i64),
    Text(String),
}

impl RationalEntry {
    pub fn value(&self) -> Result<Q> {
        match self {
            RationalEntry::Int(n) => Ok(Q::from_integer(*n)),
            RationalEntry::Text(s) => s.trim().parse::<Q>().map_err(|_| Error::Parse(format!("`{s}` is not a rational"))),
        }
    }
}

impl From<Q> for RationalEntry {
    fn from(q: Q) -> Self {
        if *q.denom() == 1 {
            RationalEntry::Int(*q.numer())
        } else {
            RationalEntry::Text(q.to_string())
        }
    }
}

/// One value per face, in the order the faces are listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    pub values: Vec<RationalEntry>,
}

/// Values on the listed-orientation sheet plus the edges carrying the nontrivial `ℤ/2` class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientifoldFile {
    pub surface: SurfaceFile,
    pub values: Vec<RationalEntry>,
    #[serde(default)]
    pub kappa: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentObjectFile {
    pub instance: String,
    pub cover: CoverFile,
    #[serde(default = "yes")]
    pub normalized: bool,
    pub p: Vec<u64>,
    pub mu: Vec<u64>,
}

fn yes() -> bool {
    true
}

/// Repeated entries of `labels`, in first-repeat order.
pub fn duplicates<'a>(labels: impl IntoIterator<Item = &'a String>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for l in labels {
        if !seen.insert(l) && !out.contains(l) {
            out.push(l.clone());
        }
    }
    out
}

fn lookup(table: &HashMap<&str, usize>, label: &str, what: &str) -> Result<usize> {
    table.get(label).copied().ok_or_else(|| Error::UnknownLabel(format!("{what} {label}")))
}

fn positions(labels: &[String]) -> HashMap<&str, usize> {
    labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
}

impl SetFile {
    pub fn build(&self) -> Result<FiniteSet> {
        FiniteSet::new(self.elements.clone())
    }
}

impl GroupoidFile {
    pub fn labels(&self) -> Vec<&String> {
        self.objects.iter().chain(self.morphisms.iter().map(|m| &m.name)).collect()
    }

    pub fn build(&self) -> Result<FiniteGroupoid> {
        let names: Vec<String> = self.morphisms.iter().map(|m| m.name.clone()).collect();
        if let Some(d) = duplicates(self.labels()).into_iter().next() {
            return Err(Error::DuplicateLabel(d));
        }
        let obj = positions(&self.objects);
        let mor = positions(&names);
        let ends = |pick: fn(&MorphismEntry) -> &String| -> Result<Vec<usize>> {
            self.morphisms.iter().map(|m| lookup(&obj, pick(m), "object")).collect()
        };
        let source = ends(|m| &m.source)?;
        let target = ends(|m| &m.target)?;
        let identity = self
            .objects
            .iter()
            .map(|o| {
                let m = self.identities.get(o).ok_or_else(|| Error::InvalidGroupoid(format!("object `{o}` has no identity")))?;
                lookup(&mor, m, "morphism")
            })
            .collect::<Result<Vec<_>>>()?;
        let inverse = names
            .iter()
            .map(|n| {
                let m = self.inverses.get(n).ok_or_else(|| Error::InvalidGroupoid(format!("morphism `{n}` has no inverse")))?;
                lookup(&mor, m, "morphism")
            })
            .collect::<Result<Vec<_>>>()?;
        let mut composition = HashMap::new();
        for [f, g, h] in &self.composition {
            let key = (lookup(&mor, f, "morphism")?, lookup(&mor, g, "morphism")?);
            if composition.insert(key, lookup(&mor, h, "morphism")?).is_some() {
                return Err(Error::InvalidGroupoid(format!("composite of `{f}` then `{g}` listed twice")));
            }
        }
        for (&(a, b), _) in &composition {
            if target[a] != source[b] {
                return Err(Error::InvalidGroupoid(format!("`{}` then `{}` is not composable", names[a], names[b])));
            }
        }
        for a in 0..names.len() {
            for b in 0..names.len() {
                if target[a] == source[b] && !composition.contains_key(&(a, b)) {
                    return Err(Error::InvalidGroupoid(format!("missing composite of `{}` then `{}`", names[a], names[b])));
                }
            }
        }
        let raw = RawGroupoid { objects: self.objects.clone(), morphisms: names, source, target, identity, inverse, composition };
        FiniteGroupoid::from_raw(raw)
    }

    pub fn from_groupoid(g: &FiniteGroupoid) -> Self {
        let obj = |i: usize| g.objects.label(i).to_string();
        let mor = |i: usize| g.morphisms.label(i).to_string();
        let mut composition: Vec<[String; 3]> =
            g.composition.iter().map(|(&(a, b), &c)| [mor(a), mor(b), mor(c)]).collect();
        composition.sort();
        GroupoidFile {
            objects: (0..g.n_objects()).map(obj).collect(),
            morphisms: (0..g.n_morphisms())
                .map(|m| MorphismEntry { name: mor(m), source: obj(g.source[m]), target: obj(g.target[m]) })
                .collect(),
            identities: (0..g.n_objects()).map(|o| (obj(o), mor(g.identity[o]))).collect(),
            inverses: (0..g.n_morphisms()).map(|m| (mor(m), mor(g.inverse[m]))).collect(),
            composition,
        }
    }
}

/// A functor together with its endpoints.
pub struct LoadedFunctor {
    pub source: FiniteGroupoid,
    pub target: FiniteGroupoid,
    pub functor: GroupoidFunctor,
}

impl FunctorFile {
    pub fn build(&self) -> Result<LoadedFunctor> {
        let source = self.source.build()?;
        let target = self.target.build()?;
        let on = |from: &FiniteSet, to: &FiniteSet, table: &BTreeMap<String, String>, what: &str| -> Result<Vec<usize>> {
            (0..from.len())
                .map(|i| {
                    let l = from.label(i);
                    let img = table.get(l).ok_or_else(|| Error::InvalidFunctor(format!("{what} `{l}` has no image")))?;
                    to.index_or_err(img)
                })
                .collect()
        };
        for (l, _) in &self.objects {
            source.objects.index_or_err(l)?;
        }
        for (l, _) in &self.morphisms {
            source.morphisms.index_or_err(l)?;
        }
        let functor = GroupoidFunctor {
            f0: on(&source.objects, &target.objects, &self.objects, "object")?,
            f1: on(&source.morphisms, &target.morphisms, &self.morphisms, "morphism")?,
        };
        Ok(LoadedFunctor { source, target, functor })
    }

    pub fn from_functor(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Self {
        FunctorFile {
            source: GroupoidFile::from_groupoid(src),
            target: GroupoidFile::from_groupoid(dst),
            objects: (0..src.n_objects())
                .map(|o| (src.objects.label(o).to_string(), dst.objects.label(f.f0[o]).to_string()))
                .collect(),
            morphisms: (0..src.n_morphisms())
                .map(|m| (src.morphisms.label(m).to_string(), dst.morphisms.label(f.f1[m]).to_string()))
                .collect(),
        }
    }
}

impl CoverFile {
    pub fn build(&self) -> Result<Cover> {
        let base = FiniteSet::new(self.base.clone())?;
        let total = FiniteSet::new(self.total.clone())?;
        let pairs: Vec<(String, String)> = self.map.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
        let map = SetMap::from_pairs(total.clone(), base, &pairs)?;
        let pieces = match &self.pieces {
            None => None,
            Some(p) => Some(
                (0..total.len())
                    .map(|i| {
                        p.get(total.label(i))
                            .copied()
                            .ok_or_else(|| Error::InvalidCover(format!("`{}` has no piece", total.label(i))))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Cover::new(map, self.class, pieces)
    }

    pub fn from_cover(c: &Cover) -> Self {
        let (y, m) = (c.total(), c.base());
        CoverFile {
            base: m.labels().to_vec(),
            total: y.labels().to_vec(),
            map: (0..y.len()).map(|i| (y.label(i).to_string(), m.label(c.map.apply(i)).to_string())).collect(),
            class: c.class,
            pieces: c.pieces.as_ref().map(|p| (0..y.len()).map(|i| (y.label(i).to_string(), p[i])).collect()),
        }
    }
}

impl SurfaceFile {
    pub fn build(&self) -> Result<TriangulatedSurface> {
        let vertices = FiniteSet::new(self.vertices.clone())?;
        let faces = self
            .faces
            .iter()
            .map(|f| -> Result<[usize; 3]> {
                Ok([vertices.index_or_err(&f[0])?, vertices.index_or_err(&f[1])?, vertices.index_or_err(&f[2])?])
            })
            .collect::<Result<Vec<_>>>()?;
        TriangulatedSurface::new(vertices, faces)
    }

    pub fn from_surface(s: &TriangulatedSurface) -> Self {
        let l = |v: usize| s.vertices.label(v).to_string();
        SurfaceFile { vertices: s.vertices.labels().to_vec(), faces: s.faces.iter().map(|f| f.map(l)).collect() }
    }
}

fn rationals(v: &[RationalEntry]) -> Result<Vec<Q>> {
    v.iter().map(RationalEntry::value).collect()
}

impl FormFile {
    pub fn build(&self, surface: TriangulatedSurface) -> Result<DiscreteTwoForm> {
        DiscreteTwoForm::new(surface, rationals(&self.values)?)
    }

    pub fn from_values(values: &[Q]) -> Self {
        FormFile { values: values.iter().map(|&q| q.into()).collect() }
    }
}

impl OrientifoldFile {
    pub fn build(&self) -> Result<OrientifoldData> {
        let surface = self.surface.build()?;
        let index = surface.edge_index();
        let mut kappa = vec![false; index.len()];
        for [a, b] in &self.kappa {
            let (a, b) = (surface.vertices.index_or_err(a)?, surface.vertices.index_or_err(b)?);
            let e = Edge { a: a.min(b), b: a.max(b) };
            let i = *index.get(&e).ok_or_else(|| Error::UnknownLabel(format!("edge {a}-{b}")))?;
            kappa[i] = !kappa[i];
        }
        OrientifoldData::new(surface, &rationals(&self.values)?, kappa)
    }
}
