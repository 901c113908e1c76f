//! Finite base category: labelled finite sets, total maps, covers,
//! fiber products, Čech nerves of covers and triangulated surfaces.

mod surface;

pub use surface::{Edge, SurfaceReport, TriangulatedSurface};

use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplicial::SimplicialSet;

/// A finite set of distinct string labels kept in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct FiniteSet {
    elems: Vec<String>,
}

impl TryFrom<Vec<String>> for FiniteSet {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        FiniteSet::new(v)
    }
}

impl From<FiniteSet> for Vec<String> {
    fn from(s: FiniteSet) -> Self {
        s.elems
    }
}

impl FiniteSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut elems: Vec<String> = labels.into_iter().map(Into::into).collect();
        elems.sort();
        if let Some(w) = elems.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLabel(w[0].clone()));
        }
        Ok(FiniteSet { elems })
    }

    pub fn empty() -> Self {
        FiniteSet { elems: Vec::new() }
    }

    /// `n` labels `prefix0..`, zero padded so that sorting keeps numeric order.
    pub fn numbered(prefix: &str, n: usize) -> Self {
        let width = n.saturating_sub(1).to_string().len();
        FiniteSet { elems: (0..n).map(|i| format!("{prefix}{i:0width$}")).collect() }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.elems[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.elems
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.elems.binary_search_by(|e| e.as_str().cmp(label)).ok()
    }

    pub fn index_or_err(&self, label: &str) -> Result<usize> {
        self.index(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Cartesian product with labels `(a,b)`.
    pub fn product(&self, other: &FiniteSet) -> (FiniteSet, Vec<(usize, usize)>) {
        let pairs: Vec<(usize, usize)> = (0..self.len()).cartesian_product(0..other.len()).collect();
        labelled_pairs(self, other, pairs)
    }

    /// Disjoint union with labels `0:a` and `1:b`.
    pub fn disjoint_union(&self, other: &FiniteSet) -> FiniteSet {
        let labels = self
            .elems
            .iter()
            .map(|a| format!("0:{a}"))
            .chain(other.elems.iter().map(|b| format!("1:{b}")));
        FiniteSet::new(labels).expect("tagged labels are distinct")
    }
}

fn labelled_pairs(a: &FiniteSet, b: &FiniteSet, pairs: Vec<(usize, usize)>) -> (FiniteSet, Vec<(usize, usize)>) {
    let mut tagged: Vec<(String, (usize, usize))> =
        pairs.into_iter().map(|(x, y)| (format!("({},{})", a.label(x), b.label(y)), (x, y))).collect();
    tagged.sort();
    let pairs = tagged.iter().map(|t| t.1).collect();
    (FiniteSet { elems: tagged.into_iter().map(|t| t.0).collect() }, pairs)
}

/// A total map between finite sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SetMap {
    pub domain: FiniteSet,
    pub codomain: FiniteSet,
    images: Vec<usize>,
}

impl SetMap {
    pub fn new(domain: FiniteSet, codomain: FiniteSet, images: Vec<usize>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::InvalidMap(format!("{} images for {} elements", images.len(), domain.len())));
        }
        if let Some(&bad) = images.iter().find(|&&i| i >= codomain.len()) {
            return Err(Error::InvalidMap(format!("image index {bad} outside codomain")));
        }
        Ok(SetMap { domain, codomain, images })
    }

    pub fn from_pairs(domain: FiniteSet, codomain: FiniteSet, pairs: &[(String, String)]) -> Result<Self> {
        let mut images = vec![usize::MAX; domain.len()];
        for (a, b) in pairs {
            let i = domain.index_or_err(a)?;
            let j = codomain.index_or_err(b)?;
            if images[i] != usize::MAX && images[i] != j {
                return Err(Error::InvalidMap(format!("`{a}` assigned twice")));
            }
            images[i] = j;
        }
        if let Some(i) = images.iter().position(|&j| j == usize::MAX) {
            return Err(Error::InvalidMap(format!("`{}` has no image", domain.label(i))));
        }
        SetMap::new(domain, codomain, images)
    }

    pub fn identity(set: &FiniteSet) -> Self {
        SetMap { domain: set.clone(), codomain: set.clone(), images: (0..set.len()).collect() }
    }

    pub fn constant(domain: &FiniteSet, codomain: &FiniteSet, target: usize) -> Self {
        SetMap { domain: domain.clone(), codomain: codomain.clone(), images: vec![target; domain.len()] }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self` followed by `g`, i.e. `g ∘ self`.
    pub fn then(&self, g: &SetMap) -> Result<SetMap> {
        if self.codomain != g.domain {
            return Err(Error::InvalidMap("composition of non-matching maps".into()));
        }
        Ok(SetMap {
            domain: self.domain.clone(),
            codomain: g.codomain.clone(),
            images: self.images.iter().map(|&i| g.images[i]).collect(),
        })
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain.len()];
        self.images.iter().for_each(|&i| hit[i] = true);
        hit.into_iter().all(|h| h)
    }

    pub fn is_injective(&self) -> bool {
        self.images.iter().all_unique()
    }

    /// Fibers indexed by codomain element.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.codomain.len()];
        for (i, &j) in self.images.iter().enumerate() {
            out[j].push(i);
        }
        out
    }

    /// First element of each fiber; `None` unless surjective.
    pub fn first_section(&self) -> Option<Vec<usize>> {
        self.fibers().into_iter().map(|f| f.first().copied()).collect()
    }
}

/// The two families of covering maps on the finite site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverClass {
    /// Disjoint unions of subsets, each mapped injectively.
    Split,
    /// Arbitrary surjections.
    Surjection,
}

impl std::str::FromStr for CoverClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split" => Ok(CoverClass::Split),
            "surjection" => Ok(CoverClass::Surjection),
            other => Err(Error::Parse(format!("unknown cover class `{other}`"))),
        }
    }
}

/// A covering surjection `π: Y → M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cover {
    pub map: SetMap,
    pub class: CoverClass,
    /// Piece index of each element of `Y`; required for split covers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<usize>>,
}

impl Cover {
    pub fn new(map: SetMap, class: CoverClass, pieces: Option<Vec<usize>>) -> Result<Self> {
        if !map.is_surjective() {
            return Err(Error::InvalidCover("projection is not surjective".into()));
        }
        if let Some(p) = &pieces {
            if p.len() != map.domain.len() {
                return Err(Error::InvalidCover("piece table has wrong length".into()));
            }
        }
        if class == CoverClass::Split {
            let p = pieces.as_ref().ok_or_else(|| Error::InvalidCover("split cover without pieces".into()))?;
            let mut seen = HashMap::new();
            for (y, (&piece, &m)) in p.iter().zip(map.images()).enumerate() {
                if let Some(prev) = seen.insert((piece, m), y) {
                    return Err(Error::InvalidCover(format!(
                        "piece {piece} is not injective: `{}` and `{}` both lie over `{}`",
                        map.domain.label(prev),
                        map.domain.label(y),
                        map.codomain.label(m)
                    )));
                }
            }
        }
        Ok(Cover { map, class, pieces })
    }

    pub fn identity(base: &FiniteSet) -> Self {
        Cover { map: SetMap::identity(base), class: CoverClass::Split, pieces: Some(vec![0; base.len()]) }
    }

    /// Cover with `sizes[m]` copies of each base point, labelled `m.i`;
    /// copy `i` of every point forms piece `i`.
    pub fn from_fibers(base: &FiniteSet, sizes: &[usize], class: CoverClass) -> Result<Self> {
        if sizes.len() != base.len() {
            return Err(Error::InvalidCover("one fiber size per base point expected".into()));
        }
        let width = sizes.iter().copied().max().unwrap_or(1).saturating_sub(1).to_string().len();
        let mut tagged = Vec::new();
        for (m, &k) in sizes.iter().enumerate() {
            for i in 0..k {
                tagged.push((format!("{}.{i:0width$}", base.label(m)), m, i));
            }
        }
        tagged.sort();
        let total = FiniteSet::new(tagged.iter().map(|t| t.0.clone()))?;
        let map = SetMap::new(total, base.clone(), tagged.iter().map(|t| t.1).collect())?;
        Cover::new(map, class, Some(tagged.iter().map(|t| t.2).collect()))
    }

    /// Split cover by a family of subsets of the base, labelled `u<piece>.<m>`.
    pub fn from_subsets(base: &FiniteSet, subsets: &[Vec<usize>]) -> Result<Self> {
        let width = subsets.len().saturating_sub(1).to_string().len();
        let mut tagged = Vec::new();
        for (p, sub) in subsets.iter().enumerate() {
            for &m in sub.iter().unique() {
                tagged.push((format!("u{p:0width$}.{}", base.label(m)), m, p));
            }
        }
        tagged.sort();
        let total = FiniteSet::new(tagged.iter().map(|t| t.0.clone()))?;
        let map = SetMap::new(total, base.clone(), tagged.iter().map(|t| t.1).collect())?;
        Cover::new(map, CoverClass::Split, Some(tagged.iter().map(|t| t.2).collect()))
    }

    pub fn total(&self) -> &FiniteSet {
        &self.map.domain
    }

    pub fn base(&self) -> &FiniteSet {
        &self.map.codomain
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        self.map.fibers().iter().map(Vec::len).collect()
    }

    /// The same surjection regarded as a member of the surjection class.
    pub fn as_surjection(&self) -> Cover {
        Cover { class: CoverClass::Surjection, ..self.clone() }
    }

    /// Composite cover `Z → Y → M` for a cover `d: Z → Y` of the total space.
    pub fn compose(&self, d: &Cover) -> Result<Cover> {
        if d.base() != self.total() {
            return Err(Error::BaseMismatch("inner cover must cover the total space".into()));
        }
        let map = d.map.then(&self.map)?;
        match (self.class, d.class, &self.pieces, &d.pieces) {
            (CoverClass::Split, CoverClass::Split, Some(po), Some(pi)) => {
                let combos: Vec<(usize, usize)> =
                    (0..map.domain.len()).map(|z| (pi[z], po[d.map.apply(z)])).collect();
                let ids: Vec<(usize, usize)> = combos.iter().copied().unique().sorted().collect();
                let pieces = combos.iter().map(|c| ids.binary_search(c).unwrap()).collect();
                Cover::new(map, CoverClass::Split, Some(pieces))
            }
            _ => Cover::new(map, CoverClass::Surjection, None),
        }
    }

    /// Pullback `N ×_M Y → N` along `f: N → M`.
    pub fn pullback(&self, f: &SetMap) -> Result<Cover> {
        let fp = fiber_product(f, &self.map)?;
        let pieces = self.pieces.as_ref().map(|p| fp.pairs.iter().map(|&(_, y)| p[y]).collect());
        Cover::new(fp.p1, self.class, pieces)
    }
}

/// Result of a fiber product `A ×_C B` together with its projections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberProduct {
    pub set: FiniteSet,
    pub pairs: Vec<(usize, usize)>,
    pub p1: SetMap,
    pub p2: SetMap,
}

/// `{(a,b) | f(a) = g(b)}` with canonical label order.
pub fn fiber_product(f: &SetMap, g: &SetMap) -> Result<FiberProduct> {
    if f.codomain != g.codomain {
        return Err(Error::IncompatibleCospan(
            format!("{:?}", f.codomain.labels()),
            format!("{:?}", g.codomain.labels()),
        ));
    }
    let gf = g.fibers();
    let pairs: Vec<(usize, usize)> =
        (0..f.domain.len()).flat_map(|a| gf[f.apply(a)].iter().map(move |&b| (a, b))).collect();
    let (set, pairs) = labelled_pairs(&f.domain, &g.domain, pairs);
    let p1 = SetMap::new(set.clone(), f.domain.clone(), pairs.iter().map(|p| p.0).collect())?;
    let p2 = SetMap::new(set.clone(), g.domain.clone(), pairs.iter().map(|p| p.1).collect())?;
    Ok(FiberProduct { set, pairs, p1, p2 })
}

/// Čech nerve `Y^[1] ⇇ Y^[2] … Y^[n]` of a cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverNerve {
    pub cover: Cover,
    /// `tuples[k]` lists the `(k+1)`-tuples of level `k`.
    pub tuples: Vec<Vec<Vec<usize>>>,
    pub simplicial: SimplicialSet,
}

impl CoverNerve {
    /// `Y^[n]` as a labelled finite set, `1 ≤ n ≤ max_level`.
    pub fn level_set(&self, n: usize) -> FiniteSet {
        FiniteSet::new(self.simplicial.names[n - 1].clone()).expect("tuple labels are distinct")
    }

    /// Face map `∂_i: Y^[n] → Y^[n-1]` as a labelled map.
    pub fn face_map(&self, n: usize, i: usize) -> SetMap {
        let src = self.level_set(n);
        let dst = self.level_set(n - 1);
        let pairs: Vec<(String, String)> = (0..self.tuples[n - 1].len())
            .map(|x| {
                let y = self.simplicial.faces[n - 1][i][x];
                (self.simplicial.names[n - 1][x].clone(), self.simplicial.names[n - 2][y].clone())
            })
            .collect();
        SetMap::from_pairs(src, dst, &pairs).expect("face maps are total")
    }
}

pub(crate) fn tuple_name(labels: &[String], t: &[usize]) -> String {
    if t.len() == 1 {
        labels[t[0]].clone()
    } else {
        format!("({})", t.iter().map(|&i| labels[i].as_str()).join(","))
    }
}

/// Nerve of the equivalence relation "same image" on `Y`, up to `Y^[max_level]`.
pub fn cover_nerve(c: &Cover, max_level: usize) -> Result<CoverNerve> {
    if !(1..=4).contains(&max_level) {
        return Err(Error::Precondition("cover nerves are computed for levels 1..=4".into()));
    }
    let fibers = c.map.fibers();
    let labels = c.total().labels().to_vec();
    let mut tuples: Vec<Vec<Vec<usize>>> = Vec::new();
    for k in 0..max_level {
        let mut level: Vec<Vec<usize>> = Vec::new();
        for fib in &fibers {
            for t in (0..=k).map(|_| fib.iter().copied()).multi_cartesian_product() {
                level.push(t);
            }
        }
        if k == 0 {
            level = (0..labels.len()).map(|y| vec![y]).collect();
        }
        level.sort();
        tuples.push(level);
    }
    let simplicial = tuple_simplicial(&tuples, &labels);
    Ok(CoverNerve { cover: c.clone(), tuples, simplicial })
}

/// Simplicial set whose level `k` consists of `(k+1)`-tuples, faces omit and degeneracies repeat entries.
pub(crate) fn tuple_simplicial(tuples: &[Vec<Vec<usize>>], labels: &[String]) -> SimplicialSet {
    let index: Vec<HashMap<&[usize], usize>> =
        tuples.iter().map(|lvl| lvl.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect()).collect();
    let names = tuples.iter().map(|lvl| lvl.iter().map(|t| tuple_name(labels, t)).collect()).collect();
    let mut faces = vec![Vec::new()];
    for k in 1..tuples.len() {
        let per_i = (0..=k)
            .map(|i| {
                tuples[k]
                    .iter()
                    .map(|t| {
                        let mut u = t.clone();
                        u.remove(i);
                        index[k - 1][u.as_slice()]
                    })
                    .collect()
            })
            .collect();
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for k in 0..tuples.len().saturating_sub(1) {
        let per_i = (0..=k)
            .map(|i| {
                tuples[k]
                    .iter()
                    .map(|t| {
                        let mut u = t.clone();
                        u.insert(i, t[i]);
                        index[k + 1][u.as_slice()]
                    })
                    .collect()
            })
            .collect();
        degens.push(per_i);
    }
    SimplicialSet { names, faces, degens }
}

/// Common refinement `Z = Y ×_M Y′` with its maps to both covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonRefinement {
    pub cover: Cover,
    pub to_first: SetMap,
    pub to_second: SetMap,
}

pub fn canonical_common_refinement(c: &Cover, d: &Cover) -> Result<CommonRefinement> {
    if c.base() != d.base() {
        return Err(Error::BaseMismatch("covers live over different bases".into()));
    }
    let fp = fiber_product(&c.map, &d.map)?;
    let map = fp.p1.then(&c.map)?;
    let cover = match (&c.pieces, &d.pieces, c.class, d.class) {
        (Some(pc), Some(pd), CoverClass::Split, CoverClass::Split) => {
            let combos: Vec<(usize, usize)> = fp.pairs.iter().map(|&(a, b)| (pc[a], pd[b])).collect();
            let ids: Vec<(usize, usize)> = combos.iter().copied().unique().sorted().collect();
            let pieces = combos.iter().map(|x| ids.binary_search(x).unwrap()).collect();
            Cover::new(map, CoverClass::Split, Some(pieces))?
        }
        _ => Cover::new(map, CoverClass::Surjection, None)?,
    };
    Ok(CommonRefinement { cover, to_first: fp.p1, to_second: fp.p2 })
}

/// Checks the three closure properties of a cover class on the given samples:
/// identities are covers, composites of covers are covers, pullbacks of covers are covers.
pub fn closure_report(samples: &[Cover], maps: &[SetMap]) -> Vec<String> {
    let mut out = Vec::new();
    for c in samples {
        if Cover::new(SetMap::identity(c.base()), CoverClass::Split, Some(vec![0; c.base().len()])).is_err() {
            out.push("identity is not a split cover".into());
        }
        for d in samples {
            if d.base() == c.total() {
                match c.compose(d) {
                    Ok(z) if z.class == c.class.max(d.class) => {}
                    Ok(_) => out.push("composite changed class".into()),
                    Err(e) => out.push(format!("composite failed: {e}")),
                }
            }
        }
        for f in maps {
            if f.codomain == *c.base() {
                if let Err(e) = c.pullback(f) {
                    out.push(format!("pullback failed: {e}"));
                }
            }
        }
    }
    out
}

/// All fiber-size vectors (each entry ≥ 1) over a base of size `n` with total at most `max_total`.
pub fn fiber_vectors(n: usize, max_total: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let rest = n - cur.len() - 1;
        for k in 1..=left.saturating_sub(rest) {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if max_total >= n {
        rec(n, max_total, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt() -> FiniteSet {
        FiniteSet::new(["*"]).unwrap()
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert_eq!(FiniteSet::new(["a", "b", "a"]), Err(Error::DuplicateLabel("a".into())));
    }

    #[test]
    fn fiber_product_of_two_to_one_cover() {
        let c = Cover::from_fibers(&pt(), &[2], CoverClass::Surjection).unwrap();
        let fp = fiber_product(&c.map, &c.map).unwrap();
        assert_eq!(fp.set.len(), 4);
        for (i, &(a, b)) in fp.pairs.iter().enumerate() {
            assert_eq!(fp.p1.apply(i), a);
            assert_eq!(fp.p2.apply(i), b);
        }
    }

    #[test]
    fn fiber_product_identity_cases() {
        let id = SetMap::identity(&pt());
        assert_eq!(fiber_product(&id, &id).unwrap().set.len(), 1);
        let m = FiniteSet::numbered("m", 3);
        let g = SetMap::new(FiniteSet::numbered("x", 5), m.clone(), vec![0, 0, 1, 2, 2]).unwrap();
        let fp = fiber_product(&SetMap::identity(&m), &g).unwrap();
        assert_eq!(fp.set.len(), 5);
        assert!(fp.p2.is_injective() && fp.p2.is_surjective());
    }

    #[test]
    fn fiber_product_rejects_mismatch() {
        let a = SetMap::identity(&pt());
        let b = SetMap::identity(&FiniteSet::numbered("q", 2));
        assert!(matches!(fiber_product(&a, &b), Err(Error::IncompatibleCospan(..))));
    }

    #[test]
    fn nerve_sizes() {
        let c = Cover::from_fibers(&pt(), &[2], CoverClass::Surjection).unwrap();
        let n = cover_nerve(&c, 4).unwrap();
        assert_eq!(n.level_set(2).len(), 4);
        assert_eq!(n.level_set(3).len(), 8);
        assert!(n.simplicial.identity_violations().is_empty());
        let m = FiniteSet::numbered("m", 2);
        let split = Cover::from_subsets(&m, &[vec![0], vec![1]]).unwrap();
        assert_eq!(cover_nerve(&split, 2).unwrap().level_set(2).len(), 2);
        let id = cover_nerve(&Cover::identity(&m), 4).unwrap();
        assert!((1..=4).all(|k| id.level_set(k).len() == 2));
    }

    #[test]
    fn face_maps_omit_entries() {
        let c = Cover::from_fibers(&pt(), &[2], CoverClass::Surjection).unwrap();
        let n = cover_nerve(&c, 3).unwrap();
        let d0 = n.face_map(3, 0);
        let src = n.level_set(3);
        let i = src.index("(*.0,*.1,*.1)").unwrap();
        assert_eq!(d0.codomain.label(d0.apply(i)), "(*.1,*.1)");
    }

    #[test]
    fn common_refinement_sizes() {
        let c = Cover::from_fibers(&pt(), &[2], CoverClass::Surjection).unwrap();
        assert_eq!(canonical_common_refinement(&c, &c).unwrap().cover.total().len(), 4);
        let id = Cover::identity(&pt());
        assert_eq!(canonical_common_refinement(&c, &id).unwrap().cover.total().len(), 2);
        assert_eq!(canonical_common_refinement(&id, &id).unwrap().cover.total().len(), 1);
    }

    #[test]
    fn split_witness() {
        let m = FiniteSet::numbered("m", 2);
        let y = FiniteSet::numbered("y", 3);
        let map = SetMap::new(y, m, vec![0, 0, 1]).unwrap();
        assert!(Cover::new(map.clone(), CoverClass::Split, Some(vec![0, 0, 1])).is_err());
        assert!(Cover::new(map.clone(), CoverClass::Surjection, None).is_ok());
        assert!(Cover::new(map, CoverClass::Split, Some(vec![0, 1, 0])).is_ok());
    }

    #[test]
    fn closure_properties() {
        let m = FiniteSet::numbered("m", 2);
        let c = Cover::from_fibers(&m, &[2, 1], CoverClass::Split).unwrap();
        let d = Cover::from_fibers(c.total(), &[1, 2, 1], CoverClass::Split).unwrap();
        let f = SetMap::new(FiniteSet::numbered("n", 3), m.clone(), vec![0, 1, 1]).unwrap();
        assert!(closure_report(&[c.clone(), d.clone()], &[f.clone()]).is_empty());
        assert!(closure_report(&[c.as_surjection(), d.as_surjection()], &[f]).is_empty());
        assert_eq!(c.compose(&d).unwrap().class, CoverClass::Split);
    }

    #[test]
    fn fiber_vector_enumeration() {
        assert_eq!(fiber_vectors(2, 3), vec![vec![1, 1], vec![1, 2], vec![2, 1]]);
        assert_eq!(fiber_vectors(0, 5), vec![Vec::<usize>::new()]);
    }
}
