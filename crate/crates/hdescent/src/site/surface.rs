use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::FiniteSet;
use crate::error::{Error, Result};

/// Unordered edge `a < b` given by vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

/// A 2-dimensional simplicial complex; each face stores a cyclic vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulatedSurface {
    pub vertices: FiniteSet,
    pub faces: Vec<[usize; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    pub closed: bool,
    pub orientable: bool,
    pub components: usize,
    pub defects: Vec<String>,
}

impl TriangulatedSurface {
    pub fn new(vertices: FiniteSet, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for f in &faces {
            if f.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidSurface(format!("face {f:?} uses an unknown vertex")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidSurface(format!("face {f:?} is degenerate")));
            }
            let mut key = *f;
            key.sort();
            if !seen.insert(key) {
                return Err(Error::InvalidSurface(format!("face {f:?} appears twice")));
            }
        }
        Ok(TriangulatedSurface { vertices, faces })
    }

    fn from_raw(n: usize, faces: Vec<[usize; 3]>) -> Self {
        TriangulatedSurface::new(FiniteSet::numbered("v", n), faces).expect("built-in triangulation")
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut set = BTreeSet::new();
        for f in &self.faces {
            for k in 0..3 {
                set.insert(edge_of(f[k], f[(k + 1) % 3]));
            }
        }
        set.into_iter().collect()
    }

    pub fn edge_index(&self) -> BTreeMap<Edge, usize> {
        self.edges().into_iter().enumerate().map(|(i, e)| (e, i)).collect()
    }

    /// Edges of a face with sign `+1` when the face runs `a → b`.
    pub fn face_edges(&self, f: usize) -> [(Edge, i64); 3] {
        let t = self.faces[f];
        let mk = |u: usize, v: usize| (edge_of(u, v), if u < v { 1 } else { -1 });
        [mk(t[0], t[1]), mk(t[1], t[2]), mk(t[2], t[0])]
    }

    /// Faces incident to each edge.
    pub fn edge_faces(&self) -> BTreeMap<Edge, Vec<usize>> {
        let mut out: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
        for f in 0..self.faces.len() {
            for (e, _) in self.face_edges(f) {
                out.entry(e).or_default().push(f);
            }
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.faces.len() as i64
    }

    /// Reversed copy of face `f`'s cyclic order.
    pub fn flipped(&self, flips: &[bool]) -> TriangulatedSurface {
        let faces = self
            .faces
            .iter()
            .zip(flips)
            .map(|(f, &fl)| if fl { [f[0], f[2], f[1]] } else { *f })
            .collect();
        TriangulatedSurface { vertices: self.vertices.clone(), faces }
    }

    /// Whether the two faces sharing an edge induce opposite orientations on it.
    pub fn compatible_across(&self, f: usize, g: usize, e: Edge) -> bool {
        let sf = self.face_edges(f).iter().find(|x| x.0 == e).map(|x| x.1);
        let sg = self.face_edges(g).iter().find(|x| x.0 == e).map(|x| x.1);
        matches!((sf, sg), (Some(a), Some(b)) if a == -b)
    }

    /// Face flips that make the orientation consistent, if one exists.
    pub fn consistent_orientation(&self) -> Option<Vec<bool>> {
        let ef = self.edge_faces();
        let mut adj: Vec<Vec<(usize, Edge)>> = vec![Vec::new(); self.faces.len()];
        for (e, fs) in &ef {
            if fs.len() == 2 {
                adj[fs[0]].push((fs[1], *e));
                adj[fs[1]].push((fs[0], *e));
            }
        }
        let mut flip: Vec<Option<bool>> = vec![None; self.faces.len()];
        for start in 0..self.faces.len() {
            if flip[start].is_some() {
                continue;
            }
            flip[start] = Some(false);
            let mut stack = vec![start];
            while let Some(f) = stack.pop() {
                for &(g, e) in &adj[f] {
                    let same = self.compatible_across(f, g, e);
                    let want = if same { flip[f].unwrap() } else { !flip[f].unwrap() };
                    match flip[g] {
                        None => {
                            flip[g] = Some(want);
                            stack.push(g);
                        }
                        Some(x) if x != want => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(flip.into_iter().map(|x| x.unwrap()).collect())
    }

    /// Connected components of the face adjacency graph (through edges).
    pub fn face_components(&self) -> Vec<usize> {
        let ef = self.edge_faces();
        let mut comp = vec![usize::MAX; self.faces.len()];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.faces.len()];
        for fs in ef.values() {
            for &a in fs {
                for &b in fs {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        let mut next = 0;
        for s in 0..self.faces.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(f) = stack.pop() {
                for &g in &adj[f] {
                    if comp[g] == usize::MAX {
                        comp[g] = next;
                        stack.push(g);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn validate(&self) -> SurfaceReport {
        let mut defects = Vec::new();
        for (e, fs) in self.edge_faces() {
            if fs.len() != 2 {
                defects.push(format!(
                    "edge {}-{} lies in {} face(s)",
                    self.vertices.label(e.a),
                    self.vertices.label(e.b),
                    fs.len()
                ));
            }
        }
        let closed = defects.is_empty();
        for v in 0..self.vertices.len() {
            let link: Vec<Edge> = self
                .faces
                .iter()
                .filter(|f| f.contains(&v))
                .map(|f| {
                    let o: Vec<usize> = f.iter().copied().filter(|&u| u != v).collect();
                    edge_of(o[0], o[1])
                })
                .collect();
            if link.is_empty() {
                defects.push(format!("vertex {} is isolated", self.vertices.label(v)));
            } else if !is_single_cycle(&link) {
                defects.push(format!("link of vertex {} is not a single cycle", self.vertices.label(v)));
            }
        }
        let orientable = self.consistent_orientation().is_some();
        let comps = self.face_components();
        SurfaceReport {
            vertices: self.vertices.len(),
            edges: self.edges().len(),
            faces: self.faces.len(),
            euler: self.euler_characteristic(),
            closed,
            orientable,
            components: comps.iter().copied().max().map_or(0, |m| m + 1),
            defects,
        }
    }

    pub fn is_closed_surface(&self) -> bool {
        self.validate().defects.is_empty()
    }

    /// Splits face `f` into three faces around a new centre vertex;
    /// the new faces replace `f` and are appended as `f, len, len+1`.
    pub fn subdivide(&self, f: usize) -> TriangulatedSurface {
        let c = self.vertices.len();
        let mut labels = self.vertices.labels().to_vec();
        labels.push(format!("~c{f}"));
        let [a, b, d] = self.faces[f];
        let mut faces = self.faces.clone();
        faces[f] = [a, b, c];
        faces.push([b, d, c]);
        faces.push([d, a, c]);
        let vertices = FiniteSet::new(labels.clone()).expect("fresh centre label");
        let remap: Vec<usize> = labels.iter().map(|l| vertices.index(l).unwrap()).collect();
        let faces = faces.into_iter().map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]]).collect();
        TriangulatedSurface { vertices, faces }
    }

    pub fn tetrahedron() -> Self {
        Self::from_raw(4, vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]])
    }

    pub fn single_triangle() -> Self {
        Self::from_raw(3, vec![[0, 1, 2]])
    }

    /// Seven-vertex torus with 14 faces.
    pub fn torus7() -> Self {
        let mut faces = Vec::new();
        for i in 0..7 {
            faces.push([i, (i + 1) % 7, (i + 3) % 7]);
            faces.push([i, (i + 3) % 7, (i + 2) % 7]);
        }
        Self::from_raw(7, faces)
    }

    /// Six-vertex projective plane (10 faces, 15 edges).
    pub fn rp2() -> Self {
        Self::from_raw(
            6,
            vec![
                [0, 1, 2],
                [0, 2, 3],
                [0, 3, 4],
                [0, 4, 5],
                [0, 5, 1],
                [1, 2, 4],
                [2, 3, 5],
                [3, 4, 1],
                [4, 5, 2],
                [5, 1, 3],
            ],
        )
    }

    /// Square grid with the top and bottom sides glued straight; the left and right sides are
    /// glued straight (torus) or with a reflection (Klein bottle).
    pub fn grid(n: usize, m: usize, twisted: bool) -> Self {
        let vid = |i: usize, j: usize| -> usize {
            let (i, j) = if i == n { (0, if twisted { (m - j % m) % m } else { j % m }) } else { (i, j % m) };
            i * m + j
        };
        let mut faces = Vec::new();
        for i in 0..n {
            for j in 0..m {
                faces.push([vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)]);
                faces.push([vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)]);
            }
        }
        Self::from_raw(n * m, faces)
    }

    pub fn torus_grid() -> Self {
        Self::grid(3, 3, false)
    }

    pub fn klein_bottle() -> Self {
        Self::grid(3, 4, true)
    }
}

fn edge_of(u: usize, v: usize) -> Edge {
    Edge { a: u.min(v), b: u.max(v) }
}

fn is_single_cycle(edges: &[Edge]) -> bool {
    let mut deg: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in edges {
        deg.entry(e.a).or_default().push(e.b);
        deg.entry(e.b).or_default().push(e.a);
    }
    if deg.values().any(|n| n.len() != 2) {
        return false;
    }
    let start = *deg.keys().next().unwrap();
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &deg[&v] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == deg.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tetrahedron_sphere() {
        let r = TriangulatedSurface::tetrahedron().validate();
        assert_eq!((r.vertices, r.edges, r.faces, r.euler), (4, 6, 4, 2));
        assert!(r.closed && r.orientable && r.defects.is_empty());
    }

    #[test]
    fn projective_plane() {
        let r = TriangulatedSurface::rp2().validate();
        assert_eq!((r.vertices, r.edges, r.faces, r.euler), (6, 15, 10, 1));
        assert!(r.closed && !r.orientable && r.defects.is_empty());
    }

    #[test]
    fn tori_and_klein_bottle() {
        for s in [TriangulatedSurface::torus7(), TriangulatedSurface::torus_grid()] {
            let r = s.validate();
            assert!(r.defects.is_empty(), "{:?}", r.defects);
            assert!(r.orientable && r.euler == 0 && r.faces >= 14);
        }
        let k = TriangulatedSurface::klein_bottle().validate();
        assert!(k.defects.is_empty(), "{:?}", k.defects);
        assert!(!k.orientable && k.euler == 0);
    }

    #[test]
    fn lone_triangle_not_closed() {
        let r = TriangulatedSurface::single_triangle().validate();
        assert!(!r.closed);
        assert!(r.defects.iter().any(|d| d.contains("lies in 1 face")));
    }

    #[test]
    fn subdivision_keeps_euler() {
        let s = TriangulatedSurface::tetrahedron().subdivide(2);
        let r = s.validate();
        assert!(r.defects.is_empty());
        assert_eq!((r.faces, r.euler), (6, 2));
    }
}
