//! Surface holonomy with exact rational exponents in `ℚ/ℤ`: two-forms and bundle
//! curvature on triangulated surfaces, gerbe local data over the face-indexed cover
//! with an exact trivialization solve, orientation double covers, orientifold
//! holonomy and the canonical section of a free `ℤ/2`-quotient.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::descent::explicit::{DescentMorphism, DescentObject, DescentSpace};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::groupoid::FiniteGroupoid;
use crate::prestacks::CyclicInstance;
use crate::site::{Edge, FiniteSet, TriangulatedSurface};

pub type Q = Rational64;

/// Representative of `q` in `[0, 1)`.
pub fn mod_one(q: Q) -> Q {
    q - q.floor()
}

pub fn is_integer(q: Q) -> bool {
    q.is_integer()
}

/// Rationals travel through JSON as strings such as `"1/8"` or `"-3"`.
mod qstr {
    use super::Q;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| q.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|v| match v {
                serde_json::Value::String(s) => s.trim().parse::<Q>().map_err(|e| D::Error::custom(format!("`{s}`: {e}"))),
                serde_json::Value::Number(n) => n.as_i64().map(Q::from_integer).ok_or_else(|| D::Error::custom(format!("{n} is not an integer"))),
                other => Err(D::Error::custom(format!("expected a rational, got {other}"))),
            })
            .collect()
    }

    pub mod one {
        use super::super::Q;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&q.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
            #[derive(Deserialize)]
            struct W(#[serde(with = "super")] Vec<Q>);
            let v = serde_json::Value::deserialize(d)?;
            let W(mut w) = serde_json::from_value(serde_json::Value::Array(vec![v])).map_err(serde::de::Error::custom)?;
            Ok(w.remove(0))
        }
    }
}

fn require_closed(s: &TriangulatedSurface) -> Result<()> {
    let r = s.validate();
    if !r.defects.is_empty() {
        return Err(Error::InvalidSurface(format!("not a closed surface: {}", r.defects.join("; "))));
    }
    Ok(())
}

/// Closed and with every face listed in one coherent orientation.
fn require_oriented(s: &TriangulatedSurface) -> Result<()> {
    require_closed(s)?;
    match s.consistent_orientation() {
        None => Err(Error::InvalidSurface("surface is not orientable".into())),
        Some(flips) if flips.iter().any(|&f| f) => Err(Error::InvalidSurface("faces are not coherently oriented".into())),
        Some(_) => Ok(()),
    }
}

/// One rational per face, the integral over the face in its listed orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteTwoForm {
    pub surface: TriangulatedSurface,
    #[serde(with = "qstr")]
    pub values: Vec<Q>,
}

impl DiscreteTwoForm {
    pub fn new(surface: TriangulatedSurface, values: Vec<Q>) -> Result<Self> {
        if values.len() != surface.faces.len() {
            return Err(Error::Precondition(format!("{} values for {} faces", values.len(), surface.faces.len())));
        }
        Ok(DiscreteTwoForm { surface, values })
    }

    pub fn zero(surface: TriangulatedSurface) -> Self {
        let n = surface.faces.len();
        DiscreteTwoForm { surface, values: vec![Q::zero(); n] }
    }

    pub fn total(&self) -> Q {
        self.values.iter().sum()
    }

    /// The same form on the surface with every face reversed.
    pub fn reversed(&self) -> Self {
        let flips = vec![true; self.values.len()];
        DiscreteTwoForm { surface: self.surface.flipped(&flips), values: self.values.iter().map(|v| -v).collect() }
    }

    /// Splits face `f` into three with the given share of its value on each piece.
    pub fn subdivided(&self, f: usize, parts: [Q; 3]) -> Result<Self> {
        if parts.iter().sum::<Q>() != self.values[f] {
            return Err(Error::Precondition("subdivision parts must add up to the face value".into()));
        }
        let mut values = self.values.clone();
        values[f] = parts[0];
        values.extend([parts[1], parts[2]]);
        Ok(DiscreteTwoForm { surface: self.surface.subdivide(f), values })
    }

    pub fn plus(&self, other: &DiscreteTwoForm) -> Result<Self> {
        if self.surface != other.surface {
            return Err(Error::BaseMismatch("forms live on different surfaces".into()));
        }
        Ok(DiscreteTwoForm { surface: self.surface.clone(), values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }
}

/// Exponent of `exp(2πi Σ_f ω_f)` in `[0, 1)`.
pub fn oriented_holonomy(w: &DiscreteTwoForm) -> Result<Q> {
    require_oriented(&w.surface)?;
    Ok(mod_one(w.total()))
}

/// Local connection of a line bundle: for every face, the integral along each of its three
/// sides `t[k] → t[k+1]` in the face's own direction. Sides of neighbouring faces are
/// related by transition functions, so only the total curvature is constrained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteBundleConnection {
    pub surface: TriangulatedSurface,
    pub sides: Vec<[Q; 3]>,
}

impl DiscreteBundleConnection {
    pub fn curvature(&self) -> Vec<Q> {
        self.sides.iter().map(|s| s.iter().sum()).collect()
    }

    pub fn total_curvature(&self) -> Q {
        self.curvature().iter().sum()
    }

    /// Chern integrality of the total curvature.
    pub fn check(&self) -> Result<()> {
        if self.sides.len() != self.surface.faces.len() {
            return Err(Error::Precondition("one triple of sides per face expected".into()));
        }
        let t = self.total_curvature();
        if !t.is_integer() {
            return Err(Error::Inconsistent(format!("total curvature {t} is not an integer, so this is not a bundle")));
        }
        Ok(())
    }
}

/// `ω + curv(L)`; the face sum moves by an integer.
pub fn shift_by_curvature(w: &DiscreteTwoForm, l: &DiscreteBundleConnection) -> Result<DiscreteTwoForm> {
    if w.surface != l.surface {
        return Err(Error::BaseMismatch("form and bundle live on different surfaces".into()));
    }
    l.check()?;
    let values = w.values.iter().zip(l.curvature()).map(|(a, b)| a + b).collect();
    Ok(DiscreteTwoForm { surface: w.surface.clone(), values })
}

/// Faces around `v` in the cyclic order induced by the face orientations:
/// after `[v, x, y]` comes the face running `v → y`.
pub fn fan(s: &TriangulatedSurface, v: usize) -> Vec<usize> {
    let rotated = |f: usize| -> Option<[usize; 3]> {
        let t = s.faces[f];
        (0..3).find(|&k| t[k] == v).map(|k| [t[k], t[(k + 1) % 3], t[(k + 2) % 3]])
    };
    let star: Vec<usize> = (0..s.faces.len()).filter(|&f| s.faces[f].contains(&v)).collect();
    let Some(&first) = star.first() else { return Vec::new() };
    let mut out = vec![first];
    loop {
        let y = rotated(*out.last().unwrap()).unwrap()[2];
        match star.iter().copied().find(|&g| rotated(g).unwrap()[1] == y) {
            Some(g) if g != first && !out.contains(&g) => out.push(g),
            _ => break,
        }
    }
    out
}

/// Value of the gerbe's transition section on a triple of faces around a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleValue {
    pub vertex: usize,
    /// Strictly increasing face indices.
    pub faces: [usize; 3],
    #[serde(with = "qstr::one")]
    pub value: Q,
}

/// Value of a trivialization's section on a pair of faces around a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairValue {
    pub vertex: usize,
    pub faces: [usize; 2],
    #[serde(with = "qstr::one")]
    pub value: Q,
}

/// Gerbe local data over the cover of a closed oriented surface by its faces:
/// a curving per face, the connection of the transition bundle across each edge
/// (integrated from the smaller to the larger vertex, from the face running that way
/// to the other one) and the transition section on triples of faces meeting at a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GerbeData {
    pub surface: TriangulatedSurface,
    #[serde(with = "qstr")]
    pub curving: Vec<Q>,
    #[serde(with = "qstr")]
    pub transition: Vec<Q>,
    /// Missing triples are zero.
    #[serde(default)]
    pub cocycle: Vec<TripleValue>,
}

/// Faces `(L, R)` of an edge `a < b`, `L` running `a → b`.
fn sides_of(s: &TriangulatedSurface) -> Vec<(Edge, usize, usize)> {
    s.edge_faces()
        .into_iter()
        .map(|(e, fs)| {
            let runs_up = |f: usize| s.face_edges(f).iter().any(|&(x, sg)| x == e && sg == 1);
            let (l, r) = if runs_up(fs[0]) { (fs[0], fs[1]) } else { (fs[1], fs[0]) };
            (e, l, r)
        })
        .collect()
}

fn perm_sign(v: &mut [usize]) -> i64 {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

/// Alternating cochains on the faces around each vertex.
#[derive(Clone, Debug, Default)]
struct VertexCochain<const N: usize> {
    map: HashMap<(usize, [usize; N]), Q>,
}

impl<const N: usize> VertexCochain<N> {
    fn get(&self, v: usize, faces: [usize; N]) -> Q {
        let mut f = faces;
        let sign = perm_sign(&mut f);
        if f.windows(2).any(|w| w[0] == w[1]) {
            return Q::zero();
        }
        self.map.get(&(v, f)).copied().unwrap_or_default() * sign
    }

    fn add(&mut self, v: usize, faces: [usize; N], q: Q) {
        let mut f = faces;
        let sign = perm_sign(&mut f);
        *self.map.entry((v, f)).or_default() += q * sign;
    }
}

fn combinations<const N: usize>(items: &[usize]) -> Vec<[usize; N]> {
    use itertools::Itertools;
    items.iter().copied().combinations(N).map(|c| c.try_into().unwrap()).collect()
}

fn sorted_star(s: &TriangulatedSurface, v: usize) -> Vec<usize> {
    let mut f = fan(s, v);
    f.sort_unstable();
    f
}

impl GerbeData {
    /// The trivial gerbe with curving `ω`.
    pub fn trivial(w: &DiscreteTwoForm) -> Self {
        GerbeData {
            surface: w.surface.clone(),
            curving: w.values.clone(),
            transition: vec![Q::zero(); w.surface.edges().len()],
            cocycle: Vec::new(),
        }
    }

    fn cochain(&self) -> VertexCochain<3> {
        let mut c = VertexCochain::default();
        for t in &self.cocycle {
            c.add(t.vertex, t.faces, t.value);
        }
        c
    }

    /// Shape checks and the cocycle identity `δg ∈ ℤ` on quadruples of faces at each vertex.
    pub fn violations(&self) -> Vec<String> {
        let s = &self.surface;
        let mut out = Vec::new();
        if let Err(e) = require_oriented(s) {
            return vec![e.to_string()];
        }
        if self.curving.len() != s.faces.len() {
            out.push(format!("{} curving values for {} faces", self.curving.len(), s.faces.len()));
        }
        if self.transition.len() != s.edges().len() {
            out.push(format!("{} transition values for {} edges", self.transition.len(), s.edges().len()));
        }
        for t in &self.cocycle {
            let ok = t.vertex < s.vertices.len()
                && t.faces.windows(2).all(|w| w[0] < w[1])
                && t.faces.iter().all(|&f| f < s.faces.len() && s.faces[f].contains(&t.vertex));
            if !ok {
                out.push(format!("cocycle entry at vertex {} on faces {:?} is not three increasing faces around it", t.vertex, t.faces));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let g = self.cochain();
        for v in 0..s.vertices.len() {
            for [a, b, c, d] in combinations::<4>(&sorted_star(s, v)) {
                let dg = g.get(v, [b, c, d]) - g.get(v, [a, c, d]) + g.get(v, [a, b, d]) - g.get(v, [a, b, c]);
                if !dg.is_integer() {
                    out.push(format!(
                        "cocycle identity fails at vertex {} on faces {:?}: g(bcd) - g(acd) + g(abd) - g(abc) = {dg}",
                        s.vertices.label(v),
                        [a, b, c, d]
                    ));
                }
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Inconsistent(v.join("; ")))
        }
    }

    /// Face, edge and vertex terms read off directly, without a trivialization.
    pub fn holonomy(&self) -> Result<Q> {
        self.check()?;
        let g = self.cochain();
        let mut total: Q = self.curving.iter().sum::<Q>() + self.transition.iter().sum::<Q>();
        for v in 0..self.surface.vertices.len() {
            let f = fan(&self.surface, v);
            for i in 1..f.len().saturating_sub(1) {
                total -= g.get(v, [f[0], f[i], f[i + 1]]);
            }
        }
        Ok(mod_one(total))
    }

    /// Tensors with the trivial gerbe presented by a per-face connection `λ` (one value per side,
    /// along the edge from its smaller vertex) and sections `ψ` on pairs of faces at vertices.
    pub fn twisted(&self, lambda: &[[Q; 3]], psi: &[PairValue]) -> GerbeData {
        let s = &self.surface;
        let mut out = self.clone();
        for f in 0..s.faces.len() {
            out.curving[f] += s.face_edges(f).iter().zip(&lambda[f]).map(|(&(_, sg), &l)| l * sg).sum::<Q>();
        }
        let mut p = VertexCochain::<2>::default();
        for x in psi {
            p.add(x.vertex, x.faces, x.value);
        }
        let idx = s.edge_index();
        let side = |f: usize, e: Edge| -> usize { s.face_edges(f).iter().position(|x| x.0 == e).unwrap() };
        for (e, l, r) in sides_of(s) {
            let i = idx[&e];
            out.transition[i] += lambda[r][side(r, e)] - lambda[l][side(l, e)] + p.get(e.b, [l, r]) - p.get(e.a, [l, r]);
        }
        let mut g = self.cochain();
        for v in 0..s.vertices.len() {
            for [x, y, z] in combinations::<3>(&sorted_star(s, v)) {
                g.add(v, [x, y, z], p.get(v, [y, z]) - p.get(v, [x, z]) + p.get(v, [x, y]));
            }
        }
        out.cocycle = collect_triples(&g);
        out
    }
}

fn collect_triples(g: &VertexCochain<3>) -> Vec<TripleValue> {
    let mut v: Vec<TripleValue> = g
        .map
        .iter()
        .filter(|(_, q)| !q.is_zero())
        .map(|(&(vertex, faces), &value)| TripleValue { vertex, faces, value })
        .collect();
    v.sort_by_key(|t| (t.vertex, t.faces));
    v
}

/// Column order used by the elimination, and which face anchors the integer lift at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveOrder {
    Forward,
    Reverse,
}

/// `T: G ≅ I_ω`: a connection on each face, sections on pairs of faces at vertices and
/// the integer slack absorbed by the vertex identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trivialization {
    pub omega: DiscreteTwoForm,
    /// Per face and side, integrated along the edge from its smaller vertex.
    pub connection: Vec<[Q; 3]>,
    pub sections: Vec<PairValue>,
    pub slack: Vec<TripleValue>,
}

impl Trivialization {
    /// Re-checks every defining equation exactly.
    pub fn violations(&self, g: &GerbeData) -> Vec<String> {
        let s = &g.surface;
        let mut out = Vec::new();
        for f in 0..s.faces.len() {
            let w = g.curving[f] + s.face_edges(f).iter().zip(&self.connection[f]).map(|(&(_, sg), &c)| c * sg).sum::<Q>();
            if w != self.omega.values[f] {
                out.push(format!("face {f}: curving plus curvature is {w}, not {}", self.omega.values[f]));
            }
        }
        let mut phi = VertexCochain::<2>::default();
        for p in &self.sections {
            phi.add(p.vertex, p.faces, p.value);
        }
        let idx = s.edge_index();
        let side = |f: usize, e: Edge| -> usize { s.face_edges(f).iter().position(|x| x.0 == e).unwrap() };
        for (e, l, r) in sides_of(s) {
            let lhs = g.transition[idx[&e]] + self.connection[r][side(r, e)] - self.connection[l][side(l, e)];
            let rhs = phi.get(e.b, [l, r]) - phi.get(e.a, [l, r]);
            if lhs != rhs {
                out.push(format!("edge {}-{}: connections differ by {lhs}, sections by {rhs}", e.a, e.b));
            }
        }
        let gc = g.cochain();
        let mut slack = VertexCochain::<3>::default();
        for t in &self.slack {
            if !t.value.is_integer() {
                out.push(format!("slack at vertex {} on {:?} is not an integer", t.vertex, t.faces));
            }
            slack.add(t.vertex, t.faces, t.value);
        }
        for v in 0..s.vertices.len() {
            for [x, y, z] in combinations::<3>(&sorted_star(s, v)) {
                let d = phi.get(v, [y, z]) - phi.get(v, [x, z]) + phi.get(v, [x, y]);
                if d + slack.get(v, [x, y, z]) != gc.get(v, [x, y, z]) {
                    out.push(format!("vertex {v} faces {:?}: section coboundary {d} misses the cocycle", [x, y, z]));
                }
            }
        }
        out
    }

    pub fn holonomy(&self) -> Q {
        mod_one(self.omega.total())
    }
}

/// Sparse rows over `ℚ` with Gauss-Jordan elimination in a prescribed column order;
/// free unknowns are set to zero.
struct RationalSystem {
    rows: Vec<BTreeMap<usize, BigRational>>,
    rhs: Vec<BigRational>,
    unknowns: usize,
}

fn big(q: Q) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

fn small(q: &BigRational) -> Result<Q> {
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Q::new(n, d)),
        _ => Err(Error::Unsupported(format!("rational {q} exceeds 64-bit range"))),
    }
}

impl RationalSystem {
    fn new(unknowns: usize) -> Self {
        RationalSystem { rows: Vec::new(), rhs: Vec::new(), unknowns }
    }

    fn push(&mut self, terms: &[(usize, i64)], rhs: Q) {
        let mut row: BTreeMap<usize, BigRational> = BTreeMap::new();
        for &(c, v) in terms {
            *row.entry(c).or_insert_with(BigRational::zero) += BigRational::from_integer(BigInt::from(v));
        }
        row.retain(|_, v| !v.is_zero());
        self.rows.push(row);
        self.rhs.push(big(rhs));
    }

    fn solve(mut self, order: &[usize]) -> Result<Vec<BigRational>> {
        let mut pivot_of_row: Vec<Option<usize>> = vec![None; self.rows.len()];
        let mut used = vec![false; self.rows.len()];
        for &col in order {
            let Some(r) = (0..self.rows.len()).find(|&r| !used[r] && self.rows[r].contains_key(&col)) else { continue };
            used[r] = true;
            pivot_of_row[r] = Some(col);
            let inv = self.rows[r][&col].recip();
            for v in self.rows[r].values_mut() {
                *v *= &inv;
            }
            self.rhs[r] *= &inv;
            let (prow, prhs) = (self.rows[r].clone(), self.rhs[r].clone());
            for o in 0..self.rows.len() {
                if o == r {
                    continue;
                }
                let Some(factor) = self.rows[o].get(&col).cloned() else { continue };
                for (c, v) in &prow {
                    let e = self.rows[o].entry(*c).or_insert_with(BigRational::zero);
                    *e -= &factor * v;
                    if e.is_zero() {
                        self.rows[o].remove(c);
                    }
                }
                let delta = &factor * &prhs;
                self.rhs[o] -= delta;
            }
        }
        let mut x = vec![BigRational::zero(); self.unknowns];
        for r in 0..self.rows.len() {
            match pivot_of_row[r] {
                Some(c) => x[c] = self.rhs[r].clone(),
                None if !self.rhs[r].is_zero() => {
                    return Err(Error::Inconsistent(format!("linear system has no solution (residual {})", self.rhs[r])))
                }
                None => {}
            }
        }
        Ok(x)
    }
}

/// Solves for a trivialization exactly: the integer part of `δg` is lifted to an integral
/// correction by the cone on one face at each vertex, then the remaining linear system is
/// eliminated over `ℚ` in the given column order.
pub fn trivialize(g: &GerbeData, order: SolveOrder) -> Result<Trivialization> {
    g.check()?;
    let s = &g.surface;
    let gc = g.cochain();
    let nf = s.faces.len();
    // unknowns: connections (3 per face), then sections on face pairs at vertices
    let mut pair_index: HashMap<(usize, [usize; 2]), usize> = HashMap::new();
    let stars: Vec<Vec<usize>> = (0..s.vertices.len()).map(|v| sorted_star(s, v)).collect();
    for (v, star) in stars.iter().enumerate() {
        for p in combinations::<2>(star) {
            let n = 3 * nf + pair_index.len();
            pair_index.insert((v, p), n);
        }
    }
    let unknowns = 3 * nf + pair_index.len();
    let pair = |v: usize, a: usize, b: usize| -> (usize, i64) {
        if a < b {
            (pair_index[&(v, [a, b])], 1)
        } else {
            (pair_index[&(v, [b, a])], -1)
        }
    };
    // integral lift: slack n with δn = δg, anchored at one face per vertex
    let mut slack = VertexCochain::<3>::default();
    for (v, star) in stars.iter().enumerate() {
        let anchor = match order {
            SolveOrder::Forward => star[0],
            SolveOrder::Reverse => *star.last().unwrap(),
        };
        for [x, y, z] in combinations::<3>(star) {
            if [x, y, z].contains(&anchor) {
                continue;
            }
            let [a, b, c, d] = [anchor, x, y, z];
            let dg = gc.get(v, [b, c, d]) - gc.get(v, [a, c, d]) + gc.get(v, [a, b, d]) - gc.get(v, [a, b, c]);
            slack.add(v, [x, y, z], dg);
        }
    }
    let mut sys = RationalSystem::new(unknowns);
    let side = |f: usize, e: Edge| -> usize { s.face_edges(f).iter().position(|x| x.0 == e).unwrap() };
    let idx = s.edge_index();
    for (e, l, r) in sides_of(s) {
        // a + c_R − c_L − φ_LR(b) + φ_LR(a) = 0
        let (pb, sb) = pair(e.b, l, r);
        let (pa, sa) = pair(e.a, l, r);
        sys.push(&[(3 * r + side(r, e), 1), (3 * l + side(l, e), -1), (pb, -sb), (pa, sa)], -g.transition[idx[&e]]);
    }
    for (v, star) in stars.iter().enumerate() {
        for [x, y, z] in combinations::<3>(star) {
            let terms = [pair(v, y, z), pair(v, x, z), pair(v, x, y)];
            let row = [(terms[0].0, terms[0].1), (terms[1].0, -terms[1].1), (terms[2].0, terms[2].1)];
            sys.push(&row, gc.get(v, [x, y, z]) - slack.get(v, [x, y, z]));
        }
    }
    let columns: Vec<usize> = match order {
        SolveOrder::Forward => (0..unknowns).collect(),
        SolveOrder::Reverse => (0..unknowns).rev().collect(),
    };
    let x = sys.solve(&columns)?;
    let mut connection = vec![[Q::zero(); 3]; nf];
    for f in 0..nf {
        for k in 0..3 {
            connection[f][k] = small(&x[3 * f + k])?;
        }
    }
    let mut sections: Vec<PairValue> = pair_index
        .iter()
        .map(|(&(vertex, faces), &i)| Ok(PairValue { vertex, faces, value: small(&x[i])? }))
        .collect::<Result<_>>()?;
    sections.sort_by_key(|p| (p.vertex, p.faces));
    let values = (0..nf)
        .map(|f| g.curving[f] + s.face_edges(f).iter().zip(&connection[f]).map(|(&(_, sg), &c)| c * sg).sum::<Q>())
        .collect();
    let t = Trivialization {
        omega: DiscreteTwoForm { surface: s.clone(), values },
        connection,
        sections,
        slack: collect_triples(&slack),
    };
    let v = t.violations(g);
    if !v.is_empty() {
        return Err(Error::Inconsistent(format!("trivialization failed its own check: {}", v.join("; "))));
    }
    Ok(t)
}

/// The bundle whose curvature is the difference of two trivializing forms.
pub fn difference_bundle(a: &Trivialization, b: &Trivialization) -> Result<DiscreteBundleConnection> {
    let s = &a.omega.surface;
    let sides = (0..s.faces.len())
        .map(|f| {
            let fe = s.face_edges(f);
            [0, 1, 2].map(|k| (a.connection[f][k] - b.connection[f][k]) * fe[k].1)
        })
        .collect();
    let l = DiscreteBundleConnection { surface: s.clone(), sides };
    l.check()?;
    Ok(l)
}

/// The orientation double cover. Total face `2f` is face `f` in its listed orientation,
/// `2f + 1` the same face reversed; the total surface carries these orientations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCover {
    pub base: TriangulatedSurface,
    pub total: TriangulatedSurface,
    /// Deck involution on total vertices.
    pub deck: Vec<usize>,
    /// Total vertex to base vertex.
    pub projection: Vec<usize>,
}

/// Whether lifts `(f, ε)` and `(g, η)` meet along `e` with opposite induced directions.
fn lifts_glued(s: &TriangulatedSurface, f: usize, ef: bool, g: usize, eg: bool, e: Edge) -> bool {
    let dir = |face: usize, flip: bool| {
        let d = s.face_edges(face).iter().find(|x| x.0 == e).map(|x| x.1).unwrap();
        if flip {
            -d
        } else {
            d
        }
    };
    dir(f, ef) == -dir(g, eg)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let n = parent[y];
        parent[y] = r;
        y = n;
    }
    r
}

pub fn orientation_double_cover(s: &TriangulatedSurface) -> Result<DoubleCover> {
    require_closed(s)?;
    let nf = s.faces.len();
    // corner (total face, position) identified across glued edges
    let corner = |tf: usize, k: usize| tf * 3 + k;
    let mut parent: Vec<usize> = (0..6 * nf).collect();
    for (e, fs) in s.edge_faces() {
        let (f, g) = (fs[0], fs[1]);
        for ef in [false, true] {
            let eg = if lifts_glued(s, f, ef, g, false, e) { false } else { true };
            for v in [e.a, e.b] {
                let kf = s.faces[f].iter().position(|&x| x == v).unwrap();
                let kg = s.faces[g].iter().position(|&x| x == v).unwrap();
                let (a, b) = (find(&mut parent, corner(2 * f + ef as usize, kf)), find(&mut parent, corner(2 * g + eg as usize, kg)));
                parent[a] = b;
            }
        }
    }
    let mut class: BTreeMap<usize, usize> = BTreeMap::new();
    let mut projection = Vec::new();
    let mut labels = Vec::new();
    let mut copies: BTreeMap<usize, usize> = BTreeMap::new();
    let mut faces = Vec::with_capacity(2 * nf);
    for tf in 0..2 * nf {
        let (f, flip) = (tf / 2, tf % 2 == 1);
        let mut t = [0; 3];
        for k in 0..3 {
            let root = find(&mut parent, corner(tf, k));
            let next = class.len();
            let id = *class.entry(root).or_insert_with(|| {
                let v = s.faces[f][k];
                let c = copies.entry(v).or_insert(0);
                labels.push(format!("{}#{}", s.vertices.label(v), c));
                *c += 1;
                projection.push(v);
                next
            });
            t[k] = id;
        }
        faces.push(if flip { [t[0], t[2], t[1]] } else { t });
    }
    if copies.values().any(|&c| c != 2) {
        return Err(Error::InvalidSurface("a vertex star does not split into two sheets".into()));
    }
    let vertices = FiniteSet::new(labels.clone())?;
    let remap: Vec<usize> = labels.iter().map(|l| vertices.index(l).unwrap()).collect();
    let faces: Vec<[usize; 3]> = faces.into_iter().map(|t| t.map(|v| remap[v])).collect();
    let mut proj = vec![0; labels.len()];
    for (old, &v) in projection.iter().enumerate() {
        proj[remap[old]] = v;
    }
    let total = TriangulatedSurface::new(vertices, faces)?;
    // deck: corner k of 2f is corner k of 2f+1
    let mut deck = vec![usize::MAX; labels.len()];
    for f in 0..nf {
        let (a, b) = (s.faces[f], [total.faces[2 * f], total.faces[2 * f + 1]]);
        for k in 0..3 {
            let pos = |t: [usize; 3]| t.iter().copied().find(|&x| proj[x] == a[k]).unwrap();
            let (x, y) = (pos(b[0]), pos(b[1]));
            deck[x] = y;
            deck[y] = x;
        }
    }
    Ok(DoubleCover { base: s.clone(), total, deck, projection: proj })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCoverReport {
    pub base_euler: i64,
    pub total_euler: i64,
    pub base_orientable: bool,
    pub total_components: usize,
    pub total_connected: bool,
    pub violations: Vec<String>,
}

impl DoubleCover {
    pub fn report(&self) -> DoubleCoverReport {
        let (b, t) = (self.base.validate(), self.total.validate());
        let mut violations = t.defects.clone();
        if self.total.consistent_orientation().is_none_or(|f| f.iter().any(|&x| x)) {
            violations.push("total space is not coherently oriented".into());
        }
        for (x, &y) in self.deck.iter().enumerate() {
            if y == x || self.deck.get(y) != Some(&x) {
                violations.push(format!("deck is not a free involution at vertex {x}"));
            }
            if self.projection[y] != self.projection[x] {
                violations.push(format!("deck does not commute with the projection at vertex {x}"));
            }
        }
        if t.euler != 2 * b.euler {
            violations.push(format!("Euler characteristic {} is not twice {}", t.euler, b.euler));
        }
        let base_components = b.components;
        let connected_expected = if b.orientable { 2 * base_components } else { base_components };
        if t.components != connected_expected {
            violations.push(format!("total space has {} components, expected {connected_expected}", t.components));
        }
        DoubleCoverReport {
            base_euler: b.euler,
            total_euler: t.euler,
            base_orientable: b.orientable,
            total_components: t.components,
            total_connected: t.components == 1,
            violations,
        }
    }
}

/// Orientifold data over a closed surface. `omega[2f + ε]` is the integral over the lift
/// `(f, ε)` taken in the listed orientation of the base face `f`, so deck-oddness reads
/// `omega[2f + 1] = −omega[2f]`. `lift` picks a sheet over every face, `sigma[e]` records
/// whether the chosen sheets on the two sides of edge `e` meet in the double cover, and
/// `kappa` is the `ℤ/2` edge data of the Jandl structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientifoldData {
    pub surface: TriangulatedSurface,
    #[serde(with = "qstr")]
    pub omega: Vec<Q>,
    pub lift: Vec<usize>,
    pub sigma: Vec<bool>,
    pub kappa: Vec<bool>,
}

fn sheets_meet(s: &TriangulatedSurface, a: usize, b: usize, e: Edge) -> bool {
    lifts_glued(s, a / 2, a % 2 == 1, b / 2, b % 2 == 1, e)
}

/// Value of a total face in the orientation of the double cover.
fn canonical(omega: &[Q], tf: usize) -> Q {
    if tf % 2 == 0 {
        omega[tf]
    } else {
        -omega[tf]
    }
}

impl OrientifoldData {
    /// Data with the listed-orientation sheet as section; `values` live on that sheet.
    pub fn new(surface: TriangulatedSurface, values: &[Q], kappa: Vec<bool>) -> Result<Self> {
        require_closed(&surface)?;
        let omega = values.iter().flat_map(|&v| [v, -v]).collect();
        let lift: Vec<usize> = (0..surface.faces.len()).map(|f| 2 * f).collect();
        let sigma = Self::sigma_for(&surface, &lift);
        let o = OrientifoldData { surface, omega, lift, sigma, kappa };
        o.check()?;
        Ok(o)
    }

    /// Deck-odd lift of an ordinary form with trivial edge data.
    pub fn from_form(w: &DiscreteTwoForm) -> Result<Self> {
        let n = w.surface.edges().len();
        Self::new(w.surface.clone(), &w.values, vec![false; n])
    }

    fn sigma_for(s: &TriangulatedSurface, lift: &[usize]) -> Vec<bool> {
        s.edge_faces().into_iter().map(|(e, fs)| sheets_meet(s, lift[fs[0]], lift[fs[1]], e)).collect()
    }

    pub fn violations(&self) -> Vec<String> {
        let s = &self.surface;
        let mut out = Vec::new();
        if let Err(e) = require_closed(s) {
            return vec![e.to_string()];
        }
        let (nf, ne) = (s.faces.len(), s.edges().len());
        if self.omega.len() != 2 * nf || self.lift.len() != nf || self.sigma.len() != ne || self.kappa.len() != ne {
            return vec![format!("expected {} sheet values, {nf} lifts and {ne} edge signs of each kind", 2 * nf)];
        }
        for f in 0..nf {
            if self.omega[2 * f + 1] != -self.omega[2 * f] {
                out.push(format!("two-form is not odd under the deck transformation over face {f}"));
            }
            if self.lift[f] / 2 != f {
                out.push(format!("lift of face {f} lies over face {}", self.lift[f] / 2));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let expected = Self::sigma_for(s, &self.lift);
        let edges = s.edges();
        for (i, e) in edges.iter().enumerate() {
            if self.sigma[i] != expected[i] {
                out.push(format!("sign on edge {}-{} does not match the orientation cover", e.a, e.b));
            }
        }
        // twisted cocycle: around each vertex the sign changes multiply to +1
        let idx = s.edge_index();
        for v in 0..s.vertices.len() {
            let flips = edges.iter().filter(|e| (e.a == v || e.b == v) && !self.sigma[idx[e]]).count();
            if flips % 2 == 1 {
                out.push(format!("orientation signs around vertex {} do not close up", s.vertices.label(v)));
            }
        }
        for f in 0..nf {
            let odd = s.face_edges(f).iter().filter(|(e, _)| self.kappa[idx[e]]).count();
            if odd % 2 == 1 {
                out.push(format!("edge data is not closed around face {f}"));
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Inconsistent(v.join("; ")))
        }
    }

    /// Holonomy over the fundamental domain given by the section.
    pub fn holonomy(&self) -> Result<Q> {
        self.holonomy_on(&self.lift.clone())
    }

    /// `Σ_{f ∈ F} ω_f + ½ #{e ∈ ∂F : κ_e}` mod 1 for the fundamental domain `F = domain`.
    /// An edge is on `∂F` when the chosen sheets on its two sides do not meet.
    pub fn holonomy_on(&self, domain: &[usize]) -> Result<Q> {
        self.check()?;
        if domain.len() != self.lift.len() || domain.iter().enumerate().any(|(f, &d)| d / 2 != f) {
            return Err(Error::Precondition("a fundamental domain picks one sheet over every face".into()));
        }
        Ok(self.fast_holonomy(&DomainTable::new(&self.surface), domain))
    }

    fn fast_holonomy(&self, t: &DomainTable, domain: &[usize]) -> Q {
        let faces: Q = domain.iter().map(|&d| canonical(&self.omega, d)).sum();
        let cut = t
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, &(e, f, g))| self.kappa[i] && !sheets_meet(&self.surface, domain[f], domain[g], e))
            .count();
        mod_one(faces + Q::new(cut as i64, 2))
    }

    /// Values over every fundamental domain (`2^faces` of them).
    pub fn all_domain_values(&self) -> Result<BTreeSet<Q>> {
        self.check()?;
        let n = self.lift.len();
        if n > 26 {
            return Err(Error::Unsupported(format!("{n} faces is too many for an exhaustive sweep")));
        }
        let t = DomainTable::new(&self.surface);
        let mut out = BTreeSet::new();
        let mut domain: Vec<usize> = (0..n).map(|f| 2 * f).collect();
        for bits in 0u64..(1 << n) {
            for (f, d) in domain.iter_mut().enumerate() {
                *d = 2 * f + ((bits >> f) & 1) as usize;
            }
            out.insert(self.fast_holonomy(&t, &domain));
        }
        Ok(out)
    }

    /// The same data written against base faces listed in the opposite order where `flips` says so.
    pub fn reoriented(&self, flips: &[bool]) -> OrientifoldData {
        let surface = self.surface.flipped(flips);
        let relabel = |tf: usize| if flips[tf / 2] { tf ^ 1 } else { tf };
        let mut omega = vec![Q::zero(); self.omega.len()];
        for tf in 0..self.omega.len() {
            let new = relabel(tf);
            // same oriented total face, measured against the new listed orientation
            let c = canonical(&self.omega, tf);
            omega[new] = if new % 2 == 0 { c } else { -c };
        }
        let lift: Vec<usize> = self.lift.iter().map(|&l| relabel(l)).collect();
        let sigma = Self::sigma_for(&surface, &lift);
        OrientifoldData { surface, omega, lift, sigma, kappa: self.kappa.clone() }
    }

    /// Another section of the same data.
    pub fn with_lift(&self, lift: Vec<usize>) -> OrientifoldData {
        let sigma = Self::sigma_for(&self.surface, &lift);
        OrientifoldData { lift, sigma, ..self.clone() }
    }

    /// Adds the deck-odd lift of a bundle's curvature, taken in the listed face orientations.
    pub fn shifted(&self, l: &DiscreteBundleConnection) -> Result<OrientifoldData> {
        if l.surface != self.surface {
            return Err(Error::BaseMismatch("bundle lives on a different surface".into()));
        }
        l.check()?;
        let mut out = self.clone();
        for (f, c) in l.curvature().into_iter().enumerate() {
            out.omega[2 * f] += c;
            out.omega[2 * f + 1] -= c;
        }
        Ok(out)
    }
}

struct DomainTable {
    edges: Vec<(Edge, usize, usize)>,
}

impl DomainTable {
    fn new(s: &TriangulatedSurface) -> Self {
        DomainTable { edges: s.edge_faces().into_iter().map(|(e, fs)| (e, fs[0], fs[1])).collect() }
    }
}

pub fn jandl_holonomy(o: &OrientifoldData) -> Result<Q> {
    o.holonomy()
}

/// Edge sets closed around every face, as a basis over `ℤ/2`.
pub fn closed_edge_sets(s: &TriangulatedSurface) -> Vec<Vec<bool>> {
    use crate::linear::DenseMat;
    let idx = s.edge_index();
    let rows: Vec<Vec<i64>> = (0..s.faces.len())
        .map(|f| {
            let mut r = vec![0; idx.len()];
            for (e, _) in s.face_edges(f) {
                r[idx[&e]] = 1;
            }
            r
        })
        .collect();
    DenseMat::from_rows(&rows, idx.len(), 2).kernel().into_iter().map(|v| v.into_iter().map(|x| x == 1).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KanReport {
    pub points: usize,
    pub orbits: usize,
    /// Pulled-back quotient bundle, one sign per morphism of the action groupoid.
    pub pulled_back: Vec<u64>,
    /// The canonical bundle: the group element of each morphism.
    pub canonical: Vec<u64>,
    pub matches: bool,
    /// Coordinate of the diagonal point in each fiber.
    pub diagonal_section: Vec<u64>,
    pub section_trivializes: bool,
    pub violations: Vec<String>,
}

/// For a free involution on `points`, pulls the quotient `ℤ/2`-bundle back to the action
/// groupoid and compares it with the bundle given by the group elements themselves;
/// the diagonal is then checked to be a section trivializing it.
pub fn kan_bundle_check(points: &FiniteSet, involution: &[usize]) -> Result<KanReport> {
    let n = points.len();
    if involution.len() != n || involution.iter().any(|&y| y >= n) || (0..n).any(|x| involution[involution[x]] != x) {
        return Err(Error::Precondition("expected an involution of the point set".into()));
    }
    if let Some(x) = (0..n).find(|&x| involution[x] == x) {
        return Err(Error::Precondition(format!("action is not free: {} is fixed", points.label(x))));
    }
    let g = FiniteGroup::cyclic(2);
    let act = vec![(0..n).collect::<Vec<_>>(), involution.to_vec()];
    let gamma = FiniteGroupoid::action(&g, points, &act)?;
    let rep: Vec<usize> = (0..n).map(|x| x.min(involution[x])).collect();
    let orbits = rep.iter().collect::<BTreeSet<_>>().len();
    // fiber coordinate: 0 on the orbit representative, 1 on the other point
    let coord = |x: usize| u64::from(rep[x] != x);
    let mut pulled_back = vec![0; gamma.n_morphisms()];
    let mut canonical = vec![0; gamma.n_morphisms()];
    let mut violations = Vec::new();
    for a in 0..2 {
        for x in 0..n {
            let m = gamma.morphisms.index_or_err(&format!("({},{})", g.names[a], points.label(x)))?;
            canonical[m] = a as u64;
            // the morphism moves each point of the fiber over x's orbit by a
            let shifts: BTreeSet<u64> = [x, involution[x]]
                .iter()
                .map(|&p| (coord(act[a][p]) + 2 - coord(p)) % 2)
                .collect();
            if shifts.len() != 1 {
                violations.push(format!("fiber map of ({a},{}) is not a translation", points.label(x)));
            }
            pulled_back[m] = *shifts.iter().next().unwrap();
        }
    }
    let inst = CyclicInstance::bun(2);
    let nerve = gamma.nerve(3);
    let space = DescentSpace::new(&inst, &nerve.simplicial, false)?;
    let as_object = |p: &[u64]| DescentObject { p: p.to_vec(), mu: vec![0; nerve.simplicial.size(2)] };
    let (pb, kan) = (as_object(&pulled_back), as_object(&canonical));
    violations.extend(space.object_violations(&pb).into_iter().map(|v| format!("pulled-back bundle: {v}")));
    violations.extend(space.object_violations(&kan).into_iter().map(|v| format!("canonical bundle: {v}")));
    let diagonal_section: Vec<u64> = (0..n).map(coord).collect();
    let trivial = as_object(&vec![0; gamma.n_morphisms()]);
    let m = DescentMorphism { a: diagonal_section.clone(), alpha: vec![0; gamma.n_morphisms()] };
    let section_violations = space.morphism_violations(&trivial, &pb, &m);
    let section_trivializes = section_violations.is_empty();
    violations.extend(section_violations.into_iter().map(|v| format!("diagonal section: {v}")));
    Ok(KanReport {
        points: n,
        orbits,
        matches: pulled_back == canonical,
        pulled_back,
        canonical,
        diagonal_section,
        section_trivializes,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn random_q(rng: &mut ChaCha8Rng) -> Q {
        q(rng.gen_range(-12..=12), rng.gen_range(1..=6))
    }

    fn random_gerbe(s: &TriangulatedSurface, rng: &mut ChaCha8Rng) -> GerbeData {
        let w = DiscreteTwoForm::new(s.clone(), (0..s.faces.len()).map(|_| random_q(rng)).collect()).unwrap();
        let lambda: Vec<[Q; 3]> = (0..s.faces.len()).map(|_| [random_q(rng), random_q(rng), random_q(rng)]).collect();
        let mut psi = Vec::new();
        for v in 0..s.vertices.len() {
            for p in combinations::<2>(&sorted_star(s, v)) {
                psi.push(PairValue { vertex: v, faces: p, value: random_q(rng) });
            }
        }
        let mut g = GerbeData::trivial(&w).twisted(&lambda, &psi);
        for t in g.cocycle.iter_mut() {
            t.value += rng.gen_range(-2..=2);
        }
        g
    }

    #[test]
    fn tetrahedron_eighths() {
        let s = TriangulatedSurface::tetrahedron();
        let w = DiscreteTwoForm::new(s, vec![q(1, 8); 4]).unwrap();
        assert_eq!(oriented_holonomy(&w).unwrap(), q(1, 2));
        assert_eq!(oriented_holonomy(&DiscreteTwoForm::zero(w.surface.clone())).unwrap(), Q::zero());
        let w3 = DiscreteTwoForm::new(w.surface.clone(), vec![q(1, 3), q(0, 1), q(0, 1), q(0, 1)]).unwrap();
        assert_eq!(oriented_holonomy(&w3.reversed()).unwrap(), q(2, 3));
    }

    #[test]
    fn non_orientable_surfaces_are_rejected() {
        let s = TriangulatedSurface::rp2();
        assert!(oriented_holonomy(&DiscreteTwoForm::zero(s)).is_err());
        let open = TriangulatedSurface::single_triangle();
        assert!(oriented_holonomy(&DiscreteTwoForm::zero(open)).is_err());
    }

    #[test]
    fn curvature_shift_respects_integrality() {
        let s = TriangulatedSurface::tetrahedron();
        let w = DiscreteTwoForm::new(s.clone(), vec![q(1, 5); 4]).unwrap();
        let mut sides = vec![[Q::zero(); 3]; 4];
        sides[0][1] = q(1, 1);
        let one = DiscreteBundleConnection { surface: s.clone(), sides: sides.clone() };
        assert_eq!(oriented_holonomy(&shift_by_curvature(&w, &one).unwrap()).unwrap(), oriented_holonomy(&w).unwrap());
        sides[0][1] = q(1, 2);
        let half = DiscreteBundleConnection { surface: s, sides };
        assert!(shift_by_curvature(&w, &half).is_err());
    }

    #[test]
    fn trivial_gerbe_returns_its_curving() {
        let s = TriangulatedSurface::torus7();
        let w = DiscreteTwoForm::new(s.clone(), (0..14).map(|i| q(i, 7)).collect()).unwrap();
        let t = trivialize(&GerbeData::trivial(&w), SolveOrder::Forward).unwrap();
        assert_eq!(t.omega, w);
    }

    #[test]
    fn trivializations_agree_with_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in [TriangulatedSurface::tetrahedron(), TriangulatedSurface::torus7()] {
            for _ in 0..3 {
                let g = random_gerbe(&s, &mut rng);
                let direct = g.holonomy().unwrap();
                let a = trivialize(&g, SolveOrder::Forward).unwrap();
                let b = trivialize(&g, SolveOrder::Reverse).unwrap();
                assert_eq!(a.holonomy(), direct);
                assert_eq!(b.holonomy(), direct);
                difference_bundle(&a, &b).unwrap();
            }
        }
    }

    #[test]
    fn coboundary_twist_keeps_holonomy() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = TriangulatedSurface::tetrahedron();
        let g = random_gerbe(&s, &mut rng);
        let h = random_gerbe(&s, &mut rng);
        let psi = h.cocycle.iter().map(|t| PairValue { vertex: t.vertex, faces: [t.faces[0], t.faces[1]], value: t.value }).collect::<Vec<_>>();
        let lambda: Vec<[Q; 3]> = (0..4).map(|_| [random_q(&mut rng), random_q(&mut rng), random_q(&mut rng)]).collect();
        let twisted = g.twisted(&lambda, &psi);
        assert_eq!(trivialize(&twisted, SolveOrder::Forward).unwrap().holonomy(), trivialize(&g, SolveOrder::Forward).unwrap().holonomy());
    }

    #[test]
    fn broken_cocycle_is_rejected() {
        let s = TriangulatedSurface::torus7();
        let mut g = GerbeData::trivial(&DiscreteTwoForm::zero(s.clone()));
        let star = sorted_star(&s, 0);
        g.cocycle.push(TripleValue { vertex: 0, faces: [star[0], star[1], star[2]], value: q(1, 3) });
        let err = trivialize(&g, SolveOrder::Forward).unwrap_err().to_string();
        assert!(err.contains("cocycle identity fails"), "{err}");
    }

    #[test]
    fn double_covers() {
        let torus = orientation_double_cover(&TriangulatedSurface::torus7()).unwrap().report();
        assert!(torus.violations.is_empty(), "{torus:?}");
        assert_eq!((torus.total_components, torus.total_euler), (2, 0));
        let rp2 = orientation_double_cover(&TriangulatedSurface::rp2()).unwrap().report();
        assert!(rp2.violations.is_empty(), "{rp2:?}");
        assert!(rp2.total_connected && rp2.total_euler == 2);
        let klein = orientation_double_cover(&TriangulatedSurface::klein_bottle()).unwrap().report();
        assert!(klein.violations.is_empty(), "{klein:?}");
        assert!(klein.total_connected && klein.total_euler == 0);
        assert!(orientation_double_cover(&TriangulatedSurface::single_triangle()).is_err());
    }

    #[test]
    fn orientifold_of_oriented_form_is_oriented_holonomy() {
        let s = TriangulatedSurface::tetrahedron();
        let w = DiscreteTwoForm::new(s, vec![q(1, 8), q(1, 3), q(-2, 5), q(7, 4)]).unwrap();
        let o = OrientifoldData::from_form(&w).unwrap();
        assert_eq!(o.holonomy().unwrap(), oriented_holonomy(&w).unwrap());
        assert_eq!(o.all_domain_values().unwrap().len(), 1);
    }

    #[test]
    fn projective_plane_half_integers() {
        let s = TriangulatedSurface::rp2();
        let basis = closed_edge_sets(&s);
        assert!(!basis.is_empty());
        let mut seen = BTreeSet::new();
        for kappa in basis.iter().cloned().chain([vec![false; s.edges().len()]]) {
            let values: Vec<Q> = (0..10).map(|f| q((f % 3) as i64, 2)).collect();
            let o = OrientifoldData::new(s.clone(), &values, kappa).unwrap();
            let all = o.all_domain_values().unwrap();
            assert_eq!(all.len(), 1);
            let h = *all.iter().next().unwrap();
            assert!(h == Q::zero() || h == q(1, 2));
            seen.insert(h);
        }
        assert_eq!(seen.len(), 2, "edge data must be able to contribute a half");
    }

    #[test]
    fn reorientation_and_bundle_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = TriangulatedSurface::klein_bottle();
        let basis = closed_edge_sets(&s);
        let values: Vec<Q> = (0..s.faces.len()).map(|_| random_q(&mut rng)).collect();
        let o = OrientifoldData::new(s.clone(), &values, basis[0].clone()).unwrap();
        let h = o.holonomy().unwrap();
        for _ in 0..50 {
            let flips: Vec<bool> = (0..s.faces.len()).map(|_| rng.gen()).collect();
            assert_eq!(o.reoriented(&flips).holonomy().unwrap(), h);
        }
        let mut sides = vec![[Q::zero(); 3]; s.faces.len()];
        sides[3][0] = q(1, 1);
        sides[5][2] = q(1, 3);
        sides[9][1] = q(-1, 3);
        let l = DiscreteBundleConnection { surface: s, sides };
        assert_eq!(o.shifted(&l).unwrap().holonomy().unwrap(), h);
    }

    #[test]
    fn kan_bundles() {
        let two = FiniteSet::numbered("p", 2);
        let r = kan_bundle_check(&two, &[1, 0]).unwrap();
        assert!(r.matches && r.section_trivializes && r.violations.is_empty(), "{r:?}");
        let four = FiniteSet::numbered("p", 4);
        let r = kan_bundle_check(&four, &[1, 0, 3, 2]).unwrap();
        assert!(r.matches && r.section_trivializes && r.orbits == 2, "{r:?}");
        assert!(kan_bundle_check(&two, &[0, 1]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn holonomy_is_the_total_mod_one(vals in proptest::collection::vec((-40i64..40, 1i64..9), 4)) {
            let values: Vec<Q> = vals.iter().map(|&(n, d)| q(n, d)).collect();
            let total: Q = values.iter().sum();
            let w = DiscreteTwoForm::new(TriangulatedSurface::tetrahedron(), values).unwrap();
            proptest::prop_assert_eq!(oriented_holonomy(&w).unwrap(), total - total.floor());
        }
    }
}
