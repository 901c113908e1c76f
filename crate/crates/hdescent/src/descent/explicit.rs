//! Descent bicategory of a cyclic 2-group presheaf over a simplicial set,
//! enumerated cell by cell.
//!
//! Objects are `(P, μ)` with `P` on edges and `μ` on triangles, 1-cells
//! `(A, α)` with `A` on vertices and `α` on edges, 2-cells `β` on vertices.
//! Conditions, with `s(·)` the sign action and `e(x)` the front edge:
//! - `P(d₂x) + P(d₀x) = P(d₁x)` on triangles,
//! - `s(P(e x))·μ(d₀x) − μ(d₁x) + μ(d₂x) − μ(d₃x) = 0` on tetrahedra,
//! - `P′(x) + A(d₀x) = A(d₁x) + P(x)` on edges,
//! - `s(P′(d₂x))·α(d₀x) + α(d₂x) + s(A(x₀))·μ(x) = μ′(x) + α(d₁x)` on triangles,
//! - `α′(x) + s(P′(x))·β(d₀x) = β(d₁x) + α(x)` on edges.

use serde::{Deserialize, Serialize};

use crate::descent::bicategory::{Bifunctor, CellAlgebra, FinBicategory};
use crate::error::{Error, Result};
use crate::linear::{AffineSpace, SparseMat};
use crate::prestacks::CyclicInstance;
use crate::simplicial::{SimplicialMap, SimplicialSet};

/// Default cap on the number of cells enumerated per kind.
pub const DEFAULT_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub struct DescentSpace<'a> {
    pub inst: &'a CyclicInstance,
    pub x: &'a SimplicialSet,
    /// Cochains vanish on degenerate simplices.
    pub normalized: bool,
}

/// Decoded object data.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DescentObject {
    pub p: Vec<u64>,
    pub mu: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DescentMorphism {
    pub a: Vec<u64>,
    pub alpha: Vec<u64>,
}

fn degenerate(x: &SimplicialSet, level: usize) -> Vec<bool> {
    let mut out = vec![false; x.size(level)];
    if level > 0 {
        for per_i in &x.degens[level - 1] {
            for &y in per_i {
                out[y] = true;
            }
        }
    }
    out
}

/// Solves `Σ coeff·v = rhs` per row over `ℤ/m`; `m = 1` means the zero group.
fn solve(rows: Vec<(Vec<(usize, i64)>, i64)>, n: usize, m: u64, pinned: &[bool]) -> Option<AffineSpace> {
    if m == 1 {
        return Some(AffineSpace { p: 2, particular: vec![0; n], basis: vec![] });
    }
    let mut entries = Vec::new();
    let mut rhs = Vec::new();
    let mut r = 0;
    for (row, b) in rows {
        entries.extend(row.into_iter().map(|(c, v)| (r, c, v)));
        rhs.push(crate::linear::reduce(b, m));
        r += 1;
    }
    for (c, &pin) in pinned.iter().enumerate() {
        if pin {
            entries.push((r, c, 1));
            rhs.push(0);
            r += 1;
        }
    }
    let a = SparseMat::from_triplets(r, n, m, entries);
    let sol = a.to_dense().solve(&rhs)?;
    Some(AffineSpace { p: m, ..sol })
}

fn points(space: Option<AffineSpace>, m: u64, n: usize, limit: u64) -> Result<Vec<Vec<u64>>> {
    match space {
        None => Ok(vec![]),
        Some(_) if m == 1 => Ok(vec![vec![0; n]]),
        Some(s) => s.points(limit),
    }
}

impl<'a> DescentSpace<'a> {
    pub fn new(inst: &'a CyclicInstance, x: &'a SimplicialSet, normalized: bool) -> Result<Self> {
        if x.top() < 3 {
            return Err(Error::Precondition("descent data needs simplices up to level 3".into()));
        }
        Ok(DescentSpace { inst, x, normalized })
    }

    fn sgn(&self, a: u64) -> i64 {
        self.inst.sign(a)
    }

    fn pins(&self, level: usize) -> Vec<bool> {
        if self.normalized {
            degenerate(self.x, level)
        } else {
            vec![false; self.x.size(level)]
        }
    }

    pub fn encode_object(o: &DescentObject) -> Vec<u64> {
        o.p.iter().chain(&o.mu).copied().collect()
    }

    pub fn decode_object(&self, d: &[u64]) -> DescentObject {
        let n1 = self.x.size(1);
        DescentObject { p: d[..n1].to_vec(), mu: d[n1..].to_vec() }
    }

    pub fn decode_morphism(&self, d: &[u64]) -> DescentMorphism {
        let n0 = self.x.size(0);
        DescentMorphism { a: d[..n0].to_vec(), alpha: d[n0..].to_vec() }
    }

    /// Every violated object condition.
    pub fn object_violations(&self, o: &DescentObject) -> Vec<String> {
        let (x, h, k) = (self.x, self.inst.h, self.inst.k);
        let mut out = Vec::new();
        for t in 0..x.size(2) {
            if (o.p[x.face(2, 2, t)] + o.p[x.face(2, 0, t)]) % h != o.p[x.face(2, 1, t)] % h {
                out.push(format!("gluing cocycle fails on {}", x.names[2][t]));
            }
        }
        for t in 0..x.size(3) {
            let front = x.edge(3, t, 0, 1);
            let v = self.sgn(o.p[front]) * o.mu[x.face(3, 0, t)] as i64 - o.mu[x.face(3, 1, t)] as i64
                + o.mu[x.face(3, 2, t)] as i64
                - o.mu[x.face(3, 3, t)] as i64;
            if v.rem_euclid(k as i64) != 0 {
                out.push(format!("coherence fails on {}", x.names[3][t]));
            }
        }
        out
    }

    pub fn morphism_violations(&self, src: &DescentObject, dst: &DescentObject, m: &DescentMorphism) -> Vec<String> {
        let (x, h, k) = (self.x, self.inst.h as i64, self.inst.k as i64);
        let mut out = Vec::new();
        for e in 0..x.size(1) {
            let v = dst.p[e] as i64 + m.a[x.face(1, 0, e)] as i64 - m.a[x.face(1, 1, e)] as i64 - src.p[e] as i64;
            if v.rem_euclid(h) != 0 {
                out.push(format!("1-cell fails to intertwine gluing on {}", x.names[1][e]));
            }
        }
        for t in 0..x.size(2) {
            let v0 = x.vertex(2, t, 0);
            let v = self.sgn(dst.p[x.face(2, 2, t)]) * m.alpha[x.face(2, 0, t)] as i64 + m.alpha[x.face(2, 2, t)] as i64
                + self.sgn(m.a[v0]) * src.mu[t] as i64
                - dst.mu[t] as i64
                - m.alpha[x.face(2, 1, t)] as i64;
            if v.rem_euclid(k) != 0 {
                out.push(format!("1-cell fails compatibility with coherence on {}", x.names[2][t]));
            }
        }
        out
    }

    pub fn two_cell_violations(&self, dst: &DescentObject, m: &DescentMorphism, m2: &DescentMorphism, beta: &[u64]) -> Vec<String> {
        let (x, k) = (self.x, self.inst.k as i64);
        let mut out = Vec::new();
        if m.a != m2.a {
            out.push("2-cells only connect 1-cells with equal vertex data".into());
        }
        for e in 0..x.size(1) {
            let v = m2.alpha[e] as i64 + self.sgn(dst.p[e]) * beta[x.face(1, 0, e)] as i64
                - beta[x.face(1, 1, e)] as i64
                - m.alpha[e] as i64;
            if v.rem_euclid(k) != 0 {
                out.push(format!("2-cell incompatible on {}", x.names[1][e]));
            }
        }
        out
    }

    /// All objects.
    pub fn objects(&self, limit: u64) -> Result<Vec<DescentObject>> {
        let x = self.x;
        let (h, k) = (self.inst.h, self.inst.k);
        let prow: Vec<(Vec<(usize, i64)>, i64)> = (0..x.size(2))
            .map(|t| (vec![(x.face(2, 2, t), 1), (x.face(2, 0, t), 1), (x.face(2, 1, t), -1)], 0))
            .collect();
        let ps = points(solve(prow, x.size(1), h, &self.pins(1)), h, x.size(1), limit)?;
        let mut out = Vec::new();
        for p in ps {
            let mrow: Vec<(Vec<(usize, i64)>, i64)> = (0..x.size(3))
                .map(|t| {
                    let s = self.sgn(p[x.edge(3, t, 0, 1)]);
                    (vec![(x.face(3, 0, t), s), (x.face(3, 1, t), -1), (x.face(3, 2, t), 1), (x.face(3, 3, t), -1)], 0)
                })
                .collect();
            for mu in points(solve(mrow, x.size(2), k, &self.pins(2)), k, x.size(2), limit)? {
                out.push(DescentObject { p: p.clone(), mu });
                if out.len() as u64 > limit {
                    return Err(Error::Unsupported("too many descent objects to enumerate".into()));
                }
            }
        }
        Ok(out)
    }

    pub fn morphisms(&self, src: &DescentObject, dst: &DescentObject, limit: u64) -> Result<Vec<DescentMorphism>> {
        let x = self.x;
        let (h, k) = (self.inst.h, self.inst.k);
        let arow: Vec<(Vec<(usize, i64)>, i64)> = (0..x.size(1))
            .map(|e| (vec![(x.face(1, 1, e), 1), (x.face(1, 0, e), -1)], dst.p[e] as i64 - src.p[e] as i64))
            .collect();
        let no_pins = vec![false; x.size(0)];
        let mut out = Vec::new();
        for a in points(solve(arow, x.size(0), h, &no_pins), h, x.size(0), limit)? {
            let rows: Vec<(Vec<(usize, i64)>, i64)> = (0..x.size(2))
                .map(|t| {
                    let s = self.sgn(dst.p[x.face(2, 2, t)]);
                    let rhs = dst.mu[t] as i64 - self.sgn(a[x.vertex(2, t, 0)]) * src.mu[t] as i64;
                    (vec![(x.face(2, 0, t), s), (x.face(2, 2, t), 1), (x.face(2, 1, t), -1)], rhs)
                })
                .collect();
            for alpha in points(solve(rows, x.size(1), k, &self.pins(1)), k, x.size(1), limit)? {
                out.push(DescentMorphism { a: a.clone(), alpha });
            }
        }
        Ok(out)
    }

    pub fn two_cells(&self, dst: &DescentObject, m: &DescentMorphism, m2: &DescentMorphism, limit: u64) -> Result<Vec<Vec<u64>>> {
        if m.a != m2.a {
            return Ok(vec![]);
        }
        let x = self.x;
        let rows: Vec<(Vec<(usize, i64)>, i64)> = (0..x.size(1))
            .map(|e| {
                (
                    vec![(x.face(1, 0, e), self.sgn(dst.p[e])), (x.face(1, 1, e), -1)],
                    m.alpha[e] as i64 - m2.alpha[e] as i64,
                )
            })
            .collect();
        points(solve(rows, x.size(0), self.inst.k, &vec![false; x.size(0)]), self.inst.k, x.size(0), limit)
    }

    /// The full descent bicategory.
    pub fn build(&self, limit: u64) -> Result<FinBicategory> {
        let mut b = FinBicategory::new(format!("Desc[{}]", self.inst.name));
        let objs = self.objects(limit)?;
        for o in &objs {
            b.add_object(Self::encode_object(o));
        }
        let mut morphs: Vec<(usize, usize, DescentMorphism)> = Vec::new();
        for (i, o) in objs.iter().enumerate() {
            for (j, o2) in objs.iter().enumerate() {
                for m in self.morphisms(o, o2, limit)? {
                    let data: Vec<u64> = m.a.iter().chain(&m.alpha).copied().collect();
                    b.add_one_cell(i, j, data);
                    morphs.push((i, j, m));
                    if morphs.len() as u64 > limit {
                        return Err(Error::Unsupported("too many descent 1-cells to enumerate".into()));
                    }
                }
            }
        }
        let mut by_pair: std::collections::HashMap<(usize, usize), Vec<usize>> = std::collections::HashMap::new();
        for (f, (i, j, _)) in morphs.iter().enumerate() {
            by_pair.entry((*i, *j)).or_default().push(f);
        }
        let mut count = 0u64;
        for fs in by_pair.values() {
            for &f in fs {
                for &g in fs {
                    let (_, j, m) = &morphs[f];
                    for beta in self.two_cells(&objs[*j], m, &morphs[g].2, limit)? {
                        b.add_two_cell(f, g, beta);
                        count += 1;
                        if count > limit {
                            return Err(Error::Unsupported("too many descent 2-cells to enumerate".into()));
                        }
                    }
                }
            }
        }
        let n0 = self.x.size(0);
        let n1 = self.x.size(1);
        b.finish(self, |_| vec![0; n0 + n1], |_| vec![0; n0])?;
        Ok(b)
    }

    pub fn encode_morphism(m: &DescentMorphism) -> Vec<u64> {
        m.a.iter().chain(&m.alpha).copied().collect()
    }

    /// `(A, α)` then `(B, β)` is `(A + B, β + s(B(d₁x))·α)`.
    pub fn compose_morphisms(&self, f: &DescentMorphism, g: &DescentMorphism) -> DescentMorphism {
        let (x, h) = (self.x, self.inst.h);
        let a = f.a.iter().zip(&g.a).map(|(p, q)| (p + q) % h).collect();
        let alpha = (0..x.size(1))
            .map(|e| (g.alpha[e] + self.inst.act(g.a[x.face(1, 1, e)], f.alpha[e])) % self.inst.k)
            .collect();
        DescentMorphism { a, alpha }
    }

    /// `τ: X(M) → Desc`, pulling back along the augmentation `X₀ → M`.
    pub fn tau(&self, eval_m: &FinBicategory, augmentation: &[usize], desc: &FinBicategory) -> Result<Bifunctor> {
        let x = self.x;
        for e in 0..x.size(1) {
            if augmentation[x.face(1, 0, e)] != augmentation[x.face(1, 1, e)] {
                return Err(Error::Precondition("augmentation does not coequalize the two vertex maps".into()));
            }
        }
        let zero = vec![0; x.size(1) + x.size(2)];
        let o = desc.object_of(&zero).ok_or_else(|| Error::Inconsistent("trivial descent object missing".into()))?;
        let one_cells = eval_m
            .one_cells
            .iter()
            .map(|c| {
                let d: Vec<u64> = augmentation.iter().map(|&m| c.data[m]).chain(std::iter::repeat(0).take(x.size(1))).collect();
                desc.one_cell_of(o, o, &d).ok_or_else(|| Error::Inconsistent("image 1-cell is not a descent morphism".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let two_cells = eval_m
            .two_cells
            .iter()
            .map(|c| {
                let d: Vec<u64> = augmentation.iter().map(|&m| c.data[m]).collect();
                desc.two_cell_of(one_cells[c.source], one_cells[c.target], &d)
                    .ok_or_else(|| Error::Inconsistent("image 2-cell is not a descent 2-morphism".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Bifunctor { objects: vec![o], one_cells, two_cells })
    }
}

/// Pullback `f*: Desc(X) → Desc(X′)` along a simplicial map `f: X′ → X`.
pub fn pullback_descent(f: &SimplicialMap, src: &FinBicategory, src_x: &SimplicialSet, dst: &FinBicategory) -> Result<Bifunctor> {
    let pull = |lvl: usize, d: &[u64]| -> Vec<u64> { f.levels[lvl].iter().map(|&i| d[i]).collect() };
    let (n0, n1) = (src_x.size(0), src_x.size(1));
    let miss = |w: &str| Error::Inconsistent(format!("pulled back {w} is not in the target bicategory"));
    let objects = src
        .objects
        .iter()
        .map(|d| {
            let img: Vec<u64> = pull(1, &d[..n1]).into_iter().chain(pull(2, &d[n1..])).collect();
            dst.object_of(&img).ok_or_else(|| miss("object"))
        })
        .collect::<Result<Vec<_>>>()?;
    let one_cells = src
        .one_cells
        .iter()
        .map(|c| {
            let img: Vec<u64> = pull(0, &c.data[..n0]).into_iter().chain(pull(1, &c.data[n0..])).collect();
            dst.one_cell_of(objects[c.source], objects[c.target], &img).ok_or_else(|| miss("1-cell"))
        })
        .collect::<Result<Vec<_>>>()?;
    let two_cells = src
        .two_cells
        .iter()
        .map(|c| dst.two_cell_of(one_cells[c.source], one_cells[c.target], &pull(0, &c.data)).ok_or_else(|| miss("2-cell")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Bifunctor { objects, one_cells, two_cells })
}

impl CellAlgebra for DescentSpace<'_> {
    fn compose1(&self, b: &FinBicategory, f: usize, g: usize) -> Vec<u64> {
        let (mf, mg) = (self.decode_morphism(&b.one_cells[f].data), self.decode_morphism(&b.one_cells[g].data));
        Self::encode_morphism(&self.compose_morphisms(&mf, &mg))
    }

    fn vertical(&self, b: &FinBicategory, x: usize, y: usize) -> Vec<u64> {
        let (p, q) = (&b.two_cells[x].data, &b.two_cells[y].data);
        p.iter().zip(q).map(|(u, v)| (u + v) % self.inst.k).collect()
    }

    fn horizontal(&self, b: &FinBicategory, x: usize, y: usize) -> Vec<u64> {
        let g = self.decode_morphism(&b.one_cells[b.two_cells[y].source].data);
        let (p, q) = (&b.two_cells[x].data, &b.two_cells[y].data);
        (0..p.len()).map(|v| (q[v] + self.inst.act(g.a[v], p[v])) % self.inst.k).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::bicategory::is_equivalence;
    use crate::group::FiniteGroup;
    use crate::groupoid::FiniteGroupoid;
    use crate::site::{cover_nerve, Cover, CoverClass, FiniteSet};
    use itertools::Itertools;

    fn pair_cover() -> Cover {
        Cover::from_fibers(&FiniteSet::new(["*"]).unwrap(), &[2], CoverClass::Surjection).unwrap()
    }

    /// Oracle: number of `g: X₂ → ℤ/n` with vanishing alternating face sum on `X₃`.
    fn brute_cocycles(x: &SimplicialSet, n: u64) -> usize {
        std::iter::repeat(0..n)
            .take(x.size(2))
            .multi_cartesian_product()
            .filter(|g| {
                (0..x.size(3)).all(|t| {
                    let s: i64 = (0..4).map(|i| if i % 2 == 0 { 1 } else { -1 } * g[x.face(3, i, t)] as i64).sum();
                    s.rem_euclid(n as i64) == 0
                })
            })
            .count()
    }

    #[test]
    fn gerbe_objects_match_cocycle_oracle() {
        let nerve = cover_nerve(&pair_cover(), 4).unwrap();
        let inst = CyclicInstance::grbtriv(2);
        let space = DescentSpace::new(&inst, &nerve.simplicial, false).unwrap();
        let objs = space.objects(1 << 20).unwrap();
        assert_eq!(objs.len(), brute_cocycles(&nerve.simplicial, 2));
        assert_eq!(objs.len(), 8);
        assert!(objs.iter().all(|o| space.object_violations(o).is_empty()));
        let normalized = DescentSpace::new(&inst, &nerve.simplicial, true).unwrap();
        assert_eq!(normalized.objects(1 << 20).unwrap().len(), 2);
    }

    #[test]
    fn tau_is_equivalence_on_pair_cover() {
        let c = pair_cover();
        let nerve = cover_nerve(&c, 4).unwrap();
        for (inst, normalized) in
            [(CyclicInstance::grbtriv(2), false), (CyclicInstance::bun(2), false), (CyclicInstance::jandl(3), true)]
        {
            let space = DescentSpace::new(&inst, &nerve.simplicial, normalized).unwrap();
            let desc = space.build(1 << 16).unwrap();
            assert!(desc.axiom_violations().is_empty(), "{}", inst.name);
            let ev = inst.eval(c.base(), 1 << 10).unwrap();
            let tau = space.tau(&ev, c.map.images(), &desc).unwrap();
            assert!(tau.violations(&ev, &desc).is_empty());
            let rep = is_equivalence(&tau, &ev, &desc);
            assert!(rep.equivalence(), "{}: {:?}", inst.name, rep.failures);
        }
    }

    #[test]
    fn identity_cover_normalized_is_isomorphic() {
        let m = FiniteSet::numbered("m", 2);
        let nerve = cover_nerve(&Cover::identity(&m), 4).unwrap();
        let inst = CyclicInstance::grbtriv(3);
        let ev = inst.eval(&m, 1 << 10).unwrap();
        let norm = DescentSpace::new(&inst, &nerve.simplicial, true).unwrap().build(1 << 12).unwrap();
        assert_eq!(norm.counts(), ev.counts());
        let raw = DescentSpace::new(&inst, &nerve.simplicial, false).unwrap().build(1 << 12).unwrap();
        assert_eq!(raw.objects.len(), 9);
        assert_eq!(raw.n_iso_classes(), 1);
    }

    #[test]
    fn bundles_on_delooping_count_homomorphisms() {
        let b = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
        let nerve = b.nerve(3);
        let inst = CyclicInstance::bun(2);
        let d = DescentSpace::new(&inst, &nerve.simplicial, false).unwrap().build(1 << 12).unwrap();
        assert_eq!(d.n_iso_classes(), 2);
    }

    #[test]
    fn jandl_descent_closes_under_composition() {
        let b = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
        let nerve = b.nerve(3);
        let inst = CyclicInstance::jandl(3);
        let space = DescentSpace::new(&inst, &nerve.simplicial, true).unwrap();
        let d = space.build(1 << 14).unwrap();
        assert!(d.axiom_violations().is_empty());
        // orientation class is a homomorphism ℤ/2 → ℤ/2: both appear
        let ps: std::collections::BTreeSet<Vec<u64>> = d.objects.iter().map(|o| space.decode_object(o).p).collect();
        assert_eq!(ps.len(), 2);
    }
}
