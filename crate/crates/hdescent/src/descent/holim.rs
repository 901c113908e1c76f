//! Homotopy limit of a strict cosimplicial diagram of finite bicategories, truncated at
//! level 3. Objects are `(g, P, μ)` with the pentagon-type coherence over level 3,
//! 1-cells `(A, α)` compatible with `μ`, 2-cells `β` compatible with `α`.

use serde::Serialize;

use super::bicategory::{Bifunctor, CellAlgebra, FinBicategory};
use crate::error::{Error, Result};
use crate::prestacks::CyclicInstance;
use crate::simplicial::SimplicialSet;
use crate::site::{FiniteSet, SetMap};

/// Levels `C₀ … C₃` with coface bifunctors `cofaces[n][i]: Cₙ → Cₙ₊₁`.
#[derive(Clone, Debug)]
pub struct CosimplicialBicategory {
    pub levels: Vec<FinBicategory>,
    pub cofaces: Vec<Vec<Bifunctor>>,
}

impl CosimplicialBicategory {
    /// Every level `C`, every coface the identity.
    pub fn constant(c: &FinBicategory) -> Self {
        let id = Bifunctor::identity(c);
        CosimplicialBicategory { levels: vec![c.clone(); 4], cofaces: (0..3).map(|n| vec![id.clone(); n + 2]).collect() }
    }

    /// `n ↦ X(Xₙ)` with cofaces the pullbacks along the face maps of `x`.
    pub fn from_simplicial(inst: &CyclicInstance, x: &SimplicialSet, limit: u64) -> Result<Self> {
        if x.top() < 3 {
            return Err(Error::Precondition("simplicial set must reach level 3".into()));
        }
        let sets: Vec<FiniteSet> = (0..4).map(|n| FiniteSet::numbered("x", x.size(n))).collect();
        let levels = sets.iter().map(|s| inst.eval(s, limit)).collect::<Result<Vec<_>>>()?;
        let cofaces = (0..3)
            .map(|n| {
                (0..n + 2)
                    .map(|i| {
                        let f = SetMap::new(sets[n + 1].clone(), sets[n].clone(), x.faces[n + 1][i].clone())?;
                        inst.pullback(&f, &levels[n], &levels[n + 1])
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CosimplicialBicategory { levels, cofaces })
    }

    fn d(&self, n: usize, i: usize) -> &Bifunctor {
        &self.cofaces[n][i]
    }

    /// Bifunctor axioms for every coface and `dʲdⁱ = dⁱdʲ⁻¹` for `i < j`, on all cells.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.levels.len() != 4 || self.cofaces.len() != 3 || (0..3).any(|n| self.cofaces[n].len() != n + 2) {
            return vec!["expected four levels with 2, 3 and 4 cofaces".into()];
        }
        for n in 0..3 {
            for (i, f) in self.cofaces[n].iter().enumerate() {
                out.extend(f.violations(&self.levels[n], &self.levels[n + 1]).into_iter().map(|v| format!("coface d{i} on level {n}: {v}")));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for n in 0..2 {
            for j in 1..n + 3 {
                for i in 0..j {
                    let lhs = self.d(n, i).then(self.d(n + 1, j));
                    let rhs = self.d(n, j - 1).then(self.d(n + 1, i));
                    if lhs != rhs {
                        out.push(format!("cosimplicial identity d{j}d{i} = d{i}d{} fails from level {n}", j - 1));
                    }
                }
            }
        }
        out
    }
}

/// Indices of cells of the holim inside its levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HolimObject {
    pub g: usize,
    pub p: usize,
    pub mu: usize,
}

struct Algebra<'a> {
    c: &'a CosimplicialBicategory,
}

fn get(map: &std::collections::HashMap<(usize, usize), usize>, a: usize, b: usize, what: &str) -> Result<usize> {
    map.get(&(a, b)).copied().ok_or_else(|| Error::Inconsistent(format!("{what} composite of cells {a}, {b} is undefined")))
}

impl Algebra<'_> {
    /// `(A, α)` then `(B, β)`: `(AB, (id ⊗ β) · (α ⊗ id))`.
    fn compose(&self, a: usize, alpha: usize, b: usize, beta: usize) -> Result<(usize, usize)> {
        let (c0, c1) = (&self.c.levels[0], &self.c.levels[1]);
        let ab = get(&c0.compose1, a, b, "1-cell")?;
        let d0a = self.c.d(0, 0).one_cells[a];
        let d1b = self.c.d(0, 1).one_cells[b];
        let left = get(&c1.horizontal, c1.id2[d0a], beta, "horizontal")?;
        let right = get(&c1.horizontal, alpha, c1.id2[d1b], "horizontal")?;
        Ok((ab, get(&c1.vertical, left, right, "vertical")?))
    }
}

impl CellAlgebra for Algebra<'_> {
    fn compose1(&self, b: &FinBicategory, f: usize, g: usize) -> Vec<u64> {
        let (x, y) = (&b.one_cells[f].data, &b.one_cells[g].data);
        match self.compose(x[0] as usize, x[1] as usize, y[0] as usize, y[1] as usize) {
            Ok((a, al)) => vec![a as u64, al as u64],
            Err(_) => vec![u64::MAX],
        }
    }

    fn vertical(&self, b: &FinBicategory, x: usize, y: usize) -> Vec<u64> {
        let c0 = &self.c.levels[0];
        let (p, q) = (b.two_cells[x].data[0] as usize, b.two_cells[y].data[0] as usize);
        vec![c0.vertical.get(&(p, q)).map_or(u64::MAX, |&v| v as u64)]
    }

    fn horizontal(&self, b: &FinBicategory, x: usize, y: usize) -> Vec<u64> {
        let c0 = &self.c.levels[0];
        let (p, q) = (b.two_cells[x].data[0] as usize, b.two_cells[y].data[0] as usize);
        vec![c0.horizontal.get(&(p, q)).map_or(u64::MAX, |&v| v as u64)]
    }
}

/// The coherence identity for `(g, P, μ)` over level 3, as an error message when it fails.
fn object_coherence(c: &CosimplicialBicategory, p: usize, mu: usize) -> Result<bool> {
    let c3 = &c.levels[3];
    let p01 = c.d(2, 3).one_cells[c.d(1, 2).one_cells[p]];
    let p23 = c.d(2, 0).one_cells[c.d(1, 0).one_cells[p]];
    let m = |i: usize| c.d(2, i).two_cells[mu];
    let first = get(&c3.vertical, get(&c3.horizontal, m(0), c3.id2[p01], "horizontal")?, m(2), "vertical")?;
    let second = get(&c3.vertical, get(&c3.horizontal, c3.id2[p23], m(3), "horizontal")?, m(1), "vertical")?;
    Ok(first == second)
}

/// Compatibility of `(A, α)` with `μ` and `μ′` over level 2.
fn morphism_coherence(c: &CosimplicialBicategory, o: &HolimObject, o2: &HolimObject, a: usize, alpha: usize) -> Result<bool> {
    let c2 = &c.levels[2];
    let a0 = c.d(1, 2).one_cells[c.d(0, 1).one_cells[a]];
    let a2 = c.d(1, 0).one_cells[c.d(0, 0).one_cells[a]];
    let (p01_2, p12) = (c.d(1, 2).one_cells[o2.p], c.d(1, 0).one_cells[o.p]);
    let al = |i: usize| c.d(1, i).two_cells[alpha];
    let h = |x: usize, y: usize| get(&c2.horizontal, x, y, "horizontal");
    let v = |x: usize, y: usize| get(&c2.vertical, x, y, "vertical");
    let left = v(h(c2.id2[a2], o2.mu)?, al(1))?;
    let right = v(v(h(al(0), c2.id2[p01_2])?, h(c2.id2[p12], al(2))?)?, h(o.mu, c2.id2[a0])?)?;
    Ok(left == right)
}

/// The holim as a finite bicategory. Object data `[g, P, μ]`, 1-cell data `[A, α]`,
/// 2-cell data `[β]`, all indices into the levels.
pub fn holim(c: &CosimplicialBicategory, limit: u64) -> Result<FinBicategory> {
    let bad = c.violations();
    if !bad.is_empty() {
        return Err(Error::Inconsistent(bad.join("; ")));
    }
    let (c0, c1, c2) = (&c.levels[0], &c.levels[1], &c.levels[2]);
    let mut b = FinBicategory::new("holim");
    let mut objs: Vec<HolimObject> = Vec::new();
    for g in 0..c0.objects.len() {
        let (s, t) = (c.d(0, 0).objects[g], c.d(0, 1).objects[g]);
        for &p in c1.hom1(s, t) {
            if c1.one_inverse(p).is_none() {
                continue;
            }
            let src = get(&c2.compose1, c.d(1, 0).one_cells[p], c.d(1, 2).one_cells[p], "1-cell")?;
            for &mu in c2.hom2(src, c.d(1, 1).one_cells[p]) {
                if c2.is_invertible2(mu) && object_coherence(c, p, mu)? {
                    objs.push(HolimObject { g, p, mu });
                    b.add_object(vec![g as u64, p as u64, mu as u64]);
                }
            }
        }
    }
    let mut cells: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (i, o) in objs.iter().enumerate() {
        for (j, o2) in objs.iter().enumerate() {
            for &a in c0.hom1(o.g, o2.g) {
                let s = get(&c1.compose1, c.d(0, 0).one_cells[a], o2.p, "1-cell")?;
                let t = get(&c1.compose1, o.p, c.d(0, 1).one_cells[a], "1-cell")?;
                for &alpha in c1.hom2(s, t) {
                    if c1.is_invertible2(alpha) && morphism_coherence(c, o, o2, a, alpha)? {
                        b.add_one_cell(i, j, vec![a as u64, alpha as u64]);
                        cells.push((i, j, a, alpha));
                        if cells.len() as u64 > limit {
                            return Err(Error::Unsupported("too many holim 1-cells to enumerate".into()));
                        }
                    }
                }
            }
        }
    }
    let mut count = 0u64;
    for (f, &(i, j, a, alpha)) in cells.iter().enumerate() {
        for (f2, &(i2, j2, a2, alpha2)) in cells.iter().enumerate() {
            if (i, j) != (i2, j2) {
                continue;
            }
            let (o, o2) = (&objs[i], &objs[j]);
            for &beta in c0.hom2(a, a2) {
                let lhs = get(&c1.vertical, get(&c1.horizontal, c.d(0, 0).two_cells[beta], c1.id2[o2.p], "horizontal")?, alpha2, "vertical")?;
                let rhs = get(&c1.vertical, alpha, get(&c1.horizontal, c1.id2[o.p], c.d(0, 1).two_cells[beta], "horizontal")?, "vertical")?;
                if lhs == rhs {
                    b.add_two_cell(f, f2, vec![beta as u64]);
                    count += 1;
                    if count > limit {
                        return Err(Error::Unsupported("too many holim 2-cells to enumerate".into()));
                    }
                }
            }
        }
    }
    let ids: Vec<Vec<u64>> = objs.iter().map(|o| vec![c0.id1[o.g] as u64, c1.id2[o.p] as u64]).collect();
    let id2s: Vec<Vec<u64>> = cells.iter().map(|&(_, _, a, _)| vec![c0.id2[a] as u64]).collect();
    b.finish(&Algebra { c }, |o| ids[o].clone(), |f| id2s[f].clone())?;
    Ok(b)
}

/// `C → holim` of the constant diagram: `x ↦ (x, id, id)`.
pub fn constant_comparison(c: &FinBicategory, h: &FinBicategory) -> Result<Bifunctor> {
    let miss = |w: &str| Error::Inconsistent(format!("{w} missing from the holim"));
    let objects = (0..c.objects.len())
        .map(|x| {
            let p = c.id1[x];
            h.object_of(&[x as u64, p as u64, c.id2[p] as u64]).ok_or_else(|| miss("object"))
        })
        .collect::<Result<Vec<_>>>()?;
    let one_cells = (0..c.one_cells.len())
        .map(|a| {
            let cell = &c.one_cells[a];
            h.one_cell_of(objects[cell.source], objects[cell.target], &[a as u64, c.id2[a] as u64]).ok_or_else(|| miss("1-cell"))
        })
        .collect::<Result<Vec<_>>>()?;
    let two_cells = (0..c.two_cells.len())
        .map(|x| {
            let cell = &c.two_cells[x];
            h.two_cell_of(one_cells[cell.source], one_cells[cell.target], &[x as u64]).ok_or_else(|| miss("2-cell"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Bifunctor { objects, one_cells, two_cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::bicategory::is_equivalence;
    use crate::descent::explicit::DescentSpace;
    use crate::group::FiniteGroup;
    use crate::groupoid::FiniteGroupoid;
    use crate::site::{cover_nerve, Cover};

    #[test]
    fn constant_diagram_gives_back_the_bicategory() {
        for inst in [CyclicInstance::grbtriv(2), CyclicInstance::bun(3), CyclicInstance::jandl(2)] {
            let c = inst.eval(&FiniteSet::numbered("x", 2), 1 << 12).unwrap();
            let h = holim(&CosimplicialBicategory::constant(&c), 1 << 16).unwrap();
            let f = constant_comparison(&c, &h).unwrap();
            assert!(f.violations(&c, &h).is_empty());
            assert!(is_equivalence(&f, &c, &h).equivalence(), "{}", inst.name);
        }
    }

    #[test]
    fn holim_matches_coordinate_engine_on_delooping() {
        let nerve = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2)).nerve(3);
        for inst in [CyclicInstance::grbtriv(2), CyclicInstance::bun(2)] {
            let cos = CosimplicialBicategory::from_simplicial(&inst, &nerve.simplicial, 1 << 17).unwrap();
            let h = holim(&cos, 1 << 16).unwrap();
            let e = DescentSpace::new(&inst, &nerve.simplicial, false).unwrap().build(1 << 16).unwrap();
            assert_eq!(h.counts(), e.counts(), "{}", inst.name);
            assert_eq!(h.n_iso_classes(), e.n_iso_classes());
            assert!(h.axiom_violations().is_empty());
        }
    }

    #[test]
    fn identity_cover_of_two_points() {
        let base = FiniteSet::numbered("m", 2);
        let nerve = cover_nerve(&Cover::identity(&base), 4).unwrap();
        for inst in [CyclicInstance::jandl(2), CyclicInstance::grbtriv(3)] {
            let cos = CosimplicialBicategory::from_simplicial(&inst, &nerve.simplicial, 1 << 12).unwrap();
            let h = holim(&cos, 1 << 16).unwrap();
            let direct = inst.eval(&base, 1 << 12).unwrap();
            assert_eq!(h.n_iso_classes(), direct.n_iso_classes());
            assert_eq!(h.one_cells.len() / h.objects.len().pow(2), direct.one_cells.len());
        }
    }

    #[test]
    fn broken_cofaces_are_rejected() {
        let c = CyclicInstance::bun(2).eval(&FiniteSet::numbered("x", 1), 16).unwrap();
        let mut cos = CosimplicialBicategory::constant(&c);
        cos.cofaces[1][0].one_cells.swap(0, 1);
        assert!(holim(&cos, 1 << 10).is_err());
    }
}
