//! Finite, strictly presented bicategories with explicit cell tables, strict
//! bifunctors, and the enumeration engine deciding biequivalence.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell1 {
    pub source: usize,
    pub target: usize,
    pub data: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell2 {
    /// Source and target 1-cells.
    pub source: usize,
    pub target: usize,
    pub data: Vec<u64>,
}

/// Composition rules consulted while tables are built.
pub trait CellAlgebra {
    fn compose1(&self, bicat: &FinBicategory, f: usize, g: usize) -> Vec<u64>;
    fn vertical(&self, bicat: &FinBicategory, x: usize, y: usize) -> Vec<u64>;
    fn horizontal(&self, bicat: &FinBicategory, x: usize, y: usize) -> Vec<u64>;
}

/// All cells and composition tables. "x then y" everywhere.
#[derive(Clone, Debug, Default)]
pub struct FinBicategory {
    pub name: String,
    pub objects: Vec<Vec<u64>>,
    pub one_cells: Vec<Cell1>,
    pub two_cells: Vec<Cell2>,
    pub id1: Vec<usize>,
    pub id2: Vec<usize>,
    pub compose1: HashMap<(usize, usize), usize>,
    pub vertical: HashMap<(usize, usize), usize>,
    pub horizontal: HashMap<(usize, usize), usize>,
    obj_index: HashMap<Vec<u64>, usize>,
    one_index: HashMap<(usize, usize, Vec<u64>), usize>,
    two_index: HashMap<(usize, usize, Vec<u64>), usize>,
    hom1: HashMap<(usize, usize), Vec<usize>>,
    hom2: HashMap<(usize, usize), Vec<usize>>,
    invertible2: Vec<bool>,
}

impl FinBicategory {
    pub fn new(name: impl Into<String>) -> Self {
        FinBicategory { name: name.into(), ..Default::default() }
    }

    pub fn add_object(&mut self, data: Vec<u64>) -> usize {
        let i = self.objects.len();
        self.obj_index.insert(data.clone(), i);
        self.objects.push(data);
        i
    }

    pub fn add_one_cell(&mut self, source: usize, target: usize, data: Vec<u64>) -> usize {
        let i = self.one_cells.len();
        self.one_index.insert((source, target, data.clone()), i);
        self.hom1.entry((source, target)).or_default().push(i);
        self.one_cells.push(Cell1 { source, target, data });
        i
    }

    pub fn add_two_cell(&mut self, source: usize, target: usize, data: Vec<u64>) -> usize {
        let i = self.two_cells.len();
        self.two_index.insert((source, target, data.clone()), i);
        self.hom2.entry((source, target)).or_default().push(i);
        self.two_cells.push(Cell2 { source, target, data });
        i
    }

    pub fn object_of(&self, data: &[u64]) -> Option<usize> {
        self.obj_index.get(data).copied()
    }

    pub fn one_cell_of(&self, s: usize, t: usize, data: &[u64]) -> Option<usize> {
        self.one_index.get(&(s, t, data.to_vec())).copied()
    }

    pub fn two_cell_of(&self, s: usize, t: usize, data: &[u64]) -> Option<usize> {
        self.two_index.get(&(s, t, data.to_vec())).copied()
    }

    pub fn hom1(&self, a: usize, b: usize) -> &[usize] {
        self.hom1.get(&(a, b)).map_or(&[], Vec::as_slice)
    }

    pub fn hom2(&self, f: usize, g: usize) -> &[usize] {
        self.hom2.get(&(f, g)).map_or(&[], Vec::as_slice)
    }

    /// Fills identities (given as data producers) and all composition tables.
    pub fn finish(
        &mut self,
        algebra: &dyn CellAlgebra,
        id1_data: impl Fn(usize) -> Vec<u64>,
        id2_data: impl Fn(usize) -> Vec<u64>,
    ) -> Result<()> {
        let missing = |what: &str| Error::Inconsistent(format!("{what} is not among the enumerated cells"));
        self.id1 = (0..self.objects.len())
            .map(|a| self.one_cell_of(a, a, &id1_data(a)).ok_or_else(|| missing("an identity 1-cell")))
            .collect::<Result<_>>()?;
        self.id2 = (0..self.one_cells.len())
            .map(|f| self.two_cell_of(f, f, &id2_data(f)).ok_or_else(|| missing("an identity 2-cell")))
            .collect::<Result<_>>()?;
        let mut compose1 = HashMap::new();
        for f in 0..self.one_cells.len() {
            let (a, b) = (self.one_cells[f].source, self.one_cells[f].target);
            for c in 0..self.objects.len() {
                for &g in self.hom1(b, c) {
                    let d = algebra.compose1(self, f, g);
                    let h = self.one_cell_of(a, c, &d).ok_or_else(|| missing("a composite 1-cell"))?;
                    compose1.insert((f, g), h);
                }
            }
        }
        self.compose1 = compose1;
        let mut vertical = HashMap::new();
        let mut horizontal = HashMap::new();
        let by_source: HashMap<usize, Vec<usize>> = (0..self.two_cells.len()).fold(HashMap::new(), |mut m, x| {
            m.entry(self.two_cells[x].source).or_default().push(x);
            m
        });
        let from_object: HashMap<usize, Vec<usize>> = (0..self.two_cells.len()).fold(HashMap::new(), |mut m, x| {
            m.entry(self.one_cells[self.two_cells[x].source].source).or_default().push(x);
            m
        });
        for x in 0..self.two_cells.len() {
            let (f, g) = (self.two_cells[x].source, self.two_cells[x].target);
            for &y in by_source.get(&g).map_or(&[][..], Vec::as_slice) {
                let h = self.two_cells[y].target;
                let d = algebra.vertical(self, x, y);
                vertical.insert((x, y), self.two_cell_of(f, h, &d).ok_or_else(|| missing("a vertical composite"))?);
            }
            let b = self.one_cells[f].target;
            for &y in from_object.get(&b).map_or(&[][..], Vec::as_slice) {
                let (f2, g2) = (self.two_cells[y].source, self.two_cells[y].target);
                let (s, t) = (self.compose1[&(f, f2)], self.compose1[&(g, g2)]);
                let d = algebra.horizontal(self, x, y);
                horizontal.insert((x, y), self.two_cell_of(s, t, &d).ok_or_else(|| missing("a horizontal composite"))?);
            }
        }
        self.vertical = vertical;
        self.horizontal = horizontal;
        self.invertible2 = (0..self.two_cells.len())
            .map(|x| {
                let c = &self.two_cells[x];
                self.hom2(c.target, c.source).iter().any(|&y| {
                    self.vertical[&(x, y)] == self.id2[c.source] && self.vertical[&(y, x)] == self.id2[c.target]
                })
            })
            .collect();
        Ok(())
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.objects.len(), self.one_cells.len(), self.two_cells.len())
    }

    pub fn is_invertible2(&self, x: usize) -> bool {
        self.invertible2[x]
    }

    /// `f ≅ g` in a Hom category.
    pub fn two_isomorphic(&self, f: usize, g: usize) -> Option<usize> {
        self.hom2(f, g).iter().copied().find(|&x| self.is_invertible2(x))
    }

    /// A 1-cell is an equivalence if some reverse 1-cell composes to identities up to invertible 2-cells.
    pub fn one_inverse(&self, f: usize) -> Option<usize> {
        let (a, b) = (self.one_cells[f].source, self.one_cells[f].target);
        self.hom1(b, a).iter().copied().find(|&g| {
            self.two_isomorphic(self.compose1[&(f, g)], self.id1[a]).is_some()
                && self.two_isomorphic(self.compose1[&(g, f)], self.id1[b]).is_some()
        })
    }

    pub fn one_isomorphic(&self, a: usize, b: usize) -> Option<usize> {
        self.hom1(a, b).iter().copied().find(|&f| self.one_inverse(f).is_some())
    }

    /// Equivalence classes of objects under 1-isomorphism, as representatives per object.
    pub fn iso_classes(&self) -> Vec<usize> {
        let n = self.objects.len();
        let mut rep: Vec<usize> = (0..n).collect();
        for a in 0..n {
            if rep[a] != a {
                continue;
            }
            for b in a + 1..n {
                if rep[b] == b && self.one_isomorphic(a, b).is_some() {
                    rep[b] = a;
                }
            }
        }
        rep
    }

    pub fn n_iso_classes(&self) -> usize {
        self.iso_classes().iter().enumerate().filter(|(i, r)| i == *r).count()
    }

    /// Checks units and associativity on all tables, and interchange exhaustively
    /// on small tables or on a deterministic sample of composable pairs.
    pub fn axiom_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (&(f, g), &h) in &self.compose1 {
            let c = self.one_cells[g].target;
            for d in 0..self.objects.len() {
                for &k in self.hom1(c, d) {
                    if self.compose1[&(h, k)] != self.compose1[&(f, self.compose1[&(g, k)])] {
                        out.push(format!("1-cell associativity fails at ({f}, {g}, {k})"));
                    }
                }
            }
        }
        for f in 0..self.one_cells.len() {
            let (a, b) = (self.one_cells[f].source, self.one_cells[f].target);
            if self.compose1[&(self.id1[a], f)] != f || self.compose1[&(f, self.id1[b])] != f {
                out.push(format!("1-cell unit law fails at {f}"));
            }
        }
        for &(x, y) in self.vertical.keys() {
            if self.two_cells[x].target != self.two_cells[y].source {
                out.push(format!("vertical composite of non-composable ({x}, {y})"));
            }
        }
        for x in 0..self.two_cells.len() {
            let c = &self.two_cells[x];
            if self.vertical[&(self.id2[c.source], x)] != x || self.vertical[&(x, self.id2[c.target])] != x {
                out.push(format!("2-cell unit law fails at {x}"));
            }
        }
        // interchange: (x ∘v x2) ∘h (y ∘v y2) = (x ∘h y) ∘v (x2 ∘h y2); sampled when large
        let mut pairs: Vec<((usize, usize), usize)> = self.vertical.iter().map(|(&k, &v)| (k, v)).collect();
        pairs.sort_unstable();
        let stride = (pairs.len() / 400).max(1);
        let sample: Vec<((usize, usize), usize)> = pairs.iter().copied().step_by(stride).collect();
        let mut by_object: HashMap<usize, Vec<((usize, usize), usize)>> = HashMap::new();
        for &((y, y2), yv) in &pairs {
            by_object.entry(self.one_cells[self.two_cells[y].source].source).or_default().push(((y, y2), yv));
        }
        for &((x, x2), xv) in &sample {
            let b = self.one_cells[self.two_cells[x].source].target;
            for &((y, y2), yv) in by_object.get(&b).map_or(&[][..], Vec::as_slice).iter().step_by(stride) {
                let lhs = self.horizontal[&(xv, yv)];
                let rhs = self.vertical[&(self.horizontal[&(x, y)], self.horizontal[&(x2, y2)])];
                if lhs != rhs {
                    out.push(format!("interchange fails at ({x}, {x2}; {y}, {y2})"));
                }
            }
            if out.len() > 20 {
                break;
            }
        }
        out
    }
}

/// Strict bifunctor given by index maps on all three kinds of cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bifunctor {
    pub objects: Vec<usize>,
    pub one_cells: Vec<usize>,
    pub two_cells: Vec<usize>,
}

impl Bifunctor {
    pub fn identity(b: &FinBicategory) -> Self {
        Bifunctor {
            objects: (0..b.objects.len()).collect(),
            one_cells: (0..b.one_cells.len()).collect(),
            two_cells: (0..b.two_cells.len()).collect(),
        }
    }

    pub fn then(&self, g: &Bifunctor) -> Bifunctor {
        Bifunctor {
            objects: self.objects.iter().map(|&x| g.objects[x]).collect(),
            one_cells: self.one_cells.iter().map(|&x| g.one_cells[x]).collect(),
            two_cells: self.two_cells.iter().map(|&x| g.two_cells[x]).collect(),
        }
    }

    /// Strict preservation of boundaries, identities and all compositions.
    pub fn violations(&self, src: &FinBicategory, dst: &FinBicategory) -> Vec<String> {
        let mut out = Vec::new();
        for (f, c) in src.one_cells.iter().enumerate() {
            let d = &dst.one_cells[self.one_cells[f]];
            if d.source != self.objects[c.source] || d.target != self.objects[c.target] {
                out.push(format!("1-cell {f} has wrong image boundary"));
            }
        }
        for (x, c) in src.two_cells.iter().enumerate() {
            let d = &dst.two_cells[self.two_cells[x]];
            if d.source != self.one_cells[c.source] || d.target != self.one_cells[c.target] {
                out.push(format!("2-cell {x} has wrong image boundary"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for a in 0..src.objects.len() {
            if self.one_cells[src.id1[a]] != dst.id1[self.objects[a]] {
                out.push(format!("identity 1-cell of object {a} not preserved"));
            }
        }
        for f in 0..src.one_cells.len() {
            if self.two_cells[src.id2[f]] != dst.id2[self.one_cells[f]] {
                out.push(format!("identity 2-cell of 1-cell {f} not preserved"));
            }
        }
        let tables = [(&src.compose1, &dst.compose1, &self.one_cells, "1-cell"), (&src.vertical, &dst.vertical, &self.two_cells, "vertical"), (&src.horizontal, &dst.horizontal, &self.two_cells, "horizontal")];
        for (st, dt, map, what) in tables {
            for (&(x, y), &z) in st {
                if dt.get(&(map[x], map[y])) != Some(&map[z]) {
                    out.push(format!("{what} composition of ({x}, {y}) not preserved"));
                }
            }
        }
        out
    }
}

/// Outcome of the enumeration engine, with re-checkable witnesses.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EngineReport {
    pub fully_faithful: bool,
    pub essentially_surjective: bool,
    /// For each target object: a source object and a 1-isomorphism from its image.
    pub object_witness: Vec<Option<(usize, usize)>>,
    pub failures: Vec<String>,
}

impl EngineReport {
    pub fn equivalence(&self) -> bool {
        self.fully_faithful && self.essentially_surjective
    }
}

/// Decides whether a strict bifunctor is a biequivalence by exhaustive search.
pub fn is_equivalence(f: &Bifunctor, src: &FinBicategory, dst: &FinBicategory) -> EngineReport {
    let mut rep = EngineReport { fully_faithful: true, essentially_surjective: true, ..Default::default() };
    for (a, b) in (0..src.objects.len()).flat_map(|a| (0..src.objects.len()).map(move |b| (a, b))) {
        let (fa, fb) = (f.objects[a], f.objects[b]);
        // essential surjectivity of Hom(a,b) → Hom(Fa,Fb)
        for &g in dst.hom1(fa, fb) {
            if !src.hom1(a, b).iter().any(|&h| dst.two_isomorphic(f.one_cells[h], g).is_some()) {
                rep.fully_faithful = false;
                rep.failures.push(format!("1-cell {g} between images of objects {a}, {b} is not hit up to 2-isomorphism"));
            }
        }
        // bijectivity on 2-cells
        for &h in src.hom1(a, b) {
            for &h2 in src.hom1(a, b) {
                let mut imgs: Vec<usize> = src.hom2(h, h2).iter().map(|&x| f.two_cells[x]).collect();
                imgs.sort_unstable();
                imgs.dedup();
                let want = dst.hom2(f.one_cells[h], f.one_cells[h2]).len();
                if imgs.len() != src.hom2(h, h2).len() || imgs.len() != want {
                    rep.fully_faithful = false;
                    rep.failures.push(format!("2-cells between 1-cells {h}, {h2} are not matched bijectively"));
                }
            }
        }
        if rep.failures.len() > 10 {
            break;
        }
    }
    for b in 0..dst.objects.len() {
        let w = (0..src.objects.len()).find_map(|a| dst.one_isomorphic(f.objects[a], b).map(|e| (a, e)));
        if w.is_none() {
            rep.essentially_surjective = false;
            rep.failures.push(format!("object {b} is not 1-isomorphic to any image"));
        }
        rep.object_witness.push(w);
    }
    rep
}

/// Re-checks the object witnesses of a report without search.
pub fn verify_object_witness(f: &Bifunctor, dst: &FinBicategory, report: &EngineReport) -> bool {
    report.object_witness.iter().enumerate().all(|(b, w)| match w {
        Some((a, e)) => {
            let c = &dst.one_cells[*e];
            c.source == f.objects[*a] && c.target == b && dst.one_inverse(*e).is_some()
        }
        None => false,
    })
}
