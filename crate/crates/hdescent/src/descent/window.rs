//! Linear model of descent for untwisted instances with prime coefficients.
//!
//! The descent bicategory of `Grbtriv` over a simplicial set `X` is the strict
//! Picard 2-groupoid of the truncated cochain complex `C⁰ → C¹ → C² → C³` of
//! `ℤ/p`-valued cochains: objects are 2-cocycles, 1-cells 1-cochains and
//! 2-cells 0-cochains. For `Bun` the complex is shifted by one. Iso classes,
//! automorphism classes and 2-automorphisms are `H²`, `H¹` and `H⁰`, and a
//! cochain map is an equivalence iff it is an isomorphism on all three.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupoidFunctor, GroupoidNerve, NatIso};
use crate::linear::{columns, SparseMat};
use crate::prestacks::CyclicInstance;
use crate::simplicial::{SimplicialMap, SimplicialSet};

/// Which cochain degrees sit in window degrees `0..=3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Shift {
    /// `W^n = C^n` (trivial gerbes).
    Gerbe,
    /// `W^n = C^{n-1}` (bundles).
    Bundle,
}

impl Shift {
    pub fn of(inst: &CyclicInstance) -> Result<(Shift, u64)> {
        match (inst.h, inst.k, inst.twisted) {
            (1, k, false) if k > 1 => Ok((Shift::Gerbe, k)),
            (h, 1, false) if h > 1 => Ok((Shift::Bundle, h)),
            _ => Err(Error::Unsupported(format!("{} has no linear model; use the explicit engine", inst.name))),
        }
    }

    fn level(self, n: usize) -> Option<usize> {
        match self {
            Shift::Gerbe => Some(n),
            Shift::Bundle => n.checked_sub(1),
        }
    }
}

/// `W⁰ → W¹ → W² → W³` over `F_p`; `d[i]` has shape `dims[i+1] × dims[i]`.
#[derive(Clone, Debug)]
pub struct Window {
    pub p: u64,
    pub shift: Shift,
    pub dims: [usize; 4],
    pub d: [SparseMat; 3],
}

/// Coboundary `C^n → C^{n+1}`, `(δc)(x) = Σ (−1)^i c(d_i x)`.
pub fn coboundary(x: &SimplicialSet, n: usize, p: u64) -> SparseMat {
    SparseMat::from_triplets(
        x.size(n + 1),
        x.size(n),
        p,
        (0..x.size(n + 1)).flat_map(|y| (0..=n + 1).map(move |i| (y, x.face(n + 1, i, y), if i % 2 == 0 { 1 } else { -1 }))),
    )
}

/// Cohomology dimensions and the induced counts `p^h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Homotopy {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    /// Iso classes of objects, `p^{h2}`.
    pub pi0: u64,
    /// 2-iso classes of automorphisms of an object, `p^{h1}`.
    pub pi1: u64,
    /// 2-automorphisms of an identity, `p^{h0}`.
    pub pi2: u64,
}

impl Window {
    pub fn new(x: &SimplicialSet, inst: &CyclicInstance) -> Result<Self> {
        let (shift, p) = Shift::of(inst)?;
        Self::from_simplicial(x, p, shift)
    }

    pub fn from_simplicial(x: &SimplicialSet, p: u64, shift: Shift) -> Result<Self> {
        let need = match shift {
            Shift::Gerbe => 3,
            Shift::Bundle => 2,
        };
        if x.top() < need {
            return Err(Error::Precondition(format!("window needs simplices up to level {need}")));
        }
        let size = |n: usize| shift.level(n).map_or(0, |l| x.size(l));
        let dims = [size(0), size(1), size(2), size(3)];
        let d = [0, 1, 2].map(|n| match shift.level(n) {
            Some(l) => coboundary(x, l, p),
            None => SparseMat::zero(dims[n + 1], dims[n], p),
        });
        Ok(Window { p, shift, dims, d })
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..2 {
            if !self.d[i + 1].mul(&self.d[i]).is_zero() {
                out.push(format!("d∘d ≠ 0 in degree {i}"));
            }
        }
        out
    }

    pub fn homotopy(&self) -> Homotopy {
        let r: Vec<usize> = self.d.iter().map(|m| m.rank()).collect();
        let h0 = self.dims[0] - r[0];
        let h1 = self.dims[1] - r[1] - r[0];
        let h2 = self.dims[2] - r[2] - r[1];
        let pw = |e: usize| self.p.checked_pow(e as u32).unwrap_or(u64::MAX);
        Homotopy { h0, h1, h2, pi0: pw(h2), pi1: pw(h1), pi2: pw(h0) }
    }

    /// Basis of cocycles in degree `i` as columns.
    fn cocycles(&self, i: usize) -> SparseMat {
        let k = self.d[i].to_dense().kernel();
        columns(&k, self.dims[i], self.p)
    }

    pub fn zero_map(&self, other: &Window) -> [SparseMat; 4] {
        [0, 1, 2, 3].map(|i| SparseMat::zero(other.dims[i], self.dims[i], self.p))
    }
}

/// Degree-wise maps `f[i]: A^i → B^i`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub f: [SparseMat; 4],
}

/// Which cohomology maps are injective / surjective, degrees 0..=2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiIsoReport {
    pub injective: [bool; 3],
    pub surjective: [bool; 3],
}

impl QuasiIsoReport {
    pub fn is_quasi_iso(&self) -> bool {
        self.injective.iter().chain(&self.surjective).all(|&b| b)
    }

    /// Equivalences on Hom categories: iso on `H⁰`, `H¹` and injective on `H²`.
    pub fn fully_faithful(&self) -> bool {
        self.injective.iter().all(|&b| b) && self.surjective[0] && self.surjective[1]
    }

    pub fn essentially_surjective(&self) -> bool {
        self.surjective[2]
    }
}

impl ChainMap {
    pub fn identity(w: &Window) -> Self {
        ChainMap { f: [0, 1, 2, 3].map(|i| SparseMat::identity(w.dims[i], w.p)) }
    }

    /// `self` followed by `g`.
    pub fn then(&self, g: &ChainMap) -> ChainMap {
        ChainMap { f: [0, 1, 2, 3].map(|i| g.f[i].mul(&self.f[i])) }
    }

    /// Pullback along a simplicial map `X′ → X`, from the window over `X` to the one over `X′`.
    pub fn pullback(m: &SimplicialMap, src: &Window, dst: &Window) -> ChainMap {
        ChainMap {
            f: [0, 1, 2, 3].map(|i| match src.shift.level(i) {
                Some(l) => SparseMat::from_function(&m.levels[l], src.dims[i], src.p),
                None => SparseMat::zero(dst.dims[i], src.dims[i], src.p),
            }),
        }
    }

    pub fn violations(&self, src: &Window, dst: &Window) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..4 {
            if (self.f[i].rows, self.f[i].cols) != (dst.dims[i], src.dims[i]) {
                return vec![format!("degree {i} has the wrong shape")];
            }
        }
        for i in 0..3 {
            if dst.d[i].mul(&self.f[i]) != self.f[i + 1].mul(&src.d[i]) {
                out.push(format!("map does not commute with d in degree {i}"));
            }
        }
        out
    }

    /// Rank test on cohomology: `dim im H^i(f) = rank[f Z^i | B'^i] − rank B'^i`.
    pub fn quasi_iso_report(&self, src: &Window, dst: &Window) -> QuasiIsoReport {
        let hs = src.homotopy();
        let ht = dst.homotopy();
        let (hs, ht) = ([hs.h0, hs.h1, hs.h2], [ht.h0, ht.h1, ht.h2]);
        let mut injective = [false; 3];
        let mut surjective = [false; 3];
        for i in 0..3 {
            let z = src.cocycles(i);
            let fz = self.f[i].mul(&z);
            let b = if i == 0 { SparseMat::zero(dst.dims[0], 0, dst.p) } else { dst.d[i - 1].clone() };
            let rb = b.rank();
            let image = fz.hcat(&b).rank() - rb;
            injective[i] = image == hs[i];
            surjective[i] = image == ht[i];
        }
        QuasiIsoReport { injective, surjective }
    }
}

/// A chain homotopy equivalence `f: A ⇄ B: g` with `h_a[j]: A^{j+1} → A^j` such
/// that `g f − 1 = d h + h d` in degrees 0..=2, and likewise on `B`.
#[derive(Clone, Debug)]
pub struct HomotopyEquivalence {
    pub f: ChainMap,
    pub g: ChainMap,
    pub h_a: [SparseMat; 3],
    pub h_b: [SparseMat; 3],
}

fn homotopy_defects(w: &Window, e: &ChainMap, h: &[SparseMat; 3], side: &str) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..3 {
        let lhs = e.f[i].sub(&SparseMat::identity(w.dims[i], w.p));
        let mut rhs = h[i].mul(&w.d[i]);
        if i > 0 {
            rhs = rhs.add(&w.d[i - 1].mul(&h[i - 1]));
        }
        if lhs != rhs {
            out.push(format!("homotopy identity fails on {side} in degree {i}"));
        }
    }
    out
}

impl HomotopyEquivalence {
    /// Exact re-check of every identity; empty iff the witness is valid.
    pub fn violations(&self, a: &Window, b: &Window) -> Vec<String> {
        let mut out = self.f.violations(a, b);
        out.extend(self.g.violations(b, a));
        if !out.is_empty() {
            return out;
        }
        out.extend(homotopy_defects(a, &self.f.then(&self.g), &self.h_a, "source"));
        out.extend(homotopy_defects(b, &self.g.then(&self.f), &self.h_b, "target"));
        out
    }
}

/// Nerve-level simplices `(F f₁,…,F f_i, η_{v_i}, G f_{i+1},…)` of the prism over `x`.
fn prism_simplices(
    x: &[usize],
    vertex: &[usize],
    f: &GroupoidFunctor,
    g: &GroupoidFunctor,
    eta: &NatIso,
) -> Vec<Vec<usize>> {
    let k = vertex.len();
    (0..k)
        .map(|i| {
            let mut s: Vec<usize> = x[..i].iter().map(|&m| f.f1[m]).collect();
            s.push(eta.component[vertex[i]]);
            s.extend(x[i..].iter().map(|&m| g.f1[m]));
            s
        })
        .collect()
}

/// Prism operator of `η: F ⇒ G` for `F, G: Γ → Λ`; `h[j]: C^{j+1}(Λ) → C^j(Γ)`
/// satisfies `δh + hδ = G* − F*`.
pub fn prism_homotopy(
    eta: &NatIso,
    f: &GroupoidFunctor,
    g: &GroupoidFunctor,
    src: &FiniteGroupoid,
    src_nerve: &GroupoidNerve,
    dst_nerve: &GroupoidNerve,
    p: u64,
    top: usize,
) -> Vec<SparseMat> {
    (0..top)
        .map(|j| {
            let rows = src_nerve.tuples[j].len();
            let cols = dst_nerve.tuples[j + 1].len();
            let mut entries = Vec::new();
            for (r, t) in src_nerve.tuples[j].iter().enumerate() {
                let (mors, vertices): (Vec<usize>, Vec<usize>) = if j == 0 {
                    (vec![], vec![t[0]])
                } else {
                    let mut v = vec![src.source[t[0]]];
                    v.extend(t.iter().map(|&m| src.target[m]));
                    (t.clone(), v)
                };
                for (i, s) in prism_simplices(&mors, &vertices, f, g, eta).into_iter().enumerate() {
                    let c = dst_nerve.index_of(j + 1, &s).expect("prism simplex is composable");
                    entries.push((r, c, if i % 2 == 0 { 1 } else { -1 }));
                }
            }
            SparseMat::from_triplets(rows, cols, p, entries)
        })
        .collect()
}

/// Window homotopy `W^{j+1} → W^j` from nerve-level prism matrices.
pub fn window_homotopy(prism: &[SparseMat], shift: Shift, a: &Window, b: &Window, sign: i64) -> [SparseMat; 3] {
    [0, 1, 2].map(|j| match (shift.level(j), shift.level(j + 1)) {
        (Some(l), Some(_)) => prism[l].scale(sign),
        _ => SparseMat::zero(b.dims[j], a.dims[j + 1], a.p),
    })
}

/// Windows and pullback map for a functor of groupoids, with nerves up to level 3.
pub struct FunctorWindows {
    pub src_nerve: GroupoidNerve,
    pub dst_nerve: GroupoidNerve,
    /// Window over the target groupoid (the pullback's source).
    pub over_dst: Window,
    pub over_src: Window,
    /// `F*: W(Λ) → W(Γ)`.
    pub pullback: ChainMap,
}

pub fn functor_windows(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid, inst: &CyclicInstance) -> Result<FunctorWindows> {
    let (src_nerve, dst_nerve) = (src.nerve(3), dst.nerve(3));
    let over_src = Window::new(&src_nerve.simplicial, inst)?;
    let over_dst = Window::new(&dst_nerve.simplicial, inst)?;
    let sm = f.on_nerves(&src_nerve, &dst_nerve);
    let pullback = ChainMap::pullback(&sm, &over_dst, &over_src);
    Ok(FunctorWindows { src_nerve, dst_nerve, over_dst, over_src, pullback })
}

/// Homotopy inverse of `F*` built from a quasi-inverse `G` of `F` and
/// natural isomorphisms `η: F·G ⇒ id_Γ`, `ε: G·F ⇒ id_Λ`.
pub fn pullback_inverse(
    fw: &FunctorWindows,
    f: &GroupoidFunctor,
    src: &FiniteGroupoid,
    dst: &FiniteGroupoid,
    g: &GroupoidFunctor,
    unit: &NatIso,
    counit: &NatIso,
) -> HomotopyEquivalence {
    let p = fw.over_dst.p;
    let shift = fw.over_dst.shift;
    let gm = g.on_nerves(&fw.dst_nerve, &fw.src_nerve);
    let g_star = ChainMap::pullback(&gm, &fw.over_src, &fw.over_dst);
    // on W(Λ): (G·F)* − 1 = −(δh_ε + h_ε δ)
    let id_dst = GroupoidFunctor::identity(dst);
    let h_eps = prism_homotopy(counit, &g.then(f), &id_dst, dst, &fw.dst_nerve, &fw.dst_nerve, p, 3);
    let id_src = GroupoidFunctor::identity(src);
    let h_eta = prism_homotopy(unit, &f.then(g), &id_src, src, &fw.src_nerve, &fw.src_nerve, p, 3);
    HomotopyEquivalence {
        f: fw.pullback.clone(),
        g: g_star,
        h_a: window_homotopy(&h_eps, shift, &fw.over_dst, &fw.over_dst, -1),
        h_b: window_homotopy(&h_eta, shift, &fw.over_src, &fw.over_src, -1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::explicit::DescentSpace;
    use crate::equivalence::strong_equivalence;
    use crate::group::FiniteGroup;
    use crate::groupoid::cech_projection;
    use crate::site::{cover_nerve, Cover, CoverClass, FiniteSet};

    fn pair_cover() -> Cover {
        Cover::from_fibers(&FiniteSet::new(["*"]).unwrap(), &[2], CoverClass::Surjection).unwrap()
    }

    #[test]
    fn window_counts_match_explicit_engine() {
        let nerves = [
            cover_nerve(&pair_cover(), 4).unwrap().simplicial,
            FiniteGroupoid::delooping(&FiniteGroup::cyclic(2)).nerve(3).simplicial,
            FiniteGroupoid::delooping(&FiniteGroup::cyclic(3)).nerve(3).simplicial,
        ];
        for x in &nerves {
            for inst in [CyclicInstance::grbtriv(2), CyclicInstance::bun(2), CyclicInstance::bun(3)] {
                let w = Window::new(x, &inst).unwrap();
                assert!(w.violations().is_empty());
                let hom = w.homotopy();
                let d = DescentSpace::new(&inst, x, false).unwrap().build(1 << 16).unwrap();
                assert_eq!(hom.pi0 as usize, d.n_iso_classes(), "{}", inst.name);
                let id = d.id1[0];
                assert_eq!(hom.pi2 as usize, d.hom2(id, id).len(), "{}", inst.name);
                let autos = d.hom1(0, 0);
                let classes = autos.iter().filter(|&&f| autos.iter().take_while(|&&g| g != f).all(|&g| d.two_isomorphic(g, f).is_none())).count();
                assert_eq!(hom.pi1 as usize, classes, "{}", inst.name);
            }
        }
    }

    #[test]
    fn twisted_instances_are_rejected() {
        let x = FiniteGroupoid::point().nerve(3).simplicial;
        assert!(Window::new(&x, &CyclicInstance::jandl(3)).is_err());
    }

    #[test]
    fn cech_projection_pullback_is_quasi_iso() {
        let c = Cover::from_fibers(&FiniteSet::numbered("m", 2), &[2, 3], CoverClass::Surjection).unwrap();
        let (cech, base, pi) = cech_projection(&c);
        for inst in [CyclicInstance::grbtriv(2), CyclicInstance::bun(3)] {
            let fw = functor_windows(&pi, &cech, &base, &inst).unwrap();
            assert!(fw.pullback.violations(&fw.over_dst, &fw.over_src).is_empty());
            assert!(fw.pullback.quasi_iso_report(&fw.over_dst, &fw.over_src).is_quasi_iso());
        }
    }

    #[test]
    fn collapsing_a_group_misses_nontrivial_bundles() {
        let b = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
        let pt = FiniteGroupoid::point();
        let f = GroupoidFunctor { f0: vec![0], f1: vec![0, 0] };
        let fw = functor_windows(&f, &b, &pt, &CyclicInstance::bun(2)).unwrap();
        let rep = fw.pullback.quasi_iso_report(&fw.over_dst, &fw.over_src);
        assert!(rep.fully_faithful());
        assert!(!rep.essentially_surjective());
    }

    #[test]
    fn prism_witness_certifies_strong_equivalence() {
        let c = Cover::from_fibers(&FiniteSet::numbered("m", 2), &[2, 1], CoverClass::Surjection).unwrap();
        let (cech, base, pi) = cech_projection(&c);
        let (s3c, s3b, s3pi) = cech_projection(&Cover::from_fibers(&FiniteSet::numbered("x", 1), &[3], CoverClass::Surjection).unwrap());
        for (f, src, dst) in [(&pi, &cech, &base), (&s3pi, &s3c, &s3b)] {
            let se = strong_equivalence(f, src, dst).unwrap();
            for inst in [CyclicInstance::grbtriv(3), CyclicInstance::bun(2)] {
                let fw = functor_windows(f, src, dst, &inst).unwrap();
                let he = pullback_inverse(&fw, f, src, dst, &se.quasi_inverse, &se.unit, &se.counit);
                assert_eq!(he.violations(&fw.over_dst, &fw.over_src), Vec::<String>::new(), "{}", inst.name);
            }
        }
    }
}
