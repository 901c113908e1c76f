//! Prestacks evaluated on groupoids: pullback along functors, transport along
//! natural isomorphisms, bisimplicial grids with their exchange isomorphism,
//! equivariant descent and the pullback-along-weak-equivalence harness.

use std::collections::HashMap;

use serde::Serialize;

use crate::descent::bicategory::{Bifunctor, FinBicategory};
use crate::descent::explicit::{pullback_descent, DescentMorphism, DescentObject, DescentSpace};
use crate::descent::window::{functor_windows, pullback_inverse, ChainMap, Homotopy, QuasiIsoReport, Shift, Window};
use crate::equivalence::{equivalence_report, factorize, fiber_power, fiber_power_objects, fiber_power_size, strong_equivalence, FiberPower};
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupoidFunctor, GroupoidNerve, NatIso};
use crate::linear::SparseMat;
use crate::prestacks::CyclicInstance;
use crate::simplicial::{SimplicialMap, SimplicialSet};

/// `X(Γ)`: the descent bicategory over the nerve of `Γ`.
pub fn eval_on_groupoid(inst: &CyclicInstance, g: &FiniteGroupoid, normalized: bool, limit: u64) -> Result<FinBicategory> {
    let nerve = g.nerve(3);
    DescentSpace::new(inst, &nerve.simplicial, normalized)?.build(limit)
}

/// Homotopy groups of `X(Γ)` from the linear model.
pub fn eval_homotopy(inst: &CyclicInstance, g: &FiniteGroupoid) -> Result<Homotopy> {
    Ok(Window::new(&g.nerve(3).simplicial, inst)?.homotopy())
}

/// `F*: X(Λ) → X(Γ)` with both bicategories.
pub struct Pullback {
    pub over_src: FinBicategory,
    pub over_dst: FinBicategory,
    pub functor: Bifunctor,
}

pub fn pullback_equivariant(
    inst: &CyclicInstance,
    f: &GroupoidFunctor,
    src: &FiniteGroupoid,
    dst: &FiniteGroupoid,
    normalized: bool,
    limit: u64,
) -> Result<Pullback> {
    let (ns, nd) = (src.nerve(3), dst.nerve(3));
    let over_src = DescentSpace::new(inst, &ns.simplicial, normalized)?.build(limit)?;
    let over_dst = DescentSpace::new(inst, &nd.simplicial, normalized)?.build(limit)?;
    let functor = pullback_descent(&f.on_nerves(&ns, &nd), &over_dst, &nd.simplicial, &over_src)?;
    Ok(Pullback { over_src, over_dst, functor })
}

/// Pullback of descent data along a simplicial map.
pub fn pull_object(m: &SimplicialMap, o: &DescentObject) -> DescentObject {
    DescentObject {
        p: m.levels[1].iter().map(|&i| o.p[i]).collect(),
        mu: m.levels[2].iter().map(|&i| o.mu[i]).collect(),
    }
}

/// Component at `o` of the transport `F* ⇒ G*` along `η: F ⇒ G`:
/// `A(x) = −P(η_x)` and `α(f) = s(P(η_x))·(μ(η_x, G f) − μ(F f, η_y))` for `f: x → y`.
pub fn interval_transport(
    inst: &CyclicInstance,
    eta: &NatIso,
    f: &GroupoidFunctor,
    g: &GroupoidFunctor,
    src: &FiniteGroupoid,
    dst_nerve: &GroupoidNerve,
    o: &DescentObject,
) -> DescentMorphism {
    let (h, k) = (inst.h, inst.k);
    let a = eta.component.iter().map(|&e| (h - o.p[e] % h) % h).collect();
    let mu = |x: usize, y: usize| o.mu[dst_nerve.index_of(2, &[x, y]).expect("composable pair")];
    let alpha = (0..src.n_morphisms())
        .map(|m| {
            let (x, y) = (src.source[m], src.target[m]);
            let (ex, ey) = (eta.component[x], eta.component[y]);
            let diff = (mu(ex, g.f1[m]) + k - mu(f.f1[m], ey)) % k;
            inst.act(o.p[ex], diff)
        })
        .collect();
    DescentMorphism { a, alpha }
}

/// A grid `Ω_{ij}` for `i + j ≤ total`: vertical simplicial sets (rows) and horizontal maps.
#[derive(Clone, Debug)]
pub struct BisimplicialData {
    /// `rows[i]` has levels `j = 0..=total − i`.
    pub rows: Vec<SimplicialSet>,
    /// `faces[i][k]: rows[i] → rows[i−1]` on levels `0..=total − i`; `faces[0]` is empty.
    pub faces: Vec<Vec<SimplicialMap>>,
    /// `degens[i][k]: rows[i] → rows[i+1]` on levels `0..=total − i − 1`.
    pub degens: Vec<Vec<SimplicialMap>>,
}

impl BisimplicialData {
    pub fn total(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn size(&self, i: usize, j: usize) -> usize {
        self.rows[i].size(j)
    }

    /// Swaps the two simplicial directions.
    pub fn transpose(&self) -> BisimplicialData {
        let t = self.total();
        let rows = (0..=t)
            .map(|j| SimplicialSet {
                names: (0..=t - j).map(|i| self.rows[i].names[j].clone()).collect(),
                faces: (0..=t - j)
                    .map(|i| if i == 0 { Vec::new() } else { self.faces[i].iter().map(|m| m.levels[j].clone()).collect() })
                    .collect(),
                degens: (0..t - j).map(|i| self.degens[i].iter().map(|m| m.levels[j].clone()).collect()).collect(),
            })
            .collect();
        let faces = (0..=t)
            .map(|j| {
                if j == 0 {
                    return Vec::new();
                }
                (0..=j)
                    .map(|k| SimplicialMap { levels: (0..=t - j).map(|i| self.rows[i].faces[j][k].clone()).collect() })
                    .collect()
            })
            .collect();
        let degens = (0..t)
            .map(|j| {
                (0..=j)
                    .map(|k| SimplicialMap { levels: (0..t - j).map(|i| self.rows[i].degens[j][k].clone()).collect() })
                    .collect()
            })
            .collect();
        BisimplicialData { rows, faces, degens }
    }

    /// Simplicial identities in both directions and commuting squares.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let maps = |g: &BisimplicialData, dir: &str, out: &mut Vec<String>| {
            for (i, row) in g.rows.iter().enumerate() {
                out.extend(row.identity_violations().into_iter().map(|v| format!("{dir} row {i}: {v}")));
                if i > 0 {
                    for (k, m) in g.faces[i].iter().enumerate() {
                        out.extend(m.violations(row, &g.rows[i - 1]).into_iter().map(|v| format!("{dir} face {k} at {i}: {v}")));
                    }
                }
                if i + 1 < g.rows.len() {
                    for (k, m) in g.degens[i].iter().enumerate() {
                        out.extend(m.violations(row, &g.rows[i + 1]).into_iter().map(|v| format!("{dir} degeneracy {k} at {i}: {v}")));
                    }
                }
            }
        };
        maps(self, "vertical", &mut out);
        maps(&self.transpose(), "horizontal", &mut out);
        out
    }

    /// Grid with every cell equal to the same set and all maps identities.
    pub fn constant(names: Vec<String>, total: usize) -> Self {
        let rows: Vec<SimplicialSet> = (0..=total).map(|i| SimplicialSet::constant(names.clone(), total - i)).collect();
        let id = |levels: usize| SimplicialMap { levels: vec![(0..names.len()).collect(); levels] };
        let faces = (0..=total).map(|i| if i == 0 { Vec::new() } else { vec![id(total - i + 1); i + 1] }).collect();
        let degens = (0..total).map(|i| vec![id(total - i); i + 1]).collect();
        BisimplicialData { rows, faces, degens }
    }
}

/// Offsets of the blocks `(i, n − i)` inside `Tot^n`.
fn tot_offsets(b: &BisimplicialData, n: usize) -> (Vec<usize>, usize) {
    let mut offs = Vec::new();
    let mut acc = 0;
    for i in 0..=n {
        offs.push(acc);
        acc += b.size(i, n - i);
    }
    (offs, acc)
}

/// `D = δ_h + (−1)^i δ_v` from `Tot^n` to `Tot^{n+1}`.
fn tot_differential(b: &BisimplicialData, n: usize, p: u64) -> SparseMat {
    let (src, cols) = tot_offsets(b, n);
    let (dst, rows) = tot_offsets(b, n + 1);
    let mut e = Vec::new();
    for i in 0..=n {
        let j = n - i;
        for x in 0..b.size(i + 1, j) {
            for (k, face) in b.faces[i + 1].iter().enumerate() {
                e.push((dst[i + 1] + x, src[i] + face.levels[j][x], if k % 2 == 0 { 1 } else { -1 }));
            }
        }
        for x in 0..b.size(i, j + 1) {
            for k in 0..=j + 1 {
                let sign = if (i + k) % 2 == 0 { 1 } else { -1 };
                e.push((dst[i] + x, src[i] + b.rows[i].face(j + 1, k, x), sign));
            }
        }
    }
    SparseMat::from_triplets(rows, cols, p, e)
}

/// Window of the total complex, shifted like the instance.
pub fn tot_window(b: &BisimplicialData, p: u64, shift: Shift) -> Result<Window> {
    if b.total() < 3 {
        return Err(Error::Precondition("total complex needs cells up to total degree 3".into()));
    }
    let tdim = |n: usize| tot_offsets(b, n).1;
    let (dims, d) = match shift {
        Shift::Gerbe => ([tdim(0), tdim(1), tdim(2), tdim(3)], [0, 1, 2].map(|n| tot_differential(b, n, p))),
        Shift::Bundle => (
            [0, tdim(0), tdim(1), tdim(2)],
            [SparseMat::zero(tdim(0), 0, p), tot_differential(b, 0, p), tot_differential(b, 1, p)],
        ),
    };
    Ok(Window { p, shift, dims, d })
}

/// The exchange `Tot(Ω) → Tot(Ωᵀ)`, block `(i, j) ↦ (j, i)` with sign `(−1)^{ij}`.
/// On the `(1,1)` block of total degree 2 this replaces `μ₁₁` by its inverse.
fn exchange_map(b: &BisimplicialData, t: &BisimplicialData, p: u64, shift: Shift) -> ChainMap {
    let block = |n: usize| {
        let (so, cols) = tot_offsets(b, n);
        let (to, rows) = tot_offsets(t, n);
        let mut e = Vec::new();
        for i in 0..=n {
            let j = n - i;
            let sign = if (i * j) % 2 == 0 { 1 } else { -1 };
            e.extend((0..b.size(i, j)).map(|x| (to[j] + x, so[i] + x, sign)));
        }
        SparseMat::from_triplets(rows, cols, p, e)
    };
    let f = match shift {
        Shift::Gerbe => [0, 1, 2, 3].map(block),
        Shift::Bundle => [SparseMat::zero(0, 0, p), block(0), block(1), block(2)],
    };
    ChainMap { f }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExchangeReport {
    pub dims: [usize; 4],
    pub grid_violations: Vec<String>,
    /// `ψ` commutes with the differentials.
    pub chain_map: bool,
    /// `ψᵀ ∘ ψ` is the identity in every degree.
    pub involutive: bool,
    pub first: Homotopy,
    pub second: Homotopy,
}

impl ExchangeReport {
    pub fn is_isomorphism(&self) -> bool {
        self.grid_violations.is_empty() && self.chain_map && self.involutive && self.first == self.second
    }
}

/// Both iterated homotopy limits of a grid and the exchange between them.
pub fn exchange(b: &BisimplicialData, inst: &CyclicInstance) -> Result<ExchangeReport> {
    let (shift, p) = Shift::of(inst)?;
    let t = b.transpose();
    let (w, wt) = (tot_window(b, p, shift)?, tot_window(&t, p, shift)?);
    let psi = exchange_map(b, &t, p, shift);
    let back = exchange_map(&t, b, p, shift);
    let round = psi.then(&back);
    let involutive = (0..4).all(|i| round.f[i] == SparseMat::identity(w.dims[i], p));
    Ok(ExchangeReport {
        dims: w.dims,
        grid_violations: b.violations(),
        chain_map: psi.violations(&w, &wt).is_empty(),
        involutive,
        first: w.homotopy(),
        second: wt.homotopy(),
    })
}

/// Map of fiber powers forgetting or repeating one factor.
fn power_functor(from: &FiberPower, to: &FiberPower, edit: impl Fn(&[usize]) -> Vec<usize>) -> GroupoidFunctor {
    let oi: HashMap<&[usize], usize> = to.object_tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let mi: HashMap<&[usize], usize> = to.morphism_tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    GroupoidFunctor {
        f0: from.object_tuples.iter().map(|t| oi[edit(t).as_slice()]).collect(),
        f1: from.morphism_tuples.iter().map(|t| mi[edit(t).as_slice()]).collect(),
    }
}

/// The tower `Ω_{ij} = (Λ^{[i+1]})_j` of a functor `F: Λ → Γ`, with its augmentation to `N Γ`.
pub struct DescentGrid {
    pub grid: BisimplicialData,
    pub powers: Vec<FiberPower>,
    pub augmentation: SimplicialMap,
    pub base_nerve: GroupoidNerve,
}

pub fn descent_grid(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid, total: usize) -> DescentGrid {
    let powers: Vec<FiberPower> = (0..=total)
        .map(|i| if i == total { fiber_power_objects(f, src, i + 1) } else { fiber_power(f, src, i + 1) })
        .collect();
    let nerves: Vec<GroupoidNerve> = (0..=total).map(|i| powers[i].groupoid.nerve(total - i)).collect();
    let faces = (0..=total)
        .map(|i| {
            if i == 0 {
                return Vec::new();
            }
            (0..=i)
                .map(|k| {
                    let fun = power_functor(&powers[i], &powers[i - 1], |t| {
                        let mut u = t.to_vec();
                        u.remove(k);
                        u
                    });
                    fun.on_nerves(&nerves[i], &nerves[i - 1])
                })
                .collect()
        })
        .collect();
    let degens = (0..total)
        .map(|i| {
            (0..=i)
                .map(|k| {
                    let edit = |t: &[usize]| {
                        let mut u = t.to_vec();
                        u.insert(k, t[k]);
                        u
                    };
                    let fun = if i + 1 == total {
                        // the top row is discrete, so only objects are mapped
                        let oi: HashMap<&[usize], usize> =
                            powers[i + 1].object_tuples.iter().enumerate().map(|(j, t)| (t.as_slice(), j)).collect();
                        GroupoidFunctor { f0: powers[i].object_tuples.iter().map(|t| oi[edit(t).as_slice()]).collect(), f1: Vec::new() }
                    } else {
                        power_functor(&powers[i], &powers[i + 1], edit)
                    };
                    fun.on_nerve_levels(&nerves[i], &nerves[i + 1], total - i - 1)
                })
                .collect()
        })
        .collect();
    let base_nerve = dst.nerve(total);
    let aug = GroupoidFunctor {
        f0: powers[0].object_tuples.iter().map(|t| f.f0[t[0]]).collect(),
        f1: powers[0].morphism_tuples.iter().map(|t| f.f1[t[0]]).collect(),
    };
    let augmentation = aug.on_nerves(&nerves[0], &base_nerve);
    let rows = nerves.into_iter().map(|n| n.simplicial).collect();
    DescentGrid { grid: BisimplicialData { rows, faces, degens }, powers, augmentation, base_nerve }
}

/// How much of the descent statement is demanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    /// Equivalences on Hom categories only.
    Prestack,
    /// Full equivalence.
    Stack,
}

impl std::str::FromStr for Strength {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prestack" => Ok(Strength::Prestack),
            "stack" => Ok(Strength::Stack),
            other => Err(Error::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

impl Strength {
    pub fn accepts(self, r: &QuasiIsoReport) -> bool {
        match self {
            Strength::Prestack => r.fully_faithful(),
            Strength::Stack => r.is_quasi_iso(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivariantDescentReport {
    pub grid_violations: Vec<String>,
    pub report: QuasiIsoReport,
    pub mode: Strength,
    pub holds: bool,
}

/// `X(Γ) → holim_i X(Λ^{[i+1]})` for a levelwise surjective `F: Λ → Γ`.
pub fn equivariant_descent(
    inst: &CyclicInstance,
    f: &GroupoidFunctor,
    src: &FiniteGroupoid,
    dst: &FiniteGroupoid,
    mode: Strength,
) -> Result<EquivariantDescentReport> {
    let (shift, p) = Shift::of(inst)?;
    let hit = |img: &[usize], n: usize| {
        let mut seen = vec![false; n];
        img.iter().for_each(|&i| seen[i] = true);
        seen.into_iter().all(|b| b)
    };
    if !hit(&f.f0, dst.n_objects()) || !hit(&f.f1, dst.n_morphisms()) {
        return Err(Error::Precondition("functor is not surjective on objects and morphisms".into()));
    }
    let dg = descent_grid(f, src, dst, 3);
    let w = tot_window(&dg.grid, p, shift)?;
    let wb = Window::from_simplicial(&dg.base_nerve.simplicial, p, shift)?;
    let (offs, _) = (0..4).map(|n| tot_offsets(&dg.grid, n)).fold((Vec::new(), ()), |(mut v, _), o| {
        v.push(o.0);
        (v, ())
    });
    let aug_block = |n: usize| -> SparseMat {
        let rows = tot_offsets(&dg.grid, n).1;
        let e = (0..dg.grid.size(0, n)).map(|x| (offs[n][0] + x, dg.augmentation.levels[n][x], 1));
        SparseMat::from_triplets(rows, dg.base_nerve.simplicial.size(n), p, e)
    };
    let eps = ChainMap {
        f: match shift {
            Shift::Gerbe => [0, 1, 2, 3].map(aug_block),
            Shift::Bundle => [SparseMat::zero(0, 0, p), aug_block(0), aug_block(1), aug_block(2)],
        },
    };
    let mut grid_violations = dg.grid.violations();
    grid_violations.extend(eps.violations(&wb, &w));
    let report = eps.quasi_iso_report(&wb, &w);
    let holds = grid_violations.is_empty() && mode.accepts(&report);
    Ok(EquivariantDescentReport { grid_violations, report, mode, holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessReport {
    pub mode: Strength,
    pub factorization: Vec<String>,
    /// `G*` has a verified homotopy inverse from the strong-equivalence data.
    pub strong_part: bool,
    /// Descent along the surjective part `H`.
    pub surjective_part: bool,
    /// Diagonals `Ω → Ω^{[n]}` are strong equivalences for `2 ≤ n ≤ diagonal_levels`.
    pub diagonals_strong: bool,
    /// Largest `n ≤ 4` whose power has at most [`DIAGONAL_MORPHISM_CAP`] morphisms (never below 2).
    pub diagonal_levels: usize,
    pub route: bool,
    pub direct: bool,
    pub agree: bool,
}

pub const DIAGONAL_MORPHISM_CAP: usize = 20_000;

/// Pullback along a weak equivalence, decided through `F = G·H` and directly.
pub fn pullback_harness(
    inst: &CyclicInstance,
    f: &GroupoidFunctor,
    src: &FiniteGroupoid,
    dst: &FiniteGroupoid,
    mode: Strength,
) -> Result<HarnessReport> {
    let er = equivalence_report(f, src, dst);
    if !er.fully_faithful {
        return Err(Error::Precondition("functor is not fully faithful".into()));
    }
    if !er.essentially_surjective(crate::site::CoverClass::Surjection) {
        return Err(Error::Precondition("functor is not essentially surjective".into()));
    }
    let fac = factorize(f, src, dst)?;
    let factorization = fac.violations(f, src, dst);
    let mid = &fac.middle;
    let strong_part = match strong_equivalence(&fac.g, src, mid) {
        Some(se) => {
            let fw = functor_windows(&fac.g, src, mid, inst)?;
            pullback_inverse(&fw, &fac.g, src, mid, &se.quasi_inverse, &se.unit, &se.counit)
                .violations(&fw.over_dst, &fw.over_src)
                .is_empty()
        }
        None => false,
    };
    let surjective_part = equivariant_descent(inst, &fac.h, mid, dst, mode)?.holds;
    let diagonal_levels = (3..=4)
        .take_while(|&n| fiber_power_size(&fac.h, n).1 <= DIAGONAL_MORPHISM_CAP)
        .last()
        .unwrap_or(2);
    let diagonals_strong = (2..=diagonal_levels).all(|n| {
        let fp = fiber_power(&fac.h, mid, n);
        strong_equivalence(&fp.diagonal, mid, &fp.groupoid).is_some_and(|se| se.violations(&fp.diagonal, mid, &fp.groupoid).is_empty())
    });
    let route = factorization.is_empty() && strong_part && surjective_part && diagonals_strong;
    let fw = functor_windows(f, src, dst, inst)?;
    let direct = mode.accepts(&fw.pullback.quasi_iso_report(&fw.over_dst, &fw.over_src));
    Ok(HarnessReport { mode, factorization, strong_part, surjective_part, diagonals_strong, diagonal_levels, route, direct, agree: route == direct })
}

/// Action of `G` on `M × ℤ/n` encoded by a bundle over the action groupoid:
/// `g·(m, s) = (g m, s + P(g, m))`, returned as a table indexed by `m·n + s`.
pub fn unfold_bundle_action(
    action: &FiniteGroupoid,
    group_order: usize,
    n: u64,
    p: &[u64],
) -> Result<Vec<Vec<usize>>> {
    let nn = n as usize;
    let mut table = vec![vec![usize::MAX; action.n_objects() * nn]; group_order];
    for m in 0..action.n_morphisms() {
        let label = action.morphisms.label(m);
        let g = label
            .trim_start_matches('(')
            .split(',')
            .next()
            .ok_or_else(|| Error::Parse(format!("morphism label `{label}`")))?;
        let gi = action_group_index(action, g)?;
        let (x, y) = (action.source[m], action.target[m]);
        for s in 0..nn {
            table[gi][x * nn + s] = y * nn + (s + p[m] as usize) % nn;
        }
    }
    if table.iter().flatten().any(|&v| v == usize::MAX) {
        return Err(Error::Inconsistent("action table is incomplete".into()));
    }
    Ok(table)
}

fn action_group_index(action: &FiniteGroupoid, g: &str) -> Result<usize> {
    let mut names: Vec<&str> = (0..action.n_morphisms())
        .map(|m| action.morphisms.label(m).trim_start_matches('(').split(',').next().unwrap_or(""))
        .collect();
    names.sort_unstable();
    names.dedup();
    names.iter().position(|&n| n == g).ok_or_else(|| Error::UnknownLabel(g.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::groupoid::cech_projection;
    use crate::site::{Cover, CoverClass, FiniteSet};

    fn swap_action() -> FiniteGroupoid {
        let m = FiniteSet::new(["a", "b"]).unwrap();
        FiniteGroupoid::action(&FiniteGroup::cyclic(2), &m, &[vec![0, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn bundles_on_delooping_are_homomorphisms() {
        let b = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
        let x = eval_on_groupoid(&CyclicInstance::bun(2), &b, false, 1 << 12).unwrap();
        assert_eq!(x.n_iso_classes(), 2);
        assert_eq!(eval_homotopy(&CyclicInstance::bun(2), &b).unwrap().pi0, 2);
    }

    #[test]
    fn free_action_matches_quotient_point() {
        let a = swap_action();
        let pt = FiniteGroupoid::point();
        let f = GroupoidFunctor { f0: vec![0, 0], f1: vec![0; a.n_morphisms()] };
        let pb = pullback_equivariant(&CyclicInstance::grbtriv(2), &f, &a, &pt, true, 1 << 12).unwrap();
        let r = crate::descent::bicategory::is_equivalence(&pb.functor, &pb.over_dst, &pb.over_src);
        assert!(r.equivalence(), "{:?}", r.failures);
    }

    fn conjugation_data() -> (FiniteGroupoid, GroupoidFunctor, GroupoidFunctor, NatIso) {
        let g = FiniteGroup::s3();
        let b = FiniteGroupoid::delooping(&g);
        let c = 1; // conjugate by a fixed element
        let conj = |x: usize| g.mul[g.mul[g.inverse(c)][x]][c];
        let f = GroupoidFunctor::identity(&b);
        let h = GroupoidFunctor { f0: vec![0], f1: (0..b.n_morphisms()).map(|m| conj(m)).collect() };
        // η: id ⇒ conj with component c^{-1} or c, whichever is natural
        let eta = [c, g.inverse(c)]
            .into_iter()
            .map(|e| NatIso { component: vec![e] })
            .find(|n| n.violations(&f, &h, &b, &b).is_empty())
            .expect("one orientation is natural");
        (b, f, h, eta)
    }

    #[test]
    fn transport_gives_descent_morphisms() {
        let (b, f, g, eta) = conjugation_data();
        let nerve = b.nerve(3);
        for inst in [CyclicInstance::grbtriv(2), CyclicInstance::bun(3), CyclicInstance::jandl(3)] {
            let space = DescentSpace::new(&inst, &nerve.simplicial, false).unwrap();
            let pulled_f = f.on_nerves(&nerve, &nerve);
            let pulled_g = g.on_nerves(&nerve, &nerve);
            for o in space.objects(1 << 14).unwrap().iter().take(40) {
                let m = interval_transport(&inst, &eta, &f, &g, &b, &nerve, o);
                let (a, c) = (pull_object(&pulled_f, o), pull_object(&pulled_g, o));
                assert!(space.morphism_violations(&a, &c, &m).is_empty(), "{}", inst.name);
            }
        }
    }

    #[test]
    fn identity_transport_is_identity() {
        let b = FiniteGroupoid::delooping(&FiniteGroup::cyclic(3));
        let nerve = b.nerve(3);
        let id = GroupoidFunctor::identity(&b);
        let eta = NatIso::identity(&id, &b);
        let inst = CyclicInstance::jandl(3);
        let space = DescentSpace::new(&inst, &nerve.simplicial, true).unwrap();
        for o in space.objects(1 << 14).unwrap() {
            let m = interval_transport(&inst, &eta, &id, &id, &b, &nerve, &o);
            assert!(m.a.iter().chain(&m.alpha).all(|&v| v == 0));
        }
    }

    #[test]
    fn constant_grid_exchange() {
        let g = BisimplicialData::constant(vec!["x".into(), "y".into()], 3);
        let r = exchange(&g, &CyclicInstance::grbtriv(2)).unwrap();
        assert!(r.is_isomorphism(), "{r:?}");
    }

    #[test]
    fn cover_grid_exchange_is_involutive() {
        let b = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
        let c = Cover::from_fibers(&b.objects, &[2], CoverClass::Surjection).unwrap();
        let cg = crate::plus::covering_groupoid(&b, &c).unwrap();
        let dg = descent_grid(&cg.projection, &cg.groupoid, &b, 3);
        for inst in [CyclicInstance::grbtriv(2), CyclicInstance::bun(2)] {
            let r = exchange(&dg.grid, &inst).unwrap();
            assert!(r.is_isomorphism(), "{r:?}");
        }
    }

    #[test]
    fn descent_along_cech_projection() {
        let c = Cover::from_fibers(&FiniteSet::numbered("m", 2), &[2, 1], CoverClass::Surjection).unwrap();
        let (cech, base, pi) = cech_projection(&c);
        let r = equivariant_descent(&CyclicInstance::grbtriv(3), &pi, &cech, &base, Strength::Stack).unwrap();
        assert!(r.holds, "{r:?}");
        let bad = GroupoidFunctor { f0: vec![0], f1: vec![0] };
        let two = FiniteGroupoid::trivial(&FiniteSet::numbered("m", 2));
        assert!(equivariant_descent(&CyclicInstance::grbtriv(3), &bad, &FiniteGroupoid::point(), &two, Strength::Stack).is_err());
    }

    #[test]
    fn harness_on_free_quotient() {
        let a = swap_action();
        let pt = FiniteGroupoid::point();
        let f = GroupoidFunctor { f0: vec![0, 0], f1: vec![0; a.n_morphisms()] };
        for mode in [Strength::Prestack, Strength::Stack] {
            let r = pullback_harness(&CyclicInstance::grbtriv(2), &f, &a, &pt, mode).unwrap();
            assert!(r.route && r.direct && r.agree, "{r:?}");
        }
        let b = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
        let collapse = GroupoidFunctor { f0: vec![0], f1: vec![0, 0] };
        assert!(pullback_harness(&CyclicInstance::grbtriv(2), &collapse, &b, &pt, Strength::Stack).is_err());
    }

    #[test]
    fn unfolded_action_covers_base_action() {
        let a = swap_action();
        let inst = CyclicInstance::bun(2);
        let nerve = a.nerve(3);
        let space = DescentSpace::new(&inst, &nerve.simplicial, false).unwrap();
        for o in space.objects(1 << 12).unwrap() {
            let t = unfold_bundle_action(&a, 2, 2, &o.p).unwrap();
            // identity acts trivially, the generator squares to the identity and covers the swap
            assert_eq!(t[0], (0..4).collect::<Vec<_>>());
            assert!((0..4).all(|v| t[1][t[1][v]] == v && t[1][v] / 2 != v / 2));
        }
    }
}
