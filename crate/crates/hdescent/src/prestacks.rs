//! Concrete presheaves in bicategories on finite sets.
//!
//! The shipped instances are "cyclic 2-group" presheaves: over a set `S` there
//! is one object, 1-cells `(ℤ/h)^S` and automorphism 2-cells `(ℤ/k)^S` of each
//! 1-cell, optionally with `ℤ/2` acting on the 2-cells by sign.
//! Bundles are `h = n, k = 1`, trivial gerbes `h = 1, k = n`, and trivial
//! Jandl gerbes `h = 2, k = n` twisted.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::descent::bicategory::{Bifunctor, CellAlgebra, FinBicategory};
use crate::error::{Error, Result};
use crate::linear::is_prime;
use crate::site::{FiniteSet, SetMap};

pub type Rational = Ratio<i64>;

/// `ℤ/n` embedded in `ℚ/ℤ` as `{a/n}`, or all of `ℚ/ℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AbGroup {
    Cyclic(u64),
    RationalMod1,
}

/// Representative in `[0, 1)`.
pub fn mod1(x: Rational) -> Rational {
    x - x.floor()
}

impl AbGroup {
    pub fn zero(&self) -> Rational {
        Rational::zero()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            AbGroup::Cyclic(n) => (x * Rational::from(*n as i64)).is_integer(),
            AbGroup::RationalMod1 => true,
        }
    }

    pub fn add(&self, x: &Rational, y: &Rational) -> Rational {
        mod1(x + y)
    }

    pub fn neg(&self, x: &Rational) -> Rational {
        mod1(-x)
    }

    pub fn order(&self) -> Option<u64> {
        match self {
            AbGroup::Cyclic(n) => Some(*n),
            AbGroup::RationalMod1 => None,
        }
    }

    pub fn elements(&self) -> Option<Vec<Rational>> {
        self.order().map(|n| (0..n as i64).map(|a| Rational::new(a, n as i64)).collect())
    }

    /// Integer label of an element of `ℤ/n`.
    pub fn as_residue(&self, x: &Rational) -> Option<u64> {
        match self {
            AbGroup::Cyclic(n) if self.contains(x) => Some((mod1(*x) * Rational::from(*n as i64)).to_integer() as u64),
            _ => None,
        }
    }
}

/// A cyclic 2-group presheaf `S ↦ (pt, (ℤ/h)^S, (ℤ/k)^S)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicInstance {
    pub name: String,
    /// Order of the 1-cell group (1 means trivial).
    pub h: u64,
    /// Order of the 2-cell group (1 means trivial).
    pub k: u64,
    /// Odd 1-cells act on 2-cells by negation; requires `h = 2`.
    pub twisted: bool,
}

impl CyclicInstance {
    pub fn new(name: impl Into<String>, h: u64, k: u64, twisted: bool) -> Result<Self> {
        for n in [h, k] {
            if n != 1 && !is_prime(n) {
                return Err(Error::Unsupported(format!("coefficient order {n} is neither 1 nor prime")));
            }
        }
        if twisted && h != 2 {
            return Err(Error::Precondition("a sign action needs 1-cells in ℤ/2".into()));
        }
        Ok(CyclicInstance { name: name.into(), h, k, twisted })
    }

    /// `A`-bundles: a presheaf in categories, viewed with identity 2-cells.
    pub fn bun(n: u64) -> Self {
        Self::new(format!("Bun_Z{n}"), n, 1, false).expect("prime order")
    }

    /// Trivial `A`-gerbes, skeletal: the single trivial bundle with its `A`-valued automorphisms.
    pub fn grbtriv(n: u64) -> Self {
        Self::new(format!("Grbtriv_Z{n}"), 1, n, false).expect("prime order")
    }

    /// Trivial Jandl gerbes: 1-cells are orientation signs, 2-cells `A`-valued.
    pub fn jandl(n: u64) -> Self {
        Self::new(format!("JGrbtriv_Z{n}"), 2, n, true).expect("prime order")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        let (kind, n) = name
            .rsplit_once("_Z")
            .and_then(|(k, n)| n.parse::<u64>().ok().map(|n| (k, n)))
            .ok_or_else(|| Error::Parse(format!("unknown instance `{name}`; expected e.g. Grbtriv_Z2")))?;
        match kind {
            "Bun" => Self::new(name, n, 1, false),
            "Grbtriv" => Self::new(name, 1, n, false),
            "JGrbtriv" => Self::new(name, 2, n, true),
            _ => Err(Error::Parse(format!("unknown instance family `{kind}`"))),
        }
    }

    /// Sign by which a 1-cell value acts on 2-cells.
    pub fn sign(&self, a: u64) -> i64 {
        if self.twisted && a % 2 == 1 {
            -1
        } else {
            1
        }
    }

    /// `s·x` in `ℤ/k`.
    pub fn act(&self, a: u64, x: u64) -> u64 {
        if self.sign(a) < 0 {
            (self.k - x % self.k) % self.k
        } else {
            x
        }
    }

    /// The whole bicategory over `S`; errors if it has more than `limit` 2-cells.
    pub fn eval(&self, s: &FiniteSet, limit: u64) -> Result<FinBicategory> {
        let n = s.len() as u32;
        let total = (self.h * self.k).checked_pow(n).filter(|&t| t <= limit);
        if total.is_none() {
            return Err(Error::Unsupported(format!("{} over {} points exceeds the enumeration limit", self.name, n)));
        }
        let mut b = FinBicategory::new(format!("{}({})", self.name, s.labels().join(",")));
        b.add_object(vec![]);
        let values = |m: u64| std::iter::repeat(0..m).take(s.len()).multi_cartesian_product().collect::<Vec<Vec<u64>>>();
        let ones = if s.is_empty() { vec![vec![]] } else { values(self.h) };
        let twos = if s.is_empty() { vec![vec![]] } else { values(self.k) };
        for a in &ones {
            let f = b.add_one_cell(0, 0, a.clone());
            for x in &twos {
                b.add_two_cell(f, f, x.clone());
            }
        }
        let zero = vec![0; s.len()];
        let z2 = zero.clone();
        b.finish(&EvalAlgebra(self), |_| zero.clone(), |_| z2.clone())?;
        Ok(b)
    }

    /// Pullback `f*: X(T) → X(S)` along `f: S → T`, between already evaluated bicategories.
    pub fn pullback(&self, f: &SetMap, over_t: &FinBicategory, over_s: &FinBicategory) -> Result<Bifunctor> {
        let pull = |d: &[u64]| f.images().iter().map(|&i| d[i]).collect::<Vec<u64>>();
        let one_cells = over_t
            .one_cells
            .iter()
            .map(|c| over_s.one_cell_of(0, 0, &pull(&c.data)).ok_or_else(|| Error::Inconsistent("pulled 1-cell missing".into())))
            .collect::<Result<Vec<_>>>()?;
        let two_cells = over_t
            .two_cells
            .iter()
            .map(|c| {
                over_s
                    .two_cell_of(one_cells[c.source], one_cells[c.target], &pull(&c.data))
                    .ok_or_else(|| Error::Inconsistent("pulled 2-cell missing".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Bifunctor { objects: vec![0], one_cells, two_cells })
    }

    /// Checks `X(S ⊔ T) ≅ X(S) × X(T)` through the two restriction bifunctors:
    /// the pair of restrictions is bijective on 1-cells and on 2-cells.
    pub fn product_witness(&self, s: &FiniteSet, t: &FiniteSet, limit: u64) -> Result<bool> {
        let u = s.disjoint_union(t);
        let (bu, bs, bt) = (self.eval(&u, limit)?, self.eval(s, limit)?, self.eval(t, limit)?);
        let inc = |side: &FiniteSet, tag: &str| {
            let images = side.labels().iter().map(|l| u.index(&format!("{tag}:{l}")).unwrap()).collect();
            SetMap::new(side.clone(), u.clone(), images)
        };
        let (fs, ft) = (self.pullback(&inc(s, "0")?, &bu, &bs)?, self.pullback(&inc(t, "1")?, &bu, &bt)?);
        let ones: std::collections::BTreeSet<(usize, usize)> = (0..bu.one_cells.len()).map(|f| (fs.one_cells[f], ft.one_cells[f])).collect();
        let twos: std::collections::BTreeSet<(usize, usize)> = (0..bu.two_cells.len()).map(|x| (fs.two_cells[x], ft.two_cells[x])).collect();
        Ok(ones.len() == bu.one_cells.len()
            && ones.len() == bs.one_cells.len() * bt.one_cells.len()
            && twos.len() == bu.two_cells.len()
            && twos.len() == bs.two_cells.len() * bt.two_cells.len())
    }
}

struct EvalAlgebra<'a>(&'a CyclicInstance);

impl CellAlgebra for EvalAlgebra<'_> {
    fn compose1(&self, b: &FinBicategory, f: usize, g: usize) -> Vec<u64> {
        let (x, y) = (&b.one_cells[f].data, &b.one_cells[g].data);
        x.iter().zip(y).map(|(a, c)| (a + c) % self.0.h).collect()
    }

    fn vertical(&self, b: &FinBicategory, x: usize, y: usize) -> Vec<u64> {
        let (p, q) = (&b.two_cells[x].data, &b.two_cells[y].data);
        p.iter().zip(q).map(|(a, c)| (a + c) % self.0.k).collect()
    }

    /// `x` on `f`, then `y` on `g`: the composite is `g ⊗ f`, valued `y + s(g)·x`.
    fn horizontal(&self, b: &FinBicategory, x: usize, y: usize) -> Vec<u64> {
        let g = &b.one_cells[b.two_cells[y].source].data;
        let (p, q) = (&b.two_cells[x].data, &b.two_cells[y].data);
        (0..p.len()).map(|i| (q[i] + self.0.act(g[i], p[i])) % self.0.k).collect()
    }
}

/// A Jandl bundle over a finite set: bundle datum and orientation sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JandlBundle {
    pub group: AbGroup,
    pub p: Vec<Rational>,
    /// `+1` or `-1` per point.
    pub sigma: Vec<i8>,
}

impl JandlBundle {
    pub fn new(group: AbGroup, p: Vec<Rational>, sigma: Vec<i8>) -> Result<Self> {
        if p.len() != sigma.len() {
            return Err(Error::BaseMismatch("bundle and sign data have different bases".into()));
        }
        if sigma.iter().any(|s| *s != 1 && *s != -1) || p.iter().any(|x| !group.contains(x)) {
            return Err(Error::Precondition("values outside the coefficient groups".into()));
        }
        Ok(JandlBundle { group, p: p.into_iter().map(mod1).collect(), sigma })
    }

    pub fn unit(group: AbGroup, n: usize) -> Self {
        JandlBundle { group, p: vec![Rational::zero(); n], sigma: vec![1; n] }
    }

    /// `(P, σ) ⊗ (Q, μ) = (P ⊗ Q^σ, σμ)`, with `σ = -1` acting by inversion.
    pub fn tensor(&self, other: &JandlBundle) -> Result<JandlBundle> {
        if self.p.len() != other.p.len() || self.group != other.group {
            return Err(Error::BaseMismatch("Jandl bundles over different bases".into()));
        }
        let p = (0..self.p.len())
            .map(|i| mod1(self.p[i] + Rational::from(self.sigma[i] as i64) * other.p[i]))
            .collect();
        let sigma = self.sigma.iter().zip(&other.sigma).map(|(a, b)| a * b).collect();
        Ok(JandlBundle { group: self.group, p, sigma })
    }

    pub fn orientation_of(&self) -> Vec<i8> {
        self.sigma.clone()
    }

    pub fn pullback(&self, f: &SetMap) -> JandlBundle {
        JandlBundle {
            group: self.group,
            p: f.images().iter().map(|&i| self.p[i]).collect(),
            sigma: f.images().iter().map(|&i| self.sigma[i]).collect(),
        }
    }

    /// Morphisms `(P,σ) → (Q,μ)` exist only when the signs agree; they are then
    /// the `A`-valued functions `Q − P`.
    pub fn morphism_to(&self, other: &JandlBundle) -> Option<Vec<Rational>> {
        (self.sigma == other.sigma).then(|| self.p.iter().zip(&other.p).map(|(a, b)| mod1(b - a)).collect())
    }
}

/// Rank vectors, `ℕ`-matrices of dimensions, and rational matrices of linear maps
/// over a finite set: the 2-vector data over each point.
pub mod two_vect {
    use super::*;

    pub type NMatrix = Vec<Vec<u64>>;
    pub type QMatrix = Vec<Vec<Rational>>;

    /// 1-cell `m → n` over one point: an `n × m` matrix of dimensions.
    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct OneCell {
        pub dims: NMatrix,
    }

    /// 2-cell between 1-cells of equal shape: one linear map per entry.
    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct TwoCell {
        pub maps: Vec<Vec<QMatrix>>,
    }

    pub fn shape(m: &NMatrix) -> (usize, usize) {
        (m.len(), m.first().map_or(0, Vec::len))
    }

    /// `(W ∘ V)_ik = ⊕_j W_ij ⊗ V_jk`, dimension-wise.
    pub fn compose(v: &OneCell, w: &OneCell) -> Result<OneCell> {
        let (vr, vc) = shape(&v.dims);
        let (wr, wc) = shape(&w.dims);
        if wc != vr {
            return Err(Error::Precondition(format!("shapes {wr}x{wc} and {vr}x{vc} do not compose")));
        }
        Ok(OneCell {
            dims: (0..wr).map(|i| (0..vc).map(|k| (0..vr).map(|j| w.dims[i][j] * v.dims[j][k]).sum()).collect()).collect(),
        })
    }

    pub fn mat_mul(a: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
        let inner = a.first().map_or(0, Vec::len);
        if inner != b.len() {
            return Err(Error::Precondition("matrix shapes do not compose".into()));
        }
        let cols = b.first().map_or(0, Vec::len);
        Ok(a.iter()
            .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
            .collect())
    }

    /// Vertical composite `x` then `y`: entrywise product `y_ij · x_ij`.
    pub fn vertical(x: &TwoCell, y: &TwoCell) -> Result<TwoCell> {
        if x.maps.len() != y.maps.len() {
            return Err(Error::Precondition("2-cells of different shapes".into()));
        }
        let maps = x
            .maps
            .iter()
            .zip(&y.maps)
            .map(|(rx, ry)| rx.iter().zip(ry).map(|(a, b)| mat_mul(b, a)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(TwoCell { maps })
    }

    pub fn identity2(v: &OneCell) -> TwoCell {
        let id = |d: u64| -> QMatrix {
            (0..d as usize).map(|i| (0..d as usize).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
        };
        TwoCell { maps: v.dims.iter().map(|row| row.iter().map(|&d| id(d)).collect()).collect() }
    }

    /// Checks that every entry map has the shape `dim target × dim source`.
    pub fn two_cell_fits(x: &TwoCell, src: &OneCell, dst: &OneCell) -> bool {
        shape(&src.dims) == shape(&dst.dims)
            && x.maps.len() == src.dims.len()
            && x.maps.iter().enumerate().all(|(i, row)| {
                row.len() == src.dims[i].len()
                    && row.iter().enumerate().all(|(j, m)| {
                        m.len() as u64 == dst.dims[i][j] && m.iter().all(|r| r.len() as u64 == src.dims[i][j])
                    })
            })
    }

    fn square(m: &NMatrix) -> Result<usize> {
        let (r, c) = shape(m);
        if r != c {
            return Err(Error::Precondition(format!("matrix is {r}x{c}, not square")));
        }
        Ok(r)
    }

    /// Invertible over `ℕ` iff a permutation matrix.
    pub fn invertible_over_n(m: &NMatrix) -> Result<bool> {
        let n = square(m)?;
        let rows_ok = m.iter().all(|r| r.iter().sum::<u64>() == 1);
        let cols_ok = (0..n).all(|j| m.iter().map(|r| r[j]).sum::<u64>() == 1);
        Ok(rows_ok && cols_ok)
    }

    /// Determinant `±1`, the reading where inverses may have integer entries.
    pub fn invertible_over_z(m: &NMatrix) -> Result<bool> {
        let n = square(m)?;
        let mut a: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&x| Rational::from(x as i64)).collect()).collect();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Ok(false) };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= a[c][c];
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                for j in c..n {
                    let v = a[c][j];
                    a[r][j] -= f * v;
                }
            }
        }
        Ok(det == Rational::one() || det == -Rational::one())
    }

    /// Flag selecting which reading of invertibility is used.
    #[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub enum Invertibility {
        Natural,
        Integer,
    }

    pub fn twovect_invertible(m: &NMatrix, reading: Invertibility) -> Result<bool> {
        match reading {
            Invertibility::Natural => invertible_over_n(m),
            Invertibility::Integer => invertible_over_z(m),
        }
    }

    /// Oracle: searches all `ℕ`-matrices with entries `≤ max_entry` for a two-sided inverse.
    pub fn brute_force_inverse(m: &NMatrix, max_entry: u64) -> Result<Option<NMatrix>> {
        let n = square(m)?;
        let id: NMatrix = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        for cand in std::iter::repeat(0..=max_entry).take(n * n).multi_cartesian_product() {
            let b: NMatrix = cand.chunks(n.max(1)).map(|c| c.to_vec()).collect();
            let b = if n == 0 { vec![] } else { b };
            let prod = |x: &NMatrix, y: &NMatrix| -> NMatrix {
                (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
            };
            if prod(m, &b) == id && prod(&b, m) == id {
                return Ok(Some(b));
            }
        }
        Ok(None)
    }

    /// Rank vectors per point over a set `S`.
    pub type RankVector = BTreeMap<String, u64>;
}
