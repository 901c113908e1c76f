//! Finite groups given by multiplication tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    pub names: Vec<String>,
    /// `mul[a][b] = a·b`.
    pub mul: Vec<Vec<usize>>,
    pub unit: usize,
}

impl FiniteGroup {
    pub fn from_table(names: Vec<String>, mul: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 || mul.len() != n || mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::Precondition("group table must be square over its elements".into()));
        }
        let unit = (0..n)
            .find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a))
            .ok_or_else(|| Error::Precondition("group table has no unit".into()))?;
        for a in 0..n {
            if !(0..n).any(|b| mul[a][b] == unit) {
                return Err(Error::Precondition(format!("element {} has no inverse", names[a])));
            }
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(Error::Precondition("group table is not associative".into()));
                    }
                }
            }
        }
        Ok(FiniteGroup { names, mul, unit })
    }

    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup { names: (0..n).map(|i| i.to_string()).collect(), mul, unit: 0 }
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn product(&self, other: &FiniteGroup) -> FiniteGroup {
        let m = other.order();
        let names = self
            .names
            .iter()
            .flat_map(|a| other.names.iter().map(move |b| format!("({a},{b})")))
            .collect();
        let n = self.order() * m;
        let mul = (0..n)
            .map(|x| (0..n).map(|y| self.mul[x / m][y / m] * m + other.mul[x % m][y % m]).collect())
            .collect();
        FiniteGroup { names, mul, unit: self.unit * m + other.unit }
    }

    /// Symmetric group on three letters.
    pub fn s3() -> Self {
        let perms: Vec<[usize; 3]> =
            vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mul = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        let names = perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect();
        FiniteGroup { names, mul, unit: 0 }
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.mul[a][b] == self.unit).unwrap()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.unit {
            x = self.mul[x][a];
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    /// An isomorphism `self → other` found by backtracking, if any.
    pub fn isomorphism_to(&self, other: &FiniteGroup) -> Option<Vec<usize>> {
        let n = self.order();
        if n != other.order() {
            return None;
        }
        let mut ord_a: Vec<usize> = (0..n).map(|a| self.element_order(a)).collect();
        let mut ord_b: Vec<usize> = (0..n).map(|b| other.element_order(b)).collect();
        let (oa, ob) = (ord_a.clone(), ord_b.clone());
        ord_a.sort();
        ord_b.sort();
        if ord_a != ord_b {
            return None;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn rec(
            g: &FiniteGroup,
            h: &FiniteGroup,
            oa: &[usize],
            ob: &[usize],
            i: usize,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            let n = g.order();
            if i == n {
                return (0..n).all(|a| (0..n).all(|b| map[g.mul[a][b]] == h.mul[map[a]][map[b]]));
            }
            for j in 0..n {
                if used[j] || oa[i] != ob[j] {
                    continue;
                }
                map[i] = j;
                used[j] = true;
                let ok = (0..=i).all(|a| {
                    (0..=i).all(|b| {
                        let ab = g.mul[a][b];
                        ab > i || map[ab] == h.mul[map[a]][map[b]]
                    })
                });
                if ok && rec(g, h, oa, ob, i + 1, map, used) {
                    return true;
                }
                used[j] = false;
                map[i] = usize::MAX;
            }
            false
        }
        rec(self, other, &oa, &ob, 0, &mut map, &mut used).then_some(map)
    }
}
