//! Finite truncated simplicial sets.
//!
//! Levels are indexed from 0. Faces `d_i: X_n -> X_{n-1}` and degeneracies
//! `s_i: X_n -> X_{n+1}` are stored as index tables.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialSet {
    /// Display names per level, in index order.
    pub names: Vec<Vec<String>>,
    /// `faces[n][i][x]` is `d_i(x)` for `x` in level `n` (entry 0 is empty).
    pub faces: Vec<Vec<Vec<usize>>>,
    /// `degens[n][i][x]` is `s_i(x)` for `x` in level `n` (present for `n < top`).
    pub degens: Vec<Vec<Vec<usize>>>,
}

impl SimplicialSet {
    pub fn top(&self) -> usize {
        self.names.len() - 1
    }

    pub fn size(&self, level: usize) -> usize {
        self.names[level].len()
    }

    pub fn face(&self, level: usize, i: usize, x: usize) -> usize {
        self.faces[level][i][x]
    }

    /// The face spanned by the vertex positions in `keep` (ascending).
    pub fn sub_simplex(&self, level: usize, x: usize, keep: &[usize]) -> usize {
        let mut alive: Vec<usize> = (0..=level).collect();
        let mut cur = x;
        let mut lvl = level;
        while alive.len() > keep.len() {
            let pos = alive.iter().position(|v| !keep.contains(v)).unwrap();
            cur = self.faces[lvl][pos][cur];
            alive.remove(pos);
            lvl -= 1;
        }
        cur
    }

    /// The `k`-th vertex of a simplex.
    pub fn vertex(&self, level: usize, x: usize, k: usize) -> usize {
        self.sub_simplex(level, x, &[k])
    }

    /// The edge from vertex `a` to vertex `b` (a < b) of a simplex.
    pub fn edge(&self, level: usize, x: usize, a: usize, b: usize) -> usize {
        self.sub_simplex(level, x, &[a, b])
    }

    /// Lists every violated simplicial identity (empty when all hold).
    pub fn identity_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let top = self.top();
        for n in 2..=top {
            for j in 0..n {
                for i in 0..=j {
                    for x in 0..self.size(n) {
                        let lhs = self.faces[n - 1][i][self.faces[n][j + 1][x]];
                        let rhs = self.faces[n - 1][j][self.faces[n][i][x]];
                        if lhs != rhs {
                            out.push(format!("d{i} d{} != d{j} d{i} at level {n} on {}", j + 1, self.names[n][x]));
                        }
                    }
                }
            }
        }
        for n in 0..self.degens.len() {
            for j in 0..self.degens[n].len() {
                for x in 0..self.size(n) {
                    let y = self.degens[n][j][x];
                    for i in 0..=n + 1 {
                        let got = self.faces[n + 1][i][y];
                        let want = if i == j || i == j + 1 {
                            Some(x)
                        } else if n == 0 {
                            None
                        } else if i < j {
                            Some(self.degens[n - 1][j - 1][self.faces[n][i][x]])
                        } else {
                            Some(self.degens[n - 1][j][self.faces[n][i - 1][x]])
                        };
                        if let Some(w) = want {
                            if got != w {
                                out.push(format!("d{i} s{j} mismatch at level {n} on {}", self.names[n][x]));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Simplicial set of a constant set: every level equals `names`, all maps are identities.
    pub fn constant(names: Vec<String>, top: usize) -> Self {
        let n = names.len();
        let id: Vec<usize> = (0..n).collect();
        let mut faces = vec![Vec::new()];
        let mut degens = Vec::new();
        for level in 1..=top {
            faces.push(vec![id.clone(); level + 1]);
        }
        for level in 0..top {
            degens.push(vec![id.clone(); level + 1]);
        }
        SimplicialSet { names: vec![names; top + 1], faces, degens }
    }
}

/// Simplicial map between two simplicial sets of the same height.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialMap {
    pub levels: Vec<Vec<usize>>,
}

impl SimplicialMap {
    pub fn identity(x: &SimplicialSet) -> Self {
        SimplicialMap { levels: (0..=x.top()).map(|n| (0..x.size(n)).collect()).collect() }
    }

    /// `self` followed by `g`.
    pub fn then(&self, g: &SimplicialMap) -> SimplicialMap {
        SimplicialMap {
            levels: self
                .levels
                .iter()
                .zip(&g.levels)
                .map(|(f, g)| f.iter().map(|&x| g[x]).collect())
                .collect(),
        }
    }

    /// Checks commutation with faces and degeneracies up to the common height.
    pub fn violations(&self, src: &SimplicialSet, dst: &SimplicialSet) -> Vec<String> {
        let mut out = Vec::new();
        let top = self.levels.len() - 1;
        for n in 1..=top {
            for i in 0..=n {
                for x in 0..src.size(n) {
                    if self.levels[n - 1][src.faces[n][i][x]] != dst.faces[n][i][self.levels[n][x]] {
                        out.push(format!("face d{i} at level {n} on {}", src.names[n][x]));
                    }
                }
            }
        }
        for n in 0..top.min(src.degens.len()).min(dst.degens.len()) {
            for j in 0..=n {
                for x in 0..src.size(n) {
                    if self.levels[n + 1][src.degens[n][j][x]] != dst.degens[n][j][self.levels[n][x]] {
                        out.push(format!("degeneracy s{j} at level {n} on {}", src.names[n][x]));
                    }
                }
            }
        }
        out
    }
}
