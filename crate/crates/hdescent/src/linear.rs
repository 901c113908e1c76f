//! Linear algebra over the prime field `F_p`: sparse maps for cochain-level
//! witnesses, dense elimination for ranks, kernels and affine solution sets.

use std::fmt;

use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1;
    let (mut b, mut e) = (a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Reduces a signed integer into `0..p`.
pub fn reduce(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Row-major sparse matrix; each row holds `(column, value)` sorted by column, no zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMat {
    pub rows: usize,
    pub cols: usize,
    pub p: u64,
    data: Vec<Vec<(usize, u64)>>,
}

impl fmt::Debug for SparseMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMat({}x{} mod {}, nnz {})", self.rows, self.cols, self.p, self.nnz())
    }
}

impl SparseMat {
    pub fn zero(rows: usize, cols: usize, p: u64) -> Self {
        SparseMat { rows, cols, p, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        SparseMat { rows: n, cols: n, p, data: (0..n).map(|i| vec![(i, 1)]).collect() }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, p: u64, entries: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut data: Vec<Vec<(usize, u64)>> = vec![Vec::new(); rows];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            data[r].push((c, reduce(v, p)));
        }
        let mut m = SparseMat { rows, cols, p, data };
        m.canonicalize();
        m
    }

    /// Matrix of the pullback along `f: rows → cols` (one 1 per row).
    pub fn from_function(images: &[usize], cols: usize, p: u64) -> Self {
        Self::from_triplets(images.len(), cols, p, images.iter().enumerate().map(|(r, &c)| (r, c, 1)))
    }

    fn canonicalize(&mut self) {
        let p = self.p;
        for row in &mut self.data {
            row.sort_unstable_by_key(|e| e.0);
            let mut out: Vec<(usize, u64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match out.last_mut() {
                    Some(last) if last.0 == c => last.1 = (last.1 + v) % p,
                    _ => out.push((c, v % p)),
                }
            }
            out.retain(|e| e.1 != 0);
            *row = out;
        }
    }

    pub fn row(&self, r: usize) -> &[(usize, u64)] {
        &self.data[r]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r].binary_search_by_key(&c, |e| e.0).map(|i| self.data[r][i].1).unwrap_or(0)
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        self.data.iter().map(|row| row.iter().fold(0, |acc, &(c, a)| (acc + a * v[c]) % self.p)).collect()
    }

    /// `self · other`.
    pub fn mul(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut acc = vec![0u64; other.cols];
        let mut touched = Vec::new();
        let mut data = Vec::with_capacity(self.rows);
        for row in &self.data {
            for &(k, a) in row {
                for &(j, b) in &other.data[k] {
                    if acc[j] == 0 {
                        touched.push(j);
                    }
                    acc[j] = (acc[j] + a * b) % p;
                    if acc[j] == 0 {
                        // keep it marked; zero entries are dropped below
                        acc[j] = p;
                    }
                }
            }
            touched.sort_unstable();
            let out: Vec<(usize, u64)> =
                touched.iter().filter_map(|&j| { let v = acc[j] % p; acc[j] = 0; (v != 0).then_some((j, v)) }).collect();
            touched.clear();
            data.push(out);
        }
        SparseMat { rows: self.rows, cols: other.cols, p, data }
    }

    pub fn add(&self, other: &SparseMat) -> SparseMat {
        self.lin(other, 1)
    }

    pub fn sub(&self, other: &SparseMat) -> SparseMat {
        self.lin(other, self.p - 1)
    }

    fn lin(&self, other: &SparseMat, s: u64) -> SparseMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sum");
        let mut m = self.clone();
        for (r, row) in other.data.iter().enumerate() {
            m.data[r].extend(row.iter().map(|&(c, v)| (c, v * s % self.p)));
        }
        m.canonicalize();
        m
    }

    pub fn scale(&self, s: i64) -> SparseMat {
        let s = reduce(s, self.p);
        let mut m = self.clone();
        for row in &mut m.data {
            for e in row.iter_mut() {
                e.1 = e.1 * s % self.p;
            }
        }
        m.canonicalize();
        m
    }

    pub fn transpose(&self) -> SparseMat {
        let mut t = SparseMat::zero(self.cols, self.rows, self.p);
        for (r, row) in self.data.iter().enumerate() {
            for &(c, v) in row {
                t.data[c].push((r, v));
            }
        }
        t
    }

    pub fn to_dense(&self) -> DenseMat {
        let mut d = DenseMat::zero(self.rows, self.cols, self.p);
        for (r, row) in self.data.iter().enumerate() {
            for &(c, v) in row {
                d.set(r, c, v);
            }
        }
        d
    }

    pub fn rank(&self) -> usize {
        self.to_dense().rank()
    }

    /// Block matrix `[self | other]`.
    pub fn hcat(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.rows, other.rows);
        let mut m = self.clone();
        m.cols += other.cols;
        for (r, row) in other.data.iter().enumerate() {
            m.data[r].extend(row.iter().map(|&(c, v)| (c + self.cols, v)));
        }
        m
    }
}

/// Dense row-major matrix used for elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMat {
    pub rows: usize,
    pub cols: usize,
    pub p: u64,
    data: Vec<u32>,
}

/// Reduced row echelon form with pivot columns.
pub struct Echelon {
    pub matrix: DenseMat,
    pub pivots: Vec<usize>,
}

impl Echelon {
    /// Canonical representative of `v` modulo the row space.
    pub fn normal_form(&self, v: &[u64]) -> Vec<u64> {
        let p = self.matrix.p;
        let mut out: Vec<u64> = v.iter().map(|x| x % p).collect();
        for (i, &c) in self.pivots.iter().enumerate() {
            let f = out[c];
            if f != 0 {
                for (j, &rv) in self.matrix.row(i).iter().enumerate() {
                    out[j] = (out[j] + (p - f) * rv as u64) % p;
                }
            }
        }
        out
    }
}

impl DenseMat {
    pub fn zero(rows: usize, cols: usize, p: u64) -> Self {
        assert!(p < (1 << 31));
        DenseMat { rows, cols, p, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<i64>], cols: usize, p: u64) -> Self {
        let mut d = DenseMat::zero(rows.len(), cols, p);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &v) in row.iter().enumerate() {
                d.set(r, c, reduce(v, p));
            }
        }
        d
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c] as u64
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = (v % self.p) as u32;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Gauss-Jordan elimination with pivots chosen in column order.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let iv = inv_mod(m.get(r, c), p);
            for j in c..m.cols {
                let v = m.get(r, j) * iv % p;
                m.set(r, j, v);
            }
            let pivot_row: Vec<u32> = m.row(r)[c..].to_vec();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                let base = i * m.cols;
                for (off, &pv) in pivot_row.iter().enumerate() {
                    if pv != 0 {
                        let j = base + c + off;
                        m.data[j] = ((m.data[j] as u64 + (p - f) * pv as u64) % p) as u32;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let e = self.echelon();
        let p = self.p;
        let free: Vec<usize> = (0..self.cols).filter(|c| !e.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (r, &pc) in e.pivots.iter().enumerate() {
                    v[pc] = (p - e.matrix.get(r, f)) % p;
                }
                v
            })
            .collect()
    }

    /// All solutions of `self · x = b` as a particular solution plus a kernel basis.
    pub fn solve(&self, b: &[u64]) -> Option<AffineSpace> {
        assert_eq!(b.len(), self.rows);
        let mut aug = DenseMat::zero(self.rows, self.cols + 1, self.p);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let e = aug.echelon();
        if e.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut particular = vec![0u64; self.cols];
        for (r, &pc) in e.pivots.iter().enumerate() {
            particular[pc] = e.matrix.get(r, self.cols);
        }
        Some(AffineSpace { p: self.p, particular, basis: self.kernel() })
    }
}

/// `particular + span(basis)` over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSpace {
    pub p: u64,
    pub particular: Vec<u64>,
    pub basis: Vec<Vec<u64>>,
}

impl AffineSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of points, if it fits below `limit`.
    pub fn size_below(&self, limit: u64) -> Option<u64> {
        let mut n: u64 = 1;
        for _ in 0..self.dim() {
            n = n.checked_mul(self.p).filter(|&n| n <= limit)?;
        }
        Some(n)
    }

    /// Every point, in lexicographic order of coefficients.
    pub fn points(&self, limit: u64) -> Result<Vec<Vec<u64>>> {
        let n = self
            .size_below(limit)
            .ok_or_else(|| Error::Unsupported(format!("solution space of dimension {} exceeds the enumeration limit", self.dim())))?;
        let mut out = Vec::with_capacity(n as usize);
        let mut coeff = vec![0u64; self.dim()];
        for _ in 0..n {
            let mut v = self.particular.clone();
            for (k, b) in self.basis.iter().enumerate() {
                if coeff[k] != 0 {
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi = (*vi + coeff[k] * bi) % self.p;
                    }
                }
            }
            out.push(v);
            for c in coeff.iter_mut().rev() {
                *c += 1;
                if *c < self.p {
                    break;
                }
                *c = 0;
            }
        }
        Ok(out)
    }
}

/// Matrix with the given vectors as columns.
pub fn columns(vectors: &[Vec<u64>], rows: usize, p: u64) -> SparseMat {
    SparseMat::from_triplets(
        rows,
        vectors.len(),
        p,
        vectors.iter().enumerate().flat_map(|(c, v)| v.iter().enumerate().filter(|e| *e.1 != 0).map(move |(r, &x)| (r, c, x as i64))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_kernel_solve() {
        let m = DenseMat::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, -1]], 3, 3);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        let s = m.to_sparse().apply(&k[0]);
        assert!(s.iter().all(|&x| x == 0));
        let sol = m.solve(&[1, 1, 0]).unwrap();
        assert_eq!(sol.points(100).unwrap().len(), 3);
        assert!(m.solve(&[1, 0, 0]).is_none());
    }

    #[test]
    fn sparse_products() {
        let a = SparseMat::from_triplets(2, 2, 2, [(0, 0, 1), (0, 1, 1), (1, 1, 1)]);
        assert_eq!(a.mul(&a), SparseMat::from_triplets(2, 2, 2, [(0, 0, 1), (1, 1, 1)]));
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.scale(3), a);
    }
}

impl DenseMat {
    pub fn to_sparse(&self) -> SparseMat {
        SparseMat::from_triplets(
            self.rows,
            self.cols,
            self.p,
            (0..self.rows).flat_map(|r| (0..self.cols).filter(move |&c| self.get(r, c) != 0).map(move |c| (r, c, self.get(r, c) as i64))),
        )
    }
}
