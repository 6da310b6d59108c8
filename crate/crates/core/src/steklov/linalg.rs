//! Sparse symmetric matrices: CSR storage for products, skyline storage
//! for Cholesky factorization.

use crate::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Square matrix from `(row, col, value)` triplets; duplicates are summed
    /// in triplet order.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) out of range for n = {n}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>())
            .sum()
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &CsrMatrix) -> CsrMatrix {
        let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            t.extend(self.row(i).map(|(j, v)| (i, j, v)));
            t.extend(other.row(i).map(|(j, v)| (i, j, s * v)));
        }
        CsrMatrix::from_triplets(self.n, t)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] += v;
            }
        }
        d
    }
}

/// Cholesky factor `L` of a symmetric positive definite matrix, stored by
/// rows from the first structurally nonzero column to the diagonal.
#[derive(Clone, Debug)]
pub struct SkylineCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    /// Factors the lower triangle of `a`.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let first: Vec<usize> = (0..n)
            .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i))
            .collect();
        let mut start = vec![0; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    data[start[i] + j - first[i]] += v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = data[start[i] + j - fi];
                let ri = &data[start[i] + k0 - fi..start[i] + j - fi];
                let rj = &data[start[j] + k0 - fj..start[j] + j - fj];
                s -= ri.iter().zip(rj).map(|(x, y)| x * y).sum::<f64>();
                if j < i {
                    data[start[i] + j - fi] = s / data[start[j + 1] - 1];
                } else {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                    }
                    data[start[i + 1] - 1] = s.sqrt();
                }
            }
        }
        Ok(SkylineCholesky { first, start, data })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Solves `L L^T x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = b.to_vec();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&x[fi..i]).map(|(l, y)| l * y).sum();
            x[i] = (x[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            x[i] /= row[i - fi];
            let xi = x[i];
            for (l, y) in row[..i - fi].iter().zip(&mut x[fi..i]) {
                *y -= l * xi;
            }
        }
        x
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn triplets_are_summed() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0)]);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.to_dense(), vec![vec![4.0, 0.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn cholesky_solves_tridiagonal() {
        let a = laplacian_1d(50);
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x);
        let y = SkylineCholesky::factor(&a).unwrap().solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_handles_profile_gaps() {
        let t = vec![
            (0, 0, 4.0),
            (1, 1, 5.0),
            (2, 2, 6.0),
            (2, 0, 1.0),
            (0, 2, 1.0),
            (2, 1, 2.0),
            (1, 2, 2.0),
        ];
        let a = CsrMatrix::from_triplets(3, t);
        let b = [1.0, 2.0, 3.0];
        let x = SkylineCholesky::factor(&a).unwrap().solve(&b);
        let r = a.mul_vec(&x);
        for (u, v) in r.iter().zip(b) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = laplacian_1d(4).add_scaled(-3.0, &CsrMatrix::from_triplets(4, (0..4).map(|i| (i, i, 1.0)).collect()));
        assert!(matches!(
            SkylineCholesky::factor(&a),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
