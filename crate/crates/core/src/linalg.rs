//! Dense exact linear algebra over F_p: row reduction, nullspaces and the
//! small matrix operations the singularity classifiers need.

use crate::field::FpScalar;

/// Row-major dense matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    pub rows: usize,
    pub cols: usize,
    p: u64,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize, p: u64) -> Self {
        FpMatrix {
            rows,
            cols,
            p,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        let mut m = FpMatrix::zeros(n, n, p);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>], p: u64) -> Self {
        let r = rows.len();
        let c = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut m = FpMatrix::zeros(r, c, p);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, FpScalar::new(v, p).value() as i64);
            }
        }
        m
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = FpScalar::new(v, self.p).value();
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.p, other.p);
        let mut out = FpMatrix::zeros(self.rows, other.cols, self.p);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = (out.get(i, j) + a * other.get(k, j)) % self.p;
                    out.data[i * out.cols + j] = v;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * v[j])
                    .sum::<u64>()
                    % self.p
            })
            .collect()
    }

    pub fn pow(&self, e: u64) -> FpMatrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = FpMatrix::identity(self.rows, self.p);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Nilpotency test: M^n = 0 for an n×n matrix.
    pub fn is_nilpotent(&self) -> bool {
        assert_eq!(self.rows, self.cols);
        self.pow(self.rows as u64).is_zero()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for j in 0..self.cols {
                    self.data.swap(row * self.cols + j, pr * self.cols + j);
                }
            }
            let inv = FpScalar::new(self.get(row, col) as i64, self.p).inv().value();
            for j in 0..self.cols {
                let v = (self.get(row, j) * inv) % self.p;
                self.data[row * self.cols + j] = v;
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let v = (self.get(r, j) + (self.p - factor % self.p) * self.get(row, j))
                        % self.p;
                    self.data[r * self.cols + j] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right nullspace {v : M v = 0}, one vector per free
    /// column, in deterministic column order.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                let coeff = m.get(r, free);
                if coeff != 0 {
                    v[pc] = (self.p - coeff) % self.p;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Invert a square matrix; panics if singular (callers guarantee
    /// invertibility by construction).
    pub fn inverse(&self) -> FpMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = FpMatrix::zeros(n, 2 * n, self.p);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j) as i64);
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.rref();
        assert_eq!(pivots, (0..n).collect::<Vec<_>>(), "singular matrix");
        let mut out = FpMatrix::zeros(n, n, self.p);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j) as i64);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_rank() {
        let m = FpMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]], 5);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn nullspace_is_kernel() {
        let m = FpMatrix::from_rows(&[vec![1, 1, 0], vec![0, 0, 1]], 3);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        for v in &ns {
            assert!(m.matvec(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn nilpotency() {
        let z = FpMatrix::zeros(2, 2, 3);
        assert!(z.is_nilpotent());
        let jordan = FpMatrix::from_rows(&[vec![0, 1], vec![0, 0]], 3);
        assert!(jordan.is_nilpotent());
        let id = FpMatrix::identity(2, 3);
        assert!(!id.is_nilpotent());
        let swap = FpMatrix::from_rows(&[vec![0, 1], vec![1, 0]], 2);
        assert!(!swap.is_nilpotent());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = FpMatrix::from_rows(&[vec![1, 2], vec![3, 4]], 5);
        let inv = m.inverse();
        assert_eq!(m.mul(&inv), FpMatrix::identity(2, 5));
    }
}
