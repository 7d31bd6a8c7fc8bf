//! Dense matrices over the field with two elements.

use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix {
            rows,
            cols,
            data: alloc::vec![false; rows * cols],
        }
    }

    /// Reduces integer counts mod 2.
    pub fn from_counts(counts: &[Vec<u32>], rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, row) in counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                m.set(i, j, c % 2 == 1);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    /// `self * other`
    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    for j in 0..other.cols {
                        if other.get(k, j) {
                            let v = out.get(i, j);
                            out.set(i, j, !v);
                        }
                    }
                }
            }
        }
        out
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            if pivot != rank {
                for j in 0..m.cols {
                    let (a, b) = (m.get(pivot, j), m.get(rank, j));
                    m.set(pivot, j, b);
                    m.set(rank, j, a);
                }
            }
            for r in 0..m.rows {
                if r != rank && m.get(r, col) {
                    for j in 0..m.cols {
                        let v = m.get(r, j) ^ m.get(rank, j);
                        m.set(r, j, v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
