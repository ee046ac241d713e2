//! Small dense square matrices (the structure matrix `a` has size 1..=3).

use serde::{Deserialize, Serialize};

/// A row-major n×n matrix of f64, n ∈ {1, 2, 3} in practice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SmallMatrix {
    pub fn zeros(n: usize) -> Self {
        SmallMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SmallMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "rows must form a square matrix");
            data.extend_from_slice(row);
        }
        SmallMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> SmallMatrix {
        let mut t = SmallMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(i, j, self.get(j, i));
            }
        }
        t
    }

    pub fn mul(&self, other: &SmallMatrix) -> SmallMatrix {
        assert_eq!(self.n, other.n);
        let mut out = SmallMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = 0.0;
                for k in 0..self.n {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn sub(&self, other: &SmallMatrix) -> SmallMatrix {
        assert_eq!(self.n, other.n);
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        SmallMatrix { n: self.n, data }
    }

    /// Max absolute entry.
    pub fn inf_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max |m_ij - m_ji|.
    pub fn symmetry_defect(&self) -> f64 {
        self.sub(&self.transpose()).inf_norm()
    }

    /// Max |m_ij + m_ji|; zero for an antisymmetric matrix.
    pub fn add_transpose_norm(&self) -> f64 {
        let t = self.transpose();
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self.get(i, j) + t.get(i, j)).abs());
            }
        }
        worst
    }

    /// Determinant by direct expansion (n ≤ 3).
    pub fn det(&self) -> f64 {
        match self.n {
            0 => 1.0,
            1 => self.get(0, 0),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            3 => {
                let m = |i, j| self.get(i, j);
                m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                    - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
            }
            n => panic!("determinant not implemented for n = {n}"),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}
