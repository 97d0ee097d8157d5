use crate::error::{Error, Result};
use crate::graph::Graph;

/// Dense square integer matrix with overflow-checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i128>,
}

fn overflow() -> Error {
    Error::Domain("integer overflow in matrix recursion; lower the order".into())
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            data: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn adjacency(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut m = Self::zeros(n);
        for u in 0..n {
            for &v in g.neighbors(u) {
                m.data[u * n + v] = 1;
            }
        }
        m
    }

    /// `Q = Deg - I`.
    pub fn degree_minus_identity(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut m = Self::zeros(n);
        for v in 0..n {
            m.data[v * n + v] = g.degree(v) as i128 - 1;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> i128 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.n).map(|i| self.data[i * self.n + i]).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_add(*b).ok_or_else(overflow))
            .collect::<Result<_>>()?;
        Ok(IntMatrix { n: self.n, data })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_sub(*b).ok_or_else(overflow))
            .collect::<Result<_>>()?;
        Ok(IntMatrix { n: self.n, data })
    }

    /// `self * A_G`, exploiting the sparsity of the adjacency matrix.
    pub fn times_adjacency(&self, g: &Graph) -> Result<Self> {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            for j in 0..n {
                let mut acc: i128 = 0;
                for &l in g.neighbors(j) {
                    acc = acc.checked_add(row[l]).ok_or_else(overflow)?;
                }
                out.data[i * n + j] = acc;
            }
        }
        Ok(out)
    }

    /// `self * D` for a diagonal matrix given by its diagonal.
    pub fn times_diagonal(&self, diag: &[i128]) -> Result<Self> {
        let n = self.n;
        let mut out = self.clone();
        for row in out.data.chunks_mut(n.max(1)) {
            for (x, d) in row.iter_mut().zip(diag) {
                *x = x.checked_mul(*d).ok_or_else(overflow)?;
            }
        }
        Ok(out)
    }

    /// Rows as `f64`, for spectral computations.
    pub fn to_f64_rows(&self) -> Vec<f64> {
        self.data.iter().map(|&x| x as f64).collect()
    }
}
