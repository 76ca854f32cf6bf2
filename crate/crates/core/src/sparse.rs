//! Minimal square sparse matrices over `Complex64`, sized for vectorized
//! superoperators (dimension 4^N). Kronecker products are formed directly on
//! triplets so the full superoperator is never densified.

use num_complex::Complex64;

/// Square matrix in triplet (COO) form; duplicates are allowed and sum.
#[derive(Debug, Clone)]
pub(crate) struct Coo {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl Coo {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    /// Captures the nonzero entries of a dense column-major matrix.
    pub fn from_dense(m: &nalgebra::DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "sparse conversion expects a square matrix");
        let dim = m.nrows();
        let mut entries = Vec::new();
        for c in 0..dim {
            for r in 0..dim {
                let v = m[(r, c)];
                if v != Complex64::ZERO {
                    entries.push((r, c, v));
                }
            }
        }
        Self { dim, entries }
    }

    /// Identity of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let entries = (0..dim).map(|i| (i, i, Complex64::ONE)).collect();
        Self { dim, entries }
    }

    /// Kronecker product `self ⊗ other`; index layout `(i_a * dim_b + i_b)`.
    pub fn kron(&self, other: &Coo) -> Coo {
        let dim = self.dim * other.dim;
        let mut entries = Vec::with_capacity(self.entries.len() * other.entries.len());
        for &(ra, ca, va) in &self.entries {
            for &(rb, cb, vb) in &other.entries {
                entries.push((ra * other.dim + rb, ca * other.dim + cb, va * vb));
            }
        }
        Coo { dim, entries }
    }

    /// Adds `scale * other` into `self`.
    pub fn add_scaled(&mut self, other: &Coo, scale: Complex64) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sparse sum");
        self.entries
            .extend(other.entries.iter().map(|&(r, c, v)| (r, c, scale * v)));
    }
}

/// Compressed sparse row matrix with coalesced, column-sorted rows.
#[derive(Debug, Clone)]
pub(crate) struct Csr {
    pub dim: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<Complex64>,
}

impl Csr {
    /// Builds from triplets, summing duplicates and dropping exact zeros.
    pub fn from_coo(coo: &Coo) -> Self {
        let dim = coo.dim;
        let mut sorted: Vec<(usize, usize, Complex64)> = coo.entries.clone();
        sorted.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut indptr = vec![0usize; dim + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut data = Vec::with_capacity(sorted.len());
        let mut iter = sorted.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v != Complex64::ZERO {
                indices.push(c);
                data.push(v);
                indptr[r + 1] += 1;
            }
        }
        for r in 0..dim {
            indptr[r + 1] += indptr[r];
        }
        Self { dim, indptr, indices, data }
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// Matrix-vector product `y = A x`.
    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim, "dimension mismatch in matvec");
        let mut y = vec![Complex64::ZERO; self.dim];
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            *out = acc;
        }
        y
    }

    /// Replaces one row with the given sparse entries (column-sorted).
    pub fn replace_row(&self, row: usize, entries: &[(usize, Complex64)]) -> Csr {
        assert!(row < self.dim);
        let mut indptr = vec![0usize; self.dim + 1];
        let mut indices = Vec::with_capacity(self.nnz() + entries.len());
        let mut data = Vec::with_capacity(self.nnz() + entries.len());
        for r in 0..self.dim {
            if r == row {
                for &(c, v) in entries {
                    indices.push(c);
                    data.push(v);
                }
            } else {
                for k in self.indptr[r]..self.indptr[r + 1] {
                    indices.push(self.indices[k]);
                    data.push(self.data[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        Csr { dim: self.dim, indptr, indices, data }
    }

    /// Dense copy; only sensible for small dimensions.
    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                m[(r, self.indices[k])] += self.data[k];
            }
        }
        m
    }

    /// Iterates row by row over `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.data[k]))
        })
    }

    /// Largest entry magnitude, zero for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
