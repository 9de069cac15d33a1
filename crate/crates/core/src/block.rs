//! Block operator matrices `B = (B_ij)` acting on a product space
//! `H_1 × … × H_n`, each `H_i` truncated to `dims[i]` coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Tolerances};
use crate::scalar::Scalar;

/// An `n×n` grid of dense blocks with `blocks[i][j]` of shape `dims[i]×dims[j]`.
///
/// Immutable after construction. Self-adjointness is evaluated once against the
/// default `sym_tol` and cached; callers with other tolerances use
/// [`BlockMatrix::check_self_adjoint`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix<T> {
    dims: Vec<usize>,
    blocks: Vec<DenseMatrix<T>>,
    self_adjoint: bool,
}

impl<T: Scalar> BlockMatrix<T> {
    /// Validates shapes and caches self-adjointness.
    pub fn new(dims: Vec<usize>, blocks: Vec<Vec<DenseMatrix<T>>>) -> Result<Self> {
        let n = dims.len();
        if n == 0 {
            return Err(Error::ShapeMismatch("a block matrix needs at least one block".into()));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::ShapeMismatch(format!("dims[{i}] must be positive")));
        }
        if blocks.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} block rows for {n} dims",
                blocks.len()
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in blocks.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "block row {i} has {} blocks, expected {n}",
                    row.len()
                )));
            }
            for (j, b) in row.into_iter().enumerate() {
                if b.shape() != (dims[i], dims[j]) {
                    return Err(Error::ShapeMismatch(format!(
                        "block ({}, {}) is {}x{}, expected {}x{}",
                        i + 1,
                        j + 1,
                        b.rows(),
                        b.cols(),
                        dims[i],
                        dims[j]
                    )));
                }
                flat.push(b);
            }
        }
        Ok(Self::from_parts(dims, flat))
    }

    fn from_parts(dims: Vec<usize>, blocks: Vec<DenseMatrix<T>>) -> Self {
        let mut out = Self {
            dims,
            blocks,
            self_adjoint: false,
        };
        out.self_adjoint = out.relative_asymmetry() <= T::default_tolerances().sym_tol;
        out
    }

    /// Builds an `n×n` grid of `1×1` blocks from a dense square matrix.
    pub fn scalar_blocks(m: &DenseMatrix<T>) -> Result<Self> {
        m.require_square()?;
        Self::assemble(m, &vec![1; m.rows()])
    }

    /// Convenience for scalar-block examples written as `f64` rows.
    pub fn from_scalar_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::scalar_blocks(&DenseMatrix::from_f64_rows(rows)?)
    }

    /// Block identity with the given dims.
    pub fn identity(dims: &[usize]) -> Self {
        let total = dims.iter().sum();
        Self::assemble(&DenseMatrix::identity(total), dims).expect("dims are positive")
    }

    /// Block diagonal matrix from square diagonal blocks.
    pub fn block_diagonal(diag: Vec<DenseMatrix<T>>) -> Result<Self> {
        let dims: Vec<usize> = diag.iter().map(|b| b.rows()).collect();
        let n = diag.len();
        let mut grid: Vec<Vec<DenseMatrix<T>>> = (0..n)
            .map(|i| (0..n).map(|j| DenseMatrix::zeros(dims[i], dims[j])).collect())
            .collect();
        for (i, b) in diag.into_iter().enumerate() {
            grid[i][i] = b;
        }
        Self::new(dims, grid)
    }

    /// Cuts a dense matrix of order `Σ dims` into blocks; inverse of [`flatten`](Self::flatten).
    pub fn assemble(m: &DenseMatrix<T>, dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().sum();
        if m.shape() != (total, total) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix cannot be cut into blocks of dims {dims:?}",
                m.rows(),
                m.cols()
            )));
        }
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!("invalid dims {dims:?}")));
        }
        let offsets = offsets(dims);
        let mut blocks = Vec::with_capacity(dims.len() * dims.len());
        for i in 0..dims.len() {
            for j in 0..dims.len() {
                blocks.push(m.submatrix(offsets[i], offsets[j], dims[i], dims[j]));
            }
        }
        Ok(Self::from_parts(dims.to_vec(), blocks))
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Zero-based block access.
    pub fn block(&self, i: usize, j: usize) -> &DenseMatrix<T> {
        &self.blocks[i * self.order() + j]
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    /// `max_ij ‖B_ij − B_jiᵀ‖_max / ‖B‖_max`.
    pub fn relative_asymmetry(&self) -> T {
        let n = self.order();
        let norm = self.max_norm();
        if norm == T::zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let a = self.block(i, j);
                let b = self.block(j, i);
                for r in 0..a.rows() {
                    for c in 0..a.cols() {
                        worst = worst.max((a[(r, c)] - b[(c, r)]).abs());
                    }
                }
            }
        }
        worst / norm
    }

    pub fn check_self_adjoint(&self, tol: &Tolerances<T>) -> Result<()> {
        let asym = self.relative_asymmetry();
        if asym > tol.sym_tol {
            Err(Error::NotSelfAdjoint {
                asymmetry: asym.as_f64(),
            })
        } else {
            Ok(())
        }
    }

    pub fn max_norm(&self) -> T {
        self.blocks.iter().fold(T::zero(), |m, b| m.max(b.max_norm()))
    }

    /// `max(1, ‖B‖_max)`.
    pub fn scale_floor(&self) -> T {
        self.max_norm().max(T::one())
    }

    /// Dense matrix of order `Σ dims` with blocks laid out in index order.
    pub fn flatten(&self) -> DenseMatrix<T> {
        let total = self.total_dim();
        let offsets = offsets(&self.dims);
        let mut m = DenseMatrix::zeros(total, total);
        for i in 0..self.order() {
            for j in 0..self.order() {
                m.set_submatrix(offsets[i], offsets[j], self.block(i, j));
            }
        }
        m
    }

    /// Sub-block-matrix on the contiguous block range `start..end`.
    pub fn principal(&self, start: usize, end: usize) -> Self {
        let dims = self.dims[start..end].to_vec();
        let mut blocks = Vec::with_capacity(dims.len() * dims.len());
        for i in start..end {
            for j in start..end {
                blocks.push(self.block(i, j).clone());
            }
        }
        Self::from_parts(dims, blocks)
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(self.dims.clone(), self.blocks.iter().map(|b| b.neg()).collect())
    }

    /// `B + s·I`.
    pub fn shifted(&self, s: T) -> Self {
        let mut blocks = self.blocks.clone();
        let n = self.order();
        for i in 0..n {
            let b = &mut blocks[i * n + i];
            for k in 0..self.dims[i] {
                b[(k, k)] = b[(k, k)] + s;
            }
        }
        Self::from_parts(self.dims.clone(), blocks)
    }

    /// Reorders block coordinates: block `(i, j)` of the result is block
    /// `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.order();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        let mut blocks = Vec::with_capacity(n * n);
        for &pi in perm {
            for &pj in perm {
                blocks.push(self.block(pi, pj).clone());
            }
        }
        Ok(Self::from_parts(dims, blocks))
    }

    /// Bisection at `⌊n/2⌋` into four units.
    pub fn partition_first(&self) -> Result<BlockPartition<'_, T>> {
        self.partition_at(self.order() / 2)
    }

    /// Split after the first block: `B̃¹¹ = B_11`, `B̃²²` the trailing `(n−1)×(n−1)` minor.
    pub fn partition_second(&self) -> Result<BlockPartition<'_, T>> {
        self.partition_at(1)
    }

    fn partition_at(&self, split: usize) -> Result<BlockPartition<'_, T>> {
        if self.order() < 2 {
            return Err(Error::OrderTooSmall { order: self.order() });
        }
        Ok(BlockPartition { source: self, split })
    }

    /// `⟨flatten(B)·h, h⟩` for `h` given as `n` coordinate blocks.
    pub fn quadratic_form(&self, h: &[Vec<T>]) -> Result<T> {
        let flat = self.flatten_point(h)?;
        let bh = self.flatten().mat_vec(&flat)?;
        Ok(bh.iter().zip(&flat).map(|(&a, &b)| a * b).sum())
    }

    /// Concatenates coordinate blocks after checking them against `dims`.
    pub fn flatten_point(&self, h: &[Vec<T>]) -> Result<Vec<T>> {
        check_point(&self.dims, h)?;
        Ok(h.iter().flatten().copied().collect())
    }

    pub fn cast<U: Scalar>(&self) -> BlockMatrix<U> {
        BlockMatrix::from_parts(self.dims.clone(), self.blocks.iter().map(|b| b.cast()).collect())
    }

    /// Re-blocks `(M + Mᵀ)/2` of the flattened matrix.
    pub(crate) fn resymmetrized(&self) -> Self {
        Self::assemble(&self.flatten().symmetrized(), &self.dims).expect("shape preserved")
    }
}

pub(crate) fn check_point<T>(dims: &[usize], h: &[Vec<T>]) -> Result<()> {
    if h.len() != dims.len() {
        return Err(Error::ShapeMismatch(format!(
            "point has {} coordinate blocks, expected {}",
            h.len(),
            dims.len()
        )));
    }
    for (i, (hi, &d)) in h.iter().zip(dims).enumerate() {
        if hi.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "coordinate block {} has length {}, expected {d}",
                i + 1,
                hi.len()
            )));
        }
    }
    Ok(())
}

pub(crate) fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    dims.iter()
        .map(|d| {
            let o = acc;
            acc += d;
            o
        })
        .collect()
}

/// Logical four-unit view of a block matrix split after `split_index` blocks.
///
/// Units are index ranges into the source; [`unit`](Self::unit) materializes
/// one as a flattened dense matrix.
#[derive(Debug, Clone, Copy)]
pub struct BlockPartition<'a, T> {
    source: &'a BlockMatrix<T>,
    split: usize,
}

impl<'a, T: Scalar> BlockPartition<'a, T> {
    pub fn split_index(&self) -> usize {
        self.split
    }

    pub fn source(&self) -> &'a BlockMatrix<T> {
        self.source
    }

    /// Block index range covered by side `k ∈ {1, 2}`.
    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        match k {
            1 => 0..self.split,
            2 => self.split..self.source.order(),
            _ => panic!("partition side must be 1 or 2, got {k}"),
        }
    }

    pub fn side_dims(&self, k: usize) -> &'a [usize] {
        &self.source.dims[self.range(k)]
    }

    /// Flattened unit `B^{ij}` with `i, j ∈ {1, 2}`.
    pub fn unit(&self, i: usize, j: usize) -> DenseMatrix<T> {
        let rows = self.range(i);
        let cols = self.range(j);
        let dims = &self.source.dims;
        let row_offs = offsets(&dims[rows.clone()]);
        let col_offs = offsets(&dims[cols.clone()]);
        let mut m = DenseMatrix::zeros(dims[rows.clone()].iter().sum(), dims[cols.clone()].iter().sum());
        for (a, bi) in rows.enumerate() {
            for (b, bj) in cols.clone().enumerate() {
                m.set_submatrix(row_offs[a], col_offs[b], self.source.block(bi, bj));
            }
        }
        m
    }

    /// Diagonal unit `B^{kk}` as a block matrix with the side's dims.
    pub fn diagonal_unit(&self, k: usize) -> BlockMatrix<T> {
        let r = self.range(k);
        self.source.principal(r.start, r.end)
    }

    /// Rebuilds the source from the four units.
    pub fn reassemble(&self) -> Result<BlockMatrix<T>> {
        let n1: usize = self.side_dims(1).iter().sum();
        let total = self.source.total_dim();
        let mut m = DenseMatrix::zeros(total, total);
        m.set_submatrix(0, 0, &self.unit(1, 1));
        m.set_submatrix(0, n1, &self.unit(1, 2));
        m.set_submatrix(n1, 0, &self.unit(2, 1));
        m.set_submatrix(n1, n1, &self.unit(2, 2));
        BlockMatrix::assemble(&m, &self.source.dims)
    }
}

/// On-disk block-matrix document: `{"dims": [...], "blocks": [[[row-major reals]]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMatrixFile<T> {
    pub dims: Vec<usize>,
    pub blocks: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> BlockMatrixFile<T> {
    pub fn into_matrix(self) -> Result<BlockMatrix<T>> {
        let n = self.dims.len();
        if self.blocks.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "\"blocks\" has {} rows, expected {n}",
                self.blocks.len()
            )));
        }
        let mut grid = Vec::with_capacity(n);
        for (i, row) in self.blocks.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "\"blocks\"[{i}] has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut out = Vec::with_capacity(n);
            for (j, data) in row.into_iter().enumerate() {
                let (r, c) = (self.dims[i], self.dims[j]);
                if data.len() != r * c {
                    return Err(Error::ShapeMismatch(format!(
                        "block ({}, {}) has {} entries, expected {r}x{c} = {}",
                        i + 1,
                        j + 1,
                        data.len(),
                        r * c
                    )));
                }
                out.push(DenseMatrix::from_row_major(r, c, data)?);
            }
            grid.push(out);
        }
        BlockMatrix::new(self.dims, grid)
    }
}

impl<T: Scalar> From<&BlockMatrix<T>> for BlockMatrixFile<T> {
    fn from(b: &BlockMatrix<T>) -> Self {
        let n = b.order();
        Self {
            dims: b.dims.clone(),
            blocks: (0..n)
                .map(|i| (0..n).map(|j| b.block(i, j).as_slice().to_vec()).collect())
                .collect(),
        }
    }
}

impl<T: Scalar> BlockMatrix<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: BlockMatrixFile<T> = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        file.into_matrix()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&BlockMatrixFile::from(self)).expect("finite reals serialize")
    }
}
