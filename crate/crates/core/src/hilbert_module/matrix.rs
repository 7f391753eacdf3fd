use nalgebra::DMatrix;

use crate::algebra::{spectral_norm, AlgebraElement, BlockShape, C64};
use crate::error::{Error, Result};

/// A dense `rows × cols` matrix with entries in a block-diagonal algebra,
/// stored row-major at the finest level.
///
/// Over `A = ⊕_b M_{n_b}(ℂ)` the matrix algebra `M_{r×c}(A)` splits as
/// `⊕_b M_{r n_b × c n_b}(ℂ)`; [`ModuleMatrix::flatten`] produces the
/// `b`-th summand, with entry `(i, j)` occupying the `(i, j)` tile.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleMatrix {
    rows: usize,
    cols: usize,
    shape: BlockShape,
    entries: Vec<AlgebraElement>,
}

impl ModuleMatrix {
    pub fn new(rows: usize, cols: usize, shape: BlockShape, entries: Vec<AlgebraElement>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.shape() != &shape) {
            return Err(Error::ShapeMismatch {
                left: e.shape().blocks().to_vec(),
                right: shape.blocks().to_vec(),
            });
        }
        Ok(ModuleMatrix { rows, cols, shape, entries })
    }

    pub fn from_rows(shape: BlockShape, rows: Vec<Vec<AlgebraElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidShape("ragged matrix rows".into()));
        }
        Self::new(r, c, shape, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize, shape: &BlockShape) -> Self {
        let entries = vec![AlgebraElement::zero(shape); rows * cols];
        ModuleMatrix { rows, cols, shape: shape.clone(), entries }
    }

    pub fn identity(n: usize, shape: &BlockShape) -> Self {
        let mut m = Self::zeros(n, n, shape);
        for i in 0..n {
            m.entries[i * n + i] = AlgebraElement::identity(shape);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    pub fn get(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[AlgebraElement] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> ModuleMatrix {
        let entries = (0..self.rows).map(|i| self.get(i, j).clone()).collect();
        ModuleMatrix { rows: self.rows, cols: 1, shape: self.shape.clone(), entries }
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols || self.shape != other.shape {
            return Err(Error::InvalidShape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add_unchecked(b)).collect();
        Ok(ModuleMatrix { entries, ..self.clone_dims() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub_unchecked(b)).collect();
        Ok(ModuleMatrix { entries, ..self.clone_dims() })
    }

    pub fn scale(&self, c: C64) -> Self {
        let entries = self.entries.iter().map(|a| a.scale(c)).collect();
        ModuleMatrix { entries, ..self.clone_dims() }
    }

    fn clone_dims(&self) -> Self {
        ModuleMatrix { rows: self.rows, cols: self.cols, shape: self.shape.clone(), entries: Vec::new() }
    }

    /// Matrix product over the algebra; sums run in index order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows || self.shape != other.shape {
            return Err(Error::InvalidShape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = AlgebraElement::zero(&self.shape);
                for k in 0..self.cols {
                    acc.add_assign_unchecked(&self.get(i, k).mul_unchecked(other.get(k, j)));
                }
                entries.push(acc);
            }
        }
        Ok(ModuleMatrix { rows: self.rows, cols: other.cols, shape: self.shape.clone(), entries })
    }

    /// Transpose with entrywise adjoint.
    pub fn adjoint(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).adjoint());
            }
        }
        ModuleMatrix { rows: self.cols, cols: self.rows, shape: self.shape.clone(), entries }
    }

    /// Right multiplication of every entry by `a`.
    pub fn mul_right(&self, a: &AlgebraElement) -> Self {
        let entries = self.entries.iter().map(|e| e.mul_unchecked(a)).collect();
        ModuleMatrix { entries, ..self.clone_dims() }
    }

    /// The complex matrix realizing block `b`.
    pub fn flatten(&self, b: usize) -> DMatrix<C64> {
        let n = self.shape.block(b);
        let mut out = DMatrix::zeros(self.rows * n, self.cols * n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.view_mut((i * n, j * n), (n, n)).copy_from(self.get(i, j).block(b));
            }
        }
        out
    }

    /// Inverse of [`ModuleMatrix::flatten`], one complex matrix per block.
    pub fn from_flattened(rows: usize, cols: usize, shape: &BlockShape, blocks: &[DMatrix<C64>]) -> Self {
        debug_assert_eq!(blocks.len(), shape.num_blocks());
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let parts = shape
                    .blocks()
                    .iter()
                    .zip(blocks)
                    .map(|(&n, m)| m.view((i * n, j * n), (n, n)).into_owned())
                    .collect();
                entries.push(AlgebraElement::from_blocks_unchecked(shape.clone(), parts));
            }
        }
        ModuleMatrix { rows, cols, shape: shape.clone(), entries }
    }

    /// Spectral norm of the flattened block `b`.
    pub fn block_norm(&self, b: usize) -> f64 {
        spectral_norm(&self.flatten(b))
    }

    /// Largest flattened spectral norm over all blocks.
    pub fn norm(&self) -> f64 {
        (0..self.shape.num_blocks()).map(|b| self.block_norm(b)).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other)?;
        let mut worst = 0.0_f64;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            worst = worst.max(a.max_abs_diff(b)?);
        }
        Ok(worst)
    }

    pub(crate) fn restrict(&self, shape: &BlockShape, indices: &[usize]) -> Self {
        let entries = self.entries.iter().map(|e| e.restrict(shape, indices)).collect();
        ModuleMatrix { rows: self.rows, cols: self.cols, shape: shape.clone(), entries }
    }
}
