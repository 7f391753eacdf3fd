//! Finite-dimensional C*-algebras `M_{n_1}(ℂ) ⊕ … ⊕ M_{n_k}(ℂ)`.
//!
//! Every finite-dimensional C*-algebra is of this form, so an element is
//! stored as one dense complex matrix per direct summand. All spectral work
//! (positivity, extreme eigenvalues, inverses and roots) goes through the
//! blockwise Hermitian eigendecomposition in [`herm_eigen`].

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

pub use nalgebra::Complex;

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;

/// Dense complex matrix, the storage of one block.
pub type ComplexMatrix = DMatrix<C64>;

/// Block sizes `(n_1, …, n_k)` of a block-diagonal matrix algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockShape(Vec<usize>);

impl BlockShape {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidShape("no blocks".into()));
        }
        if let Some(pos) = blocks.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("block {pos} has size 0")));
        }
        Ok(BlockShape(blocks))
    }

    /// The one-block algebra `M_1(ℂ) = ℂ`.
    pub fn scalar() -> Self {
        BlockShape(vec![1])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.0
    }

    pub fn num_blocks(&self) -> usize {
        self.0.len()
    }

    pub fn block(&self, i: usize) -> usize {
        self.0[i]
    }

    /// Complex dimension `Σ n_i²`.
    pub fn dim(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.0.iter().all(|&n| n == 1)
    }
}

/// A real-valued function applied to Hermitian elements through their
/// eigendecomposition.
pub enum ScalarFn<'a> {
    /// `t ↦ 1/t`, requires every eigenvalue `> tol`.
    Inverse,
    /// `t ↦ t^{-1/2}`, requires every eigenvalue `> tol`.
    InvSqrt,
    /// `t ↦ √t`, requires every eigenvalue `≥ -tol` (clamped at zero).
    Sqrt,
    /// Any other map; results must be finite.
    Map(&'a dyn Fn(f64) -> f64),
}

impl ScalarFn<'_> {
    pub(crate) fn eval(&self, t: f64, tol: f64) -> Result<f64> {
        let v = match self {
            ScalarFn::Inverse | ScalarFn::InvSqrt if t <= tol => {
                return Err(Error::SpectrumOutOfDomain { eigenvalue: t })
            }
            ScalarFn::Sqrt if t < -tol => return Err(Error::SpectrumOutOfDomain { eigenvalue: t }),
            ScalarFn::Inverse => 1.0 / t,
            ScalarFn::InvSqrt => 1.0 / t.sqrt(),
            ScalarFn::Sqrt => t.max(0.0).sqrt(),
            ScalarFn::Map(f) => f(t),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::SpectrumOutOfDomain { eigenvalue: t })
        }
    }
}

/// Eigendecomposition of the Hermitian part of a square complex matrix.
///
/// Returns eigenvalues in ascending order with matching eigenvector columns.
pub fn herm_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Largest singular value of a (possibly rectangular) complex matrix.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// `U diag(f(λ)) U*` for a Hermitian matrix.
pub(crate) fn herm_map(m: &DMatrix<C64>, f: &ScalarFn<'_>, tol: f64) -> Result<DMatrix<C64>> {
    let (values, vectors) = herm_eigen(m);
    let mut scaled = vectors.clone();
    for (c, &lambda) in values.iter().enumerate() {
        let fv = f.eval(lambda, tol)?;
        scaled.column_mut(c).scale_mut(fv);
    }
    Ok(&scaled * vectors.adjoint())
}

pub(crate) fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    spectral_norm(&(m - m.adjoint()))
}

/// An element of a block-diagonal matrix algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    shape: BlockShape,
    blocks: Vec<DMatrix<C64>>,
}

impl AlgebraElement {
    pub fn new(shape: BlockShape, blocks: Vec<DMatrix<C64>>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::InvalidShape(format!(
                "expected {} blocks, got {}",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(shape.blocks()).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::InvalidShape(format!(
                    "block {i} is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("block {i}")));
            }
        }
        Ok(AlgebraElement { shape, blocks })
    }

    pub(crate) fn from_blocks_unchecked(shape: BlockShape, blocks: Vec<DMatrix<C64>>) -> Self {
        debug_assert_eq!(shape.num_blocks(), blocks.len());
        AlgebraElement { shape, blocks }
    }

    pub fn zero(shape: &BlockShape) -> Self {
        let blocks = shape.blocks().iter().map(|&n| DMatrix::zeros(n, n)).collect();
        AlgebraElement { shape: shape.clone(), blocks }
    }

    pub fn identity(shape: &BlockShape) -> Self {
        Self::scalar(shape, C64::new(1.0, 0.0))
    }

    /// `c · 1`.
    pub fn scalar(shape: &BlockShape, c: C64) -> Self {
        let blocks = shape
            .blocks()
            .iter()
            .map(|&n| DMatrix::from_diagonal_element(n, n, c))
            .collect();
        AlgebraElement { shape: shape.clone(), blocks }
    }

    /// A central element acting as `weights[i] · 1` on block `i`.
    pub fn central(shape: &BlockShape, weights: &[C64]) -> Result<Self> {
        if weights.len() != shape.num_blocks() {
            return Err(Error::InvalidShape(format!(
                "expected {} weights, got {}",
                shape.num_blocks(),
                weights.len()
            )));
        }
        let blocks = shape
            .blocks()
            .iter()
            .zip(weights)
            .map(|(&n, &w)| DMatrix::from_diagonal_element(n, n, w))
            .collect();
        Self::new(shape.clone(), blocks)
    }

    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &DMatrix<C64> {
        &self.blocks[i]
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape == other.shape {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                left: self.shape.blocks().to_vec(),
                right: other.shape.blocks().to_vec(),
            })
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&DMatrix<C64>, &DMatrix<C64>) -> DMatrix<C64>) -> Self {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        AlgebraElement { shape: self.shape.clone(), blocks }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub(crate) fn sub_unchecked(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b;
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let blocks = self.blocks.iter().map(|b| b * c).collect();
        AlgebraElement { shape: self.shape.clone(), blocks }
    }

    /// Blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let blocks = self.blocks.iter().map(|b| b.adjoint()).collect();
        AlgebraElement { shape: self.shape.clone(), blocks }
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * (1.0 + self.norm())
    }

    fn hermitian_deviation(&self) -> f64 {
        self.blocks.iter().map(hermitian_deviation).fold(0.0, f64::max)
    }

    fn require_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation <= tol * (1.0 + self.norm()) {
            Ok(())
        } else {
            Err(Error::NotHermitian { deviation })
        }
    }

    /// Ascending eigenvalues of the Hermitian part, per block.
    pub fn block_eigenvalues(&self) -> Vec<Vec<f64>> {
        self.blocks
            .iter()
            .map(|b| herm_eigen(b).0.iter().copied().collect())
            .collect()
    }

    /// Positivity in the operator order, with relative slack `tol·(1+‖x‖)`.
    pub fn is_positive(&self, tol: f64) -> bool {
        let slack = tol * (1.0 + self.norm());
        if self.hermitian_deviation() > slack {
            return false;
        }
        self.block_eigenvalues()
            .iter()
            .flatten()
            .all(|&lambda| lambda >= -slack)
    }

    /// `self ≤ other` in the operator order.
    pub fn leq(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(other.sub(self)?.is_positive(tol))
    }

    /// Hermitian functional calculus, applied block by block.
    pub fn herm_calculus(&self, f: &ScalarFn<'_>, tol: f64) -> Result<Self> {
        self.require_hermitian(tol.max(DEFAULT_TOL))?;
        let blocks = self
            .blocks
            .iter()
            .map(|b| herm_map(b, f, tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgebraElement { shape: self.shape.clone(), blocks })
    }

    /// `(min λ, max λ)` over all blocks.
    pub fn spectrum_bounds(&self) -> Result<(f64, f64)> {
        self.require_hermitian(DEFAULT_TOL)?;
        let eigs = self.block_eigenvalues();
        let lo = eigs.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let hi = eigs.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((lo, hi))
    }

    /// Keep only the listed blocks, in the given order.
    pub(crate) fn restrict(&self, shape: &BlockShape, indices: &[usize]) -> Self {
        let blocks = indices.iter().map(|&i| self.blocks[i].clone()).collect();
        AlgebraElement { shape: shape.clone(), blocks }
    }
}
