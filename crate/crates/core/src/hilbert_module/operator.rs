use std::sync::Arc;

use nalgebra::DMatrix;

use super::{same_space, ModuleElement, ModuleMatrix, ModuleSpace};
use crate::algebra::{herm_eigen, herm_map, hermitian_deviation, ScalarFn, C64};
use crate::error::{Error, Result};
use crate::prosystem::{same_chain, CoherentElement};
use crate::{DEFAULT_TOL, MEMBERSHIP_TOL};

/// An adjointable module map `T ∈ L(E, F)`, given by a matrix over `A`
/// acting on ambient coordinates as `T(ξ)_i = Σ_j T_ij ξ_j`.
///
/// For projective `E = P·A^d`, `F = Q·A^e` the matrix satisfies
/// `Q T P = T`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointableOperator {
    domain: Arc<ModuleSpace>,
    codomain: Arc<ModuleSpace>,
    matrix: ModuleMatrix,
}

impl AdjointableOperator {
    pub fn new(domain: Arc<ModuleSpace>, codomain: Arc<ModuleSpace>, matrix: ModuleMatrix) -> Result<Self> {
        if !same_chain(domain.chain(), codomain.chain()) {
            return Err(Error::ChainMismatch);
        }
        if matrix.rows() != codomain.rank() || matrix.cols() != domain.rank() {
            return Err(Error::SpaceMismatch(format!(
                "matrix is {}x{}, spaces need {}x{}",
                matrix.rows(),
                matrix.cols(),
                codomain.rank(),
                domain.rank()
            )));
        }
        if matrix.shape() != domain.chain().top_shape() {
            return Err(Error::ShapeMismatch {
                left: matrix.shape().blocks().to_vec(),
                right: domain.chain().top_shape().blocks().to_vec(),
            });
        }
        let sandwiched = codomain.identity_matrix().mul(&matrix)?.mul(&domain.identity_matrix())?;
        let residual = sandwiched.sub(&matrix)?.norm();
        if residual > MEMBERSHIP_TOL * (1.0 + matrix.norm()) {
            return Err(Error::SpaceMismatch(format!(
                "operator does not map the domain module into the codomain (residual {residual:.3e})"
            )));
        }
        Ok(AdjointableOperator { domain, codomain, matrix })
    }

    pub fn from_entries(
        domain: Arc<ModuleSpace>,
        codomain: Arc<ModuleSpace>,
        entries: Vec<Vec<CoherentElement>>,
    ) -> Result<Self> {
        if entries.iter().flatten().any(|e| !same_chain(e.chain(), domain.chain())) {
            return Err(Error::ChainMismatch);
        }
        let rows = entries
            .into_iter()
            .map(|row| row.into_iter().map(CoherentElement::into_top).collect())
            .collect();
        let matrix = ModuleMatrix::from_rows(domain.chain().top_shape().clone(), rows)?;
        Self::new(domain, codomain, matrix)
    }

    pub(crate) fn from_matrix_unchecked(
        domain: Arc<ModuleSpace>,
        codomain: Arc<ModuleSpace>,
        matrix: ModuleMatrix,
    ) -> Self {
        AdjointableOperator { domain, codomain, matrix }
    }

    /// `id_E`.
    pub fn identity(space: Arc<ModuleSpace>) -> Self {
        let matrix = space.identity_matrix();
        AdjointableOperator { domain: Arc::clone(&space), codomain: space, matrix }
    }

    pub fn zero(domain: Arc<ModuleSpace>, codomain: Arc<ModuleSpace>) -> Self {
        let matrix = ModuleMatrix::zeros(codomain.rank(), domain.rank(), domain.chain().top_shape());
        AdjointableOperator { domain, codomain, matrix }
    }

    pub fn domain(&self) -> &Arc<ModuleSpace> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<ModuleSpace> {
        &self.codomain
    }

    pub fn matrix(&self) -> &ModuleMatrix {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> CoherentElement {
        CoherentElement::from_top_unchecked(Arc::clone(self.domain.chain()), self.matrix.get(i, j).clone())
    }

    pub fn is_endomorphism(&self) -> bool {
        same_space(&self.domain, &self.codomain)
    }

    pub fn apply(&self, xi: &ModuleElement) -> Result<ModuleElement> {
        if !same_space(xi.space(), &self.domain) {
            return Err(Error::SpaceMismatch("element is not in the operator's domain".into()));
        }
        let coords = self.matrix.mul(xi.coords_matrix())?;
        Ok(ModuleElement::from_matrix_unchecked(Arc::clone(&self.codomain), coords))
    }

    /// `T*`, characterized by `⟨Tξ, η⟩ = ⟨ξ, T*η⟩`.
    pub fn adjoint(&self) -> Self {
        AdjointableOperator {
            domain: Arc::clone(&self.codomain),
            codomain: Arc::clone(&self.domain),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AdjointableOperator) -> Result<Self> {
        if !same_space(&inner.codomain, &self.domain) {
            return Err(Error::SpaceMismatch("codomain of the inner operator is not the domain".into()));
        }
        Ok(AdjointableOperator {
            domain: Arc::clone(&inner.domain),
            codomain: Arc::clone(&self.codomain),
            matrix: self.matrix.mul(&inner.matrix)?,
        })
    }

    fn check_same_spaces(&self, other: &Self) -> Result<()> {
        if same_space(&self.domain, &other.domain) && same_space(&self.codomain, &other.codomain) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch("operators act between different modules".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_spaces(other)?;
        Ok(self.with_matrix(self.matrix.add(&other.matrix)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_spaces(other)?;
        Ok(self.with_matrix(self.matrix.sub(&other.matrix)?))
    }

    pub fn scale(&self, c: C64) -> Self {
        self.with_matrix(self.matrix.scale(c))
    }

    fn with_matrix(&self, matrix: ModuleMatrix) -> Self {
        AdjointableOperator {
            domain: Arc::clone(&self.domain),
            codomain: Arc::clone(&self.codomain),
            matrix,
        }
    }

    /// `p̃(T)`: the norm of the level realization, i.e. the largest spectral
    /// norm of the flattened matrices over the surviving blocks.
    pub fn operator_seminorm(&self, level: usize) -> Result<f64> {
        let survivors = self.domain.chain().survivors(level)?;
        Ok(survivors.iter().map(|&b| self.matrix.block_norm(b)).fold(0.0, f64::max))
    }

    /// `‖T‖_∞`.
    pub fn bounded_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Block `b` of `T` written in orthonormal bases of `E` and `F`.
    pub fn compressed(&self, b: usize) -> DMatrix<C64> {
        let flat = self.matrix.flatten(b);
        let left = match self.codomain.range_basis(b) {
            Some(u) => u.adjoint() * flat,
            None => flat,
        };
        match self.domain.range_basis(b) {
            Some(u) => left * u,
            None => left,
        }
    }

    fn expand(&self, b: usize, inner: DMatrix<C64>) -> DMatrix<C64> {
        let left = match self.codomain.range_basis(b) {
            Some(u) => u * inner,
            None => inner,
        };
        match self.domain.range_basis(b) {
            Some(u) => left * u.adjoint(),
            None => left,
        }
    }

    fn require_endomorphism(&self) -> Result<()> {
        if self.is_endomorphism() {
            Ok(())
        } else {
            Err(Error::SpaceMismatch("operation needs an endomorphism".into()))
        }
    }

    fn require_self_adjoint(&self, tol: f64) -> Result<()> {
        self.require_endomorphism()?;
        let deviation = (0..self.num_blocks())
            .map(|b| hermitian_deviation(&self.matrix.flatten(b)))
            .fold(0.0, f64::max);
        if deviation > tol * (1.0 + self.bounded_norm()) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    fn num_blocks(&self) -> usize {
        self.domain.chain().top_shape().num_blocks()
    }

    /// Ascending eigenvalues of a self-adjoint endomorphism on `E`, block
    /// `b` (kernel directions of a projective module are excluded).
    pub fn restricted_eigenvalues(&self, b: usize) -> Result<Vec<f64>> {
        self.require_self_adjoint(DEFAULT_TOL)?;
        Ok(herm_eigen(&self.compressed(b)).0.iter().copied().collect())
    }

    /// `(min λ, max λ)` of the level realization on `E_level`.
    pub fn spectrum_bounds(&self, level: usize) -> Result<(f64, f64)> {
        let survivors = self.domain.chain().survivors(level)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &b in survivors {
            for lambda in self.restricted_eigenvalues(b)? {
                lo = lo.min(lambda);
                hi = hi.max(lambda);
            }
        }
        Ok((lo, hi))
    }

    /// Positivity in `L(E)`, slack `tol·(1+‖T‖)`.
    pub fn is_positive(&self, tol: f64) -> bool {
        if self.require_self_adjoint(tol).is_err() {
            return false;
        }
        let slack = tol * (1.0 + self.bounded_norm());
        (0..self.num_blocks()).all(|b| {
            herm_eigen(&self.compressed(b)).0.iter().all(|&lambda| lambda >= -slack)
        })
    }

    /// Hermitian functional calculus of a self-adjoint endomorphism on `E`.
    pub fn calculus(&self, f: &ScalarFn<'_>, tol: f64) -> Result<Self> {
        self.require_self_adjoint(tol.max(DEFAULT_TOL))?;
        let blocks = (0..self.num_blocks())
            .map(|b| Ok(self.expand(b, herm_map(&self.compressed(b), f, tol)?)))
            .collect::<Result<Vec<_>>>()?;
        let rank = self.domain.rank();
        let matrix = ModuleMatrix::from_flattened(rank, rank, self.domain.chain().top_shape(), &blocks);
        Ok(self.with_matrix(matrix))
    }

    /// Inverse in `L(E)`. Positive operators go through the functional
    /// calculus; anything else through a blockwise linear solve.
    pub fn inverse(&self, tol: f64) -> Result<Self> {
        self.require_endomorphism()?;
        let scale = 1.0 + self.bounded_norm();
        let mut min_singular = f64::INFINITY;
        for b in 0..self.num_blocks() {
            let c = self.compressed(b);
            if c.is_empty() {
                continue;
            }
            min_singular = min_singular.min(c.singular_values().min());
        }
        if min_singular <= tol * scale {
            return Err(Error::NotInvertible { min_singular });
        }
        if self.is_positive(DEFAULT_TOL) {
            return self.calculus(&ScalarFn::Inverse, 0.0);
        }
        let blocks = (0..self.num_blocks())
            .map(|b| {
                let c = self.compressed(b);
                let inv = c.try_inverse().ok_or(Error::NotInvertible { min_singular })?;
                Ok(self.expand(b, inv))
            })
            .collect::<Result<Vec<_>>>()?;
        let rank = self.domain.rank();
        let matrix = ModuleMatrix::from_flattened(rank, rank, self.domain.chain().top_shape(), &blocks);
        Ok(self.with_matrix(matrix))
    }

    /// Largest entrywise deviation between two operators' matrices.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.matrix.max_abs_diff(&other.matrix)
    }
}
