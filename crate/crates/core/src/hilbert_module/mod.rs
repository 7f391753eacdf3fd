//! Hilbert modules over a chain algebra `A`: free modules `A^d`, projective
//! modules `P·A^d`, their `A`-valued inner product, multipliers and
//! adjointable operators.
//!
//! The inner product is linear in the second variable:
//! `⟨ξ, η⟩ = Σ_j ξ_j* η_j`.

mod matrix;
mod operator;

use std::sync::Arc;

use nalgebra::DMatrix;

pub use matrix::ModuleMatrix;
pub use operator::AdjointableOperator;

use crate::algebra::{herm_eigen, spectral_norm, C64};
use crate::error::{Error, Result};
use crate::prosystem::{same_chain, CoherentElement, SeminormChain};
use crate::MEMBERSHIP_TOL;

/// A Hilbert `A`-module: either `A^rank` or the range of a projection on it.
#[derive(Clone, Debug)]
pub struct ModuleSpace {
    chain: Arc<SeminormChain>,
    rank: usize,
    projection: Option<ModuleMatrix>,
    /// Per top-level block, an orthonormal basis of the range of the
    /// flattened projection (absent for free modules).
    range_bases: Option<Vec<DMatrix<C64>>>,
}

impl PartialEq for ModuleSpace {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && same_chain(&self.chain, &other.chain) && self.projection == other.projection
    }
}

pub(crate) fn same_space(a: &Arc<ModuleSpace>, b: &Arc<ModuleSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl ModuleSpace {
    pub fn free(chain: Arc<SeminormChain>, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidCount("module rank must be at least 1".into()));
        }
        Ok(ModuleSpace { chain, rank, projection: None, range_bases: None })
    }

    /// The projective module `P·A^rank`; `P` must be self-adjoint and
    /// idempotent within `tol·(1+‖P‖)` on every block.
    pub fn projective(chain: Arc<SeminormChain>, projection: ModuleMatrix, tol: f64) -> Result<Self> {
        let rank = projection.rows();
        if rank == 0 || projection.cols() != rank {
            return Err(Error::NotAProjection(format!(
                "projection must be square and non-empty, got {}x{}",
                projection.rows(),
                projection.cols()
            )));
        }
        if projection.shape() != chain.top_shape() {
            return Err(Error::ShapeMismatch {
                left: projection.shape().blocks().to_vec(),
                right: chain.top_shape().blocks().to_vec(),
            });
        }
        let mut bases = Vec::with_capacity(chain.top_shape().num_blocks());
        for b in 0..chain.top_shape().num_blocks() {
            let p = projection.flatten(b);
            let slack = tol * (1.0 + spectral_norm(&p));
            let asym = spectral_norm(&(&p - p.adjoint()));
            if asym > slack {
                return Err(Error::NotAProjection(format!(
                    "block {b}: ‖P − P*‖ = {asym:.3e} exceeds {slack:.3e}"
                )));
            }
            let idem = spectral_norm(&(&p * &p - &p));
            if idem > slack {
                return Err(Error::NotAProjection(format!(
                    "block {b}: ‖P² − P‖ = {idem:.3e} exceeds {slack:.3e}"
                )));
            }
            let (values, vectors) = herm_eigen(&p);
            let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 0.5).collect();
            bases.push(vectors.select_columns(keep.iter()));
        }
        for level in 1..=chain.num_levels() {
            if chain.survivors(level)?.iter().all(|&b| bases[b].ncols() == 0) {
                return Err(Error::NotAProjection(format!("projection vanishes at level {level}")));
            }
        }
        Ok(ModuleSpace { chain, rank, projection: Some(projection), range_bases: Some(bases) })
    }

    pub fn chain(&self) -> &Arc<SeminormChain> {
        &self.chain
    }

    /// Rank `d` of the ambient free module.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn projection(&self) -> Option<&ModuleMatrix> {
        self.projection.as_ref()
    }

    pub fn is_free(&self) -> bool {
        self.projection.is_none()
    }

    /// The identity of `L(E)`: `P` for projective modules, `1` otherwise.
    pub fn identity_matrix(&self) -> ModuleMatrix {
        match &self.projection {
            Some(p) => p.clone(),
            None => ModuleMatrix::identity(self.rank, self.chain.top_shape()),
        }
    }

    /// Complex dimension of the block-`b` realization of `E`.
    pub fn block_dim(&self, b: usize) -> usize {
        match &self.range_bases {
            Some(bases) => bases[b].ncols(),
            None => self.rank * self.chain.top_shape().block(b),
        }
    }

    /// Orthonormal basis (as columns) of `E` inside the flattened ambient
    /// block `b`; `None` means the whole space.
    pub(crate) fn range_basis(&self, b: usize) -> Option<&DMatrix<C64>> {
        self.range_bases.as_ref().map(|bases| &bases[b])
    }

    /// Distance `‖Pξ − ξ‖` of a column of coordinates from the module.
    pub(crate) fn membership_residual(&self, coords: &ModuleMatrix) -> f64 {
        match &self.projection {
            None => 0.0,
            Some(p) => p.mul(coords).and_then(|pc| pc.sub(coords)).map_or(f64::INFINITY, |d| d.norm()),
        }
    }

    /// Orthogonal projection of ambient coordinates onto the module.
    pub fn project_coords(&self, coords: &ModuleMatrix) -> Result<ModuleMatrix> {
        match &self.projection {
            None => Ok(coords.clone()),
            Some(p) => p.mul(coords),
        }
    }

    /// The module `E_level` over the truncated chain `1..=level`.
    pub fn at_level(&self, level: usize) -> Result<ModuleSpace> {
        let chain = Arc::new(self.chain.truncate(level)?);
        match &self.projection {
            None => ModuleSpace::free(chain, self.rank),
            Some(p) => {
                let survivors = self.chain.survivors(level)?;
                let restricted = p.restrict(chain.top_shape(), survivors);
                ModuleSpace::projective(chain, restricted, f64::INFINITY)
            }
        }
    }
}

/// An element `ξ ∈ E`, stored as a `rank × 1` column over the finest level.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleElement {
    space: Arc<ModuleSpace>,
    coords: ModuleMatrix,
}

impl ModuleElement {
    pub fn new(space: Arc<ModuleSpace>, coords: Vec<CoherentElement>) -> Result<Self> {
        if coords.iter().any(|c| !same_chain(c.chain(), space.chain())) {
            return Err(Error::ChainMismatch);
        }
        let tops = coords.into_iter().map(CoherentElement::into_top).collect();
        Self::from_top(space, tops)
    }

    /// Build from finest-level coordinates, checking membership in `E`.
    pub fn from_top(space: Arc<ModuleSpace>, coords: Vec<crate::algebra::AlgebraElement>) -> Result<Self> {
        if coords.len() != space.rank() {
            return Err(Error::SpaceMismatch(format!(
                "expected {} coordinates, got {}",
                space.rank(),
                coords.len()
            )));
        }
        let coords = ModuleMatrix::new(coords.len(), 1, space.chain().top_shape().clone(), coords)?;
        Self::from_matrix(space, coords)
    }

    pub(crate) fn from_matrix(space: Arc<ModuleSpace>, coords: ModuleMatrix) -> Result<Self> {
        let residual = space.membership_residual(&coords);
        if residual > MEMBERSHIP_TOL * (1.0 + coords.norm()) {
            return Err(Error::NotMember { residual });
        }
        Ok(ModuleElement { space, coords })
    }

    pub(crate) fn from_matrix_unchecked(space: Arc<ModuleSpace>, coords: ModuleMatrix) -> Self {
        debug_assert_eq!(coords.cols(), 1);
        ModuleElement { space, coords }
    }

    pub fn zero(space: Arc<ModuleSpace>) -> Self {
        let coords = ModuleMatrix::zeros(space.rank(), 1, space.chain().top_shape());
        ModuleElement { space, coords }
    }

    pub fn space(&self) -> &Arc<ModuleSpace> {
        &self.space
    }

    pub fn coords_matrix(&self) -> &ModuleMatrix {
        &self.coords
    }

    pub fn coord(&self, j: usize) -> CoherentElement {
        CoherentElement::from_top_unchecked(Arc::clone(self.space.chain()), self.coords.get(j, 0).clone())
    }

    pub fn coords(&self) -> Vec<CoherentElement> {
        (0..self.space.rank()).map(|j| self.coord(j)).collect()
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch("elements belong to different modules".into()))
        }
    }

    /// `⟨self, other⟩ = Σ_j self_j* other_j`.
    pub fn inner(&self, other: &Self) -> Result<CoherentElement> {
        self.check_space(other)?;
        let product = self.coords.adjoint().mul(&other.coords)?;
        Ok(CoherentElement::from_top_unchecked(
            Arc::clone(self.space.chain()),
            product.get(0, 0).clone(),
        ))
    }

    /// Right module action `ξ·a`.
    pub fn act(&self, a: &CoherentElement) -> Result<Self> {
        if !same_chain(a.chain(), self.space.chain()) {
            return Err(Error::ChainMismatch);
        }
        Ok(self.with_coords(self.coords.mul_right(a.top())))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(self.with_coords(self.coords.add(&other.coords)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(self.with_coords(self.coords.sub(&other.coords)?))
    }

    pub fn scale(&self, c: C64) -> Self {
        self.with_coords(self.coords.scale(c))
    }

    fn with_coords(&self, coords: ModuleMatrix) -> Self {
        ModuleElement { space: Arc::clone(&self.space), coords }
    }

    /// `p̄_E(ξ) = √p(⟨ξ, ξ⟩)`.
    pub fn module_seminorm(&self, level: usize) -> Result<f64> {
        let survivors = self.space.chain().survivors(level)?;
        Ok(survivors.iter().map(|&b| self.coords.block_norm(b)).fold(0.0, f64::max))
    }

    /// `‖ξ‖_∞`, the finest-level module seminorm.
    pub fn bounded_norm(&self) -> f64 {
        self.coords.norm()
    }

    /// The image `σ_level(ξ)` in `E_level`.
    pub fn at_level(&self, level: usize, target: &Arc<ModuleSpace>) -> Result<ModuleElement> {
        let survivors = self.space.chain().survivors(level)?;
        if target.chain().top_shape() != self.space.chain().level_shape(level)? {
            return Err(Error::SpaceMismatch("target is not this module's level".into()));
        }
        let coords = self.coords.restrict(target.chain().top_shape(), survivors);
        Ok(ModuleElement { space: Arc::clone(target), coords })
    }
}

/// A multiplier `h ∈ M(E)`, the adjointable map `a ↦ h·a` from `A` to `E`.
///
/// All algebras here are unital, so `M(E) ≅ E` and a multiplier is stored
/// as its value at `1`. The pairing `⟨h, ξ⟩_{M(E)} = h*(ξ)` is the module
/// inner product.
#[derive(Clone, Debug, PartialEq)]
pub struct Multiplier(ModuleElement);

impl Multiplier {
    pub fn from_element(xi: ModuleElement) -> Self {
        Multiplier(xi)
    }

    pub fn as_element(&self) -> &ModuleElement {
        &self.0
    }

    pub fn into_element(self) -> ModuleElement {
        self.0
    }

    pub fn space(&self) -> &Arc<ModuleSpace> {
        self.0.space()
    }

    /// `h*(ξ) = ⟨h, ξ⟩_{M(E)}`.
    pub fn pair(&self, xi: &ModuleElement) -> Result<CoherentElement> {
        self.0.inner(xi)
    }

    /// `h(a) = h·a`.
    pub fn call(&self, a: &CoherentElement) -> Result<ModuleElement> {
        self.0.act(a)
    }

    /// `T ∘ h` for `T ∈ L(E, F)`.
    pub fn compose_with(&self, t: &AdjointableOperator) -> Result<Multiplier> {
        t.apply(&self.0).map(Multiplier)
    }
}

/// The multipliers `e_1, …, e_n` of `A^n` (the truncated standard module).
pub fn standard_basis(chain: Arc<SeminormChain>, n: usize) -> Result<Vec<Multiplier>> {
    if n == 0 {
        return Err(Error::InvalidCount("standard basis needs at least one element".into()));
    }
    let space = Arc::new(ModuleSpace::free(chain, n)?);
    let id = space.identity_matrix();
    Ok((0..n)
        .map(|k| Multiplier(ModuleElement::from_matrix_unchecked(Arc::clone(&space), id.column(k))))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraElement, BlockShape};
    use crate::random::{random_chain, random_module_element, random_projection, seeded_rng};
    use crate::DEFAULT_TOL;

    fn scalar_chain() -> Arc<SeminormChain> {
        Arc::new(SeminormChain::single(BlockShape::scalar()))
    }

    fn scalar_vec(space: &Arc<ModuleSpace>, values: &[f64]) -> ModuleElement {
        let shape = space.chain().top_shape().clone();
        let coords = values.iter().map(|&v| AlgebraElement::scalar(&shape, C64::new(v, 0.0))).collect();
        ModuleElement::from_top(Arc::clone(space), coords).unwrap()
    }

    #[test]
    fn inner_examples() {
        let space = Arc::new(ModuleSpace::free(scalar_chain(), 2).unwrap());
        let x = scalar_vec(&space, &[1.0, 0.0]);
        let y = scalar_vec(&space, &[0.0, 1.0]);
        assert_eq!(x.inner(&y).unwrap().bounded_norm(), 0.0);
        assert_eq!(x.inner(&ModuleElement::zero(Arc::clone(&space))).unwrap().bounded_norm(), 0.0);
        let v = scalar_vec(&space, &[3.0, 4.0]);
        assert!((v.module_seminorm(1).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn inner_product_axioms() {
        let mut rng = seeded_rng(21);
        for _ in 0..10 {
            let chain = Arc::new(random_chain(&mut rng, 3, 3, 3));
            let space = Arc::new(ModuleSpace::free(Arc::clone(&chain), 3).unwrap());
            let x = random_module_element(&space, &mut rng);
            let y = random_module_element(&space, &mut rng);
            let xy = x.inner(&y).unwrap();
            let yx = y.inner(&x).unwrap();
            assert!(xy.adjoint().top().max_abs_diff(yx.top()).unwrap() < 1e-13);
            assert!(x.inner(&x).unwrap().is_positive(DEFAULT_TOL));
            for level in 1..=chain.num_levels() {
                let lhs = xy.seminorm(level).unwrap();
                let rhs = x.module_seminorm(level).unwrap() * y.module_seminorm(level).unwrap();
                assert!(lhs <= rhs + 1e-10);
            }
        }
    }

    #[test]
    fn action_is_compatible_with_inner() {
        let mut rng = seeded_rng(22);
        let chain = Arc::new(random_chain(&mut rng, 2, 3, 3));
        let space = Arc::new(ModuleSpace::free(Arc::clone(&chain), 2).unwrap());
        let x = random_module_element(&space, &mut rng);
        let y = random_module_element(&space, &mut rng);
        let a = CoherentElement::new(
            Arc::clone(&chain),
            crate::random::random_element(chain.top_shape(), &mut rng),
        )
        .unwrap();
        assert_eq!(x.act(&CoherentElement::identity(Arc::clone(&chain))).unwrap(), x);
        assert_eq!(x.act(&CoherentElement::zero(Arc::clone(&chain))).unwrap().bounded_norm(), 0.0);
        let lhs = x.inner(&y.act(&a).unwrap()).unwrap();
        let rhs = x.inner(&y).unwrap().mul(&a).unwrap();
        assert!(lhs.top().max_abs_diff(rhs.top()).unwrap() < 1e-12);
        let xa = x.act(&a).unwrap();
        let lhs = xa.inner(&xa).unwrap();
        let rhs = a.adjoint().mul(&x.inner(&x).unwrap()).unwrap().mul(&a).unwrap();
        assert!(lhs.top().max_abs_diff(rhs.top()).unwrap() < 1e-10);
    }

    #[test]
    fn levelwise_compatibility_is_exact() {
        let mut rng = seeded_rng(23);
        let chain = Arc::new(random_chain(&mut rng, 3, 3, 2));
        let space = Arc::new(ModuleSpace::free(Arc::clone(&chain), 2).unwrap());
        let x = random_module_element(&space, &mut rng);
        let y = random_module_element(&space, &mut rng);
        for level in 1..=chain.num_levels() {
            let sub = Arc::new(space.at_level(level).unwrap());
            let lhs = x.inner(&y).unwrap().project(level).unwrap();
            let rhs = x.at_level(level, &sub).unwrap().inner(&y.at_level(level, &sub).unwrap()).unwrap();
            assert_eq!(&lhs, rhs.top());
        }
    }

    #[test]
    fn standard_basis_examples() {
        let mut rng = seeded_rng(24);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 2));
        assert!(matches!(standard_basis(Arc::clone(&chain), 0), Err(Error::InvalidCount(_))));
        let single = standard_basis(Arc::clone(&chain), 1).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].as_element().coord(0), CoherentElement::identity(Arc::clone(&chain)));

        let basis = standard_basis(Arc::clone(&chain), 3).unwrap();
        let space = Arc::clone(basis[0].space());
        let xi = random_module_element(&space, &mut rng);
        for (n, e) in basis.iter().enumerate() {
            assert_eq!(e.pair(&xi).unwrap(), xi.coord(n));
            for (m, f) in basis.iter().enumerate() {
                let expected = if n == m {
                    CoherentElement::identity(Arc::clone(&chain))
                } else {
                    CoherentElement::zero(Arc::clone(&chain))
                };
                assert_eq!(e.pair(f.as_element()).unwrap(), expected);
            }
        }
    }

    #[test]
    fn projective_membership() {
        let mut rng = seeded_rng(25);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 2));
        let p = random_projection(&chain, 3, &mut rng);
        let space = Arc::new(ModuleSpace::projective(Arc::clone(&chain), p, MEMBERSHIP_TOL).unwrap());
        let x = random_module_element(&space, &mut rng);
        let y = random_module_element(&space, &mut rng);
        let sum = x.add(&y).unwrap();
        assert!(space.membership_residual(sum.coords_matrix()) < 1e-12);

        let free = Arc::new(ModuleSpace::free(Arc::clone(&chain), 3).unwrap());
        let outside = random_module_element(&free, &mut rng);
        let err = ModuleElement::from_matrix(Arc::clone(&space), outside.coords_matrix().clone());
        assert!(matches!(err, Err(Error::NotMember { .. })));
        assert!(matches!(x.inner(&outside), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn rejects_bad_projections() {
        let chain = scalar_chain();
        let shape = chain.top_shape().clone();
        let s = |v: f64| AlgebraElement::scalar(&shape, C64::new(v, 0.0));
        let not_idem = ModuleMatrix::from_rows(shape.clone(), vec![vec![s(1.001), s(0.0)], vec![s(0.0), s(0.0)]]).unwrap();
        assert!(matches!(
            ModuleSpace::projective(Arc::clone(&chain), not_idem, MEMBERSHIP_TOL),
            Err(Error::NotAProjection(_))
        ));
        let not_sa = ModuleMatrix::from_rows(shape.clone(), vec![vec![s(1.0), s(1.0)], vec![s(0.0), s(0.0)]]).unwrap();
        assert!(ModuleSpace::projective(Arc::clone(&chain), not_sa, MEMBERSHIP_TOL).is_err());
        let zero = ModuleMatrix::zeros(2, 2, &shape);
        assert!(ModuleSpace::projective(chain, zero, MEMBERSHIP_TOL).is_err());
    }
}
