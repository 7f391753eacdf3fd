//! Standard frames of multipliers and everything built on them: optimal
//! bounds, the frame transform, reconstruction, normalization, canonical
//! duals and the duality criteria.
//!
//! A frame `{h_n}` has analysis operator `θ(ξ) = (⟨h_n, ξ⟩)_n` into the
//! truncated standard module `A^N`, and its gram operator `θ*θ` is
//! `ξ ↦ Σ_n h_n·⟨h_n, ξ⟩`. The optimal bounds are the extreme eigenvalues of
//! the level realizations of `θ*θ` on `E`.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::ScalarFn;
use crate::error::{Error, Result};
use crate::hilbert_module::{
    same_space, standard_basis, AdjointableOperator, ModuleElement, ModuleMatrix, ModuleSpace, Multiplier,
};
use crate::prosystem::{CoherentElement, SeminormChain};
use crate::random::{random_module_element, seeded_rng};
use crate::{DEFAULT_TOL, FRAME_GAP, MEMBERSHIP_TOL, VERIFY_TOL};

/// Seed of the sample used to confirm the reconstruction identity.
const RECONSTRUCTION_SAMPLE_SEED: u64 = 0x5eed;
const RECONSTRUCTION_SAMPLES: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelBounds {
    pub level: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Optimal frame bounds, aggregated as `C = min_ℓ C_ℓ`, `D = max_ℓ D_ℓ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub per_level: Vec<LevelBounds>,
}

impl FrameBounds {
    /// `C > 1e-8·(1+D)`.
    pub fn is_frame(&self) -> bool {
        self.lower > FRAME_GAP * (1.0 + self.upper)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.lower - 1.0).abs() <= tol && (self.upper - 1.0).abs() <= tol
    }

    pub fn level_is_normalized(&self, level: usize, tol: f64) -> bool {
        self.per_level
            .iter()
            .find(|b| b.level == level)
            .is_some_and(|b| (b.lower - 1.0).abs() <= tol && (b.upper - 1.0).abs() <= tol)
    }
}

/// `θ`, `θ*θ` and `(θ*θ)^{-1}` for a frame.
#[derive(Clone, Debug)]
pub struct FrameOperatorBundle {
    pub theta: AdjointableOperator,
    pub gram: AdjointableOperator,
    pub inv_gram: AdjointableOperator,
}

/// A finite ordered family `h_1, …, h_N` of multipliers of one module.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    space: Arc<ModuleSpace>,
    multipliers: Vec<Multiplier>,
}

impl Frame {
    pub fn new(space: Arc<ModuleSpace>, multipliers: Vec<Multiplier>) -> Result<Self> {
        if multipliers.is_empty() {
            return Err(Error::InvalidCount("a frame needs at least one multiplier".into()));
        }
        if let Some(n) = multipliers.iter().position(|h| !same_space(h.space(), &space)) {
            return Err(Error::SpaceMismatch(format!("multiplier {n} lives in another module")));
        }
        Ok(Frame { space, multipliers })
    }

    /// `{e_n}` on `A^n`.
    pub fn standard(chain: Arc<SeminormChain>, n: usize) -> Result<Self> {
        let basis = standard_basis(chain, n)?;
        let space = Arc::clone(basis[0].space());
        Ok(Frame { space, multipliers: basis })
    }

    pub fn space(&self) -> &Arc<ModuleSpace> {
        &self.space
    }

    pub fn multipliers(&self) -> &[Multiplier] {
        &self.multipliers
    }

    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }

    fn check_member(&self, xi: &ModuleElement) -> Result<()> {
        if same_space(xi.space(), &self.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch("element is not in the frame's module".into()))
        }
    }

    /// `Σ_n ⟨ξ, h_n⟩⟨h_n, ξ⟩`.
    pub fn frame_sum(&self, xi: &ModuleElement) -> Result<CoherentElement> {
        self.check_member(xi)?;
        let mut acc = CoherentElement::zero(Arc::clone(self.space.chain()));
        for h in &self.multipliers {
            let c = h.pair(xi)?;
            acc = acc.add(&c.adjoint().mul(&c)?)?;
        }
        Ok(acc)
    }

    /// The truncated standard module `A^N` that receives `θ`.
    pub fn transform_space(&self) -> Arc<ModuleSpace> {
        Arc::new(ModuleSpace::free(Arc::clone(self.space.chain()), self.len()).expect("N >= 1"))
    }

    /// `θ` as the `N × d` matrix whose rows are `h_n*`; no frame check.
    pub fn analysis_operator(&self) -> AdjointableOperator {
        let shape = self.space.chain().top_shape().clone();
        let d = self.space.rank();
        let mut entries = Vec::with_capacity(self.len() * d);
        for h in &self.multipliers {
            let col = h.as_element().coords_matrix();
            entries.extend((0..d).map(|j| col.get(j, 0).adjoint()));
        }
        let matrix = ModuleMatrix::new(self.len(), d, shape, entries).expect("consistent dimensions");
        AdjointableOperator::from_matrix_unchecked(Arc::clone(&self.space), self.transform_space(), matrix)
    }

    /// `θ*θ = Σ_n h_n h_n*`; no frame check.
    pub fn gram_operator(&self) -> AdjointableOperator {
        let theta = self.analysis_operator();
        theta.adjoint().compose(&theta).expect("θ* ∘ θ is composable")
    }

    /// Extreme eigenvalues of the gram operator on `E`, level by level.
    pub fn optimal_bounds(&self) -> FrameBounds {
        let gram = self.gram_operator();
        let chain = self.space.chain();
        let blocks = chain.top_shape().num_blocks();
        let per_block: Vec<(f64, f64)> = (0..blocks)
            .map(|b| {
                let c = gram.compressed(b);
                let values = crate::algebra::herm_eigen(&c).0;
                if values.is_empty() {
                    (f64::INFINITY, f64::NEG_INFINITY)
                } else {
                    (values[0], values[values.len() - 1])
                }
            })
            .collect();
        let per_level: Vec<LevelBounds> = (1..=chain.num_levels())
            .map(|level| {
                let survivors = chain.survivors(level).expect("valid level");
                let lower = survivors.iter().map(|&b| per_block[b].0).fold(f64::INFINITY, f64::min);
                let upper = survivors.iter().map(|&b| per_block[b].1).fold(f64::NEG_INFINITY, f64::max);
                LevelBounds { level, lower, upper }
            })
            .collect();
        let lower = per_level.iter().map(|b| b.lower).fold(f64::INFINITY, f64::min);
        let upper = per_level.iter().map(|b| b.upper).fold(f64::NEG_INFINITY, f64::max);
        FrameBounds { lower, upper, per_level }
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        self.optimal_bounds().is_normalized(tol)
    }

    fn require_frame(&self) -> Result<FrameBounds> {
        let bounds = self.optimal_bounds();
        if bounds.is_frame() {
            Ok(bounds)
        } else {
            Err(Error::NotAFrame { lower: bounds.lower, upper: bounds.upper })
        }
    }

    /// The frame transform with its gram operator and inverse.
    pub fn transform(&self) -> Result<FrameOperatorBundle> {
        self.require_frame()?;
        let theta = self.analysis_operator();
        let theta_adj = theta.adjoint();
        let target = theta.codomain();
        for (n, (e, h)) in standard_basis(Arc::clone(self.space.chain()), self.len())?
            .iter()
            .zip(&self.multipliers)
            .enumerate()
        {
            // e_n lives in a fresh A^N; move it into θ's codomain
            let e = ModuleElement::from_top(
                Arc::clone(target),
                e.as_element().coords().into_iter().map(CoherentElement::into_top).collect(),
            )?;
            let back = theta_adj.apply(&e)?;
            let dev = back.coords_matrix().max_abs_diff(h.as_element().coords_matrix())?;
            if dev > 1e-10 {
                return Err(Error::VerificationFailure(format!("θ*∘e_{n} deviates from h_{n} by {dev:.3e}")));
            }
        }
        let gram = theta_adj.compose(&theta)?;
        let inv_gram = gram.inverse(DEFAULT_TOL)?;
        let id = AdjointableOperator::identity(Arc::clone(&self.space));
        let dev = inv_gram.compose(&gram)?.sub(&id)?.bounded_norm();
        if dev > VERIFY_TOL * (1.0 + gram.bounded_norm() * inv_gram.bounded_norm()) {
            return Err(Error::VerificationFailure(format!("(θ*θ)^-1 θ*θ deviates from id by {dev:.3e}")));
        }
        Ok(FrameOperatorBundle { theta, gram, inv_gram })
    }

    /// `Σ_n h_n·⟨h_n, ξ⟩`, which is `θ*θ ξ` and equals `ξ` exactly when the
    /// frame is normalized.
    pub fn reconstruct(&self, xi: &ModuleElement) -> Result<ModuleElement> {
        self.mixed_reconstruct(self, xi)
    }

    /// `Σ_n h_n·⟨t_n, ξ⟩` with `t_n` taken from `analysis`.
    pub fn mixed_reconstruct(&self, analysis: &Frame, xi: &ModuleElement) -> Result<ModuleElement> {
        self.check_member(xi)?;
        if analysis.len() != self.len() {
            return Err(Error::CountMismatch { left: self.len(), right: analysis.len() });
        }
        let mut acc = ModuleElement::zero(Arc::clone(&self.space));
        for (h, t) in self.multipliers.iter().zip(&analysis.multipliers) {
            acc = acc.add(&h.call(&t.pair(xi)?)?)?;
        }
        Ok(acc)
    }

    /// `{T ∘ h_n}` for an endomorphism `T` of the frame's module.
    fn mapped(&self, t: &AdjointableOperator) -> Result<Frame> {
        let multipliers = self
            .multipliers
            .iter()
            .map(|h| h.compose_with(t))
            .collect::<Result<Vec<_>>>()?;
        Frame::new(Arc::clone(&self.space), multipliers)
    }

    /// `{(θ*θ)^{-1/2} ∘ h_n}`, a normalized frame.
    pub fn normalize(&self) -> Result<Frame> {
        let bundle = self.transform()?;
        let t = bundle.gram.calculus(&ScalarFn::InvSqrt, 0.0)?;
        self.mapped(&t)
    }

    /// `{S ∘ h_n}` for a positive invertible `S ∈ L(E)`.
    pub fn scale_by_operator(&self, s: &AdjointableOperator) -> Result<Frame> {
        if !same_space(s.domain(), &self.space) || !s.is_endomorphism() {
            return Err(Error::NotPositiveInvertible("not an endomorphism of the frame's module".into()));
        }
        if !s.is_positive(DEFAULT_TOL) {
            return Err(Error::NotPositiveInvertible("operator is not positive".into()));
        }
        s.inverse(DEFAULT_TOL)
            .map_err(|e| Error::NotPositiveInvertible(e.to_string()))?;
        self.mapped(s)
    }

    /// `{(θ*θ)^{-1} ∘ h_n}`.
    pub fn canonical_dual(&self) -> Result<Frame> {
        let bundle = self.transform()?;
        self.mapped(&bundle.inv_gram)
    }

    /// The unique positive invertible `S` with `ξ = Σ_n h_n·⟨S∘h_n, ξ⟩`,
    /// namely `(θ*θ)^{-1}`.
    ///
    /// The result is cross-checked against `T*T` with `T = (θ*θ)^{-1/2}` and
    /// the identity is confirmed on a fixed seeded sample.
    pub fn reconstruction_operator(&self) -> Result<AdjointableOperator> {
        let bundle = self.transform()?;
        let s = bundle.inv_gram;
        let t = bundle.gram.calculus(&ScalarFn::InvSqrt, 0.0)?;
        let candidate = t.adjoint().compose(&t)?;
        let gap = candidate.sub(&s)?.bounded_norm();
        if gap > VERIFY_TOL * (1.0 + s.bounded_norm()) {
            return Err(Error::VerificationFailure(format!("T*T differs from (θ*θ)^-1 by {gap:.3e}")));
        }
        if !s.is_positive(DEFAULT_TOL) {
            return Err(Error::VerificationFailure("(θ*θ)^-1 is not positive".into()));
        }
        let dual = self.mapped(&s)?;
        let mut rng = seeded_rng(RECONSTRUCTION_SAMPLE_SEED);
        for _ in 0..RECONSTRUCTION_SAMPLES {
            let xi = random_module_element(&self.space, &mut rng);
            let residual = self.mixed_reconstruct(&dual, &xi)?.sub(&xi)?.bounded_norm();
            if residual > VERIFY_TOL * (1.0 + xi.bounded_norm()) {
                return Err(Error::VerificationFailure(format!(
                    "mixed reconstruction residual {residual:.3e}"
                )));
            }
        }
        Ok(s)
    }

    /// `‖h_n‖_∞` for every multiplier; each is at most `√D` for a frame
    /// with upper bound `D`.
    pub fn membership_bounds(&self) -> Vec<f64> {
        self.multipliers.iter().map(|h| h.as_element().bounded_norm()).collect()
    }

    /// The image frame `{(π_ℓ)_*(h_n)}` in `E_ℓ`.
    pub fn at_level(&self, level: usize) -> Result<Frame> {
        let space = Arc::new(self.space.at_level(level)?);
        let multipliers = self
            .multipliers
            .iter()
            .map(|h| h.as_element().at_level(level, &space).map(Multiplier::from_element))
            .collect::<Result<Vec<_>>>()?;
        Frame::new(space, multipliers)
    }
}

fn check_pair(first: &Frame, second: &Frame) -> Result<()> {
    if !same_space(&first.space, &second.space) {
        return Err(Error::SpaceMismatch("frames live in different modules".into()));
    }
    if first.len() != second.len() {
        return Err(Error::CountMismatch { left: first.len(), right: second.len() });
    }
    Ok(())
}

/// `p̃_ℓ(θ₁*θ₂ − id_E)` for every level `ℓ`.
pub fn duality_residuals(first: &Frame, second: &Frame) -> Result<Vec<f64>> {
    check_pair(first, second)?;
    let cross = first.analysis_operator().adjoint().compose(&second.analysis_operator())?;
    let diff = cross.sub(&AdjointableOperator::identity(Arc::clone(&first.space)))?;
    (1..=first.space.chain().num_levels())
        .map(|level| diff.operator_seminorm(level))
        .collect()
}

/// Two frames are dual to each other iff `θ₁*θ₂ = id_E`.
pub fn duality_check(first: &Frame, second: &Frame, tol: f64) -> Result<bool> {
    Ok(duality_residuals(first, second)?.iter().all(|&r| r <= tol))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BidualReport {
    /// `max_n ‖h_n'' − h_n‖_∞`.
    pub multiplier_residual: f64,
    /// `‖((θ')*θ')^{-1} − θ*θ‖_∞`.
    pub gram_residual: f64,
    /// `‖(θ')*θ − id_E‖_∞`.
    pub cross_residual: f64,
    pub holds: bool,
}

pub fn bidual_report(frame: &Frame, tol: f64) -> Result<BidualReport> {
    let bundle = frame.transform()?;
    let dual = frame.canonical_dual()?;
    let bidual = dual.canonical_dual()?;
    let mut multiplier_residual = 0.0_f64;
    for (h, hh) in frame.multipliers.iter().zip(&bidual.multipliers) {
        multiplier_residual = multiplier_residual.max(hh.as_element().sub(h.as_element())?.bounded_norm());
    }
    let dual_bundle = dual.transform()?;
    let gram_residual = dual_bundle.inv_gram.sub(&bundle.gram)?.bounded_norm();
    let id = AdjointableOperator::identity(Arc::clone(&frame.space));
    let cross = dual_bundle.theta.adjoint().compose(&bundle.theta)?;
    let cross_residual = cross.sub(&id)?.bounded_norm();
    let holds = multiplier_residual <= tol && gram_residual <= tol && cross_residual <= tol;
    Ok(BidualReport { multiplier_residual, gram_residual, cross_residual, holds })
}

/// The canonical dual of the canonical dual is the frame itself.
pub fn bidual_check(frame: &Frame, tol: f64) -> Result<bool> {
    Ok(bidual_report(frame, tol)?.holds)
}

/// `{P ∘ e_n}` on `E = P·A^N` for a projection `P` on the free module `A^N`.
pub fn frame_from_projection(p: &AdjointableOperator) -> Result<Frame> {
    if !p.is_endomorphism() || !p.domain().is_free() {
        return Err(Error::NotAProjection("expected an endomorphism of a free module".into()));
    }
    let chain = Arc::clone(p.domain().chain());
    let space = Arc::new(ModuleSpace::projective(chain, p.matrix().clone(), MEMBERSHIP_TOL)?);
    let multipliers = (0..space.rank())
        .map(|n| {
            let column = p.matrix().column(n);
            let coords = (0..column.rows()).map(|i| column.get(i, 0).clone()).collect();
            ModuleElement::from_top(Arc::clone(&space), coords).map(Multiplier::from_element)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::NotAProjection(e.to_string()))?;
    Frame::new(space, multipliers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraElement, BlockShape, C64};
    use crate::random::{random_chain, random_frame, random_positive_operator, random_projection};

    fn scalar_space(rank: usize) -> Arc<ModuleSpace> {
        let chain = Arc::new(SeminormChain::single(BlockShape::scalar()));
        Arc::new(ModuleSpace::free(chain, rank).unwrap())
    }

    fn scalar_frame(space: &Arc<ModuleSpace>, vectors: &[&[C64]]) -> Frame {
        let shape = space.chain().top_shape().clone();
        let multipliers = vectors
            .iter()
            .map(|v| {
                let coords = v.iter().map(|&c| AlgebraElement::scalar(&shape, c)).collect();
                Multiplier::from_element(ModuleElement::from_top(Arc::clone(space), coords).unwrap())
            })
            .collect();
        Frame::new(Arc::clone(space), multipliers).unwrap()
    }

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn ones() -> Frame {
        scalar_frame(&scalar_space(1), &[&[re(1.0)], &[re(1.0)]])
    }

    fn mercedes() -> Frame {
        let s = 3f64.sqrt() / 2.0;
        scalar_frame(&scalar_space(2), &[&[re(1.0), re(0.0)], &[re(-0.5), re(s)], &[re(-0.5), re(-s)]])
    }

    fn scalar_of(x: &CoherentElement) -> C64 {
        x.top().block(0)[(0, 0)]
    }

    #[test]
    fn frame_sum_examples() {
        let space = scalar_space(1);
        let single = scalar_frame(&space, &[&[re(1.0)]]);
        let xi = ModuleElement::from_top(
            Arc::clone(&space),
            vec![AlgebraElement::scalar(space.chain().top_shape(), C64::new(0.3, -1.2))],
        )
        .unwrap();
        assert_eq!(single.frame_sum(&xi).unwrap(), xi.inner(&xi).unwrap());

        let f = ones();
        let xi = ModuleElement::from_top(
            Arc::clone(f.space()),
            vec![AlgebraElement::scalar(f.space().chain().top_shape(), C64::new(0.3, -1.2))],
        )
        .unwrap();
        let expected = 2.0 * (0.09 + 1.44);
        assert!((scalar_of(&f.frame_sum(&xi).unwrap()) - re(expected)).norm() < 1e-14);

        let mut rng = seeded_rng(41);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 3));
        let e = Frame::standard(chain, 4).unwrap();
        let xi = random_module_element(e.space(), &mut rng);
        let diff = e.frame_sum(&xi).unwrap().sub(&xi.inner(&xi).unwrap()).unwrap();
        assert!(diff.bounded_norm() < 1e-13);
    }

    #[test]
    fn optimal_bounds_examples() {
        let mut rng = seeded_rng(42);
        let chain = Arc::new(random_chain(&mut rng, 3, 3, 3));
        let b = Frame::standard(chain, 3).unwrap().optimal_bounds();
        assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12);
        assert_eq!(b.per_level.len(), 3);

        // S = Σ v v* = (3/2)·I for the three unit vectors at 120°
        let b = mercedes().optimal_bounds();
        assert!((b.lower - 1.5).abs() < 1e-12 && (b.upper - 1.5).abs() < 1e-12);

        let zero = scalar_frame(&scalar_space(1), &[&[re(0.0)]]);
        let b = zero.optimal_bounds();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        assert!(!b.is_frame());
        assert!(matches!(zero.transform(), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn normalization_examples() {
        assert!(!ones().is_normalized(1e-9));
        let n = ones().normalize().unwrap();
        for h in n.multipliers() {
            assert!((scalar_of(&h.as_element().coord(0)) - re(0.5f64.sqrt())).norm() < 1e-14);
        }
        let m = mercedes();
        let nm = m.normalize().unwrap();
        let scale = (2.0f64 / 3.0).sqrt();
        for (h, g) in m.multipliers().iter().zip(nm.multipliers()) {
            let expected = h.as_element().scale(re(scale));
            assert!(g.as_element().sub(&expected).unwrap().bounded_norm() < 1e-14);
        }
        assert!(nm.is_normalized(1e-12));
        let again = nm.normalize().unwrap();
        for (a, b) in again.multipliers().iter().zip(nm.multipliers()) {
            assert!(a.as_element().sub(b.as_element()).unwrap().bounded_norm() < 1e-9);
        }
    }

    #[test]
    fn transform_examples() {
        let mut rng = seeded_rng(43);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 2));
        let e = Frame::standard(Arc::clone(&chain), 3).unwrap();
        let bundle = e.transform().unwrap();
        let id = ModuleMatrix::identity(3, chain.top_shape());
        assert_eq!(bundle.theta.matrix(), &id);
        assert_eq!(bundle.gram.matrix(), &id);

        let bundle = ones().transform().unwrap();
        assert_eq!(bundle.theta.matrix().rows(), 2);
        assert_eq!(scalar_of(&bundle.theta.entry(0, 0)), re(1.0));
        assert_eq!(scalar_of(&bundle.theta.entry(1, 0)), re(1.0));
        assert!((scalar_of(&bundle.gram.entry(0, 0)) - re(2.0)).norm() < 1e-15);

        let space = Arc::new(ModuleSpace::free(Arc::clone(&chain), 2).unwrap());
        let f = random_frame(&space, 4, 1e-2, &mut rng).normalize().unwrap();
        let theta = f.transform().unwrap().theta;
        for _ in 0..10 {
            let xi = random_module_element(&space, &mut rng);
            let eta = random_module_element(&space, &mut rng);
            let lhs = theta.apply(&xi).unwrap().inner(&theta.apply(&eta).unwrap()).unwrap();
            let rhs = xi.inner(&eta).unwrap();
            assert!(lhs.top().max_abs_diff(rhs.top()).unwrap() < 1e-9);
        }
    }

    #[test]
    fn reconstruction_examples() {
        let mut rng = seeded_rng(44);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 3));
        let e = Frame::standard(chain, 3).unwrap();
        let xi = random_module_element(e.space(), &mut rng);
        assert_eq!(e.reconstruct(&xi).unwrap(), xi);
        let zero = ModuleElement::zero(Arc::clone(e.space()));
        assert_eq!(e.reconstruct(&zero).unwrap().bounded_norm(), 0.0);

        let f = ones();
        let xi = ModuleElement::from_top(
            Arc::clone(f.space()),
            vec![AlgebraElement::scalar(f.space().chain().top_shape(), C64::new(-0.7, 0.2))],
        )
        .unwrap();
        let r = f.reconstruct(&xi).unwrap();
        assert!(r.sub(&xi.scale(re(2.0))).unwrap().bounded_norm() < 1e-15);

        let space = Arc::clone(e.space());
        let g = random_frame(&space, 5, 1e-2, &mut rng);
        let gram = g.gram_operator();
        let xi = random_module_element(&space, &mut rng);
        let diff = g.reconstruct(&xi).unwrap().sub(&gram.apply(&xi).unwrap()).unwrap();
        assert!(diff.bounded_norm() < 1e-12);
    }

    #[test]
    fn scaling_examples() {
        let space = scalar_space(1);
        let one = scalar_frame(&space, &[&[re(1.0)]]);
        let id = AdjointableOperator::identity(Arc::clone(&space));
        assert_eq!(one.scale_by_operator(&id).unwrap(), one);
        let two = one.scale_by_operator(&id.scale(re(2.0))).unwrap();
        assert_eq!(scalar_of(&two.multipliers()[0].as_element().coord(0)), re(2.0));
        let b = two.optimal_bounds();
        assert!((b.lower - 4.0).abs() < 1e-14 && (b.upper - 4.0).abs() < 1e-14);
        assert!(matches!(
            one.scale_by_operator(&id.scale(re(-1.0))),
            Err(Error::NotPositiveInvertible(_))
        ));
        let zero = AdjointableOperator::zero(Arc::clone(&space), Arc::clone(&space));
        assert!(one.scale_by_operator(&zero).is_err());

        let mut rng = seeded_rng(45);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 2));
        let e = Frame::standard(chain, 3).unwrap();
        let s = random_positive_operator(e.space(), &mut rng);
        assert!(e.scale_by_operator(&s).unwrap().optimal_bounds().lower > 0.0);
    }

    #[test]
    fn canonical_dual_examples() {
        let dual = ones().canonical_dual().unwrap();
        for h in dual.multipliers() {
            assert!((scalar_of(&h.as_element().coord(0)) - re(0.5)).norm() < 1e-15);
        }
        let m = mercedes();
        let dm = m.canonical_dual().unwrap();
        for (h, g) in m.multipliers().iter().zip(dm.multipliers()) {
            let expected = h.as_element().scale(re(2.0 / 3.0));
            assert!(g.as_element().sub(&expected).unwrap().bounded_norm() < 1e-14);
        }
        let nm = m.normalize().unwrap();
        let dn = nm.canonical_dual().unwrap();
        for (a, b) in nm.multipliers().iter().zip(dn.multipliers()) {
            assert!(a.as_element().sub(b.as_element()).unwrap().bounded_norm() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_operator_examples() {
        let mut rng = seeded_rng(46);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 2));
        let e = Frame::standard(chain, 2).unwrap();
        let s = e.reconstruction_operator().unwrap();
        assert!(s.max_abs_diff(&AdjointableOperator::identity(Arc::clone(e.space()))).unwrap() < 1e-12);

        let s = ones().reconstruction_operator().unwrap();
        assert!((scalar_of(&s.entry(0, 0)) - re(0.5)).norm() < 1e-15);

        let two = scalar_frame(&scalar_space(1), &[&[re(2.0)]]);
        let s = two.reconstruction_operator().unwrap();
        assert!((scalar_of(&s.entry(0, 0)) - re(0.25)).norm() < 1e-15);
    }

    #[test]
    fn duality_examples() {
        let f = ones();
        assert!(duality_check(&f, &f.canonical_dual().unwrap(), 1e-9).unwrap());
        assert!(!duality_check(&f, &f, 1e-9).unwrap());
        let r = duality_residuals(&f, &f).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-14);

        let mut rng = seeded_rng(47);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 2));
        let e = Frame::standard(chain, 3).unwrap();
        assert!(duality_check(&e, &e, 1e-12).unwrap());

        let m = mercedes();
        assert!(matches!(duality_check(&m, &f, 1e-9), Err(Error::SpaceMismatch(_))));
        let shorter = Frame::new(Arc::clone(f.space()), f.multipliers()[..1].to_vec()).unwrap();
        assert!(matches!(duality_check(&f, &shorter, 1e-9), Err(Error::CountMismatch { .. })));
    }

    #[test]
    fn bidual_examples() {
        let mut rng = seeded_rng(48);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 2));
        assert!(bidual_check(&Frame::standard(chain, 2).unwrap(), 1e-10).unwrap());
        assert!(bidual_check(&ones(), 1e-12).unwrap());
        assert!(bidual_check(&mercedes(), 1e-12).unwrap());
        let zero = scalar_frame(&scalar_space(1), &[&[re(0.0)]]);
        assert!(matches!(bidual_check(&zero, 1e-9), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn projection_examples() {
        let mut rng = seeded_rng(49);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 2));
        let free = Arc::new(ModuleSpace::free(Arc::clone(&chain), 3).unwrap());
        let id = AdjointableOperator::identity(Arc::clone(&free));
        let f = frame_from_projection(&id).unwrap();
        let e = Frame::standard(Arc::clone(&chain), 3).unwrap();
        for (a, b) in f.multipliers().iter().zip(e.multipliers()) {
            assert_eq!(a.as_element().coords_matrix(), b.as_element().coords_matrix());
        }

        // rank-one projection onto (1,1)/√2 in ℂ²
        let space = scalar_space(2);
        let shape = space.chain().top_shape().clone();
        let h = AlgebraElement::scalar(&shape, re(0.5));
        let p = ModuleMatrix::new(2, 2, shape, vec![h.clone(), h.clone(), h.clone(), h]).unwrap();
        let p = AdjointableOperator::new(Arc::clone(&space), Arc::clone(&space), p).unwrap();
        let f = frame_from_projection(&p).unwrap();
        for m in f.multipliers() {
            assert!((scalar_of(&m.as_element().coord(0)) - re(0.5)).norm() < 1e-15);
            assert!((scalar_of(&m.as_element().coord(1)) - re(0.5)).norm() < 1e-15);
        }
        assert!(f.is_normalized(1e-12));

        let p = random_projection(&chain, 3, &mut rng);
        let p = AdjointableOperator::new(Arc::clone(&free), Arc::clone(&free), p).unwrap();
        assert!(frame_from_projection(&p).unwrap().is_normalized(1e-10));

        let not_p = id.scale(re(2.0));
        assert!(matches!(frame_from_projection(&not_p), Err(Error::NotAProjection(_))));
    }

    #[test]
    fn membership_bounds_examples() {
        let mut rng = seeded_rng(50);
        let chain = Arc::new(random_chain(&mut rng, 2, 2, 2));
        let e = Frame::standard(Arc::clone(&chain), 3).unwrap();
        assert!(e.membership_bounds().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let vals = ones().membership_bounds();
        assert_eq!(vals, vec![1.0, 1.0]);
        assert!(vals.iter().all(|&v| v <= 2f64.sqrt()));
        let space = Arc::new(ModuleSpace::free(chain, 2).unwrap());
        let f = random_frame(&space, 5, 1e-2, &mut rng);
        let d = f.optimal_bounds().upper;
        assert!(f.membership_bounds().iter().all(|&v| v <= d.sqrt() + 1e-9));
        let n = f.normalize().unwrap();
        assert!(n.membership_bounds().iter().all(|&v| v <= 1.0 + 1e-9));
    }

    #[test]
    fn level_frames_reproduce_per_level_bounds() {
        let mut rng = seeded_rng(51);
        let chain = Arc::new(random_chain(&mut rng, 3, 3, 2));
        let space = Arc::new(ModuleSpace::free(Arc::clone(&chain), 2).unwrap());
        let f = random_frame(&space, 3, 1e-3, &mut rng);
        let bounds = f.optimal_bounds();
        for lb in &bounds.per_level {
            let sub = f.at_level(lb.level).unwrap().optimal_bounds();
            assert!((sub.lower - lb.lower).abs() < 1e-12);
            assert!((sub.upper - lb.upper).abs() < 1e-12);
        }
    }
}
