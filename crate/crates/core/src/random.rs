//! Seeded random instances: chains, elements, frames, projections and
//! positive operators.
//!
//! Everything draws from [`ChaCha8Rng`] with independent standard complex
//! Gaussian entries (`re, im ~ N(0, 1/2)`), so a seed pins an instance
//! exactly across platforms.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{herm_eigen, AlgebraElement, BlockShape, C64};
use crate::frames::Frame;
use crate::hilbert_module::{AdjointableOperator, ModuleElement, ModuleMatrix, ModuleSpace, Multiplier};
use crate::prosystem::SeminormChain;

pub type Prng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Prng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    // column-major fill order is part of the fixture contract
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_element<R: Rng + ?Sized>(shape: &BlockShape, rng: &mut R) -> AlgebraElement {
    let blocks = shape.blocks().iter().map(|&n| gaussian_matrix(n, n, rng)).collect();
    AlgebraElement::new(shape.clone(), blocks).expect("finite gaussian entries")
}

/// A chain of `levels` levels whose top has between 1 and `max_blocks`
/// blocks of size at most `max_size`. Each step down deletes a random
/// subset of blocks, keeping at least one.
pub fn random_chain<R: Rng + ?Sized>(rng: &mut R, levels: usize, max_blocks: usize, max_size: usize) -> SeminormChain {
    let levels = levels.max(1);
    let top_blocks = rng.random_range(1..=max_blocks.max(1));
    let top: Vec<usize> = (0..top_blocks).map(|_| rng.random_range(1..=max_size.max(1))).collect();
    let mut shapes = vec![top];
    let mut maps = Vec::new();
    for _ in 1..levels {
        let upper = shapes.last().expect("non-empty").clone();
        let mut keep: Vec<usize> = (0..upper.len()).filter(|_| rng.random_bool(0.6)).collect();
        if keep.is_empty() {
            keep.push(rng.random_range(0..upper.len()));
        }
        shapes.push(keep.iter().map(|&j| upper[j]).collect());
        maps.push(keep);
    }
    shapes.reverse();
    maps.reverse();
    let shapes = shapes.into_iter().map(|b| BlockShape::new(b).expect("positive sizes")).collect();
    SeminormChain::new(shapes, maps).expect("valid by construction")
}

/// Deterministic chain of `levels` levels over the given top blocks: level
/// `ℓ` keeps the first `max(1, k − (L − ℓ))` of the `k` top blocks.
pub fn truncating_chain(levels: usize, top: &[usize]) -> crate::error::Result<SeminormChain> {
    let levels = levels.max(1);
    let k = top.len();
    let count = |level: usize| (k + level).saturating_sub(levels).max(1).min(k);
    let shapes = (1..=levels)
        .map(|l| BlockShape::new(top[..count(l)].to_vec()))
        .collect::<crate::error::Result<Vec<_>>>()?;
    let maps = (1..levels).map(|l| (0..count(l)).collect()).collect();
    SeminormChain::new(shapes, maps)
}

/// A Gaussian element of `E` (ambient Gaussian, then projected).
pub fn random_module_element<R: Rng + ?Sized>(space: &Arc<ModuleSpace>, rng: &mut R) -> ModuleElement {
    let shape = space.chain().top_shape();
    let coords: Vec<AlgebraElement> = (0..space.rank()).map(|_| random_element(shape, rng)).collect();
    let column = ModuleMatrix::new(space.rank(), 1, shape.clone(), coords).expect("consistent shape");
    let projected = space.project_coords(&column).expect("consistent shape");
    ModuleElement::from_matrix_unchecked(Arc::clone(space), projected)
}

/// A Hermitian idempotent on `A^n` with rank between 1 and `n·n_b − 1` in
/// each block (rank 1 for `1×1` realizations).
pub fn random_projection<R: Rng + ?Sized>(chain: &SeminormChain, n: usize, rng: &mut R) -> ModuleMatrix {
    let shape = chain.top_shape();
    let blocks: Vec<DMatrix<C64>> = shape
        .blocks()
        .iter()
        .map(|&size| {
            let dim = n * size;
            let g = gaussian_matrix(dim, dim, rng);
            let (_, vectors) = herm_eigen(&(&g + g.adjoint()));
            let rank = if dim == 1 { 1 } else { rng.random_range(1..dim) };
            let u = vectors.columns(0, rank).into_owned();
            &u * u.adjoint()
        })
        .collect();
    ModuleMatrix::from_flattened(n, n, shape, &blocks)
}

/// A generic operator `E → F` (ambient Gaussian, compressed by the
/// projections).
pub fn random_operator<R: Rng + ?Sized>(domain: &Arc<ModuleSpace>, codomain: &Arc<ModuleSpace>, rng: &mut R) -> AdjointableOperator {
    let shape = domain.chain().top_shape();
    let entries = (0..codomain.rank() * domain.rank()).map(|_| random_element(shape, rng)).collect();
    let m = ModuleMatrix::new(codomain.rank(), domain.rank(), shape.clone(), entries).expect("consistent");
    let m = codomain
        .identity_matrix()
        .mul(&m)
        .and_then(|qm| qm.mul(&domain.identity_matrix()))
        .expect("consistent");
    AdjointableOperator::new(Arc::clone(domain), Arc::clone(codomain), m).expect("maps E into F")
}

/// A positive invertible element of `L(E)`: `P (G*G + ¼) P`.
pub fn random_positive_operator<R: Rng + ?Sized>(space: &Arc<ModuleSpace>, rng: &mut R) -> AdjointableOperator {
    let shape = space.chain().top_shape();
    let d = space.rank();
    let entries = (0..d * d).map(|_| random_element(shape, rng)).collect();
    let g = ModuleMatrix::new(d, d, shape.clone(), entries).expect("consistent");
    let shift = ModuleMatrix::identity(d, shape).scale(C64::new(0.25, 0.0));
    let m = g.adjoint().mul(&g).and_then(|gg| gg.add(&shift)).expect("consistent");
    let p = space.identity_matrix();
    let m = p.mul(&m).and_then(|pm| pm.mul(&p)).expect("consistent");
    AdjointableOperator::new(Arc::clone(space), Arc::clone(space), m).expect("maps E into E")
}

/// `count` Gaussian multipliers in `E`, redrawn until the frame's bound
/// ratio `C/D` is at least `min_ratio`.
pub fn random_frame<R: Rng + ?Sized>(space: &Arc<ModuleSpace>, count: usize, min_ratio: f64, rng: &mut R) -> Frame {
    loop {
        let multipliers = (0..count)
            .map(|_| Multiplier::from_element(random_module_element(space, rng)))
            .collect();
        let frame = Frame::new(Arc::clone(space), multipliers).expect("non-empty, same space");
        let bounds = frame.optimal_bounds();
        if bounds.upper > 0.0 && bounds.lower / bounds.upper >= min_ratio {
            return frame;
        }
    }
}
