//! Independent checks of the frame engine: classical Hilbert-space frame
//! bounds on commutative levels and seeded sampling of the frame
//! inequalities.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::frames::{Frame, FrameBounds};
use crate::random::{random_module_element, seeded_rng};

const SAMPLING_SLACK: f64 = 1e-8;
const ORACLE_AGREEMENT: f64 = 1e-9;

/// `N` vectors in `ℂ^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalFrame {
    dim: usize,
    vectors: Vec<DVector<C64>>,
}

impl ClassicalFrame {
    pub fn new(dim: usize, vectors: Vec<DVector<C64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidShape("classical frame dimension must be positive".into()));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidCount("classical frame needs at least one vector".into()));
        }
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidShape(format!("every vector must have length {dim}")));
        }
        if vectors.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("classical frame vector".into()));
        }
        Ok(ClassicalFrame { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[DVector<C64>] {
        &self.vectors
    }

    /// Rows are `v_n*`.
    pub fn analysis_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.vectors.len(), self.dim, |n, j| self.vectors[n][j].conj())
    }
}

/// Extreme eigenvalues of `Σ v_n v_n*` as squared extreme singular values of
/// the analysis matrix; the lower bound is `0` when `N < m`.
pub fn classical_bounds(frame: &ClassicalFrame) -> (f64, f64) {
    let singular = frame.analysis_matrix().singular_values();
    let upper = singular.iter().cloned().fold(0.0_f64, f64::max);
    let lower = if frame.vectors.len() < frame.dim {
        0.0
    } else {
        singular.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    (lower * lower, upper * upper)
}

/// Samples `trials` module elements and checks
/// `C⟨ξ,ξ⟩ ≤ Σ⟨ξ,h_n⟩⟨h_n,ξ⟩ ≤ D⟨ξ,ξ⟩` for each.
pub fn sampled_order_check(frame: &Frame, bounds: &FrameBounds, trials: usize, seed: u64) -> bool {
    let mut rng = seeded_rng(seed);
    let lower = C64::new(bounds.lower, 0.0);
    let upper = C64::new(bounds.upper, 0.0);
    (0..trials.max(1)).all(|_| {
        let xi = random_module_element(frame.space(), &mut rng);
        let (Ok(sum), Ok(norm)) = (frame.frame_sum(&xi), xi.inner(&xi)) else {
            return false;
        };
        let below = sum.sub(&norm.scale(lower)).is_ok_and(|d| d.is_positive(SAMPLING_SLACK));
        let above = norm.scale(upper).sub(&sum).is_ok_and(|d| d.is_positive(SAMPLING_SLACK));
        below && above
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelComparison {
    pub level: usize,
    pub engine_lower: f64,
    pub engine_upper: f64,
    pub classical_lower: f64,
    pub classical_upper: f64,
    pub lower_delta: f64,
    pub upper_delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossValidationReport {
    pub levels: Vec<LevelComparison>,
    pub max_delta: f64,
    pub tolerance: f64,
    pub agrees: bool,
}

/// Orthonormal coordinates of the range of a projection, from its SVD.
fn range_coordinates(p: &DMatrix<C64>) -> DMatrix<C64> {
    let svd = p.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 0.5)
        .collect();
    u.select_columns(&keep)
}

/// The classical frame realizing block `b` of the frame's top level.
fn classical_block(frame: &Frame, b: usize) -> Result<ClassicalFrame> {
    let space = frame.space();
    let vectors: Vec<DVector<C64>> = frame
        .multipliers()
        .iter()
        .map(|h| {
            let flat = h.as_element().coords_matrix().flatten(b);
            DVector::from_iterator(flat.nrows(), flat.iter().cloned())
        })
        .collect();
    match space.projection() {
        None => ClassicalFrame::new(space.rank(), vectors),
        Some(p) => {
            let basis = range_coordinates(&p.flatten(b));
            let reduced = vectors.iter().map(|v| basis.adjoint() * v).collect();
            ClassicalFrame::new(basis.ncols(), reduced)
        }
    }
}

/// Compares the engine's per-level bounds with classical bounds computed
/// independently on every commutative level.
pub fn cross_validate(frame: &Frame) -> Result<CrossValidationReport> {
    let chain = frame.space().chain();
    if !chain.is_scalar() {
        return Err(Error::NotScalarLevels);
    }
    let blocks = chain.top_shape().num_blocks();
    let classical = (0..blocks)
        .map(|b| classical_block(frame, b).map(|f| classical_bounds(&f)))
        .collect::<Result<Vec<_>>>()?;
    let engine = frame.optimal_bounds();
    let mut levels = Vec::with_capacity(engine.per_level.len());
    for lb in &engine.per_level {
        let survivors = chain.survivors(lb.level)?;
        let classical_lower = survivors.iter().map(|&b| classical[b].0).fold(f64::INFINITY, f64::min);
        let classical_upper = survivors.iter().map(|&b| classical[b].1).fold(f64::NEG_INFINITY, f64::max);
        levels.push(LevelComparison {
            level: lb.level,
            engine_lower: lb.lower,
            engine_upper: lb.upper,
            classical_lower,
            classical_upper,
            lower_delta: (lb.lower - classical_lower).abs(),
            upper_delta: (lb.upper - classical_upper).abs(),
        });
    }
    let max_delta = levels
        .iter()
        .map(|l| l.lower_delta.max(l.upper_delta))
        .fold(0.0, f64::max);
    Ok(CrossValidationReport { levels, max_delta, tolerance: ORACLE_AGREEMENT, agrees: max_delta <= ORACLE_AGREEMENT })
}
