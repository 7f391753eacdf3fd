//! Pro-C*-algebras as finite inverse chains `A_1 ← A_2 ← … ← A_L`.
//!
//! Each connecting morphism deletes blocks, so an element of the inverse
//! limit is determined by its finest-level component. Lower levels are
//! obtained by restriction and coherence holds by construction.

use std::sync::Arc;

use crate::algebra::{AlgebraElement, BlockShape, C64};
use crate::error::{Error, Result};

/// Levels `1..=L` of block shapes, level `L` finest, with block-deleting
/// connecting maps between neighbours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeminormChain {
    levels: Vec<BlockShape>,
    /// `connecting[k]` lists, for each block of level `k+1`, the index of the
    /// block of level `k+2` it comes from (0-based, strictly increasing).
    connecting: Vec<Vec<usize>>,
    /// For each level, the indices of the top-level blocks that survive.
    survivors: Vec<Vec<usize>>,
}

impl SeminormChain {
    pub fn new(levels: Vec<BlockShape>, connecting: Vec<Vec<usize>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidChain("at least one level is required".into()));
        }
        if connecting.len() + 1 != levels.len() {
            return Err(Error::InvalidChain(format!(
                "{} levels need {} connecting maps, got {}",
                levels.len(),
                levels.len() - 1,
                connecting.len()
            )));
        }
        for (k, map) in connecting.iter().enumerate() {
            let (lower, upper) = (&levels[k], &levels[k + 1]);
            if map.len() != lower.num_blocks() {
                return Err(Error::InvalidChain(format!(
                    "connecting[{k}] has {} entries, level {} has {} blocks",
                    map.len(),
                    k + 1,
                    lower.num_blocks()
                )));
            }
            if map.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidChain(format!(
                    "connecting[{k}] must be strictly increasing"
                )));
            }
            for (i, &j) in map.iter().enumerate() {
                if j >= upper.num_blocks() {
                    return Err(Error::InvalidChain(format!(
                        "connecting[{k}][{i}] = {j} exceeds {} blocks at level {}",
                        upper.num_blocks(),
                        k + 2
                    )));
                }
                if upper.block(j) != lower.block(i) {
                    return Err(Error::InvalidChain(format!(
                        "connecting[{k}][{i}]: block size {} at level {} vs {} at level {}",
                        lower.block(i),
                        k + 1,
                        upper.block(j),
                        k + 2
                    )));
                }
            }
        }

        let top = levels.len() - 1;
        let mut survivors = vec![Vec::new(); levels.len()];
        survivors[top] = (0..levels[top].num_blocks()).collect();
        for k in (0..top).rev() {
            survivors[k] = connecting[k].iter().map(|&j| survivors[k + 1][j]).collect();
        }
        Ok(SeminormChain { levels, connecting, survivors })
    }

    /// A chain with a single level (an ordinary C*-algebra).
    pub fn single(shape: BlockShape) -> Self {
        let survivors = vec![(0..shape.num_blocks()).collect()];
        SeminormChain { levels: vec![shape], connecting: Vec::new(), survivors }
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[BlockShape] {
        &self.levels
    }

    pub fn connecting(&self) -> &[Vec<usize>] {
        &self.connecting
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if (1..=self.levels.len()).contains(&level) {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange { level, levels: self.levels.len() })
        }
    }

    /// Shape of `A_level` (1-based).
    pub fn level_shape(&self, level: usize) -> Result<&BlockShape> {
        self.check_level(level)?;
        Ok(&self.levels[level - 1])
    }

    pub fn top_shape(&self) -> &BlockShape {
        self.levels.last().expect("non-empty chain")
    }

    /// Top-level block indices that survive at `level`.
    pub fn survivors(&self, level: usize) -> Result<&[usize]> {
        self.check_level(level)?;
        Ok(&self.survivors[level - 1])
    }

    /// The sub-chain `1..=level`, whose limit is `A_level`.
    pub fn truncate(&self, level: usize) -> Result<SeminormChain> {
        self.check_level(level)?;
        SeminormChain::new(
            self.levels[..level].to_vec(),
            self.connecting[..level - 1].to_vec(),
        )
    }

    /// True when every block of every level is `1×1`.
    pub fn is_scalar(&self) -> bool {
        self.top_shape().is_commutative()
    }
}

pub(crate) fn same_chain(a: &Arc<SeminormChain>, b: &Arc<SeminormChain>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// An element of the inverse limit, stored at the finest level.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentElement {
    chain: Arc<SeminormChain>,
    top: AlgebraElement,
}

impl CoherentElement {
    pub fn new(chain: Arc<SeminormChain>, top: AlgebraElement) -> Result<Self> {
        if top.shape() != chain.top_shape() {
            return Err(Error::ShapeMismatch {
                left: top.shape().blocks().to_vec(),
                right: chain.top_shape().blocks().to_vec(),
            });
        }
        Ok(CoherentElement { chain, top })
    }

    pub(crate) fn from_top_unchecked(chain: Arc<SeminormChain>, top: AlgebraElement) -> Self {
        CoherentElement { chain, top }
    }

    pub fn zero(chain: Arc<SeminormChain>) -> Self {
        let top = AlgebraElement::zero(chain.top_shape());
        CoherentElement { chain, top }
    }

    pub fn identity(chain: Arc<SeminormChain>) -> Self {
        let top = AlgebraElement::identity(chain.top_shape());
        CoherentElement { chain, top }
    }

    pub fn scalar(chain: Arc<SeminormChain>, c: C64) -> Self {
        let top = AlgebraElement::scalar(chain.top_shape(), c);
        CoherentElement { chain, top }
    }

    /// Lift an element of `A_level` to the limit, zero on the deleted blocks.
    pub fn from_level(chain: Arc<SeminormChain>, level: usize, elem: &AlgebraElement) -> Result<Self> {
        let shape = chain.level_shape(level)?;
        if elem.shape() != shape {
            return Err(Error::ShapeMismatch {
                left: elem.shape().blocks().to_vec(),
                right: shape.blocks().to_vec(),
            });
        }
        let survivors = chain.survivors(level)?;
        let mut top = AlgebraElement::zero(chain.top_shape()).blocks().to_vec();
        for (i, &j) in survivors.iter().enumerate() {
            top[j] = elem.block(i).clone();
        }
        let top = AlgebraElement::from_blocks_unchecked(chain.top_shape().clone(), top);
        Ok(CoherentElement { chain, top })
    }

    pub fn chain(&self) -> &Arc<SeminormChain> {
        &self.chain
    }

    pub fn top(&self) -> &AlgebraElement {
        &self.top
    }

    pub fn into_top(self) -> AlgebraElement {
        self.top
    }

    /// The canonical map onto `A_level`.
    pub fn project(&self, level: usize) -> Result<AlgebraElement> {
        let shape = self.chain.level_shape(level)?;
        if level == self.chain.num_levels() {
            return Ok(self.top.clone());
        }
        Ok(self.top.restrict(shape, self.chain.survivors(level)?))
    }

    /// `p_level(a)`, the C*-norm of the projection.
    pub fn seminorm(&self, level: usize) -> Result<f64> {
        let survivors = self.chain.survivors(level)?;
        Ok(survivors
            .iter()
            .map(|&j| crate::algebra::spectral_norm(self.top.block(j)))
            .fold(0.0, f64::max))
    }

    /// `‖a‖_∞ = sup_p p(a)`; the finest level dominates in a finite chain.
    pub fn bounded_norm(&self) -> f64 {
        self.top.norm()
    }

    fn check_chain(&self, other: &Self) -> Result<()> {
        if same_chain(&self.chain, &other.chain) {
            Ok(())
        } else {
            Err(Error::ChainMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_chain(other)?;
        Ok(self.with_top(self.top.add_unchecked(&other.top)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_chain(other)?;
        Ok(self.with_top(self.top.sub_unchecked(&other.top)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_chain(other)?;
        Ok(self.with_top(self.top.mul_unchecked(&other.top)))
    }

    pub fn scale(&self, c: C64) -> Self {
        self.with_top(self.top.scale(c))
    }

    pub fn adjoint(&self) -> Self {
        self.with_top(self.top.adjoint())
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        self.top.is_positive(tol)
    }

    fn with_top(&self, top: AlgebraElement) -> Self {
        CoherentElement { chain: Arc::clone(&self.chain), top }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_chain, random_element, seeded_rng};
    use nalgebra::DMatrix;

    fn shape(b: &[usize]) -> BlockShape {
        BlockShape::new(b.to_vec()).unwrap()
    }

    fn two_level() -> Arc<SeminormChain> {
        Arc::new(SeminormChain::new(vec![shape(&[2]), shape(&[2, 1])], vec![vec![0]]).unwrap())
    }

    #[test]
    fn chain_validation() {
        assert!(SeminormChain::new(vec![], vec![]).is_err());
        // size mismatch: block 0 of level 1 is 1x1 but maps to a 2x2 block
        assert!(SeminormChain::new(vec![shape(&[1]), shape(&[2, 1])], vec![vec![0]]).is_err());
        assert!(SeminormChain::new(vec![shape(&[1, 1]), shape(&[1, 1])], vec![vec![1, 0]]).is_err());
        assert!(SeminormChain::new(vec![shape(&[1]), shape(&[1])], vec![vec![3]]).is_err());
        assert!(SeminormChain::new(vec![shape(&[1]), shape(&[1])], vec![]).is_err());
        let c = SeminormChain::new(
            vec![shape(&[3]), shape(&[1, 3]), shape(&[1, 2, 3])],
            vec![vec![1], vec![0, 2]],
        )
        .unwrap();
        assert_eq!(c.survivors(1).unwrap(), &[2]);
        assert_eq!(c.survivors(2).unwrap(), &[0, 2]);
        assert_eq!(c.survivors(3).unwrap(), &[0, 1, 2]);
    }

    #[test]
    fn project_examples() {
        let chain = two_level();
        let m = DMatrix::from_fn(2, 2, |r, k| C64::new((r + 2 * k) as f64, 1.0));
        let top = AlgebraElement::new(
            shape(&[2, 1]),
            vec![m.clone(), DMatrix::from_element(1, 1, C64::new(7.0, 0.0))],
        )
        .unwrap();
        let x = CoherentElement::new(chain, top.clone()).unwrap();
        assert_eq!(x.project(2).unwrap(), top);
        assert_eq!(x.project(1).unwrap().blocks(), &[m]);
        assert!(matches!(x.project(0), Err(Error::LevelOutOfRange { .. })));
        assert!(matches!(x.project(3), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn projection_composes() {
        let chain = Arc::new(
            SeminormChain::new(
                vec![shape(&[2]), shape(&[1, 2]), shape(&[1, 3, 2])],
                vec![vec![1], vec![0, 2]],
            )
            .unwrap(),
        );
        let mut rng = seeded_rng(11);
        let x = CoherentElement::new(Arc::clone(&chain), random_element(chain.top_shape(), &mut rng))
            .unwrap();
        let mid = x.project(2).unwrap();
        let via_mid = mid.restrict(chain.level_shape(1).unwrap(), &chain.connecting()[0]);
        assert_eq!(via_mid, x.project(1).unwrap());
    }

    #[test]
    fn seminorm_examples() {
        let chain = Arc::new(
            SeminormChain::new(vec![shape(&[1]), shape(&[1, 1])], vec![vec![1]]).unwrap(),
        );
        let zero = CoherentElement::zero(Arc::clone(&chain));
        assert_eq!(zero.seminorm(1).unwrap(), 0.0);
        assert_eq!(zero.seminorm(2).unwrap(), 0.0);
        let x = CoherentElement::new(
            Arc::clone(&chain),
            AlgebraElement::central(&shape(&[1, 1]), &[C64::new(3.0, 0.0), C64::new(1.0, 0.0)])
                .unwrap(),
        )
        .unwrap();
        assert!((x.seminorm(1).unwrap() - 1.0).abs() < 1e-15);
        assert!((x.seminorm(2).unwrap() - 3.0).abs() < 1e-15);
        assert!((x.bounded_norm() - 3.0).abs() < 1e-15);
        assert_eq!(CoherentElement::identity(chain).bounded_norm(), 1.0);
    }

    #[test]
    fn seminorms_are_monotone_and_bounded_norm_is_top() {
        let mut rng = seeded_rng(12);
        for _ in 0..20 {
            let chain = Arc::new(random_chain(&mut rng, 3, 3, 3));
            let x = CoherentElement::new(Arc::clone(&chain), random_element(chain.top_shape(), &mut rng))
                .unwrap();
            let norms: Vec<f64> =
                (1..=chain.num_levels()).map(|l| x.seminorm(l).unwrap()).collect();
            assert!(norms.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(x.bounded_norm(), *norms.last().unwrap());
            let b = x.bounded_norm();
            let bb = x.adjoint().mul(&x).unwrap().bounded_norm();
            assert!((bb - b * b).abs() <= 1e-10 * (1.0 + b * b));
        }
    }

    #[test]
    fn lifting_is_a_right_inverse_of_projection() {
        let mut rng = seeded_rng(13);
        for _ in 0..10 {
            let chain = Arc::new(random_chain(&mut rng, 3, 3, 2));
            for level in 1..=chain.num_levels() {
                let target = random_element(chain.level_shape(level).unwrap(), &mut rng);
                let lifted = CoherentElement::from_level(Arc::clone(&chain), level, &target).unwrap();
                assert_eq!(lifted.project(level).unwrap(), target);
            }
        }
    }

    #[test]
    fn arithmetic_rejects_foreign_chains() {
        let a = CoherentElement::identity(two_level());
        let b = CoherentElement::identity(Arc::new(SeminormChain::single(shape(&[2, 1]))));
        assert!(matches!(a.add(&b), Err(Error::ChainMismatch)));
        assert!(a.mul(&a).is_ok());
    }

    #[test]
    fn truncation_keeps_lower_levels() {
        let chain = two_level();
        let t = chain.truncate(1).unwrap();
        assert_eq!(t.num_levels(), 1);
        assert_eq!(t.top_shape(), &shape(&[2]));
    }
}
