//! Frames of multipliers in Hilbert modules over pro-C*-algebras, modeled
//! as finite inverse chains of block-diagonal matrix algebras.

pub mod algebra;
pub mod error;
pub mod frames;
pub mod hilbert_module;
pub mod oracle;
pub mod prosystem;
pub mod random;

pub use algebra::{AlgebraElement, BlockShape, ComplexMatrix, ScalarFn, C64};
pub use error::{Error, Result};
pub use frames::{Frame, FrameBounds, FrameOperatorBundle, LevelBounds};
pub use hilbert_module::{AdjointableOperator, ModuleElement, ModuleMatrix, ModuleSpace, Multiplier};
pub use prosystem::{CoherentElement, SeminormChain};

/// Absolute tolerance for Hermitian, positivity and invertibility tests.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Tolerance for `P·ξ = ξ` and `P² = P` on input data.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Relative gap `C > FRAME_GAP·(1 + D)` separating frames from non-frames.
pub const FRAME_GAP: f64 = 1e-8;
/// Relative tolerance for internal consistency checks of derived operators.
pub const VERIFY_TOL: f64 = 1e-8;
