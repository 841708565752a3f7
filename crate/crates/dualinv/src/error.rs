//! Error taxonomy shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong across the real, dual, hyper-dual, and
/// n-order operations. Numerical verdicts ("this inverse does not exist")
/// are errors here because the closed-form constructions are partial
/// functions: their preconditions are existence tests.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two operands cannot be combined with the requested operation.
    #[error("shape mismatch: left is {}x{}, right is {}x{}", left.0, left.1, right.0, right.1)]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    /// A square matrix was required.
    #[error("matrix is {rows}x{cols}, but a square matrix is required")]
    NotSquare { rows: usize, cols: usize },

    /// rank(A^2) < rank(A): the group inverse of the real part is undefined.
    #[error("matrix index exceeds one: rank(A*A) < rank(A)")]
    IndexNotOne,

    /// The operation needs at least one nonzero singular value.
    #[error("matrix is numerically zero")]
    ZeroMatrix,

    /// The group-type inverse does not exist at this level.
    #[error("group inverse does not exist: {detail}")]
    NotGroupInvertible { detail: String },

    /// The Moore-Penrose-type inverse does not exist at this level.
    #[error("Moore-Penrose inverse does not exist: existence residual {residual:e} exceeds threshold {threshold:e}")]
    NotMPInvertible { residual: f64, threshold: f64 },

    /// Neither closed-form variant passed the defining-equation check.
    #[error("no formula variant satisfies the defining equations: best residual {residual:e}")]
    FormulaInconsistent { residual: f64 },

    /// Two independent computations of the same unique object disagree.
    #[error("independent oracle disagrees with the closed form: max deviation {deviation:e}")]
    OracleMismatch { deviation: f64 },

    /// A sufficient-condition shortcut was called outside its hypotheses.
    #[error("hypothesis does not hold: {detail}")]
    HypothesisFailed { detail: String },

    /// The linear system has no solution.
    #[error("linear system is inconsistent: residual {residual:e}")]
    Inconsistent { residual: f64 },

    /// An order-law check needs an inverse that does not exist.
    #[error("required inverse of the {operand} operand does not exist")]
    InverseMissing { operand: String },

    /// Two n-order values have different numbers of dual units.
    #[error("order mismatch: left has order {left}, right has order {right}")]
    OrderMismatch { left: usize, right: usize },

    /// The operation needs at least one dual unit.
    #[error("operation requires order >= 1, got order 0")]
    OrderZero,
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
