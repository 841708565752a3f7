//! Generalized inverses of matrices over nilpotent dual-number algebras.
//!
//! # Mathematical background
//!
//! A dual number is `a + eps*a0` where the unit `eps` is nonzero but squares
//! to zero. A hyper-dual number adds a second independent nilpotent unit:
//! `a0 + eps*a1 + eps'*a2 + eps*eps'*a3`. Iterating the construction n times
//! gives n-order dual numbers with 2^n real components, one per subset of the
//! units. Replacing the real components with matrices gives dual, hyper-dual,
//! and n-order dual matrices; products follow the subset-convolution rule
//! implied by nilpotency.
//!
//! Because the nilpotent parts are not invertible, classical generalized
//! inverses split into several inequivalent notions at each level:
//!
//! * the group inverse `X` of a square `A`, defined by `AXA = A`, `XAX = X`,
//!   `AX = XA`, which exists iff `rank(A^2) = rank(A)` (index one), and its
//!   dual/hyper-dual/n-order counterparts, which exist only under an extra
//!   range condition on the nilpotent part and are unique when they exist;
//! * the Moore-Penrose inverse, defined by the four Penrose equations, always
//!   existing for real matrices but only conditionally at the dual and
//!   hyper-dual levels;
//! * an always-defined first-order perturbation `A~ - eps * A~ A0 A~` of the
//!   real pseudoinverse, which is generally not a generalized inverse at all.
//!
//! This crate implements the existence tests and the closed-form
//! constructions for all of these, a hyper-dual linear-system solver built on
//! the group inverse, the associated vector norm, checkers for reverse and
//! forward order laws, and the recursive group inverse for n-order dual
//! matrices.
//!
//! # Layout
//!
//! * [`realmat`]: dense real kernels (SVD, LU, rank, pseudoinverse, group
//!   inverse, core decomposition).
//! * [`dualmat`]: dual matrices and their group / Moore-Penrose inverses.
//! * [`hyperdual`]: hyper-dual matrices, the group-inverse existence theory,
//!   Moore-Penrose counterpart, and order-law reports.
//! * [`linsolve`]: hyper-dual linear systems, the h-norm, and solution
//!   diagnostics.
//! * [`norder`]: n-order dual matrices with subset-convolution arithmetic,
//!   universal axiom oracles, and the recursive group inverse.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to use from concurrent callers.

pub mod dualmat;
pub mod error;
pub mod hyperdual;
pub mod linsolve;
pub mod norder;
pub mod realmat;

pub use error::{Error, Result};
pub use realmat::{RealMatrix, Tolerance};
