//! Matrices over dual-number algebras with `n` nilpotent units.
//!
//! An n-order dual matrix has `2^n` real components, one for each subset
//! of the units `e_1, ..., e_n` (every unit squares to zero, units
//! commute). Components are indexed by bitmask: bit `i` set means unit
//! `e_{i+1}` is a factor. Order 0 is a plain real matrix, order 1 a
//! [`DualMatrix`], order 2 a [`HyperDualMatrix`], and the conversions
//! between those representations are exact.
//!
//! Multiplication is subset convolution: `(X Y)_S = sum over T subset of S
//! of X_T * Y_(S minus T)`, the closed form of truncating every squared
//! unit to zero.
//!
//! The group inverse recurses on the top unit: writing
//! `A = B + e_n C` with `B`, `C` of order `n - 1`, the inverse exists iff
//! `B` is group-invertible at order `n - 1` and
//! `(I - B B#) C (I - B B#) = 0`, and then equals `B# + e_n Z` with
//! `Z = -B# C B# + (B#)^2 C (I - B B#) + (I - B B#) C (B#)^2`. This is the
//! same correction shape at every level, which is what the dual and
//! hyper-dual constructions specialize.

use crate::dualmat::DualMatrix;
use crate::error::{Error, Result};
use crate::hyperdual::HyperDualMatrix;
use crate::realmat::{self, RealMatrix, Tolerance};

/// Largest supported order; storage is `2^order` dense components.
pub const MAX_ORDER: usize = 8;

/// A matrix over the algebra with `order` commuting nilpotent units.
#[derive(Debug, Clone, PartialEq)]
pub struct NOrderMatrix {
    order: usize,
    components: Vec<RealMatrix>,
}

impl NOrderMatrix {
    /// Builds from all `2^order` components in mask order.
    ///
    /// # Panics
    /// Panics when the component count is not `2^order`, shapes differ, or
    /// `order` exceeds [`MAX_ORDER`].
    pub fn new(order: usize, components: Vec<RealMatrix>) -> Self {
        assert!(
            order <= MAX_ORDER,
            "order {} exceeds cap {}",
            order,
            MAX_ORDER
        );
        assert_eq!(
            components.len(),
            1usize << order,
            "an order-{} matrix needs {} components",
            order,
            1usize << order
        );
        let shape = components[0].shape();
        assert!(
            components.iter().all(|c| c.shape() == shape),
            "all components must share one shape"
        );
        NOrderMatrix { order, components }
    }

    /// A real matrix as the order-0 case.
    pub fn from_real(a: RealMatrix) -> Self {
        NOrderMatrix {
            order: 0,
            components: vec![a],
        }
    }

    /// A dual matrix as the order-1 case (mask 1 is the `eps` part).
    pub fn from_dual(a: &DualMatrix) -> Self {
        NOrderMatrix {
            order: 1,
            components: vec![a.primal().clone(), a.dual().clone()],
        }
    }

    /// A hyper-dual matrix as the order-2 case: bit 0 is `eps`, bit 1 is
    /// `eps*`, mask 3 is `eps eps*`.
    pub fn from_hyperdual(a: &HyperDualMatrix) -> Self {
        NOrderMatrix {
            order: 2,
            components: vec![
                a.a0().clone(),
                a.a1().clone(),
                a.a2().clone(),
                a.a3().clone(),
            ],
        }
    }

    /// The order-0 component, when this matrix is order 0.
    ///
    /// # Errors
    /// [`Error::OrderMismatch`].
    pub fn to_real(&self) -> Result<RealMatrix> {
        self.require_order(0)?;
        Ok(self.components[0].clone())
    }

    /// The dual-matrix view, when this matrix is order 1.
    ///
    /// # Errors
    /// [`Error::OrderMismatch`].
    pub fn to_dual(&self) -> Result<DualMatrix> {
        self.require_order(1)?;
        Ok(DualMatrix::new(
            self.components[0].clone(),
            self.components[1].clone(),
        ))
    }

    /// The hyper-dual view, when this matrix is order 2.
    ///
    /// # Errors
    /// [`Error::OrderMismatch`].
    pub fn to_hyperdual(&self) -> Result<HyperDualMatrix> {
        self.require_order(2)?;
        Ok(HyperDualMatrix::new(
            self.components[0].clone(),
            self.components[1].clone(),
            self.components[2].clone(),
            self.components[3].clone(),
        ))
    }

    fn require_order(&self, expected: usize) -> Result<()> {
        if self.order == expected {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                left: self.order,
                right: expected,
            })
        }
    }

    pub fn zeros(order: usize, rows: usize, cols: usize) -> Self {
        NOrderMatrix::new(
            order,
            (0..1usize << order)
                .map(|_| RealMatrix::zeros(rows, cols))
                .collect(),
        )
    }

    /// The identity with zero nilpotent components.
    pub fn identity(order: usize, n: usize) -> Self {
        let mut m = NOrderMatrix::zeros(order, n, n);
        m.components[0] = RealMatrix::identity(n);
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rows(&self) -> usize {
        self.components[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.components[0].cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.components[0].shape()
    }

    pub fn is_square(&self) -> bool {
        self.components[0].is_square()
    }

    /// Component for a unit subset.
    ///
    /// # Panics
    /// Panics when `mask >= 2^order`.
    pub fn component(&self, mask: usize) -> &RealMatrix {
        &self.components[mask]
    }

    /// All components in mask order.
    pub fn components(&self) -> &[RealMatrix] {
        &self.components
    }

    /// Componentwise transpose.
    pub fn transpose(&self) -> NOrderMatrix {
        NOrderMatrix {
            order: self.order,
            components: self.components.iter().map(|c| c.transpose()).collect(),
        }
    }

    /// Componentwise sum.
    ///
    /// # Panics
    /// Panics on order or shape mismatch; the checked variant is
    /// [`n_add`].
    pub fn add(&self, other: &NOrderMatrix) -> NOrderMatrix {
        assert_eq!(self.order, other.order, "orders must match");
        NOrderMatrix {
            order: self.order,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    /// Componentwise difference.
    ///
    /// # Panics
    /// Panics on order or shape mismatch.
    pub fn sub(&self, other: &NOrderMatrix) -> NOrderMatrix {
        assert_eq!(self.order, other.order, "orders must match");
        NOrderMatrix {
            order: self.order,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// Subset-convolution product.
    ///
    /// # Panics
    /// Panics on order mismatch or non-composing shapes; the checked
    /// variant is [`n_mul`].
    pub fn mul(&self, other: &NOrderMatrix) -> NOrderMatrix {
        assert_eq!(self.order, other.order, "orders must match");
        let mut components = Vec::with_capacity(1usize << self.order);
        for s in 0..1usize << self.order {
            let mut acc = RealMatrix::zeros(self.rows(), other.cols());
            // Enumerate submasks t of s in ascending order, pairing X_t with
            // Y_(s \ t). Ascending order keeps the sum associated exactly as
            // in the dedicated order-1 and order-2 kernels, so conversions
            // commute with products bit for bit.
            let mut t = 0;
            loop {
                acc = acc.add(&self.components[t].matmul(&other.components[s & !t]));
                if t == s {
                    break;
                }
                t = t.wrapping_sub(s) & s;
            }
            components.push(acc);
        }
        NOrderMatrix {
            order: self.order,
            components,
        }
    }

    pub fn scale(&self, factor: f64) -> NOrderMatrix {
        NOrderMatrix {
            order: self.order,
            components: self.components.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    pub fn neg(&self) -> NOrderMatrix {
        self.scale(-1.0)
    }

    /// Componentwise max Frobenius norm, the scaling norm used by every
    /// n-order zero test.
    pub fn norm(&self) -> f64 {
        self.components
            .iter()
            .fold(0.0_f64, |acc, c| acc.max(c.frobenius_norm()))
    }

    /// Largest absolute entry across all components.
    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .fold(0.0_f64, |acc, c| acc.max(c.max_abs()))
    }
}

/// Checked componentwise sum.
///
/// # Errors
/// [`Error::OrderMismatch`]; [`Error::ShapeMismatch`].
pub fn n_add(x: &NOrderMatrix, y: &NOrderMatrix) -> Result<NOrderMatrix> {
    check_orders(x, y)?;
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: y.shape(),
        });
    }
    Ok(x.add(y))
}

/// Checked subset-convolution product.
///
/// # Errors
/// [`Error::OrderMismatch`]; [`Error::ShapeMismatch`] when inner
/// dimensions differ.
pub fn n_mul(x: &NOrderMatrix, y: &NOrderMatrix) -> Result<NOrderMatrix> {
    check_orders(x, y)?;
    if x.cols() != y.rows() {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: y.shape(),
        });
    }
    Ok(x.mul(y))
}

fn check_orders(x: &NOrderMatrix, y: &NOrderMatrix) -> Result<()> {
    if x.order() != y.order() {
        return Err(Error::OrderMismatch {
            left: x.order(),
            right: y.order(),
        });
    }
    Ok(())
}

/// Splits off the top unit: `x = b + e_n c` with `b`, `c` one order lower
/// (`b` holds the components with the top bit clear, `c` those with it
/// set).
///
/// # Errors
/// [`Error::OrderZero`].
pub fn split(x: &NOrderMatrix) -> Result<(NOrderMatrix, NOrderMatrix)> {
    if x.order() == 0 {
        return Err(Error::OrderZero);
    }
    let half = 1usize << (x.order() - 1);
    let b = NOrderMatrix {
        order: x.order() - 1,
        components: x.components[..half].to_vec(),
    };
    let c = NOrderMatrix {
        order: x.order() - 1,
        components: x.components[half..].to_vec(),
    };
    Ok((b, c))
}

/// Inverse of [`split`]: rebuilds `b + e_n c` one order up.
///
/// # Errors
/// [`Error::OrderMismatch`]; [`Error::ShapeMismatch`].
///
/// # Panics
/// Panics when the result would exceed [`MAX_ORDER`].
pub fn join(b: &NOrderMatrix, c: &NOrderMatrix) -> Result<NOrderMatrix> {
    check_orders(b, c)?;
    if b.shape() != c.shape() {
        return Err(Error::ShapeMismatch {
            left: b.shape(),
            right: c.shape(),
        });
    }
    assert!(b.order() < MAX_ORDER, "join would exceed the order cap");
    let mut components = b.components.clone();
    components.extend(c.components.iter().cloned());
    Ok(NOrderMatrix {
        order: b.order() + 1,
        components,
    })
}

/// Group inverse at any order, by recursion on the top unit.
///
/// Order 0 delegates to [`realmat::group_inverse`]. For order `n`, split
/// `x = b + e_n c`; the inverse exists iff `b` is group-invertible (by
/// recursion) and the obstruction `(I - b b#) c (I - b b#)` vanishes at
/// order `n - 1`; then
/// `x# = b# + e_n [-b# c b# + (b#)^2 c (I - b b#) + (I - b b#) c (b#)^2]`.
///
/// # Errors
/// [`Error::NotSquare`]; [`Error::NotGroupInvertible`] naming the order at
/// which the recursion failed.
pub fn n_group_inverse(x: &NOrderMatrix, tol: Tolerance) -> Result<NOrderMatrix> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    if x.order() == 0 {
        let gi = realmat::group_inverse(&x.components[0], tol).map_err(|e| match e {
            Error::IndexNotOne => Error::NotGroupInvertible {
                detail: "the constant component has group index greater than one (order 0)"
                    .to_string(),
            },
            other => other,
        })?;
        return Ok(NOrderMatrix::from_real(gi));
    }
    let (b, c) = split(x)?;
    let bs = n_group_inverse(&b, tol)?;
    let q = NOrderMatrix::identity(b.order(), b.rows()).sub(&b.mul(&bs));
    let obstruction = q.mul(&c).mul(&q);
    let residual = obstruction.norm();
    let threshold = tol.zero_threshold(c.norm());
    if residual > threshold {
        return Err(Error::NotGroupInvertible {
            detail: format!(
                "perturbation obstruction at order {}: residual {:.3e} exceeds threshold {:.3e}",
                x.order(),
                residual,
                threshold
            ),
        });
    }
    let bs2 = bs.mul(&bs);
    let z = bs
        .mul(&c)
        .mul(&bs)
        .neg()
        .add(&bs2.mul(&c).mul(&q))
        .add(&q.mul(&c).mul(&bs2));
    join(&bs, &z)
}

/// Per-equation residual norms from an axiom verification.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    /// One componentwise-norm residual per defining equation, in the
    /// order the equations are listed by the verifying function.
    pub residuals: Vec<f64>,
    /// Zero threshold the residuals are compared against.
    pub threshold: f64,
}

impl AxiomReport {
    /// Largest residual.
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0_f64, |a, &r| a.max(r))
    }

    /// True when every residual is within the threshold.
    pub fn ok(&self) -> bool {
        self.max_residual() <= self.threshold
    }
}

/// Residuals of the three group equations
/// `[a x a - a, x a x - x, a x - x a]` at any order.
///
/// # Errors
/// [`Error::OrderMismatch`]; [`Error::ShapeMismatch`]; [`Error::NotSquare`].
pub fn verify_group_axioms(
    a: &NOrderMatrix,
    x: &NOrderMatrix,
    tol: Tolerance,
) -> Result<AxiomReport> {
    check_orders(a, x)?;
    if !a.is_square() || !x.is_square() {
        let bad = if a.is_square() { x } else { a };
        return Err(Error::NotSquare {
            rows: bad.rows(),
            cols: bad.cols(),
        });
    }
    if a.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: x.shape(),
        });
    }
    let ax = a.mul(x);
    let xa = x.mul(a);
    Ok(AxiomReport {
        residuals: vec![
            ax.mul(a).sub(a).norm(),
            xa.mul(x).sub(x).norm(),
            ax.sub(&xa).norm(),
        ],
        threshold: tol.zero_threshold(a.norm().max(x.norm())),
    })
}

/// Residuals of the four Penrose equations
/// `[a x a - a, x a x - x, (a x)^T - a x, (x a)^T - x a]` at any order,
/// transposition acting componentwise. Accepts rectangular `a` with `x`
/// of the transposed shape.
///
/// # Errors
/// [`Error::OrderMismatch`]; [`Error::ShapeMismatch`].
pub fn verify_penrose_axioms(
    a: &NOrderMatrix,
    x: &NOrderMatrix,
    tol: Tolerance,
) -> Result<AxiomReport> {
    check_orders(a, x)?;
    if a.rows() != x.cols() || a.cols() != x.rows() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: x.shape(),
        });
    }
    let ax = a.mul(x);
    let xa = x.mul(a);
    Ok(AxiomReport {
        residuals: vec![
            ax.mul(a).sub(a).norm(),
            xa.mul(x).sub(x).norm(),
            ax.transpose().sub(&ax).norm(),
            xa.transpose().sub(&xa).norm(),
        ],
        threshold: tol.zero_threshold(a.norm().max(x.norm())),
    })
}
