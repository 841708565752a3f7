//! Dual-matrix algebra and the dual-level generalized inverses.
//!
//! A dual matrix is a pair `A + eps A0` with a nilpotent unit `eps`
//! (`eps^2 = 0`). Products truncate after the first-order term, so a dual
//! matrix behaves like a value carrying its own first-order perturbation.
//! Generalized inverses of such pairs, when they exist, are again dual
//! matrices built from the primal inverse plus correction terms in `A0`.
//!
//! Three inverse notions live here:
//!
//! - [`dggi`], the dual group inverse: exists exactly when the primal part
//!   has group index one and the perturbation has no component in the
//!   complementary corner, `(I - A A#) A0 (I - A A#) = 0`.
//! - [`dmpgi`], the dual Moore-Penrose inverse: exists exactly when
//!   `(I - A A+) A0 (I - A+ A) = 0`; the constructed value is verified
//!   against the four Penrose equations before it is returned.
//! - [`mpdgi`], the truncation `A+ - eps A+ A0 A+`: defined for every dual
//!   matrix, and equal to [`dmpgi`] only under extra range conditions.

use crate::error::{Error, Result};
use crate::realmat::{self, CoreDecomposition, RealMatrix, Tolerance};

/// A square or rectangular matrix over the dual numbers: `primal + eps dual`.
///
/// Both components always share one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DualMatrix {
    primal: RealMatrix,
    dual: RealMatrix,
}

impl DualMatrix {
    /// Pairs a primal part with a perturbation part.
    ///
    /// # Panics
    /// Panics when the two components have different shapes.
    pub fn new(primal: RealMatrix, dual: RealMatrix) -> Self {
        assert_eq!(
            primal.shape(),
            dual.shape(),
            "dual-matrix components must share one shape"
        );
        DualMatrix { primal, dual }
    }

    /// A real matrix viewed as a dual matrix with zero perturbation.
    pub fn from_primal(primal: RealMatrix) -> Self {
        let dual = RealMatrix::zeros(primal.rows(), primal.cols());
        DualMatrix { primal, dual }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DualMatrix {
            primal: RealMatrix::zeros(rows, cols),
            dual: RealMatrix::zeros(rows, cols),
        }
    }

    /// The identity with zero perturbation.
    pub fn identity(n: usize) -> Self {
        DualMatrix::from_primal(RealMatrix::identity(n))
    }

    pub fn primal(&self) -> &RealMatrix {
        &self.primal
    }

    pub fn dual(&self) -> &RealMatrix {
        &self.dual
    }

    pub fn rows(&self) -> usize {
        self.primal.rows()
    }

    pub fn cols(&self) -> usize {
        self.primal.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.primal.shape()
    }

    pub fn is_square(&self) -> bool {
        self.primal.is_square()
    }

    /// Componentwise transpose: `(A + eps A0)^T = A^T + eps A0^T`.
    pub fn transpose(&self) -> DualMatrix {
        DualMatrix {
            primal: self.primal.transpose(),
            dual: self.dual.transpose(),
        }
    }

    /// Componentwise sum.
    ///
    /// # Panics
    /// Panics on shape mismatch; the checked variant is [`dual_add`].
    pub fn add(&self, other: &DualMatrix) -> DualMatrix {
        DualMatrix {
            primal: self.primal.add(&other.primal),
            dual: self.dual.add(&other.dual),
        }
    }

    /// Componentwise difference.
    ///
    /// # Panics
    /// Panics on shape mismatch.
    pub fn sub(&self, other: &DualMatrix) -> DualMatrix {
        DualMatrix {
            primal: self.primal.sub(&other.primal),
            dual: self.dual.sub(&other.dual),
        }
    }

    /// Product truncated by `eps^2 = 0`:
    /// `(A + eps A0)(C + eps C0) = AC + eps (A C0 + A0 C)`.
    ///
    /// # Panics
    /// Panics when inner dimensions differ; the checked variant is
    /// [`dual_mul`].
    pub fn mul(&self, other: &DualMatrix) -> DualMatrix {
        let primal = self.primal.matmul(&other.primal);
        let dual = self
            .primal
            .matmul(&other.dual)
            .add(&self.dual.matmul(&other.primal));
        DualMatrix { primal, dual }
    }

    pub fn scale(&self, factor: f64) -> DualMatrix {
        DualMatrix {
            primal: self.primal.scale(factor),
            dual: self.dual.scale(factor),
        }
    }

    pub fn neg(&self) -> DualMatrix {
        self.scale(-1.0)
    }

    /// Componentwise max Frobenius norm, the scaling norm used by every
    /// dual-level zero test.
    pub fn norm(&self) -> f64 {
        self.primal.frobenius_norm().max(self.dual.frobenius_norm())
    }
}

/// Canonical block form of a dual matrix whose group inverse exists:
/// in the basis `P` of [`CoreDecomposition`], the primal part becomes
/// `blockdiag(C, 0)` and the perturbation becomes `[[B1, B2], [B3, 0]]`.
#[derive(Debug, Clone)]
pub struct DualCanonicalForm {
    pub core: CoreDecomposition,
    /// `rank x rank` leading block of the transformed perturbation.
    pub b1: RealMatrix,
    /// `rank x (n - rank)` upper-right block.
    pub b2: RealMatrix,
    /// `(n - rank) x rank` lower-left block.
    pub b3: RealMatrix,
}

/// Which trailing correction term a Moore-Penrose construction used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpFormula {
    /// Both correction terms use the column-Gram pseudoinverse `(A^T A)^+`
    /// and the left projector `I - A A+`.
    ColumnGram,
    /// The trailing term switched to the row-Gram pseudoinverse
    /// `(A A^T)^+` with the right projector `I - A+ A`; this is the form
    /// that provably satisfies all four Penrose equations and the only
    /// well-typed form for rectangular input.
    RowGramFallback,
}

/// Checked componentwise sum.
///
/// # Errors
/// [`Error::ShapeMismatch`].
pub fn dual_add(x: &DualMatrix, y: &DualMatrix) -> Result<DualMatrix> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: y.shape(),
        });
    }
    Ok(x.add(y))
}

/// Checked truncated product.
///
/// # Errors
/// [`Error::ShapeMismatch`] when inner dimensions differ.
pub fn dual_mul(x: &DualMatrix, y: &DualMatrix) -> Result<DualMatrix> {
    if x.cols() != y.rows() {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: y.shape(),
        });
    }
    Ok(x.mul(y))
}

/// Data shared by the dual index test and the group-inverse construction.
struct IndexOneData {
    /// Group inverse of the primal part.
    gi: RealMatrix,
    /// `(I - A A#) A0 (I - A A#)` Frobenius residual.
    residual: f64,
    threshold: f64,
}

/// `Ok(None)` when the primal part itself has index greater than one.
fn index_one_data(x: &DualMatrix, tol: Tolerance) -> Result<Option<IndexOneData>> {
    if !realmat::index_is_one(x.primal(), tol)? {
        return Ok(None);
    }
    let gi = realmat::group_inverse(x.primal(), tol)?;
    let q = RealMatrix::identity(x.rows()).sub(&x.primal().matmul(&gi));
    let residual = q.matmul(x.dual()).matmul(&q).frobenius_norm();
    let threshold = tol.zero_threshold(x.dual().frobenius_norm());
    Ok(Some(IndexOneData {
        gi,
        residual,
        threshold,
    }))
}

/// True iff the dual group inverse of `x` exists: the primal part must have
/// index one and `(I - A A#) A0 (I - A A#)` must vanish within tolerance.
///
/// # Errors
/// [`Error::NotSquare`].
pub fn dual_index_is_one(x: &DualMatrix, tol: Tolerance) -> Result<bool> {
    Ok(index_one_data(x, tol)?.is_some_and(|d| d.residual <= d.threshold))
}

/// Dual group inverse.
///
/// Returns `A# + eps [-A# A0 A# + (A#)^2 A0 (I - A A#) + (I - A A#) A0 (A#)^2]`,
/// the unique dual matrix satisfying the three group equations
/// `X A X = X`, `A X A = A`, `A X = X A` in dual arithmetic.
///
/// # Errors
/// [`Error::NotSquare`]; [`Error::NotGroupInvertible`] when
/// [`dual_index_is_one`] fails.
pub fn dggi(x: &DualMatrix, tol: Tolerance) -> Result<DualMatrix> {
    let data = index_one_data(x, tol)?.ok_or_else(|| Error::NotGroupInvertible {
        detail: "the primal part has group index greater than one".to_string(),
    })?;
    if data.residual > data.threshold {
        return Err(Error::NotGroupInvertible {
            detail: format!(
                "perturbation obstruction residual {:.3e} exceeds threshold {:.3e}",
                data.residual, data.threshold
            ),
        });
    }
    Ok(dggi_from_parts(x, &data.gi))
}

/// The group-inverse correction formula, assuming existence was checked.
fn dggi_from_parts(x: &DualMatrix, gi: &RealMatrix) -> DualMatrix {
    let a0 = x.dual();
    let q = RealMatrix::identity(x.rows()).sub(&x.primal().matmul(gi));
    let gi2 = gi.matmul(gi);
    let correction = gi
        .matmul(a0)
        .matmul(gi)
        .neg()
        .add(&gi2.matmul(a0).matmul(&q))
        .add(&q.matmul(a0).matmul(&gi2));
    DualMatrix::new(gi.clone(), correction)
}

/// Canonical block form of a group-invertible dual matrix.
///
/// In the basis from [`realmat::core_decomposition`] of the primal part,
/// the transformed perturbation `P^-1 A0 P` has blocks
/// `[[B1, B2], [B3, *]]` whose trailing corner `*` vanishes exactly when
/// the dual group inverse exists; the corner is verified and discarded.
///
/// # Errors
/// [`Error::NotSquare`]; [`Error::NotGroupInvertible`] when
/// [`dual_index_is_one`] fails; [`Error::ZeroMatrix`] when the primal part
/// is zero (no invertible core block exists).
pub fn canonical_form(x: &DualMatrix, tol: Tolerance) -> Result<DualCanonicalForm> {
    if !dual_index_is_one(x, tol)? {
        return Err(Error::NotGroupInvertible {
            detail: "the dual group inverse does not exist, so no canonical form applies"
                .to_string(),
        });
    }
    let core = realmat::core_decomposition(x.primal(), tol)?;
    let n = x.rows();
    let r = core.rank;
    let m = core.p_inv.matmul(x.dual()).matmul(&core.p);
    let corner = m.block(r, n, r, n);
    // The basis change can amplify the already-verified obstruction
    // residual by the conditioning of P, so the defensive corner check
    // scales by it.
    let conditioning = core.p.frobenius_norm() * core.p_inv.frobenius_norm();
    let threshold = tol.zero_threshold(x.dual().frobenius_norm()) * conditioning.max(1.0);
    if corner.frobenius_norm() > threshold {
        return Err(Error::NotGroupInvertible {
            detail: format!(
                "trailing corner of the transformed perturbation has norm {:.3e}, beyond {:.3e}",
                corner.frobenius_norm(),
                threshold
            ),
        });
    }
    Ok(DualCanonicalForm {
        b1: m.block(0, r, 0, r),
        b2: m.block(0, r, r, n),
        b3: m.block(r, n, 0, r),
        core,
    })
}

/// The Moore-Penrose dual generalized inverse `A+ - eps A+ A0 A+`.
///
/// Defined for every dual matrix (square or rectangular). It coincides
/// with [`dmpgi`] only under extra range conditions on `A0^T`; in general
/// it satisfies none of the dual Penrose equations.
pub fn mpdgi(x: &DualMatrix, tol: Tolerance) -> DualMatrix {
    let ad = realmat::pinv(x.primal(), tol);
    let correction = ad.matmul(x.dual()).matmul(&ad).neg();
    DualMatrix::new(ad, correction)
}

/// Dual Moore-Penrose inverse.
///
/// Exists iff `(I - A A+) A0 (I - A+ A) = 0` within tolerance. The value is
/// `A+ + eps [-A+ A0 A+ + (A^T A)+ A0^T (I - A A+) + trailing]` where the
/// trailing correction is selected by verifying the four Penrose equations:
/// the column-Gram form `(I - A A+) A0^T (A^T A)+` is tried first for
/// square inputs, and the row-Gram form `(I - A+ A) A0^T (A A^T)+` is the
/// fallback (and the only well-typed choice for rectangular inputs).
///
/// # Errors
/// [`Error::NotMPInvertible`] when the existence condition fails;
/// [`Error::FormulaInconsistent`] when neither trailing form passes the
/// Penrose verification (a tolerance pathology).
pub fn dmpgi(x: &DualMatrix, tol: Tolerance) -> Result<DualMatrix> {
    dmpgi_detailed(x, tol).map(|(value, _)| value)
}

/// [`dmpgi`] plus the label of the trailing correction term that passed
/// verification.
pub fn dmpgi_detailed(x: &DualMatrix, tol: Tolerance) -> Result<(DualMatrix, MpFormula)> {
    let a = x.primal();
    let a0 = x.dual();
    let ad = realmat::pinv(a, tol);
    let left_proj = RealMatrix::identity(x.rows()).sub(&a.matmul(&ad));
    let right_proj = RealMatrix::identity(x.cols()).sub(&ad.matmul(a));
    let residual = left_proj.matmul(a0).matmul(&right_proj).frobenius_norm();
    let threshold = tol.zero_threshold(a0.frobenius_norm());
    if residual > threshold {
        return Err(Error::NotMPInvertible {
            residual,
            threshold,
        });
    }
    // Gram pseudoinverses through the factored identities
    // (A^T A)+ = A+ (A+)^T and (A A^T)+ = (A+)^T A+, which avoid squaring
    // the condition number.
    let adt = ad.transpose();
    let col_gram_pinv = ad.matmul(&adt);
    let row_gram_pinv = adt.matmul(&ad);
    let a0t = a0.transpose();
    let shared = ad
        .matmul(a0)
        .matmul(&ad)
        .neg()
        .add(&col_gram_pinv.matmul(&a0t).matmul(&left_proj));
    let scale = x.norm();
    let mut best: Option<(DualMatrix, MpFormula, f64)> = None;
    let mut candidates: Vec<(MpFormula, RealMatrix)> = Vec::new();
    if x.is_square() {
        candidates.push((
            MpFormula::ColumnGram,
            left_proj.matmul(&a0t).matmul(&col_gram_pinv),
        ));
    }
    candidates.push((
        MpFormula::RowGramFallback,
        right_proj.matmul(&a0t).matmul(&row_gram_pinv),
    ));
    for (formula, trailing) in candidates {
        let candidate = DualMatrix::new(ad.clone(), shared.add(&trailing));
        let worst = penrose_residuals(x, &candidate)
            .into_iter()
            .fold(0.0_f64, f64::max);
        let verify_scale = scale.max(candidate.norm());
        if worst <= tol.zero_threshold(verify_scale) {
            return Ok((candidate, formula));
        }
        if best.as_ref().is_none_or(|(_, _, b)| worst < *b) {
            best = Some((candidate, formula, worst));
        }
    }
    let (_, _, residual) = best.expect("at least one trailing form is always evaluated");
    Err(Error::FormulaInconsistent { residual })
}

/// Componentwise-norm residuals of the three group equations
/// `[A X A - A, X A X - X, A X - X A]` in dual arithmetic.
///
/// # Panics
/// Panics unless `a` and `x` are square with equal shape.
pub fn group_residuals(a: &DualMatrix, x: &DualMatrix) -> [f64; 3] {
    let axa = a.mul(x).mul(a);
    let xax = x.mul(a).mul(x);
    let ax = a.mul(x);
    let xa = x.mul(a);
    [axa.sub(a).norm(), xax.sub(x).norm(), ax.sub(&xa).norm()]
}

/// Componentwise-norm residuals of the four Penrose equations
/// `[A X A - A, X A X - X, (A X)^T - A X, (X A)^T - X A]` in dual
/// arithmetic. Accepts rectangular `a` with `x` of the transposed shape.
///
/// # Panics
/// Panics when the shapes do not compose.
pub fn penrose_residuals(a: &DualMatrix, x: &DualMatrix) -> [f64; 4] {
    let ax = a.mul(x);
    let xa = x.mul(a);
    [
        ax.mul(a).sub(a).norm(),
        xa.mul(x).sub(x).norm(),
        ax.transpose().sub(&ax).norm(),
        xa.transpose().sub(&xa).norm(),
    ]
}
