//! Hyper-dual matrix algebra and its group and Moore-Penrose inverses.
//!
//! A hyper-dual matrix carries two commuting nilpotent units:
//! `A = a0 + eps a1 + eps* a2 + eps eps* a3` with
//! `eps^2 = (eps*)^2 = 0`. Equivalently it is a dual matrix whose two
//! parts are themselves dual matrices: the primal view `a0 + eps a1` and
//! the perturbation view `a2 + eps a3`. That nesting is what drives every
//! construction here: each inverse is built from the dual-level inverse of
//! the primal view plus a correction term in the perturbation view, with
//! all products running in dual arithmetic.
//!
//! The group-inverse side offers three routes that must agree (the group
//! inverse is unique when it exists):
//!
//! - [`hdggi`], the closed-form correction formula;
//! - [`hdggi_via_axioms`], an independent oracle that solves the defining
//!   equations as one stacked linear least-squares system;
//! - [`hdggi_commuting_case`], a shortcut valid when the perturbation lies
//!   in the range of the primal view on both sides.
//!
//! The Moore-Penrose side ([`hdmpgi`]) mirrors the dual-level
//! [`dualmat::dmpgi`] construction with dual matrices in place of real
//! ones, including the same trailing-term selection between the
//! column-Gram and row-Gram corrections.
//!
//! [`order_law_check`] evaluates the sufficient hypotheses under which the
//! inverse of a product factors as the product of inverses (in either
//! order), and reports hypothesis and conclusion residuals.

use crate::dualmat::{self, DualMatrix, MpFormula};
use crate::error::{Error, Result};
use crate::realmat::{self, RealMatrix, Tolerance};

/// Deviation allowed between two routes that must produce one value, such
/// as the closed-form inverse and the least-squares oracle. Scaled by
/// `1 + norm` of the value being compared.
pub const ORACLE_MATCH_TOL: f64 = 1e-7;

/// A matrix over the hyper-dual numbers
/// `a0 + eps a1 + eps* a2 + eps eps* a3`.
///
/// All four components always share one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperDualMatrix {
    a0: RealMatrix,
    a1: RealMatrix,
    a2: RealMatrix,
    a3: RealMatrix,
}

impl HyperDualMatrix {
    /// Bundles the four components.
    ///
    /// # Panics
    /// Panics when the components do not share one shape.
    pub fn new(a0: RealMatrix, a1: RealMatrix, a2: RealMatrix, a3: RealMatrix) -> Self {
        assert!(
            a0.shape() == a1.shape() && a0.shape() == a2.shape() && a0.shape() == a3.shape(),
            "hyper-dual components must share one shape"
        );
        HyperDualMatrix { a0, a1, a2, a3 }
    }

    /// Rebuilds from the nested-dual views `primal + eps* hyper`.
    ///
    /// # Panics
    /// Panics when the views have different shapes.
    pub fn from_dual_views(primal: &DualMatrix, hyper: &DualMatrix) -> Self {
        HyperDualMatrix::new(
            primal.primal().clone(),
            primal.dual().clone(),
            hyper.primal().clone(),
            hyper.dual().clone(),
        )
    }

    /// Lifts a dual matrix: both `eps*` components are zero.
    pub fn from_dual(primal: &DualMatrix) -> Self {
        let zero = RealMatrix::zeros(primal.rows(), primal.cols());
        HyperDualMatrix::new(
            primal.primal().clone(),
            primal.dual().clone(),
            zero.clone(),
            zero,
        )
    }

    /// Lifts a real matrix: all three nilpotent components are zero.
    pub fn from_real(a0: RealMatrix) -> Self {
        let zero = RealMatrix::zeros(a0.rows(), a0.cols());
        HyperDualMatrix::new(a0, zero.clone(), zero.clone(), zero)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        let zero = RealMatrix::zeros(rows, cols);
        HyperDualMatrix::new(zero.clone(), zero.clone(), zero.clone(), zero)
    }

    /// The identity with zero nilpotent components.
    pub fn identity(n: usize) -> Self {
        HyperDualMatrix::from_real(RealMatrix::identity(n))
    }

    pub fn a0(&self) -> &RealMatrix {
        &self.a0
    }

    pub fn a1(&self) -> &RealMatrix {
        &self.a1
    }

    pub fn a2(&self) -> &RealMatrix {
        &self.a2
    }

    pub fn a3(&self) -> &RealMatrix {
        &self.a3
    }

    /// Components in unit order: constant, `eps`, `eps*`, `eps eps*`.
    pub fn components(&self) -> [&RealMatrix; 4] {
        [&self.a0, &self.a1, &self.a2, &self.a3]
    }

    /// The dual matrix `a0 + eps a1`.
    pub fn primal_view(&self) -> DualMatrix {
        DualMatrix::new(self.a0.clone(), self.a1.clone())
    }

    /// The dual matrix `a2 + eps a3` multiplying `eps*`.
    pub fn hyper_view(&self) -> DualMatrix {
        DualMatrix::new(self.a2.clone(), self.a3.clone())
    }

    pub fn rows(&self) -> usize {
        self.a0.rows()
    }

    pub fn cols(&self) -> usize {
        self.a0.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.a0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.a0.is_square()
    }

    /// Componentwise transpose.
    pub fn transpose(&self) -> HyperDualMatrix {
        HyperDualMatrix::new(
            self.a0.transpose(),
            self.a1.transpose(),
            self.a2.transpose(),
            self.a3.transpose(),
        )
    }

    /// Componentwise sum.
    ///
    /// # Panics
    /// Panics on shape mismatch; the checked variant is [`hd_add`].
    pub fn add(&self, other: &HyperDualMatrix) -> HyperDualMatrix {
        HyperDualMatrix::new(
            self.a0.add(&other.a0),
            self.a1.add(&other.a1),
            self.a2.add(&other.a2),
            self.a3.add(&other.a3),
        )
    }

    /// Componentwise difference.
    ///
    /// # Panics
    /// Panics on shape mismatch.
    pub fn sub(&self, other: &HyperDualMatrix) -> HyperDualMatrix {
        HyperDualMatrix::new(
            self.a0.sub(&other.a0),
            self.a1.sub(&other.a1),
            self.a2.sub(&other.a2),
            self.a3.sub(&other.a3),
        )
    }

    /// Product truncated by the nilpotent units:
    /// `(X Y)_0 = X0 Y0`, `(X Y)_1 = X0 Y1 + X1 Y0`,
    /// `(X Y)_2 = X0 Y2 + X2 Y0`,
    /// `(X Y)_3 = X0 Y3 + X1 Y2 + X2 Y1 + X3 Y0`.
    ///
    /// # Panics
    /// Panics when inner dimensions differ; the checked variant is
    /// [`hd_mul`].
    pub fn mul(&self, other: &HyperDualMatrix) -> HyperDualMatrix {
        let c0 = self.a0.matmul(&other.a0);
        let c1 = self.a0.matmul(&other.a1).add(&self.a1.matmul(&other.a0));
        let c2 = self.a0.matmul(&other.a2).add(&self.a2.matmul(&other.a0));
        let c3 = self
            .a0
            .matmul(&other.a3)
            .add(&self.a1.matmul(&other.a2))
            .add(&self.a2.matmul(&other.a1))
            .add(&self.a3.matmul(&other.a0));
        HyperDualMatrix::new(c0, c1, c2, c3)
    }

    pub fn scale(&self, factor: f64) -> HyperDualMatrix {
        HyperDualMatrix::new(
            self.a0.scale(factor),
            self.a1.scale(factor),
            self.a2.scale(factor),
            self.a3.scale(factor),
        )
    }

    pub fn neg(&self) -> HyperDualMatrix {
        self.scale(-1.0)
    }

    /// Componentwise max Frobenius norm, the scaling norm used by every
    /// hyper-dual zero test.
    pub fn norm(&self) -> f64 {
        self.components()
            .into_iter()
            .fold(0.0_f64, |acc, c| acc.max(c.frobenius_norm()))
    }

    /// Largest absolute entry across all four components.
    pub fn max_abs(&self) -> f64 {
        self.components()
            .into_iter()
            .fold(0.0_f64, |acc, c| acc.max(c.max_abs()))
    }
}

/// Outcome of an existence test, with the residuals of both evaluation
/// routes.
///
/// The projector route tests one dual-matrix product against zero; the
/// component route tests three real-matrix conditions. `exists` follows
/// the projector route; `method` records whether the routes agreed.
#[derive(Debug, Clone)]
pub struct ExistenceReport {
    pub exists: bool,
    /// Norm of the dual-matrix obstruction `(I - A A^inv) A0 (I - A^inv A)`
    /// (group form uses the same projector on both sides).
    pub projector_residual: f64,
    /// The three component-level obstruction norms.
    pub component_residuals: [f64; 3],
    /// Zero threshold all residuals were compared against.
    pub threshold: f64,
    /// Which route decided, and whether the routes agreed.
    pub method: String,
}

/// Checked componentwise sum.
///
/// # Errors
/// [`Error::ShapeMismatch`].
pub fn hd_add(x: &HyperDualMatrix, y: &HyperDualMatrix) -> Result<HyperDualMatrix> {
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
pub fn hd_mul(x: &HyperDualMatrix, y: &HyperDualMatrix) -> Result<HyperDualMatrix> {
    if x.cols() != y.rows() {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: y.shape(),
        });
    }
    Ok(x.mul(y))
}

/// Existence data for the group inverse: the report plus, when the primal
/// view is group-invertible, its dual group inverse.
fn group_existence_data(
    x: &HyperDualMatrix,
    tol: Tolerance,
) -> Result<(ExistenceReport, Option<DualMatrix>)> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    let threshold = tol.zero_threshold(x.norm());
    let primal = x.primal_view();
    let gi = match dualmat::dggi(&primal, tol) {
        Ok(gi) => gi,
        Err(Error::NotGroupInvertible { .. }) => {
            return Ok((
                ExistenceReport {
                    exists: false,
                    projector_residual: f64::INFINITY,
                    component_residuals: [f64::INFINITY; 3],
                    threshold,
                    method: "primal view is not group-invertible".to_string(),
                },
                None,
            ));
        }
        Err(e) => return Err(e),
    };
    let n = x.rows();
    let hyper = x.hyper_view();
    // Projector route: one dual-matrix zero test.
    let q = DualMatrix::identity(n).sub(&primal.mul(&gi));
    let projector_residual = q.mul(&hyper).mul(&q).norm();
    // Component route: three real-matrix zero tests against the projector
    // of the constant part alone.
    let a0_gi = gi.primal();
    let pi = RealMatrix::identity(n).sub(&x.a0().matmul(a0_gi));
    let mixed = x
        .a3()
        .sub(&x.a1().matmul(a0_gi).matmul(x.a2()))
        .sub(&x.a2().matmul(a0_gi).matmul(x.a1()));
    let component_residuals = [
        pi.matmul(x.a1()).matmul(&pi).frobenius_norm(),
        pi.matmul(x.a2()).matmul(&pi).frobenius_norm(),
        pi.matmul(&mixed).matmul(&pi).frobenius_norm(),
    ];
    let exists = projector_residual <= threshold;
    let component_verdict = component_residuals.iter().all(|&r| r <= threshold);
    let method = if exists == component_verdict {
        "projector and component routes agree".to_string()
    } else {
        "projector route (component route disagreed)".to_string()
    };
    Ok((
        ExistenceReport {
            exists,
            projector_residual,
            component_residuals,
            threshold,
            method,
        },
        Some(gi),
    ))
}

/// Existence test for the hyper-dual group inverse.
///
/// Two routes are evaluated and reported: the projector route
/// `(I - A A#) A0 (I - A A#) = 0` over dual matrices, and the component
/// route, three real-matrix conditions `pi a1 pi = 0`, `pi a2 pi = 0`,
/// `pi (a3 - a1 g a2 - a2 g a1) pi = 0` with `g` the group inverse of the
/// constant part and `pi = I - a0 g` its complementary projector. The
/// routes are equivalent; `exists` follows the projector route.
///
/// When the primal view `a0 + eps a1` is not group-invertible, the report
/// carries infinite residuals and `exists = false`.
///
/// # Errors
/// [`Error::NotSquare`].
pub fn hdggi_exists(x: &HyperDualMatrix, tol: Tolerance) -> Result<ExistenceReport> {
    group_existence_data(x, tol).map(|(report, _)| report)
}

/// Hyper-dual group inverse.
///
/// Writing `A = P + eps* H` with dual matrices `P` (primal view) and `H`
/// (perturbation view), returns
/// `P# + eps* [-P# H P# + (P#)^2 H (I - P P#) + (I - P P#) H (P#)^2]`,
/// the unique hyper-dual matrix satisfying the three group equations.
///
/// # Errors
/// [`Error::NotSquare`]; [`Error::NotGroupInvertible`] when
/// [`hdggi_exists`] reports false.
pub fn hdggi(x: &HyperDualMatrix, tol: Tolerance) -> Result<HyperDualMatrix> {
    let (report, gi) = group_existence_data(x, tol)?;
    let gi = gi.ok_or_else(|| Error::NotGroupInvertible {
        detail: "the primal view has no dual group inverse".to_string(),
    })?;
    if !report.exists {
        return Err(Error::NotGroupInvertible {
            detail: format!(
                "perturbation obstruction residual {:.3e} exceeds threshold {:.3e}",
                report.projector_residual, report.threshold
            ),
        });
    }
    Ok(hdggi_from_parts(x, &gi))
}

/// The correction formula, assuming existence was already established.
fn hdggi_from_parts(x: &HyperDualMatrix, gi: &DualMatrix) -> HyperDualMatrix {
    let primal = x.primal_view();
    let hyper = x.hyper_view();
    let q = DualMatrix::identity(x.rows()).sub(&primal.mul(gi));
    let gi2 = gi.mul(gi);
    let correction = gi
        .mul(&hyper)
        .mul(gi)
        .neg()
        .add(&gi2.mul(&hyper).mul(&q))
        .add(&q.mul(&hyper).mul(&gi2));
    HyperDualMatrix::from_dual_views(gi, &correction)
}

/// Kronecker product `l (x) r`.
fn kron(l: &RealMatrix, r: &RealMatrix) -> RealMatrix {
    let mut out = RealMatrix::zeros(l.rows() * r.rows(), l.cols() * r.cols());
    for i1 in 0..l.rows() {
        for j1 in 0..l.cols() {
            let lij = l.get(i1, j1);
            if lij == 0.0 {
                continue;
            }
            for i2 in 0..r.rows() {
                for j2 in 0..r.cols() {
                    out.set(i1 * r.rows() + i2, j1 * r.cols() + j2, lij * r.get(i2, j2));
                }
            }
        }
    }
    out
}

/// Row-major vectorization as an `n^2 x 1` column.
fn vec_rm(m: &RealMatrix) -> RealMatrix {
    RealMatrix::new(m.rows() * m.cols(), 1, m.entries().to_vec())
}

/// Independent group-inverse oracle through the defining equations.
///
/// The inverse must have the form `P# + eps* W` with `W = U + eps V` a
/// dual matrix; substituting into the three group equations and reading
/// off the `eps*` parts yields three dual-matrix equations that are linear
/// in `W`. This routine assembles them (via the identity
/// `vec(L U R) = (L kron R^T) vec(U)` for row-major vectorization) into
/// one stacked real system, solves it by least squares, and returns the
/// solution. The closed-form value from [`hdggi`] is recomputed and the
/// two must agree (the group inverse is unique), within
/// [`ORACLE_MATCH_TOL`] scaled by `1 + norm`.
///
/// # Errors
/// [`Error::NotSquare`]; [`Error::NotGroupInvertible`];
/// [`Error::OracleMismatch`] when the two routes deviate (a numerical
/// pathology, since exact agreement is forced algebraically).
pub fn hdggi_via_axioms(x: &HyperDualMatrix, tol: Tolerance) -> Result<HyperDualMatrix> {
    let (report, gi) = group_existence_data(x, tol)?;
    let gi = gi.ok_or_else(|| Error::NotGroupInvertible {
        detail: "the primal view has no dual group inverse".to_string(),
    })?;
    if !report.exists {
        return Err(Error::NotGroupInvertible {
            detail: format!(
                "perturbation obstruction residual {:.3e} exceeds threshold {:.3e}",
                report.projector_residual, report.threshold
            ),
        });
    }
    let n = x.rows();
    let nn = n * n;
    let a = x.a0();
    let ap = x.a1();
    let id = RealMatrix::identity(n);
    let id2 = RealMatrix::identity(nn);

    // Unknown W = U + eps V. The eps* parts of the three group equations,
    // as affine identities over dual matrices with P = a + eps ap and
    // P# = xm + eps xp:
    //   (1) P W P = H - P P# H - H P# P
    //   (2) (P# P) W + W (P P#) - W = -P# H P#
    //   (3) P W - W P = P# H - H P#
    // where H is the perturbation view. Each dual equation splits into a
    // constant and an eps row block; each term L W R contributes
    // L kron R^T acting on vec(U) and vec(V).
    let primal = x.primal_view();
    let hyper = x.hyper_view();
    let pp_sharp = primal.mul(&gi);
    let p_sharp_p = gi.mul(&primal);

    let rhs1 = hyper
        .sub(&pp_sharp.mul(&hyper))
        .sub(&hyper.mul(&gi).mul(&primal));
    let rhs2 = gi.mul(&hyper).mul(&gi).neg();
    let rhs3 = gi.mul(&hyper).sub(&hyper.mul(&gi));

    // Constant and eps parts of the operator factors.
    let at = a.transpose();
    let apt = ap.transpose();
    // Equation 1: P W P.
    let e1_u = kron(a, &at);
    let e1_u_eps = kron(ap, &at).add(&kron(a, &apt));
    // Equation 2: (P# P) W + W (P P#) - W.
    let sp = p_sharp_p.primal();
    let sp_eps = p_sharp_p.dual();
    let tp = pp_sharp.primal();
    let tp_eps = pp_sharp.dual();
    let e2_u = kron(sp, &id).add(&kron(&id, &tp.transpose())).sub(&id2);
    let e2_u_eps = kron(sp_eps, &id).add(&kron(&id, &tp_eps.transpose()));
    // Equation 3: P W - W P.
    let e3_u = kron(a, &id).sub(&kron(&id, &at));
    let e3_u_eps = kron(ap, &id).sub(&kron(&id, &apt));

    let mut m = RealMatrix::zeros(6 * nn, 2 * nn);
    let mut rhs = RealMatrix::zeros(6 * nn, 1);
    for (i, (u_block, u_eps_block, r)) in [
        (&e1_u, &e1_u_eps, &rhs1),
        (&e2_u, &e2_u_eps, &rhs2),
        (&e3_u, &e3_u_eps, &rhs3),
    ]
    .into_iter()
    .enumerate()
    {
        // Constant row block: (L W R)'s constant part only involves U.
        m.set_block(2 * i * nn, 0, u_block);
        rhs.set_block(2 * i * nn, 0, &vec_rm(r.primal()));
        // eps row block: first-order factors act on U, constant factors
        // act on V.
        m.set_block((2 * i + 1) * nn, 0, u_eps_block);
        m.set_block((2 * i + 1) * nn, nn, u_block);
        rhs.set_block((2 * i + 1) * nn, 0, &vec_rm(r.dual()));
    }

    let solution = realmat::least_squares(&m, &rhs);
    let u = RealMatrix::new(n, n, solution.entries()[..nn].to_vec());
    let v = RealMatrix::new(n, n, solution.entries()[nn..].to_vec());
    let candidate = HyperDualMatrix::from_dual_views(&gi, &DualMatrix::new(u, v));

    let formula = hdggi_from_parts(x, &gi);
    let deviation = candidate.sub(&formula).max_abs();
    if deviation > ORACLE_MATCH_TOL * (1.0 + formula.norm()) {
        return Err(Error::OracleMismatch { deviation });
    }
    Ok(candidate)
}

/// Group-inverse shortcut for perturbations lying in the range of the
/// primal view on both sides: when `P P# H = H P P# = H`, the inverse
/// simplifies to `P# - eps* P# H P#`.
///
/// # Errors
/// [`Error::NotSquare`]; [`Error::NotGroupInvertible`] when the primal
/// view has no dual group inverse; [`Error::HypothesisFailed`] when either
/// range condition does not hold within tolerance.
pub fn hdggi_commuting_case(x: &HyperDualMatrix, tol: Tolerance) -> Result<HyperDualMatrix> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    let primal = x.primal_view();
    let hyper = x.hyper_view();
    let gi = dualmat::dggi(&primal, tol)?;
    let pp_sharp = primal.mul(&gi);
    let left = pp_sharp.mul(&hyper).sub(&hyper).norm();
    let right = hyper.mul(&pp_sharp).sub(&hyper).norm();
    let threshold = tol.zero_threshold(hyper.norm());
    if left > threshold || right > threshold {
        return Err(Error::HypothesisFailed {
            detail: format!(
                "range conditions on the perturbation fail: residuals {:.3e} (left) and {:.3e} (right) exceed {:.3e}",
                left, right, threshold
            ),
        });
    }
    let correction = gi.mul(&hyper).mul(&gi).neg();
    Ok(HyperDualMatrix::from_dual_views(&gi, &correction))
}

/// Existence test for the hyper-dual Moore-Penrose inverse.
///
/// The condition is `(I - P P+) H (I - P+ P) = 0` over dual matrices,
/// where `P+` is the dual Moore-Penrose inverse of the primal view and `H`
/// the perturbation view. The report's component residuals carry the
/// constant and `eps` parts of the obstruction (third slot unused, zero).
/// When `P+` itself does not exist, residuals are infinite.
pub fn hdmpgi_exists(x: &HyperDualMatrix, tol: Tolerance) -> ExistenceReport {
    mp_existence_data(x, tol).0
}

fn mp_existence_data(x: &HyperDualMatrix, tol: Tolerance) -> (ExistenceReport, Option<DualMatrix>) {
    let threshold = tol.zero_threshold(x.norm());
    let primal = x.primal_view();
    let pd = match dualmat::dmpgi(&primal, tol) {
        Ok(pd) => pd,
        Err(_) => {
            return (
                ExistenceReport {
                    exists: false,
                    projector_residual: f64::INFINITY,
                    component_residuals: [f64::INFINITY, f64::INFINITY, 0.0],
                    threshold,
                    method: "primal view has no dual Moore-Penrose inverse".to_string(),
                },
                None,
            );
        }
    };
    let hyper = x.hyper_view();
    let left = DualMatrix::identity(x.rows()).sub(&primal.mul(&pd));
    let right = DualMatrix::identity(x.cols()).sub(&pd.mul(&primal));
    let obstruction = left.mul(&hyper).mul(&right);
    let component_residuals = [
        obstruction.primal().frobenius_norm(),
        obstruction.dual().frobenius_norm(),
        0.0,
    ];
    let projector_residual = obstruction.norm();
    let exists = projector_residual <= threshold;
    (
        ExistenceReport {
            exists,
            projector_residual,
            component_residuals,
            threshold,
            method: "projector route (constant and eps parts reported)".to_string(),
        },
        Some(pd),
    )
}

/// Hyper-dual Moore-Penrose inverse.
///
/// Mirrors [`dualmat::dmpgi`] one level up: with `P+` the dual
/// Moore-Penrose inverse of the primal view and `H` the perturbation view,
/// the value is `P+ + eps* [-P+ H P+ + (P^T P)+ H^T (I - P P+) + trailing]`
/// with the same column-Gram versus row-Gram trailing-term selection,
/// verified against the four Penrose equations in hyper-dual arithmetic.
/// The Gram pseudoinverses are expanded through `(P^T P)+ = P+ (P+)^T` and
/// `(P P^T)+ = (P+)^T P+`, which hold verbatim over dual matrices.
///
/// # Errors
/// [`Error::NotMPInvertible`] when the primal view has no dual
/// Moore-Penrose inverse or the perturbation obstruction is nonzero;
/// [`Error::FormulaInconsistent`] when neither trailing form passes
/// verification.
pub fn hdmpgi(x: &HyperDualMatrix, tol: Tolerance) -> Result<HyperDualMatrix> {
    hdmpgi_detailed(x, tol).map(|(value, _)| value)
}

/// [`hdmpgi`] plus the label of the trailing correction term that passed
/// verification.
pub fn hdmpgi_detailed(
    x: &HyperDualMatrix,
    tol: Tolerance,
) -> Result<(HyperDualMatrix, MpFormula)> {
    let primal = x.primal_view();
    let pd = dualmat::dmpgi(&primal, tol)?;
    let hyper = x.hyper_view();
    let left_proj = DualMatrix::identity(x.rows()).sub(&primal.mul(&pd));
    let right_proj = DualMatrix::identity(x.cols()).sub(&pd.mul(&primal));
    let obstruction = left_proj.mul(&hyper).mul(&right_proj);
    let residual = obstruction.norm();
    let threshold = tol.zero_threshold(x.norm());
    if residual > threshold {
        return Err(Error::NotMPInvertible {
            residual,
            threshold,
        });
    }
    let pdt = pd.transpose();
    let col_gram_pinv = pd.mul(&pdt);
    let row_gram_pinv = pdt.mul(&pd);
    let ht = hyper.transpose();
    let shared = pd
        .mul(&hyper)
        .mul(&pd)
        .neg()
        .add(&col_gram_pinv.mul(&ht).mul(&left_proj));
    let scale = x.norm();
    let mut best: Option<(HyperDualMatrix, MpFormula, f64)> = None;
    let mut candidates: Vec<(MpFormula, DualMatrix)> = Vec::new();
    if x.is_square() {
        candidates.push((
            MpFormula::ColumnGram,
            left_proj.mul(&ht).mul(&col_gram_pinv),
        ));
    }
    candidates.push((
        MpFormula::RowGramFallback,
        right_proj.mul(&ht).mul(&row_gram_pinv),
    ));
    for (formula, trailing) in candidates {
        let candidate = HyperDualMatrix::from_dual_views(&pd, &shared.add(&trailing));
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
/// `[A X A - A, X A X - X, A X - X A]` in hyper-dual arithmetic.
///
/// # Panics
/// Panics unless `a` and `x` are square with equal shape.
pub fn group_residuals(a: &HyperDualMatrix, x: &HyperDualMatrix) -> [f64; 3] {
    let ax = a.mul(x);
    let xa = x.mul(a);
    [
        ax.mul(a).sub(a).norm(),
        xa.mul(x).sub(x).norm(),
        ax.sub(&xa).norm(),
    ]
}

/// Componentwise-norm residuals of the four Penrose equations
/// `[A X A - A, X A X - X, (A X)^T - A X, (X A)^T - X A]` in hyper-dual
/// arithmetic, transposition acting componentwise.
///
/// # Panics
/// Panics when the shapes do not compose.
pub fn penrose_residuals(a: &HyperDualMatrix, x: &HyperDualMatrix) -> [f64; 4] {
    let ax = a.mul(x);
    let xa = x.mul(a);
    [
        ax.mul(a).sub(a).norm(),
        xa.mul(x).sub(x).norm(),
        ax.transpose().sub(&ax).norm(),
        xa.transpose().sub(&xa).norm(),
    ]
}

/// Which inverse family an order-law check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderLawKind {
    Group,
    MoorePenrose,
}

/// One sufficient hypothesis of the order law, with its residual.
#[derive(Debug, Clone)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub residual: f64,
    pub holds: bool,
}

/// Outcome of [`order_law_check`].
#[derive(Debug, Clone)]
pub struct OrderLawReport {
    pub kind: OrderLawKind,
    pub hypotheses: Vec<HypothesisCheck>,
    /// True when every hypothesis holds; the order law is then guaranteed
    /// and the conclusion residuals must be small.
    pub hypotheses_hold: bool,
    pub x_inverse: HyperDualMatrix,
    pub y_inverse: HyperDualMatrix,
    pub product_inverse: HyperDualMatrix,
    /// `norm((x y)^inv - x^inv y^inv)`.
    pub forward_residual: f64,
    /// `norm((x y)^inv - y^inv x^inv)`.
    pub reverse_residual: f64,
}

/// Checks the sufficient hypotheses under which the inverse of `x y`
/// factors as `x^inv y^inv` and as `y^inv x^inv`, and measures both
/// conclusion residuals.
///
/// Writing `x = P + eps* H` and `y = R + eps* K` (dual views), the
/// hypotheses are: both perturbations lie in the range of their primal
/// view on both sides (`P P^inv H = H P P^inv = H`, same for `R, K`); the
/// primal views commute; each primal inverse commutes with the other
/// factor's perturbation. The Moore-Penrose form adds commutation of
/// `P^T` with `R`.
///
/// # Errors
/// [`Error::NotSquare`]; [`Error::ShapeMismatch`];
/// [`Error::InverseMissing`] naming the operand whose inverse failed.
pub fn order_law_check(
    x: &HyperDualMatrix,
    y: &HyperDualMatrix,
    kind: OrderLawKind,
    tol: Tolerance,
) -> Result<OrderLawReport> {
    if !x.is_square() || !y.is_square() {
        let bad = if x.is_square() { y } else { x };
        return Err(Error::NotSquare {
            rows: bad.rows(),
            cols: bad.cols(),
        });
    }
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: y.shape(),
        });
    }
    let invert = |m: &HyperDualMatrix, operand: &str| -> Result<HyperDualMatrix> {
        let value = match kind {
            OrderLawKind::Group => hdggi(m, tol),
            OrderLawKind::MoorePenrose => hdmpgi(m, tol),
        };
        value.map_err(|_| Error::InverseMissing {
            operand: operand.to_string(),
        })
    };
    let x_inverse = invert(x, "left factor")?;
    let y_inverse = invert(y, "right factor")?;
    let product = x.mul(y);
    let product_inverse = invert(&product, "product")?;

    let p = x.primal_view();
    let h = x.hyper_view();
    let r = y.primal_view();
    let k = y.hyper_view();
    let p_inv = x_inverse.primal_view();
    let r_inv = y_inverse.primal_view();
    let scale = x.norm().max(y.norm());
    let threshold = tol.zero_threshold(scale);
    let check = |name: &'static str, residual: f64| HypothesisCheck {
        name,
        residual,
        holds: residual <= threshold,
    };

    let pp = p.mul(&p_inv);
    let rr = r.mul(&r_inv);
    let mut hypotheses = vec![
        check(
            "left-factor perturbation range",
            pp.mul(&h).sub(&h).norm().max(h.mul(&pp).sub(&h).norm()),
        ),
        check(
            "right-factor perturbation range",
            rr.mul(&k).sub(&k).norm().max(k.mul(&rr).sub(&k).norm()),
        ),
        check("primal commutation", p.mul(&r).sub(&r.mul(&p)).norm()),
        check(
            "right inverse vs left perturbation",
            r_inv.mul(&h).sub(&h.mul(&r_inv)).norm(),
        ),
        check(
            "left inverse vs right perturbation",
            p_inv.mul(&k).sub(&k.mul(&p_inv)).norm(),
        ),
    ];
    if kind == OrderLawKind::MoorePenrose {
        let pt = p.transpose();
        hypotheses.push(check(
            "transpose commutation",
            pt.mul(&r).sub(&r.mul(&pt)).norm(),
        ));
    }
    let hypotheses_hold = hypotheses.iter().all(|h| h.holds);
    let forward_residual = product_inverse.sub(&x_inverse.mul(&y_inverse)).norm();
    let reverse_residual = product_inverse.sub(&y_inverse.mul(&x_inverse)).norm();
    Ok(OrderLawReport {
        kind,
        hypotheses,
        hypotheses_hold,
        x_inverse,
        y_inverse,
        product_inverse,
        forward_residual,
        reverse_residual,
    })
}
