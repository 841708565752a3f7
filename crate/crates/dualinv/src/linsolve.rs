//! Hyper-dual linear systems `A x = b` and the h-norm.
//!
//! Vectors carry four real components like the matrices they pair with:
//! `x = u0 + eps u1 + eps* v2 + eps eps* v3`. A vector is treated as an
//! `n x 1` hyper-dual matrix for every product, so the one arithmetic
//! kernel in [`crate::hyperdual`] serves both shapes.
//!
//! When the coefficient matrix has a group inverse `A#`, the system is
//! consistent exactly when `A A# b = b`, the full solution family is
//! `A# b + (I - A A#) z` over free `z`, and `A# b` is also the unique
//! solution of the normal-form system `A^2 x = A b` lying in the range of
//! `A`. The h-norm is the Euclidean norm of the stacked components; a
//! sampling probe reports how the baseline solution's h-norm compares to
//! other members of the family without asserting minimality.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dualmat::DualMatrix;
use crate::error::{Error, Result};
use crate::hyperdual::{self, HyperDualMatrix};
use crate::realmat::{RealMatrix, Tolerance};

/// A vector over the hyper-dual numbers:
/// `u0 + eps u1 + eps* v2 + eps eps* v3`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperDualVector {
    u0: Vec<f64>,
    u1: Vec<f64>,
    v2: Vec<f64>,
    v3: Vec<f64>,
}

impl HyperDualVector {
    /// Bundles the four components.
    ///
    /// # Panics
    /// Panics when lengths differ or an entry is not finite.
    pub fn new(u0: Vec<f64>, u1: Vec<f64>, v2: Vec<f64>, v3: Vec<f64>) -> Self {
        assert!(
            u0.len() == u1.len() && u0.len() == v2.len() && u0.len() == v3.len(),
            "hyper-dual vector components must share one length"
        );
        assert!(
            u0.iter()
                .chain(&u1)
                .chain(&v2)
                .chain(&v3)
                .all(|x| x.is_finite()),
            "vector entries must be finite"
        );
        HyperDualVector { u0, u1, v2, v3 }
    }

    pub fn zeros(n: usize) -> Self {
        HyperDualVector {
            u0: vec![0.0; n],
            u1: vec![0.0; n],
            v2: vec![0.0; n],
            v3: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.u0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u0.is_empty()
    }

    pub fn u0(&self) -> &[f64] {
        &self.u0
    }

    pub fn u1(&self) -> &[f64] {
        &self.u1
    }

    pub fn v2(&self) -> &[f64] {
        &self.v2
    }

    pub fn v3(&self) -> &[f64] {
        &self.v3
    }

    /// The vector as an `n x 1` hyper-dual matrix.
    pub fn as_column(&self) -> HyperDualMatrix {
        let n = self.len();
        HyperDualMatrix::new(
            RealMatrix::new(n, 1, self.u0.clone()),
            RealMatrix::new(n, 1, self.u1.clone()),
            RealMatrix::new(n, 1, self.v2.clone()),
            RealMatrix::new(n, 1, self.v3.clone()),
        )
    }

    /// Reads a vector back from an `n x 1` hyper-dual matrix.
    ///
    /// # Panics
    /// Panics when `m` has more than one column.
    pub fn from_column(m: &HyperDualMatrix) -> Self {
        assert_eq!(m.cols(), 1, "from_column needs a single-column matrix");
        HyperDualVector {
            u0: m.a0().entries().to_vec(),
            u1: m.a1().entries().to_vec(),
            v2: m.a2().entries().to_vec(),
            v3: m.a3().entries().to_vec(),
        }
    }
}

/// The h-norm: the Euclidean norm of all four components stacked,
/// `sqrt(|u0|^2 + |u1|^2 + |v2|^2 + |v3|^2)`.
pub fn hnorm(x: &HyperDualVector) -> f64 {
    x.u0.iter()
        .chain(&x.u1)
        .chain(&x.v2)
        .chain(&x.v3)
        .map(|e| e * e)
        .sum::<f64>()
        .sqrt()
}

fn check_length(a: &HyperDualMatrix, v: &HyperDualVector) -> Result<()> {
    if a.cols() != v.len() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: (v.len(), 1),
        });
    }
    Ok(())
}

/// h-norm of the defect `A (A# b) - b`, plus pieces shared by the ops
/// below.
struct SystemData {
    gi: HyperDualMatrix,
    /// `A# b` as a column.
    baseline: HyperDualMatrix,
    /// `hnorm(A (A# b) - b)`.
    residual: f64,
    threshold: f64,
}

fn system_data(a: &HyperDualMatrix, b: &HyperDualVector, tol: Tolerance) -> Result<SystemData> {
    check_length(a, b)?;
    let gi = hyperdual::hdggi(a, tol)?;
    let bc = b.as_column();
    let baseline = gi.mul(&bc);
    let defect = HyperDualVector::from_column(&a.mul(&baseline).sub(&bc));
    Ok(SystemData {
        gi,
        baseline,
        residual: hnorm(&defect),
        threshold: tol.zero_threshold(hnorm(b)),
    })
}

/// True iff the system `A x = b` has a solution, which (given the group
/// inverse `A#` exists) happens exactly when `A A# b = b`.
///
/// # Errors
/// [`Error::ShapeMismatch`]; [`Error::NotSquare`];
/// [`Error::NotGroupInvertible`] when `A` has no group inverse.
pub fn consistent(a: &HyperDualMatrix, b: &HyperDualVector, tol: Tolerance) -> Result<bool> {
    let data = system_data(a, b, tol)?;
    Ok(data.residual <= data.threshold)
}

/// A solution of the consistent system `A x = b`: `A# b + (I - A A#) z`,
/// where the free vector `z` parameterizes the whole solution family.
///
/// # Errors
/// Those of [`consistent`], plus [`Error::Inconsistent`] when the system
/// has no solution.
pub fn solve(
    a: &HyperDualMatrix,
    b: &HyperDualVector,
    z: &HyperDualVector,
    tol: Tolerance,
) -> Result<HyperDualVector> {
    check_length(a, z)?;
    let data = system_data(a, b, tol)?;
    if data.residual > data.threshold {
        return Err(Error::Inconsistent {
            residual: data.residual,
        });
    }
    let zc = z.as_column();
    let projected = zc.sub(&a.mul(&data.gi).mul(&zc));
    Ok(HyperDualVector::from_column(&data.baseline.add(&projected)))
}

/// Residuals of the two component-level consistency identities.
///
/// Splitting `b = p + eps* h` into dual vectors and writing `P` for the
/// primal view of `A` with dual group inverse `P#`, the
/// system is consistent exactly when `P P# p = p` and
/// `h = P P# h + (I - P P#) H P# p`, where `H` is the perturbation view.
#[derive(Debug, Clone)]
pub struct ComponentConditionReport {
    /// Norm of `P P# p - p`.
    pub primal_residual: f64,
    /// Norm of `P P# h + (I - P P#) H P# p - h`.
    pub hyper_residual: f64,
    pub threshold: f64,
    /// True when both identities hold; equals the consistency verdict.
    pub holds: bool,
}

/// Evaluates the two dual-vector identities that together are equivalent
/// to consistency of `A x = b`.
///
/// # Errors
/// [`Error::ShapeMismatch`]; [`Error::NotSquare`];
/// [`Error::NotGroupInvertible`].
pub fn solution_component_conditions(
    a: &HyperDualMatrix,
    b: &HyperDualVector,
    tol: Tolerance,
) -> Result<ComponentConditionReport> {
    let data = system_data(a, b, tol)?;
    let n = b.len();
    let p = a.primal_view();
    let h = a.hyper_view();
    let p_gi = data.gi.primal_view();
    let pp = p.mul(&p_gi);
    let q = DualMatrix::identity(a.rows()).sub(&pp);
    let bp = DualMatrix::new(
        RealMatrix::new(n, 1, b.u0().to_vec()),
        RealMatrix::new(n, 1, b.u1().to_vec()),
    );
    let bh = DualMatrix::new(
        RealMatrix::new(n, 1, b.v2().to_vec()),
        RealMatrix::new(n, 1, b.v3().to_vec()),
    );
    let primal_residual = pp.mul(&bp).sub(&bp).norm();
    let hyper_residual = pp
        .mul(&bh)
        .add(&q.mul(&h).mul(&p_gi).mul(&bp))
        .sub(&bh)
        .norm();
    let threshold = data.threshold;
    Ok(ComponentConditionReport {
        primal_residual,
        hyper_residual,
        threshold,
        holds: primal_residual <= threshold && hyper_residual <= threshold,
    })
}

/// The unique solution of `A^2 x = A b` lying in the range of `A`,
/// namely `A# b`. Defined whether or not `A x = b` itself is consistent.
///
/// # Errors
/// [`Error::ShapeMismatch`]; [`Error::NotSquare`];
/// [`Error::NotGroupInvertible`]; [`Error::FormulaInconsistent`] when
/// the returned value fails its own defining checks (a numerical
/// pathology: algebraically they always hold).
pub fn normal_solution(
    a: &HyperDualMatrix,
    b: &HyperDualVector,
    tol: Tolerance,
) -> Result<HyperDualVector> {
    let data = system_data(a, b, tol)?;
    let ab = a.mul(&b.as_column());
    let defect = HyperDualVector::from_column(&a.mul(&a.mul(&data.baseline)).sub(&ab));
    let normal_residual = hnorm(&defect);
    let scale = hnorm(&HyperDualVector::from_column(&ab));
    if normal_residual > tol.zero_threshold(scale) {
        return Err(Error::FormulaInconsistent {
            residual: normal_residual,
        });
    }
    let range_defect =
        HyperDualVector::from_column(&a.mul(&data.gi).mul(&data.baseline).sub(&data.baseline));
    let range_residual = hnorm(&range_defect);
    let baseline = HyperDualVector::from_column(&data.baseline);
    if range_residual > tol.zero_threshold(hnorm(&baseline)) {
        return Err(Error::FormulaInconsistent {
            residual: range_residual,
        });
    }
    Ok(baseline)
}

/// True iff `w` lies in the range of `A`, tested as `A A# w = w`.
///
/// # Errors
/// [`Error::ShapeMismatch`]; [`Error::NotSquare`];
/// [`Error::NotGroupInvertible`].
pub fn in_range(a: &HyperDualMatrix, w: &HyperDualVector, tol: Tolerance) -> Result<bool> {
    check_length(a, w)?;
    let gi = hyperdual::hdggi(a, tol)?;
    let wc = w.as_column();
    let defect = HyperDualVector::from_column(&a.mul(&gi).mul(&wc).sub(&wc));
    Ok(hnorm(&defect) <= tol.zero_threshold(hnorm(w)))
}

/// True iff `w` lies in the null space of `A`, tested as `A w = 0`.
///
/// # Errors
/// [`Error::ShapeMismatch`].
pub fn in_null(a: &HyperDualMatrix, w: &HyperDualVector, tol: Tolerance) -> Result<bool> {
    check_length(a, w)?;
    let defect = HyperDualVector::from_column(&a.mul(&w.as_column()));
    Ok(hnorm(&defect) <= tol.zero_threshold(hnorm(w)))
}

/// Sampling statistics comparing the baseline solution `A# b` against
/// random members of the solution family.
#[derive(Debug, Clone)]
pub struct MinimalityProbe {
    /// `hnorm(A# b)`.
    pub baseline: f64,
    /// Smallest sampled `hnorm(solve(a, b, z))`.
    pub min_sampled: f64,
    /// Median sampled h-norm.
    pub median_sampled: f64,
    /// How many samples undercut the baseline by more than a relative
    /// `1e-12` slack. Diagnostic only; no minimality claim is asserted.
    pub violations: usize,
    pub samples: usize,
}

/// Draws `samples` random `z` vectors (standard normal entries, fixed
/// seed), solves with each, and reports how the baseline h-norm compares.
/// Diagnostic only: the report makes no minimality assertion.
///
/// # Errors
/// Those of [`solve`], including [`Error::Inconsistent`].
///
/// # Panics
/// Panics when `samples` is zero.
pub fn norm_minimality_probe(
    a: &HyperDualMatrix,
    b: &HyperDualVector,
    samples: usize,
    seed: u64,
) -> Result<MinimalityProbe> {
    assert!(samples > 0, "the probe needs at least one sample");
    let tol = Tolerance::default();
    let data = system_data(a, b, tol)?;
    if data.residual > data.threshold {
        return Err(Error::Inconsistent {
            residual: data.residual,
        });
    }
    let baseline = hnorm(&HyperDualVector::from_column(&data.baseline));
    let projector = HyperDualMatrix::identity(a.rows()).sub(&a.mul(&data.gi));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = a.rows();
    let mut norms = Vec::with_capacity(samples);
    for _ in 0..samples {
        let z = HyperDualVector::new(
            normal_draws(&mut rng, n),
            normal_draws(&mut rng, n),
            normal_draws(&mut rng, n),
            normal_draws(&mut rng, n),
        );
        let x = data.baseline.add(&projector.mul(&z.as_column()));
        norms.push(hnorm(&HyperDualVector::from_column(&x)));
    }
    norms.sort_by(|a, b| a.partial_cmp(b).expect("norms are finite"));
    let min_sampled = norms[0];
    let median_sampled = if samples % 2 == 1 {
        norms[samples / 2]
    } else {
        0.5 * (norms[samples / 2 - 1] + norms[samples / 2])
    };
    let slack = 1e-12 * (1.0 + baseline);
    let violations = norms.iter().filter(|&&s| s < baseline - slack).count();
    Ok(MinimalityProbe {
        baseline,
        min_sampled,
        median_sampled,
        violations,
        samples,
    })
}

/// Standard normal draws by the Box-Muller transform.
fn normal_draws(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u1: f64 = loop {
                let u: f64 = rng.gen();
                if u > f64::MIN_POSITIVE {
                    break u;
                }
            };
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
        })
        .collect()
}
