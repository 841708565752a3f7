//! Shared random generators and frozen fixtures for the integration suites.
//!
//! All generators are deterministic given a seed, so every test run sees the
//! same instances. Constructive generators build inputs whose inverses are
//! guaranteed to exist (or guaranteed not to), which gives each suite an
//! oracle that is independent of the code under test.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dualinv::dualmat::DualMatrix;
use dualinv::hyperdual::HyperDualMatrix;
use dualinv::linsolve::HyperDualVector;
use dualinv::norder::{join, NOrderMatrix};
use dualinv::RealMatrix;

/// Seeded generator so suites are reproducible run to run.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense matrix with entries uniform in [-1, 1).
pub fn mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RealMatrix {
    let entries = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    RealMatrix::new(rows, cols, entries)
}

/// Random orthogonal matrix via Gram-Schmidt on random columns, falling back
/// to identity columns so the process always completes. The projection pass
/// runs twice per column to keep orthogonality near machine precision.
pub fn orthogonal(rng: &mut ChaCha8Rng, n: usize) -> RealMatrix {
    let raw = mat(rng, n, n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..2 * n {
        if basis.len() == n {
            break;
        }
        let mut v: Vec<f64> = if k < n {
            (0..n).map(|i| raw.get(i, k)).collect()
        } else {
            let mut e = vec![0.0; n];
            e[k - n] = 1.0;
            e
        };
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= dot * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        basis.push(v);
    }
    assert_eq!(basis.len(), n, "Gram-Schmidt failed to complete a basis");
    let mut q = RealMatrix::zeros(n, n);
    for (j, col) in basis.iter().enumerate() {
        for (i, value) in col.iter().enumerate() {
            q.set(i, j, *value);
        }
    }
    q
}

/// Well-conditioned invertible matrix together with its analytic inverse:
/// `m = q1 * diag(d) * q2^T` with |d| in [0.5, 2), so the inverse is
/// `q2 * diag(1/d) * q1^T` with no linear solve involved.
pub fn invertible_pair(rng: &mut ChaCha8Rng, n: usize) -> (RealMatrix, RealMatrix) {
    let q1 = orthogonal(rng, n);
    let q2 = orthogonal(rng, n);
    let d: Vec<f64> = (0..n)
        .map(|_| {
            let magnitude = rng.gen_range(0.5..2.0);
            if rng.gen::<bool>() {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect();
    let mut scaled = RealMatrix::zeros(n, n);
    let mut scaled_inv = RealMatrix::zeros(n, n);
    for i in 0..n {
        for (j, dj) in d.iter().enumerate() {
            scaled.set(i, j, q1.get(i, j) * dj);
            scaled_inv.set(i, j, q2.get(i, j) / dj);
        }
    }
    (
        scaled.matmul(&q2.transpose()),
        scaled_inv.matmul(&q1.transpose()),
    )
}

/// Building blocks of an index-one matrix `a = p * blockdiag(c, 0) * p_inv`.
pub struct IndexOneParts {
    pub a: RealMatrix,
    pub p: RealMatrix,
    pub p_inv: RealMatrix,
    pub c: RealMatrix,
    pub c_inv: RealMatrix,
    pub rank: usize,
}

/// Random index-one matrix of size `n` and rank `r`, with the similarity
/// transform and core block returned for block-structured follow-ups.
pub fn index_one_parts(rng: &mut ChaCha8Rng, n: usize, r: usize) -> IndexOneParts {
    assert!(r <= n && r > 0, "rank must satisfy 0 < r <= n");
    let (p, p_inv) = invertible_pair(rng, n);
    let (c, c_inv) = invertible_pair(rng, r);
    let mut block = RealMatrix::zeros(n, n);
    block.set_block(0, 0, &c);
    let a = p.matmul(&block).matmul(&p_inv);
    IndexOneParts {
        a,
        p,
        p_inv,
        c,
        c_inv,
        rank: r,
    }
}

/// Random index-one matrix (similarity transform discarded).
pub fn index_one(rng: &mut ChaCha8Rng, n: usize, r: usize) -> RealMatrix {
    index_one_parts(rng, n, r).a
}

/// Assemble `p * [[tl, tr], [bl, br]] * p_inv` from the four blocks.
pub fn conjugated_blocks(
    parts: &IndexOneParts,
    tl: &RealMatrix,
    tr: &RealMatrix,
    bl: &RealMatrix,
    br: &RealMatrix,
) -> RealMatrix {
    let n = parts.p.rows();
    let r = parts.rank;
    let mut m = RealMatrix::zeros(n, n);
    m.set_block(0, 0, tl);
    m.set_block(0, r, tr);
    m.set_block(r, 0, bl);
    m.set_block(r, r, br);
    parts.p.matmul(&m).matmul(&parts.p_inv)
}

/// Dual matrix whose group inverse exists by construction: the perturbation
/// has a zero trailing block in the coordinates of the primal core form.
pub fn dual_admissible(rng: &mut ChaCha8Rng, n: usize, r: usize) -> DualMatrix {
    let parts = index_one_parts(rng, n, r);
    let b1 = mat(rng, r, r);
    let b2 = mat(rng, r, n - r);
    let b3 = mat(rng, n - r, r);
    let zero = RealMatrix::zeros(n - r, n - r);
    let dual = conjugated_blocks(&parts, &b1, &b2, &b3, &zero);
    DualMatrix::new(parts.a, dual)
}

/// Dual matrix whose group inverse does not exist: the trailing block of the
/// perturbation is forced to unit Frobenius norm. Requires `r < n`.
pub fn dual_spoiled(rng: &mut ChaCha8Rng, n: usize, r: usize) -> DualMatrix {
    assert!(r < n, "a full-rank primal cannot be spoiled");
    let parts = index_one_parts(rng, n, r);
    let b1 = mat(rng, r, r);
    let b2 = mat(rng, r, n - r);
    let b3 = mat(rng, n - r, r);
    let b4 = unit_frobenius(rng, n - r, n - r);
    let dual = conjugated_blocks(&parts, &b1, &b2, &b3, &b4);
    DualMatrix::new(parts.a, dual)
}

/// Random matrix rescaled to unit Frobenius norm.
pub fn unit_frobenius(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RealMatrix {
    loop {
        let m = mat(rng, rows, cols);
        let norm = m.frobenius_norm();
        if norm > 1e-3 {
            return m.scale(1.0 / norm);
        }
    }
}

/// Hyper-dual matrix whose group inverse exists by construction: all four
/// components share the block structure of the primal core form and the
/// trailing block of the highest component is the unique admissible value
/// `b3 * c^-1 * y2 + y3 * c^-1 * b2`.
pub fn hyper_admissible(rng: &mut ChaCha8Rng, n: usize, r: usize) -> HyperDualMatrix {
    hyper_structured(rng, n, r, false)
}

/// Like [`hyper_admissible`] but with the trailing block of the highest
/// component displaced by a unit-norm matrix, so the inverse cannot exist.
/// Requires `r < n`.
pub fn hyper_spoiled(rng: &mut ChaCha8Rng, n: usize, r: usize) -> HyperDualMatrix {
    assert!(r < n, "a full-rank constant component cannot be spoiled");
    hyper_structured(rng, n, r, true)
}

fn hyper_structured(rng: &mut ChaCha8Rng, n: usize, r: usize, spoil: bool) -> HyperDualMatrix {
    let parts = index_one_parts(rng, n, r);
    let zero = RealMatrix::zeros(n - r, n - r);

    let b1 = mat(rng, r, r);
    let b2 = mat(rng, r, n - r);
    let b3 = mat(rng, n - r, r);
    let y1 = mat(rng, r, r);
    let y2 = mat(rng, r, n - r);
    let y3 = mat(rng, n - r, r);
    let z1 = mat(rng, r, r);
    let z2 = mat(rng, r, n - r);
    let z3 = mat(rng, n - r, r);
    let mut z4 = b3
        .matmul(&parts.c_inv)
        .matmul(&y2)
        .add(&y3.matmul(&parts.c_inv).matmul(&b2));
    if spoil {
        z4 = z4.add(&unit_frobenius(rng, n - r, n - r));
    }

    let a0 = parts.a.clone();
    let a1 = conjugated_blocks(&parts, &b1, &b2, &b3, &zero);
    let a2 = conjugated_blocks(&parts, &y1, &y2, &y3, &zero);
    let a3 = conjugated_blocks(&parts, &z1, &z2, &z3, &z4);
    HyperDualMatrix::new(a0, a1, a2, a3)
}

/// Possibly rectangular matrix of rank `r` built from its singular value
/// decomposition, so the rank is exact by construction.
pub fn rank_r(rng: &mut ChaCha8Rng, rows: usize, cols: usize, r: usize) -> RealMatrix {
    assert!(r <= rows.min(cols));
    let u = orthogonal(rng, rows);
    let v = orthogonal(rng, cols);
    let mut d = RealMatrix::zeros(rows, cols);
    for i in 0..r {
        d.set(i, i, rng.gen_range(0.5..2.0));
    }
    u.matmul(&d).matmul(&v.transpose())
}

/// Dual matrix whose Moore-Penrose inverse exists by construction: the
/// perturbation is `a*w + v*a`, which kills both existence projectors.
pub fn dual_mp_admissible(rng: &mut ChaCha8Rng, rows: usize, cols: usize, r: usize) -> DualMatrix {
    let a = rank_r(rng, rows, cols, r);
    let w = mat(rng, cols, cols);
    let v = mat(rng, rows, rows);
    let dual = a.matmul(&w).add(&v.matmul(&a));
    DualMatrix::new(a, dual)
}

/// Dual matrix whose Moore-Penrose inverse does not exist: the perturbation
/// gains a component mapping the cokernel onto the kernel complement.
/// Requires `r < min(rows, cols)`.
pub fn dual_mp_spoiled(rng: &mut ChaCha8Rng, rows: usize, cols: usize, r: usize) -> DualMatrix {
    assert!(r < rows.min(cols));
    let u = orthogonal(rng, rows);
    let v = orthogonal(rng, cols);
    let mut d = RealMatrix::zeros(rows, cols);
    let mut tail = RealMatrix::zeros(rows, cols);
    for i in 0..r {
        d.set(i, i, rng.gen_range(0.5..2.0));
    }
    for i in r..rows.min(cols) {
        tail.set(i, i, 1.0);
    }
    let a = u.matmul(&d).matmul(&v.transpose());
    let w = mat(rng, cols, cols);
    let vm = mat(rng, rows, rows);
    let dual = a
        .matmul(&w)
        .add(&vm.matmul(&a))
        .add(&u.matmul(&tail).matmul(&v.transpose()));
    DualMatrix::new(a, dual)
}

/// Random dual matrix with unstructured components.
pub fn dual_random(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DualMatrix {
    DualMatrix::new(mat(rng, rows, cols), mat(rng, rows, cols))
}

/// Hyper-dual matrix whose Moore-Penrose inverse exists by construction: the
/// lower half is a dual matrix with a Moore-Penrose inverse, and the upper
/// half is `A*W + V*A` in dual arithmetic.
pub fn hyper_mp_admissible(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    r: usize,
) -> HyperDualMatrix {
    let primal = dual_mp_admissible(rng, rows, cols, r);
    let w = dual_random(rng, cols, cols);
    let v = dual_random(rng, rows, rows);
    let hyper = primal.mul(&w).add(&v.mul(&primal));
    HyperDualMatrix::from_dual_views(&primal, &hyper)
}

/// Pair of hyper-dual matrices all of whose components are polynomials in a
/// single random symmetric matrix, so every pair of components commutes and
/// both constant components are invertible. Such pairs satisfy the order-law
/// hypotheses for both the group and Moore-Penrose families.
pub fn commuting_pair(rng: &mut ChaCha8Rng, n: usize) -> (HyperDualMatrix, HyperDualMatrix) {
    let q = orthogonal(rng, n);
    let eigs: Vec<f64> = (0..n)
        .map(|_| {
            let magnitude = rng.gen_range(0.5..2.0);
            if rng.gen::<bool>() {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect();

    let assemble = |values: &[f64]| -> RealMatrix {
        let mut scaled = RealMatrix::zeros(n, n);
        for i in 0..n {
            for (j, value) in values.iter().enumerate() {
                scaled.set(i, j, q.get(i, j) * value);
            }
        }
        scaled.matmul(&q.transpose())
    };
    let mut poly = |require_invertible: bool| -> RealMatrix {
        loop {
            let coeffs: [f64; 3] = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let values: Vec<f64> = eigs
                .iter()
                .map(|&d| coeffs[0] + coeffs[1] * d + coeffs[2] * d * d)
                .collect();
            let min_abs = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            if require_invertible && min_abs < 0.2 {
                continue;
            }
            return assemble(&values);
        }
    };

    let x = HyperDualMatrix::new(poly(true), poly(false), poly(false), poly(false));
    let y = HyperDualMatrix::new(poly(true), poly(false), poly(false), poly(false));
    (x, y)
}

/// Unstructured n-order matrix with random components.
pub fn norder_random(rng: &mut ChaCha8Rng, order: usize, n: usize) -> NOrderMatrix {
    let components = (0..1usize << order).map(|_| mat(rng, n, n)).collect();
    NOrderMatrix::new(order, components)
}

/// N-order matrix whose group inverse exists by construction, built bottom-up:
/// the order-0 seed is an index-one matrix, and each extension uses a
/// perturbation of the form `b*w + v*b`, which keeps the existence projector
/// residual at zero level by level.
pub fn norder_admissible(rng: &mut ChaCha8Rng, order: usize, n: usize, r: usize) -> NOrderMatrix {
    if order == 0 {
        return NOrderMatrix::from_real(index_one(rng, n, r));
    }
    let b = norder_admissible(rng, order - 1, n, r);
    let w = norder_random(rng, order - 1, n);
    let v = norder_random(rng, order - 1, n);
    let c = b.mul(&w).add(&v.mul(&b));
    join(&b, &c).expect("halves agree in order and shape")
}

/// Random hyper-dual vector with entries uniform in [-1, 1).
pub fn hyper_vector(rng: &mut ChaCha8Rng, n: usize) -> HyperDualVector {
    let draw = |rng: &mut ChaCha8Rng| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let u0 = draw(rng);
    let u1 = draw(rng);
    let v2 = draw(rng);
    let v3 = draw(rng);
    HyperDualVector::new(u0, u1, v2, v3)
}

/// Consistent linear system: a group-invertible coefficient matrix together
/// with a right side manufactured as `a * x` for a random `x`.
pub fn consistent_system(
    rng: &mut ChaCha8Rng,
    n: usize,
    r: usize,
) -> (HyperDualMatrix, HyperDualVector) {
    let a = hyper_admissible(rng, n, r);
    let x = hyper_vector(rng, n);
    let b = HyperDualVector::from_column(&a.mul(&x.as_column()));
    (a, b)
}

/// Largest absolute entry difference across all components.
pub fn real_distance(x: &RealMatrix, y: &RealMatrix) -> f64 {
    x.sub(y).max_abs()
}

/// Largest absolute entry difference across both dual components.
pub fn dual_distance(x: &DualMatrix, y: &DualMatrix) -> f64 {
    let diff = x.sub(y);
    diff.primal().max_abs().max(diff.dual().max_abs())
}

/// Largest absolute entry difference across all four components.
pub fn hyper_distance(x: &HyperDualMatrix, y: &HyperDualMatrix) -> f64 {
    x.sub(y).max_abs()
}

/// Largest absolute entry difference across all 2^order components.
pub fn norder_distance(x: &NOrderMatrix, y: &NOrderMatrix) -> f64 {
    x.sub(y).max_abs()
}

/// Frozen numeric instances used for regression tests. The two 3x3 dual
/// factors demonstrate that inverse-of-product generally differs from both
/// orderings of the product of inverses; the 2x2 hyper-dual instance has a
/// closed-form group inverse.
pub mod fixtures {
    use dualinv::dualmat::DualMatrix;
    use dualinv::hyperdual::HyperDualMatrix;
    use dualinv::RealMatrix;

    fn m3(rows: [[f64; 3]; 3]) -> RealMatrix {
        RealMatrix::from_rows(&[&rows[0], &rows[1], &rows[2]])
    }

    fn m2(rows: [[f64; 2]; 2]) -> RealMatrix {
        RealMatrix::from_rows(&[&rows[0], &rows[1]])
    }

    /// Left factor of the order-law counterexample.
    pub fn factor_left() -> DualMatrix {
        DualMatrix::new(
            m3([[2.0, 1.0, 3.0], [0.0, 0.0, 0.0], [1.0, 1.0, 2.0]]),
            m3([[2.0, 2.0, 4.0], [3.0, -1.0, 2.0], [-4.0, -2.0, -6.0]]),
        )
    }

    /// Right factor of the order-law counterexample.
    pub fn factor_right() -> DualMatrix {
        DualMatrix::new(
            m3([[1.0, -1.0, 0.0], [0.0, 0.0, 0.0], [1.0, -3.0, 3.0]]),
            m3([[2.0, -4.0, 3.0], [0.0, 0.0, 0.0], [1.0, -5.0, 6.0]]),
        )
    }

    /// Product of the two factors.
    pub fn factor_product() -> DualMatrix {
        DualMatrix::new(
            m3([[5.0, -11.0, 9.0], [0.0, 0.0, 0.0], [3.0, -7.0, 6.0]]),
            m3([[13.0, -37.0, 36.0], [5.0, -9.0, 6.0], [-6.0, 8.0, -3.0]]),
        )
    }

    /// Group inverse of the left factor.
    pub fn factor_left_gi() -> DualMatrix {
        DualMatrix::new(
            m3([[2.0, -5.0, -3.0], [0.0, 0.0, 0.0], [-1.0, 3.0, 2.0]]),
            m3([
                [27.0, -78.0, -51.0],
                [13.0, -35.0, -22.0],
                [-21.0, 60.0, 39.0],
            ]),
        )
    }

    /// Group inverse of the right factor.
    pub fn factor_right_gi() -> DualMatrix {
        DualMatrix::new(
            m3([
                [1.0, -1.0, 0.0],
                [0.0, 0.0, 0.0],
                [-1.0 / 3.0, 1.0 / 9.0, 1.0 / 3.0],
            ]),
            m3([
                [-1.0, 5.0 / 3.0, -1.0],
                [0.0, 0.0, 0.0],
                [2.0 / 3.0, -4.0 / 9.0, -1.0 / 3.0],
            ]),
        )
    }

    /// Group inverse of the product.
    pub fn factor_product_gi() -> DualMatrix {
        DualMatrix::new(
            m3([
                [2.0, 0.0, -3.0],
                [0.0, 0.0, 0.0],
                [-1.0, -1.0 / 9.0, 5.0 / 3.0],
            ]),
            m3([
                [6.0, 86.0 / 9.0, -70.0 / 3.0],
                [13.0, 5.0 / 9.0, -61.0 / 3.0],
                [127.0 / 9.0, -115.0 / 27.0, -133.0 / 9.0],
            ]),
        )
    }

    /// Constant part of (left inverse) * (right inverse).
    pub fn forward_product_primal() -> RealMatrix {
        m3([
            [3.0, -7.0 / 3.0, -1.0],
            [0.0, 0.0, 0.0],
            [-5.0 / 3.0, 11.0 / 9.0, 2.0 / 3.0],
        ])
    }

    /// Constant part of (right inverse) * (left inverse).
    pub fn reverse_product_primal() -> RealMatrix {
        m3([
            [2.0, -5.0, -3.0],
            [0.0, 0.0, 0.0],
            [-1.0, 8.0 / 3.0, 5.0 / 3.0],
        ])
    }

    /// 2x2 hyper-dual matrix whose group inverse is known in closed form.
    pub fn closed_form_input() -> HyperDualMatrix {
        HyperDualMatrix::new(
            m2([[1.0, 0.0], [0.0, 0.0]]),
            m2([[1.0, -1.0], [1.0, 0.0]]),
            m2([[2.0, 1.0], [1.0, 0.0]]),
            m2([[4.0, -1.0], [3.0, 0.0]]),
        )
    }

    /// Group inverse of [`closed_form_input`].
    pub fn closed_form_inverse() -> HyperDualMatrix {
        HyperDualMatrix::new(
            m2([[1.0, 0.0], [0.0, 0.0]]),
            m2([[-1.0, -1.0], [1.0, 0.0]]),
            m2([[-2.0, 1.0], [1.0, 0.0]]),
            m2([[0.0, 1.0], [-3.0, 0.0]]),
        )
    }
}
