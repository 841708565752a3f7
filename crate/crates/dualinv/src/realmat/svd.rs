//! One-sided Jacobi singular value decomposition.
//!
//! The factorization works on the columns of the input: plane rotations are
//! applied on the right until all column pairs are orthogonal, so the
//! rotated matrix is U*Sigma and the accumulated rotations form V. For the
//! matrix sizes this crate targets (tens of rows, not thousands) the method
//! is simple, accurate, and fast enough; it also delivers a fully orthogonal
//! V for square inputs, which is what the null-space extraction needs.

use super::RealMatrix;

/// Thin SVD, `a = u * diag(sigma) * v^T`.
///
/// With `k = min(rows, cols)`: `u` is rows x k, `v` is cols x k, and
/// `sigma` holds k values in descending order. Columns of `u` (or of `v`
/// when the input is wide) that belong to zero singular values are zero
/// vectors, not arbitrary unit vectors. For square inputs `v` is a complete
/// orthogonal basis, so its trailing columns span the null space.
pub(crate) struct Svd {
    pub u: RealMatrix,
    pub sigma: Vec<f64>,
    pub v: RealMatrix,
}

/// Relative off-diagonal threshold at which a column pair counts as
/// orthogonal. Close to machine epsilon; the outer tolerance policy decides
/// what counts as numerically zero afterwards.
const ORTHO_TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 60;

pub(crate) fn svd(a: &RealMatrix) -> Svd {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.transpose());
        Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    }
}

/// Hestenes one-sided Jacobi for rows >= cols.
fn svd_tall(a: &RealMatrix) -> Svd {
    let m = a.rows();
    let n = a.cols();
    let mut b = a.clone();
    let mut v = RealMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    alpha += bp * bp;
                    beta += bq * bq;
                    gamma += bp * bq;
                }
                if gamma == 0.0 || gamma.abs() <= ORTHO_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    b.set(i, p, c * bp - s * bq);
                    b.set(i, q, s * bp + c * bq);
                }
                for i in 0..n {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort everything descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| b.get(i, j).powi(2)).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let mut u = RealMatrix::zeros(m, n);
    let mut v_sorted = RealMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        if s > 0.0 {
            for i in 0..m {
                u.set(i, dst, b.get(i, src) / s);
            }
        }
        for i in 0..n {
            v_sorted.set(i, dst, v.get(i, src));
        }
    }

    Svd {
        u,
        sigma,
        v: v_sorted,
    }
}
