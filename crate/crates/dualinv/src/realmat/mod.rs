//! Dense real-matrix kernels.
//!
//! Everything downstream (dual, hyper-dual, n-order) stores its components
//! as [`RealMatrix`] values and funnels its rank decisions through the
//! single [`Tolerance`] policy defined here. The kernels are written from
//! scratch: the target sizes are small dense matrices, and the inverse
//! constructions need direct access to ranks, null-space bases, and
//! full-rank factors rather than a black-box solve.

mod lu;
mod svd;

use crate::error::{Error, Result};
pub(crate) use svd::svd;

/// Relative tolerance policy for rank decisions and zero tests.
///
/// A singular value counts as nonzero when it exceeds
/// `rel * sigma_max * max(rows, cols)`, and a residual counts as zero when
/// it stays below `rel * (1 + scale)` for the relevant norm `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    rel: f64,
}

impl Tolerance {
    /// A tolerance with the given relative threshold.
    ///
    /// # Panics
    /// Panics unless `0 < rel < 1`.
    pub fn new(rel: f64) -> Self {
        assert!(
            rel > 0.0 && rel < 1.0,
            "relative tolerance must lie in (0, 1)"
        );
        Tolerance { rel }
    }

    /// The relative threshold.
    pub fn rel(&self) -> f64 {
        self.rel
    }

    /// True when `residual` counts as zero next to a quantity of norm `scale`.
    pub fn is_zero(&self, residual: f64, scale: f64) -> bool {
        residual <= self.rel * (1.0 + scale)
    }

    /// The absolute threshold used by [`Tolerance::is_zero`].
    pub fn zero_threshold(&self, scale: f64) -> f64 {
        self.rel * (1.0 + scale)
    }
}

impl Default for Tolerance {
    /// `rel = 1e-10`.
    fn default() -> Self {
        Tolerance { rel: 1e-10 }
    }
}

/// Dense row-major matrix of `f64` entries.
///
/// Invariants: `entries.len() == rows * cols` and every entry is finite.
/// Zero-dimension matrices are permitted; they appear as degenerate blocks
/// (for example the null-space basis of an invertible matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl RealMatrix {
    /// Builds a matrix from row-major entries.
    ///
    /// # Panics
    /// Panics when the entry count is not `rows * cols` or an entry is not
    /// finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count {} does not match {}x{}",
            entries.len(),
            rows,
            cols
        );
        assert!(
            entries.iter().all(|x| x.is_finite()),
            "matrix entries must be finite"
        );
        RealMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from nested rows.
    ///
    /// # Panics
    /// Panics on ragged rows or non-finite entries.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(
            rows.iter().all(|row| row.len() == c),
            "all rows must have equal length"
        );
        let entries: Vec<f64> = rows.iter().flat_map(|row| row.iter().copied()).collect();
        RealMatrix::new(r, c, entries)
    }

    /// The zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    /// The n x n identity.
    pub fn identity(n: usize) -> Self {
        let mut m = RealMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = value;
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn transpose(&self) -> RealMatrix {
        let mut t = RealMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Entrywise sum.
    ///
    /// # Panics
    /// Panics on shape mismatch; shape checking against caller input belongs
    /// to the level-specific operations, which report [`Error::ShapeMismatch`].
    pub fn add(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!(self.shape(), other.shape(), "add requires equal shapes");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Entrywise difference.
    ///
    /// # Panics
    /// Panics on shape mismatch.
    pub fn sub(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!(self.shape(), other.shape(), "sub requires equal shapes");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn neg(&self) -> RealMatrix {
        self.scale(-1.0)
    }

    pub fn scale(&self, factor: f64) -> RealMatrix {
        let entries = self.entries.iter().map(|a| a * factor).collect();
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Matrix product.
    ///
    /// # Panics
    /// Panics when the inner dimensions differ.
    pub fn matmul(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul requires inner dimensions to agree"
        );
        let mut out = RealMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// Copy of the block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> RealMatrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        let mut out = RealMatrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.get(i, j));
            }
        }
        out
    }

    /// Overwrites the block starting at `(r0, c0)` with `src`.
    ///
    /// # Panics
    /// Panics when `src` does not fit.
    pub fn set_block(&mut self, r0: usize, c0: usize, src: &RealMatrix) {
        assert!(r0 + src.rows() <= self.rows && c0 + src.cols() <= self.cols);
        for i in 0..src.rows() {
            for j in 0..src.cols() {
                self.set(r0 + i, c0 + j, src.get(i, j));
            }
        }
    }

    /// Horizontal concatenation `[self | other]`.
    ///
    /// # Panics
    /// Panics when the row counts differ.
    pub fn hstack(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!(self.rows, other.rows, "hstack requires equal row counts");
        let mut out = RealMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        out
    }
}

/// Similarity decomposition `A = P * blockdiag(C, 0) * P^-1` of an
/// index-one matrix, with `P` and the `rank x rank` block `C` invertible.
#[derive(Debug, Clone)]
pub struct CoreDecomposition {
    pub p: RealMatrix,
    pub p_inv: RealMatrix,
    pub c: RealMatrix,
    pub rank: usize,
}

/// Numerical rank: the number of singular values above
/// `tol.rel * sigma_max * max(rows, cols)`.
pub fn rank(a: &RealMatrix, tol: Tolerance) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    let sv = svd(a);
    count_rank(&sv.sigma, a.shape(), tol)
}

fn count_rank(sigma: &[f64], shape: (usize, usize), tol: Tolerance) -> usize {
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let threshold = tol.rel() * sigma_max * shape.0.max(shape.1) as f64;
    sigma.iter().filter(|&&s| s > threshold).count()
}

/// Moore-Penrose pseudoinverse via the SVD. Total: the pseudoinverse of the
/// zero matrix is the zero matrix of the transposed shape.
pub fn pinv(a: &RealMatrix, tol: Tolerance) -> RealMatrix {
    if a.rows() == 0 || a.cols() == 0 {
        return RealMatrix::zeros(a.cols(), a.rows());
    }
    let sv = svd(a);
    let r = count_rank(&sv.sigma, a.shape(), tol);
    // pinv = V_r * diag(1/sigma) * U_r^T
    let mut out = RealMatrix::zeros(a.cols(), a.rows());
    for k in 0..r {
        let inv_s = 1.0 / sv.sigma[k];
        for i in 0..a.cols() {
            let vik = sv.v.get(i, k) * inv_s;
            if vik == 0.0 {
                continue;
            }
            for j in 0..a.rows() {
                let v = out.get(i, j) + vik * sv.u.get(j, k);
                out.set(i, j, v);
            }
        }
    }
    out
}

/// Full-rank factorization `a = f * g` with `f` of full column rank `r` and
/// `g` of full row rank `r`, where `r = rank(a, tol)`.
///
/// # Errors
/// [`Error::ZeroMatrix`] when the rank is zero.
pub fn full_rank_factorization(a: &RealMatrix, tol: Tolerance) -> Result<(RealMatrix, RealMatrix)> {
    let sv = svd(a);
    let r = count_rank(&sv.sigma, a.shape(), tol);
    if r == 0 {
        return Err(Error::ZeroMatrix);
    }
    // f = U_r * diag(sigma), g = V_r^T.
    let mut f = RealMatrix::zeros(a.rows(), r);
    for k in 0..r {
        for i in 0..a.rows() {
            f.set(i, k, sv.u.get(i, k) * sv.sigma[k]);
        }
    }
    let mut g = RealMatrix::zeros(r, a.cols());
    for k in 0..r {
        for j in 0..a.cols() {
            g.set(k, j, sv.v.get(j, k));
        }
    }
    Ok((f, g))
}

/// True iff `rank(a^2) == rank(a)`, the existence condition for the group
/// inverse. The zero matrix and invertible matrices both return true.
///
/// # Errors
/// [`Error::NotSquare`].
pub fn index_is_one(a: &RealMatrix, tol: Tolerance) -> Result<bool> {
    require_square(a)?;
    Ok(rank(&a.matmul(a), tol) == rank(a, tol))
}

/// Group inverse: the unique `X` with `AXA = A`, `XAX = X`, `AX = XA`.
///
/// Computed through the full-rank factorization `a = FG` as
/// `F * (GF)^-2 * G`; the inner factor `GF` is invertible exactly when the
/// index is one. The group inverse of the zero matrix is the zero matrix.
///
/// # Errors
/// [`Error::NotSquare`]; [`Error::IndexNotOne`] when `rank(a^2) < rank(a)`
/// or the `GF` inversion fails within tolerance.
pub fn group_inverse(a: &RealMatrix, tol: Tolerance) -> Result<RealMatrix> {
    require_square(a)?;
    if !index_is_one(a, tol)? {
        return Err(Error::IndexNotOne);
    }
    if rank(a, tol) == 0 {
        return Ok(RealMatrix::zeros(a.rows(), a.cols()));
    }
    let (f, g) = full_rank_factorization(a, tol)?;
    let gf = g.matmul(&f);
    let gf_inv = lu::invert(&gf, tol.rel() * (1.0 + gf.max_abs())).ok_or(Error::IndexNotOne)?;
    Ok(f.matmul(&gf_inv).matmul(&gf_inv).matmul(&g))
}

/// Similarity decomposition of an index-one matrix with positive rank:
/// `P = [F | K]` where `F` is the full-rank factor spanning the column
/// space and `K` is an orthonormal null-space basis, and `C = G * F`.
///
/// # Errors
/// [`Error::NotSquare`]; [`Error::ZeroMatrix`] when the rank is zero;
/// [`Error::IndexNotOne`] when the column space and null space do not split
/// the whole space.
pub fn core_decomposition(a: &RealMatrix, tol: Tolerance) -> Result<CoreDecomposition> {
    require_square(a)?;
    let n = a.rows();
    let sv = svd(a);
    let r = count_rank(&sv.sigma, a.shape(), tol);
    if r == 0 {
        return Err(Error::ZeroMatrix);
    }
    if !index_is_one(a, tol)? {
        return Err(Error::IndexNotOne);
    }
    let (f, g) = full_rank_factorization(a, tol)?;
    // Trailing right singular vectors span the null space (V is complete
    // for square inputs).
    let k = sv.v.block(0, n, r, n);
    let p = f.hstack(&k);
    let p_inv = lu::invert(&p, tol.rel() * (1.0 + p.max_abs())).ok_or(Error::IndexNotOne)?;
    let c = g.matmul(&f);
    Ok(CoreDecomposition {
        p,
        p_inv,
        c,
        rank: r,
    })
}

/// Least-squares solution of `a * x = b` (Frobenius sense, columnwise).
///
/// Solves the normal equations with a pivoted inversion; if the Gram matrix
/// is numerically singular it falls back to the pseudoinverse route, which
/// also covers rank-deficient systems.
///
/// # Panics
/// Panics when `a` and `b` have different row counts.
pub fn least_squares(a: &RealMatrix, b: &RealMatrix) -> RealMatrix {
    assert_eq!(
        a.rows(),
        b.rows(),
        "least_squares requires matching row counts"
    );
    let at = a.transpose();
    let gram = at.matmul(a);
    let rhs = at.matmul(b);
    let floor = f64::EPSILON * 16.0 * (1.0 + gram.max_abs());
    match lu::invert(&gram, floor) {
        Some(gram_inv) => gram_inv.matmul(&rhs),
        None => pinv(&gram, Tolerance::default()).matmul(&rhs),
    }
}

/// Inverse of a square matrix through the pivoted elimination kernel.
///
/// # Errors
/// [`Error::NotSquare`]; [`Error::IndexNotOne`] when a pivot falls below the
/// tolerance floor (the matrix is numerically singular).
pub fn invert(a: &RealMatrix, tol: Tolerance) -> Result<RealMatrix> {
    require_square(a)?;
    lu::invert(a, tol.rel() * (1.0 + a.max_abs())).ok_or(Error::IndexNotOne)
}

pub(crate) fn require_square(a: &RealMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        })
    }
}
