//! Matrix inversion by Gauss-Jordan elimination with partial pivoting.

use super::RealMatrix;

/// Inverse of a square matrix, or `None` when some pivot falls at or below
/// `pivot_floor` (the caller chooses the floor from its tolerance policy,
/// scaled by the magnitude of the input).
pub(crate) fn invert(a: &RealMatrix, pivot_floor: f64) -> Option<RealMatrix> {
    assert!(a.is_square(), "invert requires a square matrix");
    let n = a.rows();
    let mut work = a.clone();
    let mut inv = RealMatrix::identity(n);

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| {
                work.get(x, col)
                    .abs()
                    .partial_cmp(&work.get(y, col).abs())
                    .unwrap()
            })
            .unwrap();
        let pivot = work.get(pivot_row, col);
        if pivot.abs() <= pivot_floor {
            return None;
        }
        if pivot_row != col {
            work.swap_rows(pivot_row, col);
            inv.swap_rows(pivot_row, col);
        }
        let scale = 1.0 / pivot;
        for j in 0..n {
            work.set(col, j, work.get(col, j) * scale);
            inv.set(col, j, inv.get(col, j) * scale);
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = work.get(i, col);
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                work.set(i, j, work.get(i, j) - factor * work.get(col, j));
                inv.set(i, j, inv.get(i, j) - factor * inv.get(col, j));
            }
        }
    }
    Some(inv)
}
