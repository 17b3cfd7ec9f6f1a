//! Dense tableau simplex for small linear programs.
//!
//! Solves max cᵀx subject to Ax ≤ b, x ≥ 0, with b ≥ 0 so the origin is a
//! feasible starting vertex. Bland's rule is used throughout, which keeps the
//! heavily degenerate feasibility problems used here from cycling.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: DVector<f64>, value: f64 },
    Unbounded,
}

pub fn maximize(c: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>) -> LpOutcome {
    let (m, n) = a.shape();
    assert_eq!(c.len(), n);
    assert_eq!(b.len(), m);
    assert!(b.iter().all(|&x| x >= 0.0), "right-hand side must be nonnegative");
    let eps = 1e-12;
    // Tableau columns: n structural, m slack, 1 rhs. Last row is the objective.
    let width = n + m + 1;
    let mut t = DMatrix::<f64>::zeros(m + 1, width);
    for i in 0..m {
        for j in 0..n {
            t[(i, j)] = a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, width - 1)] = b[i];
    }
    for j in 0..n {
        t[(m, j)] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let Some(col) = (0..n + m).find(|&j| t[(m, j)] < -eps) else {
            break;
        };
        let mut pivot: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[(i, col)] > eps {
                let ratio = t[(i, width - 1)] / t[(i, col)];
                let better = match pivot {
                    None => true,
                    Some((r, best)) => ratio < best - eps || (ratio <= best + eps && basis[i] < basis[r]),
                };
                if better {
                    pivot = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = pivot else {
            return LpOutcome::Unbounded;
        };
        let p = t[(row, col)];
        for j in 0..width {
            t[(row, j)] /= p;
        }
        for i in 0..=m {
            if i != row {
                let f = t[(i, col)];
                if f != 0.0 {
                    for j in 0..width {
                        let v = t[(row, j)];
                        t[(i, j)] -= f * v;
                    }
                }
            }
        }
        basis[row] = col;
    }
    let mut x = DVector::zeros(n);
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[(i, width - 1)];
        }
    }
    let value = c.dot(&x);
    LpOutcome::Optimal { x, value }
}

/// Find φ with ⟨φ, gᵢ⟩ ≥ t for all rows gᵢ, |φⱼ| ≤ 1, maximizing t ∈ [0, 1].
/// Returns (φ, t).
pub fn max_margin_functional(rows: &[DVector<f64>]) -> (DVector<f64>, f64) {
    let d = rows.first().map_or(0, |r| r.len());
    let nv = 2 * d + 1;
    let m = rows.len() + 2 * d + 1;
    let mut a = DMatrix::zeros(m, nv);
    let mut b = DVector::zeros(m);
    for (i, g) in rows.iter().enumerate() {
        for j in 0..d {
            a[(i, j)] = -g[j];
            a[(i, d + j)] = g[j];
        }
        a[(i, 2 * d)] = 1.0;
    }
    for j in 0..2 * d + 1 {
        a[(rows.len() + j, j)] = 1.0;
        b[rows.len() + j] = 1.0;
    }
    let mut c = DVector::zeros(nv);
    c[2 * d] = 1.0;
    match maximize(&c, &a, &b) {
        LpOutcome::Optimal { x, value } => {
            let phi = DVector::from_fn(d, |j, _| x[j] - x[d + j]);
            (phi, value)
        }
        LpOutcome::Unbounded => unreachable!("all variables are bounded"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_program() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36.
        let a = DMatrix::from_row_slice(3, 2, &[1., 0., 0., 2., 3., 2.]);
        let b = DVector::from_vec(vec![4., 12., 18.]);
        let c = DVector::from_vec(vec![3., 5.]);
        match maximize(&c, &a, &b) {
            LpOutcome::Optimal { x, value } => {
                assert!((value - 36.0).abs() < 1e-12);
                assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 6.0).abs() < 1e-12);
            }
            LpOutcome::Unbounded => panic!(),
        }
    }

    #[test]
    fn unbounded_detected() {
        let a = DMatrix::from_row_slice(1, 2, &[1., -1.]);
        let b = DVector::from_vec(vec![1.]);
        let c = DVector::from_vec(vec![0., 1.]);
        assert_eq!(maximize(&c, &a, &b), LpOutcome::Unbounded);
    }

    #[test]
    fn margin_functional() {
        let rows = vec![DVector::from_vec(vec![1., 0.]), DVector::from_vec(vec![0., 1.])];
        let (phi, t) = max_margin_functional(&rows);
        assert!((t - 1.0).abs() < 1e-12);
        assert!(rows.iter().all(|r| r.dot(&phi) >= t - 1e-12));
        let rows = vec![DVector::from_vec(vec![1., 0.]), DVector::from_vec(vec![-1., 0.])];
        let (_, t) = max_margin_functional(&rows);
        assert!(t.abs() < 1e-12);
    }
}
