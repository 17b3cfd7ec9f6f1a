//! Double-description enumeration of the extreme rays of {φ : ⟨φ, gᵢ⟩ ≥ 0}.

use nalgebra::{DMatrix, DVector};

type Vector = DVector<f64>;

#[derive(Clone)]
struct Ray {
    v: Vector,
    zeros: Bits,
}

#[derive(Clone, PartialEq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn superset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

/// Extreme rays (unit vectors) of the cone {φ : ⟨φ, gᵢ⟩ ≥ 0 for all i}.
///
/// The rows must span ℝ^d; `None` is returned otherwise. Constraints are
/// inserted in index order and the initial simplex uses the first
/// independent rows in index order. A value is treated as zero when its
/// magnitude is at most `eps` (rows and rays are unit vectors).
pub fn dual_rays(rows: &[Vector], eps: f64) -> Option<Vec<Vector>> {
    let d = rows.first()?.len();
    let m = rows.len();
    let rows: Vec<Vector> = rows.iter().map(|r| r.normalize()).collect();

    // Initial basis: first independent rows in index order.
    let mut basis_idx = Vec::with_capacity(d);
    let mut ortho: Vec<Vector> = Vec::with_capacity(d);
    for (i, r) in rows.iter().enumerate() {
        let mut w = r.clone();
        for o in &ortho {
            let c = w.dot(o);
            w.axpy(-c, o, 1.0);
        }
        let nw = w.norm();
        if nw > 1e-9 {
            ortho.push(w / nw);
            basis_idx.push(i);
            if basis_idx.len() == d {
                break;
            }
        }
    }
    if basis_idx.len() < d {
        return None;
    }
    let a0 = DMatrix::from_fn(d, d, |i, j| rows[basis_idx[i]][j]);
    let inv = a0.try_inverse()?;
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let v = inv.column(j).normalize();
            let mut zeros = Bits::new(m);
            for (k, &bi) in basis_idx.iter().enumerate() {
                if k != j {
                    zeros.set(bi);
                }
            }
            Ray { v, zeros }
        })
        .collect();
    let mut done = vec![false; m];
    for &bi in &basis_idx {
        done[bi] = true;
    }
    for i in 0..m {
        if done[i] {
            continue;
        }
        let g = &rows[i];
        let vals: Vec<f64> = rays.iter().map(|r| r.v.dot(g)).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < -eps).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > eps).collect();
        let zer: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].abs() <= eps).collect();
        done[i] = true;
        if neg.is_empty() {
            for &k in &zer {
                rays[k].zeros.set(i);
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::with_capacity(pos.len() + zer.len() + pos.len() * neg.len());
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 2 < d {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&k| k != p && k != q)
                    .all(|k| !rays[k].zeros.superset_of(&common));
                if !adjacent {
                    continue;
                }
                let v = (&rays[q].v * vals[p] - &rays[p].v * vals[q]).normalize();
                let mut zeros = common;
                zeros.set(i);
                next.push(Ray { v, zeros });
            }
        }
        for &k in pos.iter() {
            next.push(rays[k].clone());
        }
        for &k in zer.iter() {
            let mut r = rays[k].clone();
            r.zeros.set(i);
            next.push(r);
        }
        rays = next;
        if rays.is_empty() {
            break;
        }
    }
    // Final polish: drop near-duplicates produced by degenerate pivots.
    let mut out: Vec<Vector> = Vec::with_capacity(rays.len());
    for r in rays {
        if !out.iter().any(|o| (o - &r.v).norm() < 1e-9) {
            out.push(r.v);
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn orthant_is_self_dual() {
        let rows = vec![v(&[1., 0., 0.]), v(&[0., 1., 0.]), v(&[0., 0., 1.])];
        let mut rays = dual_rays(&rows, 1e-10).unwrap();
        rays.sort_by(|a, b| b.iamax().cmp(&a.iamax()));
        assert_eq!(rays.len(), 3);
        for r in &rays {
            assert!(rows.iter().any(|g| (g - r).norm() < 1e-14));
        }
    }

    #[test]
    fn square_cone_dual_has_four_rays() {
        let rows = vec![v(&[1., 1., 1.]), v(&[1., -1., 1.]), v(&[-1., -1., 1.]), v(&[-1., 1., 1.])];
        let rays = dual_rays(&rows, 1e-10).unwrap();
        assert_eq!(rays.len(), 4);
        let s = 1.0 / 2f64.sqrt();
        for expected in [v(&[s, 0., s]), v(&[-s, 0., s]), v(&[0., s, s]), v(&[0., -s, s])] {
            assert!(rays.iter().any(|r| (r - &expected).norm() < 1e-12));
        }
    }

    #[test]
    fn rank_deficient_rows_rejected() {
        let rows = vec![v(&[1., 0., 0.]), v(&[0., 1., 0.])];
        assert!(dual_rays(&rows, 1e-10).is_none());
    }

    #[test]
    fn whole_space_has_trivial_dual() {
        let rows = vec![v(&[1., 0.]), v(&[-1., 0.]), v(&[0., 1.]), v(&[0., -1.])];
        assert!(dual_rays(&rows, 1e-10).unwrap().is_empty());
    }

    #[test]
    fn half_plane_dual_is_one_ray() {
        let rows = vec![v(&[1., 0.]), v(&[-1., 0.]), v(&[0., 1.])];
        let rays = dual_rays(&rows, 1e-10).unwrap();
        assert_eq!(rays.len(), 1);
        assert!((&rays[0] - v(&[0., 1.])).norm() < 1e-14);
    }
}
