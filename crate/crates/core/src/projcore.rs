//! Points, subspaces and maps of the projective sphere Sⁿ.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result, Tol};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// A point of Sⁿ: a unit vector in ℝ^{n+1}. `v` and `-v` are different points.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPoint {
    coords: Vector,
}

impl ProjPoint {
    pub fn new(v: Vector) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(ProjPoint { coords: v / norm })
    }

    pub fn from_slice(xs: &[f64]) -> Result<Self> {
        Self::new(Vector::from_column_slice(xs))
    }

    /// Lift a point of ℝPⁿ: the representative whose first nonzero coordinate
    /// is positive.
    pub fn lift_rp(v: Vector) -> Result<Self> {
        let p = Self::new(v)?;
        let lead = p.coords.iter().find(|x| x.abs() > 1e-12).copied();
        Ok(match lead {
            Some(x) if x < 0.0 => p.antipode(),
            _ => p,
        })
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    pub fn into_coords(self) -> Vector {
        self.coords
    }

    /// Ambient dimension n+1.
    pub fn ambient(&self) -> usize {
        self.coords.len()
    }

    pub fn antipode(&self) -> Self {
        ProjPoint { coords: -&self.coords }
    }

    /// Coordinatewise equality within `tol`.
    pub fn approx_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        self.coords.len() == other.coords.len()
            && self
                .coords
                .iter()
                .zip(other.coords.iter())
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Spherical distance in radians.
    pub fn angle(&self, other: &ProjPoint) -> f64 {
        sphere_angle(&self.coords, &other.coords)
    }
}

/// Angle between two unit vectors, accurate near 0 and π.
pub fn sphere_angle(a: &Vector, b: &Vector) -> f64 {
    let chord = (a - b).norm().min(2.0);
    2.0 * (chord / 2.0).asin()
}

/// A linear subspace of ℝ^{n+1} (a great sphere of dimension dim−1).
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { basis: Matrix::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { basis: Matrix::identity(ambient, ambient) }
    }

    /// Span of the columns of `m`. Directions with singular value at most
    /// `tol · σ₁` are dropped.
    pub fn from_columns(m: &Matrix, tol: f64) -> Self {
        let ambient = m.nrows();
        if m.ncols() == 0 || m.norm() == 0.0 {
            return Self::zero(ambient);
        }
        let svd = m.clone().svd(true, false);
        let u = svd.u.expect("requested U");
        let top = svd.singular_values.max();
        let mut idx: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > top * tol)
            .collect();
        idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
        let cols: Vec<Vector> = idx.iter().map(|&i| u.column(i).into_owned()).collect();
        Self::from_orthonormal(ambient, &cols)
    }

    pub fn span(vectors: &[Vector], ambient: usize, tol: f64) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        Self::from_columns(&Matrix::from_columns(vectors), tol)
    }

    fn from_orthonormal(ambient: usize, cols: &[Vector]) -> Self {
        if cols.is_empty() {
            return Self::zero(ambient);
        }
        let mut m = Matrix::from_columns(cols);
        // Re-orthonormalize with modified Gram–Schmidt and fix the sign so the
        // largest coordinate of each vector is positive.
        for j in 0..m.ncols() {
            for k in 0..j {
                let d = m.column(j).dot(&m.column(k));
                let ck = m.column(k).into_owned();
                m.column_mut(j).axpy(-d, &ck, 1.0);
            }
            let n = m.column(j).norm();
            m.column_mut(j).scale_mut(1.0 / n);
            let imax = m.column(j).iamax();
            if m[(imax, j)] < 0.0 {
                m.column_mut(j).neg_mut();
            }
        }
        Subspace { basis: m }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    /// Orthonormal basis as columns.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    pub fn projector(&self) -> Matrix {
        &self.basis * self.basis.transpose()
    }

    pub fn project(&self, v: &Vector) -> Vector {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Relative distance of `v` from the subspace.
    pub fn distance(&self, v: &Vector) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        (v - self.project(v)).norm() / n
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        self.distance(v) <= tol
    }

    pub fn contains_subspace(&self, other: &Subspace, tol: f64) -> bool {
        other.basis.column_iter().all(|c| self.contains(&c.into_owned(), tol))
    }

    pub fn approx_eq(&self, other: &Subspace, tol: f64) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other, tol)
    }

    pub fn complement(&self) -> Subspace {
        let n = self.ambient();
        let resid = Matrix::identity(n, n) - self.projector();
        let eig = SymmetricEigen::new(resid);
        let mut idx: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
        idx.sort();
        let cols: Vec<Vector> = idx.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        Self::from_orthonormal(n, &cols)
    }

    pub fn sum(&self, other: &Subspace, tol: f64) -> Subspace {
        let mut cols = self.basis_vectors();
        cols.extend(other.basis_vectors());
        Self::span(&cols, self.ambient(), tol)
    }

    pub fn intersect(&self, other: &Subspace, tol: f64) -> Subspace {
        self.complement().sum(&other.complement(), tol).complement()
    }

    /// ‖(I − P)·g·B‖ relative to ‖g‖: zero iff g maps the subspace into itself.
    pub fn invariance_residual(&self, g: &Matrix) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        let image = g * &self.basis;
        let resid = &image - self.projector() * &image;
        resid.norm() / g.norm().max(f64::MIN_POSITIVE)
    }
}

/// A projective map given by a matrix with |det| = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjMap {
    m: Matrix,
}

impl ProjMap {
    /// Rescale `m` to |det| = 1. Matrices already within `1e-12` of that are
    /// kept bit-for-bit.
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension { expected: m.nrows(), got: m.ncols() });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Singular);
        }
        let det = m.clone().lu().determinant().abs();
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::Singular);
        }
        if (det - 1.0).abs() <= 1e-12 {
            return Ok(ProjMap { m });
        }
        let scale = det.powf(-1.0 / m.nrows() as f64);
        Ok(ProjMap { m: m * scale })
    }

    pub fn from_rows(size: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != size * size {
            return Err(Error::Dimension { expected: size * size, got: rows.len() });
        }
        Self::new(Matrix::from_row_slice(size, size, rows))
    }

    pub fn from_diag(d: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diagonal(&Vector::from_column_slice(d)))
    }

    pub fn identity(size: usize) -> Self {
        ProjMap { m: Matrix::identity(size, size) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn size(&self) -> usize {
        self.m.nrows()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjMap) -> ProjMap {
        ProjMap { m: &self.m * &other.m }
    }

    pub fn inverse(&self) -> ProjMap {
        let inv = self.m.clone().try_inverse().expect("ProjMap is nonsingular");
        ProjMap { m: inv }
    }

    /// The contragredient (gᵀ)⁻¹, acting on functionals.
    pub fn dual(&self) -> ProjMap {
        ProjMap { m: self.inverse().m.transpose() }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.m * v
    }

    pub fn act(&self, p: &ProjPoint, dual: bool) -> Result<ProjPoint> {
        if p.ambient() != self.size() {
            return Err(Error::Dimension { expected: self.size(), got: p.ambient() });
        }
        if dual {
            let lu = self.m.transpose().lu();
            let y = lu.solve(p.coords()).ok_or(Error::Singular)?;
            ProjPoint::new(y)
        } else {
            ProjPoint::new(&self.m * p.coords())
        }
    }

    /// Largest absolute entry difference.
    pub fn distance(&self, other: &ProjMap) -> f64 {
        (&self.m - &other.m).amax()
    }
}

/// The cross-ratio [o, s, q, p] of four collinear points.
///
/// Evaluated as det(o,q)·det(s,p) / (det(s,q)·det(o,p)) in an orthonormal
/// basis of the spanned plane, which equals (ō−q̄)(s̄−p̄)/((s̄−q̄)(ō−p̄)) in any
/// affine chart of the line.
pub fn cross_ratio(o: &ProjPoint, s: &ProjPoint, q: &ProjPoint, p: &ProjPoint, tol: &Tol) -> Result<f64> {
    let n = o.ambient();
    for x in [s, q, p] {
        if x.ambient() != n {
            return Err(Error::Dimension { expected: n, got: x.ambient() });
        }
    }
    let stack = Matrix::from_columns(&[o.coords().clone(), s.coords().clone(), q.coords().clone(), p.coords().clone()]);
    let svd = stack.clone().svd(true, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if sv.len() >= 3 && sv[2] / sv[0] >= tol.subspace {
        return Err(Error::NonCollinear { ratio: sv[2] / sv[0] });
    }
    // Coordinates in the plane of the two leading left singular vectors.
    let u = svd.u.expect("requested U");
    let order = {
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        idx
    };
    let (e1, e2) = (u.column(order[0]), u.column(order[1.min(order.len() - 1)]));
    let plane = |x: &ProjPoint| (e1.dot(x.coords()), e2.dot(x.coords()));
    let det = |a: (f64, f64), b: (f64, f64)| a.0 * b.1 - a.1 * b.0;
    let (po, ps, pq, pp) = (plane(o), plane(s), plane(q), plane(p));
    let den = det(ps, pq) * det(po, pp);
    if det(ps, pq).abs() <= tol.eq || det(po, pp).abs() <= tol.eq {
        return Err(Error::DegenerateCrossRatio);
    }
    Ok(det(po, pq) * det(ps, pp) / den)
}

/// Direction of the geodesic from `v` through `x`, as a unit vector of v^⊥.
pub fn radial_project(v: &ProjPoint, x: &ProjPoint, tol: &Tol) -> Result<ProjPoint> {
    let y = x.coords() - v.coords() * x.coords().dot(v.coords());
    if y.norm() <= tol.eq {
        return Err(Error::UndefinedDirection);
    }
    ProjPoint::new(y)
}

/// Orthonormal basis of v^⊥ (columns), the coordinates of the linking sphere.
///
/// Built by pivoted Gram–Schmidt on the coordinate vectors (largest residual
/// first, ties by index), then kept in index order, so a coordinate vertex
/// gives the remaining coordinate vectors exactly.
pub fn link_basis(v: &ProjPoint) -> Matrix {
    let n = v.ambient();
    let mut chosen: Vec<(usize, Vector)> = Vec::with_capacity(n - 1);
    let mut frame: Vec<Vector> = vec![v.coords().clone()];
    for _ in 0..n - 1 {
        let mut best: Option<(usize, Vector, f64)> = None;
        for i in 0..n {
            if chosen.iter().any(|(j, _)| *j == i) {
                continue;
            }
            let mut w = Vector::zeros(n);
            w[i] = 1.0;
            for _ in 0..2 {
                for f in &frame {
                    let c = w.dot(f);
                    w.axpy(-c, f, 1.0);
                }
            }
            let r = w.norm();
            if best.as_ref().is_none_or(|b| r > b.2 + 1e-12) {
                best = Some((i, w, r));
            }
        }
        let (i, w, r) = best.expect("a coordinate vector remains");
        let u = w / r;
        frame.push(u.clone());
        chosen.push((i, u));
    }
    chosen.sort_by_key(|(i, _)| *i);
    Matrix::from_columns(&chosen.into_iter().map(|(_, u)| u).collect::<Vec<_>>())
}

/// Matrix of the map induced by `g` (which fixes `v`) on the linking sphere,
/// in the basis returned by [`link_basis`].
pub fn induced_on_link(g: &Matrix, v: &ProjPoint) -> Matrix {
    let b = link_basis(v);
    b.transpose() * g * &b
}

fn check_sets(k1: &[ProjPoint], k2: &[ProjPoint]) -> Result<()> {
    if k1.is_empty() || k2.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(())
}

fn directed(k1: &[ProjPoint], k2: &[ProjPoint]) -> f64 {
    k1.iter()
        .map(|a| k2.iter().map(|b| a.angle(b)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Spherical Hausdorff distance between finite sets.
pub fn hausdorff(k1: &[ProjPoint], k2: &[ProjPoint]) -> Result<f64> {
    check_sets(k1, k2)?;
    Ok(directed(k1, k2).max(directed(k2, k1)))
}

/// Infimum of d(x, y) over x ∈ K1, y ∈ K2.
pub fn simple_dist(k1: &[ProjPoint], k2: &[ProjPoint]) -> Result<f64> {
    check_sets(k1, k2)?;
    Ok(k1
        .iter()
        .flat_map(|a| k2.iter().map(move |b| a.angle(b)))
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(xs: &[f64]) -> ProjPoint {
        ProjPoint::from_slice(xs).unwrap()
    }

    #[test]
    fn act_identity_and_eigendirection() {
        let id = ProjMap::identity(3);
        assert!(id.act(&pt(&[1., 0., 0.]), false).unwrap().approx_eq(&pt(&[1., 0., 0.]), 1e-15));
        let g = ProjMap::from_diag(&[2., 1., 0.5]).unwrap();
        assert!(g.act(&pt(&[0., 0., 1.]), false).unwrap().approx_eq(&pt(&[0., 0., 1.]), 1e-15));
    }

    #[test]
    fn dual_action_is_inverse_transpose() {
        let g = ProjMap::from_diag(&[2., 1., 0.5]).unwrap();
        assert_eq!(g.dual().matrix(), &Matrix::from_diagonal(&Vector::from_vec(vec![0.5, 1., 2.])));
        let img = g.act(&pt(&[1., 0., 0.]), true).unwrap();
        assert!(img.approx_eq(&pt(&[1., 0., 0.]), 1e-15));
    }

    #[test]
    fn rescales_to_unit_determinant() {
        let g = ProjMap::from_diag(&[2., 2., 2.]).unwrap();
        assert!((g.matrix().clone().determinant() - 1.0).abs() < 1e-12);
        assert!(ProjMap::new(Matrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn lift_chooses_positive_leading_coordinate() {
        let p = ProjPoint::lift_rp(Vector::from_vec(vec![0., -2., 1.])).unwrap();
        assert!(p.coords()[1] > 0.0);
    }

    fn affine(x: f64) -> ProjPoint {
        pt(&[x, 1.0])
    }

    #[test]
    fn cross_ratio_on_affine_line() {
        let t = Tol::default();
        let r = cross_ratio(&affine(-1.), &affine(1.), &affine(0.5), &affine(0.), &t).unwrap();
        assert!((r - 3.0).abs() < 1e-14);
        let r = cross_ratio(&affine(-1.), &affine(1.), &affine(0.), &affine(0.), &t).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cross_ratio_errors() {
        let t = Tol::default();
        let e = cross_ratio(&pt(&[1., 0., 0.]), &pt(&[0., 1., 0.]), &pt(&[0., 0., 1.]), &pt(&[1., 1., 1.]), &t);
        assert!(matches!(e, Err(Error::NonCollinear { .. })));
        let e = cross_ratio(&affine(-1.), &affine(1.), &affine(1.), &affine(0.), &t);
        assert_eq!(e, Err(Error::DegenerateCrossRatio));
    }

    #[test]
    fn radial_projection_examples() {
        let t = Tol::default();
        let v = pt(&[0., 0., 1.]);
        let r = radial_project(&v, &pt(&[1., 0., 0.]), &t).unwrap();
        assert!(r.approx_eq(&pt(&[1., 0., 0.]), 1e-15));
        let r = radial_project(&v, &pt(&[1., 0., 1.]), &t).unwrap();
        assert!(r.approx_eq(&pt(&[1., 0., 0.]), 1e-15));
        assert!(matches!(radial_project(&v, &v.antipode(), &t), Err(Error::UndefinedDirection)));
    }

    #[test]
    fn hausdorff_examples() {
        let a = vec![pt(&[1., 0., 0.])];
        let b = vec![pt(&[0., 1., 0.])];
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        assert!((hausdorff(&a, &b).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(hausdorff(&a, &[]), Err(Error::EmptySet));
        let c = vec![pt(&[1., 0., 0.]), pt(&[-1., 0., 0.])];
        assert_eq!(simple_dist(&a, &c).unwrap(), 0.0);
        assert!((hausdorff(&a, &c).unwrap() - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn subspace_operations() {
        let e = |i: usize| Vector::from_fn(4, |j, _| if i == j { 1.0 } else { 0.0 });
        let a = Subspace::span(&[e(0), e(1)], 4, 1e-12);
        let b = Subspace::span(&[e(1), e(2)], 4, 1e-12);
        assert_eq!(a.dim(), 2);
        assert_eq!(a.complement().dim(), 2);
        let i = a.intersect(&b, 1e-10);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&e(1), 1e-12));
        assert_eq!(a.sum(&b, 1e-10).dim(), 3);
        let g = Matrix::from_diagonal(&Vector::from_vec(vec![2., 3., 4., 5.]));
        assert!(a.invariance_residual(&g) < 1e-15);
    }
}
