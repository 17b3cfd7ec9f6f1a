//! Dual cones, the dual group action and the duality map on augmented boundaries.

pub mod dd;

use crate::convex::{BodyKind, ConeBody};
use crate::projcore::{Matrix, ProjMap, ProjPoint, Subspace, Vector};
use crate::{Error, Result, Tol};

/// A boundary point together with an oriented supporting functional.
#[derive(Debug, Clone)]
pub struct AugBoundaryPoint {
    pub x: ProjPoint,
    pub h: ProjPoint,
}

impl AugBoundaryPoint {
    /// Worst violation of h(x) = 0 and h ≥ 0 on the generators of `body`.
    pub fn residual(&self, body: &ConeBody) -> f64 {
        let on = self.h.coords().dot(self.x.coords()).abs();
        let neg = body
            .generators()
            .iter()
            .map(|g| -self.h.coords().dot(g))
            .fold(0.0_f64, f64::max);
        on.max(neg)
    }

    pub fn is_valid(&self, body: &ConeBody, tol: &Tol) -> bool {
        self.residual(body) < tol.eq
    }

    /// The duality map (x, h) ↦ (h, x).
    pub fn swap(&self) -> AugBoundaryPoint {
        AugBoundaryPoint { x: self.h.clone(), h: self.x.clone() }
    }
}

/// The cone of functionals nonnegative on `c`.
///
/// For a cone that is not full-dimensional the result contains the
/// annihilator of its span (and so is not properly convex).
pub fn dual_cone(c: &ConeBody, tol: &Tol) -> Result<ConeBody> {
    if c.generators().is_empty() {
        return Err(Error::EmptyGenerators);
    }
    match c.kind() {
        BodyKind::Quadric { q, axis } => {
            let qi = q.clone().try_inverse().ok_or(Error::Singular)?;
            let side = q * axis;
            ConeBody::quadric_oriented(qi, Some(&side), c.quadric_samples().unwrap_or(64), tol)
        }
        BodyKind::Polyhedral => {
            let mut gens: Vec<Vector> = c.facets().to_vec();
            for v in c.span().complement().basis_vectors() {
                gens.push(-&v);
                gens.push(v);
            }
            if gens.is_empty() {
                return Err(Error::Precondition("dual cone is {0}: the cone is the whole space".into()));
            }
            ConeBody::polyhedral(gens, tol)
        }
    }
}

/// (gᵀ)⁻¹, the action on functionals.
pub fn dual_map(g: &ProjMap) -> ProjMap {
    g.dual()
}

/// Dual of `a` inside the pairing of a direct sum V_A ⊕ V_B = ℝ^{n+1}: the
/// functionals vanishing on V_B and nonnegative on `a`.
pub fn dual_in_join(a: &ConeBody, b: &ConeBody, tol: &Tol) -> Result<ConeBody> {
    let ambient = a.ambient();
    let (ma, mb) = (a.span().basis(), b.span().basis());
    if ma.ncols() + mb.ncols() != ambient {
        return Err(Error::NotStrictJoin);
    }
    let mut p = Matrix::zeros(ambient, ambient);
    p.columns_mut(0, ma.ncols()).copy_from(ma);
    p.columns_mut(ma.ncols(), mb.ncols()).copy_from(mb);
    let pinv = p.try_inverse().ok_or(Error::NotStrictJoin)?;
    let k = ma.ncols();
    let coords: Vec<Vector> = a.generators().iter().map(|g| (&pinv * g).rows(0, k).into_owned()).collect();
    let rays = if k == 1 {
        vec![Vector::from_element(1, coords[0][0].signum())]
    } else {
        dd::dual_rays(&coords, tol.dd).ok_or(Error::NotStrictJoin)?
    };
    let psi = pinv.rows(0, k).transpose();
    let gens: Vec<Vector> = rays.iter().map(|r| &psi * r).collect();
    ConeBody::polyhedral(gens, tol)
}

/// Samples of the augmented boundary of `omega` paired with their images
/// under the duality map, each checked against `omega` and its dual.
pub fn duality_map_samples(
    omega: &ConeBody,
    m: usize,
    tol: &Tol,
) -> Result<Vec<(AugBoundaryPoint, AugBoundaryPoint)>> {
    if !omega.is_properly_convex() {
        return Err(Error::Precondition("domain is not properly convex".into()));
    }
    if m == 0 {
        return Err(Error::Precondition("sample count must be positive".into()));
    }
    let dual = dual_cone(omega, tol)?;
    let mut out = Vec::with_capacity(m);
    match omega.kind() {
        BodyKind::Quadric { q, .. } => {
            let gens = omega.generators();
            for i in 0..m {
                let x = gens[i % gens.len()].clone();
                let h = q * &x;
                let aug = AugBoundaryPoint { x: ProjPoint::new(x)?, h: ProjPoint::new(h)? };
                out.push(aug);
            }
        }
        BodyKind::Polyhedral => {
            let facets = omega.facets();
            let extremes = omega.extreme_rays();
            let nf = facets.len();
            for i in 0..m {
                let f = &facets[i % nf];
                let round = i / nf;
                let on: Vec<&Vector> = extremes.iter().filter(|g| f.dot(g).abs() <= 1e-9).collect();
                let aug = if round.is_multiple_of(2) {
                    // A point in the relative interior of the facet.
                    let mut x = Vector::zeros(omega.ambient());
                    for (j, g) in on.iter().enumerate() {
                        x.axpy(1.0 + ((j + round) % 3) as f64 * 0.25, g, 1.0);
                    }
                    AugBoundaryPoint { x: ProjPoint::new(x)?, h: ProjPoint::new(f.clone())? }
                } else {
                    // A vertex of the facet with a mixture of the facets through it.
                    let x = on[(round / 2) % on.len()].clone();
                    let through: Vec<&Vector> = facets.iter().filter(|g| g.dot(&x).abs() <= 1e-9).collect();
                    let w = 1.0 / (1 + round) as f64;
                    let mut h = f * (1.0 - w);
                    for g in &through {
                        h.axpy(w / through.len() as f64, g, 1.0);
                    }
                    AugBoundaryPoint { x: ProjPoint::new(x)?, h: ProjPoint::new(h)? }
                };
                out.push(aug);
            }
        }
    }
    let mut pairs = Vec::with_capacity(out.len());
    for aug in out {
        let img = aug.swap();
        let r1 = aug.residual(omega);
        let r2 = img.residual(&dual);
        if r1 >= tol.eq || r2 >= tol.eq {
            return Err(Error::Precondition(format!(
                "augmented boundary invariant violated (residuals {r1:e}, {r2:e})"
            )));
        }
        pairs.push((aug, img));
    }
    Ok(pairs)
}

/// Distinct supporting functionals at `x` among the samples (up to `eps`).
pub fn distinct_supports(samples: &[(AugBoundaryPoint, AugBoundaryPoint)], x: &ProjPoint, eps: f64) -> usize {
    let mut hs: Vec<&ProjPoint> = Vec::new();
    for (a, _) in samples {
        if a.x.approx_eq(x, eps) && !hs.iter().any(|h| h.approx_eq(&a.h, eps)) {
            hs.push(&a.h);
        }
    }
    hs.len()
}

/// `true` when every generator of `inner` lies in the closed cone `outer`.
pub fn cone_contains(outer: &ConeBody, inner: &ConeBody, eps: f64) -> bool {
    inner.generators().iter().all(|g| outer.contains(g, eps))
}

/// Span of the supporting functionals at a boundary point, for diagnostics.
pub fn support_span(body: &ConeBody, x: &Vector, eps: f64) -> Subspace {
    let act: Vec<Vector> = body.facets().iter().filter(|f| f.dot(x).abs() <= eps).cloned().collect();
    Subspace::span(&act, body.ambient(), 1e-8)
}
