//! Convex cones given by generator rays, chords and the Hilbert metric.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::duality::dd;
use crate::lp;
use crate::projcore::{cross_ratio, hausdorff, Matrix, ProjMap, ProjPoint, Subspace, Vector};
use crate::{Error, Result, Tol};

/// Number of boundary rays used to represent a quadric body in V-form.
pub const DEFAULT_QUADRIC_SAMPLES: usize = 64;

#[derive(Debug, Clone)]
pub enum BodyKind {
    Polyhedral,
    /// The nappe {xᵀQx > 0, xᵀQa > 0} of a form Q with one positive
    /// eigenvalue, `a` being the positive eigendirection.
    Quadric { q: Matrix, axis: Vector },
}

/// A convex cone in ℝ^{n+1} (a convex set of Sⁿ) given by generator rays.
#[derive(Debug, Clone)]
pub struct ConeBody {
    generators: Vec<Vector>,
    kind: BodyKind,
    properly_convex: bool,
    margin: f64,
    margin_functional: Vector,
    span: Subspace,
    facets: Vec<Vector>,
    lineality: Subspace,
    quadric_samples: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Chord {
    pub o: ProjPoint,
    pub s: ProjPoint,
    pub p: ProjPoint,
    pub q: ProjPoint,
    /// Angles of o, p, q, s along the great circle through p and q
    /// (p at angle 0, q at a positive angle).
    pub angles: [f64; 4],
}

fn unit_and_dedup(gens: Vec<Vector>) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(gens.len());
    for g in gens {
        let n = g.norm();
        if !(n.is_finite() && n > 0.0) {
            continue;
        }
        let u = g / n;
        if !out.iter().any(|o| (o - &u).amax() <= 1e-12) {
            out.push(u);
        }
    }
    out
}

/// Max-margin functional over a generator set, solved with a growing
/// working set so the LP stays small for large orbit hulls.
pub fn max_margin(gens: &[Vector]) -> (Vector, f64) {
    let d = gens[0].len();
    if gens.len() <= 4 * d + 4 {
        return lp::max_margin_functional(gens);
    }
    let mut work: Vec<usize> = (0..(2 * d).min(gens.len())).collect();
    loop {
        let rows: Vec<Vector> = work.iter().map(|&i| gens[i].clone()).collect();
        let (phi, t) = lp::max_margin_functional(&rows);
        let mut viol: Vec<(f64, usize)> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| (g.dot(&phi), i))
            .filter(|&(v, i)| v < t - 1e-12 && !work.contains(&i))
            .collect();
        if viol.is_empty() {
            return (phi, t);
        }
        viol.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        work.extend(viol.iter().take(d + 1).map(|&(_, i)| i));
        if work.len() >= gens.len() {
            return lp::max_margin_functional(gens);
        }
    }
}

impl ConeBody {
    pub fn polyhedral(gens: Vec<Vector>, tol: &Tol) -> Result<Self> {
        let generators = unit_and_dedup(gens);
        if generators.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        Self::assemble(generators, BodyKind::Polyhedral, None, tol)
    }

    pub fn from_points(pts: &[ProjPoint], tol: &Tol) -> Result<Self> {
        Self::polyhedral(pts.iter().map(|p| p.coords().clone()).collect(), tol)
    }

    /// The body {xᵀQx > 0} on the side of the positive eigendirection of Q,
    /// carried together with `samples` boundary rays.
    pub fn quadric(q: Matrix, samples: usize, tol: &Tol) -> Result<Self> {
        Self::quadric_oriented(q, None, samples, tol)
    }

    /// As [`ConeBody::quadric`], choosing the nappe containing `side` when given.
    pub fn quadric_oriented(q: Matrix, side: Option<&Vector>, samples: usize, tol: &Tol) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::Dimension { expected: q.nrows(), got: q.ncols() });
        }
        let sym = (&q + q.transpose()) * 0.5;
        let dim = sym.nrows();
        let eig = SymmetricEigen::new(sym.clone());
        let scale = eig.eigenvalues.amax();
        let pos: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] > tol.eq * scale).collect();
        let neg: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] < -tol.eq * scale).collect();
        if pos.is_empty() {
            return Err(Error::Construct("quadric form has no positive direction".into()));
        }
        let top = pos
            .iter()
            .copied()
            .max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(b.cmp(&a)))
            .unwrap();
        let mut axis = ProjPoint::lift_rp(eig.eigenvectors.column(top).into_owned())?.into_coords();
        if let Some(side) = side {
            if axis.dot(&(&sym * side)) < 0.0 {
                axis.neg_mut();
            }
        }
        let signature_ok = pos.len() == 1 && neg.len() == dim - 1;
        let mut gens = Vec::new();
        if signature_ok {
            let a = &axis / eig.eigenvalues[top].sqrt();
            let basis: Vec<Vector> = neg
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned() / (-eig.eigenvalues[i]).sqrt())
                .collect();
            for u in sphere_samples(basis.len(), samples.max(1)) {
                let mut x = a.clone();
                for (c, b) in u.iter().zip(&basis) {
                    x.axpy(*c, b, 1.0);
                }
                gens.push(x);
            }
        } else {
            gens.push(axis.clone());
        }
        let generators = unit_and_dedup(gens);
        let mut body = Self::assemble(generators, BodyKind::Quadric { q: sym, axis }, Some(samples), tol)?;
        body.properly_convex = signature_ok;
        Ok(body)
    }

    /// The Klein model: x₀² > x₁² + … + xₙ².
    pub fn klein_ball(n: usize, tol: &Tol) -> Result<Self> {
        let mut d = vec![-1.0; n + 1];
        d[0] = 1.0;
        Self::quadric(Matrix::from_diagonal(&Vector::from_vec(d)), DEFAULT_QUADRIC_SAMPLES, tol)
    }

    fn assemble(generators: Vec<Vector>, kind: BodyKind, quadric_samples: Option<usize>, tol: &Tol) -> Result<Self> {
        let ambient = generators[0].len();
        if generators.iter().any(|g| g.len() != ambient) {
            return Err(Error::Dimension { expected: ambient, got: 0 });
        }
        let span = Subspace::span(&generators, ambient, tol.subspace);
        let (phi, margin) = max_margin(&generators);
        let basis = span.basis().clone();
        let local: Vec<Vector> = generators.iter().map(|g| basis.transpose() * g).collect();
        let (facets, lineality) = match dd::dual_rays(&local, tol.dd) {
            Some(rays) => {
                let fac: Vec<Vector> = rays.iter().map(|r| (&basis * r).normalize()).collect();
                let fspan = Subspace::span(&rays, span.dim(), tol.subspace);
                let lin_local = fspan.complement();
                let lin: Vec<Vector> = lin_local.basis_vectors().iter().map(|v| &basis * v).collect();
                (fac, Subspace::span(&lin, ambient, tol.subspace))
            }
            None => (Vec::new(), Subspace::zero(ambient)),
        };
        let antipodal = margin <= tol.eq && has_antipodal_pair(&generators, tol.eq);
        let properly_convex = margin > tol.eq && !antipodal;
        Ok(ConeBody {
            generators,
            kind,
            properly_convex,
            margin,
            margin_functional: phi,
            span,
            facets,
            lineality,
            quadric_samples,
        })
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn generator_points(&self) -> Vec<ProjPoint> {
        self.generators.iter().map(|g| ProjPoint::new(g.clone()).expect("unit generator")).collect()
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn ambient(&self) -> usize {
        self.generators[0].len()
    }

    pub fn span(&self) -> &Subspace {
        &self.span
    }

    pub fn is_full_dim(&self) -> bool {
        self.span.dim() == self.ambient()
    }

    /// Facet functionals (unit), relative to the span when not full-dimensional.
    pub fn facets(&self) -> &[Vector] {
        &self.facets
    }

    /// The largest linear subspace contained in the closed cone.
    pub fn lineality(&self) -> &Subspace {
        &self.lineality
    }

    /// Optimal value of max min ⟨φ, gᵢ⟩ over |φⱼ| ≤ 1, and its φ.
    pub fn margin(&self) -> (f64, &Vector) {
        (self.margin, &self.margin_functional)
    }

    /// Boundary sample count for quadric bodies (their V-form approximation).
    pub fn quadric_samples(&self) -> Option<usize> {
        self.quadric_samples
    }

    pub fn is_properly_convex(&self) -> bool {
        self.properly_convex
    }

    /// Signed slack of `x`: minimum facet value (polyhedral) or normalized
    /// form value (quadric). Positive exactly on the interior.
    pub fn slack(&self, x: &Vector) -> f64 {
        let x = x.normalize();
        match &self.kind {
            BodyKind::Quadric { q, axis } => {
                let side = (q * &x).dot(axis);
                let v = x.dot(&(q * &x)) / q.amax();
                if side > 0.0 {
                    v
                } else {
                    -v.abs()
                }
            }
            BodyKind::Polyhedral => {
                if !self.is_full_dim() {
                    return -self.span.distance(&x).max(f64::MIN_POSITIVE);
                }
                self.facets.iter().map(|f| f.dot(&x)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn is_interior(&self, x: &Vector, tol: &Tol) -> bool {
        self.slack(x) >= tol.interior
    }

    /// Membership in the closed cone, within `eps`.
    pub fn contains(&self, x: &Vector, eps: f64) -> bool {
        let xn = x.normalize();
        match &self.kind {
            BodyKind::Quadric { .. } => self.slack(&xn) >= -eps,
            BodyKind::Polyhedral => {
                self.span.contains(&xn, eps.max(1e-12))
                    && self.facets.iter().all(|f| f.dot(&xn) >= -eps)
            }
        }
    }

    /// Extreme rays: generators whose active facets have full rank in the span.
    pub fn extreme_rays(&self) -> Vec<Vector> {
        if let BodyKind::Quadric { .. } = self.kind {
            return self.generators.clone();
        }
        if !self.properly_convex {
            return self.generators.clone();
        }
        let k = self.span.dim();
        if k <= 1 {
            return self.generators.clone();
        }
        self.generators
            .iter()
            .filter(|g| {
                let active: Vec<Vector> = self.facets.iter().filter(|f| f.dot(g).abs() <= 1e-9).cloned().collect();
                Subspace::span(&active, self.ambient(), 1e-8).dim() >= k - 1
            })
            .cloned()
            .collect()
    }

    pub fn extreme_points(&self) -> Vec<ProjPoint> {
        self.extreme_rays().into_iter().map(|g| ProjPoint::new(g).expect("unit")).collect()
    }

    /// Image under a projective map.
    pub fn transform(&self, g: &ProjMap, tol: &Tol) -> Result<Self> {
        let gens: Vec<Vector> = self.generators.iter().map(|x| g.apply(x)).collect();
        match &self.kind {
            BodyKind::Polyhedral => Self::polyhedral(gens, tol),
            BodyKind::Quadric { q, axis } => {
                let ginv = g.inverse();
                let q2 = ginv.matrix().transpose() * q * ginv.matrix();
                let generators = unit_and_dedup(gens);
                let axis2 = g.apply(axis).normalize();
                let mut body = Self::assemble(
                    generators,
                    BodyKind::Quadric { q: (&q2 + q2.transpose()) * 0.5, axis: axis2 },
                    self.quadric_samples,
                    tol,
                )?;
                body.properly_convex = self.properly_convex;
                Ok(body)
            }
        }
    }
}

fn has_antipodal_pair(gens: &[Vector], eps: f64) -> bool {
    gens.iter()
        .enumerate()
        .any(|(i, a)| gens[i + 1..].iter().any(|b| (a + b).amax() <= eps))
}

/// Deterministic points of S^{k−1} (k ≥ 1): a uniform circle for k = 2 and
/// seeded Gaussian samples otherwise.
pub fn sphere_samples(k: usize, m: usize) -> Vec<Vector> {
    match k {
        0 => vec![Vector::zeros(0)],
        1 => vec![Vector::from_vec(vec![1.0]), Vector::from_vec(vec![-1.0])],
        2 => (0..m)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / m as f64;
                Vector::from_vec(vec![t.cos(), t.sin()])
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let mut out: Vec<Vector> = (0..k)
                .flat_map(|i| {
                    let e = Vector::from_fn(k, |j, _| if i == j { 1.0 } else { 0.0 });
                    [e.clone(), -e]
                })
                .collect();
            while out.len() < m.max(2 * k) {
                let v = Vector::from_fn(k, |_, _| {
                    let u1: f64 = rng.random::<f64>().max(1e-300);
                    let u2: f64 = rng.random();
                    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
                });
                out.push(v.normalize());
            }
            out
        }
    }
}

pub fn is_properly_convex(b: &ConeBody) -> Result<bool> {
    if b.generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    Ok(b.properly_convex)
}

/// The cone generated by the union of the generator sets.
pub fn join(a: &ConeBody, b: &ConeBody, tol: &Tol) -> Result<ConeBody> {
    let mut gens = a.generators.clone();
    gens.extend(b.generators.iter().cloned());
    ConeBody::polyhedral(gens, tol)
}

/// Join of bodies whose spans form a direct sum.
pub fn strict_join(list: &[ConeBody], tol: &Tol) -> Result<ConeBody> {
    let first = list.first().ok_or(Error::EmptyGenerators)?;
    let ambient = first.ambient();
    let mut total = Subspace::zero(ambient);
    let mut dims = 0;
    let mut gens = Vec::new();
    for b in list {
        dims += b.span.dim();
        total = total.sum(&b.span, tol.subspace);
        gens.extend(b.generators.iter().cloned());
    }
    if total.dim() != dims {
        return Err(Error::NotStrictJoin);
    }
    ConeBody::polyhedral(gens, tol)
}

/// Generators given by every sum of one generator from each body.
pub fn cone_sum(list: &[ConeBody], tol: &Tol) -> Result<ConeBody> {
    let first = list.first().ok_or(Error::EmptyGenerators)?;
    let mut sums: Vec<Vector> = first.generators.clone();
    for b in &list[1..] {
        sums = sums
            .iter()
            .flat_map(|s| b.generators.iter().map(move |g| s + g))
            .collect();
    }
    ConeBody::polyhedral(sums, tol)
}

/// Hausdorff distance between the extreme-ray sets of two bodies.
pub fn body_hausdorff(a: &ConeBody, b: &ConeBody) -> Result<f64> {
    hausdorff(&a.extreme_points(), &b.extreme_points())
}

/// Endpoints of the maximal segment of the body through interior points p ≠ q.
pub fn chord_endpoints(b: &ConeBody, p: &ProjPoint, q: &ProjPoint, tol: &Tol) -> Result<Chord> {
    for x in [p, q] {
        let s = b.slack(x.coords());
        if s < tol.interior {
            return Err(Error::NotInterior { slack: s });
        }
    }
    let pc = p.coords();
    let w = q.coords() - pc * q.coords().dot(pc);
    if w.norm() <= tol.eq || p.approx_eq(q, tol.eq) {
        return Err(Error::SamePoint);
    }
    let u = w.normalize();
    let theta_q = q.coords().dot(&u).atan2(q.coords().dot(pc));
    let (lo, hi) = match &b.kind {
        BodyKind::Polyhedral => {
            let mut lo = -std::f64::consts::FRAC_PI_2;
            let mut hi = std::f64::consts::FRAC_PI_2;
            for f in &b.facets {
                let phase = f.dot(&u).atan2(f.dot(pc));
                lo = lo.max(phase - std::f64::consts::FRAC_PI_2);
                hi = hi.min(phase + std::f64::consts::FRAC_PI_2);
            }
            (lo, hi)
        }
        BodyKind::Quadric { q: form, .. } => {
            let a = pc.dot(&(form * pc));
            let bb = pc.dot(&(form * &u));
            let c = u.dot(&(form * &u));
            let mid = (a + c) / 2.0;
            let r = (((a - c) / 2.0).powi(2) + bb * bb).sqrt();
            if r <= 0.0 || mid / r >= 1.0 {
                return Err(Error::Precondition("line does not meet the quadric boundary".into()));
            }
            let psi = bb.atan2((a - c) / 2.0);
            let alpha = (-mid / r).acos();
            ((psi - alpha) / 2.0, (psi + alpha) / 2.0)
        }
    };
    let at = |t: f64| ProjPoint::new(pc * t.cos() + &u * t.sin());
    Ok(Chord { o: at(lo)?, s: at(hi)?, p: p.clone(), q: q.clone(), angles: [lo, 0.0, theta_q, hi] })
}

/// Hilbert distance log|[o, s, q, p]|.
pub fn hilbert_distance(b: &ConeBody, p: &ProjPoint, q: &ProjPoint, tol: &Tol) -> Result<f64> {
    if !b.properly_convex {
        return Err(Error::HilbertUndefined);
    }
    if p.approx_eq(q, tol.eq) {
        let s = b.slack(p.coords());
        if s < tol.interior {
            return Err(Error::NotInterior { slack: s });
        }
        return Ok(0.0);
    }
    let ch = chord_endpoints(b, p, q, tol)?;
    Ok(chord_cross_ratio(&ch).abs().ln())
}

/// [o, s, q, p] from the chord angles: det(x, y) = sin(θ_y − θ_x) on the circle.
pub fn chord_cross_ratio(ch: &Chord) -> f64 {
    let [o, p, q, s] = ch.angles;
    ((q - o).sin() * (p - s).sin()) / ((q - s).sin() * (p - o).sin())
}

/// The same value through the general collinear cross-ratio.
pub fn chord_cross_ratio_generic(ch: &Chord, tol: &Tol) -> Result<f64> {
    cross_ratio(&ch.o, &ch.s, &ch.q, &ch.p, tol)
}

/// Klein-model point (1, x).
pub fn klein_point(x: &[f64]) -> ProjPoint {
    let mut v = vec![1.0];
    v.extend_from_slice(x);
    ProjPoint::from_slice(&v).expect("nonzero")
}

/// Hyperbolic distance in the Klein model (curvature −1).
pub fn klein_hyperbolic_distance(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx: f64 = x.iter().map(|a| a * a).sum();
    let ny: f64 = y.iter().map(|a| a * a).sum();
    let diff: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    // cosh d = (1 − x·y)/√((1−|x|²)(1−|y|²)); use sinh² for accuracy near 0.
    let denom = (1.0 - nx) * (1.0 - ny);
    let sinh2 = (diff - (nx * ny - dot * dot)) / denom;
    sinh2.max(0.0).sqrt().asinh()
}

/// Seeded random point strictly inside a properly convex body, as a positive
/// combination of generators.
pub fn random_interior<R: Rng>(b: &ConeBody, rng: &mut R) -> Vector {
    let mut x = Vector::zeros(b.ambient());
    for g in &b.generators {
        x.axpy(rng.random::<f64>() + 0.05, g, 1.0);
    }
    x.normalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn t() -> Tol {
        Tol::default()
    }

    #[test]
    fn orthant_and_line_cases() {
        let orth = ConeBody::polyhedral(vec![v(&[1., 0., 0.]), v(&[0., 1., 0.]), v(&[0., 0., 1.])], &t()).unwrap();
        assert!(is_properly_convex(&orth).unwrap());
        let line = ConeBody::polyhedral(vec![v(&[1., 0., 0.]), v(&[-1., 0., 0.]), v(&[0., 1., 0.])], &t()).unwrap();
        assert!(!is_properly_convex(&line).unwrap());
        assert_eq!(line.lineality().dim(), 1);
        assert!(matches!(ConeBody::polyhedral(vec![], &t()), Err(Error::EmptyGenerators)));
    }

    #[test]
    fn lorentz_cone_is_properly_convex() {
        let ball = ConeBody::klein_ball(2, &t()).unwrap();
        assert!(ball.is_properly_convex());
        assert_eq!(ball.generators().len(), 64);
        // The sampled rays alone, as a polyhedral cone, are also properly convex
        // with φ = (1, 0, 0) giving margin 1/√2.
        let poly = ConeBody::polyhedral(ball.generators().to_vec(), &t()).unwrap();
        assert!(poly.is_properly_convex());
        let phi = v(&[1., 0., 0.]);
        let m = poly.generators().iter().map(|g| g.dot(&phi)).fold(f64::INFINITY, f64::min);
        assert!((m - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quadric_signature_is_checked() {
        let q = Matrix::from_diagonal(&v(&[1., 1., -1.]));
        let b = ConeBody::quadric(q, 16, &t()).unwrap();
        assert!(!b.is_properly_convex());
    }

    #[test]
    fn strict_join_segment_and_point() {
        let seg = ConeBody::polyhedral(vec![v(&[1., 0.2, 0.]), v(&[0.2, 1., 0.])], &t()).unwrap();
        let pt = ConeBody::polyhedral(vec![v(&[0., 0., 1.])], &t()).unwrap();
        let j = strict_join(&[seg.clone(), pt], &t()).unwrap();
        assert_eq!(j.extreme_rays().len(), 3);
        assert!(j.is_properly_convex());
        let dependent = ConeBody::polyhedral(vec![v(&[1., 1., 0.])], &t()).unwrap();
        assert!(matches!(strict_join(&[seg, dependent], &t()), Err(Error::NotStrictJoin)));
    }

    #[test]
    fn extreme_rays_drop_interior_generators() {
        let b = ConeBody::polyhedral(
            vec![v(&[1., 0., 1.]), v(&[0., 1., 1.]), v(&[-1., -1., 1.]), v(&[0., 0., 1.])],
            &t(),
        )
        .unwrap();
        assert_eq!(b.extreme_rays().len(), 3);
    }

    #[test]
    fn interval_chord_and_distance() {
        let tol = t();
        let interval = ConeBody::klein_ball(1, &tol).unwrap();
        let p = klein_point(&[0.0]);
        let q = klein_point(&[0.5]);
        let ch = chord_endpoints(&interval, &p, &q, &tol).unwrap();
        assert!(ch.o.approx_eq(&klein_point(&[-1.0]), 1e-12));
        assert!(ch.s.approx_eq(&klein_point(&[1.0]), 1e-12));
        let d = hilbert_distance(&interval, &p, &q, &tol).unwrap();
        assert!((d - 3f64.ln()).abs() < 1e-12);
        assert_eq!(hilbert_distance(&interval, &p, &p, &tol).unwrap(), 0.0);
        let generic = chord_cross_ratio_generic(&ch, &tol).unwrap();
        assert!((generic - 3.0).abs() < 1e-12);
    }

    #[test]
    fn klein_disk_diameter_and_constant_two() {
        let tol = t();
        let disk = ConeBody::klein_ball(2, &tol).unwrap();
        let ch = chord_endpoints(&disk, &klein_point(&[0., 0.]), &klein_point(&[0.3, 0.]), &tol).unwrap();
        assert!(ch.o.approx_eq(&klein_point(&[-1., 0.]), 1e-12));
        assert!(ch.s.approx_eq(&klein_point(&[1., 0.]), 1e-12));
        let d = hilbert_distance(&disk, &klein_point(&[0., 0.]), &klein_point(&[0.3, 0.4]), &tol).unwrap();
        assert!((d - 3f64.ln()).abs() < 1e-12);
        assert!((d - 2.0 * 0.5f64.atanh()).abs() < 1e-12);
    }

    #[test]
    fn square_chord_hits_edges() {
        let tol = t();
        let sq = ConeBody::polyhedral(
            vec![v(&[1., 1., 1.]), v(&[1., -1., 1.]), v(&[-1., -1., 1.]), v(&[-1., 1., 1.])],
            &tol,
        )
        .unwrap();
        let p = ProjPoint::from_slice(&[0., 0., 1.]).unwrap();
        let q = ProjPoint::from_slice(&[0.5, 0.25, 1.]).unwrap();
        let ch = chord_endpoints(&sq, &p, &q, &tol).unwrap();
        for e in [&ch.o, &ch.s] {
            let c = e.coords();
            let (x, y) = (c[0] / c[2], c[1] / c[2]);
            assert!((x.abs().max(y.abs()) - 1.0).abs() < 1e-10);
        }
        // o lies beyond p, s beyond q.
        assert!(ch.o.coords()[0] < 0.0 && ch.s.coords()[0] > 0.0);
    }

    #[test]
    fn chord_rejects_boundary_and_equal_points() {
        let tol = t();
        let disk = ConeBody::klein_ball(2, &tol).unwrap();
        let e = chord_endpoints(&disk, &klein_point(&[1.0, 0.]), &klein_point(&[0., 0.]), &tol);
        assert!(matches!(e, Err(Error::NotInterior { .. })));
        let e = chord_endpoints(&disk, &klein_point(&[0.1, 0.]), &klein_point(&[0.1, 0.]), &tol);
        assert_eq!(e.unwrap_err(), Error::SamePoint);
        let line = ConeBody::polyhedral(vec![v(&[1., 0.]), v(&[-1., 0.]), v(&[0., 1.])], &tol).unwrap();
        let e = hilbert_distance(&line, &ProjPoint::from_slice(&[0., 1.]).unwrap(), &ProjPoint::from_slice(&[0.1, 1.]).unwrap(), &tol);
        assert_eq!(e.unwrap_err(), Error::HilbertUndefined);
    }

    #[test]
    fn klein_distance_formula() {
        assert!((klein_hyperbolic_distance(&[0.0, 0.0], &[0.5, 0.0]) - 0.5f64.atanh()).abs() < 1e-15);
        assert_eq!(klein_hyperbolic_distance(&[0.2, 0.1], &[0.2, 0.1]), 0.0);
    }
}
