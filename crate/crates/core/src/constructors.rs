//! Example families with known answers: cusps, hyper-ideal lens-cones,
//! quasi-lens groups, quasi-join groups, complete-affine non-cusp groups and
//! bending deformations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::ConeBody;
use crate::ends::RadialEnd;
use crate::projcore::{Matrix, ProjMap, ProjPoint, Subspace, Vector};
use crate::spectra::{clustered_eigenvalues, enumerate_words};
use crate::{Error, Result, Tol};

/// diag(1, −1, …, −1) on ℝ^{n+1}.
pub fn lorentz_form(n: usize) -> Matrix {
    let mut d = vec![-1.0; n + 1];
    d[0] = 1.0;
    Matrix::from_diagonal(&Vector::from_vec(d))
}

#[derive(Debug, Clone)]
pub struct CuspSpec {
    pub n: usize,
    /// n−1 translation vectors in ℝ^{n−1}.
    pub lattice: Vec<Vector>,
}

impl CuspSpec {
    pub fn standard(n: usize) -> Self {
        let lattice = (0..n - 1)
            .map(|i| Vector::from_fn(n - 1, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        CuspSpec { n, lattice }
    }
}

/// The null direction (1, −1, 0, …, 0) fixed by the parabolic group.
pub fn cusp_vertex(n: usize) -> ProjPoint {
    let mut v = Vector::zeros(n + 1);
    v[0] = 1.0;
    v[1] = -1.0;
    ProjPoint::new(v).expect("nonzero")
}

/// Unipotent parabolic of SO(n,1) fixing (1,−1,0,…) that translates the
/// horospheres by `a`. In light-cone coordinates u = x₀+x₁, w = x₀−x₁ it
/// is u ↦ u, y ↦ y + u·a, w ↦ w + 2a·y + |a|²u.
pub fn cusp_generator(a: &Vector) -> ProjMap {
    let n = a.len() + 1;
    let h = a.norm_squared() / 2.0;
    let mut m = Matrix::identity(n + 1, n + 1);
    m[(0, 0)] = 1.0 + h;
    m[(0, 1)] = h;
    m[(1, 0)] = -h;
    m[(1, 1)] = 1.0 - h;
    for (j, &aj) in a.iter().enumerate() {
        m[(0, j + 2)] = aj;
        m[(1, j + 2)] = -aj;
        m[(j + 2, 0)] = aj;
        m[(j + 2, 1)] = aj;
    }
    ProjMap::new(m).expect("unipotent")
}

/// Scaling u ↦ (1+ε)u, w ↦ w/(1+ε) in light-cone coordinates; fixes the cusp vertex.
pub fn light_cone_scaling(n: usize, eps: f64) -> ProjMap {
    let (a, b) = (1.0 + eps, 1.0 / (1.0 + eps));
    let mut m = Matrix::identity(n + 1, n + 1);
    m[(0, 0)] = (a + b) / 2.0;
    m[(0, 1)] = (a - b) / 2.0;
    m[(1, 0)] = (a - b) / 2.0;
    m[(1, 1)] = (a + b) / 2.0;
    ProjMap::new(m).expect("nonsingular")
}

/// Points of the horoball {u < ½·√Q(x)} around a fundamental domain.
pub fn horoball_samples(n: usize) -> Vec<ProjPoint> {
    let mut out = Vec::new();
    let mut offsets = vec![Vector::zeros(n - 1)];
    for j in 0..n - 1 {
        for s in [0.5, -0.5] {
            let mut y = Vector::zeros(n - 1);
            y[j] = s;
            offsets.push(y);
        }
    }
    for y in offsets {
        let (u, w) = (1.0, 4.0 + y.norm_squared());
        let mut x = Vector::zeros(n + 1);
        x[0] = (u + w) / 2.0;
        x[1] = (u - w) / 2.0;
        x.rows_mut(2, n - 1).copy_from(&y);
        out.push(ProjPoint::new(x).expect("nonzero"));
    }
    out
}

pub fn cusp_group(spec: &CuspSpec, tol: &Tol) -> Result<RadialEnd> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::Construct("cusp groups need n ≥ 2".into()));
    }
    if spec.lattice.len() != n - 1 || spec.lattice.iter().any(|a| a.len() != n - 1) {
        return Err(Error::Construct(format!("lattice must be {} vectors in ℝ^{}", n - 1, n - 1)));
    }
    let m = Matrix::from_columns(&spec.lattice);
    let sv = m.singular_values();
    if sv.min() <= tol.subspace * sv.max().max(1.0) {
        return Err(Error::Construct("degenerate lattice".into()));
    }
    let gens = spec.lattice.iter().map(cusp_generator).collect();
    RadialEnd::new(cusp_vertex(n), gens, horoball_samples(n), tol)
}

#[derive(Debug, Clone)]
pub struct LensCone {
    /// The pole of the hyperplane of D, outside the ball.
    pub vertex: ProjPoint,
    /// The cone {vertex} ∗ D.
    pub body: ConeBody,
    pub samples: Vec<ProjPoint>,
}

/// Pole of the hyperplane spanned by `d_gens` with respect to `q`, and the
/// cone from it over D.
pub fn hyperideal_lens_cone(d_gens: &[Vector], q: &Matrix, tol: &Tol) -> Result<LensCone> {
    let dim = q.nrows();
    if d_gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let plane = Subspace::span(d_gens, dim, tol.subspace);
    if plane.dim() != dim - 1 {
        return Err(Error::Construct(format!("D spans dimension {}, not a hyperplane", plane.dim())));
    }
    let normal = plane.complement().basis().column(0).into_owned();
    let qi = q.clone().try_inverse().ok_or(Error::Singular)?;
    let p = ProjPoint::lift_rp(&qi * &normal)?;
    let value = p.coords().dot(&(q * p.coords()));
    let scale = q.amax();
    if value.abs() <= tol.eq * scale {
        return Err(Error::Construct("hyperplane is tangent to the ball".into()));
    }
    if value > 0.0 {
        return Err(Error::Construct("hyperplane misses the ball".into()));
    }
    let mut gens = d_gens.to_vec();
    gens.push(p.coords().clone());
    let body = ConeBody::polyhedral(gens, tol)?;
    if !body.is_properly_convex() {
        return Err(Error::Construct("cone over D is not properly convex".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let samples = (0..8)
        .map(|_| ProjPoint::new(crate::convex::random_interior(&body, &mut rng)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LensCone { vertex: p, body, samples })
}

/// One generator of a quasi-lens group: S(g) on the span of D, the vertex
/// eigenvalue and the translation v(g) on the great circle through the vertex.
#[derive(Debug, Clone)]
pub struct QuasiLensGen {
    pub s: Matrix,
    pub lambda_v: f64,
    pub v: f64,
}

/// Block matrix diag(S, [[λ, 0], [λv, λ]]); the vertex is the last coordinate.
pub fn quasi_lens_element(g: &QuasiLensGen) -> Result<ProjMap> {
    let k = g.s.nrows();
    let mut m = Matrix::zeros(k + 2, k + 2);
    m.view_mut((0, 0), (k, k)).copy_from(&g.s);
    m[(k, k)] = g.lambda_v;
    m[(k + 1, k)] = g.lambda_v * g.v;
    m[(k + 1, k + 1)] = g.lambda_v;
    ProjMap::new(m)
}

pub fn quasi_lens_group(gens: &[QuasiLensGen], zeta: &QuasiLensGen, tol: &Tol) -> Result<RadialEnd> {
    let k = zeta.s.nrows();
    for g in gens {
        if g.s.nrows() != k || !g.s.is_square() {
            return Err(Error::Construct("inconsistent S block sizes".into()));
        }
        let comm = &g.s * &zeta.s - &zeta.s * &g.s;
        if comm.amax() > 1e-9 * (g.s.amax() * zeta.s.amax()).max(1.0) {
            return Err(Error::ZetaNotCommuting);
        }
    }
    let mut mats = gens.iter().map(quasi_lens_element).collect::<Result<Vec<_>>>()?;
    mats.push(quasi_lens_element(zeta)?);
    let mut vertex = Vector::zeros(k + 2);
    vertex[k + 1] = 1.0;
    // D is taken to be the positive simplex of the S block.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let samples = (0..6)
        .map(|_| {
            let mut x = Vector::zeros(k + 2);
            for i in 0..k {
                x[i] = 1.0 + 0.2 * rng.random::<f64>();
            }
            x[k] = 0.5 + 0.2 * rng.random::<f64>();
            x[k + 1] = 0.2 * rng.random::<f64>() - 0.1;
            ProjPoint::new(x)
        })
        .collect::<Result<Vec<_>>>()?;
    RadialEnd::new(ProjPoint::new(vertex)?, mats, samples, tol)
}

#[derive(Debug, Clone)]
pub struct QuasiLensReport {
    /// (word, v(g) / log(λ_v/λ₂)) over words with λ_v > λ₂.
    pub ratios: Vec<(String, f64)>,
    pub inf_ratio: f64,
    /// All generators have v(g) = 0.
    pub degenerate: bool,
    /// inf ratio > c₁.
    pub positive_translation: bool,
}

/// Translation v(g) and vertex eigenvalue read off the quasi-lens block form.
pub fn quasi_lens_translation(g: &Matrix) -> (f64, f64) {
    let n = g.nrows() - 1;
    let lam = g[(n, n)];
    (g[(n, n - 1)] / lam, lam.abs())
}

pub fn quasi_lens_report(end: &RadialEnd, max_len: usize, c1: f64) -> Result<QuasiLensReport> {
    let degenerate = end.gens.iter().all(|g| quasi_lens_translation(g.matrix()).0 == 0.0);
    let mut ratios = Vec::new();
    for w in enumerate_words(&end.gens, max_len) {
        let m = w.matrix.matrix();
        let k = m.nrows() - 2;
        let (v, lam_v) = quasi_lens_translation(m);
        let s = m.view((0, 0), (k, k)).into_owned();
        let lam2 = clustered_eigenvalues(&s)?.iter().map(|e| e.value.norm()).fold(0.0, f64::max);
        if lam_v > lam2 * (1.0 + 1e-9) {
            ratios.push((w.label(), v / (lam_v / lam2).ln()));
        }
    }
    let inf_ratio = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(QuasiLensReport { positive_translation: !degenerate && inf_ratio > c1, ratios, inf_ratio, degenerate })
}

/// One element of G in the split form: leaf-space block S, vertex eigenvalue
/// λ, translation v_g ∈ ℝ^{i₀}, orthogonal O₅ and the entry a₇.
#[derive(Debug, Clone)]
pub struct QuasiJoinGen {
    pub s: Matrix,
    pub lambda_v: f64,
    pub v: Vector,
    pub o5: Matrix,
    pub a7: f64,
}

impl QuasiJoinGen {
    /// a₇ giving α₇ = a₇/λ − |v|²/2 the requested value.
    pub fn a7_for(lambda_v: f64, v: &Vector, alpha7: f64) -> f64 {
        lambda_v * (alpha7 + v.norm_squared() / 2.0)
    }
}

#[derive(Debug, Clone)]
pub struct QuasiJoinSpec {
    pub n: usize,
    pub i0: usize,
    pub gens: Vec<QuasiJoinGen>,
    /// Basis of the lattice of N(v) translations, vectors in ℝ^{i₀}.
    pub nil_lattice: Vec<Vector>,
}

/// 2-d rotation by `theta` embedded in the first two coordinates of O(i₀).
fn rotation(i0: usize, theta: f64) -> Matrix {
    let mut o = Matrix::identity(i0, i0);
    if i0 >= 2 {
        let (c, s) = (theta.cos(), theta.sin());
        o[(0, 0)] = c;
        o[(0, 1)] = -s;
        o[(1, 0)] = s;
        o[(1, 1)] = c;
    }
    o
}

impl QuasiJoinSpec {
    /// One generator with dominant vertex eigenvalue e and S = diag(e^{xⱼ})
    /// (Σxⱼ = −(i₀+2)), α₇ = κ, plus the standard lattice of N(v). For
    /// i₀ ≥ 2 the generator twists the fiber by a quarter turn.
    pub fn standard(n: usize, i0: usize, kappa: f64) -> Result<Self> {
        if i0 == 0 || n < i0 + 2 {
            return Err(Error::Construct(format!("need 1 ≤ i0 ≤ n−2 (n={n}, i0={i0})")));
        }
        let m = n - i0 - 1;
        let z = 1.0;
        let mean = -((i0 + 2) as f64) * z / m as f64;
        let xs: Vec<f64> = (0..m)
            .map(|j| if m == 1 { mean } else { mean + 0.5 * (j as f64 / (m - 1) as f64 - 0.5) })
            .collect();
        let s = Matrix::from_diagonal(&Vector::from_iterator(m, xs.iter().map(|x| x.exp())));
        let lambda_v = z.exp();
        let v = Vector::from_fn(i0, |j, _| 0.3 - 0.1 * j as f64);
        let a7 = QuasiJoinGen::a7_for(lambda_v, &v, kappa);
        let o5 = rotation(i0, std::f64::consts::FRAC_PI_2);
        let nil_lattice = (0..i0).map(|i| Vector::from_fn(i0, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
        Ok(QuasiJoinSpec { n, i0, gens: vec![QuasiJoinGen { s, lambda_v, v, o5, a7 }], nil_lattice })
    }
}

/// Block sizes (m = n−i₀−1, 1, i₀, 1) as index offsets: (a₁, first fiber, vertex).
pub fn qj_offsets(n: usize, i0: usize) -> (usize, usize, usize) {
    let m = n - i0 - 1;
    (m, m + 1, n)
}

/// General standard-form element with C₁ = 0, c₂ = 0, s₁ = s₂ = 0.
#[allow(clippy::too_many_arguments)]
pub fn qj_matrix(n: usize, i0: usize, s: &Matrix, a1: f64, a4: &Vector, a5o5: &Matrix, a7: f64, a8: &Vector, a9: f64) -> Matrix {
    let (ia, f, iv) = qj_offsets(n, i0);
    let mut g = Matrix::zeros(n + 1, n + 1);
    g.view_mut((0, 0), (ia, ia)).copy_from(s);
    g[(ia, ia)] = a1;
    for r in 0..i0 {
        g[(f + r, ia)] = a4[r];
        g[(iv, f + r)] = a8[r];
        for c in 0..i0 {
            g[(f + r, f + c)] = a5o5[(r, c)];
        }
    }
    g[(iv, ia)] = a7;
    g[(iv, iv)] = a9;
    g
}

/// An element of the μ_g ≡ 1 split form: a₄ = λv_gᵀ, A₅ = λO₅, a₈ = λv_gO₅, a₉ = λ.
pub fn quasi_join_element(n: usize, i0: usize, g: &QuasiJoinGen) -> Result<ProjMap> {
    let m = n - i0 - 1;
    if g.s.nrows() != m || !g.s.is_square() || g.v.len() != i0 || g.o5.nrows() != i0 || !g.o5.is_square() {
        return Err(Error::Construct("inconsistent block sizes".into()));
    }
    if (g.o5.transpose() * &g.o5 - Matrix::identity(i0, i0)).amax() > 1e-10 {
        return Err(Error::Construct("O5 is not orthogonal".into()));
    }
    let lam = g.lambda_v;
    let a8 = (g.v.transpose() * &g.o5).transpose() * lam;
    ProjMap::new(qj_matrix(n, i0, &g.s, lam, &(&g.v * lam), &(&g.o5 * lam), g.a7, &a8, lam))
}

/// The partial parabolic N(v).
pub fn nil_element(n: usize, i0: usize, v: &Vector) -> ProjMap {
    let m = n - i0 - 1;
    let g = qj_matrix(n, i0, &Matrix::identity(m, m), 1.0, v, &Matrix::identity(i0, i0), v.norm_squared() / 2.0, v, 1.0);
    ProjMap::new(g).expect("unipotent")
}

fn qj_samples(n: usize, i0: usize, count: usize) -> Vec<ProjPoint> {
    let (ia, f, iv) = qj_offsets(n, i0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    (0..count)
        .map(|_| {
            let mut x = Vector::zeros(n + 1);
            for i in 0..ia {
                x[i] = 1.0 + 0.5 * rng.random::<f64>();
            }
            x[ia] = 1.0;
            for r in 0..i0 {
                x[f + r] = 0.2 * rng.random::<f64>() - 0.1;
            }
            x[iv] = 0.5 + 0.2 * rng.random::<f64>();
            ProjPoint::new(x).expect("nonzero")
        })
        .collect()
}

pub fn quasi_join_group(spec: &QuasiJoinSpec, tol: &Tol) -> Result<RadialEnd> {
    let (n, i0) = (spec.n, spec.i0);
    if i0 == 0 || n < i0 + 2 {
        return Err(Error::Construct(format!("need 1 ≤ i0 ≤ n−2 (n={n}, i0={i0})")));
    }
    if spec.nil_lattice.iter().any(|v| v.len() != i0) {
        return Err(Error::Construct("nil lattice vectors must lie in ℝ^i0".into()));
    }
    let mut gens = spec.gens.iter().map(|g| quasi_join_element(n, i0, g)).collect::<Result<Vec<_>>>()?;
    gens.extend(spec.nil_lattice.iter().map(|v| nil_element(n, i0, v)));
    let mut vertex = Vector::zeros(n + 1);
    vertex[n] = 1.0;
    RadialEnd::new(ProjPoint::new(vertex)?, gens, qj_samples(n, i0, 6), tol)
}

/// A block construction breaking the NPCC middle eigenvalue condition: the
/// fiber block and the vertex carry eigenvalue e, everything outside is smaller.
pub fn violating_quasi_join(n: usize, i0: usize, tol: &Tol) -> Result<RadialEnd> {
    let m = n - i0 - 1;
    let big = 1.0f64.exp();
    // det = small^{m+1}·big^{i0+1} = 1.
    let small = big.powf(-((i0 + 1) as f64) / (m + 1) as f64);
    let s = Matrix::identity(m, m) * small;
    let zero = Vector::zeros(i0);
    let g = qj_matrix(n, i0, &s, small, &zero, &(Matrix::identity(i0, i0) * big), 0.0, &zero, big);
    let mut gens = vec![ProjMap::new(g)?];
    gens.extend((0..i0).map(|i| nil_element(n, i0, &Vector::from_fn(i0, |j, _| if i == j { 1.0 } else { 0.0 }))));
    let mut vertex = Vector::zeros(n + 1);
    vertex[n] = 1.0;
    RadialEnd::new(ProjPoint::new(vertex)?, gens, qj_samples(n, i0, 6), tol)
}

/// Complete-affine end that is not a cusp: vertex eₙ₊₁, a two-norm element
/// g (a on eₙ₊₁, b elsewhere, a·bⁿ = 1, with a shear t·b into e₁) and the
/// partial parabolics N(v), v ∈ ℝ^{n−2}. The other end point of the
/// invariant segment is e₁.
pub fn complete_affine_two_norm(n: usize, beta: f64, t: f64, tol: &Tol) -> Result<RadialEnd> {
    if n < 3 {
        return Err(Error::Construct("need n ≥ 3".into()));
    }
    let i0 = n - 2;
    let b = beta.exp();
    let a = (-(n as f64) * beta).exp();
    let zero = Vector::zeros(i0);
    let g = qj_matrix(n, i0, &Matrix::from_element(1, 1, a), b, &zero, &(Matrix::identity(i0, i0) * b), t * b, &zero, b);
    let mut mats = vec![g];
    mats.extend((0..i0).map(|i| nil_element(n, i0, &Vector::from_fn(i0, |j, _| if i == j { 1.0 } else { 0.0 })).matrix().clone()));
    // Built with the vertex at e₁; swap e₁ and eₙ₊₁ so the vertex is eₙ₊₁.
    let mut swap = Matrix::identity(n + 1, n + 1);
    swap.swap_rows(0, n);
    let gens = mats.iter().map(|m| ProjMap::new(&swap * m * &swap)).collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let samples = (0..6)
        .map(|_| {
            let mut x = Vector::zeros(n + 1);
            x[n] = 1.0 + 0.5 * rng.random::<f64>();
            x[1] = 1.0;
            for r in 2..n {
                x[r] = 0.2 * rng.random::<f64>() - 0.1;
            }
            x[0] = 0.5 + 0.2 * rng.random::<f64>();
            ProjPoint::new(x)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut vertex = Vector::zeros(n + 1);
    vertex[n] = 1.0;
    RadialEnd::new(ProjPoint::new(vertex)?, gens, samples, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BendKind {
    /// k_b: identity with b at row 4, column 3.
    Shear(f64),
    /// k_s = diag(s, s, s, s⁻³).
    Scale(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BendMode {
    /// gᵢ ↦ k·gᵢ·k⁻¹ (a separating curve).
    Conjugate,
    /// gᵢ ↦ k·gᵢ (the stable letter of a non-separating curve).
    StableLetter,
}

#[derive(Debug, Clone)]
pub struct BendSpec {
    /// Klein eigenvalue of g_c = diag(λ, λ⁻¹, 1, 1), λ > 1.
    pub lambda: f64,
    pub kind: BendKind,
    pub partition: Vec<usize>,
    pub mode: BendMode,
}

pub fn g_c(lambda: f64) -> ProjMap {
    ProjMap::from_diag(&[lambda, 1.0 / lambda, 1.0, 1.0]).expect("nonsingular")
}

pub fn bend_matrix(kind: BendKind) -> Result<ProjMap> {
    match kind {
        BendKind::Shear(b) => {
            let mut m = Matrix::identity(4, 4);
            m[(3, 2)] = b;
            ProjMap::new(m)
        }
        BendKind::Scale(s) => {
            if !(s > 0.0) {
                return Err(Error::Construct("s must be positive".into()));
            }
            ProjMap::from_diag(&[s, s, s, 1.0 / (s * s * s)])
        }
    }
}

/// Returns the bending element and the bent end.
pub fn bending(spec: &BendSpec, end: &RadialEnd, tol: &Tol) -> Result<(ProjMap, RadialEnd)> {
    if !(spec.lambda > 1.0) {
        return Err(Error::Construct("lambda must exceed 1".into()));
    }
    let gc = g_c(spec.lambda);
    if end.gens.iter().all(|g| g.size() != 4 || g.distance(&gc) > 1e-9) {
        return Err(Error::Precondition("g_c = diag(λ, 1/λ, 1, 1) is not among the generators".into()));
    }
    if let Some(&i) = spec.partition.iter().find(|&&i| i >= end.gens.len()) {
        return Err(Error::Precondition(format!("partition index {i} out of range")));
    }
    let k = bend_matrix(spec.kind)?;
    let identity = match spec.kind {
        BendKind::Shear(b) => b == 0.0,
        BendKind::Scale(s) => s == 1.0,
    };
    if identity {
        return Ok((k, end.clone()));
    }
    let kinv = k.inverse();
    let gens = end
        .gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            if !spec.partition.contains(&i) {
                g.clone()
            } else {
                match spec.mode {
                    BendMode::Conjugate => k.compose(g).compose(&kinv),
                    BendMode::StableLetter => k.compose(g),
                }
            }
        })
        .collect();
    Ok((k, RadialEnd::new(end.vertex.clone(), gens, end.samples.clone(), tol)?))
}

/// Hyperbolic boost by `tau` along y₂ in coordinates (u, w, y₂, vertex),
/// u = y₀+y₁, w = y₀−y₁, preserving uw − y₂².
pub fn boost_y2(tau: f64) -> ProjMap {
    let (c, s) = (tau.cosh(), tau.sinh());
    ProjMap::from_rows(
        4,
        &[
            (c + 1.0) / 2.0,
            (c - 1.0) / 2.0,
            s,
            0.0,
            (c - 1.0) / 2.0,
            (c + 1.0) / 2.0,
            s,
            0.0,
            s / 2.0,
            s / 2.0,
            c,
            0.0,
            0.0,
            0.0,
            0.0,
            1.0,
        ],
    )
    .expect("nonsingular")
}

/// Totally geodesic end over a Schottky group of the hyperbolic plane:
/// g_c = diag(λ, 1/λ, 1, 1) and a boost with Klein eigenvalue μ along the
/// perpendicular axis; vertex e₄.
pub fn hyperideal_end(lambda: f64, mu: f64, tol: &Tol) -> Result<RadialEnd> {
    let gens = vec![g_c(lambda), boost_y2(mu.ln())];
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let samples = (0..6)
        .map(|_| {
            let (r, th) = (0.5 * rng.random::<f64>(), std::f64::consts::TAU * rng.random::<f64>());
            let (y1, y2) = (r * th.cos(), r * th.sin());
            ProjPoint::from_slice(&[1.0 + y1, 1.0 - y1, y2, 0.2 + 0.1 * rng.random::<f64>()])
        })
        .collect::<Result<Vec<_>>>()?;
    RadialEnd::new(ProjPoint::from_slice(&[0., 0., 0., 1.])?, gens, samples, tol)
}

/// Diagonal end with vertex eigenvalue 1 and link group ℤ² acting on a triangle.
pub fn diagonal_end(tol: &Tol) -> Result<RadialEnd> {
    let gens = vec![ProjMap::from_diag(&[2.0, 1.0, 0.5, 1.0])?, ProjMap::from_diag(&[1.0, 2.0, 0.5, 1.0])?];
    let samples = vec![
        ProjPoint::from_slice(&[1.0, 1.0, 1.0, 0.5])?,
        ProjPoint::from_slice(&[1.0, 0.5, 2.0, 0.3])?,
        ProjPoint::from_slice(&[0.5, 1.0, 1.5, 0.7])?,
    ];
    RadialEnd::new(ProjPoint::from_slice(&[0., 0., 0., 1.])?, gens, samples, tol)
}

/// Replace each sample by its image under a word of length ≤ 2 drawn with
/// the given seed. The end neighborhood is invariant, so the images are
/// samples of the same end; seed 0 keeps the samples as built.
pub fn reseed_samples(end: &RadialEnd, seed: u64, tol: &Tol) -> Result<RadialEnd> {
    if seed == 0 {
        return Ok(end.clone());
    }
    let words: Vec<ProjMap> = enumerate_words(&end.gens, 2).map(|w| w.matrix).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = end
        .samples
        .iter()
        .map(|s| words[rng.random_range(0..words.len())].act(s, false))
        .collect::<Result<Vec<_>>>()?;
    RadialEnd::new(end.vertex.clone(), end.gens.clone(), samples, tol)
}
