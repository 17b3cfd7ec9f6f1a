//! Radial ends: link domains, the CA/PC/NPCC trichotomy, fiber data,
//! middle eigenvalue conditions, horospheres, the complete-affine
//! dichotomy, re-vertexing and quasi-join invariants.
//!
//! Everything is evaluated on a finite word ball and reported as bounded
//! evidence.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constructors::nil_element;
use crate::convex::ConeBody;
use crate::projcore::{link_basis, Matrix, ProjMap, ProjPoint, Subspace, Vector};
use crate::spectra::{
    clustered_eigenvalues, real_kernel, eigenvalue_at, enumerate_words, invariant_subspaces, rel_spectrum, spectrum,
    translation_length_estimate, Spectrum, Word,
};
use crate::{Error, Result, Tol};

/// Default search bound for the uniform middle eigenvalue constant.
pub const C_SEARCH: f64 = 1e3;
/// Largest word radius used for orbit hulls and translation-length fits.
pub const HULL_RADIUS: usize = 3;
/// Default word-ball radius.
pub const DEFAULT_BALL: usize = 6;
/// Random word pairs for the α₇ additivity check.
pub const ALPHA7_PAIRS: usize = 500;

#[derive(Debug, Clone)]
pub struct RadialEnd {
    pub vertex: ProjPoint,
    pub gens: Vec<ProjMap>,
    /// Points of the end neighborhood; may be empty.
    pub samples: Vec<ProjPoint>,
}

impl RadialEnd {
    pub fn new(vertex: ProjPoint, gens: Vec<ProjMap>, samples: Vec<ProjPoint>, tol: &Tol) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        let d = vertex.ambient();
        for g in &gens {
            if g.size() != d {
                return Err(Error::Dimension { expected: d, got: g.size() });
            }
        }
        for s in &samples {
            if s.ambient() != d {
                return Err(Error::Dimension { expected: d, got: s.ambient() });
            }
        }
        for (i, g) in gens.iter().enumerate() {
            let (_, r) = eigenvalue_at(g.matrix(), &vertex);
            if r > tol.subspace {
                return Err(Error::Precondition(format!("generator g{i} does not fix the vertex (residual {r:e})")));
            }
        }
        Ok(RadialEnd { vertex, gens, samples })
    }

    /// n, the dimension of the projective sphere.
    pub fn n(&self) -> usize {
        self.vertex.ambient() - 1
    }
}

fn is_identity(m: &Matrix) -> bool {
    (m - Matrix::identity(m.nrows(), m.ncols())).amax() <= 1e-12
}

fn push_unique(list: &mut Vec<Vector>, v: Vector, eps: f64) {
    if !list.iter().any(|u| (u - &v).amax() <= eps) {
        list.push(v);
    }
}

fn normalized(m: &Matrix) -> Option<Matrix> {
    let n = m.norm();
    (n.is_finite() && n > 0.0).then(|| m / n)
}

/// Limit of the normalized powers g^N/‖g^N‖ along N = 2^k, when it exists.
///
/// Read off the top generalized eigenspace E: with Π the projection onto E
/// along the other generalized eigenspaces and N = (g − λ)Π, the limit is the
/// highest nonzero power of N composed with Π. Squaring directly loses all
/// precision for parabolics, whose limits are nilpotent.
pub fn attracting_limit(m: &Matrix) -> Option<Matrix> {
    let n = m.nrows();
    let eigs = clustered_eigenvalues(m).ok()?;
    let top = eigs.first()?;
    let mu = top.value.norm();
    if top.value.im != 0.0 || mu == 0.0 {
        return None;
    }
    if eigs[1..].iter().any(|e| (e.value.norm() - mu).abs() <= 1e-7 * mu) {
        return None;
    }
    let lam = top.value.re;
    let k = top.multiplicity;
    let e = real_kernel(m, &eigs[..1], k);
    let f = real_kernel(m, &eigs[1..], n - k);
    let mut both = Matrix::zeros(n, n);
    both.view_mut((0, 0), (n, k)).copy_from(e.basis());
    both.view_mut((0, k), (n, n - k)).copy_from(f.basis());
    let inv = both.try_inverse()?;
    let proj = e.basis() * inv.rows(0, k);
    let nil = (m - Matrix::identity(n, n) * lam) * &proj;
    let scale = m.norm().max(1.0);
    let mut lim = proj.clone();
    for _ in 1..k {
        let next = &nil * &lim;
        if next.norm() <= 1e-6 * scale * lim.norm() {
            break;
        }
        lim = next * lam.signum();
    }
    normalized(&lim)
}

fn limit_points(maps: &[Matrix], dirs: &[Vector]) -> Vec<Vector> {
    let mut out = Vec::new();
    for m in maps {
        let Some(p) = attracting_limit(m) else { continue };
        for s in dirs {
            let y = &p * s;
            if y.norm() < 1e-6 {
                continue;
            }
            let y = y.normalize();
            let z = m * &y;
            push_unique(&mut out, y, 1e-9);
            if z.norm() > 0.0 {
                push_unique(&mut out, z.normalize(), 1e-9);
            }
        }
    }
    out
}

/// One representative of every antipodal pair.
fn antipodal_directions(points: &[Vector]) -> Vec<Vector> {
    let mut out = Vec::new();
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].iter().any(|b| (a + b).norm() < 1e-8) {
            out.push(a.clone());
        }
    }
    out
}

/// The linking sphere of an end: induced maps and the orbit hull of the
/// radially projected samples.
#[derive(Debug, Clone)]
pub struct LinkDomain {
    /// Orthonormal basis of vertex^⊥ (columns); link coordinates.
    pub basis: Matrix,
    pub gens: Vec<ProjMap>,
    /// Radial directions of the samples.
    pub directions: Vec<Vector>,
    /// Span of the antipodal limit directions.
    pub lineality: Subspace,
    pub hull: ConeBody,
    pub radius: usize,
    pub rounds: usize,
    pub powers_added: bool,
}

fn assemble_hull(lin: &Subspace, points: &[Vector], tol: &Tol) -> Result<ConeBody> {
    let comp = lin.complement();
    let mut pts: Vec<Vector> = Vec::new();
    for v in lin.basis_vectors() {
        pts.push(-&v);
        pts.push(v);
    }
    for p in points {
        let y = comp.project(p);
        if y.norm() > 1e-9 {
            push_unique(&mut pts, y.normalize(), 1e-9);
        }
    }
    ConeBody::polyhedral(pts, tol)
}

/// Orbit hull of the radial directions of the samples under words of length
/// ≤ min(L, 3), together with limit points of the group and the lineality
/// found by projecting away antipodal limit pairs until none remain.
pub fn link_domain(end: &RadialEnd, max_len: usize, tol: &Tol) -> Result<LinkDomain> {
    if end.samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let n = end.n();
    let b = link_basis(&end.vertex);
    let gens: Vec<ProjMap> =
        end.gens.iter().map(|g| ProjMap::new(b.transpose() * g.matrix() * &b)).collect::<Result<_>>()?;
    let mut dirs = Vec::with_capacity(end.samples.len());
    for s in &end.samples {
        let y = b.transpose() * s.coords();
        if y.norm() <= 1e-12 {
            return Err(Error::UndefinedDirection);
        }
        dirs.push(y.normalize());
    }
    let radius = max_len.clamp(1, HULL_RADIUS);
    let word_maps: Vec<Matrix> = enumerate_words(&gens, radius).map(|w| w.matrix.matrix().clone()).collect();
    let mut orbit: Vec<Vector> = Vec::new();
    for m in &word_maps {
        for s in &dirs {
            push_unique(&mut orbit, (m * s).normalize(), 1e-9);
        }
    }

    let mut lin = Subspace::zero(n);
    let mut limits: Vec<Vector> = Vec::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let comp = lin.complement();
        if comp.dim() == 0 {
            break;
        }
        let cb = comp.basis();
        let qmaps: Vec<Matrix> = word_maps.iter().map(|m| cb.transpose() * m * cb).collect();
        let qdirs: Vec<Vector> = dirs
            .iter()
            .filter_map(|p| {
                let y = cb.transpose() * p;
                (y.norm() > 1e-9).then(|| y.normalize())
            })
            .collect();
        let lim = limit_points(&qmaps, &qdirs);
        limits.extend(lim.iter().map(|q| cb * q));
        let anti = antipodal_directions(&lim);
        if anti.is_empty() {
            break;
        }
        let new_dirs: Vec<Vector> = anti.iter().map(|a| cb * a).collect();
        let grown = lin.sum(&Subspace::span(&new_dirs, n, tol.subspace), tol.subspace);
        if grown.dim() == lin.dim() || gens.iter().any(|g| grown.invariance_residual(g.matrix()) > tol.subspace) {
            break;
        }
        lin = grown;
    }

    let mut all: Vec<Vector> = orbit.clone();
    all.extend(limits.iter().cloned());
    let mut hull = assemble_hull(&lin, &all, tol)?;
    let mut powers_added = false;
    if hull.span().dim() < n {
        powers_added = true;
        for g in &gens {
            for h in [g.clone(), g.inverse()] {
                let mut p = Matrix::identity(n, n);
                for _ in 0..4 * max_len.max(1) {
                    p = normalized(&(h.matrix() * &p)).expect("nonsingular");
                    for s in &dirs {
                        let y = &p * s;
                        if y.norm() > 0.0 {
                            push_unique(&mut all, y.normalize(), 1e-9);
                        }
                    }
                }
            }
        }
        hull = assemble_hull(&lin, &all, tol)?;
    }
    Ok(LinkDomain { basis: b, gens, directions: dirs, lineality: lin, hull, radius, rounds, powers_added })
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinkClass {
    CompleteAffine,
    ProperlyConvex,
    Npcc,
    Indeterminate(String),
}

impl LinkClass {
    pub fn label(&self) -> &'static str {
        match self {
            LinkClass::CompleteAffine => "CA",
            LinkClass::ProperlyConvex => "PC",
            LinkClass::Npcc => "NPCC",
            LinkClass::Indeterminate(_) => "indeterminate",
        }
    }
}

/// Trichotomy of a link hull in ℝⁿ from its dimension and lineality.
pub fn classify_link(sigma: &ConeBody) -> LinkClass {
    let n = sigma.ambient();
    let span = sigma.span().dim();
    if span < n {
        return LinkClass::Indeterminate(format!("hull spans dimension {span} < {n}"));
    }
    let l = sigma.lineality().dim();
    if l == 0 {
        if sigma.is_properly_convex() {
            LinkClass::ProperlyConvex
        } else {
            LinkClass::Indeterminate("no lineality but not properly convex".into())
        }
    } else if l + 1 == n {
        LinkClass::CompleteAffine
    } else if l < n {
        LinkClass::Npcc
    } else {
        LinkClass::Indeterminate("hull is the whole sphere".into())
    }
}

#[derive(Debug, Clone)]
pub struct FiberData {
    pub i0: usize,
    /// The great sphere at infinity of the fibers, in link coordinates.
    pub s_inf: Subspace,
    /// Leaf space body, in the coordinates of `leaf_frame`.
    pub k: ConeBody,
    /// Columns: orthonormal frame in ℝ^{n+1} of the leaf space coordinates.
    pub leaf_frame: Matrix,
    pub nk_gens: Vec<ProjMap>,
    /// Words of length ≤ L acting as a positive scalar on the leaf space.
    pub n_words: Vec<Word>,
    /// span(S_inf lift, vertex) in ℝ^{n+1}.
    pub v_inf: Subspace,
}

pub fn fiber_data(end: &RadialEnd, link: &LinkDomain, max_len: usize, tol: &Tol) -> Result<FiberData> {
    let class = classify_link(&link.hull);
    if class != LinkClass::Npcc {
        return Err(Error::Precondition(format!("fiber data needs an NPCC link, found {}", class.label())));
    }
    let s_inf = link.hull.lineality().clone();
    if link.gens.iter().any(|g| s_inf.invariance_residual(g.matrix()) > tol.subspace) {
        return Err(Error::NpccNotDetected);
    }
    let comp = s_inf.complement();
    let cb = comp.basis();
    let local: Vec<Vector> = link
        .hull
        .generators()
        .iter()
        .filter_map(|g| {
            let y = cb.transpose() * g;
            (y.norm() > 1e-9).then_some(y)
        })
        .collect();
    if local.is_empty() {
        return Err(Error::NpccNotDetected);
    }
    let k = ConeBody::polyhedral(local, tol)?;
    if !k.is_properly_convex() {
        return Err(Error::NpccNotDetected);
    }
    let leaf_frame = &link.basis * cb;
    let nk_gens = end
        .gens
        .iter()
        .map(|g| ProjMap::new(leaf_frame.transpose() * g.matrix() * &leaf_frame))
        .collect::<Result<Vec<_>>>()?;
    let dim_k = leaf_frame.ncols();
    let n_words = enumerate_words(&end.gens, max_len)
        .filter(|w| {
            let m = leaf_frame.transpose() * w.matrix.matrix() * &leaf_frame;
            let c = m.trace() / dim_k as f64;
            c > 0.0 && (&m - Matrix::identity(dim_k, dim_k) * c).amax() <= 1e-9 * c
        })
        .collect();
    let mut vs: Vec<Vector> = s_inf.basis_vectors().iter().map(|v| &link.basis * v).collect();
    vs.push(end.vertex.coords().clone());
    let v_inf = Subspace::span(&vs, end.n() + 1, tol.subspace);
    Ok(FiberData { i0: s_inf.dim(), s_inf, k, leaf_frame, nk_gens, n_words, v_inf })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MecVariant {
    Middle,
    Weak,
    Uniform,
    WeakUniform,
    WeakNpcc,
}

impl MecVariant {
    pub const ALL: [MecVariant; 5] =
        [MecVariant::Middle, MecVariant::Weak, MecVariant::Uniform, MecVariant::WeakUniform, MecVariant::WeakNpcc];

    pub fn name(&self) -> &'static str {
        match self {
            MecVariant::Middle => "middle",
            MecVariant::Weak => "weak",
            MecVariant::Uniform => "uniform",
            MecVariant::WeakUniform => "weak_uniform",
            MecVariant::WeakNpcc => "weak_npcc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MecFlag {
    pub variant: MecVariant,
    pub verdict: Verdict,
    /// The failing word, or the extremal word of a pass.
    pub witness: Option<String>,
    /// Fitted constant of the uniform variants.
    pub constant: Option<f64>,
    pub radius: usize,
    pub detail: String,
}

/// Optional link and fiber data for the variants that need a body.
#[derive(Debug, Clone, Copy, Default)]
pub struct MecContext<'a> {
    pub link: Option<&'a LinkDomain>,
    pub fiber: Option<&'a FiberData>,
}

struct WordSpectrum {
    word: Word,
    sp: Spectrum,
    lam_v: f64,
}

/// Spectra of the nonidentity words of the ball, in shortlex order.
fn word_spectra(end: &RadialEnd, max_len: usize, tol: &Tol) -> Result<Vec<WordSpectrum>> {
    let words: Vec<Word> = enumerate_words(&end.gens, max_len).filter(|w| !is_identity(w.matrix.matrix())).collect();
    words
        .into_par_iter()
        .map(|w| {
            let sp = spectrum(&w.matrix, tol)?;
            let lam_v = eigenvalue_at(w.matrix.matrix(), &end.vertex).0.abs();
            Ok(WordSpectrum { word: w, sp, lam_v })
        })
        .collect()
}

fn ge_rel(a: f64, b: f64, rel: f64) -> bool {
    a >= b * (1.0 - rel)
}

fn flag(variant: MecVariant, verdict: Verdict, witness: Option<String>, radius: usize, detail: String) -> MecFlag {
    MecFlag { variant, verdict, witness, constant: None, radius, detail }
}

pub fn check_mec(
    end: &RadialEnd,
    variant: MecVariant,
    max_len: usize,
    c_search: f64,
    ctx: &MecContext,
    tol: &Tol,
) -> Result<MecFlag> {
    if max_len == 0 {
        return Err(Error::Precondition("ball radius must be at least 1".into()));
    }
    match variant {
        MecVariant::Middle => middle(end, max_len, tol),
        MecVariant::Weak => weak(end, max_len, tol),
        MecVariant::Uniform => uniform(end, max_len, c_search, ctx, false, tol),
        MecVariant::WeakUniform => {
            let w = weak(end, max_len, tol)?;
            if w.verdict != Verdict::Pass {
                return Ok(MecFlag { variant, ..w });
            }
            uniform(end, max_len, c_search, ctx, true, tol)
        }
        MecVariant::WeakNpcc => weak_npcc(end, max_len, ctx, tol),
    }
}

fn middle(end: &RadialEnd, max_len: usize, tol: &Tol) -> Result<MecFlag> {
    let v = MecVariant::Middle;
    let mut best: Option<(f64, String)> = None;
    let mut unsure: Option<String> = None;
    for ws in word_spectra(end, max_len, tol)? {
        let lb = ws.sp.max_norm();
        if lb <= ws.lam_v * (1.0 + tol.mec_slack) {
            let detail = format!("λ₁ = {lb:.9e} ≤ λ_v = {:.9e}", ws.lam_v);
            return Ok(flag(v, Verdict::Fail, Some(ws.word.label()), max_len, detail));
        }
        let ratio = lb / ws.lam_v;
        if ratio - 1.0 < tol.gap_indeterminate && unsure.is_none() {
            unsure = Some(ws.word.label());
        }
        if best.as_ref().is_none_or(|b| ratio < b.0) {
            best = Some((ratio, ws.word.label()));
        }
    }
    Ok(match (best, unsure) {
        (None, _) => flag(v, Verdict::Indeterminate, None, max_len, "no nontrivial words".into()),
        (Some(_), Some(w)) => flag(v, Verdict::Indeterminate, Some(w), max_len, "λ₁/λ_v inside the undecidable gap".into()),
        (Some((r, w)), None) => flag(v, Verdict::Pass, Some(w), max_len, format!("min λ₁/λ_v = {r:.9e}")),
    })
}

fn weak(end: &RadialEnd, max_len: usize, tol: &Tol) -> Result<MecFlag> {
    let v = MecVariant::Weak;
    for ws in word_spectra(end, max_len, tol)? {
        let top = &ws.sp.classes[0];
        if ge_rel(ws.lam_v, top.mu, tol.norm_class) && top.multiplicity < 2 {
            let detail = format!("λ_v = {:.9e} is maximal with multiplicity 1", ws.lam_v);
            return Ok(flag(v, Verdict::Fail, Some(ws.word.label()), max_len, detail));
        }
    }
    Ok(flag(v, Verdict::Pass, None, max_len, "maximal λ_v always has multiplicity ≥ 2".into()))
}

fn uniform(
    end: &RadialEnd,
    max_len: usize,
    c_search: f64,
    ctx: &MecContext,
    weak_only: bool,
    tol: &Tol,
) -> Result<MecFlag> {
    let variant = if weak_only { MecVariant::WeakUniform } else { MecVariant::Uniform };
    let (body, frame) = match (ctx.link, ctx.fiber) {
        (Some(l), _) if l.hull.is_properly_convex() => (&l.hull, &l.basis),
        (_, Some(f)) => (&f.k, &f.leaf_frame),
        _ => {
            return Err(Error::Precondition(
                "the uniform condition needs a properly convex link hull or leaf space".into(),
            ))
        }
    };
    let radius = max_len.min(HULL_RADIUS);
    let mut worst: Option<(f64, String)> = None;
    for ws in word_spectra(end, radius, tol)? {
        let lb = ws.sp.max_norm();
        if weak_only && lb <= ws.lam_v * (1.0 + tol.mec_slack) {
            continue;
        }
        let r = (lb / ws.lam_v).ln().max(0.0);
        let induced = ProjMap::new(frame.transpose() * ws.word.matrix.matrix() * frame)?;
        let ell = translation_length_estimate(body, &induced, tol)?.value;
        let c = if r < 1e-9 && ell < 1e-6 {
            continue;
        } else if r < 1e-9 || ell < 1e-6 || !ell.is_finite() {
            f64::INFINITY
        } else {
            (ell / r).max(r / ell)
        };
        if worst.as_ref().is_none_or(|w| c > w.0) {
            worst = Some((c, ws.word.label()));
        }
    }
    let Some((c, w)) = worst else {
        return Ok(flag(variant, Verdict::Indeterminate, None, radius, "no word with positive translation".into()));
    };
    let verdict = if c <= c_search { Verdict::Pass } else { Verdict::Fail };
    Ok(MecFlag {
        variant,
        verdict,
        witness: Some(w),
        constant: Some(c),
        radius,
        detail: format!("best constant {c:.6e} against search bound {c_search:e}"),
    })
}

fn weak_npcc(end: &RadialEnd, max_len: usize, ctx: &MecContext, tol: &Tol) -> Result<MecFlag> {
    let v = MecVariant::WeakNpcc;
    let fiber = ctx
        .fiber
        .ok_or_else(|| Error::Precondition("the NPCC condition needs fiber data".into()))?;
    for w in enumerate_words(&end.gens, max_len) {
        if is_identity(w.matrix.matrix()) {
            continue;
        }
        let rs = rel_spectrum(&w.matrix, &fiber.v_inf, &end.vertex, tol)?;
        let ok = ge_rel(rs.lambda_bar, rs.lambda1, tol.mec_slack) && ge_rel(rs.lambda1, rs.lambda_vertex, tol.mec_slack);
        if !ok {
            let detail = format!(
                "λ̄ = {:.9e}, λ₁ = {:.9e}, λ_v = {:.9e}",
                rs.lambda_bar, rs.lambda1, rs.lambda_vertex
            );
            return Ok(flag(v, Verdict::Fail, Some(w.label()), max_len, detail));
        }
    }
    Ok(flag(v, Verdict::Pass, None, max_len, "λ̄ ≥ λ₁ ≥ λ_v on the ball".into()))
}

/// First word of length ≤ L breaking λ₁ ≥ λ ≥ λ′ ≥ λₙ₊₁, where λ, λ′ are
/// the extreme norms on V_inf and λ₁, λₙ₊₁ those outside it.
pub fn eigsi_chain(end: &RadialEnd, fiber: &FiberData, max_len: usize, tol: &Tol) -> Result<Option<String>> {
    let rel = tol.mec_slack;
    for w in enumerate_words(&end.gens, max_len) {
        let rs = rel_spectrum(&w.matrix, &fiber.v_inf, &end.vertex, tol)?;
        let ok = ge_rel(rs.lambda1, rs.lambda_inf, rel)
            && ge_rel(rs.lambda_inf, rs.lambda_inf_prime, rel)
            && ge_rel(rs.lambda_inf_prime, rs.lambda_np1, rel);
        if !ok {
            return Ok(Some(w.label()));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone)]
pub struct StandardFormFit {
    /// An invariant form of signature (1, n).
    pub form: Matrix,
    /// max ‖gᵀQg − Q‖ / ‖Q‖ over generators.
    pub residual: f64,
    /// |Q(vertex)| / ‖Q‖; zero for a null vertex.
    pub vertex_value: f64,
}

#[derive(Debug, Clone)]
pub struct Horospherical {
    pub flag: bool,
    pub max_deviation: f64,
    pub worst_word: String,
    pub link_ca: bool,
    pub fit: Option<StandardFormFit>,
}

/// max | |λ| − 1 | over the eigenvalues of words of length ≤ L.
pub fn norm_deviation(end: &RadialEnd, max_len: usize) -> Result<(f64, String)> {
    let mut worst = (0.0, "e".to_string());
    for w in enumerate_words(&end.gens, max_len) {
        for e in clustered_eigenvalues(w.matrix.matrix())? {
            let d = (e.value.norm() - 1.0).abs();
            if d > worst.0 {
                worst = (d, w.label());
            }
        }
    }
    Ok(worst)
}

fn null_space(m: &Matrix, rel: f64) -> Vec<Vector> {
    let c = m.ncols();
    let mut sq = Matrix::zeros(m.nrows().max(c), c);
    sq.view_mut((0, 0), (m.nrows(), c)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let cut = rel * svd.singular_values.max().max(1.0);
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cut)
        .map(|i| vt.row(i).transpose())
        .collect()
}

/// A common invariant quadratic form of signature (1, n), if one exists.
pub fn invariant_form(gens: &[ProjMap], vertex: &ProjPoint) -> Option<StandardFormFit> {
    let d = gens.first()?.size();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let mut sys = Matrix::zeros(gens.len() * d * d, pairs.len());
    for (c, &(i, j)) in pairs.iter().enumerate() {
        let mut e = Matrix::zeros(d, d);
        e[(i, j)] = 1.0;
        e[(j, i)] = 1.0;
        for (k, g) in gens.iter().enumerate() {
            let img = g.matrix().transpose() * &e * g.matrix() - &e;
            for (r, x) in img.iter().enumerate() {
                sys[(k * d * d + r, c)] = *x;
            }
        }
    }
    let null = null_space(&sys, 1e-9);
    if null.is_empty() {
        return None;
    }
    let to_form = |x: &Vector| {
        let mut q = Matrix::zeros(d, d);
        for (c, &(i, j)) in pairs.iter().enumerate() {
            q[(i, j)] = x[c];
            q[(j, i)] = x[c];
        }
        q
    };
    let mut candidates: Vec<Vector> = null.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..16 {
        let mut x = Vector::zeros(pairs.len());
        for b in &null {
            x.axpy(rng.random::<f64>() * 2.0 - 1.0, b, 1.0);
        }
        candidates.push(x);
    }
    for x in candidates {
        let q = to_form(&x);
        let scale = q.amax();
        if scale == 0.0 {
            continue;
        }
        let ev = SymmetricEigen::new(q.clone()).eigenvalues;
        let pos = ev.iter().filter(|&&l| l > 1e-9 * scale).count();
        let neg = ev.iter().filter(|&&l| l < -1e-9 * scale).count();
        let q = if pos == 1 && neg == d - 1 {
            q
        } else if neg == 1 && pos == d - 1 {
            -q
        } else {
            continue;
        };
        let residual = gens
            .iter()
            .map(|g| (g.matrix().transpose() * &q * g.matrix() - &q).amax() / scale)
            .fold(0.0, f64::max);
        let vertex_value = vertex.coords().dot(&(&q * vertex.coords())).abs() / scale;
        return Some(StandardFormFit { form: q / scale, residual, vertex_value });
    }
    None
}

pub fn is_horospherical(end: &RadialEnd, max_len: usize, tol: &Tol) -> Result<Horospherical> {
    let class = match link_domain(end, max_len, tol) {
        Ok(l) => classify_link(&l.hull),
        Err(e) => LinkClass::Indeterminate(e.to_string()),
    };
    horospherical_with(end, max_len, &class, tol)
}

fn horospherical_with(end: &RadialEnd, max_len: usize, class: &LinkClass, tol: &Tol) -> Result<Horospherical> {
    let (max_deviation, worst_word) = norm_deviation(end, max_len)?;
    let link_ca = *class == LinkClass::CompleteAffine;
    let flag = max_deviation <= tol.horo && link_ca;
    let fit = if flag { invariant_form(&end.gens, &end.vertex) } else { None };
    Ok(Horospherical { flag, max_deviation, worst_word, link_ca, fit })
}

#[derive(Debug, Clone, PartialEq)]
pub enum CaOutcome {
    UnitNorms,
    TwoNorms,
    Violation { word: String, reason: String },
    Indeterminate { word: String },
}

impl CaOutcome {
    pub fn label(&self) -> String {
        match self {
            CaOutcome::UnitNorms => "unit-norms".into(),
            CaOutcome::TwoNorms => "two-norms".into(),
            CaOutcome::Violation { word, reason } => format!("violation at {word}: {reason}"),
            CaOutcome::Indeterminate { word } => format!("indeterminate at {word}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CaReport {
    pub outcome: CaOutcome,
    /// Per word: (norm, multiplicity) of each class, largest first.
    pub table: Vec<(String, Vec<(f64, usize)>)>,
}

/// The norm-class pattern of the complete-affine dichotomy, without the
/// link precondition.
pub fn ca_norm_table(end: &RadialEnd, max_len: usize, tol: &Tol) -> Result<CaReport> {
    let mut table = Vec::new();
    let mut all_unit = true;
    let mut outcome: Option<CaOutcome> = None;
    for w in enumerate_words(&end.gens, max_len) {
        let sp = spectrum(&w.matrix, tol)?;
        let label = w.label();
        table.push((label.clone(), sp.classes.iter().map(|c| (c.mu, c.multiplicity)).collect()));
        if outcome.is_some() {
            continue;
        }
        if sp.indeterminate {
            outcome = Some(CaOutcome::Indeterminate { word: label });
            continue;
        }
        let unit = sp.classes.len() == 1 && (sp.classes[0].mu - 1.0).abs() <= tol.horo;
        all_unit &= unit;
        match sp.classes.len() {
            1 => {}
            2 => {
                let lam_v = eigenvalue_at(w.matrix.matrix(), &end.vertex).0.abs();
                match sp.class_of(lam_v, tol.norm_class) {
                    Some(i) if sp.classes[i].multiplicity == 1 => {}
                    Some(i) => {
                        let reason = format!("vertex norm class has multiplicity {}", sp.classes[i].multiplicity);
                        outcome = Some(CaOutcome::Violation { word: label, reason });
                    }
                    None => {
                        outcome = Some(CaOutcome::Violation { word: label, reason: "vertex norm not in any class".into() });
                    }
                }
            }
            k => {
                outcome = Some(CaOutcome::Violation { word: label, reason: format!("{k} norm classes") });
            }
        }
    }
    let outcome = outcome.unwrap_or(if all_unit { CaOutcome::UnitNorms } else { CaOutcome::TwoNorms });
    Ok(CaReport { outcome, table })
}

pub fn ca_dichotomy(end: &RadialEnd, max_len: usize, tol: &Tol) -> Result<CaReport> {
    let class = classify_link(&link_domain(end, max_len, tol)?.hull);
    if class != LinkClass::CompleteAffine {
        return Err(Error::Precondition(format!("complete-affine link required, found {}", class.label())));
    }
    ca_norm_table(end, max_len, tol)
}

/// Moves the vertex of a two-norm complete-affine end to the common fixed
/// point inside the hyperspace spanned by the non-vertex norm classes.
pub fn revertex(end: &RadialEnd, max_len: usize, tol: &Tol) -> Result<RadialEnd> {
    let rep = ca_dichotomy(end, max_len, tol)?;
    if rep.outcome != CaOutcome::TwoNorms {
        return Err(Error::Precondition(format!("re-vertexing needs two norm classes, found {}", rep.outcome.label())));
    }
    let d = end.n() + 1;
    let mut a = Subspace::full(d);
    for g in &end.gens {
        let sp = spectrum(g, tol)?;
        if sp.classes.len() < 2 {
            continue;
        }
        let lam_v = eigenvalue_at(g.matrix(), &end.vertex).0.abs();
        let vi = sp.class_of(lam_v, tol.norm_class);
        for (i, c) in sp.classes.iter().enumerate() {
            if Some(i) != vi {
                a = a.intersect(&c.subspace, tol.subspace);
            }
        }
    }
    if a.dim() == 0 || a.dim() == d {
        return Err(Error::RevertexFailed(format!("invariant hyperspace has dimension {}", a.dim())));
    }
    let ab = a.basis().clone();
    let mut q = Matrix::identity(a.dim(), a.dim());
    for g in &end.gens {
        if a.invariance_residual(g.matrix()) > tol.revertex {
            return Err(Error::RevertexFailed("hyperspace is not invariant".into()));
        }
        let ga = ab.transpose() * g.matrix() * &ab;
        let scale = ga.amax().max(1.0);
        let mut next: Option<Matrix> = None;
        for e in clustered_eigenvalues(&ga)? {
            if e.value.im.abs() > tol.revertex * scale {
                continue;
            }
            let shifted = (&ga - Matrix::identity(ga.nrows(), ga.ncols()) * e.value.re) * &q;
            let ker = null_space(&shifted, tol.revertex);
            if !ker.is_empty() {
                next = Some(&q * Matrix::from_columns(&ker));
                break;
            }
        }
        q = next.ok_or_else(|| Error::RevertexFailed("no common fixed point".into()))?;
    }
    if q.ncols() != 1 {
        return Err(Error::RevertexFailed(format!("common fixed space has dimension {}", q.ncols())));
    }
    let mut qv = (&ab * q.column(0)).normalize();
    let mut mean = Vector::zeros(d);
    for s in &end.samples {
        mean += s.coords();
    }
    let side = mean.dot(&qv);
    let point = if side.abs() > 1e-12 {
        if side < 0.0 {
            qv = -qv;
        }
        ProjPoint::new(qv)?
    } else {
        ProjPoint::lift_rp(qv)?
    };
    for g in &end.gens {
        let (_, r) = eigenvalue_at(g.matrix(), &point);
        if r > tol.revertex {
            return Err(Error::RevertexFailed(format!("candidate is not fixed (residual {r:e})")));
        }
    }
    RadialEnd::new(point, end.gens.clone(), end.samples.clone(), tol)
}

/// Blocks of one element in the standard coordinates
/// (leaf-space block S, a₁, fiber, vertex).
#[derive(Debug, Clone)]
pub struct QuasiJoinElement {
    pub word: String,
    pub s: Matrix,
    /// Column of S rows in the a₁ column.
    pub s1: Vector,
    /// Row of a₁ in the S columns.
    pub s2: Vector,
    pub a1: f64,
    pub a4: Vector,
    pub a5_block: Matrix,
    pub a5: f64,
    pub a7: f64,
    pub a8: Vector,
    pub a9: f64,
    pub c1: Matrix,
    pub c2: Vector,
    pub o5: Matrix,
    pub v_g: Vector,
    pub mu_g: f64,
    pub m_g: Matrix,
    pub alpha7: f64,
    pub lambda_vertex: f64,
    pub lambda2: f64,
    /// α₇ / log(λ_v/λ₂) on G₊.
    pub mu7: Option<f64>,
    pub similarity_residual: f64,
    pub orthogonality_residual: f64,
    pub conjugation_residual: f64,
    /// Largest entry outside the split block pattern, relative to the largest entry.
    pub block_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuasiJoinVerdict {
    Joined,
    QuasiJoined { c: f64 },
    Neither { witness: String },
    Undetermined,
}

impl QuasiJoinVerdict {
    pub fn label(&self) -> String {
        match self {
            QuasiJoinVerdict::Joined => "joined".into(),
            QuasiJoinVerdict::QuasiJoined { c } => format!("quasi-joined (c = {c:.9e})"),
            QuasiJoinVerdict::Neither { witness } => format!("neither (α₇ < 0 at {witness})"),
            QuasiJoinVerdict::Undetermined => "undetermined".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuasiJoinDiagnostics {
    /// Columns: the standard basis (S, a₁, fiber, vertex).
    pub basis: Matrix,
    pub elements: Vec<QuasiJoinElement>,
    pub mu_identically_one: bool,
    pub max_similarity_residual: f64,
    pub max_orthogonality_residual: f64,
    pub max_conjugation_residual: f64,
    pub max_block_residual: f64,
    /// max |α₇(gh) − α₇(g) − α₇(h)| over sampled pairs.
    pub additivity_residual: f64,
    /// max |α₇(g²) − 2α₇(g)| over the ball.
    pub square_residual: f64,
    pub inf_mu7: f64,
    pub verdict: QuasiJoinVerdict,
}

/// Orthonormal frame of `sub` from the projected coordinate vectors, chosen
/// by largest residual and kept in index order.
fn canonical_frame(sub: &Subspace) -> Vec<Vector> {
    let p = sub.projector();
    let d = sub.ambient();
    let mut chosen: Vec<(usize, Vector)> = Vec::new();
    for _ in 0..sub.dim() {
        let mut best: Option<(usize, Vector, f64)> = None;
        for i in 0..d {
            if chosen.iter().any(|(j, _)| *j == i) {
                continue;
            }
            let mut w = p.column(i).into_owned();
            for _ in 0..2 {
                for (_, f) in &chosen {
                    let c = w.dot(f);
                    w.axpy(-c, f, 1.0);
                }
            }
            let r = w.norm();
            if best.as_ref().is_none_or(|b| r > b.2 + 1e-12) {
                best = Some((i, w, r));
            }
        }
        let (i, w, r) = best.expect("coordinate vector");
        chosen.push((i, w / r));
    }
    chosen.sort_by_key(|(i, _)| *i);
    chosen.into_iter().map(|(_, v)| v).collect()
}

/// Basis (S, a₁, fiber, vertex) of the standard coordinates of an NPCC end.
pub fn standard_basis(end: &RadialEnd, fiber: &FiberData, tol: &Tol) -> Result<Matrix> {
    let d = end.n() + 1;
    let i0 = fiber.i0;
    let m = d - i0 - 2;
    let b = link_basis(&end.vertex);
    let lift: Vec<Vector> = fiber.s_inf.basis_vectors().iter().map(|v| &b * v).collect();
    let fcols = canonical_frame(&Subspace::span(&lift, d, tol.subspace));
    let w = fiber.v_inf.complement();
    let pw = w.projector();
    let k = fiber.leaf_frame.ncols();
    let mut acc = Matrix::zeros(d, d);
    for word in &fiber.n_words {
        let g = word.matrix.matrix();
        let c = (fiber.leaf_frame.transpose() * g * &fiber.leaf_frame).trace() / k as f64;
        let diff = g / c - Matrix::identity(d, d);
        for r in 0..d {
            let y = &pw * diff.row(r).transpose();
            acc += &y * y.transpose();
        }
    }
    let eig = SymmetricEigen::new(acc);
    let top = (0..d).max_by(|&a, &c| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[c]).then(c.cmp(&a))).unwrap();
    if eig.eigenvalues[top] <= 1e-18 {
        return Err(Error::Precondition("no partial parabolic found to fix the a₁ direction".into()));
    }
    let mut u = eig.eigenvectors.column(top).into_owned();
    let mut mean = Vector::zeros(d);
    for s in &end.samples {
        mean += s.coords();
    }
    let side = mean.dot(&u);
    if side.abs() > 1e-12 {
        if side < 0.0 {
            u = -u;
        }
    } else {
        u = ProjPoint::lift_rp(u)?.into_coords();
    }
    let s_sub = Subspace::span(&[u.clone()], d, tol.subspace).complement().intersect(&w, tol.subspace);
    let scols = canonical_frame(&s_sub);
    if scols.len() != m || fcols.len() != i0 {
        return Err(Error::Singular);
    }
    let mut cols = scols;
    cols.push(u);
    cols.extend(fcols);
    cols.push(end.vertex.coords().clone());
    let p = Matrix::from_columns(&cols);
    if (p.transpose() * &p - Matrix::identity(d, d)).amax() > 1e-8 {
        return Err(Error::Singular);
    }
    Ok(p)
}

fn alpha7_of(gp: &Matrix, i0: usize) -> f64 {
    let d = gp.nrows();
    let (ia, f, iv) = (d - i0 - 2, d - i0 - 1, d - 1);
    let a1 = gp[(ia, ia)];
    let v = gp.view((f, ia), (i0, 1)) / a1;
    gp[(iv, ia)] / gp[(iv, iv)] - v.norm_squared() / 2.0
}

/// Split an element given in standard coordinates into its blocks.
pub fn decompose(word: &str, gp: &Matrix, i0: usize, lambda2: f64) -> QuasiJoinElement {
    let d = gp.nrows();
    let n = d - 1;
    let m = n - i0 - 1;
    let (ia, f, iv) = (m, m + 1, n);
    let s = gp.view((0, 0), (m, m)).into_owned();
    let s1 = gp.view((0, ia), (m, 1)).column(0).into_owned();
    let s2 = gp.view((ia, 0), (1, m)).transpose().column(0).into_owned();
    let a1 = gp[(ia, ia)];
    let a4 = gp.view((f, ia), (i0, 1)).column(0).into_owned();
    let a5_block = gp.view((f, f), (i0, i0)).into_owned();
    let a7 = gp[(iv, ia)];
    let a8 = gp.view((iv, f), (1, i0)).transpose().column(0).into_owned();
    let a9 = gp[(iv, iv)];
    let c1 = gp.view((f, 0), (i0, m)).into_owned();
    let c2 = gp.view((iv, 0), (1, m)).transpose().column(0).into_owned();

    let a5 = a5_block.clone().lu().determinant().abs().powf(1.0 / i0 as f64);
    let o5 = &a5_block / a5;
    let orthogonality_residual = (o5.transpose() * &o5 - Matrix::identity(i0, i0)).amax();
    let mu_g = a5 / a1;
    let m_g = o5.transpose() * mu_g;
    let v_g = &a4 / a1;
    let lambda_vertex = a9.abs();
    let alpha7 = a7 / a9 - v_g.norm_squared() / 2.0;
    let similarity_residual = (a5 * a5 - a1 * a9).abs() / (a1 * a9).abs();

    let mut off = 0.0f64;
    let mut mark = |r: usize, c: usize| off = off.max(gp[(r, c)].abs());
    for r in 0..d {
        for c in 0..d {
            let zero = match (r, c) {
                (r, c) if r < m => c >= m,
                (r, c) if r == ia => c != ia,
                (r, c) if r >= f && r < iv => c < ia || c == iv,
                _ => c < ia,
            };
            if zero {
                mark(r, c);
            }
        }
    }
    let block_residual = off / gp.amax();

    let mut conjugation_residual = 0.0f64;
    for j in 0..i0 {
        let e = Vector::from_fn(i0, |k, _| if k == j { 1.0 } else { 0.0 });
        let nv = nil_element(n, i0, &e);
        let vm = m_g.transpose() * &e;
        let nvm = nil_element(n, i0, &vm);
        let lhs = gp * nv.matrix();
        let rhs = nvm.matrix() * gp;
        let r = (&lhs - &rhs).amax() / (gp.amax() * nv.matrix().amax());
        conjugation_residual = conjugation_residual.max(r);
    }

    let mu7 = (lambda_vertex > lambda2 * (1.0 + 1e-9)).then(|| alpha7 / (lambda_vertex / lambda2).ln());
    QuasiJoinElement {
        word: word.to_string(),
        s,
        s1,
        s2,
        a1,
        a4,
        a5_block,
        a5,
        a7,
        a8,
        a9,
        c1,
        c2,
        o5,
        v_g,
        mu_g,
        m_g,
        alpha7,
        lambda_vertex,
        lambda2,
        mu7,
        similarity_residual,
        orthogonality_residual,
        conjugation_residual,
        block_residual,
    }
}

pub fn quasi_join_diagnostics(
    end: &RadialEnd,
    fiber: &FiberData,
    max_len: usize,
    tol: &Tol,
) -> Result<QuasiJoinDiagnostics> {
    let p = standard_basis(end, fiber, tol)?;
    let i0 = fiber.i0;
    let words: Vec<Word> = enumerate_words(&end.gens, max_len).collect();
    let mut elements = Vec::with_capacity(words.len());
    let mut std_mats = Vec::with_capacity(words.len());
    for w in &words {
        let gp = p.transpose() * w.matrix.matrix() * &p;
        let sp = spectrum(&w.matrix, tol)?;
        let lam_v = eigenvalue_at(w.matrix.matrix(), &end.vertex).0.abs();
        // The spectrum is computed on the normalized matrix; rescale λ₂ to gp.
        let lambda2 = sp.second_norm() * gp[(gp.nrows() - 1, gp.nrows() - 1)].abs() / lam_v;
        elements.push(decompose(&w.label(), &gp, i0, lambda2));
        std_mats.push(gp);
    }
    let max_of = |f: &dyn Fn(&QuasiJoinElement) -> f64| elements.iter().map(f).fold(0.0, f64::max);
    let max_similarity_residual = max_of(&|e| e.similarity_residual);
    let max_orthogonality_residual = max_of(&|e| e.orthogonality_residual);
    let max_conjugation_residual = max_of(&|e| e.conjugation_residual);
    let max_block_residual = max_of(&|e| e.block_residual);
    let mu_identically_one = elements.iter().all(|e| (e.mu_g - 1.0).abs() <= tol.alpha7);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut additivity_residual = 0.0f64;
    for _ in 0..ALPHA7_PAIRS {
        let i = rng.random_range(0..elements.len());
        let j = rng.random_range(0..elements.len());
        let prod = &std_mats[i] * &std_mats[j];
        let r = (alpha7_of(&prod, i0) - elements[i].alpha7 - elements[j].alpha7).abs();
        additivity_residual = additivity_residual.max(r);
    }
    let square_residual = std_mats
        .iter()
        .zip(&elements)
        .map(|(g, e)| (alpha7_of(&(g * g), i0) - 2.0 * e.alpha7).abs())
        .fold(0.0, f64::max);

    let g_plus: Vec<&QuasiJoinElement> = elements.iter().filter(|e| e.mu7.is_some()).collect();
    let inf_mu7 = g_plus.iter().filter_map(|e| e.mu7).fold(f64::INFINITY, f64::min);
    let verdict = if !mu_identically_one {
        QuasiJoinVerdict::Undetermined
    } else if let Some(e) = g_plus.iter().find(|e| e.alpha7 < -tol.alpha7) {
        QuasiJoinVerdict::Neither { witness: e.word.clone() }
    } else if elements.iter().all(|e| e.alpha7.abs() <= tol.alpha7) {
        QuasiJoinVerdict::Joined
    } else if !g_plus.is_empty() && inf_mu7 > 0.0 {
        QuasiJoinVerdict::QuasiJoined { c: inf_mu7 }
    } else {
        QuasiJoinVerdict::Undetermined
    };
    Ok(QuasiJoinDiagnostics {
        basis: p,
        elements,
        mu_identically_one,
        max_similarity_residual,
        max_orthogonality_residual,
        max_conjugation_residual,
        max_block_residual,
        additivity_residual,
        square_residual,
        inf_mu7,
        verdict,
    })
}

/// Translation of the vertex-fixing Jordan block along the great circle
/// through the vertex, for the positive translation condition.
#[derive(Debug, Clone)]
pub struct QuasiLensEvidence {
    pub jordan_at_vertex: bool,
    /// (word, v(g) / log(λ_v/λ₂)) over words with λ_v above the other classes.
    pub ratios: Vec<(String, f64)>,
    pub inf_ratio: f64,
    pub positive_translation: bool,
}

fn jordan_partner(g: &Matrix, vertex: &ProjPoint) -> Option<Vector> {
    let d = g.nrows();
    let (lam, _) = eigenvalue_at(g, vertex);
    let shifted = g - Matrix::identity(d, d) * lam;
    let target = vertex.coords() * lam;
    let svd = shifted.clone().svd(true, true);
    let w = svd.solve(&target, 1e-9 * shifted.amax().max(1.0)).ok()?;
    if (&shifted * &w - &target).norm() > 1e-8 * lam.abs().max(1.0) {
        return None;
    }
    let w = &w - vertex.coords() * w.dot(vertex.coords());
    (w.norm() > 1e-12).then(|| w.normalize())
}

pub fn quasi_lens_evidence(end: &RadialEnd, max_len: usize, tol: &Tol) -> Result<QuasiLensEvidence> {
    let partner = end.gens.iter().find_map(|g| jordan_partner(g.matrix(), &end.vertex));
    let Some(mut w) = partner else {
        return Ok(QuasiLensEvidence {
            jordan_at_vertex: false,
            ratios: vec![],
            inf_ratio: f64::NAN,
            positive_translation: false,
        });
    };
    let mut mean = Vector::zeros(w.len());
    for s in &end.samples {
        mean += s.coords();
    }
    if mean.dot(&w) < 0.0 {
        w = -w;
    }
    let v = end.vertex.coords();
    let plane = Subspace::span(&[w.clone(), v.clone()], w.len(), tol.subspace);
    let invariant = end.gens.iter().all(|g| plane.invariance_residual(g.matrix()) <= tol.subspace);
    let mut ratios = Vec::new();
    if invariant {
        for ws in word_spectra(end, max_len, tol)? {
            let gw = ws.word.matrix.matrix() * &w;
            let t = v.dot(&gw) / w.dot(&gw);
            let vi = ws.sp.class_of(ws.lam_v, tol.norm_class);
            let lam2 = ws
                .sp
                .classes
                .iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != vi)
                .map(|(_, c)| c.mu)
                .fold(0.0, f64::max);
            if lam2 > 0.0 && ws.lam_v > lam2 * (1.0 + tol.mec_slack) {
                ratios.push((ws.word.label(), t / (ws.lam_v / lam2).ln()));
            }
        }
    }
    let inf_ratio = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(QuasiLensEvidence {
        jordan_at_vertex: true,
        positive_translation: !ratios.is_empty() && inf_ratio > 0.0,
        ratios,
        inf_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeLabel {
    Cusp,
    Lens,
    GeneralizedLens,
    QuasiLens,
    QuasiJoin,
    Unlabeled,
}

impl ShapeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShapeLabel::Cusp => "cusp",
            ShapeLabel::Lens => "lens",
            ShapeLabel::GeneralizedLens => "generalized-lens",
            ShapeLabel::QuasiLens => "quasi-lens",
            ShapeLabel::QuasiJoin => "quasi-join",
            ShapeLabel::Unlabeled => "unlabeled",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Shape {
    pub label: ShapeLabel,
    /// The checked conditions the label is conditional on.
    pub conditions: String,
}

#[derive(Debug, Clone)]
pub struct EndReport {
    pub ball_length: usize,
    pub dimension: usize,
    pub trichotomy: LinkClass,
    pub link: Option<LinkDomain>,
    pub mec: Vec<MecFlag>,
    pub horospherical: Horospherical,
    pub ca: Option<CaOutcome>,
    pub fiber: Option<FiberData>,
    pub quasi_join: Option<QuasiJoinDiagnostics>,
    pub quasi_lens: Option<QuasiLensEvidence>,
    pub shape: Shape,
    pub assumptions: Vec<String>,
    pub diagnostics: Vec<(String, String)>,
}

impl EndReport {
    pub fn mec_flag(&self, v: MecVariant) -> Option<&MecFlag> {
        self.mec.iter().find(|f| f.variant == v)
    }

    fn passes(&self, v: MecVariant) -> bool {
        self.mec_flag(v).is_some_and(|f| f.verdict == Verdict::Pass)
    }
}

fn unlabeled(why: &str) -> Shape {
    Shape { label: ShapeLabel::Unlabeled, conditions: why.to_string() }
}

/// Runs the link computation, the trichotomy and the checks of its branch.
pub fn classify_end(end: &RadialEnd, max_len: usize, tol: &Tol) -> EndReport {
    let max_len = max_len.max(1);
    let mut diagnostics: Vec<(String, String)> = Vec::new();
    let mut assumptions = vec![
        "admissibility of the end fundamental group: assumed, not decidable from finitely many matrices".to_string(),
        format!("all group-wide conditions: checked on words of length ≤ {max_len} only"),
    ];
    let link = match link_domain(end, max_len, tol) {
        Ok(l) => Some(l),
        Err(e) => {
            diagnostics.push(("link.error".into(), e.to_string()));
            None
        }
    };
    let trichotomy = link
        .as_ref()
        .map_or_else(|| LinkClass::Indeterminate("no link domain".into()), |l| classify_link(&l.hull));
    if let Some(l) = &link {
        diagnostics.push(("link.radius".into(), l.radius.to_string()));
        diagnostics.push(("link.rounds".into(), l.rounds.to_string()));
        diagnostics.push(("link.hull_generators".into(), l.hull.generators().len().to_string()));
        diagnostics.push(("link.hull_span".into(), l.hull.span().dim().to_string()));
        diagnostics.push(("link.lineality".into(), l.hull.lineality().dim().to_string()));
        diagnostics.push(("link.powers_added".into(), l.powers_added.to_string()));
    }
    if let LinkClass::Indeterminate(why) = &trichotomy {
        diagnostics.push(("link.indeterminate".into(), why.clone()));
    }

    let fiber = match (&trichotomy, &link) {
        (LinkClass::Npcc, Some(l)) => match fiber_data(end, l, max_len, tol) {
            Ok(f) => Some(f),
            Err(e) => {
                diagnostics.push(("fiber.error".into(), e.to_string()));
                None
            }
        },
        _ => None,
    };

    let ctx = MecContext { link: link.as_ref(), fiber: fiber.as_ref() };
    let mut mec = Vec::new();
    for v in MecVariant::ALL {
        let applicable = match v {
            MecVariant::Uniform | MecVariant::WeakUniform => {
                link.as_ref().is_some_and(|l| l.hull.is_properly_convex()) || fiber.is_some()
            }
            MecVariant::WeakNpcc => fiber.is_some(),
            _ => true,
        };
        if !applicable {
            mec.push(flag(v, Verdict::Indeterminate, None, max_len, "no properly convex body for this variant".into()));
            continue;
        }
        match check_mec(end, v, max_len, C_SEARCH, &ctx, tol) {
            Ok(f) => mec.push(f),
            Err(e) => mec.push(flag(v, Verdict::Indeterminate, None, max_len, e.to_string())),
        }
    }

    let horospherical = horospherical_with(end, max_len, &trichotomy, tol).unwrap_or_else(|e| {
        diagnostics.push(("horospherical.error".into(), e.to_string()));
        Horospherical { flag: false, max_deviation: f64::NAN, worst_word: String::new(), link_ca: false, fit: None }
    });
    diagnostics.push(("horospherical.max_deviation".into(), format!("{:.9e}", horospherical.max_deviation)));
    if let Some(fit) = &horospherical.fit {
        diagnostics.push(("standard_form.residual".into(), format!("{:.3e}", fit.residual)));
        diagnostics.push(("standard_form.vertex_value".into(), format!("{:.3e}", fit.vertex_value)));
    }

    let ca = match trichotomy {
        LinkClass::CompleteAffine => match ca_norm_table(end, max_len, tol) {
            Ok(r) => Some(r.outcome),
            Err(e) => {
                diagnostics.push(("ca.error".into(), e.to_string()));
                None
            }
        },
        _ => None,
    };

    let quasi_join = fiber.as_ref().and_then(|f| match quasi_join_diagnostics(end, f, max_len, tol) {
        Ok(q) => Some(q),
        Err(e) => {
            diagnostics.push(("quasi_join.error".into(), e.to_string()));
            None
        }
    });
    if let Some(q) = &quasi_join {
        diagnostics.push(("quasi_join.similarity_residual".into(), format!("{:.3e}", q.max_similarity_residual)));
        diagnostics.push(("quasi_join.conjugation_residual".into(), format!("{:.3e}", q.max_conjugation_residual)));
        diagnostics.push(("quasi_join.block_residual".into(), format!("{:.3e}", q.max_block_residual)));
        diagnostics.push(("quasi_join.additivity_residual".into(), format!("{:.3e}", q.additivity_residual)));
    }

    let quasi_lens = match trichotomy {
        LinkClass::ProperlyConvex => quasi_lens_evidence(end, max_len, tol).ok(),
        _ => None,
    };

    let irreducible = link.as_ref().and_then(|l| invariant_subspaces(&l.gens, tol).ok());
    if let Some(r) = &irreducible {
        let n = link.as_ref().map_or(0, |l| l.basis.ncols());
        assumptions.push(format!(
            "strong irreducibility of the link group: assumed, heuristic evidence: {} invariant subspaces found, algebra dimension {} of {}",
            r.subspaces.len(),
            r.algebra_dim,
            n * n
        ));
    }
    if let Some(f) = &fiber {
        assumptions.push(format!(
            "Zariski density of the virtual center: assumed, heuristic evidence: {} words act trivially on the leaf space",
            f.n_words.len()
        ));
    }

    let mut report = EndReport {
        ball_length: max_len,
        dimension: end.n(),
        trichotomy,
        link,
        mec,
        horospherical,
        ca,
        fiber,
        quasi_join,
        quasi_lens,
        shape: unlabeled(""),
        assumptions,
        diagnostics,
    };
    report.shape = shape_of(&report, irreducible.as_ref().map(|r| r.subspaces.is_empty()));
    report
}

fn shape_of(r: &EndReport, irreducible: Option<bool>) -> Shape {
    match r.trichotomy {
        LinkClass::CompleteAffine => {
            if r.ca == Some(CaOutcome::UnitNorms) && r.horospherical.flag {
                Shape {
                    label: ShapeLabel::Cusp,
                    conditions: "complete affine link, all eigenvalue norms 1 on the ball, horospherical".into(),
                }
            } else {
                unlabeled("complete affine link without unit norms")
            }
        }
        LinkClass::ProperlyConvex => {
            if r.passes(MecVariant::Uniform) {
                if irreducible == Some(true) {
                    Shape {
                        label: ShapeLabel::Lens,
                        conditions: "properly convex link, uniform middle eigenvalue condition on the ball, no invariant subspace found".into(),
                    }
                } else {
                    Shape {
                        label: ShapeLabel::GeneralizedLens,
                        conditions: "properly convex link, uniform middle eigenvalue condition on the ball".into(),
                    }
                }
            } else if r.passes(MecVariant::WeakUniform)
                && r.quasi_lens.as_ref().is_some_and(|q| q.jordan_at_vertex && q.positive_translation)
            {
                Shape {
                    label: ShapeLabel::QuasiLens,
                    conditions: "properly convex link, weakly uniform but uniform middle eigenvalue condition not certified on the ball, Jordan block at the vertex, positive translation".into(),
                }
            } else {
                unlabeled("properly convex link without a certified eigenvalue condition")
            }
        }
        LinkClass::Npcc => {
            let qj_ok = r.quasi_join.as_ref().is_some_and(|q| {
                q.mu_identically_one
                    && matches!(q.verdict, QuasiJoinVerdict::Joined | QuasiJoinVerdict::QuasiJoined { .. })
            });
            if r.passes(MecVariant::WeakNpcc) && qj_ok {
                Shape {
                    label: ShapeLabel::QuasiJoin,
                    conditions: "NPCC link, weak NPCC middle eigenvalue condition on the ball, μ ≡ 1, α₇ joined or uniformly positive".into(),
                }
            } else {
                unlabeled("NPCC link without the quasi-join conditions")
            }
        }
        LinkClass::Indeterminate(_) => unlabeled("indeterminate link"),
    }
}
