//! Eigenvalue norms, affiliated subspaces, relative spectra, translation
//! lengths and word-ball tools.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::{hilbert_distance, random_interior, ConeBody};
use crate::projcore::{Matrix, ProjMap, ProjPoint, Subspace, Vector};
use crate::{Error, Result, Tol};

/// One eigenvalue (a cluster mean) with its algebraic multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen {
    pub value: Complex<f64>,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct NormClass {
    pub mu: f64,
    pub multiplicity: usize,
    /// ℛ_μ: the real part of the sum of generalized eigenspaces with norm μ.
    pub subspace: Subspace,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Eigen>,
    /// Sorted by μ descending.
    pub classes: Vec<NormClass>,
    /// Some pair of classes has relative norm gap in the undecidable window.
    pub indeterminate: bool,
    /// Smallest relative gap between consecutive classes (∞ for one class).
    pub min_gap: f64,
}

impl Spectrum {
    pub fn max_norm(&self) -> f64 {
        self.classes.first().map_or(f64::NAN, |c| c.mu)
    }

    pub fn min_norm(&self) -> f64 {
        self.classes.last().map_or(f64::NAN, |c| c.mu)
    }

    /// Second largest norm class (the largest when there is only one).
    pub fn second_norm(&self) -> f64 {
        self.classes.get(1).or(self.classes.first()).map_or(f64::NAN, |c| c.mu)
    }

    /// Index of the class containing norm `mu`.
    pub fn class_of(&self, mu: f64, rel: f64) -> Option<usize> {
        self.classes.iter().position(|c| (c.mu - mu).abs() <= rel * c.mu.max(mu))
    }
}

/// Radius (relative) inside which computed eigenvalues are taken to be one
/// defective eigenvalue. Jordan blocks of size k scatter computed eigenvalues
/// by roughly ε^{1/k}; the cluster mean is accurate to O(ε).
pub const CLUSTER_RADIUS: f64 = 1e-4;

/// Eigenvalues of `m` with near-coincident values merged into their mean.
pub fn clustered_eigenvalues(m: &Matrix) -> Result<Vec<Eigen>> {
    let vals = raw_eigenvalues(m).ok_or_else(|| Error::Solver { condition: condition_estimate(m) })?;
    let k = vals.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..k {
        for j in i + 1..k {
            let scale = vals[i].norm().max(vals[j].norm()).max(f64::MIN_POSITIVE);
            if (vals[i] - vals[j]).norm() <= CLUSTER_RADIUS * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Complex<f64>, usize)> = Vec::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += vals[i];
                g.2 += 1;
            }
            None => groups.push((r, vals[i], 1)),
        }
    }
    let mut out: Vec<Eigen> = groups
        .into_iter()
        .map(|(_, sum, mult)| {
            let mut value = sum / mult as f64;
            if value.im.abs() <= 1e-12 * value.norm().max(1.0) {
                value.im = 0.0;
            }
            Eigen { value, multiplicity: mult }
        })
        .collect();
    out.sort_by(|a, b| {
        b.value
            .norm()
            .total_cmp(&a.value.norm())
            .then(b.value.re.total_cmp(&a.value.re))
            .then(b.value.im.total_cmp(&a.value.im))
    });
    Ok(out)
}

/// Eigenvalues via a capped Schur iteration on the matrix scaled to unit
/// max entry. The iteration can stall or break down (NaN) on exactly
/// block-triangular input; retry after fixed orthogonal similarities.
fn raw_eigenvalues(m: &Matrix) -> Option<Vec<Complex<f64>>> {
    let n = m.nrows();
    let scale = m.amax();
    if !(scale.is_finite() && scale > 0.0) {
        return None;
    }
    let a = m / scale;
    let attempt = |x: Matrix| -> Option<Vec<Complex<f64>>> {
        let ev = nalgebra::Schur::try_new(x, f64::EPSILON, 10_000)?.complex_eigenvalues();
        ev.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then(|| ev.iter().map(|z| z * scale).collect())
    };
    if let Some(ev) = attempt(a.clone()) {
        return Some(ev);
    }
    (1..=3).find_map(|k| {
        let u = Vector::from_fn(n, |i, _| 1.0 + (k * (i + 1)) as f64 * 0.37).normalize();
        let h = Matrix::identity(n, n) - &u * u.transpose() * 2.0;
        attempt(&h * &a * &h)
    })
}

fn condition_estimate(m: &Matrix) -> f64 {
    let sv = m.clone().singular_values();
    let (mx, mn) = (sv.max(), sv.min());
    if mn > 0.0 {
        mx / mn
    } else {
        f64::INFINITY
    }
}

/// Real kernel of Π (g − λ)^k over the given eigenvalues (conjugate pairs
/// enter as real quadratics), of known dimension `dim`.
pub(crate) fn real_kernel(m: &Matrix, eigs: &[Eigen], dim: usize) -> Subspace {
    let n = m.nrows();
    if dim == n {
        return Subspace::full(n);
    }
    let id = Matrix::identity(n, n);
    let scale = m.norm().max(1.0);
    let mut p = id.clone();
    for e in eigs {
        let factor = if e.value.im == 0.0 {
            (m - &id * e.value.re) / scale
        } else if e.value.im > 0.0 {
            (m * m - m * (2.0 * e.value.re) + &id * e.value.norm_sqr()) / (scale * scale)
        } else {
            continue;
        };
        for _ in 0..e.multiplicity {
            p = &p * &factor;
        }
    }
    let svd = p.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]).then(a.cmp(&b)));
    let cols: Vec<Vector> = idx.iter().take(dim).map(|&i| vt.row(i).transpose()).collect();
    Subspace::span(&cols, n, 1e-12)
}

pub fn spectrum_of(m: &Matrix, tol: &Tol) -> Result<Spectrum> {
    let eigs = clustered_eigenvalues(m)?;
    // Group clusters into norm classes.
    let mut classes: Vec<(f64, Vec<Eigen>)> = Vec::new();
    for e in &eigs {
        let mu = e.value.norm();
        match classes.last_mut() {
            Some((m0, list)) if (*m0 - mu).abs() <= tol.norm_class * m0.max(mu) => list.push(*e),
            _ => classes.push((mu, vec![*e])),
        }
    }
    let mut min_gap = f64::INFINITY;
    let mut indeterminate = false;
    for w in classes.windows(2) {
        let gap = (w[0].0 - w[1].0) / w[0].0;
        min_gap = min_gap.min(gap);
        if gap < tol.gap_indeterminate {
            indeterminate = true;
        }
    }
    let norm_classes = classes
        .into_iter()
        .map(|(_, list)| {
            let mult: usize = list.iter().map(|e| e.multiplicity).sum();
            let total: f64 = list.iter().map(|e| e.value.norm() * e.multiplicity as f64).sum();
            NormClass { mu: total / mult as f64, multiplicity: mult, subspace: real_kernel(m, &list, mult) }
        })
        .collect();
    Ok(Spectrum { eigenvalues: eigs, classes: norm_classes, indeterminate, min_gap })
}

pub fn spectrum(g: &ProjMap, tol: &Tol) -> Result<Spectrum> {
    spectrum_of(g.matrix(), tol)
}

/// Real primary components: one subspace per real eigenvalue or conjugate pair.
pub fn primary_components(m: &Matrix) -> Result<Vec<Subspace>> {
    let eigs = clustered_eigenvalues(m)?;
    Ok(eigs
        .iter()
        .filter(|e| e.value.im >= 0.0)
        .map(|e| {
            let dim = if e.value.im > 0.0 { 2 * e.multiplicity } else { e.multiplicity };
            real_kernel(m, std::slice::from_ref(e), dim)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelSpectrum {
    pub lambda1: f64,
    pub lambda_np1: f64,
    pub lambda_inf: f64,
    pub lambda_inf_prime: f64,
    pub lambda_vertex: f64,
    /// Largest eigenvalue norm overall.
    pub lambda_bar: f64,
}

/// Signed eigenvalue of `g` at a fixed point `v`, and the fixed-point residual.
pub fn eigenvalue_at(g: &Matrix, v: &ProjPoint) -> (f64, f64) {
    let gv = g * v.coords();
    let lam = gv.dot(v.coords());
    let resid = (gv - v.coords() * lam).norm() / g.norm().max(f64::MIN_POSITIVE);
    (lam, resid)
}

pub fn rel_spectrum(g: &ProjMap, v_inf: &Subspace, vertex: &ProjPoint, tol: &Tol) -> Result<RelSpectrum> {
    let m = g.matrix();
    let inv = v_inf.invariance_residual(m);
    if inv > tol.subspace {
        return Err(Error::Precondition(format!("V_inf is not invariant (residual {inv:e})")));
    }
    let (lam_v, fix) = eigenvalue_at(m, vertex);
    if fix > tol.subspace {
        return Err(Error::Precondition(format!("vertex is not fixed (residual {fix:e})")));
    }
    if v_inf.dim() == 0 {
        return Err(Error::Precondition("V_inf is the zero subspace".into()));
    }
    let sp = spectrum(g, tol)?;
    let outside: Vec<f64> = sp
        .classes
        .iter()
        .filter(|c| !v_inf.contains_subspace(&c.subspace, tol.subspace))
        .map(|c| c.mu)
        .collect();
    let b = v_inf.basis();
    let restricted = b.transpose() * m * b;
    let inner = clustered_eigenvalues(&restricted)?;
    let norms: Vec<f64> = inner.iter().map(|e| e.value.norm()).collect();
    let (lambda1, lambda_np1) = if outside.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (outside.iter().cloned().fold(f64::MIN, f64::max), outside.iter().cloned().fold(f64::MAX, f64::min))
    };
    Ok(RelSpectrum {
        lambda1,
        lambda_np1,
        lambda_inf: norms.iter().cloned().fold(f64::MIN, f64::max),
        lambda_inf_prime: norms.iter().cloned().fold(f64::MAX, f64::min),
        lambda_vertex: lam_v.abs(),
        lambda_bar: sp.max_norm(),
    })
}

#[derive(Debug, Clone)]
pub struct TranslationLength {
    /// Numeric infimum of d_K(x, g·x).
    pub value: f64,
    /// ½·log(λ₁/λₙ₊₁) from the extreme eigenvalue norms.
    pub eigen_proxy: f64,
    /// The proxy expressed in the normalization d = log|cross-ratio|, which
    /// is twice the ½·log normalization the proxy is stated in.
    pub proxy_in_metric: f64,
    /// |value − proxy_in_metric| exceeded 1e-2.
    pub disagreement: bool,
    pub argmin: Vector,
}

pub const TRANSLATION_SEEDS: usize = 512;

pub fn translation_length(k: &ConeBody, g: &ProjMap, tol: &Tol) -> Result<TranslationLength> {
    if !k.is_properly_convex() {
        return Err(Error::HilbertUndefined);
    }
    let worst = k
        .generators()
        .iter()
        .map(|x| k.slack(&g.apply(x)))
        .fold(f64::INFINITY, f64::min);
    let preserve_eps = 1e-8;
    if worst < -preserve_eps {
        return Err(Error::NotPreserved { slack: worst });
    }
    translation_length_estimate(k, g, tol)
}

/// As [`translation_length`] without the invariance check, for bodies that
/// only approximate an invariant domain (finite orbit hulls).
pub fn translation_length_estimate(k: &ConeBody, g: &ProjMap, tol: &Tol) -> Result<TranslationLength> {
    if !k.is_properly_convex() {
        return Err(Error::HilbertUndefined);
    }
    let sp = spectrum(g, tol)?;
    let eigen_proxy = 0.5 * (sp.max_norm() / sp.min_norm()).ln();
    let proxy_in_metric = 2.0 * eigen_proxy;

    let f = |x: &Vector| -> f64 {
        let p = match ProjPoint::new(x.clone()) {
            Ok(p) => p,
            Err(_) => return f64::INFINITY,
        };
        if k.slack(p.coords()) < tol.interior {
            return f64::INFINITY;
        }
        let gp = g.act(&p, false).expect("nonsingular");
        if k.slack(gp.coords()) < tol.interior {
            return f64::INFINITY;
        }
        if p.approx_eq(&gp, 1e-14) {
            return 0.0;
        }
        hilbert_distance(k, &p, &gp, tol).unwrap_or(f64::INFINITY)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut best = Vector::zeros(k.ambient());
    let mut best_val = f64::INFINITY;
    for _ in 0..TRANSLATION_SEEDS {
        let x = random_interior(k, &mut rng);
        let v = f(&x);
        if v < best_val {
            best_val = v;
            best = x;
        }
    }
    // Coordinate descent in an orthonormal frame of the tangent space.
    let mut step = 0.1;
    while step > 1e-10 && best_val > 0.0 {
        let frame = Subspace::span(&[best.clone()], k.ambient(), 1e-12).complement();
        let mut improved = false;
        for dir in frame.basis_vectors() {
            for sgn in [1.0, -1.0] {
                let cand = (&best + &dir * (sgn * step)).normalize();
                let v = f(&cand);
                if v < best_val {
                    best_val = v;
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(TranslationLength {
        value: best_val,
        eigen_proxy,
        proxy_in_metric,
        disagreement: (best_val - proxy_in_metric).abs() > 1e-2,
        argmin: best,
    })
}

/// A word in the generators and its matrix, accumulated left to right.
#[derive(Debug, Clone)]
pub struct Word {
    pub letters: Vec<(usize, i8)>,
    pub matrix: ProjMap,
}

impl Word {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters as text: generator i is `g{i}`, its inverse `g{i}^-1`; the
    /// empty word is `e`.
    pub fn label(&self) -> String {
        if self.letters.is_empty() {
            return "e".into();
        }
        self.letters
            .iter()
            .map(|&(i, e)| if e > 0 { format!("g{i}") } else { format!("g{i}^-1") })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn from_letters(letters: &[(usize, i8)], gens: &[ProjMap]) -> Result<Word> {
        let size = gens.first().ok_or(Error::EmptyGenerators)?.size();
        let mut m = ProjMap::identity(size);
        for &(i, e) in letters {
            let g = gens.get(i).ok_or_else(|| Error::Precondition(format!("no generator {i}")))?;
            m = if e > 0 { m.compose(g) } else { m.compose(&g.inverse()) };
        }
        Ok(Word { letters: letters.to_vec(), matrix: m })
    }

    pub fn inverse(&self, gens: &[ProjMap]) -> Word {
        let letters: Vec<(usize, i8)> = self.letters.iter().rev().map(|&(i, e)| (i, -e)).collect();
        Word::from_letters(&letters, gens).expect("valid letters")
    }
}

/// Freely reduced words of length ≤ L in shortlex order: letters ordered
/// g0, g0⁻¹, g1, g1⁻¹, ….
pub struct WordBall {
    letters: Vec<(usize, i8, ProjMap)>,
    max_len: usize,
    level: Vec<Word>,
    next_level: Vec<Word>,
    pos: usize,
    len: usize,
}

impl Iterator for WordBall {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        loop {
            if self.pos < self.level.len() {
                let w = self.level[self.pos].clone();
                self.pos += 1;
                if self.len < self.max_len {
                    for (i, e, m) in &self.letters {
                        if let Some(&(li, le)) = w.letters.last() {
                            if li == *i && le == -*e {
                                continue;
                            }
                        }
                        let mut letters = w.letters.clone();
                        letters.push((*i, *e));
                        self.next_level.push(Word { letters, matrix: w.matrix.compose(m) });
                    }
                }
                return Some(w);
            }
            if self.next_level.is_empty() {
                return None;
            }
            self.level = std::mem::take(&mut self.next_level);
            self.pos = 0;
            self.len += 1;
        }
    }
}

pub fn enumerate_words(gens: &[ProjMap], max_len: usize) -> WordBall {
    let size = gens.first().map_or(1, |g| g.size());
    let letters = gens
        .iter()
        .enumerate()
        .flat_map(|(i, g)| [(i, 1i8, g.clone()), (i, -1i8, g.inverse())])
        .collect();
    WordBall {
        letters,
        max_len,
        level: vec![Word { letters: vec![], matrix: ProjMap::identity(size) }],
        next_level: Vec::new(),
        pos: 0,
        len: 0,
    }
}

/// Number of reduced words of length ≤ L on `k` generators.
pub fn ball_size(k: usize, max_len: usize) -> usize {
    if k == 0 {
        return 1;
    }
    let mut total = 1;
    let mut level = 2 * k;
    for _ in 0..max_len {
        total += level;
        level *= 2 * k - 1;
    }
    total
}

fn matrices_match(a: &Matrix, b: &Matrix, eps: f64) -> bool {
    (a - b).amax() <= eps * a.amax().max(b.amax()).max(1.0)
}

/// Upper bound on the conjugacy word length: the shortest word equal (within
/// 1e-8) to some h·g·h⁻¹ with |h| ≤ L.
pub fn cwl_upper(g: &Word, gens: &[ProjMap], radius: usize) -> usize {
    let reps: Vec<Word> = enumerate_words(gens, g.len()).collect();
    let mut best = g.len();
    for h in enumerate_words(gens, radius) {
        let c = h.matrix.compose(&g.matrix).compose(&h.matrix.inverse());
        if let Some(w) = reps.iter().take_while(|w| w.len() < best).find(|w| matrices_match(w.matrix.matrix(), c.matrix(), 1e-8)) {
            best = w.len();
        }
        if best == 0 {
            break;
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub subspaces: Vec<Subspace>,
    /// Dimension of the span of all products of generators.
    pub algebra_dim: usize,
    /// `true` when the algebra is all of M_{n+1}(ℝ) (absolute irreducibility).
    pub burnside_full: bool,
}

/// Heuristic common invariant subspaces of the generated algebra.
pub fn invariant_subspaces(gens: &[ProjMap], tol: &Tol) -> Result<InvariantReport> {
    let first = gens.first().ok_or(Error::EmptyGenerators)?;
    let n = first.size();
    let algebra = algebra_basis(gens);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    // The most generic of a few random algebra elements.
    let mut best: Option<Vec<Subspace>> = None;
    let mut samples = Vec::new();
    for _ in 0..6 {
        let mut a = Matrix::zeros(n, n);
        for b in &algebra {
            a += b * (rng.random::<f64>() * 2.0 - 1.0);
        }
        let comps = primary_components(&a)?;
        samples.push(a);
        if best.as_ref().is_none_or(|b| comps.len() > b.len()) {
            best = Some(comps);
        }
    }
    let comps = best.unwrap_or_default();
    let k = comps.len();
    let mut found: Vec<Subspace> = Vec::new();
    if k <= 16 {
        for mask in 1u32..(1u32 << k) {
            let mut s = Subspace::zero(n);
            for (i, c) in comps.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s = s.sum(c, tol.subspace);
                }
            }
            if s.dim() == 0 || s.dim() == n {
                continue;
            }
            if gens.iter().all(|g| s.invariance_residual(g.matrix()) < tol.subspace)
                && !found.iter().any(|f| f.approx_eq(&s, tol.subspace))
            {
                found.push(s);
            }
        }
    }
    // Primary components miss non-semisimple cases (unipotent groups), so
    // also spin eigenvectors of the samples and of their transposes.
    if algebra.len() < n * n {
        let dual: Vec<Matrix> = algebra.iter().map(|b| b.transpose()).collect();
        for a in &samples {
            for (alg, m, transposed) in [(&algebra, a.clone(), false), (&dual, a.transpose(), true)] {
                for v in eigenvectors(&m)? {
                    let orbit: Vec<Vector> = alg.iter().map(|b| b * &v).collect();
                    let mut s = Subspace::span(&orbit, n, tol.subspace);
                    if transposed {
                        s = s.complement();
                    }
                    if s.dim() == 0 || s.dim() == n {
                        continue;
                    }
                    if gens.iter().all(|g| s.invariance_residual(g.matrix()) < tol.subspace)
                        && !found.iter().any(|f| f.approx_eq(&s, tol.subspace))
                    {
                        found.push(s);
                    }
                }
            }
        }
    }
    found.sort_by_key(|s| s.dim());
    Ok(InvariantReport { subspaces: found, algebra_dim: algebra.len(), burnside_full: algebra.len() == n * n })
}

/// Kernel basis of (m − λ) for each real eigenvalue λ of m.
fn eigenvectors(m: &Matrix) -> Result<Vec<Vector>> {
    let n = m.nrows();
    let scale = m.norm().max(1e-300);
    let mut out = Vec::new();
    for e in clustered_eigenvalues(m)?.iter().filter(|e| e.value.im == 0.0) {
        let svd = (m - Matrix::identity(n, n) * e.value.re).svd(false, true);
        let vt = svd.v_t.expect("requested V");
        for (i, &sv) in svd.singular_values.iter().enumerate() {
            if sv <= 1e-6 * scale {
                out.push(vt.row(i).transpose());
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis (Frobenius) of the span of all products of generators.
pub fn algebra_basis(gens: &[ProjMap]) -> Vec<Matrix> {
    let n = gens[0].size();
    let mut basis: Vec<Matrix> = Vec::new();
    let add = |m: &Matrix, basis: &mut Vec<Matrix>| -> bool {
        let mut r = m.clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = r.dot(b);
                r -= b * c;
            }
        }
        let nr = r.norm();
        if nr > 1e-9 * m.norm().max(1e-300) {
            basis.push(r / nr);
            true
        } else {
            false
        }
    };
    let mut frontier = vec![Matrix::identity(n, n)];
    add(&frontier[0], &mut basis);
    while !frontier.is_empty() && basis.len() < n * n {
        let mut next = Vec::new();
        for f in &frontier {
            for g in gens {
                let p = f * g.matrix();
                if add(&p, &mut basis) {
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> ProjMap {
        ProjMap::from_diag(d).unwrap()
    }

    fn e(n: usize, i: usize) -> Vector {
        Vector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })
    }

    #[test]
    fn identity_has_one_class() {
        let sp = spectrum(&ProjMap::identity(3), &Tol::default()).unwrap();
        assert_eq!(sp.classes.len(), 1);
        assert_eq!(sp.classes[0].mu, 1.0);
        assert_eq!(sp.classes[0].subspace.dim(), 3);
    }

    #[test]
    fn diagonal_classes() {
        let sp = spectrum(&diag(&[2., 1., 0.5]), &Tol::default()).unwrap();
        let mus: Vec<f64> = sp.classes.iter().map(|c| c.mu).collect();
        assert_eq!(mus, vec![2.0, 1.0, 0.5]);
        for (i, c) in sp.classes.iter().enumerate() {
            assert_eq!(c.subspace.dim(), 1);
            assert!(c.subspace.contains(&e(3, i), 1e-12));
        }
    }

    #[test]
    fn unipotent_single_class() {
        let u = ProjMap::from_rows(3, &[1., 1., 0., 0., 1., 1., 0., 0., 1.]).unwrap();
        let sp = spectrum(&u, &Tol::default()).unwrap();
        assert_eq!(sp.eigenvalues.len(), 1);
        assert_eq!(sp.eigenvalues[0].multiplicity, 3);
        assert!((sp.eigenvalues[0].value.re - 1.0).abs() < 1e-14);
        assert_eq!(sp.classes.len(), 1);
        assert_eq!(sp.classes[0].subspace.dim(), 3);
    }

    #[test]
    fn rel_spectrum_diagonal() {
        let t = Tol::default();
        let v_inf = Subspace::span(&[e(3, 2)], 3, 1e-12);
        let vertex = ProjPoint::new(e(3, 2)).unwrap();
        let r = rel_spectrum(&diag(&[2., 1., 0.5]), &v_inf, &vertex, &t).unwrap();
        assert_eq!((r.lambda1, r.lambda_np1, r.lambda_inf, r.lambda_vertex), (2.0, 1.0, 0.5, 0.5));
    }

    #[test]
    fn rel_spectrum_rotation_block() {
        let t = Tol::default();
        let (c, s) = (0.6f64, 0.8f64);
        // Rotation block with norm √2·(1/√2)… scaled so |det| = 1 after normalization.
        let g = ProjMap::new(Matrix::from_row_slice(3, 3, &[c, -s, 0., s, c, 0., 0., 0., 0.5])).unwrap();
        let v_inf = Subspace::span(&[e(3, 2)], 3, 1e-12);
        let r = rel_spectrum(&g, &v_inf, &ProjPoint::new(e(3, 2)).unwrap(), &t).unwrap();
        let scale = 0.5f64.powf(-1.0 / 3.0);
        assert!((r.lambda1 - scale).abs() < 1e-12 && (r.lambda_np1 - scale).abs() < 1e-12);
        assert!((r.lambda_inf - 0.5 * scale).abs() < 1e-12);
    }

    #[test]
    fn rel_spectrum_preconditions() {
        let t = Tol::default();
        let v_inf = Subspace::span(&[Vector::from_vec(vec![1., 1., 0.])], 3, 1e-12);
        let err = rel_spectrum(&diag(&[2., 1., 0.5]), &v_inf, &ProjPoint::new(e(3, 2)).unwrap(), &t);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn word_counts() {
        let gens = vec![diag(&[2., 1., 0.5]), diag(&[1., 3., 1. / 3.])];
        assert_eq!(enumerate_words(&gens, 0).count(), 1);
        assert_eq!(enumerate_words(&gens, 1).count(), 5);
        assert_eq!(enumerate_words(&gens, 3).count(), 1 + 4 + 12 + 36);
        assert_eq!(ball_size(2, 8), 13121);
        let labels: Vec<String> = enumerate_words(&gens, 1).map(|w| w.label()).collect();
        assert_eq!(labels, vec!["e", "g0", "g0^-1", "g1", "g1^-1"]);
    }

    #[test]
    fn invariant_subspaces_of_diagonal() {
        let rep = invariant_subspaces(&[diag(&[2., 1., 0.5])], &Tol::default()).unwrap();
        // Three lines and three planes.
        assert_eq!(rep.subspaces.len(), 6);
        for i in 0..3 {
            assert!(rep.subspaces.iter().any(|s| s.dim() == 1 && s.contains(&e(3, i), 1e-10)));
        }
        assert!(!rep.burnside_full);
    }

    #[test]
    fn translation_length_identity_is_zero() {
        let t = Tol::default();
        let k = ConeBody::klein_ball(2, &t).unwrap();
        let tl = translation_length(&k, &ProjMap::identity(3), &t).unwrap();
        assert_eq!(tl.value, 0.0);
    }
}
