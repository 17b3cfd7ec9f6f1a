//! Text formats: scene files (an end or a group with samples), domain files
//! (a cone body) and end reports.
//!
//! Every line is `key: value`; `#` starts a comment line. Floats are written
//! with 17 significant digits, which reads back bit-for-bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::convex::{BodyKind, ConeBody, DEFAULT_QUADRIC_SAMPLES};
use crate::ends::{EndReport, RadialEnd};
use crate::projcore::{Matrix, ProjMap, ProjPoint, Vector};
use crate::{Error, Result, Tol};

pub const SCENE_VERSION: u32 = 1;

const HEADER: &str = "\
# projends scene
# Points of S^n are homogeneous coordinate vectors; x and -x are distinct.
# When data comes from RP^n, the lift has its first nonzero coordinate positive.
# Matrices are row-major and act on column vectors.
";

#[derive(Debug, Clone, PartialEq)]
pub struct SceneFile {
    pub version: u32,
    pub n: usize,
    pub vertex: Vec<f64>,
    /// Row-major (n+1)² arrays.
    pub generators: Vec<Vec<f64>>,
    pub samples: Vec<Vec<f64>>,
    pub metadata: BTreeMap<String, String>,
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" ")
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_list(line: usize, v: &str, len: usize, field: &str) -> Result<Vec<f64>> {
    let xs = v
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| perr(line, format!("{field}: bad number {t:?}"))))
        .collect::<Result<Vec<f64>>>()?;
    if xs.len() != len {
        return Err(perr(line, format!("{field}: expected {len} numbers, found {}", xs.len())));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(perr(line, format!("{field}: non-finite value")));
    }
    Ok(xs)
}

/// (line number, key, value) for every non-comment line.
pub fn entries(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once(':').ok_or_else(|| perr(i + 1, "expected `key: value`"))?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_header(entries: &[(usize, String, String)]) -> Result<(u32, usize)> {
    let mut version = None;
    let mut n = None;
    for (line, k, v) in entries {
        match k.as_str() {
            "version" => version = Some(v.parse::<u32>().map_err(|_| perr(*line, "version: not an integer"))?),
            "n" => n = Some(v.parse::<usize>().map_err(|_| perr(*line, "n: not an integer"))?),
            _ => {}
        }
    }
    let version = version.ok_or_else(|| perr(0, "missing field `version`"))?;
    if version != SCENE_VERSION {
        return Err(perr(0, format!("unsupported version {version}")));
    }
    let n = n.ok_or_else(|| perr(0, "missing field `n`"))?;
    if n == 0 {
        return Err(perr(0, "n must be positive"));
    }
    Ok((version, n))
}

impl SceneFile {
    pub fn from_end(end: &RadialEnd, metadata: BTreeMap<String, String>) -> Self {
        SceneFile {
            version: SCENE_VERSION,
            n: end.n(),
            vertex: end.vertex.coords().iter().copied().collect(),
            generators: end.gens.iter().map(|g| g.matrix().transpose().iter().copied().collect()).collect(),
            samples: end.samples.iter().map(|s| s.coords().iter().copied().collect()).collect(),
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let es = entries(text)?;
        let (version, n) = parse_header(&es)?;
        let d = n + 1;
        let mut scene =
            SceneFile { version, n, vertex: Vec::new(), generators: Vec::new(), samples: Vec::new(), metadata: BTreeMap::new() };
        let mut have_vertex = false;
        for (line, k, v) in &es {
            match k.as_str() {
                "version" | "n" => {}
                "vertex" => {
                    scene.vertex = parse_list(*line, v, d, "vertex")?;
                    have_vertex = true;
                }
                "generator" => scene.generators.push(parse_list(*line, v, d * d, "generator")?),
                "sample" => scene.samples.push(parse_list(*line, v, d, "sample")?),
                key => match key.strip_prefix("meta.") {
                    Some(m) if !m.is_empty() => {
                        scene.metadata.insert(m.to_string(), v.clone());
                    }
                    _ => return Err(perr(*line, format!("unknown field `{key}`"))),
                },
            }
        }
        if !have_vertex {
            return Err(perr(0, "missing field `vertex`"));
        }
        Ok(scene)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from(HEADER);
        let _ = writeln!(s, "version: {}", self.version);
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "vertex: {}", fmt_list(&self.vertex));
        for g in &self.generators {
            let _ = writeln!(s, "generator: {}", fmt_list(g));
        }
        for x in &self.samples {
            let _ = writeln!(s, "sample: {}", fmt_list(x));
        }
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "meta.{k}: {}", v.replace('\n', " "));
        }
        s
    }

    pub fn maps(&self) -> Result<Vec<ProjMap>> {
        if self.generators.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        self.generators.iter().map(|g| ProjMap::from_rows(self.n + 1, g)).collect()
    }

    pub fn sample_points(&self) -> Result<Vec<ProjPoint>> {
        self.samples.iter().map(|x| ProjPoint::from_slice(x)).collect()
    }

    pub fn to_end(&self, tol: &Tol) -> Result<RadialEnd> {
        RadialEnd::new(ProjPoint::from_slice(&self.vertex)?, self.maps()?, self.sample_points()?, tol)
    }
}

/// A cone body as data: generator rays, or a quadric form.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainFile {
    Polyhedral { n: usize, rays: Vec<Vec<f64>> },
    Quadric { n: usize, form: Vec<f64> },
}

impl DomainFile {
    pub fn parse(text: &str) -> Result<Self> {
        let es = entries(text)?;
        let (_, n) = parse_header(&es)?;
        let d = n + 1;
        let mut kind: Option<String> = None;
        let mut rays = Vec::new();
        let mut form = None;
        for (line, k, v) in &es {
            match k.as_str() {
                "version" | "n" => {}
                "kind" => kind = Some(v.clone()),
                "ray" => rays.push(parse_list(*line, v, d, "ray")?),
                "form" => form = Some(parse_list(*line, v, d * d, "form")?),
                key => return Err(perr(*line, format!("unknown field `{key}`"))),
            }
        }
        match kind.as_deref() {
            Some("polyhedral") => {
                if rays.is_empty() {
                    return Err(perr(0, "polyhedral domain needs at least one `ray`"));
                }
                Ok(DomainFile::Polyhedral { n, rays })
            }
            Some("quadric") => Ok(DomainFile::Quadric { n, form: form.ok_or_else(|| perr(0, "missing field `form`"))? }),
            Some(k) => Err(perr(0, format!("unknown kind `{k}`"))),
            None => Err(perr(0, "missing field `kind`")),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from(HEADER);
        let _ = writeln!(s, "version: {SCENE_VERSION}");
        match self {
            DomainFile::Polyhedral { n, rays } => {
                let _ = writeln!(s, "n: {n}");
                let _ = writeln!(s, "kind: polyhedral");
                for r in rays {
                    let _ = writeln!(s, "ray: {}", fmt_list(r));
                }
            }
            DomainFile::Quadric { n, form } => {
                let _ = writeln!(s, "n: {n}");
                let _ = writeln!(s, "kind: quadric");
                let _ = writeln!(s, "form: {}", fmt_list(form));
            }
        }
        s
    }

    pub fn from_body(b: &ConeBody) -> Self {
        let n = b.ambient() - 1;
        match b.kind() {
            BodyKind::Quadric { q, .. } => DomainFile::Quadric { n, form: q.transpose().iter().copied().collect() },
            BodyKind::Polyhedral => {
                DomainFile::Polyhedral { n, rays: b.extreme_rays().iter().map(|r| r.iter().copied().collect()).collect() }
            }
        }
    }

    pub fn to_body(&self, tol: &Tol) -> Result<ConeBody> {
        match self {
            DomainFile::Polyhedral { rays, .. } => {
                ConeBody::polyhedral(rays.iter().map(|r| Vector::from_column_slice(r)).collect(), tol)
            }
            DomainFile::Quadric { n, form } => {
                ConeBody::quadric(Matrix::from_row_slice(n + 1, n + 1, form), DEFAULT_QUADRIC_SAMPLES, tol)
            }
        }
    }
}

fn opt_f64(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), fmt_f64)
}

/// The report as `key: value` lines in a fixed order.
pub fn report_text(r: &EndReport) -> String {
    let mut s = String::from("# projends end report\n");
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k}: {}", v.replace('\n', " "));
    };
    kv("version", SCENE_VERSION.to_string());
    kv("ball_length", r.ball_length.to_string());
    kv("dimension", r.dimension.to_string());
    kv("trichotomy", r.trichotomy.label().to_string());
    if let crate::ends::LinkClass::Indeterminate(why) = &r.trichotomy {
        kv("trichotomy.reason", why.clone());
    }
    if let Some(f) = &r.fiber {
        kv("fiber_dimension", f.i0.to_string());
        kv("leaf_space_dimension", (f.leaf_frame.ncols() - 1).to_string());
        kv("fiber.n_words", f.n_words.len().to_string());
    }
    for f in &r.mec {
        let p = format!("mec.{}", f.variant.name());
        kv(&p, f.verdict.label().to_string());
        kv(&format!("{p}.witness"), f.witness.clone().unwrap_or_else(|| "none".into()));
        kv(&format!("{p}.constant"), opt_f64(f.constant));
        kv(&format!("{p}.radius"), f.radius.to_string());
        kv(&format!("{p}.detail"), f.detail.clone());
    }
    let h = &r.horospherical;
    kv("horospherical", h.flag.to_string());
    kv("horospherical.max_deviation", fmt_f64(h.max_deviation));
    kv("horospherical.worst_word", h.worst_word.clone());
    if let Some(fit) = &h.fit {
        kv("horospherical.form_residual", fmt_f64(fit.residual));
        kv("horospherical.form_vertex_value", fmt_f64(fit.vertex_value));
    }
    if let Some(ca) = &r.ca {
        kv("ca_dichotomy", ca.label());
    }
    if let Some(q) = &r.quasi_join {
        kv("quasi_join.verdict", q.verdict.label());
        kv("quasi_join.mu_identically_one", q.mu_identically_one.to_string());
        kv("quasi_join.inf_mu7", fmt_f64(q.inf_mu7));
        kv("quasi_join.similarity_residual", fmt_f64(q.max_similarity_residual));
        kv("quasi_join.orthogonality_residual", fmt_f64(q.max_orthogonality_residual));
        kv("quasi_join.conjugation_residual", fmt_f64(q.max_conjugation_residual));
        kv("quasi_join.block_residual", fmt_f64(q.max_block_residual));
        kv("quasi_join.additivity_residual", fmt_f64(q.additivity_residual));
        kv("quasi_join.square_residual", fmt_f64(q.square_residual));
    }
    if let Some(q) = &r.quasi_lens {
        kv("quasi_lens.jordan_at_vertex", q.jordan_at_vertex.to_string());
        kv("quasi_lens.inf_ratio", fmt_f64(q.inf_ratio));
        kv("quasi_lens.positive_translation", q.positive_translation.to_string());
    }
    kv("shape", r.shape.label.as_str().to_string());
    kv("shape.conditions", r.shape.conditions.clone());
    for (i, a) in r.assumptions.iter().enumerate() {
        kv(&format!("assumption.{i}"), a.clone());
    }
    for (k, v) in &r.diagnostics {
        kv(&format!("diagnostic.{k}"), v.clone());
    }
    s
}
