//! SVG figures: orbit tiles of a sample polygon in the affine chart x₀ = 1
//! (domain mode, n = 2) and the link domain seen from the vertex (link
//! mode, n ≤ 3). The view box is always [−1.1, 1.1]².

use std::fmt::Write as _;

use crate::ends::{classify_link, fiber_data, link_domain, LinkClass};
use crate::projcore::{Matrix, ProjMap, Subspace, Vector};
use crate::scene::SceneFile;
use crate::spectra::enumerate_words;
use crate::{Error, Result, Tol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    Domain,
    Link,
}

const STROKE: f64 = 0.004;

struct Svg {
    body: String,
}

impl Svg {
    fn new() -> Self {
        Svg { body: String::new() }
    }

    fn path(&mut self, class: &str, pts: &[(f64, f64)], closed: bool) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.6} {:.6} ", if i == 0 { "M" } else { "L" }, x, -y);
        }
        if closed {
            d.push('Z');
        }
        let _ = writeln!(self.body, "<path class=\"{class}\" d=\"{}\"/>", d.trim_end());
    }

    fn circle(&mut self, class: &str, (x, y): (f64, f64), r: f64) {
        let _ = writeln!(self.body, "<circle class=\"{class}\" cx=\"{x:.6}\" cy=\"{:.6}\" r=\"{r:.6}\"/>", -y);
    }

    fn finish(self, title: &str) -> String {
        let mut s = String::new();
        s.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 2.2\" width=\"440\" height=\"440\">\n");
        let _ = writeln!(s, "<title>{title}</title>");
        let _ = writeln!(
            s,
            "<style>path, circle {{ fill: none; stroke: black; stroke-width: {STROKE} }} .tile {{ stroke: #3060a0 }} \
             .boundary {{ stroke-width: {} }} .vertex, .s-inf, .sample {{ fill: black }} .leaf-space {{ stroke: #c03030; stroke-width: {} }}</style>",
            2.0 * STROKE,
            3.0 * STROKE
        );
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

/// Order planar points counterclockwise about their centroid.
fn by_angle(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let k = pts.len() as f64;
    let (cx, cy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / k, a.1 + p.1 / k));
    pts.sort_by(|a, b| (a.1 - cy).atan2(a.0 - cx).total_cmp(&(b.1 - cy).atan2(b.0 - cx)));
    pts
}

fn planar_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p: Vec<(f64, f64)> = pts.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn chart(x: &Vector) -> Option<(f64, f64)> {
    (x[0] > 1e-9).then(|| (x[1] / x[0], x[2] / x[0]))
}

fn preserves_klein_form(gens: &[ProjMap]) -> bool {
    let q = Matrix::from_diagonal(&Vector::from_column_slice(&[1.0, -1.0, -1.0]));
    gens.iter().all(|g| (g.matrix().transpose() * &q * g.matrix() - &q).amax() <= 1e-9)
}

/// Tiles: the polygon of the samples under every word of length ≤ `depth`.
pub fn render_domain(scene: &SceneFile, depth: usize) -> Result<String> {
    if scene.n != 2 {
        return Err(Error::Unsupported(format!("domain mode needs n = 2, found n = {}", scene.n)));
    }
    if scene.samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let gens = scene.maps()?;
    let tile: Vec<Vector> = scene.samples.iter().map(|s| Vector::from_column_slice(s)).collect();
    let mut svg = Svg::new();
    let mut all = Vec::new();
    let mut tiles = Vec::new();
    for w in enumerate_words(&gens, depth) {
        let pts: Option<Vec<(f64, f64)>> = tile.iter().map(|x| chart(&(w.matrix.matrix() * x))).collect();
        if let Some(pts) = pts {
            all.extend(pts.iter().copied());
            tiles.push(by_angle(pts));
        }
    }
    if preserves_klein_form(&gens) || scene.metadata.get("domain").is_some_and(|d| d == "klein") {
        svg.circle("boundary", (0.0, 0.0), 1.0);
    } else {
        svg.path("boundary", &planar_hull(&all), true);
    }
    for t in &tiles {
        svg.path("tile", t, true);
    }
    if let Some(v) = chart(&Vector::from_column_slice(&scene.vertex)) {
        svg.circle("vertex", v, 0.015);
    }
    Ok(svg.finish(&format!("orbit tiles, {} words", tiles.len())))
}

/// Orthographic view of the hemisphere of the linking sphere around the
/// mean sample direction; the lineality directions sit on the rim.
pub fn render_link(scene: &SceneFile, depth: usize, tol: &Tol) -> Result<String> {
    if !(2..=3).contains(&scene.n) {
        return Err(Error::Unsupported(format!("link mode needs n ≤ 3, found n = {}", scene.n)));
    }
    if scene.samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let end = scene.to_end(tol)?;
    let link = link_domain(&end, depth.max(1), tol)?;
    let k = link.basis.ncols();
    let lin = link.hull.lineality().clone();
    let comp = lin.complement();
    let mut c = Vector::zeros(k);
    for d in &link.directions {
        c += comp.project(d);
    }
    if c.norm() < 1e-12 {
        c = comp.basis_vectors().first().cloned().unwrap_or_else(|| Vector::from_fn(k, |i, _| (i == 0) as u8 as f64));
    }
    let c = c.normalize();
    let frame = Subspace::span(std::slice::from_ref(&c), k, tol.subspace).complement().basis().clone();
    let view = |u: &Vector| -> (f64, f64) {
        let u = u.normalize();
        let x = frame.column(0).dot(&u);
        let y = if frame.ncols() > 1 { frame.column(1).dot(&u) } else { 0.0 };
        (x, y)
    };
    let mut svg = Svg::new();
    svg.circle("boundary", (0.0, 0.0), 1.0);
    let hull: Vec<(f64, f64)> = link.hull.extreme_rays().iter().map(&view).collect();
    if k == 2 {
        svg.path("tile", &by_x(hull), false);
    } else {
        svg.path("tile", &by_angle(hull), true);
    }
    for v in lin.basis_vectors() {
        svg.circle("s-inf", view(&v), 0.02);
        svg.circle("s-inf", view(&-v), 0.02);
    }
    if classify_link(&link.hull) == LinkClass::Npcc {
        if let Ok(f) = fiber_data(&end, &link, depth.max(1), tol) {
            let cb = f.s_inf.complement().basis().clone();
            let pts: Vec<(f64, f64)> = f.k.extreme_rays().iter().map(|r| view(&(&cb * r))).collect();
            svg.path("leaf-space", &by_angle(pts), f.k.ambient() > 2);
        }
    }
    for d in &link.directions {
        svg.circle("sample", view(d), 0.01);
    }
    Ok(svg.finish(&format!("link domain, class {}", classify_link(&link.hull).label())))
}

fn by_x(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}

pub fn render(scene: &SceneFile, mode: RenderMode, depth: usize, tol: &Tol) -> Result<String> {
    match mode {
        RenderMode::Domain => render_domain(scene, depth),
        RenderMode::Link => render_link(scene, depth, tol),
    }
}
