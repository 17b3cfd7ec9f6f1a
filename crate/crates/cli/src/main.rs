//! projends: classify, construct, render and inspect radial ends.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use projends::constructors::{
    bending, complete_affine_two_norm, cusp_group, hyperideal_end, quasi_join_group, quasi_lens_group, reseed_samples,
    BendKind, BendMode, BendSpec, CuspSpec, QuasiJoinSpec, QuasiLensGen,
};
use projends::convex::hilbert_distance;
use projends::duality::dual_cone;
use projends::ends::{classify_end, LinkClass, RadialEnd, DEFAULT_BALL};
use projends::projcore::{Matrix, ProjPoint, Vector};
use projends::render::{render, RenderMode};
use projends::scene::{entries, fmt_f64, report_text, DomainFile, SceneFile};
use projends::{Error, Tol};

#[derive(Parser)]
#[command(name = "projends", version, about = "Radial ends of convex real projective orbifolds")]
struct Cli {
    /// Worker threads for per-word computations (1 gives byte-identical output).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the end described by a scene file.
    Classify {
        scene: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BALL)]
        ball_length: usize,
        /// Tolerance overrides (`key = value` lines); PROJENDS_TOL takes precedence.
        #[arg(long)]
        tolerances: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a scene file for one of the example families.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        /// `key: value` parameter file.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw a scene as SVG.
    Render {
        scene: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        ball_length: usize,
    },
    /// Dual cone of a domain file.
    Dual {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hilbert distance between two interior points of a domain.
    Hilbert {
        #[arg(long)]
        domain: PathBuf,
        /// Homogeneous coordinates, comma or space separated.
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Cusp,
    Hyperideal,
    Quasilens,
    Quasijoin,
    Bend,
    /// Complete-affine end with two eigenvalue norms.
    TwoNorm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Link,
    Domain,
}

type CliResult<T> = std::result::Result<T, String>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn lib(e: Error) -> String {
    e.to_string()
}

struct Params {
    map: BTreeMap<String, Vec<(usize, String)>>,
}

impl Params {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut map: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
        if let Some(p) = path {
            for (line, k, v) in entries(&read(p)?).map_err(lib)? {
                map.entry(k).or_default().push((line, v));
            }
        }
        Ok(Params { map })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let list = self.map.get_mut(key)?;
        if list.len() > 1 {
            return Some(list.remove(0));
        }
        self.map.remove(key).and_then(|mut l| l.pop())
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str, default: T) -> CliResult<T> {
        match self.take(key) {
            None => Ok(default),
            Some((line, v)) => v.parse().map_err(|_| format!("params line {line}: {key}: cannot parse {v:?}")),
        }
    }

    fn text(&mut self, key: &str, default: &str) -> String {
        self.take(key).map_or_else(|| default.to_string(), |(_, v)| v)
    }

    fn vectors(&mut self, key: &str) -> CliResult<Vec<Vec<f64>>> {
        let mut out = Vec::new();
        while let Some((line, v)) = self.take(key) {
            out.push(parse_coords(&v).map_err(|e| format!("params line {line}: {key}: {e}"))?);
        }
        Ok(out)
    }

    fn finish(self) -> CliResult<()> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((k, v)) => Err(format!("params line {}: unknown parameter `{k}`", v[0].0)),
        }
    }
}

fn parse_coords(s: &str) -> CliResult<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad number {t:?}")))
        .collect()
}

fn construct(family: Family, params: Option<&Path>, seed: u64, tol: &Tol) -> CliResult<SceneFile> {
    let mut p = Params::load(params)?;
    let mut meta = BTreeMap::new();
    let end: RadialEnd = match family {
        Family::Cusp => {
            let n: usize = p.num("n", 3)?;
            let lattice = p.vectors("lattice")?;
            let spec = if lattice.is_empty() {
                CuspSpec::standard(n)
            } else {
                CuspSpec { n, lattice: lattice.into_iter().map(Vector::from_vec).collect() }
            };
            meta.insert("family".into(), "cusp".into());
            cusp_group(&spec, tol).map_err(lib)?
        }
        Family::Hyperideal => {
            let lambda: f64 = p.num("lambda", 2.0)?;
            let mu: f64 = p.num("mu", 3.0)?;
            meta.insert("family".into(), "hyperideal".into());
            hyperideal_end(lambda, mu, tol).map_err(lib)?
        }
        Family::Quasilens => {
            let s: f64 = p.num("s", 0.5)?;
            let lambda_v: f64 = p.num("lambda_v", 1.0)?;
            let v: f64 = p.num("v", 1.0)?;
            let g = QuasiLensGen { s: Matrix::from_element(1, 1, s), lambda_v, v };
            let zeta = QuasiLensGen { s: Matrix::from_element(1, 1, 1.0), lambda_v: 1.0, v: 0.0 };
            meta.insert("family".into(), "quasilens".into());
            quasi_lens_group(&[g], &zeta, tol).map_err(lib)?
        }
        Family::Quasijoin => {
            let n: usize = p.num("n", 4)?;
            let i0: usize = p.num("i0", 1)?;
            let kappa: f64 = p.num("kappa", 0.5)?;
            meta.insert("family".into(), "quasijoin".into());
            meta.insert("i0".into(), i0.to_string());
            quasi_join_group(&QuasiJoinSpec::standard(n, i0, kappa).map_err(lib)?, tol).map_err(lib)?
        }
        Family::TwoNorm => {
            let n: usize = p.num("n", 3)?;
            let beta: f64 = p.num("beta", 0.3)?;
            let t: f64 = p.num("t", 1.0)?;
            meta.insert("family".into(), "two-norm".into());
            complete_affine_two_norm(n, beta, t, tol).map_err(lib)?
        }
        Family::Bend => {
            let base = match p.take("scene") {
                Some((_, path)) => SceneFile::parse(&read(Path::new(&path))?).map_err(lib)?.to_end(tol).map_err(lib)?,
                None => {
                    let lambda: f64 = p.num("base_lambda", 2.0)?;
                    let mu: f64 = p.num("base_mu", 3.0)?;
                    hyperideal_end(lambda, mu, tol).map_err(lib)?
                }
            };
            let lambda: f64 = p.num("lambda", 2.0)?;
            let kind = match p.text("kind", "shear").as_str() {
                "shear" => BendKind::Shear(p.num("b", 0.0)?),
                "scale" => BendKind::Scale(p.num("s", 1.0)?),
                k => return Err(format!("unknown bending kind `{k}` (shear or scale)")),
            };
            let mode = match p.text("mode", "conjugate").as_str() {
                "conjugate" => BendMode::Conjugate,
                "stable" => BendMode::StableLetter,
                m => return Err(format!("unknown bending mode `{m}` (conjugate or stable)")),
            };
            let partition: Vec<usize> = match p.take("partition") {
                None => vec![1],
                Some((line, v)) => v
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse().map_err(|_| format!("params line {line}: partition: bad index {t:?}")))
                    .collect::<CliResult<_>>()?,
            };
            meta.insert("family".into(), "bend".into());
            bending(&BendSpec { lambda, kind, partition, mode }, &base, tol).map_err(lib)?.1
        }
    };
    p.finish()?;
    let end = reseed_samples(&end, seed, tol).map_err(lib)?;
    meta.insert("seed".into(), seed.to_string());
    Ok(SceneFile::from_end(&end, meta))
}

fn run(cli: Cli) -> CliResult<u8> {
    if cli.threads == 0 {
        return Err("--threads must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global().map_err(|e| e.to_string())?;
    match cli.cmd {
        Cmd::Classify { scene, ball_length, tolerances, report } => {
            if ball_length == 0 {
                return Err("--ball-length must be at least 1".into());
            }
            let tol = Tol::resolve(tolerances.as_deref()).map_err(lib)?;
            let scene = SceneFile::parse(&read(&scene)?).map_err(|e| format!("{}: {e}", scene.display()))?;
            let end = scene.to_end(&tol).map_err(lib)?;
            let r = classify_end(&end, ball_length, &tol);
            let text = report_text(&r);
            match report {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(if matches!(r.trichotomy, LinkClass::Indeterminate(_)) { 2 } else { 0 })
        }
        Cmd::Construct { family, params, out, seed } => {
            let tol = Tol::resolve(None).map_err(lib)?;
            let scene = construct(family, params.as_deref(), seed, &tol)?;
            write(&out, &scene.to_text())?;
            Ok(0)
        }
        Cmd::Render { scene, mode, out, ball_length } => {
            let tol = Tol::resolve(None).map_err(lib)?;
            let scene = SceneFile::parse(&read(&scene)?).map_err(|e| format!("{}: {e}", scene.display()))?;
            let mode = match mode {
                Mode::Link => RenderMode::Link,
                Mode::Domain => RenderMode::Domain,
            };
            write(&out, &render(&scene, mode, ball_length, &tol).map_err(lib)?)?;
            Ok(0)
        }
        Cmd::Dual { input, out } => {
            let tol = Tol::resolve(None).map_err(lib)?;
            let d = DomainFile::parse(&read(&input)?).map_err(|e| format!("{}: {e}", input.display()))?;
            let dual = dual_cone(&d.to_body(&tol).map_err(lib)?, &tol).map_err(lib)?;
            write(&out, &DomainFile::from_body(&dual).to_text())?;
            Ok(0)
        }
        Cmd::Hilbert { domain, p, q } => {
            let tol = Tol::resolve(None).map_err(lib)?;
            let d = DomainFile::parse(&read(&domain)?).map_err(|e| format!("{}: {e}", domain.display()))?;
            let body = d.to_body(&tol).map_err(lib)?;
            let p = ProjPoint::from_slice(&parse_coords(&p).map_err(|e| format!("--p: {e}"))?).map_err(lib)?;
            let q = ProjPoint::from_slice(&parse_coords(&q).map_err(|e| format!("--q: {e}"))?).map_err(lib)?;
            println!("{}", fmt_f64(hilbert_distance(&body, &p, &q, &tol).map_err(lib)?));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
