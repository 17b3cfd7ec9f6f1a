//! Tolerance configuration.
//!
//! A tolerance file holds `key = value` lines (`#` starts a comment). The
//! environment variable `PROJENDS_TOL` names a tolerance file that takes
//! precedence over one passed explicitly.

use crate::{Error, Result};

pub const ENV_VAR: &str = "PROJENDS_TOL";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    /// Point equality.
    pub eq: f64,
    /// Subspace membership and invariance residuals.
    pub subspace: f64,
    /// Normalization at construction.
    pub normalize: f64,
    /// Relative tolerance grouping eigenvalue norms into classes.
    pub norm_class: f64,
    /// Norm gaps in (norm_class, gap_indeterminate) are indeterminate.
    pub gap_indeterminate: f64,
    /// Minimum facet slack of an interior point.
    pub interior: f64,
    /// Double-description degeneracy threshold.
    pub dd: f64,
    /// Relative margin for strict eigenvalue inequalities.
    pub mec_slack: f64,
    /// Unit-norm deviation allowed for horospherical ends.
    pub horo: f64,
    /// Common fixed point search when re-vertexing.
    pub revertex: f64,
    /// α₇ vanishing threshold.
    pub alpha7: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol {
            eq: 1e-9,
            subspace: 1e-8,
            normalize: 1e-12,
            norm_class: 1e-7,
            gap_indeterminate: 1e-4,
            interior: 1e-9,
            dd: 1e-10,
            mec_slack: 1e-9,
            horo: 1e-7,
            revertex: 1e-7,
            alpha7: 1e-8,
        }
    }
}

impl Tol {
    pub fn parse(text: &str) -> Result<Tol> {
        let mut t = Tol::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let (k, v) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| err(format!("bad number `{}`", v.trim())))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(err(format!("tolerance must be positive, got {v}")));
            }
            let slot = match k.trim() {
                "eq" => &mut t.eq,
                "subspace" => &mut t.subspace,
                "normalize" => &mut t.normalize,
                "norm_class" => &mut t.norm_class,
                "gap_indeterminate" => &mut t.gap_indeterminate,
                "interior" => &mut t.interior,
                "dd" => &mut t.dd,
                "mec_slack" => &mut t.mec_slack,
                "horo" => &mut t.horo,
                "revertex" => &mut t.revertex,
                "alpha7" => &mut t.alpha7,
                other => return Err(err(format!("unknown tolerance `{other}`"))),
            };
            *slot = v;
        }
        Ok(t)
    }

    /// Resolve tolerances: `PROJENDS_TOL` wins over `file`, defaults otherwise.
    pub fn resolve(file: Option<&std::path::Path>) -> Result<Tol> {
        let env = std::env::var_os(ENV_VAR).filter(|s| !s.is_empty());
        let path = env.as_deref().map(std::path::Path::new).or(file);
        match path {
            None => Ok(Tol::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Parse {
                    line: 0,
                    msg: format!("{}: {e}", p.display()),
                })?;
                Tol::parse(&text)
            }
        }
    }
}
