//! Computational tools for radial ends of convex real projective orbifolds.
//!
//! Points live on the projective sphere Sⁿ (antipodes are distinct), domains are
//! cones given by generator rays, and holonomy elements are matrices rescaled to
//! |det| = 1.

pub mod constructors;
pub mod convex;
pub mod duality;
pub mod ends;
mod error;
pub mod lp;
pub mod projcore;
pub mod render;
pub mod scene;
pub mod spectra;
pub mod tol;

pub use error::{Error, Result};
pub use tol::Tol;
