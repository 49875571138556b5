//! Harmonic measure of continua dividing the unit disk.
//!
//! The crate computes `omega(a_k, E, D_k)` for a continuum `E` that splits the
//! disk into domains `D_k` with marked points `a_k` on `|z| = rho`, evaluates
//! the inequality
//!
//! ```text
//! (1/n) sum_k psi(omega_k) >= -n log rho,   psi(x) = log((1 + sin(pi x/2)) / (1 - sin(pi x/2)))
//! ```
//!
//! together with the closed forms behind it, and searches bent stars for
//! configurations that beat the star `{z : z^n in [-1, 0]}`.
//!
//! - [`geometry`]: continua, distance queries, configuration checks.
//! - [`conformal`]: disk automorphisms, the slit-complement map, inner radii.
//! - [`harmonic`]: exact arc measures and the walk-on-spheres estimator.
//! - [`bound`]: `psi`, bound reports and the integral identities.
//! - [`search`]: Nelder–Mead over star perturbations.
//!
//! Sample loops run on rayon when the default `parallel` feature is on;
//! results are bit-identical either way.

pub mod bound;
pub mod conformal;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod quadrature;
pub mod search;

pub use error::{Error, Result};
