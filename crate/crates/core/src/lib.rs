//! High-precision arithmetic for the completed Riemann zeta function and a
//! formal constant-term calculus for spherical Eisenstein series on split
//! orthogonal groups.
//!
//! The crate is organized in layers:
//!
//! - [`precision`], [`laurent`]: working-precision contexts and truncated
//!   Laurent expansions at exact rational centers;
//! - [`zeta`], [`gamma`]: Euler–Maclaurin Taylor/Laurent data for ζ(s) and
//!   the archimedean factor π^{-s/2}Γ(s/2);
//! - [`xi`]: the completed zeta function ξ(s) = π^{-s/2}Γ(s/2)ζ(s) with the
//!   residue conventions ξ(0) := Res₀ ξ, ξ(1) := Res₁ ξ;
//! - [`factor`]: formal products of shifted ξ factors (the meromorphic
//!   combinations F, G, H, β, λ and the doubling normalizer d_m^S);
//! - [`constants`]: the named Siegel-Weil constants c_{m,r}, c_r, d_{m,r},
//!   a_{m,r}, b_{m,r}, κ, each computed by at least two routes;
//! - [`calculus`]: the symbolic engine that expands constant terms along the
//!   rank-one parabolic, grades by |a|-exponent and log-degree, substitutes
//!   established identities, and re-derives the first/second term identities
//!   with per-bucket numeric residuals.

pub mod calculus;
pub mod constants;
pub mod error;
pub mod factor;
pub mod gamma;
pub mod laurent;
pub mod precision;
pub mod xi;
pub mod zeta;

pub use error::{Error, Result};
pub use laurent::{ls_arith, LaurentSeries, LsOp};
pub use precision::PrecisionContext;
