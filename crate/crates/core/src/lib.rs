//! Hybridized cut finite elements for elliptic interface problems in 2D.
//!
//! Every subdomain of a polygonal partition and every component of the
//! interface skeleton carries its own continuous Lagrange space cut from a
//! background grid. Subdomains couple to the skeleton through symmetric
//! Nitsche terms, ghost-penalty face terms keep cut cells stable, and the
//! bulk unknowns can be eliminated subdomain by subdomain, leaving a Schur
//! complement system on the skeleton.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod forms;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
