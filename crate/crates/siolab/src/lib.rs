//! siolab is a numerical laboratory for singular integral operators on
//! discretized domain boundaries and for generalized Holder moduli of
//! continuity.
//!
//! The crate is organized around six core modules and a harness:
//!
//! * [`growth`]: growth functions omega on (0, D), their extensions, Zygmund
//!   transforms, tail integrals W, dilation functions and dilation indices.
//! * [`clifford`]: the real Clifford algebra Cl_n with blade-indexed
//!   multivectors, geometric product, conjugation, and Euclidean norm.
//! * [`geometry`]: boundary meshes for model domains (disk, ellipse, star,
//!   teardrop, sphere) with exact normals and quadrature weights, plus
//!   Ahlfors-regularity and pseudo-ball diagnostics.
//! * [`holder`]: generalized Holder seminorm estimation for sampled fields.
//! * [`kernels`]: Riesz kernels, odd homogeneous polynomial kernels, the
//!   planar Cauchy field, the Cauchy-Clifford kernel, spherical means, and
//!   harmonic decomposition of polynomials.
//! * [`operators`]: boundary-to-domain potentials, principal-value boundary
//!   operators via the subtraction formula, nontangential traces, and the
//!   identity checks tying them together.
//! * [`experiments`]: config-driven experiment runner behind the `siolab`
//!   command line tool.
//!
//! # Example
//!
//! Verify the principal-value Riesz transform of the constant 1 on the unit
//! circle against its closed form x_j / 2:
//!
//! ```
//! use siolab::geometry::{build_mesh, DomainSpec};
//! use siolab::holder::BoundaryField;
//! use siolab::operators::{pv_boundary, OperatorKind, OperatorSpec, Side};
//!
//! let mesh = build_mesh(&DomainSpec::Disk { r: 1.0 }, 256).unwrap();
//! let one = BoundaryField::constant(&mesh, 1.0);
//! let op = OperatorSpec::new(OperatorKind::Riesz { j: 1 }, Side::Interior);
//! let r1 = pv_boundary(&op, &mesh, &one).unwrap();
//! for (i, node) in mesh.nodes.iter().enumerate() {
//!     let expected = node[0] / 2.0;
//!     assert!((r1.scalar(i) - expected).abs() < 1e-12);
//! }
//! ```

pub mod clifford;
pub mod config;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod growth;
pub mod holder;
pub mod kernels;
pub mod operators;
pub mod plot;
pub mod quad;
pub mod report;

pub use error::{Error, Result};

// The guide's chapters double as doc-tests: every Rust block under
// book/src compiles and runs against the current API, so the book cannot
// drift from the crate.
#[cfg(doctest)]
#[doc(hidden)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/growth-functions.md")]
    pub mod growth_functions {}
    #[doc = include_str!("../../../book/src/clifford-algebra.md")]
    pub mod clifford_algebra {}
    #[doc = include_str!("../../../book/src/boundary-meshes.md")]
    pub mod boundary_meshes {}
    #[doc = include_str!("../../../book/src/holder-seminorms.md")]
    pub mod holder_seminorms {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    pub mod kernels {}
    #[doc = include_str!("../../../book/src/operators.md")]
    pub mod operators {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
}
