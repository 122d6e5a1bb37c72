//! Time-dependent localized Hartree-Fock (TD-LHF) exchange potential.
//!
//! Two independent uses of the same integral equation live here:
//!
//! * the linear response of the homogeneous electron gas ([`response`]),
//!   which yields the dynamic exchange kernel `f_x(q, omega)`, the dielectric
//!   function and the exchange shear modulus, built on the closed-form and
//!   single-quadrature integrals in [`special`];
//! * a real-space, real-time solver for few electrons in one dimension
//!   ([`grid`]).
//!
//! [`oracle`] holds slow brute-force evaluators used to cross-check both.

// Guards such as `!(x > 0.0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod heg;
pub mod oracle;
pub mod quadrature;
pub mod response;
pub mod special;

pub use error::{Error, Result};
pub use heg::HegParams;
pub use quadrature::{QuadResult, QuadSpec};
