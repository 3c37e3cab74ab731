//! Null curves in anti-de Sitter 3-space and their evolution under the
//! LIEN hierarchy, a family of curve flows that induce the KdV hierarchy
//! on the bending.
//!
//! Modules, bottom-up:
//! - [`specfun`]: elliptic integrals, Jacobi functions, local Heun function
//! - [`jetalg`]: exact differential polynomials (Lenard recursion, Lax pairs)
//! - [`lame`]: Floquet theory of the order-one Lame equation
//! - [`kdvsol`]: stationary and KKSH closed-form KdV solutions
//! - [`nullcurve`]: frames, curves, evolution, monodromy classification

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extended;
pub mod jetalg;
pub mod kdvsol;
pub mod lame;
pub mod linalg;
pub mod nullcurve;
pub mod ode;
pub mod series;
pub mod specfun;

pub use error::{CurveError, DomainError, HeunError, JetError, KdvError, LameError, OdeError};
pub use linalg::{ads_inner, Mat2, Spacetime22, Unimodular2};
pub use specfun::EllipticParameter;
