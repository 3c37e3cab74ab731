//! Special functions: complete elliptic integrals, Jacobi elliptic
//! functions and the local Heun function on the real segment [0, 1].

pub mod elliptic;
pub mod heun;

pub use elliptic::{complete_elliptic, ellip_e, ellip_k, jacobi_sncndn, EllipticParameter, Sncndn};
pub use heun::{heun_limit_at_one, heun_local, heun_local_with_derivative, heun_pair, HeunLimit, HeunParams};
