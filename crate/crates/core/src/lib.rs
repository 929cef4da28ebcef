//! Exact construction and certification of rigid monodromy representations
//! generated by pseudo-reflections on turbine manifolds (boundary complements
//! of weighted homogeneous plane curves).
//!
//! The crate provides:
//! - [`scalar`]: exact arithmetic in cyclotomic fields Q(zeta_N) and
//!   arbitrary-precision complex arithmetic with a global tolerance;
//! - [`linalg`]: dense exact linear algebra (rank, kernels, pseudo-reflection
//!   recognition, centralizer dimensions, spectrum certificates);
//! - [`group`]: turbine fundamental-group presentations as executable data;
//! - [`pochhammer`]: explicit pseudo-reflection tuples on the punctured sphere;
//! - [`construct`]: builders that realize prescribed numerical local data as
//!   matrix representations, with full postcondition verification;
//! - [`rigidity`]: rigidity-index computation and an irreducibility
//!   certificate for pseudo-reflection groups, plus a brute-force oracle.

pub mod error;
pub mod scalar;
pub mod linalg;
pub mod group;
pub mod pochhammer;
pub mod construct;
pub mod rigidity;
pub mod report;

pub use error::{Error, Result};
pub use scalar::{Scalar, ScalarField};
pub use linalg::SquareMatrix;
