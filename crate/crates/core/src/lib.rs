//! Popa groups, their Haar measures and transforms, the additive-kernel
//! family between Popa groups, and numerical tools for general regular
//! variation: limit estimation, index recovery, Beck sums and
//! subadditivity checks.

pub mod asymptotics;
pub mod error;
pub mod haar;
pub mod kernels;
pub mod popa;
pub mod quadrature;
pub mod subadd;

pub use error::{Error, Result};
pub use kernels::KernelParams;
pub use popa::{PopaParam, PopaPoint};
pub use quadrature::{Integral, QuadratureSpec};
