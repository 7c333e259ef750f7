//! Magnetic field of uniformly magnetized cylindrical tiles.
//!
//! The tensor field `N` relates magnetization to flux density through
//! `B = (μ0/4π) N M`. It is assembled from surface integrals of the kernel
//! gradient, most in closed form via incomplete elliptic integrals, three
//! with one numeric quadrature. [`oracle`] provides independent brute-force
//! references.
//!
//! ```
//! use cyltile::{field_at, Tile};
//! use nalgebra::Vector3;
//!
//! let tile = Tile::new((1.0e-3, 2.0e-3), (0.0, 0.5), (-0.5e-3, 0.5e-3))
//!     .unwrap()
//!     .with_magnetization(Vector3::new(0.0, 0.0, 1.0e6))
//!     .unwrap();
//! let s = field_at(&[tile], &Vector3::new(3.0e-3, 0.5e-3, 0.2e-3)).unwrap();
//! assert!(s.b.z.is_finite() && !s.inside);
//! ```

pub mod geometry;
pub mod integrals;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod tensor;

pub use geometry::{
    canonicalize, magnetization_from_tesla, rotate_tensor_back, CanonicalPoint, Containment, EvalPoint, Tensor3,
    Tile, TileError, MU0,
};
pub use integrals::{CanonicalArgs, GuardCondition, GuardReport, IntegralError};
pub use quadrature::{Estimate, QuadratureError, QuadratureSpec};
pub use tensor::{
    field_at, field_at_with, field_batch, tensor_at, tensor_at_with, tensor_symmetry_check, EvalOptions,
    FieldSample, Provenance, TensorError, TensorEval,
};
