//! Cubic matrices (order-3 arrays) and their algebra.
//!
//! A cubic matrix `A ∈ R^{m×n×s}` is identified with its unfold, the
//! `sm × n` matrix of stacked frontal slices. Three products are provided:
//! the t-product `⋆`, the dimension-keeping semi-tensor product `⋉` and
//! the t-STP `⋉_*`. On top of them sit analytic functions, spectral tools,
//! linear and nonlinear dynamic systems, and a supply-chain evolutionary
//! game over `Z_12`.
//!
//! ```
//! use tcube::{CubicMatrix, Dims, ProductKind, Real};
//!
//! let a = CubicMatrix::from_fn(Real, Dims::new(2, 2, 3).unwrap(), |i, j, k| (i + j + k) as f64);
//! let id = CubicMatrix::identity_t(Real, 2, 3);
//! assert_eq!(ProductKind::TProduct.apply(&a, &id).unwrap(), a);
//! ```

pub mod analysis;
pub mod circulant;
pub mod cubic;
pub mod dense;
pub mod error;
pub mod hypernet;
pub mod io;
pub mod products;
pub mod psi;
pub mod random;
pub mod scalar;
pub mod systems;

pub use circulant::{gamma, gamma_inverse, shift_matrix};
pub use cubic::{CubicMatrix, Dims};
pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use products::ProductKind;
pub use psi::psi;
pub use scalar::{Modular, Real, Ring, ScalarDomain};
