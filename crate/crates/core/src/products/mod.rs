//! The t-product, the dimension-keeping STP and the t-STP, with powers,
//! brackets, extended-ring elements and inverses.

mod extended;
mod inverse;
mod square;
mod stp;
mod tprod;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use extended::{ExtendedCubic, ExtendedMatrix};
pub use inverse::{inverse_tstp, is_invertible_tstp, DenseInverse};
pub use square::{box_square, bracket_residual, pi_map};
pub use stp::{dkstp_cubic, dkstp_cubic_expanded, dkstp_mat, dkstp_mat_expanded, t_stp, t_stp_via_gamma};
pub use tprod::{t_product, t_product_via_gamma, t_product_via_shifts};

use crate::cubic::{CubicMatrix, Dims};
use crate::error::{Error, Result};
use crate::scalar::Ring;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProductKind {
    #[serde(rename = "tprod")]
    TProduct,
    #[serde(rename = "dkstp")]
    DkStp,
    #[serde(rename = "tstp")]
    TStp,
}

impl ProductKind {
    pub const ALL: [ProductKind; 3] = [ProductKind::TProduct, ProductKind::DkStp, ProductKind::TStp];

    pub fn apply<R: Ring>(self, a: &CubicMatrix<R>, b: &CubicMatrix<R>) -> Result<CubicMatrix<R>> {
        match self {
            ProductKind::TProduct => t_product(a, b),
            ProductKind::DkStp => dkstp_cubic(a, b),
            ProductKind::TStp => t_stp(a, b),
        }
    }

    /// Dimensions of `a * b` under this product, or a shape error.
    pub fn result_dims(self, a: Dims, b: Dims) -> Result<Dims> {
        match self {
            ProductKind::TProduct => tprod::tproduct_dims(a, b),
            ProductKind::DkStp | ProductKind::TStp => stp::stp_dims(a, b),
        }
    }

    /// Concrete two-sided identity for `n × n × s` operands.
    pub fn identity<R: Ring>(self, ring: R, n: usize, s: usize) -> CubicMatrix<R> {
        match self {
            ProductKind::TProduct | ProductKind::TStp => CubicMatrix::identity_t(ring, n, s),
            ProductKind::DkStp => CubicMatrix::ones_stack(ring, n, n, s),
        }
    }

    /// Identity matching `dims`; only concrete when the slices are square.
    pub fn identity_for<R: Ring>(self, ring: R, dims: Dims) -> Result<CubicMatrix<R>> {
        if dims.m != dims.n {
            return Err(Error::Unsupported(format!(
                "identity for {dims} under {self} is formal (m != n)"
            )));
        }
        Ok(self.identity(ring, dims.n, dims.s))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProductKind::TProduct => "tprod",
            ProductKind::DkStp => "dkstp",
            ProductKind::TStp => "tstp",
        }
    }
}

impl fmt::Display for ProductKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProductKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tprod" => Ok(ProductKind::TProduct),
            "dkstp" => Ok(ProductKind::DkStp),
            "tstp" => Ok(ProductKind::TStp),
            other => Err(Error::Parse(format!("unknown product kind {other:?} (expected tprod, dkstp or tstp)"))),
        }
    }
}

/// Left-associated power `((A·A)·A)…`. `k = 0` gives the identity and is
/// only available for square slices.
pub fn power<R: Ring>(a: &CubicMatrix<R>, k: usize, kind: ProductKind) -> Result<CubicMatrix<R>> {
    let dims = a.dims();
    if kind == ProductKind::TProduct && !dims.is_square() {
        return Err(Error::shape("power", format!("t-product powers need square slices, got {dims}")));
    }
    if k == 0 {
        return kind.identity_for(a.ring(), dims);
    }
    let mut acc = a.clone();
    for _ in 1..k {
        acc = kind.apply(&acc, a)?;
    }
    Ok(acc)
}

/// `[A, B]_* = A ⋉_* B − B ⋉_* A`.
pub fn bracket<R: Ring>(a: &CubicMatrix<R>, b: &CubicMatrix<R>) -> Result<CubicMatrix<R>> {
    if a.dims() != b.dims() {
        return Err(Error::shape("bracket", format!("left is {}, right is {}", a.dims(), b.dims())));
    }
    t_stp(a, b)?.sub(&t_stp(b, a)?)
}
