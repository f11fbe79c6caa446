use crate::circulant::{gamma, gamma_inverse};
use crate::cubic::CubicMatrix;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Modular, Real, Ring};

/// Rings whose dense matrices can be inverted.
pub trait DenseInverse: Ring {
    fn dense_inverse(m: &DenseMatrix<Self>) -> Result<DenseMatrix<Self>>;
}

impl DenseInverse for Real {
    fn dense_inverse(m: &DenseMatrix<Real>) -> Result<DenseMatrix<Real>> {
        m.inverse()
    }
}

impl DenseInverse for Modular {
    fn dense_inverse(m: &DenseMatrix<Modular>) -> Result<DenseMatrix<Modular>> {
        m.inverse_mod()
    }
}

fn require_square<R: Ring>(a: &CubicMatrix<R>) -> Result<()> {
    if a.dims().is_square() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "inverse of non-square slices ({}) is not provided",
            a.dims()
        )))
    }
}

pub fn is_invertible_tstp<R: DenseInverse>(a: &CubicMatrix<R>) -> Result<bool> {
    require_square(a)?;
    match R::dense_inverse(&gamma(a)) {
        Ok(_) => Ok(true),
        Err(Error::Singular(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// `Γ^{-1}(Γ(A)^{-1})`; the inverse of a block circulant is block circulant.
pub fn inverse_tstp<R: DenseInverse>(a: &CubicMatrix<R>) -> Result<CubicMatrix<R>> {
    require_square(a)?;
    let inv = R::dense_inverse(&gamma(a))?;
    gamma_inverse(&inv, a.dims(), false)
}
