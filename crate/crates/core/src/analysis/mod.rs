//! Polynomials and analytic functions of cubic matrices, characteristic
//! polynomials and t-eigenvalues.

mod series;
mod spectral;

pub use series::{
    analytic_eval, analytic_eval_extended, dense_series_eval, named_series, partial_sum, PowerSeries,
    TruncationPolicy, SERIES_NAMES,
};
pub use spectral::{
    cayley_hamilton_residual, char_poly, eigenvalues, hessenberg, hqr, real_eigenvector, t_eigen, SpectralResult,
};

pub(crate) use series::check_radius;

use crate::cubic::CubicMatrix;
use crate::error::{Error, Result};
use crate::products::ProductKind;
use crate::scalar::Ring;

/// `p(A) = c_0·I + Σ c_k A^k` with ascending coefficients, by a Horner
/// scheme that needs the identity only for the constant term.
pub fn poly_eval<R: Ring>(coeffs: &[R::Elem], a: &CubicMatrix<R>, kind: ProductKind) -> Result<CubicMatrix<R>> {
    let ring = a.ring();
    if kind == ProductKind::TProduct && !a.dims().is_square() {
        return Err(Error::shape("poly_eval", format!("t-product powers need square slices, got {}", a.dims())));
    }
    let mut acc = CubicMatrix::zeros(ring, a.dims());
    for &c in coeffs.iter().skip(1).rev() {
        // acc <- c·A + acc·A
        let next = if acc.is_zero() { acc.clone() } else { kind.apply(&acc, a)? };
        acc = next.add(&a.scale(c))?;
    }
    match coeffs.first() {
        Some(&c0) if !ring.is_zero(c0) => {
            let id = kind.identity_for(ring, a.dims()).map_err(|_| {
                Error::shape("poly_eval", format!("nonzero constant term needs square slices, got {}", a.dims()))
            })?;
            acc.add(&id.scale(c0))
        }
        _ => Ok(acc),
    }
}

#[cfg(test)]
mod tests;
