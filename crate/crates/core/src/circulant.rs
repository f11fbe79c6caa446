//! The shift operator and the block-circulant map Γ.

use crate::cubic::{CubicMatrix, Dims};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Ring;

/// `T = M ⊗ I_m` where `M` is the `s × s` cyclic down-shift.
pub fn shift_matrix<R: Ring>(ring: R, s: usize, m: usize) -> DenseMatrix<R> {
    DenseMatrix::from_fn(ring, s * m, s * m, |r, c| {
        let (bi, ii) = (r / m, r % m);
        let (bj, jj) = (c / m, c % m);
        if ii == jj && bi == (bj + 1) % s {
            ring.one()
        } else {
            ring.zero()
        }
    })
}

/// `Γ(A)`: the `sm × sn` block-circulant matrix with block `(i, j) = A^((i−j) mod s)`.
pub fn gamma<R: Ring>(a: &CubicMatrix<R>) -> DenseMatrix<R> {
    let Dims { m, n, s } = a.dims();
    let mut out = DenseMatrix::zeros(a.ring(), s * m, s * n);
    for bi in 0..s {
        for bj in 0..s {
            let k = (bi + s - bj) % s;
            let slice = a.slice_data(k);
            for i in 0..m {
                for j in 0..n {
                    out.set(bi * m + i, bj * n + j, slice[i * n + j]);
                }
            }
        }
    }
    out
}

/// Recovers the cubic matrix from the first block column of `mat`.
///
/// With `strict`, every block is checked against the circulant pattern:
/// exactly for exact rings, within `1e-9·‖M‖` otherwise.
pub fn gamma_inverse<R: Ring>(mat: &DenseMatrix<R>, dims: Dims, strict: bool) -> Result<CubicMatrix<R>> {
    let Dims { m, n, s } = dims;
    if mat.shape() != (s * m, s * n) {
        return Err(Error::shape(
            "gamma_inverse",
            format!("{dims} needs a {}x{} matrix, got {}x{}", s * m, s * n, mat.rows(), mat.cols()),
        ));
    }
    let ring = mat.ring();
    let out = CubicMatrix::from_fn(ring, dims, |i, j, k| mat.get(k * m + i, j));
    if strict {
        let tol = if ring.is_exact() {
            0.0
        } else {
            1e-9 * ring.norm(mat.data()).unwrap_or(0.0)
        };
        for bi in 0..s {
            for bj in 0..s {
                let k = (bi + s - bj) % s;
                for i in 0..m {
                    for j in 0..n {
                        let got = mat.get(bi * m + i, bj * n + j);
                        let want = out.get(i, j, k);
                        let bad = if ring.is_exact() {
                            got != want
                        } else {
                            (ring.to_f64(got) - ring.to_f64(want)).abs() > tol
                        };
                        if bad {
                            return Err(Error::Structure(format!(
                                "block ({}, {}) entry ({i}, {j}) is {:?}, circulant pattern expects {:?}",
                                bi + 1,
                                bj + 1,
                                got,
                                want
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
