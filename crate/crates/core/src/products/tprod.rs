use crate::circulant::{gamma, shift_matrix};
use crate::cubic::{CubicMatrix, Dims};
use crate::dense::{gemm_acc, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Ring;

pub(crate) fn tproduct_dims(a: Dims, b: Dims) -> Result<Dims> {
    if a.n != b.m || a.s != b.s {
        return Err(Error::shape(
            "t_product",
            format!("left is {a}, right is {b}: need left n = right m and equal slice counts"),
        ));
    }
    Ok(Dims { m: a.m, n: b.n, s: a.s })
}

/// `A ⋆ B`, slice `i` of the result is `Σ_j A^((i−j) mod s) B^(j)`.
pub fn t_product<R: Ring>(a: &CubicMatrix<R>, b: &CubicMatrix<R>) -> Result<CubicMatrix<R>> {
    a.ring().check_same(&b.ring(), "t_product")?;
    let dims = tproduct_dims(a.dims(), b.dims())?;
    let (m, n, p, s) = (a.dims().m, a.dims().n, b.dims().n, dims.s);
    let ring = a.ring();
    let mut data = vec![ring.zero(); dims.len()];
    for i in 0..s {
        let out = &mut data[i * m * p..(i + 1) * m * p];
        for j in 0..s {
            gemm_acc(ring, a.slice_data((i + s - j) % s), b.slice_data(j), out, m, n, p);
        }
    }
    Ok(CubicMatrix::from_parts(ring, dims, data))
}

/// `fold(Γ(A)·unfold(B))`.
pub fn t_product_via_gamma<R: Ring>(a: &CubicMatrix<R>, b: &CubicMatrix<R>) -> Result<CubicMatrix<R>> {
    a.ring().check_same(&b.ring(), "t_product")?;
    let dims = tproduct_dims(a.dims(), b.dims())?;
    CubicMatrix::fold(&gamma(a).matmul(&b.unfold())?, dims)
}

/// `Σ_i (T^i·unfold(A))·B^(i)` with `T` the block shift.
pub fn t_product_via_shifts<R: Ring>(a: &CubicMatrix<R>, b: &CubicMatrix<R>) -> Result<CubicMatrix<R>> {
    a.ring().check_same(&b.ring(), "t_product")?;
    let dims = tproduct_dims(a.dims(), b.dims())?;
    let ring = a.ring();
    let t = shift_matrix(ring, dims.s, dims.m);
    let mut col = a.unfold();
    let mut acc = DenseMatrix::zeros(ring, dims.s * dims.m, dims.n);
    for i in 0..dims.s {
        acc = acc.add(&col.matmul(&b.frontal_slice(i)?)?)?;
        col = t.matmul(&col)?;
    }
    CubicMatrix::fold(&acc, dims)
}
