use crate::circulant::gamma;
use crate::cubic::{CubicMatrix, Dims};
use crate::dense::{gemm_acc, DenseMatrix};
use crate::error::Result;
use crate::psi::{lcm, ones_col, psi};
use crate::scalar::Ring;

/// `A ⋉ B = A·Ψ_{n×p}·B`.
pub fn dkstp_mat<R: Ring>(a: &DenseMatrix<R>, b: &DenseMatrix<R>) -> Result<DenseMatrix<R>> {
    a.ring().check_same(&b.ring(), "dkstp")?;
    let p = psi(a.ring(), a.cols(), b.rows())?;
    a.matmul(&p)?.matmul(b)
}

/// `(A ⊗ J^T_{t/n})(B ⊗ J_{t/p})`, the definition-level expansion.
pub fn dkstp_mat_expanded<R: Ring>(a: &DenseMatrix<R>, b: &DenseMatrix<R>) -> Result<DenseMatrix<R>> {
    a.ring().check_same(&b.ring(), "dkstp")?;
    let ring = a.ring();
    let t = lcm(a.cols(), b.rows())?;
    let left = a.kron(&ones_col(ring, t / a.cols()).transpose())?;
    let right = b.kron(&ones_col(ring, t / b.rows()))?;
    left.matmul(&right)
}

pub(crate) fn stp_dims(a: Dims, b: Dims) -> Result<Dims> {
    Ok(Dims { m: a.m, n: b.n, s: lcm(a.s, b.s)? })
}

/// Each slice of `A·Ψ_{n×p}`.
fn slices_times_psi<R: Ring>(a: &CubicMatrix<R>, p: usize) -> Result<Vec<Vec<R::Elem>>> {
    let ring = a.ring();
    let Dims { m, n, s } = a.dims();
    let psi = psi(ring, n, p)?;
    Ok((0..s)
        .map(|k| {
            let mut out = vec![ring.zero(); m * p];
            gemm_acc(ring, a.slice_data(k), psi.data(), &mut out, m, n, p);
            out
        })
        .collect())
}

/// Cubic DK-STP: replicate both operands to `lcm(s, t)` slices, then
/// multiply slice by slice.
pub fn dkstp_cubic<R: Ring>(a: &CubicMatrix<R>, b: &CubicMatrix<R>) -> Result<CubicMatrix<R>> {
    a.ring().check_same(&b.ring(), "dkstp_cubic")?;
    let (da, db) = (a.dims(), b.dims());
    let dims = stp_dims(da, db)?;
    let (ra, rb) = (dims.s / da.s, dims.s / db.s);
    let ring = a.ring();
    let a_psi = slices_times_psi(a, db.m)?;
    let (m, p, q) = (da.m, db.m, db.n);
    let mut data = vec![ring.zero(); dims.len()];
    for k in 0..dims.s {
        let out = &mut data[k * m * q..(k + 1) * m * q];
        gemm_acc(ring, &a_psi[k / ra], b.slice_data(k / rb), out, m, p, q);
    }
    Ok(CubicMatrix::from_parts(ring, dims, data))
}

/// Cubic DK-STP evaluated by explicit replication and the expansion path.
pub fn dkstp_cubic_expanded<R: Ring>(a: &CubicMatrix<R>, b: &CubicMatrix<R>) -> Result<CubicMatrix<R>> {
    a.ring().check_same(&b.ring(), "dkstp_cubic")?;
    let theta = lcm(a.dims().s, b.dims().s)?;
    let ar = a.replicate_slices(theta / a.dims().s)?;
    let br = b.replicate_slices(theta / b.dims().s)?;
    let slices = ar
        .slices()
        .iter()
        .zip(br.slices().iter())
        .map(|(x, y)| dkstp_mat_expanded(x, y))
        .collect::<Result<Vec<_>>>()?;
    CubicMatrix::from_slices(&slices)
}

/// `A ⋉_* B`, slice `i` is `Σ_j Ã^((i−j) mod θ)·Ψ·B̃^(j)` over the
/// operands replicated to `θ = lcm(s, t)` slices.
pub fn t_stp<R: Ring>(a: &CubicMatrix<R>, b: &CubicMatrix<R>) -> Result<CubicMatrix<R>> {
    a.ring().check_same(&b.ring(), "t_stp")?;
    let (da, db) = (a.dims(), b.dims());
    let dims = stp_dims(da, db)?;
    let theta = dims.s;
    let (ra, rb) = (theta / da.s, theta / db.s);
    let ring = a.ring();
    let a_psi = slices_times_psi(a, db.m)?;
    let (m, p, q) = (da.m, db.m, db.n);
    let mut data = vec![ring.zero(); dims.len()];
    for i in 0..theta {
        let out = &mut data[i * m * q..(i + 1) * m * q];
        for j in 0..theta {
            let ka = (i + theta - j) % theta;
            gemm_acc(ring, &a_psi[ka / ra], b.slice_data(j / rb), out, m, p, q);
        }
    }
    Ok(CubicMatrix::from_parts(ring, dims, data))
}

/// `fold(Γ(Ã) ⋉ unfold(B̃))` with a single global Ψ.
pub fn t_stp_via_gamma<R: Ring>(a: &CubicMatrix<R>, b: &CubicMatrix<R>) -> Result<CubicMatrix<R>> {
    a.ring().check_same(&b.ring(), "t_stp")?;
    let dims = stp_dims(a.dims(), b.dims())?;
    let ar = a.replicate_slices(dims.s / a.dims().s)?;
    let br = b.replicate_slices(dims.s / b.dims().s)?;
    CubicMatrix::fold(&dkstp_mat(&gamma(&ar), &br.unfold())?, dims)
}
