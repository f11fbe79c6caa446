//! The Ψ coupling matrix behind the dimension-keeping STP.

use num_integer::Integer;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Ring;

pub fn lcm(a: usize, b: usize) -> Result<usize> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidValue(format!("lcm of {a} and {b}: arguments must be positive")));
    }
    (a / a.gcd(&b))
        .checked_mul(b)
        .ok_or_else(|| Error::Overflow(format!("lcm({a}, {b}) exceeds usize")))
}

/// `Ψ_{n×p}`: entry `(i, j)` is the overlap length of the intervals
/// `((t/n)i, (t/n)(i+1)]` and `((t/p)j, (t/p)(j+1)]`, `t = lcm(n, p)`.
pub fn psi<R: Ring>(ring: R, n: usize, p: usize) -> Result<DenseMatrix<R>> {
    let t = lcm(n, p)?;
    let (a, b) = (t / n, t / p);
    Ok(DenseMatrix::from_fn(ring, n, p, |i, j| {
        let lo = (a * i).max(b * j);
        let hi = (a * (i + 1)).min(b * (j + 1));
        ring.from_i64(hi.saturating_sub(lo) as i64)
    }))
}

/// Column of `k` ones, `J_k`.
pub fn ones_col<R: Ring>(ring: R, k: usize) -> DenseMatrix<R> {
    DenseMatrix::from_fn(ring, k, 1, |_, _| ring.one())
}

/// `Ψ` through its 0/1 factorization `(I_n ⊗ J^T_{t/n})(I_p ⊗ J_{t/p})`.
pub fn psi_by_kron<R: Ring>(ring: R, n: usize, p: usize) -> Result<DenseMatrix<R>> {
    let t = lcm(n, p)?;
    let left = DenseMatrix::identity(ring, n).kron(&ones_col(ring, t / n).transpose())?;
    let right = DenseMatrix::identity(ring, p).kron(&ones_col(ring, t / p))?;
    left.matmul(&right)
}
