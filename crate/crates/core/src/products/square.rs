use crate::circulant::gamma;
use crate::cubic::CubicMatrix;
use crate::dense::DenseMatrix;
use crate::error::Result;
use crate::products::bracket;
use crate::psi::lcm;
use crate::scalar::Real;

/// `□M = M ⊗ E_{t/m × t/n}` with `E_{a×b} = J_{a×b}/√(ab)` and `t = lcm(m, n)`.
pub fn box_square(m: &DenseMatrix<Real>) -> Result<DenseMatrix<Real>> {
    let (r, c) = m.shape();
    let t = lcm(r, c)?;
    let (a, b) = (t / r, t / c);
    let w = 1.0 / ((a * b) as f64).sqrt();
    m.kron(&DenseMatrix::from_fn(Real, a, b, |_, _| w))
}

/// `π = □ ∘ Γ`.
pub fn pi_map(a: &CubicMatrix<Real>) -> Result<DenseMatrix<Real>> {
    box_square(&gamma(a))
}

/// `‖π([A,B]_*) − [π(A), π(B)]‖_F`, with the ordinary commutator on the right.
pub fn bracket_residual(a: &CubicMatrix<Real>, b: &CubicMatrix<Real>) -> Result<f64> {
    let lhs = pi_map(&bracket(a, b)?)?;
    let (pa, pb) = (pi_map(a)?, pi_map(b)?);
    let rhs = pa.matmul(&pb)?.sub(&pb.matmul(&pa)?)?;
    Ok(lhs.sub(&rhs)?.frobenius_norm())
}
