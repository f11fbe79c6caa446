use rand::Rng as _;

use crate::cubic::{CubicMatrix, Dims};
use crate::error::{Error, Result};
use crate::products::ProductKind;
use crate::random;
use crate::scalar::Ring;

/// Outcome of checking the action axioms `π(I, x) = x` and
/// `π(A, π(B, x)) = π(A * B, x)` on random samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SSystemReport {
    pub kind: ProductKind,
    pub samples: usize,
    pub identity_failures: usize,
    pub action_failures: usize,
    /// Largest relative error seen (always 0 for exact rings).
    pub max_rel_error: f64,
    pub passed: bool,
}

const REAL_TOL: f64 = 1e-11;

/// `A, B ∈ n×n×s` act on `x ∈ n×q×s`.
pub fn s_system_check<R: Ring>(ring: R, kind: ProductKind, n: usize, q: usize, s: usize, samples: usize, seed: u64) -> Result<SSystemReport> {
    let square = Dims::new(n, n, s)?;
    let state = Dims::new(n, q, s)?;
    let mut rng = random::rng(seed);
    let mut draw = |dims: Dims| -> Result<CubicMatrix<R>> {
        let data = (0..dims.len())
            .map(|_| {
                if ring.is_exact() {
                    Ok(ring.from_i64(rng.gen_range(0..1 << 20)))
                } else {
                    ring.from_f64_exact(rng.gen_range(-1.0..1.0))
                        .ok_or_else(|| Error::Unsupported(format!("no real samples in {}", ring.domain())))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        CubicMatrix::new(ring, dims, data)
    };
    let id = kind.identity(ring, n, s);
    let mut report =
        SSystemReport { kind, samples, identity_failures: 0, action_failures: 0, max_rel_error: 0.0, passed: true };
    for _ in 0..samples {
        let (a, b, x) = (draw(square)?, draw(square)?, draw(state)?);
        let (id_err, id_ok) = compare(&kind.apply(&id, &x)?, &x)?;
        let nested = kind.apply(&a, &kind.apply(&b, &x)?)?;
        let composed = kind.apply(&kind.apply(&a, &b)?, &x)?;
        let (act_err, act_ok) = compare(&nested, &composed)?;
        report.identity_failures += usize::from(!id_ok);
        report.action_failures += usize::from(!act_ok);
        report.max_rel_error = report.max_rel_error.max(id_err).max(act_err);
    }
    report.passed = report.identity_failures == 0 && report.action_failures == 0;
    Ok(report)
}

fn compare<R: Ring>(got: &CubicMatrix<R>, want: &CubicMatrix<R>) -> Result<(f64, bool)> {
    if got.ring().is_exact() {
        return Ok((0.0, got == want));
    }
    let scale = want.try_frobenius_norm()?.max(f64::MIN_POSITIVE);
    let err = got.sub(want)?.try_frobenius_norm()? / scale;
    Ok((err, err <= REAL_TOL))
}
