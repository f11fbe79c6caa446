use num_complex::Complex64;

use crate::analysis::poly_eval;
use crate::circulant::gamma;
use crate::cubic::{CubicMatrix, Dims};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::products::ProductKind;
use crate::scalar::Real;

/// Characteristic polynomial `det(xI − M)` by Faddeev–LeVerrier, ascending
/// coefficients, monic.
pub fn char_poly(m: &DenseMatrix<Real>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::shape("char_poly", format!("matrix is {}x{}, not square", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let id = DenseMatrix::identity(Real, n);
    let mut mk = DenseMatrix::zeros(Real, n, n);
    for k in 1..=n {
        mk = m.matmul(&mk)?.add(&id.scale(c[n - k + 1]))?;
        c[n - k] = -m.matmul(&mk)?.trace() / k as f64;
    }
    Ok(c)
}

/// Upper Hessenberg form by stabilized elementary similarity transforms.
pub fn hessenberg(m: &DenseMatrix<Real>) -> Result<DenseMatrix<Real>> {
    if !m.is_square() {
        return Err(Error::shape("hessenberg", format!("matrix is {}x{}, not square", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut a = m.to_rows();
    for p in 1..n.saturating_sub(1) {
        let mut x: f64 = 0.0;
        let mut piv = p;
        for j in p..n {
            if a[j][p - 1].abs() > x.abs() {
                x = a[j][p - 1];
                piv = j;
            }
        }
        if piv != p {
            a.swap(piv, p);
            for row in a.iter_mut() {
                row.swap(piv, p);
            }
        }
        if x != 0.0 {
            for i in p + 1..n {
                let mut y = a[i][p - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][p - 1] = 0.0;
                    for j in p..n {
                        a[i][j] -= y * a[p][j];
                    }
                    for row in a.iter_mut() {
                        row[p] += y * row[i];
                    }
                }
            }
        }
    }
    DenseMatrix::from_rows(Real, &a)
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// iteration. Sorted by real part, then imaginary part.
pub fn hqr(h: &DenseMatrix<Real>) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut a = h.to_rows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let max_its = 60 * n.max(1);
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nn;
            while l >= 1 {
                let lu = l as usize;
                let mut s = a[lu - 1][lu - 1].abs() + a[lu][lu].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[lu][lu - 1].abs() + s == s {
                    a[lu][lu - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nn {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != 0.0 {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if its >= max_its {
                return Err(Error::Convergence {
                    what: format!("QR iteration for eigenvalue {} of {n}", nu + 1),
                    last_term_norm: a[nu][nu - 1].abs(),
                });
            }
            if its == 10 || its == 20 {
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = a[nu][nu - 1].abs() + if nu >= 2 { a[nu - 1][nu - 2].abs() } else { 0.0 };
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let lu = l as usize;
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let r0 = x - z;
                let s0 = y - z;
                p = (r0 * s0 - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r0 - s0;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == lu {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nu - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l as usize != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(lu) {
                        let mut pp = x * row[k] + y * row[k + 1];
                        if k != nu - 1 {
                            pp += z * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    let mut out: Vec<Complex64> = wr.into_iter().zip(wi).map(|(r, i)| Complex64::new(r, i)).collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Eigenvalues of a general real square matrix.
pub fn eigenvalues(m: &DenseMatrix<Real>) -> Result<Vec<Complex64>> {
    hqr(&hessenberg(m)?)
}

/// Solves `(M − σI)x = b` by partial pivoting, nudging zero pivots so that
/// near-singular shifts still yield a usable direction.
fn shifted_solve(m: &DenseMatrix<Real>, sigma: f64, b: &[f64], tiny: f64) -> Vec<f64> {
    let n = m.rows();
    let mut a = m.to_rows();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= sigma;
    }
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap_or(k);
        a.swap(k, p);
        x.swap(k, p);
        if a[k][k].abs() < tiny {
            a[k][k] = tiny;
        }
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (x[i] - s) / a[i][i];
    }
    x
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Unit eigenvector for a real eigenvalue by inverse iteration.
pub fn real_eigenvector(m: &DenseMatrix<Real>, lambda: f64) -> Vec<f64> {
    let n = m.rows();
    let scale = m.frobenius_norm();
    let tiny = f64::EPSILON * if scale > 0.0 { scale } else { 1.0 };
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64).collect();
    normalize(&mut v);
    for _ in 0..4 {
        v = shifted_solve(m, lambda, &v, tiny);
        normalize(&mut v);
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub eigenvalues: Vec<Complex64>,
    /// One entry per eigenvalue; `Some` for real eigenvalues, refolded to `n × 1 × s`.
    pub eigenvectors: Vec<Option<CubicMatrix<Real>>>,
    pub charpoly: Vec<f64>,
}

const REAL_IM_TOL: f64 = 1e-10;

/// t-eigenvalues of `A` (the eigenvalues of `Γ(A)`) with eigenvectors for
/// the real ones. Each eigenvector satisfies `‖Γ(A)v − λv‖ ≤ 1e-8·‖Γ(A)‖`.
pub fn t_eigen(a: &CubicMatrix<Real>) -> Result<SpectralResult> {
    let Dims { m, n, s } = a.dims();
    if m != n {
        return Err(Error::shape("t_eigen", format!("t-eigenvalues need square slices, got {}", a.dims())));
    }
    let g = gamma(a);
    let eigenvalues = eigenvalues(&g)?;
    let charpoly = char_poly(&g)?;
    let gnorm = g.frobenius_norm();
    let vec_dims = Dims { m: n, n: 1, s };
    let mut eigenvectors = Vec::with_capacity(eigenvalues.len());
    for lam in &eigenvalues {
        if lam.im.abs() > REAL_IM_TOL {
            eigenvectors.push(None);
            continue;
        }
        let v = real_eigenvector(&g, lam.re);
        let vm = DenseMatrix::new(Real, n * s, 1, v.clone())?;
        let gv = g.matmul(&vm)?;
        let residual = gv.data().iter().zip(&v).map(|(x, y)| (x - lam.re * y).powi(2)).sum::<f64>().sqrt();
        if residual > 1e-8 * gnorm.max(f64::MIN_POSITIVE) && residual > 0.0 {
            return Err(Error::Convergence {
                what: format!("eigenvector for eigenvalue {} fails the residual bound 1e-8*|Gamma| = {:e}", lam.re, 1e-8 * gnorm),
                last_term_norm: residual,
            });
        }
        eigenvectors.push(Some(CubicMatrix::new(Real, vec_dims, v)?));
    }
    Ok(SpectralResult { eigenvalues, eigenvectors, charpoly })
}

/// `‖p_*(A)‖ / max(1, ‖A‖^{ns})` where `p` is the characteristic
/// polynomial of `Γ(A)`, evaluated under the t-product.
pub fn cayley_hamilton_residual(a: &CubicMatrix<Real>) -> Result<f64> {
    let Dims { n, s, .. } = a.dims();
    let p = char_poly(&gamma(a))?;
    let r = poly_eval(&p, a, ProductKind::TProduct)?;
    Ok(r.frobenius_norm() / 1f64.max(a.frobenius_norm().powi((n * s) as i32)))
}
