//! Ordinary two-dimensional dense matrices, row-major.
//!
//! These house the block-circulant images, Ψ coupling matrices and
//! classical-form system matrices.

use crate::error::{Error, Result};
use crate::scalar::{Modular, Real, Ring};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<R: Ring = Real> {
    ring: R,
    rows: usize,
    cols: usize,
    data: Vec<R::Elem>,
}

impl<R: Ring> DenseMatrix<R> {
    pub fn new(ring: R, rows: usize, cols: usize, data: Vec<R::Elem>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::shape("DenseMatrix::new", format!("dims must be positive, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::shape(
                "DenseMatrix::new",
                format!("{rows}x{cols} needs {} entries, got {}", rows * cols, data.len()),
            ));
        }
        let data = data
            .into_iter()
            .map(|v| ring.admit(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(DenseMatrix { ring, rows, cols, data })
    }

    pub(crate) fn from_parts(ring: R, rows: usize, cols: usize, data: Vec<R::Elem>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        DenseMatrix { ring, rows, cols, data }
    }

    pub fn from_rows(ring: R, rows: &[Vec<R::Elem>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::shape("DenseMatrix::from_rows", "ragged rows"));
        }
        Self::new(ring, r, c, rows.concat())
    }

    pub fn from_fn(ring: R, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { ring, rows, cols, data }
    }

    pub fn zeros(ring: R, rows: usize, cols: usize) -> Self {
        DenseMatrix { ring, rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: R, n: usize) -> Self {
        Self::from_fn(ring, n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn ring(&self) -> R {
        self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    pub fn data(&self) -> &[R::Elem] {
        &self.data
    }
    pub fn into_data(self) -> Vec<R::Elem> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> R::Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: R::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[R::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<R::Elem>> {
        self.data.chunks(self.cols).map(<[_]>::to_vec).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| self.ring.is_zero(v))
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        self.ring.check_same(&other.ring, op)?;
        if self.shape() != other.shape() {
            return Err(Error::shape(
                op,
                format!("left is {}x{}, right is {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "dense add")?;
        let r = self.ring;
        Ok(self.zip_map(other, |a, b| r.add(a, b)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "dense sub")?;
        let r = self.ring;
        Ok(self.zip_map(other, |a, b| r.sub(a, b)))
    }

    fn zip_map(&self, other: &Self, f: impl Fn(R::Elem, R::Elem) -> R::Elem) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        DenseMatrix { ring: self.ring, rows: self.rows, cols: self.cols, data }
    }

    pub fn map(&self, f: impl Fn(R::Elem) -> R::Elem) -> Self {
        DenseMatrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn scale(&self, c: R::Elem) -> Self {
        let r = self.ring;
        self.map(|a| r.mul(c, a))
    }

    pub fn neg(&self) -> Self {
        let r = self.ring;
        self.map(|a| r.neg(a))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.ring.check_same(&other.ring, "matmul")?;
        if self.cols != other.rows {
            return Err(Error::shape(
                "matmul",
                format!(
                    "left is {}x{}, right is {}x{}: inner dims differ",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        let mut out = Self::zeros(self.ring, self.rows, other.cols);
        gemm_acc(
            self.ring,
            &self.data,
            &other.data,
            &mut out.data,
            self.rows,
            self.cols,
            other.cols,
        );
        Ok(out)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        self.ring.check_same(&other.ring, "kron")?;
        let r = self.ring;
        let (p, q) = other.shape();
        Ok(Self::from_fn(r, self.rows * p, self.cols * q, |i, j| {
            r.mul(self.get(i / p, j / q), other.get(i % p, j % q))
        }))
    }

    /// Copies the `rows x cols` block whose top-left corner is `(i0, j0)`.
    pub fn block(&self, i0: usize, j0: usize, rows: usize, cols: usize) -> Result<Self> {
        if i0 + rows > self.rows || j0 + cols > self.cols {
            return Err(Error::shape(
                "block",
                format!(
                    "block {rows}x{cols} at ({i0},{j0}) exceeds {}x{}",
                    self.rows, self.cols
                ),
            ));
        }
        Ok(Self::from_fn(self.ring, rows, cols, |i, j| self.get(i0 + i, j0 + j)))
    }

    pub fn set_block(&mut self, i0: usize, j0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(i0 + i, j0 + j, block.get(i, j));
            }
        }
    }

    /// Block-diagonal matrix assembled from `blocks`.
    pub fn block_diag(ring: R, blocks: &[Self]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::shape("block_diag", "no blocks"));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(ring, rows, cols);
        let (mut i0, mut j0) = (0, 0);
        for b in blocks {
            ring.check_same(&b.ring, "block_diag")?;
            out.set_block(i0, j0, b);
            i0 += b.rows;
            j0 += b.cols;
        }
        Ok(out)
    }

    pub fn trace(&self) -> R::Elem {
        let r = self.ring;
        (0..self.rows.min(self.cols)).fold(r.zero(), |acc, i| r.add(acc, self.get(i, i)))
    }
}

/// `out += a (m x k) * b (k x n)`, all row-major.
pub(crate) fn gemm_acc<R: Ring>(
    ring: R,
    a: &[R::Elem],
    b: &[R::Elem],
    out: &mut [R::Elem],
    m: usize,
    k: usize,
    n: usize,
) {
    for i in 0..m {
        let out_row = &mut out[i * n..(i + 1) * n];
        for l in 0..k {
            let ail = a[i * k + l];
            if ring.is_zero(ail) {
                continue;
            }
            let b_row = &b[l * n..(l + 1) * n];
            for (o, &blj) in out_row.iter_mut().zip(b_row) {
                *o = ring.add(*o, ring.mul(ail, blj));
            }
        }
    }
}

impl DenseMatrix<Real> {
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(Real, rows)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (max column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Result<Lu> {
        if !self.is_square() {
            return Err(Error::shape("lu", format!("matrix is {}x{}, not square", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = self.frobenius_norm();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= 1e-12 * scale || pmax == 0.0 {
                return Err(Error::Singular(format!(
                    "pivot {pmax:e} at column {k} below 1e-12 * |M| = {:e}",
                    1e-12 * scale
                )));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                a[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                }
            }
        }
        Ok(Lu { n, lu: a, perm, sign })
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        let n = self.rows;
        let inv = lu.solve(&Self::identity(Real, n))?;
        let cond = self.frobenius_norm() * inv.frobenius_norm();
        if !cond.is_finite() || cond > 1e12 {
            return Err(Error::Singular(format!("condition estimate {cond:e} exceeds 1e12")));
        }
        Ok(inv)
    }

    pub fn determinant(&self) -> Result<f64> {
        match self.lu() {
            Ok(lu) => Ok(lu.determinant()),
            Err(Error::Singular(_)) => Ok(0.0),
            Err(e) => Err(e),
        }
    }

    /// Matrix exponential by scaling and squaring with a degree-20 Taylor core.
    pub fn expm(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::shape("expm", format!("matrix is {}x{}, not square", self.rows, self.cols)));
        }
        let norm = self.norm_one();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let scaled = self.scale(0.5f64.powi(squarings));
        let n = self.rows;
        let mut sum = Self::identity(Real, n);
        let mut term = Self::identity(Real, n);
        for k in 1..=20 {
            term = term.matmul(&scaled)?.scale(1.0 / k as f64);
            sum = sum.add(&term)?;
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum)?;
        }
        Ok(sum)
    }
}

/// Packed LU factorization with row permutation.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn determinant(&self) -> f64 {
        (0..self.n).map(|i| self.lu[i * self.n + i]).product::<f64>() * self.sign
    }

    pub fn solve(&self, rhs: &DenseMatrix<Real>) -> Result<DenseMatrix<Real>> {
        let n = self.n;
        if rhs.rows != n {
            return Err(Error::shape("lu solve", format!("rhs has {} rows, system has {n}", rhs.rows)));
        }
        let c = rhs.cols;
        let mut x = vec![0.0; n * c];
        for i in 0..n {
            x[i * c..(i + 1) * c].copy_from_slice(rhs.row(self.perm[i]));
        }
        for i in 0..n {
            for k in 0..i {
                let f = self.lu[i * n + k];
                if f != 0.0 {
                    for j in 0..c {
                        x[i * c + j] -= f * x[k * c + j];
                    }
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let f = self.lu[i * n + k];
                if f != 0.0 {
                    for j in 0..c {
                        x[i * c + j] -= f * x[k * c + j];
                    }
                }
            }
            let d = self.lu[i * n + i];
            for j in 0..c {
                x[i * c + j] /= d;
            }
        }
        Ok(DenseMatrix::from_parts(Real, n, c, x))
    }
}

impl DenseMatrix<Modular> {
    /// Determinant modulo `m` via Euclidean row reduction (valid for composite `m`).
    pub fn determinant_mod(&self) -> Result<u64> {
        if !self.is_square() {
            return Err(Error::shape("determinant_mod", format!("matrix is {}x{}, not square", self.rows, self.cols)));
        }
        let mut work = self.clone();
        let mut dummy = DenseMatrix::zeros(self.ring, self.rows, 1);
        Ok(euclid_triangularize(&mut work, &mut dummy))
    }

    /// Inverse modulo `m`; exists iff the determinant is a unit.
    pub fn inverse_mod(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::shape("inverse_mod", format!("matrix is {}x{}, not square", self.rows, self.cols)));
        }
        let ring = self.ring;
        let m = ring.modulus();
        let n = self.rows;
        let mut work = self.clone();
        let mut aug = Self::identity(ring, n);
        let det = euclid_triangularize(&mut work, &mut aug);
        if num_integer::gcd(det, m) != 1 {
            return Err(Error::Singular(format!("determinant {det} is not a unit modulo {m}")));
        }
        // Upper triangular with unit diagonal entries: back substitution.
        for i in (0..n).rev() {
            let inv = mod_inverse(work.get(i, i), m).expect("diagonal factor of a unit is a unit");
            for j in 0..n {
                work.set(i, j, ring.mul(inv, work.get(i, j)));
                aug.set(i, j, ring.mul(inv, aug.get(i, j)));
            }
            for r in 0..i {
                let f = work.get(r, i);
                if f != 0 {
                    for j in 0..n {
                        work.set(r, j, ring.sub(work.get(r, j), ring.mul(f, work.get(i, j))));
                        aug.set(r, j, ring.sub(aug.get(r, j), ring.mul(f, aug.get(i, j))));
                    }
                }
            }
        }
        Ok(aug)
    }
}

/// Reduces `a` to upper-triangular form with unimodular row operations,
/// mirrored on `aug`. Returns the determinant of the original `a` mod m.
fn euclid_triangularize(a: &mut DenseMatrix<Modular>, aug: &mut DenseMatrix<Modular>) -> u64 {
    let ring = a.ring;
    let n = a.rows;
    let mut negate = false;
    let swap = |x: &mut DenseMatrix<Modular>, i: usize, k: usize| {
        for j in 0..x.cols {
            let t = x.get(i, j);
            x.set(i, j, x.get(k, j));
            x.set(k, j, t);
        }
    };
    let axpy = |x: &mut DenseMatrix<Modular>, dst: usize, src: usize, q: u64| {
        for j in 0..x.cols {
            let v = ring.sub(x.get(dst, j), ring.mul(q, x.get(src, j)));
            x.set(dst, j, v);
        }
    };
    for k in 0..n {
        loop {
            // Smallest nonzero entry in column k at or below the diagonal.
            let pivot = (k..n).filter(|&i| a.get(i, k) != 0).min_by_key(|&i| a.get(i, k));
            let Some(p) = pivot else { break };
            if p != k {
                swap(a, p, k);
                swap(aug, p, k);
                negate = !negate;
            }
            let pv = a.get(k, k);
            let mut done = true;
            for i in k + 1..n {
                let v = a.get(i, k);
                if v != 0 {
                    let q = v / pv;
                    axpy(a, i, k, q);
                    axpy(aug, i, k, q);
                    if a.get(i, k) != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
    }
    let det = (0..n).fold(ring.one(), |acc, i| ring.mul(acc, a.get(i, i)));
    if negate {
        ring.neg(det)
    } else {
        det
    }
}

/// Multiplicative inverse of `a` modulo `m`, if any.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}
