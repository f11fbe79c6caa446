//! The cubic-matrix value type.
//!
//! Entries are stored slice-major: slice `k` occupies `data[k*m*n..(k+1)*m*n]`
//! in row-major order, so the flat buffer is exactly the unfold.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, Ring};

/// Dimensions `m × n × s` of a cubic matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
    pub s: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize, s: usize) -> Result<Self> {
        if m == 0 || n == 0 || s == 0 {
            return Err(Error::shape("Dims::new", format!("dims must be positive, got {m}x{n}x{s}")));
        }
        Ok(Dims { m, n, s })
    }

    pub fn len(&self) -> usize {
        self.m * self.n * self.s
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slice_len(&self) -> usize {
        self.m * self.n
    }

    pub fn is_square(&self) -> bool {
        self.m == self.n
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.m, self.n, self.s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicMatrix<R: Ring = Real> {
    ring: R,
    dims: Dims,
    data: Vec<R::Elem>,
}

impl<R: Ring> CubicMatrix<R> {
    /// Builds from a flat slice-major buffer, canonicalizing every entry.
    pub fn new(ring: R, dims: Dims, data: Vec<R::Elem>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::shape(
                "CubicMatrix::new",
                format!("{dims} needs {} entries, got {}", dims.len(), data.len()),
            ));
        }
        let data = data
            .into_iter()
            .map(|v| ring.admit(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(CubicMatrix { ring, dims, data })
    }

    pub(crate) fn from_parts(ring: R, dims: Dims, data: Vec<R::Elem>) -> Self {
        debug_assert_eq!(data.len(), dims.len());
        CubicMatrix { ring, dims, data }
    }

    pub fn zeros(ring: R, dims: Dims) -> Self {
        CubicMatrix { ring, dims, data: vec![ring.zero(); dims.len()] }
    }

    /// `f(i, j, k)` gives entry `a_{i,j,k}` (0-based).
    pub fn from_fn(ring: R, dims: Dims, mut f: impl FnMut(usize, usize, usize) -> R::Elem) -> Self {
        let mut data = Vec::with_capacity(dims.len());
        for k in 0..dims.s {
            for i in 0..dims.m {
                for j in 0..dims.n {
                    data.push(f(i, j, k));
                }
            }
        }
        CubicMatrix { ring, dims, data }
    }

    /// Stacks frontal slices, which must share shape and domain.
    pub fn from_slices(slices: &[DenseMatrix<R>]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::shape("from_slices", "no slices"))?;
        let (m, n) = first.shape();
        let ring = first.ring();
        let mut data = Vec::with_capacity(m * n * slices.len());
        for (k, sl) in slices.iter().enumerate() {
            ring.check_same(&sl.ring(), "from_slices")?;
            if sl.shape() != (m, n) {
                return Err(Error::shape(
                    "from_slices",
                    format!("slice {} is {}x{}, slice 1 is {m}x{n}", k + 1, sl.rows(), sl.cols()),
                ));
            }
            data.extend_from_slice(sl.data());
        }
        Ok(CubicMatrix { ring, dims: Dims::new(m, n, slices.len())?, data })
    }

    pub fn ring(&self) -> R {
        self.ring
    }
    pub fn dims(&self) -> Dims {
        self.dims
    }
    pub fn data(&self) -> &[R::Elem] {
        &self.data
    }
    pub fn into_data(self) -> Vec<R::Elem> {
        self.data
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        k * self.dims.m * self.dims.n + i * self.dims.n + j
    }

    /// Entry `a_{i,j,k}`, 0-based.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> R::Elem {
        self.data[self.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: R::Elem) {
        let o = self.offset(i, j, k);
        self.data[o] = v;
    }

    pub(crate) fn slice_data(&self, k: usize) -> &[R::Elem] {
        let l = self.dims.slice_len();
        &self.data[k * l..(k + 1) * l]
    }

    fn check_index(what: &'static str, index: usize, len: usize) -> Result<()> {
        if index < len {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { what, index, len })
        }
    }

    /// Frontal slice `A^(k)` (m × n), 0-based `k`.
    pub fn frontal_slice(&self, k: usize) -> Result<DenseMatrix<R>> {
        Self::check_index("frontal slice", k, self.dims.s)?;
        Ok(DenseMatrix::from_parts(self.ring, self.dims.m, self.dims.n, self.slice_data(k).to_vec()))
    }

    /// Horizontal slice for row `i` (n × s), entry `(j, k) = a_{i,j,k}`.
    pub fn horizontal_slice(&self, i: usize) -> Result<DenseMatrix<R>> {
        Self::check_index("horizontal slice", i, self.dims.m)?;
        Ok(DenseMatrix::from_fn(self.ring, self.dims.n, self.dims.s, |j, k| self.get(i, j, k)))
    }

    /// Lateral slice for column `j` (s × m), entry `(k, i) = a_{i,j,k}`.
    pub fn lateral_slice(&self, j: usize) -> Result<DenseMatrix<R>> {
        Self::check_index("lateral slice", j, self.dims.n)?;
        Ok(DenseMatrix::from_fn(self.ring, self.dims.s, self.dims.m, |k, i| self.get(i, j, k)))
    }

    pub fn slices(&self) -> Vec<DenseMatrix<R>> {
        (0..self.dims.s)
            .map(|k| DenseMatrix::from_parts(self.ring, self.dims.m, self.dims.n, self.slice_data(k).to_vec()))
            .collect()
    }

    /// The `sm × n` unfold.
    pub fn unfold(&self) -> DenseMatrix<R> {
        DenseMatrix::from_parts(self.ring, self.dims.s * self.dims.m, self.dims.n, self.data.clone())
    }

    /// Inverse of [`unfold`](Self::unfold).
    pub fn fold(mat: &DenseMatrix<R>, dims: Dims) -> Result<Self> {
        if mat.shape() != (dims.s * dims.m, dims.n) {
            return Err(Error::shape(
                "fold",
                format!("{dims} needs a {}x{} matrix, got {}x{}", dims.s * dims.m, dims.n, mat.rows(), mat.cols()),
            ));
        }
        Ok(CubicMatrix { ring: mat.ring(), dims, data: mat.data().to_vec() })
    }

    /// Slice-wise transpose: n × m × s.
    pub fn transpose(&self) -> Self {
        let Dims { m, n, s } = self.dims;
        Self::from_fn(self.ring, Dims { m: n, n: m, s }, |i, j, k| self.get(j, i, k))
    }

    fn check_conform(&self, other: &Self, op: &'static str) -> Result<()> {
        self.ring.check_same(&other.ring, op)?;
        if self.dims != other.dims {
            return Err(Error::shape(op, format!("left is {}, right is {}", self.dims, other.dims)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_conform(other, "cubic add")?;
        let r = self.ring;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| r.add(a, b)).collect();
        Ok(Self::from_parts(r, self.dims, data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_conform(other, "cubic sub")?;
        let r = self.ring;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| r.sub(a, b)).collect();
        Ok(Self::from_parts(r, self.dims, data))
    }

    pub fn neg(&self) -> Self {
        let r = self.ring;
        Self::from_parts(r, self.dims, self.data.iter().map(|&a| r.neg(a)).collect())
    }

    pub fn scale(&self, c: R::Elem) -> Self {
        let r = self.ring;
        Self::from_parts(r, self.dims, self.data.iter().map(|&a| r.mul(c, a)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| self.ring.is_zero(v))
    }

    /// Kronecker product: slice `i*t + j` is `A^(i) ⊗ B^(j)`.
    pub fn kron_cubic(&self, other: &Self) -> Result<Self> {
        self.ring.check_same(&other.ring, "kron_cubic")?;
        let mut slices = Vec::with_capacity(self.dims.s * other.dims.s);
        for a in self.slices() {
            for b in other.slices() {
                slices.push(a.kron(&b)?);
            }
        }
        Self::from_slices(&slices)
    }

    /// Repeats every frontal slice `r` times consecutively.
    pub fn replicate_slices(&self, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidValue("replication factor must be >= 1".into()));
        }
        if r == 1 {
            return Ok(self.clone());
        }
        let l = self.dims.slice_len();
        let mut data = Vec::with_capacity(self.data.len() * r);
        for k in 0..self.dims.s {
            for _ in 0..r {
                data.extend_from_slice(&self.data[k * l..(k + 1) * l]);
            }
        }
        Ok(Self::from_parts(self.ring, Dims { s: self.dims.s * r, ..self.dims }, data))
    }

    /// `I_n` in the first slice, zeros elsewhere.
    pub fn identity_t(ring: R, n: usize, s: usize) -> Self {
        let dims = Dims { m: n, n, s };
        Self::from_fn(ring, dims, |i, j, k| if k == 0 && i == j { ring.one() } else { ring.zero() })
    }

    /// Concrete rectangular identity; only exists when `m == n`.
    pub fn identity_rect(ring: R, m: usize, n: usize, s: usize) -> Result<Self> {
        if m != n {
            return Err(Error::Unsupported(format!(
                "identity {m}x{n}x{s} is formal for m != n; use an extended-ring element"
            )));
        }
        Ok(Self::identity_t(ring, n, s))
    }

    /// `s` stacked copies of the `m × n` matrix with ones on the main diagonal.
    pub fn ones_stack(ring: R, m: usize, n: usize, s: usize) -> Self {
        Self::from_fn(ring, Dims { m, n, s }, |i, j, _| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn try_frobenius_norm(&self) -> Result<f64> {
        self.ring.norm(&self.data).ok_or_else(|| {
            Error::Unsupported(format!("Frobenius norm is undefined over {}", self.ring.domain()))
        })
    }
}

impl CubicMatrix<Real> {
    pub fn from_real_slices(slices: &[Vec<Vec<f64>>]) -> Result<Self> {
        let mats = slices
            .iter()
            .map(|rows| DenseMatrix::from_rows(Real, rows))
            .collect::<Result<Vec<_>>>()?;
        Self::from_slices(&mats)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dims, other.dims, "max_abs_diff dims mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Modular;
    use proptest::prelude::*;

    fn d(m: usize, n: usize, s: usize) -> Dims {
        Dims::new(m, n, s).unwrap()
    }

    #[test]
    fn unfold_degenerate_column() {
        let a = CubicMatrix::new(Real, d(1, 1, 3), vec![1.0, 2.0, 3.0]).unwrap();
        let u = a.unfold();
        assert_eq!(u.shape(), (3, 1));
        assert_eq!(u.data(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn identity_slices() {
        let id = CubicMatrix::identity_t(Real, 2, 3);
        assert_eq!(id.data().len(), 12);
        assert_eq!(id.data().iter().filter(|&&v| v == 1.0).count(), 2);
        assert_eq!(id.frontal_slice(0).unwrap(), DenseMatrix::identity(Real, 2));
        assert!(id.frontal_slice(2).unwrap().is_zero());
        assert_eq!(id.transpose(), id);
        assert!(matches!(id.frontal_slice(3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn identity_rect_is_formal_off_square() {
        assert!(matches!(CubicMatrix::identity_rect(Real, 2, 3, 2), Err(Error::Unsupported(_))));
        assert_eq!(CubicMatrix::identity_rect(Real, 2, 2, 2).unwrap(), CubicMatrix::identity_t(Real, 2, 2));
    }

    #[test]
    fn slice_index_roles() {
        let a = CubicMatrix::from_fn(Real, d(2, 3, 4), |i, j, k| (100 * i + 10 * j + k) as f64);
        for j in 0..3 {
            let lat = a.lateral_slice(j).unwrap();
            assert_eq!(lat.shape(), (4, 2));
            for k in 0..4 {
                for i in 0..2 {
                    assert_eq!(lat.get(k, i), a.get(i, j, k));
                }
            }
        }
        for i in 0..2 {
            let hor = a.horizontal_slice(i).unwrap();
            assert_eq!(hor.shape(), (3, 4));
            for j in 0..3 {
                for k in 0..4 {
                    assert_eq!(hor.get(j, k), a.get(i, j, k));
                }
            }
        }
    }

    #[test]
    fn kron_slice_ordering() {
        let a = CubicMatrix::from_fn(Real, d(1, 2, 2), |_, j, k| (10 * k + j) as f64);
        let ones2 = CubicMatrix::new(Real, d(1, 1, 2), vec![1.0, 1.0]).unwrap();
        let left = ones2.kron_cubic(&a).unwrap();
        let right = a.kron_cubic(&ones2).unwrap();
        let s = |c: &CubicMatrix, k| c.frontal_slice(k).unwrap();
        assert_eq!(
            (0..4).map(|k| s(&left, k)).collect::<Vec<_>>(),
            vec![s(&a, 0), s(&a, 1), s(&a, 0), s(&a, 1)]
        );
        assert_eq!(
            (0..4).map(|k| s(&right, k)).collect::<Vec<_>>(),
            vec![s(&a, 0), s(&a, 0), s(&a, 1), s(&a, 1)]
        );
        assert_eq!(right, a.replicate_slices(2).unwrap());
        let unit = CubicMatrix::new(Real, d(1, 1, 1), vec![1.0]).unwrap();
        assert_eq!(a.kron_cubic(&unit).unwrap(), a);
    }

    #[test]
    fn replicate_consecutive() {
        let a = CubicMatrix::from_fn(Real, d(1, 1, 3), |_, _, k| k as f64 + 1.0);
        assert_eq!(a.replicate_slices(2).unwrap().data(), &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        assert_eq!(a.replicate_slices(1).unwrap(), a);
    }

    #[test]
    fn mod_add_wraps() {
        let z = Modular::new(12).unwrap();
        let a = CubicMatrix::new(z, d(1, 2, 1), vec![7, 7]).unwrap();
        let b = CubicMatrix::new(z, d(1, 2, 1), vec![8, 5]).unwrap();
        assert_eq!(a.add(&b).unwrap().data(), &[3, 0]);
        assert!(a.try_frobenius_norm().is_err());
    }

    #[test]
    fn add_rejects_mismatch() {
        let a = CubicMatrix::zeros(Real, d(2, 2, 2));
        let b = CubicMatrix::zeros(Real, d(2, 2, 3));
        let err = a.add(&b).unwrap_err().to_string();
        assert!(err.contains("2x2x2") && err.contains("2x2x3"), "{err}");
        let z8 = CubicMatrix::zeros(Modular::new(8).unwrap(), d(1, 1, 1));
        let z12 = CubicMatrix::zeros(Modular::new(12).unwrap(), d(1, 1, 1));
        assert!(matches!(z8.add(&z12), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn ones_norm() {
        let a = CubicMatrix::new(Real, d(2, 2, 2), vec![1.0; 8]).unwrap();
        assert!((a.frobenius_norm() - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(CubicMatrix::zeros(Real, d(2, 2, 2)).frobenius_norm(), 0.0);
    }

    fn arb_cubic(dims: Dims) -> impl Strategy<Value = CubicMatrix> {
        prop::collection::vec(-5.0f64..5.0, dims.len())
            .prop_map(move |v| CubicMatrix::new(Real, dims, v).unwrap())
    }

    proptest! {
        #[test]
        fn fold_unfold_roundtrip(a in arb_cubic(Dims { m: 2, n: 3, s: 2 })) {
            let back = CubicMatrix::fold(&a.unfold(), a.dims()).unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(a.transpose().transpose(), a);
        }

        #[test]
        fn vector_space_axioms(
            a in arb_cubic(Dims { m: 2, n: 2, s: 3 }),
            b in arb_cubic(Dims { m: 2, n: 2, s: 3 }),
            c in arb_cubic(Dims { m: 2, n: 2, s: 3 }),
            x in -3.0f64..3.0,
        ) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            let l = a.add(&b).unwrap().add(&c).unwrap();
            let r = a.add(&b.add(&c).unwrap()).unwrap();
            prop_assert!(l.max_abs_diff(&r) <= 1e-12);
            let l = a.add(&b).unwrap().scale(x);
            let r = a.scale(x).add(&b.scale(x)).unwrap();
            prop_assert!(l.max_abs_diff(&r) <= 1e-12);
            prop_assert!(a.add(&b).unwrap().frobenius_norm() <= a.frobenius_norm() + b.frobenius_norm() + 1e-12);
            prop_assert!((a.scale(x).frobenius_norm() - x.abs() * a.frobenius_norm()).abs() <= 1e-12);
        }
    }
}
