use crate::cubic::CubicMatrix;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::products::{dkstp_mat, ProductKind};
use crate::scalar::Ring;

/// `r·I + a0` with the identity `I` carried symbolically, so the element
/// exists even when the slices are not square.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedCubic<R: Ring> {
    pub r: R::Elem,
    pub a0: CubicMatrix<R>,
}

impl<R: Ring> ExtendedCubic<R> {
    pub fn new(r: R::Elem, a0: CubicMatrix<R>) -> Self {
        ExtendedCubic { r, a0 }
    }

    pub fn embed(a0: CubicMatrix<R>) -> Self {
        ExtendedCubic { r: a0.ring().zero(), a0 }
    }

    pub fn unit(like: &CubicMatrix<R>) -> Self {
        let ring = like.ring();
        ExtendedCubic { r: ring.one(), a0: CubicMatrix::zeros(ring, like.dims()) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let ring = self.a0.ring();
        Ok(ExtendedCubic { r: ring.add(self.r, other.r), a0: self.a0.add(&other.a0)? })
    }

    pub fn scale(&self, c: R::Elem) -> Self {
        ExtendedCubic { r: self.a0.ring().mul(c, self.r), a0: self.a0.scale(c) }
    }

    /// `(rX·rY, rX·Y0 + rY·X0 + X0 ⋉_* Y0)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_with(other, ProductKind::TStp)
    }

    pub fn mul_with(&self, other: &Self, kind: ProductKind) -> Result<Self> {
        let ring = self.a0.ring();
        if self.a0.dims() != other.a0.dims() {
            return Err(Error::shape(
                "extended_mul",
                format!("left is {}, right is {}", self.a0.dims(), other.a0.dims()),
            ));
        }
        let prod = kind.apply(&self.a0, &other.a0)?;
        if prod.dims() != self.a0.dims() {
            return Err(Error::shape(
                "extended_mul",
                format!("product of {} operands is {}, not closed", self.a0.dims(), prod.dims()),
            ));
        }
        let a0 = other.a0.scale(self.r).add(&self.a0.scale(other.r))?.add(&prod)?;
        Ok(ExtendedCubic { r: ring.mul(self.r, other.r), a0 })
    }

    /// `(r·I + a0) * x = r·x + a0 * x`.
    pub fn act_on(&self, x: &CubicMatrix<R>, kind: ProductKind) -> Result<CubicMatrix<R>> {
        let ax = kind.apply(&self.a0, x)?;
        if ax.dims() != x.dims() {
            return Err(Error::shape(
                "extended act_on",
                format!("{} acting on {} gives {}", self.a0.dims(), x.dims(), ax.dims()),
            ));
        }
        x.scale(self.r).add(&ax)
    }

    /// Concrete cubic matrix; fails when `r ≠ 0` and the identity is formal.
    pub fn materialize(&self, kind: ProductKind) -> Result<CubicMatrix<R>> {
        let ring = self.a0.ring();
        if ring.is_zero(self.r) {
            return Ok(self.a0.clone());
        }
        let id = kind.identity_for(ring, self.a0.dims())?;
        id.scale(self.r).add(&self.a0)
    }
}

/// `r·I_{m×n} + a0` for ordinary matrices under the DK-STP.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedMatrix<R: Ring> {
    pub r: R::Elem,
    pub a0: DenseMatrix<R>,
}

impl<R: Ring> ExtendedMatrix<R> {
    pub fn new(r: R::Elem, a0: DenseMatrix<R>) -> Self {
        ExtendedMatrix { r, a0 }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let ring = self.a0.ring();
        Ok(ExtendedMatrix { r: ring.add(self.r, other.r), a0: self.a0.add(&other.a0)? })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let ring = self.a0.ring();
        let a0 = other
            .a0
            .scale(self.r)
            .add(&self.a0.scale(other.r))?
            .add(&dkstp_mat(&self.a0, &other.a0)?)?;
        Ok(ExtendedMatrix { r: ring.mul(self.r, other.r), a0 })
    }

    pub fn act_on(&self, x: &DenseMatrix<R>) -> Result<DenseMatrix<R>> {
        x.scale(self.r).add(&dkstp_mat(&self.a0, x)?)
    }
}

