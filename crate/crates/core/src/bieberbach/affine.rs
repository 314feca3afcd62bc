use num::Zero;

use crate::error::{Error, Result};
use crate::exactlin::{Rational, RationalMatrix};

/// Rational affine map `x ↦ A·x + t` with invertible `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    linear: RationalMatrix,
    translation: Vec<Rational>,
}

impl AffineMap {
    pub fn new(linear: RationalMatrix, translation: Vec<Rational>) -> Result<Self> {
        linear.require_square()?;
        if translation.len() != linear.rows() {
            return Err(Error::DimensionMismatch {
                expected: linear.rows(),
                found: translation.len(),
            });
        }
        if linear.determinant()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Self { linear, translation })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            linear: RationalMatrix::identity(n),
            translation: vec![Rational::zero(); n],
        }
    }

    pub fn translation_by(v: Vec<Rational>) -> Self {
        Self {
            linear: RationalMatrix::identity(v.len()),
            translation: v,
        }
    }

    pub fn linear_only(a: RationalMatrix) -> Result<Self> {
        let n = a.rows();
        Self::new(a, vec![Rational::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &RationalMatrix {
        &self.linear
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }

    pub fn is_identity(&self) -> bool {
        self.is_pure_translation() && self.translation.iter().all(Zero::is_zero)
    }

    pub fn is_pure_translation(&self) -> bool {
        self.linear.is_identity()
    }

    /// `self ∘ other`, i.e. `(A₁A₂, A₁t₂ + t₁)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let linear = &self.linear * &other.linear;
        let translation = self
            .linear
            .mul_vec(&other.translation)?
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { linear, translation })
    }

    pub fn inverse(&self) -> Self {
        let inv = self.linear.inverse().expect("affine map has invertible linear part");
        let t = inv
            .mul_vec(&self.translation)
            .expect("dimensions checked at construction")
            .into_iter()
            .map(|x| -x)
            .collect();
        Self {
            linear: inv,
            translation: t,
        }
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(self.dim());
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base).expect("same dimension");
        }
        acc
    }

    pub fn apply(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        Ok(self
            .linear
            .mul_vec(x)?
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b)
            .collect())
    }

    /// `α ∘ self ∘ α⁻¹`.
    pub fn conjugate_by(&self, alpha: &Self) -> Result<Self> {
        alpha.compose(self)?.compose(&alpha.inverse())
    }
}

/// `a ∘ b`.
pub fn compose(a: &AffineMap, b: &AffineMap) -> Result<AffineMap> {
    a.compose(b)
}
