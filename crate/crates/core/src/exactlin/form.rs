use num::{Signed, Zero};

use super::{Rational, RationalMatrix};
use crate::error::{Error, Result};

/// Symmetric bilinear form on ℚⁿ given by its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymmetricForm {
    matrix: RationalMatrix,
}

/// Inertia of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub positives: usize,
    pub negatives: usize,
    pub zeros: usize,
}

impl SymmetricForm {
    pub fn new(matrix: RationalMatrix) -> Result<Self> {
        matrix.require_square()?;
        if !matrix.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: RationalMatrix::identity(n),
        }
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        Self {
            matrix: RationalMatrix::diagonal(entries),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(RationalMatrix::from_i64(rows))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RationalMatrix {
        self.matrix
    }

    /// `B(x, y) = xᵀ·G·y`.
    pub fn eval(&self, x: &[Rational], y: &[Rational]) -> Result<Rational> {
        let gy = self.matrix.mul_vec(y)?;
        if x.len() != gy.len() {
            return Err(Error::DimensionMismatch {
                expected: gy.len(),
                found: x.len(),
            });
        }
        Ok(x.iter().zip(&gy).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
    }

    /// The pulled-back form `Sᵀ·G·S`.
    pub fn congruent(&self, s: &RationalMatrix) -> Result<Self> {
        let m = s.transpose().try_mul(&self.matrix)?.try_mul(s)?;
        Ok(Self { matrix: m })
    }

    /// True iff `gᵀ·G·g = G`.
    pub fn is_preserved_by(&self, g: &RationalMatrix) -> bool {
        g.rows() == self.dim() && g.cols() == self.dim() && self.congruent(g).is_ok_and(|f| f == *self)
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.direct_sum(&other.matrix),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            matrix: self.matrix.scale(s),
        }
    }
}

/// Inertia by symmetric Gaussian elimination over ℚ.
///
/// Each step moves a nonzero diagonal pivot to the front with a symmetric
/// row/column swap and takes the Schur complement. When the remaining
/// diagonal is entirely zero but an off-diagonal entry `a_ij` is not, the
/// congruence `e_i ↦ e_i + e_j` produces the diagonal entry `2·a_ij`.
pub fn ldl_signature(form: &SymmetricForm) -> Signature {
    let mut a: Vec<Vec<Rational>> = form.matrix.to_rows();
    let mut sig = Signature {
        positives: 0,
        negatives: 0,
        zeros: 0,
    };
    while !a.is_empty() {
        let n = a.len();
        let pivot = match (0..n).find(|&i| !a[i][i].is_zero()) {
            Some(p) => p,
            None => {
                let Some((i, j)) = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[i][j].is_zero())
                else {
                    sig.zeros += n;
                    break;
                };
                // row_i += row_j, then col_i += col_j
                let row_j = a[j].clone();
                for (x, v) in a[i].iter_mut().zip(row_j) {
                    *x += v;
                }
                for row in a.iter_mut() {
                    let v = row[j].clone();
                    row[i] += v;
                }
                i
            }
        };
        a.swap(0, pivot);
        for row in a.iter_mut() {
            row.swap(0, pivot);
        }
        let p = a[0][0].clone();
        if p.is_positive() {
            sig.positives += 1;
        } else {
            sig.negatives += 1;
        }
        let first = a.remove(0);
        for row in a.iter_mut() {
            let f = row.remove(0) / &p;
            if f.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&first[1..]) {
                *x -= &f * y;
            }
        }
    }
    sig
}

pub fn is_positive_definite(form: &SymmetricForm) -> bool {
    ldl_signature(form)
        == Signature {
            positives: form.dim(),
            negatives: 0,
            zeros: 0,
        }
}

impl Signature {
    pub fn new(positives: usize, negatives: usize, zeros: usize) -> Self {
        Self {
            positives,
            negatives,
            zeros,
        }
    }
}
