//! Flat metrics on a fixed Bieberbach group as exact invariant Gram
//! matrices, their rational approximation from real targets, and the
//! arithmeticity test.
//!
//! A metric is carried as a holonomy-invariant positive definite form rather
//! than as a conjugated representation, so every shape stays in ℚ.

mod cfrac;

use std::sync::Arc;

use num::Zero;

pub use cfrac::best_rational;

use crate::bieberbach::{is_invariant, CheckedGroup, HolonomyGroup};
use crate::error::{Error, Result};
use crate::exactlin::{is_positive_definite, Rational, RationalMatrix, SymmetricForm};

/// Smallest admissible Cholesky pivot for a numerically positive definite form.
pub const PD_PIVOT_TOLERANCE: f64 = 1e-9;

/// An exact flat metric on a group: positive definite and invariant under
/// the group's holonomy.
#[derive(Debug, Clone)]
pub struct ShapeDescriptor {
    group: Arc<CheckedGroup>,
    form: SymmetricForm,
}

impl ShapeDescriptor {
    pub fn new(group: Arc<CheckedGroup>, form: SymmetricForm) -> Result<Self> {
        if form.dim() != group.dim() {
            return Err(Error::DimensionMismatch {
                expected: group.dim(),
                found: form.dim(),
            });
        }
        if !is_positive_definite(&form) {
            return Err(Error::NotPositiveDefinite);
        }
        if !is_invariant(&form, &group.holonomy) {
            return Err(Error::NotInvariant);
        }
        Ok(Self { group, form })
    }

    pub fn group(&self) -> &Arc<CheckedGroup> {
        &self.group
    }

    pub fn form(&self) -> &SymmetricForm {
        &self.form
    }

    pub fn is_arithmetic(&self) -> bool {
        is_arithmetic_shape(&self.form, &self.group.holonomy)
    }
}

/// A real symmetric matrix, the inexact counterpart of [`SymmetricForm`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealForm {
    dim: usize,
    entries: Vec<f64>,
}

impl RealForm {
    /// Row-major entries; the matrix must be symmetric up to rounding noise
    /// and is symmetrized exactly.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("non-finite entry in real form".into()));
        }
        let scale = entries.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let mut e = entries;
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (e[i * dim + j], e[j * dim + i]);
                if (a - b).abs() > 1e-12 * scale {
                    return Err(Error::NotSymmetric);
                }
                let m = 0.5 * (a + b);
                e[i * dim + j] = m;
                e[j * dim + i] = m;
            }
        }
        Ok(Self { dim, entries: e })
    }

    pub fn from_form(form: &SymmetricForm) -> Self {
        Self {
            dim: form.dim(),
            entries: form.matrix().to_f64(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Cholesky with every pivot above [`PD_PIVOT_TOLERANCE`].
    pub fn is_numerically_pd(&self) -> bool {
        let n = self.dim;
        let mut l = vec![0.0f64; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= PD_PIVOT_TOLERANCE {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }

    /// Floating-point holonomy average `(1/|θ|) Σ gᵀ·T·g`.
    pub fn theta_average(&self, theta: &HolonomyGroup) -> Result<Self> {
        let n = self.dim;
        if theta.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: theta.dim(),
                found: n,
            });
        }
        let mut acc = vec![0.0f64; n * n];
        for g in theta.elements() {
            let g = g.to_f64();
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            s += g[a * n + i] * self.entries[a * n + b] * g[b * n + j];
                        }
                    }
                    acc[i * n + j] += s;
                }
            }
        }
        let k = theta.order() as f64;
        acc.iter_mut().for_each(|x| *x /= k);
        Self::new(n, acc)
    }
}

/// Conversion to a dense real matrix for [`shape_distance`].
pub trait RealMatrixView {
    fn real_dim(&self) -> usize;
    fn real_entries(&self) -> Vec<f64>;
    fn positive_definite(&self) -> bool;
}

impl RealMatrixView for SymmetricForm {
    fn real_dim(&self) -> usize {
        self.dim()
    }
    fn real_entries(&self) -> Vec<f64> {
        self.matrix().to_f64()
    }
    fn positive_definite(&self) -> bool {
        is_positive_definite(self)
    }
}

impl RealMatrixView for RealForm {
    fn real_dim(&self) -> usize {
        self.dim
    }
    fn real_entries(&self) -> Vec<f64> {
        self.entries.clone()
    }
    fn positive_definite(&self) -> bool {
        self.is_numerically_pd()
    }
}

/// Frobenius distance between the two forms after scaling each to unit
/// Frobenius norm. Zero exactly for positive multiples.
///
/// This measures ambient forms; it does not quotient by the normalizer of the
/// group, so it bounds any distance between the underlying similarity
/// classes from above.
pub fn shape_distance<A: RealMatrixView + ?Sized, B: RealMatrixView + ?Sized>(a: &A, b: &B) -> Result<f64> {
    if a.real_dim() != b.real_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.real_dim(),
            found: b.real_dim(),
        });
    }
    if !a.positive_definite() || !b.positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let (x, y) = (a.real_entries(), b.real_entries());
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(x.iter()
        .zip(&y)
        .map(|(p, q)| (p / nx - q / ny).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// A rational basis of the holonomy-invariant symmetric forms in reduced
/// echelon form over the upper-triangular coordinates: each basis form has
/// a 1 at its pivot entry and 0 at every other basis form's pivot.
#[derive(Debug, Clone)]
pub struct InvariantBasis {
    dim: usize,
    forms: Vec<RationalMatrix>,
    pivots: Vec<(usize, usize)>,
}

impl InvariantBasis {
    pub fn new(theta: &HolonomyGroup) -> Self {
        let n = theta.dim();
        let coords: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let k = Rational::new(1.into(), theta.order().into());
        let mut rows = Vec::with_capacity(coords.len());
        for &(i, j) in &coords {
            let mut e = RationalMatrix::zeros(n, n);
            e[(i, j)] = Rational::from_integer(1.into());
            e[(j, i)] = Rational::from_integer(1.into());
            let avg = theta
                .elements()
                .iter()
                .fold(RationalMatrix::zeros(n, n), |acc, g| {
                    &acc + &(&(&g.transpose() * &e) * g)
                })
                .scale(&k);
            rows.push(coords.iter().map(|&(a, b)| avg[(a, b)].clone()).collect::<Vec<_>>());
        }
        let (red, pivots) = RationalMatrix::from_rows(rows).expect("rectangular").rref();
        let forms = (0..pivots.len())
            .map(|r| {
                let mut m = RationalMatrix::zeros(n, n);
                for (c, &(i, j)) in coords.iter().enumerate() {
                    m[(i, j)] = red[(r, c)].clone();
                    m[(j, i)] = red[(r, c)].clone();
                }
                m
            })
            .collect();
        Self {
            dim: n,
            forms,
            pivots: pivots.into_iter().map(|c| coords[c]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// Entry positions `(i, j)`, `i ≤ j`, that serve as coordinates.
    pub fn pivots(&self) -> &[(usize, usize)] {
        &self.pivots
    }

    /// The invariant form whose pivot entries are `coords`.
    pub fn combine(&self, coords: &[Rational]) -> RationalMatrix {
        self.forms
            .iter()
            .zip(coords)
            .fold(RationalMatrix::zeros(self.dim, self.dim), |acc, (f, c)| {
                if c.is_zero() {
                    acc
                } else {
                    &acc + &f.scale(c)
                }
            })
    }
}

/// Rounds a real target to an exact invariant form.
///
/// The target is holonomy-averaged in floating point, each coordinate entry
/// of the [`InvariantBasis`] is replaced by its best rational approximation
/// with denominator at most `denom_bound`, and the exact invariant form with
/// those coordinates is returned. For trivial holonomy every entry is a
/// coordinate, so this is plain entrywise rounding. Coordinates that are
/// already rational with small enough denominators come back unchanged,
/// which makes the map idempotent.
pub fn rationalize_form(target: &RealForm, theta: &HolonomyGroup, denom_bound: u64) -> Result<SymmetricForm> {
    if denom_bound == 0 {
        return Err(Error::InvalidConfig("denominator bound must be at least 1".into()));
    }
    if !target.is_numerically_pd() {
        return Err(Error::NotPositiveDefinite);
    }
    let averaged = target.theta_average(theta)?;
    let basis = InvariantBasis::new(theta);
    let coords: Vec<Rational> = basis
        .pivots()
        .iter()
        .map(|&(i, j)| best_rational(averaged.get(i, j), denom_bound).expect("finite entry"))
        .collect();
    let form = SymmetricForm::new(basis.combine(&coords))?;
    if !is_positive_definite(&form) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(form)
}

/// [`rationalize_form`] packaged as a shape on `group`.
pub fn rationalize(target: &RealForm, group: &Arc<CheckedGroup>, denom_bound: u64) -> Result<ShapeDescriptor> {
    let form = rationalize_form(target, &group.holonomy, denom_bound)?;
    ShapeDescriptor::new(Arc::clone(group), form)
}

/// Exact arithmeticity test: the form (rational by type) is positive definite
/// and preserved by every holonomy element, so the group sits in the
/// ℚ-defined orthogonal affine group of the form.
pub fn is_arithmetic_shape(form: &SymmetricForm, theta: &HolonomyGroup) -> bool {
    form.dim() == theta.dim() && is_positive_definite(form) && is_invariant(form, theta)
}
