use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num::{BigInt, One, Zero};

use super::{format_rational, rat, IntPolynomial, Rational};
use crate::error::{Error, Result};

/// Dense row-major matrix over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    /// Convenience constructor for integer literals; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
            .expect("ragged integer matrix literal")
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn column(v: &[Rational]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|e| e.denom().is_one())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        self.require_square()?;
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Row echelon reduction; returns (reduced matrix, pivot columns, determinant sign-and-scale).
    fn eliminate(&self, reduce_above: bool) -> (Self, Vec<usize>, Rational) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut det = Rational::one();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                det = Rational::zero();
                continue;
            };
            if p != r {
                a.swap_rows(p, r);
                det = -det;
            }
            let pivot = a[(r, c)].clone();
            det *= &pivot;
            let inv = pivot.recip();
            for j in c..a.cols {
                a[(r, j)] *= &inv;
            }
            let lo = if reduce_above { 0 } else { r + 1 };
            for i in lo..a.rows {
                if i == r || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in c..a.cols {
                    let d = &f * &a[(r, j)];
                    a[(i, j)] -= d;
                }
            }
            pivots.push(c);
            r += 1;
        }
        if r < a.rows.min(a.cols) || a.rows != a.cols {
            det = Rational::zero();
        }
        (a, pivots, det)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.eliminate(false).1.len()
    }

    pub fn determinant(&self) -> Result<Rational> {
        self.require_square()?;
        Ok(self.eliminate(false).2)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (red, pivots, _) = aug.eliminate(true);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = red[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    /// Basis of the right null space `{x : self·x = 0}`.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let (red, pivots, _) = self.eliminate(true);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -red[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let (red, pivots, _) = self.eliminate(true);
        (red, pivots)
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        super::denominator_lcm(&self.data)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(super::to_f64).collect()
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; the `try_*` methods report it.
impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &RationalMatrix {
    type Output = RationalMatrix;
    fn add(self, rhs: &RationalMatrix) -> RationalMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &RationalMatrix {
    type Output = RationalMatrix;
    fn sub(self, rhs: &RationalMatrix) -> RationalMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &RationalMatrix {
    type Output = RationalMatrix;
    fn neg(self) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| -e).collect(),
        }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Exponential of a nilpotent matrix as the finite sum `Σ mⁱ/i!`.
///
/// Fails with [`Error::NotNilpotent`] when `m^dim ≠ 0`; the search for the
/// vanishing power never goes past `dim`.
pub fn nilpotent_exp(m: &RationalMatrix) -> Result<RationalMatrix> {
    m.require_square()?;
    let n = m.rows();
    let mut sum = RationalMatrix::identity(n);
    let mut term = RationalMatrix::identity(n);
    for i in 1..=n {
        term = (&term * m).scale(&Rational::new(BigInt::one(), BigInt::from(i)));
        if term.is_zero() {
            return Ok(sum);
        }
        sum = &sum + &term;
    }
    Err(Error::NotNilpotent { dim: n })
}

/// `det(tI − m)` by Faddeev–LeVerrier.
///
/// For integral `m` every coefficient is an integer; that is checked, not
/// assumed.
pub fn char_poly(m: &RationalMatrix) -> Result<IntPolynomial> {
    m.require_square()?;
    let n = m.rows();
    // coeffs[k] is the coefficient of t^k
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut aux = RationalMatrix::identity(n);
    for k in 1..=n {
        let am = m * &aux;
        let trace = (0..n).fold(Rational::zero(), |acc, i| acc + &am[(i, i)]);
        let c = -trace / rat(k as i64);
        coeffs[n - k] = c.clone();
        aux = &am + &RationalMatrix::identity(n).scale(&c);
    }
    let p = IntPolynomial::new(coeffs);
    if m.is_integral() {
        assert!(
            p.is_integral(),
            "characteristic polynomial of an integral matrix must be integral"
        );
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ratio;

    #[test]
    fn inverse_and_determinant() {
        let a = RationalMatrix::from_i64(&[&[2, 1], &[1, 3]]);
        assert_eq!(a.determinant().unwrap(), rat(5));
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity());
        assert_eq!(inv[(0, 1)], ratio(-1, 5));
        let sing = RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(sing.inverse(), Err(Error::Singular));
        assert_eq!(sing.determinant().unwrap(), rat(0));
        assert_eq!(sing.rank(), 1);
    }

    #[test]
    fn determinant_with_row_swap() {
        let a = RationalMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.determinant().unwrap(), rat(-1));
    }

    #[test]
    fn null_space_basis() {
        let a = RationalMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = a.null_space();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(a.mul_vec(&v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert!(nilpotent_exp(&RationalMatrix::zeros(3, 3)).unwrap().is_identity());
    }

    #[test]
    fn exp_two_step() {
        let m = RationalMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        assert_eq!(
            nilpotent_exp(&m).unwrap(),
            RationalMatrix::from_i64(&[&[1, 1], &[0, 1]])
        );
    }

    #[test]
    fn exp_three_step_preserves_lorentz_form() {
        let m = RationalMatrix::from_i64(&[&[0, 1, -1], &[-1, 0, 0], &[-1, 0, 0]]);
        // expected value expanded by hand: I + M + M²/2
        let expected = RationalMatrix::from_rows(vec![
            vec![rat(1), rat(1), rat(-1)],
            vec![rat(-1), ratio(1, 2), ratio(1, 2)],
            vec![rat(-1), ratio(-1, 2), ratio(3, 2)],
        ])
        .unwrap();
        let e = nilpotent_exp(&m).unwrap();
        assert_eq!(e, expected);
        let b = RationalMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -1]]);
        assert_eq!(&(&e.transpose() * &b) * &e, b);
    }

    #[test]
    fn exp_rejects_non_nilpotent() {
        let m = RationalMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        assert_eq!(nilpotent_exp(&m), Err(Error::NotNilpotent { dim: 2 }));
    }

    #[test]
    fn char_poly_examples() {
        let unip = RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(char_poly(&unip).unwrap(), IntPolynomial::from_i64(&[1, -2, 1]));
        let neg = RationalMatrix::from_i64(&[&[-1, 0], &[0, -1]]);
        assert_eq!(char_poly(&neg).unwrap(), IntPolynomial::from_i64(&[1, 2, 1]));
        // det(tI − R) = t·t − (−1)(1) = t² + 1
        let rot = RationalMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(char_poly(&rot).unwrap(), IntPolynomial::from_i64(&[1, 0, 1]));
    }

    #[test]
    fn char_poly_matches_determinant() {
        let m = RationalMatrix::from_i64(&[&[2, 7, -1], &[0, 3, 4], &[5, -2, 1]]);
        let p = char_poly(&m).unwrap();
        // p(0) = det(−m) = −det(m) for odd dimension
        assert_eq!(p.coefficient(0), -m.determinant().unwrap());
    }
}
