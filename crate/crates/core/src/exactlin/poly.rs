use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use super::{format_rational, rat, Rational};

/// Univariate polynomial in `t` with rational coefficients in ascending
/// degree. Used for characteristic polynomials, which are integral whenever
/// the matrix is.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<Rational>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `(t − 1)^n`, the characteristic polynomial of a unipotent n×n matrix.
    pub fn unipotent(n: usize) -> Self {
        let linear = Self::from_i64(&[-1, 1]);
        (0..n).fold(Self::one(), |acc, _| &acc * &linear)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with −1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn coefficient(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// Gcd of the numerators of an integral polynomial (zero for the zero
    /// polynomial).
    pub fn content(&self) -> BigInt {
        debug_assert!(self.is_integral());
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c.numer()))
    }

    /// Exact quotient by a monic divisor. Panics if the division leaves a
    /// remainder or the divisor is not monic.
    pub fn div_exact(&self, divisor: &Self) -> Self {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            assert!(self.is_zero(), "inexact polynomial division");
            return Self::zero();
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
            quot[k] = c;
        }
        assert!(rem.iter().all(Zero::is_zero), "inexact polynomial division");
        Self::new(quot)
    }

    /// Coefficients reduced into `0..p`, ascending, trailing zeros trimmed.
    /// Returns `None` if `p` divides a denominator.
    pub fn reduce_mod(&self, p: u64) -> Option<Vec<u64>> {
        let modulus = BigInt::from(p);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let den = c.denom().mod_floor(&modulus);
            if den.is_zero() {
                return None;
            }
            let inv = den.modpow(&(&modulus - 2u32), &modulus);
            let v = (c.numer().mod_floor(&modulus) * inv).mod_floor(&modulus);
            out.push(v.to_u64().expect("residue fits in u64"));
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        Some(out)
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..len).map(|k| self.coefficient(k) + rhs.coefficient(k)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..len).map(|k| self.coefficient(k) - rhs.coefficient(k)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

/// Orders by degree, then by coefficients from the leading term down.
impl Ord for IntPolynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for IntPolynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{}", format_rational(&mag))?;
            }
            match k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}
