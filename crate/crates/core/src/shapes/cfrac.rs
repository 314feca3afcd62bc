//! Best rational approximation with a bounded denominator.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::exactlin::Rational;

/// The rational `p/q` with `1 ≤ q ≤ bound` closest to `x`.
///
/// Walks the continued fraction of the exact binary value of `x`; when the
/// next convergent's denominator would exceed `bound`, the best
/// semiconvergent is compared against the last convergent. Odd symmetry
/// (`f(−x) = −f(x)`) holds by construction. Returns `None` for non-finite
/// input or a zero bound.
pub fn best_rational(x: f64, bound: u64) -> Option<Rational> {
    if bound == 0 {
        return None;
    }
    let exact = Rational::from_float(x)?;
    Some(best_rational_exact(&exact, &BigInt::from(bound)))
}

pub(crate) fn best_rational_exact(x: &Rational, bound: &BigInt) -> Rational {
    if x.is_negative() {
        return -best_rational_exact(&-x, bound);
    }
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    loop {
        let a = rest.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if &q2 > bound {
            let k = (bound - &q0).div_floor(&q1);
            let semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
            let conv = Rational::new(p1, q1);
            return if (&semi - x).abs() < (&conv - x).abs() {
                semi
            } else {
                conv
            };
        }
        let frac = &rest - Rational::from_integer(a);
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if frac.is_zero() {
            return Rational::new(p1, q1);
        }
        rest = frac.recip();
    }
}
