//! Unipotent refinement of Selberg's lemma over ℚ.
//!
//! Given `Λ ⊂ GL(n; ℚ)` with a unipotent subgroup `Γ`, find a prime `q` such
//! that the level-`q` congruence subgroup of `Λ` containing `Γ` is torsion
//! free: no finite-order element with an eigenvalue `≠ 1` can reduce mod `q`
//! to a matrix with characteristic polynomial `(t−1)ⁿ`.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num::{BigInt, BigUint, Integer, One, Signed, Zero};
use num_prime::nt_funcs::{factorize, is_prime64};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{char_poly, IntPolynomial, RationalMatrix};

/// A finitely generated `Λ ⊂ GL(n; ℚ)` together with generators of a
/// unipotent subgroup `Γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGroupInput {
    pub n: usize,
    pub lambda_gens: Vec<RationalMatrix>,
    pub gamma_gens: Vec<RationalMatrix>,
}

impl MatrixGroupInput {
    /// Checks shapes and invertibility of `Λ` and unipotence of `Γ`.
    pub fn new(n: usize, lambda_gens: Vec<RationalMatrix>, gamma_gens: Vec<RationalMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("degree must be at least 1".into()));
        }
        for m in lambda_gens.iter().chain(&gamma_gens) {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if m.rows() != n { m.rows() } else { m.cols() },
                });
            }
        }
        for m in &lambda_gens {
            if m.determinant()?.is_zero() {
                return Err(Error::Singular);
            }
        }
        let unipotent = IntPolynomial::unipotent(n);
        for (i, g) in gamma_gens.iter().enumerate() {
            if char_poly(g)? != unipotent {
                return Err(Error::UnipotentViolation { generator: i });
            }
        }
        Ok(Self {
            n,
            lambda_gens,
            gamma_gens,
        })
    }
}

/// Why a prime is excluded.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BadPrimeReason {
    /// `p ≤ n`.
    SmallCharacteristic,
    /// `p` divides the denominator of some generator entry.
    Denominator,
    /// `p` divides the numerator of `det` of a `Λ` generator, so the
    /// generator's inverse is not defined over `ℤ[1/S]` at `p`.
    Determinant,
    /// `p_j ≡ (t−1)ⁿ (mod p)` for this torsion polynomial.
    CoefficientDivisor { poly: String },
}

impl std::fmt::Display for BadPrimeReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::SmallCharacteristic => f.write_str("small characteristic"),
            Self::Denominator => f.write_str("denominator"),
            Self::Determinant => f.write_str("determinant"),
            Self::CoefficientDivisor { poly } => write!(f, "{poly} ≡ (t-1)^n"),
        }
    }
}

pub type BadPrimes = BTreeMap<BigUint, BTreeSet<BadPrimeReason>>;

/// Reductions of one torsion polynomial and of `(t−1)ⁿ` mod the certificate
/// prime (ascending coefficients in `[0, q)`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueEvidence {
    pub poly: String,
    pub reduced: Vec<u64>,
    pub unipotent_reduced: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelbergCertificate {
    pub n: usize,
    pub prime: u64,
    pub torsion_polys: Vec<IntPolynomial>,
    pub bad_primes: BadPrimes,
    pub residue_evidence: Vec<ResidueEvidence>,
}

fn euler_phi(d: u64) -> u64 {
    num_prime::nt_funcs::factorize64(d)
        .into_iter()
        .fold(d, |acc, (p, _)| acc / p * (p - 1))
}

/// Orders `d` of roots of unity of degree at most `n` over ℚ, i.e. `φ(d) ≤ n`.
pub fn admissible_orders(n: usize) -> Vec<u64> {
    // φ(d) ≥ √(d/2), so d ≤ 2n²
    let bound = 2 * (n as u64) * (n as u64);
    (1..=bound.max(2)).filter(|&d| euler_phi(d) <= n as u64).collect()
}

/// Exponent of the finite-order elements of `GL(n; ℚ)`: every such element
/// satisfies `η^L = I` for this `L`.
pub fn torsion_exponent(n: usize) -> u64 {
    admissible_orders(n).into_iter().fold(1, |acc, d| acc.lcm(&d))
}

/// `Φ_d` for every `d` in `orders` (ascending), built from `t^d − 1`.
fn cyclotomics(orders: &[u64]) -> BTreeMap<u64, IntPolynomial> {
    let mut out: BTreeMap<u64, IntPolynomial> = BTreeMap::new();
    let mut cache: BTreeMap<u64, IntPolynomial> = BTreeMap::new();
    fn phi(d: u64, cache: &mut BTreeMap<u64, IntPolynomial>) -> IntPolynomial {
        if let Some(p) = cache.get(&d) {
            return p.clone();
        }
        let mut coeffs = vec![0i64; d as usize + 1];
        coeffs[0] = -1;
        coeffs[d as usize] = 1;
        let mut p = IntPolynomial::from_i64(&coeffs);
        for e in (1..d).filter(|e| d.is_multiple_of(*e)) {
            p = p.div_exact(&phi(e, cache));
        }
        cache.insert(d, p.clone());
        p
    }
    for &d in orders {
        out.insert(d, phi(d, &mut cache));
    }
    out
}

/// Monic degree-`n` products of cyclotomic polynomials other than `(t−1)ⁿ`:
/// exactly the characteristic polynomials of finite-order elements of
/// `GL(n; ℚ)` with an eigenvalue `≠ 1`. Sorted, duplicate free.
pub fn torsion_polynomials(n: usize) -> Vec<IntPolynomial> {
    let orders = admissible_orders(n);
    let phis = cyclotomics(&orders);
    let parts: Vec<(u64, usize)> = orders.iter().map(|&d| (d, euler_phi(d) as usize)).collect();
    let mut out = BTreeSet::new();
    let mut chosen = Vec::new();
    fn walk(
        parts: &[(u64, usize)],
        start: usize,
        remaining: usize,
        chosen: &mut Vec<u64>,
        phis: &BTreeMap<u64, IntPolynomial>,
        out: &mut BTreeSet<IntPolynomial>,
    ) {
        if remaining == 0 {
            if chosen.iter().any(|&d| d != 1) {
                let p = chosen.iter().fold(IntPolynomial::one(), |acc, d| &acc * &phis[d]);
                out.insert(p);
            }
            return;
        }
        for i in start..parts.len() {
            let (d, deg) = parts[i];
            if deg <= remaining {
                chosen.push(d);
                walk(parts, i, remaining - deg, chosen, phis, out);
                chosen.pop();
            }
        }
    }
    if n > 0 {
        walk(&parts, 0, n, &mut chosen, &phis, &mut out);
    }
    out.into_iter().collect()
}

fn primes_dividing(x: &BigInt) -> Vec<BigUint> {
    let x = x.abs().to_biguint().expect("non-negative");
    if x <= BigUint::one() {
        return Vec::new();
    }
    factorize(x).into_keys().collect()
}

fn small_primes(upto: usize) -> impl Iterator<Item = u64> {
    (2..=upto as u64).filter(|&p| is_prime64(p))
}

/// Primes excluded as reduction characteristics, with every applicable
/// reason. A torsion polynomial excludes `p` exactly when
/// `p_j ≡ (t−1)ⁿ (mod p)`, i.e. when `p` divides the content of the
/// difference.
pub fn bad_primes(input: &MatrixGroupInput, polys: &[IntPolynomial]) -> BadPrimes {
    let mut out: BadPrimes = BTreeMap::new();
    let mut add = |p: BigUint, r: BadPrimeReason| {
        out.entry(p).or_default().insert(r);
    };
    for p in small_primes(input.n) {
        add(p.into(), BadPrimeReason::SmallCharacteristic);
    }
    let mut dens = BTreeSet::new();
    for m in input.lambda_gens.iter().chain(&input.gamma_gens) {
        dens.insert(m.denominator_lcm());
    }
    for d in dens {
        for p in primes_dividing(&d) {
            add(p, BadPrimeReason::Denominator);
        }
    }
    for m in &input.lambda_gens {
        if let Ok(det) = m.determinant() {
            for p in primes_dividing(det.numer()) {
                add(p, BadPrimeReason::Determinant);
            }
        }
    }
    let unipotent = IntPolynomial::unipotent(input.n);
    for poly in polys {
        let diff = poly - &unipotent;
        for p in primes_dividing(&diff.content()) {
            add(p, BadPrimeReason::CoefficientDivisor { poly: poly.to_string() });
        }
    }
    out
}

/// Certificate for a given prime, without judging whether it is good.
pub fn certificate_for_prime(input: &MatrixGroupInput, prime: u64) -> SelbergCertificate {
    let polys = torsion_polynomials(input.n);
    let bad = bad_primes(input, &polys);
    let unipotent_reduced = IntPolynomial::unipotent(input.n).reduce_mod(prime).unwrap_or_default();
    let residue_evidence = polys
        .iter()
        .map(|p| ResidueEvidence {
            poly: p.to_string(),
            reduced: p.reduce_mod(prime).unwrap_or_default(),
            unipotent_reduced: unipotent_reduced.clone(),
        })
        .collect();
    SelbergCertificate {
        n: input.n,
        prime,
        torsion_polys: polys,
        bad_primes: bad,
        residue_evidence,
    }
}

/// Certificate for the smallest prime outside [`bad_primes`].
pub fn good_prime(input: &MatrixGroupInput) -> Result<SelbergCertificate> {
    let unipotent = IntPolynomial::unipotent(input.n);
    for (i, g) in input.gamma_gens.iter().enumerate() {
        if char_poly(g)? != unipotent {
            return Err(Error::UnipotentViolation { generator: i });
        }
    }
    let bad = bad_primes(input, &torsion_polynomials(input.n));
    let q = (2u64..)
        .filter(|&p| is_prime64(p))
        .find(|&p| !bad.contains_key(&BigUint::from(p)))
        .expect("finitely many bad primes");
    Ok(certificate_for_prime(input, q))
}

fn reduced_char_poly(m: &RationalMatrix, q: u64) -> Option<Vec<u64>> {
    char_poly(m).ok()?.reduce_mod(q)
}

/// Recomputes every claim in the certificate that does not need search.
fn certificate_consistent(input: &MatrixGroupInput, cert: &SelbergCertificate) -> bool {
    let q = cert.prime;
    if cert.n != input.n || !is_prime64(q) || q as usize <= input.n {
        return false;
    }
    let expected = certificate_for_prime(input, q);
    if expected != *cert || cert.bad_primes.contains_key(&BigUint::from(q)) {
        return false;
    }
    let qb = BigInt::from(q);
    let denominators_ok = input
        .lambda_gens
        .iter()
        .chain(&input.gamma_gens)
        .all(|m| !m.denominator_lcm().is_multiple_of(&qb));
    let evidence_ok = cert
        .residue_evidence
        .iter()
        .all(|e| e.reduced != e.unipotent_reduced && !e.unipotent_reduced.is_empty());
    let unipotent = IntPolynomial::unipotent(input.n).reduce_mod(q);
    let gamma_ok = input
        .gamma_gens
        .iter()
        .all(|g| reduced_char_poly(g, q).is_some() && reduced_char_poly(g, q) == unipotent);
    denominators_ok && evidence_ok && gamma_ok
}

/// Brute-force search for a finite-order `η ≠ I` among words of length at
/// most `word_length` in the `Λ` generators and their inverses whose
/// characteristic polynomial is `(t−1)ⁿ` mod `q`. Words whose entries are
/// not `q`-integral are skipped.
pub fn find_counterexample(input: &MatrixGroupInput, q: u64, word_length: usize) -> Option<RationalMatrix> {
    let n = input.n;
    let identity = RationalMatrix::identity(n);
    let mut letters = Vec::new();
    for g in &input.lambda_gens {
        letters.push(g.clone());
        if let Ok(inv) = g.inverse() {
            letters.push(inv);
        }
    }
    let torsion: HashSet<IntPolynomial> = torsion_polynomials(n).into_iter().collect();
    let exponent = torsion_exponent(n);
    let unipotent = IntPolynomial::unipotent(n).reduce_mod(q);
    let qb = BigInt::from(q);
    let mut seen: HashSet<RationalMatrix> = HashSet::from([identity.clone()]);
    let mut frontier = VecDeque::from([identity.clone()]);
    for _ in 0..word_length {
        let mut next = VecDeque::new();
        for w in frontier {
            for l in &letters {
                let eta = &w * l;
                if !seen.insert(eta.clone()) {
                    continue;
                }
                if !eta.denominator_lcm().is_multiple_of(&qb) {
                    if let Ok(p) = char_poly(&eta) {
                        if p.reduce_mod(q) == unipotent
                            && torsion.contains(&p)
                            && eta.pow(exponent).is_ok_and(|m| m.is_identity())
                        {
                            return Some(eta);
                        }
                    }
                }
                next.push_back(eta);
            }
        }
        frontier = next;
    }
    None
}

/// Re-checks the certificate and then searches words up to `word_length`
/// for a torsion element that the congruence condition fails to exclude.
pub fn verify_certificate(input: &MatrixGroupInput, cert: &SelbergCertificate, word_length: usize) -> bool {
    certificate_consistent(input, cert) && find_counterexample(input, cert.prime, word_length).is_none()
}
