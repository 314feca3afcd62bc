//! Integer lattices spanned by rational vectors.

use num::{BigInt, Integer, Signed, Zero};

use crate::exactlin::{denominator_lcm, Rational};

/// Row-style Hermite reduction: returns a basis (echelon rows with positive
/// pivots) of the ℤ-span of `rows`.
pub(crate) fn hermite_basis(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let Some(width) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut basis = Vec::new();
    for col in 0..width {
        loop {
            // Euclid on the column among remaining rows
            let mut nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let p = nz[0];
            let pivot_row = rows[p].clone();
            for &i in &nz[1..] {
                let q = rows[i][col].div_floor(&pivot_row[col]);
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        if let Some(i) = rows.iter().position(|r| !r[col].is_zero()) {
            let mut r = rows.swap_remove(i);
            if r[col].is_negative() {
                r.iter_mut().for_each(|x| *x = -x.clone());
            }
            basis.push(r);
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    // reduce entries above pivots into [0, pivot)
    for i in 0..basis.len() {
        let pc = basis[i].iter().position(|x| !x.is_zero()).expect("nonzero basis row");
        for k in 0..i {
            let q = basis[k][pc].div_floor(&basis[i][pc]);
            if q.is_zero() {
                continue;
            }
            let row = basis[i].clone();
            for (x, y) in basis[k].iter_mut().zip(&row) {
                *x -= &q * y;
            }
        }
    }
    basis
}

/// Basis of the ℤ-span of rational vectors of a common length.
pub(crate) fn rational_lattice_basis(vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let d = denominator_lcm(vectors.iter().flatten());
    let dr = Rational::from_integer(d.clone());
    let ints = vectors
        .iter()
        .map(|v| v.iter().map(|x| (x * &dr).to_integer()).collect())
        .collect();
    hermite_basis(ints)
        .into_iter()
        .map(|row| row.into_iter().map(|x| Rational::new(x, d.clone())).collect())
        .collect()
}

/// Whether `target` lies in the ℤ-span of `generators` (all of length
/// `target.len()`).
pub(crate) fn in_lattice(generators: &[Vec<Rational>], target: &[Rational]) -> bool {
    let mut all: Vec<Vec<Rational>> = generators.to_vec();
    all.push(target.to_vec());
    let d = denominator_lcm(all.iter().flatten());
    let dr = Rational::from_integer(d);
    let scale = |v: &[Rational]| -> Vec<BigInt> { v.iter().map(|x| (x * &dr).to_integer()).collect() };
    let basis = hermite_basis(generators.iter().map(|g| scale(g)).collect());
    let mut rest = scale(target);
    for row in &basis {
        let pc = row.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
        let (q, r) = rest[pc].div_rem(&row[pc]);
        if !r.is_zero() {
            return false;
        }
        for (x, y) in rest.iter_mut().zip(row) {
            *x -= &q * y;
        }
    }
    rest.iter().all(Zero::is_zero)
}
