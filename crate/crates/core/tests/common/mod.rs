#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use cusp_core::bieberbach::{catalog, holonomy, theta_average, AffineMap, BieberbachGroup};
use cusp_core::exactlin::{rat, ratio, Rational, RationalMatrix, SymmetricForm};

/// Searches words of length at most `len` in the generators and their
/// inverses, each composed with every short pure translation already found,
/// for a non-identity element of finite order.
pub fn brute_force_has_torsion(g: &BieberbachGroup, len: usize) -> bool {
    let n = g.dim();
    let id = AffineMap::identity(n);
    let mut letters = Vec::new();
    for x in g.generators() {
        letters.push(x.clone());
        letters.push(x.inverse());
    }
    let mut seen: HashSet<AffineMap> = HashSet::from([id.clone()]);
    let mut frontier = vec![id.clone()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in &letters {
                let e = w.compose(l).unwrap();
                if seen.insert(e.clone()) {
                    next.push(e);
                }
            }
        }
        frontier = next;
    }
    let small = |t: &[Rational]| t.iter().all(|x| num::Signed::abs(x) <= rat(2));
    let translations: Vec<AffineMap> = seen
        .iter()
        .filter(|e| e.is_pure_translation() && small(e.translation()))
        .cloned()
        .collect();
    for e in seen.iter().filter(|e| !e.is_pure_translation()) {
        let order = (1..=24u64)
            .find(|&k| e.linear().pow(k).unwrap().is_identity())
            .expect("holonomy elements have small order");
        for t in &translations {
            let candidate = e.compose(t).unwrap();
            if candidate.pow(order as i64).is_identity() {
                return true;
            }
        }
    }
    false
}

/// Swaps in a new translation part; the standard lattice is added so the
/// result stays crystallographic.
fn replace_translation(name: &str, index: usize, t: Vec<Rational>) -> BieberbachGroup {
    let g = catalog(name).unwrap();
    let mut gens = g.generators().to_vec();
    gens[index] = AffineMap::new(gens[index].linear().clone(), t).unwrap();
    let n = g.dim();
    gens.extend((0..n).map(|i| AffineMap::translation_by((0..n).map(|j| rat((i == j) as i64)).collect())));
    BieberbachGroup::new(g.dim(), gens, Some(format!("{name}-torsioned"))).unwrap()
}

fn with_extra(name: &str, extra: AffineMap) -> BieberbachGroup {
    let g = catalog(name).unwrap();
    let mut gens = g.generators().to_vec();
    gens.push(extra);
    BieberbachGroup::new(g.dim(), gens, Some(format!("{name}-extended"))).unwrap()
}

/// Ten groups that contain torsion, each a small change to a catalog entry.
pub fn torsioned_variants() -> Vec<BieberbachGroup> {
    let zero3 = || vec![rat(0), rat(0), rat(0)];
    let minus2 = RationalMatrix::identity(2).scale(&rat(-1));
    vec![
        replace_translation("klein", 1, vec![rat(0), rat(0)]),
        replace_translation("klein", 1, vec![rat(0), ratio(1, 2)]),
        replace_translation("dicosm", 3, zero3()),
        replace_translation("dicosm", 3, vec![ratio(1, 2), rat(0), rat(0)]),
        replace_translation("tricosm", 3, zero3()),
        replace_translation("tetracosm", 3, zero3()),
        replace_translation("hexacosm", 3, vec![ratio(1, 2), ratio(1, 2), rat(0)]),
        replace_translation("hantzsche-wendt", 3, vec![rat(0), ratio(1, 2), rat(0)]),
        replace_translation("amphicosm", 3, zero3()),
        with_extra(
            "torus-2",
            AffineMap::new(minus2, vec![ratio(1, 2), ratio(1, 2)]).unwrap(),
        ),
    ]
}

/// Three distinct invariant rational shapes for a catalog group.
pub fn sample_shapes(g: &BieberbachGroup) -> Vec<SymmetricForm> {
    let n = g.dim();
    let theta = holonomy(g, 1024).unwrap();
    let diag = SymmetricForm::diagonal(&(1..=n as i64).map(rat).collect::<Vec<_>>());
    let mut m = RationalMatrix::identity(n).scale(&rat(n as i64 + 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[(i, j)] = ratio(1, (i + j + 2) as i64);
            }
        }
    }
    let hilbertish = SymmetricForm::new(m).unwrap();
    let forms: Vec<SymmetricForm> = [SymmetricForm::identity(n), diag, hilbertish]
        .iter()
        .map(|f| theta_average(f, &theta).unwrap())
        .collect();
    forms
}

/// Ascending-coefficient integer polynomials.
pub type Poly = Vec<i64>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    p
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Remainder of `a` by monic `b`.
fn poly_rem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let db = b.len() - 1;
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        for (k, c) in b.iter().enumerate() {
            r[shift + k] -= lead * c;
        }
        r.pop();
        r = trim(r);
        if r.is_empty() {
            r.push(0);
        }
    }
    r
}

fn divides(b: &Poly, a: &Poly) -> bool {
    poly_rem(a, b).iter().all(|&c| c == 0)
}

fn companion(p: &Poly) -> Vec<Vec<i64>> {
    let d = p.len() - 1;
    let mut m = vec![vec![0; d]; d];
    for i in 1..d {
        m[i][i - 1] = 1;
    }
    for i in 0..d {
        m[i][d - 1] = -p[i];
    }
    m
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// Powers of a finite-order integer matrix stay bounded, so entry growth
/// past `1000` proves infinite order.
fn has_finite_order(m: &[Vec<i64>], limit: usize) -> bool {
    let n = m.len();
    let id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut p = m.to_vec();
    for _ in 0..limit {
        if p == id {
            return true;
        }
        if p.iter().flatten().any(|x| x.abs() > 1000) {
            return false;
        }
        p = mat_mul(&p, m);
    }
    false
}

/// Monic integer polynomials of degree `d` with coefficients bounded by the
/// binomial bound for roots on the unit circle.
fn monic_candidates(d: usize) -> Vec<Poly> {
    let binom = |k: usize| -> i64 { (0..k).fold(1i64, |acc, i| acc * (d - i) as i64 / (i as i64 + 1)) };
    let mut out = vec![vec![]];
    for k in 0..d {
        let b = binom(k);
        out = out
            .into_iter()
            .flat_map(|p: Poly| {
                (-b..=b).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|mut p| {
            p.push(1);
            p
        })
        .collect()
}

/// Characteristic polynomials of finite-order rational matrices of size `n`
/// other than `(t−1)ⁿ`, found by enumerating rational canonical forms
/// `C(f₁) ⊕ … ⊕ C(f_k)` with `f₁ | f₂ | …` whose blocks have finite order.
pub fn rational_canonical_torsion_polys(n: usize) -> BTreeSet<Poly> {
    let mut cyclic: Vec<Poly> = Vec::new();
    for d in 1..=n {
        for p in monic_candidates(d) {
            if has_finite_order(&companion(&p), 64) {
                cyclic.push(p);
            }
        }
    }
    let mut out = BTreeSet::new();
    fn chains(cyclic: &[Poly], last: Option<&Poly>, remaining: usize, acc: Poly, out: &mut BTreeSet<Poly>) {
        if remaining == 0 {
            out.insert(acc);
            return;
        }
        for f in cyclic {
            let d = f.len() - 1;
            if d > remaining || !last.is_none_or(|l| divides(l, f)) {
                continue;
            }
            chains(cyclic, Some(f), remaining - d, poly_mul(&acc, f), out);
        }
    }
    chains(&cyclic, None, n, vec![1], &mut out);
    let unipotent = (0..n).fold(vec![1], |acc, _| poly_mul(&acc, &vec![-1, 1]));
    out.remove(&unipotent);
    out
}
