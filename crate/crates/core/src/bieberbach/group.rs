use std::collections::HashMap;

use num::Zero;

use super::lattice::{in_lattice, rational_lattice_basis};
use super::AffineMap;
use crate::error::{Error, Result};
use crate::exactlin::{is_positive_definite, Rational, RationalMatrix, SymmetricForm};

/// Default cap on the holonomy closure. Crystallographic point groups in
/// dimension ≤ 6 are far smaller.
pub const DEFAULT_MAX_ORDER: usize = 1024;

/// A group of rational affine maps presented by generators.
///
/// Construction only checks shapes; whether the generators really present a
/// Bieberbach group is decided by [`holonomy`], [`translation_lattice`] and
/// [`is_torsion_free`] (or all at once by [`analyze`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BieberbachGroup {
    dim: usize,
    generators: Vec<AffineMap>,
    name: Option<String>,
}

impl BieberbachGroup {
    pub fn new(dim: usize, generators: Vec<AffineMap>, name: Option<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: g.dim(),
            });
        }
        Ok(Self { dim, generators, name })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[AffineMap] {
        &self.generators
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Conjugates every generator by `alpha`.
    pub fn conjugate_by(&self, alpha: &AffineMap) -> Result<Self> {
        let generators = self
            .generators
            .iter()
            .map(|g| g.conjugate_by(alpha))
            .collect::<Result<_>>()?;
        Ok(Self {
            dim: self.dim,
            generators,
            name: self.name.clone(),
        })
    }
}

/// Finite image of the group in GL(n; ℚ), with one group element over each
/// linear part.
///
/// Witnesses come from a breadth-first walk over generators, so they form a
/// Schreier transversal: `witness(i) ∘ g` and `witness(j)` lie over the same
/// linear part exactly when `j` is the index of `linear(i)·linear(g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolonomyGroup {
    elements: Vec<RationalMatrix>,
    witnesses: Vec<AffineMap>,
    index: HashMap<RationalMatrix, usize>,
    // (element, generator) -> element
    table: Vec<Vec<usize>>,
}

impl HolonomyGroup {
    /// The holonomy group generated by bare matrices, with linear witnesses.
    pub fn from_matrices(gens: &[RationalMatrix], dim: usize, max_order: usize) -> Result<Self> {
        let maps = gens
            .iter()
            .map(|g| AffineMap::linear_only(g.clone()))
            .collect::<Result<Vec<_>>>()?;
        close(&maps, dim, max_order)
    }

    pub fn trivial(dim: usize) -> Self {
        close(&[], dim, 1).expect("trivial group closes")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.witnesses[0].dim()
    }

    pub fn elements(&self) -> &[RationalMatrix] {
        &self.elements
    }

    pub fn witness(&self, i: usize) -> &AffineMap {
        &self.witnesses[i]
    }

    pub fn witnesses(&self) -> &[AffineMap] {
        &self.witnesses
    }

    pub fn position(&self, m: &RationalMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn contains(&self, m: &RationalMatrix) -> bool {
        self.index.contains_key(m)
    }
}

fn close(gens: &[AffineMap], dim: usize, max_order: usize) -> Result<HolonomyGroup> {
    let mut group = HolonomyGroup {
        elements: vec![RationalMatrix::identity(dim)],
        witnesses: vec![AffineMap::identity(dim)],
        index: HashMap::from([(RationalMatrix::identity(dim), 0)]),
        table: Vec::new(),
    };
    let mut next = 0;
    while next < group.elements.len() {
        let mut row = Vec::with_capacity(gens.len());
        for g in gens {
            let prod = &group.elements[next] * g.linear();
            let j = match group.index.get(&prod) {
                Some(&j) => j,
                None => {
                    if group.elements.len() >= max_order {
                        return Err(Error::HolonomyBound { bound: max_order });
                    }
                    let w = group.witnesses[next].compose(g)?;
                    group.index.insert(prod.clone(), group.elements.len());
                    group.elements.push(prod);
                    group.witnesses.push(w);
                    group.elements.len() - 1
                }
            };
            row.push(j);
        }
        group.table.push(row);
        next += 1;
    }
    Ok(group)
}

/// Closure of the generators' linear parts, each element carrying a group
/// element that projects to it.
pub fn holonomy(g: &BieberbachGroup, max_order: usize) -> Result<HolonomyGroup> {
    if max_order == 0 {
        return Err(Error::InvalidConfig("max_order must be at least 1".into()));
    }
    close(&g.generators, g.dim, max_order)
}

/// Basis (as matrix columns) of the translation subgroup.
///
/// Translations are collected as Schreier generators `w_i ∘ g ∘ w_j⁻¹` of the
/// kernel of the projection to the holonomy; these include every pure
/// translation generator and every `|θ|`-th power, and generate the whole
/// translation subgroup.
pub fn translation_lattice(g: &BieberbachGroup, theta: &HolonomyGroup) -> Result<RationalMatrix> {
    let n = g.dim;
    let mut vectors = Vec::new();
    for (i, row) in theta.table.iter().enumerate() {
        for (gen, &j) in g.generators.iter().zip(row) {
            let s = theta.witnesses[i]
                .compose(gen)?
                .compose(&theta.witnesses[j].inverse())?;
            debug_assert!(s.is_pure_translation());
            if s.translation().iter().any(|x| !x.is_zero()) {
                vectors.push(s.translation().to_vec());
            }
        }
    }
    let basis = rational_lattice_basis(&vectors);
    if basis.len() < n {
        return Err(Error::RankDeficient {
            rank: basis.len(),
            dim: n,
        });
    }
    let mut m = RationalMatrix::zeros(n, n);
    for (j, v) in basis.iter().enumerate() {
        for (i, x) in v.iter().enumerate() {
            m[(i, j)] = x.clone();
        }
    }
    Ok(m)
}

/// Decides torsion-freeness exactly.
///
/// An element `(h, t + l)` over a nontrivial holonomy element `h` has finite
/// order iff it fixes a point, iff `t + l ∈ im(I − h)` for some lattice
/// vector `l`. In lattice coordinates this is the question whether `C·t`
/// lies in the ℤ-span of the columns of `C`, where the rows of `C` span the
/// annihilator of `im(I − h)`.
pub fn is_torsion_free(theta: &HolonomyGroup, lattice: &RationalMatrix) -> bool {
    let n = lattice.rows();
    let to_lattice = lattice.inverse().expect("lattice basis has full rank");
    for (h, w) in theta.elements.iter().zip(&theta.witnesses) {
        if h.is_identity() {
            continue;
        }
        let h_lat = &(&to_lattice * h) * lattice;
        let t_lat = to_lattice.mul_vec(w.translation()).expect("dimension");
        let i_minus_h = &RationalMatrix::identity(n) - &h_lat;
        let annihilator = i_minus_h.transpose().null_space();
        // columns of C, as generators of a lattice in ℚ^k
        let columns: Vec<Vec<Rational>> = (0..n)
            .map(|j| annihilator.iter().map(|row| row[j].clone()).collect())
            .collect();
        let target: Vec<Rational> = annihilator
            .iter()
            .map(|row| row.iter().zip(&t_lat).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect();
        if in_lattice(&columns, &target) {
            return false;
        }
    }
    true
}

/// The holonomy average `(1/|θ|) Σ gᵀ·F·g` of a positive definite form.
pub fn theta_average(form: &SymmetricForm, theta: &HolonomyGroup) -> Result<SymmetricForm> {
    if form.dim() != theta.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta.dim(),
            found: form.dim(),
        });
    }
    if !is_positive_definite(form) {
        return Err(Error::NotPositiveDefinite);
    }
    let n = form.dim();
    let sum = theta.elements.iter().fold(RationalMatrix::zeros(n, n), |acc, g| {
        &acc + form.congruent(g).expect("dimensions checked").matrix()
    });
    let avg = sum.scale(&Rational::new(1.into(), theta.order().into()));
    SymmetricForm::new(avg)
}

/// True iff `gᵀ·F·g = F` for every holonomy element.
pub fn is_invariant(form: &SymmetricForm, theta: &HolonomyGroup) -> bool {
    form.dim() == theta.dim() && theta.elements.iter().all(|g| form.is_preserved_by(g))
}

/// A generator presentation together with its computed holonomy, lattice
/// and torsion verdict.
#[derive(Debug, Clone)]
pub struct CheckedGroup {
    pub group: BieberbachGroup,
    pub holonomy: HolonomyGroup,
    pub lattice: RationalMatrix,
    pub torsion_free: bool,
}

impl CheckedGroup {
    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    pub fn name(&self) -> Option<&str> {
        self.group.name()
    }

    /// `Err` unless the group is torsion free.
    pub fn require_torsion_free(self) -> Result<Self> {
        if self.torsion_free {
            Ok(self)
        } else {
            Err(Error::InvalidConfig(format!(
                "group {} has torsion",
                self.group.name().unwrap_or("<unnamed>")
            )))
        }
    }
}

/// Runs holonomy closure, lattice extraction and the torsion test.
pub fn analyze(group: BieberbachGroup, max_order: usize) -> Result<CheckedGroup> {
    let holonomy = holonomy(&group, max_order)?;
    let lattice = translation_lattice(&group, &holonomy)?;
    let torsion_free = is_torsion_free(&holonomy, &lattice);
    Ok(CheckedGroup {
        group,
        holonomy,
        lattice,
        torsion_free,
    })
}
