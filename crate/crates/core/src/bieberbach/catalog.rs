//! Presentations of low-dimensional flat-manifold groups in lattice
//! coordinates.
//!
//! Every entry is re-checked by [`analyze`] when it is loaded; nothing here is
//! taken on trust.

use super::{analyze, AffineMap, BieberbachGroup, DEFAULT_MAX_ORDER};
use crate::error::{Error, Result};
use crate::exactlin::{rat, ratio, Rational, RationalMatrix};

const THREE_DIMENSIONAL: &[&str] = &[
    "dicosm",
    "tricosm",
    "tetracosm",
    "hexacosm",
    "hantzsche-wendt",
    "amphicosm",
];

/// All names understood by [`catalog`].
pub fn catalog_names() -> Vec<String> {
    let mut names: Vec<String> = (1..=6).map(|n| format!("torus-{n}")).collect();
    names.push("klein".into());
    names.extend(THREE_DIMENSIONAL.iter().map(|s| s.to_string()));
    names
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|j| rat((i == j) as i64)).collect()
}

fn lattice_translations(n: usize) -> Vec<AffineMap> {
    (0..n).map(|i| AffineMap::translation_by(unit(n, i))).collect()
}

fn map(linear: &[&[i64]], translation: Vec<Rational>) -> AffineMap {
    AffineMap::new(RationalMatrix::from_i64(linear), translation).expect("catalog literal is invertible")
}

/// Screw motion about the third axis: planar block `rot`, shift `1/k` along it.
fn screw(rot: [[i64; 2]; 2], k: i64) -> AffineMap {
    map(
        &[&[rot[0][0], rot[0][1], 0], &[rot[1][0], rot[1][1], 0], &[0, 0, 1]],
        vec![rat(0), rat(0), ratio(1, k)],
    )
}

fn build(name: &str) -> Option<BieberbachGroup> {
    let (dim, gens) = if let Some(n) = name.strip_prefix("torus-") {
        let n: usize = n.parse().ok().filter(|n| (1..=6).contains(n))?;
        (n, lattice_translations(n))
    } else {
        match name {
            "klein" => (
                2,
                vec![
                    AffineMap::translation_by(unit(2, 1)),
                    map(&[&[1, 0], &[0, -1]], vec![ratio(1, 2), rat(0)]),
                ],
            ),
            "dicosm" => (3, with_lattice(vec![screw([[-1, 0], [0, -1]], 2)])),
            "tricosm" => (3, with_lattice(vec![screw([[0, -1], [1, -1]], 3)])),
            "tetracosm" => (3, with_lattice(vec![screw([[0, -1], [1, 0]], 4)])),
            "hexacosm" => (3, with_lattice(vec![screw([[1, -1], [1, 0]], 6)])),
            "hantzsche-wendt" => (
                3,
                with_lattice(vec![
                    map(
                        &[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]],
                        vec![ratio(1, 2), ratio(1, 2), rat(0)],
                    ),
                    map(
                        &[&[-1, 0, 0], &[0, 1, 0], &[0, 0, -1]],
                        vec![rat(0), ratio(1, 2), ratio(1, 2)],
                    ),
                ]),
            ),
            "amphicosm" => (
                3,
                with_lattice(vec![map(
                    &[&[1, 0, 0], &[0, 1, 0], &[0, 0, -1]],
                    vec![ratio(1, 2), rat(0), rat(0)],
                )]),
            ),
            _ => return None,
        }
    };
    Some(BieberbachGroup::new(dim, gens, Some(name.to_string())).expect("catalog dimensions agree"))
}

fn with_lattice(mut extra: Vec<AffineMap>) -> Vec<AffineMap> {
    let mut gens = lattice_translations(3);
    gens.append(&mut extra);
    gens
}

/// Looks up a flat-manifold group by name and verifies it: the holonomy must
/// close, the translations must span, and the group must be torsion free.
pub fn catalog(name: &str) -> Result<BieberbachGroup> {
    let group = build(name).ok_or_else(|| Error::UnknownName(name.to_string()))?;
    let checked = analyze(group, DEFAULT_MAX_ORDER).map_err(|e| Error::CatalogCorrupt {
        name: name.to_string(),
        reason: e.to_string(),
    })?;
    if !checked.torsion_free {
        return Err(Error::CatalogCorrupt {
            name: name.to_string(),
            reason: "group has torsion".into(),
        });
    }
    Ok(checked.group)
}
