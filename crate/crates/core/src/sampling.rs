//! Random and adversarial test functions vanishing on the boundary.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{GridFunction, Mesh};
use crate::spectral::first_eigenpair;

/// Family a sampled test function was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// i.i.d. uniform[-1,1] values at every interior point
    Rough,
    /// uniform[-1,1] values on a random interior sub-box, zero elsewhere
    Patch,
    /// smooth compactly supported bump with random centre and width
    Bump,
    Eigenfunction,
    DistanceCone,
    PointMass,
}

impl SampleKind {
    pub fn name(&self) -> &'static str {
        match self {
            SampleKind::Rough => "rough",
            SampleKind::Patch => "patch",
            SampleKind::Bump => "bump",
            SampleKind::Eigenfunction => "eigenfunction",
            SampleKind::DistanceCone => "distance-cone",
            SampleKind::PointMass => "point-mass",
        }
    }
}

/// Derives an independent stream seed for sample `i`.
pub fn sample_seed(seed: u64, i: u64) -> u64 {
    let mut z = seed ^ i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rough(mesh: &Mesh, rng: &mut ChaCha8Rng) -> GridFunction {
    let vals: Vec<f64> = (0..mesh.interior_len())
        .map(|_| rng.random_range(-1.0..=1.0))
        .collect();
    GridFunction::from_interior(mesh, &vals).expect("interior length matches")
}

pub fn patch(mesh: &Mesh, rng: &mut ChaCha8Rng) -> GridFunction {
    let counts = mesh.counts().to_vec();
    let bounds: Vec<(usize, usize)> = counts
        .iter()
        .map(|&n| {
            let a = rng.random_range(1..n);
            let b = rng.random_range(1..n);
            (a.min(b), a.max(b))
        })
        .collect();
    let vals: Vec<f64> = (0..mesh.len())
        .map(|_| rng.random_range(-1.0..=1.0))
        .collect();
    GridFunction::from_index_fn(mesh, |idx| {
        let inside = idx
            .iter()
            .zip(&bounds)
            .all(|(&k, &(lo, hi))| k >= lo && k <= hi);
        if inside {
            vals[mesh.flat_unchecked(idx)]
        } else {
            0.0
        }
    })
    .expect("finite values")
}

pub fn bump(mesh: &Mesh, rng: &mut ChaCha8Rng) -> GridFunction {
    let d = mesh.domain();
    let centre: Vec<f64> = (0..mesh.dim())
        .map(|i| rng.random_range(d.lower()[i]..d.upper()[i]))
        .collect();
    let width: Vec<f64> = (0..mesh.dim())
        .map(|i| rng.random_range(0.2..2.0) * d.width(i))
        .collect();
    let amp: f64 = rng.random_range(0.1..10.0);
    let u = GridFunction::from_index_fn(mesh, |idx| {
        if !mesh.is_interior(idx) {
            return 0.0;
        }
        let r2: f64 = idx
            .iter()
            .enumerate()
            .map(|(i, &k)| (2.0 * (mesh.coord(i, k) - centre[i]) / width[i]).powi(2))
            .sum();
        if r2 < 1.0 {
            amp * (-1.0 / (1.0 - r2)).exp()
        } else {
            0.0
        }
    })
    .expect("finite values");
    if u.max_abs() > 0.0 {
        u
    } else {
        rough(mesh, rng)
    }
}

/// `dist(x, ∂Ω_h)` at interior points.
pub fn distance_cone(mesh: &Mesh) -> GridFunction {
    GridFunction::from_index_fn(mesh, |idx| mesh.dist_unchecked(idx)).expect("finite")
}

/// Unit mass at the interior point closest to the centre.
pub fn central_point_mass(mesh: &Mesh) -> GridFunction {
    let centre: Vec<usize> = mesh.counts().iter().map(|n| n / 2).collect();
    GridFunction::from_index_fn(mesh, |idx| if idx == centre.as_slice() { 1.0 } else { 0.0 })
        .expect("finite")
}

/// Random sample `i` of a seeded run, cycling through the random families.
pub fn random_sample(mesh: &Mesh, seed: u64, i: u64) -> (SampleKind, GridFunction) {
    let mut r = rng(sample_seed(seed, i));
    match i % 3 {
        0 => (SampleKind::Rough, rough(mesh, &mut r)),
        1 => (SampleKind::Patch, patch(mesh, &mut r)),
        _ => (SampleKind::Bump, bump(mesh, &mut r)),
    }
}

/// The deterministic adversaries.
pub fn adversaries(mesh: &Mesh) -> Vec<(SampleKind, GridFunction)> {
    vec![
        (SampleKind::Eigenfunction, first_eigenpair(mesh).phi),
        (SampleKind::DistanceCone, distance_cone(mesh)),
        (SampleKind::PointMass, central_point_mass(mesh)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoxDomain;

    #[test]
    fn samples_vanish_on_boundary_and_are_reproducible() {
        let m = Mesh::new(BoxDomain::unit(2).unwrap(), vec![7, 5]).unwrap();
        for i in 0..30 {
            let (_, u) = random_sample(&m, 11, i);
            assert!(u.vanishes_on_boundary());
            assert!(u.max_abs() > 0.0);
            assert_eq!(u, random_sample(&m, 11, i).1);
        }
        for (_, u) in adversaries(&m) {
            assert!(u.vanishes_on_boundary() && u.max_abs() > 0.0);
        }
    }
}
