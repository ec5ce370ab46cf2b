#![allow(dead_code, clippy::needless_range_loop)]

pub mod oracles;

use physguide::se3::{Frame, Region, Rotation, StructureState};
use physguide::Vec3;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian3<R: Rng>(rng: &mut R) -> Vec3 {
    Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniform axis, angle uniform on (0, π).
pub fn random_rotation<R: Rng>(rng: &mut R) -> Rotation {
    let axis = gaussian3(rng).normalize();
    Rotation::exp(&(axis * rng.gen_range(0.01..std::f64::consts::PI - 0.01)))
}

pub fn random_motion<R: Rng>(rng: &mut R) -> (Rotation, Vec3) {
    (random_rotation(rng), gaussian3(rng) * 20.0)
}

/// A loosely packed complex: a target slab, a CDR layer above it and a
/// framework layer on top. Dense enough that every expert usually has
/// something to do.
pub fn random_complex<R: Rng>(rng: &mut R, n: usize) -> StructureState {
    assert!(n >= 10);
    let n_target = (n * 2 / 5).max(3);
    let n_cdr = (n * 3 / 10).max(2);
    let half = (n as f64).sqrt() * 1.6;
    let mut frames = Vec::with_capacity(n);
    let mut regions = Vec::with_capacity(n);
    for i in 0..n {
        let (region, z) = if i < n_target {
            (Region::Target, rng.gen_range(0.0..2.0))
        } else if i < n_target + n_cdr {
            (Region::Cdr, rng.gen_range(2.0..7.0))
        } else {
            (Region::Framework, rng.gen_range(7.0..13.0))
        };
        let p = Vec3::new(rng.gen_range(-half..half), rng.gen_range(-half..half), z);
        frames.push(Frame::new(random_rotation(rng), p));
        regions.push(region);
    }
    let n_hot = rng.gen_range(1..=3.min(n_target));
    let mut hotspots: Vec<usize> = (0..n_target).collect();
    for k in 0..n_hot {
        let j = rng.gen_range(k..n_target);
        hotspots.swap(k, j);
    }
    hotspots.truncate(n_hot);
    hotspots.sort_unstable();
    StructureState::new(frames, regions, hotspots, Vec::new()).unwrap()
}

pub fn max_abs_diff(a: &[Vec3], b: &[Vec3]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs().max()).fold(0.0, f64::max)
}

/// Largest coordinate difference between two states, over translations and rotation matrices.
pub fn state_diff(a: &StructureState, b: &StructureState) -> f64 {
    assert_eq!(a.len(), b.len());
    a.frames
        .iter()
        .zip(&b.frames)
        .map(|(x, y)| (x.trans - y.trans).abs().max().max((x.rot.matrix() - y.rot.matrix()).abs().max()))
        .fold(0.0, f64::max)
}

/// Simpson's rule on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * k as f64);
    }
    s * h / 3.0
}
