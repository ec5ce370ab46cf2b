//! Built-in toy complex used when no structure file is configured.

use crate::se3::{Frame, Region, ResidueId, Rotation, StructureState};
use crate::Vec3;

fn tilt(i: usize) -> Rotation {
    let k = i as f64;
    Rotation::exp(&Vec3::new(0.3 * (1.3 * k).sin(), 0.2 * (1.7 * k).cos(), 0.4 * (0.5 * k).sin()))
}

/// A 20-residue planar target patch, a 6-residue CDR loop hovering 6.5 Å
/// above it and a 10-residue framework layer behind the loop. Four central
/// target residues are hotspots. No two residues are closer than 3.8 Å.
pub fn toy_complex() -> StructureState {
    let mut pos = Vec::new();
    let mut regions = Vec::new();
    let mut ids = Vec::new();
    let mut push = |p: Vec3, r: Region, chain: &str, resseq: i32| {
        pos.push(p);
        regions.push(r);
        ids.push(ResidueId { chain: chain.into(), resseq });
    };
    let mut n = 0;
    for xi in 0..5 {
        for yi in 0..4 {
            n += 1;
            push(Vec3::new(-7.6 + 3.8 * xi as f64, -5.7 + 3.8 * yi as f64, 0.0), Region::Target, "T", n);
        }
    }
    for k in 0..6 {
        push(Vec3::new(-9.5 + 3.8 * k as f64, 0.0, 6.5), Region::Cdr, "H", 95 + k);
    }
    for k in 0..10 {
        let (xi, yi) = (k % 5, k / 5);
        push(Vec3::new(-7.6 + 3.8 * xi as f64, -1.9 + 3.8 * yi as f64, 10.3), Region::Framework, "H", 1 + k);
    }
    // target grid (x, y) = (−3.8, −1.9), (0, −1.9), (0, 1.9), (3.8, 1.9)
    let hotspots = vec![5, 9, 10, 14];
    let frames = pos.iter().enumerate().map(|(i, p)| Frame::new(tilt(i), *p)).collect();
    StructureState::new(frames, regions, hotspots, ids).expect("toy complex is well formed")
}

/// Index of the CDR residue moved by [`with_seeded_clash`].
pub const CLASH_RESIDUE: usize = 23;

/// [`toy_complex`] with one CDR residue dropped to 1.5 Å above a target residue.
pub fn with_seeded_clash() -> StructureState {
    let mut s = toy_complex();
    // target residue 10 sits at (0, 1.9, 0)
    s.frames[CLASH_RESIDUE].trans = s.frames[10].trans + Vec3::new(0.0, 0.0, 1.5);
    s
}
