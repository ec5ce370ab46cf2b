use serde::{Deserialize, Serialize};

use super::Rotation;
use crate::{Error, Result, Vec3};

/// Rigid body frame `(R, t)` of one residue; `t` is the Cα position in Å.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub rot: Rotation,
    #[serde(with = "vec3_serde")]
    pub trans: Vec3,
}

impl Frame {
    pub fn new(rot: Rotation, trans: Vec3) -> Self {
        Frame { rot, trans }
    }

    pub fn from_translation(trans: Vec3) -> Self {
        Frame { rot: Rotation::identity(), trans }
    }

    /// Left action of a rigid motion `x ↦ q·x + u`.
    pub fn transformed(&self, q: &Rotation, u: &Vec3) -> Frame {
        Frame { rot: *q * self.rot, trans: q.transform(&self.trans) + u }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Generated loop residues that receive guidance.
    Cdr,
    /// Generated scaffold residues.
    Framework,
    /// Fixed antigen context.
    Target,
}

impl Region {
    /// Residues the sampler moves.
    pub fn is_generated(self) -> bool {
        !matches!(self, Region::Target)
    }
}

/// Chain id plus residue sequence number, kept for I/O round trips.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueId {
    pub chain: String,
    pub resseq: i32,
}

/// A complex of per-residue frames with region labels and a hotspot set.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureState {
    pub frames: Vec<Frame>,
    pub regions: Vec<Region>,
    /// Global residue indices; each must point at a target residue.
    pub hotspots: Vec<usize>,
    pub timestep: usize,
    pub ids: Vec<ResidueId>,
}

impl StructureState {
    /// Builds a validated state. `ids` may be empty, in which case chain `A`
    /// and 1-based sequence numbers are assigned.
    pub fn new(frames: Vec<Frame>, regions: Vec<Region>, hotspots: Vec<usize>, ids: Vec<ResidueId>) -> Result<Self> {
        if frames.len() != regions.len() {
            return Err(Error::contract(format!("{} frames but {} region labels", frames.len(), regions.len())));
        }
        let ids = if ids.is_empty() {
            (0..frames.len()).map(|i| ResidueId { chain: "A".into(), resseq: i as i32 + 1 }).collect()
        } else {
            ids
        };
        if ids.len() != frames.len() {
            return Err(Error::contract("residue id count does not match frame count"));
        }
        let state = StructureState { frames, regions, hotspots, timestep: 0, ids };
        state.validate_hotspots()?;
        Ok(state)
    }

    /// Convenience constructor with identity rotations.
    pub fn from_positions(positions: &[Vec3], regions: Vec<Region>, hotspots: Vec<usize>) -> Result<Self> {
        let frames = positions.iter().map(|p| Frame::from_translation(*p)).collect();
        Self::new(frames, regions, hotspots, Vec::new())
    }

    pub fn validate_hotspots(&self) -> Result<()> {
        for &h in &self.hotspots {
            match self.regions.get(h) {
                Some(Region::Target) => {}
                Some(r) => return Err(Error::config(format!("hotspot {h} is a {r:?} residue, not target"))),
                None => {
                    return Err(Error::config(format!("hotspot index {h} out of range for {} residues", self.len())))
                }
            }
        }
        Ok(())
    }

    /// Guidance needs at least one CDR and one target residue.
    pub fn validate_for_guidance(&self) -> Result<()> {
        if self.indices(Region::Cdr).is_empty() {
            return Err(Error::contract("structure has no CDR residues"));
        }
        if self.indices(Region::Target).is_empty() {
            return Err(Error::contract("structure has no target residues"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.frames.iter().map(|f| f.trans).collect()
    }

    pub fn position(&self, i: usize) -> Vec3 {
        self.frames[i].trans
    }

    pub fn set_positions(&mut self, positions: &[Vec3]) {
        for (f, p) in self.frames.iter_mut().zip(positions) {
            f.trans = *p;
        }
    }

    pub fn indices(&self, region: Region) -> Vec<usize> {
        self.regions.iter().enumerate().filter(|(_, r)| **r == region).map(|(i, _)| i).collect()
    }

    /// Antibody side (CDR ∪ framework).
    pub fn antibody_indices(&self) -> Vec<usize> {
        self.regions.iter().enumerate().filter(|(_, r)| r.is_generated()).map(|(i, _)| i).collect()
    }

    /// Centroid of the target residues, or of all residues if there is no target.
    /// The sampler diffuses translations relative to this point.
    pub fn anchor(&self) -> Vec3 {
        let target = self.indices(Region::Target);
        let idx: Vec<usize> = if target.is_empty() { (0..self.len()).collect() } else { target };
        if idx.is_empty() {
            return Vec3::zeros();
        }
        idx.iter().map(|&i| self.frames[i].trans).sum::<Vec3>() / idx.len() as f64
    }

    /// Applies `x ↦ q·x + u` to every frame.
    pub fn transformed(&self, q: &Rotation, u: &Vec3) -> StructureState {
        let mut out = self.clone();
        for f in &mut out.frames {
            *f = f.transformed(q, u);
        }
        out
    }
}

pub(crate) mod vec3_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::Vec3;

    pub fn serialize<S: Serializer>(v: &Vec3, s: S) -> Result<S::Ok, S::Error> {
        [v.x, v.y, v.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec3, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        Ok(Vec3::new(a[0], a[1], a[2]))
    }
}
