//! Structure files: the native JSON format (read/write) and a PDB subset (read).

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::StructureInput;
use crate::se3::{vec3_serde, Frame, Region, ResidueId, Rotation, StructureState};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResidueRecord {
    chain: String,
    resseq: i32,
    region: Region,
    rot: Rotation,
    #[serde(with = "vec3_serde")]
    trans: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    residues: Vec<ResidueRecord>,
    /// Global residue indices.
    #[serde(default)]
    hotspots: Vec<usize>,
}

pub fn structure_to_json(state: &StructureState) -> Result<String> {
    let file = StructureFile {
        residues: (0..state.len())
            .map(|i| ResidueRecord {
                chain: state.ids[i].chain.clone(),
                resseq: state.ids[i].resseq,
                region: state.regions[i],
                rot: state.frames[i].rot,
                trans: state.frames[i].trans,
            })
            .collect(),
        hotspots: state.hotspots.clone(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn structure_from_json(text: &str) -> Result<StructureState> {
    let file: StructureFile = serde_json::from_str(text)?;
    let mut frames = Vec::with_capacity(file.residues.len());
    let mut regions = Vec::with_capacity(file.residues.len());
    let mut ids = Vec::with_capacity(file.residues.len());
    for r in file.residues {
        frames.push(Frame::new(r.rot, r.trans));
        regions.push(r.region);
        ids.push(ResidueId { chain: r.chain, resseq: r.resseq });
    }
    StructureState::new(frames, regions, file.hotspots, ids)
}

pub fn write_structure(state: &StructureState, path: &Path) -> Result<()> {
    std::fs::write(path, structure_to_json(state)? + "\n")?;
    Ok(())
}

/// Cα atom of one residue read from a PDB file.
#[derive(Debug, Clone, PartialEq)]
pub struct PdbResidue {
    pub id: ResidueId,
    pub ca: Vec3,
}

fn column(line: &str, range: std::ops::Range<usize>, lineno: usize, what: &str) -> Result<String> {
    line.get(range)
        .map(|s| s.trim().to_string())
        .ok_or_else(|| Error::Parse { line: lineno, message: format!("record too short for {what}") })
}

fn number<T: std::str::FromStr>(s: &str, lineno: usize, what: &str) -> Result<T> {
    s.parse::<T>().map_err(|_| Error::Parse { line: lineno, message: format!("bad {what} field {s:?}") })
}

/// Cα atoms from `ATOM` records, in file order. The first Cα of each
/// residue wins (alternate locations are dropped). Parsing stops at the
/// first `ENDMDL`.
pub fn parse_pdb(text: &str) -> Result<Vec<PdbResidue>> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        if line.starts_with("ENDMDL") {
            break;
        }
        if !line.starts_with("ATOM") {
            continue;
        }
        let name = column(line, 12..16, lineno, "atom name")?;
        if name != "CA" {
            continue;
        }
        let chain = column(line, 21..22, lineno, "chain id")?;
        let resseq: i32 = number(&column(line, 22..26, lineno, "residue number")?, lineno, "residue number")?;
        let icode = line.get(26..27).unwrap_or(" ").to_string();
        let x: f64 = number(&column(line, 30..38, lineno, "x")?, lineno, "x coordinate")?;
        let y: f64 = number(&column(line, 38..46, lineno, "y")?, lineno, "y coordinate")?;
        let z: f64 = number(&column(line, 46..54, lineno, "z")?, lineno, "z coordinate")?;
        if !seen.insert((chain.clone(), resseq, icode)) {
            continue;
        }
        out.push(PdbResidue { id: ResidueId { chain, resseq }, ca: Vec3::new(x, y, z) });
    }
    Ok(out)
}

/// Labels PDB residues using the chain map and CDR ranges of `input`.
pub fn structure_from_pdb(residues: Vec<PdbResidue>, input: &StructureInput) -> Result<StructureState> {
    if residues.is_empty() {
        return Err(Error::Parse { line: 0, message: "no CA atoms found".into() });
    }
    let mut regions = Vec::with_capacity(residues.len());
    for r in &residues {
        let region = if input.cdr.iter().any(|c| c.contains(&r.id)) {
            Region::Cdr
        } else {
            *input
                .chain_regions
                .get(&r.id.chain)
                .ok_or_else(|| Error::config(format!("chain {:?} has no region in the structure config", r.id.chain)))?
        };
        regions.push(region);
    }
    let index: HashMap<&ResidueId, usize> = residues.iter().enumerate().map(|(i, r)| (&r.id, i)).collect();
    let hotspots = input
        .hotspots
        .iter()
        .map(|h| {
            index
                .get(h)
                .copied()
                .ok_or_else(|| Error::config(format!("hotspot {}:{} not present in structure", h.chain, h.resseq)))
        })
        .collect::<Result<Vec<usize>>>()?;
    let frames = residues.iter().map(|r| Frame::from_translation(r.ca)).collect();
    let ids = residues.into_iter().map(|r| r.id).collect();
    StructureState::new(frames, regions, hotspots, ids)
}

/// Loads a native JSON (`.json`) or PDB structure.
pub fn load_structure(path: &Path, input: &StructureInput) -> Result<StructureState> {
    let text = std::fs::read_to_string(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        structure_from_json(&text)
    } else {
        structure_from_pdb(parse_pdb(&text)?, input)
    }
}
