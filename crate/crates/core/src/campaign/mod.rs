//! Configuration, structure I/O and the outer design loop.

mod config;
mod io;
mod run;
mod synthetic;

use std::io::Write;
use std::path::Path;

pub use config::{CampaignConfig, EvaluatorConfig, EvaluatorKind, ResidueRange, StructureInput};
pub use io::{
    load_structure, parse_pdb, structure_from_json, structure_from_pdb, structure_to_json, write_structure, PdbResidue,
};
pub use run::{read_log, reference_structure, stream_rng, strip_wall_time, Batch, Campaign, RunRecord, LOG_FILE};
pub use synthetic::{toy_complex, with_seeded_clash, CLASH_RESIDUE};

use crate::temporal::{normalized_time, GuidanceParams};
use crate::Result;

/// Writes `t,t_norm,factor` rows for `t = 1..=total`.
pub fn write_schedule_csv<W: Write>(params: &GuidanceParams, total: usize, out: W) -> Result<()> {
    let profile = params.profile()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "t_norm", "factor"])?;
    for t in 1..=total {
        let t_norm = normalized_time(t, total)?;
        w.write_record([t.to_string(), t_norm.to_string(), profile.at(t_norm).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_schedule_csv(params: &GuidanceParams, total: usize, path: &Path) -> Result<()> {
    write_schedule_csv(params, total, std::fs::File::create(path)?)
}
