use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bayes_opt::BoConfig;
use crate::experts::ExpertConfig;
use crate::metrics::MetricsConfig;
use crate::router::RouterConfig;
use crate::sampler::SamplerConfig;
use crate::se3::{Region, ResidueId, ScheduleConfig};
use crate::temporal::GuidanceParams;
use crate::{Error, Result};

/// Inclusive residue-number range on one chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidueRange {
    pub chain: String,
    pub start: i32,
    pub end: i32,
}

impl ResidueRange {
    pub fn contains(&self, id: &ResidueId) -> bool {
        id.chain == self.chain && (self.start..=self.end).contains(&id.resseq)
    }
}

/// Where the reference complex comes from and, for PDB input, how to label it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StructureInput {
    /// `.json` (native) or PDB file; `None` uses the built-in toy complex.
    pub path: Option<PathBuf>,
    /// PDB only: region of every residue on a chain.
    pub chain_regions: BTreeMap<String, Region>,
    /// PDB only: ranges relabelled as CDR.
    pub cdr: Vec<ResidueRange>,
    /// PDB only: hotspot residues, which must be target residues.
    pub hotspots: Vec<ResidueId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorKind {
    /// Composite of CDR RMSD, scaled interface CV and scaled coverage shortfall.
    #[default]
    Structure,
    /// Noisy rescaled Branin over the parameter box; no structures are sampled.
    SyntheticBranin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluatorConfig {
    pub kind: EvaluatorKind,
    /// Normalizers for (RMSD, 10·CV, 10·coverage shortfall).
    pub normalizers: [f64; 3],
    pub weights: [f64; 3],
    /// Observation noise of the synthetic objective.
    pub noise_sd: f64,
}

impl Default for EvaluatorConfig {
    fn default() -> Self {
        EvaluatorConfig {
            kind: EvaluatorKind::Structure,
            normalizers: [1.5, 7.0, 10.0],
            weights: [1.0; 3],
            noise_sd: 0.1,
        }
    }
}

/// Complete campaign configuration. Every field has a default, so `{}` is a valid file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub structure: StructureInput,
    pub schedule: ScheduleConfig,
    pub experts: ExpertConfig,
    pub router: RouterConfig,
    pub guidance: GuidanceParams,
    pub sampler: SamplerConfig,
    pub bayes_opt: BoConfig,
    pub metrics: MetricsConfig,
    pub evaluator: EvaluatorConfig,
    pub batch_size: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Worker threads for batch sampling.
    pub workers: usize,
    pub output_dir: PathBuf,
    pub trace: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            structure: StructureInput::default(),
            schedule: ScheduleConfig::default(),
            experts: ExpertConfig::default(),
            router: RouterConfig::default(),
            guidance: GuidanceParams::default(),
            sampler: SamplerConfig::default(),
            bayes_opt: BoConfig::default(),
            metrics: MetricsConfig::default(),
            evaluator: EvaluatorConfig::default(),
            batch_size: 4,
            iterations: 20,
            seed: 0,
            workers: 1,
            output_dir: PathBuf::from("out"),
            trace: false,
        }
    }
}

impl CampaignConfig {
    /// Reads a JSON config; a relative structure path is taken relative to the config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: CampaignConfig = serde_json::from_str(&text)?;
        if let (Some(p), Some(dir)) = (cfg.structure.path.as_ref(), path.parent()) {
            if p.is_relative() {
                cfg.structure.path = Some(dir.join(p));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 1 || self.iterations < 1 {
            return Err(Error::config("batch_size and iterations must be at least 1"));
        }
        if self.workers < 1 {
            return Err(Error::config("workers must be at least 1"));
        }
        if self.schedule.total_steps < 2 {
            return Err(Error::config("schedule needs at least 2 steps"));
        }
        if let Some(p) = &self.structure.path {
            if !p.exists() {
                return Err(Error::config(format!("structure file {} does not exist", p.display())));
            }
        }
        if self.evaluator.normalizers.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::config("evaluator normalizers must be positive"));
        }
        if !(self.evaluator.noise_sd >= 0.0) {
            return Err(Error::config("evaluator noise_sd must be nonnegative"));
        }
        self.experts.validate()?;
        self.router.validate()?;
        self.guidance.validate()?;
        self.sampler.validate()?;
        self.bayes_opt.validate()?;
        Ok(())
    }
}
