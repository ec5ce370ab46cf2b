use std::collections::VecDeque;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{CampaignConfig, EvaluatorKind};
use super::io::load_structure;
use super::synthetic::toy_complex;
use crate::bayes_opt::{composite_loss, BayesOptimizer, ProposalKind, SyntheticObjective};
use crate::metrics::{metric_report, MetricReport};
use crate::sampler::{make_skip_schedule, AnalyticDenoiser, Gaussian, Sampler, StepTrace};
use crate::se3::{NoiseSchedule, StructureState};
use crate::{Error, Result};

pub const LOG_FILE: &str = "campaign.jsonl";
const PROPOSAL_STREAM: u64 = u64::MAX;

/// One line of the campaign log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub iteration: usize,
    pub theta: [f64; 2],
    pub kind: ProposalKind,
    /// Expected improvement at proposal time.
    pub ei: f64,
    pub designs: Vec<MetricReport>,
    pub design_losses: Vec<f64>,
    /// Mean composite loss over the batch.
    pub loss: f64,
    /// Re-evaluations still queued after this iteration.
    pub pending: Vec<[f64; 2]>,
    /// Trace file relative to the output directory.
    pub trace: Option<String>,
    pub wall_time: f64,
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for `(seed, iteration, index)`.
pub fn stream_rng(seed: u64, iteration: usize, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(seed)
        ^ mix(iteration as u64).rotate_left(17)
        ^ index.wrapping_mul(0xA24B_AED4_963E_E407)))
}

#[derive(Debug, Clone, Serialize)]
struct DesignStep<'a> {
    design: usize,
    #[serde(flatten)]
    step: &'a StepTrace,
}

/// The reference complex named by the config, or the built-in toy complex.
pub fn reference_structure(cfg: &CampaignConfig) -> Result<StructureState> {
    match &cfg.structure.path {
        Some(p) => load_structure(p, &cfg.structure),
        None => Ok(toy_complex()),
    }
}

/// Designs sampled for one parameter setting, with their metrics and losses.
#[derive(Debug, Clone)]
pub struct Batch {
    pub designs: Vec<StructureState>,
    pub reports: Vec<MetricReport>,
    pub losses: Vec<f64>,
    pub traces: Vec<Vec<StepTrace>>,
}

/// Everything a campaign needs besides its log.
pub struct Campaign {
    pub cfg: CampaignConfig,
    pub reference: StructureState,
    pub schedule: NoiseSchedule,
    pool: rayon::ThreadPool,
}

impl Campaign {
    pub fn new(cfg: CampaignConfig) -> Result<Self> {
        cfg.validate()?;
        let reference = reference_structure(&cfg)?;
        let schedule = NoiseSchedule::cosine(&cfg.schedule)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::config(format!("cannot build worker pool: {e}")))?;
        Ok(Campaign { cfg, reference, schedule, pool })
    }

    pub fn log_path(&self) -> PathBuf {
        self.cfg.output_dir.join(LOG_FILE)
    }

    /// Samples and scores `batch_size` designs at `theta` for `iteration`.
    pub fn generate_batch(&self, theta: [f64; 2], iteration: usize) -> Result<Batch> {
        let denoiser = AnalyticDenoiser::new(&self.reference);
        let mut sampler = Sampler::new(&denoiser, &self.schedule, self.cfg.guidance.with_shape(theta[0], theta[1]));
        sampler.experts = self.cfg.experts;
        sampler.router = self.cfg.router;
        sampler.config = self.cfg.sampler;
        let skip = make_skip_schedule(self.schedule.total_steps(), self.cfg.sampler.skip)?;
        let want_trace = self.cfg.trace;
        let run = |b: usize| -> Result<(StructureState, MetricReport, f64, Vec<StepTrace>)> {
            let mut noise = Gaussian(stream_rng(self.cfg.seed, iteration, b as u64));
            let x_t = sampler.initial_state(&self.reference, &mut noise)?;
            let mut trace = Vec::new();
            let out = sampler.sample(&x_t, &skip, &mut noise, want_trace.then_some(&mut trace))?;
            let report = metric_report(&out, Some(&self.reference), &self.cfg.metrics, &self.cfg.experts)?;
            let loss = self.structure_loss(&report)?;
            Ok((out, report, loss, trace))
        };
        let results: Vec<_> =
            self.pool.install(|| (0..self.cfg.batch_size).into_par_iter().map(run).collect::<Result<Vec<_>>>())?;
        let mut batch = Batch { designs: Vec::new(), reports: Vec::new(), losses: Vec::new(), traces: Vec::new() };
        for (d, r, l, t) in results {
            batch.designs.push(d);
            batch.reports.push(r);
            batch.losses.push(l);
            batch.traces.push(t);
        }
        Ok(batch)
    }

    /// Composite loss over (RMSD, 10·CV, 10·coverage shortfall).
    pub fn structure_loss(&self, r: &MetricReport) -> Result<f64> {
        let rmsd = r.rmsd.ok_or_else(|| Error::contract("structure evaluator needs a reference RMSD"))?;
        let shortfall = 1.0 - r.hotspot_coverage.unwrap_or(1.0);
        let ev = &self.cfg.evaluator;
        composite_loss(&[rmsd, 10.0 * r.uniformity_cv, 10.0 * shortfall], &ev.weights, &ev.normalizers)
    }

    fn evaluate(&self, theta: [f64; 2], iteration: usize) -> Result<(Vec<MetricReport>, Vec<f64>, Option<String>)> {
        match self.cfg.evaluator.kind {
            EvaluatorKind::SyntheticBranin => {
                let obj = SyntheticObjective::new(self.cfg.bayes_opt.bounds, self.cfg.evaluator.noise_sd);
                let loss = obj.noisy(&theta, &mut stream_rng(self.cfg.seed, iteration, 0));
                Ok((Vec::new(), vec![loss], None))
            }
            EvaluatorKind::Structure => {
                let batch = self.generate_batch(theta, iteration)?;
                let trace = if self.cfg.trace {
                    let rel = format!("traces/iter_{iteration}.jsonl");
                    write_traces(&self.cfg.output_dir.join(&rel), &batch.traces)?;
                    Some(rel)
                } else {
                    None
                };
                Ok((batch.reports, batch.losses, trace))
            }
        }
    }

    /// Runs from scratch, replacing any existing log.
    pub fn run(&self) -> Result<Vec<RunRecord>> {
        fs::create_dir_all(&self.cfg.output_dir)?;
        File::create(self.log_path())?;
        self.continue_from(Vec::new())
    }

    /// Continues after the records already in the log.
    pub fn resume(&self) -> Result<Vec<RunRecord>> {
        let path = self.log_path();
        let records = read_log(&path)?;
        if path.exists() {
            // drop a partially written trailing record before appending
            let bytes = fs::read(&path)?;
            let keep = bytes.iter().rposition(|b| *b == b'\n').map_or(0, |p| p + 1);
            if keep < bytes.len() {
                OpenOptions::new().write(true).open(&path)?.set_len(keep as u64)?;
            }
        } else {
            fs::create_dir_all(&self.cfg.output_dir)?;
        }
        self.continue_from(records)
    }

    fn continue_from(&self, mut records: Vec<RunRecord>) -> Result<Vec<RunRecord>> {
        let mut bo = BayesOptimizer::new(self.cfg.bayes_opt)?;
        for (k, r) in records.iter().enumerate() {
            if r.iteration != k {
                return Err(Error::contract(format!("log record {k} has iteration {}", r.iteration)));
            }
            bo.observe(r.theta, r.loss)?;
        }
        let mut pending: VecDeque<[f64; 2]> =
            records.last().map(|r| r.pending.iter().copied().collect()).unwrap_or_default();
        let mut log = BufWriter::new(OpenOptions::new().append(true).create(true).open(self.log_path())?);
        for iteration in records.len()..self.cfg.iterations {
            let start = Instant::now();
            pending.extend(bo.reevaluation(iteration)?);
            let (theta, kind, ei) = match pending.pop_front() {
                Some(theta) => {
                    let ei = match bo.fit()? {
                        Some(gp) => gp.expected_improvement(&theta, gp.best(), self.cfg.bayes_opt.acquisition.xi),
                        None => 0.0,
                    };
                    (theta, ProposalKind::Reevaluation, ei)
                }
                None => {
                    let p = bo.propose(&mut stream_rng(self.cfg.seed, iteration, PROPOSAL_STREAM))?;
                    (p.theta, p.kind, p.ei)
                }
            };
            let (designs, design_losses, trace) = self.evaluate(theta, iteration)?;
            let loss = design_losses.iter().sum::<f64>() / design_losses.len() as f64;
            bo.observe(theta, loss)?;
            let record = RunRecord {
                iteration,
                theta,
                kind,
                ei,
                designs,
                design_losses,
                loss,
                pending: pending.iter().copied().collect(),
                trace,
                wall_time: start.elapsed().as_secs_f64(),
            };
            serde_json::to_writer(&mut log, &record)?;
            log.write_all(b"\n")?;
            log.flush()?;
            records.push(record);
        }
        Ok(records)
    }
}

fn write_traces(path: &Path, traces: &[Vec<StepTrace>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    for (design, steps) in traces.iter().enumerate() {
        for step in steps {
            serde_json::to_writer(&mut w, &DesignStep { design, step })?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses a campaign log. A final line without a newline is treated as an
/// interrupted write and dropped.
pub fn read_log(path: &Path) -> Result<Vec<RunRecord>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut line = String::new();
    let mut lineno = 0;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        lineno += 1;
        if !line.ends_with('\n') {
            break;
        }
        if line.trim().is_empty() {
            continue;
        }
        let rec: RunRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Parse { line: lineno, message: format!("bad log record: {e}") })?;
        records.push(rec);
    }
    Ok(records)
}

/// Drops the `wall_time` field from every log line, for determinism checks.
pub fn strip_wall_time(log: &str) -> Result<String> {
    let mut out = String::new();
    for line in log.lines().filter(|l| !l.trim().is_empty()) {
        let mut v: serde_json::Value = serde_json::from_str(line)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("wall_time");
        }
        out.push_str(&serde_json::to_string(&v)?);
        out.push('\n');
    }
    Ok(out)
}
