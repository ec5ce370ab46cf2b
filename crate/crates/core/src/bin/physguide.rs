use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use physguide::campaign::{self, Campaign, CampaignConfig};
use physguide::metrics::{metric_report, MetricReport};
use physguide::{Error, Result};

#[derive(Parser)]
#[command(name = "physguide", version, about = "Physics-guided frame diffusion with online guidance tuning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON campaign config; defaults apply to missing keys
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write per-step guidance traces
    #[arg(long)]
    trace: bool,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one batch at a fixed (alpha, beta)
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Run the full optimization loop, replacing any existing log
    Campaign {
        #[command(flatten)]
        common: Common,
    },
    /// Continue a campaign from its log
    Resume {
        #[command(flatten)]
        common: Common,
    },
    /// Score structure files; one CSV row per file
    Metrics {
        #[command(flatten)]
        common: Common,
        /// Reference for CDR RMSD
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Emit the temporal profile as CSV
    Schedule {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Number of steps (defaults to the schedule length)
        #[arg(long)]
        steps: Option<usize>,
    },
}

fn load_config(common: &Common) -> Result<CampaignConfig> {
    let mut cfg = match &common.config {
        Some(p) => CampaignConfig::load(p)?,
        None => CampaignConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.output_dir = o.clone();
    }
    cfg.trace |= common.trace;
    cfg.validate()?;
    Ok(cfg)
}

fn metrics_row(w: &mut csv::Writer<impl std::io::Write>, name: &str, r: &MetricReport) -> Result<()> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    w.write_record([
        name.to_string(),
        opt(r.rmsd),
        opt(r.hotspot_coverage),
        r.cdr_participation.to_string(),
        r.n_contacts.to_string(),
        r.sc_proxy.to_string(),
        r.uniformity_cv.to_string(),
        r.cavity_fraction.to_string(),
    ])?;
    Ok(())
}

const METRICS_HEADER: [&str; 8] = [
    "structure",
    "rmsd",
    "hotspot_coverage",
    "cdr_participation",
    "n_contacts",
    "sc_proxy",
    "uniformity_cv",
    "cavity_fraction",
];

fn generate(common: &Common, alpha: Option<f64>, beta: Option<f64>) -> Result<()> {
    let cfg = load_config(common)?;
    let theta = [alpha.unwrap_or(cfg.guidance.alpha), beta.unwrap_or(cfg.guidance.beta)];
    let out = cfg.output_dir.clone();
    let c = Campaign::new(cfg)?;
    let batch = c.generate_batch(theta, 0)?;
    let designs = out.join("designs");
    std::fs::create_dir_all(&designs)?;
    let mut w = csv::Writer::from_path(out.join("metrics.csv"))?;
    w.write_record(METRICS_HEADER)?;
    for (b, (d, r)) in batch.designs.iter().zip(&batch.reports).enumerate() {
        let name = format!("design_{b}.json");
        campaign::write_structure(d, &designs.join(&name))?;
        metrics_row(&mut w, &name, r)?;
    }
    w.flush()?;
    if c.cfg.trace {
        let mut t = std::io::BufWriter::new(std::fs::File::create(out.join("trace.jsonl"))?);
        for (design, steps) in batch.traces.iter().enumerate() {
            for s in steps {
                let mut v = serde_json::to_value(s)?;
                v["design"] = design.into();
                serde_json::to_writer(&mut t, &v)?;
                std::io::Write::write_all(&mut t, b"\n")?;
            }
        }
    }
    println!("wrote {} designs to {}", batch.designs.len(), designs.display());
    Ok(())
}

fn run_campaign(common: &Common, resume: bool) -> Result<()> {
    let cfg = load_config(common)?;
    let c = Campaign::new(cfg)?;
    let records = if resume { c.resume()? } else { c.run()? };
    if let Some(best) = records.iter().min_by(|a, b| a.loss.total_cmp(&b.loss)) {
        println!(
            "{} iterations; best loss {:.6} at alpha={:.4} beta={:.4}",
            records.len(),
            best.loss,
            best.theta[0],
            best.theta[1]
        );
    }
    println!("log: {}", c.log_path().display());
    Ok(())
}

fn metrics(common: &Common, reference: Option<&Path>, files: &[PathBuf]) -> Result<()> {
    let cfg = load_config(common)?;
    let reference = reference.map(|p| campaign::load_structure(p, &cfg.structure)).transpose()?;
    let sink: Box<dyn std::io::Write> = match &common.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Box::new(std::fs::File::create(dir.join("metrics.csv"))?)
        }
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(METRICS_HEADER)?;
    for f in files {
        let s = campaign::load_structure(f, &cfg.structure)?;
        let r = metric_report(&s, reference.as_ref(), &cfg.metrics, &cfg.experts)?;
        metrics_row(&mut w, &f.display().to_string(), &r)?;
    }
    w.flush()?;
    Ok(())
}

fn schedule(common: &Common, alpha: Option<f64>, beta: Option<f64>, steps: Option<usize>) -> Result<()> {
    let cfg = load_config(common)?;
    let params = cfg.guidance.with_shape(alpha.unwrap_or(cfg.guidance.alpha), beta.unwrap_or(cfg.guidance.beta));
    params.validate()?;
    let total = steps.unwrap_or(cfg.schedule.total_steps);
    match &common.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            campaign::emit_schedule_csv(&params, total, &dir.join("schedule.csv"))
        }
        None => campaign::write_schedule_csv(&params, total, std::io::stdout()),
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common, alpha, beta } => generate(&common, alpha, beta),
        Command::Campaign { common } => run_campaign(&common, false),
        Command::Resume { common } => run_campaign(&common, true),
        Command::Metrics { common, reference, files } => metrics(&common, reference.as_deref(), &files),
        Command::Schedule { common, alpha, beta, steps } => schedule(&common, alpha, beta, steps),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn report(e: &Error) -> ExitCode {
    let code = e.code();
    eprintln!("error[{}]: {e}", code.tag());
    ExitCode::from(code as i32 as u8)
}
