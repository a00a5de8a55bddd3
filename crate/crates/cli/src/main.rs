use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use sbrsma_cli::config::{load_config, SCHEMA};
use sbrsma_cli::csvio::read_records;
use sbrsma_cli::gain::report_gain;
use sbrsma_cli::presets::{run_preset, Preset, RunOptions};
use sbrsma_core::analysis::{sop_closed_form, XiPath};
use sbrsma_core::beamforming::GcStrategy;
use sbrsma_core::foxh::ContourSettings;
use sbrsma_core::montecarlo::{
    estimate_fixed_delta_sop, estimate_sop, CcsMode, FixedDeltaCombine, SimOptions, SinrPath,
};
use sbrsma_core::ScenarioConfig;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "sbrsma", version, about = "Outage analysis of symbiotic backscatter RSMA downlinks")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "SBRSMA_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SimArgs {
    /// How |theta|^2 is formed under CCS.
    #[arg(long, default_value = "paper-literal")]
    ccs_mode: CcsMode,
    /// Evaluate SINRs from the built beamformers instead of the closed-form substitution.
    #[arg(long)]
    first_principles: bool,
}

impl SimArgs {
    fn options(&self) -> SimOptions {
        let sinr_path = if self.first_principles { SinrPath::FirstPrinciples } else { SinrPath::Simplified };
        SimOptions { ccs_mode: self.ccs_mode, sinr_path, ..Default::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment and write CSV, SVG and validation tables.
    Run {
        #[arg(long)]
        preset: Preset,
        /// JSON scenario overrides.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Single operating point; prints JSON.
    Sop {
        #[arg(long)]
        strategy: GcStrategy,
        #[arg(long = "psi-db")]
        psi_db: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Antenna count (overrides the config).
        #[arg(long = "antennas", short = 'L')]
        antennas: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Fixed reflection coefficient instead of per-block adaptation.
        #[arg(long)]
        delta: Option<f64>,
        /// Also evaluate the closed form (CCS only).
        #[arg(long)]
        closed_form: bool,
        #[arg(long, default_value = "quadrature")]
        xi_path: XiPath,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// SNR needed by each curve of a sweep CSV to reach a target SOP.
    Gain {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        target: f64,
    },
    /// Print the JSON Schema of config files.
    Schema,
}

fn scenario(config: &Option<PathBuf>) -> anyhow::Result<ScenarioConfig> {
    match config {
        Some(p) => Ok(load_config(p)?),
        None => Ok(ScenarioConfig::default()),
    }
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring worker pool")?;
    }
    #[cfg(not(feature = "parallel"))]
    if cli.threads.is_some_and(|n| n > 1) {
        log::warn!("built without the parallel feature; running on one thread");
    }

    match cli.command {
        Command::Run { preset, config, trials, seed, out, sim } => {
            let base = scenario(&config)?;
            let opts = RunOptions { trials, seed, sim: sim.options(), ..Default::default() };
            let result = run_preset(preset, &base, &opts, &out)?;
            print!("{}", result.summary);
            for f in &result.files {
                println!("wrote {}", f.display());
            }
            if result.failures > 0 {
                bail!("{preset}: {} agreement check(s) failed", result.failures);
            }
        }
        Command::Sop { strategy, psi_db, config, antennas, trials, seed, delta, closed_form, xi_path, sim } => {
            let mut cfg = scenario(&config)?.with_psi_db(psi_db);
            if let Some(l) = antennas {
                cfg = cfg.with_antennas(l);
            }
            cfg.validate()?;
            let opts = sim.options();
            let est = match delta {
                None => estimate_sop(&cfg, strategy, trials, seed, &opts)?,
                Some(d) => estimate_fixed_delta_sop(&cfg, strategy, d, trials, seed, &opts, FixedDeltaCombine::Product)?,
            };
            let mut doc = serde_json::json!({
                "strategy": strategy.label(),
                "L": cfg.antennas,
                "Psi_dB": psi_db,
                "delta_policy": delta.map_or_else(|| "adaptive".to_owned(), |d| format!("fixed-{d}")),
                "ccs_mode": opts.ccs_mode.to_string(),
                "trials": trials,
                "seed": seed,
                "sop": est.value,
                "std_error": est.std_error,
                "ci_lo": est.ci95.0,
                "ci_hi": est.ci95.1,
                "rejected_blocks": est.rejected_blocks,
            });
            if closed_form {
                if strategy != GcStrategy::Ccs {
                    bail!("the closed form covers the CCS strategy only");
                }
                doc["closed_form"] = sop_closed_form(&cfg, xi_path, &ContourSettings::default())?.into();
                doc["xi_path"] = xi_path.to_string().into();
            }
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Command::Gain { csv, target } => {
            if !(target > 0.0 && target < 1.0) {
                bail!("target SOP must lie in (0, 1), got {target}");
            }
            let file = std::fs::File::open(&csv).with_context(|| format!("opening {}", csv.display()))?;
            let rows = read_records(file).with_context(|| format!("reading {}", csv.display()))?;
            print!("{}", report_gain(&rows, target));
        }
        Command::Schema => print!("{SCHEMA}"),
    }
    Ok(())
}
