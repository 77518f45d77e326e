//! Command-line front end: subcommand dispatch, configuration assembly and
//! CSV emission. All result data goes to stdout (or `--out`); progress and
//! diagnostics go to stderr.

pub mod config;
pub mod csv;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use config::Config;
use lcitgsm::detect::complexity_model;
use lcitgsm::harness;
use lcitgsm::{Constellation, DetectorKind, PatternBook};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "lcitgsm",
    version,
    about = "Link-level simulator and bound calculator for generalised spatial modulation with variable antenna activation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the bit-to-(antenna pattern, symbol) mapping table as CSV
    #[command(name = "map-table")]
    MapTable(CommonArgs),
    /// Monte Carlo BER sweep over an SNR grid
    Simulate(CommonArgs),
    /// Analytical BER upper bounds over an SNR grid
    Bounds(CommonArgs),
    /// Detector arithmetic-cost model across antenna counts
    Complexity(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario settings as key=value (e.g. scheme=lut nt=4 nr=4 mod=qam16 snr=0:2:20)
    #[arg(value_name = "KEY=VALUE")]
    pub settings: Vec<String>,

    /// Read key=value lines from this file first ('#' comments allowed)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Master seed (overrides seed= settings)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Write CSV output here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Detector: mld | tmld | dmld
    #[arg(long)]
    pub detector: Option<String>,

    /// TMLD candidate radius c >= 1
    #[arg(long = "tmld-c")]
    pub tmld_c: Option<f64>,

    /// Worker threads for the sweep (default: one per SNR point, capped at CPU count)
    #[arg(long)]
    pub workers: Option<usize>,

    /// Bound evaluation: quadrature | chernoff
    #[arg(long)]
    pub method: Option<String>,
}

impl CommonArgs {
    /// Config file, then positional settings, then flags.
    pub fn build_config(&self) -> Result<Config> {
        let mut cfg = Config::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            cfg.merge(Config::from_text(&text)?);
        }
        for token in &self.settings {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| anyhow::anyhow!("expected key=value, got `{token}`"))?;
            cfg.set(key, value)?;
        }
        if let Some(seed) = self.seed {
            cfg.set("seed", &seed.to_string())?;
        }
        if let Some(d) = &self.detector {
            cfg.set("detector", d)?;
        }
        if let Some(c) = self.tmld_c {
            cfg.set("tmld_c", &c.to_string())?;
        }
        if let Some(m) = &self.method {
            cfg.set("method", m)?;
        }
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::MapTable(args) => {
            let cfg = args.build_config()?;
            let book = PatternBook::build(cfg.scheme()?, cfg.nt()?, cfg.na()?)?;
            let (kind, order) = cfg.modulation()?;
            let cons = Constellation::build(kind, order)?;
            args.emit(&csv::map_table(&book, &cons))
        }
        Command::Simulate(args) => {
            let cfg = args.build_config()?;
            let scenario = cfg.scenario()?;
            let workers = args.workers.unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|p| p.get())
                    .unwrap_or(1)
                    .min(scenario.snr_db.len())
            });
            let result = harness::sweep(&scenario, workers)?;
            args.emit(&csv::sweep(&result))
        }
        Command::Bounds(args) => {
            let cfg = args.build_config()?;
            let scenario = cfg.scenario()?;
            let rows = harness::scenario_bounds(&scenario, cfg.method()?)?;
            if rows.is_empty() {
                anyhow::bail!(
                    "bounds need a PSK or square-QAM constellation (got a rectangular grid)"
                );
            }
            args.emit(&csv::bounds(&rows))
        }
        Command::Complexity(args) => {
            let cfg = args.build_config()?;
            let scheme = cfg.scheme()?;
            let (kind, order) = cfg.modulation()?;
            let nr = cfg.nr()?;
            let beta = cfg.beta()?;
            let na = cfg.na()?;
            let mut rows = Vec::new();
            for nt in cfg.nt_grid()? {
                let n = PatternBook::alphabet_size(scheme, nt, na)?;
                for detector in [DetectorKind::Mld, DetectorKind::Tmld, DetectorKind::Dmld] {
                    let mults = complexity_model(detector, kind, order, nr, nt, n, beta)?;
                    rows.push((nt, n, detector.as_str(), mults));
                }
            }
            args.emit(&csv::complexity(&rows))
        }
    }
}
