use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use zenosim::config::{parse_n_list, ExperimentConfig};
use zenosim::error::{Error, Result};
use zenosim::experiment::run_experiment;
use zenosim::output::emit_outputs;

/// Survival curves of a doubly driven three-level atom under repeated
/// measurements, with regime classification against the free evolution.
#[derive(Debug, Parser)]
#[command(name = "zenosim", version, disable_help_subcommand = true)]
struct Cli {
    /// Rabi frequency of the 0-1 transition.
    #[arg(long)]
    omega01: Option<f64>,
    /// Rabi frequency of the 1-2 transition.
    #[arg(long)]
    omega12: Option<f64>,
    /// Drive phase of the 0-1 transition.
    #[arg(long)]
    phi01: Option<f64>,
    /// Drive phase of the 1-2 transition.
    #[arg(long)]
    phi12: Option<f64>,
    /// Projector family: 'partial' ({0,1} vs {2}) or 'full' (per level).
    #[arg(long)]
    projector: Option<String>,
    /// Comma-separated measurement counts, one curve per count.
    #[arg(long)]
    n: Option<String>,
    /// Run mode: 'free', 'projective' or 'lindblad'.
    #[arg(long)]
    mode: Option<String>,
    /// Integrated rate per measurement bump (lindblad mode).
    #[arg(long)]
    weight: Option<f64>,
    /// Bump width as a fraction of the recurrence time (lindblad mode).
    #[arg(long)]
    width: Option<f64>,
    /// Number of grid points over [0, tau-max].
    #[arg(long)]
    grid: Option<usize>,
    /// Grid endpoint in units of the recurrence time.
    #[arg(long)]
    tau_max: Option<f64>,
    /// Margin a curve must clear for regime classification.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Integrator step override (lindblad mode).
    #[arg(long)]
    step: Option<f64>,
    /// Config file (key = value lines); flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for per-curve CSV files.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Path for the SVG chart.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Path for the JSON run report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Add a raw-time column next to tau in CSV output.
    #[arg(long)]
    raw_time: bool,
}

impl Cli {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.omega01 {
            config.omega01 = v;
        }
        if let Some(v) = self.omega12 {
            config.omega12 = v;
        }
        if let Some(v) = self.phi01 {
            config.phi01 = v;
        }
        if let Some(v) = self.phi12 {
            config.phi12 = v;
        }
        if let Some(v) = &self.projector {
            config.projector = v.parse().map_err(|_| Error::Config {
                field: "projector".to_string(),
                constraint: format!("unknown kind '{v}'"),
            })?;
        }
        if let Some(v) = &self.n {
            config.n_values = parse_n_list(v)?;
        }
        if let Some(v) = &self.mode {
            config.mode = v.parse()?;
        }
        if let Some(v) = self.weight {
            config.weight = v;
        }
        if let Some(v) = self.width {
            config.width = v;
        }
        if let Some(v) = self.grid {
            config.grid_points = v;
        }
        if let Some(v) = self.tau_max {
            config.tau_max = v;
        }
        if let Some(v) = self.epsilon {
            config.epsilon = v;
        }
        if let Some(v) = self.step {
            config.step = Some(v);
        }
        if self.csv.is_some() {
            config.csv_dir = self.csv;
        }
        if self.svg.is_some() {
            config.svg_path = self.svg;
        }
        if self.report.is_some() {
            config.report_path = self.report;
        }
        if self.raw_time {
            config.raw_time = true;
        }
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = cli.into_config()?;
    let report = run_experiment(&config)?;

    println!(
        "T_P = {:.6} (omega01 = {}, omega12 = {})",
        report.t_poincare, report.config.omega01, report.config.omega12
    );
    println!("oracle distance (closed form vs eigendecomposition): {:.3e}", report.oracle_distance);
    for record in &report.curves {
        match &record.verdict {
            None => println!("{}: {} points", record.label, record.curve.len()),
            Some(verdict) => {
                let intervals: Vec<String> = verdict
                    .intervals
                    .iter()
                    .map(|i| format!("{} on [{:.3}, {:.3}]", i.regime, i.t1, i.t2))
                    .collect();
                println!(
                    "{}: {} (margin {:.4}){}",
                    record.label,
                    verdict.regime,
                    verdict.margin,
                    if intervals.is_empty() {
                        String::new()
                    } else {
                        format!("; {}", intervals.join(", "))
                    }
                );
            }
        }
    }
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }

    for path in emit_outputs(&report)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not failures; everything else is a
            // config error as far as exit codes go.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
