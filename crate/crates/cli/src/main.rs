use clap::{Parser, Subcommand};
use epsim_cli::runner::{
    default_ep_spec, ep_report, format_ep_table, reproduce, run_experiment, run_spectrum,
    run_sweep,
};
use epsim_cli::spec::{EpSpec, ExperimentSpec, SpectrumSpec};
use epsim_cli::CliError;
use epsim_core::metrics::pt_symmetry_check;
use epsim_core::model::SystemConfig;
use serde::de::DeserializeOwned;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Simulator of two dissipatively coupled qubits driven around closed
/// loops in parameter space near eigenvalue coalescences.
#[derive(Parser)]
#[command(name = "epsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one experiment config and write its time series.
    Simulate {
        /// Experiment JSON (base_config, trajectory, initial_state, ...).
        #[arg(long)]
        config: PathBuf,
        /// CSV destination (overrides the spec's own output path).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Integration steps (default: 20·T·ε).
        #[arg(long)]
        steps: Option<usize>,
        /// Include the 32 re/im state entries per row.
        #[arg(long)]
        full_state: bool,
    },
    /// Run the spec's 1-D sweep: one propagation per grid point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
        /// Worker threads (default: all cores). Output is identical
        /// regardless.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Full 16-eigenvalue spectrum along a parameter grid.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate eigenvalue coalescences for a list of q values.
    Ep {
        /// EpSpec JSON (base_config, qs); defaults to the built-in
        /// gain/loss template with q ∈ {0, 0.25, 0.5, 0.75, 1}.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the table to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the static parity-time-symmetry conditions of a system config.
    Ptcheck {
        /// Bare SystemConfig JSON.
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-run a built-in figure production run.
    Reproduce {
        /// One of: fig2a, fig2b, fig3a, fig3b, fig4a, fig4b, figS1.
        figure: String,
        /// Output directory (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    match jobs {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Validation(format!("worker pool: {e}")))?
            .install(f),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out, steps, full_state } => {
            let spec: ExperimentSpec = read_json(&config)?;
            let summary = run_experiment(&spec, steps, out.as_deref(), full_state)?;
            println!(
                "{}: F_plus={:.6} F_minus={:.6} concurrence={:.6} purity={:.6}",
                summary.name,
                summary.metrics.fidelity_plus,
                summary.metrics.fidelity_minus,
                summary.metrics.concurrence,
                summary.metrics.purity
            );
        }
        Command::Sweep { config, out, steps, jobs } => {
            let spec: ExperimentSpec = read_json(&config)?;
            let rows = with_jobs(jobs, || run_sweep(&spec, steps, out.as_deref()))?;
            println!("{}: {} sweep points", spec.display_name(), rows.len());
        }
        Command::Spectrum { config, out } => {
            let spec: SpectrumSpec = read_json(&config)?;
            let n = run_spectrum(&spec, out.as_deref())?;
            println!(
                "{}: {} spectrum points",
                spec.name.as_deref().unwrap_or("spectrum"),
                n
            );
        }
        Command::Ep { config, out } => {
            let spec: EpSpec = match config {
                Some(path) => read_json(&path)?,
                None => default_ep_spec(),
            };
            let rows = ep_report(&spec)?;
            let table = format_ep_table(&rows);
            print!("{table}");
            if let Some(path) = out {
                std::fs::write(&path, &table)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            }
        }
        Command::Ptcheck { config } => {
            let cfg: SystemConfig = read_json(&config)?;
            cfg.validate()?;
            let report = pt_symmetry_check(&cfg);
            println!("pt_symmetric: {}", report.is_pt_symmetric);
            println!("occupation_sum: {:.12}", report.occupation_sum);
            for v in &report.violated_conditions {
                println!("violated: {v}");
            }
        }
        Command::Reproduce { figure, out, steps, jobs } => {
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            let written = with_jobs(jobs, || reproduce(&figure, &dir, steps))?;
            for path in written {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
