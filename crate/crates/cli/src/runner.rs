//! Experiment execution: single propagations, parallel 1-D sweeps,
//! spectrum scans, coalescence reports, and the built-in figure
//! reproduction runs.

use crate::csvout;
use crate::spec::{
    default_ep_qs, EpSpec, ExperimentSpec, InitialStateSpec, SpectrumSpec, SpectrumVariable,
    SweepSpec,
};
use crate::CliError;
use epsim_core::dynamics::{
    default_step_count, propagate, Orientation, PropagationRecord, Trajectory,
};
use epsim_core::metrics::{sample_metrics, MetricSample};
use epsim_core::model::SystemConfig;
use epsim_core::spectra::{coalescence_order, locate_ep, spectrum_sweep, EpResult};
use epsim_core::Error as CoreError;
use rayon::prelude::*;
use std::path::{Path, PathBuf};

pub struct RunSummary {
    pub name: String,
    pub metrics: MetricSample,
    pub record: PropagationRecord,
}

/// Propagates one spec and writes its time series when an output path is
/// known (the `--out` override wins over the spec's own `output`).
pub fn run_experiment(
    spec: &ExperimentSpec,
    steps_override: Option<usize>,
    out_override: Option<&Path>,
    include_state: bool,
) -> Result<RunSummary, CliError> {
    spec.base_config.validate()?;
    let traj = spec.require_trajectory()?;
    let rho0 = spec.initial_state.to_density()?;
    let steps = steps_override.unwrap_or_else(|| default_step_count(traj, &spec.base_config));
    let record = propagate(traj, &spec.base_config, &rho0, steps)?;
    let metrics = sample_metrics(record.final_state());
    if let Some(path) = out_override.or(spec.output.as_ref().map(Path::new)) {
        csvout::write_timeseries(path, &record, include_state)?;
    }
    Ok(RunSummary { name: spec.display_name().to_string(), metrics, record })
}

/// One full propagation per grid point, farmed to the ambient worker pool;
/// rows are gathered in grid order so output is independent of worker
/// scheduling.
pub fn run_sweep(
    spec: &ExperimentSpec,
    steps_override: Option<usize>,
    out_override: Option<&Path>,
) -> Result<Vec<(f64, MetricSample)>, CliError> {
    spec.base_config.validate()?;
    let sweep = spec.require_sweep()?.clone();
    let rho0 = spec.initial_state.to_density()?;
    let rows: Vec<(f64, MetricSample)> = sweep
        .grid
        .par_iter()
        .map(|&value| -> Result<(f64, MetricSample), CliError> {
            let (cfg, traj) = spec.at_sweep_value(&sweep.parameter, value)?;
            cfg.validate()?;
            let steps = steps_override.unwrap_or_else(|| default_step_count(&traj, &cfg));
            let record = propagate(&traj, &cfg, &rho0, steps)?;
            Ok((value, sample_metrics(record.final_state())))
        })
        .collect::<Result<_, _>>()?;
    if let Some(path) = out_override.or(spec.output.as_ref().map(Path::new)) {
        csvout::write_sweep(path, &rows)?;
    }
    Ok(rows)
}

/// Full 16-eigenvalue scan along the spec's grid.
pub fn run_spectrum(
    spec: &SpectrumSpec,
    out_override: Option<&Path>,
) -> Result<usize, CliError> {
    spec.base_config.validate()?;
    let points = spectrum_sweep(&spec.base_config, spec.variable.into(), &spec.grid)?;
    if let Some(path) = out_override.or(spec.output.as_ref().map(Path::new)) {
        csvout::write_spectrum(path, &spec.grid, &points)?;
    }
    Ok(points.len())
}

pub struct EpRow {
    pub q: f64,
    pub located: Option<EpResult>,
    /// Coalescing-cluster size at the located point.
    pub order: Option<usize>,
}

/// Locates the coalescence for each q; q values without one (for example
/// α = 1 at q = 1) yield a row with `located: None` rather than an error.
pub fn ep_report(spec: &EpSpec) -> Result<Vec<EpRow>, CliError> {
    let mut rows = Vec::with_capacity(spec.qs.len());
    for &q in &spec.qs {
        match locate_ep(q, &spec.base_config) {
            Ok(result) => {
                let at_ep = SystemConfig {
                    gamma: result.gamma_ep,
                    q,
                    ..spec.base_config
                };
                let lambdas = epsim_core::linalg::eig_general(
                    epsim_core::model::build_reduced_liouvillian(&at_ep).matrix(),
                )?
                .eigenvalues;
                let order =
                    coalescence_order(&lambdas, 10.0 * result.residual_gap.max(1e-9));
                rows.push(EpRow { q, located: Some(result), order: Some(order) });
            }
            Err(CoreError::NoCoalescence { .. }) => {
                rows.push(EpRow { q, located: None, order: None })
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(rows)
}

pub fn format_ep_table(rows: &[EpRow]) -> String {
    let mut out = String::from("q,gamma_ep,branch,residual_gap,order\n");
    for row in rows {
        match &row.located {
            Some(ep) => out.push_str(&format!(
                "{},{},{},{},{}\n",
                csvout::sig12(row.q),
                csvout::sig12(ep.gamma_ep),
                ep.branch,
                csvout::sig12(ep.residual_gap),
                row.order.unwrap_or(0)
            )),
            None => out.push_str(&format!("{},no EP,,,\n", csvout::sig12(row.q))),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Built-in figure production runs.

/// System of the transfer figures: resonant pair, g/ε = 0.01, rate
/// asymmetry α = 1.2, pure gain on qubit 1 and pure decay on qubit 2.
fn gain_loss_config(q: f64) -> SystemConfig {
    SystemConfig {
        epsilon: 1.0,
        delta: 0.0,
        g: 0.01,
        gamma: 0.0,
        alpha: 1.2,
        beta1: f64::NEG_INFINITY,
        beta2: f64::INFINITY,
        q,
    }
}

/// System of the spectral-sweep figure: thermal occupations n₁ = n₂ = 1/3
/// giving rates (0.02, 0.01) on qubit 1 and (0.01, 0.005) on qubit 2.
fn thermal_config(q: f64) -> SystemConfig {
    SystemConfig {
        epsilon: 1.0,
        delta: 0.0,
        g: 0.01,
        gamma: 0.03,
        alpha: 0.5,
        beta1: 2.0f64.ln(),
        beta2: 2.0f64.ln(),
        q,
    }
}

fn loop_traj(delta_amp: f64, orientation: Orientation) -> Trajectory {
    Trajectory { delta_amp, gamma0: 0.0, gamma_amp: 0.008, period: 2500.0, orientation }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// β₁ grid: ±∞ endpoints plus log-spaced magnitudes 10^{-1}..10^{3} in
/// half-decade steps on both signs, ascending.
fn beta1_grid() -> Vec<f64> {
    let mags: Vec<f64> = (0..9).map(|k| 10f64.powf(-1.0 + 0.5 * k as f64)).collect();
    let mut grid = vec![f64::NEG_INFINITY];
    grid.extend(mags.iter().rev().map(|m| -m));
    grid.extend(mags.iter());
    grid.push(f64::INFINITY);
    grid
}

fn transfer_spec(
    name: &str,
    q: f64,
    delta_amp: f64,
    orientation: Orientation,
    initial: &str,
    sweep: Option<SweepSpec>,
) -> ExperimentSpec {
    ExperimentSpec {
        name: Some(name.to_string()),
        base_config: gain_loss_config(q),
        trajectory: Some(loop_traj(delta_amp, orientation)),
        initial_state: InitialStateSpec::Named(initial.to_string()),
        sweep,
        output: Some(format!("{name}.csv")),
    }
}

/// All built-in propagation/sweep specs, keyed by figure.
pub fn builtin_specs() -> Vec<(&'static str, ExperimentSpec)> {
    let mut specs = Vec::new();
    for q in [0.0, 1.0] {
        for (tag, orientation) in [("ccw", Orientation::Ccw), ("cw", Orientation::Cw)] {
            let name = format!("fig2a_q{}_{}", q as u8, tag);
            specs.push((
                "fig2a",
                transfer_spec(&name, q, 0.04, orientation, "bell_plus", None),
            ));
        }
    }
    specs.push((
        "fig2b",
        transfer_spec(
            "fig2b_qsweep",
            0.0,
            0.04,
            Orientation::Ccw,
            "bell_plus",
            Some(SweepSpec { parameter: "q".into(), grid: linspace(0.0, 1.0, 21) }),
        ),
    ));
    specs.push((
        "fig2b",
        transfer_spec(
            "fig2b_gamma0_inset",
            0.0,
            0.04,
            Orientation::Ccw,
            "bell_plus",
            Some(SweepSpec { parameter: "gamma0".into(), grid: linspace(0.0, 0.02, 11) }),
        ),
    ));
    for q in [0.0, 0.5, 1.0] {
        let name = format!("fig3a_q{}", q.to_string().replace('.', ""));
        specs.push((
            "fig3a",
            transfer_spec(
                &name,
                q,
                0.04,
                Orientation::Ccw,
                "bell_plus",
                Some(SweepSpec { parameter: "beta1".into(), grid: beta1_grid() }),
            ),
        ));
    }
    for q in [0.0, 0.5, 1.0] {
        let name = format!("fig3b_q{}", q.to_string().replace('.', ""));
        specs.push((
            "fig3b",
            transfer_spec(
                &name,
                q,
                0.04,
                Orientation::Ccw,
                "bell_plus",
                Some(SweepSpec {
                    parameter: "gamma_amp".into(),
                    grid: linspace(0.002, 0.03, 25),
                }),
            ),
        ));
    }
    for (fig, orientation, tag) in [
        ("fig4a", Orientation::Ccw, "ccw"),
        ("fig4b", Orientation::Ccw, "ccw"),
    ] {
        for q in [0.0, 0.5, 1.0] {
            let name = format!("{fig}_q{}_{}", q.to_string().replace('.', ""), tag);
            specs.push((
                fig,
                transfer_spec(&name, q, 0.06, orientation, "maximally_mixed", None),
            ));
        }
    }
    specs.push((
        "fig4a",
        transfer_spec("fig4a_q1_cw", 1.0, 0.06, Orientation::Cw, "maximally_mixed", None),
    ));
    specs
}

/// Built-in spectral scans: 161-point g grids at the thermal rates.
pub fn builtin_spectrum_specs() -> Vec<(&'static str, SpectrumSpec)> {
    [0.0, 0.5, 1.0]
        .into_iter()
        .map(|q| {
            let name = format!("figS1_q{}", q.to_string().replace('.', ""));
            let spec = SpectrumSpec {
                name: Some(name.clone()),
                base_config: thermal_config(q),
                variable: SpectrumVariable::G,
                grid: linspace(0.0, 0.004, 161),
                output: Some(format!("{name}.csv")),
            };
            ("figS1", spec)
        })
        .collect()
}

pub fn known_figures() -> Vec<&'static str> {
    vec!["fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "figS1"]
}

/// Runs every built-in spec of one figure, writing CSVs named after the
/// specs into `out_dir`; returns the written paths.
pub fn reproduce(
    figure: &str,
    out_dir: &Path,
    steps_override: Option<usize>,
) -> Result<Vec<PathBuf>, CliError> {
    if !known_figures().contains(&figure) {
        return Err(CliError::Validation(format!(
            "unknown figure {figure:?}; known: {}",
            known_figures().join(", ")
        )));
    }
    std::fs::create_dir_all(out_dir).map_err(CliError::from)?;
    let mut written = Vec::new();
    for (fig, spec) in builtin_specs() {
        if fig != figure {
            continue;
        }
        let path = out_dir.join(spec.output.as_deref().expect("builtin specs set outputs"));
        if spec.sweep.is_some() {
            run_sweep(&spec, steps_override, Some(&path))?;
        } else {
            let summary = run_experiment(&spec, steps_override, Some(&path), false)?;
            println!(
                "{}: F_plus={:.6} F_minus={:.6} concurrence={:.6} purity={:.6}",
                summary.name,
                summary.metrics.fidelity_plus,
                summary.metrics.fidelity_minus,
                summary.metrics.concurrence,
                summary.metrics.purity
            );
        }
        written.push(path);
    }
    for (fig, spec) in builtin_spectrum_specs() {
        if fig != figure {
            continue;
        }
        let path = out_dir.join(spec.output.as_deref().expect("builtin specs set outputs"));
        run_spectrum(&spec, Some(&path))?;
        written.push(path);
    }
    if figure == "fig3b" {
        // The loop's maximal rate γ₀ + Δγ hits the coalescence when
        // Δγ equals γ_EP; print those markers next to the sweeps.
        let report = ep_report(&EpSpec {
            base_config: gain_loss_config(0.0),
            qs: vec![0.0, 0.5, 1.0],
        })?;
        for row in &report {
            match &row.located {
                Some(ep) => println!(
                    "EP marker (q={}): delta_gamma = {:.9}",
                    row.q, ep.gamma_ep
                ),
                None => println!("EP marker (q={}): none", row.q),
            }
        }
    }
    Ok(written)
}

/// The default coalescence-report template (the transfer-figure system).
pub fn default_ep_spec() -> EpSpec {
    EpSpec { base_config: gain_loss_config(0.0), qs: default_ep_qs() }
}
