//! JSON experiment schema: system configuration, loop trajectory, initial
//! state, optional 1-D sweep specification, and the spectrum-scan variant.

use epsim_core::dynamics::Trajectory;
use epsim_core::linalg::ComplexMatrix;
use epsim_core::model::{bell_states, ext_real, DensityMatrix, SystemConfig};
use epsim_core::spectra::SweepVariable;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Grid values that may be "+inf" / "-inf" strings in JSON.
mod ext_real_vec {
    use super::ext_real;
    use serde::de::Error as DeError;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            if v.is_infinite() {
                seq.serialize_element(if *v > 0.0 { "+inf" } else { "-inf" })?;
            } else {
                seq.serialize_element(v)?;
            }
        }
        seq.end()
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<Entry>::deserialize(d)?;
        raw.into_iter()
            .map(|e| match e {
                Entry::Num(x) => Ok(x),
                Entry::Str(s) => ext_real::parse(&s)
                    .ok_or_else(|| D::Error::custom(format!("unparseable grid value {s:?}"))),
            })
            .collect()
    }
}

/// 1-D scan attached to an experiment: `parameter` names a scalar field of
/// the system configuration (epsilon, delta, g, gamma, alpha, beta1, beta2,
/// q) or of the trajectory (delta_amp, gamma0, gamma_amp, period).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    #[serde(with = "ext_real_vec")]
    pub grid: Vec<f64>,
}

/// Initial state: a named state ("bell_plus", "bell_minus",
/// "maximally_mixed", "basis:ab" with a, b ∈ {0, 1}) or an explicit 4×4
/// matrix of [re, im] pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialStateSpec {
    Named(String),
    Explicit(Vec<Vec<(f64, f64)>>),
}

impl InitialStateSpec {
    pub fn to_density(&self) -> Result<DensityMatrix, CliError> {
        match self {
            InitialStateSpec::Named(name) => match name.as_str() {
                "bell_plus" => Ok(DensityMatrix::from_pure(&bell_states().0)?),
                "bell_minus" => Ok(DensityMatrix::from_pure(&bell_states().1)?),
                "maximally_mixed" => Ok(DensityMatrix::maximally_mixed()),
                other => {
                    let bits = other.strip_prefix("basis:").ok_or_else(|| {
                        CliError::Validation(format!("unknown initial state {other:?}"))
                    })?;
                    let parsed: Vec<bool> = bits
                        .chars()
                        .map(|c| match c {
                            '0' => Ok(false),
                            '1' => Ok(true),
                            _ => Err(CliError::Validation(format!(
                                "basis state must be two 0/1 digits, got {bits:?}"
                            ))),
                        })
                        .collect::<Result<_, _>>()?;
                    if parsed.len() != 2 {
                        return Err(CliError::Validation(format!(
                            "basis state must be two 0/1 digits, got {bits:?}"
                        )));
                    }
                    Ok(DensityMatrix::basis_state(parsed[0], parsed[1]))
                }
            },
            InitialStateSpec::Explicit(rows) => {
                if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
                    return Err(CliError::Validation(
                        "explicit initial state must be a 4x4 matrix of [re, im] pairs".into(),
                    ));
                }
                let m = ComplexMatrix::from_fn(4, 4, |i, j| {
                    Complex64::new(rows[i][j].0, rows[i][j].1)
                });
                Ok(DensityMatrix::new(m)?)
            }
        }
    }
}

/// One experiment: a system, an optional loop, an initial state, and an
/// optional sweep. Commands validate the parts they need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub base_config: SystemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Trajectory>,
    pub initial_state: InitialStateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentSpec {
    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or("experiment")
    }

    pub fn require_trajectory(&self) -> Result<&Trajectory, CliError> {
        self.trajectory.as_ref().ok_or_else(|| {
            CliError::Validation(format!(
                "spec {:?} needs a trajectory for propagation",
                self.display_name()
            ))
        })
    }

    pub fn require_sweep(&self) -> Result<&SweepSpec, CliError> {
        let sweep = self.sweep.as_ref().ok_or_else(|| {
            CliError::Validation(format!("spec {:?} has no sweep section", self.display_name()))
        })?;
        if sweep.grid.is_empty() {
            return Err(CliError::Validation("sweep grid is empty".into()));
        }
        if sweep.grid.iter().any(|x| x.is_nan()) {
            return Err(CliError::Validation("sweep grid contains NaN".into()));
        }
        let inc = sweep.grid.windows(2).all(|w| w[0] < w[1]);
        let dec = sweep.grid.windows(2).all(|w| w[0] > w[1]);
        if sweep.grid.len() > 1 && !inc && !dec {
            return Err(CliError::Validation("sweep grid must be strictly monotone".into()));
        }
        Ok(sweep)
    }

    /// The (config, trajectory) pair with `parameter` set to `value`.
    pub fn at_sweep_value(
        &self,
        parameter: &str,
        value: f64,
    ) -> Result<(SystemConfig, Trajectory), CliError> {
        let mut cfg = self.base_config;
        let mut traj = *self.require_trajectory()?;
        match parameter {
            "epsilon" => cfg.epsilon = value,
            "delta" => cfg.delta = value,
            "g" => cfg.g = value,
            "gamma" => cfg.gamma = value,
            "alpha" => cfg.alpha = value,
            "beta1" => cfg.beta1 = value,
            "beta2" => cfg.beta2 = value,
            "q" => cfg.q = value,
            "delta_amp" => traj.delta_amp = value,
            "gamma0" => traj.gamma0 = value,
            "gamma_amp" => traj.gamma_amp = value,
            "period" => traj.period = value,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown sweep parameter {other:?}"
                )))
            }
        }
        Ok((cfg, traj))
    }
}

/// A spectrum scan: the full 16-eigenvalue decomposition along a grid of
/// the coupling g or the rate γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub base_config: SystemConfig,
    pub variable: SpectrumVariable,
    #[serde(with = "ext_real_vec")]
    pub grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumVariable {
    G,
    Gamma,
}

impl From<SpectrumVariable> for SweepVariable {
    fn from(v: SpectrumVariable) -> Self {
        match v {
            SpectrumVariable::G => SweepVariable::Coupling,
            SpectrumVariable::Gamma => SweepVariable::Rate,
        }
    }
}

/// Coalescence-report request: a config template (γ free) and the q values
/// to scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpSpec {
    pub base_config: SystemConfig,
    #[serde(default = "default_ep_qs")]
    pub qs: Vec<f64>,
}

pub fn default_ep_qs() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}
