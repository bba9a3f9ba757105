//! Closed-loop parameter driving, time-ordered propagation with per-step
//! trace renormalization, trace/purity rate functionals, and the one-cycle
//! propagator P(T).
//!
//! The integrator is piecewise-constant midpoint exponential stepping:
//! each step applies expm(ℒ(t_mid)·Δt) to the vectorized state. Every step
//! factor is a completely positive map for any q ∈ [0, 1] (the generator
//! splits into a no-jump conjugation plus a weighted jump part, both CP),
//! so positivity is preserved structurally; renormalization by the trace is
//! exact division per step and reproduces the normalized solution of the
//! static problem exactly.

use crate::error::{Error, Result};
use crate::linalg::{expm, ComplexMatrix};
use crate::model::{
    build_liouvillian, jump_operators, unvectorize, vectorize, DensityMatrix, SuperBasis,
    Superoperator, SystemConfig,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Traversal direction of the closed loop in the (δ, γ) plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Cw,
    Ccw,
}

/// One closed loop: δ(t) = ±Δδ sin(2πt/T) (+ for CW, − for CCW) and
/// γ(t) = γ₀ + Δγ sin²(πt/T), so δ(0) = δ(T) = 0 and γ(0) = γ(T) = γ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trajectory {
    pub delta_amp: f64,
    pub gamma0: f64,
    pub gamma_amp: f64,
    pub period: f64,
    pub orientation: Orientation,
}

impl Trajectory {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("delta_amp", self.delta_amp),
            ("gamma0", self.gamma0),
            ("gamma_amp", self.gamma_amp),
            ("period", self.period),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("trajectory {name} must be finite")));
            }
        }
        if self.delta_amp < 0.0 || self.gamma0 < 0.0 || self.gamma_amp < 0.0 {
            return Err(Error::InvalidConfig(
                "trajectory amplitudes and origin must be nonnegative".into(),
            ));
        }
        if self.period <= 0.0 {
            return Err(Error::InvalidConfig("trajectory period must be positive".into()));
        }
        Ok(())
    }
}

/// The instantaneous parameter point of the loop at time `t` ∈ [0, T].
pub fn params_at(traj: &Trajectory, base: &SystemConfig, t: f64) -> Result<SystemConfig> {
    if !(0.0..=traj.period).contains(&t) {
        return Err(Error::InvalidConfig(format!(
            "time {t} outside trajectory window [0, {}]",
            traj.period
        )));
    }
    let phase = std::f64::consts::PI * t / traj.period;
    let sign = match traj.orientation {
        Orientation::Cw => 1.0,
        Orientation::Ccw => -1.0,
    };
    Ok(SystemConfig {
        delta: sign * traj.delta_amp * (2.0 * phase).sin(),
        gamma: traj.gamma0 + traj.gamma_amp * phase.sin().powi(2),
        ..*base
    })
}

/// Step count giving the default resolution Δt = 0.05/ε.
pub fn default_step_count(traj: &Trajectory, base: &SystemConfig) -> usize {
    ((20.0 * traj.period * base.epsilon).round() as usize).max(1)
}

/// Time series of a renormalized propagation.
///
/// `times`, `states` and `purity` are sampled on the recording grid (which
/// always contains t = 0 and t = T); `trace_before_renorm` has one entry
/// per integration step, holding the state trace after that step's
/// exponential and before its renormalization.
#[derive(Debug, Clone)]
pub struct PropagationRecord {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub purity: Vec<f64>,
    pub trace_before_renorm: Vec<f64>,
    pub dt: f64,
}

impl PropagationRecord {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("record always contains the initial sample")
    }
}

fn real_trace(v: &[Complex64]) -> Complex64 {
    v[0] + v[5] + v[10] + v[15]
}

/// Propagates ρ₀ around the loop with per-step renormalization, recording
/// roughly 2000 evenly strided samples. See [`propagate_with_stride`].
pub fn propagate(
    traj: &Trajectory,
    base: &SystemConfig,
    rho0: &DensityMatrix,
    steps: usize,
) -> Result<PropagationRecord> {
    propagate_with_stride(traj, base, rho0, steps, steps.div_ceil(2000).max(1))
}

/// Propagates with an explicit recording stride (a sample is stored every
/// `stride` steps, plus the initial and final states).
pub fn propagate_with_stride(
    traj: &Trajectory,
    base: &SystemConfig,
    rho0: &DensityMatrix,
    steps: usize,
    stride: usize,
) -> Result<PropagationRecord> {
    traj.validate()?;
    base.validate()?;
    if steps == 0 {
        return Err(Error::InvalidConfig("propagation needs at least one step".into()));
    }
    if stride == 0 {
        return Err(Error::InvalidConfig("recording stride must be positive".into()));
    }
    let dt = traj.period / steps as f64;
    let mut v = vectorize(rho0.matrix());
    let mut record = PropagationRecord {
        times: Vec::with_capacity(steps / stride + 2),
        states: Vec::with_capacity(steps / stride + 2),
        purity: Vec::with_capacity(steps / stride + 2),
        trace_before_renorm: Vec::with_capacity(steps),
        dt,
    };
    let mut push_sample = |t: f64, v: &[Complex64]| -> Result<()> {
        let rho = DensityMatrix::new(unvectorize(v))?;
        record.purity.push(crate::metrics::purity(&rho));
        record.states.push(rho);
        record.times.push(t);
        Ok(())
    };
    push_sample(0.0, &v)?;
    for k in 0..steps {
        let t_mid = (k as f64 + 0.5) * dt;
        let cfg = params_at(traj, base, t_mid)?;
        let step_map = expm(&build_liouvillian(&cfg).matrix().scale(Complex64::new(dt, 0.0)))?;
        v = step_map.mul_vec(&v);
        let tr = real_trace(&v);
        if !tr.re.is_finite() || tr.re <= 0.0 {
            return Err(Error::NonFiniteState { step: k });
        }
        record.trace_before_renorm.push(tr.re);
        let inv = Complex64::new(1.0 / tr.re, 0.0);
        for x in &mut v {
            *x *= inv;
            if !x.re.is_finite() || !x.im.is_finite() {
                return Err(Error::NonFiniteState { step: k });
            }
        }
        if (k + 1) % stride == 0 || k + 1 == steps {
            push_sample((k + 1) as f64 * dt, &v)?;
        }
    }
    Ok(record)
}

/// d(Tr ρ)/dt under the unnormalized hybrid generator at a normalized
/// state: −(1−q)·Σ_j rate_j·Tr(L_j†L_j ρ).
pub fn trace_loss_rate(cfg: &SystemConfig, rho: &DensityMatrix) -> f64 {
    let mut total = 0.0;
    for (rate, l) in jump_operators(cfg) {
        if rate == 0.0 {
            continue;
        }
        total += rate * l.adjoint().mul(&l).mul(rho.matrix()).trace().re;
    }
    -(1.0 - cfg.q) * total
}

/// d(Tr ρ²)/dt of the renormalized flow:
/// 2Σ_j rate_j·[q·Tr(L_j†ρL_jρ) − Tr(L_j†L_jρ²) + (1−q)·Tr(L_j†L_jρ)·Tr ρ²].
pub fn purity_rate(cfg: &SystemConfig, rho: &DensityMatrix) -> f64 {
    let p = crate::metrics::purity(rho);
    let rho_sq = rho.matrix().mul(rho.matrix());
    let mut half_rate = 0.0;
    for (rate, l) in jump_operators(cfg) {
        if rate == 0.0 {
            continue;
        }
        let ldag = l.adjoint();
        let mixing = ldag.mul(rho.matrix()).mul(&l).mul(rho.matrix()).trace().re;
        let ldag_l = ldag.mul(&l);
        let damping = ldag_l.mul(&rho_sq).trace().re;
        let renorm = ldag_l.mul(rho.matrix()).trace().re;
        half_rate += rate * (cfg.q * mixing - damping + (1.0 - cfg.q) * renorm * p);
    }
    2.0 * half_rate
}

/// The raw (unrenormalized) one-cycle superoperator: the time-ordered
/// product of the per-step exponential factors over one period.
pub fn one_cycle_propagator(
    traj: &Trajectory,
    base: &SystemConfig,
    steps: usize,
) -> Result<Superoperator> {
    traj.validate()?;
    base.validate()?;
    if steps == 0 {
        return Err(Error::InvalidConfig("propagation needs at least one step".into()));
    }
    let dt = traj.period / steps as f64;
    let mut product = ComplexMatrix::identity(16);
    for k in 0..steps {
        let cfg = params_at(traj, base, (k as f64 + 0.5) * dt)?;
        let step_map = expm(&build_liouvillian(&cfg).matrix().scale(Complex64::new(dt, 0.0)))?;
        product = step_map.mul(&product);
        if !product.is_finite() {
            return Err(Error::NonFiniteState { step: k });
        }
    }
    Ok(Superoperator::new(product, SuperBasis::Full))
}
