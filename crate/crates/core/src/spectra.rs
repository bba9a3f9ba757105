//! Closed-form spectra of the effective Hamiltonian and the reduced
//! generator, exceptional-point (EP) location, parameter sweeps with
//! branch-continuity ordering, and Riemann-sheet sampling of the
//! one-excitation eigenvalue pair.
//!
//! Branch conventions, fixed here:
//! - Complex square roots are principal; η₀ is additionally pinned to
//!   Re η₀ ≥ 0 (tie: Im η₀ ≥ 0) so that ξ₂ ≥ ξ₃ in real part in the
//!   Hermitian limit.
//! - β_q is the principal root of its square, which makes η⁽²⁾ (not η⁽¹⁾)
//!   the branch that vanishes at the EP for every q; at q = 0 that branch
//!   coincides with the effective-Hamiltonian discriminant √((Γ̃₁−Γ̃₂)²−16g²).

use crate::error::{Error, Result};
use crate::linalg::{eig_general, ComplexMatrix};
pub use crate::linalg::SpectrumResult;
use crate::model::{
    build_liouvillian, build_reduced_liouvillian, DerivedRates, SystemConfig,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Closed-form eigenvalues of the 4×4 effective Hamiltonian.
///
/// `xi1` belongs to |00⟩ (decays with the excitation rates), `xi4` to |11⟩
/// (decays with the decay rates), and `xi2`/`xi3` to the coupled
/// one-excitation pair split by `eta0`, with `xi2` carrying +η₀/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveHamiltonianEigs {
    pub xi1: Complex64,
    pub xi2: Complex64,
    pub xi3: Complex64,
    pub xi4: Complex64,
    pub eta0: Complex64,
}

impl EffectiveHamiltonianEigs {
    pub fn all(&self) -> [Complex64; 4] {
        [self.xi1, self.xi2, self.xi3, self.xi4]
    }
}

/// Closed-form eigenvalues of the reduced 6×6 generator at δ = 0.
///
/// `lambdas` holds (−Γ±η⁽¹⁾)/2, the exact pair −Γ/2, −Γ/2, and (−Γ±η⁽²⁾)/2,
/// in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedLiouvillianEigs {
    pub lambdas: [Complex64; 6],
    pub eta1: Complex64,
    pub eta2: Complex64,
    pub beta_q: Complex64,
}

/// Which η-branch vanishes at a located EP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpBranch {
    /// Effective-Hamiltonian discriminant η₀ (the q = 0 case).
    Eta0,
    /// η⁽¹⁾ of the reduced generator.
    EtaQ1,
    /// η⁽²⁾ of the reduced generator (vanishing branch for q > 0).
    EtaQ2,
}

impl std::fmt::Display for EpBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpBranch::Eta0 => write!(f, "eta0"),
            EpBranch::EtaQ1 => write!(f, "eta_q1"),
            EpBranch::EtaQ2 => write!(f, "eta_q2"),
        }
    }
}

/// A located eigenvalue coalescence.
///
/// `residual_gap` is the numerically measured diameter of the coalescing
/// eigenvalue cluster of the reduced generator at `gamma_ep` (the cluster
/// sits on top of the exact −Γ/2 pair, so it has four members); it is
/// guaranteed ≤ 1e-6·‖ℒ‖₁ of the full generator at the reported point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpResult {
    pub q: f64,
    pub gamma_ep: f64,
    pub branch: EpBranch,
    pub residual_gap: f64,
}

/// ξ₁..ξ₄ and η₀ per the closed forms; pure arithmetic, no validation.
pub fn analytic_heff_eigs(cfg: &SystemConfig) -> EffectiveHamiltonianEigs {
    let r = DerivedRates::from_config(cfg);
    let (eps, delta, g) = (cfg.epsilon, cfg.delta, cfg.g);
    let gamma = r.gamma_total;
    let rad = (c(r.gamma_tilde1 - r.gamma_tilde2, -2.0 * delta)).powi(2) - c(16.0 * g * g, 0.0);
    let mut eta0 = c(0.0, 1.0) * rad.sqrt();
    // Pin the branch: Re η₀ ≥ 0 (tie: Im η₀ ≥ 0) so ξ₂ ≥ ξ₃ in real part in
    // the Hermitian limit.
    if eta0.re < 0.0 || (eta0.re == 0.0 && eta0.im < 0.0) {
        eta0 = -eta0;
    }
    let base = c(4.0 * eps + 2.0 * delta, -gamma);
    EffectiveHamiltonianEigs {
        xi1: c(0.0, -0.5 * r.gamma_plus),
        xi2: (base + eta0) * 0.25,
        xi3: (base - eta0) * 0.25,
        xi4: c(2.0 * eps + delta, -0.5 * r.gamma_minus),
        eta0,
    }
}

/// S and β_q² entering η⁽¹'²⁾ = √(S ± 2β_q); both real for real rates.
fn spectral_invariants(r: &DerivedRates, g: f64, q: f64) -> (f64, f64) {
    let (g1p, g1m, g2p, g2m) = (r.gamma1_plus, r.gamma1_minus, r.gamma2_plus, r.gamma2_minus);
    let s = -8.0 * g * g
        + r.gamma_tilde1.powi(2)
        + r.gamma_tilde2.powi(2)
        + 4.0 * q * q * (g1m * g1p + g2m * g2p);
    let beta_sq = 16.0 * g.powi(4)
        + 8.0 * g * g
            * (g1m * g2m + g1p * g2p - (g1p * g2m + g1m * g2p) * (1.0 - 2.0 * q * q))
        + (r.big_gamma1.powi(2) - 4.0 * (1.0 - q * q) * g1m * g1p)
            * (r.big_gamma2.powi(2) - 4.0 * (1.0 - q * q) * g2m * g2p);
    (s, beta_sq)
}

/// λ₁..λ₆, η⁽¹⁾, η⁽²⁾ and β_q per the closed forms, valid only at δ = 0.
pub fn analytic_liouvillian_eigs(cfg: &SystemConfig) -> Result<ReducedLiouvillianEigs> {
    if cfg.delta != 0.0 {
        return Err(Error::DetuningNotZero(cfg.delta));
    }
    let r = DerivedRates::from_config(cfg);
    let (s, beta_sq) = spectral_invariants(&r, cfg.g, cfg.q);
    let beta_q = c(beta_sq, 0.0).sqrt();
    let eta1 = (c(s, 0.0) + beta_q * 2.0).sqrt();
    let eta2 = (c(s, 0.0) - beta_q * 2.0).sqrt();
    let gamma = c(r.gamma_total, 0.0);
    let half = |pm: Complex64| (pm - gamma) * 0.5;
    Ok(ReducedLiouvillianEigs {
        lambdas: [
            half(eta1),
            half(-eta1),
            -gamma * 0.5,
            -gamma * 0.5,
            half(eta2),
            half(-eta2),
        ],
        eta1,
        eta2,
        beta_q,
    })
}

/// Size of the largest eigenvalue cluster: the maximum number of values
/// lying within `tol` of any single value.
pub fn coalescence_order(values: &[Complex64], tol: f64) -> usize {
    values
        .iter()
        .map(|center| values.iter().filter(|v| (*v - center).norm() <= tol).count())
        .max()
        .unwrap_or(0)
}

/// Finds the γ at which the reduced generator's η⁽²⁾ branch coalesces, by
/// bisection on the real discriminant S − 2β_q, then confirms the
/// coalescence numerically. The template's `gamma` is ignored (free
/// variable), its `q` is replaced by the argument; requires δ = 0 and g > 0.
pub fn locate_ep(q: f64, template: &SystemConfig) -> Result<EpResult> {
    let mut cfg = *template;
    cfg.q = q;
    cfg.gamma = 1.0;
    cfg.validate()?;
    if cfg.delta != 0.0 {
        return Err(Error::DetuningNotZero(cfg.delta));
    }
    if cfg.g <= 0.0 {
        return Err(Error::InvalidConfig(
            "qubit coupling g must be positive to define a coalescence point".into(),
        ));
    }

    let radicand = |gamma: f64| -> Option<f64> {
        let r = DerivedRates::from_config(&SystemConfig { gamma, ..cfg });
        let (s, beta_sq) = spectral_invariants(&r, cfg.g, q);
        if beta_sq < 0.0 {
            None
        } else {
            Some(s - 2.0 * beta_sq.sqrt())
        }
    };

    // Pre-scan for the first sign change, then bisect. The discriminant is
    // negative at γ → 0 (value −16g²) and grows monotonically through the
    // coalescence for every rate structure reachable from a SystemConfig.
    let (lo_edge, hi_edge) = (1e-9 * cfg.epsilon, 10.0 * cfg.epsilon);
    const SCAN: usize = 512;
    let sample = |k: usize| lo_edge + (hi_edge - lo_edge) * k as f64 / (SCAN - 1) as f64;
    let mut bracket = None;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..SCAN {
        let gamma = sample(k);
        let Some(r) = radicand(gamma) else {
            prev = None;
            continue;
        };
        if let Some((pg, pr)) = prev {
            if pr < 0.0 && r >= 0.0 {
                bracket = Some((pg, pr, gamma, r));
                break;
            }
        }
        prev = Some((gamma, r));
    }
    let Some((mut lo, _, mut hi, _)) = bracket else {
        return Err(Error::NoCoalescence { lo: lo_edge, hi: hi_edge });
    };
    for _ in 0..200 {
        if (hi - lo) <= 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let Some(r) = radicand(mid) else {
            return Err(Error::InvalidState(
                "discriminant left the real axis during bisection".into(),
            ));
        };
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma_ep = 0.5 * (lo + hi);

    // Numerical confirmation: the coalescing pair lands on the exact −Γ/2
    // pair, so measure the diameter of the 4-member cluster nearest −Γ/2.
    let at_ep = SystemConfig { gamma: gamma_ep, ..cfg };
    let rates = DerivedRates::from_config(&at_ep);
    let target = c(-rates.gamma_total / 2.0, 0.0);
    let reduced = eig_general(build_reduced_liouvillian(&at_ep).matrix())?;
    let mut by_dist: Vec<Complex64> = reduced.eigenvalues.clone();
    by_dist.sort_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()));
    let cluster = &by_dist[..4];
    let mut gap: f64 = 0.0;
    for a in cluster {
        for b in cluster {
            gap = gap.max((a - b).norm());
        }
    }
    let scale = build_liouvillian(&at_ep).matrix().norm_one();
    if gap > 1e-6 * scale {
        return Err(Error::InvalidState(format!(
            "coalescence not confirmed at gamma = {gamma_ep}: cluster diameter {gap:.3e} \
             exceeds 1e-6 * {scale:.3e}"
        )));
    }
    let branch = if q == 0.0 { EpBranch::Eta0 } else { EpBranch::EtaQ2 };
    Ok(EpResult { q, gamma_ep, branch, residual_gap: gap })
}

/// Which parameter a [`spectrum_sweep`] varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Inter-qubit coupling g.
    Coupling,
    /// Base dissipation rate γ.
    Rate,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::BadGrid);
    }
    let increasing = grid.windows(2).all(|w| w[0] < w[1]);
    let decreasing = grid.windows(2).all(|w| w[0] > w[1]);
    if grid.len() > 1 && !increasing && !decreasing {
        return Err(Error::BadGrid);
    }
    Ok(())
}

/// Greedy nearest-neighbor assignment: `out[k]` is the index into `cur` that
/// continues branch k of `prev`; pairs are matched globally smallest
/// distance first, without replacement.
fn match_branches(prev: &[Complex64], cur: &[Complex64]) -> Vec<usize> {
    let n = prev.len();
    debug_assert_eq!(cur.len(), n);
    let mut pairs = Vec::with_capacity(n * n);
    for (i, p) in prev.iter().enumerate() {
        for (j, q) in cur.iter().enumerate() {
            pairs.push((i, j, (p - q).norm()));
        }
    }
    pairs.sort_by(|a, b| a.2.total_cmp(&b.2));
    let mut assignment = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut placed = 0;
    for (i, j, _) in pairs {
        if assignment[i] != usize::MAX || used[j] {
            continue;
        }
        assignment[i] = j;
        used[j] = true;
        placed += 1;
        if placed == n {
            break;
        }
    }
    assignment
}

fn permute_spectrum(r: &SpectrumResult, order: &[usize]) -> SpectrumResult {
    let n = r.eigenvalues.len();
    let eigenvalues = order.iter().map(|&j| r.eigenvalues[j]).collect();
    let eigenvectors =
        ComplexMatrix::from_fn(n, n, |i, k| r.eigenvectors[(i, order[k])]);
    SpectrumResult {
        eigenvalues,
        eigenvectors,
        eigvec_condition: r.eigvec_condition,
        near_defective: r.near_defective,
    }
}

/// Full 16-eigenvalue decomposition at every grid point, with branches
/// continuity-ordered by nearest-neighbor matching between consecutive
/// points (the first point is (Re, Im)-sorted).
pub fn spectrum_sweep(
    template: &SystemConfig,
    variable: SweepVariable,
    grid: &[f64],
) -> Result<Vec<SpectrumResult>> {
    check_grid(grid)?;
    let mut out: Vec<SpectrumResult> = Vec::with_capacity(grid.len());
    for &x in grid {
        let cfg = match variable {
            SweepVariable::Coupling => SystemConfig { g: x, ..*template },
            SweepVariable::Rate => SystemConfig { gamma: x, ..*template },
        };
        cfg.validate()?;
        let r = eig_general(build_liouvillian(&cfg).matrix())?;
        let ordered = match out.last() {
            None => r,
            Some(prev) => {
                let order = match_branches(&prev.eigenvalues, &r.eigenvalues);
                permute_spectrum(&r, &order)
            }
        };
        out.push(ordered);
    }
    Ok(out)
}

/// The one-excitation pair (ξ₂, ξ₃) tracked with branch continuity along an
/// arbitrary path in the (δ, γ) plane; the first point uses the pinned-η₀
/// assignment.
pub fn track_branch_pair(
    template: &SystemConfig,
    path: &[(f64, f64)],
) -> Vec<(Complex64, Complex64)> {
    let mut out: Vec<(Complex64, Complex64)> = Vec::with_capacity(path.len());
    for &(delta, gamma) in path {
        let eigs = analytic_heff_eigs(&SystemConfig { delta, gamma, ..*template });
        let (a, b) = match out.last() {
            None => (eigs.xi2, eigs.xi3),
            Some(&(pa, pb)) => {
                let keep = (eigs.xi2 - pa).norm() + (eigs.xi3 - pb).norm();
                let swap = (eigs.xi3 - pa).norm() + (eigs.xi2 - pb).norm();
                if swap < keep {
                    (eigs.xi3, eigs.xi2)
                } else {
                    (eigs.xi2, eigs.xi3)
                }
            }
        };
        out.push((a, b));
    }
    out
}

/// The two branch surfaces of the one-excitation pair over a rectangular
/// (δ, γ) grid, continuity-ordered along each constant-γ row.
#[derive(Debug, Clone)]
pub struct RiemannSheets {
    pub delta_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    /// Indexed [gamma index][delta index].
    pub sheet_a: Vec<Vec<Complex64>>,
    pub sheet_b: Vec<Vec<Complex64>>,
    /// True where sheet a decays faster (more negative imaginary part).
    pub a_more_decaying: Vec<Vec<bool>>,
}

pub fn riemann_sheets(
    template: &SystemConfig,
    delta_grid: &[f64],
    gamma_grid: &[f64],
) -> Result<RiemannSheets> {
    check_grid(delta_grid)?;
    check_grid(gamma_grid)?;
    let mut sheet_a = Vec::with_capacity(gamma_grid.len());
    let mut sheet_b = Vec::with_capacity(gamma_grid.len());
    let mut flags = Vec::with_capacity(gamma_grid.len());
    for &gamma in gamma_grid {
        let path: Vec<(f64, f64)> = delta_grid.iter().map(|&d| (d, gamma)).collect();
        let pairs = track_branch_pair(template, &path);
        sheet_a.push(pairs.iter().map(|p| p.0).collect::<Vec<_>>());
        sheet_b.push(pairs.iter().map(|p| p.1).collect::<Vec<_>>());
        flags.push(pairs.iter().map(|p| p.0.im < p.1.im).collect::<Vec<_>>());
    }
    Ok(RiemannSheets {
        delta_grid: delta_grid.to_vec(),
        gamma_grid: gamma_grid.to_vec(),
        sheet_a,
        sheet_b,
        a_more_decaying: flags,
    })
}
