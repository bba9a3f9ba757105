//! State functionals (Bell-state fidelity, Wootters concurrence, purity,
//! trace distance) and the static parity-time-symmetry classifier of the
//! two-qubit configuration.

use crate::linalg::{eig_general, ComplexMatrix};
use crate::model::{bell_states, DensityMatrix, DerivedRates, SystemConfig};
use num_complex::Complex64;
use serde::Serialize;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The two odd-parity Bell states |Ψ±⟩ = (|10⟩ ± |01⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    Plus,
    Minus,
}

/// F_{|Ψ±⟩}(ρ) = ⟨Ψ±|ρ|Ψ±⟩.
pub fn bell_fidelity(rho: &DensityMatrix, which: BellState) -> f64 {
    let (plus, minus) = bell_states();
    let ket = match which {
        BellState::Plus => plus,
        BellState::Minus => minus,
    };
    let mut overlap = c(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            overlap += ket[i].conj() * rho.matrix()[(i, j)] * ket[j];
        }
    }
    overlap.re
}

/// σ_y ⊗ σ_y in the ordered product basis: anti-diagonal (−1, 1, 1, −1).
fn spin_flip() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 3)] = c(-1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(3, 0)] = c(-1.0, 0.0);
    m
}

/// Wootters concurrence: max(0, √μ₁ − √μ₂ − √μ₃ − √μ₄) with μ the
/// decreasingly ordered eigenvalues of ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y).
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let yy = spin_flip();
    let rho_tilde = yy.mul(&rho.matrix().conjugate()).mul(&yy);
    let product = rho.matrix().mul(&rho_tilde);
    let eigs = eig_general(&product)
        .expect("4x4 concurrence eigenproblem converges")
        .eigenvalues;
    // The product is similar to a positive-semidefinite matrix; clamp the
    // tiny negative/imaginary numerical residue before the square roots.
    let mut roots: Vec<f64> = eigs.iter().map(|l| l.re.max(0.0).sqrt()).collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    (roots[0] - roots[1] - roots[2] - roots[3]).max(0.0)
}

/// P(ρ) = Tr ρ².
pub fn purity(rho: &DensityMatrix) -> f64 {
    // For Hermitian ρ, Tr ρ² = Σ_{ij} |ρ_ij|².
    let m = rho.matrix();
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            sum += m[(i, j)].norm_sqr();
        }
    }
    sum
}

/// ½‖a − b‖₁ via the eigenvalues of the Hermitian difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let diff = a.matrix().sub(b.matrix());
    let eigs = eig_general(&diff)
        .expect("4x4 Hermitian eigenproblem converges")
        .eigenvalues;
    0.5 * eigs.iter().map(|l| l.norm()).sum::<f64>()
}

/// All four functionals of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSample {
    pub fidelity_plus: f64,
    pub fidelity_minus: f64,
    pub concurrence: f64,
    pub purity: f64,
}

pub fn sample_metrics(rho: &DensityMatrix) -> MetricSample {
    MetricSample {
        fidelity_plus: bell_fidelity(rho, BellState::Plus),
        fidelity_minus: bell_fidelity(rho, BellState::Minus),
        concurrence: concurrence(rho),
        purity: purity(rho),
    }
}

/// Outcome of the static parity-time-symmetry test: the configuration is
/// symmetric when δ = −2ε and the rates satisfy γ₁± = γ₂∓ (both within
/// 1e-12 relative).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PtReport {
    pub is_pt_symmetric: bool,
    pub violated_conditions: Vec<String>,
    /// n₁ + n₂; the rate-matching condition forces it to 1 for fermionic
    /// occupations.
    pub occupation_sum: f64,
}

fn relative_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

pub fn pt_symmetry_check(cfg: &SystemConfig) -> PtReport {
    let r = DerivedRates::from_config(cfg);
    let mut violated = Vec::new();
    if !relative_close(cfg.delta, -2.0 * cfg.epsilon) {
        violated.push(format!(
            "detuning condition delta = -2*epsilon: delta = {}, -2*epsilon = {}",
            cfg.delta,
            -2.0 * cfg.epsilon
        ));
    }
    if !relative_close(r.gamma1_plus, r.gamma2_minus)
        || !relative_close(r.gamma1_minus, r.gamma2_plus)
    {
        violated.push(format!(
            "rate matching gamma1+/- = gamma2-/+: ({}, {}) vs ({}, {})",
            r.gamma1_plus, r.gamma1_minus, r.gamma2_minus, r.gamma2_plus
        ));
    }
    PtReport {
        is_pt_symmetric: violated.is_empty(),
        violated_conditions: violated,
        occupation_sum: r.n1 + r.n2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn psi(which: BellState) -> DensityMatrix {
        let (plus, minus) = bell_states();
        let ket = match which {
            BellState::Plus => plus,
            BellState::Minus => minus,
        };
        DensityMatrix::from_pure(&ket).unwrap()
    }

    fn werner(p: f64) -> DensityMatrix {
        let bell = psi(BellState::Minus);
        let mixed = DensityMatrix::maximally_mixed();
        let m = bell.matrix().scale(c(p, 0.0)).add(&mixed.matrix().scale(c(1.0 - p, 0.0)));
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn bell_fidelities_separate_the_bell_pair() {
        let minus = psi(BellState::Minus);
        assert!((bell_fidelity(&minus, BellState::Minus) - 1.0).abs() < 1e-14);
        assert!(bell_fidelity(&minus, BellState::Plus).abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed();
        assert!((bell_fidelity(&mixed, BellState::Plus) - 0.25).abs() < 1e-14);
        let one_excited = DensityMatrix::basis_state(true, false);
        assert!((bell_fidelity(&one_excited, BellState::Plus) - 0.5).abs() < 1e-14);
        assert!((bell_fidelity(&one_excited, BellState::Minus) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn concurrence_of_reference_states() {
        assert!(concurrence(&DensityMatrix::maximally_mixed()).abs() < 1e-12);
        assert!((concurrence(&psi(BellState::Plus)) - 1.0).abs() < 1e-12);
        assert!((concurrence(&psi(BellState::Minus)) - 1.0).abs() < 1e-12);
        assert!(concurrence(&DensityMatrix::basis_state(true, false)).abs() < 1e-12);
        // Werner state: C = max(0, (3p−1)/2).
        assert!((concurrence(&werner(0.6)) - 0.4).abs() < 1e-12);
        assert!(concurrence(&werner(0.2)).abs() < 1e-12);
    }

    #[test]
    fn purity_of_reference_states() {
        assert!((purity(&psi(BellState::Plus)) - 1.0).abs() < 1e-14);
        assert!((purity(&DensityMatrix::maximally_mixed()) - 0.25).abs() < 1e-14);
        assert!((purity(&werner(0.6)) - (0.6f64 * 0.6 * 0.75 + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_of_reference_pairs() {
        let plus = psi(BellState::Plus);
        let minus = psi(BellState::Minus);
        assert!(trace_distance(&plus, &plus).abs() < 1e-12);
        assert!((trace_distance(&plus, &minus) - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed();
        assert!((trace_distance(&plus, &mixed) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_linear_in_the_state() {
        let a = 0.3;
        let left = psi(BellState::Plus);
        let right = DensityMatrix::basis_state(false, true);
        let blend = DensityMatrix::new(
            left.matrix().scale(c(a, 0.0)).add(&right.matrix().scale(c(1.0 - a, 0.0))),
        )
        .unwrap();
        for which in [BellState::Plus, BellState::Minus] {
            let direct = bell_fidelity(&blend, which);
            let linear = a * bell_fidelity(&left, which) + (1.0 - a) * bell_fidelity(&right, which);
            assert!((direct - linear).abs() < 1e-12);
        }
    }

    /// A Haar-ish random single-qubit unitary from three angles.
    fn one_qubit_unitary(theta: f64, phi: f64, lam: f64) -> ComplexMatrix {
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        ComplexMatrix::from_rows(vec![
            vec![c(ct, 0.0), -(c(0.0, lam).exp()) * st],
            vec![c(0.0, phi).exp() * st, c(0.0, lam + phi).exp() * ct],
        ])
    }

    proptest! {
        #[test]
        fn concurrence_is_invariant_under_local_unitaries(
            angles in proptest::array::uniform6(-3.0f64..3.0),
            p in 0.0f64..1.0,
        ) {
            let rho = werner(p);
            let u = one_qubit_unitary(angles[0], angles[1], angles[2])
                .kron(&one_qubit_unitary(angles[3], angles[4], angles[5]));
            let rotated = DensityMatrix::new(
                u.mul(rho.matrix()).mul(&u.adjoint()),
            ).unwrap();
            let drift = (concurrence(&rotated) - concurrence(&rho)).abs();
            prop_assert!(drift < 1e-9, "drift {}", drift);
        }

        #[test]
        fn fidelities_of_orthogonal_projectors_never_exceed_one(
            p in 0.0f64..1.0,
            a in 0.0f64..1.0,
        ) {
            let blend = DensityMatrix::new(
                werner(p).matrix().scale(c(a, 0.0)).add(
                    &DensityMatrix::basis_state(true, false).matrix().scale(c(1.0 - a, 0.0)),
                ),
            ).unwrap();
            let sum = bell_fidelity(&blend, BellState::Plus)
                + bell_fidelity(&blend, BellState::Minus);
            prop_assert!(sum <= 1.0 + 1e-9, "sum {}", sum);
        }
    }

    fn pt_base() -> SystemConfig {
        SystemConfig {
            epsilon: 1.0,
            delta: -2.0,
            g: 0.01,
            gamma: 0.02,
            alpha: 1.0,
            beta1: f64::NEG_INFINITY,
            beta2: f64::INFINITY,
            q: 1.0,
        }
    }

    #[test]
    fn balanced_gain_loss_is_pt_symmetric() {
        let report = pt_symmetry_check(&pt_base());
        assert!(report.is_pt_symmetric, "violated: {:?}", report.violated_conditions);
        assert!((report.occupation_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rate_imbalance_breaks_pt_symmetry() {
        let report = pt_symmetry_check(&SystemConfig { alpha: 1.2, ..pt_base() });
        assert!(!report.is_pt_symmetric);
        assert_eq!(report.violated_conditions.len(), 1);
        assert!(report.violated_conditions[0].contains("rate matching"));
    }

    #[test]
    fn detuning_mismatch_breaks_pt_symmetry() {
        let report = pt_symmetry_check(&SystemConfig { delta: 0.0, ..pt_base() });
        assert!(!report.is_pt_symmetric);
        assert!(report.violated_conditions[0].contains("detuning"));
    }

    #[test]
    fn infinite_temperature_pair_is_pt_symmetric() {
        // β₁ = β₂ = 0 gives n₁ = n₂ = 1/2, so γ₁± = γ₂∓ at α = 1.
        let cfg = SystemConfig { beta1: 0.0, beta2: 0.0, ..pt_base() };
        let report = pt_symmetry_check(&cfg);
        assert!(report.is_pt_symmetric, "violated: {:?}", report.violated_conditions);
        assert!((report.occupation_sum - 1.0).abs() < 1e-12);
    }
}
