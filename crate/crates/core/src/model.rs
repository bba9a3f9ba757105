//! Physical operators for two coupled qubits with local fermionic baths.
//!
//! Conventions, fixed once here and relied on everywhere else:
//! - Two-qubit basis order {|11⟩, |10⟩, |01⟩, |00⟩}; qubit 1 is the left
//!   tensor factor; the single-qubit basis is {|1⟩, |0⟩} so σ₊ = |1⟩⟨0| is
//!   strictly upper triangular.
//! - Transition energies ε₁ = ε, ε₂ = ε + δ.
//! - Bath occupations n_j = 1/(e^{β_j ε_j} + 1), with the β → ±∞ limits taken
//!   exactly (n = 0 resp. 1, no exponential evaluated). Rates
//!   γ_j⁺ = γ_j n_j (excitation), γ_j⁻ = γ_j (1 − n_j) (decay), γ₁ = γ,
//!   γ₂ = αγ.
//! - Generator: dρ/dt = −i(H_eff ρ − ρ H_eff†) + q Σ_j [γ_j⁺ 𝒥₊⁽ʲ⁾ + γ_j⁻ 𝒥₋⁽ʲ⁾]ρ
//!   with 𝒥_± ρ = σ_± ρ σ_∓ and
//!   H_eff = H₀ − (i/2) Σ_j [γ_j⁻ σ₊σ₋⁽ʲ⁾ + γ_j⁺ σ₋σ₊⁽ʲ⁾].
//!   At q = 1 this is a trace-preserving Lindblad generator; at q = 0 it is
//!   postselected no-jump evolution under the non-Hermitian H_eff alone.
//! - Superoperators act on column-stacked matrices: vec(ρ)[4j + i] = ρ_ij, so
//!   vec(AρB) = (Bᵀ ⊗ A)·vec(ρ).

use crate::error::{Error, Result};
use crate::linalg::{eig_general, ComplexMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Serde adapter encoding ±∞ as the strings "+inf"/"-inf" (JSON has no
/// literal infinity).
pub mod ext_real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if *x > 0.0 {
            s.serialize_str("+inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Str(s) => parse(&s).ok_or_else(|| {
                de::Error::custom(format!("expected a number, \"+inf\" or \"-inf\", got \"{s}\""))
            }),
        }
    }

    pub fn parse(s: &str) -> Option<f64> {
        match s {
            "+inf" | "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            _ => s.parse().ok().filter(|x: &f64| x.is_finite()),
        }
    }
}

/// Complete static parameter set of the two-qubit system.
///
/// `epsilon` > 0 sets the energy scale (ħ = 1); `delta` is the detuning of
/// qubit 2; `g` the exchange coupling; `gamma` the bath coupling of qubit 1
/// with `alpha` the ratio γ₂/γ₁; `beta1`/`beta2` the inverse bath
/// temperatures (±∞ allowed, negative values are population-inverted baths);
/// `q` ∈ [0, 1] the quantum-jump weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub g: f64,
    pub gamma: f64,
    pub alpha: f64,
    #[serde(with = "ext_real")]
    pub beta1: f64,
    #[serde(with = "ext_real")]
    pub beta2: f64,
    pub q: f64,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("epsilon", self.epsilon),
            ("delta", self.delta),
            ("g", self.g),
            ("gamma", self.gamma),
            ("alpha", self.alpha),
            ("q", self.q),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite, got {v}")));
            }
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidConfig(format!("g must be >= 0, got {}", self.g)));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidConfig(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if self.alpha <= 0.0 {
            return Err(Error::InvalidConfig(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::InvalidConfig(format!("q must lie in [0, 1], got {}", self.q)));
        }
        if self.beta1.is_nan() || self.beta2.is_nan() {
            return Err(Error::InvalidConfig("beta1/beta2 must not be NaN".into()));
        }
        Ok(())
    }

    /// The weak-coupling derivation behind the generator assumes
    /// g, γ_j, |δ| ≪ ε; returns a note when that is stretched.
    pub fn markovian_warning(&self) -> Option<String> {
        let worst = self
            .g
            .max(self.gamma)
            .max(self.alpha * self.gamma)
            .max(self.delta.abs());
        if worst > 0.1 * self.epsilon {
            Some(format!(
                "max(g, gamma, alpha*gamma, |delta|) = {worst} exceeds 0.1*epsilon = {}; \
                 the weak-dissipation generator is outside its validity regime",
                0.1 * self.epsilon
            ))
        } else {
            None
        }
    }
}

/// n = 1/(e^{βε} + 1) with the β → ±∞ limits exact regardless of ε's sign.
pub fn fermi_occupation(beta: f64, energy: f64) -> f64 {
    if beta == f64::INFINITY {
        return 0.0;
    }
    if beta == f64::NEG_INFINITY {
        return 1.0;
    }
    1.0 / ((beta * energy).exp() + 1.0)
}

/// All per-qubit and aggregate rates derived from a [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    pub n1: f64,
    pub n2: f64,
    pub gamma1_plus: f64,
    pub gamma1_minus: f64,
    pub gamma2_plus: f64,
    pub gamma2_minus: f64,
    /// Γ_j = γ_j⁺ + γ_j⁻ (= γ_j exactly).
    pub big_gamma1: f64,
    pub big_gamma2: f64,
    /// Γ± = Σ_j γ_j^±.
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Γ = Γ⁺ + Γ⁻.
    pub gamma_total: f64,
    /// Γ̃_j = γ_j⁻ − γ_j⁺.
    pub gamma_tilde1: f64,
    pub gamma_tilde2: f64,
}

impl DerivedRates {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        let n1 = fermi_occupation(cfg.beta1, cfg.epsilon);
        let n2 = fermi_occupation(cfg.beta2, cfg.epsilon + cfg.delta);
        let g1 = cfg.gamma;
        let g2 = cfg.alpha * cfg.gamma;
        let (gamma1_plus, gamma1_minus) = (g1 * n1, g1 * (1.0 - n1));
        let (gamma2_plus, gamma2_minus) = (g2 * n2, g2 * (1.0 - n2));
        Self {
            n1,
            n2,
            gamma1_plus,
            gamma1_minus,
            gamma2_plus,
            gamma2_minus,
            big_gamma1: gamma1_plus + gamma1_minus,
            big_gamma2: gamma2_plus + gamma2_minus,
            gamma_plus: gamma1_plus + gamma2_plus,
            gamma_minus: gamma1_minus + gamma2_minus,
            gamma_total: gamma1_plus + gamma1_minus + gamma2_plus + gamma2_minus,
            gamma_tilde1: gamma1_minus - gamma1_plus,
            gamma_tilde2: gamma2_minus - gamma2_plus,
        }
    }
}

fn kron2(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

fn sigma_plus_local() -> ComplexMatrix {
    ComplexMatrix::from_rows(vec![vec![cr(0.0), cr(1.0)], vec![cr(0.0), cr(0.0)]])
}

fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

/// σ₊ acting on qubit 1 (left factor), as a 4×4 operator.
pub fn sigma_plus_1() -> ComplexMatrix {
    kron2(&sigma_plus_local(), &identity2())
}

pub fn sigma_minus_1() -> ComplexMatrix {
    sigma_plus_1().adjoint()
}

pub fn sigma_plus_2() -> ComplexMatrix {
    kron2(&identity2(), &sigma_plus_local())
}

pub fn sigma_minus_2() -> ComplexMatrix {
    sigma_plus_2().adjoint()
}

/// The four weighted jump operators (rate, L): excitation and decay on each
/// qubit, in the fixed order (γ₁⁺,σ₊¹), (γ₁⁻,σ₋¹), (γ₂⁺,σ₊²), (γ₂⁻,σ₋²).
pub fn jump_operators(cfg: &SystemConfig) -> [(f64, ComplexMatrix); 4] {
    let r = DerivedRates::from_config(cfg);
    [
        (r.gamma1_plus, sigma_plus_1()),
        (r.gamma1_minus, sigma_minus_1()),
        (r.gamma2_plus, sigma_plus_2()),
        (r.gamma2_minus, sigma_minus_2()),
    ]
}

/// Coherent Hamiltonian H₀ = Σ_j ε_j σ₊σ₋⁽ʲ⁾ + g(σ₊⁽¹⁾σ₋⁽²⁾ + σ₋⁽¹⁾σ₊⁽²⁾).
pub fn build_hamiltonian(cfg: &SystemConfig) -> ComplexMatrix {
    let (sp1, sm1) = (sigma_plus_1(), sigma_minus_1());
    let (sp2, sm2) = (sigma_plus_2(), sigma_minus_2());
    let n1 = sp1.mul(&sm1);
    let n2 = sp2.mul(&sm2);
    let exchange = sp1.mul(&sm2).add(&sm1.mul(&sp2));
    n1.scale(cr(cfg.epsilon))
        .add(&n2.scale(cr(cfg.epsilon + cfg.delta)))
        .add(&exchange.scale(cr(cfg.g)))
}

/// Non-Hermitian H_eff = H₀ − (i/2) Σ_j [γ_j⁻ σ₊σ₋⁽ʲ⁾ + γ_j⁺ σ₋σ₊⁽ʲ⁾].
pub fn build_effective_hamiltonian(cfg: &SystemConfig) -> ComplexMatrix {
    let r = DerivedRates::from_config(cfg);
    let (sp1, sm1) = (sigma_plus_1(), sigma_minus_1());
    let (sp2, sm2) = (sigma_plus_2(), sigma_minus_2());
    let decay = sp1
        .mul(&sm1)
        .scale(cr(r.gamma1_minus))
        .add(&sm1.mul(&sp1).scale(cr(r.gamma1_plus)))
        .add(&sp2.mul(&sm2).scale(cr(r.gamma2_minus)))
        .add(&sm2.mul(&sp2).scale(cr(r.gamma2_plus)));
    build_hamiltonian(cfg).add(&decay.scale(c(0.0, -0.5)))
}

/// Basis label of a [`Superoperator`]; prevents mixing the 16- and
/// 6-dimensional representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperBasis {
    /// All 16 matrix units |i⟩⟨j|, column-stacked: index 4j + i.
    Full,
    /// The closed 6-dimensional sector {|11⟩⟨11|, |10⟩⟨10|, |10⟩⟨01|,
    /// |01⟩⟨10|, |01⟩⟨01|, |00⟩⟨00|}: populations plus the one-excitation
    /// coherence pair.
    Reduced,
}

impl SuperBasis {
    /// Ordered matrix units (i, j) ↦ |i⟩⟨j| this basis enumerates.
    pub fn units(&self) -> Vec<(usize, usize)> {
        match self {
            SuperBasis::Full => (0..16).map(|k| (k % 4, k / 4)).collect(),
            SuperBasis::Reduced => REDUCED_BASIS_UNITS.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SuperBasis::Full => 16,
            SuperBasis::Reduced => 6,
        }
    }
}

/// Matrix units spanning the reduced sector, in basis order.
pub const REDUCED_BASIS_UNITS: [(usize, usize); 6] =
    [(0, 0), (1, 1), (1, 2), (2, 1), (2, 2), (3, 3)];

/// Positions of the reduced-sector units inside the column-stacked 16-vector.
pub fn reduced_vec_indices() -> [usize; 6] {
    let mut out = [0usize; 6];
    for (k, (i, j)) in REDUCED_BASIS_UNITS.iter().enumerate() {
        out[k] = 4 * j + i;
    }
    out
}

/// A linear map on density matrices, stored in an explicit matrix-unit basis.
#[derive(Debug, Clone)]
pub struct Superoperator {
    matrix: ComplexMatrix,
    basis: SuperBasis,
}

impl Superoperator {
    pub fn new(matrix: ComplexMatrix, basis: SuperBasis) -> Self {
        assert_eq!(matrix.rows(), basis.dim(), "matrix size must match basis");
        assert!(matrix.is_square());
        Self { matrix, basis }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> SuperBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.matrix.mul_vec(v)
    }

    /// Applies a full-basis superoperator to a 4×4 matrix.
    /// Panics on a reduced-basis operator: lift to the full basis first.
    pub fn apply_to_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.basis, SuperBasis::Full, "reduced basis cannot act on a full matrix");
        unvectorize(&self.matrix.mul_vec(&vectorize(rho)))
    }
}

/// Column-stacks a square matrix: out[n·j + i] = m[(i, j)].
pub fn vectorize(m: &ComplexMatrix) -> Vec<Complex64> {
    assert!(m.is_square());
    let n = m.rows();
    let mut v = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            v.push(m[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vectorize`]; panics unless the length is a perfect square.
pub fn unvectorize(v: &[Complex64]) -> ComplexMatrix {
    let n = (v.len() as f64).sqrt().round() as usize;
    assert_eq!(n * n, v.len(), "length must be a perfect square");
    ComplexMatrix::from_fn(n, n, |i, j| v[n * j + i])
}

/// Full 16×16 generator: coherent part −i(I ⊗ H_eff) + i(H_eff* ⊗ I) plus
/// jump part q Σ rate·(L* ⊗ L), in the column-stacked convention.
pub fn build_liouvillian(cfg: &SystemConfig) -> Superoperator {
    let h = build_effective_hamiltonian(cfg);
    let i4 = ComplexMatrix::identity(4);
    let mut l = i4
        .kron(&h)
        .scale(c(0.0, -1.0))
        .add(&h.conjugate().kron(&i4).scale(c(0.0, 1.0)));
    for (rate, op) in jump_operators(cfg) {
        if rate == 0.0 {
            continue;
        }
        l = l.add(&op.conjugate().kron(&op).scale(cr(cfg.q * rate)));
    }
    Superoperator::new(l, SuperBasis::Full)
}

/// The generator restricted to its closed 6-dimensional sector, written out
/// entrywise (independent of [`build_liouvillian`], which is the cross-check).
pub fn build_reduced_liouvillian(cfg: &SystemConfig) -> Superoperator {
    let r = DerivedRates::from_config(cfg);
    let (g1p, g1m, g2p, g2m) = (r.gamma1_plus, r.gamma1_minus, r.gamma2_plus, r.gamma2_minus);
    let big_g = r.gamma_total;
    let (q, delta, g) = (cfg.q, cfg.delta, cfg.g);
    let z = cr(0.0);
    let ig = c(0.0, g);
    let m = ComplexMatrix::from_rows(vec![
        vec![cr(-g1m - g2m), cr(q * g2p), z, z, cr(q * g1p), z],
        vec![cr(q * g2m), cr(-g1m - g2p), ig, -ig, z, cr(q * g1p)],
        vec![z, ig, c(-big_g / 2.0, delta), z, -ig, z],
        vec![z, -ig, z, c(-big_g / 2.0, -delta), ig, z],
        vec![cr(q * g1m), z, -ig, ig, cr(-g1p - g2m), cr(q * g2p)],
        vec![z, cr(q * g1m), z, z, cr(q * g2m), cr(-g1p - g2p)],
    ]);
    Superoperator::new(m, SuperBasis::Reduced)
}

/// (|Ψ⁺⟩, |Ψ⁻⟩) = ((|10⟩ ± |01⟩)/√2) as 4-vectors in the fixed basis.
pub fn bell_states() -> (Vec<Complex64>, Vec<Complex64>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (
        vec![cr(0.0), cr(s), cr(s), cr(0.0)],
        vec![cr(0.0), cr(s), cr(-s), cr(0.0)],
    )
}

/// A validated two-qubit state: Hermitian within 1e-10, unit trace after the
/// exact renormalization applied on construction, eigenvalues ≥ −1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::InvalidState(format!(
                "density matrix must be 4x4, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm_dev = m.max_abs_diff(&m.adjoint());
        if herm_dev > 1e-10 {
            return Err(Error::InvalidState(format!("Hermiticity violated by {herm_dev:.3e}")));
        }
        let tr = m.trace();
        if (tr - cr(1.0)).norm() > 1e-10 {
            return Err(Error::InvalidState(format!("trace must be 1, got {tr}")));
        }
        let normalized = m.scale(cr(1.0 / tr.re));
        let eigs = eig_general(&normalized)?;
        let min_eig = eigs.eigenvalues.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
        if min_eig < -1e-9 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self(normalized))
    }

    /// |ψ⟩⟨ψ| from any nonzero 4-vector (normalized internally).
    pub fn from_pure(ket: &[Complex64]) -> Result<Self> {
        if ket.len() != 4 {
            return Err(Error::InvalidState(format!("ket must have 4 entries, got {}", ket.len())));
        }
        let norm_sq: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_sq.is_finite() && norm_sq > 0.0) {
            return Err(Error::InvalidState("ket must be nonzero and finite".into()));
        }
        let m = ComplexMatrix::from_fn(4, 4, |i, j| ket[i] * ket[j].conj() / norm_sq);
        Ok(Self(m))
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix::identity(4).scale(cr(0.25)))
    }

    /// Projector onto the product basis state |q₁ q₂⟩, excitation flags per qubit.
    pub fn basis_state(excited1: bool, excited2: bool) -> Self {
        let idx = basis_index(excited1, excited2);
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(idx, idx)] = cr(1.0);
        Self(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

/// Index of |q₁ q₂⟩ in the basis order {|11⟩, |10⟩, |01⟩, |00⟩}.
pub fn basis_index(excited1: bool, excited2: bool) -> usize {
    (1 - excited1 as usize) * 2 + (1 - excited2 as usize)
}
