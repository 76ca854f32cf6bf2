//! Chain Hamiltonian: coupling and field profiles, the XXZ Hamiltonian, and
//! its decomposition into local bond energies.
//!
//! The Hamiltonian is
//!
//! H = Σ_{i=1}^{N-1} [ α_i (σˣᵢσˣᵢ₊₁ + σʸᵢσʸᵢ₊₁) + Δ_i σᶻᵢσᶻᵢ₊₁ ] + Σ_{i=1}^{N} B_i σᶻᵢ
//!
//! with per-bond couplings α_i (XY part) and Δ_i (ZZ anisotropy), and per-site
//! fields B_i. Graded profiles ramp linearly along the chain, with the two
//! chain halves ending at center ∓ grade and center ± grade.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::spin_ops::{embed, pauli, two_site, Axis, OperatorMatrix};
use num_complex::Complex64;

/// Per-bond XY coupling and ZZ anisotropy along the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingProfile {
    /// α_i = alpha and Δ_i = anisotropy on every bond.
    Uniform { alpha: f64, anisotropy: f64 },
    /// Δ_i ramps linearly from anisotropy − grade to anisotropy + grade; α uniform.
    ZGraded { alpha: f64, anisotropy: f64, grade: f64 },
    /// α_i ramps linearly from alpha − grade to alpha + grade; Δ uniform.
    XyGraded { alpha: f64, anisotropy: f64, grade: f64 },
    /// Isotropic bonds α_i = Δ_i, ramping together around anisotropy.
    XxxGraded { anisotropy: f64, grade: f64 },
    /// α_i and Δ_i ramp independently around their own centers, same grade.
    FullyGraded { alpha: f64, anisotropy: f64, grade: f64 },
    /// Per-bond values given directly; both lists must have N−1 entries.
    Explicit { alpha: Vec<f64>, anisotropy: Vec<f64> },
}

/// Per-site longitudinal field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldProfile {
    /// B_i = b on every site.
    Uniform { b: f64 },
    /// B_i = center + slope · (i − (N+1)/2), antisymmetric about the middle.
    LinearGraded { center: f64, slope: f64 },
    /// Per-site values given directly; the list must have N entries.
    Explicit { b: Vec<f64> },
}

/// Chain size plus coupling and field profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Number of sites N ≥ 2.
    pub sites: usize,
    pub coupling: CouplingProfile,
    pub field: FieldProfile,
}

impl ChainConfig {
    pub fn new(sites: usize, coupling: CouplingProfile, field: FieldProfile) -> Self {
        Self { sites, coupling, field }
    }

    /// Uniform chain with no field, the plainest valid configuration.
    pub fn uniform(sites: usize, alpha: f64, anisotropy: f64) -> Self {
        Self::new(
            sites,
            CouplingProfile::Uniform { alpha, anisotropy },
            FieldProfile::Uniform { b: 0.0 },
        )
    }
}

/// Profiles resolved to concrete per-bond and per-site values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedProfiles {
    /// XY couplings α_i, one per bond (N−1).
    pub alpha: Vec<f64>,
    /// ZZ anisotropies Δ_i, one per bond (N−1).
    pub anisotropy: Vec<f64>,
    /// Fields B_i, one per site (N).
    pub field: Vec<f64>,
}

/// Linear ramp over `bonds` values with endpoints center ∓ grade.
fn ramp(center: f64, grade: f64, bonds: usize) -> Vec<f64> {
    (0..bonds)
        .map(|i| center + grade * (2.0 * i as f64 / (bonds - 1) as f64 - 1.0))
        .collect()
}

/// Expands the profiles of `config` into per-bond couplings and per-site fields.
///
/// Graded coupling profiles need at least one bond on each side of the ramp,
/// so they are rejected for N = 2.
pub fn resolve_profiles(config: &ChainConfig) -> Result<ResolvedProfiles, Error> {
    let n = config.sites;
    if n < 2 {
        return Err(Error::InvalidConfig(format!("chain needs at least 2 sites, got {n}")));
    }
    let bonds = n - 1;
    let graded = !matches!(
        config.coupling,
        CouplingProfile::Uniform { .. } | CouplingProfile::Explicit { .. }
    );
    if graded && n < 3 {
        return Err(Error::InvalidConfig(
            "graded coupling profiles need at least 3 sites".into(),
        ));
    }

    let (alpha, anisotropy) = match &config.coupling {
        CouplingProfile::Uniform { alpha, anisotropy } => {
            (vec![*alpha; bonds], vec![*anisotropy; bonds])
        }
        CouplingProfile::ZGraded { alpha, anisotropy, grade } => {
            (vec![*alpha; bonds], ramp(*anisotropy, *grade, bonds))
        }
        CouplingProfile::XyGraded { alpha, anisotropy, grade } => {
            (ramp(*alpha, *grade, bonds), vec![*anisotropy; bonds])
        }
        CouplingProfile::XxxGraded { anisotropy, grade } => {
            let r = ramp(*anisotropy, *grade, bonds);
            (r.clone(), r)
        }
        CouplingProfile::FullyGraded { alpha, anisotropy, grade } => {
            (ramp(*alpha, *grade, bonds), ramp(*anisotropy, *grade, bonds))
        }
        CouplingProfile::Explicit { alpha, anisotropy } => {
            if alpha.len() != bonds || anisotropy.len() != bonds {
                return Err(Error::InvalidConfig(format!(
                    "explicit coupling lists need {bonds} entries, got {} and {}",
                    alpha.len(),
                    anisotropy.len()
                )));
            }
            (alpha.clone(), anisotropy.clone())
        }
    };

    let field = match &config.field {
        FieldProfile::Uniform { b } => vec![*b; n],
        FieldProfile::LinearGraded { center, slope } => (1..=n)
            .map(|i| center + slope * (i as f64 - (n as f64 + 1.0) / 2.0))
            .collect(),
        FieldProfile::Explicit { b } => {
            if b.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "explicit field list needs {n} entries, got {}",
                    b.len()
                )));
            }
            b.clone()
        }
    };

    for (name, vals) in [("alpha", &alpha), ("anisotropy", &anisotropy), ("field", &field)] {
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite {name} value")));
        }
    }

    Ok(ResolvedProfiles { alpha, anisotropy, field })
}

/// Local energy operators for one bond, splitting exchange from field parts.
#[derive(Debug, Clone)]
pub struct LocalEnergyTerms {
    /// Bond index i, 1-based; the bond joins sites i and i+1.
    pub bond: usize,
    /// Exchange part h: α_i (σˣσˣ + σʸσʸ) + Δ_i σᶻσᶻ.
    pub exchange: OperatorMatrix,
    /// Field part b: half of each adjoining site's field, with the full field
    /// of a chain-end site folded into its only bond.
    pub field: OperatorMatrix,
    /// Bond energy ε = h + b; the bond energies sum to the Hamiltonian.
    pub total: OperatorMatrix,
}

/// Builds the XXZ Hamiltonian for `config` on the full 2^N space.
pub fn build_hamiltonian(config: &ChainConfig) -> Result<OperatorMatrix, Error> {
    let profiles = resolve_profiles(config)?;
    let n = config.sites;
    let dim = 1usize << n;
    let mut h = OperatorMatrix::zeros(dim, dim);
    for i in 1..n {
        h += bond_exchange(&profiles, i, n);
    }
    for (i, &b) in profiles.field.iter().enumerate() {
        h += embed(&pauli(Axis::Z), i + 1, n) * Complex64::new(b, 0.0);
    }
    Ok(h)
}

/// Exchange operator on bond i: α_i (σˣᵢσˣᵢ₊₁ + σʸᵢσʸᵢ₊₁) + Δ_i σᶻᵢσᶻᵢ₊₁.
fn bond_exchange(profiles: &ResolvedProfiles, i: usize, n: usize) -> OperatorMatrix {
    let alpha = Complex64::new(profiles.alpha[i - 1], 0.0);
    let aniso = Complex64::new(profiles.anisotropy[i - 1], 0.0);
    let xx = two_site(&pauli(Axis::X), i, &pauli(Axis::X), i + 1, n);
    let yy = two_site(&pauli(Axis::Y), i, &pauli(Axis::Y), i + 1, n);
    let zz = two_site(&pauli(Axis::Z), i, &pauli(Axis::Z), i + 1, n);
    (xx + yy) * alpha + zz * aniso
}

/// Splits the Hamiltonian into per-bond energies ε_i = h_i + b_i.
///
/// Field sharing: each interior site contributes B_i/2 σᶻᵢ to both adjoining
/// bonds; sites 1 and N contribute their full field to their single bond.
/// Needs N ≥ 3 so that the boundary weighting is distinct from the interior.
pub fn local_energy_terms(config: &ChainConfig) -> Result<Vec<LocalEnergyTerms>, Error> {
    let n = config.sites;
    if n < 3 {
        return Err(Error::InvalidConfig(
            "bond energy decomposition needs at least 3 sites".into(),
        ));
    }
    let profiles = resolve_profiles(config)?;
    let mut out = Vec::with_capacity(n - 1);
    for i in 1..n {
        let exchange = bond_exchange(&profiles, i, n);
        let w_left = if i == 1 { 1.0 } else { 0.5 };
        let w_right = if i + 1 == n { 1.0 } else { 0.5 };
        let field = embed(&pauli(Axis::Z), i, n) * Complex64::new(w_left * profiles.field[i - 1], 0.0)
            + embed(&pauli(Axis::Z), i + 1, n) * Complex64::new(w_right * profiles.field[i], 0.0);
        let total = &exchange + &field;
        out.push(LocalEnergyTerms { bond: i, exchange, field, total });
    }
    Ok(out)
}
