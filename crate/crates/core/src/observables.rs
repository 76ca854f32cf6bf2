//! Steady-state observables: magnetization, spin current, energy current.
//!
//! Bulk currents come from continuity equations. Spin: J_i = 2α_i ⟨σˣᵢσʸᵢ₊₁ −
//! σʸᵢσˣᵢ₊₁⟩ on bond i. Energy: F_j = ⟨i[ε_{j−1,j}, ε_{j,j+1}]⟩ on interior
//! sites j, with ε the bond energies of [`crate::model::local_energy_terms`].
//! At the chain ends the energy flow is read off the baths themselves,
//! F_1 = tr(𝓛_L(ρ) ε_{1,2}) and F_N = −tr(𝓛_R(ρ) ε_{N−1,N}), which keeps the
//! site-resolved profile constant in the steady state.
//!
//! The exchange/field split F = F^exch + F^field separates the part that
//! survives at zero field (from [h, h] commutators) from the field-borne part
//! B_j (J_{j−1} + J_j)/2.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lindblad::{boundary_jumps, dissipator_apply, BoundaryDrive, BoundarySpec};
use crate::model::{local_energy_terms, resolve_profiles, ChainConfig, LocalEnergyTerms, ResolvedProfiles};
use crate::spin_ops::{embed, pauli, two_site, Axis, OperatorMatrix};

/// tr(ρ O), evaluated without forming the product matrix.
pub fn expectation(rho: &OperatorMatrix, op: &OperatorMatrix) -> Complex64 {
    let d = rho.nrows();
    let mut acc = Complex64::ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += rho[(i, j)] * op[(j, i)];
        }
    }
    acc
}

/// Largest tolerated imaginary part on a nominally real expectation value.
const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;

fn expect_real(rho: &OperatorMatrix, op: &OperatorMatrix, context: &str) -> Result<f64, Error> {
    let z = expectation(rho, op);
    if z.im.abs() > IMAGINARY_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue { context: context.into(), residue: z.im.abs() });
    }
    Ok(z.re)
}

/// Site- and bond-resolved currents of one steady state.
///
/// Boundary spin currents are only defined for the z-target drive (they read
/// the bath's polarization balance) and are `None` under the twisted drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentReport {
    /// ⟨σᶻᵢ⟩ per site.
    pub magnetization: Vec<f64>,
    /// Bulk spin current per bond (N−1 values).
    pub spin_current: Vec<f64>,
    /// Inflow from the left bath, γ(f_L − ⟨σᶻ₁⟩).
    pub spin_current_left: Option<f64>,
    /// Outflow into the right bath, γ(⟨σᶻ_N⟩ − f_R).
    pub spin_current_right: Option<f64>,
    /// Energy current per site (N values, ends read from the baths).
    pub energy_current: Vec<f64>,
    /// Exchange part of the energy current.
    pub energy_exchange_part: Vec<f64>,
    /// Field part of the energy current, F − F^exch.
    pub energy_field_part: Vec<f64>,
    /// Mean of all spin-current values, boundary values included.
    pub spin_mean: f64,
    /// Largest deviation of a spin-current value from the mean.
    pub spin_spread: f64,
    /// Mean of the site-resolved energy currents.
    pub energy_mean: f64,
    /// Largest deviation of an energy-current value from the mean.
    pub energy_spread: f64,
}

/// Operators for every reported observable, built once per configuration.
pub struct ObservableSet {
    sites: usize,
    profiles: ResolvedProfiles,
    bath: BoundarySpec,
    sigma_z: Vec<OperatorMatrix>,
    spin_current_ops: Vec<OperatorMatrix>,
    energy_terms: Vec<LocalEnergyTerms>,
    /// i[ε_{j−1,j}, ε_{j,j+1}] for interior sites j = 2..N−1.
    bulk_energy_ops: Vec<OperatorMatrix>,
    /// i[h_{j−1,j}, h_{j,j+1}] for the same sites.
    bulk_exchange_ops: Vec<OperatorMatrix>,
    left_jumps: Vec<OperatorMatrix>,
    right_jumps: Vec<OperatorMatrix>,
}

/// i[a, b] as a dense matrix.
fn commutator_i(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    (a * b - b * a) * Complex64::I
}

/// Spin-current operator on bond i: 2α_i (σˣᵢσʸᵢ₊₁ − σʸᵢσˣᵢ₊₁).
fn spin_current_op(alpha: f64, i: usize, n: usize) -> OperatorMatrix {
    let xy = two_site(&pauli(Axis::X), i, &pauli(Axis::Y), i + 1, n);
    let yx = two_site(&pauli(Axis::Y), i, &pauli(Axis::X), i + 1, n);
    (xy - yx) * Complex64::new(2.0 * alpha, 0.0)
}

impl ObservableSet {
    /// Builds all observable operators for the given chain and drive.
    ///
    /// Current reporting needs an interior site, so N ≥ 3.
    pub fn new(config: &ChainConfig, bath: &BoundarySpec) -> Result<Self, Error> {
        let n = config.sites;
        if n < 3 {
            return Err(Error::InvalidConfig(
                "current reporting needs at least 3 sites".into(),
            ));
        }
        let profiles = resolve_profiles(config)?;
        let energy_terms = local_energy_terms(config)?;
        let (left_jumps, right_jumps) = boundary_jumps(bath, n)?;

        let sigma_z = (1..=n).map(|i| embed(&pauli(Axis::Z), i, n)).collect();
        let spin_current_ops = (1..n)
            .map(|i| spin_current_op(profiles.alpha[i - 1], i, n))
            .collect();
        let mut bulk_energy_ops = Vec::with_capacity(n - 2);
        let mut bulk_exchange_ops = Vec::with_capacity(n - 2);
        for j in 2..n {
            let prev = &energy_terms[j - 2];
            let next = &energy_terms[j - 1];
            bulk_energy_ops.push(commutator_i(&prev.total, &next.total));
            bulk_exchange_ops.push(commutator_i(&prev.exchange, &next.exchange));
        }

        Ok(Self {
            sites: n,
            profiles,
            bath: *bath,
            sigma_z,
            spin_current_ops,
            energy_terms,
            bulk_energy_ops,
            bulk_exchange_ops,
            left_jumps,
            right_jumps,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Resolved per-bond couplings and per-site fields.
    pub fn profiles(&self) -> &ResolvedProfiles {
        &self.profiles
    }

    /// Evaluates every observable on a steady state.
    pub fn report(&self, rho: &OperatorMatrix) -> Result<CurrentReport, Error> {
        let n = self.sites;
        let d = 1usize << n;
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "state is {}×{}, chain space is {d}×{d}",
                rho.nrows(),
                rho.ncols()
            )));
        }

        let magnetization = self
            .sigma_z
            .iter()
            .enumerate()
            .map(|(i, op)| expect_real(rho, op, &format!("magnetization at site {}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;

        let spin_current = self
            .spin_current_ops
            .iter()
            .enumerate()
            .map(|(i, op)| expect_real(rho, op, &format!("spin current on bond {}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;

        let (spin_current_left, spin_current_right) = match self.bath.drive {
            BoundaryDrive::ZTarget { f_left, f_right } => {
                let g = self.bath.gamma;
                (
                    Some(g * (f_left - magnetization[0])),
                    Some(g * (magnetization[n - 1] - f_right)),
                )
            }
            BoundaryDrive::TwistedXy { .. } => (None, None),
        };

        // Boundary energy flows, read from the bath superoperators: the bath
        // side of d⟨ε⟩/dt at the first and last bond.
        let left_drift = dissipator_apply(rho, &self.left_jumps);
        let right_drift = dissipator_apply(rho, &self.right_jumps);
        let first = &self.energy_terms[0];
        let last = &self.energy_terms[n - 2];

        let mut energy_current = Vec::with_capacity(n);
        let mut energy_exchange_part = Vec::with_capacity(n);
        let mut energy_field_part = Vec::with_capacity(n);

        let f1_exch = expect_real(&left_drift, &first.exchange, "left boundary energy current")?;
        let f1_field = expect_real(&left_drift, &first.field, "left boundary energy current")?;
        energy_current.push(f1_exch + f1_field);
        energy_exchange_part.push(f1_exch);
        energy_field_part.push(f1_field);

        for (k, (op, op_exch)) in self
            .bulk_energy_ops
            .iter()
            .zip(&self.bulk_exchange_ops)
            .enumerate()
        {
            let context = format!("energy current at site {}", k + 2);
            let total = expect_real(rho, op, &context)?;
            let exch = expect_real(rho, op_exch, &context)?;
            energy_current.push(total);
            energy_exchange_part.push(exch);
            energy_field_part.push(total - exch);
        }

        let fn_exch = -expect_real(&right_drift, &last.exchange, "right boundary energy current")?;
        let fn_field = -expect_real(&right_drift, &last.field, "right boundary energy current")?;
        energy_current.push(fn_exch + fn_field);
        energy_exchange_part.push(fn_exch);
        energy_field_part.push(fn_field);

        let mut spin_values = spin_current.clone();
        if let Some(j) = spin_current_left {
            spin_values.insert(0, j);
        }
        if let Some(j) = spin_current_right {
            spin_values.push(j);
        }
        let (spin_mean, spin_spread) = mean_and_spread(&spin_values);
        let (energy_mean, energy_spread) = mean_and_spread(&energy_current);

        Ok(CurrentReport {
            magnetization,
            spin_current,
            spin_current_left,
            spin_current_right,
            energy_current,
            energy_exchange_part,
            energy_field_part,
            spin_mean,
            spin_spread,
            energy_mean,
            energy_spread,
        })
    }
}

fn mean_and_spread(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let spread = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    (mean, spread)
}

/// One-shot convenience: builds the operator set and evaluates it.
pub fn current_report(
    config: &ChainConfig,
    bath: &BoundarySpec,
    rho: &OperatorMatrix,
) -> Result<CurrentReport, Error> {
    ObservableSet::new(config, bath)?.report(rho)
}
