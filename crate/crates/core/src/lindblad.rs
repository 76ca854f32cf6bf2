//! Boundary drives, jump operators, and the vectorized Liouvillian.
//!
//! The master equation is dρ/dt = i[ρ, H] + Σ_s (L_s ρ L_s† − ½{L_s†L_s, ρ}).
//! Column-stacking vectorization (vec(ABC) = (Cᵀ ⊗ A) vec B) turns the right
//! side into M vec(ρ) with
//!
//! M = i(Hᵀ ⊗ I − I ⊗ H) + Σ_s [ L̄_s ⊗ L_s − ½ I ⊗ (L_s†L_s) − ½ (L_s†L_s)ᵀ ⊗ I ]
//!
//! assembled sparsely so the 4^N superoperator is never densified.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{build_hamiltonian, ChainConfig};
use crate::sparse::{Coo, Csr};
use crate::spin_ops::{embed, sigma_minus, sigma_plus, LocalOperator, OperatorMatrix};

/// What the boundary baths pump toward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryDrive {
    /// Left bath targets ⟨σᶻ₁⟩ = f_left, right bath targets ⟨σᶻ_N⟩ = f_right.
    ZTarget { f_left: f64, f_right: f64 },
    /// Transverse targets ⟨σˣ₁⟩ = κ and ⟨σʸ_N⟩ = κ; `swapped` exchanges which
    /// axis sits at which end, which is how this drive is reversed.
    TwistedXy { kappa: f64, swapped: bool },
}

/// Boundary coupling strength and drive targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    /// Bath coupling rate γ > 0.
    pub gamma: f64,
    pub drive: BoundaryDrive,
}

impl BoundarySpec {
    /// Antisymmetric z drive: f_left = f, f_right = −f.
    pub fn z_target(f: f64, gamma: f64) -> Self {
        Self { gamma, drive: BoundaryDrive::ZTarget { f_left: f, f_right: -f } }
    }

    /// z drive with independent targets at the two ends.
    pub fn z_target_pair(f_left: f64, f_right: f64, gamma: f64) -> Self {
        Self { gamma, drive: BoundaryDrive::ZTarget { f_left, f_right } }
    }

    /// Twisted XY drive: ⟨σˣ⟩ = κ at site 1, ⟨σʸ⟩ = κ at site N.
    pub fn twisted_xy(kappa: f64, gamma: f64) -> Self {
        Self { gamma, drive: BoundaryDrive::TwistedXy { kappa, swapped: false } }
    }

    /// Checks rate positivity and target ranges.
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bath rate gamma must be positive, got {}",
                self.gamma
            )));
        }
        match self.drive {
            BoundaryDrive::ZTarget { f_left, f_right } => {
                for (name, f) in [("f_left", f_left), ("f_right", f_right)] {
                    if !(f.is_finite() && (-1.0..=1.0).contains(&f)) {
                        return Err(Error::InvalidConfig(format!(
                            "target polarization {name} must lie in [-1, 1], got {f}"
                        )));
                    }
                }
            }
            BoundaryDrive::TwistedXy { kappa, .. } => {
                if !(kappa.is_finite() && (-1.0..=1.0).contains(&kappa)) {
                    return Err(Error::InvalidConfig(format!(
                        "target polarization kappa must lie in [-1, 1], got {kappa}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The reversed drive used for rectification runs: z targets swap ends,
    /// twisted targets swap their axes between ends.
    pub fn inverted(&self) -> Self {
        let drive = match self.drive {
            BoundaryDrive::ZTarget { f_left, f_right } => {
                BoundaryDrive::ZTarget { f_left: f_right, f_right: f_left }
            }
            BoundaryDrive::TwistedXy { kappa, swapped } => {
                BoundaryDrive::TwistedXy { kappa, swapped: !swapped }
            }
        };
        Self { gamma: self.gamma, drive }
    }
}

/// Basis rotation taking σᶻ to σˣ (Hadamard).
fn rot_z_to_x() -> LocalOperator {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    LocalOperator::new(s, s, s, -s)
}

/// Basis rotation taking σᶻ to σʸ.
fn rot_z_to_y() -> LocalOperator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    LocalOperator::new(
        Complex64::new(s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(0.0, s),
        Complex64::new(0.0, -s),
    )
}

/// Pump/drain jump pair targeting polarization `f` along a rotated axis.
///
/// In the z basis the pair is √(γ(1±f)/2) σ^±; conjugating both by `rot`
/// moves the target onto rot σᶻ rot†.
fn target_pair(f: f64, gamma: f64, rot: Option<&LocalOperator>) -> [LocalOperator; 2] {
    let up = (gamma * (1.0 + f) / 2.0).sqrt();
    let dn = (gamma * (1.0 - f) / 2.0).sqrt();
    let mut pump = sigma_plus() * Complex64::new(up, 0.0);
    let mut drain = sigma_minus() * Complex64::new(dn, 0.0);
    if let Some(u) = rot {
        pump = u * pump * u.adjoint();
        drain = u * drain * u.adjoint();
    }
    [pump, drain]
}

/// Jump operators for the left bath (site 1) and right bath (site N),
/// embedded in the chain space. Each bath contributes a pump/drain pair.
pub fn boundary_jumps(
    spec: &BoundarySpec,
    n: usize,
) -> Result<(Vec<OperatorMatrix>, Vec<OperatorMatrix>), Error> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::InvalidConfig(format!("driven chain needs at least 2 sites, got {n}")));
    }
    let (left_pair, right_pair) = match spec.drive {
        BoundaryDrive::ZTarget { f_left, f_right } => (
            target_pair(f_left, spec.gamma, None),
            target_pair(f_right, spec.gamma, None),
        ),
        BoundaryDrive::TwistedXy { kappa, swapped } => {
            let (left_rot, right_rot) = if swapped {
                (rot_z_to_y(), rot_z_to_x())
            } else {
                (rot_z_to_x(), rot_z_to_y())
            };
            (
                target_pair(kappa, spec.gamma, Some(&left_rot)),
                target_pair(kappa, spec.gamma, Some(&right_rot)),
            )
        }
    };
    let left = left_pair.iter().map(|op| embed(op, 1, n)).collect();
    let right = right_pair.iter().map(|op| embed(op, n, n)).collect();
    Ok((left, right))
}

/// All four boundary jump operators, left pair first.
pub fn jump_operators(spec: &BoundarySpec, n: usize) -> Result<Vec<OperatorMatrix>, Error> {
    let (mut left, mut right) = boundary_jumps(spec, n)?;
    left.append(&mut right);
    Ok(left)
}

/// Applies the dissipator Σ_s (L_s ρ L_s† − ½{L_s†L_s, ρ}) to ρ.
pub fn dissipator_apply(rho: &OperatorMatrix, jumps: &[OperatorMatrix]) -> OperatorMatrix {
    let dim = rho.nrows();
    let mut out = OperatorMatrix::zeros(dim, dim);
    let half = Complex64::new(0.5, 0.0);
    for l in jumps {
        let ldag = l.adjoint();
        let ldag_l = &ldag * l;
        out += l * rho * &ldag - (&ldag_l * rho + rho * &ldag_l) * half;
    }
    out
}

/// Full master-equation right side i[ρ, H] + dissipator.
pub fn master_rhs(
    rho: &OperatorMatrix,
    hamiltonian: &OperatorMatrix,
    jumps: &[OperatorMatrix],
) -> OperatorMatrix {
    let i = Complex64::I;
    (rho * hamiltonian - hamiltonian * rho) * i + dissipator_apply(rho, jumps)
}

/// Column-stacking vectorization: columns of ρ concatenated top to bottom.
pub fn vectorize(rho: &OperatorMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(rho.as_slice())
}

/// Inverse of [`vectorize`] for a square matrix of dimension `dim`.
pub fn devectorize(v: &DVector<Complex64>, dim: usize) -> OperatorMatrix {
    assert_eq!(v.len(), dim * dim, "vector length must be dim²");
    OperatorMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Sparse vectorized Liouvillian M acting on vec(ρ).
#[derive(Debug, Clone)]
pub struct Liouvillian {
    sites: usize,
    chain_dim: usize,
    pub(crate) matrix: Csr,
}

impl Liouvillian {
    /// Number of chain sites N.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Hilbert-space dimension 2^N.
    pub fn chain_dim(&self) -> usize {
        self.chain_dim
    }

    /// Superoperator dimension 4^N.
    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    /// Applies M to a vectorized density matrix.
    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_vec(self.matrix.matvec(v.as_slice()))
    }

    /// Dense copy of M; only sensible for small N.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        self.matrix.to_dense()
    }

    /// Largest entry magnitude of M.
    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.max_abs()
    }

    /// Trace preservation defect: the largest column sum of M restricted to
    /// rows that hold diagonal elements of ρ. Exact zero means vec(I) is a
    /// left null vector, i.e. d(tr ρ)/dt = 0 for every ρ.
    pub fn trace_defect(&self) -> f64 {
        let d = self.chain_dim;
        let mut col_sums = vec![Complex64::ZERO; self.dim()];
        for (r, c, v) in self.matrix.iter() {
            if r % (d + 1) == 0 {
                col_sums[c] += v;
            }
        }
        col_sums.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Assembles the sparse Liouvillian for a driven chain.
pub fn build_liouvillian(config: &ChainConfig, bath: &BoundarySpec) -> Result<Liouvillian, Error> {
    let h = build_hamiltonian(config)?;
    let jumps = jump_operators(bath, config.sites)?;
    Ok(liouvillian_from_parts(config.sites, &h, &jumps))
}

/// Assembles M from an explicit Hamiltonian and jump set.
pub fn liouvillian_from_parts(
    sites: usize,
    hamiltonian: &OperatorMatrix,
    jumps: &[OperatorMatrix],
) -> Liouvillian {
    let d = hamiltonian.nrows();
    let eye = Coo::identity(d);
    let i = Complex64::I;
    let minus_half = Complex64::new(-0.5, 0.0);

    let mut acc = Coo::new(d * d);
    let h_t = Coo::from_dense(&hamiltonian.transpose());
    let h_coo = Coo::from_dense(hamiltonian);
    acc.add_scaled(&h_t.kron(&eye), i);
    acc.add_scaled(&eye.kron(&h_coo), -i);

    for l in jumps {
        let l_coo = Coo::from_dense(l);
        let l_conj = Coo::from_dense(&l.conjugate());
        let ldag_l = l.adjoint() * l;
        let ldag_l_t = Coo::from_dense(&ldag_l.transpose());
        let ldag_l_coo = Coo::from_dense(&ldag_l);
        acc.add_scaled(&l_conj.kron(&l_coo), Complex64::ONE);
        acc.add_scaled(&eye.kron(&ldag_l_coo), minus_half);
        acc.add_scaled(&ldag_l_t.kron(&eye), minus_half);
    }

    Liouvillian { sites, chain_dim: d, matrix: Csr::from_coo(&acc) }
}
