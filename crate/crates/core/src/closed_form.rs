//! Exact steady-state currents of the driven three-site chain.
//!
//! For three sites, bath rate γ = 1, a z drive with f_left = f = −f_right,
//! uniform field B, and bond anisotropies Δ − δ and Δ + δ, the steady-state
//! spin and energy currents are rational functions of (f, α, Δ, δ, B). This
//! module evaluates them directly, together with their truncations in the
//! spread δ and in the drive f, giving the numerical pipeline a
//! machine-precision reference that involves no linear algebra at all.
//!
//! The coefficient tables are locked by the tests below: the truncated forms
//! must agree with the exact ones to their truncation order, and the exact
//! ones must match dense steady-state solves on a seeded random parameter
//! grid to 1e−8.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lindblad::{BoundaryDrive, BoundarySpec};
use crate::model::{ChainConfig, CouplingProfile, FieldProfile};

/// Parameters of the three-site closed forms, with γ = 1 fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeSiteParams {
    /// Drive strength: the left bath targets ⟨σᶻ₁⟩ = f, the right one −f.
    pub f: f64,
    /// In-plane exchange coupling, equal on both bonds.
    pub alpha: f64,
    /// Center z coupling Δ; the bonds carry Δ − δ and Δ + δ.
    pub anisotropy: f64,
    /// Half-spread δ of the z coupling between the two bonds.
    pub grade: f64,
    /// Uniform longitudinal field B.
    pub field: f64,
}

impl ThreeSiteParams {
    pub fn new(f: f64, alpha: f64, anisotropy: f64, grade: f64, field: f64) -> Self {
        Self { f, alpha, anisotropy, grade, field }
    }

    /// Extracts closed-form parameters from a chain and bath description.
    ///
    /// Accepts exactly the configurations the closed forms cover: three
    /// sites, uniform or z-graded coupling, uniform field, and an
    /// antisymmetric z drive at rate γ = 1.
    pub fn from_chain(config: &ChainConfig, bath: &BoundarySpec) -> Result<Self, Error> {
        if config.sites != 3 {
            return Err(Error::UnsupportedSize(format!(
                "closed-form currents exist for 3 sites, not {}",
                config.sites
            )));
        }
        if bath.gamma != 1.0 {
            return Err(Error::InvalidConfig(format!(
                "closed-form currents fix the bath rate at 1, got {}",
                bath.gamma
            )));
        }
        let f = match bath.drive {
            BoundaryDrive::ZTarget { f_left, f_right } if f_right == -f_left => f_left,
            BoundaryDrive::ZTarget { f_left, f_right } => {
                return Err(Error::InvalidConfig(format!(
                    "closed-form currents need an antisymmetric z drive, got targets {f_left} and {f_right}"
                )));
            }
            BoundaryDrive::TwistedXy { .. } => {
                return Err(Error::InvalidConfig(
                    "closed-form currents cover the z drive only".into(),
                ));
            }
        };
        let (alpha, anisotropy, grade) = match config.coupling {
            CouplingProfile::Uniform { alpha, anisotropy } => (alpha, anisotropy, 0.0),
            CouplingProfile::ZGraded { alpha, anisotropy, grade } => (alpha, anisotropy, grade),
            _ => {
                return Err(Error::InvalidConfig(
                    "closed-form currents cover uniform or z-graded couplings only".into(),
                ));
            }
        };
        let field = match config.field {
            FieldProfile::Uniform { b } => b,
            FieldProfile::LinearGraded { center, slope: 0.0 } => center,
            _ => {
                return Err(Error::InvalidConfig(
                    "closed-form currents cover a uniform field only".into(),
                ));
            }
        };
        Ok(Self { f, alpha, anisotropy, grade, field })
    }
}

/// Numerator bracket shared by the spin current and the field part of the
/// energy current.
fn spin_bracket(f: f64, alpha: f64, anisotropy: f64, grade: f64) -> f64 {
    let f2 = f * f;
    let f4 = f2 * f2;
    let a2 = alpha * alpha;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let a8 = a4 * a4;
    let d2 = anisotropy * anisotropy;
    let g2 = grade * grade;
    let g4 = g2 * g2;
    let q = 1.0 + 16.0 * g2;

    589824.0 * a8
        + 32768.0 * a6 * (9.0 + 8.0 * (9.0 + 5.0 * f2) * g2 + 6.0 * d2)
        + q * q
            * (256.0 * (3.0 - 2.0 * f2).powi(2) * g4
                + (9.0 + (48.0 - 32.0 * f2) * d2).powi(2)
                - 32.0 * (-3.0 + 2.0 * f2) * g2 * (9.0 + 16.0 * (-3.0 + 2.0 * f2) * d2))
        + 512.0 * a4
            * (99.0 + 256.0 * (15.0 - 6.0 * f2 + 2.0 * f4) * g4
                - 48.0 * (-5.0 + 2.0 * f2) * d2
                - 32.0 * g2 * (-48.0 * (1.0 + 2.0 * d2) + f2 * (-7.0 + 24.0 * d2)))
        - 64.0 * a2 * q
            * (256.0 * (-3.0 - f2 + 2.0 * f4) * g4
                + (6.0 + 4.0 * d2) * (-9.0 + 16.0 * (-3.0 + 2.0 * f2) * d2)
                - 16.0 * g2 * (27.0 + 156.0 * d2 + 32.0 * f4 * d2 - f2 * (3.0 + 152.0 * d2)))
}

/// Numerator bracket of the spread-driven (exchange) part of the energy
/// current.
fn exchange_bracket(f: f64, alpha: f64, anisotropy: f64, grade: f64) -> f64 {
    let f2 = f * f;
    let a2 = alpha * alpha;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let d2 = anisotropy * anisotropy;
    let d4 = d2 * d2;
    let g2 = grade * grade;
    let g4 = g2 * g2;
    let q = 1.0 + 16.0 * g2;

    196608.0 * a6 * d2
        - 256.0 * a4
            * (9.0 + 256.0 * g4 - 192.0 * f2 * d2 - 256.0 * d4
                - 32.0 * g2 * (-5.0 + 16.0 * (-3.0 + f2) * d2))
        - 32.0 * a2 * q
            * (256.0 * (2.0 + f2) * g4 + 16.0 * g2 * (21.0 + 9.0 * f2 + 104.0 * d2)
                - (9.0 + 16.0 * d2) * (-3.0 + 8.0 * (-1.0 + 2.0 * f2) * d2))
        + q * q
            * (-81.0 + 256.0 * (-3.0 + 2.0 * f2) * g4 - 768.0 * d4
                + 32.0 * f2 * d2 * (-9.0 + 16.0 * d2)
                - 32.0 * g2 * (18.0 - 48.0 * d2 + f2 * (-9.0 + 32.0 * d2)))
}

/// Denominator common to both currents.
fn denominator(f: f64, alpha: f64, anisotropy: f64, grade: f64) -> f64 {
    let f2 = f * f;
    let f4 = f2 * f2;
    let a2 = alpha * alpha;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let a8 = a4 * a4;
    let a10 = a8 * a2;
    let d2 = anisotropy * anisotropy;
    let d4 = d2 * d2;
    let d6 = d4 * d2;
    let g2 = grade * grade;
    let g4 = g2 * g2;
    let g6 = g4 * g2;
    let q = 1.0 + 16.0 * g2;

    9437184.0 * a10
        + 65536.0 * a8 * (81.0 + 16.0 * (39.0 + 20.0 * f2) * g2 + 48.0 * d2)
        + 8192.0 * a6
            * (135.0 + 256.0 * (21.0 - 3.0 * f2 + 2.0 * f4) * g4
                - 48.0 * (-7.0 + 2.0 * f2) * d2
                + 16.0 * g2 * (126.0 + 272.0 * d2 + f2 * (21.0 - 48.0 * d2)))
        - q * q
            * (-81.0 + 4096.0 * (-3.0 + 2.0 * f2) * g6 - 144.0 * (9.0 + 2.0 * f2) * d2
                + 256.0 * (-27.0 + 8.0 * f4) * d4
                + 4096.0 * (-3.0 + 2.0 * f2) * d6
                + 256.0 * g4 * (-27.0 + 8.0 * f4 + 48.0 * d2 - 32.0 * f2 * d2)
                - 16.0 * g2
                    * (81.0 + 288.0 * d2 + 256.0 * f4 * d2 - 768.0 * d4
                        + 2.0 * f2 * (9.0 + 256.0 * d4)))
        - 512.0 * a4
            * (-207.0 + 4096.0 * (-11.0 + f2 + 4.0 * f4) * g6
                + 48.0 * (-26.0 + 7.0 * f2) * d2
                + 256.0 * (-3.0 + f2) * d4
                - 256.0 * g4
                    * (107.0 + 448.0 * d2 + 8.0 * f4 * (-1.0 + 8.0 * d2)
                        - 8.0 * f2 * (2.0 + 36.0 * d2))
                - 16.0 * g2
                    * (291.0 + 1664.0 * d2 + 64.0 * f4 * d2 + 768.0 * d4
                        - f2 * (7.0 + 592.0 * d2 + 256.0 * d4)))
        + 16.0 * a2 * q
            * (297.0 + 4096.0 * (13.0 - 10.0 * f2 + 4.0 * f4) * g6
                - 96.0 * (-33.0 + 2.0 * f2) * d2
                + 256.0 * (33.0 - 20.0 * f2 + 4.0 * f4) * d4
                - 256.0 * g4
                    * (-111.0 + 32.0 * d2 + f2 * (44.0 - 448.0 * d2)
                        + 4.0 * f4 * (-5.0 + 32.0 * d2))
                + 16.0 * g2
                    * (315.0 + 2112.0 * d2 + 6400.0 * d4
                        + 128.0 * f4 * d2 * (-3.0 + 8.0 * d2)
                        - 2.0 * f2 * (33.0 + 64.0 * d2 + 2304.0 * d4)))
}

fn checked_denominator(p: &ThreeSiteParams) -> Result<f64, Error> {
    let den = denominator(p.f, p.alpha, p.anisotropy, p.grade);
    if den.abs() < 1e-300 {
        return Err(Error::InvalidConfig(format!(
            "current denominator vanished at f={}, alpha={}, anisotropy={}, grade={}",
            p.f, p.alpha, p.anisotropy, p.grade
        )));
    }
    Ok(den)
}

/// Exact steady-state spin current.
///
/// Odd in the drive f and independent of the field.
///
/// ```
/// use spinflux::closed_form::{spin_current_exact, ThreeSiteParams};
///
/// let p = ThreeSiteParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
/// assert!((spin_current_exact(&p).unwrap() - 16.0 / 17.0).abs() < 1e-14);
/// ```
pub fn spin_current_exact(p: &ThreeSiteParams) -> Result<f64, Error> {
    let den = checked_denominator(p)?;
    Ok(16.0 * p.f * p.alpha * p.alpha * spin_bracket(p.f, p.alpha, p.anisotropy, p.grade) / den)
}

/// Exact steady-state energy current.
///
/// The field enters only through a term B·⟨J⟩, so subtracting the B = 0
/// value recovers the exchange part alone.
pub fn energy_current_exact(p: &ThreeSiteParams) -> Result<f64, Error> {
    let den = checked_denominator(p)?;
    let exchange = 2.0 * p.f * p.grade * exchange_bracket(p.f, p.alpha, p.anisotropy, p.grade);
    let field = p.field * spin_bracket(p.f, p.alpha, p.anisotropy, p.grade);
    Ok(16.0 * p.f * p.alpha * p.alpha * (exchange + field) / den)
}

/// δ-expansion coefficients (J₀, J₂) of the spin current.
fn spin_series_coefficients(f: f64, alpha: f64, anisotropy: f64) -> (f64, f64) {
    let f2 = f * f;
    let f4 = f2 * f2;
    let a2 = alpha * alpha;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let a8 = a4 * a4;
    let a10 = a8 * a2;
    let d2 = anisotropy * anisotropy;
    let d4 = d2 * d2;
    let d6 = d4 * d2;
    let d8 = d4 * d4;

    let lead_den = 9.0 + 12288.0 * a6 + 32.0 * (3.0 + 2.0 * f2) * d2 + 256.0 * d4
        + 256.0 * a4 * (15.0 + 16.0 * d2)
        + a2 * (336.0 - 256.0 * (-7.0 + 2.0 * f2) * d2);
    let j0 = -16.0
        * (f * a2 * (-9.0 - 768.0 * a4 + 16.0 * (-3.0 + 2.0 * f2) * d2 - 64.0 * a2 * (3.0 + 4.0 * d2)))
        / lead_den;

    let j2_num = 256.0 * f * a2
        * (-(3.0 + 48.0 * a2 + 16.0 * d2).powi(2)
            * (65536.0 * a8 + 9.0 * (3.0 + 16.0 * d2) + 8192.0 * a6 * (5.0 + 24.0 * d2)
                + 1024.0 * a4 * (9.0 + 52.0 * d2)
                + 96.0 * a2 * (9.0 + 40.0 * d2 + 128.0 * d4))
            + 64.0 * f4 * d2
                * (-81.0 + 184320.0 * a6 - 256.0 * d4 + 768.0 * a4 * (27.0 + 160.0 * d2)
                    + 16.0 * a2 * (-45.0 + 192.0 * d2 + 1280.0 * d4))
            + 2.0 * f2
                * (9437184.0 * a10 + 589824.0 * a8 * (9.0 + 16.0 * d2)
                    + 8192.0 * a6 * (117.0 - 408.0 * d2 + 2560.0 * d4)
                    + 1536.0 * a4 * (27.0 - 456.0 * d2 - 1664.0 * d4 + 6144.0 * d6)
                    + 3.0 * (-81.0 + 864.0 * d2 + 2304.0 * d4 + 8192.0 * d6)
                    + 16.0 * a2
                        * (-243.0 - 720.0 * d2 - 10752.0 * d4 - 28672.0 * d6 + 65536.0 * d8)));
    let j2_den =
        (9.0 + 192.0 * a2 + 768.0 * a4 + (48.0 - 32.0 * f2) * d2) * lead_den * lead_den;
    (j0, j2_num / j2_den)
}

/// Coefficient of δ¹ in the energy-current expansion.
fn energy_series_delta1(f: f64, alpha: f64, anisotropy: f64) -> f64 {
    let f2 = f * f;
    let f4 = f2 * f2;
    let a2 = alpha * alpha;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let a8 = a4 * a4;
    let a10 = a8 * a2;
    let d2 = anisotropy * anisotropy;
    let d4 = d2 * d2;
    let d6 = d4 * d2;

    let num = 32.0 * f2 * a2
        * (-81.0 + 196608.0 * a6 * d2 - 768.0 * d4 + 32.0 * f2 * d2 * (-9.0 + 16.0 * d2)
            + 32.0 * a2 * (9.0 + 16.0 * d2) * (-3.0 + 8.0 * (-1.0 + 2.0 * f2) * d2)
            + 256.0 * a4 * (-9.0 + 192.0 * f2 * d2 + 256.0 * d4));
    let den = 81.0 + 9437184.0 * a10 + 144.0 * (9.0 + 2.0 * f2) * d2
        - 256.0 * (-27.0 + 8.0 * f4) * d4
        - 4096.0 * (-3.0 + 2.0 * f2) * d6
        + 196608.0 * a8 * (27.0 + 16.0 * d2)
        - 24576.0 * a6 * (-45.0 + 16.0 * (-7.0 + 2.0 * f2) * d2)
        - 512.0 * a4 * (-207.0 + 48.0 * (-26.0 + 7.0 * f2) * d2 + 256.0 * (-3.0 + f2) * d4)
        + 16.0 * a2
            * (297.0 - 96.0 * (-33.0 + 2.0 * f2) * d2 + 256.0 * (33.0 - 20.0 * f2 + 4.0 * f4) * d4);
    num / den
}

/// Spin current truncated at second order in the spread: J₀ + J₂ δ².
pub fn spin_current_series_delta2(p: &ThreeSiteParams) -> f64 {
    let (j0, j2) = spin_series_coefficients(p.f, p.alpha, p.anisotropy);
    j0 + j2 * p.grade * p.grade
}

/// Energy current truncated at second order in the spread:
/// B J₀ + F₁ δ + B J₂ δ².
pub fn energy_current_series(p: &ThreeSiteParams) -> f64 {
    let (j0, j2) = spin_series_coefficients(p.f, p.alpha, p.anisotropy);
    let f1 = energy_series_delta1(p.f, p.alpha, p.anisotropy);
    p.field * j0 + f1 * p.grade + p.field * j2 * p.grade * p.grade
}

/// Energy current to leading orders in a weak drive: fB c₁(α, Δ) + f²δ c₂(α, Δ).
pub fn energy_current_series_smallf(p: &ThreeSiteParams) -> f64 {
    let a2 = p.alpha * p.alpha;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let d2 = p.anisotropy * p.anisotropy;
    let d4 = d2 * d2;

    let c1 = 48.0 * (16.0 * a2 + 3.0) * a2 / (768.0 * a4 + 192.0 * a2 + 48.0 * d2 + 9.0);
    let c2 = 32.0 * a2
        * (196608.0 * a6 * d2 + 65536.0 * a4 * d4 - 2304.0 * a4 - 4096.0 * a2 * d4
            - 3840.0 * a2 * d2 - 864.0 * a2 - 768.0 * d4 - 81.0)
        / (3.0 * (48.0 * a2 + 16.0 * d2 + 3.0)
            * (256.0 * a4 + 64.0 * a2 + 16.0 * d2 + 3.0).powi(2));
    p.f * p.field * c1 + p.f * p.f * p.grade * c2
}
