//! Steady-state solvers and spectral diagnostics for the Liouvillian.
//!
//! The steady state is the null vector of M normalized to unit trace. Every
//! solver here works on the trace-augmented system: the row of M that holds
//! d(ρ₁₁)/dt is replaced by the trace functional, and the right side by 1.
//! Trace preservation makes that row a linear combination of the other
//! diagonal rows, so the augmented system is square, nonsingular, and has
//! vec(ρ_ss) as its unique solution.

use std::str::FromStr;
use std::sync::Once;
use std::time::{Duration, Instant};

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lindblad::{devectorize, Liouvillian};
use crate::sparse::{Coo, Csr};
use crate::spin_ops::OperatorMatrix;

/// Eigenvalues with modulus below this count as the stationary null space.
pub const NULL_EIGENVALUE_TOL: f64 = 1e-10;

/// Solution strategy for the augmented linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Dense LU for up to 5 sites, sparse LU beyond.
    Auto,
    /// Dense partial-pivoting LU on the densified superoperator.
    DenseLu,
    /// Sparse LU on the assembled sparse superoperator.
    SparseLu,
    /// Shifted inverse iteration targeting the null eigenvalue.
    InverseIteration,
    /// BiCGSTAB with an ILU(0) preconditioner.
    Krylov,
}

impl std::fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SolverMethod::Auto => "auto",
            SolverMethod::DenseLu => "dense_lu",
            SolverMethod::SparseLu => "sparse_lu",
            SolverMethod::InverseIteration => "inverse_iteration",
            SolverMethod::Krylov => "krylov",
        };
        f.write_str(name)
    }
}

impl FromStr for SolverMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "auto" => Ok(SolverMethod::Auto),
            "dense_lu" => Ok(SolverMethod::DenseLu),
            "sparse_lu" => Ok(SolverMethod::SparseLu),
            "inverse_iteration" => Ok(SolverMethod::InverseIteration),
            "krylov" => Ok(SolverMethod::Krylov),
            other => Err(Error::InvalidConfig(format!(
                "unknown solver '{other}' (expected auto, dense_lu, sparse_lu, inverse_iteration, or krylov)"
            ))),
        }
    }
}

/// Tuning for [`solve_steady`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub method: SolverMethod,
    /// Stopping tolerance for iterative methods, measured as ‖M x‖₂/‖x‖₂
    /// (inverse iteration) or relative residual (Krylov). `None` selects
    /// 1e-11.
    pub tol: Option<f64>,
    /// Iteration cap for iterative methods; 0 selects a per-method default.
    pub max_iterations: usize,
    /// Optional start vector for inverse iteration.
    pub seed: Option<DVector<Complex64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { method: SolverMethod::Auto, tol: None, max_iterations: 0, seed: None }
    }
}

impl SolveOptions {
    pub fn with_method(method: SolverMethod) -> Self {
        Self { method, ..Self::default() }
    }
}

/// Steady state with solver diagnostics.
///
/// `trace_defect` and `hermiticity_defect` are measured on the raw solver
/// output; `rho`, `residual`, and `min_eigenvalue` refer to the returned
/// Hermitized matrix (ρ + ρ†)/2.
#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho: OperatorMatrix,
    /// Method actually used (never `Auto`).
    pub method: SolverMethod,
    /// ‖M vec(ρ)‖₂ of the returned state.
    pub residual: f64,
    /// |tr ρ − 1| before Hermitization.
    pub trace_defect: f64,
    /// Largest entry of |ρ − ρ†| before Hermitization.
    pub hermiticity_defect: f64,
    /// Smallest eigenvalue of the Hermitized state; small negative values are
    /// roundoff, anything below −1e−9 indicates a failed solve.
    pub min_eigenvalue: f64,
    /// Linear-solver iterations; 1 for direct factorizations.
    pub iterations: usize,
    pub wall_time: Duration,
}

/// Outcome of a full Liouvillian eigenvalue scan.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub dim: usize,
    /// Eigenvalues with |λ| < [`NULL_EIGENVALUE_TOL`].
    pub null_count: usize,
    /// Largest real part among the remaining eigenvalues.
    pub max_real_part: f64,
    pub eigenvalues: Vec<Complex64>,
}

static FAER_SETUP: Once = Once::new();

/// Pins faer to sequential execution so factorizations are reproducible and
/// sweep-level parallelism stays the only source of concurrency.
fn ensure_deterministic_backend() {
    FAER_SETUP.call_once(|| faer::set_global_parallelism(Par::Seq));
}

/// Solves M vec(ρ) = 0, tr ρ = 1 for the steady state.
pub fn solve_steady(liouv: &Liouvillian, opts: &SolveOptions) -> Result<SteadyStateResult, Error> {
    ensure_deterministic_backend();
    let start = Instant::now();
    let d = liouv.chain_dim();

    let scale = liouv.max_abs_entry().max(1.0);
    let defect = liouv.trace_defect();
    if defect > 1e-10 * scale {
        return Err(Error::NotTracePreserving { defect });
    }

    let method = match opts.method {
        SolverMethod::Auto => {
            if liouv.sites() <= 5 {
                SolverMethod::DenseLu
            } else {
                SolverMethod::SparseLu
            }
        }
        m => m,
    };

    let (raw, iterations) = match method {
        SolverMethod::DenseLu => (solve_dense_lu(liouv)?, 1),
        SolverMethod::SparseLu => (solve_sparse_lu(liouv)?, 1),
        SolverMethod::InverseIteration => solve_inverse_iteration(liouv, opts)?,
        SolverMethod::Krylov => solve_krylov(liouv, opts)?,
        SolverMethod::Auto => unreachable!(),
    };

    let rho_raw = devectorize(&raw, d);
    let trace = rho_raw.trace();
    let trace_defect = (trace - Complex64::ONE).norm();
    let adjoint = rho_raw.adjoint();
    let hermiticity_defect = (&rho_raw - &adjoint)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let rho = (rho_raw + adjoint) * Complex64::new(0.5, 0.0);

    let residual = liouv.apply(&crate::lindblad::vectorize(&rho)).norm();
    if !residual.is_finite() {
        return Err(Error::Factorization(format!(
            "{method} produced a non-finite residual; augmented system is numerically singular"
        )));
    }
    let min_eigenvalue = rho
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);

    Ok(SteadyStateResult {
        rho,
        method,
        residual,
        trace_defect,
        hermiticity_defect,
        min_eigenvalue,
        iterations,
        wall_time: start.elapsed(),
    })
}

/// Entries of the trace-functional row: ones at the diagonal vec indices.
fn trace_row(d: usize) -> Vec<(usize, Complex64)> {
    (0..d).map(|k| (k * (d + 1), Complex64::ONE)).collect()
}

/// The trace-augmented matrix M′.
fn augmented(liouv: &Liouvillian) -> Csr {
    liouv.matrix.replace_row(0, &trace_row(liouv.chain_dim()))
}

fn faer_mat_from_csr(csr: &Csr) -> Mat<c64> {
    let mut m = Mat::<c64>::zeros(csr.dim, csr.dim);
    for (r, c, v) in csr.iter() {
        m[(r, c)] = v;
    }
    m
}

fn faer_sparse_from_csr(csr: &Csr) -> Result<SparseColMat<usize, c64>, Error> {
    let triplets: Vec<Triplet<usize, usize, c64>> = csr
        .iter()
        .map(|(r, c, v)| Triplet { row: r, col: c, val: v })
        .collect();
    SparseColMat::try_new_from_triplets(csr.dim, csr.dim, &triplets)
        .map_err(|e| Error::Factorization(format!("sparse assembly failed: {e:?}")))
}

fn unit_rhs(dim: usize) -> Mat<c64> {
    let mut b = Mat::<c64>::zeros(dim, 1);
    b[(0, 0)] = c64::ONE;
    b
}

fn column_to_dvector(x: &Mat<c64>) -> DVector<Complex64> {
    DVector::from_iterator(x.nrows(), (0..x.nrows()).map(|i| x[(i, 0)]))
}

fn solve_dense_lu(liouv: &Liouvillian) -> Result<DVector<Complex64>, Error> {
    if liouv.dim() > 4096 {
        return Err(Error::UnsupportedSize(format!(
            "dense solve with dimension {} (more than 6 sites); use the sparse path",
            liouv.dim()
        )));
    }
    let aug = faer_mat_from_csr(&augmented(liouv));
    let lu = aug.partial_piv_lu();
    let x = lu.solve(unit_rhs(liouv.dim()));
    Ok(column_to_dvector(&x))
}

fn solve_sparse_lu(liouv: &Liouvillian) -> Result<DVector<Complex64>, Error> {
    let aug = faer_sparse_from_csr(&augmented(liouv))?;
    let lu = aug
        .sp_lu()
        .map_err(|e| Error::Factorization(format!("sparse LU failed: {e:?}")))?;
    let x = lu.solve(unit_rhs(liouv.dim()));
    Ok(column_to_dvector(&x))
}

/// Inverse iteration on (M − σI) with a shift far below the spectral gap.
fn solve_inverse_iteration(
    liouv: &Liouvillian,
    opts: &SolveOptions,
) -> Result<(DVector<Complex64>, usize), Error> {
    let dim = liouv.dim();
    let tol = opts.tol.unwrap_or(1e-11);
    let max_iterations = if opts.max_iterations == 0 { 200 } else { opts.max_iterations };
    let sigma = 1e-8 * liouv.max_abs_entry().max(1.0);

    let mut shifted = Coo::new(dim);
    shifted.entries.extend(liouv.matrix.iter());
    for i in 0..dim {
        shifted.entries.push((i, i, Complex64::new(-sigma, 0.0)));
    }
    let shifted = faer_sparse_from_csr(&Csr::from_coo(&shifted))?;
    let lu = shifted
        .sp_lu()
        .map_err(|e| Error::Factorization(format!("shifted LU failed: {e:?}")))?;

    let d = liouv.chain_dim();
    let mut x = match &opts.seed {
        Some(seed) => {
            if seed.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "seed has length {}, expected {dim}",
                    seed.len()
                )));
            }
            seed.clone()
        }
        // vec(I)/√d has guaranteed overlap with the steady state (their inner
        // product is the unit trace).
        None => {
            let mut v = DVector::zeros(dim);
            for k in 0..d {
                v[k * (d + 1)] = Complex64::ONE;
            }
            v
        }
    };
    x /= Complex64::new(x.norm(), 0.0);

    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iterations {
        let mut rhs = Mat::<c64>::zeros(dim, 1);
        for i in 0..dim {
            rhs[(i, 0)] = x[i];
        }
        let y = lu.solve(&rhs);
        let mut y = column_to_dvector(&y);
        let norm = y.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Factorization(
                "inverse iteration produced a non-finite iterate".into(),
            ));
        }
        y /= Complex64::new(norm, 0.0);
        x = y;
        residual = liouv.apply(&x).norm();
        if residual < tol {
            // Rescale from unit norm to unit trace.
            let trace: Complex64 = (0..d).map(|k| x[k * (d + 1)]).sum();
            if trace.norm() < 1e-8 {
                return Err(Error::Factorization(
                    "inverse iteration converged to a traceless null vector".into(),
                ));
            }
            x /= trace;
            return Ok((x, iteration));
        }
    }
    Err(Error::NonConvergence { iterations: max_iterations, residual })
}

/// ILU(0) factors stored in place on the matrix pattern.
struct Ilu0 {
    lu: Csr,
    diag: Vec<usize>,
}

impl Ilu0 {
    /// Computes the incomplete factorization, perturbing tiny pivots so the
    /// preconditioner stays applicable.
    fn new(a: &Csr) -> Self {
        let n = a.dim;
        let mut lu = a.clone();
        let floor = 1e-12 * lu.max_abs().max(1.0);
        let mut diag = vec![usize::MAX; n];
        for (r, d) in diag.iter_mut().enumerate() {
            for k in lu.indptr[r]..lu.indptr[r + 1] {
                if lu.indices[k] == r {
                    *d = k;
                }
            }
        }

        for i in 0..n {
            let row_start = lu.indptr[i];
            let row_end = lu.indptr[i + 1];
            for kk in row_start..row_end {
                let k = lu.indices[kk];
                if k >= i {
                    break;
                }
                let pivot_idx = diag[k];
                if pivot_idx == usize::MAX {
                    continue;
                }
                let pivot = lu.data[pivot_idx];
                let factor = lu.data[kk] / pivot;
                lu.data[kk] = factor;
                // Subtract factor * row k from row i, restricted to the pattern.
                let (ks, ke) = (lu.indptr[k], lu.indptr[k + 1]);
                let mut jj = kk + 1;
                for kj in ks..ke {
                    let col = lu.indices[kj];
                    if col <= k {
                        continue;
                    }
                    while jj < row_end && lu.indices[jj] < col {
                        jj += 1;
                    }
                    if jj < row_end && lu.indices[jj] == col {
                        let update = factor * lu.data[kj];
                        lu.data[jj] -= update;
                    }
                }
            }
            if let Some(&di) = diag.get(i) {
                if di != usize::MAX && lu.data[di].norm() < floor {
                    lu.data[di] = Complex64::new(floor, 0.0);
                }
            }
        }
        Self { lu, diag }
    }

    /// Applies (LU)⁻¹ by forward then backward substitution.
    fn apply(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.dim;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut acc = y[i];
            for k in self.lu.indptr[i]..self.lu.indptr[i + 1] {
                let c = self.lu.indices[k];
                if c >= i {
                    break;
                }
                acc -= self.lu.data[k] * y[c];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            let di = self.diag[i];
            for k in self.lu.indptr[i]..self.lu.indptr[i + 1] {
                let c = self.lu.indices[k];
                if c > i {
                    acc -= self.lu.data[k] * y[c];
                }
            }
            y[i] = if di == usize::MAX { acc } else { acc / self.lu.data[di] };
        }
        y
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Preconditioned BiCGSTAB on the trace-augmented system.
fn solve_krylov(
    liouv: &Liouvillian,
    opts: &SolveOptions,
) -> Result<(DVector<Complex64>, usize), Error> {
    let dim = liouv.dim();
    let tol = opts.tol.unwrap_or(1e-11);
    let max_iterations = if opts.max_iterations == 0 {
        (10 * dim).max(2000)
    } else {
        opts.max_iterations
    };
    let aug = augmented(liouv);
    let precond = Ilu0::new(&aug);

    let b: Vec<Complex64> = {
        let mut b = vec![Complex64::ZERO; dim];
        b[0] = Complex64::ONE;
        b
    };
    let mut x = vec![Complex64::ZERO; dim];
    let mut r = b.clone();
    let mut r_shadow = r.clone();
    let mut rho_old = Complex64::ONE;
    let mut alpha = Complex64::ONE;
    let mut omega = Complex64::ONE;
    let mut p = vec![Complex64::ZERO; dim];
    let mut v = vec![Complex64::ZERO; dim];
    let b_norm = norm2(&b);
    let breakdown = 1e-30;

    let mut restart = false;
    let mut residual = norm2(&r) / b_norm;
    for iteration in 1..=max_iterations {
        if restart {
            // Restart with the current residual as the new shadow vector.
            r_shadow = r.clone();
            rho_old = Complex64::ONE;
            alpha = Complex64::ONE;
            omega = Complex64::ONE;
            p = vec![Complex64::ZERO; dim];
            v = vec![Complex64::ZERO; dim];
            restart = false;
        }
        let rho = dot(&r_shadow, &r);
        if rho.norm() < breakdown {
            restart = true;
            continue;
        }
        let beta = (rho / rho_old) * (alpha / omega);
        for i in 0..dim {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat = precond.apply(&p);
        v = aug.matvec(&p_hat);
        let denom = dot(&r_shadow, &v);
        if denom.norm() < breakdown {
            restart = true;
            continue;
        }
        alpha = rho / denom;
        let s: Vec<Complex64> = (0..dim).map(|i| r[i] - alpha * v[i]).collect();
        if norm2(&s) / b_norm < tol {
            for i in 0..dim {
                x[i] += alpha * p_hat[i];
            }
            return Ok((DVector::from_vec(x), iteration));
        }
        let s_hat = precond.apply(&s);
        let t = aug.matvec(&s_hat);
        let t_norm_sqr = dot(&t, &t);
        if t_norm_sqr.norm() < breakdown {
            return Err(Error::NonConvergence { iterations: iteration, residual });
        }
        omega = dot(&t, &s) / t_norm_sqr;
        for i in 0..dim {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
        }
        r = (0..dim).map(|i| s[i] - omega * t[i]).collect();
        residual = norm2(&r) / b_norm;
        if residual < tol {
            return Ok((DVector::from_vec(x), iteration));
        }
        rho_old = rho;
    }
    Err(Error::NonConvergence { iterations: max_iterations, residual })
}

/// Full eigenvalue scan of M, feasible up to 4 sites (dimension 256).
///
/// A healthy driven chain shows exactly one null eigenvalue and strictly
/// negative real parts everywhere else.
pub fn spectral_check(liouv: &Liouvillian) -> Result<SpectralReport, Error> {
    ensure_deterministic_backend();
    if liouv.dim() > 256 {
        return Err(Error::UnsupportedSize(format!(
            "full spectrum of a {0}×{0} superoperator (limit is 256, i.e. 4 sites)",
            liouv.dim()
        )));
    }
    let m = faer_mat_from_csr(&liouv.matrix);
    let eigenvalues: Vec<Complex64> = m
        .eigenvalues()
        .map_err(|e| Error::Factorization(format!("eigenvalue computation failed: {e:?}")))?;
    let null_count = eigenvalues.iter().filter(|l| l.norm() < NULL_EIGENVALUE_TOL).count();
    let max_real_part = eigenvalues
        .iter()
        .filter(|l| l.norm() >= NULL_EIGENVALUE_TOL)
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectralReport { dim: liouv.dim(), null_count, max_real_part, eigenvalues })
}
