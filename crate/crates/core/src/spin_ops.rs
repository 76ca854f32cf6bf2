//! Pauli matrices and their embedding into an N-site spin-1/2 chain.
//!
//! Basis conventions: |↑⟩ = (1, 0)ᵀ with σᶻ|↑⟩ = +|↑⟩, and site 1 is the
//! leftmost Kronecker factor, so `embed(op, 1, n) = op ⊗ I ⊗ … ⊗ I`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

/// Single-site operator on C².
pub type LocalOperator = Matrix2<Complex64>;

/// Dense operator on the full chain space C^(2^N).
pub type OperatorMatrix = DMatrix<Complex64>;

/// Pauli axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrix σ^axis.
pub fn pauli(axis: Axis) -> LocalOperator {
    match axis {
        Axis::X => LocalOperator::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        Axis::Y => LocalOperator::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        Axis::Z => LocalOperator::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
    }
}

/// Raising operator σ⁺ = (σˣ + iσʸ)/2, mapping |↓⟩ to |↑⟩.
pub fn sigma_plus() -> LocalOperator {
    LocalOperator::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
}

/// Lowering operator σ⁻ = (σˣ − iσʸ)/2, mapping |↑⟩ to |↓⟩.
pub fn sigma_minus() -> LocalOperator {
    LocalOperator::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

/// Single-site identity.
pub fn local_identity() -> LocalOperator {
    LocalOperator::identity()
}

/// Identity on the full chain space of `n` sites.
pub fn chain_identity(n: usize) -> OperatorMatrix {
    OperatorMatrix::identity(1 << n, 1 << n)
}

/// Kronecker chain with the given local operators at the given 1-based sites
/// (identity elsewhere). Sites must be distinct and within 1..=n.
fn kron_chain(ops: &[(usize, &LocalOperator)], n: usize) -> OperatorMatrix {
    assert!(n >= 1, "chain needs at least one site");
    for &(site, _) in ops {
        assert!((1..=n).contains(&site), "site {site} outside 1..={n}");
    }
    let id = local_identity();
    let mut out = OperatorMatrix::identity(1, 1);
    for site in 1..=n {
        let factor = ops
            .iter()
            .find(|&&(s, _)| s == site)
            .map(|&(_, op)| op)
            .unwrap_or(&id);
        let factor = DMatrix::from_iterator(2, 2, factor.iter().copied());
        out = out.kronecker(&factor);
    }
    out
}

/// Embeds a single-site operator at `site` (1-based, leftmost factor first).
pub fn embed(op: &LocalOperator, site: usize, n: usize) -> OperatorMatrix {
    kron_chain(&[(site, op)], n)
}

/// Product of two single-site operators embedded at distinct sites.
pub fn two_site(
    a: &LocalOperator,
    site_a: usize,
    b: &LocalOperator,
    site_b: usize,
    n: usize,
) -> OperatorMatrix {
    assert_ne!(site_a, site_b, "two_site requires distinct sites");
    kron_chain(&[(site_a, a), (site_b, b)], n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn norm_diff(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
        (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn pauli_algebra_products() {
        let (x, y, z) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
        let i2 = local_identity();
        let im = c(0.0, 1.0);
        assert_eq!(x * x, i2);
        assert_eq!(y * y, i2);
        assert_eq!(z * z, i2);
        assert_eq!(x * y, z * im);
        assert_eq!(y * z, x * im);
        assert_eq!(z * x, y * im);
        assert_eq!(y * x, z * -im);
    }

    #[test]
    fn ladder_operators_match_definitions() {
        let (x, y) = (pauli(Axis::X), pauli(Axis::Y));
        let im = c(0.0, 1.0);
        assert_eq!(sigma_plus(), (x + y * im) * c(0.5, 0.0));
        assert_eq!(sigma_minus(), (x - y * im) * c(0.5, 0.0));
        let down = nalgebra::Vector2::new(c(0.0, 0.0), c(1.0, 0.0));
        let up = nalgebra::Vector2::new(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(sigma_plus() * down, up, "σ⁺ flips |↓⟩ to |↑⟩");
        assert_eq!(sigma_minus() * up, down, "σ⁻ flips |↑⟩ to |↓⟩");
    }

    #[test]
    fn embed_site_one_is_leftmost_factor() {
        let z1 = embed(&pauli(Axis::Z), 1, 2);
        let expect = OperatorMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(-1.0, 0.0),
        ]));
        assert_eq!(z1, expect, "site 1 varies slowest: diag(1,1,-1,-1)");

        let z2 = embed(&pauli(Axis::Z), 2, 2);
        let expect = OperatorMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(1.0, 0.0),
            c(-1.0, 0.0),
        ]));
        assert_eq!(z2, expect, "site 2 varies fastest: diag(1,-1,1,-1)");
    }

    #[test]
    fn embed_preserves_products_at_same_site() {
        let x = pauli(Axis::X);
        let y = pauli(Axis::Y);
        let lhs = embed(&(x * y), 2, 3);
        let rhs = embed(&x, 2, 3) * embed(&y, 2, 3);
        assert_abs_diff_eq!(norm_diff(&lhs, &rhs), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn embedded_operators_commute_across_sites() {
        let x1 = embed(&pauli(Axis::X), 1, 3);
        let y3 = embed(&pauli(Axis::Y), 3, 3);
        assert_abs_diff_eq!(norm_diff(&(&x1 * &y3), &(&y3 * &x1)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn two_site_equals_product_of_embeddings() {
        let a = pauli(Axis::X);
        let b = pauli(Axis::Z);
        let direct = two_site(&a, 1, &b, 3, 3);
        let product = embed(&a, 1, 3) * embed(&b, 3, 3);
        assert_abs_diff_eq!(norm_diff(&direct, &product), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn heisenberg_exchange_has_triplet_singlet_spectrum() {
        let mut sum = OperatorMatrix::zeros(4, 4);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            sum += two_site(&pauli(axis), 1, &pauli(axis), 2, 2);
        }
        let mut eigs: Vec<f64> = sum.symmetric_eigenvalues().iter().copied().collect();
        eigs.sort_by(f64::total_cmp);
        let expect = [-3.0, 1.0, 1.0, 1.0];
        for (got, want) in eigs.iter().zip(expect) {
            assert_abs_diff_eq!(got, &want, epsilon = 1e-12);
        }
    }

    #[test]
    fn embedding_preserves_hermiticity() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let op = embed(&pauli(axis), 2, 3);
            assert_abs_diff_eq!(norm_diff(&op, &op.adjoint()), 0.0, epsilon = 1e-15);
        }
    }
}
