//! Cross-module property tests: randomized chains and drives must yield
//! physical steady states, solver-independent answers, and current reports
//! that respect the structural identities of the model.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use spinflux::prelude::*;

fn arb_coupling(sites: usize) -> BoxedStrategy<CouplingProfile> {
    let bonds = sites - 1;
    let uniform = (0.3f64..1.5, 0.0f64..2.0)
        .prop_map(|(alpha, anisotropy)| CouplingProfile::Uniform { alpha, anisotropy });
    let explicit = (
        proptest::collection::vec(0.3f64..1.5, bonds),
        proptest::collection::vec(-1.0f64..2.0, bonds),
    )
        .prop_map(|(alpha, anisotropy)| CouplingProfile::Explicit { alpha, anisotropy });
    if sites < 3 {
        return prop_oneof![uniform, explicit].boxed();
    }
    let z_graded = (0.3f64..1.5, 0.0f64..2.0, 0.0f64..1.0).prop_map(
        |(alpha, anisotropy, grade)| CouplingProfile::ZGraded { alpha, anisotropy, grade },
    );
    let xy_graded = (0.6f64..1.5, 0.0f64..2.0, 0.0f64..0.5).prop_map(
        |(alpha, anisotropy, grade)| CouplingProfile::XyGraded { alpha, anisotropy, grade },
    );
    let xxx_graded = (0.6f64..2.0, 0.0f64..0.5)
        .prop_map(|(anisotropy, grade)| CouplingProfile::XxxGraded { anisotropy, grade });
    let fully_graded = (0.6f64..1.5, 0.6f64..2.0, 0.0f64..0.5).prop_map(
        |(alpha, anisotropy, grade)| CouplingProfile::FullyGraded { alpha, anisotropy, grade },
    );
    prop_oneof![uniform, explicit, z_graded, xy_graded, xxx_graded, fully_graded].boxed()
}

fn arb_field(sites: usize) -> BoxedStrategy<FieldProfile> {
    prop_oneof![
        (-0.5f64..0.5).prop_map(|b| FieldProfile::Uniform { b }),
        (-0.3f64..0.3, -0.2f64..0.2)
            .prop_map(|(center, slope)| FieldProfile::LinearGraded { center, slope }),
        proptest::collection::vec(-0.5f64..0.5, sites)
            .prop_map(|b| FieldProfile::Explicit { b }),
    ]
    .boxed()
}

fn arb_chain(sites: std::ops::RangeInclusive<usize>) -> BoxedStrategy<ChainConfig> {
    sites
        .prop_flat_map(|n| {
            (Just(n), arb_coupling(n), arb_field(n))
                .prop_map(|(n, coupling, field)| ChainConfig::new(n, coupling, field))
        })
        .boxed()
}

fn arb_bath() -> BoxedStrategy<BoundarySpec> {
    prop_oneof![
        (-1.0f64..=1.0, -1.0f64..=1.0, 0.2f64..2.0)
            .prop_map(|(fl, fr, g)| BoundarySpec::z_target_pair(fl, fr, g)),
        (-1.0f64..=1.0, 0.2f64..2.0).prop_map(|(k, g)| BoundarySpec::twisted_xy(k, g)),
    ]
    .boxed()
}

fn random_hermitian(dim: usize, rng: &mut StdRng) -> OperatorMatrix {
    let raw = OperatorMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&raw + raw.adjoint()) * Complex64::from(0.5)
}

fn max_abs(m: &OperatorMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn steady_states_are_physical_for_any_valid_chain(
        chain in arb_chain(2..=4),
        bath in arb_bath(),
    ) {
        bath.validate().unwrap();
        let liouv = build_liouvillian(&chain, &bath).unwrap();
        let steady = solve_steady(&liouv, &SolveOptions::default()).unwrap();
        prop_assert!(steady.residual < 1e-9, "residual {}", steady.residual);
        prop_assert!(steady.trace_defect < 1e-12, "trace defect {}", steady.trace_defect);
        prop_assert!(
            steady.hermiticity_defect < 1e-10,
            "hermiticity defect {}",
            steady.hermiticity_defect
        );
        prop_assert!(
            steady.min_eigenvalue > -1e-9,
            "negative population {}",
            steady.min_eigenvalue
        );
    }

    #[test]
    fn dense_and_sparse_factorizations_agree(
        chain in arb_chain(2..=4),
        bath in arb_bath(),
    ) {
        let liouv = build_liouvillian(&chain, &bath).unwrap();
        let dense = solve_steady(&liouv, &SolveOptions::with_method(SolverMethod::DenseLu)).unwrap();
        let sparse =
            solve_steady(&liouv, &SolveOptions::with_method(SolverMethod::SparseLu)).unwrap();
        let diff = max_abs(&(&dense.rho - &sparse.rho));
        prop_assert!(diff < 1e-9, "solvers disagree by {diff}");
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(
        chain in arb_chain(2..=4),
        bath in arb_bath(),
        seed in any::<u64>(),
    ) {
        let liouv = build_liouvillian(&chain, &bath).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let rho = random_hermitian(liouv.chain_dim(), &mut rng);
        let shifted = devectorize(&liouv.apply(&vectorize(&rho)), liouv.chain_dim());
        let scale = max_abs(&shifted).max(1.0);
        let trace_rate = shifted.trace().norm();
        let herm = max_abs(&(&shifted - shifted.adjoint()));
        prop_assert!(trace_rate < 1e-12 * scale, "trace drifts at rate {trace_rate}");
        prop_assert!(herm < 1e-12 * scale, "generator broke hermiticity by {herm}");
    }

    #[test]
    fn bond_energies_assemble_the_hamiltonian(chain in arb_chain(3..=4)) {
        let h = build_hamiltonian(&chain).unwrap();
        let scale = max_abs(&h).max(1.0);

        let herm = max_abs(&(&h - h.adjoint()));
        let imag = h.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        prop_assert!(herm < 1e-14 * scale, "hamiltonian not hermitian: {herm}");
        prop_assert!(imag < 1e-14 * scale, "hamiltonian not real: {imag}");

        let terms = local_energy_terms(&chain).unwrap();
        let mut sum = OperatorMatrix::zeros(h.nrows(), h.ncols());
        for term in &terms {
            let split = max_abs(&(&term.total - (&term.exchange + &term.field)));
            prop_assert!(split < 1e-15 * scale, "bond {} split defect {split}", term.bond);
            sum += &term.total;
        }
        let defect = max_abs(&(&sum - &h));
        prop_assert!(defect < 1e-13 * scale, "bond sum misses H by {defect}");
    }

    #[test]
    fn reversing_the_drive_swaps_the_pair_roles(
        chain in arb_chain(3..=4),
        bath in arb_bath(),
    ) {
        let opts = SolveOptions::default();
        let pair = run_pair(&chain, &bath, &opts).unwrap();
        let swapped = run_pair(&chain, &bath.inverted(), &opts).unwrap();
        prop_assert_eq!(pair.spin_forward, swapped.spin_reverse);
        prop_assert_eq!(pair.spin_reverse, swapped.spin_forward);
        prop_assert_eq!(pair.energy_forward, swapped.energy_reverse);
        prop_assert_eq!(pair.energy_reverse, swapped.energy_forward);
        prop_assert_eq!(pair.spin_rectification, swapped.spin_rectification);
        prop_assert_eq!(pair.energy_rectification, swapped.energy_rectification);
    }

    #[test]
    fn current_reports_are_homogeneous_and_split_cleanly(
        chain in arb_chain(3..=4),
        f in 0.05f64..1.0,
        gamma in 0.2f64..2.0,
    ) {
        let bath = BoundarySpec::z_target(f, gamma);
        let record = run_record(&chain, &bath, &SolveOptions::default()).unwrap();
        let currents = &record.currents;
        prop_assert!(currents.spin_spread < 1e-9, "spin spread {}", currents.spin_spread);
        prop_assert!(currents.energy_spread < 1e-9, "energy spread {}", currents.energy_spread);
        for i in 0..currents.energy_current.len() {
            let split = currents.energy_exchange_part[i] + currents.energy_field_part[i];
            prop_assert!(
                (currents.energy_current[i] - split).abs() < 1e-12,
                "site {i} energy current {} splits into {split}",
                currents.energy_current[i]
            );
        }
    }
}
