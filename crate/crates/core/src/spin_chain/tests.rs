use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::spin_algebra::{kron, local_spin_operators, rotation};

fn ls(spin: Spin, n: usize, solver: ChainSolver) -> SpinChainResult {
    let spec = SpinChainSpec::new(spin, n, Boundary::Periodic, CouplingKind::LaiSutherland)
        .with_solver(solver);
    ground_energy_per_site(&spec).unwrap()
}

fn matrix_chain(m: &DMatrix<f64>, n: usize, bc: Boundary) -> f64 {
    let spin = Spin::from_pair_dim(m.nrows()).unwrap();
    let spec = SpinChainSpec::new(spin, n, bc, CouplingKind::from_matrix(m))
        .with_solver(ChainSolver::Dense);
    ground_energy_per_site(&spec).unwrap().epsilon
}

#[test]
fn two_site_ring_is_zero() {
    assert_abs_diff_eq!(ls(Spin::HALF, 2, ChainSolver::Dense).epsilon, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(ls(Spin::HALF, 2, ChainSolver::lanczos(0)).epsilon, 0.0, epsilon = 1e-12);
}

#[test]
fn small_ring_oracles() {
    // Heisenberg ring of 4: E₀(Σ S·S) = −2, and P_S = 3/4 + S·S
    let h = ls(Spin::HALF, 4, ChainSolver::Dense);
    assert_abs_diff_eq!(h.epsilon, 0.25, epsilon = 1e-12);
    assert_abs_diff_eq!(h.epsilon, (3.0 - 2.0) / 4.0, epsilon = 1e-12);
    // triangle: total spin 1/2 gives Σ S·S = (3/4 − 9/4)/2 = −3/4
    let t = ls(Spin::HALF, 3, ChainSolver::Dense);
    assert_abs_diff_eq!(t.epsilon, (9.0 / 4.0 - 3.0 / 4.0) / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(t.epsilon, 0.5, epsilon = 1e-12);
}

#[test]
fn heisenberg_ring_from_independent_build() {
    // Σ (3/4 + S_i·S_{i+1}) built with Kronecker products
    let n = 6;
    let dim = 1 << n;
    let mut h = DMatrix::<f64>::identity(dim, dim) * (0.75 * n as f64);
    for i in 0..n {
        let j = (i + 1) % n;
        let (sz, sp, sm) = local_spin_operators(Spin::HALF);
        let ops = [(&sz, &sz, 1.0), (&sp, &sm, 0.5), (&sm, &sp, 0.5)];
        for (a, b, w) in ops {
            let mut term = DMatrix::<f64>::identity(1, 1);
            for k in 0..n {
                let f = if k == i {
                    a.clone()
                } else if k == j {
                    b.clone()
                } else {
                    DMatrix::identity(2, 2)
                };
                term = kron(&term, &f);
            }
            h += term * w;
        }
    }
    let e0 = h.symmetric_eigenvalues().min() / n as f64;
    assert_abs_diff_eq!(ls(Spin::HALF, n, ChainSolver::Dense).epsilon, e0, epsilon = 1e-12);
}

#[test]
fn lanczos_matches_dense() {
    for (spin, ns) in [(Spin::HALF, vec![4, 6, 8, 10]), (Spin::ONE, vec![3, 4, 5, 6])] {
        for n in ns {
            let d = ls(spin, n, ChainSolver::Dense);
            let l = ls(spin, n, ChainSolver::lanczos(3));
            assert!((d.epsilon - l.epsilon).abs() <= 1e-9, "{n}: {d:?} {l:?}");
            assert!(l.residual <= 1e-10);
            assert!(d.residual <= 1e-10);
        }
    }
}

#[test]
fn deterministic_for_fixed_seed() {
    let a = ls(Spin::HALF, 10, ChainSolver::lanczos(42));
    let b = ls(Spin::HALF, 10, ChainSolver::lanczos(42));
    assert_eq!(a.epsilon.to_bits(), b.epsilon.to_bits());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn translation_commutes_with_ring() {
    let p = PairProjectors::new(Spin::ONE);
    let op = ChainOperator::new(p.symmetric(), 3, 5, Boundary::Periodic).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x: Vec<f64> = (0..op.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut hx = vec![0.0; op.dim()];
    op.apply(&x, &mut hx);
    let tx = op.translate(&x);
    let mut htx = vec![0.0; op.dim()];
    op.apply(&tx, &mut htx);
    let thx = op.translate(&hx);
    for (a, b) in htx.iter().zip(&thx) {
        assert!((a - b).abs() < 1e-12);
    }
    // the ground energy is unchanged by relabelling the sites
    let spec = SpinChainSpec::new(Spin::ONE, 5, Boundary::Periodic, CouplingKind::LaiSutherland);
    let res = ground_energy_per_site(&SpinChainSpec {
        keep_vector: true,
        ..spec
    })
    .unwrap();
    let psi = res.ground_vector.unwrap();
    let tpsi = op.translate(&psi);
    let mut h = vec![0.0; op.dim()];
    op.apply(&tpsi, &mut h);
    let e: f64 = h.iter().zip(&tpsi).map(|(a, b)| a * b).sum();
    assert_abs_diff_eq!(e, res.epsilon, epsilon = 1e-10);
}

#[test]
fn global_rotation_leaves_energy() {
    for spin in [Spin::HALF, Spin::ONE] {
        let p = PairProjectors::new(spin);
        let u = rotation(spin, 0.83);
        let uu = kron(&u, &u);
        let rotated = &uu * p.symmetric() * uu.transpose();
        let n = if spin == Spin::HALF { 8 } else { 5 };
        let a = matrix_chain(p.symmetric(), n, Boundary::Periodic);
        let b = matrix_chain(&rotated, n, Boundary::Periodic);
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }
}

#[test]
fn open_and_periodic_close() {
    for n in [4, 6, 8, 10] {
        let spec = SpinChainSpec::new(Spin::HALF, n, Boundary::Open, CouplingKind::LaiSutherland);
        let open = ground_energy_per_site(&spec).unwrap().epsilon;
        let periodic = ls(Spin::HALF, n, ChainSolver::default()).epsilon;
        assert!((open - periodic).abs() <= 2.0 / n as f64);
    }
}

#[test]
fn digamma_formula_values() {
    let half = thermodynamic_energy_per_site(Spin::HALF);
    assert_abs_diff_eq!(half, 1.0 - std::f64::consts::LN_2, epsilon = 1e-14);
    let one = thermodynamic_energy_per_site(Spin::ONE);
    let closed = 1.0
        - (1.5 * 3f64.ln() + std::f64::consts::PI / (2.0 * 3f64.sqrt())) / 3.0;
    assert_abs_diff_eq!(one, closed, epsilon = 1e-13);
    assert_abs_diff_eq!(one, 0.148394, epsilon = 5e-7);
    let mut prev = one;
    for twice in [5, 7, 9] {
        let e = thermodynamic_energy_per_site(Spin::from_twice(twice).unwrap());
        assert!(e < prev && e > 0.0);
        prev = e;
    }
}

#[test]
fn sandwich_spin_half_and_one() {
    let r = finite_size_sandwich(Spin::HALF, &[2, 4, 6, 8, 10, 12], &ChainSolver::default()).unwrap();
    assert!(r.all_pass(), "{r:?}");
    let r = finite_size_sandwich(Spin::ONE, &[4, 6], &ChainSolver::default()).unwrap();
    assert!(r.all_pass(), "{r:?}");
}

#[test]
fn llh_chain_values() {
    let solver = ChainSolver::default();
    for n in [2, 5, 8] {
        assert_abs_diff_eq!(llh_chain_energy(1.0, 1.0, n, &solver).unwrap(), -2.0, epsilon = 1e-10);
    }
    let e = llh_chain_energy(4.0, 1.0, 12, &solver).unwrap();
    let ln2 = std::f64::consts::LN_2;
    let closed = -2.0 * (ln2 + (1.0 - ln2) / 4.0);
    assert_abs_diff_eq!(closed, llh_thermodynamic_energy(4.0, 1.0), epsilon = 1e-15);
    assert!((e - closed).abs() <= 2.0 / 12.0);
    // the affine image of the Lai–Sutherland ring
    let ls12 = ls(Spin::HALF, 12, solver.clone()).epsilon;
    assert_abs_diff_eq!(e, -2.0 + (2.0 - 0.5) * ls12, epsilon = 1e-9);
}

#[test]
fn llh_large_c_prime() {
    // slope 2/c′ − 2/c < 0: the ground state is a symmetric state of h_LS = 1
    let c = 2.0;
    for cp in [10.0, 100.0, 1e4] {
        let e = llh_chain_energy(c, cp, 8, &ChainSolver::default()).unwrap();
        assert_abs_diff_eq!(e, -2.0 / c, epsilon = 1e-9);
        assert_abs_diff_eq!(llh_thermodynamic_energy(c, cp), -2.0 / c, epsilon = 1e-15);
    }
}

#[test]
fn memory_guard_and_errors() {
    let mut spec = SpinChainSpec::new(Spin::HALF, 20, Boundary::Periodic, CouplingKind::LaiSutherland);
    assert!(matches!(
        ground_energy_per_site(&spec),
        Err(Error::DimensionTooLarge { .. })
    ));
    spec.sites = 13;
    spec.solver = ChainSolver::Dense;
    assert!(matches!(
        ground_energy_per_site(&spec),
        Err(Error::DimensionTooLarge { .. })
    ));
    spec.sites = 1;
    assert!(ground_energy_per_site(&spec).is_err());
}

#[test]
fn spec_json() {
    let text = r#"{"schema":"dilute1d/1","J":0.5,"N":6,"coupling":{"type":"lai_sutherland"},
        "solver":{"type":"lanczos","seed":3}}"#;
    let spec = SpinChainSpec::from_json(text).unwrap();
    assert_eq!(spec.bc, Boundary::Periodic);
    assert_eq!(spec.solver, ChainSolver::lanczos(3));
    assert!(SpinChainSpec::from_json(r#"{"J":0.5,"N":6,"coupling":{"type":"lai_sutherland"},"x":1}"#).is_err());
    assert!(SpinChainSpec::from_json(r#"{"schema":"other","J":0.5,"N":6,"coupling":{"type":"lai_sutherland"}}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn affine_coupling_law(alpha in 0.1f64..3.0, beta in -2.0f64..2.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
        let m = &r + r.transpose();
        let shifted = &m * alpha + DMatrix::identity(4, 4) * beta;
        let a = matrix_chain(&m, 6, Boundary::Periodic);
        let b = matrix_chain(&shifted, 6, Boundary::Periodic);
        prop_assert!((b - (alpha * a + beta)).abs() < 1e-10);
    }

    #[test]
    fn lai_sutherland_spectrum_in_unit_interval(n in 2usize..9) {
        let e = ls(Spin::HALF, n, ChainSolver::Dense).epsilon;
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&e));
    }
}
