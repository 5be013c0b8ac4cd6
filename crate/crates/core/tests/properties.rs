use std::f64::consts::PI;

use proptest::prelude::*;
use seqclone::cloning::{gm_state, BlochQubit};
use seqclone::linalg::{frobenius_distance, numeric_rank, svd, ComplexMatrix, C64};
use seqclone::mps::{decompose, reconstruct, DECOMPOSE_TOL};
use seqclone::protocol::{clone, table1_isometries, BranchPolicy, Mode, ProtocolConfig};
use seqclone::qstate::{reduced_density, schmidt_rank, schmidt_values, PureState};
use seqclone::{cloning::alpha_coeffs, ComplexVector};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(complex(), r * c).prop_map(move |d| ComplexMatrix::from_vec(r, c, d).unwrap())
    })
}

fn state(n: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec(complex(), 1 << n)
        .prop_filter("non-zero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6)
        .prop_map(move |v| PureState::new(n, ComplexVector::new(v)).unwrap().normalized())
}

fn unitary2() -> impl Strategy<Value = ComplexMatrix> {
    (0.0..PI, 0.0..2.0 * PI, 0.0..2.0 * PI, 0.0..2.0 * PI).prop_map(|(a, b, c, d)| {
        let (s, co) = (a.sin(), a.cos());
        ComplexMatrix::from_rows(&[
            vec![C64::from_polar(co, b), C64::from_polar(s, c)],
            vec![-C64::from_polar(s, d - c + b), C64::from_polar(co, d)],
        ])
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_reconstructs_and_is_orthonormal(a in matrix(7)) {
        let r = svd(&a).unwrap();
        let k = r.s.len();
        prop_assert!(r.s.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(r.s.iter().all(|&x| x >= 0.0));
        let sigma = ComplexMatrix::diag(&r.s.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let back = r.u.matmul(&sigma).unwrap().matmul(&r.vdag).unwrap();
        prop_assert!(frobenius_distance(&back, &a).unwrap() < 1e-10 * a.frobenius_norm().max(1.0));
        let uu = r.u.adjoint().matmul(&r.u).unwrap();
        prop_assert!(frobenius_distance(&uu, &ComplexMatrix::identity(k)).unwrap() < 1e-10);
        let vv = r.vdag.matmul(&r.vdag.adjoint()).unwrap();
        prop_assert!(frobenius_distance(&vv, &ComplexMatrix::identity(k)).unwrap() < 1e-10);
    }

    #[test]
    fn svd_of_adjoint_has_same_spectrum(a in matrix(6)) {
        let s1 = svd(&a).unwrap().s;
        let s2 = svd(&a.adjoint()).unwrap().s;
        for (x, y) in s1.iter().zip(&s2) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn schmidt_rank_invariant_under_local_unitaries(s in state(4), cut in 1usize..4, u in unitary2()) {
        let before = schmidt_values(&s, cut).unwrap();
        let rotated = s.apply_uniform(&u).unwrap();
        let after = schmidt_values(&rotated, cut).unwrap();
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert_eq!(schmidt_rank(&s, cut, 1e-10).unwrap(), numeric_rank(&after, 1e-10));
        let sq: f64 = before.iter().map(|x| x * x).sum();
        prop_assert!((sq - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reduced_states_are_valid(s in state(4), keep in prop::sample::subsequence(vec![0usize, 1, 2, 3], 1..=3)) {
        let rho = reduced_density(&s, &keep).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.trace().im.abs() < 1e-12);
        prop_assert!(rho.hermiticity_defect() < 1e-12);
        let p = rho.purity();
        prop_assert!(p <= 1.0 + 1e-12 && p >= 1.0 / rho.dim() as f64 - 1e-12);
    }

    #[test]
    fn mps_roundtrip(s in state(6)) {
        let form = decompose(&s, DECOMPOSE_TOL).unwrap();
        let (back, dev) = reconstruct(&form).unwrap();
        prop_assert!(dev < 1e-10);
        let ov: C64 = s.amplitudes().iter().zip(back.amplitudes().iter()).map(|(a, b)| a.conj() * b).sum();
        prop_assert!(ov.norm() > 1.0 - 1e-10);
        for l in &form.lambdas {
            prop_assert!((l.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn universal_protocol_invariants(m in 1usize..=4, theta in 0.0..PI, phi in 0.0..2.0 * PI, seed in any::<u64>()) {
        let q = BlochQubit::new(theta, phi).unwrap();
        let report = clone(&ProtocolConfig::new(Mode::Universal, m).with_seed(seed), &q).unwrap();
        prop_assert!(report.all_passed(), "{:?}", report.checks);
        prop_assert!((report.branch_probabilities[0] + report.branch_probabilities[1] - 1.0).abs() < 1e-10);
        for f in &report.per_clone_fidelity {
            prop_assert!(*f >= 0.0 && *f <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn phase_covariant_protocol_invariants(k in 0usize..=2, phi in 0.0..2.0 * PI, branch in 0u8..2) {
        let q = BlochQubit::equatorial(phi).unwrap();
        let policy = if branch == 0 { BranchPolicy::Forced0 } else { BranchPolicy::Forced1 };
        let cfg = ProtocolConfig::new(Mode::PhaseCovariant, 2 * k + 1).with_policy(policy);
        let report = clone(&cfg, &q).unwrap();
        prop_assert!(report.all_passed(), "{:?}", report.checks);
        prop_assert_eq!(report.branch_taken, branch);
        prop_assert_eq!(report.d_total, 2 * k + 2);
    }

    #[test]
    fn cloning_state_is_normalized_and_rank_bounded(m in 1usize..=4, theta in 0.0..PI, phi in 0.0..2.0 * PI) {
        let s = gm_state(&BlochQubit::new(theta, phi).unwrap(), m).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        for cut in 1..s.n_qubits() {
            prop_assert!(schmidt_rank(&s, cut, 1e-10).unwrap() <= m);
        }
    }
}

#[test]
fn table_steps_are_isometries_up_to_cap() {
    for m in 1..=seqclone::MAX_CLONES {
        for s in table1_isometries(&alpha_coeffs(m).unwrap()).unwrap() {
            assert!(s.defect() < 1e-10, "m = {m}");
        }
    }
}
