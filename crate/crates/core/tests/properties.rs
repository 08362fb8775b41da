use std::f64::consts::{PI, TAU};

use bcst::bell::PauliKind;
use bcst::channel::{
    build_channel_state, control_report, enumerate_all, ChannelSpec, CharlieBasis, QubitLayout,
    Sign,
};
use bcst::probabilistic::{run_pbcst, GenBellParams, ProbChannelSpec};
use bcst::protocol::{run_bcst, UnknownQubit};
use bcst::qcore::{
    apply_1q, apply_2q, measure_bell_pair_branches, measure_qubit, measure_qubit_branches,
    permute_qubits, reduced_density, BasisOutcome, Matrix, Matrix2, SingleQubitBasis, StateVector,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| {
            v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|v| {
            StateVector::normalized(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
                .unwrap()
        })
}

/// Arbitrary SU(2) element.
fn su2() -> impl Strategy<Value = Matrix2> {
    (0.0f64..TAU, 0.0f64..TAU, 0.0f64..TAU).prop_map(|(t, a, b)| {
        let (c, s) = (t.cos(), t.sin());
        let ea = Complex64::from_polar(1.0, a);
        let eb = Complex64::from_polar(1.0, b);
        Matrix([[ea * c, -eb * s], [eb.conj() * s, ea.conj() * c]])
    })
}

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn valid_spec() -> impl Strategy<Value = ChannelSpec> {
    let all = enumerate_all(CharlieBasis::PlusMinus, Sign::Plus);
    (0usize..256, 0.0f64..PI, 0.0f64..TAU, any::<bool>()).prop_filter_map(
        "condition",
        move |(i, theta, phi, minus)| {
            let s = ChannelSpec::new(
                all[i].psi,
                CharlieBasis::Angles { theta, phi },
                if minus { Sign::Minus } else { Sign::Plus },
            );
            s.satisfies_condition().then_some(s)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_qubit_gates_preserve_norm(s in state(4), u in su2(), q in 0usize..4) {
        prop_assert!(u.unitarity_residual() < 1e-12);
        let out = apply_1q(&s, q, &u).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn two_qubit_gates_preserve_norm(s in state(4), u in su2(), v in su2(), p in perm(4)) {
        let w = u.kron(&v);
        let out = apply_2q(&s, p[0], p[1], &w).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < TOL);
        // U then U† is the identity
        let back = apply_2q(&out, p[0], p[1], &w.adjoint()).unwrap();
        prop_assert!((back.inner(&s).unwrap().norm() - 1.0).abs() < TOL);
    }

    #[test]
    fn single_qubit_branches_are_complete(
        s in state(3),
        q in 0usize..3,
        theta in 0.0f64..PI,
        phi in 0.0f64..TAU,
    ) {
        let basis = SingleQubitBasis::from_angles(theta, phi).unwrap();
        let branches = measure_qubit_branches(&s, q, &basis).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < TOL);
        for b in &branches {
            prop_assert!((b.state.norm_sqr() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn sampled_measurement_follows_cumulative_rule(s in state(2), sample in 0.0f64..1.0) {
        let basis = SingleQubitBasis::computational();
        let p_a: f64 = measure_qubit_branches(&s, 0, &basis)
            .unwrap()
            .iter()
            .filter(|b| b.outcome == BasisOutcome::A)
            .map(|b| b.probability)
            .sum();
        prop_assume!((sample - p_a).abs() > 1e-9);
        let got = measure_qubit(&s, 0, &basis, sample).unwrap().outcome;
        prop_assert_eq!(got == BasisOutcome::A, sample < p_a);
    }

    #[test]
    fn bell_branches_are_complete(s in state(4), p in perm(4)) {
        let branches = measure_bell_pair_branches(&s, p[0], p[1]).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < TOL);
    }

    #[test]
    fn permutation_round_trips(s in state(5), p in perm(5)) {
        let mut inverse = vec![0; 5];
        for (i, &j) in p.iter().enumerate() {
            inverse[j] = i;
        }
        let moved = permute_qubits(&s, &p).unwrap();
        prop_assert!((moved.norm_sqr() - 1.0).abs() < TOL);
        let back = permute_qubits(&moved, &inverse).unwrap();
        prop_assert!((back.inner(&s).unwrap() - 1.0).norm() < TOL);
    }

    #[test]
    fn reduced_states_are_valid(s in state(4), p in perm(4), k in 1usize..4) {
        let rho = reduced_density(&s, &p[..k]).unwrap();
        prop_assert!((rho.trace() - 1.0).norm() < TOL);
        prop_assert!(rho.hermiticity_residual() < TOL);
        let purity = rho.purity();
        prop_assert!(purity <= 1.0 + TOL && purity >= 1.0 / (1 << k) as f64 - TOL);
        prop_assert!(rho.validate().is_ok());
    }

    #[test]
    fn paulis_are_unitary(i in 0usize..4) {
        prop_assert!(PauliKind::ALL[i].matrix().unitarity_residual() < 1e-12);
    }

    #[test]
    fn valid_channels_are_controlled_in_any_basis(spec in valid_spec()) {
        let r = control_report(&build_channel_state(&spec), &QubitLayout::CANONICAL).unwrap();
        prop_assert!(r.dir_ab_controlled && r.dir_ba_controlled);
    }

    #[test]
    fn spec_text_round_trips(spec in valid_spec()) {
        let parsed: ChannelSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(parsed, spec);
    }

    #[test]
    fn disclosed_teleportation_is_perfect(spec in valid_spec(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = UnknownQubit::haar(&mut rng);
        let b = UnknownQubit::haar(&mut rng);
        let r = run_bcst(&spec, &a, &b, true, &mut rng).unwrap();
        prop_assert!(r.fidelity_a_to_b > 1.0 - TOL);
        prop_assert!(r.fidelity_b_to_a > 1.0 - TOL);
        prop_assert!(r.transcript.check_causality().is_ok());
    }

    #[test]
    fn heralded_success_is_perfect(
        spec in valid_spec(),
        a1 in 0.55f64..0.95,
        a2 in 0.55f64..0.95,
        seed in any::<u64>(),
    ) {
        let ps = ProbChannelSpec::from_channel(
            &spec,
            GenBellParams::from_a_sqr(a1).unwrap(),
            GenBellParams::from_a_sqr(a2).unwrap(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = UnknownQubit::haar(&mut rng);
        let b = UnknownQubit::haar(&mut rng);
        let r = run_pbcst(&ps, &a, &b, &mut rng).unwrap();
        for (d, input) in [(r.directions.a_to_b, a), (r.directions.b_to_a, b)] {
            if d.success {
                prop_assert!(d.fidelity > 1.0 - TOL);
            } else {
                // failure leaves the receiver in |1⟩
                prop_assert!((d.fidelity - input.beta.norm_sqr()).abs() < TOL);
            }
        }
    }
}
