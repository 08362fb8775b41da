//! The perfect bidirectional controlled teleportation protocol.
//!
//! Seven qubits are simulated: the five channel qubits in canonical order
//! followed by Alice's unknown qubit `inA` and Bob's `inB`. Charlie measures
//! `C1`, Alice Bell-measures `(inA, A1)` and Bob Bell-measures `(inB, B2)`.
//! Bob then corrects `B1` and Alice corrects `A2`.

use rand::Rng;
use serde::Serialize;

use crate::bell::{perfect_corrections, BellKind, PauliKind, Smo};
use crate::channel::{branch_products, check_condition, ChannelSpec, Factorization, Party};
use crate::qcore::{real, Amplitude, BasisOutcome, StateVector, TOL};
use crate::register::Register;
use crate::{Error, Result};

/// `α|0⟩ + β|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnknownQubit {
    pub alpha: Amplitude,
    pub beta: Amplitude,
}

impl UnknownQubit {
    pub fn new(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(UnknownQubit { alpha, beta })
    }

    /// Real amplitudes; panics if not normalized.
    pub fn real(alpha: f64, beta: f64) -> Self {
        Self::new(real(alpha), real(beta)).expect("normalized real amplitudes")
    }

    /// Haar-random pure state (global phase fixed so that `α ≥ 0`).
    pub fn haar(rng: &mut impl Rng) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let alpha = real(((1.0 + z) / 2.0).sqrt());
        let beta = Amplitude::from_polar(((1.0 - z) / 2.0).sqrt(), phi);
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        UnknownQubit {
            alpha: alpha / n,
            beta: beta / n,
        }
    }

    pub fn state(&self) -> StateVector {
        StateVector::from_parts_unchecked(1, vec![self.alpha, self.beta])
    }

    /// `|0⟩`, `|1⟩` and `0.6|0⟩ + 0.8|1⟩`.
    pub fn fixed_inputs() -> [UnknownQubit; 3] {
        [
            UnknownQubit::real(1.0, 0.0),
            UnknownQubit::real(0.0, 1.0),
            UnknownQubit::real(0.6, 0.8),
        ]
    }

    /// The six Pauli eigenstates. Averaging a quadratic quantity over them
    /// equals its Haar average.
    pub fn octahedron() -> [UnknownQubit; 6] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        [
            UnknownQubit::real(1.0, 0.0),
            UnknownQubit::real(0.0, 1.0),
            UnknownQubit::real(h, h),
            UnknownQubit::real(h, -h),
            UnknownQubit::new(real(h), Amplitude::new(0.0, h)).expect("normalized"),
            UnknownQubit::new(real(h), Amplitude::new(0.0, -h)).expect("normalized"),
        ]
    }
}

/// A value for each teleportation direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PerDirection<T> {
    pub a_to_b: T,
    pub b_to_a: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Measure {
        qubits: Vec<&'static str>,
        basis: String,
        outcome: String,
    },
    SendClassical {
        to: Vec<Party>,
        bits: String,
    },
    ApplyUnitary {
        qubits: Vec<&'static str>,
        name: String,
    },
    /// `based_on` lists the indices of the messages that selected the Pauli.
    ApplyCorrection {
        qubit: &'static str,
        pauli: PauliKind,
        based_on: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Event {
    pub index: usize,
    pub party: Party,
    pub action: Action,
}

/// Ordered log of one protocol run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Transcript {
    pub events: Vec<Event>,
}

impl Transcript {
    pub fn push(&mut self, party: Party, action: Action) -> usize {
        let index = self.events.len();
        self.events.push(Event {
            index,
            party,
            action,
        });
        index
    }

    pub fn charlie_disclosed(&self) -> bool {
        self.events
            .iter()
            .any(|e| e.party == Party::Charlie && matches!(e.action, Action::SendClassical { .. }))
    }

    /// Every correction depends only on earlier classical messages addressed
    /// to the correcting party, and a Charlie disclosure (if any) precedes all
    /// corrections.
    pub fn check_causality(&self) -> std::result::Result<(), String> {
        let disclosure = self.events.iter().position(|e| {
            e.party == Party::Charlie && matches!(e.action, Action::SendClassical { .. })
        });
        for e in &self.events {
            let Action::ApplyCorrection { based_on, .. } = &e.action else {
                continue;
            };
            if let Some(d) = disclosure {
                if d > e.index {
                    return Err(format!(
                        "correction {} precedes Charlie's disclosure",
                        e.index
                    ));
                }
            }
            for &m in based_on {
                let ok = m < e.index
                    && matches!(
                        &self.events[m].action,
                        Action::SendClassical { to, .. } if to.contains(&e.party)
                    );
                if !ok {
                    return Err(format!(
                        "correction {} depends on event {m}, which is not an earlier message to {:?}",
                        e.index, e.party
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BcstResult {
    pub charlie_outcome: BasisOutcome,
    pub smo_a: Smo,
    pub smo_b: Smo,
    pub fidelity_a_to_b: f64,
    pub fidelity_b_to_a: f64,
    pub transcript: Transcript,
}

/// One leaf of the full branch tree.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BranchOutcome {
    pub charlie_outcome: BasisOutcome,
    pub smo_a: Smo,
    pub smo_b: Smo,
    pub probability: f64,
    pub fidelity_a_to_b: f64,
    pub fidelity_b_to_a: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustiveSummary {
    pub branches: Vec<BranchOutcome>,
    pub total_probability: f64,
    pub min_fidelity: PerDirection<f64>,
    pub max_fidelity: PerDirection<f64>,
}

impl ExhaustiveSummary {
    pub fn from_branches(branches: Vec<BranchOutcome>) -> Self {
        let fold = |f: fn(&BranchOutcome) -> f64, pick: fn(f64, f64) -> f64, init: f64| {
            branches.iter().map(f).fold(init, pick)
        };
        ExhaustiveSummary {
            total_probability: branches.iter().map(|b| b.probability).sum(),
            min_fidelity: PerDirection {
                a_to_b: fold(|b| b.fidelity_a_to_b, f64::min, f64::INFINITY),
                b_to_a: fold(|b| b.fidelity_b_to_a, f64::min, f64::INFINITY),
            },
            max_fidelity: PerDirection {
                a_to_b: fold(|b| b.fidelity_a_to_b, f64::max, f64::NEG_INFINITY),
                b_to_a: fold(|b| b.fidelity_b_to_a, f64::max, f64::NEG_INFINITY),
            },
            branches,
        }
    }

    /// Probability-weighted mean of `1 − fidelity`.
    pub fn mean_infidelity(&self) -> PerDirection<f64> {
        let mean = |f: fn(&BranchOutcome) -> f64| {
            self.branches
                .iter()
                .map(|b| b.probability * (1.0 - f(b)))
                .sum()
        };
        PerDirection {
            a_to_b: mean(|b| b.fidelity_a_to_b),
            b_to_a: mean(|b| b.fidelity_b_to_a),
        }
    }
}

fn initial_register(
    spec: &ChannelSpec,
    input_a: &UnknownQubit,
    input_b: &UnknownQubit,
) -> Result<Register> {
    let channel = crate::channel::build_channel_state(spec);
    let state = crate::qcore::tensor(&[channel, input_a.state(), input_b.state()])?;
    Ok(Register::new(
        vec!["A1", "B1", "A2", "B2", "C1", "inA", "inB"],
        state,
    ))
}

/// Bell pairs the receivers assume: the real ones after disclosure, the
/// outcome-`a` pairs otherwise.
fn assumed_pairs(f: &Factorization, outcome: BasisOutcome, disclose: bool) -> (BellKind, BellKind) {
    if disclose {
        f.for_outcome(outcome)
    } else {
        f.on_a
    }
}

fn corrections(
    f: &Factorization,
    outcome: BasisOutcome,
    disclose: bool,
    smo_a: Smo,
    smo_b: Smo,
) -> Result<(PauliKind, PauliKind)> {
    let table = perfect_corrections()?;
    let (pair_ab, pair_ba) = assumed_pairs(f, outcome, disclose);
    Ok((table.get(pair_ab, smo_a), table.get(pair_ba, smo_b)))
}

fn finish(
    reg: &Register,
    pauli_b1: PauliKind,
    pauli_a2: PauliKind,
    input_a: &UnknownQubit,
    input_b: &UnknownQubit,
) -> Result<(f64, f64)> {
    let reg = reg
        .apply_1q("B1", &pauli_b1.matrix())?
        .apply_1q("A2", &pauli_a2.matrix())?;
    Ok((
        reg.fidelity("B1", &input_a.state())?,
        reg.fidelity("A2", &input_b.state())?,
    ))
}

/// One sampled run. Consumes exactly three unit-interval samples from `rng`,
/// for Charlie, Alice and Bob in that order.
pub fn run_bcst(
    spec: &ChannelSpec,
    input_a: &UnknownQubit,
    input_b: &UnknownQubit,
    disclose: bool,
    rng: &mut impl Rng,
) -> Result<BcstResult> {
    if !check_condition(spec) {
        return Err(Error::ConditionViolated);
    }
    run_unchecked(spec, input_a, input_b, disclose, rng)
}

fn run_unchecked(
    spec: &ChannelSpec,
    input_a: &UnknownQubit,
    input_b: &UnknownQubit,
    disclose: bool,
    rng: &mut impl Rng,
) -> Result<BcstResult> {
    let factorization = branch_products(spec)?;
    let basis = spec.charlie_basis.basis();
    let mut t = Transcript::default();
    let reg = initial_register(spec, input_a, input_b)?;

    let (outcome, _, reg) = reg.measure("C1", &basis, rng.random())?;
    t.push(
        Party::Charlie,
        Action::Measure {
            qubits: vec!["C1"],
            basis: spec.charlie_basis.to_string(),
            outcome: format!("{outcome:?}").to_lowercase(),
        },
    );
    let mut disclosure = Vec::new();
    if disclose {
        disclosure.push(t.push(
            Party::Charlie,
            Action::SendClassical {
                to: vec![Party::Alice, Party::Bob],
                bits: (outcome as u8).to_string(),
            },
        ));
    }

    let (kind_a, _, reg) = reg.measure_bell("inA", "A1", rng.random())?;
    let smo_a = Smo::from_bell(kind_a);
    t.push(
        Party::Alice,
        Action::Measure {
            qubits: vec!["inA", "A1"],
            basis: "bell".into(),
            outcome: kind_a.to_string(),
        },
    );
    let msg_a = t.push(
        Party::Alice,
        Action::SendClassical {
            to: vec![Party::Bob],
            bits: smo_a.to_string(),
        },
    );

    let (kind_b, _, reg) = reg.measure_bell("inB", "B2", rng.random())?;
    let smo_b = Smo::from_bell(kind_b);
    t.push(
        Party::Bob,
        Action::Measure {
            qubits: vec!["inB", "B2"],
            basis: "bell".into(),
            outcome: kind_b.to_string(),
        },
    );
    let msg_b = t.push(
        Party::Bob,
        Action::SendClassical {
            to: vec![Party::Alice],
            bits: smo_b.to_string(),
        },
    );

    let (p_b1, p_a2) = corrections(&factorization, outcome, disclose, smo_a, smo_b)?;
    t.push(
        Party::Bob,
        Action::ApplyCorrection {
            qubit: "B1",
            pauli: p_b1,
            based_on: [disclosure.as_slice(), &[msg_a]].concat(),
        },
    );
    t.push(
        Party::Alice,
        Action::ApplyCorrection {
            qubit: "A2",
            pauli: p_a2,
            based_on: [disclosure.as_slice(), &[msg_b]].concat(),
        },
    );
    let (fidelity_a_to_b, fidelity_b_to_a) = finish(&reg, p_b1, p_a2, input_a, input_b)?;
    Ok(BcstResult {
        charlie_outcome: outcome,
        smo_a,
        smo_b,
        fidelity_a_to_b,
        fidelity_b_to_a,
        transcript: t,
    })
}

/// Every `(Charlie, Alice, Bob)` outcome branch with its exact probability.
///
/// Accepts condition-violating specs so that uncontrolled directions can be
/// analyzed; [`run_bcst_exhaustive`] is the checked entry point.
pub fn enumerate_branches(
    spec: &ChannelSpec,
    input_a: &UnknownQubit,
    input_b: &UnknownQubit,
    disclose: bool,
) -> Result<Vec<BranchOutcome>> {
    let factorization = branch_products(spec)?;
    let basis = spec.charlie_basis.basis();
    let reg = initial_register(spec, input_a, input_b)?;
    let mut out = Vec::with_capacity(32);
    for (outcome, p_c, reg) in reg.measure_all("C1", &basis)? {
        for (kind_a, p_a, reg) in reg.measure_bell_all("inA", "A1")? {
            for (kind_b, p_b, reg) in reg.measure_bell_all("inB", "B2")? {
                let (smo_a, smo_b) = (Smo::from_bell(kind_a), Smo::from_bell(kind_b));
                let (p_b1, p_a2) = corrections(&factorization, outcome, disclose, smo_a, smo_b)?;
                let (f_ab, f_ba) = finish(&reg, p_b1, p_a2, input_a, input_b)?;
                out.push(BranchOutcome {
                    charlie_outcome: outcome,
                    smo_a,
                    smo_b,
                    probability: p_c * p_a * p_b,
                    fidelity_a_to_b: f_ab,
                    fidelity_b_to_a: f_ba,
                });
            }
        }
    }
    Ok(out)
}

/// All 32 branches with disclosure.
pub fn run_bcst_exhaustive(
    spec: &ChannelSpec,
    input_a: &UnknownQubit,
    input_b: &UnknownQubit,
) -> Result<ExhaustiveSummary> {
    if !check_condition(spec) {
        return Err(Error::ConditionViolated);
    }
    enumerate_branches(spec, input_a, input_b, true).map(ExhaustiveSummary::from_branches)
}

/// All branches with Charlie's outcome withheld.
pub fn run_bcst_exhaustive_withheld(
    spec: &ChannelSpec,
    input_a: &UnknownQubit,
    input_b: &UnknownQubit,
) -> Result<ExhaustiveSummary> {
    enumerate_branches(spec, input_a, input_b, false).map(ExhaustiveSummary::from_branches)
}

/// Monte Carlo mean of `1 − fidelity` over Haar-random inputs with Charlie's
/// outcome withheld. Condition-violating specs are allowed.
pub fn average_infidelity_without_disclosure(
    spec: &ChannelSpec,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<PerDirection<f64>> {
    if trials == 0 {
        return Err(Error::EmptySample);
    }
    let mut sum = PerDirection::<f64>::default();
    for _ in 0..trials {
        let a = UnknownQubit::haar(rng);
        let b = UnknownQubit::haar(rng);
        let r = run_unchecked(spec, &a, &b, false, rng)?;
        sum.a_to_b += 1.0 - r.fidelity_a_to_b;
        sum.b_to_a += 1.0 - r.fidelity_b_to_a;
    }
    Ok(PerDirection {
        a_to_b: sum.a_to_b / trials as f64,
        b_to_a: sum.b_to_a / trials as f64,
    })
}

/// Exact Haar average of `1 − fidelity` without disclosure, by enumerating
/// every branch for each octahedron input.
pub fn exact_infidelity_without_disclosure(spec: &ChannelSpec) -> Result<PerDirection<f64>> {
    let inputs = UnknownQubit::octahedron();
    let mut sum = PerDirection::<f64>::default();
    for q in &inputs {
        let m = run_bcst_exhaustive_withheld(spec, q, q)?.mean_infidelity();
        sum.a_to_b += m.a_to_b;
        sum.b_to_a += m.b_to_a;
    }
    let n = inputs.len() as f64;
    Ok(PerDirection {
        a_to_b: sum.a_to_b / n,
        b_to_a: sum.b_to_a / n,
    })
}

/// A branch in which withholding Charlie's outcome spoils a teleportation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DisclosureWitness {
    pub input: UnknownQubit,
    pub branch: BranchOutcome,
    pub fidelity: f64,
    pub direction: &'static str,
}

/// Lowest withheld-disclosure fidelity over the fixed inputs and all
/// branches, or `None` if every branch is still perfect.
pub fn disclosure_witness(spec: &ChannelSpec) -> Result<Option<DisclosureWitness>> {
    let mut best: Option<DisclosureWitness> = None;
    for input in UnknownQubit::fixed_inputs() {
        for branch in enumerate_branches(spec, &input, &input, false)? {
            for (direction, fidelity) in [
                ("a_to_b", branch.fidelity_a_to_b),
                ("b_to_a", branch.fidelity_b_to_a),
            ] {
                if best.is_none_or(|w| fidelity < w.fidelity) {
                    best = Some(DisclosureWitness {
                        input,
                        branch,
                        fidelity,
                        direction,
                    });
                }
            }
        }
    }
    Ok(best.filter(|w| w.fidelity < 1.0 - 1e-6))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{enumerate_valid, li_state, zha_state, CharlieBasis, Sign};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zha_is_perfect_with_disclosure() {
        let spec = zha_state().spec;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = UnknownQubit::haar(&mut rng);
            let b = UnknownQubit::haar(&mut rng);
            let r = run_bcst(&spec, &a, &b, true, &mut rng).unwrap();
            assert!(r.fidelity_a_to_b > 1.0 - TOL);
            assert!(r.fidelity_b_to_a > 1.0 - TOL);
            r.transcript.check_causality().unwrap();
            assert!(r.transcript.charlie_disclosed());
        }
    }

    #[test]
    fn exhaustive_zha_branches_are_uniform() {
        let s = run_bcst_exhaustive(
            &zha_state().spec,
            &UnknownQubit::real(0.6, 0.8),
            &UnknownQubit::real(1.0, 0.0),
        )
        .unwrap();
        assert_eq!(s.branches.len(), 32);
        assert!((s.total_probability - 1.0).abs() < TOL);
        for b in &s.branches {
            assert!((b.probability - 1.0 / 32.0).abs() < TOL);
        }
        assert!(s.min_fidelity.a_to_b > 1.0 - TOL && s.min_fidelity.b_to_a > 1.0 - TOL);
    }

    #[test]
    fn withheld_z_mismatch_fidelity() {
        let q = UnknownQubit::real(0.6, 0.8);
        let s = run_bcst_exhaustive_withheld(&zha_state().spec, &q, &q).unwrap();
        assert!(s
            .branches
            .iter()
            .any(|b| (b.fidelity_a_to_b - 0.0784).abs() < 1e-10));
        let zero = UnknownQubit::real(1.0, 0.0);
        let s = run_bcst_exhaustive_withheld(&zha_state().spec, &zero, &zero).unwrap();
        // Zha's two branches differ only by Z on each pair, which fixes |0⟩
        assert!(s.min_fidelity.a_to_b > 1.0 - TOL);
    }

    #[test]
    fn withheld_transcript_has_no_disclosure() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = UnknownQubit::real(0.6, 0.8);
        let r = run_bcst(&zha_state().spec, &q, &q, false, &mut rng).unwrap();
        assert!(!r.transcript.charlie_disclosed());
        r.transcript.check_causality().unwrap();
    }

    #[test]
    fn causality_violation_is_detected() {
        let mut t = Transcript::default();
        t.push(
            Party::Bob,
            Action::ApplyCorrection {
                qubit: "B1",
                pauli: PauliKind::X,
                based_on: vec![1],
            },
        );
        t.push(
            Party::Alice,
            Action::SendClassical {
                to: vec![Party::Bob],
                bits: "01".into(),
            },
        );
        assert!(t.check_causality().is_err());
    }

    #[test]
    fn uncontrolled_direction_needs_no_disclosure() {
        let li = li_state().spec;
        assert_eq!(
            run_bcst(
                &li,
                &UnknownQubit::real(1.0, 0.0),
                &UnknownQubit::real(1.0, 0.0),
                true,
                &mut ChaCha8Rng::seed_from_u64(0)
            )
            .unwrap_err(),
            Error::ConditionViolated
        );
        let exact = exact_infidelity_without_disclosure(&li).unwrap();
        assert!(exact.b_to_a.abs() < 1e-12);
        assert!((exact.a_to_b - 1.0 / 3.0).abs() < 1e-12);
        let mc = average_infidelity_without_disclosure(&li, 200, &mut ChaCha8Rng::seed_from_u64(3))
            .unwrap();
        assert!(mc.b_to_a.abs() < 1e-12);
        assert!(mc.a_to_b > 0.1);
    }

    #[test]
    fn empty_sample_is_rejected() {
        let err = average_infidelity_without_disclosure(
            &zha_state().spec,
            0,
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        assert_eq!(err, Err(Error::EmptySample));
    }

    #[test]
    fn role_swap_symmetry() {
        let a = UnknownQubit::real(0.6, 0.8);
        let b = UnknownQubit::new(real(0.6), Amplitude::new(0.0, 0.8)).unwrap();
        for spec in enumerate_valid(CharlieBasis::PlusMinus, Sign::Plus)
            .iter()
            .step_by(11)
        {
            let s1 = run_bcst_exhaustive_withheld(spec, &a, &b).unwrap();
            let s2 = run_bcst_exhaustive_withheld(&spec.swapped_pairs(), &b, &a).unwrap();
            let m1 = s1.mean_infidelity();
            let m2 = s2.mean_infidelity();
            assert!((m1.a_to_b - m2.b_to_a).abs() < 1e-12);
            assert!((m1.b_to_a - m2.a_to_b).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_inputs_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let q = UnknownQubit::haar(&mut rng);
            assert!((q.alpha.norm_sqr() + q.beta.norm_sqr() - 1.0).abs() < TOL);
        }
        assert!(UnknownQubit::new(real(1.0), real(1.0)).is_err());
    }
}
