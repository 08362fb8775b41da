//! Probabilistic bidirectional teleportation over non-maximally entangled
//! pairs `a|00⟩ ± b|11⟩` and `a|01⟩ ± b|10⟩`.
//!
//! After the sender's Bell measurement the receiver attaches an ancilla in
//! `|0⟩`, applies [`matrix_u`] (ψ′ family) or [`matrix_u1`] (φ′ family) to
//! `(data, ancilla)` and measures the ancilla. Outcome `0` heralds success and
//! a Pauli correction recovers the input exactly; outcome `1` leaves the data
//! qubit in `|1⟩`.
//!
//! Every pair is written with the sender's qubit first. For the Bob → Alice
//! pair this means the state is prepared on `(B2, A2)` and then placed in the
//! canonical register.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use serde::Serialize;

use crate::bell::{teleported_state, unique_correction, BellKind, CorrectionTable, PauliKind, Smo};
use crate::channel::{ChannelSpec, CharlieBasis, Party, Sign};
use crate::protocol::{Action, PerDirection, Transcript, UnknownQubit};
use crate::qcore::{
    apply_2q, permute_qubits, real, tensor, BasisOutcome, Matrix2, Matrix4, SingleQubitBasis,
    StateVector, TOL,
};
use crate::register::Register;
use crate::{Error, Result};

/// Coefficients `(a, b)` of a generalized Bell pair, with `b < a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenBellParams {
    a: f64,
    b: f64,
}

impl GenBellParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite);
        }
        if a <= 0.0 || b <= 0.0 || b > a {
            return Err(Error::InvalidRatio { a, b });
        }
        let norm_sqr = a * a + b * b;
        if (norm_sqr - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        if (a - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9 {
            return Err(Error::MaximallyEntangled { a });
        }
        Ok(GenBellParams { a, b })
    }

    /// Accepts the two coefficients in either order.
    pub fn ordered(x: f64, y: f64) -> Result<Self> {
        Self::new(x.max(y), x.min(y))
    }

    /// `(a, b)` from `a² = a_sqr`.
    pub fn from_a_sqr(a_sqr: f64) -> Result<Self> {
        Self::new(a_sqr.sqrt(), (1.0 - a_sqr).sqrt())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `2b²`.
    pub fn success_probability(&self) -> f64 {
        2.0 * self.b * self.b
    }
}

/// A generalized pair: the Bell kind names family and sign (`psi+` stands
/// for `a|00⟩ + b|11⟩`, `phi-` for `a|01⟩ − b|10⟩`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenBell {
    pub kind: BellKind,
    pub params: GenBellParams,
}

impl GenBell {
    pub fn new(kind: BellKind, params: GenBellParams) -> Self {
        GenBell { kind, params }
    }

    /// Two-qubit state ordered `(sender, receiver)`.
    pub fn state(&self) -> StateVector {
        let GenBellParams { a, b } = self.params;
        let s = if self.kind.is_minus() { -b } else { b };
        let amps = if self.kind.is_phi() {
            [0.0, a, s, 0.0]
        } else {
            [a, 0.0, 0.0, s]
        };
        StateVector::from_parts_unchecked(2, amps.iter().map(|&x| real(x)).collect())
    }

    /// [`matrix_u`] for the ψ′ family, [`matrix_u1`] for φ′.
    pub fn conversion(&self) -> Matrix4 {
        if self.kind.is_phi() {
            matrix_u1(self.params)
        } else {
            matrix_u(self.params)
        }
    }

    fn conversion_name(&self) -> &'static str {
        if self.kind.is_phi() {
            "U1"
        } else {
            "U"
        }
    }
}

/// `U` acting on `(data, ancilla)`:
///
/// ```text
/// [ b/a   r    0   0 ]
/// [ 0     0    0  −1 ]
/// [ 0     0    1   0 ]
/// [ r   −b/a   0   0 ]      r = √(1 − b²/a²)
/// ```
pub fn matrix_u(p: GenBellParams) -> Matrix4 {
    let q = p.b / p.a;
    let r = (1.0 - q * q).sqrt();
    Matrix4::from_reals([
        [q, r, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [r, -q, 0.0, 0.0],
    ])
}

/// `U1 = U (X ⊗ I)`.
pub fn matrix_u1(p: GenBellParams) -> Matrix4 {
    let x = Matrix2::from_reals([[0.0, 1.0], [1.0, 0.0]]);
    matrix_u(p) * x.kron(&Matrix2::identity())
}

/// Channel of the same shape as [`ChannelSpec`] built from generalized
/// pairs, each with its own coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbChannelSpec {
    pub pairs: [GenBell; 4],
    pub charlie_basis: CharlieBasis,
    pub sign: Sign,
}

impl ProbChannelSpec {
    pub fn new(pairs: [GenBell; 4], charlie_basis: CharlieBasis, sign: Sign) -> Self {
        ProbChannelSpec {
            pairs,
            charlie_basis,
            sign,
        }
    }

    /// `pair1` parametrizes `ψ1, ψ3` (Alice → Bob), `pair2` parametrizes
    /// `ψ2, ψ4` (Bob → Alice).
    pub fn from_channel(spec: &ChannelSpec, pair1: GenBellParams, pair2: GenBellParams) -> Self {
        let [k1, k2, k3, k4] = spec.psi;
        ProbChannelSpec {
            pairs: [
                GenBell::new(k1, pair1),
                GenBell::new(k2, pair2),
                GenBell::new(k3, pair1),
                GenBell::new(k4, pair2),
            ],
            charlie_basis: spec.charlie_basis,
            sign: spec.sign,
        }
    }

    /// Parses a channel string plus `a1=..,b1=..,a2=..,b2=..`.
    pub fn parse(spec: &str, params: &str) -> Result<Self> {
        let channel: ChannelSpec = spec.parse()?;
        let (p1, p2) = parse_params(params)?;
        Ok(Self::from_channel(&channel, p1, p2))
    }

    pub fn kinds(&self) -> [BellKind; 4] {
        self.pairs.map(|g| g.kind)
    }

    pub fn satisfies_condition(&self) -> bool {
        let [k1, k2, k3, k4] = self.kinds();
        k1 != k3 && k2 != k4
    }

    /// Pairs shared after Charlie's outcome: `(Alice → Bob, Bob → Alice)`.
    pub fn pairs_for(&self, outcome: BasisOutcome) -> (GenBell, GenBell) {
        match outcome {
            BasisOutcome::A => (self.pairs[0], self.pairs[1]),
            BasisOutcome::B => (self.pairs[2], self.pairs[3]),
        }
    }
}

/// `psi+(0.8,0.6),psi+(0.8,0.6),psi-(0.8,0.6),psi-(0.8,0.6);basis=+/-;sign=+`
impl fmt::Display for ProbChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.pairs.iter().enumerate() {
            let sep = if i == 0 { "" } else { "," };
            write!(f, "{sep}{}({},{})", g.kind, g.params.a, g.params.b)?;
        }
        write!(f, ";basis={};sign={}", self.charlie_basis, self.sign)
    }
}

/// `a1=0.8,b1=0.6,a2=0.8,b2=0.6`.
pub fn parse_params(text: &str) -> Result<(GenBellParams, GenBellParams)> {
    let mut values = [None; 4];
    for part in text.split(',') {
        let (key, value) = part
            .trim()
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
        let slot = match key {
            "a1" => 0,
            "b1" => 1,
            "a2" => 2,
            "b2" => 3,
            _ => return Err(Error::Parse(format!("unknown parameter `{key}`"))),
        };
        let v: f64 = value
            .parse()
            .map_err(|_| Error::Parse(format!("`{value}` is not a number")))?;
        if values[slot].replace(v).is_some() {
            return Err(Error::Parse(format!("parameter `{key}` given twice")));
        }
    }
    let get = |i: usize, key: &str| {
        values[i].ok_or_else(|| Error::Parse(format!("missing parameter `{key}`")))
    };
    Ok((
        GenBellParams::new(get(0, "a1")?, get(1, "b1")?)?,
        GenBellParams::new(get(2, "a2")?, get(3, "b2")?)?,
    ))
}

/// Canonical-order `(A1, B1, A2, B2, C1)` state.
pub fn build_prob_channel_state(spec: &ProbChannelSpec) -> Result<StateVector> {
    let basis = spec.charlie_basis.basis();
    let term = |g1: &GenBell, g2: &GenBell, o: BasisOutcome| -> Result<StateVector> {
        let pair2 = permute_qubits(&g2.state(), &[1, 0])?;
        tensor(&[g1.state(), pair2, basis.ket_state(o)])
    };
    let [g1, g2, g3, g4] = &spec.pairs;
    let first = term(g1, g2, BasisOutcome::A)?;
    let second = term(g3, g4, BasisOutcome::B)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::new(
        first
            .amps()
            .iter()
            .zip(second.amps())
            .map(|(x, y)| (x + y * spec.sign.factor()) * h)
            .collect(),
    )
}

/// The published probabilistic correction table, verbatim.
pub fn published_table_3() -> CorrectionTable {
    CorrectionTable::parse(include_str!("../data/table3.txt")).expect("embedded table 3 is valid")
}

/// Receiver's data qubit after a successful (ancilla `0`) conversion.
pub fn converted_state(pair: &GenBell, smo: Smo, input: &UnknownQubit) -> Result<StateVector> {
    let received = teleported_state(&pair.state(), smo, input)?;
    let with_ancilla = tensor(&[received, StateVector::basis(1, 0)?])?;
    let converted = apply_2q(&with_ancilla, 0, 1, &pair.conversion())?;
    converted.contract(&[1], &StateVector::basis(1, 0)?)
}

/// Table built by the same uniqueness search as the perfect table, applied
/// to the heralded output of the conversion step.
pub fn derive_prob_correction_table_for(params: GenBellParams) -> Result<CorrectionTable> {
    let mut err = None;
    let table = CorrectionTable::from_fn(|kind, smo| {
        let pair = GenBell::new(kind, params);
        unique_correction(kind, smo, |q| converted_state(&pair, smo, q)).unwrap_or_else(|e| {
            err.get_or_insert(e);
            PauliKind::I
        })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(table),
    }
}

/// Derived table for `(a, b) = (0.8, 0.6)`; the table does not depend on the
/// coefficients.
pub fn derive_prob_correction_table() -> Result<CorrectionTable> {
    derive_prob_correction_table_for(GenBellParams::new(0.8, 0.6)?)
}

fn prob_corrections() -> Result<&'static CorrectionTable> {
    static TABLE: OnceLock<Result<CorrectionTable>> = OnceLock::new();
    TABLE
        .get_or_init(derive_prob_correction_table)
        .as_ref()
        .map_err(Clone::clone)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirectionOutcome {
    pub success: bool,
    /// Fidelity of the receiver's qubit with the input. Corrections are only
    /// applied on success.
    pub fidelity: f64,
    pub ancilla_outcome: u8,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbResult {
    pub charlie_outcome: BasisOutcome,
    pub smo_a: Smo,
    pub smo_b: Smo,
    pub directions: PerDirection<DirectionOutcome>,
    pub transcript: Transcript,
}

/// One leaf of the full branch tree, including both ancilla outcomes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProbBranch {
    pub charlie_outcome: BasisOutcome,
    pub smo_a: Smo,
    pub smo_b: Smo,
    pub probability: f64,
    pub directions: PerDirection<DirectionOutcome>,
}

const LABELS: [&str; 7] = ["A1", "B1", "A2", "B2", "C1", "inA", "inB"];

fn initial_register(
    spec: &ProbChannelSpec,
    input_a: &UnknownQubit,
    input_b: &UnknownQubit,
) -> Result<Register> {
    if !spec.satisfies_condition() {
        return Err(Error::ConditionViolated);
    }
    let channel = build_prob_channel_state(spec)?;
    let state = tensor(&[channel, input_a.state(), input_b.state()])?;
    Ok(Register::new(LABELS.to_vec(), state))
}

fn ancilla_bit(o: BasisOutcome) -> u8 {
    match o {
        BasisOutcome::A => 0,
        BasisOutcome::B => 1,
    }
}

/// After the ancilla measurement: correct on success and report fidelity.
fn settle(
    reg: &Register,
    data: &'static str,
    pair: &GenBell,
    smo: Smo,
    ancilla: BasisOutcome,
    input: &UnknownQubit,
) -> Result<(Register, DirectionOutcome, Option<PauliKind>)> {
    let success = ancilla == BasisOutcome::A;
    let (reg, pauli) = if success {
        let p = prob_corrections()?.get(pair.kind, smo);
        (reg.apply_1q(data, &p.matrix())?, Some(p))
    } else {
        (reg.clone(), None)
    };
    let fidelity = reg.fidelity(data, &input.state())?;
    Ok((
        reg,
        DirectionOutcome {
            success,
            fidelity,
            ancilla_outcome: ancilla_bit(ancilla),
        },
        pauli,
    ))
}

/// One sampled run. Consumes five unit-interval samples: Charlie, Alice,
/// Bob, Bob's ancilla, Alice's ancilla.
pub fn run_pbcst(
    spec: &ProbChannelSpec,
    input_a: &UnknownQubit,
    input_b: &UnknownQubit,
    rng: &mut impl Rng,
) -> Result<ProbResult> {
    let reg = initial_register(spec, input_a, input_b)?;
    let basis = spec.charlie_basis.basis();
    let z = SingleQubitBasis::computational();
    let mut t = Transcript::default();

    let (outcome, _, reg) = reg.measure("C1", &basis, rng.random())?;
    t.push(
        Party::Charlie,
        Action::Measure {
            qubits: vec!["C1"],
            basis: spec.charlie_basis.to_string(),
            outcome: format!("{outcome:?}").to_lowercase(),
        },
    );
    let disclosure = t.push(
        Party::Charlie,
        Action::SendClassical {
            to: vec![Party::Alice, Party::Bob],
            bits: ancilla_bit(outcome).to_string(),
        },
    );
    let (pair_ab, pair_ba) = spec.pairs_for(outcome);

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

    let mut reg = reg;
    let mut results = [None, None];
    let legs = [
        (Party::Bob, "B1", "xB", pair_ab, smo_a, input_a, msg_a),
        (Party::Alice, "A2", "xA", pair_ba, smo_b, input_b, msg_b),
    ];
    for (slot, (party, data, ancilla, pair, smo, input, msg)) in legs.into_iter().enumerate() {
        reg = reg.attach(ancilla, &StateVector::basis(1, 0)?)?.apply_2q(
            data,
            ancilla,
            &pair.conversion(),
        )?;
        t.push(
            party,
            Action::ApplyUnitary {
                qubits: vec![data, ancilla],
                name: pair.conversion_name().into(),
            },
        );
        let (o, _, next) = reg.measure(ancilla, &z, rng.random())?;
        t.push(
            party,
            Action::Measure {
                qubits: vec![ancilla],
                basis: "0/1".into(),
                outcome: ancilla_bit(o).to_string(),
            },
        );
        let (next, outcome, pauli) = settle(&next, data, &pair, smo, o, input)?;
        if let Some(pauli) = pauli {
            t.push(
                party,
                Action::ApplyCorrection {
                    qubit: data,
                    pauli,
                    based_on: vec![disclosure, msg],
                },
            );
        }
        reg = next;
        results[slot] = Some(outcome);
    }
    let [Some(a_to_b), Some(b_to_a)] = results else {
        unreachable!("both legs run")
    };
    Ok(ProbResult {
        charlie_outcome: outcome,
        smo_a,
        smo_b,
        directions: PerDirection { a_to_b, b_to_a },
        transcript: t,
    })
}

/// Every branch (Charlie × Alice × Bob × both ancillas) with its exact
/// probability.
pub fn enumerate_prob_branches(
    spec: &ProbChannelSpec,
    input_a: &UnknownQubit,
    input_b: &UnknownQubit,
) -> Result<Vec<ProbBranch>> {
    let reg = initial_register(spec, input_a, input_b)?;
    let basis = spec.charlie_basis.basis();
    let z = SingleQubitBasis::computational();
    let mut out = Vec::new();
    for (outcome, p_c, reg) in reg.measure_all("C1", &basis)? {
        let (pair_ab, pair_ba) = spec.pairs_for(outcome);
        for (kind_a, p_a, reg) in reg.measure_bell_all("inA", "A1")? {
            for (kind_b, p_b, reg) in reg.measure_bell_all("inB", "B2")? {
                let (smo_a, smo_b) = (Smo::from_bell(kind_a), Smo::from_bell(kind_b));
                let reg = reg.attach("xB", &StateVector::basis(1, 0)?)?.apply_2q(
                    "B1",
                    "xB",
                    &pair_ab.conversion(),
                )?;
                for (o_b, p_xb, reg) in reg.measure_all("xB", &z)? {
                    let (reg, a_to_b, _) = settle(&reg, "B1", &pair_ab, smo_a, o_b, input_a)?;
                    let reg = reg.attach("xA", &StateVector::basis(1, 0)?)?.apply_2q(
                        "A2",
                        "xA",
                        &pair_ba.conversion(),
                    )?;
                    for (o_a, p_xa, reg) in reg.measure_all("xA", &z)? {
                        let (_, b_to_a, _) = settle(&reg, "A2", &pair_ba, smo_b, o_a, input_b)?;
                        out.push(ProbBranch {
                            charlie_outcome: outcome,
                            smo_a,
                            smo_b,
                            probability: p_c * p_a * p_b * p_xb * p_xa,
                            directions: PerDirection { a_to_b, b_to_a },
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuccessProbability {
    /// ½-weighted mix of `2b²` over Charlie's two branches.
    pub analytic: PerDirection<f64>,
    /// Summed over the exhaustive branch tree.
    pub numeric: PerDirection<f64>,
}

pub fn success_probability(spec: &ProbChannelSpec) -> Result<SuccessProbability> {
    let mix = |i: usize, j: usize| {
        0.5 * spec.pairs[i].params.success_probability()
            + 0.5 * spec.pairs[j].params.success_probability()
    };
    let q = UnknownQubit::real(0.6, 0.8);
    let branches = enumerate_prob_branches(spec, &q, &q)?;
    let sum = |f: fn(&ProbBranch) -> bool| {
        branches
            .iter()
            .filter(|b| f(b))
            .map(|b| b.probability)
            .sum()
    };
    Ok(SuccessProbability {
        analytic: PerDirection {
            a_to_b: mix(0, 2),
            b_to_a: mix(1, 3),
        },
        numeric: PerDirection {
            a_to_b: sum(|b| b.directions.a_to_b.success),
            b_to_a: sum(|b| b.directions.b_to_a.success),
        },
    })
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct MonteCarloSummary {
    pub trials: usize,
    pub successes: PerDirection<usize>,
    pub success_rate: PerDirection<f64>,
    /// Lowest fidelity seen among successful runs.
    pub min_success_fidelity: PerDirection<f64>,
}

/// Repeated sampled runs with Haar-random inputs.
pub fn monte_carlo(
    spec: &ProbChannelSpec,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(Error::EmptySample);
    }
    let mut s = MonteCarloSummary {
        trials,
        min_success_fidelity: PerDirection {
            a_to_b: 1.0,
            b_to_a: 1.0,
        },
        ..Default::default()
    };
    for _ in 0..trials {
        let a = UnknownQubit::haar(rng);
        let b = UnknownQubit::haar(rng);
        let r = run_pbcst(spec, &a, &b, rng)?;
        let d = r.directions;
        if d.a_to_b.success {
            s.successes.a_to_b += 1;
            s.min_success_fidelity.a_to_b = s.min_success_fidelity.a_to_b.min(d.a_to_b.fidelity);
        }
        if d.b_to_a.success {
            s.successes.b_to_a += 1;
            s.min_success_fidelity.b_to_a = s.min_success_fidelity.b_to_a.min(d.b_to_a.fidelity);
        }
    }
    s.success_rate = PerDirection {
        a_to_b: s.successes.a_to_b as f64 / trials as f64,
        b_to_a: s.successes.b_to_a as f64 / trials as f64,
    };
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::diff_tables;
    use crate::channel::zha_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(a: f64, b: f64) -> GenBellParams {
        GenBellParams::new(a, b).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(matches!(
            GenBellParams::new(0.6, 0.8),
            Err(Error::InvalidRatio { .. })
        ));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(matches!(
            GenBellParams::new(h, h),
            Err(Error::MaximallyEntangled { .. })
        ));
        assert!(matches!(
            GenBellParams::new(0.8, 0.5),
            Err(Error::NotNormalized { .. })
        ));
        assert_eq!(GenBellParams::ordered(0.6, 0.8).unwrap(), p(0.8, 0.6));
    }

    #[test]
    fn u_first_row_and_fixed_column() {
        let u = matrix_u(p(0.8, 0.6));
        assert!((u.0[0][0].re - 0.75).abs() < 1e-15);
        assert!((u.0[0][1].re - (1.0f64 - 0.5625).sqrt()).abs() < 1e-15);
        let col2: Vec<f64> = (0..4).map(|r| u.0[r][2].re).collect();
        assert_eq!(col2, [0.0, 0.0, 1.0, 0.0]);
        assert!(u.is_unitary());
        let u1 = matrix_u1(p(0.8, 0.6));
        assert!((u1.0[0][2].re - 0.75).abs() < 1e-15);
        assert!((u1.0[3][2].re - (1.0f64 - 0.5625).sqrt()).abs() < 1e-15);
        assert!(u1.is_unitary());
    }

    #[test]
    fn success_probability_matches_two_b_squared() {
        let spec = ProbChannelSpec::from_channel(&zha_state().spec, p(0.8, 0.6), p(0.8, 0.6));
        let s = success_probability(&spec).unwrap();
        for v in [
            s.analytic.a_to_b,
            s.analytic.b_to_a,
            s.numeric.a_to_b,
            s.numeric.b_to_a,
        ] {
            assert!((v - 0.72).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn mixed_parameters_give_weighted_mix() {
        let base = ProbChannelSpec::from_channel(&zha_state().spec, p(0.8, 0.6), p(0.8, 0.6));
        let mut spec = base;
        spec.pairs[2].params = GenBellParams::from_a_sqr(0.9).unwrap();
        let s = success_probability(&spec).unwrap();
        let expect = 0.5 * 0.72 + 0.5 * 2.0 * 0.1;
        assert!((s.numeric.a_to_b - expect).abs() < 1e-12);
        assert!((s.analytic.a_to_b - expect).abs() < 1e-12);
        assert!((s.numeric.b_to_a - 0.72).abs() < 1e-12);
    }

    #[test]
    fn success_branches_are_perfect_and_failures_leave_one() {
        let spec = ProbChannelSpec::from_channel(&zha_state().spec, p(0.8, 0.6), p(0.8, 0.6));
        let a = UnknownQubit::real(0.6, 0.8);
        let b = UnknownQubit::new(real(0.6), crate::qcore::c(0.0, 0.8)).unwrap();
        let branches = enumerate_prob_branches(&spec, &a, &b).unwrap();
        let total: f64 = branches.iter().map(|x| x.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for x in &branches {
            for (d, input) in [(x.directions.a_to_b, a), (x.directions.b_to_a, b)] {
                if d.success {
                    assert!(d.fidelity > 1.0 - TOL);
                } else {
                    assert_eq!(d.ancilla_outcome, 1);
                    assert!((d.fidelity - input.beta.norm_sqr()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn derived_table_is_independent_of_coefficients() {
        let t = derive_prob_correction_table().unwrap();
        assert!(t.is_column_bijective());
        for a_sqr in [0.51, 0.7, 0.95] {
            let other = derive_prob_correction_table_for(GenBellParams::from_a_sqr(a_sqr).unwrap())
                .unwrap();
            assert!(diff_tables(&t, &other).is_empty());
        }
    }

    #[test]
    fn published_table_3_cells() {
        let t = published_table_3();
        let cell = |k: &str, m: &str| t.get(k.parse().unwrap(), m.parse().unwrap());
        assert_eq!(cell("psi+", "00"), PauliKind::I);
        assert_eq!(cell("psi+", "01"), PauliKind::X);
        assert_eq!(cell("phi+", "01"), PauliKind::X);
        assert_eq!(cell("phi-", "11"), PauliKind::X);
    }

    #[test]
    fn sampled_run_transcript() {
        let spec = ProbChannelSpec::parse(
            "psi+,psi+,psi-,psi-;basis=+/-;sign=+",
            "a1=0.8,b1=0.6,a2=0.8,b2=0.6",
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = UnknownQubit::real(0.6, 0.8);
        for _ in 0..20 {
            let r = run_pbcst(&spec, &q, &q, &mut rng).unwrap();
            r.transcript.check_causality().unwrap();
            for d in [r.directions.a_to_b, r.directions.b_to_a] {
                assert_eq!(d.success, d.ancilla_outcome == 0);
            }
        }
    }

    #[test]
    fn params_parse_errors() {
        assert!(parse_params("a1=0.8,b1=0.6,a2=0.8").is_err());
        assert!(parse_params("a1=0.8,b1=0.6,a2=0.8,b2=x").is_err());
        assert!(parse_params("a1=0.8,a1=0.8,b1=0.6,a2=0.8,b2=0.6").is_err());
        assert!(parse_params("a1=0.6,b1=0.8,a2=0.8,b2=0.6").is_err());
    }

    #[test]
    fn invalid_kinds_are_rejected() {
        let spec = ProbChannelSpec::parse(
            "psi+,psi+,psi+,psi-;basis=+/-;sign=+",
            "a1=0.8,b1=0.6,a2=0.8,b2=0.6",
        )
        .unwrap();
        let q = UnknownQubit::real(1.0, 0.0);
        assert_eq!(
            run_pbcst(&spec, &q, &q, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err(),
            Error::ConditionViolated
        );
    }
}
