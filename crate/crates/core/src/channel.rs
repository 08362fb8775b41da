//! The 5-qubit channel class
//! `(|ψ1⟩_{A1B1}|ψ2⟩_{A2B2}|a⟩_{C1} ± |ψ3⟩_{A1B1}|ψ4⟩_{A2B2}|b⟩_{C1})/√2`.
//!
//! States are built in the canonical register order `(A1, B1, A2, B2, C1)`.
//! Published states that use other numberings are mapped onto it through a
//! [`QubitLayout`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bell::BellKind;
use crate::qcore::{
    fidelity_pure, measure_qubit_branches, permute_qubits, real, reduced_density, tensor,
    BasisOutcome, SingleQubitBasis, StateVector, TOL,
};
use crate::{Error, Result};

/// Canonical register positions.
pub const A1: usize = 0;
pub const B1: usize = 1;
pub const A2: usize = 2;
pub const B2: usize = 3;
pub const C1: usize = 4;

/// Purity classification tolerance for [`control_report`].
pub const PURITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
    Charlie,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("sign must be + or -, got `{other}`"))),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Charlie's measurement basis, in a form that round-trips through text.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum CharlieBasis {
    /// `{|+⟩, |−⟩}`
    #[default]
    PlusMinus,
    /// `{|0⟩, |1⟩}`
    ZeroOne,
    /// See [`SingleQubitBasis::from_angles`].
    Angles { theta: f64, phi: f64 },
}

impl CharlieBasis {
    pub fn basis(&self) -> SingleQubitBasis {
        match *self {
            CharlieBasis::PlusMinus => SingleQubitBasis::hadamard(),
            CharlieBasis::ZeroOne => SingleQubitBasis::computational(),
            CharlieBasis::Angles { theta, phi } => SingleQubitBasis::from_angles(theta, phi)
                .expect("angle bases are orthonormal by construction"),
        }
    }

    pub fn random(rng: &mut impl rand::Rng) -> Self {
        CharlieBasis::Angles {
            theta: rng.random_range(0.0..std::f64::consts::PI),
            phi: rng.random_range(0.0..std::f64::consts::TAU),
        }
    }
}

impl fmt::Display for CharlieBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharlieBasis::PlusMinus => f.write_str("+/-"),
            CharlieBasis::ZeroOne => f.write_str("0/1"),
            CharlieBasis::Angles { theta, phi } => write!(f, "theta={theta},phi={phi}"),
        }
    }
}

impl FromStr for CharlieBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "+/-" => return Ok(CharlieBasis::PlusMinus),
            "0/1" => return Ok(CharlieBasis::ZeroOne),
            _ => {}
        }
        let bad = || {
            Error::Parse(format!(
                "basis must be +/-, 0/1 or theta=..,phi=.., got `{s}`"
            ))
        };
        let (t, p) = s.split_once(',').ok_or_else(bad)?;
        let num = |part: &str, key: &str| -> Result<f64> {
            let v = part.trim().strip_prefix(key).ok_or_else(bad)?;
            let x: f64 = v.parse().map_err(|_| bad())?;
            x.is_finite().then_some(x).ok_or_else(bad)
        };
        Ok(CharlieBasis::Angles {
            theta: num(t, "theta=")?,
            phi: num(p, "phi=")?,
        })
    }
}

impl Serialize for CharlieBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One member (or, for analysis, non-member) of the channel class.
///
/// Condition-violating specs are representable on purpose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    pub psi: [BellKind; 4],
    pub charlie_basis: CharlieBasis,
    pub sign: Sign,
}

impl ChannelSpec {
    pub fn new(psi: [BellKind; 4], charlie_basis: CharlieBasis, sign: Sign) -> Self {
        ChannelSpec {
            psi,
            charlie_basis,
            sign,
        }
    }

    pub fn satisfies_condition(&self) -> bool {
        check_condition(self)
    }

    /// Same channel with the roles of the two Bell pairs exchanged.
    pub fn swapped_pairs(&self) -> ChannelSpec {
        let [p1, p2, p3, p4] = self.psi;
        ChannelSpec {
            psi: [p2, p1, p4, p3],
            ..*self
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p1, p2, p3, p4] = self.psi;
        write!(
            f,
            "{p1},{p2},{p3},{p4};basis={};sign={}",
            self.charlie_basis, self.sign
        )
    }
}

/// Parses `psi+,psi+,psi-,psi-;basis=+/-;sign=+`. `basis` defaults to `+/-`
/// and `sign` to `+` when omitted.
impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sections = s.trim().split(';');
        let quad = sections.next().unwrap_or("");
        let kinds = quad
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<BellKind>>>()?;
        let psi: [BellKind; 4] = kinds.try_into().map_err(|v: Vec<BellKind>| {
            Error::Parse(format!("expected 4 Bell states, found {}", v.len()))
        })?;
        let mut spec = ChannelSpec::new(psi, CharlieBasis::default(), Sign::default());
        for section in sections {
            match section.trim().split_once('=') {
                Some(("basis", v)) => spec.charlie_basis = v.parse()?,
                Some(("sign", v)) => spec.sign = v.parse()?,
                _ => return Err(Error::Parse(format!("unexpected section `{section}`"))),
            }
        }
        Ok(spec)
    }
}

impl Serialize for ChannelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Where the roles `A1, B1, A2, B2, C1` sit inside a physical 5-qubit
/// register. `positions[role]` is the physical index of that role.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitLayout {
    positions: [usize; 5],
}

impl QubitLayout {
    pub const CANONICAL: QubitLayout = QubitLayout {
        positions: [0, 1, 2, 3, 4],
    };

    pub fn new(positions: [usize; 5]) -> Result<Self> {
        let mut sorted = positions;
        sorted.sort_unstable();
        if sorted != [0, 1, 2, 3, 4] {
            return Err(Error::InvalidPermutation(positions.to_vec()));
        }
        Ok(QubitLayout { positions })
    }

    /// Layout from 1-based qubit labels as printed alongside a published state.
    pub fn from_labels(a1: usize, b1: usize, a2: usize, b2: usize, c1: usize) -> Result<Self> {
        let labels = [a1, b1, a2, b2, c1];
        if labels.iter().any(|&l| l == 0 || l > 5) {
            return Err(Error::InvalidPermutation(labels.to_vec()));
        }
        Self::new(labels.map(|l| l - 1))
    }

    pub fn positions(&self) -> [usize; 5] {
        self.positions
    }

    pub fn a1(&self) -> usize {
        self.positions[A1]
    }
    pub fn b1(&self) -> usize {
        self.positions[B1]
    }
    pub fn a2(&self) -> usize {
        self.positions[A2]
    }
    pub fn b2(&self) -> usize {
        self.positions[B2]
    }
    pub fn c1(&self) -> usize {
        self.positions[C1]
    }

    pub fn owner(&self, physical: usize) -> Option<Party> {
        let role = self.positions.iter().position(|&p| p == physical)?;
        Some(match role {
            A1 | A2 => Party::Alice,
            B1 | B2 => Party::Bob,
            _ => Party::Charlie,
        })
    }

    /// Canonical-order state to this layout's physical order.
    pub fn to_physical(&self, canonical: &StateVector) -> Result<StateVector> {
        permute_qubits(canonical, &self.positions)
    }

    /// Physical-order state to canonical order.
    pub fn to_canonical(&self, physical: &StateVector) -> Result<StateVector> {
        let mut inverse = [0usize; 5];
        for (role, &p) in self.positions.iter().enumerate() {
            inverse[p] = role;
        }
        permute_qubits(physical, &inverse)
    }
}

pub fn check_condition(spec: &ChannelSpec) -> bool {
    spec.psi[0] != spec.psi[2] && spec.psi[1] != spec.psi[3]
}

/// The channel state in canonical order `(A1, B1, A2, B2, C1)`.
pub fn build_channel_state(spec: &ChannelSpec) -> StateVector {
    let basis = spec.charlie_basis.basis();
    let [p1, p2, p3, p4] = spec.psi;
    let first =
        tensor(&[p1.state(), p2.state(), basis.ket_state(BasisOutcome::A)]).expect("5 qubits fit");
    let second =
        tensor(&[p3.state(), p4.state(), basis.ket_state(BasisOutcome::B)]).expect("5 qubits fit");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = first
        .amps()
        .iter()
        .zip(second.amps())
        .map(|(x, y)| (x + y * spec.sign.factor()) * h)
        .collect();
    StateVector::new(amps).expect("orthogonal Charlie kets keep the state normalized")
}

/// All 256 quadruples for a fixed basis and sign, lexicographic in
/// [`BellKind::ALL`] order.
pub fn enumerate_all(basis: CharlieBasis, sign: Sign) -> Vec<ChannelSpec> {
    let k = BellKind::ALL;
    let mut out = Vec::with_capacity(256);
    for p1 in k {
        for p2 in k {
            for p3 in k {
                for p4 in k {
                    out.push(ChannelSpec::new([p1, p2, p3, p4], basis, sign));
                }
            }
        }
    }
    out
}

pub fn enumerate_valid(basis: CharlieBasis, sign: Sign) -> Vec<ChannelSpec> {
    enumerate_all(basis, sign)
        .into_iter()
        .filter(check_condition)
        .collect()
}

pub fn enumerate_invalid(basis: CharlieBasis, sign: Sign) -> Vec<ChannelSpec> {
    enumerate_all(basis, sign)
        .into_iter()
        .filter(|s| !check_condition(s))
        .collect()
}

/// The nine quadruples listed as examples of valid channels.
pub fn table_2_rows() -> [[BellKind; 4]; 9] {
    use BellKind::*;
    [
        [PsiPlus, PsiPlus, PhiPlus, PhiPlus],
        [PsiPlus, PsiPlus, PhiPlus, PhiMinus],
        [PsiPlus, PsiPlus, PhiMinus, PhiMinus],
        [PsiPlus, PsiPlus, PhiMinus, PhiPlus],
        [PsiPlus, PsiPlus, PsiMinus, PsiMinus],
        [PsiPlus, PsiPlus, PsiMinus, PhiMinus],
        [PsiPlus, PsiPlus, PhiMinus, PsiMinus],
        [PsiPlus, PsiPlus, PsiMinus, PhiPlus],
        [PsiPlus, PsiPlus, PhiPlus, PsiMinus],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ControlReport {
    /// Pair `A1B1` (Alice → Bob) needs Charlie's disclosure.
    pub dir_ab_controlled: bool,
    /// Pair `A2B2` (Bob → Alice) needs Charlie's disclosure.
    pub dir_ba_controlled: bool,
    pub purity_ab: f64,
    pub purity_ba: f64,
}

fn classify(purity: f64) -> Result<bool> {
    if (purity - 0.5).abs() < PURITY_TOL {
        Ok(true)
    } else if (purity - 1.0).abs() < PURITY_TOL {
        Ok(false)
    } else {
        Err(Error::IndeterminateControl { purity })
    }
}

/// Purity of each Bell pair's marginal: ½ means Charlie controls that
/// direction, 1 means the pair is already a known pure Bell state.
///
/// A "controlled" verdict alone does not certify that the state is usable
/// for teleportation (a GHZ marginal also has purity ½).
pub fn control_report(state: &StateVector, layout: &QubitLayout) -> Result<ControlReport> {
    if state.num_qubits() != 5 {
        return Err(Error::DimensionMismatch {
            expected: 5,
            actual: state.num_qubits(),
        });
    }
    let purity_ab = reduced_density(state, &[layout.a1(), layout.b1()])?.purity();
    let purity_ba = reduced_density(state, &[layout.a2(), layout.b2()])?.purity();
    Ok(ControlReport {
        dir_ab_controlled: classify(purity_ab)?,
        dir_ba_controlled: classify(purity_ba)?,
        purity_ab,
        purity_ba,
    })
}

/// Bell-pair products Alice and Bob share after each of Charlie's outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub on_a: (BellKind, BellKind),
    pub on_b: (BellKind, BellKind),
}

impl Factorization {
    pub fn for_outcome(&self, outcome: BasisOutcome) -> (BellKind, BellKind) {
        match outcome {
            BasisOutcome::A => self.on_a,
            BasisOutcome::B => self.on_b,
        }
    }
}

/// Identifies a 4-qubit state `(A1, B1, A2, B2)` as a product of two Bell
/// pairs, up to global phase.
pub fn identify_bell_product(state: &StateVector) -> Result<(BellKind, BellKind)> {
    let mut found = None;
    for x in BellKind::ALL {
        for y in BellKind::ALL {
            let product = tensor(&[x.state(), y.state()])?;
            if fidelity_pure(&product, state)? >= 1.0 - TOL {
                if found.is_some() {
                    return Err(Error::NotBellProduct);
                }
                found = Some((x, y));
            }
        }
    }
    found.ok_or(Error::NotBellProduct)
}

/// Measures `C1` in Charlie's basis (all branches) and identifies the Bell
/// pairs left behind.
pub fn collapse_factorization(spec: &ChannelSpec) -> Result<Factorization> {
    if !check_condition(spec) {
        return Err(Error::ConditionViolated);
    }
    branch_products(spec)
}

/// [`collapse_factorization`] without the condition check.
pub(crate) fn branch_products(spec: &ChannelSpec) -> Result<Factorization> {
    let basis = spec.charlie_basis.basis();
    let state = build_channel_state(spec);
    let mut on = [None, None];
    for branch in measure_qubit_branches(&state, C1, &basis)? {
        let rest = branch
            .state
            .contract(&[C1], &basis.ket_state(branch.outcome))?;
        on[branch.outcome as usize] = Some(identify_bell_product(&rest)?);
    }
    match on {
        [Some(on_a), Some(on_b)] => Ok(Factorization { on_a, on_b }),
        _ => Err(Error::NotBellProduct),
    }
}

/// A state as printed: amplitudes in the publication's own qubit numbering,
/// its qubit layout, and the channel spec it is claimed to match.
#[derive(Clone, Debug)]
pub struct NamedState {
    pub name: &'static str,
    pub state: StateVector,
    pub layout: QubitLayout,
    pub spec: ChannelSpec,
}

fn from_terms(terms: &[(f64, &str)]) -> StateVector {
    let n = terms[0].1.len();
    let mut amps = vec![real(0.0); 1 << n];
    for (coef, bits) in terms {
        amps[usize::from_str_radix(bits, 2).expect("binary literal")] += real(*coef);
    }
    StateVector::new(amps).expect("published states are normalized")
}

/// Cluster state: Alice holds 1, 3; Bob 2, 5; Charlie 4 (measures `±`).
pub fn zha_state() -> NamedState {
    let h = 0.5;
    use BellKind::*;
    NamedState {
        name: "zha",
        state: from_terms(&[(h, "00000"), (h, "00111"), (h, "11010"), (h, "11101")]),
        layout: QubitLayout::from_labels(1, 2, 3, 5, 4).expect("valid"),
        spec: ChannelSpec::new(
            [PsiPlus, PsiPlus, PsiMinus, PsiMinus],
            CharlieBasis::PlusMinus,
            Sign::Plus,
        ),
    }
}

/// Modified Brown state: Alice holds 1, 2; Bob 3, 4; Charlie 5 (measures `0/1`).
pub fn zha_prime_state() -> NamedState {
    let w = 1.0 / (2.0 * 2f64.sqrt());
    use BellKind::*;
    NamedState {
        name: "zha-prime",
        state: from_terms(&[
            (-w, "11101"),
            (w, "11110"),
            (w, "00000"),
            (-w, "00011"),
            (w, "01001"),
            (w, "01010"),
            (w, "10100"),
            (w, "10111"),
        ]),
        layout: QubitLayout::from_labels(1, 3, 2, 4, 5).expect("valid"),
        spec: ChannelSpec::new(
            [PsiPlus, PsiPlus, PsiMinus, PhiMinus],
            CharlieBasis::ZeroOne,
            Sign::Minus,
        ),
    }
}

/// GHZ ⊗ Bell: Alice holds 3, 5; Bob 1, 4; Charlie 2.
pub fn li_state() -> NamedState {
    let h = 0.5;
    use BellKind::*;
    NamedState {
        name: "li",
        state: from_terms(&[(h, "00000"), (h, "00011"), (h, "11100"), (h, "11111")]),
        layout: QubitLayout::from_labels(3, 1, 5, 4, 2).expect("valid"),
        spec: ChannelSpec::new(
            [PsiPlus, PsiPlus, PsiMinus, PsiPlus],
            CharlieBasis::PlusMinus,
            Sign::Plus,
        ),
    }
}

pub fn named_state(name: &str) -> Option<NamedState> {
    match name {
        "zha" => Some(zha_state()),
        "zha-prime" => Some(zha_prime_state()),
        "li" => Some(li_state()),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PublishedCheck {
    pub name: &'static str,
    /// `1 − |⟨printed|constructed⟩|²`.
    pub residual: f64,
    pub matches_construction: bool,
    pub satisfies_condition: bool,
    pub control: ControlReport,
}

/// Compares each printed state against its rearranged form built by
/// [`build_channel_state`] and reports the condition and control verdicts.
pub fn verify_published_states() -> Result<Vec<PublishedCheck>> {
    [zha_state(), zha_prime_state(), li_state()]
        .into_iter()
        .map(|named| {
            let built = named
                .layout
                .to_physical(&build_channel_state(&named.spec))?;
            let residual = 1.0 - fidelity_pure(&named.state, &built)?;
            Ok(PublishedCheck {
                name: named.name,
                residual,
                matches_construction: residual.abs() < TOL,
                satisfies_condition: check_condition(&named.spec),
                control: control_report(&named.state, &named.layout)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{equal_up_to_global_phase, measure_qubit_branches};
    use BellKind::*;

    fn spec(q: [BellKind; 4]) -> ChannelSpec {
        ChannelSpec::new(q, CharlieBasis::PlusMinus, Sign::Plus)
    }

    #[test]
    fn condition_examples() {
        assert!(check_condition(&spec([
            PsiPlus, PsiPlus, PsiMinus, PsiMinus
        ])));
        assert!(!check_condition(&spec([
            PsiPlus, PsiPlus, PsiPlus, PsiMinus
        ])));
        assert!(!check_condition(&spec([
            PsiPlus, PsiPlus, PsiMinus, PsiPlus
        ])));
    }

    #[test]
    fn zha_construction_matches_printed_amplitudes() {
        let z = zha_state();
        let built = build_channel_state(&z.spec);
        let physical = permute_qubits(&built, &[0, 1, 2, 4, 3]).unwrap();
        for (i, a) in physical.amps().iter().enumerate() {
            let expect = if [0b00000, 0b00111, 0b11010, 0b11101].contains(&i) {
                0.5
            } else {
                0.0
            };
            assert!((a - real(expect)).norm() < 1e-15, "index {i:05b}");
        }
        assert_eq!(z.layout.to_physical(&built).unwrap(), physical);
        assert_eq!(z.layout.to_canonical(&physical).unwrap(), built);
    }

    #[test]
    fn zha_prime_construction_matches_up_to_phase() {
        let z = zha_prime_state();
        let built = z.layout.to_physical(&build_channel_state(&z.spec)).unwrap();
        assert!(equal_up_to_global_phase(&built, &z.state, TOL).unwrap());
    }

    #[test]
    fn charlie_branches_are_equiprobable() {
        for s in enumerate_valid(CharlieBasis::PlusMinus, Sign::Minus)
            .iter()
            .step_by(7)
        {
            let state = build_channel_state(s);
            let branches = measure_qubit_branches(&state, C1, &s.charlie_basis.basis()).unwrap();
            assert_eq!(branches.len(), 2);
            for b in branches {
                assert!((b.probability - 0.5).abs() < TOL);
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let valid = enumerate_valid(CharlieBasis::PlusMinus, Sign::Plus);
        assert_eq!(valid.len(), 144);
        assert_eq!(
            enumerate_invalid(CharlieBasis::ZeroOne, Sign::Minus).len(),
            112
        );
        for row in table_2_rows() {
            assert!(valid.iter().any(|s| s.psi == row), "{row:?}");
        }
        let mut sorted = valid.clone();
        sorted.sort_by_key(|s| s.psi);
        assert_eq!(sorted, valid);
    }

    #[test]
    fn control_verdicts_for_published_states() {
        let z = zha_state();
        let r = control_report(&z.state, &z.layout).unwrap();
        assert!(r.dir_ab_controlled && r.dir_ba_controlled);
        let li = li_state();
        let r = control_report(&li.state, &li.layout).unwrap();
        assert!(r.dir_ab_controlled);
        assert!(!r.dir_ba_controlled);
        assert!((r.purity_ba - 1.0).abs() < PURITY_TOL);
        assert!((r.purity_ab - 0.5).abs() < PURITY_TOL);
    }

    #[test]
    fn ghz_marginals_look_controlled() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ghz = from_terms(&[(h, "00000"), (h, "11111")]);
        let r = control_report(&ghz, &QubitLayout::CANONICAL).unwrap();
        assert!(r.dir_ab_controlled && r.dir_ba_controlled);
        assert!((r.purity_ab - 0.5).abs() < 1e-12);
    }

    #[test]
    fn indeterminate_purity_is_an_error() {
        // |0000⟩ ⊗ (cos|0⟩ + sin|1⟩) entangled weakly with pair A1B1
        let a = 0.9f64;
        let b = (1.0 - a * a).sqrt();
        let s = from_terms(&[(a, "00000"), (b, "11001")]);
        assert!(matches!(
            control_report(&s, &QubitLayout::CANONICAL),
            Err(Error::IndeterminateControl { .. })
        ));
    }

    #[test]
    fn factorization_examples() {
        let f = collapse_factorization(&zha_state().spec).unwrap();
        assert_eq!(f.on_a, (PsiPlus, PsiPlus));
        assert_eq!(f.on_b, (PsiMinus, PsiMinus));
        let f = collapse_factorization(&zha_prime_state().spec).unwrap();
        assert_eq!(f.on_a, (PsiPlus, PsiPlus));
        assert_eq!(f.on_b, (PsiMinus, PhiMinus));
        assert_eq!(
            collapse_factorization(&li_state().spec),
            Err(Error::ConditionViolated)
        );
    }

    #[test]
    fn spec_text_round_trip() {
        let s: ChannelSpec = "psi+,psi+,psi-,psi-;basis=+/-;sign=+".parse().unwrap();
        assert_eq!(s, zha_state().spec);
        assert_eq!(s.to_string(), "psi+,psi+,psi-,psi-;basis=+/-;sign=+");
        let s: ChannelSpec = "phi-,psi+,psi-,phi+;basis=theta=0.3,phi=1.25;sign=-"
            .parse()
            .unwrap();
        assert_eq!(
            s.charlie_basis,
            CharlieBasis::Angles {
                theta: 0.3,
                phi: 1.25
            }
        );
        assert_eq!(s.to_string().parse::<ChannelSpec>().unwrap(), s);
        assert_eq!(
            "psi+,psi+,psi-".parse::<ChannelSpec>().map(|_| ()),
            Err(Error::Parse("expected 4 Bell states, found 3".into()))
        );
        assert!("psi+,psi+,psi-,psi-;basis=x"
            .parse::<ChannelSpec>()
            .is_err());
        assert!("psi+,psi+,psi-,psi-;sign=*".parse::<ChannelSpec>().is_err());
        assert!("psi+,psi+,psi-,psi-;color=red"
            .parse::<ChannelSpec>()
            .is_err());
    }

    #[test]
    fn layout_rejects_non_permutations() {
        assert!(QubitLayout::new([0, 1, 2, 3, 3]).is_err());
        assert!(QubitLayout::from_labels(0, 1, 2, 3, 4).is_err());
        let li = li_state().layout;
        assert_eq!(li.owner(1), Some(Party::Charlie));
        assert_eq!(li.owner(0), Some(Party::Bob));
        assert_eq!(li.owner(4), Some(Party::Alice));
    }
}
