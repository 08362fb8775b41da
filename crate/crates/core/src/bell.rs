//! Bell states, Pauli corrections and teleportation correction tables.
//!
//! A [`CorrectionTable`] maps the Bell state shared by sender and receiver
//! together with the sender's measurement outcome ([`Smo`]) to the Pauli the
//! receiver applies. Tables exist in two flavors: the published one, loaded
//! from `data/table1.txt`, and one derived here from first principles by
//! simulating the sender's Bell measurement and searching the Pauli set.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::protocol::UnknownQubit;
use crate::qcore::{
    apply_1q, fidelity_pure, measure_bell_pair_branches, tensor, Matrix2, StateVector, TOL,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellKind {
    /// `(|00⟩ + |11⟩)/√2`
    PsiPlus,
    /// `(|00⟩ − |11⟩)/√2`
    PsiMinus,
    /// `(|01⟩ + |10⟩)/√2`
    PhiPlus,
    /// `(|01⟩ − |10⟩)/√2`
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PsiPlus,
        BellKind::PsiMinus,
        BellKind::PhiPlus,
        BellKind::PhiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// True for the `φ` family (support on `|01⟩, |10⟩`).
    pub fn is_phi(self) -> bool {
        matches!(self, BellKind::PhiPlus | BellKind::PhiMinus)
    }

    pub fn is_minus(self) -> bool {
        matches!(self, BellKind::PsiMinus | BellKind::PhiMinus)
    }

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩` before the `1/√2` factor.
    pub fn signs(self) -> [f64; 4] {
        match self {
            BellKind::PsiPlus => [1.0, 0.0, 0.0, 1.0],
            BellKind::PsiMinus => [1.0, 0.0, 0.0, -1.0],
            BellKind::PhiPlus => [0.0, 1.0, 1.0, 0.0],
            BellKind::PhiMinus => [0.0, 1.0, -1.0, 0.0],
        }
    }

    pub fn state(self) -> StateVector {
        bell_state(self)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BellKind::ALL
            .into_iter()
            .find(|k| k.symbol() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown Bell state `{s}`")))
    }
}

impl Serialize for BellKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for BellKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn bell_state(k: BellKind) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_parts_unchecked(
        2,
        k.signs()
            .iter()
            .map(|&x| crate::qcore::real(x * h))
            .collect(),
    )
}

/// Corrections a receiver may apply. `IY` is the real matrix `[[0,1],[-1,0]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliKind {
    I,
    X,
    Z,
    IY,
}

impl PauliKind {
    pub const ALL: [PauliKind; 4] = [PauliKind::I, PauliKind::X, PauliKind::Z, PauliKind::IY];

    pub fn matrix(self) -> Matrix2 {
        pauli_matrix(self)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PauliKind::I => "I",
            PauliKind::X => "X",
            PauliKind::Z => "Z",
            PauliKind::IY => "iY",
        }
    }
}

impl fmt::Display for PauliKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for PauliKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PauliKind::ALL
            .into_iter()
            .find(|p| p.symbol() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown Pauli `{s}`")))
    }
}

impl Serialize for PauliKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

pub fn pauli_matrix(p: PauliKind) -> Matrix2 {
    match p {
        PauliKind::I => Matrix2::identity(),
        PauliKind::X => Matrix2::from_reals([[0.0, 1.0], [1.0, 0.0]]),
        PauliKind::Z => Matrix2::from_reals([[1.0, 0.0], [0.0, -1.0]]),
        PauliKind::IY => Matrix2::from_reals([[0.0, 1.0], [-1.0, 0.0]]),
    }
}

/// Sender's measurement outcome as two classical bits.
///
/// `phase` is the first bit, `parity` the second:
/// `00 ↔ ψ⁺`, `01 ↔ φ⁺`, `10 ↔ ψ⁻`, `11 ↔ φ⁻`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Smo {
    pub phase: bool,
    pub parity: bool,
}

impl Smo {
    pub const ALL: [Smo; 4] = [
        Smo::new(false, false),
        Smo::new(false, true),
        Smo::new(true, false),
        Smo::new(true, true),
    ];

    pub const fn new(phase: bool, parity: bool) -> Self {
        Smo { phase, parity }
    }

    pub fn from_bell(k: BellKind) -> Self {
        Smo::new(k.is_minus(), k.is_phi())
    }

    pub fn to_bell(self) -> BellKind {
        match (self.phase, self.parity) {
            (false, false) => BellKind::PsiPlus,
            (false, true) => BellKind::PhiPlus,
            (true, false) => BellKind::PsiMinus,
            (true, true) => BellKind::PhiMinus,
        }
    }

    pub fn index(self) -> usize {
        (self.phase as usize) << 1 | self.parity as usize
    }

    pub fn bits(self) -> [u8; 2] {
        [self.phase as u8, self.parity as u8]
    }
}

impl fmt::Display for Smo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase as u8, self.parity as u8)
    }
}

impl FromStr for Smo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "00" => Ok(Smo::new(false, false)),
            "01" => Ok(Smo::new(false, true)),
            "10" => Ok(Smo::new(true, false)),
            "11" => Ok(Smo::new(true, true)),
            other => Err(Error::Parse(format!("SMO must be two bits, got `{other}`"))),
        }
    }
}

impl Serialize for Smo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Total map `(shared Bell state, SMO) → Pauli`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionTable {
    cells: [[PauliKind; 4]; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TableMismatch {
    pub shared: BellKind,
    pub smo: Smo,
    pub left: PauliKind,
    pub right: PauliKind,
}

impl CorrectionTable {
    pub fn from_fn(mut f: impl FnMut(BellKind, Smo) -> PauliKind) -> Self {
        let mut cells = [[PauliKind::I; 4]; 4];
        for k in BellKind::ALL {
            for m in Smo::ALL {
                cells[k.index()][m.index()] = f(k, m);
            }
        }
        CorrectionTable { cells }
    }

    pub fn get(&self, shared: BellKind, smo: Smo) -> PauliKind {
        self.cells[shared.index()][smo.index()]
    }

    /// Entries ordered by shared state, then SMO.
    pub fn entries(&self) -> impl Iterator<Item = (BellKind, Smo, PauliKind)> + '_ {
        BellKind::ALL
            .into_iter()
            .flat_map(move |k| Smo::ALL.into_iter().map(move |m| (k, m, self.get(k, m))))
    }

    /// Each column (fixed shared state) uses all four Paulis.
    pub fn is_column_bijective(&self) -> bool {
        BellKind::ALL.into_iter().all(|k| {
            let mut col: Vec<PauliKind> = Smo::ALL.iter().map(|&m| self.get(k, m)).collect();
            col.sort();
            col.dedup();
            col.len() == 4
        })
    }

    /// Parses the `shared=psi+ smo=00 pauli=I` line format. Every key must
    /// appear exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cells: [[Option<PauliKind>; 4]; 4] = [[None; 4]; 4];
        for (n, line) in data_lines(text) {
            let fields = parse_fields(n, line, &["shared", "smo", "pauli"])?;
            let err = |e: Error| Error::TableData {
                line: n,
                message: e.to_string(),
            };
            let k: BellKind = fields[0].parse().map_err(err)?;
            let m: Smo = fields[1].parse().map_err(err)?;
            let p: PauliKind = fields[2].parse().map_err(err)?;
            let cell = &mut cells[k.index()][m.index()];
            if cell.replace(p).is_some() {
                return Err(Error::TableData {
                    line: n,
                    message: format!("duplicate entry for ({k}, {m})"),
                });
            }
        }
        let mut out = [[PauliKind::I; 4]; 4];
        for k in BellKind::ALL {
            for m in Smo::ALL {
                out[k.index()][m.index()] =
                    cells[k.index()][m.index()].ok_or_else(|| Error::TableData {
                        line: 0,
                        message: format!("missing entry for ({k}, {m})"),
                    })?;
            }
        }
        Ok(CorrectionTable { cells: out })
    }

    pub fn to_data_string(&self) -> String {
        self.entries()
            .map(|(k, m, p)| format!("shared={k} smo={m} pauli={p}\n"))
            .collect()
    }
}

/// Non-empty, non-comment lines with 1-based line numbers.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Splits `k1=v1 k2=v2 ...` and checks the keys appear in `keys` order.
pub(crate) fn parse_fields<'a>(
    line_no: usize,
    line: &'a str,
    keys: &[&str],
) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != keys.len() {
        return Err(Error::TableData {
            line: line_no,
            message: format!("expected {} fields, found {}", keys.len(), parts.len()),
        });
    }
    parts
        .iter()
        .zip(keys)
        .map(|(part, key)| match part.split_once('=') {
            Some((k, v)) if k == *key => Ok(v),
            _ => Err(Error::TableData {
                line: line_no,
                message: format!("expected `{key}=...`, found `{part}`"),
            }),
        })
        .collect()
}

/// Deterministic cell-by-cell difference, ordered by shared state then SMO.
pub fn diff_tables(t1: &CorrectionTable, t2: &CorrectionTable) -> Vec<TableMismatch> {
    t1.entries()
        .zip(t2.entries())
        .filter(|((_, _, a), (_, _, b))| a != b)
        .map(|((shared, smo, left), (_, _, right))| TableMismatch {
            shared,
            smo,
            left,
            right,
        })
        .collect()
}

/// The published perfect-teleportation table, verbatim.
pub fn published_table_1() -> CorrectionTable {
    CorrectionTable::parse(include_str!("../data/table1.txt")).expect("embedded table 1 is valid")
}

/// Inputs used to certify that a correction is unique: three fixed
/// non-degenerate states, one with a relative complex phase, and a few
/// seeded Haar-random ones.
pub fn oracle_inputs() -> Vec<UnknownQubit> {
    let mut inputs = vec![
        UnknownQubit::real(1.0, 0.0),
        UnknownQubit::real(0.0, 1.0),
        UnknownQubit::real(0.6, 0.8),
        UnknownQubit::new(crate::qcore::real(0.6), crate::qcore::c(0.0, 0.8)).expect("normalized"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5e_55ed);
    inputs.extend((0..3).map(|_| UnknownQubit::haar(&mut rng)));
    inputs
}

/// Finds the unique Pauli that maps `receiver(input)` back onto `input`
/// (up to global phase) for every oracle input.
///
/// `receiver` returns the receiver's single-qubit state before correction.
pub fn unique_correction(
    shared: BellKind,
    smo: Smo,
    mut receiver: impl FnMut(&UnknownQubit) -> Result<StateVector>,
) -> Result<PauliKind> {
    let inputs = oracle_inputs();
    let states = inputs
        .iter()
        .map(|q| receiver(q).map(|s| (q.state(), s)))
        .collect::<Result<Vec<_>>>()?;
    let mut candidates = Vec::new();
    for p in PauliKind::ALL {
        let mut ok = true;
        for (target, got) in &states {
            let corrected = apply_1q(got, 0, &p.matrix())?;
            if fidelity_pure(target, &corrected)? < 1.0 - TOL {
                ok = false;
                break;
            }
        }
        if ok {
            candidates.push(p);
        }
    }
    match candidates.as_slice() {
        [p] => Ok(*p),
        _ => Err(Error::NoUniqueCorrection {
            shared,
            smo,
            candidates: candidates.len(),
        }),
    }
}

/// Receiver's state after the sender Bell-measures `(unknown, own half)` of
/// `|input⟩ ⊗ |shared⟩` and obtains `smo`. The shared pair is ordered
/// `(sender, receiver)`.
pub fn teleported_state(
    shared: &StateVector,
    smo: Smo,
    input: &UnknownQubit,
) -> Result<StateVector> {
    let s = tensor(&[input.state(), shared.clone()])?;
    let outcome = smo.to_bell();
    let branch = measure_bell_pair_branches(&s, 0, 1)?
        .into_iter()
        .find(|b| b.outcome == outcome)
        .ok_or(Error::DegenerateBranch { probability: 0.0 })?;
    branch.state.contract(&[0, 1], &outcome.state())
}

/// Rebuilds the perfect-teleportation table by brute force.
pub fn derive_correction_table() -> Result<CorrectionTable> {
    let mut cells = [[PauliKind::I; 4]; 4];
    for shared in BellKind::ALL {
        for smo in Smo::ALL {
            cells[shared.index()][smo.index()] =
                unique_correction(shared, smo, |q| teleported_state(&shared.state(), smo, q))?;
        }
    }
    Ok(CorrectionTable { cells })
}

/// Cached result of [`derive_correction_table`].
pub fn perfect_corrections() -> Result<&'static CorrectionTable> {
    static TABLE: OnceLock<Result<CorrectionTable>> = OnceLock::new();
    TABLE
        .get_or_init(derive_correction_table)
        .as_ref()
        .map_err(Clone::clone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::real;

    #[test]
    fn bell_amplitudes() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(
            BellKind::PsiPlus.state().amps(),
            &[real(h), real(0.0), real(0.0), real(h)]
        );
        assert_eq!(
            BellKind::PhiMinus.state().amps(),
            &[real(0.0), real(h), real(-h), real(0.0)]
        );
    }

    #[test]
    fn bell_states_are_orthonormal() {
        for j in BellKind::ALL {
            for k in BellKind::ALL {
                let ip = j.state().inner(&k.state()).unwrap();
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((ip - real(expect)).norm() < TOL);
            }
        }
    }

    #[test]
    fn paulis_are_unitary() {
        for p in PauliKind::ALL {
            assert!(p.matrix().is_unitary(), "{p}");
        }
        assert_eq!(pauli_matrix(PauliKind::IY).0[1][0], real(-1.0));
    }

    #[test]
    fn smo_encoding_round_trips() {
        for k in BellKind::ALL {
            assert_eq!(Smo::from_bell(k).to_bell(), k);
        }
        assert_eq!(Smo::from_bell(BellKind::PhiPlus).to_string(), "01");
        assert_eq!(Smo::from_bell(BellKind::PsiMinus).to_string(), "10");
        assert_eq!("11".parse::<Smo>().unwrap().to_bell(), BellKind::PhiMinus);
        assert!("2".parse::<Smo>().is_err());
    }

    #[test]
    fn published_table_cells() {
        let t = published_table_1();
        let cell = |k: &str, m: &str| t.get(k.parse().unwrap(), m.parse().unwrap());
        assert_eq!(cell("psi+", "00"), PauliKind::I);
        assert_eq!(cell("psi-", "00"), PauliKind::Z);
        assert_eq!(cell("phi+", "11"), PauliKind::Z);
        assert_eq!(cell("phi-", "01"), PauliKind::Z);
        assert_eq!(cell("psi+", "01"), PauliKind::X);
        assert_eq!(cell("phi+", "10"), PauliKind::IY);
        assert_eq!(cell("phi-", "11"), PauliKind::I);
    }

    #[test]
    fn derived_table_cells() {
        let t = derive_correction_table().unwrap();
        let s = |b: &str| b.parse::<Smo>().unwrap();
        assert_eq!(t.get(BellKind::PsiPlus, s("00")), PauliKind::I);
        assert_eq!(t.get(BellKind::PhiPlus, s("01")), PauliKind::I);
        assert_eq!(t.get(BellKind::PsiMinus, s("01")), PauliKind::IY);
        assert!(t.is_column_bijective());
        let standard = [PauliKind::I, PauliKind::X, PauliKind::Z, PauliKind::IY];
        for (m, p) in Smo::ALL.iter().zip(standard) {
            assert_eq!(t.get(BellKind::PsiPlus, *m), p);
        }
    }

    #[test]
    fn parse_rejects_incomplete_or_duplicate_tables() {
        let full = published_table_1().to_data_string();
        let missing: String = full.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            CorrectionTable::parse(&missing),
            Err(Error::TableData { .. })
        ));
        let dup = format!("{full}shared=psi+ smo=00 pauli=I\n");
        assert!(matches!(
            CorrectionTable::parse(&dup),
            Err(Error::TableData { .. })
        ));
        assert!(CorrectionTable::parse("shared=psi+ smo=00").is_err());
        assert_eq!(CorrectionTable::parse(&full).unwrap(), published_table_1());
    }

    #[test]
    fn diff_is_empty_for_identical_tables() {
        let t = published_table_1();
        assert!(diff_tables(&t, &t).is_empty());
    }
}
