//! Key agreement by entanglement swapping under Charlie's control.
//!
//! After Charlie's measurement Alice and Bob share `|x⟩_{A1B1} |y⟩_{A2B2}`.
//! Alice Bell-measures her two qubits `(A1, A2)` and Bob his `(B1, B2)`.
//! Bob's outcome is a fixed function of Alice's outcome and of the initial
//! product, so knowing `(x, y)` he can infer her outcome and both sides read
//! the same two key bits off it.

use rand::Rng;
use serde::Serialize;

use crate::bell::{data_lines, parse_fields, BellKind};
use crate::channel::{
    branch_products, build_channel_state, check_condition, enumerate_valid, ChannelSpec,
    CharlieBasis, Factorization, Sign,
};
use crate::qcore::{permute_qubits, tensor, BasisOutcome, TOL};
use crate::register::Register;
use crate::{Error, Result};

/// Sign of a `±½` expansion coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermSign {
    Plus,
    Minus,
}

impl std::fmt::Display for TermSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TermSign::Plus => "+",
            TermSign::Minus => "-",
        })
    }
}

impl Serialize for TermSign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One term `±½ |alice⟩_{13} |bob⟩_{24}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SwapEntry {
    pub alice: BellKind,
    pub bob: BellKind,
    pub sign: TermSign,
}

/// Expansion of `|x⟩_{12} |y⟩_{34}` over the `(1,3)(2,4)` Bell basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwapRow {
    pub init: (BellKind, BellKind),
    /// Sorted by Alice's outcome, then Bob's.
    pub terms: Vec<SwapEntry>,
}

impl SwapRow {
    /// True if every Alice outcome appears exactly once and every Bob
    /// outcome exactly once.
    pub fn is_bijection(&self) -> bool {
        let mut alice: Vec<_> = self.terms.iter().map(|t| t.alice).collect();
        let mut bob: Vec<_> = self.terms.iter().map(|t| t.bob).collect();
        alice.sort();
        alice.dedup();
        bob.sort();
        bob.dedup();
        self.terms.len() == 4 && alice.len() == 4 && bob.len() == 4
    }

    pub fn bob_for(&self, alice: BellKind) -> Option<BellKind> {
        self.terms.iter().find(|t| t.alice == alice).map(|t| t.bob)
    }

    pub fn alice_for(&self, bob: BellKind) -> Option<BellKind> {
        self.terms.iter().find(|t| t.bob == bob).map(|t| t.alice)
    }

    fn same_outcomes(&self, other: &SwapRow) -> bool {
        let strip = |r: &SwapRow| -> Vec<(BellKind, BellKind)> {
            r.terms.iter().map(|t| (t.alice, t.bob)).collect()
        };
        strip(self) == strip(other)
    }
}

/// All 16 rows, ordered by initial product in [`BellKind::ALL`] order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwapTable {
    rows: Vec<SwapRow>,
}

fn init_index((x, y): (BellKind, BellKind)) -> usize {
    x.index() * 4 + y.index()
}

impl SwapTable {
    pub fn rows(&self) -> &[SwapRow] {
        &self.rows
    }

    pub fn row(&self, init: (BellKind, BellKind)) -> &SwapRow {
        &self.rows[init_index(init)]
    }

    /// Parses `init=psi+,psi+ alice=phi+ bob=phi+ sign=+` lines. Every
    /// initial product must have exactly four terms.
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms: Vec<Vec<SwapEntry>> = vec![Vec::new(); 16];
        for (n, line) in data_lines(text) {
            let f = parse_fields(n, line, &["init", "alice", "bob", "sign"])?;
            let err = |e: Error| Error::TableData {
                line: n,
                message: e.to_string(),
            };
            let (x, y) = f[0].split_once(',').ok_or_else(|| Error::TableData {
                line: n,
                message: format!("init must name two Bell states, got `{}`", f[0]),
            })?;
            let init = (x.parse().map_err(err)?, y.parse().map_err(err)?);
            let sign = match f[3] {
                "+" => TermSign::Plus,
                "-" => TermSign::Minus,
                other => {
                    return Err(Error::TableData {
                        line: n,
                        message: format!("sign must be + or -, got `{other}`"),
                    })
                }
            };
            terms[init_index(init)].push(SwapEntry {
                alice: f[1].parse().map_err(err)?,
                bob: f[2].parse().map_err(err)?,
                sign,
            });
        }
        let rows = all_inits()
            .zip(terms)
            .map(|(init, mut terms)| {
                if terms.len() != 4 {
                    return Err(Error::TableData {
                        line: 0,
                        message: format!(
                            "initial product {},{} has {} terms, expected 4",
                            init.0,
                            init.1,
                            terms.len()
                        ),
                    });
                }
                terms.sort();
                Ok(SwapRow { init, terms })
            })
            .collect::<Result<_>>()?;
        Ok(SwapTable { rows })
    }

    pub fn to_data_string(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            for t in &row.terms {
                out.push_str(&format!(
                    "init={},{} alice={} bob={} sign={}\n",
                    row.init.0, row.init.1, t.alice, t.bob, t.sign
                ));
            }
        }
        out
    }
}

fn all_inits() -> impl Iterator<Item = (BellKind, BellKind)> {
    BellKind::ALL
        .into_iter()
        .flat_map(|x| BellKind::ALL.into_iter().map(move |y| (x, y)))
}

/// Brute-force expansion by inner products against all 16 two-pair Bell
/// vectors on `(1,3)(2,4)`.
pub fn derive_swap_table() -> Result<SwapTable> {
    let rows = all_inits()
        .map(|(x, y)| {
            let product = tensor(&[x.state(), y.state()])?;
            // reorder 1,2,3,4 → 1,3,2,4
            let swapped = permute_qubits(&product, &[0, 2, 1, 3])?;
            let mut terms = Vec::new();
            for alice in BellKind::ALL {
                for bob in BellKind::ALL {
                    let c = tensor(&[alice.state(), bob.state()])?.inner(&swapped)?;
                    if c.norm() < TOL {
                        continue;
                    }
                    if (c.norm() - 0.5).abs() > TOL || c.im.abs() > TOL {
                        return Err(Error::NotBellProduct);
                    }
                    let sign = if c.re > 0.0 {
                        TermSign::Plus
                    } else {
                        TermSign::Minus
                    };
                    terms.push(SwapEntry { alice, bob, sign });
                }
            }
            Ok(SwapRow {
                init: (x, y),
                terms,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SwapTable { rows })
}

/// The published swapping table, verbatim.
pub fn published_table_4() -> SwapTable {
    SwapTable::parse(include_str!("../data/table4.txt")).expect("embedded table 4 is valid")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowDiff {
    pub init: (BellKind, BellKind),
    /// False if any `(alice, bob)` pairing differs; true if only signs do.
    pub outcomes_match: bool,
    pub left: Vec<SwapEntry>,
    pub right: Vec<SwapEntry>,
}

/// Rows that differ in any term (pairing or sign), in table order.
pub fn diff_swap_tables(left: &SwapTable, right: &SwapTable) -> Vec<RowDiff> {
    left.rows
        .iter()
        .zip(&right.rows)
        .filter(|(l, r)| l != r)
        .map(|(l, r)| RowDiff {
            init: l.init,
            outcomes_match: l.same_outcomes(r),
            left: l.terms.clone(),
            right: r.terms.clone(),
        })
        .collect()
}

/// Two key bits: `ψ⁺ → 00`, `ψ⁻ → 01`, `φ⁺ → 10`, `φ⁻ → 11`.
pub fn key_bits(k: BellKind) -> [u8; 2] {
    match k {
        BellKind::PsiPlus => [0, 0],
        BellKind::PsiMinus => [0, 1],
        BellKind::PhiPlus => [1, 0],
        BellKind::PhiMinus => [1, 1],
    }
}

fn derived() -> Result<&'static SwapTable> {
    static TABLE: std::sync::OnceLock<Result<SwapTable>> = std::sync::OnceLock::new();
    TABLE
        .get_or_init(derive_swap_table)
        .as_ref()
        .map_err(Clone::clone)
}

/// Alice's outcome implied by Bob's, given the initial product.
pub fn infer_alice_outcome(init: (BellKind, BellKind), bob: BellKind) -> Result<BellKind> {
    derived()?
        .row(init)
        .alice_for(bob)
        .ok_or(Error::NotBellProduct)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KeyRound {
    pub charlie_outcome: BasisOutcome,
    /// Product actually shared after Charlie's measurement.
    pub initial: (BellKind, BellKind),
    /// Product Bob used for inference.
    pub assumed: (BellKind, BellKind),
    pub alice_outcome: BellKind,
    pub bob_outcome: BellKind,
    pub alice_key: [u8; 2],
    pub bob_key: [u8; 2],
    pub disclosed: bool,
}

impl KeyRound {
    pub fn agree(&self) -> bool {
        self.alice_key == self.bob_key
    }
}

fn key_round(
    f: &Factorization,
    charlie_outcome: BasisOutcome,
    alice_outcome: BellKind,
    bob_outcome: BellKind,
    disclosed: bool,
) -> Result<KeyRound> {
    let initial = f.for_outcome(charlie_outcome);
    let assumed = if disclosed { initial } else { f.on_a };
    let inferred = infer_alice_outcome(assumed, bob_outcome)?;
    Ok(KeyRound {
        charlie_outcome,
        initial,
        assumed,
        alice_outcome,
        bob_outcome,
        alice_key: key_bits(alice_outcome),
        bob_key: key_bits(inferred),
        disclosed,
    })
}

fn channel_register(spec: &ChannelSpec) -> Result<(Factorization, Register)> {
    if !check_condition(spec) {
        return Err(Error::ConditionViolated);
    }
    Ok((
        branch_products(spec)?,
        Register::new(
            vec!["A1", "B1", "A2", "B2", "C1"],
            build_channel_state(spec),
        ),
    ))
}

/// One sampled round. Consumes three samples: Charlie, Alice, Bob.
pub fn run_key_round(spec: &ChannelSpec, disclose: bool, rng: &mut impl Rng) -> Result<KeyRound> {
    let (f, reg) = channel_register(spec)?;
    let (c, _, reg) = reg.measure("C1", &spec.charlie_basis.basis(), rng.random())?;
    let (alice, _, reg) = reg.measure_bell("A1", "A2", rng.random())?;
    let (bob, _, _) = reg.measure_bell("B1", "B2", rng.random())?;
    key_round(&f, c, alice, bob, disclose)
}

/// Every round outcome with its exact probability.
pub fn enumerate_key_rounds(spec: &ChannelSpec, disclose: bool) -> Result<Vec<(f64, KeyRound)>> {
    let (f, reg) = channel_register(spec)?;
    let mut out = Vec::new();
    for (c, p_c, reg) in reg.measure_all("C1", &spec.charlie_basis.basis())? {
        for (alice, p_a, reg) in reg.measure_bell_all("A1", "A2")? {
            for (bob, p_b, _) in reg.measure_bell_all("B1", "B2")? {
                out.push((p_c * p_a * p_b, key_round(&f, c, alice, bob, disclose)?));
            }
        }
    }
    Ok(out)
}

/// Exact probability that Alice's and Bob's keys agree.
pub fn exact_agreement_rate(spec: &ChannelSpec, disclose: bool) -> Result<f64> {
    Ok(enumerate_key_rounds(spec, disclose)?
        .iter()
        .filter(|(_, r)| r.agree())
        .map(|(p, _)| p)
        .sum())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KeyStats {
    pub rounds: usize,
    pub agreements: usize,
    pub agreement_rate: f64,
}

pub fn run_key_rounds(
    spec: &ChannelSpec,
    disclose: bool,
    rounds: usize,
    rng: &mut impl Rng,
) -> Result<KeyStats> {
    if rounds == 0 {
        return Err(Error::EmptySample);
    }
    let mut agreements = 0;
    for _ in 0..rounds {
        if run_key_round(spec, disclose, rng)?.agree() {
            agreements += 1;
        }
    }
    Ok(KeyStats {
        rounds,
        agreements,
        agreement_rate: agreements as f64 / rounds as f64,
    })
}

/// A Bob outcome from which the two Charlie branches imply different Alice
/// outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AmbiguityWitness {
    pub bob: BellKind,
    pub alice_if_a: BellKind,
    pub alice_if_b: BellKind,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KeySecurity {
    pub spec: ChannelSpec,
    /// The two branches induce different correlation maps, so Bob needs
    /// Charlie's outcome.
    pub secure: bool,
    pub witness: Option<AmbiguityWitness>,
    /// Exact agreement rate with Charlie's outcome withheld.
    pub withheld_agreement: f64,
}

/// First Bob outcome (in [`BellKind::ALL`] order) whose inferred Alice
/// outcome depends on Charlie's branch.
pub fn charlie_necessity_witness(f: &Factorization) -> Result<Option<AmbiguityWitness>> {
    for bob in BellKind::ALL {
        let alice_if_a = infer_alice_outcome(f.on_a, bob)?;
        let alice_if_b = infer_alice_outcome(f.on_b, bob)?;
        if alice_if_a != alice_if_b {
            return Ok(Some(AmbiguityWitness {
                bob,
                alice_if_a,
                alice_if_b,
            }));
        }
    }
    Ok(None)
}

pub fn classify_key_security(spec: &ChannelSpec) -> Result<KeySecurity> {
    let (f, _) = channel_register(spec)?;
    let witness = charlie_necessity_witness(&f)?;
    Ok(KeySecurity {
        spec: *spec,
        secure: witness.is_some(),
        witness,
        withheld_agreement: exact_agreement_rate(spec, false)?,
    })
}

/// Classification of every valid channel for the given basis and sign.
pub fn key_security_split(basis: CharlieBasis, sign: Sign) -> Result<Vec<KeySecurity>> {
    enumerate_valid(basis, sign)
        .iter()
        .map(classify_key_security)
        .collect()
}
