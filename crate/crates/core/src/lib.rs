//! Exact simulation and verification of bidirectional controlled
//! teleportation over five-qubit channels.
//!
//! A channel is two Bell-pair products entangled with a controller qubit:
//! `(|ψ1⟩|ψ2⟩|a⟩ ± |ψ3⟩|ψ4⟩|b⟩)/√2` on `(A1, B1, A2, B2, C1)`. Alice sends
//! over `A1B1`, Bob over `A2B2`, and Charlie measures `C1` to decide which
//! Bell pairs they actually share.
//!
//! - [`qcore`]: dense statevectors (≤ 8 qubits), gates, sampled and
//!   exhaustive measurement, reduced density matrices.
//! - [`bell`]: Bell states, Pauli corrections and the correction-table oracle.
//! - [`channel`]: channel construction, the validity condition, control
//!   analysis and the published example states.
//! - [`protocol`]: the perfect protocol, sampled or branch by branch.
//! - [`probabilistic`]: the heralded variant over `a|00⟩ ± b|11⟩` pairs.
//! - [`keyswap`]: key agreement by entanglement swapping.
//! - [`cli`]: the `bcst` command line.
//!
//! Runnable walk-throughs live in `examples/`: `enumerate_channels`,
//! `published_states`, `control_analysis`, `perfect_bcst`,
//! `disclosure_necessity`, `correction_tables`, `probabilistic_bcst` and
//! `key_agreement`.
//!
//! ```
//! use bcst::channel::{zha_state, enumerate_valid, CharlieBasis, Sign};
//! use bcst::protocol::{run_bcst_exhaustive, UnknownQubit};
//!
//! assert_eq!(enumerate_valid(CharlieBasis::PlusMinus, Sign::Plus).len(), 144);
//! let q = UnknownQubit::real(0.6, 0.8);
//! let s = run_bcst_exhaustive(&zha_state().spec, &q, &q).unwrap();
//! assert!(s.min_fidelity.a_to_b > 1.0 - 1e-12);
//! ```

pub mod bell;
pub mod channel;
pub mod cli;
mod error;
pub mod keyswap;
pub mod probabilistic;
pub mod protocol;
pub mod qcore;
mod register;

pub use error::{Error, Result};
