//! Independent reference computations for the integration tests.
//!
//! Everything here works on raw amplitude arrays with hand-written index
//! arithmetic, so it shares no simulation code with the library. Library
//! enums are used only as labels.

#![allow(dead_code)]

use std::path::PathBuf;

use bcst::bell::{BellKind, PauliKind, Smo};
use num_complex::Complex64 as C;

pub const TOL: f64 = 1e-12;

fn r(x: f64) -> C {
    C::new(x, 0.0)
}

/// `(|00⟩ ± |11⟩)/√2`, `(|01⟩ ± |10⟩)/√2` over `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn bell(k: BellKind) -> [C; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match k.symbol() {
        "psi+" => [r(h), r(0.0), r(0.0), r(h)],
        "psi-" => [r(h), r(0.0), r(0.0), r(-h)],
        "phi+" => [r(0.0), r(h), r(h), r(0.0)],
        "phi-" => [r(0.0), r(h), r(-h), r(0.0)],
        other => unreachable!("{other}"),
    }
}

/// Generalized pair on `(sender, receiver)`: `a|00⟩ ± b|11⟩` or `a|01⟩ ± b|10⟩`.
pub fn gen_bell(k: BellKind, a: f64, b: f64) -> [C; 4] {
    match k.symbol() {
        "psi+" => [r(a), r(0.0), r(0.0), r(b)],
        "psi-" => [r(a), r(0.0), r(0.0), r(-b)],
        "phi+" => [r(0.0), r(a), r(b), r(0.0)],
        "phi-" => [r(0.0), r(a), r(-b), r(0.0)],
        other => unreachable!("{other}"),
    }
}

pub fn pauli(p: PauliKind) -> [[C; 2]; 2] {
    match p.symbol() {
        "I" => [[r(1.0), r(0.0)], [r(0.0), r(1.0)]],
        "X" => [[r(0.0), r(1.0)], [r(1.0), r(0.0)]],
        "Z" => [[r(1.0), r(0.0)], [r(0.0), r(-1.0)]],
        "iY" => [[r(0.0), r(1.0)], [r(-1.0), r(0.0)]],
        other => unreachable!("{other}"),
    }
}

/// Outcome encoding `00 ψ⁺, 01 φ⁺, 10 ψ⁻, 11 φ⁻`.
pub fn smo_outcome(m: Smo) -> BellKind {
    let symbol = match m.to_string().as_str() {
        "00" => "psi+",
        "01" => "phi+",
        "10" => "psi-",
        "11" => "phi-",
        other => unreachable!("{other}"),
    };
    symbol.parse().unwrap()
}

/// Receiver's unnormalized qubit after the sender projects
/// `(input, sender half)` onto `outcome`.
pub fn receiver_after(pair: &[C; 4], outcome: &[C; 4], input: &[C; 2]) -> [C; 2] {
    let mut out = [C::default(); 2];
    for (j, o) in out.iter_mut().enumerate() {
        for i in 0..2 {
            for s in 0..2 {
                *o += outcome[2 * i + s].conj() * input[i] * pair[2 * s + j];
            }
        }
    }
    out
}

pub fn apply2(m: &[[C; 2]; 2], v: &[C; 2]) -> [C; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn fidelity2(u: &[C; 2], v: &[C; 2]) -> f64 {
    let ip = u[0].conj() * v[0] + u[1].conj() * v[1];
    let nu = u[0].norm_sqr() + u[1].norm_sqr();
    let nv = v[0].norm_sqr() + v[1].norm_sqr();
    ip.norm_sqr() / (nu * nv)
}

pub fn test_inputs() -> Vec<[C; 2]> {
    vec![
        [r(1.0), r(0.0)],
        [r(0.0), r(1.0)],
        [r(0.6), r(0.8)],
        [r(0.6), C::new(0.0, 0.8)],
        [r(0.28), C::new(0.576, -0.768)],
    ]
}

/// The unique Pauli restoring every test input, if exactly one exists.
pub fn unique_pauli(receiver: impl Fn(&[C; 2]) -> [C; 2]) -> Option<PauliKind> {
    let inputs = test_inputs();
    let fits: Vec<PauliKind> = PauliKind::ALL
        .into_iter()
        .filter(|&p| {
            inputs
                .iter()
                .all(|q| fidelity2(q, &apply2(&pauli(p), &receiver(q))) > 1.0 - TOL)
        })
        .collect();
    match fits.as_slice() {
        [p] => Some(*p),
        _ => None,
    }
}

pub type Grid = [[Option<PauliKind>; 4]; 4];

pub fn table1_oracle() -> Grid {
    let mut g = [[None; 4]; 4];
    for k in BellKind::ALL {
        for m in Smo::ALL {
            g[k.index()][m.index()] =
                unique_pauli(|q| receiver_after(&bell(k), &bell(smo_outcome(m)), q));
        }
    }
    g
}

/// `U` as printed, acting on `(data, ancilla)`.
pub fn printed_u(a: f64, b: f64) -> [[f64; 4]; 4] {
    let q = b / a;
    let s = (1.0 - q * q).sqrt();
    [
        [q, s, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [s, -q, 0.0, 0.0],
    ]
}

/// `U1` as printed.
pub fn printed_u1(a: f64, b: f64) -> [[f64; 4]; 4] {
    let q = b / a;
    let s = (1.0 - q * q).sqrt();
    [
        [0.0, 0.0, q, s],
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, s, -q],
    ]
}

/// Data qubit after the conversion step heralds ancilla `0`, plus the
/// probability weight of that herald (unnormalized).
pub fn heralded(k: BellKind, a: f64, b: f64, received: &[C; 2]) -> [C; 2] {
    let u = if k.is_phi() {
        printed_u1(a, b)
    } else {
        printed_u(a, b)
    };
    // |data, ancilla=0⟩ occupies indices 0 and 2
    let v = [received[0], C::default(), received[1], C::default()];
    let w: Vec<C> = (0..4)
        .map(|row| (0..4).map(|col| v[col] * u[row][col]).sum())
        .collect();
    [w[0], w[2]]
}

pub fn table3_oracle(a: f64, b: f64) -> Grid {
    let mut g = [[None; 4]; 4];
    for k in BellKind::ALL {
        for m in Smo::ALL {
            g[k.index()][m.index()] = unique_pauli(|q| {
                let received = receiver_after(&gen_bell(k, a, b), &bell(smo_outcome(m)), q);
                heralded(k, a, b, &received)
            });
        }
    }
    g
}

/// Success probability of one direction by summing heralded weights over
/// the four sender outcomes.
pub fn prob_success_oracle(k: BellKind, a: f64, b: f64, input: &[C; 2]) -> f64 {
    BellKind::ALL
        .into_iter()
        .map(|o| {
            let received = receiver_after(&gen_bell(k, a, b), &bell(o), input);
            let h = heralded(k, a, b, &received);
            h[0].norm_sqr() + h[1].norm_sqr()
        })
        .sum()
}

/// `⟨alice|_{13} ⟨bob|_{24} |x⟩_{12} |y⟩_{34}`.
pub fn swap_coefficient(x: BellKind, y: BellKind, alice: BellKind, bob: BellKind) -> C {
    let (x, y, al, bo) = (bell(x), bell(y), bell(alice), bell(bob));
    let mut c = C::default();
    for q1 in 0..2 {
        for q2 in 0..2 {
            for q3 in 0..2 {
                for q4 in 0..2 {
                    c += al[2 * q1 + q3].conj()
                        * bo[2 * q2 + q4].conj()
                        * x[2 * q1 + q2]
                        * y[2 * q3 + q4];
                }
            }
        }
    }
    c
}

/// `(alice, bob, sign)` for every nonzero term, Alice-major order.
pub fn swap_row_oracle(x: BellKind, y: BellKind) -> Vec<(BellKind, BellKind, char)> {
    let mut out = Vec::new();
    for alice in BellKind::ALL {
        for bob in BellKind::ALL {
            let c = swap_coefficient(x, y, alice, bob);
            if c.norm() > TOL {
                assert!((c.norm() - 0.5).abs() < TOL && c.im.abs() < TOL, "{c}");
                out.push((alice, bob, if c.re > 0.0 { '+' } else { '-' }));
            }
        }
    }
    out
}

/// Bob's outcome for each Alice outcome.
pub fn correlation_map(x: BellKind, y: BellKind) -> [BellKind; 4] {
    let row = swap_row_oracle(x, y);
    BellKind::ALL.map(|a| row.iter().find(|t| t.0 == a).unwrap().1)
}

pub fn valid_quadruples() -> Vec<[BellKind; 4]> {
    let k = BellKind::ALL;
    let mut out = Vec::new();
    for a in k {
        for b in k {
            for c in k {
                for d in k {
                    if a != c && b != d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// Exact agreement probability when Bob always assumes the first branch.
pub fn withheld_agreement_oracle(q: [BellKind; 4]) -> f64 {
    let first = correlation_map(q[0], q[1]);
    let second = correlation_map(q[2], q[3]);
    let agreeing = BellKind::ALL
        .iter()
        .filter(|alice| {
            let bob = second[alice.index()];
            let inferred = BellKind::ALL
                .into_iter()
                .find(|a| first[a.index()] == bob)
                .unwrap();
            inferred == **alice
        })
        .count();
    0.5 + 0.5 * agreeing as f64 / 4.0
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
        .join(name)
}

/// Compares `actual` with the committed golden file. With `BCST_BLESS=1`
/// the file is rewritten instead.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_path(name);
    if std::env::var_os("BCST_BLESS").is_some_and(|v| v == "1") {
        std::fs::write(&path, actual).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path)
        .map_err(|e| format!("{}: {e} (run with BCST_BLESS=1 to create)", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!(
            "{} changed:\n--- golden\n{expected}--- actual\n{actual}",
            path.display()
        ))
    }
}
