//! One sampled run of the perfect protocol with its event log, then the
//! exact branch tree for the same inputs.

use bcst::channel::zha_state;
use bcst::protocol::{run_bcst, run_bcst_exhaustive, UnknownQubit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bcst::Result<()> {
    let spec = zha_state().spec;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let a = UnknownQubit::haar(&mut rng);
    let b = UnknownQubit::real(0.6, 0.8);

    let r = run_bcst(&spec, &a, &b, true, &mut rng)?;
    for e in &r.transcript.events {
        println!("{:>2} {:?} {:?}", e.index, e.party, e.action);
    }
    println!(
        "fidelity A→B {:.12}  B→A {:.12}",
        r.fidelity_a_to_b, r.fidelity_b_to_a
    );

    let s = run_bcst_exhaustive(&spec, &a, &b)?;
    println!(
        "{} branches, total probability {:.12}, worst fidelity {:.12} / {:.12}",
        s.branches.len(),
        s.total_probability,
        s.min_fidelity.a_to_b,
        s.min_fidelity.b_to_a
    );
    Ok(())
}
