//! What happens when Charlie keeps his outcome to himself: the worst branch
//! and the Haar-averaged infidelity.

use bcst::channel::{li_state, zha_state};
use bcst::protocol::{disclosure_witness, exact_infidelity_without_disclosure};

fn main() -> bcst::Result<()> {
    for named in [zha_state(), li_state()] {
        let avg = exact_infidelity_without_disclosure(&named.spec)?;
        println!(
            "{}: mean infidelity A→B {:.4}  B→A {:.4}",
            named.name, avg.a_to_b, avg.b_to_a
        );
        if let Some(w) = disclosure_witness(&named.spec)? {
            println!(
                "  worst branch: {} fidelity {:.4} (Charlie {:?}, SMOs {} {})",
                w.direction, w.fidelity, w.branch.charlie_outcome, w.branch.smo_a, w.branch.smo_b
            );
        }
    }
    Ok(())
}
