//! Checks the three printed channel states against their Bell-pair
//! constructions and reports which directions are controlled.

use bcst::channel::verify_published_states;

fn main() -> bcst::Result<()> {
    for c in verify_published_states()? {
        let verdict = |controlled| {
            if controlled {
                "controlled"
            } else {
                "uncontrolled"
            }
        };
        println!(
            "{:<10} 1-F={:+.1e}  condition={}  A→B {} (purity {:.3})  B→A {} (purity {:.3})",
            c.name,
            c.residual,
            c.satisfies_condition,
            verdict(c.control.dir_ab_controlled),
            c.control.purity_ab,
            verdict(c.control.dir_ba_controlled),
            c.control.purity_ba,
        );
    }
    Ok(())
}
