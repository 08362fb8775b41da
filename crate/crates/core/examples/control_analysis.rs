//! Reduced-state purity of each Bell pair, for a valid channel and for one
//! that breaks the condition.

use bcst::channel::{build_channel_state, control_report, ChannelSpec, QubitLayout};

fn main() -> bcst::Result<()> {
    for text in [
        "psi+,phi+,psi-,phi-;basis=0/1",
        "psi+,phi+,psi-,phi+",
        "psi+,phi+,psi+,phi+",
    ] {
        let spec: ChannelSpec = text.parse()?;
        let r = control_report(&build_channel_state(&spec), &QubitLayout::CANONICAL)?;
        println!(
            "{spec}\n  condition {}  purity A1B1 {:.3} (controlled: {})  purity A2B2 {:.3} (controlled: {})",
            spec.satisfies_condition(),
            r.purity_ab,
            r.dir_ab_controlled,
            r.purity_ba,
            r.dir_ba_controlled
        );
    }
    Ok(())
}
