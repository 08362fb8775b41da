//! Teleportation over non-maximally entangled pairs: exact success
//! probability and a seeded Monte Carlo estimate.

use bcst::channel::zha_state;
use bcst::probabilistic::{monte_carlo, success_probability, GenBellParams, ProbChannelSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bcst::Result<()> {
    let params = GenBellParams::new(0.8, 0.6)?;
    let spec = ProbChannelSpec::from_channel(&zha_state().spec, params, params);
    println!("{spec}");

    let p = success_probability(&spec)?;
    println!(
        "exact success A→B {:.6}  B→A {:.6} (closed form {:.6})",
        p.numeric.a_to_b, p.numeric.b_to_a, p.analytic.a_to_b
    );

    let mc = monte_carlo(&spec, 5_000, &mut ChaCha8Rng::seed_from_u64(7))?;
    println!(
        "{} trials: {:.4} / {:.4}, worst fidelity on success {:.12}",
        mc.trials,
        mc.success_rate.a_to_b,
        mc.success_rate.b_to_a,
        mc.min_success_fidelity
            .a_to_b
            .min(mc.min_success_fidelity.b_to_a)
    );
    Ok(())
}
