//! Key agreement by entanglement swapping, with and without Charlie's
//! announcement, plus the secure/insecure split of all valid channels.

use bcst::channel::{zha_prime_state, CharlieBasis, Sign};
use bcst::keyswap::{exact_agreement_rate, key_security_split, run_key_rounds};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bcst::Result<()> {
    let spec = zha_prime_state().spec;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for disclose in [true, false] {
        let stats = run_key_rounds(&spec, disclose, 2_000, &mut rng)?;
        println!(
            "disclose={disclose}: sampled {:.3}, exact {:.3}",
            stats.agreement_rate,
            exact_agreement_rate(&spec, disclose)?
        );
    }

    let split = key_security_split(CharlieBasis::PlusMinus, Sign::Plus)?;
    let secure = split.iter().filter(|k| k.secure).count();
    println!(
        "{secure} of {} channels need Charlie's outcome",
        split.len()
    );
    Ok(())
}
