//! Counts the channel quadruples that keep both directions under Charlie's
//! control, for the `±` basis and a few random ones.

use bcst::channel::{enumerate_all, enumerate_valid, table_2_rows, CharlieBasis, Sign};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let total = enumerate_all(CharlieBasis::PlusMinus, Sign::Plus).len();
    let valid = enumerate_valid(CharlieBasis::PlusMinus, Sign::Plus);
    println!(
        "{total} quadruples, {} satisfy ψ1 ≠ ψ3 and ψ2 ≠ ψ4",
        valid.len()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let basis = CharlieBasis::random(&mut rng);
        println!(
            "  basis {basis}: {}",
            enumerate_valid(basis, Sign::Minus).len()
        );
    }

    let listed = table_2_rows()
        .iter()
        .filter(|row| valid.iter().any(|s| &s.psi == *row))
        .count();
    println!("published examples present: {listed}/9");
}
