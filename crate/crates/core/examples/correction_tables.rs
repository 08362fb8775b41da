//! Rebuilds both Pauli correction tables from scratch and lists where they
//! disagree with the published ones.

use bcst::bell::{derive_correction_table, diff_tables, published_table_1};
use bcst::probabilistic::{derive_prob_correction_table, published_table_3};

fn main() -> bcst::Result<()> {
    let derived = derive_correction_table()?;
    print!("{}", derived.to_data_string());
    for (name, d, p) in [
        ("perfect", derived, published_table_1()),
        (
            "probabilistic",
            derive_prob_correction_table()?,
            published_table_3(),
        ),
    ] {
        let diff = diff_tables(&d, &p);
        println!("{name}: {} differing cells", diff.len());
        for m in diff {
            println!(
                "  shared={} smo={} derived={} published={}",
                m.shared, m.smo, m.left, m.right
            );
        }
    }
    Ok(())
}
