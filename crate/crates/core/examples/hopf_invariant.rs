//! Monte Carlo Hopf invariants of the three sphere maps.

use knotlight::topology::hopf_invariant;

fn main() -> knotlight::Result<()> {
    for i in 1..=3 {
        let h = hopf_invariant(i, 10_000, 7)?;
        println!("H(l_{i}) = {:+.12} +- {:.1e}", h.value, h.standard_error);
    }
    Ok(())
}
