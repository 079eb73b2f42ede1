//! Null tetrad and optical scalars of the hopfion's principal null direction.

use knotlight::fields::{hopf_ranada, null_tetrad, optical_scalars};

fn main() -> knotlight::Result<()> {
    let hr = hopf_ranada();
    for p in [[0.0, 0.3, -0.2, 0.5], [0.7, 1.0, 0.4, -0.6]] {
        let t = null_tetrad(&hr, &p)?;
        let o = optical_scalars(&hr, &p)?;
        println!("at {p:?}");
        println!("  k = {:?}, tetrad residual {:.1e}", t.k, t.residual());
        println!(
            "  expansion {:.4}, twist {:.4}, shear {:.1e}, geodesic residual {:.1e}",
            o.expansion, o.twist, o.shear, o.geodesic_residual
        );
    }
    Ok(())
}
