//! Magnetic and electric helicity of the hopfion at t = 0 on refining grids.

use knotlight::fields::hopf_ranada;
use knotlight::topology::{helicity, GridSpec};

fn main() -> knotlight::Result<()> {
    let hr = hopf_ranada();
    for half in [6.0, 12.0] {
        for n in [32, 64, 96] {
            let h = helicity(&hr, 0.0, &GridSpec::cube(-half, half, n)?)?;
            println!(
                "box [-{half}, {half}]^3, {n}^3: magnetic {:.6}, electric {:.6}",
                h.magnetic, h.electric
            );
        }
    }
    println!("4 pi^2 = {:.6}", 4.0 * std::f64::consts::PI.powi(2));
    Ok(())
}
