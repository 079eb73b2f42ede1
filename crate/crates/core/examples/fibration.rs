//! Projected Hopf circles of the three left-invariant fields, written to VTK.

use knotlight::frames::FrameSide;
use knotlight::io::write_curves;
use knotlight::topology::{fibration, gauss_linking};

fn main() -> knotlight::Result<()> {
    let count = 6;
    let hc = fibration(FrameSide::Left, &[1, 2, 3], count, 400)?;
    println!("projection pole {:?} (shifted: {})", hc.pole, hc.pole_shifted);
    for axis in 0..3 {
        let c = &hc.curves[axis * count..(axis + 1) * count];
        let l = gauss_linking(&c[0], &c[1])?.value;
        println!(
            "axis {}: {} circles, linking of the first two {:.4}",
            axis + 1,
            c.len(),
            l
        );
    }
    let out = std::env::temp_dir().join("knotlight_fibration.vtk");
    write_curves(&out, &hc.curves, "Hopf circles")?;
    println!("wrote {}", out.display());
    Ok(())
}
