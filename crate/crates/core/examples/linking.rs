//! Gauss linking numbers: the standard Hopf link and pairs of hopfion
//! magnetic lines.

use knotlight::fields::hopf_ranada;
use knotlight::topology::{circle, field_vector, gauss_linking, trace_lines, LineKind, TraceConfig};

fn main() -> knotlight::Result<()> {
    let a = circle([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 400);
    let b = circle([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 1.0, 400);
    println!("Hopf link: {:.5}", gauss_linking(&a, &b)?.value);

    let hr = hopf_ranada();
    let seeds = [[0.0, 0.5, 0.0], [0.0, 0.0, 0.5], [0.3, 0.4, 0.1], [0.0, 1.5, 0.0]];
    let dir = |x: &[f64; 3]| field_vector(&hr, LineKind::Magnetic, 0.0, x);
    let curves = trace_lines(&dir, &seeds, &TraceConfig::default())
        .into_iter()
        .collect::<knotlight::Result<Vec<_>>>()?;
    for i in 0..curves.len() {
        for j in (i + 1)..curves.len() {
            let l = gauss_linking(&curves[i], &curves[j])?;
            println!(
                "lines {i} and {j}: {:.5} (closest approach {:.3})",
                l.value, l.min_distance
            );
        }
    }
    Ok(())
}
