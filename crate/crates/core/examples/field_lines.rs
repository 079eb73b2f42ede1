//! Traces magnetic, electric and Poynting lines of the hopfion at t = 0 and
//! checks that each stays on a level set of the matching psi map.

use knotlight::fields::hopf_ranada;
use knotlight::io::write_curves;
use knotlight::topology::{psi_constancy, trace_field_line, LineKind, TraceConfig};

fn main() -> knotlight::Result<()> {
    let hr = hopf_ranada();
    let cfg = TraceConfig::default();
    let seed = [0.3, 0.4, 0.1];
    let mut curves = Vec::new();
    for kind in [LineKind::Magnetic, LineKind::Electric, LineKind::Poynting] {
        let c = trace_field_line(&hr, kind, 0.0, seed, &cfg)?;
        let dev = psi_constancy(&hr, 0.0, &c, kind.psi_index())?;
        println!(
            "{:<9} closed={} length={:.4} gap={:.1e} psi{} deviation={:.1e}",
            kind.name(),
            c.closed,
            c.length(),
            c.closure_gap,
            kind.psi_index(),
            dev
        );
        curves.push(c);
    }
    let out = std::env::temp_dir().join("knotlight_field_lines.vtk");
    write_curves(&out, &curves, "hopfion lines through (0.3, 0.4, 0.1)")?;
    println!("wrote {}", out.display());
    Ok(())
}
