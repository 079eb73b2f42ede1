//! CSV and legacy VTK output. Every file is written to a temporary file in
//! the target directory and renamed into place.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::BatemanField;
use crate::topology::{Curve, GridSpec, Vec3};

/// Writes `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Serialize)]
struct CurveRow {
    index: usize,
    x: f64,
    y: f64,
    z: f64,
    arclength: f64,
}

/// One curve as CSV with header `index,x,y,z,arclength`.
pub fn curve_csv(curve: &Curve) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (index, (p, s)) in curve.points.iter().zip(&curve.arclength).enumerate() {
        w.serialize(CurveRow {
            index,
            x: p[0],
            y: p[1],
            z: p[2],
            arclength: *s,
        })?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Output paths for `count` curves: `path` itself for one curve, otherwise
/// `stem_k.ext` next to it.
pub fn numbered_paths(path: &Path, count: usize) -> Vec<PathBuf> {
    if count == 1 {
        return vec![path.to_path_buf()];
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    (0..count)
        .map(|k| path.with_file_name(format!("{stem}_{k}{ext}")))
        .collect()
}

/// Legacy ASCII POLYDATA holding every curve as a polyline, with
/// arclength as point data. A closed curve repeats its first point index.
pub fn curves_vtk(curves: &[Curve], title: &str) -> String {
    let total: usize = curves.iter().map(|c| c.points.len()).sum();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET POLYDATA",
        one_line(title)
    );
    let _ = writeln!(s, "POINTS {total} double");
    for c in curves {
        for p in &c.points {
            let _ = writeln!(s, "{:e} {:e} {:e}", p[0], p[1], p[2]);
        }
    }
    let sizes: Vec<usize> = curves.iter().map(|c| c.points.len() + usize::from(wraps(c))).collect();
    let _ = writeln!(
        s,
        "LINES {} {}",
        curves.len(),
        sizes.iter().map(|n| n + 1).sum::<usize>()
    );
    let mut offset = 0;
    for (c, n) in curves.iter().zip(&sizes) {
        let _ = write!(s, "{n}");
        for k in 0..c.points.len() {
            let _ = write!(s, " {}", offset + k);
        }
        if wraps(c) {
            let _ = write!(s, " {offset}");
        }
        s.push('\n');
        offset += c.points.len();
    }
    let _ = writeln!(
        s,
        "POINT_DATA {total}\nSCALARS arclength double 1\nLOOKUP_TABLE default"
    );
    for c in curves {
        for v in &c.arclength {
            let _ = writeln!(s, "{v:e}");
        }
    }
    s
}

fn wraps(c: &Curve) -> bool {
    c.closed && c.points.len() > 1
}

fn one_line(title: &str) -> String {
    let t: String = title.chars().filter(|c| *c != '\n' && *c != '\r').take(255).collect();
    if t.is_empty() {
        "knotlight".into()
    } else {
        t
    }
}

/// Writes curves to `path`, choosing the format from the extension.
/// VTK puts every curve in one file; CSV writes one file per curve.
pub fn write_curves(path: &Path, curves: &[Curve], title: &str) -> Result<Vec<PathBuf>> {
    match extension(path).as_deref() {
        Some("vtk") => {
            write_atomic(path, curves_vtk(curves, title).as_bytes())?;
            Ok(vec![path.to_path_buf()])
        }
        Some("csv") => {
            let paths = numbered_paths(path, curves.len());
            for (c, p) in curves.iter().zip(&paths) {
                write_atomic(p, &curve_csv(c)?)?;
            }
            Ok(paths)
        }
        _ => Err(Error::Config(format!(
            "output `{}` must end in .csv or .vtk",
            path.display()
        ))),
    }
}

pub fn extension(path: &Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase())
}

/// `E`, `B` and `E x B` of `f` at time `t` on every node of `grid`.
pub struct GridSamples {
    pub e: Vec<Vec3>,
    pub b: Vec<Vec3>,
    pub poynting: Vec<Vec3>,
}

pub fn sample_grid(f: &BatemanField, t: f64, grid: &GridSpec) -> Result<GridSamples> {
    let samples = grid.sample(|x| f.local(&[t, x[0], x[1], x[2]]).map(|l| l.sample()));
    let mut out = GridSamples {
        e: Vec::with_capacity(samples.len()),
        b: Vec::with_capacity(samples.len()),
        poynting: Vec::with_capacity(samples.len()),
    };
    for s in samples {
        let s = s?;
        out.e.push(s.e);
        out.b.push(s.b);
        out.poynting.push(s.poynting);
    }
    Ok(out)
}

/// Legacy ASCII STRUCTURED_POINTS with `E`, `B` and `Poynting` vectors.
pub fn grid_vtk(grid: &GridSpec, data: &GridSamples, title: &str) -> String {
    let h = grid.spacing();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET STRUCTURED_POINTS",
        one_line(title)
    );
    let _ = writeln!(s, "DIMENSIONS {} {} {}", grid.n[0], grid.n[1], grid.n[2]);
    let _ = writeln!(s, "ORIGIN {:e} {:e} {:e}", grid.lo[0], grid.lo[1], grid.lo[2]);
    let _ = writeln!(s, "SPACING {:e} {:e} {:e}", h[0], h[1], h[2]);
    let _ = writeln!(s, "POINT_DATA {}", grid.len());
    for (name, v) in [("E", &data.e), ("B", &data.b), ("Poynting", &data.poynting)] {
        let _ = writeln!(s, "VECTORS {name} double");
        for p in v.iter() {
            let _ = writeln!(s, "{:e} {:e} {:e}", p[0], p[1], p[2]);
        }
    }
    s
}

pub fn write_grid(path: &Path, f: &BatemanField, t: f64, grid: &GridSpec) -> Result<()> {
    if extension(path).as_deref() != Some("vtk") {
        return Err(Error::Config(format!(
            "grid output `{}` must end in .vtk",
            path.display()
        )));
    }
    let data = sample_grid(f, t, grid)?;
    let title = format!("{} at t = {t}", f.name);
    write_atomic(path, grid_vtk(grid, &data, &title).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::circle;

    #[test]
    fn numbered_paths_keep_extension() {
        let p = Path::new("out/lines.csv");
        assert_eq!(numbered_paths(p, 1), vec![PathBuf::from("out/lines.csv")]);
        assert_eq!(
            numbered_paths(p, 2),
            vec![PathBuf::from("out/lines_0.csv"), PathBuf::from("out/lines_1.csv")]
        );
    }

    #[test]
    fn csv_has_header_and_rows() {
        let c = circle([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 4);
        let text = String::from_utf8(curve_csv(&c).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,x,y,z,arclength");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,1.0,0.0,0.0,0.0"));
    }

    #[test]
    fn closed_polyline_wraps() {
        let c = circle([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 3);
        let text = curves_vtk(&[c], "t");
        assert!(text.contains("LINES 1 5\n4 0 1 2 0\n"));
    }

    #[test]
    fn unknown_extension_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let err = write_curves(&dir.path().join("x.txt"), &[], "t").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
