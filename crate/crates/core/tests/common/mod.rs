#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use vtkio::model::{Attribute, DataSet, Extent, Piece, VertexNumbers};
use vtkio::Vtk;

pub fn knotlight(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knotlight"))
        .args(args)
        .env_remove("KNOT_THREADS")
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn parse(path: &Path) -> Vtk {
    let bytes = std::fs::read(path).expect("file exists");
    Vtk::parse_legacy_be(bytes.as_slice()).expect("valid legacy VTK")
}

/// Polylines of a legacy POLYDATA file, each as its list of points.
pub fn read_polylines(path: &Path) -> Vec<Vec<[f64; 3]>> {
    let vtk = parse(path);
    let DataSet::PolyData { pieces, .. } = vtk.data else {
        panic!("not POLYDATA")
    };
    let Piece::Inline(piece) = pieces.into_iter().next().expect("one piece") else {
        panic!("not inline")
    };
    let coords: Vec<f64> = piece.points.cast_into().expect("numeric points");
    let Some(VertexNumbers::Legacy { num_cells, vertices }) = piece.lines else {
        panic!("no LINES")
    };
    let mut out = Vec::new();
    let mut k = 0;
    while k < vertices.len() {
        let n = vertices[k] as usize;
        let line = vertices[k + 1..k + 1 + n]
            .iter()
            .map(|&i| {
                let i = i as usize;
                [coords[3 * i], coords[3 * i + 1], coords[3 * i + 2]]
            })
            .collect();
        out.push(line);
        k += n + 1;
    }
    assert_eq!(out.len(), num_cells as usize);
    out
}

pub struct Structured {
    pub dims: [u32; 3],
    pub origin: [f32; 3],
    pub spacing: [f32; 3],
    pub vectors: Vec<(String, Vec<f64>)>,
}

pub fn read_structured_points(path: &Path) -> Structured {
    let vtk = parse(path);
    let DataSet::ImageData {
        extent,
        origin,
        spacing,
        pieces,
        ..
    } = vtk.data
    else {
        panic!("not STRUCTURED_POINTS")
    };
    let Extent::Dims(dims) = extent else {
        panic!("legacy extent")
    };
    let Piece::Inline(piece) = pieces.into_iter().next().expect("one piece") else {
        panic!("not inline")
    };
    let vectors = piece
        .data
        .point
        .into_iter()
        .filter_map(|a| match a {
            Attribute::DataArray(d) => Some((d.name, d.data.cast_into().expect("numeric"))),
            _ => None,
        })
        .collect();
    Structured {
        dims,
        origin,
        spacing,
        vectors,
    }
}

pub struct CsvCurve {
    pub index: Vec<usize>,
    pub points: Vec<[f64; 3]>,
    pub arclength: Vec<f64>,
}

pub fn read_csv_curve(path: &Path) -> CsvCurve {
    let mut r = csv::Reader::from_path(path).expect("csv opens");
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["index", "x", "y", "z", "arclength"]
    );
    let mut c = CsvCurve {
        index: vec![],
        points: vec![],
        arclength: vec![],
    };
    for rec in r.records() {
        let rec = rec.unwrap();
        let f = |k: usize| rec[k].parse::<f64>().unwrap();
        c.index.push(rec[0].parse().unwrap());
        c.points.push([f(1), f(2), f(3)]);
        c.arclength.push(f(4));
    }
    c
}
