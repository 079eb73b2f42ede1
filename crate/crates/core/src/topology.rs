//! Field lines, linking numbers, helicity and Hopf invariants.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{BatemanField, CpPoint};
use crate::forms::TwoForm;
use crate::frames::{self, FrameSide};
use crate::quaternion::{Quaternion, UnitQuaternion};

pub type Vec3 = [f64; 3];

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &Vec3, h: f64, x: &Vec3) -> Vec3 {
    [y[0] + h * x[0], y[1] + h * x[1], y[2] + h * x[2]]
}

use crate::fields::cross;

/// Polyline at a fixed time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub points: Vec<Vec3>,
    /// Arclength at each vertex, starting from 0.
    pub arclength: Vec<f64>,
    /// The last vertex returns to the first; the closing segment is implicit.
    pub closed: bool,
    /// Distance from the last vertex to the first.
    pub closure_gap: f64,
}

impl Curve {
    /// Builds a curve from vertices, measuring arclength along the polyline.
    pub fn from_points(points: Vec<Vec3>, closed: bool) -> Self {
        let mut arclength = Vec::with_capacity(points.len());
        let mut s = 0.0;
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                s += norm(&sub(p, &points[i - 1]));
            }
            arclength.push(s);
        }
        let closure_gap = match (points.first(), points.last()) {
            (Some(a), Some(b)) => norm(&sub(a, b)),
            _ => 0.0,
        };
        Curve {
            points,
            arclength,
            closed,
            closure_gap,
        }
    }

    pub fn length(&self) -> f64 {
        let open = self.arclength.last().copied().unwrap_or(0.0);
        if self.closed {
            open + self.closure_gap
        } else {
            open
        }
    }

    /// Segments as `(start, end)`, including the closing one for closed curves.
    pub fn segments(&self) -> Vec<(Vec3, Vec3)> {
        let n = self.points.len();
        let mut out: Vec<(Vec3, Vec3)> = self.points.windows(2).map(|w| (w[0], w[1])).collect();
        if self.closed && n > 1 && self.closure_gap > 0.0 {
            out.push((self.points[n - 1], self.points[0]));
        }
        out
    }

    pub fn max_segment(&self) -> f64 {
        self.segments()
            .iter()
            .map(|(a, b)| norm(&sub(b, a)))
            .fold(0.0, f64::max)
    }

    /// Applies a linear map to every vertex.
    pub fn transformed(&self, m: &[[f64; 3]; 3]) -> Curve {
        let pts = self
            .points
            .iter()
            .map(|p| std::array::from_fn(|r| (0..3).map(|c| m[r][c] * p[c]).sum()))
            .collect();
        let mut c = Curve::from_points(pts, self.closed);
        c.closed = self.closed;
        c
    }
}

/// Circle of radius `r` about `center` in the plane spanned by the
/// orthonormal vectors `u`, `v`, sampled at `n` vertices.
pub fn circle(center: Vec3, u: Vec3, v: Vec3, r: f64, n: usize) -> Curve {
    let pts = (0..n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            let (s, c) = a.sin_cos();
            std::array::from_fn(|i| center[i] + r * (c * u[i] + s * v[i]))
        })
        .collect();
    Curve::from_points(pts, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceConfig {
    pub initial_step: f64,
    /// Absolute local error tolerance of the embedded Runge-Kutta pair.
    pub tolerance: f64,
    /// Largest step; keeps vertices dense enough for quadrature along the curve.
    pub max_step: f64,
    pub max_arclength: f64,
    /// A curve is closed when it returns within this distance of its seed.
    pub closure_tolerance: f64,
    /// No closure test before this arclength.
    pub min_arclength: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            initial_step: 1e-3,
            tolerance: 1e-11,
            max_step: 0.02,
            max_arclength: 60.0,
            closure_tolerance: 1e-6,
            min_arclength: 0.1,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("initial_step", self.initial_step),
            ("tolerance", self.tolerance),
            ("max_step", self.max_step),
            ("max_arclength", self.max_arclength),
            ("closure_tolerance", self.closure_tolerance),
            ("min_arclength", self.min_arclength),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.min_arclength >= self.max_arclength {
            return Err(Error::Config("min_arclength must be below max_arclength".into()));
        }
        Ok(())
    }
}

/// Which direction field of a null field to follow at fixed time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Magnetic,
    Electric,
    Poynting,
}

impl LineKind {
    /// The map `psi_i` whose level sets contain these lines.
    pub fn psi_index(self) -> usize {
        match self {
            LineKind::Magnetic => 2,
            LineKind::Electric => 3,
            LineKind::Poynting => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LineKind::Magnetic => "magnetic",
            LineKind::Electric => "electric",
            LineKind::Poynting => "poynting",
        }
    }
}

impl std::str::FromStr for LineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "magnetic" => Ok(LineKind::Magnetic),
            "electric" => Ok(LineKind::Electric),
            "poynting" => Ok(LineKind::Poynting),
            _ => Err(Error::Config(format!("unknown line family `{s}`"))),
        }
    }
}

/// `B`, `E` or `E x B` of `f` at time `t` and position `x`.
pub fn field_vector(f: &BatemanField, kind: LineKind, t: f64, x: &Vec3) -> Result<Vec3> {
    let s = f.local(&[t, x[0], x[1], x[2]])?.sample();
    Ok(match kind {
        LineKind::Magnetic => s.b,
        LineKind::Electric => s.e,
        LineKind::Poynting => s.poynting,
    })
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Tracer<'a, F> {
    dir: &'a F,
}

impl<F> Tracer<'_, F>
where
    F: Fn(&Vec3) -> Result<Vec3>,
{
    fn unit(&self, x: &Vec3) -> Result<Option<Vec3>> {
        let v = self.dir(x)?;
        let n = norm(&v);
        if !(n.is_finite()) || n == 0.0 {
            return Ok(None);
        }
        Ok(Some([v[0] / n, v[1] / n, v[2] / n]))
    }

    fn dir(&self, x: &Vec3) -> Result<Vec3> {
        (self.dir)(x)
    }

    /// One DP45 step of size `h`: fifth-order point and error estimate.
    fn step(&self, y: &Vec3, h: f64) -> Result<Option<(Vec3, f64)>> {
        let mut k = [[0.0; 3]; 7];
        for s in 0..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys = axpy(&ys, h * A[s][j], kj);
            }
            match self.unit(&ys)? {
                Some(v) => k[s] = v,
                None => return Ok(None),
            }
        }
        let mut y5 = *y;
        let mut err = [0.0; 3];
        for s in 0..7 {
            y5 = axpy(&y5, h * B5[s], &k[s]);
            err = axpy(&err, h * (B5[s] - B4[s]), &k[s]);
        }
        let e = err.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Some((y5, e)))
    }
}

/// Integrates the normalized direction field from `seed` with arclength as
/// parameter, stopping when the curve closes or reaches the arclength cap.
///
/// Closure is detected when the curve crosses the plane through the seed
/// normal to the seed tangent, near the seed, after `min_arclength`. The
/// crossing is then located by Newton iteration on the step size, and the
/// curve counts as closed when it lands within `closure_tolerance` of the
/// seed with a tangent aligned to the seed tangent (cosine above 0.999).
pub fn trace_line<F>(dir: &F, seed: Vec3, cfg: &TraceConfig) -> Result<Curve>
where
    F: Fn(&Vec3) -> Result<Vec3> + ?Sized,
{
    cfg.validate()?;
    let wrapped = |x: &Vec3| dir(x);
    let tr = Tracer { dir: &wrapped };
    let t0 = tr
        .unit(&seed)?
        .ok_or_else(|| Error::Trace(format!("direction field vanishes at seed {seed:?}")))?;
    let mut points = vec![seed];
    let mut arclength = vec![0.0];
    let mut y = seed;
    let mut s = 0.0;
    let mut h = cfg.initial_step.min(cfg.max_step);
    let plane = |p: &Vec3| dot(&sub(p, &seed), &t0);
    let capture = |h: f64| (4.0 * h).max(100.0 * cfg.closure_tolerance);
    while s < cfg.max_arclength {
        let h_try = h.min(cfg.max_arclength - s);
        let Some((y_new, err)) = tr.step(&y, h_try)? else {
            // The field vanished inside the step: a hard stop.
            break;
        };
        if err > cfg.tolerance {
            h = h_try * (0.9 * (cfg.tolerance / err).powf(0.2)).max(0.2);
            if h < 1e-13 * (1.0 + s) {
                return Err(Error::Trace(format!("step size underflow at {y:?}")));
            }
            continue;
        }
        let s_new = s + h_try;
        if s_new >= cfg.min_arclength
            && plane(&y) < 0.0
            && plane(&y_new) >= 0.0
            && norm(&sub(&y_new, &seed)) < capture(h_try)
        {
            if let Some((y_hit, theta)) = locate_crossing(&tr, &y, h_try, &seed, &t0)? {
                let gap = norm(&sub(&y_hit, &seed));
                let aligned = tr.unit(&y_hit)?.map(|v| dot(&v, &t0)).unwrap_or(0.0);
                if gap <= cfg.closure_tolerance && aligned > 0.999 {
                    points.push(y_hit);
                    arclength.push(s + theta);
                    return Ok(Curve {
                        points,
                        arclength,
                        closed: true,
                        closure_gap: gap,
                    });
                }
            }
        }
        y = y_new;
        s = s_new;
        points.push(y);
        arclength.push(s);
        let grow = if err == 0.0 {
            5.0
        } else {
            (0.9 * (cfg.tolerance / err).powf(0.2)).clamp(0.2, 5.0)
        };
        h = (h_try * grow).min(cfg.max_step);
    }
    let gap = norm(&sub(&y, &seed));
    Ok(Curve {
        points,
        arclength,
        closed: false,
        closure_gap: gap,
    })
}

fn locate_crossing<F>(tr: &Tracer<'_, F>, y: &Vec3, h: f64, seed: &Vec3, t0: &Vec3) -> Result<Option<(Vec3, f64)>>
where
    F: Fn(&Vec3) -> Result<Vec3>,
{
    let g = |p: &Vec3| dot(&sub(p, seed), t0);
    let g0 = g(y);
    let Some(v0) = tr.unit(y)? else { return Ok(None) };
    let slope0 = dot(&v0, t0);
    let mut theta = if slope0 > 0.0 {
        (-g0 / slope0).clamp(0.0, h)
    } else {
        0.5 * h
    };
    for _ in 0..8 {
        let Some((p, _)) = tr.step(y, theta)? else {
            return Ok(None);
        };
        let Some(v) = tr.unit(&p)? else { return Ok(None) };
        let slope = dot(&v, t0);
        if slope <= 0.0 {
            return Ok(None);
        }
        let delta = g(&p) / slope;
        theta = (theta - delta).clamp(0.0, h);
        if delta.abs() < 1e-15 * (1.0 + theta) {
            break;
        }
    }
    let Some((p, _)) = tr.step(y, theta)? else {
        return Ok(None);
    };
    Ok(Some((p, theta)))
}

/// Traces one line per seed in parallel; results keep the seed order.
pub fn trace_lines<F>(dir: &F, seeds: &[Vec3], cfg: &TraceConfig) -> Vec<Result<Curve>>
where
    F: Fn(&Vec3) -> Result<Vec3> + Sync,
{
    seeds.par_iter().map(|s| trace_line(dir, *s, cfg)).collect()
}

/// Traces a line of `f` at time `t`.
pub fn trace_field_line(f: &BatemanField, kind: LineKind, t: f64, seed: Vec3, cfg: &TraceConfig) -> Result<Curve> {
    trace_line(&|x: &Vec3| field_vector(f, kind, t, x), seed, cfg)
}

/// Largest chordal distance between `psi_which` at the first vertex and at
/// any other vertex of `curve`, at time `t`.
pub fn psi_constancy(f: &BatemanField, t: f64, curve: &Curve, which: usize) -> Result<f64> {
    let at = |p: &Vec3| -> Result<CpPoint> { Ok(f.local(&[t, p[0], p[1], p[2]])?.psi(which)) };
    let Some(first) = curve.points.first() else {
        return Ok(0.0);
    };
    let reference = at(first)?;
    let devs: Vec<Result<f64>> = curve
        .points
        .par_iter()
        .map(|p| Ok(at(p)?.chordal_distance(&reference)))
        .collect();
    let mut worst: f64 = 0.0;
    for d in devs {
        worst = worst.max(d?);
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Linking {
    pub value: f64,
    pub min_distance: f64,
    pub max_segment: f64,
    /// Set when the curves come closer than ten times the longest segment,
    /// where the midpoint rule loses accuracy.
    pub warning: Option<String>,
}

/// Gauss linking integral of two closed polylines, midpoint rule per pair
/// of segments.
pub fn gauss_linking(c1: &Curve, c2: &Curve) -> Result<Linking> {
    if !c1.closed || !c2.closed {
        return Err(Error::OpenCurve);
    }
    let s1 = c1.segments();
    let s2 = c2.segments();
    let mids = |s: &[(Vec3, Vec3)]| -> Vec<(Vec3, Vec3)> {
        s.iter()
            .map(|(a, b)| {
                (
                    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])],
                    sub(b, a),
                )
            })
            .collect()
    };
    let (m1, m2) = (mids(&s1), mids(&s2));
    let rows: Vec<(f64, f64)> = m1
        .par_iter()
        .map(|(r1, d1)| {
            let mut sum = 0.0;
            let mut closest = f64::INFINITY;
            for (r2, d2) in &m2 {
                let r = sub(r1, r2);
                let dist = norm(&r);
                closest = closest.min(dist);
                sum += dot(&r, &cross(d1, d2)) / (dist * dist * dist);
            }
            (sum, closest)
        })
        .collect();
    let mut total = 0.0;
    let mut min_distance = f64::INFINITY;
    for (s, d) in rows {
        total += s;
        min_distance = min_distance.min(d);
    }
    let max_segment = c1.max_segment().max(c2.max_segment());
    let warning = (min_distance < 10.0 * max_segment).then(|| {
        format!("curves come within {min_distance:.3e} of each other, below ten segment lengths ({max_segment:.3e})")
    });
    Ok(Linking {
        value: total / (4.0 * PI),
        min_distance,
        max_segment,
        warning,
    })
}

/// Regular grid over a box in space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: Vec3,
    pub hi: Vec3,
    pub n: [usize; 3],
}

impl GridSpec {
    pub fn new(lo: Vec3, hi: Vec3, n: [usize; 3]) -> Result<Self> {
        for a in 0..3 {
            if n[a] < 2 {
                return Err(Error::Config(format!(
                    "grid resolution must be at least 2 per axis, got {}",
                    n[a]
                )));
            }
            if !(lo[a].is_finite() && hi[a].is_finite() && lo[a] < hi[a]) {
                return Err(Error::Config(format!("grid axis {a}: need finite lo < hi")));
            }
        }
        Ok(GridSpec { lo, hi, n })
    }

    pub fn cube(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new([a; 3], [b; 3], [n; 3])
    }

    pub fn spacing(&self) -> Vec3 {
        std::array::from_fn(|a| (self.hi[a] - self.lo[a]) / (self.n[a] - 1) as f64)
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let h = self.spacing();
        [
            self.lo[0] + i as f64 * h[0],
            self.lo[1] + j as f64 * h[1],
            self.lo[2] + k as f64 * h[2],
        ]
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Samples `f` at every node, x fastest, then y, then z.
    pub fn sample<T: Send>(&self, f: impl Fn(&Vec3) -> T + Sync) -> Vec<T> {
        (0..self.len())
            .into_par_iter()
            .map(|idx| {
                let i = idx % self.n[0];
                let j = (idx / self.n[0]) % self.n[1];
                let k = idx / (self.n[0] * self.n[1]);
                f(&self.point(i, j, k))
            })
            .collect()
    }
}

/// Trapezoid-rule integral of a scalar over the grid. Slabs of constant z
/// are summed in parallel and combined in order.
pub fn integrate(grid: &GridSpec, f: impl Fn(&Vec3) -> Result<f64> + Sync) -> Result<f64> {
    let h = grid.spacing();
    let w = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let slabs: Vec<Result<f64>> = (0..grid.n[2])
        .into_par_iter()
        .map(|k| {
            let mut acc = 0.0;
            for j in 0..grid.n[1] {
                for i in 0..grid.n[0] {
                    let weight = w(i, grid.n[0]) * w(j, grid.n[1]) * w(k, grid.n[2]);
                    acc += weight * f(&grid.point(i, j, k))?;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = 0.0;
    for s in slabs {
        total += s?;
    }
    Ok(total * h[0] * h[1] * h[2])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Helicity {
    /// `integral of A . B`.
    pub magnetic: f64,
    /// `integral of C . E`.
    pub electric: f64,
}

/// Magnetic and electric helicity of `f` at time `t` over `grid`, with the
/// potentials `Re(m / 2i)` and `-Im(m / 2i)`.
pub fn helicity(f: &BatemanField, t: f64, grid: &GridSpec) -> Result<Helicity> {
    let h = grid.spacing();
    let w = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let slabs: Vec<Result<(f64, f64)>> = (0..grid.n[2])
        .into_par_iter()
        .map(|k| {
            let (mut hm, mut he) = (0.0, 0.0);
            for j in 0..grid.n[1] {
                for i in 0..grid.n[0] {
                    let x = grid.point(i, j, k);
                    let local = f.local(&[t, x[0], x[1], x[2]])?;
                    let s = local.sample();
                    let weight = w(i, grid.n[0]) * w(j, grid.n[1]) * w(k, grid.n[2]);
                    hm += weight * dot(&local.magnetic_potential(), &s.b);
                    he += weight * dot(&local.electric_potential(), &s.e);
                }
            }
            Ok((hm, he))
        })
        .collect();
    let (mut hm, mut he) = (0.0, 0.0);
    for s in slabs {
        let (a, b) = s?;
        hm += a;
        he += b;
    }
    let cell = h[0] * h[1] * h[2];
    Ok(Helicity {
        magnetic: hm * cell,
        electric: he * cell,
    })
}

/// Uniform random point of the unit 3-sphere.
pub fn random_unit_quaternion<R: rand::Rng>(rng: &mut R) -> UnitQuaternion {
    loop {
        let q = Quaternion(std::array::from_fn(|_| StandardNormal.sample(rng)));
        if q.norm_sqr() > 1e-12 {
            return q.normalize().expect("nonzero").1;
        }
    }
}

fn wedge3_eval(a: &[f64; 4], da: &TwoForm, x: &[f64; 4], y: &[f64; 4], z: &[f64; 4]) -> f64 {
    let pair = |v: &[f64; 4]| (0..4).map(|i| a[i] * v[i]).sum::<f64>();
    let m = da.to_matrix();
    let two = |u: &[f64; 4], v: &[f64; 4]| {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += u[i] * m[i][j].re * v[j];
            }
        }
        s
    };
    pair(x) * two(y, z) - pair(y) * two(x, z) + pair(z) * two(x, y)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Orthonormal basis of the tangent space of the 3-sphere at `u`, obtained
/// from random directions by Gram-Schmidt.
fn tangent_basis<R: rand::Rng>(u: &Quaternion, rng: &mut R) -> [[f64; 4]; 3] {
    loop {
        let mut basis: Vec<[f64; 4]> = vec![u.0];
        for _ in 0..3 {
            let mut v: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
            for b in &basis {
                let p: f64 = (0..4).map(|i| v[i] * b[i]).sum();
                for i in 0..4 {
                    v[i] -= p * b[i];
                }
            }
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n < 1e-6 {
                break;
            }
            basis.push(v.map(|c| c / n));
        }
        if basis.len() == 4 {
            return [basis[1], basis[2], basis[3]];
        }
    }
}

/// Ratio `(lambda^i ^ d lambda^i)(X, Y, Z) / (lambda^1 ^ lambda^2 ^ lambda^3)(X, Y, Z)`
/// for an orthonormal tangent frame at `u`, with `d lambda^i` taken from the
/// pullback through `zeta_i`.
pub fn hopf_density(i: usize, u: UnitQuaternion, frame: &[[f64; 4]; 3]) -> Result<f64> {
    let q = u.quaternion();
    let mc = frames::maurer_cartan(q)?;
    let dl = frames::dlambda_pullback(i, q, frames::Differential::Analytic)?;
    let num = wedge3_eval(&mc.components[i], &dl, &frame[0], &frame[1], &frame[2]);
    let vol = det3(std::array::from_fn(|a| {
        std::array::from_fn(|b| (0..4).map(|c| mc.components[a + 1][c] * frame[b][c]).sum())
    }));
    Ok(num / vol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HopfInvariant {
    pub value: f64,
    /// Standard error of the Monte Carlo mean.
    pub standard_error: f64,
    pub samples: usize,
    /// Largest deviation of the pointwise density from its mean.
    pub density_spread: f64,
}

/// Monte Carlo estimate of `(1 / 4 pi^2) integral over S^3 of lambda^i ^ d lambda^i`.
pub fn hopf_invariant(i: usize, samples: usize, seed: u64) -> Result<HopfInvariant> {
    if !(1..=3).contains(&i) {
        return Err(Error::Config(format!("Hopf map index must be 1, 2 or 3, got {i}")));
    }
    if samples < 100 {
        return Err(Error::Config("Hopf invariant needs at least 100 samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut densities = Vec::with_capacity(samples);
    let mut attempts = 0;
    while densities.len() < samples {
        attempts += 1;
        if attempts > 4 * samples {
            return Err(Error::AllSingular { attempts });
        }
        let u = random_unit_quaternion(&mut rng);
        let frame = tangent_basis(&u.quaternion(), &mut rng);
        if let Ok(d) = hopf_density(i, u, &frame) {
            if d.is_finite() {
                densities.push(d);
            }
        }
    }
    let n = densities.len() as f64;
    let mean = densities.iter().sum::<f64>() / n;
    let var = densities.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let spread = densities.iter().map(|d| (d - mean).abs()).fold(0.0, f64::max);
    let scale = 2.0 * PI * PI / (4.0 * PI * PI);
    Ok(HopfInvariant {
        value: mean * scale,
        standard_error: (var / n).sqrt() * scale,
        samples,
        density_spread: spread,
    })
}

/// Stereographic projection of the 3-sphere from a pole onto the
/// orthogonal 3-space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    pub pole: [f64; 4],
    basis: [[f64; 4]; 3],
}

impl Projection {
    pub fn from_pole(pole: [f64; 4]) -> Result<Self> {
        let n = pole.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(Error::Config("projection pole must be nonzero".into()));
        }
        let p = pole.map(|c| c / n);
        let mut basis = Vec::with_capacity(3);
        for e in 0..4 {
            let mut v = [0.0; 4];
            v[e] = 1.0;
            for b in std::iter::once(&p).chain(basis.iter()) {
                let d: f64 = (0..4).map(|i| v[i] * b[i]).sum();
                for i in 0..4 {
                    v[i] -= d * b[i];
                }
            }
            let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if len > 1e-6 && basis.len() < 3 {
                basis.push(v.map(|c| c / len));
            }
        }
        // Orient the complement so that the pole -e0 gives (q1, q2, q3) / (1 + q0).
        let mut basis = [basis[0], basis[1], basis[2]];
        let det = det4([p.map(|c| -c), basis[0], basis[1], basis[2]]);
        if det < 0.0 {
            basis[2] = basis[2].map(|c| -c);
        }
        Ok(Projection { pole: p, basis })
    }

    pub fn project(&self, q: &[f64; 4]) -> Result<Vec3> {
        let d: f64 = (0..4).map(|i| q[i] * self.pole[i]).sum();
        if 1.0 - d < 1e-12 {
            return Err(Error::Pole("stereographic projection of the 3-sphere"));
        }
        Ok(std::array::from_fn(|a| {
            (0..4).map(|i| q[i] * self.basis[a][i]).sum::<f64>() / (1.0 - d)
        }))
    }
}

impl Default for Projection {
    fn default() -> Self {
        Projection::from_pole([-1.0, 0.0, 0.0, 0.0]).expect("valid pole")
    }
}

fn det4(m: [[f64; 4]; 4]) -> f64 {
    let mut total = 0.0;
    for c in 0..4 {
        let minor: [[f64; 3]; 3] = std::array::from_fn(|r| {
            let row = &m[r + 1];
            let cols: Vec<f64> = (0..4).filter(|&k| k != c).map(|k| row[k]).collect();
            [cols[0], cols[1], cols[2]]
        });
        let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * m[0][c] * det3(minor);
    }
    total
}

/// Integral curve of `L_i` (or `R_i`) through `seed` on the 3-sphere over one
/// period, by RK4 with renormalization after each step.
pub fn hopf_circle_s3(side: FrameSide, i: usize, seed: UnitQuaternion, steps: usize) -> Vec<[f64; 4]> {
    let h = 2.0 * PI / steps as f64;
    let f = |q: &Quaternion| Quaternion(frames::invariant_field(side, i, *q).0);
    let mut q = seed.quaternion();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(q.0);
    for _ in 0..steps {
        let k1 = f(&q);
        let k2 = f(&(q + k1 * (0.5 * h)));
        let k3 = f(&(q + k2 * (0.5 * h)));
        let k4 = f(&(q + k3 * h));
        q = q + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        q = q.scale(1.0 / q.norm());
        out.push(q.0);
    }
    out
}

/// Minimum-clearance pole among a fixed candidate set.
fn choose_pole(paths: &[Vec<[f64; 4]>]) -> [f64; 4] {
    let mut candidates: Vec<[f64; 4]> = Vec::new();
    for e in 0..4 {
        for s in [-1.0, 1.0] {
            let mut v = [0.0; 4];
            v[e] = s;
            candidates.push(v);
        }
    }
    for bits in 0..16u32 {
        candidates.push(std::array::from_fn(|k| if bits & (1 << k) != 0 { -0.5 } else { 0.5 }));
    }
    let clearance = |p: &[f64; 4]| {
        paths
            .iter()
            .flatten()
            .map(|q| (0..4).map(|i| (q[i] - p[i]).powi(2)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = candidates[0];
    let mut best_c = clearance(&best);
    for c in &candidates[1..] {
        let v = clearance(c);
        if v > best_c + 1e-12 {
            best = *c;
            best_c = v;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct HopfCircles {
    pub curves: Vec<Curve>,
    pub pole: [f64; 4],
    /// The default pole `-e0` was too close to some circle.
    pub pole_shifted: bool,
}

/// Clearance from the projection pole below which the fallback pole is used.
pub const POLE_CLEARANCE: f64 = 0.05;

/// Projected integral curves of an invariant field through each seed.
///
/// The projection pole is `-e0` unless some circle passes within
/// [`POLE_CLEARANCE`] of it; then the pole with the largest clearance among
/// `+-e_a` and `(+-1, +-1, +-1, +-1) / 2` is used for every curve.
pub fn hopf_circles(side: FrameSide, i: usize, seeds: &[UnitQuaternion], steps: usize) -> Result<HopfCircles> {
    if !(1..=3).contains(&i) {
        return Err(Error::Config(format!(
            "invariant field index must be 1, 2 or 3, got {i}"
        )));
    }
    if steps < 8 {
        return Err(Error::Config("Hopf circles need at least 8 steps".into()));
    }
    let paths: Vec<Vec<[f64; 4]>> = seeds.iter().map(|s| hopf_circle_s3(side, i, *s, steps)).collect();
    hopf_circles_from_paths(&paths)
}

fn hopf_circles_from_paths(paths: &[Vec<[f64; 4]>]) -> Result<HopfCircles> {
    let default = [-1.0, 0.0, 0.0, 0.0];
    let near = paths.iter().flatten().any(|q| {
        let d2: f64 = (0..4).map(|k| (q[k] - default[k]).powi(2)).sum();
        d2.sqrt() < POLE_CLEARANCE
    });
    let pole = if near { choose_pole(paths) } else { default };
    let proj = Projection::from_pole(pole)?;
    let mut curves = Vec::with_capacity(paths.len());
    for path in paths {
        // The last RK4 point revisits the seed; keep it as the closing vertex.
        let pts: Result<Vec<Vec3>> = path.iter().map(|q| proj.project(q)).collect();
        let pts = pts?;
        let gap = norm(&sub(pts.last().expect("nonempty"), &pts[0]));
        let mut c = Curve::from_points(pts, true);
        c.closure_gap = gap;
        curves.push(c);
    }
    Ok(HopfCircles {
        curves,
        pole,
        pole_shifted: near,
    })
}

/// Hopf circles of several invariant fields, projected from one common
/// pole: `count` fibers for each index in `axes`, in that order.
pub fn fibration(side: FrameSide, axes: &[usize], count: usize, steps: usize) -> Result<HopfCircles> {
    if let Some(i) = axes.iter().find(|i| !(1..=3).contains(*i)) {
        return Err(Error::Config(format!(
            "invariant field index must be 1, 2 or 3, got {i}"
        )));
    }
    if count == 0 {
        return Err(Error::Config("need at least one circle per axis".into()));
    }
    if steps < 8 {
        return Err(Error::Config("Hopf circles need at least 8 steps".into()));
    }
    let paths: Vec<Vec<[f64; 4]>> = axes
        .iter()
        .flat_map(|&i| fibration_seeds(i, count).into_iter().map(move |s| (i, s)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(i, s)| hopf_circle_s3(side, *i, *s, steps))
        .collect();
    hopf_circles_from_paths(&paths)
}

/// Seeds `cos(theta_k) e0 + sin(theta_k) e_j` with `j = i % 3 + 1` and
/// `theta_k = k pi / count`: one point on each of `count` distinct fibers of `l_i`.
pub fn fibration_seeds(i: usize, count: usize) -> Vec<UnitQuaternion> {
    let j = i % 3 + 1;
    (0..count)
        .map(|k| {
            let th = k as f64 * PI / count as f64;
            let mut c = [0.0; 4];
            c[0] = th.cos();
            c[j] = th.sin();
            UnitQuaternion::new(Quaternion(c)).expect("unit by construction")
        })
        .collect()
}
