//! Null electromagnetic fields from Bateman pairs `(alpha, beta)`.
//!
//! The Riemann-Silberstein form is `R = 2 d alpha ^ d beta = F - i *F`, and
//! the observer `d/dt` reads `E_i = Re R_{ti}`, `B_i = Im R_{ti}` (lower
//! spatial indices). With this convention `F_{ti} = E_i` and
//! `F_{yz} = -B_x` (cyclic), so `F = dA` for a vector potential whose curl
//! is `B`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exprlang::{self, Expr};
use crate::forms::{self, CoVector, ThreeForm, TwoForm, C64, METRIC};
use crate::frames;
use crate::jet::Jet2;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Projective denominators below this magnitude mark the point at infinity.
pub const PSI_POLE_EPS: f64 = 1e-300;

/// Complex scalar field on spacetime with exact first and second derivatives.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn jet(&self, p: &[f64; 4]) -> Result<Jet2>;

    fn describe(&self) -> String;
}

impl ScalarField for Expr {
    fn jet(&self, p: &[f64; 4]) -> Result<Jet2> {
        Ok(self.eval_jet(p)?)
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

#[derive(Clone, Copy, Debug)]
struct Constant(C64);

impl ScalarField for Constant {
    fn jet(&self, _: &[f64; 4]) -> Result<Jet2> {
        Ok(Jet2::constant(self.0))
    }

    fn describe(&self) -> String {
        format!("{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HopfRanadaPart {
    Alpha,
    Beta,
}

#[derive(Clone, Copy, Debug)]
struct HopfRanada(HopfRanadaPart);

impl ScalarField for HopfRanada {
    fn jet(&self, p: &[f64; 4]) -> Result<Jet2> {
        let [t, x, y, z] = Jet2::coordinates(p);
        let r2 = x * x + y * y + z * z;
        let tm = t + C64::new(0.0, -1.0);
        // |C|^2 = (r^2 - t^2 + 1)^2 + 4 t^2 never vanishes on real events.
        let c = r2 - tm * tm;
        let num = match self.0 {
            HopfRanadaPart::Alpha => r2 - t * t + C64::new(-1.0, 0.0) + z * C64::new(0.0, 2.0),
            HopfRanadaPart::Beta => (x - y * I) * 2.0,
        };
        Ok(num / c)
    }

    fn describe(&self) -> String {
        match self.0 {
            HopfRanadaPart::Alpha => "(x^2+y^2+z^2-t^2-1+2*i*z)/(x^2+y^2+z^2-(t-i)^2)".into(),
            HopfRanadaPart::Beta => "2*(x-i*y)/(x^2+y^2+z^2-(t-i)^2)".into(),
        }
    }
}

/// A pair of complex scalar fields fed through the Bateman construction.
#[derive(Clone, Debug)]
pub struct BatemanField {
    pub name: String,
    pub alpha: Arc<dyn ScalarField>,
    pub beta: Arc<dyn ScalarField>,
    /// Declares `|alpha|^2 + |beta|^2 = 1`; checked by the verifier, never
    /// enforced.
    pub normalized: bool,
}

impl BatemanField {
    pub fn new(
        name: impl Into<String>,
        alpha: Arc<dyn ScalarField>,
        beta: Arc<dyn ScalarField>,
        normalized: bool,
    ) -> Self {
        BatemanField {
            name: name.into(),
            alpha,
            beta,
            normalized,
        }
    }

    /// Parses both components with [`exprlang::parse`].
    pub fn from_expressions(alpha: &str, beta: &str, normalized: bool) -> Result<Self> {
        let a = exprlang::parse(alpha)?;
        let b = exprlang::parse(beta)?;
        Ok(Self::new("custom", Arc::new(a), Arc::new(b), normalized))
    }

    /// Constant pair; every derived form vanishes.
    pub fn constant_pair(alpha: C64, beta: C64) -> Self {
        let normalized = (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs() < 1e-12;
        Self::new(
            "constant",
            Arc::new(Constant(alpha)),
            Arc::new(Constant(beta)),
            normalized,
        )
    }

    pub fn jets(&self, p: &[f64; 4]) -> Result<(Jet2, Jet2)> {
        Ok((self.alpha.jet(p)?, self.beta.jet(p)?))
    }

    pub fn local(&self, p: &[f64; 4]) -> Result<Local> {
        let (alpha, beta) = self.jets(p)?;
        Ok(Local { point: *p, alpha, beta })
    }
}

/// The Hopf-Ranada knot: `alpha = (r^2 - t^2 - 1 + 2iz) / C`,
/// `beta = 2(x - iy) / C` with `C = r^2 - (t - i)^2`.
pub fn hopf_ranada() -> BatemanField {
    BatemanField::new(
        "hopf-ranada",
        Arc::new(HopfRanada(HopfRanadaPart::Alpha)),
        Arc::new(HopfRanada(HopfRanadaPart::Beta)),
        true,
    )
}

/// Independent closed form of `R` for the Hopf-Ranada field:
/// `8i C^-3 { [w^2 - s^2] omega^1 + i [w^2 + s^2] omega^2 - 2 w s omega^3 }`
/// with `w = x - iy` and `s = t - z - i`.
pub fn hopf_ranada_closed_form_r(p: &[f64; 4]) -> TwoForm {
    let [t, x, y, z] = *p;
    let r2 = x * x + y * y + z * z;
    let tm = C64::new(t, -1.0);
    let c = r2 - tm * tm;
    let w = C64::new(x, -y);
    let s = C64::new(t - z, -1.0);
    let pre = C64::new(0.0, 8.0) / (c * c * c);
    let a1 = w * w - s * s;
    let a2 = I * (w * w + s * s);
    let a3 = -2.0 * w * s;
    (forms::omega(1) * a1 + forms::omega(2) * a2 + forms::omega(3) * a3) * pre
}

/// A point of the complex projective line stored as `num / den`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpPoint {
    pub num: C64,
    pub den: C64,
}

impl CpPoint {
    pub fn is_pole(&self) -> bool {
        self.den.norm() < PSI_POLE_EPS
    }

    /// Affine value, or `None` at the point at infinity.
    pub fn value(&self) -> Option<C64> {
        if self.is_pole() {
            None
        } else {
            Some(self.num / self.den)
        }
    }

    /// `|den| / |(num, den)|`, which is small near the pole.
    pub fn pole_proximity(&self) -> f64 {
        let n = (self.num.norm_sqr() + self.den.norm_sqr()).sqrt();
        if n == 0.0 {
            0.0
        } else {
            self.den.norm() / n
        }
    }

    /// Chordal distance on the unit Riemann sphere (diameter 2).
    pub fn chordal_distance(&self, other: &CpPoint) -> f64 {
        let cross = (self.num * other.den - other.num * self.den).norm();
        let n1 = self.num.norm_sqr() + self.den.norm_sqr();
        let n2 = other.num.norm_sqr() + other.den.norm_sqr();
        2.0 * cross / (n1 * n2).sqrt()
    }
}

impl fmt::Display for CpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{} {:+}i", v.re, v.im),
            None => f.write_str("inf"),
        }
    }
}

/// Jets of a Bateman pair at one event, with every derived quantity.
#[derive(Clone, Copy, Debug)]
pub struct Local {
    pub point: [f64; 4],
    pub alpha: Jet2,
    pub beta: Jet2,
}

fn grad(j: &Jet2) -> CoVector {
    CoVector(j.grad)
}

fn hess_row(j: &Jet2, l: usize) -> CoVector {
    CoVector(j.hess[l])
}

impl Local {
    pub fn rs_form(&self) -> TwoForm {
        forms::wedge11(&grad(&self.alpha), &grad(&self.beta)) * 2.0
    }

    /// `dR` from second derivatives.
    pub fn d_rs_form(&self) -> ThreeForm {
        let (da, db) = (grad(&self.alpha), grad(&self.beta));
        let partials: [TwoForm; 4] = std::array::from_fn(|l| {
            (forms::wedge11(&hess_row(&self.alpha, l), &db) + forms::wedge11(&da, &hess_row(&self.beta, l))) * 2.0
        });
        forms::exterior_derivative2(&partials)
    }

    /// `|alpha|^2 + |beta|^2 - 1`.
    pub fn normalization_defect(&self) -> f64 {
        self.alpha.value.norm_sqr() + self.beta.value.norm_sqr() - 1.0
    }

    /// `k = -i (conj(alpha) d alpha + conj(beta) d beta)`.
    pub fn k_form(&self) -> CoVector {
        let (a, b) = (self.alpha.value.conj(), self.beta.value.conj());
        CoVector(std::array::from_fn(|n| {
            -I * (a * self.alpha.grad[n] + b * self.beta.grad[n])
        }))
    }

    /// `m = 2i (alpha d beta - beta d alpha)`.
    pub fn m_form(&self) -> CoVector {
        let (a, b) = (self.alpha.value, self.beta.value);
        CoVector(std::array::from_fn(|n| {
            2.0 * I * (a * self.beta.grad[n] - b * self.alpha.grad[n])
        }))
    }

    /// `dk[mu][nu] = d_mu k_nu`.
    pub fn k_partials(&self) -> [[C64; 4]; 4] {
        let (al, be) = (&self.alpha, &self.beta);
        std::array::from_fn(|mu| {
            std::array::from_fn(|nu| {
                -I * (al.grad[mu].conj() * al.grad[nu]
                    + al.value.conj() * al.hess[mu][nu]
                    + be.grad[mu].conj() * be.grad[nu]
                    + be.value.conj() * be.hess[mu][nu])
            })
        })
    }

    /// `dm[mu][nu] = d_mu m_nu`.
    pub fn m_partials(&self) -> [[C64; 4]; 4] {
        let (al, be) = (&self.alpha, &self.beta);
        std::array::from_fn(|mu| {
            std::array::from_fn(|nu| {
                2.0 * I
                    * (al.grad[mu] * be.grad[nu] + al.value * be.hess[mu][nu]
                        - be.grad[mu] * al.grad[nu]
                        - be.value * al.hess[mu][nu])
            })
        })
    }

    pub fn dk(&self) -> TwoForm {
        forms::exterior_derivative1(&self.k_partials())
    }

    pub fn dm(&self) -> TwoForm {
        forms::exterior_derivative1(&self.m_partials())
    }

    /// `S = i m ^ conj(m) / 4`.
    pub fn s_form(&self) -> TwoForm {
        let m = self.m_form();
        forms::wedge11(&m, &m.conj()) * (I / 4.0)
    }

    /// Homogeneous jets `(num, den)` of `psi_i`.
    pub fn psi_jets(&self, i: usize) -> (Jet2, Jet2) {
        frames::zeta_parts(i, self.alpha, self.beta, |j| j.conj())
    }

    pub fn psi(&self, i: usize) -> CpPoint {
        let (n, d) = self.psi_jets(i);
        CpPoint {
            num: n.value,
            den: d.value,
        }
    }

    /// `i d psi_i ^ d conj(psi_i) / (1 + |psi_i|^2)^2`, evaluated in whichever
    /// affine chart keeps the denominator largest. The expression is the same
    /// in both charts, so poles of `psi_i` are regular points here.
    pub fn psi_pullback(&self, i: usize) -> Result<TwoForm> {
        let (n, d) = self.psi_jets(i);
        frames::projective_pullback(&n, &d)
    }

    pub fn sample(&self) -> FieldSample {
        let r = self.rs_form();
        let (e, b) = eb_extract(&r);
        let k = self.k_form();
        FieldSample {
            point: self.point,
            alpha: self.alpha.value,
            beta: self.beta.value,
            r,
            f: TwoForm::from_real(r.re()),
            star_f: TwoForm::from_real(r.im().map(|v| -v)),
            e,
            b,
            k,
            m: self.m_form(),
            psi: [self.psi(1), self.psi(2), self.psi(3)],
            s: self.s_form(),
            poynting: cross(&e, &b),
            normalization_defect: self.normalization_defect(),
            k_imag_defect: k.im().iter().fold(0.0f64, |m, v| m.max(v.abs())),
            degenerate: r.max_abs() == 0.0,
        }
    }

    /// Magnetic vector potential `A` (upper index) with `curl A = B`:
    /// `F = d Re(m / 2i)`.
    pub fn magnetic_potential(&self) -> [f64; 3] {
        let m = self.m_form();
        std::array::from_fn(|i| -(m.0[i + 1] / (2.0 * I)).re)
    }

    /// Electric vector potential `C` (upper index) with `curl C = E`:
    /// `*F = d(-Im(m / 2i))`.
    pub fn electric_potential(&self) -> [f64; 3] {
        let m = self.m_form();
        std::array::from_fn(|i| (m.0[i + 1] / (2.0 * I)).im)
    }
}

/// Everything the Bateman construction yields at one event.
#[derive(Clone, Copy, Debug)]
pub struct FieldSample {
    pub point: [f64; 4],
    pub alpha: C64,
    pub beta: C64,
    pub r: TwoForm,
    pub f: TwoForm,
    pub star_f: TwoForm,
    pub e: [f64; 3],
    pub b: [f64; 3],
    pub k: CoVector,
    pub m: CoVector,
    pub psi: [CpPoint; 3],
    pub s: TwoForm,
    pub poynting: [f64; 3],
    pub normalization_defect: f64,
    /// Largest imaginary component of `k`; zero for normalized pairs.
    pub k_imag_defect: f64,
    /// `R` vanishes identically at this event.
    pub degenerate: bool,
}

pub fn sample(f: &BatemanField, p: &[f64; 4]) -> Result<FieldSample> {
    Ok(f.local(p)?.sample())
}

pub fn rs_form(f: &BatemanField, p: &[f64; 4]) -> Result<TwoForm> {
    Ok(f.local(p)?.rs_form())
}

/// `(E, B)` from `E + iB = (d/dt _| R)_i`, lower spatial indices.
pub fn eb_extract(r: &TwoForm) -> ([f64; 3], [f64; 3]) {
    let el = r.electric();
    (el.map(|c| c.re), el.map(|c| c.im))
}

#[derive(Clone, Copy, Debug)]
pub struct KmForms {
    pub k: CoVector,
    pub m: CoVector,
    pub normalization_defect: f64,
    pub k_imag_defect: f64,
}

pub fn km_forms(f: &BatemanField, p: &[f64; 4]) -> Result<KmForms> {
    let l = f.local(p)?;
    let k = l.k_form();
    Ok(KmForms {
        k,
        m: l.m_form(),
        normalization_defect: l.normalization_defect(),
        k_imag_defect: k.im().iter().fold(0.0f64, |m, v| m.max(v.abs())),
    })
}

pub fn psi_maps(f: &BatemanField, p: &[f64; 4]) -> Result<[CpPoint; 3]> {
    let l = f.local(p)?;
    Ok([l.psi(1), l.psi(2), l.psi(3)])
}

pub fn s_form(f: &BatemanField, p: &[f64; 4]) -> Result<TwoForm> {
    Ok(f.local(p)?.s_form())
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `E x B`.
pub fn poynting(sample: &FieldSample) -> [f64; 3] {
    cross(&sample.e, &sample.b)
}

/// Null tetrad `(k, l, m, conj(m))` with `g(k, l) = 1` and `g(m, conj(m)) = -1`.
#[derive(Clone, Copy, Debug)]
pub struct NullTetrad {
    pub k: [f64; 4],
    pub l: [f64; 4],
    /// Unit-normalized screen vector.
    pub m: [C64; 4],
    /// `m` as produced by the Bateman construction, index raised.
    pub m_raw: [C64; 4],
}

impl NullTetrad {
    /// Largest deviation among the seven defining inner products.
    pub fn residual(&self) -> f64 {
        let g = forms::inner_vectors;
        let k = forms::real_vector(&self.k);
        let l = forms::real_vector(&self.l);
        let m = self.m;
        let mb = m.map(|c| c.conj());
        let one = C64::new(1.0, 0.0);
        [
            g(&k, &k),
            g(&l, &l),
            g(&k, &l) - one,
            g(&l, &m),
            g(&k, &m),
            g(&m, &m),
            g(&m, &mb) + one,
        ]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
    }

    /// `max |g_{mu nu} - (k_mu l_nu + l_mu k_nu - m_mu mb_nu - mb_mu m_nu)|`.
    pub fn completeness_residual(&self) -> f64 {
        let low = |v: &[C64; 4]| forms::flat(v).0;
        let k = low(&forms::real_vector(&self.k));
        let l = low(&forms::real_vector(&self.l));
        let m = low(&self.m);
        let mb = m.map(|c| c.conj());
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let g = if a == b { METRIC[a] } else { 0.0 };
                let rebuilt = k[a] * l[b] + l[a] * k[b] - m[a] * mb[b] - mb[a] * m[b];
                worst = worst.max((rebuilt - g).norm());
            }
        }
        worst
    }
}

fn tetrad_from(k_flat: &CoVector, m_flat: &CoVector) -> Result<NullTetrad> {
    let g = forms::inner_vectors;
    let k = forms::sharp(k_flat).map(|c| C64::new(c.re, 0.0));
    if k.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::Degenerate("null tetrad: k vanishes".into()));
    }
    let m_raw = forms::sharp(m_flat);
    let mm = -g(&m_raw, &m_raw.map(|c| c.conj())).re;
    if !(mm > 0.0) {
        return Err(Error::Degenerate("null tetrad: m is not spacelike".into()));
    }
    let m = m_raw.map(|c| c / mm.sqrt());
    let mb = m.map(|c| c.conj());
    let t = forms::real_vector(&[1.0, 0.0, 0.0, 0.0]);
    let (tm, tmb) = (g(&t, &m), g(&t, &mb));
    let n1: [C64; 4] = std::array::from_fn(|a| t[a] + tmb * m[a] + tm * mb[a]);
    let nk = g(&n1, &k);
    if nk.norm() == 0.0 {
        return Err(Error::Degenerate("null tetrad: observer orthogonal to k".into()));
    }
    let nn = g(&n1, &n1);
    let l: [C64; 4] = std::array::from_fn(|a| (n1[a] - nn / (2.0 * nk) * k[a]) / nk);
    Ok(NullTetrad {
        k: k.map(|c| c.re),
        l: l.map(|c| c.re),
        m,
        m_raw,
    })
}

pub fn null_tetrad(f: &BatemanField, p: &[f64; 4]) -> Result<NullTetrad> {
    let l = f.local(p)?;
    tetrad_from(&l.k_form(), &l.m_form())
}

/// Optical scalars of the congruence `k`.
///
/// With the unit screen vector `m` of [`NullTetrad`],
/// `rho = m^mu conj(m)^nu d_nu k_mu` and `sigma = m^mu m^nu d_nu k_mu`;
/// expansion is `-Re rho`, twist `Im rho`, shear `|sigma|`. The geodesic
/// residual is `|k^mu d_mu k^nu - kappa k^nu|` with `kappa` fitted by least
/// squares.
#[derive(Clone, Copy, Debug)]
pub struct OpticalScalars {
    pub geodesic_residual: f64,
    pub inaffinity: f64,
    pub expansion: f64,
    pub twist: f64,
    pub shear: f64,
    pub rho: C64,
    pub sigma: C64,
}

pub fn optical_scalars(f: &BatemanField, p: &[f64; 4]) -> Result<OpticalScalars> {
    let local = f.local(p)?;
    let tetrad = tetrad_from(&local.k_form(), &local.m_form())?;
    let dk = local.k_partials();
    let m = tetrad.m;
    let mb = m.map(|c| c.conj());
    let mut rho = ZERO;
    let mut sigma = ZERO;
    for mu in 0..4 {
        for nu in 0..4 {
            rho += m[mu] * mb[nu] * dk[nu][mu];
            sigma += m[mu] * m[nu] * dk[nu][mu];
        }
    }
    let k = tetrad.k;
    let acc: [f64; 4] = std::array::from_fn(|nu| (0..4).map(|mu| k[mu] * dk[mu][nu].re * METRIC[nu]).sum());
    let kk: f64 = k.iter().map(|v| v * v).sum();
    let inaffinity = (0..4).map(|a| acc[a] * k[a]).sum::<f64>() / kk;
    let geodesic_residual = (0..4).map(|a| (acc[a] - inaffinity * k[a]).powi(2)).sum::<f64>().sqrt();
    Ok(OpticalScalars {
        geodesic_residual,
        inaffinity,
        expansion: -rho.re,
        twist: rho.im,
        shear: sigma.norm(),
        rho,
        sigma,
    })
}

/// Unit quaternion `alpha + j beta` of a normalized pair.
pub fn section(local: &Local) -> Result<crate::quaternion::UnitQuaternion> {
    crate::quaternion::UnitQuaternion::from_complex(local.alpha.value, local.beta.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_points(seed: u64, n: usize, half: f64) -> Vec<[f64; 4]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| std::array::from_fn(|_| rng.gen_range(-half..half)))
            .collect()
    }

    fn fd_partials(field: impl Fn(&[f64; 4]) -> CoVector, p: &[f64; 4]) -> TwoForm {
        forms::fd_exterior_derivative1(|q| Ok::<_, ()>(field(q)), p, 1e-5).unwrap()
    }

    fn curl(field: impl Fn(&[f64; 4]) -> [f64; 3], p: &[f64; 4]) -> [f64; 3] {
        let h = 1e-5;
        let d = |axis: usize| {
            let mut hi = *p;
            let mut lo = *p;
            hi[axis] += h;
            lo[axis] -= h;
            let (a, b) = (field(&hi), field(&lo));
            [0, 1, 2].map(|i| (a[i] - b[i]) / (2.0 * h))
        };
        let (dx, dy, dz) = (d(1), d(2), d(3));
        [dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]]
    }

    #[test]
    fn hopf_ranada_at_origin() {
        let hr = hopf_ranada();
        let l = hr.local(&[0.0; 4]).unwrap();
        assert!((l.alpha.value - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(l.beta.value.norm() < 1e-15);
        let want = forms::omega(1) * c(0.0, 8.0) + forms::omega(2) * 8.0;
        assert!((l.rs_form() - want).max_abs() < 1e-13);
        let psi = [l.psi(1), l.psi(2), l.psi(3)].map(|p| p.value().unwrap());
        assert!(psi[0].norm() < 1e-15);
        assert!((psi[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((psi[2] - c(0.0, -1.0)).norm() < 1e-15);
        let s = l.sample();
        assert!((s.e[1].abs() - 8.0).abs() < 1e-13 && s.e[0].abs() + s.e[2].abs() < 1e-13);
        assert!((s.b[0].abs() - 8.0).abs() < 1e-13 && s.b[1].abs() + s.b[2].abs() < 1e-13);
        let pv = poynting(&s);
        assert!(pv[0].abs() + pv[1].abs() < 1e-12);
        assert!((pv[2].abs() - 64.0).abs() < 1e-11);
    }

    #[test]
    fn eb_examples() {
        let (e, b) = eb_extract(&(forms::omega(1) * c(0.0, 8.0) + forms::omega(2) * 8.0));
        assert_eq!(e, [0.0, 8.0, 0.0]);
        assert_eq!(b, [8.0, 0.0, 0.0]);
        // omega^1 alone: E = (1, 0, 0) and no magnetic part; not a null field.
        let (e, b) = eb_extract(&forms::omega(1));
        assert_eq!(e, [1.0, 0.0, 0.0]);
        assert_eq!(b, [0.0, 0.0, 0.0]);
        assert_eq!(eb_extract(&TwoForm::ZERO), ([0.0; 3], [0.0; 3]));
    }

    #[test]
    fn reconstruction_from_f() {
        // F_{ti} = E_i and F_{jk} = -eps_ijk B_i.
        for p in random_points(1, 50, 2.0) {
            let s = sample(&hopf_ranada(), &p).unwrap();
            for i in 0..3 {
                assert_eq!(s.f.0[i].re, s.e[i]);
                assert!((s.f.0[i + 3].re + s.b[i]).abs() < 1e-12 * (1.0 + s.b[i].abs()));
                assert_eq!(s.star_f.0[i].re, -s.b[i]);
            }
            assert!((s.star_f - forms::hodge2(&s.f)).max_abs() < 1e-12 * (1.0 + s.r.max_abs()));
        }
    }

    #[test]
    fn constant_pair_is_degenerate() {
        let f = BatemanField::constant_pair(c(0.6, 0.0), c(0.0, 0.8));
        let s = sample(&f, &[0.3, 1.0, 2.0, -1.0]).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.r, TwoForm::ZERO);
        assert!(null_tetrad(&f, &[0.0; 4]).is_err());
    }

    #[test]
    fn matches_closed_form() {
        let hr = hopf_ranada();
        for p in random_points(2, 200, 2.0) {
            let r = rs_form(&hr, &p).unwrap();
            let closed = hopf_ranada_closed_form_r(&p);
            assert!((r - closed).max_abs() <= 1e-9 * closed.max_abs().max(1e-300), "{p:?}");
        }
    }

    #[test]
    fn normalized_and_limit_at_infinity() {
        let hr = hopf_ranada();
        for p in random_points(3, 1000, 3.0) {
            assert!(hr.local(&p).unwrap().normalization_defect().abs() < 1e-10);
        }
        for dir in [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [-0.48, 0.6, -0.64]] {
            for t in [0.0, 1.0] {
                let p = [t, 1e6 * dir[0], 1e6 * dir[1], 1e6 * dir[2]];
                let l = hr.local(&p).unwrap();
                assert!((l.alpha.value - c(1.0, 0.0)).norm() < 1e-5);
                assert!(l.beta.value.norm() < 1e-5);
            }
        }
    }

    #[test]
    fn null_field_and_bateman_identities() {
        let hr = hopf_ranada();
        for p in random_points(4, 500, 2.0) {
            let l = hr.local(&p).unwrap();
            let (k, m, r) = (l.k_form(), l.m_form(), l.rs_form());
            let scale = 1.0 + r.max_abs();
            assert!(forms::inner(&k, &k).norm() < 1e-10 * scale);
            assert!(forms::inner(&m, &m).norm() < 1e-10 * scale);
            assert!(forms::inner(&k, &m).norm() < 1e-10 * scale);
            assert!(k.im().iter().all(|v| v.abs() < 1e-10 * scale));
            assert!((forms::wedge11(&k, &m) - r).max_abs() < 1e-9 * scale);
            assert!((forms::hodge2(&r) - r * I).max_abs() < 1e-9 * scale);
            assert!(forms::wedge22(&r, &r).norm() < 1e-9 * scale * scale);
            assert!(l.d_rs_form().max_abs() < 1e-9 * scale);
            let s = l.sample();
            let (e, b) = (s.e, s.b);
            let dot: f64 = (0..3).map(|i| e[i] * b[i]).sum();
            let ne = e.iter().map(|v| v * v).sum::<f64>().sqrt();
            let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(dot.abs() < 1e-9 * ne * nb);
            assert!((ne - nb).abs() < 1e-9 * ne);
        }
    }

    #[test]
    fn unnormalized_pair_has_complex_k() {
        let f = BatemanField::from_expressions(
            "2*(x^2+y^2+z^2-t^2-1+2*i*z)/(x^2+y^2+z^2-(t-i)^2)",
            "2*(x-i*y)/(x^2+y^2+z^2-(t-i)^2)",
            false,
        )
        .unwrap();
        let km = km_forms(&f, &[0.1, 0.4, -0.3, 0.2]).unwrap();
        assert!(km.k_imag_defect > 1e-3);
        assert!(km.normalization_defect.abs() > 1e-3);
    }

    #[test]
    fn parsed_pair_matches_builtin() {
        let parsed = BatemanField::from_expressions(
            "(x^2+y^2+z^2-t^2-1+2*i*z)/(x^2+y^2+z^2-(t-i)^2)",
            "2*(x-i*y)/(x^2+y^2+z^2-(t-i)^2)",
            true,
        )
        .unwrap();
        let hr = hopf_ranada();
        for p in random_points(5, 50, 2.0) {
            let (a, b) = (parsed.local(&p).unwrap(), hr.local(&p).unwrap());
            assert!((a.rs_form() - b.rs_form()).max_abs() < 1e-12 * (1.0 + b.rs_form().max_abs()));
            assert!((a.d_rs_form().max_abs() - b.d_rs_form().max_abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn useful_relations_by_jets_and_differences() {
        let hr = hopf_ranada();
        for p in random_points(6, 200, 2.0) {
            let l = hr.local(&p).unwrap();
            let (k, m) = (l.k_form(), l.m_form());
            let scale = 1.0 + l.rs_form().max_abs();
            let s = l.s_form();
            assert!(TwoForm::from_real(s.im()).max_abs() < 1e-12 * scale);
            assert!((l.dk() - s).max_abs() < 1e-9 * scale);
            assert!((l.dm() - forms::wedge11(&k, &m) * (2.0 * I)).max_abs() < 1e-9 * scale);
            let kf = |q: &[f64; 4]| hr.local(q).unwrap().k_form();
            assert!((fd_partials(kf, &p) - s).max_abs() < 1e-6 * scale);
            let mf = |q: &[f64; 4]| hr.local(q).unwrap().m_form() * (1.0 / (2.0 * I));
            assert!((fd_partials(mf, &p) - l.rs_form()).max_abs() < 1e-6 * scale);
            let sk = forms::real_vector(&forms::sharp(&k).map(|c| c.re));
            assert!(forms::interior(&sk, &s).max_abs() < 1e-9 * scale);
            let t = null_tetrad(&hr, &p).unwrap();
            assert!(forms::interior(&forms::real_vector(&t.l), &s).max_abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn psi_maps_match_zeta_of_section() {
        let hr = hopf_ranada();
        for p in random_points(7, 300, 2.0) {
            let l = hr.local(&p).unwrap();
            let u = section(&l).unwrap();
            for i in 1..4 {
                let psi = l.psi(i);
                let Ok(z) = frames::zeta_map(i, u) else { continue };
                let zp = CpPoint {
                    num: z,
                    den: c(1.0, 0.0),
                };
                assert!(psi.chordal_distance(&zp) < 1e-12);
            }
        }
    }

    #[test]
    fn psi_pole_marker() {
        let f = BatemanField::constant_pair(c(0.0, 0.0), c(1.0, 0.0));
        let psi = psi_maps(&f, &[0.0; 4]).unwrap();
        assert!(psi[0].is_pole());
        assert_eq!(psi[0].value(), None);
        assert_eq!(psi[0].to_string(), "inf");
        let far = CpPoint {
            num: c(1e200, 0.0),
            den: c(1.0, 0.0),
        };
        assert!(psi[0].chordal_distance(&far) < 1e-150);
    }

    #[test]
    fn pullbacks_give_f_and_star_f() {
        let hr = hopf_ranada();
        for p in random_points(8, 300, 2.0) {
            let l = hr.local(&p).unwrap();
            let s = l.sample();
            let scale = 1.0 + s.r.max_abs();
            assert!((l.psi_pullback(2).unwrap() - s.f).max_abs() < 1e-8 * scale);
            assert!((l.psi_pullback(3).unwrap() - s.star_f).max_abs() < 1e-8 * scale);
        }
    }

    #[test]
    fn tetrad_identities() {
        let hr = hopf_ranada();
        for p in random_points(9, 200, 2.0) {
            let t = null_tetrad(&hr, &p).unwrap();
            assert!(t.residual() < 1e-10, "{}", t.residual());
            assert!(t.completeness_residual() < 1e-9);
        }
    }

    #[test]
    fn poynting_examples() {
        assert_eq!(cross(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), [0.0, 0.0, 1.0]);
        let hr = hopf_ranada();
        for p in random_points(10, 200, 2.0) {
            let s = sample(&hr, &p).unwrap();
            let kv = forms::sharp(&s.k).map(|c| c.re);
            let ks = [kv[1], kv[2], kv[3]];
            let pv = s.poynting;
            let cr = cross(&ks, &pv);
            let sin = cr.iter().map(|v| v * v).sum::<f64>().sqrt()
                / (ks.iter().map(|v| v * v).sum::<f64>().sqrt() * pv.iter().map(|v| v * v).sum::<f64>().sqrt());
            assert!(sin < 1e-6, "angle {sin}");
        }
    }

    #[test]
    fn congruence_is_geodesic_shear_free_and_twisting() {
        let hr = hopf_ranada();
        let mut min_twist = f64::INFINITY;
        for p in random_points(11, 200, 1.0) {
            let o = optical_scalars(&hr, &p).unwrap();
            assert!(o.shear < 1e-6, "shear {}", o.shear);
            assert!(o.geodesic_residual < 1e-6, "geodesic {}", o.geodesic_residual);
            min_twist = min_twist.min(o.twist.abs());
        }
        assert!(min_twist > 1e-3, "twist {min_twist}");
    }

    #[test]
    fn potentials_have_the_right_curls() {
        let hr = hopf_ranada();
        for p in random_points(12, 50, 1.5) {
            let s = sample(&hr, &p).unwrap();
            let ca = curl(|q| hr.local(q).unwrap().magnetic_potential(), &p);
            let cc = curl(|q| hr.local(q).unwrap().electric_potential(), &p);
            let scale = 1.0 + s.r.max_abs();
            for i in 0..3 {
                assert!((ca[i] - s.b[i]).abs() < 1e-6 * scale);
                assert!((cc[i] - s.e[i]).abs() < 1e-6 * scale);
            }
        }
    }
}
