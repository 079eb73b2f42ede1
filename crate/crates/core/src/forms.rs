//! Complex exterior algebra on Minkowski space, signature `(+, -, -, -)`,
//! coordinates `(t, x, y, z)` and orientation `eps_txyz = +1`.
//!
//! Two-forms use the basis
//! `(dt^dx, dt^dy, dt^dz, dy^dz, dz^dx, dx^dy)`: the first three slots are
//! the electric block, the last three the magnetic block. With this layout
//! the Hodge star is `(e, m) -> (m, -e)`.

use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;
const ZERO: C64 = C64::new(0.0, 0.0);

/// Diagonal of the metric `g_{mu mu}` (equal to its inverse).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Index pairs `(mu, nu)` of the 2-form basis slots.
pub const TWO_FORM_BASIS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

/// Index triples of the 3-form basis `(dt^dx^dy, dt^dx^dz, dt^dy^dz, dx^dy^dz)`.
pub const THREE_FORM_BASIS: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];

/// Levi-Civita symbol with `eps_0123 = +1`.
pub fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn max_abs<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Index-down complex 1-form.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CoVector(pub [C64; 4]);

impl CoVector {
    pub const ZERO: Self = CoVector([ZERO; 4]);

    pub fn from_real(v: [f64; 4]) -> Self {
        CoVector(v.map(|c| C64::new(c, 0.0)))
    }

    /// `dx^mu`.
    pub fn basis(mu: usize) -> Self {
        let mut c = [ZERO; 4];
        c[mu] = C64::new(1.0, 0.0);
        CoVector(c)
    }

    pub fn conj(&self) -> Self {
        CoVector(self.0.map(|c| c.conj()))
    }

    pub fn re(&self) -> [f64; 4] {
        self.0.map(|c| c.re)
    }

    pub fn im(&self) -> [f64; 4] {
        self.0.map(|c| c.im)
    }

    pub fn scale(&self, s: C64) -> Self {
        CoVector(self.0.map(|c| c * s))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Applies the 1-form to a vector.
    pub fn pair(&self, v: &[C64; 4]) -> C64 {
        (0..4).map(|a| self.0[a] * v[a]).sum()
    }
}

impl Index<usize> for CoVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl Add for CoVector {
    type Output = CoVector;
    fn add(self, rhs: Self) -> Self {
        CoVector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for CoVector {
    type Output = CoVector;
    fn sub(self, rhs: Self) -> Self {
        CoVector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<C64> for CoVector {
    type Output = CoVector;
    fn mul(self, rhs: C64) -> Self {
        self.scale(rhs)
    }
}

/// Complex 2-form in the fixed six-slot basis.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct TwoForm(pub [C64; 6]);

impl TwoForm {
    pub const ZERO: Self = TwoForm([ZERO; 6]);

    pub fn basis(slot: usize) -> Self {
        let mut c = [ZERO; 6];
        c[slot] = C64::new(1.0, 0.0);
        TwoForm(c)
    }

    pub fn from_real(v: [f64; 6]) -> Self {
        TwoForm(v.map(|c| C64::new(c, 0.0)))
    }

    /// Antisymmetric component matrix `a_{mu nu}`.
    pub fn to_matrix(&self) -> [[C64; 4]; 4] {
        let mut m = [[ZERO; 4]; 4];
        for (slot, &(a, b)) in TWO_FORM_BASIS.iter().enumerate() {
            m[a][b] = self.0[slot];
            m[b][a] = -self.0[slot];
        }
        m
    }

    /// Reads the basis slots of a component matrix (antisymmetry assumed).
    pub fn from_matrix(m: &[[C64; 4]; 4]) -> Self {
        TwoForm(std::array::from_fn(|slot| {
            let (a, b) = TWO_FORM_BASIS[slot];
            m[a][b]
        }))
    }

    pub fn component(&self, mu: usize, nu: usize) -> C64 {
        self.to_matrix()[mu][nu]
    }

    pub fn electric(&self) -> [C64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn magnetic(&self) -> [C64; 3] {
        [self.0[3], self.0[4], self.0[5]]
    }

    pub fn conj(&self) -> Self {
        TwoForm(self.0.map(|c| c.conj()))
    }

    pub fn re(&self) -> [f64; 6] {
        self.0.map(|c| c.re)
    }

    pub fn im(&self) -> [f64; 6] {
        self.0.map(|c| c.im)
    }

    pub fn scale(&self, s: C64) -> Self {
        TwoForm(self.0.map(|c| c * s))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Index<usize> for TwoForm {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl Add for TwoForm {
    type Output = TwoForm;
    fn add(self, rhs: Self) -> Self {
        TwoForm(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for TwoForm {
    type Output = TwoForm;
    fn sub(self, rhs: Self) -> Self {
        TwoForm(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for TwoForm {
    type Output = TwoForm;
    fn neg(self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<C64> for TwoForm {
    type Output = TwoForm;
    fn mul(self, rhs: C64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<f64> for TwoForm {
    type Output = TwoForm;
    fn mul(self, rhs: f64) -> Self {
        self.scale(C64::new(rhs, 0.0))
    }
}

/// Complex 3-form in the basis [`THREE_FORM_BASIS`].
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ThreeForm(pub [C64; 4]);

impl ThreeForm {
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

pub fn wedge11(a: &CoVector, b: &CoVector) -> TwoForm {
    TwoForm(std::array::from_fn(|slot| {
        let (m, n) = TWO_FORM_BASIS[slot];
        a.0[m] * b.0[n] - a.0[n] * b.0[m]
    }))
}

/// Coefficient of `dt^dx^dy^dz` in `a ^ b`.
pub fn wedge22(a: &TwoForm, b: &TwoForm) -> C64 {
    let (ea, ma) = (a.electric(), a.magnetic());
    let (eb, mb) = (b.electric(), b.magnetic());
    (0..3).map(|i| ea[i] * mb[i] + ma[i] * eb[i]).sum()
}

pub fn hodge2(a: &TwoForm) -> TwoForm {
    let e = a.electric();
    let m = a.magnetic();
    TwoForm([m[0], m[1], m[2], -e[0], -e[1], -e[2]])
}

/// Index lowering `v_mu = g_{mu nu} v^nu`.
pub fn flat(v: &[C64; 4]) -> CoVector {
    CoVector(std::array::from_fn(|a| v[a] * METRIC[a]))
}

/// Index raising `a^mu = g^{mu nu} a_nu`.
pub fn sharp(a: &CoVector) -> [C64; 4] {
    std::array::from_fn(|m| a.0[m] * METRIC[m])
}

/// `g^{mu nu} a_mu b_nu`, bilinear (no conjugation).
pub fn inner(a: &CoVector, b: &CoVector) -> C64 {
    (0..4).map(|m| a.0[m] * b.0[m] * METRIC[m]).sum()
}

/// `g(u, v)` for vectors, bilinear.
pub fn inner_vectors(u: &[C64; 4], v: &[C64; 4]) -> C64 {
    (0..4).map(|m| u[m] * v[m] * METRIC[m]).sum()
}

/// `(v _| a)_nu = v^mu a_{mu nu}`.
pub fn interior(v: &[C64; 4], a: &TwoForm) -> CoVector {
    let m = a.to_matrix();
    CoVector(std::array::from_fn(|nu| (0..4).map(|mu| v[mu] * m[mu][nu]).sum()))
}

pub fn real_vector(v: &[f64; 4]) -> [C64; 4] {
    v.map(|c| C64::new(c, 0.0))
}

/// `d a` from the partials `partials[mu][nu] = d_mu a_nu`.
pub fn exterior_derivative1(partials: &[[C64; 4]; 4]) -> TwoForm {
    TwoForm(std::array::from_fn(|slot| {
        let (m, n) = TWO_FORM_BASIS[slot];
        partials[m][n] - partials[n][m]
    }))
}

/// `d a` from the partial derivatives `partials[l] = d_l a`.
pub fn exterior_derivative2(partials: &[TwoForm; 4]) -> ThreeForm {
    let mats: [[[C64; 4]; 4]; 4] = std::array::from_fn(|l| partials[l].to_matrix());
    ThreeForm(std::array::from_fn(|slot| {
        let (l, m, n) = THREE_FORM_BASIS[slot];
        mats[l][m][n] + mats[m][n][l] + mats[n][l][m]
    }))
}

/// Central-difference step for a coordinate of magnitude `x`.
pub fn fd_step(rel: f64, x: f64) -> f64 {
    rel * x.abs().max(1.0)
}

/// Exterior derivative of a covector field by central differences with
/// relative step `rel`.
pub fn fd_exterior_derivative1<E>(
    field: impl Fn(&[f64; 4]) -> Result<CoVector, E>,
    p: &[f64; 4],
    rel: f64,
) -> Result<TwoForm, E> {
    let mut partials = [[ZERO; 4]; 4];
    for (mu, row) in partials.iter_mut().enumerate() {
        let h = fd_step(rel, p[mu]);
        let mut hi = *p;
        let mut lo = *p;
        hi[mu] += h;
        lo[mu] -= h;
        let (fh, fl) = (field(&hi)?, field(&lo)?);
        for nu in 0..4 {
            row[nu] = (fh.0[nu] - fl.0[nu]) / (2.0 * h);
        }
    }
    Ok(exterior_derivative1(&partials))
}

/// Exterior derivative of a 2-form field by central differences.
pub fn fd_exterior_derivative2<E>(
    field: impl Fn(&[f64; 4]) -> Result<TwoForm, E>,
    p: &[f64; 4],
    rel: f64,
) -> Result<ThreeForm, E> {
    let mut partials = [TwoForm::ZERO; 4];
    for (mu, slot) in partials.iter_mut().enumerate() {
        let h = fd_step(rel, p[mu]);
        let mut hi = *p;
        let mut lo = *p;
        hi[mu] += h;
        lo[mu] -= h;
        *slot = (field(&hi)? - field(&lo)?) * (0.5 / h);
    }
    Ok(exterior_derivative2(&partials))
}

/// Self-dual basis `omega^1 = dt^dx + i dy^dz` and its cyclic partners.
pub fn omega(i: usize) -> TwoForm {
    assert!((1..=3).contains(&i), "omega index must be 1, 2 or 3");
    let mut c = [ZERO; 6];
    c[i - 1] = C64::new(1.0, 0.0);
    c[i + 2] = C64::new(0.0, 1.0);
    TwoForm(c)
}
