//! Invariant framings of the nonzero quaternions, the Maurer-Cartan form,
//! the adjoint rotation and the maps `l_i`, `sigma` and `zeta_i`.
//!
//! Forms on quaternion space reuse [`CoVector`] and [`TwoForm`] with the
//! coordinates `(q0, q1, q2, q3)` in place of `(t, x, y, z)`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{self, CoVector, TwoForm, C64};
use crate::jet::Jet2;
use crate::quaternion::{Quaternion, UnitQuaternion};

/// Denominators below this magnitude are treated as the point at infinity.
pub const POLE_EPS: f64 = 1e-300;

/// Default relative step for finite-difference differentials.
pub const FD_REL_STEP: f64 = 1e-5;

const I: C64 = C64::new(0.0, 1.0);

/// `eps_ijk` on `1..=3` with `eps_123 = +1`; zero when an index is 0.
pub fn epsilon3(i: usize, j: usize, k: usize) -> f64 {
    if i == 0 || j == 0 || k == 0 {
        return 0.0;
    }
    forms::levi_civita([0, i, j, k])
}

/// The two cyclic partners of `i` in `1..=3`, in order.
pub fn cyclic(i: usize) -> (usize, usize) {
    match i {
        1 => (2, 3),
        2 => (3, 1),
        3 => (1, 2),
        _ => panic!("index {i} is not in 1..=3"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrameSide {
    /// `L_a(q) = q e_a`
    Left,
    /// `R_a(q) = e_a q`
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantVector(pub [f64; 4]);

impl InvariantVector {
    pub fn dot(&self, other: &Self) -> f64 {
        (0..4).map(|a| self.0[a] * other.0[a]).sum()
    }
}

pub fn invariant_field(side: FrameSide, alpha: usize, q: Quaternion) -> InvariantVector {
    let e = Quaternion::basis(alpha);
    let v = match side {
        FrameSide::Left => q * e,
        FrameSide::Right => e * q,
    };
    InvariantVector(v.0)
}

type Mat4 = [[f64; 4]; 4];

/// Matrix of the linear field `q -> q e_a` (or `e_a q`).
fn field_matrix(side: FrameSide, alpha: usize) -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for b in 0..4 {
        let col = invariant_field(side, alpha, Quaternion::basis(b)).0;
        for r in 0..4 {
            m[r][b] = col[r];
        }
    }
    m
}

fn matmul(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|r| std::array::from_fn(|c| (0..4).map(|k| a[r][k] * b[k][c]).sum()))
}

/// Lie bracket of two invariant fields, `[X_a, Y_b]` with `X` on side
/// `sides.0` and `Y` on side `sides.1`.
///
/// For linear fields `X = A q` and `Y = B q` the bracket is the linear field
/// `(B A - A B) q`. The result is expanded over the framing of `sides.0`;
/// the residual of that expansion is returned alongside (zero in exact
/// arithmetic, since the framing matrices span the commutators).
pub fn bracket_mixed(sides: (FrameSide, FrameSide), alpha: usize, beta: usize) -> ([f64; 4], f64) {
    let a = field_matrix(sides.0, alpha);
    let b = field_matrix(sides.1, beta);
    let (ba, ab) = (matmul(&b, &a), matmul(&a, &b));
    let comm: Mat4 = std::array::from_fn(|r| std::array::from_fn(|c| ba[r][c] - ab[r][c]));
    let basis: [Mat4; 4] = std::array::from_fn(|g| field_matrix(sides.0, g));
    // The framing matrices are orthogonal with trace(M_g^T M_h) = 4 delta_gh.
    let coeffs: [f64; 4] = std::array::from_fn(|g| {
        let mut s = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                s += basis[g][r][c] * comm[r][c];
            }
        }
        s / 4.0
    });
    let mut residual: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            let rebuilt: f64 = (0..4).map(|g| coeffs[g] * basis[g][r][c]).sum();
            residual = residual.max((rebuilt - comm[r][c]).abs());
        }
    }
    (coeffs, residual)
}

/// `[X_a, X_b]` expanded over the same framing.
pub fn bracket(side: FrameSide, alpha: usize, beta: usize) -> [f64; 4] {
    bracket_mixed((side, side), alpha, beta).0
}

/// Left-invariant Maurer-Cartan form `q^{-1} dq` at a base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MCForm {
    /// `components[mu][a]` is the `dq^a` coefficient of `lambda^mu`.
    pub components: [[f64; 4]; 4],
}

impl MCForm {
    pub fn covector(&self, mu: usize) -> CoVector {
        CoVector::from_real(self.components[mu])
    }

    /// `lambda(v)` as a quaternion.
    pub fn apply(&self, v: &[f64; 4]) -> Quaternion {
        Quaternion(std::array::from_fn(|mu| {
            (0..4).map(|a| self.components[mu][a] * v[a]).sum()
        }))
    }
}

pub fn maurer_cartan(q: Quaternion) -> Result<MCForm> {
    let n2 = q.norm_sqr();
    if n2 == 0.0 || !n2.is_finite() {
        return Err(Error::ZeroQuaternion);
    }
    let mut c = [[0.0; 4]; 4];
    for a in 0..4 {
        c[0][a] = q[a] / n2;
    }
    for i in 1..4 {
        c[i][i] += q[0] / n2;
        c[i][0] -= q[i] / n2;
        for j in 1..4 {
            for k in 1..4 {
                c[i][k] -= epsilon3(i, j, k) * q[j] / n2;
            }
        }
    }
    Ok(MCForm { components: c })
}

/// `d lambda^i = -2 lambda^j ^ lambda^k` for cyclic `(i, j, k)`; zero for `i = 0`.
pub fn dlambda_structure(i: usize, q: Quaternion) -> Result<TwoForm> {
    let mc = maurer_cartan(q)?;
    if i == 0 {
        return Ok(TwoForm::ZERO);
    }
    let (j, k) = cyclic(i);
    Ok(forms::wedge11(&mc.covector(j), &mc.covector(k)) * -2.0)
}

/// Element of SO(3), row-major: `m[i][j]` is the `e_i` component of `l_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation3(pub [[f64; 3]; 3]);

impl Rotation3 {
    pub fn column(&self, j: usize) -> [f64; 3] {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// `max |(Q^T Q - I)_ij|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let s: f64 = (0..3).map(|r| self.0[r][a] * self.0[r][b]).sum();
                worst = worst.max((s - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }
}

pub fn adjoint_rotation(u: UnitQuaternion) -> Rotation3 {
    let [u0, u1, u2, u3] = u.coeffs();
    Rotation3([
        [
            u0 * u0 + u1 * u1 - u2 * u2 - u3 * u3,
            2.0 * (u1 * u2 - u0 * u3),
            2.0 * (u1 * u3 + u0 * u2),
        ],
        [
            2.0 * (u1 * u2 + u0 * u3),
            u0 * u0 - u1 * u1 + u2 * u2 - u3 * u3,
            2.0 * (u2 * u3 - u0 * u1),
        ],
        [
            2.0 * (u1 * u3 - u0 * u2),
            2.0 * (u2 * u3 + u0 * u1),
            u0 * u0 - u1 * u1 - u2 * u2 + u3 * u3,
        ],
    ])
}

/// `l_i(u) = u e_i u-bar`, a point of the unit sphere in `Im H`.
pub fn sphere_map(i: usize, u: UnitQuaternion) -> [f64; 3] {
    assert!((1..=3).contains(&i), "sphere_map index must be 1, 2 or 3");
    let q = u.quaternion();
    (q * Quaternion::basis(i) * q.conjugate()).imag()
}

/// How differentials of maps on quaternion space are evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Differential {
    /// Central differences with the given relative step.
    FiniteDifference(f64),
    /// Closed-form derivatives.
    Analytic,
}

impl Default for Differential {
    fn default() -> Self {
        Differential::FiniteDifference(FD_REL_STEP)
    }
}

/// `d l_i` at `q`: row `a` holds the partial derivative along `q^a`.
pub fn sphere_map_differential(i: usize, q: Quaternion, how: Differential) -> Result<[[f64; 3]; 4]> {
    let (_, u) = q.normalize()?;
    match how {
        Differential::FiniteDifference(rel) => {
            let mut out = [[0.0; 3]; 4];
            for (a, row) in out.iter_mut().enumerate() {
                let h = forms::fd_step(rel, q[a]);
                let mut hi = q;
                let mut lo = q;
                hi.0[a] += h;
                lo.0[a] -= h;
                let lh = sphere_map(i, hi.normalize()?.1);
                let ll = sphere_map(i, lo.normalize()?.1);
                for c in 0..3 {
                    row[c] = (lh[c] - ll[c]) / (2.0 * h);
                }
            }
            Ok(out)
        }
        Differential::Analytic => {
            // d l_i = 2 lambda^j eps_jik l_k
            let mc = maurer_cartan(q)?;
            let l: [[f64; 3]; 4] = std::array::from_fn(|k| if k == 0 { [0.0; 3] } else { sphere_map(k, u) });
            let mut out = [[0.0; 3]; 4];
            for (a, row) in out.iter_mut().enumerate() {
                for j in 1..4 {
                    for k in 1..4 {
                        let e = epsilon3(j, i, k);
                        if e != 0.0 {
                            for c in 0..3 {
                                row[c] += 2.0 * mc.components[j][a] * e * l[k][c];
                            }
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

/// `sigma(n) = (n2 - i n3) / (1 + n1)` on the sphere minus `(-1, 0, 0)`.
pub fn stereographic(n: [f64; 3]) -> Result<Complex64> {
    let den = 1.0 + n[0];
    if den.abs() < POLE_EPS {
        return Err(Error::Pole("stereographic projection is defined on S² ∖ (-1, 0, 0)"));
    }
    Ok(Complex64::new(n[1], -n[2]) / den)
}

/// Numerator and denominator of `zeta_i` as functions of
/// `v1 = q0 + i q1` and `v2 = q2 - i q3`. Both are homogeneous of degree one,
/// so the ratio is unchanged by rescaling `q`.
pub fn zeta_parts<T>(i: usize, v1: T, v2: T, conj: impl Fn(T) -> T) -> (T, T)
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<C64, Output = T>,
{
    match i {
        1 => (v2 * I, v1),
        2 => (conj(v1) + v2 * I, v1 + conj(v2) * I),
        3 => ((v2 - conj(v1)) * I, conj(v2) + v1),
        _ => panic!("zeta index {i} is not in 1..=3"),
    }
}

/// `zeta_i(q)` as a homogeneous pair on the complex projective line.
pub fn zeta_fraction(i: usize, q: Quaternion) -> (Complex64, Complex64) {
    let p = q.to_complex_pair();
    zeta_parts(i, p.z1, p.z2, |z| z.conj())
}

/// `zeta_i = sigma o l_i`, through the closed forms.
pub fn zeta_map(i: usize, u: UnitQuaternion) -> Result<Complex64> {
    let (num, den) = zeta_fraction(i, u.quaternion());
    if den.norm() < POLE_EPS {
        return Err(Error::Pole("zeta map"));
    }
    Ok(num / den)
}

/// Homogeneous jets `(num, den)` of `zeta_i` over the coordinates of `q`.
pub fn zeta_fraction_jets(i: usize, q: Quaternion) -> (Jet2, Jet2) {
    let [q0, q1, q2, q3] = Jet2::coordinates(&q.0);
    let v1 = q0 + q1 * I;
    let v2 = q2 - q3 * I;
    zeta_parts(i, v1, v2, |z| z.conj())
}

fn zeta_jet(i: usize, q: Quaternion) -> Result<Jet2> {
    let (num, den) = zeta_fraction_jets(i, q);
    if den.value.norm() < POLE_EPS {
        return Err(Error::Pole("zeta map"));
    }
    Ok(num / den)
}

/// `d zeta_i` at `q` as a complex covector on quaternion space.
pub fn zeta_differential(i: usize, q: Quaternion, how: Differential) -> Result<(Complex64, CoVector)> {
    match how {
        Differential::Analytic => {
            let j = zeta_jet(i, q)?;
            Ok((j.value, CoVector(j.grad)))
        }
        Differential::FiniteDifference(rel) => {
            let eval = |p: Quaternion| -> Result<Complex64> {
                let (num, den) = zeta_fraction(i, p);
                if den.norm() < POLE_EPS {
                    return Err(Error::Pole("zeta map"));
                }
                Ok(num / den)
            };
            let value = eval(q)?;
            let mut grad = [C64::new(0.0, 0.0); 4];
            for (a, g) in grad.iter_mut().enumerate() {
                let h = forms::fd_step(rel, q[a]);
                let mut hi = q;
                let mut lo = q;
                hi.0[a] += h;
                lo.0[a] -= h;
                *g = (eval(hi)? - eval(lo)?) / (2.0 * h);
            }
            Ok((value, CoVector(grad)))
        }
    }
}

/// `i dz ^ dz-bar / (1 + |z|^2)^2` for a complex function `z` with
/// differential `dz`. This is the pullback of `-2 pi` times the normalized
/// area form of the sphere along the inverse stereographic map.
pub fn sphere_area_pullback(z: Complex64, dz: &CoVector) -> TwoForm {
    let w = 1.0 + z.norm_sqr();
    forms::wedge11(dz, &dz.conj()) * (I / (w * w))
}

/// Pullback of `i dz ^ dz-bar / (1 + |z|^2)^2` along a map into the complex
/// projective line given by homogeneous jets `z = num / den`.
///
/// The affine chart with the larger denominator is used; the form is the
/// same in both charts, so poles of `z` are regular points.
pub fn projective_pullback(num: &Jet2, den: &Jet2) -> Result<TwoForm> {
    let (top, bottom) = if den.value.norm() >= num.value.norm() {
        (num, den)
    } else {
        (den, num)
    };
    if bottom.value.norm() == 0.0 {
        return Err(Error::Degenerate("projective point with zero coordinates".into()));
    }
    let w = top.value / bottom.value;
    let dw = CoVector(std::array::from_fn(|a| {
        (top.grad[a] * bottom.value - top.value * bottom.grad[a]) / (bottom.value * bottom.value)
    }));
    Ok(sphere_area_pullback(w, &dw))
}

/// `d lambda^j` rebuilt from `zeta_j` as `i dzeta_j ^ dzeta_j-bar / (1 + |zeta_j|^2)^2`.
///
/// The result is real up to rounding; its imaginary part is kept so callers
/// can inspect it. The analytic path works in projective coordinates and is
/// accurate right up to the pole, which is still reported as an error.
pub fn dlambda_pullback(j: usize, q: Quaternion, how: Differential) -> Result<TwoForm> {
    match how {
        Differential::Analytic => {
            let (num, den) = zeta_fraction_jets(j, q);
            if den.value.norm() < POLE_EPS {
                return Err(Error::Pole("zeta map"));
            }
            projective_pullback(&num, &den)
        }
        Differential::FiniteDifference(_) => {
            let (z, dz) = zeta_differential(j, q, how)?;
            Ok(sphere_area_pullback(z, &dz))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_q(rng: &mut ChaCha8Rng) -> Quaternion {
        Quaternion(std::array::from_fn(|_| StandardNormal.sample(rng)))
    }

    fn random_u(rng: &mut ChaCha8Rng) -> UnitQuaternion {
        random_q(rng).normalize().unwrap().1
    }

    fn unit(c: [f64; 4]) -> UnitQuaternion {
        UnitQuaternion::new(Quaternion(c)).unwrap()
    }

    fn arb_q() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-3.0f64..3.0)
            .prop_filter("nonzero", |c| c.iter().map(|v| v * v).sum::<f64>() > 1e-2)
            .prop_map(Quaternion)
    }

    #[test]
    fn invariant_field_examples() {
        let l = |a, q: [f64; 4]| invariant_field(FrameSide::Left, a, Quaternion(q)).0;
        assert_eq!(l(1, [1.0, 0.0, 0.0, 0.0]), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(l(0, [0.3, -1.0, 2.0, 4.0]), [0.3, -1.0, 2.0, 4.0]);
        assert_eq!(l(2, [1.0, 1.0, 1.0, 1.0]), [-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn component_lists() {
        let q = Quaternion::new(0.7, -1.3, 0.2, 2.1);
        let [q0, q1, q2, q3] = q.0;
        let left = [[-q1, q0, q3, -q2], [-q2, -q3, q0, q1], [-q3, q2, -q1, q0]];
        let right = [[-q1, q0, -q3, q2], [-q2, q3, q0, -q1], [-q3, -q2, q1, q0]];
        for i in 0..3 {
            assert_eq!(invariant_field(FrameSide::Left, i + 1, q).0, left[i]);
            assert_eq!(invariant_field(FrameSide::Right, i + 1, q).0, right[i]);
        }
        assert_eq!(
            invariant_field(FrameSide::Right, 0, q),
            invariant_field(FrameSide::Left, 0, q)
        );
    }

    #[test]
    fn bracket_tables() {
        for side in [FrameSide::Left, FrameSide::Right] {
            let sign = if side == FrameSide::Left { 2.0 } else { -2.0 };
            for a in 0..4 {
                for b in 0..4 {
                    let (c, residual) = bracket_mixed((side, side), a, b);
                    assert_eq!(residual, 0.0);
                    for (g, &cg) in c.iter().enumerate() {
                        assert_eq!(cg, sign * epsilon3(a, b, g), "{side:?} [{a},{b}] -> {g}");
                    }
                }
            }
        }
        assert_eq!(bracket(FrameSide::Left, 1, 2), [0.0, 0.0, 0.0, 2.0]);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(bracket_mixed((FrameSide::Right, FrameSide::Left), a, b).0, [0.0; 4]);
            }
        }
    }

    #[test]
    fn maurer_cartan_at_identity() {
        let mc = maurer_cartan(Quaternion::ONE).unwrap();
        for mu in 0..4 {
            assert_eq!(mc.covector(mu), CoVector::basis(mu));
        }
        assert!(matches!(maurer_cartan(Quaternion::ZERO), Err(Error::ZeroQuaternion)));
    }

    #[test]
    fn maurer_cartan_pairing_and_product_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let q = random_q(&mut rng);
            let mc = maurer_cartan(q).unwrap();
            let qinv = q.inverse().unwrap();
            for a in 0..4 {
                let paired = mc.apply(&invariant_field(FrameSide::Left, a, q).0);
                let want = Quaternion::basis(a);
                assert!((paired - want).norm() < 1e-12);
                let column = qinv * Quaternion::basis(a);
                for mu in 0..4 {
                    assert!((mc.components[mu][a] - column[mu]).abs() < 1e-12);
                }
            }
            let radial = q.scale(1.0 / q.norm());
            assert!((mc.apply(&radial.0)[0] - 1.0 / q.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn structure_equation_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let q = random_q(&mut rng);
            assert_eq!(dlambda_structure(0, q).unwrap(), TwoForm::ZERO);
            for i in 0..4 {
                let field = |p: &[f64; 4]| maurer_cartan(Quaternion(*p)).map(|m| m.covector(i));
                let fd = forms::fd_exterior_derivative1(field, &q.0, 1e-5).unwrap();
                let exact = dlambda_structure(i, q).unwrap();
                let scale = 1.0 + exact.max_abs();
                assert!((fd - exact).max_abs() < 1e-6 * scale, "i = {i}");
            }
        }
    }

    #[test]
    fn explicit_du_expansion() {
        // On the unit sphere d lambda^i = 2 du0 ^ dui - eps_ijk duj ^ duk with du = dq.
        let u = Quaternion::new(0.5, -0.5, 0.5, 0.5);
        for i in 1..4 {
            let (j, k) = cyclic(i);
            let du = CoVector::basis;
            let want = forms::wedge11(&du(0), &du(i)) * 2.0 - forms::wedge11(&du(j), &du(k)) * 2.0;
            // Restrict both sides to the tangent space of the sphere via the left framing.
            let got = dlambda_structure(i, u).unwrap();
            for a in 1..4 {
                for b in 1..4 {
                    let va = forms::real_vector(&invariant_field(FrameSide::Left, a, u).0);
                    let vb = forms::real_vector(&invariant_field(FrameSide::Left, b, u).0);
                    let ev = |f: &TwoForm| forms::interior(&va, f).pair(&vb);
                    assert!((ev(&got) - ev(&want)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn adjoint_rotation_examples() {
        let id = adjoint_rotation(UnitQuaternion::IDENTITY);
        assert_eq!(id.0, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let r = adjoint_rotation(unit([0.0, 0.0, 0.0, 1.0]));
        assert_eq!(r.0, [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn adjoint_rotation_is_special_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let u = random_u(&mut rng);
            let r = adjoint_rotation(u);
            assert!(r.orthogonality_defect() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-12);
            for j in 1..4 {
                let col = r.column(j - 1);
                let l = sphere_map(j, u);
                for c in 0..3 {
                    assert!((col[c] - l[c]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn sphere_map_examples() {
        assert_eq!(sphere_map(1, UnitQuaternion::IDENTITY), [1.0, 0.0, 0.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = UnitQuaternion::from_complex(Complex64::new(s, 0.0), Complex64::new(s, 0.0)).unwrap();
        assert!(sphere_map(1, u)[0].abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let u = random_u(&mut rng);
            for i in 1..4 {
                for j in 1..4 {
                    let (a, b) = (sphere_map(i, u), sphere_map(j, u));
                    let d: f64 = (0..3).map(|c| a[c] * b[c]).sum();
                    assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sphere_map_differential_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let q = random_q(&mut rng);
            for i in 1..4 {
                let fd = sphere_map_differential(i, q, Differential::default()).unwrap();
                let an = sphere_map_differential(i, q, Differential::Analytic).unwrap();
                let scale = 1.0 / q.norm();
                for a in 0..4 {
                    for c in 0..3 {
                        assert!((fd[a][c] - an[a][c]).abs() < 1e-8 * (1.0 + scale), "i = {i}");
                    }
                }
                // L0 and L_i lie in the kernel of d l_i.
                for m in [0, i] {
                    let v = invariant_field(FrameSide::Left, m, q).0;
                    for c in 0..3 {
                        let dir: f64 = (0..4).map(|a| fd[a][c] * v[a]).sum();
                        assert!(dir.abs() < 1e-8 * (1.0 + q.norm_sqr()));
                    }
                }
            }
        }
    }

    #[test]
    fn stereographic_examples() {
        assert_eq!(stereographic([1.0, 0.0, 0.0]).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(stereographic([0.0, 1.0, 0.0]).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matches!(stereographic([-1.0, 0.0, 0.0]), Err(Error::Pole(_))));
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta_map(1, UnitQuaternion::IDENTITY).unwrap(), Complex64::new(0.0, 0.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = UnitQuaternion::from_complex(Complex64::new(s, 0.0), Complex64::new(s, 0.0)).unwrap();
        assert!((zeta_map(1, u).unwrap() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        // v1 = 0 is the pole of zeta_1.
        assert!(matches!(zeta_map(1, unit([0.0, 0.0, 1.0, 0.0])), Err(Error::Pole(_))));
    }

    #[test]
    fn zeta_closed_forms_match_composite() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut checked = 0;
        for _ in 0..1000 {
            let u = random_u(&mut rng);
            for i in 1..4 {
                let l = sphere_map(i, u);
                // Stay clear of the projection pole where either path loses digits.
                if 1.0 + l[0] < 1e-3 {
                    continue;
                }
                let composite = stereographic(l).unwrap();
                let closed = zeta_map(i, u).unwrap();
                assert!((composite - closed).norm() < 1e-10 * (1.0 + closed.norm()), "i = {i}");
                checked += 1;
            }
        }
        assert!(checked > 2900);
    }

    #[test]
    fn dlambda_pullback_at_identity() {
        let got = dlambda_pullback(1, Quaternion::ONE, Differential::Analytic).unwrap();
        let want = dlambda_structure(1, Quaternion::ONE).unwrap();
        assert!((got - want).max_abs() < 1e-15);
        assert_eq!(got, TwoForm::basis(3) * -2.0);
    }

    fn max_pullback_error(how: Differential, seed: u64, points: usize) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut worst_imag: f64 = 0.0;
        for _ in 0..points {
            let q = random_q(&mut rng);
            for j in 1..4 {
                let exact = dlambda_structure(j, q).unwrap();
                let pb = dlambda_pullback(j, q, how).unwrap();
                worst = worst.max((TwoForm::from_real(pb.re()) - exact).max_abs());
                worst_imag = worst_imag.max(TwoForm::from_real(pb.im()).max_abs());
            }
        }
        (worst, worst_imag)
    }

    #[test]
    fn dlambda_pullback_matches_structure_equation() {
        let (err, imag) = max_pullback_error(Differential::Analytic, 17, 500);
        assert!(err < 1e-8, "max error {err}");
        assert!(imag < 1e-12, "max imaginary part {imag}");
    }

    #[test]
    fn finite_difference_pullback_tracks_structure_equation() {
        // Central differences with step 1e-5 carry an O(h^2) error scaled by
        // the curvature of zeta, which grows near its pole.
        let (err, _) = max_pullback_error(Differential::default(), 18, 500);
        assert!(err < 1e-6, "max error {err}");
    }

    #[test]
    fn reversed_wedge_order_flips_the_sign() {
        // i dzeta-bar ^ dzeta is the negative of the structure-equation value.
        let q = Quaternion::new(0.3, -0.8, 1.1, 0.4);
        for j in 1..4 {
            let (z, dz) = zeta_differential(j, q, Differential::Analytic).unwrap();
            let w = 1.0 + z.norm_sqr();
            let flipped = forms::wedge11(&dz.conj(), &dz) * (I / (w * w));
            let exact = dlambda_structure(j, q).unwrap();
            assert!((flipped + exact).max_abs() < 1e-12);
            assert!(exact.max_abs() > 1e-3);
        }
    }

    proptest! {
        #[test]
        fn framings_are_orthogonal(q in arb_q()) {
            for side in [FrameSide::Left, FrameSide::Right] {
                for a in 0..4 {
                    for b in 0..4 {
                        let d = invariant_field(side, a, q).dot(&invariant_field(side, b, q));
                        let want = if a == b { q.norm_sqr() } else { 0.0 };
                        prop_assert!((d - want).abs() < 1e-12 * (1.0 + q.norm_sqr()));
                    }
                }
            }
        }

        #[test]
        fn zeta_is_scale_invariant(q in arb_q(), r in 0.01f64..100.0) {
            for i in 1..4 {
                let (n1, d1) = zeta_fraction(i, q);
                let (n2, d2) = zeta_fraction(i, q.scale(r));
                prop_assume!(d1.norm() > 1e-6);
                let a = n1 / d1;
                let b = n2 / d2;
                prop_assert!((a - b).norm() <= 1e-14 * (1.0 + a.norm()));
            }
        }
    }
}
