//! Real quaternions `q = c0 e0 + c1 e1 + c2 e2 + c3 e3` and the splitting
//! `H = C + jC` used by the complex form of the Hopf maps.
//!
//! Coefficients are always stored in basis order `(e0, e1, e2, e3)` with
//! Hamilton's table `e_i e_j = -delta_ij e0 + eps_ijk e_k`, `eps_123 = +1`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `| |q| - 1 |` below which [`UnitQuaternion::new`] renormalizes.
pub const UNIT_DRIFT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quaternion(pub [f64; 4]);

impl Quaternion {
    pub const ZERO: Self = Quaternion([0.0; 4]);
    pub const ONE: Self = Quaternion([1.0, 0.0, 0.0, 0.0]);

    pub const fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
        Quaternion([c0, c1, c2, c3])
    }

    /// Canonical basis element `e_alpha`, `alpha` in `0..4`.
    pub fn basis(alpha: usize) -> Self {
        let mut c = [0.0; 4];
        c[alpha] = 1.0;
        Quaternion(c)
    }

    pub fn real(&self) -> f64 {
        self.0[0]
    }

    pub fn imag(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn from_imag(v: [f64; 3]) -> Self {
        Quaternion([0.0, v[0], v[1], v[2]])
    }

    pub fn conjugate(&self) -> Self {
        let [a, b, c, d] = self.0;
        Quaternion([a, -b, -c, -d])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Euclidean inner product on R^4.
    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Quaternion(self.0.map(|c| c * s))
    }

    /// `q^-1 = conj(q) / |q|^2`.
    pub fn inverse(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroQuaternion);
        }
        Ok(self.conjugate().scale(1.0 / n2))
    }

    /// Polar split `q = |q| u` of a nonzero quaternion.
    pub fn normalize(&self) -> Result<(f64, UnitQuaternion)> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroQuaternion);
        }
        Ok((n, UnitQuaternion(self.scale(1.0 / n))))
    }

    pub fn from_polar(radius: f64, u: UnitQuaternion) -> Self {
        u.0.scale(radius)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// `z1 = c0 + i c1`, `z2 = c2 - i c3`, so that `q = z1 + j z2`.
    pub fn to_complex_pair(&self) -> ComplexPair {
        let [a, b, c, d] = self.0;
        ComplexPair {
            z1: Complex64::new(a, b),
            z2: Complex64::new(c, -d),
        }
    }

    pub fn from_complex_pair(p: ComplexPair) -> Self {
        Quaternion([p.z1.re, p.z1.im, p.z2.re, -p.z2.im])
    }
}

impl Index<usize> for Quaternion {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Quaternion(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Quaternion(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = rhs.0;
        Quaternion([
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ])
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

/// Hamilton product, spelled out for callers that prefer a function.
pub fn multiply(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// Element of Sp(1), the unit three-sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const IDENTITY: Self = UnitQuaternion(Quaternion::ONE);

    /// Accepts `q` when its norm is within [`UNIT_DRIFT_TOL`] of one and
    /// renormalizes it; anything further away is rejected.
    pub fn new(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_DRIFT_TOL {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(UnitQuaternion(q.scale(1.0 / n)))
    }

    /// Projects any nonzero quaternion onto the sphere.
    pub fn from_nonzero(q: Quaternion) -> Result<Self> {
        q.normalize().map(|(_, u)| u)
    }

    pub fn from_complex(v1: Complex64, v2: Complex64) -> Result<Self> {
        Self::new(Quaternion::from_complex_pair(ComplexPair { z1: v1, z2: v2 }))
    }

    pub fn quaternion(&self) -> Quaternion {
        self.0
    }

    pub fn coeffs(&self) -> [f64; 4] {
        self.0 .0
    }

    /// `(v1, v2)` with `u = v1 + j v2`.
    pub fn complex(&self) -> (Complex64, Complex64) {
        let p = self.0.to_complex_pair();
        (p.z1, p.z2)
    }

    pub fn conjugate(&self) -> Self {
        UnitQuaternion(self.0.conjugate())
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, rhs: Self) -> UnitQuaternion {
        UnitQuaternion(self.0 * rhs.0)
    }
}

/// Coordinates of `q = z1 + j z2` in the splitting `H = C + jC`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPair {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl ComplexPair {
    pub fn norm_sqr(&self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: f64, b: f64, c: f64, d: f64) -> Quaternion {
        Quaternion::new(a, b, c, d)
    }

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).0.iter().all(|c| c.abs() <= tol)
    }

    #[test]
    fn hamilton_table() {
        let e = Quaternion::basis;
        assert_eq!(e(1) * e(2), e(3));
        assert_eq!(e(2) * e(3), e(1));
        assert_eq!(e(3) * e(1), e(2));
        assert_eq!(e(2) * e(1), -e(3));
        for i in 1..4 {
            assert_eq!(e(i) * e(i), -e(0));
        }
    }

    #[test]
    fn identity_and_expansion() {
        let p = q(0.5, -1.0, 2.0, 3.0);
        assert_eq!(Quaternion::ONE * p, p);
        assert_eq!(p * Quaternion::ONE, p);
        // (1 + e1)(1 + e2) = 1 + e2 + e1 + e1 e2
        assert_eq!(q(1.0, 1.0, 0.0, 0.0) * q(1.0, 0.0, 1.0, 0.0), q(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn inverse_norm_examples() {
        assert_eq!(Quaternion::basis(2).inverse().unwrap(), -Quaternion::basis(2));
        assert_eq!(q(2.0, 0.0, 0.0, 0.0).inverse().unwrap(), q(0.5, 0.0, 0.0, 0.0));
        assert_eq!(q(1.0, 1.0, 1.0, 1.0).norm(), 2.0);
        assert!(matches!(Quaternion::ZERO.inverse(), Err(Error::ZeroQuaternion)));
    }

    #[test]
    fn complex_pair_examples() {
        let p = q(1.0, 2.0, 3.0, 4.0).to_complex_pair();
        assert_eq!(p.z1, Complex64::new(1.0, 2.0));
        assert_eq!(p.z2, Complex64::new(3.0, -4.0));
        let e0 = Quaternion::ONE.to_complex_pair();
        assert_eq!(e0.z1, Complex64::new(1.0, 0.0));
        assert_eq!(e0.z2, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn complex_pair_matches_j_multiplication() {
        // q = z1 + j z2 read with j = e2 and i = e1 acting on the left of j.
        let x = q(0.3, -1.2, 0.7, 2.5);
        let p = x.to_complex_pair();
        let z1 = q(p.z1.re, p.z1.im, 0.0, 0.0);
        let z2 = q(p.z2.re, p.z2.im, 0.0, 0.0);
        let rebuilt = z1 + Quaternion::basis(2) * z2;
        assert!(close(rebuilt, x, 1e-15));
    }

    #[test]
    fn complex_pair_roundtrip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let x = Quaternion(std::array::from_fn(|_| rng.gen_range(-10.0..10.0)));
            let back = Quaternion::from_complex_pair(x.to_complex_pair());
            worst = worst.max((back - x).0.iter().fold(0.0f64, |m, c| m.max(c.abs())));
            assert!((x.norm_sqr() - x.to_complex_pair().norm_sqr()).abs() < 1e-12);
        }
        assert!(worst < 1e-15);
    }

    #[test]
    fn unit_construction_renormalizes_or_rejects() {
        let drifted = q(1.0 + 5e-10, 0.0, 0.0, 0.0);
        let u = UnitQuaternion::new(drifted).unwrap();
        assert!((u.quaternion().norm() - 1.0).abs() <= 1e-15);
        assert!(matches!(
            UnitQuaternion::new(q(1.0 + 1e-6, 0.0, 0.0, 0.0)),
            Err(Error::NotUnit { .. })
        ));
    }

    fn arb_q() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-3.0f64..3.0).prop_map(Quaternion)
    }

    proptest! {
        #[test]
        fn associative(a in arb_q(), b in arb_q(), c in arb_q()) {
            prop_assert!(close((a * b) * c, a * (b * c), 1e-12));
        }

        #[test]
        fn norm_multiplicative(a in arb_q(), b in arb_q()) {
            prop_assert!(((a * b).norm() - a.norm() * b.norm()).abs() <= 1e-12);
        }

        #[test]
        fn conjugation_reverses_products(a in arb_q(), b in arb_q()) {
            prop_assert!(close((a * b).conjugate(), b.conjugate() * a.conjugate(), 1e-12));
        }

        #[test]
        fn inverse_is_two_sided(a in arb_q()) {
            prop_assume!(a.norm() > 1e-3);
            let inv = a.inverse().unwrap();
            prop_assert!(close(a * inv, Quaternion::ONE, 1e-12));
            prop_assert!(close(inv * a, Quaternion::ONE, 1e-12));
        }

        #[test]
        fn polar_split_roundtrip(a in arb_q()) {
            prop_assume!(a.norm() > 1e-6);
            let (r, u) = a.normalize().unwrap();
            prop_assert!(close(Quaternion::from_polar(r, u), a, 1e-14));
        }
    }
}
