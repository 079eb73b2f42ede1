//! Second-order forward-mode jets over the four spacetime coordinates.
//!
//! A [`Jet2`] carries a complex value together with its gradient and Hessian
//! with respect to `(t, x, y, z)`. Arithmetic propagates both exactly, so any
//! rational expression in the coordinates (and their conjugates) gets its
//! derivatives without truncation error.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub value: C64,
    /// `d/dt, d/dx, d/dy, d/dz`.
    pub grad: [C64; 4],
    /// Symmetric matrix of second partials.
    pub hess: [[C64; 4]; 4],
}

impl Jet2 {
    pub fn constant(value: C64) -> Self {
        Jet2 {
            value,
            grad: [ZERO; 4],
            hess: [[ZERO; 4]; 4],
        }
    }

    pub fn real(value: f64) -> Self {
        Self::constant(C64::new(value, 0.0))
    }

    /// The coordinate function `x^axis` evaluated at `value`.
    pub fn variable(axis: usize, value: f64) -> Self {
        let mut j = Self::real(value);
        j.grad[axis] = ONE;
        j
    }

    /// Seeds the four coordinate jets at an event.
    pub fn coordinates(p: &[f64; 4]) -> [Jet2; 4] {
        std::array::from_fn(|a| Jet2::variable(a, p[a]))
    }

    /// Derivatives are taken with respect to real coordinates, so conjugation
    /// commutes with them.
    pub fn conj(&self) -> Self {
        Jet2 {
            value: self.value.conj(),
            grad: self.grad.map(|g| g.conj()),
            hess: self.hess.map(|row| row.map(|h| h.conj())),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Jet2 {
            value: self.value * s,
            grad: self.grad.map(|g| g * s),
            hess: self.hess.map(|row| row.map(|h| h * s)),
        }
    }

    pub fn recip(&self) -> Self {
        let g = self.value;
        let inv = ONE / g;
        let inv2 = inv * inv;
        let inv3 = inv2 * inv;
        let mut out = Jet2::constant(inv);
        for a in 0..4 {
            out.grad[a] = -self.grad[a] * inv2;
        }
        for a in 0..4 {
            for b in a..4 {
                let h = -self.hess[a][b] * inv2 + self.grad[a] * self.grad[b] * inv3 * 2.0;
                out.hess[a][b] = h;
                out.hess[b][a] = h;
            }
        }
        out
    }

    /// Integer power by repeated squaring; negative exponents go through
    /// [`Jet2::recip`].
    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut base = *self;
        let mut acc = Jet2::real(1.0);
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        let ok = |c: &C64| c.re.is_finite() && c.im.is_finite();
        ok(&self.value) && self.grad.iter().all(ok) && self.hess.iter().flatten().all(ok)
    }

    /// Largest `|H_ab - H_ba|`.
    pub fn hessian_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                worst = worst.max((self.hess[a][b] - self.hess[b][a]).norm());
            }
        }
        worst
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value + rhs.value,
            grad: std::array::from_fn(|a| self.grad[a] + rhs.grad[a]),
            hess: std::array::from_fn(|a| std::array::from_fn(|b| self.hess[a][b] + rhs.hess[a][b])),
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-ONE)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (f, g) = (self, rhs);
        let mut out = Jet2::constant(f.value * g.value);
        for a in 0..4 {
            out.grad[a] = f.grad[a] * g.value + f.value * g.grad[a];
        }
        for a in 0..4 {
            for b in a..4 {
                let h = f.hess[a][b] * g.value + f.grad[a] * g.grad[b] + f.grad[b] * g.grad[a] + f.value * g.hess[a][b];
                out.hess[a][b] = h;
                out.hess[b][a] = h;
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Add<C64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: C64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Mul<C64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: C64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(C64::new(rhs, 0.0))
    }
}
