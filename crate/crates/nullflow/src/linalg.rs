//! 2x2 real matrices in the two roles they play here: unimodular spinor
//! matrices and vectors of R^{2,2}.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::DomainError;

/// Plain real 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };
    pub const ZERO: Mat2 = Mat2 { a: 0.0, b: 0.0, c: 0.0, d: 0.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    pub fn transpose(self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    /// Adjugate; equals the inverse when det = 1.
    pub fn adjugate(self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn inverse(self) -> Self {
        self.adjugate().scale(1.0 / self.det())
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }

    /// Max-abs entry norm.
    pub fn max_norm(self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn frobenius(self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn powi(self, n: u32) -> Self {
        let mut out = Mat2::IDENTITY;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                out = out * base;
            }
            base = base * base;
            k >>= 1;
        }
        out
    }

    /// Rescales to det = 1 (requires det > 0).
    pub fn renormalized(self) -> Self {
        self.scale(1.0 / self.det().sqrt())
    }

    /// Closed-form exponential of a traceless matrix.
    pub fn exp_traceless(self) -> Self {
        let half = 0.5 * (self.a - self.d);
        let x = Mat2::new(half, self.b, self.c, -half);
        let disc = half * half + self.b * self.c;
        let (ch, sh) = if disc > 0.0 {
            let w = disc.sqrt();
            (w.cosh(), w.sinh() / w)
        } else if disc < 0.0 {
            let w = (-disc).sqrt();
            (w.cos(), w.sin() / w)
        } else {
            (1.0, 1.0)
        };
        let shift = (0.5 * self.trace()).exp();
        (Mat2::IDENTITY.scale(ch) + x.scale(sh)).scale(shift)
    }

    pub fn commutator(self, o: Mat2) -> Mat2 {
        self * o - o * self
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d, self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)
    }
}

/// Real 2x2 matrix with determinant 1 (within a tolerance at construction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unimodular2(Mat2);

pub const UNIMODULAR_TOL: f64 = 1e-8;

impl Unimodular2 {
    pub const IDENTITY: Unimodular2 = Unimodular2(Mat2::IDENTITY);

    pub fn new(m: Mat2) -> Result<Self, DomainError> {
        let det = m.det();
        if (det - 1.0).abs() <= UNIMODULAR_TOL {
            Ok(Self(m))
        } else {
            Err(DomainError::Invalid(format!("determinant {det} is not 1")))
        }
    }

    /// Projects onto det = 1 by dividing by sqrt(det).
    pub fn projected(m: Mat2) -> Result<Self, DomainError> {
        let det = m.det();
        if det > 0.0 && det.is_finite() {
            Ok(Self(m.renormalized()))
        } else {
            Err(DomainError::Invalid(format!("determinant {det} cannot be normalized")))
        }
    }

    pub fn matrix(self) -> Mat2 {
        self.0
    }

    pub fn inverse(self) -> Self {
        Self(self.0.adjugate())
    }

    pub fn half_trace(self) -> f64 {
        0.5 * self.0.trace()
    }

    /// `(tr M)^2 - 4`: negative for elliptic, positive for hyperbolic.
    pub fn discriminant(self) -> f64 {
        let t = self.0.trace();
        t * t - 4.0
    }
}

impl Mul for Unimodular2 {
    type Output = Unimodular2;
    fn mul(self, o: Unimodular2) -> Unimodular2 {
        Unimodular2(self.0 * o.0)
    }
}

/// A 2x2 matrix viewed as a vector of R^{2,2} with q(X) = -det X.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spacetime22(pub Mat2);

impl Spacetime22 {
    pub fn inner(self, o: Spacetime22) -> f64 {
        ads_inner(self, o)
    }

    pub fn quad(self) -> f64 {
        -self.0.det()
    }
}

impl Add for Spacetime22 {
    type Output = Spacetime22;
    fn add(self, o: Spacetime22) -> Spacetime22 {
        Spacetime22(self.0 + o.0)
    }
}

impl Sub for Spacetime22 {
    type Output = Spacetime22;
    fn sub(self, o: Spacetime22) -> Spacetime22 {
        Spacetime22(self.0 - o.0)
    }
}

/// Polarization of q(X) = -det X.
pub fn ads_inner(x: Spacetime22, y: Spacetime22) -> f64 {
    let (x, y) = (x.0, y.0);
    0.5 * (x.b * y.c + x.c * y.b - x.a * y.d - x.d * y.a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_rotation_generator() {
        let e = Mat2::new(0.0, -1.0, 1.0, 0.0).scale(0.7).exp_traceless();
        assert!((e.a - 0.7f64.cos()).abs() < 1e-15);
        assert!((e.c - 0.7f64.sin()).abs() < 1e-15);
        assert!((e.det() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exp_of_nilpotent() {
        let e = Mat2::new(0.0, 0.0, 2.0, 0.0).exp_traceless();
        assert_eq!(e, Mat2::new(1.0, 0.0, 2.0, 1.0));
    }

    #[test]
    fn inner_diagonal_is_minus_det() {
        let x = Spacetime22(Mat2::new(0.3, -1.2, 2.0, 0.9));
        assert!((x.inner(x) + x.0.det()).abs() < 1e-15);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let m = Mat2::new(0.9, 0.2, -0.4, 1.02);
        let mut r = Mat2::IDENTITY;
        for _ in 0..7 {
            r = r * m;
        }
        assert!((m.powi(7) - r).max_norm() < 1e-14);
    }
}
