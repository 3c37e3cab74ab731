//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! Everything is in terms of the parameter `mu = k^2`.

use std::f64::consts::FRAC_PI_2;

use crate::error::DomainError;

/// Elliptic parameter `mu = k^2` in the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticParameter(f64);

impl EllipticParameter {
    pub fn new(mu: f64) -> Result<Self, DomainError> {
        if mu > 0.0 && mu < 1.0 {
            Ok(Self(mu))
        } else {
            Err(DomainError::EllipticParameter(mu))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Complementary parameter `1 - mu`.
    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

const AGM_MAX: usize = 40;

/// `(K(mu), E(mu))` by the arithmetic-geometric mean.
pub fn complete_elliptic(mu: EllipticParameter) -> (f64, f64) {
    let m = mu.get();
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    // E/K = 1 - sum 2^(n-1) c_n^2 with c_0^2 = m
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..AGM_MAX {
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
        if c.abs() <= 1e-17 * a {
            break;
        }
    }
    let k = FRAC_PI_2 / a;
    (k, k * (1.0 - sum))
}

pub fn ellip_k(mu: EllipticParameter) -> f64 {
    complete_elliptic(mu).0
}

pub fn ellip_e(mu: EllipticParameter) -> f64 {
    complete_elliptic(mu).1
}

/// Values of sn, cn, dn at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sncndn {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Jacobi elliptic functions by the descending Landen transformation.
///
/// The argument is first reduced modulo the real period `4K`, so values
/// at `s` and `s + 4jK` agree to rounding of the reduction.
pub fn jacobi_sncndn(s: f64, mu: EllipticParameter) -> Sncndn {
    let m = mu.get();
    let k = ellip_k(mu);
    let period = 4.0 * k;
    let u = s - period * (s / period).round();

    let mut a = [0.0_f64; AGM_MAX + 1];
    let mut c = [0.0_f64; AGM_MAX + 1];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while n < AGM_MAX {
        let an = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        a[n + 1] = an;
        n += 1;
        if c[n].abs() <= 1e-17 * a[n] {
            break;
        }
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // 1 - m sn^2 written through cn stays accurate near the quarter period
    let dn = ((1.0 - m) + m * cn * cn).sqrt();
    Sncndn { sn, cn, dn }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(x: f64) -> EllipticParameter {
        EllipticParameter::new(x).unwrap()
    }

    #[test]
    fn k_half_agm_value() {
        assert!((ellip_k(mu(0.5)) - 1.854_074_677_301_372).abs() < 1e-13);
        assert!((ellip_e(mu(0.5)) - 1.350_643_881_047_675_5).abs() < 1e-13);
    }

    #[test]
    fn small_parameter_limit() {
        let (k, e) = complete_elliptic(mu(1e-14));
        assert!((k - FRAC_PI_2).abs() < 1e-12);
        assert!((e - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(EllipticParameter::new(0.0).is_err());
        assert!(EllipticParameter::new(1.0).is_err());
        assert!(EllipticParameter::new(-0.3).is_err());
        assert!(EllipticParameter::new(f64::NAN).is_err());
    }

    #[test]
    fn quarter_period() {
        for &m in &[0.1, 0.4, 0.9, 0.999] {
            let k = ellip_k(mu(m));
            let v = jacobi_sncndn(k, mu(m));
            assert!((v.sn - 1.0).abs() < 1e-13);
            assert!(v.cn.abs() < 1e-8);
            assert!((v.dn - (1.0 - m).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn half_period_antisymmetry_against_ode() {
        // crude RK4 integration of sn' = cn dn, cn' = -sn dn, dn' = -m sn cn
        let m = 0.7;
        let mut y = [0.0, 1.0, 1.0];
        let h = 1e-4;
        let f = |y: [f64; 3]| [y[1] * y[2], -y[0] * y[2], -m * y[0] * y[1]];
        for _ in 0..15_000 {
            let k1 = f(y);
            let k2 = f([0, 1, 2].map(|i| y[i] + 0.5 * h * k1[i]));
            let k3 = f([0, 1, 2].map(|i| y[i] + 0.5 * h * k2[i]));
            let k4 = f([0, 1, 2].map(|i| y[i] + h * k3[i]));
            y = [0, 1, 2].map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        }
        let v = jacobi_sncndn(1.5, mu(m));
        assert!((v.sn - y[0]).abs() < 1e-10);
        assert!((v.cn - y[1]).abs() < 1e-10);
        assert!((v.dn - y[2]).abs() < 1e-10);
        let k = ellip_k(mu(m));
        let w = jacobi_sncndn(1.5 + 2.0 * k, mu(m));
        assert!((w.sn + v.sn).abs() < 1e-12);
    }
}
