//! Closed-form KdV solutions: stationary (traveling-wave) bendings and the
//! three-parameter KKSH family obtained from defocusing mKdV waves through
//! the Miura map kappa = u_s + u^2.
//!
//! Sign convention: kappa_t + kappa_sss - 6 kappa kappa_s = 0.

use num_integer::Integer;

use crate::error::{DomainError, KdvError};
use crate::series::{sncndn_series, Taylor2};
use crate::specfun::{complete_elliptic, ellip_k, jacobi_sncndn, EllipticParameter};

/// kappa and the derivatives the flows need at one (s, t).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BendingJet {
    pub k: f64,
    pub ks: f64,
    pub kss: f64,
    pub ksss: f64,
    pub kt: f64,
}

impl BendingJet {
    /// kappa_t + kappa_sss - 6 kappa kappa_s.
    pub fn kdv_residual(&self) -> f64 {
        self.kt + self.ksss - 6.0 * self.k * self.ks
    }
}

/// A bending kappa(s, t) with analytic derivatives.
pub trait BendingField: Sync {
    fn jet(&self, s: f64, t: f64) -> BendingJet;

    fn kappa(&self, s: f64, t: f64) -> f64 {
        self.jet(s, t).k
    }
}

fn jet_from_series(k: &Taylor2) -> BendingJet {
    BendingJet { k: k.value(), ks: k.derivative(1, 0), kss: k.derivative(2, 0), ksss: k.derivative(3, 0), kt: k.derivative(0, 1) }
}

/// kappa(s) = (4 mu sn^2(c s, mu) - h- - h+)/(h- - h+), c = sqrt(2/(h- - h+)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryBending {
    mu: EllipticParameter,
    h_plus: f64,
    h_minus: f64,
    ell: f64,
}

impl StationaryBending {
    pub fn new(mu: EllipticParameter, h_plus: f64, h_minus: f64) -> Result<Self, KdvError> {
        if !(h_minus > h_plus) || !h_plus.is_finite() || !h_minus.is_finite() {
            return Err(DomainError::Invalid(format!("need h- > h+, got h+ = {h_plus}, h- = {h_minus}")).into());
        }
        let d = h_minus - h_plus;
        let ell = (4.0 * (1.0 + mu.get()) - 3.0 * (h_minus + h_plus)) / d;
        Ok(Self { mu, h_plus, h_minus, ell })
    }

    pub fn mu(&self) -> EllipticParameter {
        self.mu
    }

    pub fn h_plus(&self) -> f64 {
        self.h_plus
    }

    pub fn h_minus(&self) -> f64 {
        self.h_minus
    }

    /// Wave speed parameter: the bending travels as kappa(s + 2 ell t).
    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// c = sqrt(2/(h- - h+)), the rescaling of the Lame variable.
    pub fn scale(&self) -> f64 {
        (2.0 / (self.h_minus - self.h_plus)).sqrt()
    }

    /// sigma = sqrt((h- - h+)/2) = 1/c.
    pub fn sigma(&self) -> f64 {
        1.0 / self.scale()
    }

    /// Least period 2 sigma K(mu).
    pub fn period(&self) -> f64 {
        2.0 * self.sigma() * ellip_k(self.mu)
    }

    pub fn kappa(&self, s: f64) -> f64 {
        let sn = jacobi_sncndn(self.scale() * s, self.mu).sn;
        (4.0 * self.mu.get() * sn * sn - self.h_minus - self.h_plus) / (self.h_minus - self.h_plus)
    }

    /// Series of kappa(s + ds + 2 ell (t + dt)).
    pub fn series(&self, s: f64, t: f64, ns: usize, nt: usize) -> Taylor2 {
        let c = self.scale();
        let d = self.h_minus - self.h_plus;
        let arg = Taylor2::linear(c * (s + 2.0 * self.ell * t), c, 2.0 * self.ell * c, ns, nt);
        let [sn, _, _] = sncndn_series(&arg, self.mu);
        (&sn * &sn).scale(4.0 * self.mu.get() / d).add_const(-(self.h_minus + self.h_plus) / d)
    }

    /// [kappa, kappa', kappa'', kappa'''] at s.
    pub fn derivatives(&self, s: f64) -> [f64; 4] {
        let k = self.series(s, 0.0, 3, 0);
        [k.value(), k.derivative(1, 0), k.derivative(2, 0), k.derivative(3, 0)]
    }
}

impl BendingField for StationaryBending {
    fn jet(&self, s: f64, t: f64) -> BendingJet {
        jet_from_series(&self.series(s, t, 3, 1))
    }
}

pub fn stationary_bending(spec: &StationaryBending, s: f64) -> f64 {
    spec.kappa(s)
}

/// KKSH solution with elliptic parameters mu, tau and homothetic parameter h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KkshSpec {
    mu: EllipticParameter,
    tau: EllipticParameter,
    h: f64,
    quantum: Option<(u32, u32)>,
}

/// Tolerance of the s-periodicity identity when quantum numbers are given.
pub const TOL_PERIOD: f64 = 1e-9;

impl KkshSpec {
    pub fn new(mu: EllipticParameter, tau: EllipticParameter, h: f64) -> Result<Self, KdvError> {
        if mu == tau {
            return Err(DomainError::Invalid("mu = tau gives a traveling wave; need mu != tau".into()).into());
        }
        Self::new_allow_degenerate(mu, tau, h)
    }

    /// Skips the mu != tau guard (the traveling-wave case).
    pub fn new_allow_degenerate(mu: EllipticParameter, tau: EllipticParameter, h: f64) -> Result<Self, KdvError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(DomainError::Invalid(format!("homothetic parameter h = {h} must be positive")).into());
        }
        Ok(Self { mu, tau, h, quantum: None })
    }

    /// The s-periodic member with tau = tau_{m,n}(mu).
    pub fn with_quantum_numbers(mu: EllipticParameter, m: u32, n: u32, h: f64) -> Result<Self, KdvError> {
        let tau = tau_mn(mu, m, n)?;
        let mut spec = Self::new(mu, tau, h)?;
        spec.quantum = Some((m, n));
        Ok(spec)
    }

    pub fn mu(&self) -> EllipticParameter {
        self.mu
    }

    pub fn tau(&self) -> EllipticParameter {
        self.tau
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn quantum(&self) -> Option<(u32, u32)> {
        self.quantum
    }

    /// Amplitude (mu tau)^{1/4} of phi.
    pub fn amplitude(&self) -> f64 {
        (self.mu.get() * self.tau.get()).powf(0.25)
    }

    /// Velocities (v1, v2) of the two sn waves.
    pub fn velocities(&self) -> (f64, f64) {
        let (m, t, h) = (self.mu.get(), self.tau.get(), self.h);
        let q = (m / t).sqrt();
        (h * h * (1.0 + m + 3.0 * q * (1.0 + t)), h * h * (q * (1.0 + t) + 3.0 * (1.0 + m)))
    }

    /// s-period 4 m K(mu)/h, defined when quantum numbers are set.
    pub fn s_period(&self) -> Option<f64> {
        self.quantum.map(|(m, _)| 4.0 * m as f64 * ellip_k(self.mu) / self.h)
    }

    /// Series of phi around (s, t) with the given truncation orders.
    pub fn phi_series(&self, s: f64, t: f64, ns: usize, nt: usize) -> Taylor2 {
        let (v1, v2) = self.velocities();
        let h = self.h;
        let r = (self.mu.get() / self.tau.get()).powf(0.25);
        let a1 = Taylor2::linear(h * (s + v1 * t), h, h * v1, ns, nt);
        let a2 = Taylor2::linear(r * h * (s + v2 * t), r * h, r * h * v2, ns, nt);
        let [f1, _, _] = sncndn_series(&a1, self.mu);
        let [f2, _, _] = sncndn_series(&a2, self.tau);
        (&f1 * &f2).scale(self.amplitude())
    }

    /// Series of u = -2 phi_s/(1 - phi^2); valid to s-order ns - 1.
    pub fn u_series(&self, s: f64, t: f64, ns: usize, nt: usize) -> Taylor2 {
        let phi = self.phi_series(s, t, ns, nt);
        let denom = (&phi * &phi).scale(-1.0).add_const(1.0);
        (&phi.d_ds() * &denom.recip()).scale(-2.0)
    }

    /// Series of kappa = u_s + u^2; valid to s-order ns - 2.
    pub fn kappa_series(&self, s: f64, t: f64, ns: usize, nt: usize) -> Taylor2 {
        let u = self.u_series(s, t, ns, nt);
        &u.d_ds() + &(&u * &u)
    }

    pub fn phi(&self, s: f64, t: f64) -> f64 {
        self.phi_series(s, t, 0, 0).value()
    }

    pub fn u(&self, s: f64, t: f64) -> f64 {
        self.u_series(s, t, 1, 0).value()
    }

    pub fn kappa(&self, s: f64, t: f64) -> f64 {
        self.kappa_series(s, t, 2, 0).value()
    }

    /// [kappa, kappa_s, ..., d^order kappa/ds^order] at (s, t).
    pub fn kappa_s_derivatives(&self, s: f64, t: f64, order: usize) -> Vec<f64> {
        let k = self.kappa_series(s, t, order + 2, 0);
        (0..=order).map(|i| k.derivative(i, 0)).collect()
    }

    /// [u, u_s, u_ss, u_sss, u_t].
    pub fn u_jet(&self, s: f64, t: f64) -> [f64; 5] {
        let u = self.u_series(s, t, 4, 1);
        [u.value(), u.derivative(1, 0), u.derivative(2, 0), u.derivative(3, 0), u.derivative(0, 1)]
    }
}

impl BendingField for KkshSpec {
    fn jet(&self, s: f64, t: f64) -> BendingJet {
        jet_from_series(&self.kappa_series(s, t, 5, 1))
    }
}

pub fn kksh_u(spec: &KkshSpec, s: f64, t: f64) -> f64 {
    spec.u(s, t)
}

pub fn kksh_kappa(spec: &KkshSpec, s: f64, t: f64) -> f64 {
    spec.kappa(s, t)
}

/// g(tau) = tau^{1/4} K(tau), increasing from 0 to infinity on (0, 1).
pub fn g(tau: EllipticParameter) -> f64 {
    tau.get().powf(0.25) * ellip_k(tau)
}

/// Derivative of g, used by the Cauchy-problem form of g^{-1}.
pub fn g_prime(tau: EllipticParameter) -> f64 {
    let t = tau.get();
    let (k, e) = complete_elliptic(tau);
    (2.0 * e - (1.0 - t) * k) / (4.0 * (1.0 - t) * t.powf(0.75))
}

const G_BRACKET: (f64, f64) = (1e-12, 1.0 - 1e-12);

/// The unique tau in (0, 1) with g(tau) = y, by bisection.
pub fn g_inverse(y: f64) -> Result<EllipticParameter, KdvError> {
    let p = |x: f64| EllipticParameter::new(x).expect("bracket inside (0, 1)");
    let (mut lo, mut hi) = G_BRACKET;
    if !(y > g(p(lo)) && y < g(p(hi))) {
        return Err(KdvError::OutOfRange(y));
    }
    while hi - lo > 1e-16 * hi.max(1e-300) && hi - lo > 1e-300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(p(mid)) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(p(0.5 * (lo + hi)))
}

fn check_pair(m: u32, n: u32) -> Result<(), KdvError> {
    if m == 0 || n == 0 || m.gcd(&n) != 1 {
        return Err(DomainError::Invalid(format!("({m}, {n}) must be coprime positive integers")).into());
    }
    Ok(())
}

/// tau_{m,n}(mu) = g^{-1}((m/n) mu^{1/4} K(mu)).
pub fn tau_mn(mu: EllipticParameter, m: u32, n: u32) -> Result<EllipticParameter, KdvError> {
    check_pair(m, n)?;
    g_inverse(m as f64 / n as f64 * g(mu))
}

/// Left minus right side of the t-periodicity identity for (p, r).
pub fn time_period_residual(mu: EllipticParameter, tau: EllipticParameter, p: u32, r: u32) -> f64 {
    let (m, t) = (mu.get(), tau.get());
    let q = (m / t).sqrt();
    let lhs = (m / t).powf(0.25) * ((1.0 + t) * q + 3.0 * (1.0 + m)) * p as f64 * ellip_k(mu);
    let rhs = (1.0 + m + 3.0 * (1.0 + t) * q) * r as f64 * ellip_k(tau);
    lhs - rhs
}

/// Intersection of C_{m,n} and D_{p,r} inside `mu_bracket`, if the residual
/// changes sign there.
pub fn find_doubly_periodic(
    m: u32,
    n: u32,
    p: u32,
    r: u32,
    mu_bracket: (f64, f64),
) -> Result<Option<(EllipticParameter, EllipticParameter)>, KdvError> {
    check_pair(m, n)?;
    check_pair(p, r)?;
    let (mut lo, mut hi) = mu_bracket;
    let (Ok(plo), Ok(phi)) = (EllipticParameter::new(lo), EllipticParameter::new(hi)) else {
        return Err(DomainError::Invalid(format!("bracket ({lo}, {hi}) not inside (0, 1)")).into());
    };
    let f = |x: EllipticParameter| -> Option<f64> {
        let tau = tau_mn(x, m, n).ok()?;
        Some(time_period_residual(x, tau, p, r))
    };
    let (Some(mut flo), Some(fhi)) = (f(plo), f(phi)) else {
        return Ok(None);
    };
    if (flo > 0.0) == (fhi > 0.0) {
        return Ok(None);
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        let Some(fm) = f(EllipticParameter::new(mid)?) else {
            return Ok(None);
        };
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mu = EllipticParameter::new(0.5 * (lo + hi))?;
    let tau = tau_mn(mu, m, n)?;
    if (mu.get() - tau.get()).abs() < 1e-9 {
        return Ok(None);
    }
    Ok(Some((mu, tau)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(x: f64) -> EllipticParameter {
        EllipticParameter::new(x).unwrap()
    }

    #[test]
    fn stationary_initial_value_and_ode() {
        let b = StationaryBending::new(mu(0.9), 0.930_03, 2.225_98).unwrap();
        assert!((b.kappa(0.0) + (2.225_98 + 0.930_03) / (2.225_98 - 0.930_03)).abs() < 1e-14);
        for i in 0..50 {
            let s = b.period() * i as f64 / 50.0;
            let [k, k1, _, k3] = b.derivatives(s);
            assert!((k3 + 2.0 * b.ell() * k1 - 6.0 * k * k1).abs() < 1e-8);
            assert!(b.jet(s, 0.3).kdv_residual().abs() < 1e-8);
        }
    }

    #[test]
    fn g_inverse_reference_point() {
        let y = ellip_k(mu(0.5)) / 2f64.powf(0.25);
        assert!((g_inverse(y).unwrap().get() - 0.5).abs() < 1e-10);
        assert!(matches!(g_inverse(0.0), Err(KdvError::OutOfRange(_))));
        assert!(matches!(g_inverse(-1.0), Err(KdvError::OutOfRange(_))));
    }

    #[test]
    fn tau_nn_is_identity() {
        assert!((tau_mn(mu(0.37), 1, 1).unwrap().get() - 0.37).abs() < 1e-12);
        assert!(tau_mn(mu(0.37), 2, 4).is_err());
    }

    #[test]
    fn kksh_kdv_and_mkdv_residuals() {
        let spec = KkshSpec::with_quantum_numbers(mu(0.615), 1, 6, 2.0).unwrap();
        for i in 0..20 {
            let s = 0.21 * i as f64;
            let t = 0.013 * i as f64;
            let [u, us, _, usss, ut] = spec.u_jet(s, t);
            assert!((ut - 6.0 * u * u * us + usss).abs() < 1e-8 * (1.0 + usss.abs()));
            let j = spec.jet(s, t);
            assert!(j.kdv_residual().abs() < 1e-7 * (1.0 + j.ksss.abs()), "{}", j.kdv_residual());
        }
    }
}
