//! Local Heun function on the real axis.
//!
//! Solves
//!   f'' + (g/z + d/(z-1) + e/(z-a)) f' + (ab z - q)/(z(z-1)(z-a)) f = 0
//! with f(0) = 1, using the Frobenius series at 0 and then Taylor series
//! recentred at regular points, each disc capped at 0.4 times the distance
//! to the nearest singular point.

use crate::error::{DomainError, HeunError};
use crate::specfun::EllipticParameter;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunParams {
    pub a: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

const DISC_FRACTION: f64 = 0.4;
const MAX_DISCS: usize = 400;
const MAX_TERMS: usize = 600;

impl HeunParams {
    pub fn new(a: f64, q: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self, DomainError> {
        if !(a > 1.0) {
            return Err(DomainError::Invalid(format!("heun singular point a = {a} must exceed 1")));
        }
        if gamma <= 0.0 && gamma.fract() == 0.0 {
            return Err(DomainError::Invalid(format!("heun gamma = {gamma} is a non-positive integer")));
        }
        Ok(Self { a, q, alpha, beta, gamma, delta })
    }

    /// Parameters of the even Lame building block.
    pub fn lame_even(mu: EllipticParameter, h: f64) -> Self {
        let m = mu.get();
        Self { a: 1.0 / m, q: (m - h) / (4.0 * m), alpha: 0.0, beta: 1.5, gamma: 0.5, delta: 0.5 }
    }

    /// Parameters of the odd Lame building block.
    pub fn lame_odd(mu: EllipticParameter, h: f64) -> Self {
        let m = mu.get();
        Self { a: 1.0 / m, q: (1.0 - h + 4.0 * m) / (4.0 * m), alpha: 0.5, beta: 2.0, gamma: 1.5, delta: 0.5 }
    }

    fn epsilon(&self) -> f64 {
        self.alpha + self.beta - self.gamma - self.delta + 1.0
    }

    /// Coefficients (in z) of the polynomials P, Q, R of P f'' + Q f' + R f = 0.
    fn polys(&self) -> ([f64; 4], [f64; 3], [f64; 2]) {
        let (a, g, d, e) = (self.a, self.gamma, self.delta, self.epsilon());
        let p = [0.0, a, -(1.0 + a), 1.0];
        let q = [g * a, -(g * (1.0 + a) + d * a + e), g + d + e];
        let r = [-self.q, self.alpha * self.beta];
        (p, q, r)
    }

    fn singular_distance(&self, z: f64) -> f64 {
        z.abs().min((z - 1.0).abs()).min((z - self.a).abs())
    }
}

/// Coefficients of `poly(z0 + w)` as a polynomial in `w`.
fn taylor_shift<const N: usize>(poly: [f64; N], z0: f64) -> [f64; N] {
    let mut c = poly;
    for i in 0..N {
        for j in (i..N - 1).rev() {
            c[j] += z0 * c[j + 1];
        }
    }
    c
}

/// Sums the local series about `z0` at offset `w`. `z0 = 0` uses the
/// Frobenius branch normalized by f(0) = 1; elsewhere `(f0, df0)` seed it.
fn local_series(p: &HeunParams, z0: f64, f0: f64, df0: f64, w: f64) -> Result<(f64, f64), HeunError> {
    let (pp, qq, rr) = p.polys();
    let pp = taylor_shift(pp, z0);
    let qq = taylor_shift(qq, z0);
    let rr = taylor_shift(rr, z0);
    let frobenius = z0 == 0.0;

    let mut c: Vec<f64> = Vec::with_capacity(64);
    c.push(f0);
    if !frobenius {
        c.push(df0);
    }
    let get = |c: &Vec<f64>, k: isize| if k < 0 { 0.0 } else { c.get(k as usize).copied().unwrap_or(0.0) };

    let mut f = 0.0;
    let mut df = 0.0;
    let mut wp = 1.0;
    let mut small = 0;
    for k in 0..MAX_TERMS {
        // make sure c[k] and c[k+1] are known
        while c.len() <= k + 1 {
            let n = if frobenius { c.len() as isize - 1 } else { c.len() as isize - 2 };
            let unknown = if frobenius { n + 1 } else { n + 2 };
            let mut rest = 0.0;
            for (j, &pj) in pp.iter().enumerate() {
                let idx = n - j as isize + 2;
                if idx != unknown {
                    rest += pj * (idx * (idx - 1)) as f64 * get(&c, idx);
                }
            }
            for (j, &qj) in qq.iter().enumerate() {
                let idx = n - j as isize + 1;
                if idx != unknown {
                    rest += qj * idx as f64 * get(&c, idx);
                }
            }
            for (j, &rj) in rr.iter().enumerate() {
                let idx = n - j as isize;
                rest += rj * get(&c, idx);
            }
            let lead = if frobenius {
                let m = (n + 1) as f64;
                m * (pp[1] * (m - 1.0) + qq[0])
            } else {
                pp[0] * ((n + 2) * (n + 1)) as f64
            };
            c.push(-rest / lead);
        }
        let term = c[k] * wp;
        f += term;
        if k + 1 < c.len() {
            df += (k + 1) as f64 * c[k + 1] * wp;
        }
        wp *= w;
        let scale = f.abs().max(df.abs()).max(1e-300);
        let next = (c[k + 1] * wp).abs() + if k + 2 < c.len() { (c[k + 2] * wp).abs() } else { 0.0 };
        if term.abs() <= 1e-18 * scale && next <= 1e-17 * scale {
            small += 1;
            if small >= 3 {
                return Ok((f, df));
            }
        } else {
            small = 0;
        }
        if !f.is_finite() {
            break;
        }
    }
    Err(HeunError::NonConvergence { z: z0 + w })
}

/// Value and z-derivative of the local Heun function for z < 1.
pub fn heun_local_with_derivative(p: &HeunParams, z: f64) -> Result<(f64, f64), HeunError> {
    if !(z < 1.0) {
        if z == 1.0 {
            return Err(HeunError::NonConvergence { z });
        }
        return Err(DomainError::HeunArgument(z).into());
    }
    let r0 = DISC_FRACTION * p.a.min(1.0);
    if z.abs() <= r0 {
        return local_series(p, 0.0, 1.0, 0.0, z);
    }
    let dir = z.signum();
    let mut z0 = dir * r0;
    let (mut f, mut df) = local_series(p, 0.0, 1.0, 0.0, z0)?;
    for _ in 0..MAX_DISCS {
        let r = DISC_FRACTION * p.singular_distance(z0);
        if (z - z0).abs() <= r {
            return local_series(p, z0, f, df, z - z0);
        }
        let z1 = z0 + dir * r;
        let (f1, df1) = local_series(p, z0, f, df, z1 - z0)?;
        f = f1;
        df = df1;
        z0 = z1;
    }
    Err(HeunError::NonConvergence { z })
}

/// Local Heun function normalized by f(0) = 1. At z = 1 the one-sided
/// limit is returned.
pub fn heun_local(p: &HeunParams, z: f64) -> Result<f64, HeunError> {
    if z == 1.0 {
        return Ok(heun_limit_at_one(p)?.value);
    }
    Ok(heun_local_with_derivative(p, z)?.0)
}

/// Behaviour at z = 1 from below: f(1 - x^2) = value + sqrt_coeff * x + O(x^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunLimit {
    pub value: f64,
    pub sqrt_coeff: f64,
}

const LIMIT_SAMPLES: usize = 12;

/// Neville extrapolation to x = 0; returns (estimate, previous-order estimate).
fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let mut t = ys.to_vec();
    let mut prev = t[n - 1];
    for m in 1..n {
        for i in 0..n - m {
            t[i] = (xs[i + m] * t[i] - xs[i] * t[i + 1]) / (xs[i + m] - xs[i]);
        }
        if m == n - 2 {
            prev = t[0];
        }
    }
    (t[0], prev)
}

/// Richardson extrapolation in x = sqrt(1 - z) of the value and of the
/// coefficient of x, from samples at 1 - z = eps0 2^-k.
pub fn heun_limit_at_one(p: &HeunParams) -> Result<HeunLimit, HeunError> {
    let eps0 = (0.25 * (p.a - 1.0)).min(0.05);
    let mut xs = Vec::with_capacity(LIMIT_SAMPLES);
    let mut vals = Vec::with_capacity(LIMIT_SAMPLES);
    let mut slopes = Vec::with_capacity(LIMIT_SAMPLES);
    for k in 0..LIMIT_SAMPLES {
        let eps = eps0 * 0.5_f64.powi(k as i32);
        let x = eps.sqrt();
        let (f, df) = heun_local_with_derivative(p, 1.0 - eps)?;
        xs.push(x);
        vals.push(f);
        slopes.push(-2.0 * x * df);
    }
    let (value, v_prev) = extrapolate_to_zero(&xs, &vals);
    let (sqrt_coeff, s_prev) = extrapolate_to_zero(&xs, &slopes);
    let spread = ((value - v_prev).abs() / value.abs().max(1.0)).max((sqrt_coeff - s_prev).abs() / sqrt_coeff.abs().max(1.0));
    if !(spread <= 1e-7) {
        return Err(HeunError::LimitUnstable { spread });
    }
    Ok(HeunLimit { value, sqrt_coeff })
}

/// `(Hl1(mu, h; z), Hl2(mu, h; z))`, the two Lame building blocks.
pub fn heun_pair(mu: EllipticParameter, h: f64, z: f64) -> Result<(f64, f64), HeunError> {
    let even = HeunParams::lame_even(mu, h);
    let odd = HeunParams::lame_odd(mu, h);
    Ok((heun_local(&even, z)?, heun_local(&odd, z)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rk4_oracle(p: &HeunParams, z_end: f64) -> f64 {
        // start slightly off zero from the two-term Frobenius expansion
        let z_start = 1e-3;
        let (pp, qq, rr) = p.polys();
        let ev = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &x| acc * z + x);
        let (f0, df0) = local_series(p, 0.0, 1.0, 0.0, z_start).unwrap();
        let rhs = |z: f64, y: [f64; 2]| {
            let pz = ev(&pp, z);
            [y[1], -(ev(&qq, z) * y[1] + ev(&rr, z) * y[0]) / pz]
        };
        let n = 200_000;
        let h = (z_end - z_start) / n as f64;
        let mut y = [f0, df0];
        let mut z = z_start;
        for _ in 0..n {
            let k1 = rhs(z, y);
            let k2 = rhs(z + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = rhs(z + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = rhs(z + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
            z += h;
        }
        y[0]
    }

    #[test]
    fn normalization_and_trivial_case() {
        let p = HeunParams::new(2.5, 0.3, 0.7, 1.1, 0.5, 0.5).unwrap();
        assert_eq!(heun_local(&p, 0.0).unwrap(), 1.0);
        let triv = HeunParams::new(2.5, 0.0, 0.0, 1.5, 0.5, 0.5).unwrap();
        for &z in &[0.1, 0.5, 0.9, 0.999] {
            assert!((heun_local(&triv, z).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_ode_integration() {
        let mu = EllipticParameter::new(0.4).unwrap();
        for p in [HeunParams::lame_even(mu, 0.67), HeunParams::lame_odd(mu, 0.67)] {
            let z = 0.5;
            let v = heun_local(&p, z).unwrap();
            let o = rk4_oracle(&p, z);
            assert!((v - o).abs() < 1e-9, "{v} vs {o}");
        }
    }

    #[test]
    fn limit_at_one_is_consistent() {
        let mu = EllipticParameter::new(0.4).unwrap();
        let p = HeunParams::lame_even(mu, 0.67);
        let lim = heun_limit_at_one(&p).unwrap();
        let eps: f64 = 1e-8;
        let f = heun_local(&p, 1.0 - eps).unwrap();
        assert!((f - lim.value - lim.sqrt_coeff * eps.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn rejects_beyond_one() {
        let mu = EllipticParameter::new(0.4).unwrap();
        let p = HeunParams::lame_even(mu, 0.67);
        assert!(matches!(heun_local(&p, 1.2), Err(HeunError::Domain(_))));
    }
}
