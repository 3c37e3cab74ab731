//! Double-double (about 32 digit) evaluation of the KKSH monodromy along
//! the LIEN flow.
//!
//! The anchor frame F(0, t) of a KKSH flow grows like e^{c t}; at the
//! snapshot times it reaches 1e9, so M(t) = F(rho, t) F(0, t)^{-1} loses
//! roughly |F(0, t)|^2 digits. Here every stage (K, tau, sn/cn/dn, the
//! bending jet and both integrations) runs in double-double so the
//! monodromy survives that cancellation.

use twofloat::TwoFloat;

use crate::error::{CurveError, DomainError, OdeError};
use crate::linalg::Mat2;
use crate::specfun::EllipticParameter;

type Dd = TwoFloat;

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

// twofloat's TwoFloat/TwoFloat division keeps only ~17 digits; one Newton
// step on the reciprocal restores full precision.
fn recip(b: Dd) -> Dd {
    let x0 = dd(1.0 / b.hi());
    x0 + x0 * (dd(1.0) - b * x0)
}

fn div(a: Dd, b: Dd) -> Dd {
    a * recip(b)
}

fn abs(x: Dd) -> f64 {
    x.hi().abs()
}

/// 2x2 matrix over double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DdMat([Dd; 4]);

impl DdMat {
    const fn id() -> Self {
        let (o, z) = (Dd::from_f64(1.0), Dd::from_f64(0.0));
        Self([o, z, z, o])
    }

    fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Self([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    /// Inverse of a matrix with det 1.
    fn inverse_unimodular(&self) -> Self {
        let [a, b, c, d] = self.0;
        Self([d, -b, -c, a])
    }

    fn to_mat2(self) -> Mat2 {
        let [a, b, c, d] = self.0.map(f64::from);
        Mat2::new(a, b, c, d)
    }

    fn max_norm(&self) -> f64 {
        self.0.iter().map(|x| abs(*x)).fold(0.0, f64::max)
    }
}

/// K(mu) = pi / (2 AGM(1, sqrt(1 - mu))).
fn ellip_k_dd(mu: Dd) -> Dd {
    let mut a = dd(1.0);
    let mut b = (dd(1.0) - mu).sqrt();
    for _ in 0..64 {
        if abs(a - b) <= 1e-31 * abs(a) {
            break;
        }
        let next = (a + b) * 0.5;
        b = (a * b).sqrt();
        a = next;
    }
    div(twofloat::consts::PI, a * 2.0)
}

const SERIES_ORDER: usize = 16;

/// Taylor coefficients of (sn, cn, dn)(x0 + y) in y from their values at x0.
fn sncndn_coefficients(v: [Dd; 3], mu: Dd, order: usize) -> [Vec<Dd>; 3] {
    let mut s = vec![v[0]];
    let mut c = vec![v[1]];
    let mut d = vec![v[2]];
    let conv = |x: &[Dd], y: &[Dd], k: usize| (0..=k).fold(dd(0.0), |acc, i| acc + x[i] * y[k - i]);
    for k in 0..order {
        let inv = div(dd(1.0), dd((k + 1) as f64));
        let ds = conv(&c, &d, k) * inv;
        let dc = -(conv(&s, &d, k) * inv);
        let dn = -(mu * conv(&s, &c, k) * inv);
        s.push(ds);
        c.push(dc);
        d.push(dn);
    }
    [s, c, d]
}

fn horner(coef: &[Dd], y: Dd) -> Dd {
    coef.iter().rev().fold(dd(0.0), |acc, c| acc * y + *c)
}

/// (sn, cn, dn)(x | mu), with `quarter` = K(mu): reduction modulo 4K, a Taylor
/// polynomial at x/2^k, then k duplications.
fn sncndn_dd(x: Dd, mu: Dd, quarter: Dd) -> [Dd; 3] {
    let period = quarter * 4.0;
    let n = div(x, period).hi().round();
    let mut r = x - period * n;
    let mut k = 0;
    while abs(r) > 2f64.powi(-8) {
        r *= 0.5;
        k += 1;
    }
    let [s, c, d] = sncndn_coefficients([dd(0.0), dd(1.0), dd(1.0)], mu, SERIES_ORDER);
    let (mut sn, mut cn, mut dn) = (horner(&s, r), horner(&c, r), horner(&d, r));
    for _ in 0..k {
        let (s2, c2, d2) = (sn * sn, cn * cn, dn * dn);
        let den = recip(dd(1.0) - mu * s2 * s2);
        (sn, cn, dn) = (sn * cn * dn * 2.0 * den, (c2 - s2 * d2) * den, (d2 - mu * s2 * c2) * den);
    }
    [sn, cn, dn]
}

/// Truncated power series in (s, t) with s-order `ns` and t-order `nt`.
#[derive(Debug, Clone)]
struct Series2 {
    ns: usize,
    nt: usize,
    c: Vec<Dd>,
}

impl Series2 {
    fn zeros(ns: usize, nt: usize) -> Self {
        Self { ns, nt, c: vec![dd(0.0); (ns + 1) * (nt + 1)] }
    }

    fn at(&self, i: usize, j: usize) -> Dd {
        self.c[i * (self.nt + 1) + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Dd) {
        let nt = self.nt;
        self.c[i * (nt + 1) + j] = v;
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zeros(self.ns, self.nt);
        for i in 0..=self.ns {
            for p in 0..=i {
                for j in 0..=self.nt {
                    let mut acc = out.at(i, j);
                    for q in 0..=j {
                        acc += self.at(p, q) * o.at(i - p, j - q);
                    }
                    out.set(i, j, acc);
                }
            }
        }
        out
    }

    fn add(&self, o: &Self) -> Self {
        Self { c: self.c.iter().zip(&o.c).map(|(a, b)| *a + *b).collect(), ..*self }
    }

    fn scale(&self, k: Dd) -> Self {
        Self { c: self.c.iter().map(|a| *a * k).collect(), ..*self }
    }

    fn add_const(&self, k: Dd) -> Self {
        let mut out = self.clone();
        out.c[0] += k;
        out
    }

    fn recip(&self) -> Self {
        let inv0 = recip(self.c[0]);
        let mut r = Self::zeros(self.ns, self.nt);
        for i in 0..=self.ns {
            for j in 0..=self.nt {
                if i == 0 && j == 0 {
                    r.set(0, 0, inv0);
                    continue;
                }
                let mut acc = dd(0.0);
                for p in 0..=i {
                    for q in 0..=j {
                        if p + q > 0 {
                            acc += self.at(p, q) * r.at(i - p, j - q);
                        }
                    }
                }
                r.set(i, j, -(acc * inv0));
            }
        }
        r
    }

    /// d/ds; the top s-row becomes zero.
    fn d_ds(&self) -> Self {
        let mut out = Self::zeros(self.ns, self.nt);
        for i in 0..self.ns {
            for j in 0..=self.nt {
                out.set(i, j, self.at(i + 1, j) * (i + 1) as f64);
            }
        }
        out
    }

    /// The t-series of the s-coefficient `i`.
    fn t_row(&self, i: usize) -> Vec<Dd> {
        (0..=self.nt).map(|j| self.at(i, j)).collect()
    }

    /// The s-series of the t-coefficient 0.
    fn s_column(&self) -> Vec<Dd> {
        (0..=self.ns).map(|i| self.at(i, 0)).collect()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The KKSH bending with double-double parameters.
#[derive(Debug, Clone, Copy)]
struct KkshDd {
    mu: Dd,
    tau: Dd,
    h: Dd,
    k_mu: Dd,
    k_tau: Dd,
    ratio: Dd,
    amp: Dd,
    v1: Dd,
    v2: Dd,
}

fn fourth_root(x: Dd) -> Dd {
    x.sqrt().sqrt()
}

/// g(tau) = tau^{1/4} K(tau).
fn g_dd(tau: Dd) -> Dd {
    fourth_root(tau) * ellip_k_dd(tau)
}

impl KkshDd {
    fn new(mu: f64, m: u32, n: u32, h: f64) -> Result<Self, CurveError> {
        let mu_d = dd(mu);
        let target = g_dd(mu_d) * div(dd(m as f64), dd(n as f64));
        let (mut lo, mut hi) = (dd(1e-12), dd(1.0 - 1e-12));
        if !(g_dd(lo).hi() < target.hi() && target.hi() < g_dd(hi).hi()) {
            return Err(DomainError::Invalid(format!("tau_{{{m},{n}}}({mu}) is outside (0, 1)")).into());
        }
        for _ in 0..120 {
            let mid = (lo + hi) * 0.5;
            if (g_dd(mid) - target).hi() < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = (lo + hi) * 0.5;
        let h = dd(h);
        let q = div(mu_d, tau).sqrt();
        let h2 = h * h;
        Ok(Self {
            mu: mu_d,
            tau,
            h,
            k_mu: ellip_k_dd(mu_d),
            k_tau: ellip_k_dd(tau),
            ratio: q.sqrt(),
            amp: fourth_root(mu_d * tau),
            v1: h2 * (dd(1.0) + mu_d + q * (dd(1.0) + tau) * 3.0),
            v2: h2 * (q * (dd(1.0) + tau) + (dd(1.0) + mu_d) * 3.0),
        })
    }

    /// Series of sn(a (s + v t)) around (s, t): the coefficient of
    /// ds^i dt^j is c_{i+j} C(i+j, i) a^{i+j} v^j.
    #[allow(clippy::too_many_arguments)]
    fn wave(&self, s: Dd, t: Dd, a: Dd, v: Dd, mu: Dd, quarter: Dd, ns: usize, nt: usize) -> Series2 {
        let vals = sncndn_dd(a * (s + v * t), mu, quarter);
        let [sn, _, _] = sncndn_coefficients(vals, mu, ns + nt);
        let mut out = Series2::zeros(ns, nt);
        let mut apow = vec![dd(1.0)];
        let mut vpow = vec![dd(1.0)];
        for _ in 0..ns + nt {
            apow.push(*apow.last().expect("nonempty") * a);
        }
        for _ in 0..nt {
            vpow.push(*vpow.last().expect("nonempty") * v);
        }
        for i in 0..=ns {
            for j in 0..=nt {
                out.set(i, j, sn[i + j] * apow[i + j] * vpow[j] * binomial(i + j, i));
            }
        }
        out
    }

    /// kappa around (s, t); valid to s-order ns - 2.
    fn kappa_series(&self, s: Dd, t: Dd, ns: usize, nt: usize) -> Series2 {
        let f1 = self.wave(s, t, self.h, self.v1, self.mu, self.k_mu, ns, nt);
        let f2 = self.wave(s, t, self.ratio * self.h, self.v2, self.tau, self.k_tau, ns, nt);
        let phi = f1.mul(&f2).scale(self.amp);
        let denom = phi.mul(&phi).scale(dd(-1.0)).add_const(dd(1.0));
        let u = phi.d_ds().mul(&denom.recip()).scale(dd(-2.0));
        u.d_ds().add(&u.mul(&u))
    }

    fn rho(&self, m: u32) -> Dd {
        div(self.k_mu * (4.0 * m as f64), self.h)
    }
}

type Pair = [DdMat; 2];

/// Product of two scalar series truncated to the shorter length.
fn conv(a: &[Dd], b: &[Dd]) -> Vec<Dd> {
    let n = a.len().min(b.len());
    (0..n).map(|k| (0..=k).fold(dd(0.0), |acc, i| acc + a[i] * b[k - i])).collect()
}

/// Taylor coefficients of Y with Y' = Y G(x), Y(0) = y0, G given by the
/// series of its entries.
fn frame_series(y0: DdMat, g: &[Vec<Dd>; 4]) -> Vec<DdMat> {
    let n = g[0].len();
    let mut y = vec![y0];
    for k in 0..n {
        let mut acc = [dd(0.0); 4];
        for i in 0..=k {
            let gi = DdMat([g[0][k - i], g[1][k - i], g[2][k - i], g[3][k - i]]);
            let p = y[i].mul(&gi).0;
            for e in 0..4 {
                acc[e] += p[e];
            }
        }
        let inv = recip(dd((k + 1) as f64));
        y.push(DdMat(acc.map(|a| a * inv)));
    }
    y
}

/// Step that keeps the last two terms below `tol` relative to Y(0).
fn taylor_step(coef: &[DdMat], tol: f64) -> f64 {
    let n = coef.len() - 1;
    let base = coef[0].max_norm().max(1e-300);
    [n - 1, n]
        .iter()
        .map(|&k| {
            let ck = coef[k].max_norm();
            if ck == 0.0 {
                f64::INFINITY
            } else {
                (tol * base / ck).powf(1.0 / k as f64)
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn eval_series(coef: &[DdMat], h: Dd) -> DdMat {
    let mut out = [dd(0.0); 4];
    for c in coef.iter().rev() {
        for (o, x) in out.iter_mut().zip(c.0) {
            *o = *o * h + x;
        }
    }
    DdMat(out)
}

/// Taylor order of the frame integrators.
const TAYLOR_ORDER: usize = 40;

/// Advances Y+- over [x0, x1] with generator series supplied by `gen(x)`.
fn taylor_integrate(gen: &dyn Fn(Dd) -> [[Vec<Dd>; 4]; 2], x0: Dd, y0: Pair, x1: Dd, tol: f64) -> Result<Pair, CurveError> {
    let (mut x, mut y) = (x0, y0);
    let mut steps = 0usize;
    while (x1 - x).hi() > 0.0 {
        steps += 1;
        if steps > 1_000_000 {
            return Err(OdeError::MaxSteps { t: x.hi() }.into());
        }
        let g = gen(x);
        let cp = frame_series(y[0], &g[0]);
        let cm = frame_series(y[1], &g[1]);
        let h = 0.5 * taylor_step(&cp, tol).min(taylor_step(&cm, tol));
        if !(h > 1e-14) {
            return Err(OdeError::StepUnderflow { t: x.hi() }.into());
        }
        let remaining = x1 - x;
        let step = if remaining.hi() <= h { remaining } else { dd(h) };
        y = [eval_series(&cp, step), eval_series(&cm, step)];
        x += step;
    }
    Ok(y)
}

/// Monodromies at one time of the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowMonodromy {
    pub t: f64,
    pub m_plus: Mat2,
    pub m_minus: Mat2,
    /// The anchor frames F+-(0, t), rounded to double.
    pub anchors: (Mat2, Mat2),
    /// max-norms of the anchors; their squares bound the cancellation in
    /// M+-(t).
    pub anchor_norms: (f64, f64),
}

/// Relative truncation tolerance of one Taylor step.
pub const EXTENDED_TOL: f64 = 1e-30;

/// M+-(t) = F+-(rho, t) F+-(0, t)^{-1} along the LIEN flow of the KKSH bending
/// with quantum numbers (m, n), F+-(0, 0) = Id, in double-double arithmetic.
pub fn kksh_flow_monodromy(mu: EllipticParameter, m: u32, n: u32, h: f64, t_grid: &[f64]) -> Result<Vec<FlowMonodromy>, CurveError> {
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.first().is_some_and(|t| *t < 0.0) {
        return Err(DomainError::Invalid("t grid must be nonnegative and strictly increasing".into()).into());
    }
    let spec = KkshDd::new(mu.get(), m, n, h)?;
    let rho = spec.rho(m);
    let nt = TAYLOR_ORDER;
    // P_lambda(0, t) = [[-k', -k'' + 2k^2 - 2 lambda k - 4 lambda^2], [2k - 4 lambda, k']]
    let t_gen = |t: Dd| -> [[Vec<Dd>; 4]; 2] {
        let k2 = spec.kappa_series(dd(0.0), t, 4, nt);
        let k = k2.t_row(0);
        let ks = k2.t_row(1);
        let kss: Vec<Dd> = k2.t_row(2).into_iter().map(|x| x * 2.0).collect();
        let ksq = conv(&k, &k);
        let p = |lambda: f64| -> [Vec<Dd>; 4] {
            let l = dd(lambda);
            let mut b: Vec<Dd> = (0..=nt).map(|j| -kss[j] + ksq[j] * 2.0 - l * k[j] * 2.0).collect();
            b[0] -= l * l * 4.0;
            let mut c: Vec<Dd> = k.iter().map(|x| *x * 2.0).collect();
            c[0] -= l * 4.0;
            [ks.iter().map(|x| -*x).collect(), b, c, ks.clone()]
        };
        [p(1.0), p(-1.0)]
    };
    let id = DdMat::id();
    let mut anchors = Vec::with_capacity(t_grid.len());
    let (mut t, mut y) = (dd(0.0), [id, id]);
    for &tn in t_grid {
        y = taylor_integrate(&t_gen, t, y, dd(tn), EXTENDED_TOL)?;
        t = dd(tn);
        anchors.push(y);
    }
    let slice = |(tn, a): (&f64, &Pair)| -> Result<FlowMonodromy, CurveError> {
        let tt = dd(*tn);
        // K_lambda = [[0, k + lambda], [1, 0]]
        let s_gen = |s: Dd| -> [[Vec<Dd>; 4]; 2] {
            let k = spec.kappa_series(s, tt, nt + 2, 0).s_column();
            let k: Vec<Dd> = k.into_iter().take(nt + 1).collect();
            let zero = vec![dd(0.0); nt + 1];
            let mut one = zero.clone();
            one[0] = dd(1.0);
            let shifted = |l: f64| {
                let mut v = k.clone();
                v[0] += l;
                v
            };
            [[zero.clone(), shifted(1.0), one.clone(), zero.clone()], [zero.clone(), shifted(-1.0), one, zero]]
        };
        let ms = taylor_integrate(&s_gen, dd(0.0), [id, id], rho, EXTENDED_TOL)?;
        let conj = |a: &DdMat, m: &DdMat| a.mul(m).mul(&a.inverse_unimodular());
        Ok(FlowMonodromy {
            t: *tn,
            m_plus: conj(&a[0], &ms[0]).to_mat2(),
            m_minus: conj(&a[1], &ms[1]).to_mat2(),
            anchors: (a[0].to_mat2(), a[1].to_mat2()),
            anchor_norms: (a[0].max_norm(), a[1].max_norm()),
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        t_grid.par_iter().zip(anchors.par_iter()).map(slice).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        t_grid.iter().zip(anchors.iter()).map(slice).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kdvsol::KkshSpec;
    use crate::specfun::{ellip_k, jacobi_sncndn};

    #[test]
    fn agm_and_duplication_match_double() {
        for &m in &[0.1, 0.6, 0.95] {
            let p = EllipticParameter::new(m).unwrap();
            let k = ellip_k_dd(dd(m));
            assert!((f64::from(k) - ellip_k(p)).abs() < 1e-14);
            for &x in &[0.3, -2.7, 11.4] {
                let [s, c, d] = sncndn_dd(dd(x), dd(m), k);
                let v = jacobi_sncndn(x, p);
                assert!((f64::from(s) - v.sn).abs() < 1e-13 && (f64::from(c) - v.cn).abs() < 1e-13 && (f64::from(d) - v.dn).abs() < 1e-13);
                let id = s * s + c * c - dd(1.0);
                assert!(abs(id) < 1e-27, "{}", id.hi());
            }
        }
    }

    #[test]
    fn kappa_matches_double_precision_closed_form() {
        let mu = EllipticParameter::new(0.615).unwrap();
        let spec = KkshSpec::with_quantum_numbers(mu, 1, 6, 2.0).unwrap();
        let ext = KkshDd::new(0.615, 1, 6, 2.0).unwrap();
        assert!((f64::from(ext.tau) - spec.tau().get()).abs() < 1e-14);
        for &(s, t) in &[(0.0, 0.0), (0.7, 0.2), (2.9, 1.3)] {
            let j = ext.kappa_series(dd(s), dd(t), 4, 0).s_column();
            let d = spec.kappa_s_derivatives(s, t, 2);
            let scale = 1.0 + d[0].abs();
            assert!((f64::from(j[0]) - d[0]).abs() < 1e-11 * scale);
            assert!((f64::from(j[1]) - d[1]).abs() < 1e-10 * (1.0 + d[1].abs()));
            assert!((f64::from(j[2]) * 2.0 - d[2]).abs() < 1e-9 * (1.0 + d[2].abs()));
        }
    }

    #[test]
    fn kappa_is_rho_periodic_to_double_double() {
        let ext = KkshDd::new(0.615, 1, 6, 2.0).unwrap();
        let rho = ext.rho(1);
        let a = ext.kappa_series(dd(0.4), dd(0.3), 2, 0).at(0, 0);
        let b = ext.kappa_series(dd(0.4) + rho, dd(0.3), 2, 0).at(0, 0);
        assert!(abs(a - b) < 1e-25 * (1.0 + abs(a)), "{}", (a - b).hi());
    }
}
