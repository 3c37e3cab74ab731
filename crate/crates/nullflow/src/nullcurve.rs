//! Null curves in AdS_3 = SL(2, R) built from spinor frames.
//!
//! A curve is gamma = F+ F-^{-1} where the spinor frames solve
//! F+-' = F+- [[0, kappa +- 1], [1, 0]]. Monodromies act on the left:
//! F(s + rho) = M F(s).

use std::f64::consts::{PI, SQRT_2};

use num_integer::Integer;
use num_rational::Rational64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{CurveError, DomainError};
use crate::kdvsol::{BendingField, BendingJet, KkshSpec, StationaryBending};
use crate::lame::{fundamental_ode, HeunFundamental, LameMethod, LamePoint};
use crate::linalg::{Mat2, Spacetime22, Unimodular2};
use crate::ode::{integrate_grid, integrate_to, OdeConfig};
use crate::specfun::{ellip_k, EllipticParameter};

pub use crate::linalg::ads_inner;

/// Cartan basis of R^{2,2}; its Gram matrix is [`CARTAN_GRAM`].
pub const P1: Mat2 = Mat2::IDENTITY;
pub const P2: Mat2 = Mat2::new(0.0, SQRT_2, 0.0, 0.0);
pub const P3: Mat2 = Mat2::new(-1.0, 0.0, 0.0, 1.0);
pub const P4: Mat2 = Mat2::new(0.0, 0.0, SQRT_2, 0.0);

pub const CARTAN_GRAM: [[f64; 4]; 4] = [[-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 0.0]];

const J: Mat2 = Mat2::new(0.0, 1.0, -1.0, 0.0);

/// Gram matrix of four vectors of R^{2,2}.
pub fn gram(v: [Spacetime22; 4]) -> [[f64; 4]; 4] {
    let mut g = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g[i][j] = v[i].inner(v[j]);
        }
    }
    g
}

/// Max deviation of a Gram matrix from [`CARTAN_GRAM`].
pub fn gram_defect(g: &[[f64; 4]; 4]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((g[i][j] - CARTAN_GRAM[i][j]).abs());
        }
    }
    d
}

/// Time orientation of the bivector X ^ V through <<Id ^ J, X ^ V>>.
pub fn future_directed(x: Spacetime22, v: Spacetime22) -> Result<bool, CurveError> {
    let (a, b) = (x.0.to_array(), v.0.to_array());
    let scale = x.0.frobenius() * v.0.frobenius();
    let mut minor: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            minor = minor.max((a[i] * b[j] - a[j] * b[i]).abs());
        }
    }
    if !(minor > 1e-14 * scale) {
        return Err(CurveError::DegenerateBivector);
    }
    let id = Spacetime22(Mat2::IDENTITY);
    let j = Spacetime22(J);
    Ok(id.inner(x) * j.inner(v) - id.inner(v) * j.inner(x) > 0.0)
}

/// Sampled spinor frames along a curve at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorFramePath {
    pub s: Vec<f64>,
    pub t: f64,
    pub f_plus: Vec<Unimodular2>,
    pub f_minus: Vec<Unimodular2>,
    pub kappa: Vec<f64>,
}

impl SpinorFramePath {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn gamma(&self) -> Vec<Spacetime22> {
        self.f_plus.iter().zip(&self.f_minus).map(|(p, m)| Spacetime22((*p * m.inverse()).matrix())).collect()
    }

    /// Index of the sample at `s`, if the grid has one.
    pub fn index_of(&self, s: f64) -> Option<usize> {
        let tol = 1e-9 * s.abs().max(1.0);
        self.s.iter().position(|&x| (x - s).abs() <= tol)
    }

    /// (M+, M-) with F(s0 + rho) = M F(s0), s0 the first sample.
    pub fn monodromy(&self, rho: f64) -> Result<(Unimodular2, Unimodular2), CurveError> {
        let s0 = self.s[0];
        let i = self.index_of(s0 + rho).ok_or_else(|| DomainError::Invalid(format!("grid has no sample at s0 + rho = {}", s0 + rho)))?;
        Ok((self.f_plus[i] * self.f_plus[0].inverse(), self.f_minus[i] * self.f_minus[0].inverse()))
    }

    /// Conjugates the curve by (A, B): gamma -> A gamma B^{-1}.
    pub fn transformed(&self, a: Unimodular2, b: Unimodular2) -> Self {
        Self {
            f_plus: self.f_plus.iter().map(|f| a * *f).collect(),
            f_minus: self.f_minus.iter().map(|f| b * *f).collect(),
            ..self.clone()
        }
    }
}

fn frame_rhs(k: f64, f: &[f64]) -> [f64; 4] {
    // F [[0, k], [1, 0]] for F = [[a, b], [c, d]]
    [f[1], f[0] * k, f[3], f[2] * k]
}

fn renormalize(y: &mut [f64; 8]) {
    for blk in 0..2 {
        let o = 4 * blk;
        let det = y[o] * y[o + 3] - y[o + 1] * y[o + 2];
        if det > 0.0 {
            let r = det.sqrt();
            for v in &mut y[o..o + 4] {
                *v /= r;
            }
        }
    }
}

fn pack(p: Unimodular2, m: Unimodular2) -> [f64; 8] {
    let (a, b) = (p.matrix().to_array(), m.matrix().to_array());
    [a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]]
}

fn unpack(y: &[f64; 8]) -> Result<(Unimodular2, Unimodular2), CurveError> {
    let p = Unimodular2::projected(Mat2::new(y[0], y[1], y[2], y[3]))?;
    let m = Unimodular2::projected(Mat2::new(y[4], y[5], y[6], y[7]))?;
    Ok((p, m))
}

/// Integrates F+-' = F+- [[0, kappa +- 1], [1, 0]] from (F+, F-)(s0) over
/// `s_grid`, renormalizing to det 1 after each accepted step.
pub fn integrate_spinor_frames(
    kappa: &dyn Fn(f64) -> f64,
    s_grid: &[f64],
    s0: f64,
    init_plus: Unimodular2,
    init_minus: Unimodular2,
    cfg: &OdeConfig,
) -> Result<SpinorFramePath, CurveError> {
    if s_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DomainError::Invalid("s grid must be strictly increasing".into()).into());
    }
    let rhs = |s: f64, y: &[f64; 8]| {
        let k = kappa(s);
        let a = frame_rhs(k + 1.0, &y[0..4]);
        let b = frame_rhs(k - 1.0, &y[4..8]);
        [a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]]
    };
    let states = integrate_grid(rhs, s0, pack(init_plus, init_minus), s_grid, cfg, renormalize)?;
    let mut f_plus = Vec::with_capacity(states.len());
    let mut f_minus = Vec::with_capacity(states.len());
    for y in &states {
        let (p, m) = unpack(y)?;
        f_plus.push(p);
        f_minus.push(m);
    }
    Ok(SpinorFramePath { s: s_grid.to_vec(), t: 0.0, f_plus, f_minus, kappa: s_grid.iter().map(|&s| kappa(s)).collect() })
}

/// Monodromies over [s0, s0 + rho] of frames starting at Id.
pub fn frame_monodromy(kappa: &dyn Fn(f64) -> f64, s0: f64, rho: f64, cfg: &OdeConfig) -> Result<(Unimodular2, Unimodular2), CurveError> {
    let rhs = |s: f64, y: &[f64; 8]| {
        let k = kappa(s);
        let a = frame_rhs(k + 1.0, &y[0..4]);
        let b = frame_rhs(k - 1.0, &y[4..8]);
        [a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]]
    };
    let y = integrate_to(rhs, s0, pack(Unimodular2::IDENTITY, Unimodular2::IDENTITY), s0 + rho, cfg, renormalize)?;
    unpack(&y)
}

/// Points of a planar curve.
pub type PlanarCurve = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq)]
pub struct CurveWithCousins {
    pub gamma: Vec<Spacetime22>,
    pub eta_plus: PlanarCurve,
    pub eta_minus: PlanarCurve,
    /// Velocities eta+-', the second columns of F+-.
    pub eta_plus_prime: PlanarCurve,
    pub eta_minus_prime: PlanarCurve,
}

impl CurveWithCousins {
    /// The curve rebuilt from the cousins: (eta+, eta+') (eta-, eta-')^{-1}.
    pub fn rebuild(&self) -> Vec<Spacetime22> {
        let frame = |e: &[f64; 2], d: &[f64; 2]| Mat2::new(e[0], d[0], e[1], d[1]);
        (0..self.eta_plus.len())
            .map(|i| {
                let p = frame(&self.eta_plus[i], &self.eta_plus_prime[i]);
                let m = frame(&self.eta_minus[i], &self.eta_minus_prime[i]);
                Spacetime22(p * m.inverse())
            })
            .collect()
    }
}

/// gamma = F+ F-^{-1}; the cousins are the first columns of F+-.
pub fn curve_and_cousins(path: &SpinorFramePath) -> CurveWithCousins {
    let col = |j: usize| {
        move |f: &Unimodular2| {
            let m = f.matrix();
            if j == 0 {
                [m.a, m.c]
            } else {
                [m.b, m.d]
            }
        }
    };
    CurveWithCousins {
        gamma: path.gamma(),
        eta_plus: path.f_plus.iter().map(col(0)).collect(),
        eta_minus: path.f_minus.iter().map(col(0)).collect(),
        eta_plus_prime: path.f_plus.iter().map(col(1)).collect(),
        eta_minus_prime: path.f_minus.iter().map(col(1)).collect(),
    }
}

/// Central affine curvature k = -det(eta', eta'') of a cousin given the
/// frame (eta, eta') and the bending; equals kappa +- 1.
pub fn cousin_curvature(frame: Unimodular2, shifted_kappa: f64) -> f64 {
    let m = frame.matrix();
    let (d1, d2) = ([m.b, m.d], [shifted_kappa * m.a, shifted_kappa * m.c]);
    -(d1[0] * d2[1] - d1[1] * d2[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartanFramePath {
    pub s: Vec<f64>,
    pub gamma: Vec<Spacetime22>,
    pub tangent: Vec<Spacetime22>,
    pub normal: Vec<Spacetime22>,
    pub binormal: Vec<Spacetime22>,
}

impl CartanFramePath {
    pub fn max_gram_defect(&self) -> f64 {
        (0..self.s.len())
            .map(|i| gram_defect(&gram([self.gamma[i], self.tangent[i], self.normal[i], self.binormal[i]])))
            .fold(0.0, f64::max)
    }
}

/// (gamma, T, N, B) = F+ (P1, P2, P3, P4) F-^{-1}.
pub fn cartan_frame(path: &SpinorFramePath) -> CartanFramePath {
    let conj = |p: Mat2| -> Vec<Spacetime22> {
        path.f_plus.iter().zip(&path.f_minus).map(|(a, b)| Spacetime22(a.matrix() * p * b.inverse().matrix())).collect()
    };
    CartanFramePath { s: path.s.clone(), gamma: conj(P1), tangent: conj(P2), normal: conj(P3), binormal: conj(P4) }
}

const STENCIL_1: [f64; 7] = [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
const STENCIL_2: [f64; 7] = [1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];
const STENCIL_3: [f64; 7] = [1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0];

/// Seven-point central difference of order 1, 2 or 3 on a uniform grid.
/// Entry i of the result belongs to sample i + 3.
pub fn central_difference(gamma: &[Spacetime22], ds: f64, order: u32) -> Result<Vec<Spacetime22>, CurveError> {
    if gamma.len() < 7 {
        return Err(CurveError::GridTooCoarse { needed: 7 });
    }
    let (w, p) = match order {
        1 => (STENCIL_1, 1),
        2 => (STENCIL_2, 2),
        3 => (STENCIL_3, 3),
        _ => return Err(DomainError::Invalid(format!("difference order {order} not in 1..=3")).into()),
    };
    let scale = ds.powi(p);
    Ok((3..gamma.len() - 3)
        .map(|i| {
            let m = (0..7).fold(Mat2::ZERO, |acc, k| acc + gamma[i + k - 3].0.scale(w[k]));
            Spacetime22(m.scale(1.0 / scale))
        })
        .collect())
}

/// kappa = -<gamma''', gamma'''>/16 from finite differences; entry i
/// belongs to sample i + 3. Validation oracle only.
pub fn bending_oracle(gamma: &[Spacetime22], ds: f64) -> Result<Vec<f64>, CurveError> {
    Ok(central_difference(gamma, ds, 3)?.into_iter().map(|g3| -g3.quad() / 16.0).collect())
}

/// exp(s [[0, k], [1, 0]]).
pub fn constant_frame(k: f64, s: f64) -> Unimodular2 {
    let m = Mat2::new(0.0, k, 1.0, 0.0).scale(s).exp_traceless();
    Unimodular2::projected(m).unwrap_or(Unimodular2::IDENTITY)
}

/// Closed-form frames of the constant bending kappa0 with F+-(0) = Id.
pub fn constant_bending_frames(kappa0: f64, s: f64) -> (Unimodular2, Unimodular2) {
    (constant_frame(kappa0 + 1.0, s), constant_frame(kappa0 - 1.0, s))
}

/// The five constant-bending regimes, named by (type of F+, type of F-).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantCase {
    /// kappa < -1
    EllipticElliptic,
    /// kappa = -1
    ParabolicElliptic,
    /// -1 < kappa < 1
    HyperbolicElliptic,
    /// kappa = 1
    HyperbolicParabolic,
    /// kappa > 1
    HyperbolicHyperbolic,
}

impl ConstantCase {
    pub fn of(kappa0: f64) -> Self {
        if kappa0 < -1.0 {
            Self::EllipticElliptic
        } else if kappa0 == -1.0 {
            Self::ParabolicElliptic
        } else if kappa0 < 1.0 {
            Self::HyperbolicElliptic
        } else if kappa0 == 1.0 {
            Self::HyperbolicParabolic
        } else {
            Self::HyperbolicHyperbolic
        }
    }

    /// 1-based case number in the order listed above.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::EllipticElliptic => "(E,E)",
            Self::ParabolicElliptic => "(P,E)",
            Self::HyperbolicElliptic => "(H,E)",
            Self::HyperbolicParabolic => "(H,P)",
            Self::HyperbolicHyperbolic => "(H,H)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    One,
    Half,
}

impl Spin {
    pub fn value(self) -> f64 {
        match self {
            Spin::One => 1.0,
            Spin::Half => 0.5,
        }
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Spin::One => "1",
            Spin::Half => "1/2",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedConstant {
    pub m: i64,
    pub n: i64,
    pub kappa: Rational64,
    pub spin: Spin,
    pub knot: (i64, i64),
}

impl ClosedConstant {
    /// Angular frequencies sqrt|kappa +- 1|.
    pub fn frequencies(&self) -> (f64, f64) {
        let k = *self.kappa.numer() as f64 / *self.kappa.denom() as f64;
        ((k + 1.0).abs().sqrt(), (k - 1.0).abs().sqrt())
    }

    /// Least periods 2 pi/sqrt|kappa +- 1| of the two factors.
    pub fn factor_periods(&self) -> (f64, f64) {
        let (a, b) = self.frequencies();
        (2.0 * PI / a, 2.0 * PI / b)
    }
}

/// The closed constant-bending curve gamma_{m,n}.
pub fn closed_constant(m: i64, n: i64) -> Result<ClosedConstant, CurveError> {
    if n < 1 || m <= n || m.gcd(&n) != 1 {
        return Err(CurveError::InvalidPair { m, n });
    }
    let kappa = -Rational64::new(m * m + n * n, m * m - n * n);
    let (spin, knot) = if (m + n) % 2 == 0 { (Spin::Half, ((n - m) / 2, (n + m) / 2)) } else { (Spin::One, (n - m, n + m)) };
    Ok(ClosedConstant { m, n, kappa, spin, knot })
}

/// Stationary spinor frames F+-(s) = delta_{h+-}(c s) diag(c^{-1/2}, c^{1/2}).
pub fn stationary_curve(
    bending: &StationaryBending,
    s_grid: &[f64],
    method: LameMethod,
    cfg: &OdeConfig,
) -> Result<SpinorFramePath, CurveError> {
    let c = bending.scale();
    let x: Vec<f64> = s_grid.iter().map(|s| c * s).collect();
    let lame_points = |h: f64| -> Result<Vec<LamePoint>, CurveError> {
        Ok(match method {
            LameMethod::Ode => fundamental_ode(bending.mu(), h, &x, cfg)?.points,
            LameMethod::Heun => HeunFundamental::new(bending.mu(), h)?.path(&x)?.points,
        })
    };
    let diag = Mat2::new(c.powf(-0.5), 0.0, 0.0, c.sqrt());
    let frames = |pts: Vec<LamePoint>| -> Result<Vec<Unimodular2>, CurveError> {
        pts.into_iter().map(|p| Ok(Unimodular2::projected(p.delta() * diag)?)).collect()
    };
    Ok(SpinorFramePath {
        s: s_grid.to_vec(),
        t: 0.0,
        f_plus: frames(lame_points(bending.h_plus())?)?,
        f_minus: frames(lame_points(bending.h_minus())?)?,
        kappa: s_grid.iter().map(|&s| bending.kappa(s)).collect(),
    })
}

/// The conserved matrices m+- and the speed ell of a stationary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryEvolution {
    pub m_plus: Mat2,
    pub m_minus: Mat2,
    pub ell: f64,
}

impl StationaryEvolution {
    /// Left factors Exp(t m+-) of the evolved frames.
    pub fn factors(&self, t: f64) -> (Unimodular2, Unimodular2) {
        let e = |m: Mat2| Unimodular2::projected(m.scale(t).exp_traceless()).unwrap_or(Unimodular2::IDENTITY);
        (e(self.m_plus), e(self.m_minus))
    }

    /// F^(s, t) = Exp(t m+-) F+-(s + 2 ell t) for a path sampled at s + 2 ell t.
    pub fn evolve(&self, shifted: &SpinorFramePath, t: f64) -> SpinorFramePath {
        let (a, b) = self.factors(t);
        let mut out = shifted.transformed(a, b);
        out.s = shifted.s.iter().map(|s| s - 2.0 * self.ell * t).collect();
        out.t = t;
        out
    }
}

pub fn stationary_evolution(bending: &StationaryBending) -> StationaryEvolution {
    let m = bending.mu().get();
    let d32 = (bending.h_minus() - bending.h_plus()).powf(1.5);
    let mk = |h: f64| Mat2::new(0.0, 8.0 * SQRT_2 * (h - 1.0) * (m - h) / d32, 8.0 * SQRT_2 * (h - 1.0 - m) / d32, 0.0);
    StationaryEvolution { m_plus: mk(bending.h_plus()), m_minus: mk(bending.h_minus()), ell: bending.ell() }
}

/// K_lambda = [[0, kappa + lambda], [1, 0]].
pub fn lax_k(jet: &BendingJet, lambda: f64) -> Mat2 {
    Mat2::new(0.0, jet.k + lambda, 1.0, 0.0)
}

/// P_lambda = [[-k', -k'' + 2k^2 - 2 lambda k - 4 lambda^2], [2k - 4 lambda, k']].
pub fn lax_p(jet: &BendingJet, lambda: f64) -> Mat2 {
    let k = jet.k;
    Mat2::new(-jet.ks, -jet.kss + 2.0 * k * k - 2.0 * lambda * k - 4.0 * lambda * lambda, 2.0 * k - 4.0 * lambda, jet.ks)
}

/// F (P_lambda - 2 ell K_lambda) F^{-1}; constant in s for a stationary curve.
pub fn stationary_conserved(frame: Unimodular2, jet: &BendingJet, lambda: f64, ell: f64) -> Mat2 {
    frame.matrix() * (lax_p(jet, lambda) - lax_k(jet, lambda).scale(2.0 * ell)) * frame.inverse().matrix()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LienConfig {
    pub ode: OdeConfig,
    /// Relative gate on |kappa_t + kappa_sss - 6 kappa kappa_s|.
    pub kdv_gate: f64,
    /// Points per axis used for the gate.
    pub gate_samples: usize,
}

impl Default for LienConfig {
    fn default() -> Self {
        Self { ode: OdeConfig::default(), kdv_gate: 1e-6, gate_samples: 16 }
    }
}

fn kdv_gate(field: &dyn BendingField, s_grid: &[f64], t_grid: &[f64], cfg: &LienConfig) -> Result<(), CurveError> {
    let pick = |g: &[f64]| -> Vec<f64> {
        let n = cfg.gate_samples.max(2).min(g.len());
        (0..n).map(|i| g[i * (g.len() - 1) / (n - 1).max(1)]).collect()
    };
    for &t in &pick(t_grid) {
        for &s in &pick(s_grid) {
            let j = field.jet(s, t);
            let scale = 1.0 + j.ksss.abs() + j.kt.abs() + (6.0 * j.k * j.ks).abs();
            let r = j.kdv_residual().abs() / scale;
            if !(r <= cfg.kdv_gate) {
                return Err(CurveError::KdvResidualTooLarge { residual: r, gate: cfg.kdv_gate });
            }
        }
    }
    Ok(())
}

/// Frames of the LIEN flow with bending `field`, one path per entry of
/// `t_grid`. A+-(t) solves dA/dt = A P_{+-1}(0, t) from the given frames at
/// (0, 0); then F+-(., t) solves the s-equations from A+-(t).
///
/// Double precision loses about |A|^2 eps in the monodromy; for long KKSH
/// runs where A grows large use [`crate::extended::kksh_flow_monodromy`].
pub fn lien_evolve(
    field: &dyn BendingField,
    s_grid: &[f64],
    t_grid: &[f64],
    init: (Unimodular2, Unimodular2),
    cfg: &LienConfig,
) -> Result<Vec<SpinorFramePath>, CurveError> {
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DomainError::Invalid("t grid must be strictly increasing".into()).into());
    }
    kdv_gate(field, s_grid, t_grid, cfg)?;
    let rhs = |t: f64, y: &[f64; 8]| {
        let j = field.jet(0.0, t);
        let a = Mat2::new(y[0], y[1], y[2], y[3]) * lax_p(&j, 1.0);
        let b = Mat2::new(y[4], y[5], y[6], y[7]) * lax_p(&j, -1.0);
        [a.a, a.b, a.c, a.d, b.a, b.b, b.c, b.d]
    };
    let anchors = integrate_grid(rhs, 0.0, pack(init.0, init.1), t_grid, &cfg.ode, renormalize)?;
    let slice = |(t, y): (&f64, &[f64; 8])| -> Result<SpinorFramePath, CurveError> {
        let (ap, am) = unpack(y)?;
        let kappa = |s: f64| field.kappa(s, *t);
        let mut path = integrate_spinor_frames(&kappa, s_grid, 0.0, ap, am, &cfg.ode)?;
        path.t = *t;
        Ok(path)
    };
    #[cfg(feature = "parallel")]
    {
        t_grid.par_iter().zip(anchors.par_iter()).map(slice).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        t_grid.iter().zip(anchors.iter()).map(slice).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitType {
    Elliptic,
    Hyperbolic,
    Parabolic,
    /// M = +-Id.
    CentralFixed,
}

impl OrbitType {
    pub fn letter(self) -> char {
        match self {
            Self::Elliptic => 'E',
            Self::Hyperbolic => 'H',
            Self::Parabolic => 'P',
            Self::CentralFixed => 'C',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitConfig {
    pub rational_cap: i64,
    pub rational_tol: f64,
    /// Band around I = 0 counted as parabolic.
    pub type_tol: f64,
    /// Distance to +-Id counted as central.
    pub central_tol: f64,
    /// Allowed |kappa(s0 + rho) - kappa(s0)|.
    pub period_tol: f64,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self { rational_cap: 64, rational_tol: 1e-6, type_tol: 1e-8, central_tol: 1e-8, period_tol: 1e-6 }
    }
}

/// Classification data of one monodromy factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorOrbit {
    pub invariant: f64,
    pub kind: OrbitType,
    /// Phase theta in [0, pi] of the eigenvalues e^{+-i theta} (elliptic or central).
    pub theta: Option<f64>,
    /// theta/pi as a reduced fraction, if rational within tolerance.
    pub q: Option<Rational64>,
}

impl FactorOrbit {
    /// theta/(2 pi), the other normalization of the phase.
    pub fn q_full_turn(&self) -> Option<f64> {
        self.theta.map(|t| t / (2.0 * PI))
    }
}

/// Best rational approximation with denominator <= cap within tol.
pub fn rationalize(x: f64, cap: i64, tol: f64) -> Option<Rational64> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > cap {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some(Rational64::new(h2, k2));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            return None;
        }
        r = 1.0 / frac;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    None
}

pub fn classify_factor(m: Unimodular2, cfg: &OrbitConfig) -> FactorOrbit {
    let mm = m.matrix();
    let invariant = m.discriminant();
    let half = m.half_trace();
    if (mm - Mat2::IDENTITY).max_norm() <= cfg.central_tol {
        return FactorOrbit { invariant, kind: OrbitType::CentralFixed, theta: Some(0.0), q: Some(Rational64::new(0, 1)) };
    }
    if (mm + Mat2::IDENTITY).max_norm() <= cfg.central_tol {
        return FactorOrbit { invariant, kind: OrbitType::CentralFixed, theta: Some(PI), q: Some(Rational64::new(1, 1)) };
    }
    if invariant < -cfg.type_tol {
        let theta = half.clamp(-1.0, 1.0).acos();
        let q = rationalize(theta / PI, cfg.rational_cap, cfg.rational_tol);
        FactorOrbit { invariant, kind: OrbitType::Elliptic, theta: Some(theta), q }
    } else if invariant > cfg.type_tol {
        FactorOrbit { invariant, kind: OrbitType::Hyperbolic, theta: None, q: None }
    } else {
        FactorOrbit { invariant, kind: OrbitType::Parabolic, theta: None, q: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitClassification {
    pub plus: FactorOrbit,
    pub minus: FactorOrbit,
    pub closed: bool,
    /// Least period of the curve.
    pub least_period: Option<f64>,
    /// Least period of the spinor frames: least_period / spin.
    pub frame_period: Option<f64>,
    pub spin: Option<Spin>,
}

impl OrbitClassification {
    pub fn tag(&self) -> String {
        format!("({},{})", self.plus.kind.letter(), self.minus.kind.letter())
    }
}

/// Classification from the two monodromies over a period rho of kappa.
pub fn classify_monodromies(m_plus: Unimodular2, m_minus: Unimodular2, rho: f64, cfg: &OrbitConfig) -> OrbitClassification {
    let plus = classify_factor(m_plus, cfg);
    let minus = classify_factor(m_minus, cfg);
    let mut out = OrbitClassification { plus, minus, closed: false, least_period: None, frame_period: None, spin: None };
    let (Some(qp), Some(qm)) = (plus.q, minus.q) else {
        return out;
    };
    // M^n = (-1)^p Id for theta = p pi/n
    let (pp, np) = (*qp.numer(), *qp.denom());
    let (pm, nm) = (*qm.numer(), *qm.denom());
    let n0 = np.lcm(&nm);
    let sign = |p: i64, n: i64| if (p * (n0 / n)) % 2 == 0 { 1 } else { -1 };
    let (ep, em) = (sign(pp, np), sign(pm, nm));
    let (curve_mult, spin) = if ep == em { (n0, if ep == 1 { Spin::One } else { Spin::Half }) } else { (2 * n0, Spin::One) };
    let period = curve_mult as f64 * rho;
    out.closed = true;
    out.least_period = Some(period);
    out.frame_period = Some(period / spin.value());
    out.spin = Some(spin);
    out
}

/// Orbit type, closure and spin of a path whose bending has period rho.
pub fn classify_orbit(path: &SpinorFramePath, rho: f64, cfg: &OrbitConfig) -> Result<OrbitClassification, CurveError> {
    let s0 = path.s[0];
    let i = path.index_of(s0 + rho).ok_or_else(|| DomainError::Invalid(format!("grid has no sample at s0 + rho = {}", s0 + rho)))?;
    let mismatch = (path.kappa[i] - path.kappa[0]).abs();
    if !(mismatch <= cfg.period_tol * (1.0 + path.kappa[0].abs())) {
        return Err(CurveError::NotPeriodicBending { mismatch });
    }
    let (mp, mm) = path.monodromy(rho)?;
    Ok(classify_monodromies(mp, mm, rho, cfg))
}

/// Hill monodromies (F^+(rho), F^-(rho)) of a KKSH bending at t = 0 with
/// Id initial data and rho = 4 m K(mu)/h.
pub fn kksh_monodromy(spec: &KkshSpec, cfg: &OdeConfig) -> Result<(Unimodular2, Unimodular2, f64), CurveError> {
    let rho = spec.s_period().ok_or_else(|| DomainError::Invalid("KKSH spec needs quantum numbers".into()))?;
    let kappa = |s: f64| spec.kappa(s, 0.0);
    let (p, m) = frame_monodromy(&kappa, 0.0, rho, cfg)?;
    Ok((p, m, rho))
}

/// p_q(mu) = Re(tr M- + sqrt(I-))/2 - cos(q pi) for the KKSH family.
pub fn kksh_phase_residual(mu: EllipticParameter, m: u32, n: u32, h: f64, q: f64, cfg: &OdeConfig) -> Result<f64, CurveError> {
    let spec = KkshSpec::with_quantum_numbers(mu, m, n, h)?;
    let (_, mm, _) = kksh_monodromy(&spec, cfg)?;
    let tr = mm.matrix().trace();
    let disc = mm.discriminant();
    let re = if disc > 0.0 { tr + disc.sqrt() } else { tr };
    Ok(0.5 * re - (PI * q).cos())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuStarConfig {
    pub ode: OdeConfig,
    pub bracket: (f64, f64),
    pub scan_points: usize,
    pub tol: f64,
}

impl Default for MuStarConfig {
    fn default() -> Self {
        Self { ode: OdeConfig::default(), bracket: (0.02, 0.98), scan_points: 49, tol: 1e-10 }
    }
}

/// Zero of [`kksh_phase_residual`] in mu: scan for the first sign change,
/// then bisect.
pub fn kksh_mu_star(m: u32, n: u32, h: f64, q: Rational64, cfg: &MuStarConfig) -> Result<f64, CurveError> {
    let qv = *q.numer() as f64 / *q.denom() as f64;
    let f = |x: f64| -> Result<f64, CurveError> { kksh_phase_residual(EllipticParameter::new(x)?, m, n, h, qv, &cfg.ode) };
    let (lo, hi) = cfg.bracket;
    let np = cfg.scan_points.max(2);
    let grid: Vec<f64> = (0..np).map(|i| lo + (hi - lo) * i as f64 / (np - 1) as f64).collect();
    #[cfg(feature = "parallel")]
    let vals: Vec<Result<f64, CurveError>> = grid.par_iter().map(|&x| f(x)).collect();
    #[cfg(not(feature = "parallel"))]
    let vals: Vec<Result<f64, CurveError>> = grid.iter().map(|&x| f(x)).collect();
    let vals = vals.into_iter().collect::<Result<Vec<_>, _>>()?;
    let k = (1..np).find(|&i| (vals[i - 1] > 0.0) != (vals[i] > 0.0)).ok_or(CurveError::NoSignChange)?;
    let (mut a, mut b, mut fa) = (grid[k - 1], grid[k], vals[k - 1]);
    while b - a > cfg.tol {
        let c = 0.5 * (a + b);
        let fc = f(c)?;
        if (fc > 0.0) == (fa > 0.0) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    Ok(0.5 * (a + b))
}

/// Torical chart of AdS_3 into the open solid torus of radii 2 and 1.
pub fn torical_embed(p: Unimodular2) -> [f64; 3] {
    torical_embed_matrix(p.matrix())
}

/// [`torical_embed`] without the determinant check, for points whose
/// entries are too large for det = 1 to survive rounding.
pub fn torical_embed_matrix(m: Mat2) -> [f64; 3] {
    let Mat2 { a, b, c, d } = m;
    let (x1, x2, x3, x4) = (0.5 * (a + d), 0.5 * (b - c), 0.5 * (b + c), 0.5 * (a - d));
    let theta = x2.atan2(x1);
    let r = x3.hypot(x4);
    let rd = r / (1.0 + r * r).sqrt();
    let phi = x4.atan2(x3);
    let ring = 2.0 + rd * phi.cos();
    [ring * theta.cos(), ring * theta.sin(), rd * phi.sin()]
}

/// Least s-period of a KKSH bending and its spectral data at t = 0.
pub fn kksh_period(mu: EllipticParameter, m: u32, h: f64) -> f64 {
    4.0 * m as f64 * ellip_k(mu) / h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartan_basis_gram() {
        let b = [P1, P2, P3, P4].map(Spacetime22);
        assert!(gram_defect(&gram(b)) < 1e-15);
    }

    #[test]
    fn basis_frame_is_future_directed() {
        assert!(future_directed(Spacetime22(P1), Spacetime22(P2)).unwrap());
        assert!(!future_directed(Spacetime22(P1), Spacetime22(P2.scale(-1.0))).unwrap());
        assert!(matches!(future_directed(Spacetime22(P1), Spacetime22(P1.scale(2.0))), Err(CurveError::DegenerateBivector)));
    }

    #[test]
    fn closed_constant_examples() {
        let c = closed_constant(7, 3).unwrap();
        assert_eq!(c.kappa, Rational64::new(-29, 20));
        assert_eq!((c.spin, c.knot), (Spin::Half, (-2, 5)));
        let c = closed_constant(8, 3).unwrap();
        assert_eq!(c.kappa, Rational64::new(-73, 55));
        assert_eq!((c.spin, c.knot), (Spin::One, (-5, 11)));
        assert!(closed_constant(6, 3).is_err());
        assert!(closed_constant(3, 7).is_err());
    }

    #[test]
    fn rationalize_examples() {
        assert_eq!(rationalize(1.0 / 3.0, 64, 1e-9), Some(Rational64::new(1, 3)));
        assert_eq!(rationalize(7.0 / 9.0, 64, 1e-9), Some(Rational64::new(7, 9)));
        assert_eq!(rationalize(0.0, 64, 1e-9), Some(Rational64::new(0, 1)));
        assert_eq!(rationalize(1.0, 64, 1e-9), Some(Rational64::new(1, 1)));
        assert_eq!(rationalize(1.0 / std::f64::consts::E, 64, 1e-9), None);
    }

    #[test]
    fn torical_identity_is_centre() {
        let p = torical_embed(Unimodular2::IDENTITY);
        assert!((p[0] - 2.0).abs() < 1e-15 && p[1].abs() < 1e-15 && p[2].abs() < 1e-15);
    }
}
