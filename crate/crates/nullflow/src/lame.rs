//! Floquet theory of the order-one Lame equation
//!   y'' = (2 mu sn^2(s, mu) - h) y.
//!
//! The fundamental matrix has rows (cl, cl') and (sl, sl') and satisfies
//! delta' = delta [[0, 2 mu sn^2 - h], [1, 0]], delta(0) = Id. The
//! monodromy is M = delta(2K), so delta(s + 2K) = M delta(s).

use std::f64::consts::PI;

use num_integer::Integer;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{DomainError, LameError};
use crate::linalg::{Mat2, Unimodular2};
use crate::ode::{integrate_grid, integrate_to, OdeConfig};
use crate::specfun::heun::{heun_limit_at_one, heun_local_with_derivative, HeunLimit, HeunParams};
use crate::specfun::{ellip_k, jacobi_sncndn, EllipticParameter};

/// Tunables of the spectral solver.
#[derive(Debug, Clone, PartialEq)]
pub struct LameConfig {
    pub ode: OdeConfig,
    /// Bisection width for eigenvalues.
    pub tol_h: f64,
    /// Largest h scanned.
    pub scan_ceiling: f64,
    pub fine_step: f64,
    pub coarse_step: f64,
    /// h above which the coarse step is used.
    pub coarse_from: f64,
    pub order_cap: u32,
    pub order_tol: f64,
    /// Accepted |tau - cos(q pi)| for tangential roots.
    pub tol_floquet: f64,
}

impl Default for LameConfig {
    fn default() -> Self {
        Self {
            ode: OdeConfig::default(),
            tol_h: 1e-10,
            scan_ceiling: 500.0,
            fine_step: 0.01,
            coarse_step: 0.5,
            coarse_from: 5.0,
            order_cap: 10_000,
            order_tol: 1e-6,
            tol_floquet: 1e-6,
        }
    }
}

/// Characteristic exponent q = num/den in [0, 1], stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FloquetRatio {
    num: u32,
    den: u32,
}

impl FloquetRatio {
    pub fn new(num: u32, den: u32) -> Result<Self, DomainError> {
        if den == 0 || num > den {
            return Err(DomainError::Invalid(format!("q = {num}/{den} must lie in [0, 1]")));
        }
        if num.gcd(&den) != 1 {
            return Err(DomainError::Invalid(format!("q = {num}/{den} is not reduced")));
        }
        Ok(Self { num, den })
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// The target half-trace cos(q pi).
    pub fn target(self) -> f64 {
        (PI * self.value()).cos()
    }

    /// q = 0 or q = 1: the periodic and antiperiodic spectra.
    pub fn is_band_edge(self) -> bool {
        self.num == 0 || self.num == self.den
    }
}

/// Smallest n with M^n = Id, or no such n below the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonodromyOrder {
    Finite(u32),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetRecord {
    pub mu: EllipticParameter,
    pub q: FloquetRatio,
    /// 1-based position in the increasing eigenvalue sequence.
    pub index: usize,
    pub h: f64,
    pub monodromy: Unimodular2,
    pub order: MonodromyOrder,
}

impl FloquetRecord {
    pub fn half_trace(&self) -> f64 {
        self.monodromy.half_trace()
    }

    pub fn discriminant(&self) -> f64 {
        self.monodromy.discriminant()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LameMethod {
    Ode,
    Heun,
}

/// Row (cl, sl, cl', sl') of a fundamental solution at one s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LamePoint {
    pub cl: f64,
    pub sl: f64,
    pub dcl: f64,
    pub dsl: f64,
}

impl LamePoint {
    /// delta = [[cl, cl'], [sl, sl']].
    pub fn delta(self) -> Mat2 {
        Mat2::new(self.cl, self.dcl, self.sl, self.dsl)
    }

    fn from_delta(d: Mat2) -> Self {
        Self { cl: d.a, dcl: d.b, sl: d.c, dsl: d.d }
    }

    pub fn wronskian(self) -> f64 {
        self.cl * self.dsl - self.dcl * self.sl
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LameSolutionPath {
    pub mu: EllipticParameter,
    pub h: f64,
    pub s: Vec<f64>,
    pub points: Vec<LamePoint>,
    pub method: LameMethod,
}

impl LameSolutionPath {
    pub fn max_wronskian_defect(&self) -> f64 {
        self.points.iter().map(|p| (p.wronskian() - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn lame_rhs(mu: EllipticParameter, h: f64) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    let m = mu.get();
    move |s, y| {
        let sn = jacobi_sncndn(s, mu).sn;
        let w = 2.0 * m * sn * sn - h;
        [y[1], w * y[0], y[3], w * y[2]]
    }
}

const ID_STATE: [f64; 4] = [1.0, 0.0, 0.0, 1.0];

pub fn lame_monodromy_with(mu: EllipticParameter, h: f64, cfg: &OdeConfig) -> Result<Unimodular2, LameError> {
    let k = ellip_k(mu);
    let y = integrate_to(lame_rhs(mu, h), 0.0, ID_STATE, 2.0 * k, cfg, |_| {})?;
    Ok(Unimodular2::projected(Mat2::from_array(y))?)
}

/// delta(2K) for the default integrator settings.
pub fn lame_monodromy(mu: EllipticParameter, h: f64) -> Result<Unimodular2, LameError> {
    lame_monodromy_with(mu, h, &OdeConfig::default())
}

/// Half the trace of the monodromy.
pub fn tau(mu: EllipticParameter, h: f64) -> Result<f64, LameError> {
    Ok(lame_monodromy(mu, h)?.half_trace())
}

/// Smallest n <= cap with max|M^n - Id| <= tol.
pub fn monodromy_order(m: Mat2, cap: u32, tol: f64) -> MonodromyOrder {
    let mut p = m;
    for n in 1..=cap {
        if (p - Mat2::IDENTITY).max_norm() <= tol {
            return MonodromyOrder::Finite(n);
        }
        p = p * m;
    }
    MonodromyOrder::Unbounded
}

/// Scan grid from `lo` to `hi`, fine below `coarse_from`.
fn scan_grid(lo: f64, hi: f64, cfg: &LameConfig) -> Vec<f64> {
    let mut g = vec![lo];
    let mut h = lo;
    while h < hi {
        let step = if h < cfg.coarse_from { cfg.fine_step } else { cfg.coarse_step };
        h = (h + step).min(hi);
        g.push(h);
    }
    g
}

fn eval_all(hs: &[f64], f: &(dyn Fn(f64) -> Result<f64, LameError> + Sync)) -> Result<Vec<f64>, LameError> {
    #[cfg(feature = "parallel")]
    {
        hs.par_iter().map(|&h| f(h)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        hs.iter().map(|&h| f(h)).collect()
    }
}

fn bisect(f: &dyn Fn(f64) -> Result<f64, LameError>, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> Result<f64, LameError> {
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

const SCAN_CHUNK: usize = 64;

/// Roots of `f` on `grid` in increasing order, stopping after `want`
/// accepted roots; `accept` filters bisected candidates.
fn scan_roots(
    grid: &[f64],
    f: &(dyn Fn(f64) -> Result<f64, LameError> + Sync),
    want: usize,
    tol: f64,
    accept: &dyn Fn(f64) -> Result<bool, LameError>,
) -> Result<Vec<f64>, LameError> {
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for chunk in grid.chunks(SCAN_CHUNK) {
        let vals = eval_all(chunk, f)?;
        for (&h, &v) in chunk.iter().zip(&vals) {
            if let Some((hp, vp)) = prev {
                if vp == 0.0 || (vp > 0.0) != (v > 0.0) {
                    let r = if vp == 0.0 { hp } else { bisect(f, hp, h, vp, tol)? };
                    if accept(r)? && roots.last().is_none_or(|&l: &f64| r - l > 10.0 * tol) {
                        roots.push(r);
                        if roots.len() == want {
                            return Ok(roots);
                        }
                    }
                }
            }
            prev = Some((h, v));
        }
    }
    Ok(roots)
}

/// The first `count` eigenvalues h with tau(h) = cos(q pi).
///
/// For 0 < q < 1 the admissible set is (mu, 1) and (1 + mu, inf), scanned
/// for sign changes of tau - cos(q pi). For q in {0, 1} the eigenvalues above
/// 1 + mu are double, tau touches +-1 without crossing, and the monodromy is
/// +-Id there; those points are found as sign changes of the (1, 2) entry and
/// kept when tau matches.
pub fn floquet_search(mu: EllipticParameter, q: FloquetRatio, count: usize, cfg: &LameConfig) -> Result<Vec<FloquetRecord>, LameError> {
    if count == 0 {
        return Err(DomainError::Invalid("count must be at least 1".into()).into());
    }
    let m = mu.get();
    let target = q.target();
    let mono = |h: f64| lame_monodromy_with(mu, h, &cfg.ode);

    let hs = if q.is_band_edge() {
        let f = |h: f64| Ok(mono(h)?.matrix().b);
        let accept = |h: f64| Ok((mono(h)?.half_trace() - target).abs() <= cfg.tol_floquet);
        let grid = scan_grid(1.0 + m, cfg.scan_ceiling, cfg);
        scan_roots(&grid[1..], &f, count, cfg.tol_h, &accept)?
    } else {
        let f = |h: f64| Ok(mono(h)?.half_trace() - target);
        let accept = |_h: f64| Ok(true);
        let mut grid = scan_grid(m, 1.0, cfg);
        let mut roots = scan_roots(&grid, &f, count, cfg.tol_h, &accept)?;
        if roots.len() < count {
            grid = scan_grid(1.0 + m, cfg.scan_ceiling, cfg);
            roots.extend(scan_roots(&grid, &f, count - roots.len(), cfg.tol_h, &accept)?);
        }
        roots
    };
    if hs.len() < count {
        return Err(LameError::SearchExhausted { found: hs.len(), wanted: count, ceiling: cfg.scan_ceiling });
    }
    hs.into_iter()
        .enumerate()
        .map(|(i, h)| {
            let monodromy = mono(h)?;
            let order = monodromy_order(monodromy.matrix(), cfg.order_cap, cfg.order_tol);
            Ok(FloquetRecord { mu, q, index: i + 1, h, monodromy, order })
        })
        .collect()
}

/// Fundamental solution by direct integration on an increasing grid.
pub fn fundamental_ode(mu: EllipticParameter, h: f64, s_grid: &[f64], cfg: &OdeConfig) -> Result<LameSolutionPath, LameError> {
    if s_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DomainError::Invalid("s grid must be strictly increasing".into()).into());
    }
    let states = integrate_grid(lame_rhs(mu, h), 0.0, ID_STATE, s_grid, cfg, |_| {})?;
    let points = states.into_iter().map(|y| LamePoint::from_delta(Mat2::from_array(y))).collect();
    Ok(LameSolutionPath { mu, h, s: s_grid.to_vec(), points, method: LameMethod::Ode })
}

/// Below this |cn|^2 the Heun functions are replaced by their expansion
/// A + B sqrt(1 - z) at z = 1.
const NEAR_ONE: f64 = 1e-12;

/// Fundamental solution assembled from the two Heun building blocks
/// cl~ = Hl1(sn^2) dn and sl~ = Hl2(sn^2) dn sn on [-K, K], extended by
/// delta(s) = M^p delta~(s - 2pK).
#[derive(Debug, Clone, PartialEq)]
pub struct HeunFundamental {
    mu: EllipticParameter,
    h: f64,
    k: f64,
    even: HeunParams,
    odd: HeunParams,
    lim_even: HeunLimit,
    lim_odd: HeunLimit,
    q_plus: Mat2,
    q_minus: Mat2,
    monodromy: Mat2,
}

impl HeunFundamental {
    pub fn new(mu: EllipticParameter, h: f64) -> Result<Self, LameError> {
        let m = mu.get();
        let even = HeunParams::lame_even(mu, h);
        let odd = HeunParams::lame_odd(mu, h);
        let lim_even = heun_limit_at_one(&even)?;
        let lim_odd = heun_limit_at_one(&odd)?;
        let r = (1.0 - m).sqrt();
        let q_plus = Mat2::new(lim_even.value * r, -lim_even.sqrt_coeff * (1.0 - m), lim_odd.value * r, -lim_odd.sqrt_coeff * (1.0 - m));
        let q_minus = Mat2::new(lim_even.value * r, lim_even.sqrt_coeff * (1.0 - m), -lim_odd.value * r, -lim_odd.sqrt_coeff * (1.0 - m));
        let monodromy = q_plus * q_minus.inverse();
        Ok(Self { mu, h, k: ellip_k(mu), even, odd, lim_even, lim_odd, q_plus, q_minus, monodromy })
    }

    /// One-sided limits delta~(K-) and delta~(-K+).
    pub fn q_limits(&self) -> (Mat2, Mat2) {
        (self.q_plus, self.q_minus)
    }

    pub fn monodromy(&self) -> Mat2 {
        self.monodromy
    }

    /// The raw building blocks on the base cell [-K, K].
    pub fn base_cell(&self, s: f64) -> Result<LamePoint, LameError> {
        let m = self.mu.get();
        let v = jacobi_sncndn(s, self.mu);
        let (sn, cn, dn) = (v.sn, v.cn, v.dn);
        let z = sn * sn;
        let x = cn.abs();
        // d/ds H(sn^2) = H'(z) 2 sn cn dn; near z = 1, H'(z) |cn| -> -B/2.
        // cn >= 0 on the base cell, so its rounded sign at +-K is ignored.
        let (f1, g1, f2, g2) = if cn * cn < NEAR_ONE {
            let e = (self.lim_even.value + self.lim_even.sqrt_coeff * x, -0.5 * self.lim_even.sqrt_coeff);
            let o = (self.lim_odd.value + self.lim_odd.sqrt_coeff * x, -0.5 * self.lim_odd.sqrt_coeff);
            (e.0, e.1, o.0, o.1)
        } else {
            let (f1, d1) = heun_local_with_derivative(&self.even, z)?;
            let (f2, d2) = heun_local_with_derivative(&self.odd, z)?;
            (f1, d1 * x, f2, d2 * x)
        };
        // g = H'(z) cn
        let cl = f1 * dn;
        let dcl = g1 * 2.0 * sn * dn * dn - m * sn * cn * f1;
        let sl = f2 * dn * sn;
        let dsl = g2 * 2.0 * sn * sn * dn * dn + f2 * cn * (dn * dn - m * sn * sn);
        Ok(LamePoint { cl, sl, dcl, dsl })
    }

    pub fn eval(&self, s: f64) -> Result<LamePoint, LameError> {
        let p = ((s + self.k) / (2.0 * self.k)).floor();
        let base = s - 2.0 * p * self.k;
        let d = self.base_cell(base)?.delta();
        let mp = if p >= 0.0 { self.monodromy.powi(p as u32) } else { self.monodromy.inverse().powi((-p) as u32) };
        Ok(LamePoint::from_delta(mp * d))
    }

    pub fn path(&self, s_grid: &[f64]) -> Result<LameSolutionPath, LameError> {
        let points = s_grid.iter().map(|&s| self.eval(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(LameSolutionPath { mu: self.mu, h: self.h, s: s_grid.to_vec(), points, method: LameMethod::Heun })
    }
}

/// (cl, sl, cl', sl') at s from the Heun closed form.
pub fn fundamental_heun(mu: EllipticParameter, h: f64, s: f64) -> Result<LamePoint, LameError> {
    HeunFundamental::new(mu, h)?.eval(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(x: f64) -> EllipticParameter {
        EllipticParameter::new(x).unwrap()
    }

    #[test]
    fn classical_eigenvalues_are_band_edges() {
        // dn, cn, sn are eigenfunctions at h = mu, 1, 1 + mu
        let m = mu(0.4);
        assert!((tau(m, 0.4).unwrap() - 1.0).abs() < 1e-9);
        assert!((tau(m, 1.0).unwrap() + 1.0).abs() < 1e-9);
        assert!((tau(m, 1.4).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn printed_monodromy_at_three_fifths_root() {
        let cfg = LameConfig::default();
        let r = floquet_search(mu(0.4), FloquetRatio::new(3, 5).unwrap(), 1, &cfg).unwrap();
        let mm = r[0].monodromy.matrix();
        assert!((r[0].h - 0.667_442_77).abs() < 1e-6, "{}", r[0].h);
        assert!((mm.a + 0.309_017).abs() < 1e-5 && (mm.b + 0.331_386).abs() < 1e-5);
        assert!((mm.c - 2.729_47).abs() < 1e-4);
        assert_eq!(r[0].order, MonodromyOrder::Finite(10));
    }

    #[test]
    fn heun_matches_ode() {
        let m = mu(0.4);
        let h = 0.667_442_77;
        let k = ellip_k(m);
        let hf = HeunFundamental::new(m, h).unwrap();
        let grid: Vec<f64> = (0..=80).map(|i| -k + 4.0 * k * i as f64 / 80.0).collect();
        let ode = fundamental_ode(m, h, &grid, &OdeConfig::default()).unwrap();
        for (s, p) in grid.iter().zip(&ode.points) {
            let q = hf.eval(*s).unwrap();
            for (a, b) in [(p.cl, q.cl), (p.sl, q.sl), (p.dcl, q.dcl), (p.dsl, q.dsl)] {
                assert!((a - b).abs() < 1e-7, "s = {s}: {a} vs {b}");
            }
        }
        let mo = lame_monodromy(m, h).unwrap().matrix();
        assert!((mo - hf.monodromy()).max_norm() < 1e-8);
    }

    #[test]
    fn ratio_validation() {
        assert!(FloquetRatio::new(2, 4).is_err());
        assert!(FloquetRatio::new(3, 2).is_err());
        assert!(FloquetRatio::new(0, 1).is_ok());
        assert!(FloquetRatio::new(1, 1).is_ok());
    }
}
