//! Adaptive Dormand-Prince 8(5,3) integrator for small fixed-size systems.
//!
//! Steps are clipped so that every requested output node is hit exactly,
//! and an optional projection runs after each accepted step (used to keep
//! frames unimodular).

use crate::error::OdeError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-12, max_steps: 2_000_000 }
    }
}

const C: [f64; 13] = [
    0.0,
    0.0,
    5.260_015_195_876_773E-2,
    7.890_022_793_815_16E-2,
    1.183_503_419_072_274E-1,
    2.816_496_580_927_726E-1,
    3.333_333_333_333_333E-1,
    0.25E+00,
    3.076_923_076_923_077E-1,
    6.512_820_512_820_513E-1,
    0.6E+00,
    8.571_428_571_428_571E-1,
    1.0,
];

// rows indexed by stage 2..=12, columns by earlier stage 1..=11
const A: [[f64; 12]; 13] = {
    let mut a = [[0.0; 12]; 13];
    a[2][1] = 5.260_015_195_876_773E-2;
    a[3][1] = 1.972_505_698_453_79E-2;
    a[3][2] = 5.917_517_095_361_37E-2;
    a[4][1] = 2.958_758_547_680_685E-2;
    a[4][3] = 8.876_275_643_042_054E-2;
    a[5][1] = 2.413_651_341_592_667E-1;
    a[5][3] = -8.845_494_793_282_861E-1;
    a[5][4] = 9.248_340_032_617_92E-1;
    a[6][1] = 3.703_703_703_703_703_5E-2;
    a[6][4] = 1.708_286_087_294_738_6E-1;
    a[6][5] = 1.254_676_875_668_224_2E-1;
    a[7][1] = 3.7109375E-2;
    a[7][4] = 1.702_522_110_195_440_5E-1;
    a[7][5] = 6.021_653_898_045_596E-2;
    a[7][6] = -1.7578125E-2;
    a[8][1] = 3.709_200_011_850_479E-2;
    a[8][4] = 1.703_839_257_122_399_8E-1;
    a[8][5] = 1.072_620_304_463_732_8E-1;
    a[8][6] = -1.531_943_774_862_440_2E-2;
    a[8][7] = 8.273_789_163_814_023E-3;
    a[9][1] = 6.241_109_587_160_757E-1;
    a[9][4] = -3.360_892_629_446_941_4;
    a[9][5] = -8.682_193_468_417_26E-1;
    a[9][6] = 2.759_209_969_944_671E1;
    a[9][7] = 2.015_406_755_047_789_4E1;
    a[9][8] = -4.348_988_418_106_996E1;
    a[10][1] = 4.776_625_364_382_643_4E-1;
    a[10][4] = -2.488_114_619_971_667_7;
    a[10][5] = -5.902_908_268_368_43E-1;
    a[10][6] = 2.123_005_144_818_119_3E1;
    a[10][7] = 1.527_923_363_288_242_3E1;
    a[10][8] = -3.328_821_096_898_486E1;
    a[10][9] = -2.033_120_170_850_862_7E-2;
    a[11][1] = -9.371_424_300_859_873E-1;
    a[11][4] = 5.186_372_428_844_064;
    a[11][5] = 1.091_437_348_996_729_5;
    a[11][6] = -8.149_787_010_746_927;
    a[11][7] = -1.852_006_565_999_696E1;
    a[11][8] = 2.273_948_709_935_050_5E1;
    a[11][9] = 2.493_605_552_679_652_3;
    a[11][10] = -3.046_764_471_898_219_6;
    a[12][1] = 2.273_310_147_516_538;
    a[12][4] = -1.053_449_546_673_725E1;
    a[12][5] = -2.000_872_058_224_862_5;
    a[12][6] = -1.795_893_186_311_88E1;
    a[12][7] = 2.794_888_452_941_996E1;
    a[12][8] = -2.858_998_277_135_023_5;
    a[12][9] = -8.872_856_933_530_63;
    a[12][10] = 1.236_056_717_579_430_3E1;
    a[12][11] = 6.433_927_460_157_636E-1;
    a
};

const B: [f64; 13] = [
    0.0,
    5.429_373_411_656_876_5E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450_312_892_752_409,
    1.891_517_899_314_500_3,
    -5.801_203_960_010_585,
    3.111_643_669_578_199E-1,
    -1.521_609_496_625_161E-1,
    2.013_654_008_040_303_4E-1,
    4.471_061_572_777_259E-2,
];

const BHH: [f64; 3] = [2.440_944_881_889_764E-1, 7.338_466_882_816_118E-1, 2.205_882_352_941_176_6E-2];

const ER: [f64; 13] = [
    0.0,
    1.312_004_499_419_488E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.225_156_446_376_204_4,
    -4.957_589_496_572_502E-1,
    1.664_377_182_454_986_4,
    -3.503_288_487_499_736_6E-1,
    3.341_791_187_130_175E-1,
    8.192_320_648_511_571E-2,
    -2.235_530_786_388_629_4E-2,
];

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.333;
const FAC_MAX: f64 = 6.0;

fn weights<const N: usize>(y: &[f64; N], y_new: &[f64; N], cfg: &OdeConfig) -> [f64; N] {
    let mut sk = [0.0; N];
    for i in 0..N {
        sk[i] = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
    }
    sk
}

fn initial_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], k1: &[f64; N], dir: f64, span: f64, cfg: &OdeConfig) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let sk = weights(y, y, cfg);
    let norm = |v: &[f64; N]| (v.iter().zip(&sk).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = norm(y);
    let d1 = norm(k1);
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let mut y1 = [0.0; N];
    for i in 0..N {
        y1[i] = y[i] + dir * h0 * k1[i];
    }
    let f1 = f(t + dir * h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - k1[i];
    }
    let d2 = norm(&diff) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dm).powf(1.0 / 8.0) };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each
/// node. Nodes must be monotone and on one side of `t0`.
pub fn integrate<const N: usize, F, P>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    nodes: &[f64],
    cfg: &OdeConfig,
    mut project: P,
) -> Result<Vec<[f64; N]>, OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    P: FnMut(&mut [f64; N]),
{
    let mut out = Vec::with_capacity(nodes.len());
    let Some(&last) = nodes.last() else {
        return Ok(out);
    };
    let dir = if last >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; 13];
    k[1] = f(t, &y);
    let mut h = initial_step(&mut f, t, &y, &k[1], dir, (last - t0).abs().max(1e-300), cfg);
    let mut steps = 0usize;
    let mut rejected_last = false;

    for &node in nodes {
        if dir * (node - t) < 0.0 {
            return Err(OdeError::UnorderedNodes { t: node });
        }
        while dir * (node - t) > 0.0 {
            if steps >= cfg.max_steps {
                return Err(OdeError::MaxSteps { t });
            }
            steps += 1;
            let remaining = (node - t).abs();
            let mut hs = h.min(remaining);
            let landing = hs >= remaining * (1.0 - 1e-12);
            if landing {
                hs = remaining;
            }
            if hs < 1e-14 * t.abs().max(1.0) && !landing {
                return Err(OdeError::StepUnderflow { t });
            }
            let hh = dir * hs;

            for s in 2..=12 {
                let mut ys = y;
                for j in 1..s {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += hh * a * k[j][i];
                        }
                    }
                }
                k[s] = f(t + C[s] * hh, &ys);
            }
            let mut incr = [0.0; N];
            let mut y_new = y;
            for i in 0..N {
                let mut acc = 0.0;
                for s in 1..=12 {
                    acc += B[s] * k[s][i];
                }
                incr[i] = acc;
                y_new[i] = y[i] + hh * acc;
            }
            if y_new.iter().any(|v| !v.is_finite()) {
                return Err(OdeError::NonFinite { t });
            }
            let sk = weights(&y, &y_new, cfg);
            let mut err = 0.0;
            let mut err2 = 0.0;
            for i in 0..N {
                let e2 = incr[i] - BHH[0] * k[1][i] - BHH[1] * k[9][i] - BHH[2] * k[12][i];
                err2 += (e2 / sk[i]).powi(2);
                let mut e = 0.0;
                for s in 1..=12 {
                    e += ER[s] * k[s][i];
                }
                err += (e / sk[i]).powi(2);
            }
            let mut deno = err + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = hs * err * (1.0 / (deno * N as f64)).sqrt();
            let fac11 = err.powf(1.0 / 8.0);
            let fac = (fac11 / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            if err <= 1.0 {
                t = if landing { node } else { t + hh };
                y = y_new;
                project(&mut y);
                k[1] = f(t, &y);
                let mut h_new = hs / fac;
                if rejected_last {
                    h_new = h_new.min(hs);
                }
                rejected_last = false;
                // keep the step proposal when a landing step shortened it
                h = if landing { h_new.max(h) } else { h_new };
            } else {
                h = hs / (fac11 / SAFE).min(1.0 / FAC_MIN);
                rejected_last = true;
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Integrates from `t0` to a single end point.
pub fn integrate_to<const N: usize, F, P>(f: F, t0: f64, y0: [f64; N], t1: f64, cfg: &OdeConfig, project: P) -> Result<[f64; N], OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    P: FnMut(&mut [f64; N]),
{
    Ok(integrate(f, t0, y0, &[t1], cfg, project)?[0])
}

/// Splits a sorted grid around `t0` and integrates outward in both
/// directions, returning states aligned with `grid`.
pub fn integrate_grid<const N: usize, F, P>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    grid: &[f64],
    cfg: &OdeConfig,
    mut project: P,
) -> Result<Vec<[f64; N]>, OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    P: FnMut(&mut [f64; N]),
{
    let split = grid.partition_point(|&s| s < t0);
    let backward: Vec<f64> = grid[..split].iter().rev().copied().collect();
    let forward = &grid[split..];
    let mut back = integrate(&mut f, t0, y0, &backward, cfg, &mut project)?;
    back.reverse();
    let fwd = integrate(&mut f, t0, y0, forward, cfg, &mut project)?;
    back.extend(fwd);
    Ok(back)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_to_high_accuracy() {
        let cfg = OdeConfig::default();
        let nodes: Vec<f64> = (1..=20).map(|i| i as f64 * 0.5).collect();
        let out = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], &nodes, &cfg, |_| {}).unwrap();
        for (t, y) in nodes.iter().zip(&out) {
            assert!((y[0] - t.cos()).abs() < 1e-11);
            assert!((y[1] + t.sin()).abs() < 1e-11);
        }
    }

    #[test]
    fn backward_and_grid() {
        let cfg = OdeConfig::default();
        let grid = [-2.0, -1.0, 0.0, 0.5, 3.0];
        let out = integrate_grid(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], &grid, &cfg, |_| {}).unwrap();
        for (t, y) in grid.iter().zip(&out) {
            assert!((y[0] - t.exp()).abs() < 1e-11 * t.exp().max(1.0));
        }
    }

    #[test]
    fn step_budget_reported() {
        let cfg = OdeConfig { max_steps: 3, ..OdeConfig::default() };
        let r = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], &[100.0], &cfg, |_| {});
        assert!(matches!(r, Err(OdeError::MaxSteps { .. })));
    }
}
