//! `check`: a fixed battery of reference computations, one row each.

use std::f64::consts::PI;

use nullflow::extended::kksh_flow_monodromy;
use nullflow::kdvsol::StationaryBending;
use nullflow::lame::{floquet_search, fundamental_ode, FloquetRatio, HeunFundamental, LameMethod, LamePoint};
use nullflow::nullcurve::{closed_constant, lien_evolve, stationary_curve, Spin};
use nullflow::specfun::{complete_elliptic, ellip_k, jacobi_sncndn};
use nullflow::{EllipticParameter, Unimodular2};
use num_rational::Rational64;
use serde_json::{json, Map};

use crate::config::RunConfig;
use crate::diagnostics::{all_pass, curve_rows, stationary_row, table, Row};
use crate::error::CliError;
use crate::export::{linspace, Meta, Sink};
use crate::recipes::{hierarchy_rows, Outcome, DRIFT_GATE};

/// Parameter of the monodromy-preservation row.
pub const KKSH_MU: f64 = 0.61500934;
/// Times of the monodromy-preservation row.
pub const KKSH_TIMES: [f64; 4] = [0.0, 0.537285, 1.07457, 1.611855];

fn worst(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

/// A row from a fallible computation; errors read as NaN, which fails.
fn row(name: &str, tol: f64, value: Result<f64, CliError>) -> Row {
    Row::new(name, value.unwrap_or(f64::NAN), tol)
}

fn mu(x: f64) -> Result<EllipticParameter, CliError> {
    Ok(EllipticParameter::new(x)?)
}

fn elliptic_rows() -> Vec<Row> {
    let (mut pyth, mut legendre) = (0.0f64, 0.0f64);
    for m in linspace(0.05, 0.95, 19) {
        let p = EllipticParameter::new(m).expect("grid inside (0, 1)");
        for s in linspace(-6.0, 6.0, 49) {
            let j = jacobi_sncndn(s, p);
            pyth = pyth.max((j.sn * j.sn + j.cn * j.cn - 1.0).abs()).max((j.dn * j.dn + m * j.sn * j.sn - 1.0).abs());
        }
        let (k, e) = complete_elliptic(p);
        let (kc, ec) = complete_elliptic(p.complement());
        legendre = legendre.max((e * kc + ec * k - k * kc - PI / 2.0).abs());
    }
    vec![Row::new("sn^2 + cn^2, dn^2 + mu sn^2", pyth, 1e-12), Row::new("Legendre relation", legendre, 1e-10)]
}

fn point_gap(a: &LamePoint, b: &LamePoint) -> f64 {
    worst([a.cl - b.cl, a.sl - b.sl, a.dcl - b.dcl, a.dsl - b.dsl].map(f64::abs))
}

fn heun_gap(cfg: &RunConfig) -> Result<f64, CliError> {
    let m = mu(0.4)?;
    let k = ellip_k(m);
    let grid = linspace(-k, 3.0 * k, 401);
    let heun = HeunFundamental::new(m, 0.67)?.path(&grid)?;
    let ode = fundamental_ode(m, 0.67, &grid, &cfg.ode())?;
    Ok(worst(heun.points.iter().zip(&ode.points).map(|(a, b)| point_gap(a, b))))
}

fn floquet_gap(cfg: &RunConfig) -> Result<f64, CliError> {
    let r = floquet_search(mu(0.9)?, FloquetRatio::new(2, 5)?, 2, &cfg.lame())?;
    Ok((r[0].h - 0.93).abs().max((r[1].h - 2.23).abs()))
}

fn stationary_rows(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let b = StationaryBending::new(mu(0.9)?, 0.93, 2.23)?;
    let ds = 0.005;
    let n = (2.0 * b.period() / ds).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * ds).collect();
    let path = stationary_curve(&b, &grid, LameMethod::Ode, &cfg.ode())?;
    let mut rows: Vec<Row> = curve_rows(&path, ds).into_iter().map(|r| Row { name: format!("stationary {}", r.name), ..r }).collect();
    rows.push(stationary_row(&b, &grid));
    Ok(rows)
}

fn constant_ok() -> Result<f64, CliError> {
    let c = closed_constant(7, 3)?;
    Ok(if c.kappa == Rational64::new(-29, 20) && c.spin == Spin::Half { 0.0 } else { 1.0 })
}

fn lien_drift(cfg: &RunConfig) -> Result<f64, CliError> {
    let b = StationaryBending::new(mu(0.9)?, 0.93, 2.23)?;
    let rho = b.period();
    let grid = linspace(0.0, rho, 121);
    let times = linspace(0.0, 0.5, 11);
    let paths = lien_evolve(&b, &grid, &times, (Unimodular2::IDENTITY, Unimodular2::IDENTITY), &cfg.lien())?;
    let (p0, m0) = paths[0].monodromy(rho)?;
    let mut d = 0.0f64;
    for p in &paths {
        let (a, b) = p.monodromy(rho)?;
        d = d.max((a.matrix() - p0.matrix()).max_norm()).max((b.matrix() - m0.matrix()).max_norm());
    }
    Ok(d)
}

fn kksh_drift() -> Result<f64, CliError> {
    let flows = kksh_flow_monodromy(mu(KKSH_MU)?, 1, 6, 2.0, &KKSH_TIMES)?;
    Ok(worst(flows.iter().map(|f| (f.m_plus - flows[0].m_plus).max_norm().max((f.m_minus - flows[0].m_minus).max_norm()))))
}

/// Every row of the battery.
pub fn rows(cfg: &RunConfig) -> Vec<Row> {
    let mut rows = match hierarchy_rows(3) {
        Ok(r) => r,
        Err(e) => vec![row("hierarchy identities", 0.0, Err(e))],
    };
    rows.extend(elliptic_rows());
    rows.push(row("Heun vs ODE (0.4, 0.67)", 1e-5, heun_gap(cfg)));
    rows.push(row("Floquet (0.9, 2/5) vs 0.93, 2.23", 1e-2, floquet_gap(cfg)));
    match stationary_rows(cfg) {
        Ok(r) => rows.extend(r),
        Err(e) => rows.push(row("stationary invariants", 0.0, Err(e))),
    }
    rows.push(row("kappa_7,3 = -29/20, spin 1/2", 0.0, constant_ok()));
    rows.push(row("LIEN drift, stationary", DRIFT_GATE, lien_drift(cfg)));
    rows.push(row("monodromy preservation, KKSH (1,6)", DRIFT_GATE, kksh_drift()));
    rows
}

pub fn check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = rows(cfg);
    let meta = Meta::new("check", cfg.digest());
    let mut sink = Sink::new(&cfg.out_dir)?;
    let mut body = Map::new();
    body.insert("checks".into(), json!(rows.iter().map(Row::to_json).collect::<Vec<_>>()));
    body.insert("pass".into(), json!(all_pass(&rows)));
    sink.json("check.json", &meta, body)?;
    let t = table(&rows);
    if !all_pass(&rows) {
        return Err(CliError::Diagnostics(t));
    }
    Ok(Outcome { summary: t, files: sink.written().to_vec() })
}
