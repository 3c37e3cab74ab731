//! The subcommands other than `check`. Each writes its files through a
//! [`Sink`] and returns a short summary for stdout.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use nullflow::extended::kksh_flow_monodromy;
use nullflow::jetalg::{
    hamiltonian_density, in_lie_algebra, lenard_p, lien_coefficients, lien_kdv_velocity, lien_matrix_polys, lien_velocity, script_d,
    zero_curvature_check,
};
use nullflow::kdvsol::{KkshSpec, StationaryBending};
use nullflow::lame::{floquet_search, tau, FloquetRatio, LameMethod, MonodromyOrder};
use nullflow::nullcurve::{
    classify_monodromies, closed_constant, constant_bending_frames, integrate_spinor_frames, kksh_monodromy, kksh_mu_star,
    stationary_curve, stationary_evolution, ConstantCase, OrbitClassification, SpinorFramePath,
};
use nullflow::{EllipticParameter, Mat2, Unimodular2};
use num_integer::Integer;
use num_rational::Rational64;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::diagnostics::{all_pass, curve_rows, stationary_row, table, Row};
use crate::error::CliError;
use crate::export::{fmt17, linspace, num, nums, table_csv, write_curve_set, CurveSamples, Meta, Sink};

/// Largest hierarchy order the symbolic recipe accepts.
pub const MAX_HIERARCHY: usize = 8;

/// Gate on the relative KdV and mKdV residuals of a KKSH bending.
pub const KKSH_RESIDUAL_GATE: f64 = 1e-4;

/// Gate on max |M+-(t) - M+-(0)| along the flow.
pub const DRIFT_GATE: f64 = 1e-4;

/// Upper bound on samples per exported curve.
const MAX_SAMPLES: usize = 200_000;

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn new(summary: String, sink: &Sink) -> Self {
        Self { summary, files: sink.written().to_vec() }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parameter(mu: f64) -> Result<EllipticParameter, CliError> {
    EllipticParameter::new(mu).map_err(|e| usage(e.to_string()))
}

fn check_times(ts: &[f64]) -> Result<(), CliError> {
    if ts.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(usage("times must be finite and nonnegative"));
    }
    Ok(())
}

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn orbit_json(o: &OrbitClassification) -> Value {
    let factor = |f: &nullflow::nullcurve::FactorOrbit| {
        json!({
            "type": f.kind.letter().to_string(),
            "invariant": num(f.invariant),
            "theta": f.theta.map_or(Value::Null, num),
            "q": f.q.map_or(Value::Null, |q| json!(q.to_string())),
        })
    };
    json!({
        "tag": o.tag(),
        "plus": factor(&o.plus),
        "minus": factor(&o.minus),
        "closed": o.closed,
        "least_period": o.least_period.map_or(Value::Null, num),
        "frame_period": o.frame_period.map_or(Value::Null, num),
        "spin": o.spin.map_or(Value::Null, |s| json!(s.to_string())),
    })
}

fn uniform_grid(start: f64, span: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| start + span * i as f64 / n as f64).collect()
}

/// Samples for `span` at `points_per_period` per `unit`.
fn sample_count(cfg: &RunConfig, span: f64, unit: f64) -> Result<usize, CliError> {
    let n = (cfg.points_per_period as f64 * (span / unit).max(1.0)).ceil();
    if !(n <= MAX_SAMPLES as f64) {
        return Err(usage(format!("{n} samples exceed the limit {MAX_SAMPLES}; lower points_per_period or the span")));
    }
    Ok(n as usize)
}

fn rows_json(rows: &[Row]) -> Value {
    Value::Array(rows.iter().map(Row::to_json).collect())
}

// ---------------------------------------------------------------- hierarchy

pub fn hierarchy(cfg: &RunConfig, n_max: usize, lien: bool, verify: bool) -> Result<Outcome, CliError> {
    if n_max > MAX_HIERARCHY {
        return Err(usage(format!("n_max = {n_max} exceeds {MAX_HIERARCHY}")));
    }
    let meta = Meta::new("hierarchy", cfg.digest()).with("n_max", json!(n_max)).with("lien", json!(lien));
    let mut text = meta.comment_block();
    let mut entries = Vec::new();
    for n in 0..=n_max {
        let p = lenard_p(n)?;
        let h = hamiltonian_density(n)?;
        let c = lien_coefficients(n)?;
        let _ = writeln!(text, "\np_{n} = {p}\nh_{n} = {h}\na_{n} = {}\nb_{n} = {}", c.a, c.b);
        let mut e = Map::new();
        e.insert("n".into(), json!(n));
        e.insert("p".into(), json!(p.to_string()));
        e.insert("h".into(), json!(h.to_string()));
        e.insert("a".into(), json!(c.a.to_string()));
        e.insert("b".into(), json!(c.b.to_string()));
        if lien {
            let v = lien_velocity(n)?;
            let ut = lien_kdv_velocity(n)?;
            let _ = writeln!(
                text,
                "r_{n} = {}\nq_{n} = {}\nT_{n} = {}\nN_{n} = {}\nB_{n} = {}\nu_t = {ut}",
                c.r, c.q, v.tangent, v.normal, v.binormal
            );
            e.insert("r".into(), json!(c.r.to_string()));
            e.insert("q".into(), json!(c.q.to_string()));
            e.insert(
                "velocity".into(),
                json!({
                    "tangent": v.tangent.to_string(),
                    "normal": v.normal.to_string(),
                    "binormal": v.binormal.to_string(),
                }),
            );
            e.insert("u_t".into(), json!(ut.to_string()));
        }
        entries.push(Value::Object(e));
    }
    let mut sink = Sink::new(&cfg.out_dir)?;
    sink.write("hierarchy.txt", &text)?;
    let mut body = Map::new();
    body.insert("orders".into(), Value::Array(entries));
    let rows = if verify { hierarchy_rows(n_max)? } else { Vec::new() };
    if verify {
        body.insert("checks".into(), rows_json(&rows));
    }
    sink.json("hierarchy.json", &meta, body)?;
    let mut summary = format!("hierarchy up to n = {n_max}\n");
    if verify {
        summary.push_str(&table(&rows));
        if !all_pass(&rows) {
            return Err(CliError::Numeric(format!("hierarchy identities fail\n{}", table(&rows))));
        }
    }
    Ok(Outcome::new(summary, &sink))
}

/// Exact identities of the hierarchy up to `n_max`, as 0 (holds) or 1.
pub fn hierarchy_rows(n_max: usize) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for n in 0..=n_max {
        rows.push(Row::new(&format!("E(h_{n}) = p_{n}"), flag(hamiltonian_density(n)?.euler() == lenard_p(n)?), 0.0));
    }
    for n in 2..=n_max {
        let ok = lenard_p(n)?.total_derivative() == script_d(&lenard_p(n - 1)?);
        rows.push(Row::new(&format!("D p_{n} = S p_{}", n - 1), flag(ok), 0.0));
    }
    for n in 0..=n_max.min(3) {
        let (_, p) = lien_matrix_polys(n)?;
        rows.push(Row::new(&format!("P_{n} in the Lie algebra"), flag(in_lie_algebra(&p)), 0.0));
        rows.push(Row::new(&format!("zero curvature n = {n}"), flag(zero_curvature_check(n)?.is_zero()), 0.0));
    }
    Ok(rows)
}

// ---------------------------------------------------------------- floquet

pub fn floquet(cfg: &RunConfig, mu: f64, q: FloquetRatio, count: usize) -> Result<Outcome, CliError> {
    if count == 0 {
        return Err(usage("count must be at least 1"));
    }
    let m = parameter(mu)?;
    let recs = floquet_search(m, q, count, &cfg.lame())?;
    let meta = Meta::new("floquet", cfg.digest())
        .with("mu", num(mu))
        .with("q", json!(format!("{}/{}", q.num(), q.den())))
        .with("count", json!(count));
    let order = |o: MonodromyOrder| match o {
        MonodromyOrder::Finite(n) => n.to_string(),
        MonodromyOrder::Unbounded => "unbounded".into(),
    };
    let rows: Vec<Vec<String>> = recs
        .iter()
        .map(|r| {
            let a = r.monodromy.matrix().to_array();
            let mut row = vec![r.index.to_string(), fmt17(r.h), fmt17(r.half_trace()), order(r.order)];
            row.extend(a.iter().map(|x| fmt17(*x)));
            row
        })
        .collect();
    let mut sink = Sink::new(&cfg.out_dir)?;
    sink.write("floquet_spectrum.csv", &table_csv(&meta, "index,h,tau,order,m11,m12,m21,m22", &rows))?;
    let mut body = Map::new();
    body.insert(
        "eigenvalues".into(),
        Value::Array(
            recs.iter()
                .map(|r| {
                    json!({
                        "index": r.index,
                        "h": num(r.h),
                        "tau": num(r.half_trace()),
                        "order": order(r.order),
                        "monodromy": nums(&r.monodromy.matrix().to_array()),
                    })
                })
                .collect(),
        ),
    );
    sink.json("floquet_spectrum.json", &meta, body)?;

    // tau(h) on [0, 1.25 h_last] for plotting
    let top = 1.25 * recs.last().map_or(1.0, |r| r.h).max(1.0);
    let hs = linspace(0.0, top, cfg.points_per_period);
    let curve = hs.iter().map(|&h| Ok(vec![fmt17(h), fmt17(tau(m, h)?)])).collect::<Result<Vec<_>, CliError>>()?;
    sink.write("floquet_tau.csv", &table_csv(&meta, "h,tau", &curve))?;

    let mut summary = format!("mu = {mu}, q = {}/{}\n", q.num(), q.den());
    for r in &recs {
        let _ = writeln!(summary, "  h_{} = {}  tau = {}  order {}", r.index, fmt17(r.h), fmt17(r.half_trace()), order(r.order));
    }
    Ok(Outcome::new(summary, &sink))
}

// ---------------------------------------------------------------- stationary

#[derive(Debug, Clone)]
pub struct StationaryArgs {
    pub mu: f64,
    pub q_plus: FloquetRatio,
    pub q_minus: FloquetRatio,
    /// 1-based eigenvalue indices (i+, i-).
    pub indices: (usize, usize),
    pub times: Vec<f64>,
    pub method: LameMethod,
}

pub fn stationary(cfg: &RunConfig, a: &StationaryArgs) -> Result<Outcome, CliError> {
    let (ip, im) = a.indices;
    if ip == 0 || im == 0 {
        return Err(usage("indices are 1-based"));
    }
    check_times(&a.times)?;
    let mu = parameter(a.mu)?;
    let lame = cfg.lame();
    let h_plus = floquet_search(mu, a.q_plus, ip, &lame)?[ip - 1].h;
    let h_minus = floquet_search(mu, a.q_minus, im, &lame)?[im - 1].h;
    if !(h_plus < h_minus) {
        return Err(usage(format!("need h+ < h-, got h+ = {h_plus} and h- = {h_minus}")));
    }
    let b = StationaryBending::new(mu, h_plus, h_minus)?;
    let rho = b.period();
    let ode = cfg.ode();
    let one = stationary_curve(&b, &[0.0, rho], a.method, &ode)?;
    let (mp, mm) = one.monodromy(rho)?;
    let orbit = classify_monodromies(mp, mm, rho, &cfg.orbit());
    let span = match orbit.least_period {
        Some(p) if p <= 64.0 * rho => p,
        _ => 2.0 * rho,
    };
    let n = sample_count(cfg, span, rho)?;
    let ds = span / n as f64;
    let grid = uniform_grid(0.0, span, n);
    let path = stationary_curve(&b, &grid, a.method, &ode)?;

    let method = match a.method {
        LameMethod::Heun => "heun",
        LameMethod::Ode => "ode",
    };
    let meta = Meta::new("stationary", cfg.digest())
        .with("mu", num(a.mu))
        .with("q_plus", json!(format!("{}/{}", a.q_plus.num(), a.q_plus.den())))
        .with("q_minus", json!(format!("{}/{}", a.q_minus.num(), a.q_minus.den())))
        .with("indices", json!([ip, im]))
        .with("method", json!(method))
        .with("h_plus", num(h_plus))
        .with("h_minus", num(h_minus))
        .with("ell", num(b.ell()))
        .with("period", num(rho))
        .with("orbit", json!(orbit.tag()))
        .with("closed", json!(orbit.closed))
        .with("spin", orbit.spin.map_or(Value::Null, |s| json!(s.to_string())))
        .with("s_span", num(span));

    let mut rows = curve_rows(&path, ds);
    rows.push(stationary_row(&b, &grid));
    let mut sink = Sink::new(&cfg.out_dir)?;
    write_curve_set(&mut sink, "stationary_curve", &meta.clone().with("t", num(0.0)), &CurveSamples::from(&path))?;
    let mut body = Map::new();
    body.insert("orbit".into(), orbit_json(&orbit));
    body.insert("monodromy_plus".into(), nums(&mp.matrix().to_array()));
    body.insert("monodromy_minus".into(), nums(&mm.matrix().to_array()));
    body.insert("checks".into(), rows_json(&rows));
    sink.json("stationary_diagnostics.json", &meta, body)?;

    let ev = stationary_evolution(&b);
    for (k, &t) in a.times.iter().enumerate() {
        let shifted: Vec<f64> = grid.iter().map(|s| s + 2.0 * b.ell() * t).collect();
        let base = stationary_curve(&b, &shifted, a.method, &ode)?;
        let moved = ev.evolve(&base, t);
        write_curve_set(&mut sink, &format!("stationary_t{k}"), &meta.clone().with("t", num(t)), &CurveSamples::from(&moved))?;
    }

    let summary = format!(
        "h+ = {}, h- = {}, ell = {}, period = {}, orbit {}{}\n{}",
        fmt17(h_plus),
        fmt17(h_minus),
        fmt17(b.ell()),
        fmt17(rho),
        orbit.tag(),
        if orbit.closed { ", closed" } else { "" },
        table(&rows)
    );
    if !all_pass(&rows) {
        return Err(CliError::Diagnostics(table(&rows)));
    }
    Ok(Outcome::new(summary, &sink))
}

// ---------------------------------------------------------------- constant

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstantChoice {
    /// The closed curve with quantum numbers (m, n).
    Pair(i64, i64),
    Kappa(f64),
}

pub fn constant(cfg: &RunConfig, choice: ConstantChoice, s_span: Option<f64>) -> Result<Outcome, CliError> {
    if let Some(s) = s_span {
        if !(s.is_finite() && s > 0.0) {
            return Err(usage("s_span must be positive"));
        }
    }
    let mut meta = Meta::new("constant", cfg.digest());
    let mut body = Map::new();
    let (k, rho) = match choice {
        ConstantChoice::Pair(m, n) => {
            let cc = closed_constant(m, n).map_err(|e| usage(e.to_string()))?;
            let k = *cc.kappa.numer() as f64 / *cc.kappa.denom() as f64;
            let rho = PI / (n as f64 * cc.frequencies().0);
            meta.push("m", json!(m));
            meta.push("n", json!(n));
            meta.push("kappa_exact", json!(cc.kappa.to_string()));
            body.insert("knot".into(), json!([cc.knot.0, cc.knot.1]));
            body.insert("spin_closed_form".into(), json!(cc.spin.to_string()));
            (k, rho)
        }
        ConstantChoice::Kappa(k) => {
            if !k.is_finite() {
                return Err(usage("kappa must be finite"));
            }
            (k, s_span.unwrap_or(2.0 * PI))
        }
    };
    let case = ConstantCase::of(k);
    let (mp, mm) = constant_bending_frames(k, rho);
    let orbit = classify_monodromies(mp, mm, rho, &cfg.orbit());
    let span = s_span.or(orbit.frame_period).unwrap_or(rho);
    let (wp, wm) = ((k + 1.0).abs().sqrt(), (k - 1.0).abs().sqrt());
    let unit = 2.0 * PI / wp.max(wm);
    let n = sample_count(cfg, span, unit)?;
    let grid = uniform_grid(0.0, span, n);
    let frames: Vec<_> = grid.iter().map(|&s| constant_bending_frames(k, s)).collect();
    let path = SpinorFramePath {
        s: grid.clone(),
        t: 0.0,
        f_plus: frames.iter().map(|f| f.0).collect(),
        f_minus: frames.iter().map(|f| f.1).collect(),
        kappa: vec![k; grid.len()],
    };
    meta.push("kappa", num(k));
    meta.push("case", json!(case.number()));
    meta.push("case_tag", json!(case.tag()));
    meta.push("rho", num(rho));
    meta.push("s_span", num(span));
    body.insert("case".into(), json!(case.number()));
    body.insert("case_tag".into(), json!(case.tag()));
    body.insert("orbit".into(), orbit_json(&orbit));
    body.insert("monodromy_plus".into(), nums(&mp.matrix().to_array()));
    body.insert("monodromy_minus".into(), nums(&mm.matrix().to_array()));
    if case == ConstantCase::ParabolicElliptic {
        body.insert("ideal_limit".into(), json!("F+ is unipotent: as s grows the curve tends to a null curve on the ideal boundary"));
    }
    let rows = curve_rows(&path, span / n as f64);
    body.insert("checks".into(), rows_json(&rows));

    let mut sink = Sink::new(&cfg.out_dir)?;
    write_curve_set(&mut sink, "constant_curve", &meta, &CurveSamples::from(&path))?;
    sink.json("constant_classification.json", &meta, body)?;
    let summary = format!(
        "kappa = {}, case {} {}, orbit {}{}{}\n",
        fmt17(k),
        case.number(),
        case.tag(),
        orbit.tag(),
        if orbit.closed { ", closed" } else { "" },
        orbit.spin.map_or(String::new(), |s| format!(", spin {s}"))
    );
    Ok(Outcome::new(summary, &sink))
}

// ---------------------------------------------------------------- kksh

#[derive(Debug, Clone)]
pub enum MuChoice {
    Given(f64),
    /// Solve the phase condition of M- for this q.
    PhaseCondition(Rational64),
}

#[derive(Debug, Clone)]
pub struct KkshArgs {
    pub m: u32,
    pub n: u32,
    pub h: f64,
    pub mu: MuChoice,
    pub times: Vec<f64>,
    /// s-periods per snapshot.
    pub periods: u32,
}

fn relative(residual: f64, terms: &[f64]) -> f64 {
    residual.abs() / (1.0 + terms.iter().map(|x| x.abs()).sum::<f64>())
}

/// Largest relative KdV and mKdV residuals over 32 s-samples per time.
pub fn kksh_residuals(spec: &KkshSpec, rho: f64, times: &[f64]) -> (f64, f64) {
    use nullflow::kdvsol::BendingField;
    let (mut kdv, mut mkdv) = (0.0f64, 0.0f64);
    for &t in times {
        for s in linspace(0.0, rho, 32) {
            let j = spec.jet(s, t);
            kdv = kdv.max(relative(j.kdv_residual(), &[j.kt, j.ksss, 6.0 * j.k * j.ks]));
            let [u, us, _, usss, ut] = spec.u_jet(s, t);
            mkdv = mkdv.max(relative(ut - 6.0 * u * u * us + usss, &[ut, 6.0 * u * u * us, usss]));
        }
    }
    (kdv, mkdv)
}

/// The larger eigenvalue of a hyperbolic factor.
fn zeta1(m: Unimodular2) -> Option<f64> {
    let half = m.half_trace();
    (half.abs() > 1.0).then(|| {
        let r = (half * half - 1.0).sqrt();
        if half > 0.0 {
            half + r
        } else {
            half - r
        }
    })
}

pub fn kksh(cfg: &RunConfig, a: &KkshArgs) -> Result<Outcome, CliError> {
    if a.n == 0 || a.m == 0 || a.m.gcd(&a.n) != 1 {
        return Err(usage(format!("(m, n) = ({}, {}) must be coprime positive integers", a.m, a.n)));
    }
    if !(a.h.is_finite() && a.h > 0.0) {
        return Err(usage("h must be positive"));
    }
    if a.periods == 0 {
        return Err(usage("periods must be at least 1"));
    }
    check_times(&a.times)?;
    let (mu, mu_source) = match &a.mu {
        MuChoice::Given(x) => (*x, "given".to_string()),
        MuChoice::PhaseCondition(q) => (kksh_mu_star(a.m, a.n, a.h, *q, &cfg.mu_star())?, format!("phase condition q = {q}")),
    };
    let spec = KkshSpec::with_quantum_numbers(parameter(mu)?, a.m, a.n, a.h)?;
    let (mp, mm, rho) = kksh_monodromy(&spec, &cfg.ode())?;
    let orbit = classify_monodromies(mp, mm, rho, &cfg.orbit());
    let (v1, v2) = spec.velocities();

    let mut times = vec![0.0];
    times.extend(a.times.iter().copied().filter(|t| *t > 0.0));
    times.sort_by(f64::total_cmp);
    times.dedup();
    let (kdv, mkdv) = kksh_residuals(&spec, rho, &times);
    let flows = kksh_flow_monodromy(spec.mu(), a.m, a.n, a.h, &times)?;
    let (p0, m0) = (flows[0].m_plus, flows[0].m_minus);
    let drift = |f: &nullflow::extended::FlowMonodromy| ((f.m_plus - p0).max_norm(), (f.m_minus - m0).max_norm());
    let (dp, dm) = flows.iter().map(drift).fold((0.0f64, 0.0f64), |acc, d| (acc.0.max(d.0), acc.1.max(d.1)));
    let rows = vec![
        Row::new("KdV residual (relative)", kdv, KKSH_RESIDUAL_GATE),
        Row::new("mKdV residual (relative)", mkdv, KKSH_RESIDUAL_GATE),
        Row::new("monodromy drift +", dp, DRIFT_GATE),
        Row::new("monodromy drift -", dm, DRIFT_GATE),
    ];

    let meta = Meta::new("kksh", cfg.digest())
        .with("m", json!(a.m))
        .with("n", json!(a.n))
        .with("h", num(a.h))
        .with("mu", num(mu))
        .with("mu_source", json!(mu_source))
        .with("tau", num(spec.tau().get()))
        .with("rho", num(rho))
        .with("velocities", nums(&[v1, v2]))
        .with("orbit", json!(orbit.tag()))
        .with("invariant_plus", num(orbit.plus.invariant))
        .with("invariant_minus", num(orbit.minus.invariant))
        .with("zeta1", zeta1(mp).map_or(Value::Null, num));

    let mut sink = Sink::new(&cfg.out_dir)?;
    let drift_rows: Vec<Vec<String>> = flows
        .iter()
        .map(|f| {
            let (x, y) = drift(f);
            let mut r = vec![fmt17(f.t), fmt17(x), fmt17(y), fmt17(f.anchor_norms.0), fmt17(f.anchor_norms.1)];
            r.extend(f.m_plus.to_array().iter().chain(f.m_minus.to_array().iter()).map(|v| fmt17(*v)));
            r
        })
        .collect();
    let header = "t,drift_plus,drift_minus,anchor_norm_plus,anchor_norm_minus,mp11,mp12,mp21,mp22,mm11,mm12,mm21,mm22";
    sink.write("kksh_drift.csv", &table_csv(&meta, header, &drift_rows))?;

    // snapshots: F+-(s, t) = A+-(t) G+-(s, t), G from Id at s = 0
    let span = a.periods as f64 * rho;
    let n = sample_count(cfg, span, rho)?;
    let grid = uniform_grid(0.0, span, n);
    for (k, &t) in a.times.iter().enumerate() {
        let f = flows.iter().find(|f| f.t == t).unwrap_or(&flows[0]);
        let kappa = |s: f64| spec.kappa(s, t);
        let g = integrate_spinor_frames(&kappa, &grid, 0.0, Unimodular2::IDENTITY, Unimodular2::IDENTITY, &cfg.ode())?;
        let lift = |anchor: Mat2, frames: &[Unimodular2]| -> Vec<Mat2> { frames.iter().map(|x| anchor * x.matrix()).collect() };
        let c = CurveSamples::from_frames(t, grid.clone(), &lift(f.anchors.0, &g.f_plus), &lift(f.anchors.1, &g.f_minus));
        write_curve_set(&mut sink, &format!("kksh_t{k}"), &meta.clone().with("t", num(t)), &c)?;
    }

    let inv_rows: Vec<Vec<String>> = linspace(0.15, 0.87, 10)
        .into_iter()
        .map(|x| {
            let row = EllipticParameter::new(x)
                .map_err(CliError::from)
                .and_then(|p| Ok(KkshSpec::with_quantum_numbers(p, a.m, a.n, a.h)?))
                .and_then(|s| Ok(kksh_monodromy(&s, &cfg.ode())?));
            match row {
                Ok((p, m, r)) => {
                    let o = classify_monodromies(p, m, r, &cfg.orbit());
                    vec![fmt17(x), fmt17(r), fmt17(o.plus.invariant), fmt17(o.minus.invariant), o.tag()]
                }
                Err(_) => vec![fmt17(x), "nan".into(), "nan".into(), "nan".into(), "-".into()],
            }
        })
        .collect();
    sink.write("kksh_invariants.csv", &table_csv(&meta, "mu,rho,invariant_plus,invariant_minus,orbit", &inv_rows))?;

    let mut body = Map::new();
    body.insert("orbit".into(), orbit_json(&orbit));
    body.insert("monodromy_plus".into(), nums(&mp.matrix().to_array()));
    body.insert("monodromy_minus".into(), nums(&mm.matrix().to_array()));
    body.insert("checks".into(), rows_json(&rows));
    sink.json("kksh_summary.json", &meta, body)?;

    let summary = format!(
        "mu = {} ({mu_source}), rho = {}, orbit {}, I+ = {}, I- = {}\n{}",
        fmt17(mu),
        fmt17(rho),
        orbit.tag(),
        fmt17(orbit.plus.invariant),
        fmt17(orbit.minus.invariant),
        table(&rows)
    );
    if !all_pass(&rows) {
        return Err(CliError::Diagnostics(table(&rows)));
    }
    Ok(Outcome::new(summary, &sink))
}
