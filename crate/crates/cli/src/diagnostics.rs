//! Invariant residuals of a sampled curve, as rows of (value, tolerance).

use std::fmt::Write as _;

use nullflow::kdvsol::StationaryBending;
use nullflow::nullcurve::{bending_oracle, cartan_frame, central_difference, curve_and_cousins, SpinorFramePath};
use serde_json::{json, Value};

use crate::export::{fmt17, num};

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub value: f64,
    pub tol: f64,
}

impl Row {
    pub fn new(name: &str, value: f64, tol: f64) -> Self {
        Self { name: name.to_string(), value, tol }
    }

    pub fn pass(&self) -> bool {
        self.value <= self.tol
    }

    pub fn to_json(&self) -> Value {
        json!({ "name": self.name, "value": num(self.value), "tol": num(self.tol), "pass": self.pass() })
    }
}

pub fn all_pass(rows: &[Row]) -> bool {
    rows.iter().all(Row::pass)
}

/// Fixed-width table, one row per line.
pub fn table(rows: &[Row]) -> String {
    let w = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut s = format!("{:<w$}  {:>24}  {:>24}  status\n", "check", "value", "tol");
    for r in rows {
        let _ = writeln!(s, "{:<w$}  {:>24}  {:>24}  {}", r.name, fmt17(r.value), fmt17(r.tol), if r.pass() { "ok" } else { "FAIL" });
    }
    s
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

/// Residuals of the null-curve invariants along `path`, sampled with
/// uniform step `ds`.
pub fn curve_rows(path: &SpinorFramePath, ds: f64) -> Vec<Row> {
    let gamma = path.gamma();
    let det = max_of(path.f_plus.iter().chain(&path.f_minus).map(|f| (f.matrix().det() - 1.0).abs()));
    let mut rows =
        vec![Row::new("det F - 1", det, 1e-9), Row::new("<g,g> + 1", max_of(gamma.iter().map(|g| (g.quad() + 1.0).abs())), 1e-8)];
    if let Ok(d1) = central_difference(&gamma, ds, 1) {
        rows.push(Row::new("<g',g'>", max_of(d1.iter().map(|g| g.quad().abs())), 1e-6));
    }
    if let Ok(d2) = central_difference(&gamma, ds, 2) {
        rows.push(Row::new("<g'',g''> - 4", max_of(d2.iter().map(|g| (g.quad() - 4.0).abs())), 1e-4));
    }
    rows.push(Row::new("cartan gram", cartan_frame(path).max_gram_defect(), 1e-6));
    let cc = curve_and_cousins(path);
    let det2 = |u: [f64; 2], v: [f64; 2]| u[0] * v[1] - u[1] * v[0];
    let cousin = max_of(
        (0..path.len())
            .flat_map(|i| [det2(cc.eta_plus[i], cc.eta_plus_prime[i]), det2(cc.eta_minus[i], cc.eta_minus_prime[i])])
            .map(|d| (d - 1.0).abs()),
    );
    rows.push(Row::new("cousins det - 1", cousin, 1e-6));
    let rebuilt = cc.rebuild();
    rows.push(Row::new("round trip", max_of(rebuilt.iter().zip(&gamma).map(|(a, b)| (a.0 - b.0).max_norm())), 1e-8));
    if let Ok(k) = bending_oracle(&gamma, ds) {
        rows.push(Row::new("bending oracle", max_of(k.iter().enumerate().map(|(i, k)| (k - path.kappa[i + 3]).abs())), 1e-3));
    }
    rows
}

/// |2 ell k' + k''' - 6 k k'| over the samples.
pub fn stationary_row(b: &StationaryBending, s: &[f64]) -> Row {
    let ell = b.ell();
    let r = max_of(s.iter().map(|&x| {
        let [k, k1, _, k3] = b.derivatives(x);
        (2.0 * ell * k1 + k3 - 6.0 * k * k1).abs()
    }));
    Row::new("stationary ODE", r, 1e-8)
}
