//! File writers. Every file starts with the same metadata: tool, recipe,
//! config digest and the command parameters. Reals use 17 significant
//! digits so they read back to the same double.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nullflow::nullcurve::{curve_and_cousins, torical_embed_matrix, SpinorFramePath};
use nullflow::Mat2;
use serde_json::{json, Map, Number, Value};

use crate::error::CliError;

pub const TOOL: &str = "ads-null-flows";

/// `x` with 17 significant digits, or "nan"/"inf"/"-inf".
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON number carrying exactly [`fmt17`]'s digits; null when not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt17(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

#[derive(Debug, Clone)]
pub struct Meta {
    pub recipe: &'static str,
    pub digest: String,
    /// Ordered (key, value) pairs: command parameters and results.
    pub fields: Vec<(String, Value)>,
}

impl Meta {
    pub fn new(recipe: &'static str, digest: String) -> Self {
        Self { recipe, digest, fields: Vec::new() }
    }

    pub fn with(mut self, key: &str, v: Value) -> Self {
        self.push(key, v);
        self
    }

    pub fn push(&mut self, key: &str, v: Value) {
        if let Some(slot) = self.fields.iter_mut().find(|(k, _)| k == key) {
            slot.1 = v;
        } else {
            self.fields.push((key.to_string(), v));
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("tool".into(), json!(TOOL));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("recipe".into(), json!(self.recipe));
        m.insert("config_digest".into(), json!(self.digest));
        for (k, v) in &self.fields {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }

    /// The metadata as `# key: value` comment lines.
    pub fn comment_block(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# tool: {TOOL} {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# recipe: {}", self.recipe);
        let _ = writeln!(s, "# config_digest: {}", self.digest);
        for (k, v) in &self.fields {
            let text = match v {
                Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(s, "# {k}: {text}");
        }
        s
    }
}

/// Creates the output directory and writes files into it.
#[derive(Debug, Clone)]
pub struct Sink {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn json(&mut self, name: &str, meta: &Meta, body: Map<String, Value>) -> Result<PathBuf, CliError> {
        let mut doc = Map::new();
        doc.insert("meta".into(), meta.to_json());
        doc.extend(body);
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json values serialize");
        text.push('\n');
        self.write(name, &text)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// A sampled curve ready for export: gamma and the cousins (first columns
/// of F+-) at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSamples {
    pub t: f64,
    pub s: Vec<f64>,
    pub gamma: Vec<Mat2>,
    pub eta_plus: Vec<[f64; 2]>,
    pub eta_minus: Vec<[f64; 2]>,
}

impl CurveSamples {
    /// Samples of F+ F-^{-1} from raw frames. The frames need not be
    /// unimodular to rounding, which happens once their entries are large.
    pub fn from_frames(t: f64, s: Vec<f64>, f_plus: &[Mat2], f_minus: &[Mat2]) -> Self {
        let col = |m: &Mat2| [m.a, m.c];
        Self {
            t,
            gamma: f_plus.iter().zip(f_minus).map(|(p, m)| *p * m.adjugate()).collect(),
            eta_plus: f_plus.iter().map(col).collect(),
            eta_minus: f_minus.iter().map(col).collect(),
            s,
        }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn torical_points(&self) -> Vec<[f64; 3]> {
        self.gamma.iter().map(|g| torical_embed_matrix(*g)).collect()
    }
}

impl From<&SpinorFramePath> for CurveSamples {
    fn from(path: &SpinorFramePath) -> Self {
        let cc = curve_and_cousins(path);
        Self { t: path.t, s: path.s.clone(), gamma: cc.gamma.iter().map(|g| g.0).collect(), eta_plus: cc.eta_plus, eta_minus: cc.eta_minus }
    }
}

/// {t, samples: [{s, x, y, z, matrix}]}.
pub fn curve_body(c: &CurveSamples) -> Map<String, Value> {
    let samples: Vec<Value> = c
        .torical_points()
        .into_iter()
        .enumerate()
        .map(|(i, [x, y, z])| {
            json!({
                "s": num(c.s[i]),
                "x": num(x),
                "y": num(y),
                "z": num(z),
                "matrix": nums(&c.gamma[i].to_array()),
            })
        })
        .collect();
    let mut m = Map::new();
    m.insert("t".into(), num(c.t));
    m.insert("samples".into(), Value::Array(samples));
    m
}

/// OBJ polyline: one `v` per sample and a single `l` record.
pub fn curve_obj(meta: &Meta, c: &CurveSamples) -> String {
    let mut s = meta.comment_block();
    for [x, y, z] in c.torical_points() {
        let _ = writeln!(s, "v {} {} {}", fmt17(x), fmt17(y), fmt17(z));
    }
    if !c.is_empty() {
        s.push('l');
        for i in 1..=c.len() {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    s
}

fn csv_line(xs: &[f64]) -> String {
    xs.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(",")
}

pub fn curve_csv(meta: &Meta, c: &CurveSamples) -> String {
    let mut s = meta.comment_block();
    s.push_str("s,x,y,z,a,b,c,d\n");
    for (i, [x, y, z]) in c.torical_points().into_iter().enumerate() {
        let m = c.gamma[i].to_array();
        let _ = writeln!(s, "{}", csv_line(&[c.s[i], x, y, z, m[0], m[1], m[2], m[3]]));
    }
    s
}

/// Cousins (s, x, y) per factor.
pub fn cousins_csv(meta: &Meta, c: &CurveSamples) -> String {
    let mut s = meta.comment_block();
    s.push_str("factor,s,x,y\n");
    for (name, eta) in [("plus", &c.eta_plus), ("minus", &c.eta_minus)] {
        for (i, p) in eta.iter().enumerate() {
            let _ = writeln!(s, "{name},{}", csv_line(&[c.s[i], p[0], p[1]]));
        }
    }
    s
}

/// Curve JSON, OBJ and CSV plus cousins CSV under one stem.
pub fn write_curve_set(sink: &mut Sink, stem: &str, meta: &Meta, c: &CurveSamples) -> Result<(), CliError> {
    sink.json(&format!("{stem}.json"), meta, curve_body(c))?;
    sink.write(&format!("{stem}.obj"), &curve_obj(meta, c))?;
    sink.write(&format!("{stem}.csv"), &curve_csv(meta, c))?;
    sink.write(&format!("{stem}_cousins.csv"), &cousins_csv(meta, c))?;
    Ok(())
}

/// Comment block, header and rows of a CSV table.
pub fn table_csv(meta: &Meta, header: &str, rows: &[Vec<String>]) -> String {
    let mut s = meta.comment_block();
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

/// Evenly spaced points, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
