//! Batch front end: file formats, command dispatch and reports.
//!
//! Every command produces one report (JSON, or CSV for sweeps) and an exit
//! code: 0 on success, 1 on invalid input or a failed check, 2 when a
//! solver does not converge.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use minkpoly::algebra::{Covec2C, Mat2, MinkVector, Vec2C, C64};
use minkpoly::correspond::{default_points, minkowski_to_zs, to_higgs, zs_to_minkowski, HiggsData};
use minkpoly::gauge::{kempf_ness_normalize, KnOptions};
use minkpoly::hyperpolygon::{
    complex_residual, is_alpha_stable_with, level_residual, sample_complex_level, HyperConfig,
    WeightVector, DEFAULT_PROP_TOL, LEVEL_TOL,
};
use minkpoly::involution::{census, classify_fixed_with, ComponentLabel, FixedPointClass};
use minkpoly::minkowski::{
    bend_sweep, diagonal_length, noncompact_witness, normalize_su11, validate, MinkPolygon,
    WITNESS_MAX_EXPONENT,
};
use serde::Deserialize;
use serde_json::{json, Value};

pub mod selftest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] minkpoly::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(minkpoly::Error::NoConvergence { .. }) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::SchemaMismatch(_) => "SchemaMismatch",
            CliError::Io(_) => "IoError",
            CliError::Usage(_) => "UsageError",
            CliError::Core(e) => core_kind(e),
        }
    }

    pub fn payload(&self) -> Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        if let CliError::Parse { line, .. } = self {
            v["line"] = json!(line);
        }
        v
    }
}

fn core_kind(e: &minkpoly::Error) -> &'static str {
    use minkpoly::Error::*;
    match e {
        NonGeneric { .. } => "NonGeneric",
        TooManyPoints { .. } => "TooManyPoints",
        ZeroVector(_) => "ZeroVector",
        NotStable(_) => "NotStable",
        SamplerFailed(_) => "SamplerFailed",
        NoConvergence { .. } => "NoConvergence",
        NotOnLevelSet(_) => "NotOnLevelSet",
        NotFixed => "NotFixed",
        IndexDegenerate(_) => "IndexDegenerate",
        FitFailed(_) => "FitFailed",
        IdentityViolated { .. } => "IdentityViolated",
        PolygonPoint => "PolygonPoint",
        DegenerateDiagonal => "DegenerateDiagonal",
        NotTangent(_) => "NotTangent",
        NotTimelike(_) => "NotTimelike",
        NotNormalized => "NotNormalized",
        CompactCase => "CompactCase",
        NotCanonical(_) => "NotCanonical",
        NotClosed(_) => "NotClosed",
        WeightOutOfRange(_) => "WeightOutOfRange",
        NotOnComplexLevel(_) => "NotOnComplexLevel",
        CensusMismatch(_) => "CensusMismatch",
        InvalidInput(_) => "InvalidInput",
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn parse_err(e: serde_json::Error) -> CliError {
    CliError::Parse {
        line: e.line(),
        reason: e.to_string(),
    }
}

/// Contents of an input file.
#[derive(Clone, Debug, PartialEq)]
pub enum Loaded {
    Hyper(HyperConfig),
    Polygon(MinkPolygon),
    Weights(WeightVector),
}

impl Loaded {
    pub fn alpha(&self) -> Vec<f64> {
        match self {
            Loaded::Hyper(c) => c.alpha.as_slice().to_vec(),
            Loaded::Polygon(p) => p.alpha.clone(),
            Loaded::Weights(w) => w.as_slice().to_vec(),
        }
    }

    /// Checks appropriate to the kind of data.
    pub fn validation(&self) -> Value {
        match self {
            Loaded::Hyper(c) => json!({
                "level_residual": level_residual(c),
                "complex_residual": complex_residual(c),
            }),
            Loaded::Polygon(p) => {
                let r = validate(p);
                json!({
                    "closure_residual": r.closure_residual,
                    "max_norm_error": r.max_norm_error(),
                    "causal_violations": r.causal_violations.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "generic": r.generic,
                })
            }
            Loaded::Weights(w) => json!({ "generic": w.check_generic().is_ok() }),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Loaded::Hyper(c) => hyper_to_json(c),
            Loaded::Polygon(p) => polygon_to_json(p),
            Loaded::Weights(w) => json!({ "alpha": w.as_slice() }),
        }
    }
}

type Pair = [f64; 2];

#[derive(Deserialize)]
struct HyperFile {
    alpha: Vec<f64>,
    p: Vec<[Pair; 2]>,
    q: Vec<[Pair; 2]>,
}

#[derive(Deserialize)]
struct PolygonFile {
    k1: usize,
    k2: Option<usize>,
    alpha: Vec<f64>,
    sides: Vec<[f64; 3]>,
}

#[derive(Deserialize)]
struct WeightsFile {
    alpha: Vec<f64>,
}

fn c(z: Pair) -> C64 {
    C64::new(z[0], z[1])
}

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

/// Parses a configuration, polygon or weight file, choosing the schema by
/// the fields present: `sides` for polygons, `p`/`q` for configurations,
/// otherwise `alpha` alone.
pub fn load_str(text: &str) -> Result<Loaded> {
    let value: Value = serde_json::from_str(text).map_err(parse_err)?;
    let Some(obj) = value.as_object() else {
        return Err(CliError::SchemaMismatch("top level must be an object".into()));
    };
    if obj.contains_key("sides") {
        let f: PolygonFile = serde_json::from_str(text).map_err(parse_err)?;
        let n = f.sides.len();
        if f.alpha.len() != n {
            return Err(CliError::SchemaMismatch(format!(
                "{n} sides but {} radii",
                f.alpha.len()
            )));
        }
        let k2 = f.k2.unwrap_or(n.saturating_sub(f.k1));
        if f.k1 + k2 != n {
            return Err(CliError::SchemaMismatch(format!(
                "k1 + k2 = {} but there are {n} sides",
                f.k1 + k2
            )));
        }
        let sides = f.sides.into_iter().map(MinkVector::from_array).collect();
        Ok(Loaded::Polygon(MinkPolygon::new(sides, f.k1, f.alpha)?))
    } else if obj.contains_key("p") || obj.contains_key("q") {
        let f: HyperFile = serde_json::from_str(text).map_err(parse_err)?;
        if f.p.len() != f.alpha.len() || f.q.len() != f.alpha.len() {
            return Err(CliError::SchemaMismatch(format!(
                "{} weights, {} covectors, {} vectors",
                f.alpha.len(),
                f.p.len(),
                f.q.len()
            )));
        }
        let alpha = WeightVector::new(f.alpha)?;
        let p = f.p.iter().map(|[a, b]| Covec2C::new(c(*a), c(*b))).collect();
        let q = f.q.iter().map(|[a, b]| Vec2C::new(c(*a), c(*b))).collect();
        Ok(Loaded::Hyper(HyperConfig::new(alpha, p, q)?))
    } else if obj.contains_key("alpha") {
        let f: WeightsFile = serde_json::from_str(text).map_err(parse_err)?;
        Ok(Loaded::Weights(WeightVector::new(f.alpha)?))
    } else {
        Err(CliError::SchemaMismatch(
            "expected an \"alpha\", \"p\"/\"q\" or \"sides\" field".into(),
        ))
    }
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    load_str(&text)
}

pub fn save(path: &Path, data: &Loaded) -> Result<()> {
    write_text(Some(path), &to_pretty(&data.to_json()))
}

pub fn hyper_to_json(cfg: &HyperConfig) -> Value {
    json!({
        "alpha": cfg.alpha.as_slice(),
        "p": cfg.p.iter().map(|p| [pair(p.0[0]), pair(p.0[1])]).collect::<Vec<_>>(),
        "q": cfg.q.iter().map(|q| [pair(q.0[0]), pair(q.0[1])]).collect::<Vec<_>>(),
    })
}

pub fn polygon_to_json(poly: &MinkPolygon) -> Value {
    json!({
        "k1": poly.k1,
        "k2": poly.k2(),
        "alpha": poly.alpha,
        "sides": poly.sides.iter().map(|u| u.to_array()).collect::<Vec<_>>(),
    })
}

fn mat_json(m: &Mat2) -> Value {
    json!(m.0.iter().map(|row| [pair(row[0]), pair(row[1])]).collect::<Vec<_>>())
}

pub fn higgs_to_json(data: &HiggsData) -> Value {
    json!({
        "points": data.points.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
        "alpha": data.alpha,
        "beta": data.beta.as_ref().map(|b| b.0.clone()),
        "flags": data.flags.iter().map(|q| [pair(q.0[0]), pair(q.0[1])]).collect::<Vec<_>>(),
        "residues": data.residues.iter().map(mat_json).collect::<Vec<_>>(),
    })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Higgs,
    Minkowski,
    Hyper,
}

#[derive(Clone, Debug, PartialEq, Subcommand)]
pub enum Command {
    /// Fixed components of the involution for a weight vector.
    Census,
    /// α-stability of a configuration.
    Stability,
    /// Kempf–Ness normalization onto the real moment-map level.
    Normalize,
    /// Position of a configuration relative to the involution.
    Classify,
    /// Converts between configurations, Higgs data and Minkowski polygons.
    Convert {
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Bending sweep of a Minkowski polygon about the diagonal `u_1 + u_2`.
    Bend {
        #[arg(long, default_value_t = 64)]
        sweep: usize,
    },
    /// A sequence of closed Minkowski polygons with unbounded diagonal.
    Witness {
        #[arg(long)]
        k1: usize,
        #[arg(long, default_value_t = WITNESS_MAX_EXPONENT)]
        m_max: u32,
    },
    /// A random stable point of the complex level set.
    Sample,
    /// Runs the built-in invariant checks.
    Selftest,
}

#[derive(Clone, Debug, PartialEq, Parser)]
#[command(name = "minkpoly", version, about = "Hyperpolygons, involution fixed loci and Minkowski polygons")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Input JSON file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Weights given inline, e.g. `--alpha 1,1,2,1`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,
    /// Proportionality tolerance for straight sets.
    #[arg(long = "tol", global = true, allow_negative_numbers = true, default_value_t = DEFAULT_PROP_TOL)]
    pub prop_tol: f64,
    /// Residual target of the Kempf–Ness solver.
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = 1e-8)]
    pub kn_tol: f64,
    /// Accepted distance to the moment-map level set.
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = LEVEL_TOL)]
    pub level_tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl RunConfig {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [("tol", self.prop_tol), ("kn-tol", self.kn_tol), ("level-tol", self.level_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("--{name} must be positive, got {v}")));
            }
        }
        if self.format == Format::Csv && !matches!(self.command, Command::Bend { .. } | Command::Witness { .. }) {
            return Err(CliError::Usage("csv output is available for bend and witness only".into()));
        }
        Ok(())
    }

    fn kn_options(&self) -> KnOptions {
        KnOptions {
            tol: self.kn_tol,
            max_iters: self.max_iters,
            ..KnOptions::default()
        }
    }

    fn input(&self) -> Result<Loaded> {
        match (&self.input, &self.alpha) {
            (Some(path), _) => load(path),
            (None, Some(a)) => Ok(Loaded::Weights(WeightVector::new(a.clone())?)),
            (None, None) => Err(CliError::Usage("this command needs --input or --alpha".into())),
        }
    }

    fn weights(&self) -> Result<WeightVector> {
        if let Some(a) = &self.alpha {
            return Ok(WeightVector::new(a.clone())?);
        }
        Ok(WeightVector::new(self.input()?.alpha())?)
    }

    fn hyper(&self) -> Result<HyperConfig> {
        match self.input()? {
            Loaded::Hyper(c) => Ok(c),
            _ => Err(CliError::SchemaMismatch("expected a configuration with p and q".into())),
        }
    }

    fn polygon(&self) -> Result<MinkPolygon> {
        match self.input()? {
            Loaded::Polygon(p) => Ok(p),
            _ => Err(CliError::SchemaMismatch("expected a polygon with sides".into())),
        }
    }
}

/// Finished report: exit code and the text written to the output.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub code: i32,
    pub body: String,
}

/// Runs a command, turning errors into JSON payloads.
pub fn run(cfg: &RunConfig) -> Report {
    match cfg.check().and_then(|_| dispatch(cfg)) {
        Ok(r) => r,
        Err(e) => Report {
            code: e.exit_code(),
            body: to_pretty(&e.payload()),
        },
    }
}

/// Runs a command and writes its report.
pub fn run_and_write(cfg: &RunConfig) -> i32 {
    let report = run(cfg);
    match write_text(cfg.output.as_deref(), &report.body) {
        Ok(()) => report.code,
        Err(e) => {
            eprintln!("{e}");
            1
        }
    }
}

fn ok(v: Value) -> Result<Report> {
    Ok(Report {
        code: 0,
        body: to_pretty(&v),
    })
}

fn label_json(label: ComponentLabel) -> String {
    match label {
        ComponentLabel::Polygon => "M(alpha)".into(),
        ComponentLabel::Z(s) => format!("Z_{s}"),
    }
}

fn dispatch(cfg: &RunConfig) -> Result<Report> {
    match &cfg.command {
        Command::Census => {
            let c = census(&cfg.weights()?)?;
            ok(json!({
                "n": c.n,
                "components": c.components.iter().map(|r| json!({
                    "label": label_json(r.label),
                    "real_dim": r.real_dim,
                    "compact": r.compact,
                    "poincare": r.poincare,
                    "diffeo_type": r.diffeo_type,
                })).collect::<Vec<_>>(),
                "noncompact_count": c.noncompact_count,
                "compact_count": c.compact_count,
                "short_count": c.short_count,
                "notes": c.notes,
            }))
        }
        Command::Stability => {
            let c = cfg.hyper()?;
            let r = is_alpha_stable_with(&c, cfg.prop_tol)?;
            ok(json!({
                "stable": r.stable,
                "zero_q": r.zero_q.map(|i| i + 1),
                "violating": r.violating.map(|s| s.to_string()),
            }))
        }
        Command::Normalize => {
            let c = cfg.hyper()?;
            let res = kempf_ness_normalize(&c, &cfg.kn_options())?;
            let level = level_residual(&res.cfg);
            ok(json!({
                "residual": res.residual,
                "level_residual": level,
                "on_level_set": level <= cfg.level_tol,
                "complex_residual": complex_residual(&res.cfg),
                "iterations": res.iterations,
                "config": hyper_to_json(&res.cfg),
            }))
        }
        Command::Classify => {
            let c = cfg.hyper()?;
            let v = match classify_fixed_with(&c, cfg.prop_tol)? {
                FixedPointClass::NotFixed => json!({ "class": "not_fixed" }),
                FixedPointClass::PolygonComponent => json!({ "class": "polygon" }),
                FixedPointClass::ZComponent { s, canonical, .. } => json!({
                    "class": "z_s",
                    "s": s.to_string(),
                    "canonical": hyper_to_json(&canonical),
                }),
            };
            ok(v)
        }
        Command::Convert { to } => convert(cfg, *to),
        Command::Bend { sweep } => {
            let norm = bend_frame(&cfg.polygon()?)?;
            let rows = bend_sweep(&norm, *sweep)?;
            match cfg.format {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["theta", "ell", "closure_inf_norm", "max_norm_error"])
                        .map_err(|e| CliError::Io(e.to_string()))?;
                    for r in &rows {
                        w.serialize((r.theta, r.ell, r.closure_inf_norm, r.max_norm_error))
                            .map_err(|e| CliError::Io(e.to_string()))?;
                    }
                    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                    Ok(Report {
                        code: 0,
                        body: String::from_utf8(bytes).expect("csv is utf-8"),
                    })
                }
                Format::Json => ok(json!({
                    "normalized": polygon_to_json(&norm),
                    "rows": rows.iter().map(|r| json!({
                        "theta": r.theta,
                        "ell": r.ell,
                        "closure_inf_norm": r.closure_inf_norm,
                        "max_norm_error": r.max_norm_error,
                    })).collect::<Vec<_>>(),
                })),
            }
        }
        Command::Witness { k1, m_max } => {
            let alpha = cfg.weights()?;
            let seq = noncompact_witness(alpha.as_slice(), *k1, *m_max)?;
            let mut rows = Vec::new();
            for poly in &seq {
                let r = validate(poly);
                rows.push((
                    diagonal_length(poly, *k1)?,
                    r.closure_residual,
                    r.max_norm_error(),
                    poly,
                ));
            }
            match cfg.format {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["index", "ell", "closure_inf_norm", "max_norm_error"])
                        .map_err(|e| CliError::Io(e.to_string()))?;
                    for (i, r) in rows.iter().enumerate() {
                        w.serialize((i, r.0, r.1, r.2)).map_err(|e| CliError::Io(e.to_string()))?;
                    }
                    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                    Ok(Report {
                        code: 0,
                        body: String::from_utf8(bytes).expect("csv is utf-8"),
                    })
                }
                Format::Json => ok(json!({
                    "polygons": rows.iter().map(|r| json!({
                        "ell": r.0,
                        "closure_inf_norm": r.1,
                        "max_norm_error": r.2,
                        "polygon": polygon_to_json(r.3),
                    })).collect::<Vec<_>>(),
                })),
            }
        }
        Command::Sample => {
            let c = sample_complex_level(&cfg.weights()?, cfg.seed)?;
            ok(hyper_to_json(&c))
        }
        Command::Selftest => {
            let (pass, v) = selftest::run(cfg.seed);
            Ok(Report {
                code: if pass { 0 } else { 1 },
                body: to_pretty(&v),
            })
        }
    }
}

/// Moves `u_1 + u_2` onto the `t`-axis, the frame the bending flow needs.
fn bend_frame(poly: &MinkPolygon) -> Result<MinkPolygon> {
    if poly.k1 < 2 {
        return Err(minkpoly::Error::InvalidInput("bending needs k1 >= 2".into()).into());
    }
    let mut pair = poly.clone();
    pair.k1 = 2;
    let (mut norm, _) = normalize_su11(&pair)?;
    norm.k1 = poly.k1;
    Ok(norm)
}

fn convert(cfg: &RunConfig, to: Target) -> Result<Report> {
    match to {
        Target::Higgs => {
            let c = cfg.hyper()?;
            let data = to_higgs(&c, &default_points(c.n()))?;
            ok(higgs_to_json(&data))
        }
        Target::Minkowski => {
            let c = cfg.hyper()?;
            match classify_fixed_with(&c, cfg.prop_tol)? {
                FixedPointClass::ZComponent { s, canonical, .. } => {
                    let (poly, order) = zs_to_minkowski(&canonical, s)?;
                    let mut v = polygon_to_json(&poly);
                    v["order"] = json!(order.iter().map(|i| i + 1).collect::<Vec<_>>());
                    ok(v)
                }
                _ => Err(minkpoly::Error::NotFixed.into()),
            }
        }
        Target::Hyper => {
            let poly = cfg.polygon()?;
            let (norm, _) = normalize_su11(&poly)?;
            ok(hyper_to_json(&minkowski_to_zs(&norm)?))
        }
    }
}

/// Caps the rayon pool from `MINKPOLY_THREADS` when set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("MINKPOLY_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("minkpoly").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn alpha_is_comma_delimited() {
        let cfg = parse(&["census", "--alpha", "1,1,2.5,1"]);
        assert_eq!(cfg.alpha, Some(vec![1.0, 1.0, 2.5, 1.0]));
        assert_eq!(cfg.command, Command::Census);
        assert_eq!(cfg.kn_tol, 1e-8);
    }

    #[test]
    fn nonconvergence_maps_to_two() {
        let e = CliError::Core(minkpoly::Error::NoConvergence { iters: 3, residual: 1.0 });
        assert_eq!(e.exit_code(), 2);
        assert_eq!(CliError::SchemaMismatch("x".into()).exit_code(), 1);
        assert_eq!(e.payload()["error"], "NoConvergence");
    }

    #[test]
    fn csv_only_for_sweeps() {
        let cfg = parse(&["census", "--alpha", "1,1,2,1", "--format", "csv"]);
        assert!(matches!(cfg.check(), Err(CliError::Usage(_))));
        let cfg = parse(&["bend", "--sweep", "4", "--format", "csv"]);
        assert!(cfg.check().is_ok());
    }

    #[test]
    fn weights_file_is_recognized() {
        let loaded = load_str(r#"{"alpha": [1, 1, 2, 1]}"#).unwrap();
        assert_eq!(loaded, Loaded::Weights(WeightVector::new(vec![1.0, 1.0, 2.0, 1.0]).unwrap()));
        assert_eq!(loaded.validation()["generic"], true);
    }

    #[test]
    fn higgs_report_has_one_residue_per_point() {
        let cfg = sample_complex_level(&WeightVector::new(vec![1.0, 1.3, 0.8, 1.7, 0.9]).unwrap(), 1).unwrap();
        let v = higgs_to_json(&to_higgs(&cfg, &default_points(5)).unwrap());
        assert_eq!(v["residues"].as_array().unwrap().len(), 5);
        assert_eq!(v["points"][2], json!([3.0, 0.0]));
    }
}
