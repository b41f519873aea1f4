//! Command-line front end.
//!
//! Without `--out` the subcommand's JSON document goes to stdout. With
//! `--out DIR` the requested formats are written to `DIR/<subcommand>.<ext>`
//! and a short summary goes to stdout. Exit status: 0 on success, 1 on
//! input errors, 2 on numerical failures.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bands::{compute_bands, dirichlet_spectrum, interlacing_report, BandSpectrum, DEFAULT_WINDOW};
use crate::coeffs::{builtin_model, parse_coefficient_spec, PeriodicCoefficients};
use crate::criticality::{similarity_verdict_with, CriticalityReport, InfinityStatus, Verdict, ZeroStatus, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::resolvent::{geometric_grid, resolvent_norm_curve, ResolventProbeResult};
use crate::transfer::Transfer;

pub const TOL_ENV: &str = "FLOQUET_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Discriminant,
    Bands,
    Dirichlet,
    Classify,
    Probe,
    ReproduceExamples,
}

impl Subcommand {
    fn name(self) -> &'static str {
        match self {
            Subcommand::Discriminant => "discriminant",
            Subcommand::Bands => "bands",
            Subcommand::Dirichlet => "dirichlet",
            Subcommand::Classify => "classify",
            Subcommand::Probe => "probe",
            Subcommand::ReproduceExamples => "reproduce-examples",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "floquet", version, about = "Floquet data and critical points of periodic operators with indefinite weight")]
struct Args {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// Builtin model: sgn_sin, shifted_sgn or const.
    #[arg(long, conflicts_with = "spec")]
    model: Option<String>,
    /// Parameter a of shifted_sgn (default pi/2).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// JSON coefficient document.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Real window lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Number of samples for `discriminant`.
    #[arg(long, default_value_t = 1001)]
    resolution: usize,
    /// Quasimomentum for `probe`.
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// Grid size for `probe`.
    #[arg(long, default_value_t = 2048)]
    n: usize,
    #[arg(long, default_value_t = 1e-2)]
    ymin: f64,
    #[arg(long, default_value_t = 1e-1)]
    ymax: f64,
    #[arg(long, default_value_t = 12)]
    ysteps: usize,
    /// Output directory; without it the JSON document is printed.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv, json, svg.
    #[arg(long, value_delimiter = ',', default_value = "csv,json")]
    format: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Builtin { name: String, params: Vec<f64> },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub model_source: ModelSource,
    pub window: (f64, f64),
    pub resolution: usize,
    pub t: f64,
    pub n: usize,
    pub y_values: Vec<f64>,
    pub output_dir: Option<PathBuf>,
    pub formats: Vec<Format>,
    pub tolerance: f64,
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Parameter(format!("window `{s}` is not lo:hi")))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| Error::Parameter(format!("window `{s}`: {e}")));
    let (lo, hi) = (p(lo)?, p(hi)?);
    if !(lo < hi) {
        return Err(Error::Parameter(format!("window `{s}` is empty")));
    }
    Ok((lo, hi))
}

/// Classification tolerance from `FLOQUET_TOL`, or the default.
pub fn tolerance_from_env() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(DEFAULT_TOL),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(Error::Parameter(format!("{TOL_ENV}=`{v}` is not a positive number"))),
        },
    }
}

impl RunConfig {
    fn from_args(a: Args) -> Result<Self> {
        let model_source = match (a.model, a.spec) {
            (_, Some(path)) => ModelSource::File(path),
            (Some(name), None) => {
                let params = match (name.as_str(), a.a) {
                    ("shifted_sgn", a) => vec![a.unwrap_or(PI / 2.0)],
                    (_, Some(_)) => return Err(Error::Parameter(format!("--a does not apply to `{name}`"))),
                    _ => vec![],
                };
                ModelSource::Builtin { name, params }
            }
            (None, None) if a.subcommand == Subcommand::ReproduceExamples => {
                ModelSource::Builtin { name: "sgn_sin".into(), params: vec![] }
            }
            (None, None) => return Err(Error::Parameter("one of --model or --spec is required".into())),
        };
        let window = match a.window {
            Some(w) => parse_window(&w)?,
            None => DEFAULT_WINDOW,
        };
        if a.resolution < 2 {
            return Err(Error::Parameter("--resolution must be at least 2".into()));
        }
        if !(a.ymin > 0.0 && a.ymin < a.ymax) || a.ysteps < 2 {
            return Err(Error::Parameter("need 0 < ymin < ymax and ysteps >= 2".into()));
        }
        let mut formats = a.format;
        formats.dedup();
        Ok(RunConfig {
            subcommand: a.subcommand,
            model_source,
            window,
            resolution: a.resolution,
            t: a.t,
            n: a.n,
            y_values: geometric_grid(a.ymax, a.ymin, a.ysteps),
            output_dir: a.out,
            formats,
            tolerance: tolerance_from_env()?,
        })
    }

    fn load_model(&self) -> Result<PeriodicCoefficients> {
        match &self.model_source {
            ModelSource::Builtin { name, params } => builtin_model(name, params),
            ModelSource::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
                parse_coefficient_spec(&text)
            }
        }
    }
}

/// Formats a number with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantSample {
    pub lambda: f64,
    pub delta: f64,
    pub delta_dot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantDoc {
    pub model: String,
    pub window: (f64, f64),
    pub samples: Vec<DiscriminantSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletDoc {
    pub model: String,
    pub window: (f64, f64),
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandsDoc {
    pub model: String,
    pub spectrum: BandSpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeDoc {
    pub model: String,
    pub result: ResolventProbeResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRow {
    pub model: String,
    pub criterion_integral: Option<f64>,
    pub delta_zero: Option<f64>,
    pub delta_dot_zero: Option<f64>,
    pub zero_status: ZeroStatus,
    pub infinity_status: InfinityStatus,
    pub verdict: Verdict,
    /// "pass", "fail", or "unresolved" when some strict inequality is
    /// below double-precision resolution.
    pub interlacing: Option<String>,
    pub probe_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExamplesDoc {
    pub rows: Vec<ExampleRow>,
}

/// One artifact in each of the formats it supports.
struct Artifact {
    json: String,
    csv: Option<String>,
    svg: Option<String>,
    summary: String,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

fn csv(header: &str, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn svg_document(body: &str, width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn polyline(points: &[(f64, f64)], color: &str) -> String {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    format!("<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n", pts.join(" "))
}

fn discriminant_artifact(coeffs: &PeriodicCoefficients, cfg: &RunConfig) -> Result<Artifact> {
    let (lo, hi) = cfg.window;
    let t = Transfer::new(coeffs);
    let k = cfg.resolution;
    let samples = (0..k)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (k - 1) as f64;
            let d = t.discriminant_with_derivative(Complex64::new(x, 0.0))?;
            Ok(DiscriminantSample { lambda: x, delta: d.delta.re, delta_dot: d.delta_dot.unwrap_or_default().re })
        })
        .collect::<Result<Vec<_>>>()?;
    let (w, h, clip) = (800.0, 400.0, 3.0);
    let map = |x: f64, y: f64| ((x - lo) / (hi - lo) * w, h / 2.0 - y.clamp(-clip, clip) / clip * (h / 2.0));
    let mut body = String::new();
    for level in [-1.0, 1.0] {
        body.push_str(&polyline(&[map(lo, level), map(hi, level)], "#999"));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| map(s.lambda, s.delta)).collect();
    body.push_str(&polyline(&pts, "#1f4e9c"));
    let doc = DiscriminantDoc { model: coeffs.label.clone(), window: cfg.window, samples };
    Ok(Artifact {
        csv: Some(csv(
            "lambda,delta,delta_dot",
            doc.samples.iter().map(|s| vec![num(s.lambda), num(s.delta), num(s.delta_dot)]),
        )),
        svg: Some(svg_document(&body, w, h)),
        summary: format!("discriminant: {} samples on [{lo}, {hi}]", doc.samples.len()),
        json: to_json(&doc),
    })
}

fn dirichlet_artifact(coeffs: &PeriodicCoefficients, cfg: &RunConfig) -> Result<Artifact> {
    let ev = dirichlet_spectrum(coeffs, cfg.window)?;
    let doc = DirichletDoc { model: coeffs.label.clone(), window: cfg.window, eigenvalues: ev };
    Ok(Artifact {
        csv: Some(csv("lambda", doc.eigenvalues.iter().map(|&x| vec![num(x)]))),
        svg: None,
        summary: format!("dirichlet: {} eigenvalues in [{}, {}]", doc.eigenvalues.len(), cfg.window.0, cfg.window.1),
        json: to_json(&doc),
    })
}

fn bands_artifact(coeffs: &PeriodicCoefficients, cfg: &RunConfig) -> Result<Artifact> {
    let spectrum = compute_bands(coeffs, cfg.window)?;
    let (lo, hi) = cfg.window;
    let label = |l: Option<crate::bands::EdgeLabel>| l.map(|l| l.to_string()).unwrap_or_else(|| "window".into());
    let (w, h) = (800.0, 80.0);
    let mut body = String::new();
    let _ = writeln!(body, "<line x1=\"0\" y1=\"{}\" x2=\"{w}\" y2=\"{}\" stroke=\"#999\"/>", h / 2.0, h / 2.0);
    for b in &spectrum.bands {
        let x0 = (b.lo - lo) / (hi - lo) * w;
        let x1 = (b.hi - lo) / (hi - lo) * w;
        let _ = writeln!(
            body,
            "<rect x=\"{x0:.2}\" y=\"{}\" width=\"{:.2}\" height=\"{}\" fill=\"#1f4e9c\" stroke=\"white\" stroke-width=\"0.5\"/>",
            h / 4.0,
            (x1 - x0).max(1.0),
            h / 2.0
        );
    }
    let mut summary = format!("bands: {} bands in [{lo}, {hi}]", spectrum.bands.len());
    if spectrum.is_truncated() {
        summary.push_str("\nbands: warning: a window edge falls inside a band; that band is truncated and flagged");
    }
    let doc = BandsDoc { model: coeffs.label.clone(), spectrum };
    Ok(Artifact {
        csv: Some(csv(
            "lo,hi,lo_label,hi_label",
            doc.spectrum
                .bands
                .iter()
                .map(|b| vec![num(b.lo), num(b.hi), label(b.lo_label), label(b.hi_label)]),
        )),
        svg: Some(svg_document(&body, w, h)),
        summary,
        json: to_json(&doc),
    })
}

fn classify_artifact(coeffs: &PeriodicCoefficients, cfg: &RunConfig) -> Result<Artifact> {
    let r = similarity_verdict_with(coeffs, cfg.tolerance);
    Ok(Artifact {
        summary: format!(
            "classify: {}: zero {}, infinity {}, similar to self-adjoint: {}",
            r.label,
            r.zero_status.as_str(),
            r.infinity_status.as_str(),
            r.similar_to_selfadjoint.as_str()
        ),
        csv: None,
        svg: None,
        json: r.to_json() + "\n",
    })
}

fn probe_artifact(coeffs: &PeriodicCoefficients, cfg: &RunConfig) -> Result<Artifact> {
    let result = resolvent_norm_curve(coeffs, cfg.t, &cfg.y_values, cfg.n)?;
    let (w, h) = (500.0, 400.0);
    let lx: Vec<f64> = result.samples.iter().map(|s| s.0.log10()).collect();
    let ly: Vec<f64> = result.samples.iter().map(|s| s.1.log10()).collect();
    let (x0, x1) = (lx.iter().cloned().fold(f64::INFINITY, f64::min), lx.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (y0, y1) = (ly.iter().cloned().fold(f64::INFINITY, f64::min), ly.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let pad = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let pts: Vec<(f64, f64)> = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (20.0 + (x - x0) / pad(x0, x1) * (w - 40.0), h - 20.0 - (y - y0) / pad(y0, y1) * (h - 40.0)))
        .collect();
    let summary = format!(
        "probe: fitted_exponent={} over y in [{}, {}] (t = {}, n = {})",
        num(result.fitted_exponent),
        num(result.fit_window.0),
        num(result.fit_window.1),
        result.t,
        result.n
    );
    let doc = ProbeDoc { model: coeffs.label.clone(), result };
    Ok(Artifact {
        csv: Some(csv("y,norm", doc.result.samples.iter().map(|&(y, v)| vec![num(y), num(v)]))),
        svg: Some(svg_document(&polyline(&pts, "#1f4e9c"), w, h)),
        summary,
        json: to_json(&doc),
    })
}

/// Classification, interlacing and the resolvent probe for sgn_sin and
/// shifted_sgn at several shifts.
pub fn reproduce_examples(tol: f64) -> Result<ExamplesDoc> {
    let mut models = vec![builtin_model("sgn_sin", &[])?];
    for a in [0.1, 0.5, PI / 2.0, 2.0] {
        models.push(builtin_model("shifted_sgn", &[a])?);
    }
    let ys = geometric_grid(1e-1, 1e-2, 12);
    let mut rows = Vec::new();
    for m in &models {
        let r: CriticalityReport = similarity_verdict_with(m, tol);
        let interlacing = interlacing_report(m, 3).ok().map(|r| {
            if r.all_passed() {
                "pass"
            } else if r.no_failures() {
                "unresolved"
            } else {
                "fail"
            }
            .to_string()
        });
        let probe = resolvent_norm_curve(m, 0.0, &ys, 2048).ok().map(|p| p.fitted_exponent);
        rows.push(ExampleRow {
            model: m.label.clone(),
            criterion_integral: r.diagnostics.criterion_integral,
            delta_zero: r.diagnostics.delta_zero,
            delta_dot_zero: r.diagnostics.delta_dot_zero,
            zero_status: r.zero_status,
            infinity_status: r.infinity_status,
            verdict: r.similar_to_selfadjoint,
            interlacing,
            probe_exponent: probe,
        });
    }
    Ok(ExamplesDoc { rows })
}

fn examples_artifact(cfg: &RunConfig) -> Result<Artifact> {
    let doc = reproduce_examples(cfg.tolerance)?;
    let mut table = format!(
        "{:<34} {:>24} {:>18} {:>12} {:>8} {:>11} {:>9}\n",
        "model", "criterion integral", "zero", "infinity", "verdict", "interlace", "exponent"
    );
    for r in &doc.rows {
        let _ = writeln!(
            table,
            "{:<34} {:>24} {:>18} {:>12} {:>8} {:>11} {:>9}",
            r.model,
            r.criterion_integral.map(num).unwrap_or_else(|| "-".into()),
            r.zero_status.as_str(),
            r.infinity_status.as_str(),
            r.verdict.as_str(),
            r.interlacing.as_deref().unwrap_or("-"),
            r.probe_exponent.map(|e| format!("{e:.3}")).unwrap_or_else(|| "-".into()),
        );
    }
    Ok(Artifact {
        csv: Some(csv(
            "model,criterion_integral,zero_status,infinity_status,verdict,interlacing,probe_exponent",
            doc.rows.iter().map(|r| {
                vec![
                    r.model.clone(),
                    r.criterion_integral.map(num).unwrap_or_default(),
                    r.zero_status.as_str().into(),
                    r.infinity_status.as_str().into(),
                    r.verdict.as_str().into(),
                    r.interlacing.clone().unwrap_or_default(),
                    r.probe_exponent.map(num).unwrap_or_default(),
                ]
            }),
        )),
        svg: None,
        summary: table.trim_end().to_string(),
        json: to_json(&doc),
    })
}

fn write_artifact(dir: &Path, stem: &str, art: &Artifact, formats: &[Format]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for f in formats {
        let (ext, content) = match f {
            Format::Json => ("json", Some(&art.json)),
            Format::Csv => ("csv", art.csv.as_ref()),
            Format::Svg => ("svg", art.svg.as_ref()),
        };
        if let Some(c) = content {
            let path = dir.join(format!("{stem}.{ext}"));
            fs::write(&path, c).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Executes a configuration and returns what it printed on stdout.
pub fn execute(cfg: &RunConfig) -> Result<String> {
    let art = if cfg.subcommand == Subcommand::ReproduceExamples {
        examples_artifact(cfg)?
    } else {
        let coeffs = cfg.load_model()?;
        match cfg.subcommand {
            Subcommand::Discriminant => discriminant_artifact(&coeffs, cfg)?,
            Subcommand::Bands => bands_artifact(&coeffs, cfg)?,
            Subcommand::Dirichlet => dirichlet_artifact(&coeffs, cfg)?,
            Subcommand::Classify => classify_artifact(&coeffs, cfg)?,
            Subcommand::Probe => probe_artifact(&coeffs, cfg)?,
            Subcommand::ReproduceExamples => unreachable!(),
        }
    };
    match &cfg.output_dir {
        None if cfg.subcommand == Subcommand::ReproduceExamples => Ok(art.summary + "\n"),
        None => Ok(art.json),
        Some(dir) => {
            let written = write_artifact(dir, cfg.subcommand.name(), &art, &cfg.formats)?;
            let mut out = art.summary;
            out.push('\n');
            for p in written {
                let _ = writeln!(out, "wrote {}", p.display());
            }
            Ok(out)
        }
    }
}

/// Runs a configuration, printing output and errors; returns the exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    match execute(cfg) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        1
    } else {
        2
    }
}

/// Parses command-line arguments into a configuration.
pub fn parse_args<I, T>(args: I) -> std::result::Result<RunConfig, (i32, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(args).map_err(|e| {
        let code = if e.use_stderr() { 1 } else { 0 };
        (code, e.render().to_string())
    })?;
    RunConfig::from_args(args).map_err(|e| (exit_code(&e), format!("error: {e}\n")))
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(args) {
        Ok(cfg) => run(&cfg),
        Err((0, text)) => {
            print!("{text}");
            0
        }
        Err((code, text)) => {
            eprint!("{text}");
            code
        }
    }
}
