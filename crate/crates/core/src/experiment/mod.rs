//! Seeded, reproducible experiment runs with machine-readable reports. This
//! is the layer behind the `qfound` binary.

mod runs;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontology::Resolution;
use crate::phase_space::RrScale;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChshMode {
    Enumerate,
    Quantum,
    LhvSweep,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsMode {
    BornCheck,
    Overlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianMode {
    Uncertainty,
    NoCloning,
    Epr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Toy,
    Chsh(ChshMode),
    Ks(KsMode),
    Gaussian(GaussianMode),
    Hardy,
    Pbr,
    MachZehnder,
}

impl Experiment {
    /// Parses a subcommand and its mode, e.g. `("chsh", Some("lhv-sweep"))`.
    pub fn parse(subcommand: &str, mode: Option<&str>) -> Result<Self> {
        let unknown = || Error::UnknownExperiment(format!("{subcommand} {}", mode.unwrap_or("")).trim().to_string());
        let e = match (subcommand, mode) {
            ("toy", None) => Experiment::Toy,
            ("hardy", None) => Experiment::Hardy,
            ("pbr", None) => Experiment::Pbr,
            ("mach-zehnder", None) => Experiment::MachZehnder,
            ("chsh", Some(m)) => Experiment::Chsh(match m {
                "enumerate" => ChshMode::Enumerate,
                "quantum" => ChshMode::Quantum,
                "lhv-sweep" => ChshMode::LhvSweep,
                "simulate" => ChshMode::Simulate,
                _ => return Err(unknown()),
            }),
            ("ks", Some(m)) => Experiment::Ks(match m {
                "born" | "born-check" => KsMode::BornCheck,
                "overlap" => KsMode::Overlap,
                _ => return Err(unknown()),
            }),
            ("gaussian", Some(m)) => Experiment::Gaussian(match m {
                "uncertainty" => GaussianMode::Uncertainty,
                "no-cloning" => GaussianMode::NoCloning,
                "epr" => GaussianMode::Epr,
                _ => return Err(unknown()),
            }),
            _ => return Err(unknown()),
        };
        Ok(e)
    }

    pub fn id(&self) -> &'static str {
        match self {
            Experiment::Toy => "toy",
            Experiment::Chsh(ChshMode::Enumerate) => "chsh enumerate",
            Experiment::Chsh(ChshMode::Quantum) => "chsh quantum",
            Experiment::Chsh(ChshMode::LhvSweep) => "chsh lhv-sweep",
            Experiment::Chsh(ChshMode::Simulate) => "chsh simulate",
            Experiment::Ks(KsMode::BornCheck) => "ks born-check",
            Experiment::Ks(KsMode::Overlap) => "ks overlap",
            Experiment::Gaussian(GaussianMode::Uncertainty) => "gaussian uncertainty",
            Experiment::Gaussian(GaussianMode::NoCloning) => "gaussian no-cloning",
            Experiment::Gaussian(GaussianMode::Epr) => "gaussian epr",
            Experiment::Hardy => "hardy",
            Experiment::Pbr => "pbr",
            Experiment::MachZehnder => "mach-zehnder",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    /// Accepts the space-separated form produced by [`Experiment::id`].
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let sub = parts.next().unwrap_or("");
        let mode = parts.next();
        if parts.next().is_some() {
            return Err(Error::UnknownExperiment(s.to_string()));
        }
        Self::parse(sub, mode)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::InvalidParameter(format!("format `{s}` is not json or csv"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    /// Monte Carlo rounds for sampled experiments.
    pub samples: u64,
    /// Number of random models or states in sweeps.
    pub trials: usize,
    /// Number of random (Ψ, Φ) pairs in the KS Born check.
    pub pairs: usize,
    pub resolution: Resolution,
    /// Size of the Hardy family; `None` sweeps M ∈ {2, 4, 8, 16}.
    pub m: Option<usize>,
    pub rr_scale: RrScale,
    /// Squeezing width s.
    pub squeeze: f64,
    pub format: Format,
    pub model: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            seed: 42,
            samples: 1_000_000,
            trials: 1000,
            pairs: 100,
            resolution: Resolution::default(),
            m: None,
            rr_scale: RrScale::default(),
            squeeze: 1e-3,
            format: Format::Json,
            model: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.trials == 0 || self.pairs == 0 {
            return bad("trials and pairs must be at least 1".into());
        }
        Resolution::new(self.resolution.n_theta, self.resolution.n_phi)?;
        if let Some(m) = self.m {
            if !(2..=4096).contains(&m) {
                return bad(format!("M = {m} outside 2..=4096"));
            }
        }
        if !(self.squeeze > 0.0 && self.squeeze.is_finite()) {
            return bad(format!("squeeze {} must be positive", self.squeeze));
        }
        if self.model.is_some() && !matches!(self.experiment, Experiment::Hardy | Experiment::Pbr) {
            return bad(format!("--model is not used by `{}`", self.experiment));
        }
        Ok(())
    }

    fn echo(&self) -> BTreeMap<String, String> {
        let mut p = BTreeMap::new();
        p.insert("seed".into(), self.seed.to_string());
        p.insert("samples".into(), self.samples.to_string());
        p.insert("trials".into(), self.trials.to_string());
        p.insert("pairs".into(), self.pairs.to_string());
        p.insert("resolution".into(), self.resolution.to_string());
        p.insert("m".into(), self.m.map_or("2,4,8,16".into(), |m| m.to_string()));
        p.insert("rr_scale".into(), format_sig(self.rr_scale.value()));
        p.insert("squeeze".into(), format_sig(self.squeeze));
        p.insert("format".into(), self.format.to_string());
        if let Some(path) = &self.model {
            p.insert("model".into(), path.display().to_string());
        }
        p
    }
}

/// Rounds to 10 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.9e}").parse().unwrap_or(v)
}

fn format_sig(v: f64) -> String {
    round_sig(v).to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    /// Reference value, where one is defined.
    pub analytic: Option<f64>,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Free-form detail, e.g. a witness description.
    #[serde(default)]
    pub note: String,
}

impl ReportRow {
    /// |computed − analytic| ≤ tolerance.
    pub fn close(name: impl Into<String>, analytic: f64, computed: f64, tolerance: f64) -> Self {
        let pass = (computed - analytic).abs() <= tolerance;
        Self::new(name, Some(analytic), computed, tolerance, pass)
    }

    /// computed ≤ bound + tolerance.
    pub fn at_most(name: impl Into<String>, bound: f64, computed: f64, tolerance: f64) -> Self {
        Self::new(name, Some(bound), computed, tolerance, computed <= bound + tolerance)
    }

    /// computed ≥ bound − tolerance.
    pub fn at_least(name: impl Into<String>, bound: f64, computed: f64, tolerance: f64) -> Self {
        Self::new(name, Some(bound), computed, tolerance, computed >= bound - tolerance)
    }

    /// A yes/no check reported as 1 or 0 against an expected value.
    pub fn flag(name: impl Into<String>, expected: bool, observed: bool) -> Self {
        Self::new(name, Some(f64::from(u8::from(expected))), f64::from(u8::from(observed)), 0.0, expected == observed)
    }

    pub fn new(name: impl Into<String>, analytic: Option<f64>, computed: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            analytic: analytic.map(round_sig),
            computed: round_sig(computed),
            tolerance: round_sig(tolerance),
            pass: pass && computed.is_finite(),
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub parameters: BTreeMap<String, String>,
    pub rows: Vec<ReportRow>,
    pub passed: bool,
    /// Wall-clock seconds; the only field that varies between identical runs.
    pub duration_s: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Process exit status: 0 iff every row passes.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Runs the configured experiment. Everything except `duration_s` is a
/// function of the configuration alone.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let rows = runs::dispatch(config)?;
    let passed = rows.iter().all(|r| r.pass);
    Ok(Report {
        experiment: config.experiment.id().to_string(),
        parameters: config.echo(),
        rows,
        passed,
        duration_s: round_sig(start.elapsed().as_secs_f64()),
    })
}

/// Renders a report. JSON is a single object; CSV is a header followed by
/// one line per row.
pub fn emit(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(report).map_err(|e| Error::MalformedReport(e.to_string())),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &report.rows {
                w.serialize(row).map_err(|e| Error::MalformedReport(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::MalformedReport(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::MalformedReport(e.to_string()))
        }
    }
}

/// Reads back the rows written by [`emit`] in CSV form.
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::MalformedReport(e.to_string())))
        .collect()
}

pub fn parse_json(text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(|e| Error::MalformedReport(e.to_string()))
}
