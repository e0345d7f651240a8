//! Run configuration: one strict JSON document per scenario.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use majorasim_core::evolution::Parity;
use majorasim_core::fock::OracleId;
use majorasim_core::{BraidWord, Direction, RampShape, WireParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("sweep `{0}`: expected key=v1,v2,...")]
    Sweep(String),
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Braid,
    BraidWord,
    DeutschJozsa,
    Spectrum,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Braid => "braid",
            Self::BraidWord => "braid-word",
            Self::DeutschJozsa => "deutsch-jozsa",
            Self::Spectrum => "spectrum",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| invalid("scenario", format!("unknown scenario {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DjMode {
    Fock,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    L,
    R,
}

/// A Majorana end mode: `L2` is the left end of wire 2 (one-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeSelector {
    pub end: End,
    pub wire: usize,
}

impl fmt::Display for ModeSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = match self.end {
            End::L => 'L',
            End::R => 'R',
        };
        write!(f, "{e}{}", self.wire)
    }
}

impl FromStr for ModeSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (end, rest) = match s.chars().next() {
            Some('L') | Some('l') => (End::L, &s[1..]),
            Some('R') | Some('r') => (End::R, &s[1..]),
            _ => return Err(format!("mode {s:?} must start with L or R")),
        };
        let wire: usize = rest
            .parse()
            .map_err(|_| format!("mode {s:?} has no wire number"))?;
        if wire == 0 {
            return Err("wire numbers start at 1".into());
        }
        Ok(Self { end, wire })
    }
}

/// `<i gamma_a gamma_b>` for two end modes, written "L1 R2".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ObservableSpec {
    pub a: ModeSelector,
    pub b: ModeSelector,
}

impl ObservableSpec {
    pub fn lr(m: usize, n: usize) -> Self {
        Self {
            a: ModeSelector {
                end: End::L,
                wire: m,
            },
            b: ModeSelector {
                end: End::R,
                wire: n,
            },
        }
    }

    /// Column name, e.g. `iGL1GR2`.
    pub fn column(&self) -> String {
        format!("iG{}G{}", self.a, self.b)
    }

    pub fn max_wire(&self) -> usize {
        self.a.wire.max(self.b.wire)
    }
}

impl FromStr for ObservableSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let [a, b] = tokens[..] else {
            return Err(format!(
                "observable {s:?} must name two modes, like \"L1 R2\""
            ));
        };
        let spec = Self {
            a: a.parse()?,
            b: b.parse()?,
        };
        if spec.a == spec.b {
            return Err(format!("observable {s:?} pairs a mode with itself"));
        }
        Ok(spec)
    }
}

fn default_ramp() -> RampShape {
    RampShape::Smooth
}

fn default_duration() -> f64 {
    50.0
}

fn default_dt() -> f64 {
    0.02
}

fn default_stride() -> usize {
    100
}

fn default_phi_points() -> usize {
    21
}

fn default_tolerance() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    /// Parameters shared by every wire; required except for deutsch-jozsa.
    #[serde(default)]
    pub wire: Option<WireParams>,
    /// Number of wires; defaults to the minimum the scenario needs.
    #[serde(default)]
    pub wires: Option<usize>,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_ramp")]
    pub ramp: RampShape,
    /// Duration of each protocol step, in units of `1/J`.
    #[serde(default = "default_duration")]
    pub step_duration: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Exchange direction of the braid scenario.
    #[serde(default)]
    pub direction: Option<Direction>,
    /// Time-ordered braid word of the braid-word scenario.
    #[serde(default)]
    pub word: Option<String>,
    #[serde(default)]
    pub observables: Option<Vec<String>>,
    /// Initial parity of each wire; all even by default.
    #[serde(default)]
    pub initial_parity: Option<Vec<Parity>>,
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
    #[serde(default)]
    pub oracle: Option<OracleId>,
    #[serde(default)]
    pub mode: Option<DjMode>,
    /// Grid points per protocol step of the spectrum scenario.
    #[serde(default = "default_phi_points")]
    pub phi_points: usize,
    /// Allowed endpoint error against the exact-braid prediction.
    #[serde(default = "default_tolerance")]
    pub endpoint_tolerance: f64,
    /// Output directory, overridden by `--out`.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json_str(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_value(value: Value, origin: &Path) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_value(value).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read(path)?;
        Self::from_json_str(&text, path)
    }

    pub fn wire_params(&self) -> Result<WireParams, ConfigError> {
        self.wire
            .ok_or_else(|| invalid("wire", "required by this scenario"))
    }

    pub fn braid_word(&self) -> Result<BraidWord, ConfigError> {
        match self.scenario {
            ScenarioKind::Braid => Ok(match self.direction.unwrap_or(Direction::Forward) {
                Direction::Forward => "s1",
                Direction::Reverse => "s1'",
            }
            .parse()
            .expect("literal word")),
            _ => {
                let text = self
                    .word
                    .as_deref()
                    .ok_or_else(|| invalid("word", "required by braid-word"))?;
                let word: BraidWord = text.parse().map_err(|e| invalid("word", format!("{e}")))?;
                if word.is_empty() {
                    return Err(invalid("word", "braid word is empty"));
                }
                Ok(word)
            }
        }
    }

    /// Wires in the network of a braid or spectrum run.
    pub fn wire_count(&self) -> Result<usize, ConfigError> {
        let min = match self.scenario {
            ScenarioKind::Braid | ScenarioKind::Spectrum => 2,
            ScenarioKind::BraidWord => (self.braid_word()?.max_index() + 1).max(3),
            ScenarioKind::DeutschJozsa => 3,
        };
        match self.wires {
            None => Ok(min),
            Some(w) if w >= min => Ok(w),
            Some(w) => Err(invalid(
                "wires",
                format!("scenario needs at least {min} wires, got {w}"),
            )),
        }
    }

    pub fn observable_specs(&self) -> Result<Vec<ObservableSpec>, ConfigError> {
        let wires = self.wire_count()?;
        let specs = match &self.observables {
            Some(list) => list
                .iter()
                .map(|s| s.parse::<ObservableSpec>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid("observables", e))?,
            None if self.scenario == ScenarioKind::Braid => vec![
                ObservableSpec::lr(1, 1),
                ObservableSpec::lr(2, 2),
                ObservableSpec::lr(2, 1),
                ObservableSpec::lr(1, 2),
            ],
            None => (1..=wires)
                .flat_map(|m| (1..=wires).map(move |n| ObservableSpec::lr(m, n)))
                .collect(),
        };
        if let Some(bad) = specs.iter().find(|s| s.max_wire() > wires) {
            return Err(invalid(
                "observables",
                format!("{} refers to a wire beyond {wires}", bad.column()),
            ));
        }
        Ok(specs)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = [
            ("alpha", self.alpha),
            ("step_duration", self.step_duration),
            ("dt", self.dt),
            ("endpoint_tolerance", self.endpoint_tolerance),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(invalid(field, "must be finite"));
            }
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(invalid(
                "alpha",
                format!("must lie in [0, 1), got {}", self.alpha),
            ));
        }
        if self.step_duration <= 0.0 {
            return Err(invalid("step_duration", "must be positive"));
        }
        if self.dt <= 0.0 || self.dt > self.step_duration {
            return Err(invalid("dt", "must be positive and at most step_duration"));
        }
        if self.sample_stride == 0 {
            return Err(invalid("sample_stride", "must be at least 1"));
        }
        if self.scenario == ScenarioKind::DeutschJozsa {
            if self.oracle.is_none() {
                return Err(invalid(
                    "oracle",
                    "required by deutsch-jozsa (g0, g1, g2 or g3)",
                ));
            }
            return Ok(());
        }
        let params = self.wire_params()?;
        params
            .validate()
            .map_err(|e| invalid("wire", e.to_string()))?;
        if self.scenario == ScenarioKind::Spectrum && self.phi_points < 2 {
            return Err(invalid("phi_points", "need at least 2 grid points"));
        }
        if self.scenario != ScenarioKind::BraidWord && self.word.is_some() {
            return Err(invalid("word", "only the braid-word scenario takes a word"));
        }
        let wires = self.wire_count()?;
        self.observable_specs()?;
        if let Some(p) = &self.initial_parity {
            if p.len() != wires {
                return Err(invalid(
                    "initial_parity",
                    format!("lists {} wires, network has {wires}", p.len()),
                ));
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `key=v1,v2,...` with a dotted key into the config document.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub values: Vec<Value>,
}

impl FromStr for Sweep {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let (key, list) = s
            .split_once('=')
            .ok_or_else(|| ConfigError::Sweep(s.to_string()))?;
        let key = key.trim();
        if key.is_empty() || list.trim().is_empty() {
            return Err(ConfigError::Sweep(s.to_string()));
        }
        let values = list
            .split(',')
            .map(|v| {
                let v = v.trim();
                serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()))
            })
            .collect();
        Ok(Self {
            key: key.to_string(),
            values,
        })
    }
}

fn set_path(doc: &mut Value, key: &str, value: Value) -> Result<(), ConfigError> {
    let mut cur = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| invalid(key, "sweep key does not address an object field"))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

/// A config variant with the label used for its output subdirectory.
#[derive(Clone, Debug)]
pub struct Variant {
    pub label: String,
    pub config: RunConfig,
}

/// Cartesian product of all sweeps applied to the base document.
pub fn expand(path: &Path, sweeps: &[Sweep]) -> Result<Vec<Variant>, ConfigError> {
    let text = read(path)?;
    if sweeps.is_empty() {
        return Ok(vec![Variant {
            label: String::new(),
            config: RunConfig::from_json_str(&text, path)?,
        }]);
    }
    let base: Value = serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut docs = vec![(Vec::<String>::new(), base)];
    for sweep in sweeps {
        let mut next = Vec::with_capacity(docs.len() * sweep.values.len());
        for (labels, doc) in &docs {
            for v in &sweep.values {
                let mut d = doc.clone();
                set_path(&mut d, &sweep.key, v.clone())?;
                let mut l = labels.clone();
                let shown = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                l.push(format!("{}={}", sweep.key, shown));
                next.push((l, d));
            }
        }
        docs = next;
    }
    docs.into_iter()
        .map(|(labels, doc)| {
            Ok(Variant {
                label: sanitize(&labels.join("_")),
                config: RunConfig::from_value(doc, path)?,
            })
        })
        .collect()
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "=._-+".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}
