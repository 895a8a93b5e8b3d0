//! TOML scenario configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::gates::{ElectronZ, TwoQubitConfig, TwoQubitFrame};
use crate::pulses::Pulse;
use crate::spectral::{Grid, PhysicalConstants};
use crate::{Error, Result};

/// Scenario kinds understood by `run`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Spectrum,
    Rabi,
    ScrapSingle,
    ScrapTwo,
    NonadiabaticSingle,
    NonadiabaticTwo,
    Bell,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Spectrum,
        Scenario::Rabi,
        Scenario::ScrapSingle,
        Scenario::ScrapTwo,
        Scenario::NonadiabaticSingle,
        Scenario::NonadiabaticTwo,
        Scenario::Bell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::Rabi => "rabi",
            Scenario::ScrapSingle => "scrap-single",
            Scenario::ScrapTwo => "scrap-two",
            Scenario::NonadiabaticSingle => "nonadiabatic-single",
            Scenario::NonadiabaticTwo => "nonadiabatic-two",
            Scenario::Bell => "bell",
        }
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(
            self,
            Scenario::ScrapTwo | Scenario::NonadiabaticTwo | Scenario::Bell
        )
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Scenario::ALL.iter().map(|k| k.name()).collect();
                Error::Usage(format!(
                    "unknown scenario '{s}' (known: {})",
                    known.join(", ")
                ))
            })
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    /// ns
    pub dt: f64,
    /// [t0, t1], ns
    pub window: [f64; 2],
}

/// Where the single-electron spectrum comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralSource {
    Solve {
        #[serde(default = "default_levels")]
        levels: usize,
        #[serde(default)]
        grid: Grid,
    },
    /// A JSON file written by the `spectrum` subcommand.
    File { path: PathBuf },
}

fn default_levels() -> usize {
    3
}

impl Default for SpectralSource {
    fn default() -> Self {
        SpectralSource::Solve {
            levels: default_levels(),
            grid: Grid::default(),
        }
    }
}

/// Constant resonant drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiParams {
    /// rad/ns
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoQubitParams {
    /// μm
    pub d: f64,
    #[serde(default = "default_cross_factor")]
    pub cross_factor: f64,
    pub z1: ElectronZ,
    pub z2: ElectronZ,
    /// rad/ns; when absent the |01⟩/|10⟩ crossing sits at t = 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_detuning: Option<f64>,
    #[serde(default)]
    pub frame: TwoQubitFrame,
}

fn default_cross_factor() -> f64 {
    1.0 / 8f64.sqrt()
}

impl TwoQubitParams {
    pub fn reference() -> Self {
        let r = TwoQubitConfig::reference(Pulse::Zero);
        Self {
            d: r.d,
            cross_factor: r.cross_factor,
            z1: r.z1,
            z2: r.z2,
            omega_detuning: None,
            frame: TwoQubitFrame::Subspace,
        }
    }

    pub fn build(&self, stark2: Pulse, constants: PhysicalConstants) -> Result<TwoQubitConfig> {
        let mut cfg = TwoQubitConfig {
            d: self.d,
            cross_factor: self.cross_factor,
            z1: self.z1,
            z2: self.z2,
            omega_detuning: 0.0,
            stark2,
            constants,
        };
        cfg.omega_detuning = match self.omega_detuning {
            Some(w) => w,
            None => cfg.resonant_omega(0.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    /// Write every n-th sample to the CSV.
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_stride() -> usize {
    1
}

impl Default for Output {
    fn default() -> Self {
        Self {
            csv: None,
            json: None,
            stride: default_stride(),
        }
    }
}

/// A complete run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Short name used for default output file names.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Initial basis state: "0", "1", "2" or "00", "01", "10", "11".
    #[serde(default = "default_initial")]
    pub initial: String,
    /// Wanted final populations; defaults to the initial state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
    pub numerics: Numerics,
    #[serde(default)]
    pub spectral: SpectralSource,
    #[serde(default)]
    pub constants: PhysicalConstants,
    /// Named pulses: `stark` and `pump` for one electron, `stark2` for the
    /// two-electron scenarios.
    #[serde(default)]
    pub pulses: BTreeMap<String, Pulse>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi: Option<RabiParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_qubit: Option<TwoQubitParams>,
    #[serde(default)]
    pub output: Output,
}

fn default_initial() -> String {
    "0".into()
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(self.scenario.name())
    }

    pub fn validate(&self) -> Result<()> {
        let [t0, t1] = self.numerics.window;
        if !(self.numerics.dt > 0.0) || !self.numerics.dt.is_finite() {
            return Err(Error::Config(format!(
                "numerics.dt must be positive, got {}",
                self.numerics.dt
            )));
        }
        if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::Config(format!(
                "numerics.window must be ordered, got [{t0}, {t1}]"
            )));
        }
        if self.output.stride == 0 {
            return Err(Error::Config("output.stride must be at least 1".into()));
        }
        for (name, p) in &self.pulses {
            p.validate()
                .map_err(|e| Error::Config(format!("pulses.{name}: {e}")))?;
        }
        self.constants.validate()?;
        match self.scenario {
            Scenario::Spectrum => {}
            Scenario::Rabi => {
                if self.rabi.is_none() {
                    return Err(Error::Config("rabi scenario needs a [rabi] table".into()));
                }
                self.qubit_index(2)?;
            }
            Scenario::ScrapSingle => {
                self.qubit_index(3)?;
            }
            Scenario::NonadiabaticSingle => {
                self.qubit_index(2)?;
            }
            Scenario::ScrapTwo | Scenario::NonadiabaticTwo | Scenario::Bell => {
                if self.two_qubit.is_none() {
                    return Err(Error::Config(format!(
                        "{} needs a [two_qubit] table",
                        self.scenario
                    )));
                }
                self.initial
                    .parse::<crate::gates::TwoQubitBasis>()
                    .map_err(|e| Error::Config(format!("initial: {e}")))?;
            }
        }
        if let Some(target) = &self.target {
            let want = self.state_count();
            if target.len() != want {
                return Err(Error::Config(format!(
                    "target has {} entries, {} scenario needs {want}",
                    target.len(),
                    self.scenario
                )));
            }
        }
        Ok(())
    }

    /// Basis index of a single-electron initial state below `levels`.
    pub fn qubit_index(&self, levels: usize) -> Result<usize> {
        match self.initial.parse::<usize>() {
            Ok(i) if i < levels => Ok(i),
            _ => Err(Error::Config(format!(
                "initial must be a level below {levels} for {}, got '{}'",
                self.scenario, self.initial
            ))),
        }
    }

    pub fn state_count(&self) -> usize {
        match self.scenario {
            Scenario::Spectrum => 0,
            Scenario::Rabi | Scenario::NonadiabaticSingle => 2,
            Scenario::ScrapSingle => 3,
            _ => 4,
        }
    }

    pub fn pulse(&self, name: &str) -> Pulse {
        self.pulses.get(name).copied().unwrap_or(Pulse::Zero)
    }

    /// Target populations, defaulting to "stay in the initial state".
    pub fn target_populations(&self) -> Result<Vec<f64>> {
        if let Some(t) = &self.target {
            return Ok(t.clone());
        }
        let n = self.state_count();
        let idx = if self.scenario.is_two_qubit() {
            self.initial.parse::<crate::gates::TwoQubitBasis>()?.index()
        } else {
            self.qubit_index(n)?
        };
        let mut t = vec![0.0; n];
        t[idx] = 1.0;
        Ok(t)
    }

    /// Set a dotted key (e.g. `pulses.stark.rate`) to a TOML literal.
    pub fn with_override(&self, key: &str, literal: &str) -> Result<Self> {
        let mut tree = toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        let mut node = &mut tree;
        let mut parts = key.split('.').peekable();
        while let Some(part) = parts.next() {
            let table = node
                .as_table_mut()
                .ok_or_else(|| Error::Config(format!("'{key}': '{part}' is not inside a table")))?;
            if parts.peek().is_none() {
                let value = match table.get(part) {
                    Some(toml::Value::String(_)) => toml::Value::String(literal.to_string()),
                    _ => parse_literal(literal)?,
                };
                table.insert(part.to_string(), value);
                break;
            }
            node = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(Default::default()));
        }
        let text = toml::to_string(&tree).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_toml(&text)
    }
}

fn parse_literal(literal: &str) -> Result<toml::Value> {
    let doc: toml::Table = toml::from_str(&format!("v = {literal}"))
        .or_else(|_| toml::from_str(&format!("v = {:?}", literal)))
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    Ok(doc["v"].clone())
}
