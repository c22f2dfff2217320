//! Experiment configuration: TOML with sections, every physical quantity written with a unit.
//!
//! ```toml
//! name = "fig5a_T30K"
//!
//! [molecule]
//! preset = "HBr"
//!
//! [[pulse]]
//! shape = "trapezoid"
//! tau = "0.12 ps"
//! intensity = "7e13 W/cm2"
//! gamma_sq = 0.6667
//! cep = "0 rad"
//!
//! [ensemble]
//! temperature = "30 K"
//!
//! [numerics]
//! mode = "cycle-averaged"
//! dt = "0.25 fs"
//!
//! [sweep]
//! parameter = "tau"
//! unit = "ps"
//! start = 0.05
//! stop = 0.5
//! count = 46
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::DEFAULT_J_MAX;
use crate::error::{Error, Result};
use crate::field::{
    FieldConfig, PulseShape, PulseSpec, DEFAULT_OMEGA_WAVENUMBER, DEFAULT_PLATEAU_RATIO,
};
use crate::molecule::{self, BetaUnit, MoleculeParams, DEFAULT_TRUNCATION_EPSILON};
use crate::propagator::{Convergence, Mode, PropagationConfig};
use crate::units::{parse_quantity, Dimension};

/// Longest allowed spacing between stored samples.
pub const MAX_SAMPLE_STEP_PS: f64 = 2e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Numerics {
    pub mode: Mode,
    pub dt_ps: f64,
    pub j_max: u32,
    pub sample_step_ps: f64,
    /// Field-free span scanned for post-pulse extrema; two rotational periods unless set.
    pub post_window_ps: f64,
    /// Stretch of field-free evolution recorded before the first pulse.
    pub lead_in_ps: f64,
    pub convergence: Convergence,
}

impl Numerics {
    /// Defaults for `mode`: step size from the mode, J_max = 40, 2 fs sampling, 2 T_rot window.
    pub fn defaults(mode: Mode, molecule: &MoleculeParams) -> Self {
        Numerics {
            mode,
            dt_ps: PropagationConfig::default_dt_ps(mode, DEFAULT_OMEGA_WAVENUMBER),
            j_max: DEFAULT_J_MAX,
            sample_step_ps: MAX_SAMPLE_STEP_PS,
            post_window_ps: 2.0 * molecule::rotational_period(molecule),
            lead_in_ps: 0.01,
            convergence: Convergence::Off,
        }
    }

    /// Stored-sample stride in steps.
    pub fn sample_every(&self) -> usize {
        ((self.sample_step_ps / self.dt_ps) + 1e-9).floor().max(1.0) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// FWHM of every pulse.
    Tau,
    /// γ² of every pulse.
    GammaSq,
    DeltaCep1,
    DeltaCep2,
    TDelay,
    /// Total peak intensity of every pulse.
    #[serde(rename = "I_tot")]
    ITot,
    Temperature,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Tau => "tau",
            SweepParam::GammaSq => "gamma_sq",
            SweepParam::DeltaCep1 => "delta_cep_1",
            SweepParam::DeltaCep2 => "delta_cep_2",
            SweepParam::TDelay => "t_delay",
            SweepParam::ITot => "I_tot",
            SweepParam::Temperature => "temperature",
        }
    }

    /// Unit dimension of the grid values, `None` for dimensionless γ².
    pub fn dimension(self) -> Option<Dimension> {
        match self {
            SweepParam::Tau | SweepParam::TDelay => Some(Dimension::Time),
            SweepParam::GammaSq => None,
            SweepParam::DeltaCep1 | SweepParam::DeltaCep2 => Some(Dimension::Angle),
            SweepParam::ITot => Some(Dimension::Intensity),
            SweepParam::Temperature => Some(Dimension::Temperature),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tau" => SweepParam::Tau,
            "gamma_sq" => SweepParam::GammaSq,
            "delta_cep_1" => SweepParam::DeltaCep1,
            "delta_cep_2" => SweepParam::DeltaCep2,
            "t_delay" => SweepParam::TDelay,
            "I_tot" => SweepParam::ITot,
            "temperature" => SweepParam::Temperature,
            other => {
                return Err(Error::config(format!(
                    "unknown sweep parameter '{other}' (expected tau, gamma_sq, delta_cep_1, delta_cep_2, t_delay, I_tot or temperature)"
                )))
            }
        })
    }
}

/// Sweep grid in canonical units (ps, rad, W/cm², K).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
}

impl Sweep {
    /// `count` evenly spaced points from `start` to `stop` inclusive.
    pub fn linspace(parameter: SweepParam, start: f64, stop: f64, count: usize) -> Self {
        let values = match count {
            0 => vec![],
            1 => vec![start],
            n => (0..n)
                .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                .collect(),
        };
        Sweep { parameter, values }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::config("sweep grid is empty"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("sweep grid contains non-finite values"));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("sweep grid must be strictly increasing"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub molecule: MoleculeParams,
    pub field: FieldConfig,
    /// Kelvin.
    pub temperature: f64,
    pub ensemble_epsilon: f64,
    pub numerics: Numerics,
    pub sweep: Option<Sweep>,
    /// Directory for CSV/JSON output; nothing is written when absent.
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// HBr, one trapezoidal two-color pulse, cycle-averaged numerics, no sweep.
    pub fn new(name: impl Into<String>, field: FieldConfig, temperature: f64) -> Self {
        let molecule = MoleculeParams::hbr();
        let numerics = Numerics::defaults(Mode::CycleAveraged, &molecule);
        ExperimentConfig {
            name: name.into(),
            molecule,
            field,
            temperature,
            ensemble_epsilon: DEFAULT_TRUNCATION_EPSILON,
            numerics,
            sweep: None,
            output_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::config(
                "experiment name must be a non-empty file stem",
            ));
        }
        molecule::convert_to_internal(&self.molecule)?;
        self.field.validate()?;
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::domain("temperature must be >= 0 K"));
        }
        let n = &self.numerics;
        if n.sample_step_ps > MAX_SAMPLE_STEP_PS * (1.0 + 1e-12) {
            return Err(Error::config(format!(
                "sample_step must not exceed {} fs",
                MAX_SAMPLE_STEP_PS * 1e3
            )));
        }
        if n.post_window_ps.is_nan()
            || n.post_window_ps <= 0.0
            || n.lead_in_ps.is_nan()
            || n.lead_in_ps < 0.0
        {
            return Err(Error::config(
                "post_window must be positive and lead_in non-negative",
            ));
        }
        self.propagation()?
            .validate(self.field.pulses[0].omega_wavenumber)?;
        if let Some(s) = &self.sweep {
            s.validate()?;
            for &v in &s.values {
                self.with_parameter(s.parameter, v)?.field.validate()?;
            }
        }
        Ok(())
    }

    /// Propagation window and numerics for this configuration.
    pub fn propagation(&self) -> Result<PropagationConfig> {
        self.field.validate()?;
        let (t_on, t_off) = self.field.window();
        let n = &self.numerics;
        Ok(PropagationConfig {
            mode: n.mode,
            dt_ps: n.dt_ps,
            t_start_ps: t_on - n.lead_in_ps,
            t_end_ps: t_off + n.post_window_ps,
            sample_every: n.sample_every(),
            j_max: n.j_max,
            convergence: n.convergence,
        })
    }

    /// Copy with one scalar replaced (canonical units); the sweep section is dropped.
    pub fn with_parameter(&self, param: SweepParam, value: f64) -> Result<Self> {
        let mut c = self.clone();
        c.sweep = None;
        let need_second = |c: &ExperimentConfig| {
            if c.field.pulses.len() < 2 {
                Err(Error::config(format!(
                    "sweep parameter {param} needs two pulses"
                )))
            } else {
                Ok(())
            }
        };
        match param {
            SweepParam::Tau => c.field.pulses.iter_mut().for_each(|p| p.tau_ps = value),
            SweepParam::GammaSq => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::domain(format!(
                        "gamma_sq must lie in [0, 1], got {value}"
                    )));
                }
                c.field
                    .pulses
                    .iter_mut()
                    .for_each(|p| p.gamma = value.sqrt())
            }
            SweepParam::DeltaCep1 => c.field.pulses[0].delta_cep = value,
            SweepParam::DeltaCep2 => {
                need_second(&c)?;
                c.field.pulses[1].delta_cep = value
            }
            SweepParam::TDelay => {
                need_second(&c)?;
                c.field.t_delay_ps = value
            }
            SweepParam::ITot => c
                .field
                .pulses
                .iter_mut()
                .for_each(|p| p.intensity_w_cm2 = value),
            SweepParam::Temperature => c.temperature = value,
        }
        Ok(c)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        let cfg = raw.resolve()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    #[serde(default)]
    molecule: RawMolecule,
    pulse: Vec<RawPulse>,
    #[serde(default)]
    field: RawField,
    ensemble: RawEnsemble,
    #[serde(default)]
    numerics: RawNumerics,
    sweep: Option<RawSweep>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMolecule {
    preset: Option<String>,
    name: Option<String>,
    #[serde(rename = "B")]
    b: Option<String>,
    mu0: Option<String>,
    alpha_par: Option<String>,
    alpha_perp: Option<String>,
    beta_par: Option<f64>,
    beta_perp: Option<f64>,
    beta_unit: Option<String>,
    #[serde(rename = "gJ_even")]
    gj_even: Option<f64>,
    #[serde(rename = "gJ_odd")]
    gj_odd: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    #[serde(default = "default_shape")]
    shape: String,
    plateau_ratio: Option<f64>,
    tau: String,
    intensity: String,
    gamma_sq: Option<f64>,
    gamma: Option<f64>,
    #[serde(default = "zero_angle")]
    cep: String,
    center: Option<String>,
    omega: Option<String>,
}

fn default_shape() -> String {
    "trapezoid".into()
}

fn zero_angle() -> String {
    "0 rad".into()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    delay: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    temperature: String,
    epsilon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    mode: Option<String>,
    dt: Option<String>,
    j_max: Option<u32>,
    sample_step: Option<String>,
    post_window: Option<String>,
    lead_in: Option<String>,
    /// Absent or "off" disables refinement; a number enables it with that tolerance.
    convergence_tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: String,
    unit: Option<String>,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: PathBuf,
}

impl RawConfig {
    fn resolve(self) -> Result<ExperimentConfig> {
        let molecule = self.molecule.resolve()?;
        if self.pulse.is_empty() || self.pulse.len() > 2 {
            return Err(Error::config(format!(
                "need one or two [[pulse]] tables, got {}",
                self.pulse.len()
            )));
        }
        let pulses = self
            .pulse
            .into_iter()
            .map(RawPulse::resolve)
            .collect::<Result<Vec<_>>>()?;
        let t_delay_ps = match self.field.delay {
            Some(d) => parse_quantity(&d, Dimension::Time)?,
            None => 0.0,
        };
        let field = FieldConfig { pulses, t_delay_ps };
        let temperature = parse_quantity(&self.ensemble.temperature, Dimension::Temperature)?;
        let numerics = self
            .numerics
            .resolve(&molecule, field.pulses[0].omega_wavenumber)?;
        let sweep = self.sweep.map(RawSweep::resolve).transpose()?;
        Ok(ExperimentConfig {
            name: self.name,
            molecule,
            field,
            temperature,
            ensemble_epsilon: self.ensemble.epsilon.unwrap_or(DEFAULT_TRUNCATION_EPSILON),
            numerics,
            sweep,
            output_dir: self.output.map(|o| o.dir),
        })
    }
}

impl RawMolecule {
    fn resolve(self) -> Result<MoleculeParams> {
        let mut m = match &self.preset {
            Some(name) => MoleculeParams::preset(name)?,
            None => {
                let required = [&self.b, &self.mu0, &self.alpha_par, &self.alpha_perp];
                if required.iter().any(|v| v.is_none())
                    || self.beta_par.is_none()
                    || self.beta_perp.is_none()
                    || self.beta_unit.is_none()
                {
                    return Err(Error::config(
                        "inline molecule needs B, mu0, alpha_par, alpha_perp, beta_par, beta_perp and beta_unit",
                    ));
                }
                MoleculeParams {
                    name: "custom".into(),
                    ..MoleculeParams::hbr()
                }
            }
        };
        if let Some(n) = self.name {
            m.name = n;
        }
        if let Some(v) = self.b {
            m.b_wavenumber = parse_quantity(&v, Dimension::Wavenumber)?;
        }
        if let Some(v) = self.mu0 {
            m.mu0_debye = parse_quantity(&v, Dimension::Dipole)?;
        }
        if let Some(v) = self.alpha_par {
            m.alpha_par_a3 = parse_quantity(&v, Dimension::Polarizability)?;
        }
        if let Some(v) = self.alpha_perp {
            m.alpha_perp_a3 = parse_quantity(&v, Dimension::Polarizability)?;
        }
        if let Some(v) = self.beta_par {
            m.beta_par = v;
        }
        if let Some(v) = self.beta_perp {
            m.beta_perp = v;
        }
        if let Some(tag) = self.beta_unit {
            m.beta_unit = tag.parse::<BetaUnit>()?;
        }
        if let Some(g) = self.gj_even {
            m.gj_even = g;
        }
        if let Some(g) = self.gj_odd {
            m.gj_odd = g;
        }
        Ok(m)
    }
}

impl RawPulse {
    fn resolve(self) -> Result<PulseSpec> {
        let shape = match (self.shape.as_str(), self.plateau_ratio) {
            ("trapezoid", r) => PulseShape::Trapezoid {
                plateau_ratio: r.unwrap_or(DEFAULT_PLATEAU_RATIO),
            },
            ("gaussian", None) => PulseShape::Gaussian,
            ("gaussian", Some(_)) => {
                return Err(Error::config(
                    "plateau_ratio only applies to trapezoid pulses",
                ))
            }
            (other, _) => return Err(Error::config(format!("unknown pulse shape '{other}'"))),
        };
        let gamma = match (self.gamma_sq, self.gamma) {
            (Some(g2), None) => {
                if !(0.0..=1.0).contains(&g2) {
                    return Err(Error::domain(format!(
                        "gamma_sq must lie in [0, 1], got {g2}"
                    )));
                }
                g2.sqrt()
            }
            (None, Some(g)) => g,
            (None, None) => return Err(Error::config("pulse needs gamma_sq or gamma")),
            (Some(_), Some(_)) => return Err(Error::config("give gamma_sq or gamma, not both")),
        };
        Ok(PulseSpec {
            shape,
            tau_ps: parse_quantity(&self.tau, Dimension::Time)?,
            intensity_w_cm2: parse_quantity(&self.intensity, Dimension::Intensity)?,
            gamma,
            delta_cep: parse_quantity(&self.cep, Dimension::Angle)?,
            t_center_ps: match self.center {
                Some(c) => parse_quantity(&c, Dimension::Time)?,
                None => 0.0,
            },
            omega_wavenumber: match self.omega {
                Some(w) => parse_quantity(&w, Dimension::Wavenumber)?,
                None => DEFAULT_OMEGA_WAVENUMBER,
            },
        })
    }
}

impl RawNumerics {
    fn resolve(self, molecule: &MoleculeParams, omega: f64) -> Result<Numerics> {
        let mode = match self.mode.as_deref() {
            None | Some("cycle-averaged") => Mode::CycleAveraged,
            Some("full-field") => Mode::FullField,
            Some(other) => {
                return Err(Error::config(format!("unknown propagation mode '{other}'")))
            }
        };
        let mut n = Numerics::defaults(mode, molecule);
        n.dt_ps = match self.dt {
            Some(dt) => parse_quantity(&dt, Dimension::Time)?,
            None => PropagationConfig::default_dt_ps(mode, omega),
        };
        if let Some(j) = self.j_max {
            n.j_max = j;
        }
        if let Some(s) = self.sample_step {
            n.sample_step_ps = parse_quantity(&s, Dimension::Time)?;
        }
        if let Some(w) = self.post_window {
            n.post_window_ps = parse_quantity(&w, Dimension::Time)?;
        }
        if let Some(l) = self.lead_in {
            n.lead_in_ps = parse_quantity(&l, Dimension::Time)?;
        }
        if let Some(tol) = self.convergence_tolerance {
            n.convergence = Convergence::Auto { tolerance: tol };
        }
        Ok(n)
    }
}

impl RawSweep {
    fn resolve(self) -> Result<Sweep> {
        let parameter: SweepParam = self.parameter.parse()?;
        let scale = match (parameter.dimension(), &self.unit) {
            (None, None) => 1.0,
            (None, Some(_)) => {
                return Err(Error::config("gamma_sq is dimensionless; drop the unit"))
            }
            (Some(dim), Some(unit)) => parse_quantity(&format!("1 {unit}"), dim)?,
            (Some(dim), None) => {
                return Err(Error::config(format!(
                    "sweep over {parameter} needs a {dim} unit"
                )))
            }
        };
        let sweep = match (self.values, self.start, self.stop, self.count) {
            (Some(values), None, None, None) => Sweep { parameter, values },
            (None, Some(a), Some(b), Some(n)) => Sweep::linspace(parameter, a, b, n),
            _ => {
                return Err(Error::config(
                    "sweep needs either `values` or `start`, `stop` and `count`",
                ))
            }
        };
        Ok(Sweep {
            parameter,
            values: sweep.values.into_iter().map(|v| v * scale).collect(),
        })
    }
}
