//! Pulse envelopes and the (ω, 2ω) two-color field, instantaneous and cycle-averaged.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units;

/// Plateau-to-rise ratio of the default trapezoid: rise = fall = τ/4, plateau = 3τ/4.
pub const DEFAULT_PLATEAU_RATIO: f64 = 3.0;
/// Carrier frequency of an 800 nm laser, cm⁻¹.
pub const DEFAULT_OMEGA_WAVENUMBER: f64 = 12_500.0;
/// Relative field level at which a Gaussian envelope is cut to zero.
pub const GAUSSIAN_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PulseShape {
    /// Linear rise, flat plateau, linear fall; `plateau_ratio` = plateau duration / rise time.
    Trapezoid {
        plateau_ratio: f64,
    },
    Gaussian,
}

impl PulseShape {
    pub fn trapezoid() -> Self {
        PulseShape::Trapezoid {
            plateau_ratio: DEFAULT_PLATEAU_RATIO,
        }
    }

    /// Envelope at time `u` from the pulse center; `tau` is the FWHM of the field envelope.
    fn value(&self, u: f64, tau: f64) -> f64 {
        match *self {
            PulseShape::Trapezoid { plateau_ratio } => {
                let rise = tau / (1.0 + plateau_ratio);
                let half_plateau = 0.5 * plateau_ratio * rise;
                let a = u.abs();
                if a <= half_plateau {
                    1.0
                } else if a < half_plateau + rise {
                    (half_plateau + rise - a) / rise
                } else {
                    0.0
                }
            }
            PulseShape::Gaussian => {
                let f = (-4.0 * std::f64::consts::LN_2 * u * u / (tau * tau)).exp();
                if f < GAUSSIAN_FLOOR {
                    0.0
                } else {
                    f
                }
            }
        }
    }

    /// Half-width of the region where the envelope is nonzero.
    fn half_support(&self, tau: f64) -> f64 {
        match *self {
            PulseShape::Trapezoid { plateau_ratio } => {
                tau * (0.5 * plateau_ratio + 1.0) / (1.0 + plateau_ratio)
            }
            PulseShape::Gaussian => {
                tau * ((1.0 / GAUSSIAN_FLOOR).ln() / (4.0 * std::f64::consts::LN_2)).sqrt()
            }
        }
    }
}

/// One laser pulse. Lab units: ps, W/cm², cm⁻¹, rad.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub shape: PulseShape,
    /// FWHM of the field envelope, ps.
    pub tau_ps: f64,
    /// Total peak intensity of both colors, W/cm².
    pub intensity_w_cm2: f64,
    /// Amplitude share of the fundamental; the second harmonic carries sqrt(1 - γ²).
    pub gamma: f64,
    /// Phase of the second harmonic relative to the fundamental, rad.
    pub delta_cep: f64,
    /// Pulse center, ps (the second pulse of a [`FieldConfig`] is further shifted by the delay).
    pub t_center_ps: f64,
    pub omega_wavenumber: f64,
}

impl PulseSpec {
    /// Trapezoidal two-color pulse centred at t = 0 with the 800 nm carrier.
    pub fn two_color(tau_ps: f64, intensity_w_cm2: f64, gamma_sq: f64, delta_cep: f64) -> Self {
        PulseSpec {
            shape: PulseShape::trapezoid(),
            tau_ps,
            intensity_w_cm2,
            gamma: gamma_sq.max(0.0).sqrt(),
            delta_cep,
            t_center_ps: 0.0,
            omega_wavenumber: DEFAULT_OMEGA_WAVENUMBER,
        }
    }

    pub fn monochromatic(tau_ps: f64, intensity_w_cm2: f64) -> Self {
        Self::two_color(tau_ps, intensity_w_cm2, 1.0, 0.0)
    }

    pub fn gamma_sq(&self) -> f64 {
        self.gamma * self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.tau_ps,
            self.intensity_w_cm2,
            self.gamma,
            self.delta_cep,
            self.t_center_ps,
            self.omega_wavenumber,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::config("pulse parameters must be finite"));
        }
        if self.tau_ps <= 0.0 {
            return Err(Error::domain(format!(
                "pulse duration must be positive, got {} ps",
                self.tau_ps
            )));
        }
        if self.intensity_w_cm2 < 0.0 {
            return Err(Error::domain("pulse intensity must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::domain(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if self.omega_wavenumber <= 0.0 {
            return Err(Error::domain("carrier frequency must be positive"));
        }
        if let PulseShape::Trapezoid { plateau_ratio } = self.shape {
            if !(plateau_ratio.is_finite() && plateau_ratio >= 0.0) {
                return Err(Error::domain(
                    "plateau ratio must be finite and non-negative",
                ));
            }
        }
        Ok(())
    }

    /// (start, end) of the envelope support, ps, for a pulse centred at `t_center_ps`.
    pub fn support(&self) -> (f64, f64) {
        let h = self.shape.half_support(self.tau_ps);
        (self.t_center_ps - h, self.t_center_ps + h)
    }
}

/// Envelope `f(t)` in [0, 1] of a pulse at lab time `t_ps`.
pub fn envelope(pulse: &PulseSpec, t_ps: f64) -> f64 {
    pulse.shape.value(t_ps - pulse.t_center_ps, pulse.tau_ps)
}

/// One or two pulses; the second is delayed by `t_delay_ps` (center to center).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub pulses: Vec<PulseSpec>,
    pub t_delay_ps: f64,
}

impl FieldConfig {
    pub fn single(pulse: PulseSpec) -> Self {
        FieldConfig {
            pulses: vec![pulse],
            t_delay_ps: 0.0,
        }
    }

    pub fn pair(first: PulseSpec, second: PulseSpec, t_delay_ps: f64) -> Self {
        FieldConfig {
            pulses: vec![first, second],
            t_delay_ps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pulses.is_empty() || self.pulses.len() > 2 {
            return Err(Error::config(format!(
                "need one or two pulses, got {}",
                self.pulses.len()
            )));
        }
        if !self.t_delay_ps.is_finite() {
            return Err(Error::config("pulse delay must be finite"));
        }
        for p in &self.pulses {
            p.validate()?;
        }
        if self.pulses.len() == 2
            && self.pulses[0].omega_wavenumber != self.pulses[1].omega_wavenumber
        {
            return Err(Error::config(
                "both pulses must share the carrier frequency",
            ));
        }
        Ok(())
    }

    /// Pulses with their centers shifted to absolute lab time.
    pub fn placed_pulses(&self) -> Vec<PulseSpec> {
        self.pulses
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut p = p.clone();
                if i == 1 {
                    p.t_center_ps += self.t_delay_ps;
                }
                p
            })
            .collect()
    }

    /// (first turn-on, last turn-off), ps.
    pub fn window(&self) -> (f64, f64) {
        self.placed_pulses()
            .iter()
            .map(PulseSpec::support)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (s, e)| {
                (a.min(s), b.max(e))
            })
    }
}

/// E, E², E³ (or their cycle averages) at one instant, atomic units.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldMoments {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl FieldMoments {
    pub fn instantaneous(e: f64) -> Self {
        FieldMoments {
            e1: e,
            e2: e * e,
            e3: e * e * e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.e1 == 0.0 && self.e2 == 0.0 && self.e3 == 0.0
    }
}

#[derive(Clone, Debug)]
struct CompiledPulse {
    shape: PulseShape,
    tau: f64,
    center: f64,
    e0: f64,
    gamma: f64,
    sh: f64,
    delta: f64,
    omega: f64,
    support: (f64, f64),
}

impl CompiledPulse {
    fn envelope(&self, t: f64) -> f64 {
        self.shape.value(t - self.center, self.tau)
    }
}

/// A [`FieldConfig`] converted to atomic units for fast evaluation.
#[derive(Clone, Debug)]
pub struct Field {
    pulses: Vec<CompiledPulse>,
    omega: f64,
}

impl Field {
    pub fn new(config: &FieldConfig) -> Result<Self> {
        config.validate()?;
        let mut pulses = Vec::new();
        for p in config.placed_pulses() {
            let (s, e) = p.support();
            pulses.push(CompiledPulse {
                shape: p.shape,
                tau: units::ps_to_au(p.tau_ps),
                center: units::ps_to_au(p.t_center_ps),
                e0: units::intensity_to_peak_field(p.intensity_w_cm2)?,
                gamma: p.gamma,
                sh: (1.0 - p.gamma * p.gamma).max(0.0).sqrt(),
                delta: p.delta_cep,
                omega: units::wavenumber_to_hartree(p.omega_wavenumber),
                support: (units::ps_to_au(s), units::ps_to_au(e)),
            });
        }
        let omega = pulses[0].omega;
        Ok(Field { pulses, omega })
    }

    /// Carrier angular frequency of the fundamental, atomic units.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// (first turn-on, last turn-off), atomic units.
    pub fn window(&self) -> (f64, f64) {
        self.pulses
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p.support.0), b.max(p.support.1))
            })
    }

    /// True when no pulse overlaps the open interval (t0, t1).
    pub fn is_off_between(&self, t0: f64, t1: f64) -> bool {
        self.pulses
            .iter()
            .all(|p| p.support.1 <= t0 || p.support.0 >= t1)
    }

    /// Envelope of each pulse (second entry is 0 for single-pulse fields).
    pub fn envelopes(&self, t: f64) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (o, p) in out.iter_mut().zip(&self.pulses) {
            *o = p.envelope(t);
        }
        out
    }

    /// Instantaneous field E(t), atomic units. Each pulse's carrier phase is zero at its center.
    pub fn value(&self, t: f64) -> f64 {
        self.pulses
            .iter()
            .map(|p| {
                let f = p.envelope(t);
                if f == 0.0 {
                    return 0.0;
                }
                let u = t - p.center;
                p.e0 * f
                    * (p.gamma * (p.omega * u).cos() + p.sh * (2.0 * p.omega * u + p.delta).cos())
            })
            .sum()
    }

    /// Averages of E, E², E³ over one fundamental cycle with the envelopes frozen at `t`.
    ///
    /// Writing the total field as `Re[A₁ e^{iωt}] + Re[A₂ e^{2iωt}]` gives
    /// ⟨E⟩ = 0, ⟨E²⟩ = (|A₁|² + |A₂|²)/2 and ⟨E³⟩ = (3/4) Re[A₁² A₂*], which also covers
    /// overlapping pulses.
    pub fn cycle_averaged(&self, t: f64) -> FieldMoments {
        let mut a1 = Complex64::new(0.0, 0.0);
        let mut a2 = Complex64::new(0.0, 0.0);
        for p in &self.pulses {
            let f = p.envelope(t);
            if f == 0.0 {
                continue;
            }
            let amp = p.e0 * f;
            a1 += Complex64::from_polar(amp * p.gamma, -p.omega * p.center);
            a2 += Complex64::from_polar(amp * p.sh, p.delta - 2.0 * p.omega * p.center);
        }
        FieldMoments {
            e1: 0.0,
            e2: 0.5 * (a1.norm_sqr() + a2.norm_sqr()),
            e3: 0.75 * (a1 * a1 * a2.conj()).re,
        }
    }
}

/// Instantaneous field (atomic units) of `config` at lab time `t_ps`.
pub fn instantaneous_field(config: &FieldConfig, t_ps: f64) -> Result<f64> {
    Ok(Field::new(config)?.value(units::ps_to_au(t_ps)))
}

/// Cycle-averaged ⟨E⟩, ⟨E²⟩, ⟨E³⟩ of a single pulse at lab time `t_ps`, atomic units.
pub fn cycle_averaged_coefficients(pulse: &PulseSpec, t_ps: f64) -> Result<FieldMoments> {
    let field = Field::new(&FieldConfig::single(pulse.clone()))?;
    Ok(field.cycle_averaged(units::ps_to_au(t_ps)))
}
