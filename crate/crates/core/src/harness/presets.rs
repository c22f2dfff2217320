//! Built-in experiment sets for HBr at 7e13 W/cm².

use std::f64::consts::TAU;

use super::config::{ExperimentConfig, Sweep, SweepParam};
use crate::error::{Error, Result};
use crate::field::{FieldConfig, PulseShape, PulseSpec};

pub const PRESET_NAMES: [&str; 11] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11",
];

pub const INTENSITY: f64 = 7e13;
pub const OPTIMAL_GAMMA_SQ: f64 = 2.0 / 3.0;
pub const TEMPERATURES: [f64; 4] = [1.0, 10.0, 20.0, 30.0];

/// Points kept in each sweep under `--fast`.
pub const FAST_POINTS: usize = 11;

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub description: &'static str,
    pub configs: Vec<ExperimentConfig>,
}

impl Preset {
    /// Thins every sweep grid to about [`FAST_POINTS`] values, keeping both ends.
    pub fn fast(mut self) -> Self {
        for c in &mut self.configs {
            if let Some(s) = &mut c.sweep {
                let n = s.values.len();
                if n > FAST_POINTS {
                    let picked: Vec<f64> = (0..FAST_POINTS)
                        .map(|i| {
                            s.values[(i * (n - 1) + (FAST_POINTS - 1) / 2) / (FAST_POINTS - 1)]
                        })
                        .collect();
                    s.values = picked;
                    s.values.dedup();
                }
            }
        }
        self
    }

    pub fn with_output_dir(mut self, dir: &std::path::Path) -> Self {
        for c in &mut self.configs {
            c.output_dir = Some(dir.to_path_buf());
        }
        self
    }
}

fn two_color(tau: f64) -> PulseSpec {
    PulseSpec::two_color(tau, INTENSITY, OPTIMAL_GAMMA_SQ, 0.0)
}

fn sweep(parameter: SweepParam, start: f64, stop: f64, count: usize) -> Option<Sweep> {
    Some(Sweep::linspace(parameter, start, stop, count))
}

fn kelvin_tag(t: f64) -> String {
    format!("T{t}K")
}

/// One config per temperature in [`TEMPERATURES`].
fn per_temperature(stem: &str, field: FieldConfig, sweep: Option<Sweep>) -> Vec<ExperimentConfig> {
    TEMPERATURES
        .iter()
        .map(|&t| {
            let mut c =
                ExperimentConfig::new(format!("{stem}_{}", kelvin_tag(t)), field.clone(), t);
            c.sweep = sweep.clone();
            c
        })
        .collect()
}

fn at_30k(name: &str, field: FieldConfig, sweep: Option<Sweep>) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(name, field, 30.0);
    c.sweep = sweep;
    c
}

/// Delay grid for the two-pulse schemes: 0 to 4 ps in 20 fs steps.
fn delay_sweep() -> Option<Sweep> {
    sweep(SweepParam::TDelay, 0.0, 4.0, 201)
}

fn cep_sweep(parameter: SweepParam) -> Option<Sweep> {
    sweep(parameter, 0.0, TAU, 101)
}

pub fn preset(name: &str) -> Result<Preset> {
    let (description, configs) = match name {
        "fig1" => (
            "max |orientation| vs gamma^2, 0.12 ps two-color pulse, 1/10/20/30 K",
            per_temperature("fig1", FieldConfig::single(two_color(0.12)), sweep(SweepParam::GammaSq, 0.0, 1.0, 101)),
        ),
        "fig2" => (
            "post-pulse max alignment and orientation vs duration, 1/10/20/30 K",
            per_temperature("fig2", FieldConfig::single(two_color(0.12)), sweep(SweepParam::Tau, 0.02, 6.0, 300)),
        ),
        "fig3" => (
            "during-pulse max alignment and orientation vs duration (fine grid near the origin), 1/10/20/30 K",
            per_temperature("fig3", FieldConfig::single(two_color(0.12)), sweep(SweepParam::Tau, 0.01, 1.0, 100)),
        ),
        "fig4" => {
            let grid = sweep(SweepParam::ITot, 1e13, 1e14, 10);
            let trap = at_30k("fig4_trapezoid", FieldConfig::single(two_color(0.12)), grid.clone());
            let gauss_pulse = PulseSpec {
                shape: PulseShape::Gaussian,
                ..two_color(0.12)
            };
            let gauss = at_30k("fig4_gaussian", FieldConfig::single(gauss_pulse), grid);
            ("max alignment vs intensity, trapezoid and Gaussian, 0.12 ps, 30 K", vec![trap, gauss])
        }
        "fig5" => (
            "alignment time traces for 0.12 ps and 4.5 ps pulses, 1/10/20/30 K",
            [0.12, 4.5]
                .iter()
                .zip(["fig5a", "fig5b"])
                .flat_map(|(&tau, stem)| per_temperature(stem, FieldConfig::single(two_color(tau)), None))
                .collect(),
        ),
        "fig6" => (
            "orientation time traces for 1.18 ps and 5.28 ps pulses, 1/10/20/30 K",
            [1.18, 5.28]
                .iter()
                .zip(["fig6a", "fig6b"])
                .flat_map(|(&tau, stem)| per_temperature(stem, FieldConfig::single(two_color(tau)), None))
                .collect(),
        ),
        "fig7" => (
            "post-pulse orientation extrema vs CEP, 1.18 ps, 30 K",
            vec![at_30k("fig7", FieldConfig::single(two_color(1.18)), cep_sweep(SweepParam::DeltaCep1))],
        ),
        "fig8" => (
            "monochromatic prepulse then two-color pulse: orientation vs delay, 30 K",
            [1.18, 0.1]
                .iter()
                .zip(["fig8a", "fig8b"])
                .map(|(&tau, stem)| {
                    let field = FieldConfig::pair(PulseSpec::monochromatic(tau, INTENSITY), two_color(tau), 2.0);
                    at_30k(stem, field, delay_sweep())
                })
                .collect(),
        ),
        "fig9" => (
            "two two-color pulses: orientation vs delay, 30 K",
            [1.18, 0.1]
                .iter()
                .zip(["fig9a", "fig9b"])
                .map(|(&tau, stem)| {
                    let field = FieldConfig::pair(two_color(tau), two_color(tau), 2.0);
                    at_30k(stem, field, delay_sweep())
                })
                .collect(),
        ),
        "fig10" | "fig11" => {
            let t_d = if name == "fig10" { 2.0 } else { 1.5 };
            let field = FieldConfig::pair(two_color(0.1), two_color(0.1), t_d);
            (
                "two 0.1 ps two-color pulses: orientation vs CEP of the second pulse, 30 K",
                vec![at_30k(name, field, cep_sweep(SweepParam::DeltaCep2))],
            )
        }
        other => {
            return Err(Error::config(format!(
                "unknown preset '{other}' (known: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(Preset {
        name: name.to_string(),
        description,
        configs,
    })
}
