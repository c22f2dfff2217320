//! Ensemble runs and parameter sweeps.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, SweepParam};
use crate::basis::{BasisSpec, RotorState};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::molecule::{self, EnsembleEntry};
use crate::observables::{extract_extrema, thermal_average, ExtremaSummary, ObservableSeries};
use crate::propagator::{propagate, Trajectory};
use crate::units;

/// Numerics actually used, after any refinement. Aggregated over the ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunNumerics {
    /// Smallest step any member ended up with.
    pub dt_ps: f64,
    /// Largest basis any member ended up with.
    pub j_max: u32,
    pub max_refinements: usize,
    pub max_norm_deviation: f64,
    pub members: usize,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub series: ObservableSeries,
    pub extrema: ExtremaSummary,
    pub numerics: RunNumerics,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub extrema: Option<ExtremaSummary>,
    pub numerics: Option<RunNumerics>,
    pub error: Option<String>,
}

struct MemberResult {
    series: ObservableSeries,
    dt_ps: f64,
    j_max: u32,
    refinements: usize,
    norm_dev: f64,
}

/// Members of the thermal ensemble, ±M merged.
fn members(config: &ExperimentConfig) -> Result<Vec<EnsembleEntry>> {
    let ens = molecule::build_ensemble(
        &config.molecule,
        config.temperature,
        config.ensemble_epsilon,
    )?;
    let members = ens.by_abs_m();
    if let Some(e) = members.iter().find(|e| e.j > config.numerics.j_max) {
        return Err(Error::config(format!(
            "ensemble reaches J = {} but j_max is {}",
            e.j, config.numerics.j_max
        )));
    }
    Ok(members)
}

fn run_member(
    config: &ExperimentConfig,
    field: &Field,
    entry: &EnsembleEntry,
) -> Result<MemberResult> {
    let inner = || -> Result<MemberResult> {
        let params = molecule::convert_to_internal(&config.molecule)?;
        let prop = config.propagation()?;
        let basis = BasisSpec::new(prop.j_max, entry.m)?;
        let start = RotorState::eigenstate(basis, entry.j)?;
        let traj = propagate(&params, &start, field, &prop)?;
        Ok(to_member(traj, field))
    };
    inner().map_err(|e| Error::Member {
        j: entry.j,
        m: entry.m,
        source: Box::new(e),
    })
}

fn to_member(traj: Trajectory, field: &Field) -> MemberResult {
    let (t_on, t_off) = field.window();
    let envelopes = traj
        .times_ps
        .iter()
        .map(|&t| field.envelopes(units::ps_to_au(t)))
        .collect();
    MemberResult {
        series: ObservableSeries {
            times_ps: traj.times_ps,
            orientation: traj.orientation,
            alignment: traj.alignment,
            envelopes,
            pulse_window: (units::au_to_ps(t_on), units::au_to_ps(t_off)),
        },
        dt_ps: traj.dt_ps,
        j_max: traj.basis.j_max,
        refinements: traj.refinements,
        norm_dev: traj.max_norm_deviation,
    }
}

fn combine(
    config: &ExperimentConfig,
    weights: &[f64],
    results: Vec<MemberResult>,
) -> Result<RunOutput> {
    let numerics = RunNumerics {
        dt_ps: results
            .iter()
            .map(|r| r.dt_ps)
            .fold(f64::INFINITY, f64::min),
        j_max: results.iter().map(|r| r.j_max).max().unwrap_or(0),
        max_refinements: results.iter().map(|r| r.refinements).max().unwrap_or(0),
        max_norm_deviation: results.iter().map(|r| r.norm_dev).fold(0.0, f64::max),
        members: results.len(),
    };
    let weighted: Vec<(f64, ObservableSeries)> = weights
        .iter()
        .copied()
        .zip(results.into_iter().map(|r| r.series))
        .collect();
    let series = thermal_average(&weighted)?;
    let extrema = extract_extrema(&series, config.numerics.post_window_ps)?;
    Ok(RunOutput {
        series,
        extrema,
        numerics,
    })
}

/// Thermally averaged observables for one configuration. Members run in parallel; the
/// average is always summed in ensemble order, so output does not depend on thread count.
pub fn run_single(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let out = simulate(config)?;
    if config.output_dir.is_some() {
        super::output::write_single(config, &out)?;
    }
    Ok(out)
}

fn simulate(config: &ExperimentConfig) -> Result<RunOutput> {
    let members = members(config)?;
    let field = Field::new(&config.field)?;
    let results = members
        .par_iter()
        .map(|e| run_member(config, &field, e))
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = members.iter().map(|e| e.weight).collect();
    combine(config, &weights, results)
}

/// Runs every grid point of `config.sweep`. A failing point yields a row with `error` set;
/// the remaining points still run.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("configuration has no [sweep] section"))?;
    let rows = sweep_points(config, sweep.parameter, &sweep.values);
    if config.output_dir.is_some() {
        super::output::write_sweep(config, &rows)?;
    }
    Ok(rows)
}

fn sweep_points(config: &ExperimentConfig, param: SweepParam, values: &[f64]) -> Vec<SweepRow> {
    struct Point {
        config: ExperimentConfig,
        field: Field,
        members: Vec<EnsembleEntry>,
    }
    let points: Vec<Result<Point>> = values
        .iter()
        .map(|&v| {
            let config = config.with_parameter(param, v)?;
            let field = Field::new(&config.field)?;
            let members = members(&config)?;
            Ok(Point {
                config,
                field,
                members,
            })
        })
        .collect();

    // nested parallelism: small ensembles still fill the pool and only in-flight points hold series
    let outcomes: Vec<std::result::Result<RunOutput, String>> = points
        .par_iter()
        .map(|point| {
            let p = point.as_ref().map_err(|e| e.to_string())?;
            let results = p
                .members
                .par_iter()
                .map(|e| run_member(&p.config, &p.field, e))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.to_string())?;
            let w: Vec<f64> = p.members.iter().map(|e| e.weight).collect();
            combine(&p.config, &w, results).map_err(|e| e.to_string())
        })
        .collect();

    let mut rows = Vec::with_capacity(values.len());
    for (outcome, &v) in outcomes.into_iter().zip(values) {
        rows.push(match outcome {
            Ok(out) => SweepRow {
                param: v,
                extrema: Some(out.extrema),
                numerics: Some(out.numerics),
                error: None,
            },
            Err(msg) => SweepRow {
                param: v,
                extrema: None,
                numerics: None,
                error: Some(msg),
            },
        });
    }
    rows
}

/// Single run and extrema for each value; a convenience over [`run_sweep`] without file output.
pub fn scan(config: &ExperimentConfig, param: SweepParam, values: &[f64]) -> Result<Vec<SweepRow>> {
    let mut c = config.clone();
    c.output_dir = None;
    c.sweep = Some(super::config::Sweep {
        parameter: param,
        values: values.to_vec(),
    });
    run_sweep(&c)
}
