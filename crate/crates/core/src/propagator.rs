//! Strang-split propagation of a rotor state: rotational phases in the |J⟩ basis,
//! the interaction potential pointwise on the Gauss–Legendre θ-grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{build_cos_operators, grid_transform, BasisSpec, GridTransform, RotorState};
use crate::error::{Error, Result};
use crate::field::{Field, FieldMoments};
use crate::molecule::InternalParams;
use crate::units;

/// Largest single-step norm change tolerated before the step is reported as a failure.
pub const STEP_NORM_TOLERANCE: f64 = 1e-8;
/// Refinement rounds attempted by [`Convergence::Auto`].
pub const MAX_REFINEMENTS: usize = 4;
/// Basis levels added per refinement round.
pub const J_MAX_INCREMENT: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// The oscillating E(t) enters the potential literally.
    FullField,
    /// E, E², E³ replaced by their averages over one optical cycle.
    CycleAveraged,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Convergence {
    Off,
    /// Halve dt and add basis levels until sampled ⟨cos θ⟩, ⟨cos² θ⟩ move by less than `tolerance`.
    Auto {
        tolerance: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub mode: Mode,
    pub dt_ps: f64,
    pub t_start_ps: f64,
    pub t_end_ps: f64,
    pub sample_every: usize,
    pub j_max: u32,
    pub convergence: Convergence,
}

impl PropagationConfig {
    /// 0.25 fs for cycle-averaged runs, one 64th of the 2ω period for full-field runs.
    pub fn default_dt_ps(mode: Mode, omega_wavenumber: f64) -> f64 {
        match mode {
            Mode::CycleAveraged => 0.25e-3,
            Mode::FullField => second_harmonic_period_ps(omega_wavenumber) / 64.0,
        }
    }

    pub fn validate(&self, omega_wavenumber: f64) -> Result<()> {
        if !(self.dt_ps.is_finite() && self.dt_ps > 0.0) {
            return Err(Error::config(format!(
                "time step must be positive, got {} ps",
                self.dt_ps
            )));
        }
        if !(self.t_start_ps.is_finite()
            && self.t_end_ps.is_finite()
            && self.t_end_ps > self.t_start_ps)
        {
            return Err(Error::config("propagation window needs t_end > t_start"));
        }
        if self.sample_every == 0 {
            return Err(Error::config("sample_every must be at least 1"));
        }
        if self.mode == Mode::FullField {
            let limit = second_harmonic_period_ps(omega_wavenumber) / 32.0;
            if self.dt_ps > limit {
                return Err(Error::config(format!(
                    "full-field mode needs dt <= {limit:.3e} ps (1/32 of the 2ω period), got {}",
                    self.dt_ps
                )));
            }
        }
        if let Convergence::Auto { tolerance } = self.convergence {
            if tolerance.is_nan() || tolerance <= 0.0 {
                return Err(Error::config("convergence tolerance must be positive"));
            }
        }
        Ok(())
    }
}

fn second_harmonic_period_ps(omega_wavenumber: f64) -> f64 {
    1e12 / (2.0 * omega_wavenumber * units::SPEED_OF_LIGHT_CM_S)
}

/// Interaction potential at the nodes `grid_x` (= cos θ) for given field moments:
/// `V = -μ E x - ½E²[(α∥-α⊥)x² + α⊥] - ⅙E³[(β∥-3β⊥)x³ + 3β⊥x]`.
pub fn potential_on_grid(
    params: &InternalParams,
    moments: FieldMoments,
    grid_x: &[f64],
) -> Vec<f64> {
    let shapes = PotentialShapes::new(params, grid_x);
    let mut v = vec![0.0; grid_x.len()];
    shapes.evaluate(moments, &mut v);
    v
}

/// The three angular profiles multiplying E, E² and E³.
#[derive(Clone, Debug)]
struct PotentialShapes {
    dipole: Vec<f64>,
    polar: Vec<f64>,
    hyper: Vec<f64>,
}

impl PotentialShapes {
    fn new(p: &InternalParams, x: &[f64]) -> Self {
        let d_alpha = p.alpha_par - p.alpha_perp;
        let d_beta = p.beta_par - 3.0 * p.beta_perp;
        PotentialShapes {
            dipole: x.iter().map(|&x| -p.mu0 * x).collect(),
            polar: x
                .iter()
                .map(|&x| -0.5 * (d_alpha * x * x + p.alpha_perp))
                .collect(),
            hyper: x
                .iter()
                .map(|&x| -(d_beta * x * x * x + 3.0 * p.beta_perp * x) / 6.0)
                .collect(),
        }
    }

    fn evaluate(&self, m: FieldMoments, out: &mut [f64]) {
        for (i, v) in out.iter_mut().enumerate() {
            *v = m.e1 * self.dipole[i] + m.e2 * self.polar[i] + m.e3 * self.hyper[i];
        }
    }
}

/// Single-step split-operator integrator bound to one basis, field and time step.
#[derive(Clone, Debug)]
pub struct Propagator<'a> {
    field: &'a Field,
    mode: Mode,
    basis: BasisSpec,
    dt: f64,
    transform: GridTransform,
    shapes: PotentialShapes,
    half_phase: Vec<Complex64>,
    full_phase: Vec<Complex64>,
    grid: Vec<Complex64>,
    potential: Vec<f64>,
}

impl<'a> Propagator<'a> {
    /// `dt_au` may be negative (backward propagation).
    pub fn new(
        params: &InternalParams,
        field: &'a Field,
        mode: Mode,
        basis: BasisSpec,
        dt_au: f64,
    ) -> Result<Self> {
        basis.validate()?;
        if !(dt_au.is_finite() && dt_au != 0.0) {
            return Err(Error::config("time step must be finite and nonzero"));
        }
        let transform = grid_transform(&basis);
        let shapes = PotentialShapes::new(params, &transform.nodes);
        let energies: Vec<f64> = (0..basis.dim())
            .map(|i| params.level_energy(basis.j_of(i)))
            .collect();
        let phase = |scale: f64| -> Vec<Complex64> {
            energies
                .iter()
                .map(|e| Complex64::from_polar(1.0, -e * dt_au * scale))
                .collect()
        };
        let n_grid = transform.n_grid();
        Ok(Propagator {
            field,
            mode,
            basis,
            dt: dt_au,
            half_phase: phase(0.5),
            full_phase: phase(1.0),
            transform,
            shapes,
            grid: vec![Complex64::new(0.0, 0.0); n_grid],
            potential: vec![0.0; n_grid],
        })
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn moments(&self, t: f64) -> FieldMoments {
        match self.mode {
            Mode::FullField => FieldMoments::instantaneous(self.field.value(t)),
            Mode::CycleAveraged => self.field.cycle_averaged(t),
        }
    }

    /// Advances `state` by one step from `state.time`.
    pub fn step(&mut self, state: &mut RotorState) -> Result<()> {
        debug_assert_eq!(state.basis, self.basis);
        let t0 = state.time;
        let t1 = t0 + self.dt;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let moments = if self.field.is_off_between(lo, hi) {
            FieldMoments::default()
        } else {
            self.moments(t0 + 0.5 * self.dt)
        };
        if moments.is_zero() {
            // the potential factor is the identity; the two half phases merge exactly
            for (c, p) in state.coeffs.iter_mut().zip(&self.full_phase) {
                *c *= p;
            }
            state.time = t1;
            return Ok(());
        }
        let before = state.norm_sqr();
        for (c, p) in state.coeffs.iter_mut().zip(&self.half_phase) {
            *c *= p;
        }
        self.shapes.evaluate(moments, &mut self.potential);
        self.transform.forward_into(&state.coeffs, &mut self.grid);
        for (g, v) in self.grid.iter_mut().zip(&self.potential) {
            *g *= Complex64::from_polar(1.0, -v * self.dt);
        }
        self.transform.backward_into(&self.grid, &mut state.coeffs);
        for (c, p) in state.coeffs.iter_mut().zip(&self.half_phase) {
            *c *= p;
        }
        state.time = t1;
        let drift = (state.norm_sqr() - before).abs();
        if drift > STEP_NORM_TOLERANCE {
            return Err(Error::NormDrift {
                time_ps: units::au_to_ps(t1),
                drift,
            });
        }
        Ok(())
    }
}

/// Advances a state by one step of `config.dt_ps` (convenience wrapper around [`Propagator`]).
pub fn step(
    params: &InternalParams,
    field: &Field,
    state: &RotorState,
    config: &PropagationConfig,
) -> Result<RotorState> {
    let mut prop = Propagator::new(
        params,
        field,
        config.mode,
        state.basis,
        units::ps_to_au(config.dt_ps),
    )?;
    let mut out = state.clone();
    prop.step(&mut out)?;
    Ok(out)
}

/// Sampled states of one propagation plus the numerics that produced them.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub basis: BasisSpec,
    pub times_ps: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub orientation: Vec<f64>,
    pub alignment: Vec<f64>,
    pub dt_ps: f64,
    /// Refinement rounds performed by the convergence controller (0 when off).
    pub refinements: usize,
    /// Last measured change between refinement levels, if any.
    pub residual: Option<f64>,
    /// Largest |‖ψ‖² - 1| seen at the sample points.
    pub max_norm_deviation: f64,
}

/// Propagates `initial` over `[t_start, t_end]`, sampling every `sample_every` steps.
pub fn propagate(
    params: &InternalParams,
    initial: &RotorState,
    field: &Field,
    config: &PropagationConfig,
) -> Result<Trajectory> {
    config.validate(units::hartree_to_wavenumber(field.omega()))?;
    if initial.basis.j_max != config.j_max {
        return Err(Error::structure(format!(
            "initial state has J_max = {} but the configuration asks for {}",
            initial.basis.j_max, config.j_max
        )));
    }
    let mut best = run_fixed(
        params,
        initial,
        field,
        config,
        config.dt_ps,
        config.j_max,
        config.sample_every,
    )?;
    let tolerance = match config.convergence {
        Convergence::Off => return Ok(best),
        Convergence::Auto { tolerance } => tolerance,
    };
    let (mut dt, mut j_max, mut stride) = (config.dt_ps, config.j_max, config.sample_every);
    let mut residual = f64::INFINITY;
    for round in 1..=MAX_REFINEMENTS {
        dt *= 0.5;
        j_max += J_MAX_INCREMENT;
        stride *= 2;
        let basis = BasisSpec::with_pad(j_max, initial.basis.m, initial.basis.pad)?;
        let start = initial.embed(basis)?;
        let refined = run_fixed(params, &start, field, config, dt, j_max, stride)?;
        residual = max_change(&best, &refined);
        best = refined;
        best.refinements = round;
        best.residual = Some(residual);
        if residual < tolerance {
            return Ok(best);
        }
    }
    Err(Error::NotConverged {
        rounds: MAX_REFINEMENTS,
        residual,
        tolerance,
    })
}

fn max_change(a: &Trajectory, b: &Trajectory) -> f64 {
    a.orientation
        .iter()
        .zip(&b.orientation)
        .chain(a.alignment.iter().zip(&b.alignment))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn run_fixed(
    params: &InternalParams,
    initial: &RotorState,
    field: &Field,
    config: &PropagationConfig,
    dt_ps: f64,
    j_max: u32,
    sample_every: usize,
) -> Result<Trajectory> {
    let basis = initial.basis;
    debug_assert_eq!(basis.j_max, j_max);
    let ops = build_cos_operators(&basis);
    let mut prop = Propagator::new(params, field, config.mode, basis, units::ps_to_au(dt_ps))?;
    let span = config.t_end_ps - config.t_start_ps;
    let blocks = ((span / dt_ps - 1e-9).ceil() as usize)
        .div_ceil(sample_every)
        .max(1);
    let t0 = units::ps_to_au(config.t_start_ps);
    let dt = units::ps_to_au(dt_ps);

    let mut state = initial.clone();
    state.time = t0;
    let mut traj = Trajectory {
        basis,
        times_ps: Vec::with_capacity(blocks + 1),
        states: Vec::with_capacity(blocks + 1),
        orientation: Vec::with_capacity(blocks + 1),
        alignment: Vec::with_capacity(blocks + 1),
        dt_ps,
        refinements: 0,
        residual: None,
        max_norm_deviation: 0.0,
    };
    let record = |traj: &mut Trajectory, s: &RotorState| {
        traj.times_ps.push(units::au_to_ps(s.time));
        traj.orientation.push(ops.c1.quad_form(&s.coeffs));
        traj.alignment.push(ops.c2.quad_form(&s.coeffs));
        traj.max_norm_deviation = traj.max_norm_deviation.max((s.norm_sqr() - 1.0).abs());
        traj.states.push(s.coeffs.clone());
    };
    record(&mut traj, &state);
    let mut n = 0usize;
    for _ in 0..blocks {
        for _ in 0..sample_every {
            prop.step(&mut state)?;
            n += 1;
            // step accumulation drifts in the last bits; pin the clock to the grid
            state.time = t0 + n as f64 * dt;
        }
        record(&mut traj, &state);
    }
    Ok(traj)
}
