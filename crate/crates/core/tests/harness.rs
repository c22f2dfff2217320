use std::f64::consts::{PI, TAU};
use std::process::Command;

use rotalign::field::{FieldConfig, PulseShape, PulseSpec};
use rotalign::harness::{
    output, preset, run_single, run_sweep, scan, ExperimentConfig, Sweep, SweepParam, PRESET_NAMES,
};
use rotalign::molecule::rotational_period;
use rotalign::Error;

fn single(tau: f64, temperature: f64) -> ExperimentConfig {
    ExperimentConfig::new(
        "t",
        FieldConfig::single(PulseSpec::two_color(tau, 7e13, 2.0 / 3.0, 0.0)),
        temperature,
    )
}

struct Expect {
    name: &'static str,
    configs: usize,
    taus: &'static [f64],
    temperatures: &'static [f64],
    pulses: usize,
    shapes: &'static [&'static str],
    sweep: Option<(SweepParam, f64, f64, usize)>,
    delay: Option<f64>,
    first_gamma: f64,
}

const T4: &[f64] = &[1.0, 10.0, 20.0, 30.0];
const T30: &[f64] = &[30.0];

#[test]
fn presets_match_figure_parameters() {
    let table = [
        Expect {
            name: "fig1",
            configs: 4,
            taus: &[0.12],
            temperatures: T4,
            pulses: 1,
            shapes: &["trapezoid"],
            sweep: Some((SweepParam::GammaSq, 0.0, 1.0, 101)),
            delay: None,
            first_gamma: (2.0f64 / 3.0).sqrt(),
        },
        Expect {
            name: "fig2",
            configs: 4,
            taus: &[0.12],
            temperatures: T4,
            pulses: 1,
            shapes: &["trapezoid"],
            sweep: Some((SweepParam::Tau, 0.02, 6.0, 300)),
            delay: None,
            first_gamma: (2.0f64 / 3.0).sqrt(),
        },
        Expect {
            name: "fig3",
            configs: 4,
            taus: &[0.12],
            temperatures: T4,
            pulses: 1,
            shapes: &["trapezoid"],
            sweep: Some((SweepParam::Tau, 0.01, 1.0, 100)),
            delay: None,
            first_gamma: (2.0f64 / 3.0).sqrt(),
        },
        Expect {
            name: "fig4",
            configs: 2,
            taus: &[0.12],
            temperatures: T30,
            pulses: 1,
            shapes: &["trapezoid", "gaussian"],
            sweep: Some((SweepParam::ITot, 1e13, 1e14, 10)),
            delay: None,
            first_gamma: (2.0f64 / 3.0).sqrt(),
        },
        Expect {
            name: "fig5",
            configs: 8,
            taus: &[0.12, 4.5],
            temperatures: T4,
            pulses: 1,
            shapes: &["trapezoid"],
            sweep: None,
            delay: None,
            first_gamma: (2.0f64 / 3.0).sqrt(),
        },
        Expect {
            name: "fig6",
            configs: 8,
            taus: &[1.18, 5.28],
            temperatures: T4,
            pulses: 1,
            shapes: &["trapezoid"],
            sweep: None,
            delay: None,
            first_gamma: (2.0f64 / 3.0).sqrt(),
        },
        Expect {
            name: "fig7",
            configs: 1,
            taus: &[1.18],
            temperatures: T30,
            pulses: 1,
            shapes: &["trapezoid"],
            sweep: Some((SweepParam::DeltaCep1, 0.0, TAU, 101)),
            delay: None,
            first_gamma: (2.0f64 / 3.0).sqrt(),
        },
        Expect {
            name: "fig8",
            configs: 2,
            taus: &[1.18, 0.1],
            temperatures: T30,
            pulses: 2,
            shapes: &["trapezoid"],
            sweep: Some((SweepParam::TDelay, 0.0, 4.0, 201)),
            delay: None,
            first_gamma: 1.0,
        },
        Expect {
            name: "fig9",
            configs: 2,
            taus: &[1.18, 0.1],
            temperatures: T30,
            pulses: 2,
            shapes: &["trapezoid"],
            sweep: Some((SweepParam::TDelay, 0.0, 4.0, 201)),
            delay: None,
            first_gamma: (2.0f64 / 3.0).sqrt(),
        },
        Expect {
            name: "fig10",
            configs: 1,
            taus: &[0.1],
            temperatures: T30,
            pulses: 2,
            shapes: &["trapezoid"],
            sweep: Some((SweepParam::DeltaCep2, 0.0, TAU, 101)),
            delay: Some(2.0),
            first_gamma: (2.0f64 / 3.0).sqrt(),
        },
        Expect {
            name: "fig11",
            configs: 1,
            taus: &[0.1],
            temperatures: T30,
            pulses: 2,
            shapes: &["trapezoid"],
            sweep: Some((SweepParam::DeltaCep2, 0.0, TAU, 101)),
            delay: Some(1.5),
            first_gamma: (2.0f64 / 3.0).sqrt(),
        },
    ];
    assert_eq!(table.len(), PRESET_NAMES.len());
    for e in &table {
        let p = preset(e.name).unwrap();
        assert_eq!(p.configs.len(), e.configs, "{}", e.name);
        for c in &p.configs {
            let ctx = format!("{} / {}", e.name, c.name);
            assert_eq!(c.molecule.name, "HBr", "{ctx}");
            assert!(e.temperatures.contains(&c.temperature), "{ctx}");
            assert_eq!(c.field.pulses.len(), e.pulses, "{ctx}");
            assert!(
                (c.field.pulses[0].gamma - e.first_gamma).abs() < 1e-12,
                "{ctx}"
            );
            for (i, pulse) in c.field.pulses.iter().enumerate() {
                assert_eq!(pulse.intensity_w_cm2, 7e13, "{ctx}");
                assert_eq!(pulse.omega_wavenumber, 12_500.0, "{ctx}");
                assert!(e.taus.contains(&pulse.tau_ps), "{ctx}");
                if i == 1 {
                    assert!((pulse.gamma_sq() - 2.0 / 3.0).abs() < 1e-12, "{ctx}");
                    assert_eq!(pulse.delta_cep, 0.0, "{ctx}");
                }
                let shape = match pulse.shape {
                    PulseShape::Trapezoid { plateau_ratio } => {
                        assert_eq!(plateau_ratio, 3.0);
                        "trapezoid"
                    }
                    PulseShape::Gaussian => "gaussian",
                };
                assert!(e.shapes.contains(&shape), "{ctx}");
            }
            if let Some(d) = e.delay {
                assert_eq!(c.field.t_delay_ps, d, "{ctx}");
            }
            match (&c.sweep, e.sweep) {
                (None, None) => {}
                (Some(s), Some((param, a, b, n))) => {
                    assert_eq!(s.parameter, param, "{ctx}");
                    assert_eq!(s.values.len(), n, "{ctx}");
                    assert!(
                        (s.values[0] - a).abs() < 1e-12 && (s.values[n - 1] - b).abs() < 1e-9,
                        "{ctx}"
                    );
                    if n > 10 {
                        assert!(n >= 100, "{ctx}");
                    }
                }
                _ => panic!("{ctx}: sweep mismatch"),
            }
        }
        // no two configs share duration, shape and temperature
        let mut seen: Vec<(u64, bool, u64)> = p
            .configs
            .iter()
            .map(|c| {
                let first = &c.field.pulses[0];
                (
                    first.tau_ps.to_bits(),
                    first.shape == PulseShape::Gaussian,
                    c.temperature.to_bits(),
                )
            })
            .collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), e.configs, "{}", e.name);
    }
    assert!(matches!(preset("fig0"), Err(Error::Config(_))));
}

#[test]
fn zero_intensity_gives_flat_series() {
    let mut c = single(0.12, 0.0);
    c.field.pulses[0].intensity_w_cm2 = 0.0;
    let out = run_single(&c).unwrap();
    for (a, o) in out.series.alignment.iter().zip(&out.series.orientation) {
        assert!((a - 1.0 / 3.0).abs() < 1e-12 && o.abs() < 1e-12);
    }
}

#[test]
fn cold_short_pulse_revives() {
    let c = single(0.12, 1.0);
    let out = run_single(&c).unwrap();
    let s = &out.series;
    let t_rot = rotational_period(&c.molecule);
    let dt = s.times_ps[1] - s.times_ps[0];
    let shift = (t_rot / dt).round() as usize;
    let start = s
        .times_ps
        .iter()
        .position(|&t| t > s.pulse_window.1)
        .unwrap();
    // sampling is 2 fs, so the shifted grid misses T_rot by < 1 fs; alignment varies slowly enough
    let worst = (start..s.len() - shift)
        .map(|i| (s.alignment[i] - s.alignment[i + shift]).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.02, "{worst}");
    assert!(out.extrema.max_align_after > 0.8);
}

#[test]
fn adiabatic_trapezoid_leaves_post_pulse_alignment() {
    let out = run_single(&single(4.5, 1.0)).unwrap();
    let s = &out.series;
    let after: Vec<f64> = s
        .times_ps
        .iter()
        .zip(&s.alignment)
        .filter(|(t, _)| **t > s.pulse_window.1)
        .map(|(_, a)| *a)
        .collect();
    let (lo, hi) = after
        .iter()
        .fold((1.0f64, 0.0f64), |(l, h), &a| (l.min(a), h.max(a)));
    assert!(hi - lo > 0.05, "post-pulse swing {}", hi - lo);
}

#[test]
fn monochromatic_orientation_vanishes() {
    let mut c = single(0.3, 10.0);
    c.field.pulses[0] = PulseSpec::monochromatic(0.3, 7e13);
    let out = run_single(&c).unwrap();
    assert!(out.series.orientation.iter().all(|o| o.abs() < 1e-12));
    let rows = scan(&single(0.12, 1.0), SweepParam::GammaSq, &[0.0, 1.0]).unwrap();
    for r in rows {
        assert!(r.extrema.unwrap().max_abs_orient_after() < 1e-12);
    }
}

#[test]
fn sweep_rows_equal_single_runs() {
    let base = single(0.1, 10.0);
    let values = [0.0, 1.0, 2.5];
    let rows = scan(&base, SweepParam::DeltaCep1, &values).unwrap();
    assert_eq!(rows.len(), 3);
    for (r, &v) in rows.iter().zip(&values) {
        assert_eq!(r.param, v);
        let one = run_single(&base.with_parameter(SweepParam::DeltaCep1, v).unwrap()).unwrap();
        assert_eq!(r.extrema.unwrap(), one.extrema);
    }
}

#[test]
fn sweep_output_is_deterministic_across_thread_counts() {
    let mut c = single(0.1, 20.0);
    c.sweep = Some(Sweep::linspace(SweepParam::GammaSq, 0.2, 0.8, 4));
    let csv_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let rows = pool.install(|| run_sweep(&c)).unwrap();
        let mut buf = Vec::new();
        output::write_sweep_csv(&c, &rows, &mut buf).unwrap();
        buf
    };
    let one = csv_with(1);
    assert_eq!(one, csv_with(1));
    assert_eq!(one, csv_with(3));
}

#[test]
fn failing_point_does_not_abort_sweep() {
    let mut c = single(0.1, 1.0);
    c.numerics.j_max = 8;
    c.sweep = Some(Sweep {
        parameter: SweepParam::Temperature,
        values: vec![1.0, 2000.0],
    });
    let rows = run_sweep(&c).unwrap();
    assert!(rows[0].error.is_none() && rows[0].extrema.is_some());
    assert!(rows[1].error.as_deref().unwrap().contains("j_max"));
    let mut buf = Vec::new();
    output::write_sweep_csv(&c, &rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], output::SWEEP_COLUMNS.join(","));
    assert!(data[1].contains(",ok,"));
    assert!(data[2].contains(",failed,"));
}

#[test]
fn two_pulse_delay_sweep_requires_second_pulse() {
    let mut c = single(0.1, 1.0);
    c.sweep = Some(Sweep {
        parameter: SweepParam::TDelay,
        values: vec![1.0],
    });
    assert!(matches!(run_sweep(&c), Err(Error::Config(_))));
}

#[test]
fn cep_shift_by_pi_flips_orientation() {
    let base = single(0.3, 10.0);
    let a = run_single(&base).unwrap();
    let b = run_single(&base.with_parameter(SweepParam::DeltaCep1, PI).unwrap()).unwrap();
    for i in 0..a.series.len() {
        assert!((a.series.orientation[i] + b.series.orientation[i]).abs() < 1e-10);
        assert!((a.series.alignment[i] - b.series.alignment[i]).abs() < 1e-10);
    }
}

const CONFIG: &str = r#"
name = "cli_demo"

[molecule]
preset = "HBr"

[[pulse]]
tau = "100 fs"
intensity = "7e13 W/cm2"
gamma_sq = 0.6667

[ensemble]
temperature = "1 K"

[numerics]
post_window = "1 ps"
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rotalign"))
}

#[test]
fn cli_run_sweep_validate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("demo.toml");
    std::fs::write(&cfg, CONFIG).unwrap();

    let st = bin()
        .args(["validate", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(st.status.success());

    let st = bin()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        st.status.success(),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );
    let series = std::fs::read_to_string(dir.path().join("cli_demo_series.csv")).unwrap();
    assert!(series.starts_with("# rotalign "));
    assert!(series.contains("\ntime_ps,orientation,alignment,envelope_1,envelope_2\n"));
    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("cli_demo_meta.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["numerics"]["j_max"], 40);

    // run refuses sweep configs and vice versa
    let st = bin()
        .args(["sweep", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!st.status.success());

    let with_sweep =
        format!("{CONFIG}\n[sweep]\nparameter = \"gamma_sq\"\nvalues = [0.5, 0.6667]\n");
    std::fs::write(&cfg, with_sweep).unwrap();
    let st = bin()
        .args([
            "sweep",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        st.status.success(),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );
    let sweep = std::fs::read_to_string(dir.path().join("cli_demo_sweep.csv")).unwrap();
    assert_eq!(sweep.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn cli_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, CONFIG.replace("\"100 fs\"", "\"100\"")).unwrap();
    let st = bin()
        .args(["validate", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!st.status.success());
    assert!(String::from_utf8_lossy(&st.stderr).contains("error"));

    let st = bin().args(["preset", "fig42"]).output().unwrap();
    assert!(!st.status.success());
    let st = bin().args(["run", "/nonexistent.toml"]).output().unwrap();
    assert!(!st.status.success());
}

#[test]
fn cli_fast_preset_writes_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .args([
            "preset",
            "fig10",
            "--fast",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        st.status.success(),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("fig10_sweep.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 12);
}
