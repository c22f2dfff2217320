//! CSV and JSON writers. Every CSV opens with `#` lines carrying the version and resolved config.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::{RunNumerics, RunOutput, SweepRow};
use crate::error::{Error, Result};
use crate::observables::{fmt_num, ExtremaSummary};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SWEEP_COLUMNS: [&str; 13] = [
    "param",
    "max_align_during",
    "t_max_align_during",
    "max_align_after",
    "t_max_align_after",
    "max_orient_pos_after",
    "t_max_orient_pos_after",
    "max_orient_neg_after",
    "t_max_orient_neg_after",
    "dt_ps",
    "j_max",
    "status",
    "error",
];

/// Header block: version line then the pretty-printed config, each line prefixed with `# `.
pub fn header(config: &ExperimentConfig) -> Result<String> {
    let json = serde_json::to_string_pretty(config).map_err(|e| Error::Io(e.into()))?;
    let mut out = format!("# rotalign {VERSION}\n");
    for line in json.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    Ok(out)
}

fn output_path(config: &ExperimentConfig, suffix: &str) -> Result<PathBuf> {
    let dir = config
        .output_dir
        .as_deref()
        .ok_or_else(|| Error::config("no output directory configured"))?;
    fs::create_dir_all(dir)?;
    Ok(dir.join(format!("{}_{suffix}", config.name)))
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'a str,
    config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    extrema: Option<&'a ExtremaSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numerics: Option<&'a RunNumerics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failed_points: Option<usize>,
}

fn write_meta(path: &Path, meta: &Meta) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(f, meta).map_err(|e| Error::Io(e.into()))
}

/// `<name>_series.csv` and `<name>_meta.json`.
pub fn write_single(config: &ExperimentConfig, out: &RunOutput) -> Result<Vec<PathBuf>> {
    let series_path = output_path(config, "series.csv")?;
    let mut f = BufWriter::new(File::create(&series_path)?);
    f.write_all(header(config)?.as_bytes())?;
    out.series.write_csv(&mut f)?;
    f.flush()?;
    let meta_path = output_path(config, "meta.json")?;
    write_meta(
        &meta_path,
        &Meta {
            version: VERSION,
            config,
            extrema: Some(&out.extrema),
            numerics: Some(&out.numerics),
            failed_points: None,
        },
    )?;
    Ok(vec![series_path, meta_path])
}

/// Sweep rows in the column order of [`SWEEP_COLUMNS`]; failed rows carry empty numbers.
pub fn write_sweep_csv<W: Write>(
    config: &ExperimentConfig,
    rows: &[SweepRow],
    mut w: W,
) -> Result<()> {
    w.write_all(header(config)?.as_bytes())?;
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![fmt_num(r.param)];
        match (&r.extrema, &r.numerics) {
            (Some(e), Some(n)) => {
                rec.extend(
                    [
                        e.max_align_during,
                        e.t_max_align_during,
                        e.max_align_after,
                        e.t_max_align_after,
                        e.max_orient_pos_after,
                        e.t_max_orient_pos_after,
                        e.max_orient_neg_after,
                        e.t_max_orient_neg_after,
                        n.dt_ps,
                    ]
                    .map(fmt_num),
                );
                rec.push(n.j_max.to_string());
                rec.push("ok".into());
                rec.push(String::new());
            }
            _ => {
                rec.extend(std::iter::repeat_n(String::new(), 10));
                rec.push("failed".into());
                rec.push(r.error.clone().unwrap_or_default());
            }
        }
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// `<name>_sweep.csv` and `<name>_meta.json`.
pub fn write_sweep(config: &ExperimentConfig, rows: &[SweepRow]) -> Result<Vec<PathBuf>> {
    let path = output_path(config, "sweep.csv")?;
    let mut f = BufWriter::new(File::create(&path)?);
    write_sweep_csv(config, rows, &mut f)?;
    f.flush()?;
    let meta_path = output_path(config, "meta.json")?;
    write_meta(
        &meta_path,
        &Meta {
            version: VERSION,
            config,
            extrema: None,
            numerics: None,
            failed_points: Some(rows.iter().filter(|r| r.error.is_some()).count()),
        },
    )?;
    Ok(vec![path, meta_path])
}
