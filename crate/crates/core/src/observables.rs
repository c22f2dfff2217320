//! ⟨cos θ⟩ and ⟨cos² θ⟩ per state, thermal averaging, and extrema extraction.

use serde::Serialize;

use crate::basis::{CosOperators, RotorState};
use crate::error::{Error, Result};

/// ⟨cos^k θ⟩ for k = 1 (orientation) or k = 2 (alignment).
pub fn expectation(ops: &CosOperators, state: &RotorState, k: u32) -> Result<f64> {
    if state.basis != ops.basis {
        return Err(Error::structure("state and operators use different bases"));
    }
    match k {
        1 => Ok(ops.c1.quad_form(&state.coeffs)),
        2 => Ok(ops.c2.quad_form(&state.coeffs)),
        _ => Err(Error::domain(format!(
            "only k = 1, 2 are supported, got {k}"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservableSeries {
    pub times_ps: Vec<f64>,
    pub orientation: Vec<f64>,
    pub alignment: Vec<f64>,
    /// Envelope of each pulse at every sample (second column 0 for a single pulse).
    pub envelopes: Vec<[f64; 2]>,
    /// (first turn-on, last turn-off) of the total field, ps.
    pub pulse_window: (f64, f64),
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.times_ps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times_ps.is_empty()
    }

    fn check(&self) -> Result<()> {
        let n = self.times_ps.len();
        if self.orientation.len() != n || self.alignment.len() != n || self.envelopes.len() != n {
            return Err(Error::structure("series columns have different lengths"));
        }
        Ok(())
    }

    /// CSV with columns time_ps, orientation, alignment, envelope_1, envelope_2.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        self.check()?;
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        out.write_record([
            "time_ps",
            "orientation",
            "alignment",
            "envelope_1",
            "envelope_2",
        ])
        .map_err(csv_err)?;
        for i in 0..self.len() {
            out.write_record([
                fmt_num(self.times_ps[i]),
                fmt_num(self.orientation[i]),
                fmt_num(self.alignment[i]),
                fmt_num(self.envelopes[i][0]),
                fmt_num(self.envelopes[i][1]),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Shortest round-trip representation; identical values always print identically.
pub fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}

/// Weighted pointwise sum of per-state series. Summation runs in slice order.
pub fn thermal_average(per_state: &[(f64, ObservableSeries)]) -> Result<ObservableSeries> {
    let (_, first) = per_state
        .first()
        .ok_or_else(|| Error::structure("thermal average of an empty ensemble"))?;
    first.check()?;
    let n = first.len();
    let mut out = ObservableSeries {
        times_ps: first.times_ps.clone(),
        orientation: vec![0.0; n],
        alignment: vec![0.0; n],
        envelopes: first.envelopes.clone(),
        pulse_window: first.pulse_window,
    };
    for (w, s) in per_state {
        s.check()?;
        if s.times_ps != first.times_ps {
            return Err(Error::structure(
                "ensemble members were sampled on different time grids",
            ));
        }
        for i in 0..n {
            out.orientation[i] += w * s.orientation[i];
            out.alignment[i] += w * s.alignment[i];
        }
    }
    Ok(out)
}

/// Extreme values during and after the pulses, with the times at which they occur.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtremaSummary {
    pub max_align_during: f64,
    pub t_max_align_during: f64,
    pub max_align_after: f64,
    pub t_max_align_after: f64,
    pub max_orient_pos_after: f64,
    pub t_max_orient_pos_after: f64,
    /// Most negative ⟨cos θ⟩ after the pulse (a value ≤ 0 when the series is oriented backwards).
    pub max_orient_neg_after: f64,
    pub t_max_orient_neg_after: f64,
    pub post_window_ps: f64,
}

impl ExtremaSummary {
    /// Largest |⟨cos θ⟩| after the pulse.
    pub fn max_abs_orient_after(&self) -> f64 {
        self.max_orient_pos_after.max(-self.max_orient_neg_after)
    }
}

/// Scans `[t_on, t_off]` for the during-pulse alignment maximum and `(t_off, t_off + post_window]`
/// for the post-pulse extrema.
pub fn extract_extrema(series: &ObservableSeries, post_window_ps: f64) -> Result<ExtremaSummary> {
    series.check()?;
    if post_window_ps.is_nan() || post_window_ps <= 0.0 {
        return Err(Error::domain("post-pulse window must be positive"));
    }
    let (t_on, t_off) = series.pulse_window;
    let t_last = *series
        .times_ps
        .last()
        .ok_or_else(|| Error::structure("empty series"))?;
    // sample grids are accumulated in floating point; allow a sliver of slack
    let slack = 1e-9 * (1.0 + t_last.abs());
    if t_last + slack < t_off + post_window_ps {
        return Err(Error::structure(format!(
            "series ends at {t_last} ps, before the post-pulse window closes at {} ps",
            t_off + post_window_ps
        )));
    }

    let during = series
        .times_ps
        .iter()
        .enumerate()
        .filter(|(_, &t)| t >= t_on - slack && t <= t_off + slack);
    let (t_ad, a_d) = argmax(during.map(|(i, &t)| (t, series.alignment[i])))
        .ok_or_else(|| Error::structure("no samples inside the pulse window"))?;

    let after: Vec<usize> = series
        .times_ps
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > t_off && t <= t_off + post_window_ps + slack)
        .map(|(i, _)| i)
        .collect();
    if after.is_empty() {
        return Err(Error::structure("no samples after the pulse"));
    }
    let at = |col: &[f64], sign: f64| {
        argmax(after.iter().map(|&i| (series.times_ps[i], sign * col[i]))).expect("nonempty")
    };
    let (t_aa, a_a) = at(&series.alignment, 1.0);
    let (t_op, o_p) = at(&series.orientation, 1.0);
    let (t_on_, o_n) = at(&series.orientation, -1.0);
    Ok(ExtremaSummary {
        max_align_during: a_d,
        t_max_align_during: t_ad,
        max_align_after: a_a,
        t_max_align_after: t_aa,
        max_orient_pos_after: o_p,
        t_max_orient_pos_after: t_op,
        max_orient_neg_after: -o_n,
        t_max_orient_neg_after: t_on_,
        post_window_ps,
    })
}

/// First (time, value) pair attaining the maximum value.
fn argmax(it: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64)> {
    it.fold(None, |best, (t, v)| match best {
        Some((_, bv)) if bv >= v => best,
        _ => Some((t, v)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_cos_operators, BasisSpec};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn synthetic(f: impl Fn(f64) -> (f64, f64), t_end: f64) -> ObservableSeries {
        let times: Vec<f64> = (0..=((t_end / 0.002).round() as usize))
            .map(|i| i as f64 * 0.002)
            .collect();
        let (o, a): (Vec<f64>, Vec<f64>) = times.iter().map(|&t| f(t)).unzip();
        ObservableSeries {
            envelopes: vec![[0.0; 2]; times.len()],
            times_ps: times,
            orientation: o,
            alignment: a,
            pulse_window: (0.0, 0.5),
        }
    }

    #[test]
    fn isotropic_ground_state() {
        let basis = BasisSpec::new(8, 0).unwrap();
        let ops = build_cos_operators(&basis);
        let s = RotorState::eigenstate(basis, 0).unwrap();
        assert_abs_diff_eq!(
            expectation(&ops, &s, 2).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-15
        );
        assert_eq!(expectation(&ops, &s, 1).unwrap(), 0.0);
        assert!(matches!(expectation(&ops, &s, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn superposition_orientation() {
        let basis = BasisSpec::new(8, 0).unwrap();
        let ops = build_cos_operators(&basis);
        let mut c = vec![Complex64::new(0.0, 0.0); basis.dim()];
        c[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        c[1] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = RotorState::from_coeffs(basis, c).unwrap();
        assert_abs_diff_eq!(expectation(&ops, &s, 1).unwrap(), 0.57735, epsilon = 1e-5);
    }

    #[test]
    fn averaging_rules() {
        let a = synthetic(|_| (0.0, 0.2), 2.0);
        let b = synthetic(|_| (0.0, 0.6), 2.0);
        let single = thermal_average(&[(1.0, a.clone())]).unwrap();
        assert_eq!(single, a);
        let mix = thermal_average(&[(0.5, a.clone()), (0.5, b)]).unwrap();
        assert!(mix.alignment.iter().all(|&v| (v - 0.4).abs() < 1e-15));
        let short = synthetic(|_| (0.0, 0.6), 1.0);
        assert!(matches!(
            thermal_average(&[(0.5, a), (0.5, short)]),
            Err(Error::Structure(_))
        ));
        assert!(thermal_average(&[]).is_err());
    }

    #[test]
    fn constant_series_extrema() {
        let s = synthetic(|_| (0.0, 1.0 / 3.0), 3.0);
        let e = extract_extrema(&s, 2.0).unwrap();
        assert_eq!(e.max_align_during, 1.0 / 3.0);
        assert_eq!(e.max_align_after, 1.0 / 3.0);
        assert_eq!(e.max_orient_pos_after, 0.0);
        assert_eq!(e.max_orient_neg_after, 0.0);
    }

    #[test]
    fn sinusoid_extrema() {
        let t_rot = 1.998;
        let s = synthetic(
            |t| {
                let w = std::f64::consts::TAU * t / t_rot;
                if t > 0.5 {
                    (0.3 * w.cos(), 1.0 / 3.0 + 0.1 * w.sin())
                } else {
                    (0.0, 1.0 / 3.0)
                }
            },
            6.0,
        );
        let e = extract_extrema(&s, 2.0 * t_rot).unwrap();
        assert_abs_diff_eq!(e.max_align_after, 0.4333, epsilon = 1e-4);
        assert!(e.t_max_align_after > 0.5);
        assert_abs_diff_eq!(e.max_orient_pos_after, 0.3, epsilon = 1e-4);
        assert_abs_diff_eq!(e.max_orient_neg_after, -0.3, epsilon = 1e-4);
        assert_abs_diff_eq!(e.max_abs_orient_after(), 0.3, epsilon = 1e-4);
        assert!(matches!(
            extract_extrema(&s, 10.0),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn csv_columns() {
        let s = synthetic(|_| (0.0, 0.5), 0.004);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "time_ps,orientation,alignment,envelope_1,envelope_2"
        );
        assert_eq!(lines.count(), 3);
    }
}
