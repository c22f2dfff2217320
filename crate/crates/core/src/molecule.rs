//! Molecular constants, rotational levels and the thermal (Boltzmann) ensemble of initial states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units;

/// How the two hyperpolarizability numbers of a [`MoleculeParams`] are to be read.
///
/// Literature values for β are quoted in several unit systems and the HBr numbers in
/// circulation are not self-describing, so the interpretation is always explicit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BetaUnit {
    /// Hyperpolarizability "volume" in Å⁵; one atomic unit is a0⁵ ≈ 0.0414 Å⁵.
    #[serde(rename = "as-volume-A5")]
    AsVolumeA5,
    /// Atomic units, e³a0³/Eh².
    #[serde(rename = "atomic-units")]
    AtomicUnits,
    /// Numbers given in units of 1e-8 atomic units.
    #[serde(rename = "atomic-units-1e-8")]
    AtomicUnitsE8,
}

impl BetaUnit {
    pub fn tag(self) -> &'static str {
        match self {
            BetaUnit::AsVolumeA5 => "as-volume-A5",
            BetaUnit::AtomicUnits => "atomic-units",
            BetaUnit::AtomicUnitsE8 => "atomic-units-1e-8",
        }
    }

    fn value_to_au(self, v: f64) -> f64 {
        match self {
            BetaUnit::AsVolumeA5 => units::angstrom5_to_au(v),
            BetaUnit::AtomicUnits => v,
            BetaUnit::AtomicUnitsE8 => v * 1e-8,
        }
    }

    fn value_from_au(self, v: f64) -> f64 {
        match self {
            BetaUnit::AsVolumeA5 => units::au_to_angstrom5(v),
            BetaUnit::AtomicUnits => v,
            BetaUnit::AtomicUnitsE8 => v * 1e8,
        }
    }
}

impl fmt::Display for BetaUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BetaUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "as-volume-A5" | "as-volume-Å⁵" | "as-volume-Å5" => Ok(BetaUnit::AsVolumeA5),
            "atomic-units" | "au" => Ok(BetaUnit::AtomicUnits),
            "atomic-units-1e-8" => Ok(BetaUnit::AtomicUnitsE8),
            other => Err(Error::config(format!(
                "unknown hyperpolarizability unit tag '{other}' (expected 'as-volume-A5', 'atomic-units' or 'atomic-units-1e-8')"
            ))),
        }
    }
}

/// Molecular constants in laboratory units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoleculeParams {
    pub name: String,
    /// Rotational constant, cm⁻¹.
    pub b_wavenumber: f64,
    /// Permanent dipole, debye.
    pub mu0_debye: f64,
    /// Polarizability volume parallel to the axis, Å³.
    pub alpha_par_a3: f64,
    /// Polarizability volume perpendicular to the axis, Å³.
    pub alpha_perp_a3: f64,
    pub beta_par: f64,
    pub beta_perp: f64,
    pub beta_unit: BetaUnit,
    /// Nuclear-spin degeneracy of even-J levels.
    pub gj_even: f64,
    /// Nuclear-spin degeneracy of odd-J levels.
    pub gj_odd: f64,
}

impl MoleculeParams {
    /// HBr. The β numbers are kept as listed and read as 1e-8 au (β∥ = -10.7 au); taken
    /// literally in atomic units or as Å⁵ volumes the hyperpolarizability term dwarfs the
    /// rotational energy by many orders of magnitude.
    pub fn hbr() -> Self {
        MoleculeParams {
            name: "HBr".into(),
            b_wavenumber: 8.3482,
            mu0_debye: 0.828,
            alpha_par_a3: 3.64,
            alpha_perp_a3: 3.315,
            beta_par: -1.07e9,
            beta_perp: 4.3e8,
            beta_unit: BetaUnit::AtomicUnitsE8,
            gj_even: 1.0,
            gj_odd: 1.0,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "HBr" | "hbr" => Ok(Self::hbr()),
            other => Err(Error::config(format!("unknown molecule preset '{other}'"))),
        }
    }

    pub fn degeneracy(&self, j: u32) -> f64 {
        if j.is_multiple_of(2) {
            self.gj_even
        } else {
            self.gj_odd
        }
    }

    /// Field-free rotational energy B·J(J+1) in cm⁻¹.
    pub fn level_energy_wavenumber(&self, j: u32) -> f64 {
        let j = j as f64;
        self.b_wavenumber * j * (j + 1.0)
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("B", self.b_wavenumber),
            ("mu0", self.mu0_debye),
            ("alpha_par", self.alpha_par_a3),
            ("alpha_perp", self.alpha_perp_a3),
            ("beta_par", self.beta_par),
            ("beta_perp", self.beta_perp),
            ("gJ_even", self.gj_even),
            ("gJ_odd", self.gj_odd),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::config(format!(
                    "{} parameter {name} is not finite",
                    self.name
                )));
            }
        }
        if self.b_wavenumber <= 0.0 {
            return Err(Error::domain("rotational constant must be positive"));
        }
        if self.gj_even < 0.0 || self.gj_odd < 0.0 || self.gj_even + self.gj_odd == 0.0 {
            return Err(Error::domain(
                "nuclear-spin degeneracies must be non-negative and not both zero",
            ));
        }
        Ok(())
    }
}

/// Molecular constants in atomic units, as used by the propagator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InternalParams {
    pub name: String,
    /// Rotational constant, hartree.
    pub b: f64,
    pub mu0: f64,
    pub alpha_par: f64,
    pub alpha_perp: f64,
    pub beta_par: f64,
    pub beta_perp: f64,
    /// Unit the β values were declared in, kept so the conversion can be undone.
    pub beta_unit: BetaUnit,
    pub gj_even: f64,
    pub gj_odd: f64,
}

impl InternalParams {
    /// Rotational energy B·J(J+1), hartree.
    pub fn level_energy(&self, j: u32) -> f64 {
        let j = j as f64;
        self.b * j * (j + 1.0)
    }

    pub fn rotational_period_au(&self) -> f64 {
        std::f64::consts::PI / self.b
    }

    pub fn to_external(&self) -> MoleculeParams {
        MoleculeParams {
            name: self.name.clone(),
            b_wavenumber: units::hartree_to_wavenumber(self.b),
            mu0_debye: units::au_to_debye(self.mu0),
            alpha_par_a3: units::au_to_angstrom3(self.alpha_par),
            alpha_perp_a3: units::au_to_angstrom3(self.alpha_perp),
            beta_par: self.beta_unit.value_from_au(self.beta_par),
            beta_perp: self.beta_unit.value_from_au(self.beta_perp),
            beta_unit: self.beta_unit,
            gj_even: self.gj_even,
            gj_odd: self.gj_odd,
        }
    }
}

pub fn convert_to_internal(params: &MoleculeParams) -> Result<InternalParams> {
    params.validate()?;
    Ok(InternalParams {
        name: params.name.clone(),
        b: units::wavenumber_to_hartree(params.b_wavenumber),
        mu0: units::debye_to_au(params.mu0_debye),
        alpha_par: units::angstrom3_to_au(params.alpha_par_a3),
        alpha_perp: units::angstrom3_to_au(params.alpha_perp_a3),
        beta_par: params.beta_unit.value_to_au(params.beta_par),
        beta_perp: params.beta_unit.value_to_au(params.beta_perp),
        beta_unit: params.beta_unit,
        gj_even: params.gj_even,
        gj_odd: params.gj_odd,
    })
}

/// Field-free rotational period 1/(2Bc), in picoseconds.
pub fn rotational_period(params: &MoleculeParams) -> f64 {
    1e12 / (2.0 * params.b_wavenumber * units::SPEED_OF_LIGHT_CM_S)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnsembleEntry {
    pub j: u32,
    pub m: i32,
    pub weight: f64,
}

/// Boltzmann-weighted initial rotational states `|J, M⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThermalEnsemble {
    pub entries: Vec<EnsembleEntry>,
    pub temperature: f64,
    pub truncation_epsilon: f64,
}

pub const DEFAULT_TRUNCATION_EPSILON: f64 = 1e-6;

impl ThermalEnsemble {
    pub fn j_max(&self) -> u32 {
        self.entries.iter().map(|e| e.j).max().unwrap_or(0)
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Collapses `M` and `-M` into one member with the summed weight.
    ///
    /// Dynamics under a linearly polarized field depend on M only through M², so the pair
    /// evolves identically. Ordered by (J, |M|).
    pub fn by_abs_m(&self) -> Vec<EnsembleEntry> {
        let mut out: Vec<EnsembleEntry> = Vec::new();
        let mut sorted = self.entries.clone();
        sorted.sort_by_key(|e| (e.j, e.m.unsigned_abs(), e.m));
        for e in sorted {
            let m = e.m.abs();
            match out.last_mut() {
                Some(last) if last.j == e.j && last.m == m => last.weight += e.weight,
                _ => out.push(EnsembleEntry {
                    j: e.j,
                    m,
                    weight: e.weight,
                }),
            }
        }
        out
    }
}

/// Builds the truncated Boltzmann ensemble at temperature `temperature` (K).
///
/// Levels are added in increasing J until the omitted tail probability drops below
/// `epsilon`; each level is shared equally among its 2J+1 M-states and the retained
/// weights are renormalized.
pub fn build_ensemble(
    params: &MoleculeParams,
    temperature: f64,
    epsilon: f64,
) -> Result<ThermalEnsemble> {
    if !temperature.is_finite() || temperature < 0.0 {
        return Err(Error::domain(format!(
            "temperature must be >= 0 K, got {temperature}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!(
            "truncation epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    params.validate()?;
    if temperature == 0.0 {
        return Ok(ThermalEnsemble {
            entries: vec![EnsembleEntry {
                j: 0,
                m: 0,
                weight: 1.0,
            }],
            temperature,
            truncation_epsilon: epsilon,
        });
    }

    let kt = units::BOLTZMANN_WAVENUMBER_PER_K * temperature;
    let level_pop = |j: u32| {
        (2 * j + 1) as f64 * params.degeneracy(j) * (-params.level_energy_wavenumber(j) / kt).exp()
    };

    // Partition function: sum until past the population peak and terms are negligible.
    let j_peak = ((kt / (2.0 * params.b_wavenumber)).sqrt() - 0.5)
        .max(0.0)
        .ceil() as u32;
    let mut pops = Vec::new();
    let mut z = 0.0;
    for j in 0.. {
        let p = level_pop(j);
        pops.push(p);
        z += p;
        if j > j_peak + 1 && p <= 1e-20 * z {
            break;
        }
    }

    let mut retained = Vec::new();
    let mut kept = 0.0;
    for (j, &p) in pops.iter().enumerate() {
        if p > 0.0 {
            retained.push((j as u32, p));
            kept += p;
        }
        let tail: f64 = pops[j + 1..].iter().sum::<f64>() / z;
        if tail < epsilon {
            break;
        }
    }

    let mut entries = Vec::new();
    for (j, p) in retained {
        let share = p / kept / (2 * j + 1) as f64;
        for m in -(j as i32)..=(j as i32) {
            entries.push(EnsembleEntry {
                j,
                m,
                weight: share,
            });
        }
    }
    Ok(ThermalEnsemble {
        entries,
        temperature,
        truncation_epsilon: epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn hbr_rotational_period() {
        let hbr = MoleculeParams::hbr();
        assert!((rotational_period(&hbr) - 1.998).abs() < 1e-3);
        let mut doubled = hbr.clone();
        doubled.b_wavenumber *= 2.0;
        assert_relative_eq!(
            rotational_period(&doubled),
            rotational_period(&hbr) / 2.0,
            max_relative = 1e-15
        );
        let mut unit = hbr.clone();
        unit.b_wavenumber = 1.0;
        assert_relative_eq!(rotational_period(&unit), 16.678, max_relative = 1e-4);
    }

    #[test]
    fn internal_period_matches_lab_formula() {
        let hbr = MoleculeParams::hbr();
        let internal = convert_to_internal(&hbr).unwrap();
        assert_relative_eq!(
            units::au_to_ps(internal.rotational_period_au()),
            rotational_period(&hbr),
            max_relative = 1e-9
        );
    }

    #[test]
    fn internal_values() {
        let internal = convert_to_internal(&MoleculeParams::hbr()).unwrap();
        assert_relative_eq!(internal.b, 3.8038e-5, max_relative = 1e-4);
        assert_relative_eq!(internal.alpha_par, 24.565, max_relative = 1e-4);
        let mut zero_dipole = MoleculeParams::hbr();
        zero_dipole.mu0_debye = 0.0;
        assert_eq!(convert_to_internal(&zero_dipole).unwrap().mu0, 0.0);
    }

    #[test]
    fn bad_params_rejected() {
        let mut p = MoleculeParams::hbr();
        p.b_wavenumber = 0.0;
        assert!(convert_to_internal(&p).is_err());
        p.b_wavenumber = f64::NAN;
        assert!(convert_to_internal(&p).is_err());
        assert!("as-volume-nm5".parse::<BetaUnit>().is_err());
        assert!(MoleculeParams::preset("DCl").is_err());
    }

    #[test]
    fn hbr_preset_is_heteronuclear() {
        let p = MoleculeParams::hbr();
        assert_eq!((p.gj_even, p.gj_odd), (1.0, 1.0));
        assert!(p.alpha_par_a3 >= p.alpha_perp_a3);
    }

    #[test]
    fn zero_temperature_is_ground_state() {
        let e = build_ensemble(&MoleculeParams::hbr(), 0.0, 1e-6).unwrap();
        assert_eq!(
            e.entries,
            vec![EnsembleEntry {
                j: 0,
                m: 0,
                weight: 1.0
            }]
        );
    }

    #[test]
    fn thirty_kelvin_populations() {
        let e = build_ensemble(&MoleculeParams::hbr(), 30.0, 1e-6).unwrap();
        let level = |j: u32| -> f64 {
            e.entries
                .iter()
                .filter(|x| x.j == j)
                .map(|x| x.weight)
                .sum()
        };
        // kT = 20.85 cm-1, P1/P0 = 3 exp(-2B/kT)
        assert_relative_eq!(level(1) / level(0), 1.347, max_relative = 1e-3);
        let j1: Vec<f64> = e
            .entries
            .iter()
            .filter(|x| x.j == 1)
            .map(|x| x.weight)
            .collect();
        assert_eq!(j1.len(), 3);
        assert!(j1.iter().all(|&w| w == j1[0]));
    }

    #[test]
    fn invalid_temperature_or_epsilon() {
        let hbr = MoleculeParams::hbr();
        assert!(matches!(
            build_ensemble(&hbr, -1.0, 1e-6),
            Err(Error::Domain(_))
        ));
        assert!(build_ensemble(&hbr, 10.0, 0.0).is_err());
        assert!(build_ensemble(&hbr, 10.0, 1.0).is_err());
    }

    #[test]
    fn abs_m_merge_keeps_weight() {
        let e = build_ensemble(&MoleculeParams::hbr(), 30.0, 1e-6).unwrap();
        let merged = e.by_abs_m();
        assert_relative_eq!(
            merged.iter().map(|x| x.weight).sum::<f64>(),
            1.0,
            epsilon = 1e-12
        );
        let (j_max, _) = (e.j_max(), ());
        assert_eq!(merged.len() as u32, (j_max + 1) * (j_max + 2) / 2);
    }

    proptest! {
        #[test]
        fn weights_normalized_and_symmetric(t in 0.01f64..400.0, eps_exp in 3i32..12) {
            let eps = 10f64.powi(-eps_exp);
            let e = build_ensemble(&MoleculeParams::hbr(), t, eps).unwrap();
            prop_assert!((e.total_weight() - 1.0).abs() < 1e-12);
            for a in &e.entries {
                prop_assert!(a.weight > 0.0);
                prop_assert!(a.m.unsigned_abs() <= a.j);
                let mirror = e.entries.iter().find(|b| b.j == a.j && b.m == -a.m).unwrap();
                prop_assert_eq!(mirror.weight, a.weight);
            }
            let mut pairs: Vec<(u32, i32)> = e.entries.iter().map(|x| (x.j, x.m)).collect();
            pairs.dedup();
            prop_assert_eq!(pairs.len(), e.entries.len());
        }

        #[test]
        fn hotter_never_truncates_lower(t1 in 0.5f64..300.0, dt in 0.0f64..100.0) {
            let hbr = MoleculeParams::hbr();
            let cold = build_ensemble(&hbr, t1, 1e-6).unwrap();
            let hot = build_ensemble(&hbr, t1 + dt, 1e-6).unwrap();
            prop_assert!(hot.j_max() >= cold.j_max());
        }

        #[test]
        fn conversion_round_trip(b in 0.1f64..60.0, mu in -5.0f64..5.0, ap in 0.0f64..50.0,
                                 aq in 0.0f64..50.0, bp in -1e3f64..1e3, bq in -1e3f64..1e3,
                                 volume in any::<bool>()) {
            let p = MoleculeParams {
                name: "X".into(),
                b_wavenumber: b,
                mu0_debye: mu,
                alpha_par_a3: ap,
                alpha_perp_a3: aq,
                beta_par: bp,
                beta_perp: bq,
                beta_unit: if volume { BetaUnit::AsVolumeA5 } else { BetaUnit::AtomicUnits },
                gj_even: 1.0,
                gj_odd: 3.0,
            };
            let back = convert_to_internal(&p).unwrap().to_external();
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300);
            prop_assert!(close(back.b_wavenumber, p.b_wavenumber));
            prop_assert!(close(back.mu0_debye, p.mu0_debye));
            prop_assert!(close(back.alpha_par_a3, p.alpha_par_a3));
            prop_assert!(close(back.alpha_perp_a3, p.alpha_perp_a3));
            prop_assert!(close(back.beta_par, p.beta_par));
            prop_assert!(close(back.beta_perp, p.beta_perp));
        }
    }
}
