//! Physical constants and conversions between laboratory units and atomic units.
//!
//! Everything inside the propagator is expressed in atomic units (hbar = e = m_e = a0 = 1).
//! Times cross the boundary in picoseconds, intensities in W/cm², energies in cm⁻¹.

use std::fmt;

use crate::error::{Error, Result};

/// Hartree energy in wavenumbers (cm⁻¹), CODATA 2018.
pub const HARTREE_IN_WAVENUMBER: f64 = 219_474.631_363_2;
/// Atomic unit of time in picoseconds.
pub const AU_TIME_IN_PS: f64 = 2.418_884_326_585_7e-5;
/// Bohr radius in ångström.
pub const BOHR_IN_ANGSTROM: f64 = 0.529_177_210_903;
/// One debye expressed in e·a0.
pub const DEBYE_IN_AU: f64 = 0.393_430_269_5;
/// Atomic unit of intensity (field amplitude 1 a.u.) in W/cm².
pub const AU_INTENSITY_W_CM2: f64 = 3.509_445_52e16;
/// Boltzmann constant in cm⁻¹/K.
pub const BOLTZMANN_WAVENUMBER_PER_K: f64 = 0.695_034_800;
/// Speed of light in cm/s.
pub const SPEED_OF_LIGHT_CM_S: f64 = 2.997_924_58e10;

pub fn wavenumber_to_hartree(k: f64) -> f64 {
    k / HARTREE_IN_WAVENUMBER
}

pub fn hartree_to_wavenumber(e: f64) -> f64 {
    e * HARTREE_IN_WAVENUMBER
}

pub fn ps_to_au(t: f64) -> f64 {
    t / AU_TIME_IN_PS
}

pub fn au_to_ps(t: f64) -> f64 {
    t * AU_TIME_IN_PS
}

pub fn debye_to_au(d: f64) -> f64 {
    d * DEBYE_IN_AU
}

pub fn au_to_debye(d: f64) -> f64 {
    d / DEBYE_IN_AU
}

pub fn angstrom3_to_au(v: f64) -> f64 {
    v / BOHR_IN_ANGSTROM.powi(3)
}

pub fn au_to_angstrom3(v: f64) -> f64 {
    v * BOHR_IN_ANGSTROM.powi(3)
}

pub fn angstrom5_to_au(v: f64) -> f64 {
    v / BOHR_IN_ANGSTROM.powi(5)
}

pub fn au_to_angstrom5(v: f64) -> f64 {
    v * BOHR_IN_ANGSTROM.powi(5)
}

/// Peak field amplitude (atomic units) for a total peak intensity given in W/cm².
pub fn intensity_to_peak_field(intensity_w_cm2: f64) -> Result<f64> {
    if !intensity_w_cm2.is_finite() || intensity_w_cm2 < 0.0 {
        return Err(Error::domain(format!(
            "intensity must be finite and non-negative, got {intensity_w_cm2} W/cm2"
        )));
    }
    Ok((intensity_w_cm2 / AU_INTENSITY_W_CM2).sqrt())
}

/// Physical dimension of a quantity written with a unit suffix in config files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    /// canonical unit: ps
    Time,
    /// canonical unit: W/cm²
    Intensity,
    /// canonical unit: cm⁻¹
    Wavenumber,
    /// canonical unit: debye
    Dipole,
    /// canonical unit: Å³
    Polarizability,
    /// canonical unit: K
    Temperature,
    /// canonical unit: rad
    Angle,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Time => "time",
            Dimension::Intensity => "intensity",
            Dimension::Wavenumber => "wavenumber",
            Dimension::Dipole => "dipole",
            Dimension::Polarizability => "polarizability",
            Dimension::Temperature => "temperature",
            Dimension::Angle => "angle",
        };
        f.write_str(s)
    }
}

/// Parses `"<number> <unit>"` and returns the value in the canonical unit of `dim`.
///
/// A missing unit is an error: every physical quantity in a config must say what it is.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64> {
    let text = text.trim();
    let split = text
        .find(|c: char| c.is_whitespace())
        .ok_or_else(|| Error::config(format!("'{text}': {dim} needs a unit suffix")))?;
    let (num, unit) = text.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("'{text}': cannot parse number '{num}'")))?;
    if !value.is_finite() {
        return Err(Error::config(format!("'{text}': value is not finite")));
    }
    let unit = unit.trim();
    let factor = unit_factor(unit, dim)
        .ok_or_else(|| Error::config(format!("'{text}': unknown {dim} unit '{unit}'")))?;
    Ok(match factor {
        UnitMap::Scale(s) => value * s,
        UnitMap::Wavelength => {
            if value <= 0.0 {
                return Err(Error::config(format!(
                    "'{text}': wavelength must be positive"
                )));
            }
            1e7 / value
        }
    })
}

enum UnitMap {
    Scale(f64),
    /// nm → cm⁻¹
    Wavelength,
}

fn unit_factor(unit: &str, dim: Dimension) -> Option<UnitMap> {
    use UnitMap::Scale;
    let m = match (dim, unit) {
        (Dimension::Time, "ps") => Scale(1.0),
        (Dimension::Time, "fs") => Scale(1e-3),
        (Dimension::Time, "au") => Scale(AU_TIME_IN_PS),
        (Dimension::Intensity, "W/cm2" | "W/cm^2") => Scale(1.0),
        (Dimension::Intensity, "au") => Scale(AU_INTENSITY_W_CM2),
        (Dimension::Wavenumber, "cm-1" | "cm^-1") => Scale(1.0),
        (Dimension::Wavenumber, "au") => Scale(HARTREE_IN_WAVENUMBER),
        (Dimension::Wavenumber, "nm") => UnitMap::Wavelength,
        (Dimension::Dipole, "D") => Scale(1.0),
        (Dimension::Dipole, "au") => Scale(1.0 / DEBYE_IN_AU),
        (Dimension::Polarizability, "A3" | "Å3" | "Å^3" | "A^3") => Scale(1.0),
        (Dimension::Polarizability, "au") => Scale(BOHR_IN_ANGSTROM.powi(3)),
        (Dimension::Temperature, "K") => Scale(1.0),
        (Dimension::Angle, "rad") => Scale(1.0),
        (Dimension::Angle, "deg") => Scale(std::f64::consts::PI / 180.0),
        (Dimension::Angle, "pi") => Scale(std::f64::consts::PI),
        _ => return None,
    };
    Some(m)
}
