//! Physical-unit annotation of dimensionless tables. Presentation only.

use std::fmt;
use std::str::FromStr;

use super::table::{Cell, Table};

/// Particle whose Compton wavelength sets the length scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Electron,
    Pion,
}

impl Preset {
    /// Compton wavelength and the unit it is expressed in.
    pub fn compton_wavelength(self) -> (f64, &'static str) {
        match self {
            Preset::Electron => (3.86e-3, "angstrom"),
            Preset::Pion => (1.41, "fm"),
        }
    }

    fn rest_energy_label(self) -> &'static str {
        match self {
            Preset::Electron => "m_e c^2",
            Preset::Pion => "m_pi c^2",
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "electron" => Ok(Preset::Electron),
            "pion" => Ok(Preset::Pion),
            other => Err(format!("unknown preset '{other}' (expected electron or pion)")),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Electron => "electron",
            Preset::Pion => "pion",
        })
    }
}

/// Appends `box_length_<unit>` (from the `lc` column, or `lengths` when the
/// box is not cubic) and names the rest-energy unit in the `kinetic` header.
/// `None` leaves the table untouched.
pub fn annotate_units(mut table: Table, preset: Option<Preset>) -> Table {
    let Some(preset) = preset else {
        return table;
    };
    let (lambda, unit) = preset.compton_wavelength();
    let lc_col = table.column("lc");
    let lengths_col = table.column("lengths");
    if lc_col.is_some() || lengths_col.is_some() {
        for row in &mut table.rows {
            let scaled = match (lc_col.map(|i| &row[i]), lengths_col.map(|i| &row[i])) {
                (Some(Cell::Float(lc)), _) => Cell::Float(lc * lambda),
                (_, Some(Cell::Floats(ls))) => Cell::Floats(ls.iter().map(|l| l * lambda).collect()),
                _ => Cell::Empty,
            };
            row.push(scaled);
        }
        table.columns.push(format!("box_length_{unit}"));
    }
    if let Some(k) = table.column("kinetic") {
        table.columns[k] = format!("kinetic[{}]", preset.rest_energy_label());
    }
    table
}
