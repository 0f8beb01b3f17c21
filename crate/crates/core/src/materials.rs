//! Thin-film material properties: sheet resistance, sheet inductance, gap,
//! and the universal thickness–Tc–sheet-resistance power law.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{gap_zero, HBAR};
use crate::error::{Error, Result};
use crate::stats::fit_line;

/// A superconducting film characterized by DC transport.
///
/// `rho_n` is the maximum normal-state resistivity, just above `Tc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilmProperties {
    pub thickness_m: f64,
    pub tc_k: f64,
    /// Ω·m
    pub rho_n: f64,
}

impl FilmProperties {
    pub fn new(thickness_m: f64, tc_k: f64, rho_n: f64) -> Result<Self> {
        let film = FilmProperties {
            thickness_m,
            tc_k,
            rho_n,
        };
        film.validate()?;
        Ok(film)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("thickness_m", self.thickness_m),
            ("tc_k", self.tc_k),
            ("rho_n", self.rho_n),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Normal-state sheet resistance `ρn / t`, Ω/□.
    pub fn r_sq(&self) -> f64 {
        self.rho_n / self.thickness_m
    }

    /// `Δ0 = 2.08·kB·Tc`, joules.
    pub fn delta0_j(&self) -> f64 {
        gap_zero(self.tc_k)
    }

    /// Sheet inductance `ħ·R□ / (π·Δ0)`, H/□.
    pub fn l_sq(&self) -> f64 {
        sheet_inductance_from(self.r_sq(), self.delta0_j())
    }
}

pub(crate) fn sheet_inductance_from(r_sq: f64, delta0_j: f64) -> f64 {
    HBAR * r_sq / (PI * delta0_j)
}

/// Sheet inductance of a film, H/□.
pub fn sheet_inductance(film: &FilmProperties) -> Result<f64> {
    film.validate()?;
    Ok(film.l_sq())
}

/// Coefficients of `t·Tc = A · R□^(−B)`, with `t` in nm, `Tc` in K and
/// `R□` in Ω/□.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalFit {
    pub a_coeff: f64,
    pub b_exp: f64,
    pub a_err: f64,
    pub b_err: f64,
}

impl UniversalFit {
    pub fn new(a_coeff: f64, b_exp: f64) -> Self {
        UniversalFit {
            a_coeff,
            b_exp,
            a_err: 0.0,
            b_err: 0.0,
        }
    }
}

/// The product `t·Tc` (nm·K) predicted by the universal relation.
pub fn universal_tc(r_sq: f64, fit: &UniversalFit) -> Result<f64> {
    if !(r_sq.is_finite() && r_sq > 0.0) {
        return Err(Error::domain(format!("r_sq must be positive, got {r_sq}")));
    }
    Ok(fit.a_coeff * r_sq.powf(-fit.b_exp))
}

/// One film for the universal-relation fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilmPoint {
    /// Ω/□
    pub r_sq: f64,
    pub thickness_nm: f64,
    pub tc_k: f64,
}

impl From<&FilmProperties> for FilmPoint {
    fn from(f: &FilmProperties) -> Self {
        FilmPoint {
            r_sq: f.r_sq(),
            thickness_nm: f.thickness_m * 1e9,
            tc_k: f.tc_k,
        }
    }
}

/// Least-squares fit of `ln(t·Tc)` against `ln R□`.
///
/// `a_err` is propagated from the intercept error (`σ_A = A·σ_lnA`).
pub fn fit_universal(points: &[FilmPoint]) -> Result<UniversalFit> {
    if points.len() < 3 {
        return Err(Error::fit(format!(
            "universal fit needs at least 3 films, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|p| !(p.r_sq > 0.0 && p.thickness_nm > 0.0 && p.tc_k > 0.0))
    {
        return Err(Error::fit("film points must be strictly positive"));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.r_sq.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.thickness_nm * p.tc_k).ln()).collect();
    let line = fit_line(&xs, &ys)?;
    let a = line.intercept.exp();
    Ok(UniversalFit {
        a_coeff: a,
        b_exp: -line.slope,
        a_err: a * line.intercept_err,
        b_err: line.slope_err,
    })
}

#[derive(Debug, Deserialize)]
struct FilmRow {
    thickness_nm: f64,
    tc_k: f64,
    rho_n_ohm_m: f64,
}

const FILM_COLUMNS: [&str; 3] = ["thickness_nm", "tc_k", "rho_n_ohm_m"];

/// Parses a film table with header `thickness_nm,tc_k,rho_n_ohm_m`.
pub fn parse_film_table<R: Read>(reader: R) -> Result<Vec<FilmProperties>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    for col in FILM_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Parse {
                line: 1,
                message: format!("missing column `{col}`"),
            });
        }
    }
    let mut films = Vec::new();
    for (i, row) in rdr.deserialize::<FilmRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let film = FilmProperties::new(row.thickness_nm * 1e-9, row.tc_k, row.rho_n_ohm_m)
            .map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        films.push(film);
    }
    Ok(films)
}

pub fn load_film_table(path: impl AsRef<Path>) -> Result<Vec<FilmProperties>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_film_table(file)
}
