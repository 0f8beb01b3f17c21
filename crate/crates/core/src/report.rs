//! Serialization of results: JSON for fits, CSV for tables and traces.

use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bcs::BcsRow;
use crate::error::{Error, Result};
use crate::fitting::FitResult;
use crate::mixing::GainRow;
use crate::trace::{fmt_num, trace_to_string, ComplexTrace};

pub const GAIN_HEADER: &str = "xi,delta,re_gain,im_gain,gain_db";
pub const BCS_HEADER: &str = "t_k,qi,f0_ratio";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::domain(format!("format must be json|csv, got `{other}`"))),
        }
    }
}

/// Anything the toolkit can write out.
#[derive(Debug, Clone, Copy)]
pub enum Emittable<'a> {
    Fit(&'a FitResult),
    Gain(&'a [GainRow]),
    Bcs(&'a [BcsRow]),
    Trace(&'a ComplexTrace),
}

pub fn fit_to_json(result: &FitResult) -> Result<String> {
    let mut s = serde_json::to_string_pretty(result)?;
    s.push('\n');
    Ok(s)
}

pub fn fit_from_json(text: &str) -> Result<FitResult> {
    Ok(serde_json::from_str(text)?)
}

fn fit_to_csv(result: &FitResult) -> String {
    let mut out = String::from("parameter,value,sigma\n");
    for (name, value) in &result.params {
        let sigma = result.sigma.get(name).map_or_else(String::new, |s| fmt_num(*s));
        out.push_str(&format!("{name},{},{sigma}\n", fmt_num(*value)));
    }
    out
}

pub fn gain_to_csv(rows: &[GainRow]) -> String {
    let mut out = format!("{GAIN_HEADER}\n");
    for r in rows {
        let (re, im, db) = match (r.gain, r.gain_db()) {
            (Some(g), Some(db)) => (fmt_num(g.re), fmt_num(g.im), fmt_num(db)),
            _ => ("nan".into(), "nan".into(), "nan".into()),
        };
        out.push_str(&format!("{},{},{re},{im},{db}\n", fmt_num(r.xi), fmt_num(r.delta)));
    }
    out
}

pub fn bcs_to_csv(rows: &[BcsRow]) -> String {
    let mut out = format!("{BCS_HEADER}\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", fmt_num(r.t_k), fmt_num(r.qi), fmt_num(r.f0_ratio)));
    }
    out
}

pub fn render(item: Emittable<'_>, format: OutputFormat) -> Result<String> {
    match (item, format) {
        (Emittable::Fit(r), OutputFormat::Json) => fit_to_json(r),
        (Emittable::Fit(r), OutputFormat::Csv) => Ok(fit_to_csv(r)),
        (Emittable::Gain(rows), OutputFormat::Csv) => Ok(gain_to_csv(rows)),
        (Emittable::Bcs(rows), OutputFormat::Csv) => Ok(bcs_to_csv(rows)),
        (Emittable::Trace(t), OutputFormat::Csv) => Ok(trace_to_string(t)),
        (Emittable::Gain(rows), OutputFormat::Json) => json_lines(rows),
        (Emittable::Bcs(rows), OutputFormat::Json) => json_lines(rows),
        (Emittable::Trace(t), OutputFormat::Json) => {
            let mut s = serde_json::to_string_pretty(t)?;
            s.push('\n');
            Ok(s)
        }
    }
}

fn json_lines<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

/// Writes `contents` to `path`. Existing files are left alone unless
/// `force` is set.
pub fn write_output(path: &Path, contents: &str, force: bool) -> Result<()> {
    let mut file = if force {
        File::create(path)
    } else {
        OpenOptions::new().write(true).create_new(true).open(path)
    }
    .map_err(|e| {
        if e.kind() == std::io::ErrorKind::AlreadyExists {
            Error::OutputExists(path.to_path_buf())
        } else {
            Error::io(path, e)
        }
    })?;
    file.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn emit_results(item: Emittable<'_>, path: &Path, format: OutputFormat, force: bool) -> Result<()> {
    write_output(path, &render(item, format)?, force)
}

pub fn load_fit_result(path: &Path) -> Result<FitResult> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    fit_from_json(&text)
}

/// A numeric CSV table with named columns, used for the point lists that
/// feed the scalar fits (`n_ph,f_peak_hz`, `t_k,qi`, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Like [`Table::column`] but a missing column is a parse error.
    pub fn require(&self, name: &str) -> Result<Vec<f64>> {
        self.column(name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("missing column `{name}` (have {})", self.headers.join(",")),
        })
    }
}

pub fn parse_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = record
            .as_ref()
            .ok()
            .and_then(|r| r.position())
            .map_or(i + 2, |p| p.line() as usize);
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("not a number: `{field}`"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { headers, rows })
}

pub fn load_table(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_table(file).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_columns_by_name() {
        let t = parse_table("# comment\nt_k, qi\n1.5,2e4\n2.0,1.9e4\n".as_bytes()).unwrap();
        assert_eq!(t.require("qi").unwrap(), vec![2e4, 1.9e4]);
        assert!(t.column("n_ph").is_none());
        assert!(t.require("n_ph").is_err());
    }

    #[test]
    fn table_reports_bad_cell() {
        let err = parse_table("t_k,qi\n1,2\n3,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }
}
