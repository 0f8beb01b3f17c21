//! Complex transmission traces and their CSV form.
//!
//! ```text
//! # power_dbm=-90
//! # temperature_k=0.02
//! # sweep=up
//! freq_hz,re_s21,im_s21
//! 9.51e10,0.99,0.01
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{dbm_to_watts, watts_to_dbm};
use crate::error::{Error, Result};
use crate::resonator::SweepDirection;

pub const TRACE_HEADER: &str = "freq_hz,re_s21,im_s21";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub f_hz: f64,
    pub s21: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexTrace {
    points: Vec<TracePoint>,
    /// Incident power at the device reference plane.
    pub p_in_w: Option<f64>,
    pub temperature_k: Option<f64>,
    pub sweep_direction: SweepDirection,
}

impl ComplexTrace {
    /// Validates that the trace is non-empty, finite and strictly increasing
    /// in frequency.
    pub fn new(points: Vec<TracePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("trace has no points"));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.f_hz.is_finite() && p.s21.re.is_finite() && p.s21.im.is_finite()) {
                return Err(Error::domain(format!("trace point {i} is not finite")));
            }
        }
        if let Some(i) = points.windows(2).position(|w| w[1].f_hz <= w[0].f_hz) {
            return Err(Error::domain(format!(
                "frequencies must be strictly increasing (points {} and {})",
                i,
                i + 1
            )));
        }
        Ok(ComplexTrace {
            points,
            p_in_w: None,
            temperature_k: None,
            sweep_direction: SweepDirection::Up,
        })
    }

    pub fn from_samples(freqs: &[f64], s21: &[Complex64]) -> Result<Self> {
        if freqs.len() != s21.len() {
            return Err(Error::domain("frequency and S21 arrays differ in length"));
        }
        ComplexTrace::new(
            freqs
                .iter()
                .zip(s21)
                .map(|(&f_hz, &s21)| TracePoint { f_hz, s21 })
                .collect(),
        )
    }

    pub fn with_power(mut self, p_in_w: f64) -> Self {
        self.p_in_w = Some(p_in_w);
        self
    }

    pub fn with_temperature(mut self, t_k: f64) -> Self {
        self.temperature_k = Some(t_k);
        self
    }

    pub fn with_direction(mut self, direction: SweepDirection) -> Self {
        self.sweep_direction = direction;
        self
    }

    pub fn points(&self) -> &[TracePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.f_hz).collect()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.s21).collect()
    }

    pub fn span_hz(&self) -> f64 {
        self.points[self.points.len() - 1].f_hz - self.points[0].f_hz
    }

    /// Multiplies every sample by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for p in out.points.iter_mut() {
            p.s21 *= c;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Reject NaN/Inf samples instead of dropping them.
    pub strict: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { strict: true }
    }
}

fn parse_meta(trace: &mut ComplexTrace, line_no: usize, body: &str) -> Result<()> {
    let Some((key, value)) = body.split_once('=') else {
        return Ok(()); // free-form comment
    };
    let (key, value) = (key.trim(), value.trim());
    let number = || {
        value.parse::<f64>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("metadata `{key}` is not a number: `{value}`"),
        })
    };
    match key {
        "power_dbm" => trace.p_in_w = Some(dbm_to_watts(number()?)),
        "p_in_w" => trace.p_in_w = Some(number()?),
        "temperature_k" => trace.temperature_k = Some(number()?),
        "sweep" => {
            trace.sweep_direction = value.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("sweep must be up|down, got `{value}`"),
            })?
        }
        _ => {}
    }
    Ok(())
}

/// Parses a trace. Samples are sorted by frequency; duplicates are rejected.
pub fn parse_trace<R: Read>(reader: R, opts: LoadOptions) -> Result<ComplexTrace> {
    let mut meta = ComplexTrace {
        points: Vec::new(),
        p_in_w: None,
        temperature_k: None,
        sweep_direction: SweepDirection::Up,
    };
    let mut header_seen = false;
    let mut rows: Vec<(usize, TracePoint)> = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(body) = text.strip_prefix('#') {
            parse_meta(&mut meta, line_no, body)?;
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = text.split(',').map(str::trim).collect();
            if cols != ["freq_hz", "re_s21", "im_s21"] {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header `{TRACE_HEADER}`, found `{text}`"),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 columns, found {}", fields.len()),
            });
        }
        let mut nums = [0.0f64; 3];
        for (slot, field) in nums.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("not a number: `{field}`"),
            })?;
        }
        if nums.iter().any(|v| !v.is_finite()) {
            if opts.strict {
                return Err(Error::Parse {
                    line: line_no,
                    message: "non-finite value".into(),
                });
            }
            continue;
        }
        rows.push((
            line_no,
            TracePoint {
                f_hz: nums[0],
                s21: Complex64::new(nums[1], nums[2]),
            },
        ));
    }
    if !header_seen {
        return Err(Error::Parse {
            line: 0,
            message: format!("missing header `{TRACE_HEADER}`"),
        });
    }
    rows.sort_by(|a, b| a.1.f_hz.total_cmp(&b.1.f_hz));
    if let Some(w) = rows.windows(2).find(|w| w[0].1.f_hz == w[1].1.f_hz) {
        return Err(Error::Parse {
            line: w[1].0.max(w[0].0),
            message: format!("duplicate frequency {} (also on line {})", w[1].1.f_hz, w[0].0.min(w[1].0)),
        });
    }
    let mut trace = ComplexTrace::new(rows.into_iter().map(|(_, p)| p).collect())?;
    trace.p_in_w = meta.p_in_w;
    trace.temperature_k = meta.temperature_k;
    trace.sweep_direction = meta.sweep_direction;
    Ok(trace)
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<ComplexTrace> {
    load_trace_with(path, LoadOptions::default())
}

pub fn load_trace_with(path: impl AsRef<Path>, opts: LoadOptions) -> Result<ComplexTrace> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_trace(file, opts).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Formats a float for CSV output (13 significant digits).
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else {
        format!("{v}")
    }
}

pub fn write_trace<W: Write>(trace: &ComplexTrace, mut w: W) -> std::io::Result<()> {
    if let Some(p) = trace.p_in_w {
        writeln!(w, "# power_dbm={}", fmt_num(watts_to_dbm(p)))?;
    }
    if let Some(t) = trace.temperature_k {
        writeln!(w, "# temperature_k={}", fmt_num(t))?;
    }
    writeln!(w, "# sweep={}", trace.sweep_direction)?;
    writeln!(w, "{TRACE_HEADER}")?;
    for p in &trace.points {
        writeln!(w, "{},{},{}", fmt_num(p.f_hz), fmt_num(p.s21.re), fmt_num(p.s21.im))?;
    }
    Ok(())
}

pub fn trace_to_string(trace: &ComplexTrace) -> String {
    let mut buf = Vec::new();
    write_trace(trace, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("trace CSV is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "# power_dbm=-90\n# sweep=down\nfreq_hz,re_s21,im_s21\n3,0.5,0.1\n1,1.0,0.0\n2,0.9,-0.1\n";

    #[test]
    fn parses_and_sorts() {
        let t = parse_trace(SMALL.as_bytes(), LoadOptions::default()).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.frequencies(), vec![1.0, 2.0, 3.0]);
        assert_eq!(t.sweep_direction, SweepDirection::Down);
        let p = t.p_in_w.unwrap();
        assert!((p / 1e-12 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let nan = "freq_hz,re_s21,im_s21\n1,1,0\n2,NaN,0\n";
        match parse_trace(nan.as_bytes(), LoadOptions::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let lax = parse_trace(nan.as_bytes(), LoadOptions { strict: false }).unwrap();
        assert_eq!(lax.len(), 1);

        let dup = "freq_hz,re_s21,im_s21\n1,1,0\n1,0.5,0\n";
        assert!(parse_trace(dup.as_bytes(), LoadOptions::default()).is_err());
        let headless = "1,1,0\n";
        assert!(parse_trace(headless.as_bytes(), LoadOptions::default()).is_err());
        let short = "freq_hz,re_s21,im_s21\n1,1\n";
        assert!(parse_trace(short.as_bytes(), LoadOptions::default()).is_err());
    }

    #[test]
    fn round_trip() {
        let freqs: Vec<f64> = (0..50).map(|i| 95.1e9 + i as f64 * 1234.567).collect();
        let vals: Vec<Complex64> = (0..50)
            .map(|i| Complex64::from_polar(0.3 + i as f64 / 71.0, i as f64 * 0.37))
            .collect();
        let t = ComplexTrace::from_samples(&freqs, &vals)
            .unwrap()
            .with_power(3.3e-14)
            .with_temperature(0.02);
        let back = parse_trace(trace_to_string(&t).as_bytes(), LoadOptions::default()).unwrap();
        for (a, b) in t.points().iter().zip(back.points()) {
            assert!(((a.f_hz - b.f_hz) / a.f_hz).abs() < 1e-12);
            assert!((a.s21 - b.s21).norm() / a.s21.norm() < 1e-12);
        }
        assert!((back.p_in_w.unwrap() / 3.3e-14 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn rejects_non_monotone_construction() {
        let p = |f| TracePoint { f_hz: f, s21: Complex64::new(1.0, 0.0) };
        assert!(ComplexTrace::new(vec![p(2.0), p(1.0)]).is_err());
        assert!(ComplexTrace::new(vec![]).is_err());
    }
}
