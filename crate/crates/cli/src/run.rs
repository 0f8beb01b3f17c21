//! Subcommand execution.

use std::io::Write;
use std::path::{Path, PathBuf};

use kerrkit::bcs::bcs_sweep;
use kerrkit::constants::dbm_to_watts;
use kerrkit::fitting::{
    fit_kerr_from_shift, fit_linear_trace, fit_nonlinear_trace, fit_qi_vs_temperature, fit_tls, FitResult,
    KerrShiftPoint, NonlinearOptions, PhotonCalibrationError, TemperaturePoint, TlsPoint,
};
use kerrkit::materials::{fit_universal, load_film_table, FilmPoint};
use kerrkit::mixing::gain_sweep;
use kerrkit::report::{load_table, render, write_output, Emittable, OutputFormat};
use kerrkit::synth::{frequency_grid, synth_trace, NoiseModel};
use kerrkit::trace::load_trace;
use kerrkit::{BcsParams, ComplexTrace, ResonatorParams, SignalDetuning, SweepDirection};

use crate::config::{BcsArgs, Command, FitArgs, FitTarget, GainArgs, MaterialArgs, RunConfig, SimulateArgs, SynthArgs};
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn need<T>(value: Option<T>, flag: &'static str) -> Result<T> {
    value.ok_or(CliError::Missing(flag))
}

struct Device {
    f0_ghz: Option<f64>,
    qi: Option<f64>,
    qe: Option<f64>,
    phi: Option<f64>,
    kerr_khz: Option<f64>,
}

impl Device {
    fn build(self) -> Result<ResonatorParams> {
        Ok(ResonatorParams::from_quality_factors(
            need(self.f0_ghz, "--f0-ghz")? * 1e9,
            need(self.qi, "--qi")?,
            need(self.qe, "--qe")?,
            self.phi.unwrap_or(0.0),
            need(self.kerr_khz, "--kerr-khz")? * 1e3,
        )?)
    }
}

/// Writes to `path`, or to stdout when no path is given.
fn deliver(text: &str, path: Option<&Path>, force: bool) -> Result<()> {
    match path {
        Some(p) => write_output(p, text, force)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| kerrkit::Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })?;
        }
    }
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    match &cfg.command {
        Command::Simulate(a) => simulate(a, cfg),
        Command::Synth(a) => synth(a, cfg),
        Command::Fit(a) => fit(a, cfg),
        Command::Gain(a) => gain(a, cfg),
        Command::Bcs(a) => bcs(a, cfg),
        Command::Material(a) => material(a, cfg),
    }
}

fn simulate(a: &SimulateArgs, cfg: &RunConfig) -> Result<()> {
    let params = Device {
        f0_ghz: a.f0_ghz,
        qi: a.qi,
        qe: a.qe,
        phi: a.phi,
        kerr_khz: a.kerr_khz,
    }
    .build()?;
    let power = dbm_to_watts(need(a.power_dbm, "--power-dbm")?);
    let freqs = frequency_grid(&params, a.span.unwrap_or(5.0), a.points.unwrap_or(801));
    let direction = a.direction.unwrap_or(SweepDirection::Up);
    let traces = synth_trace(&params, &freqs, &[power], direction, NoiseModel::None, cfg.seed)?;
    let text = render(Emittable::Trace(&traces[0]), a.format.unwrap_or(OutputFormat::Csv))?;
    deliver(&text, cfg.output_path.as_deref(), cfg.force)
}

fn synth(a: &SynthArgs, cfg: &RunConfig) -> Result<()> {
    let params = Device {
        f0_ghz: a.f0_ghz,
        qi: a.qi,
        qe: a.qe,
        phi: a.phi,
        kerr_khz: a.kerr_khz,
    }
    .build()?;
    let powers: Vec<f64> = need(a.power_dbm.clone(), "--power-dbm")?
        .into_iter()
        .map(dbm_to_watts)
        .collect();
    let dir = need(cfg.output_path.clone(), "--output")?;
    let noise = a.snr_db.map_or(NoiseModel::None, |snr_db| NoiseModel::Snr { snr_db });
    let freqs = frequency_grid(&params, a.span.unwrap_or(5.0), a.points.unwrap_or(801));
    let direction = a.direction.unwrap_or(SweepDirection::Up);
    let traces = synth_trace(&params, &freqs, &powers, direction, noise, cfg.seed)?;
    std::fs::create_dir_all(&dir).map_err(|e| kerrkit::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    for (i, t) in traces.iter().enumerate() {
        let text = render(Emittable::Trace(t), OutputFormat::Csv)?;
        write_output(&dir.join(format!("trace_{i:02}.csv")), &text, cfg.force)?;
    }
    Ok(())
}

fn load_traces(paths: &[PathBuf]) -> Result<Vec<ComplexTrace>> {
    paths.iter().map(|p| load_trace(p).map_err(CliError::from)).collect()
}

fn fit(a: &FitArgs, cfg: &RunConfig) -> Result<()> {
    let inputs = &cfg.input_paths;
    let kind = a.kind.unwrap_or(if inputs.len() > 1 { FitTarget::Nonlinear } else { FitTarget::Linear });
    let single = |what: &str| -> Result<&PathBuf> {
        match inputs.as_slice() {
            [one] => Ok(one),
            _ => Err(CliError::Invalid {
                key: "--input".into(),
                message: format!("{what} fit takes exactly one input, got {}", inputs.len()),
            }),
        }
    };
    let result: FitResult = match kind {
        FitTarget::Linear => fit_linear_trace(&load_trace(single("linear")?)?)?.result,
        FitTarget::Nonlinear => {
            let traces = load_traces(inputs)?;
            if traces.len() < 2 {
                return Err(CliError::Invalid {
                    key: "--input".into(),
                    message: "nonlinear fit needs a low-power trace followed by at least one driven trace".into(),
                });
            }
            let low = fit_linear_trace(&traces[0])?;
            let opts = NonlinearOptions {
                free_linear: a.free_linear.unwrap_or(false),
            };
            fit_nonlinear_trace(&traces[1..], &low, opts)?.result
        }
        FitTarget::KerrShift => {
            let table = load_table(single("kerr-shift")?)?;
            let n_ph = table.require("n_ph")?;
            let f_peak = table.require("f_peak_hz")?;
            let sigma = table.column("sigma_hz");
            let points: Vec<KerrShiftPoint> = n_ph
                .iter()
                .zip(&f_peak)
                .enumerate()
                .map(|(i, (&n, &f))| KerrShiftPoint {
                    n_ph: n,
                    f_peak_hz: f,
                    sigma_hz: sigma.as_ref().map(|s| s[i]),
                })
                .collect();
            let f0 = need(a.f0_ghz, "--f0-ghz")? * 1e9;
            let cal = a.power_sigma_dbm.map(|sigma_db| PhotonCalibrationError::PowerDb { sigma_db });
            fit_kerr_from_shift(&points, f0, cal, cfg.seed)?.result
        }
        FitTarget::Temperature => {
            let table = load_table(single("temperature")?)?;
            let points: Vec<TemperaturePoint> = table
                .require("t_k")?
                .into_iter()
                .zip(table.require("qi")?)
                .map(|(t_k, qi)| TemperaturePoint { t_k, qi })
                .collect();
            fit_qi_vs_temperature(&points, need(a.f0_ghz, "--f0-ghz")? * 1e9)?.result
        }
        FitTarget::Tls => {
            let table = load_table(single("tls")?)?;
            let points: Vec<TlsPoint> = table
                .require("n_ph")?
                .into_iter()
                .zip(table.require("qi")?)
                .map(|(n_ph, qi)| TlsPoint { n_ph, qi })
                .collect();
            fit_tls(&points)?.result
        }
    };
    let text = render(Emittable::Fit(&result), a.format.unwrap_or(OutputFormat::Json))?;
    deliver(&text, cfg.output_path.as_deref(), cfg.force)?;
    if result.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged)
    }
}

fn gain(a: &GainArgs, cfg: &RunConfig) -> Result<()> {
    let params = Device {
        f0_ghz: a.f0_ghz,
        qi: a.qi,
        qe: a.qe,
        phi: a.phi,
        kerr_khz: a.kerr_khz,
    }
    .build()?;
    let xis = need(a.xi.clone(), "--xi")?;
    let offset = SignalDetuning::from_offset_hz(&params, need(a.offset_khz, "--offset-khz")? * 1e3)?;
    let (lo, hi) = (a.delta_min.unwrap_or(-2.0), a.delta_max.unwrap_or(1.0));
    let n = a.points.unwrap_or(301);
    if n < 2 || !(hi > lo) {
        return Err(CliError::Invalid {
            key: "--delta-min/--delta-max/--points".into(),
            message: format!("need delta_min < delta_max and at least 2 points, got [{lo}, {hi}] with {n}"),
        });
    }
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let rows = gain_sweep(&params, &xis, &grid, &offset, a.direction.unwrap_or(SweepDirection::Up))?;
    let text = render(Emittable::Gain(&rows), a.format.unwrap_or(OutputFormat::Csv))?;
    deliver(&text, cfg.output_path.as_deref(), cfg.force)
}

fn bcs(a: &BcsArgs, cfg: &RunConfig) -> Result<()> {
    let params = BcsParams {
        tc_k: need(a.tc_k, "--tc-k")?,
        alpha: need(a.alpha, "--alpha")?,
        q_i_max: need(a.q_i_max, "--q-i-max")?,
        f0_hz: need(a.f0_ghz, "--f0-ghz")? * 1e9,
    };
    let lo = a.t_min_k.unwrap_or(0.1 * params.tc_k);
    let hi = a.t_max_k.unwrap_or(0.6 * params.tc_k);
    let n = a.points.unwrap_or(30);
    if n < 2 || !(hi > lo) {
        return Err(CliError::Invalid {
            key: "--t-min-k/--t-max-k/--points".into(),
            message: format!("need t_min_k < t_max_k and at least 2 points, got [{lo}, {hi}] with {n}"),
        });
    }
    let temps: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let rows = bcs_sweep(&params, &temps)?;
    let text = render(Emittable::Bcs(&rows), a.format.unwrap_or(OutputFormat::Csv))?;
    deliver(&text, cfg.output_path.as_deref(), cfg.force)
}

fn material(_a: &MaterialArgs, cfg: &RunConfig) -> Result<()> {
    let films = load_film_table(&cfg.input_paths[0])?;
    let points: Vec<FilmPoint> = films.iter().map(FilmPoint::from).collect();
    let fit = fit_universal(&points)?;
    let mut text = serde_json::to_string_pretty(&fit).map_err(kerrkit::Error::from)?;
    text.push('\n');
    deliver(&text, cfg.output_path.as_deref(), cfg.force)
}
