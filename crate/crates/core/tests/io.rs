use kerrkit::fitting::fit_linear_trace;
use kerrkit::report::{emit_results, load_fit_result, render, write_output, Emittable, OutputFormat};
use kerrkit::synth::{frequency_grid, synth_trace, NoiseModel};
use kerrkit::trace::{load_trace, trace_to_string};
use kerrkit::{Error, ResonatorParams, SweepDirection};

fn params() -> ResonatorParams {
    ResonatorParams::from_quality_factors(95.1e9, 2e4, 2.901e4, 0.2, -1.21e3).unwrap()
}

#[test]
fn trace_round_trip_is_exact() {
    let p = params();
    let freqs = frequency_grid(&p, 6.0, 300);
    let traces = synth_trace(&p, &freqs, &[1e-15], SweepDirection::Up, NoiseModel::Snr { snr_db: 30.0 }, 7).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    emit_results(Emittable::Trace(&traces[0]), &path, OutputFormat::Csv, false).unwrap();
    let back = load_trace(&path).unwrap();
    assert_eq!(trace_to_string(&back), trace_to_string(&traces[0]));
    let (a, b) = (back.p_in_w.unwrap(), traces[0].p_in_w.unwrap());
    assert!((a / b - 1.0).abs() < 1e-11);
}

#[test]
fn existing_output_is_not_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    std::fs::write(&path, "keep").unwrap();
    let err = write_output(&path, "new", false).unwrap_err();
    assert!(matches!(err, Error::OutputExists(_)));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "keep");
    write_output(&path, "new", true).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "new");
}

#[test]
fn fit_result_survives_disk() {
    let p = params();
    let freqs = frequency_grid(&p, 8.0, 400);
    let trace = &synth_trace(&p, &freqs, &[0.0], SweepDirection::Up, NoiseModel::None, 1).unwrap()[0];
    let fit = fit_linear_trace(trace).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fit.json");
    emit_results(Emittable::Fit(&fit.result), &path, OutputFormat::Json, false).unwrap();
    let back = load_fit_result(&path).unwrap();
    assert_eq!(
        render(Emittable::Fit(&back), OutputFormat::Json).unwrap(),
        render(Emittable::Fit(&fit.result), OutputFormat::Json).unwrap()
    );
}
