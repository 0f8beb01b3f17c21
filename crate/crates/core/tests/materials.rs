use kerrkit::materials::{fit_universal, load_film_table, parse_film_table, sheet_inductance, universal_tc, FilmPoint};
use kerrkit::UniversalFit;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn fixture() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/films.csv")
}

fn synthetic_points(fit: &UniversalFit) -> Vec<FilmPoint> {
    (0..12)
        .map(|i| {
            let r_sq = 50.0 * 1.35f64.powi(i);
            let thickness_nm = 4.0 + i as f64;
            FilmPoint { r_sq, thickness_nm, tc_k: universal_tc(r_sq, fit).unwrap() / thickness_nm }
        })
        .collect()
}

#[test]
fn noiseless_round_trip() {
    let truth = UniversalFit::new(6487.0, 0.647);
    let fit = fit_universal(&synthetic_points(&truth)).unwrap();
    assert!((fit.a_coeff / 6487.0 - 1.0).abs() < 1e-6);
    assert!((fit.b_exp / 0.647 - 1.0).abs() < 1e-6);
}

#[test]
fn noisy_exponent_is_unbiased() {
    let truth = UniversalFit::new(6487.0, 0.647);
    let clean = synthetic_points(&truth);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bs: Vec<f64> = (0..100)
        .map(|_| {
            let pts: Vec<FilmPoint> = clean
                .iter()
                .map(|p| FilmPoint { tc_k: p.tc_k * (1.0 + noise.sample(&mut rng)), ..*p })
                .collect();
            fit_universal(&pts).unwrap().b_exp
        })
        .collect();
    let mean = bs.iter().sum::<f64>() / bs.len() as f64;
    let sd = (bs.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (bs.len() - 1) as f64).sqrt();
    let sem = sd / (bs.len() as f64).sqrt();
    assert!((mean - 0.647).abs() < 2.0 * sem, "mean {mean} ± {sem}");
}

#[test]
fn film_table_fit_lands_in_published_band() {
    let films = load_film_table(fixture()).unwrap();
    let points: Vec<FilmPoint> = films.iter().map(FilmPoint::from).collect();
    let fit = fit_universal(&points).unwrap();
    assert!((fit.a_coeff - 6487.0).abs() < 1607.0, "A = {}", fit.a_coeff);
    assert!((fit.b_exp - 0.647).abs() < 0.05, "B = {}", fit.b_exp);
    for f in &films {
        let l = sheet_inductance(f).unwrap();
        assert!(l > 1e-12 && l < 1e-9);
    }
}

#[test]
fn malformed_table_reports_line() {
    let text = "thickness_nm,tc_k,rho_n_ohm_m\n10,12,2e-6\n10,-1,2e-6\n";
    let err = parse_film_table(text.as_bytes()).unwrap_err().to_string();
    assert!(err.contains('3'), "{err}");
    assert!(parse_film_table("thickness_nm,tc_k\n1,2\n".as_bytes()).is_err());
}
