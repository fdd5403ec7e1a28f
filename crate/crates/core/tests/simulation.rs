use approx::assert_relative_eq;
use statrs::function::erf::erfc;

use dfrelay::analytic::{qam_scheme, relay_error_prob, state_probability, total_ser, NetworkScenario, RelayState};
use dfrelay::channel::{db_to_linear, HoytLink};
use dfrelay::mcsim::{estimate_ser, simulate, Fading};

fn within_sigmas(observed: f64, expected: f64, trials: u64, sigmas: f64) -> bool {
    let sd = (expected * (1.0 - expected) / trials as f64).sqrt();
    (observed - expected).abs() <= sigmas * sd
}

#[test]
fn two_identical_relays_at_15_db() {
    let s = NetworkScenario::symmetric(2, 0.3, db_to_linear(15.0), 4).unwrap();
    let exact = total_ser(&s).unwrap().total;
    let est = estimate_ser(&s, 1_000_000, 101).unwrap();
    assert!(within_sigmas(est.ser, exact, est.trials, 3.0), "{} vs {exact}", est.ser);
}

#[test]
fn single_relay_at_10_db() {
    let s = NetworkScenario::symmetric(1, 0.5, db_to_linear(10.0), 4).unwrap();
    let exact = total_ser(&s).unwrap().total;
    let est = estimate_ser(&s, 1_000_000, 102).unwrap();
    assert!(within_sigmas(est.ser, exact, est.trials, 3.0), "{} vs {exact}", est.ser);
}

#[test]
fn relay_error_frequency() {
    let mut seed = 200;
    for m in [4, 16] {
        for q in [0.3, 0.5, 1.0] {
            for snr in [0.0, 5.0, 10.0] {
                let s = NetworkScenario::symmetric(1, q, db_to_linear(snr), m).unwrap();
                let p = relay_error_prob(&s.sr()[0], s.qam()).unwrap();
                seed += 1;
                let r = simulate(&s, 1_000_000, seed, Fading::Hoyt).unwrap();
                let f = r.relay_failures[0] as f64 / r.trials as f64;
                assert!(within_sigmas(f, p, r.trials, 3.0), "M={m} q={q} {snr} dB: {f} vs {p}");
            }
        }
    }
}

#[test]
fn relay_state_frequencies() {
    let l = |q, db| HoytLink::with_mean_snr_db(q, db).unwrap();
    let s = NetworkScenario::new(
        l(0.5, 8.0),
        vec![l(0.3, 4.0), l(0.7, 6.0), l(1.0, 2.0)],
        vec![l(0.5, 8.0); 3],
        qam_scheme(4).unwrap(),
    )
    .unwrap();
    let b = total_ser(&s).unwrap();
    let r = simulate(&s, 1_000_000, 303, Fading::Hoyt).unwrap();
    let mut chi2 = 0.0;
    for state in RelayState::all(3) {
        let p = state_probability(&state, &b.relay_errors).unwrap();
        let n = r.state_counts[state.index() as usize] as f64;
        let expected = p * r.trials as f64;
        chi2 += (n - expected).powi(2) / expected;
    }
    // 7 degrees of freedom; 0.999 quantile is 24.32.
    assert!(chi2 < 24.32, "chi-square {chi2}");
}

fn gaussian_q(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

#[test]
fn awgn_calibration() {
    for (m, db) in [(4, 10.0), (16, 10.0), (16, 16.0)] {
        let gamma = db_to_linear(db);
        let qam = qam_scheme(m).unwrap();
        let c = qam.c_const();
        let x = gaussian_q((2.0 * qam.g_qam() * gamma).sqrt());
        let exact = 4.0 * c * x - 4.0 * c * c * x * x;
        let s = NetworkScenario::symmetric(0, 1.0, gamma, m).unwrap();
        let r = simulate(&s, 1_000_000, 404 + m as u64, Fading::None).unwrap();
        let f = r.estimate().ser;
        assert!(within_sigmas(f, exact, r.trials, 3.0), "M={m} {db} dB: {f} vs {exact}");
    }
}

#[test]
fn silent_relays_reduce_to_direct_rayleigh() {
    let gb = db_to_linear(8.0);
    let direct = HoytLink::with_mean_snr(1.0, gb).unwrap();
    let silent = HoytLink::new(1.0, 1.0, 0.0, 1.0).unwrap();
    let s = NetworkScenario::new(direct, vec![direct; 2], vec![silent; 2], qam_scheme(4).unwrap()).unwrap();
    let qam = qam_scheme(4).unwrap();
    let (c, g) = (qam.c_const(), qam.g_qam());
    let mu = (g * gb / (1.0 + g * gb)).sqrt();
    let rayleigh = 2.0 * c * (1.0 - mu) - c * c * (1.0 - 4.0 / std::f64::consts::PI * mu * (1.0 / mu).atan());
    assert_relative_eq!(total_ser(&s).unwrap().total, rayleigh, max_relative = 1e-9);
    let est = estimate_ser(&s, 1_000_000, 505).unwrap();
    assert!(within_sigmas(est.ser, rayleigh, est.trials, 3.0), "{} vs {rayleigh}", est.ser);
}

#[test]
fn zero_snr_guessing_floor() {
    let silent = HoytLink::new(0.5, 1.0, 0.0, 1.0).unwrap();
    let s = NetworkScenario::new(silent, vec![silent; 2], vec![silent; 2], qam_scheme(4).unwrap()).unwrap();
    let est = estimate_ser(&s, 1_000_000, 606).unwrap();
    assert!(within_sigmas(est.ser, 0.75, est.trials, 3.0), "{}", est.ser);
    assert_relative_eq!(total_ser(&s).unwrap().total, 0.75, max_relative = 1e-9);
}
