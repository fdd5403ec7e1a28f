//! The relays and the destination all see the same transmitted symbol. For
//! 16-QAM the inner symbols have more neighbours and err more often on every
//! hop, so relay failures and destination errors are positively correlated.
//! The state sum over symbol-averaged probabilities ignores that; the oracle
//! below conditions on the symbol's neighbour counts first and averages
//! afterwards, using θ-quadrature for every fading average.

use std::f64::consts::PI;

use dfrelay::analytic::{relay_oracle_quadrature, ser_oracle_quadrature, total_ser, NetworkScenario, RelayState};
use dfrelay::channel::db_to_linear;
use dfrelay::mcsim::{simulate, Fading};

/// `(weight, neighbours)` of the per-axis symbol positions: edge points have
/// one neighbour along the axis, inner points two.
fn axis_classes(m: u32) -> Vec<(f64, f64)> {
    let side = (m as f64).sqrt();
    let mut v = vec![(2.0 / side, 1.0)];
    if side > 2.0 {
        v.push((1.0 - 2.0 / side, 2.0));
    }
    v
}

/// Error probability of a symbol with `(ni, nq)` axis neighbours given the
/// Craig integrals over `[0, π/2]` and `[0, π/4]`.
fn symbol_error(ni: f64, nq: f64, full: f64, quarter: f64) -> f64 {
    (ni + nq) / PI * full - ni * nq / PI * quarter
}

/// `(SER, state probabilities)` with the symbol conditioned on first.
fn symbol_conditioned(s: &NetworkScenario) -> (f64, Vec<f64>) {
    let k = s.relays();
    let relay_integrals: Vec<_> = s.sr().iter().map(|l| relay_oracle_quadrature(l, s.qam()).unwrap()).collect();
    let dest: Vec<_> = RelayState::all(k).map(|st| ser_oracle_quadrature(s, &st).unwrap()).collect();
    let mut ser = 0.0;
    let mut states = vec![0.0; 1 << k];
    for &(wi, ni) in &axis_classes(s.qam().m()) {
        for &(wq, nq) in &axis_classes(s.qam().m()) {
            let fail: Vec<f64> = relay_integrals.iter().map(|&(a, b)| symbol_error(ni, nq, a, b)).collect();
            for (z, st) in RelayState::all(k).enumerate() {
                let p: f64 = st.bits().iter().zip(&fail).map(|(&on, &f)| if on { 1.0 - f } else { f }).product();
                states[z] += wi * wq * p;
                ser += wi * wq * p * symbol_error(ni, nq, dest[z].0, dest[z].1);
            }
        }
    }
    (ser, states)
}

fn z_score(observed: f64, expected: f64, trials: u64) -> f64 {
    (observed - expected) / (expected * (1.0 - expected) / trials as f64).sqrt()
}

#[test]
fn four_qam_symbols_are_equivalent() {
    for (k, q, db) in [(1, 0.3, 5.0), (2, 0.5, 10.0), (3, 1.0, 0.0)] {
        let s = NetworkScenario::symmetric(k, q, db_to_linear(db), 4).unwrap();
        let (exact, _) = symbol_conditioned(&s);
        let averaged = total_ser(&s).unwrap().total;
        assert!(((exact - averaged) / averaged).abs() < 1e-9, "{exact} vs {averaged}");
    }
}

#[test]
fn direct_link_needs_no_conditioning() {
    let s = NetworkScenario::symmetric(0, 0.5, db_to_linear(10.0), 16).unwrap();
    let (exact, _) = symbol_conditioned(&s);
    let averaged = total_ser(&s).unwrap().total;
    assert!(((exact - averaged) / averaged).abs() < 1e-9);
}

#[test]
fn sixteen_qam_simulation_tracks_symbol_conditioned_ser() {
    for (i, (k, q, db)) in [(3, 1.0, 5.0), (2, 0.3, 10.0), (1, 0.5, 10.0)].into_iter().enumerate() {
        let s = NetworkScenario::symmetric(k, q, db_to_linear(db), 16).unwrap();
        let (exact, states) = symbol_conditioned(&s);
        let averaged = total_ser(&s).unwrap().total;
        let r = simulate(&s, 1_000_000, 700 + i as u64, Fading::Hoyt).unwrap();
        let sim = r.estimate().ser;

        assert!(z_score(sim, exact, r.trials).abs() < 3.0, "K={k}: sim {sim} vs conditioned {exact}");
        // The averaged form sits measurably below both.
        assert!(exact > averaged);
        assert!(z_score(sim, averaged, r.trials) > 3.0, "K={k}: sim {sim} vs averaged {averaged}");

        for (z, &p) in states.iter().enumerate() {
            let f = r.state_counts[z] as f64 / r.trials as f64;
            assert!(z_score(f, p, r.trials).abs() < 4.0, "K={k} state {z}: {f} vs {p}");
        }
    }
}
