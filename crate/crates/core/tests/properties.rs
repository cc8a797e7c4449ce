//! Property tests for the invariants the closed forms promise on every
//! input, not just the worked examples: normalization, order preservation,
//! monotonicity, visibility independence, and lossless spec round-trips.

use std::collections::BTreeMap;

use chanpure::optics::canonical_phase;
use chanpure::purify::{
    purified_pauli_probs, simulate_purification, two_channel_purified_probs_with_visibility,
    two_channel_virtual_probs, virtual_pauli_probs, CircuitConfig,
};
use chanpure::qcore::{ChannelSpec, DensityMatrix, PauliChannel};
use proptest::prelude::*;

/// Normalized single-qubit Pauli weights, bounded away from the
/// all-zero corner.
fn distribution() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(1e-6f64..1.0, 4).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

/// As `distribution`, with the largest weight moved to the identity slot.
fn dominant_distribution() -> impl Strategy<Value = Vec<f64>> {
    distribution().prop_map(|mut w| {
        let top = (0..4)
            .max_by(|&a, &b| w[a].partial_cmp(&w[b]).unwrap())
            .unwrap();
        w.swap(0, top);
        w
    })
}

fn channel(probs: Vec<f64>) -> PauliChannel<f64> {
    PauliChannel::new(1, probs).unwrap()
}

fn spec_strategy() -> impl Strategy<Value = ChannelSpec> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|p| ChannelSpec::Depolarizing { p }),
        (0.0f64..=1.0).prop_map(|p0| ChannelSpec::BitFlip { p0 }),
        (0.0f64..=1.0).prop_map(|p0| ChannelSpec::PhaseFlip { p0 }),
        distribution().prop_map(|w| ChannelSpec::Pauli {
            n_qubits: 1,
            probs: ["I", "X", "Y", "Z"]
                .iter()
                .map(|k| k.to_string())
                .zip(w)
                .collect::<BTreeMap<_, _>>(),
        }),
    ]
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn purification_outputs_stay_distributions_and_keep_the_order(w in distribution()) {
        let q = channel(w.clone());
        for out in [purified_pauli_probs(&q), virtual_pauli_probs(&q)] {
            let probs = out.probs();
            prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(probs.iter().all(|&p| (-1e-15..=1.0 + 1e-12).contains(&p)));
            for i in 0..4 {
                for j in 0..4 {
                    if w[i] >= w[j] {
                        prop_assert!(probs[i] >= probs[j] - 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn dominant_identity_never_loses_weight(w in dominant_distribution()) {
        let q = channel(w);
        let p0 = q.probs()[0];
        let p1 = purified_pauli_probs(&q).probs()[0];
        let p2 = virtual_pauli_probs(&q).probs()[0];
        prop_assert!(p1 >= p0 - 1e-12);
        prop_assert!(p2 >= p1 - 1e-12);
    }

    #[test]
    fn circuit_matches_closed_forms_at_any_visibility(
        wq in distribution(),
        wr in distribution(),
        v in 0.0f64..=1.0,
    ) {
        let q = channel(wq);
        let r = channel(wr);
        let cfg = CircuitConfig::new(v).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let outcome = simulate_purification(&q.to_kraus(), &r.to_kraus(), &rho, &cfg).unwrap();
        let (plus, minus, p_plus) =
            two_channel_purified_probs_with_visibility(&q, &r, v).unwrap();
        prop_assert!((outcome.p_plus - p_plus).abs() < 1e-9);
        prop_assert!(outcome.plus_chi.max_off_diagonal() < 1e-9);
        prop_assert!(max_diff(plus.probs(), &outcome.plus_chi.diagonal()) < 1e-9);
        match (minus, &outcome.minus_chi) {
            (Some(m), Some(chi)) => {
                prop_assert!(chi.max_off_diagonal() < 1e-9);
                prop_assert!(max_diff(m.probs(), &chi.diagonal()) < 1e-9);
            }
            // Disagreement is only allowed at the vanishing-probability edge.
            _ => prop_assert!(1.0 - p_plus < 1e-8),
        }
    }

    #[test]
    fn virtual_distribution_does_not_depend_on_visibility(
        wq in distribution(),
        wr in distribution(),
        v in 0.1f64..=1.0,
    ) {
        let q = channel(wq);
        let r = channel(wr);
        let rho = DensityMatrix::maximally_mixed(2);
        let at = |vis: f64| {
            let cfg = CircuitConfig::new(vis).unwrap();
            simulate_purification(&q.to_kraus(), &r.to_kraus(), &rho, &cfg).unwrap()
        };
        let dimmed = at(v);
        let full = at(1.0);
        if let (Some(a), Some(b)) = (&dimmed.virtual_chi, &full.virtual_chi) {
            prop_assert!(max_diff(&a.diagonal(), &b.diagonal()) < 1e-8);
            let closed = two_channel_virtual_probs(&q, &r).unwrap();
            prop_assert!(max_diff(closed.probs(), &a.diagonal()) < 1e-8);
        }
    }

    #[test]
    fn channel_specs_round_trip_through_json(spec in spec_strategy()) {
        let text = spec.to_json();
        let back = ChannelSpec::from_json(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert!(back.build::<f64>().is_ok());
    }

    #[test]
    fn canonical_phase_lands_in_the_principal_branch(x in -1e4f64..1e4) {
        let r = canonical_phase(x);
        prop_assert!(r > -std::f64::consts::PI && r <= std::f64::consts::PI);
        let turns = (x - r) / std::f64::consts::TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-6);
    }
}
