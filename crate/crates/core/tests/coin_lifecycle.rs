use proptest::prelude::*;
use qcoin::coin::{self, Coin, CoinScheme, Provenance};
use qcoin::{Error, QuantumState, Seed, Stream};

#[test]
fn fixture_round_trip_keeps_secret_and_cap() {
    let scheme = CoinScheme::new(3, Seed(5)).unwrap().with_cap(4);
    let bytes = scheme.to_fixture_bytes();
    let back = CoinScheme::from_fixture_bytes(&bytes).unwrap();
    assert_eq!(back.n(), 3);
    assert_eq!(back.cap(), 4);
    assert_eq!(back.reveal_secret(), scheme.reveal_secret());
    assert!(CoinScheme::from_fixture_bytes(&bytes[..bytes.len() - 1]).is_err());
}

#[test]
fn analytic_branches_match_circuit_post_states() {
    let scheme = CoinScheme::new(4, Seed(8)).unwrap();
    let mut rng = Seed(8).rng(Stream::Trial);
    let input = QuantumState::haar_with_overlap(scheme.reveal_secret(), 0.6, &mut rng).unwrap();
    let analytic = coin::verify_analytic(&scheme, &input).unwrap();
    assert!((analytic.accept_probability - 0.36).abs() < 1e-12);
    let accept_state = analytic.accept_state.unwrap();
    let reject_state = analytic.reject_state.unwrap();
    for i in 0..200 {
        let r = coin::verify(&scheme.oracle(), &input, &mut Seed(i).rng(Stream::Measurement)).unwrap();
        let expected = if r.accepted { &accept_state } else { &reject_state };
        assert!(r.post_state.fidelity(expected).unwrap() > 1.0 - 1e-9);
    }
}

#[test]
fn forged_coins_are_tagged() {
    let scheme = CoinScheme::new(2, Seed(1)).unwrap();
    let (_, coin) = qcoin::forgery::run_retry_forger(&scheme, 10_000, Seed(2)).unwrap();
    assert_eq!(coin.unwrap().provenance(), &Provenance::Forged);
    assert_eq!(Coin::external(QuantumState::zero(2).unwrap()).provenance(), &Provenance::External);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn accepted_coins_stay_accepted(n in 1usize..=6, seed in any::<u64>(), overlap in 0.3f64..1.0) {
        let scheme = CoinScheme::new(n, Seed(seed)).unwrap();
        let mut rng = Seed(seed).rng(Stream::Trial);
        let input = QuantumState::haar_with_overlap(scheme.reveal_secret(), overlap, &mut rng).unwrap();
        let oracle = scheme.oracle();
        let mut state = input;
        let mut accepted = false;
        for _ in 0..50 {
            let r = coin::verify(&oracle, &state, &mut rng).unwrap();
            state = r.post_state;
            if accepted {
                prop_assert!(r.accepted);
            }
            accepted |= r.accepted;
        }
    }

    #[test]
    fn issuance_cap_is_enforced(n in 1usize..=4, cap in 0u64..10) {
        let scheme = CoinScheme::new(n, Seed(cap)).unwrap().with_cap(cap);
        for serial in 0..cap {
            let coin = scheme.mint().unwrap();
            prop_assert_eq!(coin.provenance(), &Provenance::Minted { serial });
        }
        let over_cap = matches!(scheme.mint(), Err(Error::IssuanceCap { .. }));
        prop_assert!(over_cap);
        prop_assert_eq!(scheme.issued_count(), cap);
    }

    #[test]
    fn identical_seeds_give_identical_runs(n in 1usize..=5, seed in any::<u64>()) {
        let a = coin::robustness_experiment(&CoinScheme::new(n, Seed(seed)).unwrap(), 0.4, 20, Seed(seed)).unwrap();
        let b = coin::robustness_experiment(&CoinScheme::new(n, Seed(seed)).unwrap(), 0.4, 20, Seed(seed)).unwrap();
        prop_assert_eq!(a.passes, b.passes);
        prop_assert_eq!(a.mean_post_fidelity_given_pass, b.mean_post_fidelity_given_pass);
    }
}
