use proptest::prelude::*;
use qcoin::blindverify::{self, qotp_decrypt, qotp_encrypt, Bank, BlindOptions, Channel, Merchant, PadKeys};
use qcoin::coin::{Coin, CoinScheme};
use qcoin::{QuantumState, Seed, Stream};

fn merchant(state: &QuantumState) -> Merchant {
    Merchant { coin: Coin::external(state.clone()) }
}

#[test]
fn every_abort_point_reports_its_step() {
    let scheme = CoinScheme::new(2, Seed(1)).unwrap();
    let bank = Bank::new(&scheme);
    let psi = scheme.reveal_secret();
    let steps = ["session-open", "instructions", "measurement-update", "output-return", "output-delivery", "verdict"];
    for (i, step) in steps.iter().enumerate() {
        match blindverify::run_blind_verification(&bank, merchant(psi), &mut Channel::failing_at(i), Seed(0)) {
            Err(qcoin::Error::ProtocolAbort(s)) => assert_eq!(&s, step),
            other => panic!("expected abort at {step}, got {other:?}"),
        }
    }
}

#[test]
fn padded_output_return_hides_the_coin() {
    let scheme = CoinScheme::new(2, Seed(3)).unwrap();
    let bank = Bank::new(&scheme);
    let psi = scheme.reveal_secret();
    let out = blindverify::run_blind_verification(&bank, merchant(psi), &mut Channel::new(), Seed(4)).unwrap();
    let payloads = out.transcript.quantum_payloads();
    assert_eq!(payloads.iter().map(|p| p.0).collect::<Vec<_>>(), ["output-return", "output-delivery"]);
    // Each payload is ψ under some pad, so it keeps unit norm but is not ψ
    // for a non-trivial pad.
    for (_, s) in payloads {
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn workload_rows_for_small_n() {
    for n in 1..=3 {
        let scheme = CoinScheme::new(n, Seed(n as u64)).unwrap();
        let bank = Bank::new(&scheme);
        let psi = scheme.reveal_secret();
        let a = blindverify::run_online_verification(&bank, merchant(psi), &mut Channel::new(), Seed(9)).unwrap();
        let b = blindverify::run_blind_verification(&bank, merchant(psi), &mut Channel::new(), Seed(9)).unwrap();
        let rows = blindverify::compare_bank_workload(&a.transcript, &b.transcript).unwrap();
        assert_eq!(rows[0].bank_other, blindverify::verification_circuit_gates(n));
        assert_eq!(rows[1].bank_other, 0);
        assert!(blindverify::compare_bank_workload(&b.transcript, &a.transcript).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pad_round_trip(n in 1usize..=5, key in any::<u64>(), seed in any::<u64>()) {
        let s = QuantumState::haar_random(n, &mut Seed(seed).rng(Stream::Trial)).unwrap();
        let keys = PadKeys::from_index(n, key % (1 << (2 * n)));
        let back = qotp_decrypt(&qotp_encrypt(&s, &keys).unwrap(), &keys).unwrap();
        prop_assert!(back.fidelity(&s).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn flows_agree_and_respect_budget(n in 1usize..=4, seed in any::<u64>(), eps in 0.0f64..=1.0) {
        let scheme = CoinScheme::new(n, Seed(seed)).unwrap();
        let bank = Bank::new(&scheme);
        let state = scheme.reveal_secret().perturb(eps, &mut Seed(seed).rng(Stream::Noise)).unwrap();
        let a = blindverify::run_online_verification(&bank, merchant(&state), &mut Channel::new(), Seed(seed)).unwrap();
        let options = BlindOptions { anonymous_sender: seed % 2 == 0, ..Default::default() };
        let b = blindverify::run_blind_verification_with(&bank, merchant(&state), &mut Channel::new(), Seed(seed), &options).unwrap();
        prop_assert_eq!(a.accepted, b.accepted);
        let g = b.transcript.final_step_gates();
        prop_assert!(g.x <= n as u64 && g.z <= n as u64);
    }

    #[test]
    fn transcripts_repeat(n in 1usize..=3, seed in any::<u64>()) {
        let scheme = CoinScheme::new(n, Seed(seed)).unwrap();
        let bank = Bank::new(&scheme);
        let psi = scheme.reveal_secret();
        let t1 = blindverify::run_blind_verification(&bank, merchant(psi), &mut Channel::new(), Seed(seed)).unwrap().transcript.to_text();
        let t2 = blindverify::run_blind_verification(&bank, merchant(psi), &mut Channel::new(), Seed(seed)).unwrap().transcript.to_text();
        prop_assert_eq!(t1, t2);
    }
}
