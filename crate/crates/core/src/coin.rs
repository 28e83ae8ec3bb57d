//! Quantum coins: every coin of a denomination is a copy of one secret
//! Haar-random state `ψ`, and anyone holding the black-box reflection
//! `U_ψ = I − 2|ψ⟩⟨ψ|` can verify it.
//!
//! The verification circuit prepares an ancilla in `|0⟩`, applies `H`, a
//! controlled `U_ψ` on the coin register, `H` again and measures the
//! ancilla. A valid coin always produces outcome `1`; this module treats
//! outcome `1` as *accept*. The generic single-output-bit formulation where
//! a valid token reads `0` is the inverted convention.

use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::qstate::{QuantumState, Seed, Stream};
use crate::{Error, Result};

const SCHEME_MAGIC: &[u8; 4] = b"QCSC";
const SCHEME_VERSION: u16 = 1;
const SECRET_MARK: &[u8; 8] = b"SECRET\0\0";

/// Default issuance cap `n³`.
pub fn default_poly_cap(n: usize) -> u64 {
    (n as u64).pow(3)
}

/// The bank's secret: the coin state and the issuance counter.
#[derive(Debug)]
pub struct CoinScheme {
    n: usize,
    psi: QuantumState,
    issued: AtomicU64,
    cap: u64,
}

impl Clone for CoinScheme {
    fn clone(&self) -> Self {
        CoinScheme {
            n: self.n,
            psi: self.psi.clone(),
            issued: AtomicU64::new(self.issued_count()),
            cap: self.cap,
        }
    }
}

/// Where a coin came from. Experiments use it to tell bank-minted coins
/// from adversary output; it is never consulted by verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Minted { serial: u64 },
    Forged,
    External,
}

#[derive(Clone, Debug)]
pub struct Coin {
    pub state: QuantumState,
    provenance: Provenance,
}

impl Coin {
    pub fn new(state: QuantumState, provenance: Provenance) -> Self {
        Coin { state, provenance }
    }

    /// Wraps a state of unknown origin.
    pub fn external(state: QuantumState) -> Self {
        Coin { state, provenance: Provenance::External }
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

impl CoinScheme {
    pub fn new(n: usize, seed: Seed) -> Result<Self> {
        let psi = QuantumState::haar_random(n, &mut seed.rng(Stream::Scheme))?;
        Ok(Self::from_state(psi))
    }

    pub fn from_state(psi: QuantumState) -> Self {
        let n = psi.n();
        CoinScheme { n, psi, issued: AtomicU64::new(0), cap: default_poly_cap(n) }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn issued_count(&self) -> u64 {
        self.issued.load(Ordering::SeqCst)
    }

    /// Issues a fresh copy of `ψ`.
    pub fn mint(&self) -> Result<Coin> {
        let serial = self
            .issued
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |issued| {
                (issued < self.cap).then_some(issued + 1)
            })
            .map_err(|_| Error::IssuanceCap { cap: self.cap })?;
        Ok(Coin { state: self.psi.clone(), provenance: Provenance::Minted { serial } })
    }

    /// Black-box handle with its own query counter.
    pub fn oracle(&self) -> VerificationOracle<'_> {
        VerificationOracle { psi: &self.psi, queries: 0.into() }
    }

    /// The secret state. Only bank-side experiment code and explicit
    /// `--reveal-secret` output use this.
    pub fn reveal_secret(&self) -> &QuantumState {
        &self.psi
    }

    /// Fixture layout: `"QCSC"`, version (u16 LE), `"SECRET\0\0"`,
    /// n (u32 LE), issuance cap (u64 LE), then `ψ` in the state layout.
    pub fn to_fixture_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(SCHEME_MAGIC);
        out.extend_from_slice(&SCHEME_VERSION.to_le_bytes());
        out.extend_from_slice(SECRET_MARK);
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&self.cap.to_le_bytes());
        out.extend_from_slice(&self.psi.to_bytes());
        out
    }

    pub fn from_fixture_bytes(bytes: &[u8]) -> Result<Self> {
        const HEADER: usize = 4 + 2 + 8 + 4 + 8;
        if bytes.len() < HEADER || &bytes[..4] != SCHEME_MAGIC {
            return Err(Error::Format("not a coin scheme fixture".into()));
        }
        if u16::from_le_bytes([bytes[4], bytes[5]]) != SCHEME_VERSION {
            return Err(Error::Format("unsupported coin scheme fixture version".into()));
        }
        if &bytes[6..14] != SECRET_MARK {
            return Err(Error::Format("coin scheme fixture lacks the SECRET mark".into()));
        }
        let n = u32::from_le_bytes(bytes[14..18].try_into().unwrap()) as usize;
        let cap = u64::from_le_bytes(bytes[18..26].try_into().unwrap());
        let psi = QuantumState::from_bytes(&bytes[HEADER..])?;
        if psi.n() != n {
            return Err(Error::Format("fixture qubit count does not match its state".into()));
        }
        Ok(Self::from_state(psi).with_cap(cap))
    }
}

/// Controlled `U_ψ` as an opaque oracle. The handle cannot reveal `ψ`; it
/// only applies the controlled reflection and counts how often it did.
#[derive(Debug)]
pub struct VerificationOracle<'a> {
    psi: &'a QuantumState,
    queries: std::cell::Cell<u64>,
}

impl VerificationOracle<'_> {
    pub fn n(&self) -> usize {
        self.psi.n()
    }

    pub fn queries(&self) -> u64 {
        self.queries.get()
    }

    /// One oracle query: controlled `U_ψ` with `control` driving the
    /// reflection on the `target` qubits of `state`.
    pub fn apply_controlled(
        &self,
        state: &mut QuantumState,
        control: usize,
        target: Range<usize>,
    ) -> Result<()> {
        state.apply_controlled_reflection(control, target, self.psi)?;
        self.queries.set(self.queries.get() + 1);
        Ok(())
    }

    /// One oracle query used uncontrolled: `U_ψ` on a bare `n`-qubit state,
    /// realised by driving the control with an ancilla fixed to `|1⟩`.
    pub fn apply(&self, state: &mut QuantumState) -> Result<()> {
        let n = self.n();
        if state.n() != n {
            return Err(Error::param("oracle input has the wrong qubit count"));
        }
        let mut joint = QuantumState::basis(1, 1)?.tensor(state)?;
        self.apply_controlled(&mut joint, 0, 1..n + 1)?;
        *state = joint.drop_leading_qubits(1, 1)?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct VerifyResult {
    pub accepted: bool,
    pub post_state: QuantumState,
    pub ancilla_outcome: u8,
}

/// Runs the verification circuit once. Accepts with probability
/// `|⟨ψ|coin⟩|²`; on acceptance the register is `ψ` up to a global phase.
pub fn verify<R: Rng + ?Sized>(
    oracle: &VerificationOracle<'_>,
    coin_state: &QuantumState,
    rng: &mut R,
) -> Result<VerifyResult> {
    let n = oracle.n();
    if coin_state.n() != n {
        return Err(Error::param(format!(
            "coin has {} qubits, scheme expects {n}",
            coin_state.n()
        )));
    }
    let mut reg = QuantumState::zero(1)?.tensor(coin_state)?;
    reg.apply_hadamard(0)?;
    oracle.apply_controlled(&mut reg, 0, 1..n + 1)?;
    reg.apply_hadamard(0)?;
    let outcome = reg.measure_qubit(0, rng)?;
    let post_state = reg.drop_leading_qubits(1, outcome as usize)?;
    Ok(VerifyResult { accepted: outcome == 1, post_state, ancilla_outcome: outcome })
}

/// Projector view of verification, used to cross-check the circuit.
#[derive(Clone, Debug)]
pub struct AnalyticVerification {
    pub accept_probability: f64,
    pub accept_state: Option<QuantumState>,
    pub reject_state: Option<QuantumState>,
}

const BRANCH_FLOOR: f64 = 1e-20;

pub fn verify_analytic(scheme: &CoinScheme, state: &QuantumState) -> Result<AnalyticVerification> {
    let psi = &scheme.psi;
    let c = psi.inner(state)?;
    let accept_probability = c.norm_sqr().clamp(0.0, 1.0);
    let accept_state = (accept_probability > BRANCH_FLOOR)
        .then(|| {
            let amps = psi.amplitudes().iter().map(|p| p * c).collect();
            QuantumState::normalized(amps)
        })
        .transpose()?;
    let residual: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(s, p)| s - p * c)
        .collect();
    let residual_weight: f64 = residual.iter().map(|a| a.norm_sqr()).sum();
    let reject_state = (residual_weight > BRANCH_FLOOR)
        .then(|| QuantumState::normalized(residual))
        .transpose()?;
    Ok(AnalyticVerification { accept_probability, accept_state, reject_state })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub rounds: usize,
    pub accepts: usize,
    pub outcomes: Vec<bool>,
    pub first_accept: Option<usize>,
    pub final_fidelity: f64,
}

/// Verifies the same coin `rounds` times, handing each post-state to the
/// next verifier.
pub fn transfer_chain(scheme: &CoinScheme, coin: Coin, rounds: usize, seed: Seed) -> Result<ChainReport> {
    if rounds == 0 {
        return Err(Error::param("a transfer chain needs at least one round"));
    }
    let oracle = scheme.oracle();
    let mut rng = seed.rng(Stream::Measurement);
    let mut state = coin.state;
    let mut outcomes = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let result = verify(&oracle, &state, &mut rng)?;
        outcomes.push(result.accepted);
        state = result.post_state;
    }
    Ok(ChainReport {
        rounds,
        accepts: outcomes.iter().filter(|a| **a).count(),
        first_accept: outcomes.iter().position(|a| *a),
        outcomes,
        final_fidelity: scheme.psi.fidelity(&state)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RobustnessReport {
    pub epsilon: f64,
    pub trials: usize,
    pub passes: usize,
    pub pass_rate: f64,
    /// `None` when no trial passed.
    pub mean_post_fidelity_given_pass: Option<f64>,
    pub min_post_fidelity_given_pass: Option<f64>,
}

/// Each trial perturbs a fresh copy of `ψ` by `epsilon` and verifies it once.
///
/// Fresh copies come straight from the bank's reference state and do not
/// count against the issuance cap.
pub fn robustness_experiment(
    scheme: &CoinScheme,
    epsilon: f64,
    trials: usize,
    seed: Seed,
) -> Result<RobustnessReport> {
    if trials == 0 {
        return Err(Error::param("robustness experiment needs at least one trial"));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::param(format!("epsilon {epsilon} outside [0, 1]")));
    }
    let runs: Vec<Option<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let trial = seed.trial(i);
            let noisy = scheme.psi.perturb(epsilon, &mut trial.rng(Stream::Noise))?;
            let oracle = scheme.oracle();
            let result = verify(&oracle, &noisy, &mut trial.rng(Stream::Measurement))?;
            result
                .accepted
                .then(|| scheme.psi.fidelity(&result.post_state))
                .transpose()
        })
        .collect::<Result<_>>()?;
    let passed: Vec<f64> = runs.into_iter().flatten().collect();
    let passes = passed.len();
    Ok(RobustnessReport {
        epsilon,
        trials,
        passes,
        pass_rate: passes as f64 / trials as f64,
        mean_post_fidelity_given_pass: (passes > 0).then(|| passed.iter().sum::<f64>() / passes as f64),
        min_post_fidelity_given_pass: passed.iter().copied().reduce(f64::min),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AnonymityReport {
    pub honest: bool,
    pub n: usize,
    pub users: usize,
    pub trials: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Fraction of spent coins accepted by the merchant's verifier.
    pub spend_pass_rate: f64,
    pub strategy: &'static str,
}

pub const IDENTIFICATION_STRATEGY: &str = "projective measurement onto the distinct issued coin states; \
     users sharing the observed state are tied and the tie is broken uniformly";

/// Gram-Schmidt over Haar samples: `count` orthonormal `n`-qubit states.
fn orthonormal_marks<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Result<Vec<QuantumState>> {
    let mut marks: Vec<QuantumState> = Vec::with_capacity(count);
    while marks.len() < count {
        let candidate = QuantumState::haar_random(n, rng)?;
        let mut amps = candidate.amplitudes().to_vec();
        for m in &marks {
            let c = m.amplitudes().iter().zip(&amps).map(|(a, b)| a.conj() * b).sum::<Complex64>();
            for (x, y) in amps.iter_mut().zip(m.amplitudes()) {
                *x -= c * y;
            }
        }
        if amps.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-6 {
            marks.push(QuantumState::normalized(amps)?);
        }
    }
    Ok(marks)
}

/// Withdraw, spend and deposit, repeated `trials` times.
///
/// Each trial, every user withdraws one coin, a uniformly random user spends
/// it at a merchant, and the bank tries to name the spender from the
/// deposited coin. An honest bank issues `ψ` to everyone. A cheating bank
/// gives each user a distinct member of an orthonormal set and relaxes its
/// verifier to accept the whole marked subspace, so marked coins still pass.
pub fn anonymity_experiment(
    honest: bool,
    n: usize,
    users: usize,
    trials: usize,
    seed: Seed,
) -> Result<AnonymityReport> {
    if users < 2 {
        return Err(Error::param("anonymity experiment needs at least two users"));
    }
    if trials == 0 {
        return Err(Error::param("anonymity experiment needs at least one trial"));
    }
    if !honest && (n >= usize::BITS as usize || users > 1usize << n) {
        return Err(Error::param(format!(
            "cannot mark {users} users with orthogonal {n}-qubit states"
        )));
    }
    let scheme = CoinScheme::new(n, seed)?;
    // Distinct issued states, and which users received each one.
    let (issued, holders): (Vec<QuantumState>, Vec<Vec<usize>>) = if honest {
        (vec![scheme.psi.clone()], vec![(0..users).collect()])
    } else {
        let marks = orthonormal_marks(n, users, &mut seed.rng(Stream::Bank))?;
        (marks, (0..users).map(|u| vec![u]).collect())
    };
    let user_state = |u: usize| if honest { &issued[0] } else { &issued[u] };

    let outcomes: Vec<(bool, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.trial(i).rng(Stream::Trial);
            let spender = rng.random_range(0..users);
            let coin = user_state(spender).clone();

            // Merchant-side verification: the honest circuit, or the relaxed
            // projector onto the marked subspace.
            let passed = if honest {
                verify(&scheme.oracle(), &coin, &mut rng)?.accepted
            } else {
                let p: f64 = issued.iter().map(|m| m.fidelity(&coin).unwrap_or(0.0)).sum();
                rng.random::<f64>() < p
            };

            // Bank-side identification.
            let probs: Vec<f64> = issued.iter().map(|m| m.fidelity(&coin)).collect::<Result<_>>()?;
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut observed = None;
            for (j, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    observed = Some(j);
                    break;
                }
            }
            let guess = match observed {
                Some(j) => holders[j][rng.random_range(0..holders[j].len())],
                None => rng.random_range(0..users),
            };
            Ok((guess == spender, passed))
        })
        .collect::<Result<_>>()?;
    let correct = outcomes.iter().filter(|(c, _)| *c).count();
    let passed = outcomes.iter().filter(|(_, p)| *p).count();
    Ok(AnonymityReport {
        honest,
        n,
        users,
        trials,
        correct,
        accuracy: correct as f64 / trials as f64,
        spend_pass_rate: passed as f64 / trials as f64,
        strategy: IDENTIFICATION_STRATEGY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonal_to(psi: &QuantumState, seed: u64) -> QuantumState {
        QuantumState::haar_with_overlap(psi, 0.0, &mut Seed(seed).rng(Stream::Trial)).unwrap()
    }

    #[test]
    fn new_scheme_is_normalised_and_deterministic() {
        let s = CoinScheme::new(4, Seed(1)).unwrap();
        assert!((s.reveal_secret().norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(s.issued_count(), 0);
        assert_eq!(s.cap(), 64);
        let again = CoinScheme::new(4, Seed(1)).unwrap();
        assert_eq!(s.reveal_secret(), again.reveal_secret());
        assert!(CoinScheme::new(0, Seed(1)).is_err());
    }

    #[test]
    fn distinct_schemes_overlap_like_haar_pairs() {
        let n = 3;
        let pairs = 20_000u64;
        let mean = (0..pairs)
            .map(|i| {
                let a = CoinScheme::new(n, Seed(2 * i)).unwrap();
                let b = CoinScheme::new(n, Seed(2 * i + 1)).unwrap();
                a.reveal_secret().fidelity(b.reveal_secret()).unwrap()
            })
            .sum::<f64>()
            / pairs as f64;
        let d = 8.0;
        let sigma = ((1.0 / d) * (1.0 - 1.0 / d) / (d + 1.0) / pairs as f64).sqrt();
        assert!((mean - 1.0 / d).abs() < 3.0 * sigma, "mean={mean}");
    }

    #[test]
    fn mint_copies_and_cap() {
        let s = CoinScheme::new(2, Seed(3)).unwrap();
        let a = s.mint().unwrap();
        let b = s.mint().unwrap();
        assert!((a.state.fidelity(s.reveal_secret()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(a.state, b.state);
        assert_eq!(a.provenance(), &Provenance::Minted { serial: 0 });
        assert_eq!(b.provenance(), &Provenance::Minted { serial: 1 });
        for _ in 2..8 {
            s.mint().unwrap();
        }
        assert!(matches!(s.mint(), Err(Error::IssuanceCap { cap: 8 })));
        assert_eq!(s.issued_count(), 8);
    }

    #[test]
    fn verify_accepts_valid_coin_and_counts_one_query() {
        let s = CoinScheme::new(4, Seed(4)).unwrap();
        let coin = s.mint().unwrap();
        let oracle = s.oracle();
        for i in 0..50 {
            let r = verify(&oracle, &coin.state, &mut Seed(i).rng(Stream::Measurement)).unwrap();
            assert!(r.accepted);
            assert_eq!(r.ancilla_outcome, 1);
            assert!(r.post_state.fidelity(s.reveal_secret()).unwrap() > 1.0 - 1e-12);
        }
        assert_eq!(oracle.queries(), 50);
    }

    #[test]
    fn verify_rejects_orthogonal_state_unchanged() {
        let s = CoinScheme::new(3, Seed(5)).unwrap();
        let phi = orthogonal_to(s.reveal_secret(), 5);
        let oracle = s.oracle();
        for i in 0..50 {
            let r = verify(&oracle, &phi, &mut Seed(i).rng(Stream::Measurement)).unwrap();
            assert!(!r.accepted);
            assert!(r.post_state.fidelity(&phi).unwrap() > 1.0 - 1e-12);
        }
        assert!(verify(&oracle, &QuantumState::zero(2).unwrap(), &mut Seed(0).rng(Stream::Measurement)).is_err());
    }

    #[test]
    fn verify_haar_inputs_accept_at_inverse_dimension() {
        let s = CoinScheme::new(4, Seed(6)).unwrap();
        let oracle = s.oracle();
        let trials = 10_000u64;
        let accepts = (0..trials)
            .filter(|&i| {
                let mut rng = Seed(i).rng(Stream::Trial);
                let input = QuantumState::haar_random(4, &mut rng).unwrap();
                verify(&oracle, &input, &mut rng).unwrap().accepted
            })
            .count();
        let rate = accepts as f64 / trials as f64;
        let p = 1.0 / 16.0;
        assert!((rate - p).abs() < 3.0 * (p * (1.0 - p) / trials as f64).sqrt(), "rate={rate}");
    }

    #[test]
    fn analytic_branches() {
        let s = CoinScheme::new(3, Seed(7)).unwrap();
        let psi = s.reveal_secret().clone();
        let a = verify_analytic(&s, &psi).unwrap();
        assert!((a.accept_probability - 1.0).abs() < 1e-12);
        assert!(a.accept_state.unwrap().fidelity(&psi).unwrap() > 1.0 - 1e-12);
        assert!(a.reject_state.is_none());

        let phi = orthogonal_to(&psi, 7);
        let b = verify_analytic(&s, &phi).unwrap();
        assert!(b.accept_probability < 1e-24);
        assert!(b.accept_state.is_none());
        assert!(b.reject_state.unwrap().fidelity(&phi).unwrap() > 1.0 - 1e-12);

        let half = QuantumState::normalized(
            psi.amplitudes().iter().zip(phi.amplitudes()).map(|(p, q)| p + q).collect(),
        )
        .unwrap();
        let c = verify_analytic(&s, &half).unwrap();
        assert!((c.accept_probability - 0.5).abs() < 1e-12);
        assert!(c.accept_state.unwrap().fidelity(&psi).unwrap() > 1.0 - 1e-12);
        assert!(c.reject_state.unwrap().fidelity(&phi).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn transfer_chain_examples() {
        let s = CoinScheme::new(4, Seed(8)).unwrap();
        let coin = s.mint().unwrap();
        let report = transfer_chain(&s, coin, 1000, Seed(8)).unwrap();
        assert_eq!(report.accepts, 1000);
        assert!(report.final_fidelity > 1.0 - 1e-9);

        let phi = orthogonal_to(s.reveal_secret(), 8);
        let report = transfer_chain(&s, Coin::external(phi), 5, Seed(8)).unwrap();
        assert_eq!(report.accepts, 0);

        // After the first acceptance every later round accepts.
        for i in 0..40 {
            let noisy = s.reveal_secret().perturb(0.1, &mut Seed(i).rng(Stream::Noise)).unwrap();
            let report = transfer_chain(&s, Coin::external(noisy), 20, Seed(i)).unwrap();
            if let Some(first) = report.first_accept {
                assert!(report.outcomes[first..].iter().all(|a| *a));
            }
        }
        assert!(transfer_chain(&s, s.mint().unwrap(), 0, Seed(0)).is_err());
    }

    #[test]
    fn robustness_examples() {
        let s = CoinScheme::new(4, Seed(9)).unwrap();
        let clean = robustness_experiment(&s, 0.0, 200, Seed(9)).unwrap();
        assert_eq!(clean.pass_rate, 1.0);
        assert!((clean.mean_post_fidelity_given_pass.unwrap() - 1.0).abs() < 1e-12);

        let noisy = robustness_experiment(&s, 0.8, 500, Seed(9)).unwrap();
        assert!(noisy.pass_rate < 1.0);
        assert!(noisy.min_post_fidelity_given_pass.unwrap() > 1.0 - 1e-9);
        assert!(robustness_experiment(&s, 0.1, 0, Seed(9)).is_err());
    }

    #[test]
    fn anonymity_examples() {
        let honest = anonymity_experiment(true, 3, 4, 4000, Seed(10)).unwrap();
        let sigma = (0.25 * 0.75 / 4000.0f64).sqrt();
        assert!((honest.accuracy - 0.25).abs() < 3.0 * sigma);
        assert_eq!(honest.spend_pass_rate, 1.0);

        let cheating = anonymity_experiment(false, 3, 4, 500, Seed(10)).unwrap();
        assert_eq!(cheating.accuracy, 1.0);
        assert_eq!(cheating.spend_pass_rate, 1.0);

        let single = anonymity_experiment(true, 2, 2, 1, Seed(10)).unwrap();
        assert!(single.accuracy == 0.0 || single.accuracy == 1.0);

        assert!(anonymity_experiment(false, 2, 5, 10, Seed(1)).is_err());
        assert!(anonymity_experiment(true, 2, 1, 10, Seed(1)).is_err());
    }

    #[test]
    fn fixture_round_trip_keeps_secret_mark() {
        let s = CoinScheme::new(3, Seed(11)).unwrap().with_cap(5);
        let bytes = s.to_fixture_bytes();
        assert_eq!(&bytes[6..12], b"SECRET");
        let back = CoinScheme::from_fixture_bytes(&bytes).unwrap();
        assert_eq!(back.reveal_secret(), s.reveal_secret());
        assert_eq!(back.cap(), 5);
        let mut bad = bytes.clone();
        bad[6] = b'X';
        assert!(CoinScheme::from_fixture_bytes(&bad).is_err());
    }
}
