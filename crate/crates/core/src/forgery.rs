//! Adversaries against quantum coins and the query lower bound.
//!
//! Forgers only ever receive a [`VerificationOracle`] and, where relevant,
//! coins they legitimately hold. Scoring a forgery against `ψ` is done by
//! separate referee functions that take the [`CoinScheme`].

use std::ops::RangeInclusive;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coin::{verify, Coin, CoinScheme, Provenance, VerificationOracle};
use crate::qstate::{QuantumState, Seed, Stream};
use crate::{Error, Result};

/// Outcome of an adversary run, as scored by the referee.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForgerReport {
    pub n: usize,
    /// Coins the forger held going in.
    pub k: usize,
    pub target_p: f64,
    pub queries: u64,
    /// `⟨ψ|^{⊗k+1} ρ |ψ⟩^{⊗k+1}` for the registers the forger output.
    pub achieved_overlap: f64,
    pub trials: u64,
    pub succeeded: bool,
    pub seed: u64,
}

impl ForgerReport {
    pub const CSV_HEADER: [&'static str; 7] = ["n", "k", "p", "queries", "overlap", "succeeded", "seed"];

    pub fn csv_record(&self) -> [String; 7] {
        [
            self.n.to_string(),
            self.k.to_string(),
            self.target_p.to_string(),
            self.queries.to_string(),
            self.achieved_overlap.to_string(),
            self.succeeded.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// `∏ |⟨ψ|ρᵢ⟩|²` for a product of registers.
pub fn product_overlap(psi: &QuantumState, registers: &[QuantumState]) -> Result<f64> {
    registers.iter().try_fold(1.0, |acc, r| Ok(acc * psi.fidelity(r)?))
}

#[derive(Clone, Debug)]
pub struct RetryOutcome {
    pub state: Option<QuantumState>,
    pub tries: u64,
}

/// Samples Haar-random candidates and runs each through the verification
/// circuit until one passes. A passing candidate has been projected onto `ψ`.
pub fn retry_forger<R: Rng + ?Sized>(
    oracle: &VerificationOracle<'_>,
    max_tries: u64,
    rng: &mut R,
) -> Result<RetryOutcome> {
    if max_tries == 0 {
        return Err(Error::param("retry forger needs at least one try"));
    }
    for tries in 1..=max_tries {
        let candidate = QuantumState::haar_random(oracle.n(), rng)?;
        let result = verify(oracle, &candidate, rng)?;
        if result.accepted {
            return Ok(RetryOutcome { state: Some(result.post_state), tries });
        }
    }
    Ok(RetryOutcome { state: None, tries: max_tries })
}

/// Runs [`retry_forger`] against `scheme` and scores the result.
pub fn run_retry_forger(scheme: &CoinScheme, max_tries: u64, seed: Seed) -> Result<(ForgerReport, Option<Coin>)> {
    let oracle = scheme.oracle();
    let outcome = retry_forger(&oracle, max_tries, &mut seed.rng(Stream::Adversary))?;
    let achieved_overlap = match &outcome.state {
        Some(s) => scheme.reveal_secret().fidelity(s)?,
        None => 0.0,
    };
    let report = ForgerReport {
        n: scheme.n(),
        k: 0,
        target_p: 1.0,
        queries: oracle.queries(),
        achieved_overlap,
        trials: outcome.tries,
        succeeded: outcome.state.is_some(),
        seed: seed.0,
    };
    Ok((report, outcome.state.map(|s| Coin::new(s, Provenance::Forged))))
}

/// Independent retry runs; run `i` uses seed `seed ⊕ i`.
pub fn retry_forger_trials(scheme: &CoinScheme, runs: u64, max_tries: u64, seed: Seed) -> Result<Vec<ForgerReport>> {
    (0..runs)
        .into_par_iter()
        .map(|i| run_retry_forger(scheme, max_tries, seed.trial(i)).map(|(r, _)| r))
        .collect()
}

/// `θ = arcsin(2^{−n/2})`, the angle between the uniform start state and
/// the orthogonal complement of a typical target.
pub fn amplification_angle(n: usize) -> f64 {
    (2f64).powf(-(n as f64) / 2.0).asin()
}

/// Iterations `t = ⌈(arcsin(√p)/θ − 1)/2⌉`, clamped at zero. A `1e-9` slack
/// keeps exact solutions such as `n = 2, p = 1` from rounding up.
pub fn amplification_iterations(n: usize, target_p: f64) -> Result<u64> {
    if !(target_p > 0.0 && target_p <= 1.0) {
        return Err(Error::param(format!("target overlap {target_p} outside (0, 1]")));
    }
    let theta = amplification_angle(n);
    let x = (target_p.sqrt().asin() / theta - 1.0) / 2.0;
    Ok((x - 1e-9).ceil().max(0.0) as u64)
}

/// `sin²((2t+1)θ)`.
pub fn amplification_overlap(theta: f64, iterations: u64) -> f64 {
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

#[derive(Clone, Debug)]
pub struct GroverOutcome {
    pub state: QuantumState,
    pub iterations: u64,
    /// Closed-form overlap assuming the start state has overlap `2^{−n/2}`.
    pub predicted_overlap: f64,
}

/// Amplitude amplification from the uniform superposition: alternate the
/// oracle reflection with the reflection about the start state.
pub fn grover_forger(oracle: &VerificationOracle<'_>, target_p: f64) -> Result<GroverOutcome> {
    let n = oracle.n();
    let iterations = amplification_iterations(n, target_p)?;
    let start = QuantumState::uniform(n)?;
    let mut state = start.clone();
    for _ in 0..iterations {
        oracle.apply(&mut state)?;
        // 2|s⟩⟨s| − I
        state.reflect_about(&start)?;
        state.negate();
    }
    Ok(GroverOutcome {
        state,
        iterations,
        predicted_overlap: amplification_overlap(amplification_angle(n), iterations),
    })
}

/// Runs [`grover_forger`] against `scheme` and scores the result.
pub fn run_grover_forger(scheme: &CoinScheme, target_p: f64, seed: Seed) -> Result<(ForgerReport, GroverOutcome)> {
    let oracle = scheme.oracle();
    let outcome = grover_forger(&oracle, target_p)?;
    let achieved_overlap = scheme.reveal_secret().fidelity(&outcome.state)?;
    let report = ForgerReport {
        n: scheme.n(),
        k: 0,
        target_p,
        queries: oracle.queries(),
        achieved_overlap,
        trials: 1,
        succeeded: achieved_overlap >= target_p,
        seed: seed.0,
    };
    Ok((report, outcome))
}

/// The held-coin variant: the forger keeps its `k` coins untouched and adds
/// one amplified register. Scored by the `(k+1)`-register product overlap.
pub fn run_grover_forger_with_coins(
    scheme: &CoinScheme,
    coins: Vec<Coin>,
    target_p: f64,
    seed: Seed,
) -> Result<ForgerReport> {
    let oracle = scheme.oracle();
    let outcome = grover_forger(&oracle, target_p)?;
    let k = coins.len();
    let mut registers: Vec<QuantumState> = coins.into_iter().map(|c| c.state).collect();
    registers.push(outcome.state);
    let achieved_overlap = product_overlap(scheme.reveal_secret(), &registers)?;
    Ok(ForgerReport {
        n: scheme.n(),
        k,
        target_p,
        queries: oracle.queries(),
        achieved_overlap,
        trials: 1,
        succeeded: achieved_overlap >= target_p,
        seed: seed.0,
    })
}

/// Parameters of the query lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForgeBoundParams {
    pub n: usize,
    pub k: u64,
    pub p: f64,
}

impl ForgeBoundParams {
    pub fn new(n: usize, k: u64, p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::param(format!("p = {p} outside (0, 1]")));
        }
        if n == 0 {
            return Err(Error::param("n must be positive"));
        }
        Ok(ForgeBoundParams { n, k, p })
    }
}

/// Note attached to every bound table.
pub const BOUND_CONVENTION: &str = "asymptotic shape, constant unnormalized; \
     denominator k*max(1, log2 k); k = 0 uses the pure-search value sqrt(2^n p)";

/// `max(0, √(2ⁿp)/(k·max(1, log₂k)) − k)`, with `k = 0` giving the search
/// bound `√(2ⁿp)`. The hidden asymptotic constant is taken as one.
pub fn theoretical_bound(params: ForgeBoundParams) -> f64 {
    let search = ((params.n as f64).exp2() * params.p).sqrt();
    if params.k == 0 {
        return search;
    }
    let k = params.k as f64;
    let denom = k * k.log2().max(1.0);
    (search / denom - k).max(0.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub queries: u64,
    pub sqrt_dim: f64,
    pub ratio: f64,
    pub achieved_overlap: f64,
    pub predicted_overlap: f64,
    pub bound_k0: f64,
}

/// Amplitude-amplification forger for each `n`, with a fresh scheme per
/// `n` seeded by `seed ⊕ n`.
pub fn query_scaling_experiment(n_range: RangeInclusive<usize>, p: f64, seed: Seed) -> Result<Vec<ScalingRow>> {
    if n_range.is_empty() || *n_range.start() == 0 {
        return Err(Error::param("n range must be non-empty and start at 1 or more"));
    }
    n_range
        .map(|n| {
            let scheme = CoinScheme::new(n, seed.trial(n as u64))?;
            let (report, outcome) = run_grover_forger(&scheme, p, seed)?;
            let sqrt_dim = (n as f64).exp2().sqrt();
            Ok(ScalingRow {
                n,
                queries: report.queries,
                sqrt_dim,
                ratio: report.queries as f64 / sqrt_dim,
                achieved_overlap: report.achieved_overlap,
                predicted_overlap: outcome.predicted_overlap,
                bound_k0: theoretical_bound(ForgeBoundParams::new(n, 0, report.achieved_overlap.max(f64::MIN_POSITIVE))?),
            })
        })
        .collect()
}

// BB84-style coins --------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Basis {
    Computational,
    Hadamard,
}

/// A random bit string with a random basis per position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bb84CoinSpec {
    bits: Vec<bool>,
    bases: Vec<Basis>,
}

impl Bb84CoinSpec {
    pub fn new(bits: Vec<bool>, bases: Vec<Basis>) -> Result<Self> {
        if bits.len() != bases.len() || bits.is_empty() {
            return Err(Error::param("bits and bases must be non-empty and of equal length"));
        }
        Ok(Bb84CoinSpec { bits, bases })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let bits = (0..n).map(|_| rng.random()).collect();
        let bases = (0..n)
            .map(|_| if rng.random() { Basis::Hadamard } else { Basis::Computational })
            .collect();
        Self::new(bits, bases)
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    /// The coin as one single-qubit state per position.
    pub fn encode(&self) -> Bb84Coin {
        let qubits = self
            .bits
            .iter()
            .zip(&self.bases)
            .map(|(&bit, &basis)| {
                let mut q = QuantumState::basis(1, bit as usize).expect("one qubit");
                if basis == Basis::Hadamard {
                    q.apply_hadamard(0).expect("one qubit");
                }
                q
            })
            .collect();
        Bb84Coin { qubits }
    }

    /// The bank's per-qubit verifier: measure each position in its basis and
    /// accept iff every bit matches.
    pub fn verify<R: Rng + ?Sized>(&self, coin: &Bb84Coin, rng: &mut R) -> Result<bool> {
        if coin.qubits.len() != self.n() {
            return Err(Error::param("coin length does not match the spec"));
        }
        let mut ok = true;
        for ((q, &bit), &basis) in coin.qubits.iter().zip(&self.bits).zip(&self.bases) {
            ok &= measure_in(q, basis, rng)? == bit;
        }
        Ok(ok)
    }
}

/// Product-state coin.
#[derive(Clone, Debug)]
pub struct Bb84Coin {
    qubits: Vec<QuantumState>,
}

fn measure_in<R: Rng + ?Sized>(q: &QuantumState, basis: Basis, rng: &mut R) -> Result<bool> {
    let mut q = q.clone();
    if basis == Basis::Hadamard {
        q.apply_hadamard(0)?;
    }
    Ok(q.measure_qubit(0, rng)? == 1)
}

/// How the adversary spends its copies at each position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SplitStrategy {
    /// `⌈k/2⌉` copies in the computational basis, `⌊k/2⌋` in the Hadamard
    /// basis; the basis whose record is constant wins, ties break uniformly.
    Even,
    /// Computational-basis measurements on up to `k − 1` copies; the first
    /// disagreement proves the Hadamard basis and a remaining copy is read
    /// in it. Agreement throughout is read as the computational basis.
    Adaptive,
}

/// The adversary: infers bits and bases from `k` coins, with no access to
/// the spec itself.
pub fn infer_spec<R: Rng + ?Sized>(coins: &[Bb84Coin], strategy: SplitStrategy, rng: &mut R) -> Result<Bb84CoinSpec> {
    let k = coins.len();
    if k < 2 {
        return Err(Error::param("the attack needs at least two coins"));
    }
    let n = coins[0].qubits.len();
    if coins.iter().any(|c| c.qubits.len() != n) {
        return Err(Error::param("coins differ in length"));
    }
    let mut bits = Vec::with_capacity(n);
    let mut bases = Vec::with_capacity(n);
    for pos in 0..n {
        let (basis, bit) = match strategy {
            SplitStrategy::Even => {
                let z_count = k.div_ceil(2);
                let z: Vec<bool> = coins[..z_count]
                    .iter()
                    .map(|c| measure_in(&c.qubits[pos], Basis::Computational, rng))
                    .collect::<Result<_>>()?;
                let x: Vec<bool> = coins[z_count..]
                    .iter()
                    .map(|c| measure_in(&c.qubits[pos], Basis::Hadamard, rng))
                    .collect::<Result<_>>()?;
                let z_const = z.windows(2).all(|w| w[0] == w[1]);
                let x_const = x.windows(2).all(|w| w[0] == w[1]);
                let pick_z = match (z_const, x_const) {
                    (true, false) => true,
                    (false, true) => false,
                    _ => rng.random(),
                };
                if pick_z {
                    (Basis::Computational, z[0])
                } else {
                    (Basis::Hadamard, x[0])
                }
            }
            SplitStrategy::Adaptive => {
                let first = measure_in(&coins[0].qubits[pos], Basis::Computational, rng)?;
                let mut disagreement = false;
                for c in &coins[1..k - 1] {
                    if measure_in(&c.qubits[pos], Basis::Computational, rng)? != first {
                        disagreement = true;
                        break;
                    }
                }
                if disagreement {
                    (Basis::Hadamard, measure_in(&coins[k - 1].qubits[pos], Basis::Hadamard, rng)?)
                } else {
                    (Basis::Computational, first)
                }
            }
        };
        bits.push(bit);
        bases.push(basis);
    }
    Bb84CoinSpec::new(bits, bases)
}

#[derive(Clone, Debug, Serialize)]
pub struct Bb84AttackReport {
    pub recovered: Bb84CoinSpec,
    pub success: bool,
    /// Positions where the recovered basis or bit is wrong.
    pub wrong_positions: usize,
    pub forged: usize,
    pub forged_pass_rate: f64,
}

/// The attacker receives `copies` coins encoding `spec`, infers the spec,
/// forges `forged` fresh coins from the guess and submits them to the
/// honest verifier.
pub fn bb84_attack(
    spec: &Bb84CoinSpec,
    copies: usize,
    strategy: SplitStrategy,
    forged: usize,
    seed: Seed,
) -> Result<Bb84AttackReport> {
    if copies < 2 {
        return Err(Error::param("the attack needs at least two copies"));
    }
    if forged == 0 {
        return Err(Error::param("forge at least one coin"));
    }
    let coins = vec![spec.encode(); copies];
    let recovered = infer_spec(&coins, strategy, &mut seed.rng(Stream::Adversary))?;
    let wrong_positions = (0..spec.n())
        .filter(|&i| recovered.bits[i] != spec.bits[i] || recovered.bases[i] != spec.bases[i])
        .count();
    let forged_coin = recovered.encode();
    let mut rng = seed.rng(Stream::Measurement);
    let mut passes = 0;
    for _ in 0..forged {
        passes += spec.verify(&forged_coin, &mut rng)? as usize;
    }
    Ok(Bb84AttackReport {
        success: wrong_positions == 0,
        recovered,
        wrong_positions,
        forged,
        forged_pass_rate: passes as f64 / forged as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retry_forger_produces_valid_coin() {
        let s = CoinScheme::new(2, Seed(1)).unwrap();
        let (report, coin) = run_retry_forger(&s, 10_000, Seed(1)).unwrap();
        assert!(report.succeeded);
        assert_eq!(report.queries, report.trials);
        assert!((report.achieved_overlap - 1.0).abs() < 1e-9);
        let coin = coin.unwrap();
        assert_eq!(coin.provenance(), &Provenance::Forged);
        let oracle = s.oracle();
        for i in 0..20 {
            assert!(verify(&oracle, &coin.state, &mut Seed(i).rng(Stream::Measurement)).unwrap().accepted);
        }
    }

    #[test]
    fn retry_forger_exhaustion_and_mean() {
        let s = CoinScheme::new(8, Seed(2)).unwrap();
        let (report, coin) = run_retry_forger(&s, 1, Seed(2)).unwrap();
        assert!(coin.is_none() || report.succeeded);
        assert!(run_retry_forger(&s, 0, Seed(2)).is_err());

        // Geometric law with p = 1/2 at n = 1.
        let s = CoinScheme::new(1, Seed(3)).unwrap();
        let reports = retry_forger_trials(&s, 10_000, 1_000, Seed(3)).unwrap();
        let mean = reports.iter().map(|r| r.trials as f64).sum::<f64>() / reports.len() as f64;
        let sigma = (2.0f64 / 10_000.0).sqrt(); // var = (1-p)/p² = 2
        assert!((mean - 2.0).abs() < 3.0 * sigma, "mean={mean}");
    }

    #[test]
    fn grover_iteration_examples() {
        assert_eq!(amplification_iterations(4, 0.9).unwrap(), 2);
        // Frozen from the closed form sin²(5·arcsin(1/4)).
        assert!((amplification_overlap(amplification_angle(4), 2) - 0.908_447_265_625).abs() < 1e-12);
        // n = 2: θ = π/6, t = 1 lands exactly on π/2.
        assert_eq!(amplification_iterations(2, 1.0).unwrap(), 1);
        assert!((amplification_overlap(amplification_angle(2), 1) - 1.0).abs() < 1e-12);
        // n = 4, p = 1 is unreachable; t = 3 overshoots.
        let t = amplification_iterations(4, 1.0).unwrap();
        assert_eq!(t, 3);
        assert!(amplification_overlap(amplification_angle(4), t) < 1.0);
        assert!(amplification_iterations(4, 0.0).is_err());
        assert!(amplification_iterations(4, 1.5).is_err());
    }

    #[test]
    fn grover_simulation_matches_closed_form_with_actual_angle() {
        for n in 1..=8 {
            let s = CoinScheme::new(n, Seed(40 + n as u64)).unwrap();
            let (report, outcome) = run_grover_forger(&s, 0.9, Seed(0)).unwrap();
            let start = QuantumState::uniform(n).unwrap();
            let theta = s.reveal_secret().inner(&start).unwrap().norm().asin();
            let expected = amplification_overlap(theta, outcome.iterations);
            assert!((report.achieved_overlap - expected).abs() < 1e-9, "n={n}");
            assert_eq!(report.queries, outcome.iterations);
        }
    }

    #[test]
    fn held_coins_enter_product_overlap() {
        let s = CoinScheme::new(3, Seed(5)).unwrap();
        let coins = vec![s.mint().unwrap(), s.mint().unwrap()];
        let report = run_grover_forger_with_coins(&s, coins, 0.5, Seed(5)).unwrap();
        let (single, _) = run_grover_forger(&s, 0.5, Seed(5)).unwrap();
        assert_eq!(report.k, 2);
        assert!((report.achieved_overlap - single.achieved_overlap).abs() < 1e-12);
    }

    #[test]
    fn bound_examples() {
        let b = theoretical_bound(ForgeBoundParams::new(10, 2, 1.0).unwrap());
        assert!((b - 14.0).abs() < 1e-12);
        assert!((theoretical_bound(ForgeBoundParams::new(10, 0, 1.0).unwrap()) - 32.0).abs() < 1e-12);
        assert!((theoretical_bound(ForgeBoundParams::new(10, 1, 1.0).unwrap()) - 31.0).abs() < 1e-12);
        // 2³²/(1000·log₂1000) − 1000
        let big = theoretical_bound(ForgeBoundParams::new(64, 1000, 1.0).unwrap());
        assert!((big - 429_971.328_830_607).abs() < 1e-6, "{big}");
        assert_eq!(theoretical_bound(ForgeBoundParams::new(64, 1 << 20, 1e-6).unwrap()), 0.0);
        assert!(ForgeBoundParams::new(10, 2, 0.0).is_err());
        assert!(ForgeBoundParams::new(10, 2, 1.1).is_err());
    }

    #[test]
    fn scaling_rows() {
        let rows = query_scaling_experiment(1..=12, 0.5, Seed(1)).unwrap();
        assert_eq!(rows[0].n, 1);
        assert!(rows[0].ratio.is_finite());
        let t = |n: usize| rows[n - 1].queries as f64;
        for n in 6..=10 {
            let growth = t(n + 2) / t(n);
            assert!((growth - 2.0).abs() < 0.5, "n={n} growth={growth}");
        }
        assert!(query_scaling_experiment(0..=3, 0.5, Seed(1)).is_err());
    }

    /// Exhaustive single-position error probability: enumerate every
    /// measurement record for each of the four encoded states.
    fn enumerated_error(k: usize, strategy: SplitStrategy) -> f64 {
        let mut err = 0.0;
        for true_basis in [Basis::Computational, Basis::Hadamard] {
            for bit in [false, true] {
                let outcome_prob = |meas: Basis, o: bool| {
                    if meas == true_basis {
                        if o == bit { 1.0 } else { 0.0 }
                    } else {
                        0.5
                    }
                };
                match strategy {
                    SplitStrategy::Even => {
                        let a = k.div_ceil(2);
                        for rec in 0u32..(1 << k) {
                            let outs: Vec<bool> = (0..k).map(|i| rec >> i & 1 == 1).collect();
                            let pr: f64 = outs[..a].iter().map(|&o| outcome_prob(Basis::Computational, o)).product::<f64>()
                                * outs[a..].iter().map(|&o| outcome_prob(Basis::Hadamard, o)).product::<f64>();
                            if pr == 0.0 {
                                continue;
                            }
                            let zc = outs[..a].iter().all(|&o| o == outs[0]);
                            let xc = outs[a..].iter().all(|&o| o == outs[a]);
                            let guesses: Vec<(Basis, bool, f64)> = match (zc, xc) {
                                (true, false) => vec![(Basis::Computational, outs[0], 1.0)],
                                (false, true) => vec![(Basis::Hadamard, outs[a], 1.0)],
                                _ => vec![(Basis::Computational, outs[0], 0.5), (Basis::Hadamard, outs[a], 0.5)],
                            };
                            for (b, v, w) in guesses {
                                if (b, v) != (true_basis, bit) {
                                    err += 0.25 * pr * w;
                                }
                            }
                        }
                    }
                    SplitStrategy::Adaptive => {
                        for rec in 0u32..(1 << (k - 1)) {
                            let outs: Vec<bool> = (0..k - 1).map(|i| rec >> i & 1 == 1).collect();
                            let pr: f64 = outs.iter().map(|&o| outcome_prob(Basis::Computational, o)).product();
                            if pr == 0.0 {
                                continue;
                            }
                            // A disagreement only occurs in the Hadamard basis, where
                            // the final Hadamard-basis read is exact.
                            let guess = if outs.iter().all(|&o| o == outs[0]) {
                                (Basis::Computational, outs[0])
                            } else {
                                (Basis::Hadamard, bit)
                            };
                            if guess != (true_basis, bit) {
                                err += 0.25 * pr;
                            }
                        }
                    }
                }
            }
        }
        err
    }

    #[test]
    fn enumerated_errors_match_frozen_values() {
        // Frozen from an independent Python enumeration.
        let frozen = [
            (2, 0.5, 0.5),
            (3, 0.375, 0.25),
            (4, 0.25, 0.125),
            (5, 0.1875, 0.0625),
            (8, 0.0625, 0.0078125),
            (16, 0.00390625, 3.0517578125e-05),
        ];
        for (k, even, adaptive) in frozen {
            assert!((enumerated_error(k, SplitStrategy::Even) - even).abs() < 1e-12, "k={k}");
            assert!((enumerated_error(k, SplitStrategy::Adaptive) - adaptive).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn per_position_error_rate_matches_enumeration() {
        for strategy in [SplitStrategy::Even, SplitStrategy::Adaptive] {
            for k in [2usize, 3, 4] {
                let expected = enumerated_error(k, strategy);
                let trials = 400u64;
                let n = 10;
                let mut wrong = 0usize;
                for i in 0..trials {
                    let spec = Bb84CoinSpec::random(n, &mut Seed(i).rng(Stream::Key)).unwrap();
                    wrong += bb84_attack(&spec, k, strategy, 1, Seed(i)).unwrap().wrong_positions;
                }
                let total = (trials as usize * n) as f64;
                let rate = wrong as f64 / total;
                let sigma = (expected * (1.0 - expected) / total).sqrt();
                assert!((rate - expected).abs() < 3.0 * sigma, "{strategy:?} k={k} rate={rate}");
            }
        }
    }

    #[test]
    fn two_copies_one_per_basis_correct_record_is_constant() {
        let spec = Bb84CoinSpec::new(vec![true], vec![Basis::Computational]).unwrap();
        for i in 0..200 {
            let coins = vec![spec.encode(); 2];
            let mut rng = Seed(i).rng(Stream::Adversary);
            // Even split with k = 2 puts one copy in each basis; the
            // computational-basis record always reads the encoded bit.
            assert!(measure_in(&coins[0].qubits[0], Basis::Computational, &mut rng).unwrap());
            let guess = infer_spec(&coins, SplitStrategy::Even, &mut rng).unwrap();
            if guess.bases()[0] == Basis::Computational {
                assert!(guess.bits()[0]);
            }
        }
    }

    #[test]
    fn exact_guess_forges_passing_coins() {
        let spec = Bb84CoinSpec::random(8, &mut Seed(3).rng(Stream::Key)).unwrap();
        let forged = spec.encode();
        let mut rng = Seed(3).rng(Stream::Measurement);
        for _ in 0..100 {
            assert!(spec.verify(&forged, &mut rng).unwrap());
        }
        assert!(bb84_attack(&spec, 1, SplitStrategy::Adaptive, 1, Seed(0)).is_err());
    }
}
