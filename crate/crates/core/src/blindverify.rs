//! Bank/merchant verification protocols over an in-memory channel.
//!
//! Two flows are simulated:
//!
//! * **online**: the merchant ships the coin to the bank, the bank runs the
//!   full verification circuit and ships the result back;
//! * **blind**: a pad-based assisted verification. The merchant pads the
//!   coin under keys `P` only it knows, a delegated engine on the merchant
//!   side runs the verification conjugated by the pad and applies a bank
//!   output pad `Q` supplied in the classical instructions, and the bank's
//!   only quantum work is undoing `Q` with at most one X and one Z per coin
//!   qubit.
//!
//! This realizes the communication and workload contract of blind
//! verification (interleaved classical messages, a single quantum round
//! trip at the end, per-qubit Pauli corrections, output left with the
//! merchant). It is not a measurement-based blind computation, and it hides
//! the coin from the bank rather than the bank's circuit from the merchant.
//! Quantum messages move statevectors directly, standing in for
//! teleportation.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::coin::{verify, Coin, CoinScheme};
use crate::qstate::{DensityAccumulator, DensityMatrix, Pauli, QuantumState, Seed, Stream};
use crate::{Error, Result};

pub const TRANSCRIPT_MAGIC: &str = "# qcoin-transcript v1";
pub const MAX_BLINDNESS_QUBITS: usize = 3;

/// Per-qubit Pauli keys: the pad is `X^x Z^z` on each qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadKeys {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PadKeys {
    pub fn new(x: Vec<bool>, z: Vec<bool>) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::param("pad key halves differ in length"));
        }
        Ok(PadKeys { x, z })
    }

    pub fn zero(n: usize) -> Self {
        PadKeys { x: vec![false; n], z: vec![false; n] }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let x = (0..n).map(|_| rng.random()).collect();
        let z = (0..n).map(|_| rng.random()).collect();
        PadKeys { x, z }
    }

    /// Key number `index` of the `4^n` pads: bit `i` is `x_i`, bit `n + i`
    /// is `z_i`.
    pub fn from_index(n: usize, index: u64) -> Self {
        PadKeys {
            x: (0..n).map(|i| index >> i & 1 == 1).collect(),
            z: (0..n).map(|i| index >> (n + i) & 1 == 1).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_weight(&self) -> u64 {
        self.x.iter().filter(|b| **b).count() as u64
    }

    pub fn z_weight(&self) -> u64 {
        self.z.iter().filter(|b| **b).count() as u64
    }

    fn to_bytes(&self) -> Vec<u8> {
        self.x.iter().chain(&self.z).map(|b| *b as u8).collect()
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(2) || bytes.iter().any(|b| *b > 1) {
            return Err(Error::Format("malformed pad key bytes".into()));
        }
        let (x, z) = bytes.split_at(bytes.len() / 2);
        PadKeys::new(x.iter().map(|b| *b == 1).collect(), z.iter().map(|b| *b == 1).collect())
    }
}

fn check_keys(state: &QuantumState, keys: &PadKeys) -> Result<()> {
    if keys.n() != state.n() {
        return Err(Error::param(format!(
            "pad covers {} qubits, state has {}",
            keys.n(),
            state.n()
        )));
    }
    Ok(())
}

/// `X^{x_i} Z^{z_i}` on every qubit.
pub fn qotp_encrypt(state: &QuantumState, keys: &PadKeys) -> Result<QuantumState> {
    check_keys(state, keys)?;
    let mut out = state.clone();
    for q in 0..keys.n() {
        if keys.z[q] {
            out.apply_pauli(q, Pauli::Z)?;
        }
        if keys.x[q] {
            out.apply_pauli(q, Pauli::X)?;
        }
    }
    Ok(out)
}

pub fn qotp_decrypt(state: &QuantumState, keys: &PadKeys) -> Result<QuantumState> {
    check_keys(state, keys)?;
    let mut out = state.clone();
    for q in 0..keys.n() {
        if keys.x[q] {
            out.apply_pauli(q, Pauli::X)?;
        }
        if keys.z[q] {
            out.apply_pauli(q, Pauli::Z)?;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    BankToMerchant,
    MerchantToBank,
}

#[derive(Clone, Debug)]
pub enum Payload {
    Classical(Vec<u8>),
    Quantum(QuantumState),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Classical(_) => "classical",
            Payload::Quantum(_) => "quantum",
        }
    }

    /// First 8 bytes of SHA-256 over kind tag and contents, in hex.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        match self {
            Payload::Classical(b) => {
                h.update([0u8]);
                h.update(b);
            }
            Payload::Quantum(s) => {
                h.update([1u8]);
                h.update(s.to_bytes());
            }
        }
        h.finalize()[..8].iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Clone, Debug)]
pub struct Message {
    pub direction: Direction,
    pub step_label: String,
    pub payload: Payload,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCount {
    pub x: u64,
    pub z: u64,
    pub other: u64,
}

impl GateCount {
    pub fn total(&self) -> u64 {
        self.x + self.z + self.other
    }
}

/// Gates in one full verification circuit on `n` coin qubits: two
/// Hadamards on the ancilla plus a controlled reflection about an arbitrary
/// state, costed as a state-preparation circuit and its inverse
/// (`2·(2^{n+1} − 2)` uniformly controlled rotations) around one
/// multi-controlled phase. Total `4·2^n − 1`.
pub fn verification_circuit_gates(n: usize) -> u64 {
    4 * (1u64 << n) - 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Flow {
    Online,
    Blind,
}

impl Flow {
    pub fn name(self) -> &'static str {
        match self {
            Flow::Online => "online",
            Flow::Blind => "blind",
        }
    }
}

/// One message as delivered, with the bank's counters at delivery time.
#[derive(Clone, Debug)]
pub struct TranscriptEntry {
    pub message: Message,
    pub bank_gates: GateCount,
}

#[derive(Clone, Debug)]
pub struct Transcript {
    pub flow: Flow,
    pub n: usize,
    pub seed: Seed,
    /// Strips sender identity from recorded directions.
    pub anonymous_sender: bool,
    /// Extra `key=value` pairs echoed into the header.
    pub context: BTreeMap<String, String>,
    entries: Vec<TranscriptEntry>,
    bank_gates: GateCount,
    final_step: GateCount,
    delegated: GateCount,
}

impl Transcript {
    fn new(flow: Flow, n: usize, seed: Seed) -> Self {
        Transcript {
            flow,
            n,
            seed,
            anonymous_sender: false,
            context: BTreeMap::new(),
            entries: Vec::new(),
            bank_gates: GateCount::default(),
            final_step: GateCount::default(),
            delegated: GateCount::default(),
        }
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    /// Everything the bank applied.
    pub fn bank_gates(&self) -> GateCount {
        self.bank_gates
    }

    /// The bank's Pauli corrections in the closing step of the blind flow.
    pub fn final_step_gates(&self) -> GateCount {
        self.final_step
    }

    /// Gates run by the delegated engine on the merchant side.
    pub fn delegated_gates(&self) -> GateCount {
        self.delegated
    }

    pub fn quantum_messages(&self) -> usize {
        self.entries.iter().filter(|e| matches!(e.message.payload, Payload::Quantum(_))).count()
    }

    pub fn classical_messages(&self) -> usize {
        self.entries.len() - self.quantum_messages()
    }

    /// Payloads of every quantum message, keyed by step label.
    pub fn quantum_payloads(&self) -> Vec<(&str, &QuantumState)> {
        self.entries
            .iter()
            .filter_map(|e| match &e.message.payload {
                Payload::Quantum(s) => Some((e.message.step_label.as_str(), s)),
                Payload::Classical(_) => None,
            })
            .collect()
    }

    fn direction_label(&self, d: Direction) -> &'static str {
        match (d, self.anonymous_sender) {
            (Direction::BankToMerchant, _) => "bank->merchant",
            (Direction::MerchantToBank, false) => "merchant->bank",
            (Direction::MerchantToBank, true) => "anonymous->bank",
        }
    }

    /// Header line then one tab-separated record per message:
    /// step, direction, kind, digest, bank X, bank Z, bank other.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{TRANSCRIPT_MAGIC} flow={} n={} seed={} anonymous={}",
            self.flow.name(),
            self.n,
            self.seed.0,
            self.anonymous_sender
        );
        for (k, v) in &self.context {
            let _ = write!(out, " {k}={v}");
        }
        out.push('\n');
        for e in &self.entries {
            let g = e.bank_gates;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.message.step_label,
                self.direction_label(e.message.direction),
                e.message.payload.kind(),
                e.message.payload.digest(),
                g.x,
                g.z,
                g.other
            );
        }
        out
    }
}

/// Reads the `key=value` pairs of a transcript header.
pub fn parse_transcript_header(text: &str) -> Result<BTreeMap<String, String>> {
    let first = text.lines().next().unwrap_or_default();
    let rest = first
        .strip_prefix(TRANSCRIPT_MAGIC)
        .ok_or_else(|| Error::Format("missing transcript header".into()))?;
    rest.split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::Format(format!("bad header field {kv:?}")))
        })
        .collect()
}

/// Ordered, lossless in-memory channel. `fail_at` aborts the run when the
/// message with that index is sent.
#[derive(Debug, Default)]
pub struct Channel {
    queue: VecDeque<Message>,
    sent: usize,
    fail_at: Option<usize>,
}

impl Channel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn failing_at(index: usize) -> Self {
        Channel { fail_at: Some(index), ..Self::default() }
    }

    fn send(&mut self, message: Message) -> Result<()> {
        if self.fail_at == Some(self.sent) {
            return Err(Error::ProtocolAbort(message.step_label));
        }
        self.sent += 1;
        self.queue.push_back(message);
        Ok(())
    }

    fn deliver(&mut self, transcript: &mut Transcript, expect: &str) -> Result<Payload> {
        let message = self
            .queue
            .pop_front()
            .ok_or_else(|| Error::ProtocolAbort(format!("{expect} (channel empty)")))?;
        if message.step_label != expect {
            return Err(Error::ProtocolAbort(format!("{expect} (got {})", message.step_label)));
        }
        let payload = message.payload.clone();
        transcript.entries.push(TranscriptEntry { message, bank_gates: transcript.bank_gates });
        Ok(payload)
    }
}

fn post(channel: &mut Channel, t: &mut Transcript, direction: Direction, step: &str, payload: Payload) -> Result<Payload> {
    channel.send(Message { direction, step_label: step.to_string(), payload })?;
    channel.deliver(t, step)
}

fn expect_quantum(p: Payload) -> Result<QuantumState> {
    match p {
        Payload::Quantum(s) => Ok(s),
        Payload::Classical(_) => Err(Error::ProtocolAbort("expected a quantum payload".into())),
    }
}

fn expect_classical(p: Payload) -> Result<Vec<u8>> {
    match p {
        Payload::Classical(b) => Ok(b),
        Payload::Quantum(_) => Err(Error::ProtocolAbort("expected a classical payload".into())),
    }
}

/// The bank: the scheme plus its limit on closing-step corrections.
pub struct Bank<'a> {
    scheme: &'a CoinScheme,
    budget: (u64, u64),
}

impl<'a> Bank<'a> {
    pub fn new(scheme: &'a CoinScheme) -> Self {
        let n = scheme.n() as u64;
        Bank { scheme, budget: (n, n) }
    }

    /// Overrides the `(X, Z)` correction budget.
    pub fn with_budget(mut self, max_x: u64, max_z: u64) -> Self {
        self.budget = (max_x, max_z);
        self
    }
}

pub struct Merchant {
    pub coin: Coin,
}

#[derive(Clone, Debug)]
pub struct ProtocolOutcome {
    pub accepted: bool,
    pub post_coin: Coin,
    pub transcript: Transcript,
}

/// Key injection for the blind flow. Unset keys are drawn from the seed.
#[derive(Clone, Debug, Default)]
pub struct BlindOptions {
    pub merchant_pad: Option<PadKeys>,
    pub bank_pad: Option<PadKeys>,
    pub anonymous_sender: bool,
}

fn check_coin(bank: &Bank<'_>, merchant: &Merchant) -> Result<usize> {
    let n = bank.scheme.n();
    if merchant.coin.state.n() != n {
        return Err(Error::param(format!(
            "coin has {} qubits, bank scheme expects {n}",
            merchant.coin.state.n()
        )));
    }
    Ok(n)
}

/// Teleport-to-bank baseline: coin-transfer, bank verifies, coin-return,
/// verdict.
pub fn run_online_verification(
    bank: &Bank<'_>,
    merchant: Merchant,
    channel: &mut Channel,
    seed: Seed,
) -> Result<ProtocolOutcome> {
    let n = check_coin(bank, &merchant)?;
    let mut t = Transcript::new(Flow::Online, n, seed);
    let mut rng = seed.rng(Stream::Measurement);
    let provenance = merchant.coin.provenance().clone();

    let arrived = expect_quantum(post(
        channel,
        &mut t,
        Direction::MerchantToBank,
        "coin-transfer",
        Payload::Quantum(merchant.coin.state),
    )?)?;
    let result = verify(&bank.scheme.oracle(), &arrived, &mut rng)?;
    t.bank_gates.other += verification_circuit_gates(n);
    let returned = expect_quantum(post(
        channel,
        &mut t,
        Direction::BankToMerchant,
        "coin-return",
        Payload::Quantum(result.post_state),
    )?)?;
    let verdict = expect_classical(post(
        channel,
        &mut t,
        Direction::BankToMerchant,
        "verdict",
        Payload::Classical(vec![result.accepted as u8]),
    )?)?;
    Ok(ProtocolOutcome {
        accepted: verdict == [1],
        post_coin: Coin::new(returned, provenance),
        transcript: t,
    })
}

pub fn run_blind_verification(
    bank: &Bank<'_>,
    merchant: Merchant,
    channel: &mut Channel,
    seed: Seed,
) -> Result<ProtocolOutcome> {
    run_blind_verification_with(bank, merchant, channel, seed, &BlindOptions::default())
}

/// Pad-assisted flow: session-open, instructions, measurement-update,
/// output-return, output-delivery, verdict.
pub fn run_blind_verification_with(
    bank: &Bank<'_>,
    merchant: Merchant,
    channel: &mut Channel,
    seed: Seed,
    options: &BlindOptions,
) -> Result<ProtocolOutcome> {
    let n = check_coin(bank, &merchant)?;
    let mut t = Transcript::new(Flow::Blind, n, seed);
    t.anonymous_sender = options.anonymous_sender;
    let provenance = merchant.coin.provenance().clone();
    let merchant_pad = match &options.merchant_pad {
        Some(k) => k.clone(),
        None => PadKeys::random(n, &mut seed.rng(Stream::Pad)),
    };
    let bank_pad = match &options.bank_pad {
        Some(k) => k.clone(),
        None => PadKeys::random(n, &mut seed.rng(Stream::Bank)),
    };
    let padded_coin = qotp_encrypt(&merchant.coin.state, &merchant_pad)?;

    let mut open = (n as u32).to_le_bytes().to_vec();
    open.extend_from_slice(b"blind");
    post(channel, &mut t, Direction::MerchantToBank, "session-open", Payload::Classical(open))?;

    let instructions = expect_classical(post(
        channel,
        &mut t,
        Direction::BankToMerchant,
        "instructions",
        Payload::Classical(bank_pad.to_bytes()),
    )?)?;
    let output_pad = PadKeys::from_bytes(&instructions)?;

    // Delegated engine: verification conjugated by the merchant pad, i.e.
    // the reflection about Pψ on Pφ, then the bank's output pad.
    let padded_secret = qotp_encrypt(bank.scheme.reveal_secret(), &merchant_pad)?;
    let engine_scheme = CoinScheme::from_state(padded_secret);
    let mut rng = seed.rng(Stream::Measurement);
    let result = verify(&engine_scheme.oracle(), &padded_coin, &mut rng)?;
    let engine_out = qotp_encrypt(&result.post_state, &output_pad)?;
    t.delegated.other += verification_circuit_gates(n);
    t.delegated.x += output_pad.x_weight();
    t.delegated.z += output_pad.z_weight();

    let update = expect_classical(post(
        channel,
        &mut t,
        Direction::MerchantToBank,
        "measurement-update",
        Payload::Classical(vec![result.ancilla_outcome]),
    )?)?;
    let at_bank = expect_quantum(post(
        channel,
        &mut t,
        Direction::MerchantToBank,
        "output-return",
        Payload::Quantum(engine_out),
    )?)?;

    let (dx, dz) = (bank_pad.x_weight(), bank_pad.z_weight());
    if dx > bank.budget.0 || dz > bank.budget.1 {
        return Err(Error::BudgetViolation { x: dx, z: dz, max_x: bank.budget.0, max_z: bank.budget.1 });
    }
    let corrected = qotp_decrypt(&at_bank, &bank_pad)?;
    t.bank_gates.x += dx;
    t.bank_gates.z += dz;
    t.final_step.x += dx;
    t.final_step.z += dz;

    let delivered = expect_quantum(post(
        channel,
        &mut t,
        Direction::BankToMerchant,
        "output-delivery",
        Payload::Quantum(corrected),
    )?)?;
    let verdict = expect_classical(post(
        channel,
        &mut t,
        Direction::BankToMerchant,
        "verdict",
        Payload::Classical(update.clone()),
    )?)?;
    let state = qotp_decrypt(&delivered, &merchant_pad)?;
    Ok(ProtocolOutcome { accepted: verdict == [1], post_coin: Coin::new(state, provenance), transcript: t })
}

#[derive(Clone, Debug, Serialize)]
pub struct BlindnessEntry {
    pub run: usize,
    pub step_label: String,
    pub distance_a_from_mixed: f64,
    pub distance_b_from_mixed: f64,
    pub distance_between: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlindnessReport {
    pub n: usize,
    pub runs: usize,
    pub entries: Vec<BlindnessEntry>,
    pub max_distance_from_mixed: Option<f64>,
    pub max_distance_between: Option<f64>,
}

/// Exact average over all `4^n` merchant pads of each quantum payload of
/// the blind flow, for a valid coin of each scheme. The bank pad of run `r`
/// is drawn from `seed ⊕ r`.
fn averaged_views(scheme: &CoinScheme, seed: Seed) -> Result<BTreeMap<String, DensityMatrix>> {
    let n = scheme.n();
    let keys = 1u64 << (2 * n);
    let weight = 1.0 / keys as f64;
    let bank = Bank::new(scheme);
    let mut acc: BTreeMap<String, DensityAccumulator> = BTreeMap::new();
    for index in 0..keys {
        let options = BlindOptions { merchant_pad: Some(PadKeys::from_index(n, index)), ..Default::default() };
        let merchant = Merchant { coin: Coin::external(scheme.reveal_secret().clone()) };
        let outcome = run_blind_verification_with(&bank, merchant, &mut Channel::new(), seed, &options)?;
        for (label, state) in outcome.transcript.quantum_payloads() {
            if !acc.contains_key(label) {
                acc.insert(label.to_string(), DensityAccumulator::new(n)?);
            }
            acc.get_mut(label).expect("inserted above").add(weight, state)?;
        }
    }
    Ok(acc.into_iter().map(|(k, v)| (k, v.finish())).collect())
}

/// Compares what a party without the merchant pad sees under two schemes.
pub fn blindness_check(scheme_a: &CoinScheme, scheme_b: &CoinScheme, runs: usize, seed: Seed) -> Result<BlindnessReport> {
    let n = scheme_a.n();
    if scheme_b.n() != n {
        return Err(Error::param("schemes differ in qubit count"));
    }
    if n > MAX_BLINDNESS_QUBITS {
        return Err(Error::param(format!("exact key averaging supports n ≤ {MAX_BLINDNESS_QUBITS}")));
    }
    let mixed = DensityMatrix::maximally_mixed(n)?;
    let mut entries = Vec::new();
    for run in 0..runs {
        let run_seed = seed.trial(run as u64);
        let view_a = averaged_views(scheme_a, run_seed)?;
        let view_b = averaged_views(scheme_b, run_seed)?;
        for (label, rho_a) in &view_a {
            let rho_b = view_b
                .get(label)
                .ok_or_else(|| Error::ProtocolAbort(format!("{label} missing for second scheme")))?;
            entries.push(BlindnessEntry {
                run,
                step_label: label.clone(),
                distance_a_from_mixed: rho_a.trace_distance(&mixed)?,
                distance_b_from_mixed: rho_b.trace_distance(&mixed)?,
                distance_between: rho_a.trace_distance(rho_b)?,
            });
        }
    }
    let fold = |f: fn(&BlindnessEntry) -> f64| entries.iter().map(f).reduce(f64::max);
    Ok(BlindnessReport {
        n,
        runs,
        max_distance_from_mixed: fold(|e| e.distance_a_from_mixed.max(e.distance_b_from_mixed)),
        max_distance_between: fold(|e| e.distance_between),
        entries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WorkloadRow {
    pub flow: &'static str,
    pub n: usize,
    pub bank_x: u64,
    pub bank_z: u64,
    pub bank_other: u64,
    pub bank_total: u64,
    pub final_step_x: u64,
    pub final_step_z: u64,
    pub delegated_total: u64,
    pub quantum_messages: usize,
    pub classical_messages: usize,
}

pub const WORKLOAD_HEADER: [&str; 11] = [
    "flow",
    "n",
    "bank_x",
    "bank_z",
    "bank_other",
    "bank_total",
    "final_step_x",
    "final_step_z",
    "delegated_total",
    "quantum_messages",
    "classical_messages",
];

impl WorkloadRow {
    fn from_transcript(t: &Transcript) -> Self {
        let bank = t.bank_gates();
        // Online, everything the bank does happens in its one step.
        let last = match t.flow {
            Flow::Online => bank,
            Flow::Blind => t.final_step_gates(),
        };
        WorkloadRow {
            flow: t.flow.name(),
            n: t.n,
            bank_x: bank.x,
            bank_z: bank.z,
            bank_other: bank.other,
            bank_total: bank.total(),
            final_step_x: last.x,
            final_step_z: last.z,
            delegated_total: t.delegated_gates().total(),
            quantum_messages: t.quantum_messages(),
            classical_messages: t.classical_messages(),
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.flow.to_string(),
            self.n.to_string(),
            self.bank_x.to_string(),
            self.bank_z.to_string(),
            self.bank_other.to_string(),
            self.bank_total.to_string(),
            self.final_step_x.to_string(),
            self.final_step_z.to_string(),
            self.delegated_total.to_string(),
            self.quantum_messages.to_string(),
            self.classical_messages.to_string(),
        ]
    }
}

pub fn compare_bank_workload(online: &Transcript, blind: &Transcript) -> Result<Vec<WorkloadRow>> {
    if online.flow != Flow::Online || blind.flow != Flow::Blind {
        return Err(Error::param("expected one online and one blind transcript"));
    }
    if online.n != blind.n || online.seed != blind.seed {
        return Err(Error::param("workload comparison needs matched n and seed"));
    }
    Ok(vec![WorkloadRow::from_transcript(online), WorkloadRow::from_transcript(blind)])
}
