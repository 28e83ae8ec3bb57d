//! Quantum bills from a cyclic group shift.
//!
//! The group is `Z_{m'}` written additively with `m' = 2m`, the generator
//! `a = 2` has order `m`, and `b` is a secret base element. A keyed random
//! injection `r` maps group elements to `w`-qubit labels. The bank
//! publishes the shift `|y⟩|r(g)⟩ → |y⟩|r(g + y·a)⟩`, whose eigenstates are
//!
//! ```text
//! |ψ_k⟩ = (1/√m) Σ_x e^{−2πikx/m} |r(b + x·a)⟩,   eigenvalue e^{2πik/m}
//! ```
//!
//! Minting runs phase estimation from `|r(b)⟩` and keeps the collapsed
//! label register together with the measured `k`. Verification re-runs the
//! estimation and checks `k` against the published list.
//!
//! The key behind `r` is simply withheld from forger code paths; nothing
//! here makes `r` cryptographically hiding.

use std::collections::BTreeSet;
use std::ops::Range;
use std::sync::Mutex;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::qstate::{QuantumState, Seed, Stream};
use crate::{Error, Result};

const COFACTOR: u64 = 2;
const LABEL_SLACK: usize = 2;
const ORBIT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EstimationMode {
    /// Requires `m | 2^t`; estimation of an eigenstate is deterministic.
    Exact,
    /// Any `m`; accepts a readout within `1/2^{t+1}` of `k/m`.
    Windowed,
}

/// Append-only set of published eigenvalue parameters.
#[derive(Debug, Default)]
pub struct ValidList(Mutex<BTreeSet<u64>>);

impl ValidList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&self, k: u64) {
        self.0.lock().expect("valid list lock").insert(k);
    }

    pub fn contains(&self, k: u64) -> bool {
        self.0.lock().expect("valid list lock").contains(&k)
    }

    pub fn snapshot(&self) -> Vec<u64> {
        self.0.lock().expect("valid list lock").iter().copied().collect()
    }

    /// One integer per line, ascending.
    pub fn to_text(&self) -> String {
        self.snapshot().iter().map(|k| format!("{k}\n")).collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let list = ValidList::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let k = line
                .parse()
                .map_err(|_| Error::Format(format!("not an integer in valid list: {line:?}")))?;
            list.insert(k);
        }
        Ok(list)
    }
}

impl Clone for ValidList {
    fn clone(&self) -> Self {
        ValidList(Mutex::new(self.snapshot().into_iter().collect()))
    }
}

/// Keyed injection from group elements to labels.
#[derive(Clone, Debug)]
struct Labeling {
    forward: Vec<u64>,
    /// Position along the orbit `b + x·a` for every label, if on it.
    orbit_index: Vec<Option<u64>>,
}

#[derive(Debug)]
pub struct BillScheme {
    m: u64,
    modulus: u64,
    gen_a: u64,
    base_b: u64,
    label_width: usize,
    precision: usize,
    mode: EstimationMode,
    labeling: Labeling,
    valid: ValidList,
}

impl Clone for BillScheme {
    fn clone(&self) -> Self {
        BillScheme {
            labeling: self.labeling.clone(),
            valid: self.valid.clone(),
            ..*self
        }
    }
}

#[derive(Clone, Debug)]
pub struct Bill {
    pub k: u64,
    pub state: QuantumState,
}

impl Bill {
    /// `k` as u64 LE followed by the state layout.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.k.to_le_bytes().to_vec();
        out.extend(self.state.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Bill> {
        if bytes.len() < 8 {
            return Err(Error::Format("bill fixture too short".into()));
        }
        let k = u64::from_le_bytes(bytes[..8].try_into().unwrap());
        Ok(Bill { k, state: QuantumState::from_bytes(&bytes[8..])? })
    }
}

impl BillScheme {
    /// Exact-mode scheme; `m` must divide `2^t`.
    pub fn new(m: u64, t: usize, seed: Seed) -> Result<Self> {
        Self::with_mode(m, t, EstimationMode::Exact, seed)
    }

    pub fn with_mode(m: u64, t: usize, mode: EstimationMode, seed: Seed) -> Result<Self> {
        if m < 2 {
            return Err(Error::param("group order m must be at least 2"));
        }
        if t == 0 || t > 12 {
            return Err(Error::param(format!("precision t = {t} outside 1..=12")));
        }
        let big_t = 1u64 << t;
        if mode == EstimationMode::Exact && !big_t.is_multiple_of(m) {
            return Err(Error::param(format!("exact mode needs m | 2^t, got m = {m}, t = {t}")));
        }
        let modulus = m * COFACTOR;
        let label_width = (64 - (modulus - 1).leading_zeros()) as usize + LABEL_SLACK;
        if t + label_width > crate::qstate::MAX_QUBITS {
            return Err(Error::param("bill register exceeds the simulator cap"));
        }
        let mut rng = seed.rng(Stream::Key);
        let mut perm: Vec<u64> = (0..1u64 << label_width).collect();
        perm.shuffle(&mut rng);
        let forward: Vec<u64> = perm[..modulus as usize].to_vec();
        let base_b = rng.random_range(0..modulus);
        let gen_a = COFACTOR;
        let mut orbit_index = vec![None; 1 << label_width];
        for x in 0..m {
            let g = (base_b + x * gen_a) % modulus;
            orbit_index[forward[g as usize] as usize] = Some(x);
        }
        Ok(BillScheme {
            m,
            modulus,
            gen_a,
            base_b,
            label_width,
            precision: t,
            mode,
            labeling: Labeling { forward, orbit_index },
            valid: ValidList::new(),
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn label_width(&self) -> usize {
        self.label_width
    }

    pub fn mode(&self) -> EstimationMode {
        self.mode
    }

    pub fn valid_list(&self) -> &ValidList {
        &self.valid
    }

    /// Replaces the published list.
    pub fn with_valid_list(mut self, list: ValidList) -> Self {
        self.valid = list;
        self
    }

    fn label_of(&self, g: u64) -> usize {
        self.labeling.forward[(g % self.modulus) as usize] as usize
    }

    fn orbit_label(&self, x: u64) -> usize {
        self.label_of(self.base_b + (x % self.m) * self.gen_a)
    }

    /// `|r(b)⟩`.
    pub fn base_state(&self) -> QuantumState {
        QuantumState::basis(self.label_width, self.orbit_label(0)).expect("label width within cap")
    }

    /// The analytic eigenstate `|ψ_k⟩`. Needs the labeling key.
    pub fn eigenstate(&self, k: u64) -> Result<QuantumState> {
        if k >= self.m {
            return Err(Error::param(format!("k = {k} outside [0, {})", self.m)));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.label_width];
        let scale = 1.0 / (self.m as f64).sqrt();
        for x in 0..self.m {
            let angle = -std::f64::consts::TAU * ((k * x) % self.m) as f64 / self.m as f64;
            amps[self.orbit_label(x)] = Complex64::from_polar(scale, angle);
        }
        QuantumState::from_amplitudes(amps)
    }

    /// Probability mass of `state` on orbit labels.
    pub fn orbit_weight(&self, label_state: &QuantumState) -> Result<f64> {
        self.check_label_register(label_state)?;
        Ok(label_state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(l, _)| self.labeling.orbit_index[*l].is_some())
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn check_label_register(&self, s: &QuantumState) -> Result<()> {
        if s.n() != self.label_width {
            return Err(Error::param(format!(
                "label register has {} qubits, scheme uses {}",
                s.n(),
                self.label_width
            )));
        }
        Ok(())
    }

    /// `|y⟩|r(g)⟩ → |y⟩|r(g + y·a)⟩` on a joint register: `y` on the leading
    /// `y_qubits`, the label on the remaining `w` qubits. Every supported
    /// label must lie on the orbit of `b`.
    pub fn group_shift(&self, state: &mut QuantumState, y_qubits: usize) -> Result<()> {
        let w = self.label_width;
        if state.n() != y_qubits + w || y_qubits == 0 {
            return Err(Error::param("joint register does not match y width plus label width"));
        }
        let amps = state.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        let label_mask = (1usize << w) - 1;
        for (i, a) in amps.iter().enumerate() {
            if a.norm_sqr() <= ORBIT_TOLERANCE * ORBIT_TOLERANCE {
                continue;
            }
            let y = (i >> w) as u64;
            let label = i & label_mask;
            let x = self.labeling.orbit_index[label].ok_or(Error::UndefinedLabel(label as u64))?;
            let target = self.orbit_label(x + y);
            out[(i & !label_mask) | target] += a;
        }
        *state = QuantumState::from_amplitudes(out)?;
        Ok(())
    }

    /// `U^y` on a bare label register.
    pub fn shift_labels(&self, label_state: &QuantumState, y: u64) -> Result<QuantumState> {
        self.check_label_register(label_state)?;
        let width = (64 - y.leading_zeros() as usize).max(1);
        let mut joint = QuantumState::basis(width, y as usize)?.tensor(label_state)?;
        self.group_shift(&mut joint, width)?;
        joint.drop_leading_qubits(width, y as usize)
    }

    /// Whether readout `j` of the `t`-qubit register confirms parameter `k`:
    /// `|j/2^t − k/m|` (on the circle) at most `1/2^{t+1}`.
    pub fn readout_matches(&self, j: u64, k: u64) -> bool {
        let big_t = 1u128 << self.precision;
        let m = self.m as u128;
        let period = m * big_t;
        let diff = ((j as u128 * m) + period - (k as u128 % m) * big_t) % period;
        let dist = diff.min(period - diff);
        2 * dist <= m
    }

    /// Nearest parameter to readout `j`.
    pub fn readout_to_k(&self, j: u64) -> u64 {
        let big_t = 1u64 << self.precision;
        ((j * self.m * 2 + big_t) / (2 * big_t)) % self.m
    }

    /// Phase estimation on a label register supported on the orbit. Returns
    /// the readout and the collapsed label register.
    fn estimate<R: Rng + ?Sized>(&self, label_state: &QuantumState, rng: &mut R) -> Result<(u64, QuantumState)> {
        let t = self.precision;
        let mut joint = QuantumState::uniform(t)?.tensor(label_state)?;
        self.group_shift(&mut joint, t)?;
        inverse_fourier(&mut joint, 0..t)?;
        let j = joint.measure_register(0..t, rng)?;
        Ok((j, joint.drop_leading_qubits(t, j as usize)?))
    }
}

/// Inverse DFT on the contiguous leading register `range`, applied to every
/// column of the trailing qubits: `|y⟩ → 2^{−t/2} Σ_j e^{−2πijy/2^t} |j⟩`.
fn inverse_fourier(state: &mut QuantumState, range: Range<usize>) -> Result<()> {
    if range.start != 0 || range.end >= state.n() {
        return Err(Error::param("inverse Fourier transform expects a leading register"));
    }
    let t = range.len();
    let big_t = 1usize << t;
    let rest = 1usize << (state.n() - t);
    let amps = state.amplitudes();
    let twiddle: Vec<Complex64> = (0..big_t)
        .map(|e| Complex64::from_polar(1.0 / (big_t as f64).sqrt(), -std::f64::consts::TAU * e as f64 / big_t as f64))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for col in 0..rest {
        for j in 0..big_t {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..big_t {
                acc += twiddle[(j * y) % big_t] * amps[y * rest + col];
            }
            out[j * rest + col] = acc;
        }
    }
    *state = QuantumState::from_amplitudes(out)?;
    Ok(())
}

/// Phase estimation from `|r(b)⟩`; the readout fixes `k` and the label
/// register collapses onto `|ψ_k⟩`. `k` is published.
pub fn mint_bill<R: Rng + ?Sized>(scheme: &BillScheme, rng: &mut R) -> Result<Bill> {
    let (j, state) = scheme.estimate(&scheme.base_state(), rng)?;
    let k = scheme.readout_to_k(j);
    scheme.valid.insert(k);
    Ok(Bill { k, state })
}

#[derive(Clone, Debug)]
pub struct BillVerdict {
    pub accepted: bool,
    pub post_bill: Bill,
    /// Readout of the precision register, when estimation ran.
    pub readout: Option<u64>,
}

/// Checks `k` against the published list, projects the label register onto
/// the orbit support (rejecting otherwise), then re-runs phase estimation.
pub fn verify_bill<R: Rng + ?Sized>(scheme: &BillScheme, bill: &Bill, rng: &mut R) -> Result<BillVerdict> {
    if bill.k >= scheme.m {
        return Err(Error::param(format!("bill parameter {} outside [0, {})", bill.k, scheme.m)));
    }
    scheme.check_label_register(&bill.state)?;
    if !scheme.valid.contains(bill.k) {
        return Ok(BillVerdict { accepted: false, post_bill: bill.clone(), readout: None });
    }
    let weight = scheme.orbit_weight(&bill.state)?;
    let on_orbit = rng.random::<f64>() < weight;
    let projected: Vec<Complex64> = bill
        .state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(l, a)| {
            if scheme.labeling.orbit_index[l].is_some() == on_orbit {
                *a
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let projected = QuantumState::normalized(projected)?;
    if !on_orbit {
        return Ok(BillVerdict { accepted: false, post_bill: Bill { k: bill.k, state: projected }, readout: None });
    }
    let (j, state) = scheme.estimate(&projected, rng)?;
    Ok(BillVerdict {
        accepted: scheme.readout_matches(j, bill.k),
        post_bill: Bill { k: bill.k, state },
        readout: Some(j),
    })
}

/// What a forger can see: the shift circuit through verification, the
/// published list and the register sizes. Not the labeling key.
pub struct BillVerifier<'a> {
    scheme: &'a BillScheme,
}

impl<'a> BillVerifier<'a> {
    pub fn new(scheme: &'a BillScheme) -> Self {
        BillVerifier { scheme }
    }

    pub fn label_width(&self) -> usize {
        self.scheme.label_width
    }

    pub fn m(&self) -> u64 {
        self.scheme.m
    }

    pub fn published(&self) -> Vec<u64> {
        self.scheme.valid.snapshot()
    }

    pub fn verify<R: Rng + ?Sized>(&self, bill: &Bill, rng: &mut R) -> Result<BillVerdict> {
        verify_bill(self.scheme, bill, rng)
    }
}

#[derive(Clone, Debug)]
pub enum Submission {
    /// A fresh Haar-random label state per trial.
    HaarRandom,
    Fixed(QuantumState),
}

#[derive(Clone, Debug, Serialize)]
pub struct ForgeBillReport {
    pub claimed_k: u64,
    pub trials: usize,
    pub passes: usize,
    pub pass_rate: f64,
}

/// Submits `trials` candidate bills claiming `claimed_k` and reports how
/// many the verifier accepts.
pub fn forge_bill_attempt(
    verifier: &BillVerifier<'_>,
    claimed_k: u64,
    submission: &Submission,
    trials: usize,
    seed: Seed,
) -> Result<ForgeBillReport> {
    if trials == 0 {
        return Err(Error::param("forge attempt needs at least one trial"));
    }
    let w = verifier.label_width();
    let passes = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.trial(i).rng(Stream::Adversary);
            let state = match submission {
                Submission::HaarRandom => QuantumState::haar_random(w, &mut rng)?,
                Submission::Fixed(s) => s.clone(),
            };
            let verdict = verifier.verify(&Bill { k: claimed_k, state }, &mut rng)?;
            Ok(verdict.accepted as usize)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(ForgeBillReport { claimed_k, trials, passes, pass_rate: passes as f64 / trials as f64 })
}
