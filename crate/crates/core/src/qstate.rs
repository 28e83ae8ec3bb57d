//! Dense statevector engine.
//!
//! Only the primitives the money schemes need are provided: Haar sampling,
//! Hadamard and Pauli gates, a controlled reflection about an arbitrary
//! state, projective measurement, fidelity, a parametric noise channel and
//! small density matrices for key-averaged views.
//!
//! Qubit 0 is the most significant bit of the amplitude index. For an
//! `n`-qubit state, qubit `q` maps to bit `n - 1 - q`, so `|1⟩ ⊗ |0⟩` is
//! amplitude index `2`.
//!
//! Renormalisation is never implicit: every gate is unitary and keeps the
//! norm, and only measurement and [`QuantumState::perturb`] rescale.

use std::io::{Read, Write};
use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Largest register the engine accepts. A 20-qubit state is 16 MiB.
pub const MAX_QUBITS: usize = 20;

/// Norm tolerance for accepting externally supplied amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-9;

const STATE_MAGIC: &[u8; 4] = b"QSTV";
const STATE_VERSION: u16 = 1;

/// Seed for every random choice in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

/// Independent random streams derived from one seed.
///
/// Each purpose draws from its own ChaCha stream so that, for example, the
/// scheme secret and the first trial never share random numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Scheme = 1,
    Trial = 2,
    Measurement = 3,
    Noise = 4,
    Pad = 5,
    Bank = 6,
    Adversary = 7,
    Key = 8,
}

impl Seed {
    pub fn rng(self, stream: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream as u64);
        rng
    }

    /// Per-trial seed, `seed ⊕ index`.
    pub fn trial(self, index: u64) -> Seed {
        Seed(self.0 ^ index)
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Z,
}

/// Normalised pure state of `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::param(format!(
            "qubit count {n} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl QuantumState {
    /// Builds a state from raw amplitudes; the length must be a power of two
    /// and the norm within [`NORM_TOLERANCE`] of one.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::param(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_qubits(n)?;
        let state = QuantumState { n, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::param(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Builds a state from unnormalised amplitudes, normalising them.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::param("cannot normalise a zero vector"));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Self::from_amplitudes(amps)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        if index >= 1 << n {
            return Err(Error::param(format!("basis index {index} out of range")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Uniform superposition `H^{⊗n}|0…0⟩`.
    pub fn uniform(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(QuantumState { n, amps: vec![a; dim] })
    }

    /// Haar-random state: i.i.d. standard complex Gaussian amplitudes,
    /// normalised.
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_qubits(n)?;
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        Self::normalized(amps)
    }

    /// Haar-random state whose overlap magnitude with `reference` is fixed:
    /// `|⟨reference|ψ⟩| = overlap`. The orthogonal part and the relative
    /// phase are Haar-distributed.
    pub fn haar_with_overlap<R: Rng + ?Sized>(
        reference: &QuantumState,
        overlap: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&overlap) {
            return Err(Error::param(format!("overlap {overlap} outside [0, 1]")));
        }
        let perp = loop {
            let mut chi = Self::haar_random(reference.n, rng)?;
            let c = reference.inner(&chi)?;
            for (a, r) in chi.amps.iter_mut().zip(&reference.amps) {
                *a -= c * r;
            }
            if chi.norm_sqr() > 1e-12 {
                chi.renormalize()?;
                break chi;
            }
        };
        let phase = Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
        let s = (1.0 - overlap * overlap).max(0.0).sqrt();
        let amps = reference
            .amps
            .iter()
            .zip(&perp.amps)
            .map(|(r, p)| phase * overlap * r + s * p)
            .collect();
        Self::normalized(amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Explicit renormalisation.
    pub fn renormalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::param("cannot renormalise a zero vector"));
        }
        for a in &mut self.amps {
            *a /= norm;
        }
        Ok(())
    }

    fn same_dim(&self, other: &QuantumState) -> Result<()> {
        if self.n != other.n {
            return Err(Error::param(format!(
                "dimension mismatch: {} vs {} qubits",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        self.same_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, clamped to `[0, 1]`.
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().clamp(0.0, 1.0))
    }

    /// `self ⊗ other`; `self` occupies the leading (most significant) qubits.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        check_qubits(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(QuantumState { n: self.n + other.n, amps })
    }

    fn check_qubit(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n {
            return Err(Error::param(format!(
                "qubit index {qubit} out of range for {} qubits",
                self.n
            )));
        }
        Ok(1usize << (self.n - 1 - qubit))
    }

    fn check_range(&self, range: &Range<usize>) -> Result<()> {
        if range.start >= range.end || range.end > self.n {
            return Err(Error::param(format!(
                "qubit range {range:?} invalid for {} qubits",
                self.n
            )));
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<()> {
        let bit = self.check_qubit(qubit)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a = self.amps[i];
                let b = self.amps[i | bit];
                self.amps[i] = (a + b) * s;
                self.amps[i | bit] = (a - b) * s;
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, qubit: usize, which: Pauli) -> Result<()> {
        let bit = self.check_qubit(qubit)?;
        match which {
            Pauli::X => {
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Pauli::Z => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
        }
        Ok(())
    }

    /// Global phase `-1`.
    pub fn negate(&mut self) {
        for a in &mut self.amps {
            *a = -*a;
        }
    }

    /// Applies `I − 2|psi⟩⟨psi|` to the whole register.
    pub fn reflect_about(&mut self, psi: &QuantumState) -> Result<()> {
        let c = psi.inner(self)? * 2.0;
        for (a, p) in self.amps.iter_mut().zip(&psi.amps) {
            *a -= c * p;
        }
        Ok(())
    }

    /// Applies `|0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ (I − 2|psi⟩⟨psi|)` with the
    /// reflection acting on the contiguous qubit range `target`.
    ///
    /// Works as a rank-one update on each control-on block; the
    /// `2^(n+1)`-dimensional operator is never formed.
    pub fn apply_controlled_reflection(
        &mut self,
        control: usize,
        target: Range<usize>,
        psi: &QuantumState,
    ) -> Result<()> {
        let cbit = self.check_qubit(control)?;
        self.check_range(&target)?;
        if target.contains(&control) {
            return Err(Error::param(format!(
                "control qubit {control} overlaps target range {target:?}"
            )));
        }
        let width = target.len();
        if psi.n != width {
            return Err(Error::param(format!(
                "reflection state has {} qubits but target range has {width}",
                psi.n
            )));
        }
        let shift = self.n - target.end;
        let tmask = ((1usize << width) - 1) << shift;
        for base in 0..self.amps.len() {
            if base & tmask != 0 || base & cbit == 0 {
                continue;
            }
            let mut overlap = Complex64::new(0.0, 0.0);
            for (j, p) in psi.amps.iter().enumerate() {
                overlap += p.conj() * self.amps[base | (j << shift)];
            }
            let c = overlap * 2.0;
            for (j, p) in psi.amps.iter().enumerate() {
                self.amps[base | (j << shift)] -= c * p;
            }
        }
        Ok(())
    }

    /// Probability that measuring `qubit` yields 1.
    pub fn probability_one(&self, qubit: usize) -> Result<f64> {
        let bit = self.check_qubit(qubit)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective computational-basis measurement of one qubit. The state
    /// collapses and is renormalised.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<u8> {
        let bit = self.check_qubit(qubit)?;
        let p1 = self.probability_one(qubit)?;
        let outcome = u8::from(rng.random::<f64>() < p1);
        let keep = if outcome == 1 { p1 } else { 1.0 - p1 };
        let scale = 1.0 / keep.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit != 0) as u8) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(outcome)
    }

    /// Measures a contiguous register and returns its value, with the first
    /// qubit of the range as the most significant bit.
    pub fn measure_register<R: Rng + ?Sized>(
        &mut self,
        range: Range<usize>,
        rng: &mut R,
    ) -> Result<u64> {
        self.check_range(&range)?;
        let shift = self.n - range.end;
        let mask = (1usize << range.len()) - 1;
        let mut probs = vec![0.0; 1 << range.len()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[(i >> shift) & mask] += a.norm_sqr();
        }
        let u = rng.random::<f64>() * probs.iter().sum::<f64>();
        let mut acc = 0.0;
        let mut value = probs.len() - 1;
        for (v, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc && *p > 0.0 {
                value = v;
                break;
            }
        }
        while probs[value] == 0.0 && value > 0 {
            value -= 1;
        }
        let scale = 1.0 / probs[value].sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i >> shift) & mask == value {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(value as u64)
    }

    /// Drops the leading `count` qubits, keeping the block where they hold
    /// `value`. The block is renormalised; it must carry weight.
    pub fn drop_leading_qubits(&self, count: usize, value: usize) -> Result<QuantumState> {
        if count == 0 || count >= self.n || value >= 1 << count {
            return Err(Error::param(format!(
                "cannot drop {count} leading qubits with value {value} from {} qubits",
                self.n
            )));
        }
        let rest = self.n - count;
        let block = 1usize << rest;
        let amps = self.amps[value * block..(value + 1) * block].to_vec();
        QuantumState::normalized(amps)
    }

    /// Additive Haar noise: `(ψ + ε·η)/‖ψ + ε·η‖` with `η` Haar-random.
    pub fn perturb<R: Rng + ?Sized>(&self, epsilon: f64, rng: &mut R) -> Result<QuantumState> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::param(format!("epsilon {epsilon} outside [0, 1]")));
        }
        if epsilon == 0.0 {
            return Ok(self.clone());
        }
        let eta = Self::haar_random(self.n, rng)?;
        let amps = self
            .amps
            .iter()
            .zip(&eta.amps)
            .map(|(a, e)| a + e * epsilon)
            .collect();
        Self::normalized(amps)
    }

    /// A fixed unit vector orthogonal to `self`: the basis vector with the
    /// smallest overlap, with its `self` component removed.
    pub fn orthogonal_partner(&self) -> Result<QuantumState> {
        let j = (0..self.dim())
            .min_by(|&a, &b| self.amps[a].norm_sqr().total_cmp(&self.amps[b].norm_sqr()))
            .expect("dimension is at least 2");
        let c = self.amps[j].conj();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let e = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                e - a * c
            })
            .collect();
        Self::normalized(amps)
    }

    /// Binary layout: `"QSTV"`, version (u16 LE), n (u16 LE), then `2^n`
    /// amplitudes as interleaved little-endian f64 real/imaginary pairs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 16 * self.dim());
        out.extend_from_slice(STATE_MAGIC);
        out.extend_from_slice(&STATE_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.n as u16).to_le_bytes());
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<QuantumState> {
        let mut header = [0u8; 8];
        r.read_exact(&mut header)?;
        if &header[..4] != STATE_MAGIC {
            return Err(Error::Format("bad state magic".into()));
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != STATE_VERSION {
            return Err(Error::Format(format!("unsupported state version {version}")));
        }
        let n = u16::from_le_bytes([header[6], header[7]]) as usize;
        check_qubits(n).map_err(|e| Error::Format(e.to_string()))?;
        let mut body = vec![0u8; 16 << n];
        r.read_exact(&mut body)?;
        let amps = body
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        QuantumState::from_amplitudes(amps)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<QuantumState> {
        let mut cursor = bytes;
        let state = Self::read_from(&mut cursor)?;
        if !cursor.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", cursor.len())));
        }
        Ok(state)
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    a.fidelity(b)
}

/// Haar-random state from a seed.
pub fn haar_random_state(n: usize, seed: Seed) -> Result<QuantumState> {
    QuantumState::haar_random(n, &mut seed.rng(Stream::Scheme))
}

/// Mixed state on `n` qubits, stored as a dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_state(state: &QuantumState) -> DensityMatrix {
        let dim = state.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in &state.amps {
            entries.extend(state.amps.iter().map(|b| a * b.conj()));
        }
        DensityMatrix { n: state.n, entries }
    }

    /// `Σ wᵢ |ψᵢ⟩⟨ψᵢ|`; weights must be non-negative and sum to one.
    pub fn mix(states: &[(f64, QuantumState)]) -> Result<DensityMatrix> {
        let Some((_, first)) = states.first() else {
            return Err(Error::param("cannot mix an empty ensemble"));
        };
        let n = first.n;
        if states.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) {
            return Err(Error::param("mixture weights must be non-negative"));
        }
        let total: f64 = states.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::param(format!("mixture weights sum to {total}")));
        }
        let mut acc = DensityAccumulator::new(n)?;
        for (w, s) in states {
            acc.add(*w, s)?;
        }
        Ok(acc.finish())
    }

    pub fn maximally_mixed(n: usize) -> Result<DensityMatrix> {
        check_qubits(n)?;
        let dim = 1usize << n;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(DensityMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn overlap(&self, psi: &QuantumState) -> Result<f64> {
        if psi.n != self.n {
            return Err(Error::param("dimension mismatch between state and density matrix"));
        }
        let dim = self.dim();
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                row += self.entries[i * dim + j] * psi.amps[j];
            }
            total += psi.amps[i].conj() * row;
        }
        Ok(total.re)
    }

    fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        DMatrix::from_row_slice(dim, dim, &self.entries)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.to_matrix().symmetric_eigenvalues().iter().copied().collect()
    }

    /// Checks hermiticity, unit trace and positivity within `1e-9`.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > 1e-9 {
                    return Err(Error::param("density matrix is not Hermitian"));
                }
            }
        }
        if (self.trace() - 1.0).norm() > 1e-9 {
            return Err(Error::param("density matrix trace is not 1"));
        }
        if self.eigenvalues().iter().any(|&e| e < -1e-9) {
            return Err(Error::param("density matrix has a negative eigenvalue"));
        }
        Ok(())
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::param("dimension mismatch between density matrices"));
        }
        let diff = self.to_matrix() - other.to_matrix();
        Ok(0.5 * diff.symmetric_eigenvalues().iter().map(|e| e.abs()).sum::<f64>())
    }
}

/// Incremental `Σ wᵢ |ψᵢ⟩⟨ψᵢ|` for large key-averaged ensembles.
#[derive(Clone, Debug)]
pub struct DensityAccumulator {
    n: usize,
    entries: Vec<Complex64>,
}

impl DensityAccumulator {
    pub fn new(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        Ok(DensityAccumulator { n, entries: vec![Complex64::new(0.0, 0.0); dim * dim] })
    }

    pub fn add(&mut self, weight: f64, state: &QuantumState) -> Result<()> {
        if state.n != self.n {
            return Err(Error::param("dimension mismatch in density accumulation"));
        }
        let dim = state.dim();
        for (i, a) in state.amps.iter().enumerate() {
            let wa = a * weight;
            for (j, b) in state.amps.iter().enumerate() {
                self.entries[i * dim + j] += wa * b.conj();
            }
        }
        Ok(())
    }

    pub fn finish(self) -> DensityMatrix {
        DensityMatrix { n: self.n, entries: self.entries }
    }
}

pub fn state_to_density(state: &QuantumState) -> DensityMatrix {
    DensityMatrix::from_state(state)
}

pub fn mix(states: &[(f64, QuantumState)]) -> Result<DensityMatrix> {
    DensityMatrix::mix(states)
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn overlap(psi: &QuantumState, rho: &DensityMatrix) -> Result<f64> {
    rho.overlap(psi)
}
