//! Dense statevector simulation, Born-rule sampling and a Pauli noise channel.
//!
//! Bit ordering: qubit `q` is bit `q` of a basis-state index, and bit 0 is the
//! rightmost character of a measurement bitstring.
//!
//! All randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`, which is
//! platform independent. Noisy trajectories use stream `shot + 1` of the same
//! seed so that results do not depend on how shots are scheduled over threads.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::Deserializer;
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{arg_err, QebError, Result};

pub const DEFAULT_QUBIT_CAP: usize = 26;

const NORM_TOL: f64 = 1e-9;
// upper bound on memory spent on checkpoint states during noisy runs
const CHECKPOINT_BYTES: usize = 64 << 20;

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn ry_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

fn rz_matrix(theta: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

fn h_matrix() -> Mat2 {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[r, r], [r, -r]]
}

fn x_matrix() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

fn z_matrix() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_index(i: u32) -> Self {
        match i {
            0 => Pauli::X,
            1 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    fn matrix(self) -> Mat2 {
        match self {
            Pauli::X => x_matrix(),
            Pauli::Y => [
                [ZERO, Complex64::new(0.0, -1.0)],
                [Complex64::new(0.0, 1.0), ZERO],
            ],
            Pauli::Z => z_matrix(),
        }
    }
}

/// The 2×2 matrix acting on the target (controls excluded). `None` for barriers.
fn target_matrix(kind: GateKind) -> Option<Mat2> {
    Some(match kind {
        GateKind::H => h_matrix(),
        GateKind::X | GateKind::Cx | GateKind::Mcx => x_matrix(),
        GateKind::Z => z_matrix(),
        GateKind::Ry(t) | GateKind::McRy(t) => ry_matrix(t),
        GateKind::Rz(t) => rz_matrix(t),
        GateKind::Barrier => return None,
    })
}

fn apply_matrix(amps: &mut [Complex64], target: usize, control_mask: usize, m: &Mat2) {
    let tbit = 1usize << target;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for i in base..base + tbit {
            if i & control_mask != control_mask {
                continue;
            }
            let a0 = amps[i];
            let a1 = amps[i | tbit];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | tbit] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += 2 * tbit;
    }
}

fn apply_flip(amps: &mut [Complex64], target: usize, control_mask: usize) {
    let tbit = 1usize << target;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for i in base..base + tbit {
            if i & control_mask == control_mask {
                amps.swap(i, i | tbit);
            }
        }
        base += 2 * tbit;
    }
}

fn control_mask(op: &GateOp) -> usize {
    op.controls.iter().fold(0, |m, &c| m | (1 << c))
}

/// Amplitudes of an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1usize << num_qubits];
        amps[0] = ONE;
        Self { num_qubits, amps }
    }

    /// Wraps raw amplitudes; length must be 2^num_qubits and the norm 1 within 1e-9.
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << num_qubits {
            return arg_err(format!("{} amplitudes for {num_qubits} qubits", amps.len()));
        }
        let state = Self { num_qubits, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return arg_err(format!("state norm {norm} is not 1"));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probabilities |a_i|².
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return arg_err("inner product of states with different widths");
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|², insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        self.apply_unchecked(op);
        Ok(())
    }

    fn apply_unchecked(&mut self, op: &GateOp) {
        let cmask = control_mask(op);
        match op.kind {
            GateKind::Barrier => {}
            GateKind::X | GateKind::Cx | GateKind::Mcx => {
                apply_flip(&mut self.amps, op.targets[0], cmask)
            }
            kind => {
                let m = target_matrix(kind).expect("non-barrier gate");
                apply_matrix(&mut self.amps, op.targets[0], cmask, &m);
            }
        }
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        match pauli {
            Pauli::X => apply_flip(&mut self.amps, qubit, 0),
            p => apply_matrix(&mut self.amps, qubit, 0, &p.matrix()),
        }
    }

    /// Kronecker product of single-qubit states, qubit 0 least significant.
    fn from_product(qubits: &[[Complex64; 2]]) -> Self {
        let n = qubits.len();
        let mut amps = vec![ZERO; 1usize << n];
        amps[0] = ONE;
        for (q, v) in qubits.iter().enumerate() {
            let half = 1usize << q;
            let (lo, hi) = amps.split_at_mut(half);
            for (l, h) in lo.iter_mut().zip(hi[..half].iter_mut()) {
                *h = *l * v[1];
                *l *= v[0];
            }
        }
        Self {
            num_qubits: n,
            amps,
        }
    }

    /// Marginal probability that `qubit` reads 0.
    pub fn marginal_zero(&self, qubit: usize) -> f64 {
        let bit = 1usize << qubit;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// P(qubit q = 0) for every qubit, in one pass over the amplitudes.
    pub fn marginals_zero(&self) -> Vec<f64> {
        let mut ones = vec![0.0f64; self.num_qubits];
        let mut total = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            total += p;
            let mut bits = i;
            while bits != 0 {
                let q = bits.trailing_zeros() as usize;
                ones[q] += p;
                bits &= bits - 1;
            }
        }
        ones.into_iter()
            .map(|p1| ((total - p1) / total).clamp(0.0, 1.0))
            .collect()
    }

    /// Multinomial sample of `shots` outcomes, deterministic given `seed`.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> Result<Counts> {
        if shots == 0 {
            return arg_err("shots must be at least 1");
        }
        let cumulative = cumulative(&self.probabilities());
        let total = *cumulative.last().expect("non-empty state");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = Counts::new(self.num_qubits);
        for _ in 0..shots {
            let u = rng.random::<f64>() * total;
            counts.add(draw(&cumulative, u) as u64, 1);
        }
        Ok(counts)
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

fn draw(cumulative: &[f64], u: f64) -> usize {
    cumulative
        .partition_point(|&c| c <= u)
        .min(cumulative.len() - 1)
}

/// Measurement results: outcome index → number of shots that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    num_bits: usize,
    map: BTreeMap<u64, u64>,
}

impl Counts {
    pub fn new(num_bits: usize) -> Self {
        Self {
            num_bits,
            map: BTreeMap::new(),
        }
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn add(&mut self, outcome: u64, n: u64) {
        debug_assert!(self.num_bits >= 64 || outcome >> self.num_bits == 0);
        if n > 0 {
            *self.map.entry(outcome).or_insert(0) += n;
        }
    }

    pub fn get(&self, outcome: u64) -> u64 {
        self.map.get(&outcome).copied().unwrap_or(0)
    }

    pub fn shots(&self) -> u64 {
        self.map.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Observed outcomes in ascending order with their counts.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.map.iter().map(|(&k, &v)| (k, v))
    }

    pub fn bitstring(&self, outcome: u64) -> String {
        format!("{:0width$b}", outcome, width = self.num_bits)
    }

    pub fn to_bitstrings(&self) -> BTreeMap<String, u64> {
        self.iter().map(|(k, v)| (self.bitstring(k), v)).collect()
    }

    /// Builds counts from bitstring keys. All keys must share one length.
    pub fn from_bitstrings<S: AsRef<str>>(
        entries: impl IntoIterator<Item = (S, u64)>,
    ) -> Result<Self> {
        let mut counts: Option<Counts> = None;
        for (key, n) in entries {
            let key = key.as_ref();
            if key.is_empty() || key.len() > 63 || !key.bytes().all(|b| b == b'0' || b == b'1') {
                return arg_err(format!("invalid bitstring {key:?}"));
            }
            let c = counts.get_or_insert_with(|| Counts::new(key.len()));
            if c.num_bits != key.len() {
                return arg_err(format!(
                    "bitstring {key:?} has length {} not {}",
                    key.len(),
                    c.num_bits
                ));
            }
            let outcome = u64::from_str_radix(key, 2).expect("validated binary");
            c.add(outcome, n);
        }
        counts.ok_or_else(|| QebError::Argument("no bitstrings given".into()))
    }

    /// Marginal frequency of `qubit` reading 0.
    pub fn marginal_zero(&self, qubit: usize) -> f64 {
        let bit = 1u64 << qubit;
        let zeros: u64 = self
            .iter()
            .filter(|(k, _)| k & bit == 0)
            .map(|(_, v)| v)
            .sum();
        zeros as f64 / self.shots() as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("string-keyed map serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

impl Serialize for Counts {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.map.len()))?;
        for (k, v) in self.iter() {
            map.serialize_entry(&self.bitstring(k), &v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Counts {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, u64>::deserialize(deserializer)?;
        Counts::from_bitstrings(raw).map_err(serde::de::Error::custom)
    }
}

/// Symmetric depolarizing gate errors plus independent readout flips.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub p1: f64,
    pub p2: f64,
    pub p_readout: f64,
}

impl NoiseConfig {
    pub fn new(p1: f64, p2: f64, p_readout: f64) -> Result<Self> {
        let cfg = Self { p1, p2, p_readout };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("p_readout", self.p_readout),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return arg_err(format!("{name} = {p} is not a probability"));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.p_readout == 0.0
    }
}

/// One sampled Pauli error: inserted right after op `op_index`.
#[derive(Debug, Clone, Copy)]
struct Fault {
    op_index: usize,
    qubit: usize,
    pauli: Pauli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Simulator {
    pub max_qubits: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_QUBIT_CAP,
        }
    }
}

impl Simulator {
    pub fn with_cap(max_qubits: usize) -> Self {
        Self { max_qubits }
    }

    fn check_width(&self, circuit: &Circuit) -> Result<()> {
        if circuit.width() > self.max_qubits {
            return Err(QebError::Resource(format!(
                "circuit width {} exceeds the simulation cap of {} qubits",
                circuit.width(),
                self.max_qubits
            )));
        }
        Ok(())
    }

    /// Final state of `circuit` applied to |0…0⟩.
    ///
    /// Runs of single-qubit gates are fused per qubit and only flushed when a
    /// multi-qubit gate touches that qubit. A circuit without multi-qubit
    /// gates is assembled directly as a product state.
    pub fn run_statevector(&self, circuit: &Circuit) -> Result<StateVector> {
        self.check_width(circuit)?;
        let n = circuit.width();
        let mut pending: Vec<Option<Mat2>> = vec![None; n];

        if circuit.multi_qubit_gate_count() == 0 {
            for op in circuit.ops() {
                if let Some(m) = target_matrix(op.kind) {
                    let q = op.targets[0];
                    pending[q] = Some(matmul(&m, pending[q].as_ref().unwrap_or(&identity())));
                }
            }
            let qubits: Vec<[Complex64; 2]> = pending
                .iter()
                .map(|m| match m {
                    Some(m) => [m[0][0], m[1][0]],
                    None => [ONE, ZERO],
                })
                .collect();
            return Ok(StateVector::from_product(&qubits));
        }

        let mut state = StateVector::zero(n);
        for op in circuit.ops() {
            if op.is_barrier() {
                continue;
            }
            if op.is_multi_qubit() {
                for q in op.qubits() {
                    if let Some(m) = pending[q].take() {
                        apply_matrix(&mut state.amps, q, 0, &m);
                    }
                }
                state.apply_unchecked(op);
            } else {
                let q = op.targets[0];
                let m = target_matrix(op.kind).expect("non-barrier gate");
                pending[q] = Some(matmul(&m, pending[q].as_ref().unwrap_or(&identity())));
            }
        }
        for (q, m) in pending.into_iter().enumerate() {
            if let Some(m) = m {
                apply_matrix(&mut state.amps, q, 0, &m);
            }
        }
        Ok(state)
    }

    /// Monte-Carlo trajectory sampling under `noise`, one trajectory per shot.
    pub fn run_noisy(
        &self,
        circuit: &Circuit,
        noise: &NoiseConfig,
        shots: u64,
        seed: u64,
    ) -> Result<Counts> {
        noise.validate()?;
        if shots == 0 {
            return arg_err("shots must be at least 1");
        }
        let ideal = self.run_statevector(circuit)?;
        if noise.is_noiseless() {
            return ideal.sample_counts(shots, seed);
        }
        let n = circuit.width();
        let outcomes: Vec<u64> = if circuit.multi_qubit_gate_count() == 0 {
            let runner = ProductTrajectories::new(circuit);
            (0..shots)
                .into_par_iter()
                .map(|s| runner.shot(noise, seed, s))
                .collect()
        } else {
            let runner = DenseTrajectories::new(circuit, &ideal);
            (0..shots)
                .into_par_iter()
                .map(|s| runner.shot(noise, seed, s))
                .collect()
        };
        let mut counts = Counts::new(n);
        for o in outcomes {
            counts.add(o, 1);
        }
        Ok(counts)
    }
}

fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot + 1);
    rng
}

fn sample_faults(ops: &[GateOp], noise: &NoiseConfig, rng: &mut ChaCha8Rng) -> Vec<Fault> {
    let mut faults = Vec::new();
    for (op_index, op) in ops.iter().enumerate() {
        if op.is_barrier() {
            continue;
        }
        let p = if op.is_multi_qubit() {
            noise.p2
        } else {
            noise.p1
        };
        if p > 0.0 && rng.random::<f64>() < p {
            for qubit in op.qubits() {
                let pauli = Pauli::from_index(rng.random_range(0..3));
                faults.push(Fault {
                    op_index,
                    qubit,
                    pauli,
                });
            }
        }
    }
    faults
}

fn readout(outcome: u64, num_bits: usize, p_readout: f64, rng: &mut ChaCha8Rng) -> u64 {
    if p_readout == 0.0 {
        return outcome;
    }
    let mut out = outcome;
    for q in 0..num_bits {
        if rng.random::<f64>() < p_readout {
            out ^= 1 << q;
        }
    }
    out
}

/// Trajectories for circuits made only of single-qubit gates: every qubit
/// evolves independently, so each shot is simulated qubit by qubit.
struct ProductTrajectories<'a> {
    ops: &'a [GateOp],
    width: usize,
}

impl<'a> ProductTrajectories<'a> {
    fn new(circuit: &'a Circuit) -> Self {
        Self {
            ops: circuit.ops(),
            width: circuit.width(),
        }
    }

    fn shot(&self, noise: &NoiseConfig, seed: u64, shot: u64) -> u64 {
        let mut rng = shot_rng(seed, shot);
        let faults = sample_faults(self.ops, noise, &mut rng);
        let mut qubits = vec![[ONE, ZERO]; self.width];
        let mut next_fault = 0;
        for (i, op) in self.ops.iter().enumerate() {
            if let Some(m) = target_matrix(op.kind) {
                let v = &mut qubits[op.targets[0]];
                *v = [
                    m[0][0] * v[0] + m[0][1] * v[1],
                    m[1][0] * v[0] + m[1][1] * v[1],
                ];
            }
            while next_fault < faults.len() && faults[next_fault].op_index == i {
                let f = faults[next_fault];
                let m = f.pauli.matrix();
                let v = &mut qubits[f.qubit];
                *v = [
                    m[0][0] * v[0] + m[0][1] * v[1],
                    m[1][0] * v[0] + m[1][1] * v[1],
                ];
                next_fault += 1;
            }
        }
        let mut outcome = 0u64;
        for (q, v) in qubits.iter().enumerate() {
            let p1 = v[1].norm_sqr() / (v[0].norm_sqr() + v[1].norm_sqr());
            if rng.random::<f64>() < p1 {
                outcome |= 1 << q;
            }
        }
        readout(outcome, self.width, noise.p_readout, &mut rng)
    }
}

/// Dense trajectories restarted from the closest stored prefix state.
struct DenseTrajectories<'a> {
    ops: &'a [GateOp],
    width: usize,
    ideal_cumulative: Vec<f64>,
    stride: usize,
    checkpoints: Vec<StateVector>,
}

impl<'a> DenseTrajectories<'a> {
    fn new(circuit: &'a Circuit, ideal: &StateVector) -> Self {
        let ops = circuit.ops();
        let state_bytes = std::mem::size_of::<Complex64>() << circuit.width();
        let budget = (CHECKPOINT_BYTES / state_bytes).max(1);
        let stride = ops.len().div_ceil(budget).max(1);
        let mut checkpoints = Vec::new();
        let mut state = StateVector::zero(circuit.width());
        for (i, op) in ops.iter().enumerate() {
            if i % stride == 0 {
                checkpoints.push(state.clone());
            }
            state.apply_unchecked(op);
        }
        if checkpoints.is_empty() {
            checkpoints.push(state);
        }
        Self {
            ops,
            width: circuit.width(),
            ideal_cumulative: cumulative(&ideal.probabilities()),
            stride,
            checkpoints,
        }
    }

    fn shot(&self, noise: &NoiseConfig, seed: u64, shot: u64) -> u64 {
        let mut rng = shot_rng(seed, shot);
        let faults = sample_faults(self.ops, noise, &mut rng);
        let outcome = if faults.is_empty() {
            let total = *self.ideal_cumulative.last().expect("non-empty");
            draw(&self.ideal_cumulative, rng.random::<f64>() * total) as u64
        } else {
            let start = faults[0].op_index / self.stride;
            let mut state = self.checkpoints[start].clone();
            let mut next_fault = 0;
            for (i, op) in self.ops.iter().enumerate().skip(start * self.stride) {
                state.apply_unchecked(op);
                while next_fault < faults.len() && faults[next_fault].op_index == i {
                    state.apply_pauli(faults[next_fault].qubit, faults[next_fault].pauli);
                    next_fault += 1;
                }
            }
            let total = state.norm_sqr();
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = state.amps.len() - 1;
            for (i, a) in state.amps.iter().enumerate() {
                acc += a.norm_sqr();
                if acc > u {
                    chosen = i;
                    break;
                }
            }
            chosen as u64
        };
        readout(outcome, self.width, noise.p_readout, &mut rng)
    }
}

pub fn run_statevector(circuit: &Circuit) -> Result<StateVector> {
    Simulator::default().run_statevector(circuit)
}

pub fn run_noisy(circuit: &Circuit, noise: &NoiseConfig, shots: u64, seed: u64) -> Result<Counts> {
    Simulator::default().run_noisy(circuit, noise, shots, seed)
}

pub fn sample_counts(state: &StateVector, shots: u64, seed: u64) -> Result<Counts> {
    state.sample_counts(shots, seed)
}

pub fn probabilities(state: &StateVector) -> Vec<f64> {
    state.probabilities()
}
