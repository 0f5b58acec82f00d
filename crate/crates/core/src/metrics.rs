//! Correctness, fidelity and circuit-structure metrics.
//!
//! The SupermarQ-style features are computed on the logical circuit, before
//! any transpilation. Gates acting on two or more qubits count as one
//! multi-qubit interaction each; in the interaction graph they contribute one
//! edge per control–target pair.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{arg_err, Result};
use crate::image::GrayImage;
use crate::pipeline::ReconstructedImage;
use crate::sim::Counts;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectnessReport {
    pub precision_pct: f64,
    pub mean_error: f64,
    pub per_pixel_error: Vec<f64>,
    /// Pixels whose expected value is 0; their error is the absolute deviation.
    pub zero_expected_pixels: usize,
}

/// Exact-match precision and mean relative error of `got` against `expected`.
///
/// Relative error is `|observed - expected| / expected`; when the expected
/// value is 0 the denominator is taken as 1.
pub fn correctness(expected: &GrayImage, got: &ReconstructedImage) -> Result<CorrectnessReport> {
    if expected.rows() != got.rows
        || expected.cols() != got.cols
        || got.values.len() != expected.len()
    {
        return arg_err(format!(
            "expected {}x{} image, got {}x{}",
            expected.rows(),
            expected.cols(),
            got.rows,
            got.cols
        ));
    }
    let mut exact = 0usize;
    let mut zero_expected_pixels = 0usize;
    let per_pixel_error: Vec<f64> = expected
        .pixels()
        .iter()
        .zip(&got.values)
        .map(|(&e, &o)| {
            if e == o {
                exact += 1;
            }
            let denom = if e == 0 {
                zero_expected_pixels += 1;
                1.0
            } else {
                f64::from(e)
            };
            (f64::from(o) - f64::from(e)).abs() / denom
        })
        .collect();
    let n = per_pixel_error.len() as f64;
    Ok(CorrectnessReport {
        precision_pct: 100.0 * exact as f64 / n,
        mean_error: per_pixel_error.iter().sum::<f64>() / n,
        per_pixel_error,
        zero_expected_pixels,
    })
}

/// `(1 - H²)²`, which equals the squared Bhattacharyya coefficient.
fn fidelity_from_bc(bc: f64) -> f64 {
    let bc = bc.clamp(0.0, 1.0);
    bc * bc
}

/// Hellinger fidelity between two count distributions over the union of their keys.
pub fn hellinger_fidelity(a: &Counts, b: &Counts) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return arg_err("hellinger fidelity of empty counts");
    }
    if a.num_bits() != b.num_bits() {
        return arg_err(format!(
            "bitstring lengths differ: {} vs {}",
            a.num_bits(),
            b.num_bits()
        ));
    }
    // integer products keep identical inputs at exactly 1.0
    let overlap: f64 = a
        .iter()
        .map(|(k, ca)| {
            let cb = b.get(k);
            ((ca as u128 * cb as u128) as f64).sqrt()
        })
        .sum();
    let norm = ((a.shots() as u128 * b.shots() as u128) as f64).sqrt();
    Ok(fidelity_from_bc(overlap / norm))
}

/// Hellinger fidelity of sampled counts against an exact probability vector
/// indexed by outcome. Scaling the probabilities by the shot count would not
/// change the normalised comparison, so they are used directly.
pub fn hellinger_fidelity_to_probs(counts: &Counts, probs: &[f64]) -> Result<f64> {
    if counts.is_empty() {
        return arg_err("hellinger fidelity of empty counts");
    }
    if probs.len() != 1usize << counts.num_bits() {
        return arg_err(format!(
            "{} probabilities for {}-bit outcomes",
            probs.len(),
            counts.num_bits()
        ));
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return arg_err("probabilities sum to zero");
    }
    let shots = counts.shots() as f64;
    let overlap: f64 = counts
        .iter()
        .map(|(k, c)| (c as f64 / shots * probs[k as usize] / total).sqrt())
        .sum();
    Ok(fidelity_from_bc(overlap))
}

/// Undirected qubit interaction graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    pub num_qubits: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl InteractionGraph {
    pub fn degree(&self, q: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == q || b == q)
            .count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_qubits];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }
}

pub fn interaction_graph(circuit: &Circuit) -> InteractionGraph {
    let mut edges = BTreeSet::new();
    for op in circuit.ops().iter().filter(|op| op.is_multi_qubit()) {
        for &t in &op.targets {
            for &c in &op.controls {
                edges.insert((c.min(t), c.max(t)));
            }
        }
    }
    InteractionGraph {
        num_qubits: circuit.width(),
        edges,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupermarqFeatures {
    pub communication: f64,
    pub critical_depth: f64,
    pub entanglement_ratio: f64,
    pub parallelism: f64,
    pub liveness: f64,
}

impl SupermarqFeatures {
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.communication,
            self.critical_depth,
            self.entanglement_ratio,
            self.parallelism,
            self.liveness,
        ]
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `(n_t / d - 1) / (N - 1)` before clamping.
pub fn parallelism_unclamped(circuit: &Circuit) -> f64 {
    let n = circuit.width();
    let d = circuit.depth();
    if n <= 1 || d == 0 {
        return 0.0;
    }
    (circuit.gate_count() as f64 / d as f64 - 1.0) / (n - 1) as f64
}

/// Largest number of multi-qubit gates on one path of the gate dependency DAG.
fn critical_multi_qubit_gates(circuit: &Circuit) -> usize {
    let mut best = vec![0usize; circuit.width()];
    for op in circuit.ops().iter().filter(|op| !op.is_barrier()) {
        let along =
            op.qubits().map(|q| best[q]).max().unwrap_or(0) + usize::from(op.is_multi_qubit());
        for q in op.qubits() {
            best[q] = along;
        }
    }
    best.into_iter().max().unwrap_or(0)
}

pub fn supermarq(circuit: &Circuit) -> SupermarqFeatures {
    let n = circuit.width();
    let layering = circuit.layering();
    let depth = layering.depth;
    let total = circuit.gate_count();
    let multi = circuit.multi_qubit_gate_count();

    let graph = interaction_graph(circuit);
    let degree_sum: usize = graph.degrees().iter().sum();
    let communication = if n > 1 {
        ratio(degree_sum as f64, (n * (n - 1)) as f64)
    } else {
        0.0
    };

    let critical_depth = ratio(critical_multi_qubit_gates(circuit) as f64, multi as f64);
    let entanglement_ratio = ratio(multi as f64, total as f64);
    let parallelism = parallelism_unclamped(circuit).clamp(0.0, 1.0);

    // a gate occupies one layer and each of its qubits is live there
    let active: usize = circuit
        .ops()
        .iter()
        .zip(&layering.layer_of)
        .filter(|(_, layer)| layer.is_some())
        .map(|(op, _)| op.qubits().count())
        .sum();
    let liveness = ratio(active as f64, (n * depth) as f64);

    SupermarqFeatures {
        communication: communication.clamp(0.0, 1.0),
        critical_depth,
        entanglement_ratio,
        parallelism,
        liveness,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSummary {
    pub width: usize,
    pub depth: usize,
    pub gate_count: usize,
    pub multiqubit_gate_count: usize,
}

pub fn circuit_summary(circuit: &Circuit) -> CircuitSummary {
    CircuitSummary {
        width: circuit.width(),
        depth: circuit.depth(),
        gate_count: circuit.gate_count(),
        multiqubit_gate_count: circuit.multi_qubit_gate_count(),
    }
}
