//! Inversion in the encoded domain and decoding back to pixels.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateOp};
use crate::encode::{
    encode_frqi, encode_phase, encode_qubit_lattice, frqi_position_bits, PIXEL_MAX,
};
use crate::error::{arg_err, QebError, Result};
use crate::image::GrayImage;
use crate::sim::{Counts, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EncodingKind {
    #[serde(rename = "ql")]
    QubitLattice,
    #[serde(rename = "phase")]
    PhaseEncoding,
    #[serde(rename = "frqi")]
    Frqi,
}

impl EncodingKind {
    pub const ALL: [EncodingKind; 3] = [
        EncodingKind::QubitLattice,
        EncodingKind::PhaseEncoding,
        EncodingKind::Frqi,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EncodingKind::QubitLattice => "ql",
            EncodingKind::PhaseEncoding => "phase",
            EncodingKind::Frqi => "frqi",
        }
    }

    /// Upper end of the pixel angle range.
    pub fn angle_range(&self) -> f64 {
        match self {
            EncodingKind::Frqi => FRAC_PI_2,
            _ => PI,
        }
    }

    pub fn encode(&self, image: &GrayImage) -> Result<Circuit> {
        match self {
            EncodingKind::QubitLattice => encode_qubit_lattice(image),
            EncodingKind::PhaseEncoding => encode_phase(image),
            EncodingKind::Frqi => encode_frqi(image),
        }
    }

    pub fn decode_counts(
        &self,
        counts: &Counts,
        rows: usize,
        cols: usize,
    ) -> Result<ReconstructedImage> {
        match self {
            EncodingKind::QubitLattice => decode_qubit_lattice(counts, rows, cols),
            EncodingKind::PhaseEncoding => decode_phase(counts, rows, cols),
            EncodingKind::Frqi => decode_frqi(counts, rows, cols),
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EncodingKind {
    type Err = QebError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "ql" | "qubit_lattice" | "qubitlattice" | "lattice" => Ok(EncodingKind::QubitLattice),
            "phase" | "phase_encoding" | "phaseencoding" => Ok(EncodingKind::PhaseEncoding),
            "frqi" => Ok(EncodingKind::Frqi),
            other => arg_err(format!("unknown encoding {other:?}")),
        }
    }
}

/// Decoded pixels together with the angles they were rounded from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructedImage {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<u8>,
    pub raw_angles: Vec<f64>,
    /// FRQI positions with no recorded shots; their value is 0.
    pub unobserved: Vec<bool>,
}

impl ReconstructedImage {
    pub fn to_image(&self) -> GrayImage {
        GrayImage::new(self.rows, self.cols, self.values.clone())
            .expect("decoder keeps dimensions consistent")
    }

    pub fn unobserved_count(&self) -> usize {
        self.unobserved.iter().filter(|&&u| u).count()
    }
}

/// Round half up, then clamp to the 8-bit range.
fn quantize(angle: f64, range_max: f64) -> u8 {
    let scaled = angle / range_max * PIXEL_MAX;
    (scaled + 0.5).floor().clamp(0.0, PIXEL_MAX) as u8
}

/// Appends the terminal X gates realising `p -> 255 - p`.
pub fn apply_inversion(circuit: &Circuit, kind: EncodingKind) -> Result<Circuit> {
    let mut out = circuit.clone();
    match kind {
        EncodingKind::QubitLattice | EncodingKind::PhaseEncoding => {
            for q in 0..circuit.width() {
                out.append(GateOp::x(q))?;
            }
        }
        EncodingKind::Frqi => {
            out.append(GateOp::x(0))?;
        }
    }
    Ok(out)
}

fn lattice_from_zero_probs(p0: &[f64], rows: usize, cols: usize) -> ReconstructedImage {
    let raw_angles: Vec<f64> = p0
        .iter()
        .map(|p| (2.0 * p.clamp(0.0, 1.0).sqrt().acos()).clamp(0.0, PI))
        .collect();
    let values = raw_angles.iter().map(|&a| quantize(a, PI)).collect();
    ReconstructedImage {
        rows,
        cols,
        values,
        raw_angles,
        unobserved: vec![false; rows * cols],
    }
}

fn counts_zero_probs(counts: &Counts, rows: usize, cols: usize) -> Result<Vec<f64>> {
    if counts.is_empty() {
        return arg_err("empty counts");
    }
    let n = rows * cols;
    if counts.num_bits() != n {
        return arg_err(format!(
            "bitstrings of length {} for a {rows}x{cols} image",
            counts.num_bits()
        ));
    }
    let mut ones = vec![0u64; n];
    let mut total = 0u64;
    for (outcome, c) in counts.iter() {
        total += c;
        let mut bits = outcome;
        while bits != 0 {
            ones[bits.trailing_zeros() as usize] += c;
            bits &= bits - 1;
        }
    }
    Ok(ones
        .into_iter()
        .map(|o| (total - o) as f64 / total as f64)
        .collect())
}

/// Per-qubit angle `2·acos(√P0)` from the marginal frequency of reading 0.
pub fn decode_qubit_lattice(
    counts: &Counts,
    rows: usize,
    cols: usize,
) -> Result<ReconstructedImage> {
    let p0 = counts_zero_probs(counts, rows, cols)?;
    Ok(lattice_from_zero_probs(&p0, rows, cols))
}

/// The trailing H leaves P(1) = sin²(θ/2), so the lattice decoder applies unchanged.
pub fn decode_phase(counts: &Counts, rows: usize, cols: usize) -> Result<ReconstructedImage> {
    decode_qubit_lattice(counts, rows, cols)
}

fn frqi_from_pairs(pairs: &[(f64, f64)], rows: usize, cols: usize) -> ReconstructedImage {
    let mut raw_angles = Vec::with_capacity(pairs.len());
    let mut unobserved = Vec::with_capacity(pairs.len());
    for &(p0, p1) in pairs {
        let total = p0 + p1;
        if total > 0.0 {
            raw_angles.push(
                (p0 / total)
                    .clamp(0.0, 1.0)
                    .sqrt()
                    .acos()
                    .clamp(0.0, FRAC_PI_2),
            );
            unobserved.push(false);
        } else {
            raw_angles.push(0.0);
            unobserved.push(true);
        }
    }
    let values = raw_angles.iter().map(|&a| quantize(a, FRAC_PI_2)).collect();
    ReconstructedImage {
        rows,
        cols,
        values,
        raw_angles,
        unobserved,
    }
}

/// Per position `acos(√(P(j,0) / (P(j,0) + P(j,1))))`, colour qubit is bit 0.
pub fn decode_frqi(counts: &Counts, rows: usize, cols: usize) -> Result<ReconstructedImage> {
    let bits = frqi_position_bits(rows, cols)?;
    if counts.num_bits() != bits + 1 {
        return arg_err(format!(
            "bitstrings of length {} for a {rows}x{cols} FRQI image",
            counts.num_bits()
        ));
    }
    if counts.is_empty() {
        return arg_err("empty counts");
    }
    let mut pairs = vec![(0.0, 0.0); rows * cols];
    for (outcome, c) in counts.iter() {
        let slot = &mut pairs[(outcome >> 1) as usize];
        if outcome & 1 == 0 {
            slot.0 += c as f64;
        } else {
            slot.1 += c as f64;
        }
    }
    Ok(frqi_from_pairs(&pairs, rows, cols))
}

/// Same formulas as the count decoders, fed with exact probabilities.
pub fn decode_from_statevector(
    state: &StateVector,
    kind: EncodingKind,
    rows: usize,
    cols: usize,
) -> Result<ReconstructedImage> {
    match kind {
        EncodingKind::QubitLattice | EncodingKind::PhaseEncoding => {
            if state.num_qubits() != rows * cols {
                return arg_err(format!(
                    "{}-qubit state for a {rows}x{cols} image",
                    state.num_qubits()
                ));
            }
            Ok(lattice_from_zero_probs(&state.marginals_zero(), rows, cols))
        }
        EncodingKind::Frqi => {
            let bits = frqi_position_bits(rows, cols)?;
            if state.num_qubits() != bits + 1 {
                return arg_err(format!(
                    "{}-qubit state for a {rows}x{cols} FRQI image",
                    state.num_qubits()
                ));
            }
            let pairs: Vec<(f64, f64)> = state
                .amplitudes()
                .chunks(2)
                .map(|c| (c[0].norm_sqr(), c[1].norm_sqr()))
                .collect();
            Ok(frqi_from_pairs(&pairs, rows, cols))
        }
    }
}
