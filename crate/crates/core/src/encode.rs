//! Classical-to-quantum image encoders.
//!
//! * Qubit Lattice: one qubit per pixel, `Ry(θ)` with θ ∈ [0, π].
//! * Phase: one qubit per pixel, `H · Rz(θ) · H` with θ ∈ [0, π].
//! * FRQI: a colour qubit (index 0) plus `2n` position qubits for a
//!   `2^n × 2^n` image. Pixel `i` (row-major) lives at position-register
//!   value `i`, with position qubit `1 + b` holding bit `b` of `i`, so the
//!   row index occupies the high bits. The full state index is `color + 2·i`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::circuit::{decompose_mcry, Circuit, GateOp};
use crate::error::{arg_err, QebError, Result};
use crate::image::GrayImage;
use crate::sim::{StateVector, DEFAULT_QUBIT_CAP};

/// Pixel values are divided by this constant so that 255 maps onto the range end.
pub const PIXEL_MAX: f64 = 255.0;

pub const LATTICE_RANGE: f64 = PI;
pub const FRQI_RANGE: f64 = FRAC_PI_2;

#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector {
    pub angles: Vec<f64>,
    pub range_max: f64,
}

/// Linear map of every pixel onto `[0, range_max]`, row-major.
pub fn interpolate(image: &GrayImage, range_max: f64) -> Result<AngleVector> {
    if !(range_max > 0.0 && range_max.is_finite()) {
        return arg_err(format!("angle range {range_max} must be positive"));
    }
    let angles = image
        .pixels()
        .iter()
        .map(|&p| f64::from(p) / PIXEL_MAX * range_max)
        .collect();
    Ok(AngleVector { angles, range_max })
}

fn check_lattice_size(image: &GrayImage) -> Result<usize> {
    let n = image.len();
    if n > DEFAULT_QUBIT_CAP {
        return Err(QebError::Resource(format!(
            "{}x{} image needs {n} qubits, above the cap of {DEFAULT_QUBIT_CAP}",
            image.rows(),
            image.cols()
        )));
    }
    Ok(n)
}

pub fn encode_qubit_lattice(image: &GrayImage) -> Result<Circuit> {
    let width = check_lattice_size(image)?;
    let angles = interpolate(image, LATTICE_RANGE)?;
    let mut circuit = Circuit::new(width)?;
    circuit.extend(
        angles
            .angles
            .iter()
            .enumerate()
            .map(|(q, &theta)| GateOp::ry(theta, q)),
    )?;
    Ok(circuit)
}

pub fn encode_phase(image: &GrayImage) -> Result<Circuit> {
    let width = check_lattice_size(image)?;
    let angles = interpolate(image, LATTICE_RANGE)?;
    let mut circuit = Circuit::new(width)?;
    for (q, &theta) in angles.angles.iter().enumerate() {
        circuit.extend([GateOp::h(q), GateOp::rz(theta, q), GateOp::h(q)])?;
    }
    Ok(circuit)
}

/// Why a `rows × cols` image cannot be FRQI-encoded, if it cannot.
pub fn frqi_shape_issue(rows: usize, cols: usize) -> Option<&'static str> {
    if rows != cols {
        Some("non-square image")
    } else if !rows.is_power_of_two() {
        Some("non-power-of-two side")
    } else {
        None
    }
}

/// Number of position bits `2n` for a square `2^n × 2^n` image.
pub fn frqi_position_bits(rows: usize, cols: usize) -> Result<usize> {
    if let Some(issue) = frqi_shape_issue(rows, cols) {
        return Err(QebError::Shape(format!("{issue} ({rows}x{cols})")));
    }
    Ok(2 * rows.trailing_zeros() as usize)
}

pub fn frqi_width(rows: usize, cols: usize) -> Result<usize> {
    Ok(frqi_position_bits(rows, cols)? + 1)
}

pub fn encode_frqi(image: &GrayImage) -> Result<Circuit> {
    let bits = frqi_position_bits(image.rows(), image.cols())?;
    let width = bits + 1;
    if width > DEFAULT_QUBIT_CAP {
        return Err(QebError::Resource(format!(
            "FRQI width {width} exceeds the cap"
        )));
    }
    let angles = interpolate(image, FRQI_RANGE)?;
    let mut circuit = Circuit::new(width)?;
    let positions: Vec<usize> = (1..=bits).collect();
    if positions.is_empty() {
        // a single pixel has no position register
        circuit.append(GateOp::ry(2.0 * angles.angles[0], 0))?;
        return Ok(circuit);
    }
    circuit.extend(positions.iter().map(|&q| GateOp::h(q)))?;
    for (i, &theta) in angles.angles.iter().enumerate() {
        // map |i⟩ onto |1…1⟩ so that the all-ones control condition selects pixel i
        let toggles: Vec<GateOp> = (0..bits)
            .filter(|b| (i >> b) & 1 == 0)
            .map(|b| GateOp::x(positions[b]))
            .collect();
        circuit.extend(toggles.iter().cloned())?;
        circuit.barrier_all();
        circuit.extend(decompose_mcry(2.0 * theta, &positions, 0)?)?;
        circuit.barrier_all();
        circuit.extend(toggles)?;
    }
    Ok(circuit)
}

/// The FRQI state built directly from its closed form, for checking `encode_frqi`.
pub fn frqi_ideal_state(image: &GrayImage) -> Result<StateVector> {
    let bits = frqi_position_bits(image.rows(), image.cols())?;
    let angles = interpolate(image, FRQI_RANGE)?;
    let scale = 1.0 / (image.rows() as f64);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (bits + 1)];
    for (i, theta) in angles.angles.iter().enumerate() {
        amps[2 * i] = Complex64::new(scale * theta.cos(), 0.0);
        amps[2 * i + 1] = Complex64::new(scale * theta.sin(), 0.0);
    }
    StateVector::from_amplitudes(bits + 1, amps)
}
