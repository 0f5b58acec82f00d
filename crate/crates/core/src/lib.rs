//! Benchmark toolkit for quantum image encodings.
//!
//! Three encoders (Qubit Lattice, Phase, FRQI) build gate-level circuits from
//! 8-bit grayscale images. A dense statevector simulator executes them, either
//! exactly or by sampling shots with an optional Pauli noise channel, and the
//! decoders turn probabilities or counts back into pixels. The `metrics`
//! module scores reconstructions and circuit structure, and `bench` drives
//! full parameter sweeps.
//!
//! ```
//! use qeb_core::{EncodingKind, GrayImage, run_statevector, decode_from_statevector};
//!
//! let image = GrayImage::new(2, 2, vec![0, 64, 128, 255]).unwrap();
//! let circuit = EncodingKind::Frqi.encode(&image).unwrap();
//! let state = run_statevector(&circuit).unwrap();
//! let decoded = decode_from_statevector(&state, EncodingKind::Frqi, 2, 2).unwrap();
//! assert_eq!(decoded.values, image.pixels());
//! ```

pub mod bench;
pub mod circuit;
pub mod encode;
pub mod error;
pub mod image;
pub mod metrics;
pub mod pipeline;
pub mod sim;

pub use bench::{
    emit_report, generate_image, run_experiment, Backend, ExperimentConfig, ExperimentRecord,
    ImageSize, ReportFormat,
};
pub use circuit::{decompose_mcry, Circuit, GateKind, GateOp};
pub use encode::{
    encode_frqi, encode_phase, encode_qubit_lattice, frqi_ideal_state, interpolate, AngleVector,
};
pub use error::{QebError, Result};
pub use image::GrayImage;
pub use metrics::{
    circuit_summary, correctness, hellinger_fidelity, interaction_graph, supermarq, CircuitSummary,
    CorrectnessReport, SupermarqFeatures,
};
pub use pipeline::{
    apply_inversion, decode_from_statevector, decode_frqi, decode_phase, decode_qubit_lattice,
    EncodingKind, ReconstructedImage,
};
pub use sim::{
    run_noisy, run_statevector, sample_counts, Counts, NoiseConfig, Simulator, StateVector,
};
