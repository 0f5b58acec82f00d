//! Python bindings for `qeb_core`.
//!
//! Images cross the boundary as flat row-major lists of ints, counts as
//! `{bitstring: count}` dicts using the core bit order (qubit 0 rightmost).

use std::collections::{BTreeMap, HashMap};

use pyo3::exceptions::{PyIndexError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use qeb_core::{metrics, Counts, EncodingKind, GrayImage, NoiseConfig, QebError, Simulator};

fn to_py(err: QebError) -> PyErr {
    match err {
        QebError::Index { .. } => PyIndexError::new_err(err.to_string()),
        QebError::Resource(_) => PyRuntimeError::new_err(err.to_string()),
        QebError::Io(_) => PyOSError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn kind(name: &str) -> PyResult<EncodingKind> {
    name.parse().map_err(to_py)
}

fn image(pixels: Vec<i64>, rows: usize, cols: usize) -> PyResult<GrayImage> {
    let bytes = pixels
        .into_iter()
        .map(|p| {
            u8::try_from(p)
                .map_err(|_| PyValueError::new_err(format!("pixel {p} outside [0, 255]")))
        })
        .collect::<PyResult<Vec<u8>>>()?;
    GrayImage::new(rows, cols, bytes).map_err(to_py)
}

fn counts_from(map: HashMap<String, u64>) -> PyResult<Counts> {
    Counts::from_bitstrings(map).map_err(to_py)
}

#[pyclass(name = "Circuit", frozen)]
struct PyCircuit {
    inner: qeb_core::Circuit,
}

#[pymethods]
impl PyCircuit {
    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    #[getter]
    fn gate_count(&self) -> usize {
        self.inner.gate_count()
    }

    #[getter]
    fn multiqubit_gate_count(&self) -> usize {
        self.inner.multi_qubit_gate_count()
    }

    /// One line per op: `<kind>(<theta>) targets=[..] controls=[..]`.
    fn dump(&self) -> String {
        self.inner.to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(width={}, ops={})",
            self.inner.width(),
            self.inner.len()
        )
    }
}

#[pyclass(name = "StateVector", frozen)]
struct PyStateVector {
    inner: qeb_core::StateVector,
}

#[pymethods]
impl PyStateVector {
    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities()
    }

    /// Amplitudes as `(re, im)` pairs.
    fn amplitudes(&self) -> Vec<(f64, f64)> {
        self.inner
            .amplitudes()
            .iter()
            .map(|a| (a.re, a.im))
            .collect()
    }

    fn overlap(&self, other: &PyStateVector) -> PyResult<f64> {
        self.inner.overlap(&other.inner).map_err(to_py)
    }

    fn sample_counts(&self, shots: u64, seed: u64) -> PyResult<BTreeMap<String, u64>> {
        Ok(self
            .inner
            .sample_counts(shots, seed)
            .map_err(to_py)?
            .to_bitstrings())
    }

    fn __repr__(&self) -> String {
        format!("StateVector(num_qubits={})", self.inner.num_qubits())
    }
}

#[pyfunction]
fn generate_image(rows: usize, cols: usize, seed: u64) -> PyResult<Vec<u32>> {
    let img = qeb_core::generate_image(rows, cols, seed).map_err(to_py)?;
    Ok(img.pixels().iter().map(|&p| u32::from(p)).collect())
}

#[pyfunction]
fn encode(encoding: &str, pixels: Vec<i64>, rows: usize, cols: usize) -> PyResult<PyCircuit> {
    let img = image(pixels, rows, cols)?;
    Ok(PyCircuit {
        inner: kind(encoding)?.encode(&img).map_err(to_py)?,
    })
}

#[pyfunction]
fn apply_inversion(circuit: &PyCircuit, encoding: &str) -> PyResult<PyCircuit> {
    Ok(PyCircuit {
        inner: qeb_core::apply_inversion(&circuit.inner, kind(encoding)?).map_err(to_py)?,
    })
}

#[pyfunction]
fn run_statevector(circuit: &PyCircuit) -> PyResult<PyStateVector> {
    Ok(PyStateVector {
        inner: Simulator::default()
            .run_statevector(&circuit.inner)
            .map_err(to_py)?,
    })
}

#[pyfunction]
#[pyo3(signature = (circuit, shots, seed, p1 = 0.0, p2 = 0.0, p_readout = 0.0))]
fn run_noisy(
    py: Python<'_>,
    circuit: &PyCircuit,
    shots: u64,
    seed: u64,
    p1: f64,
    p2: f64,
    p_readout: f64,
) -> PyResult<BTreeMap<String, u64>> {
    let noise = NoiseConfig::new(p1, p2, p_readout).map_err(to_py)?;
    let counts = py
        .detach(|| Simulator::default().run_noisy(&circuit.inner, &noise, shots, seed))
        .map_err(to_py)?;
    Ok(counts.to_bitstrings())
}

#[pyfunction]
fn frqi_ideal_state(pixels: Vec<i64>, rows: usize, cols: usize) -> PyResult<PyStateVector> {
    let img = image(pixels, rows, cols)?;
    Ok(PyStateVector {
        inner: qeb_core::frqi_ideal_state(&img).map_err(to_py)?,
    })
}

#[pyfunction]
fn decode_counts(
    encoding: &str,
    counts: HashMap<String, u64>,
    rows: usize,
    cols: usize,
) -> PyResult<Vec<u32>> {
    let decoded = kind(encoding)?
        .decode_counts(&counts_from(counts)?, rows, cols)
        .map_err(to_py)?;
    Ok(decoded.values.iter().map(|&v| u32::from(v)).collect())
}

#[pyfunction]
fn decode_statevector(
    state: &PyStateVector,
    encoding: &str,
    rows: usize,
    cols: usize,
) -> PyResult<Vec<u32>> {
    let decoded = qeb_core::decode_from_statevector(&state.inner, kind(encoding)?, rows, cols)
        .map_err(to_py)?;
    Ok(decoded.values.iter().map(|&v| u32::from(v)).collect())
}

/// `(precision_pct, mean_error)` of `got` against `expected`.
#[pyfunction]
fn correctness(
    expected: Vec<i64>,
    got: Vec<i64>,
    rows: usize,
    cols: usize,
) -> PyResult<(f64, f64)> {
    let expected = image(expected, rows, cols)?;
    let got = image(got, rows, cols)?;
    let recon = qeb_core::ReconstructedImage {
        rows,
        cols,
        raw_angles: vec![0.0; got.len()],
        unobserved: vec![false; got.len()],
        values: got.pixels().to_vec(),
    };
    let report = qeb_core::correctness(&expected, &recon).map_err(to_py)?;
    Ok((report.precision_pct, report.mean_error))
}

#[pyfunction]
fn hellinger_fidelity(a: HashMap<String, u64>, b: HashMap<String, u64>) -> PyResult<f64> {
    qeb_core::hellinger_fidelity(&counts_from(a)?, &counts_from(b)?).map_err(to_py)
}

#[pyfunction]
fn supermarq(circuit: &PyCircuit) -> BTreeMap<&'static str, f64> {
    let f = metrics::supermarq(&circuit.inner);
    BTreeMap::from([
        ("communication", f.communication),
        ("critical_depth", f.critical_depth),
        ("entanglement_ratio", f.entanglement_ratio),
        ("parallelism", f.parallelism),
        ("liveness", f.liveness),
    ])
}

#[pymodule]
fn qeb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyStateVector>()?;
    m.add_function(wrap_pyfunction!(generate_image, m)?)?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(apply_inversion, m)?)?;
    m.add_function(wrap_pyfunction!(run_statevector, m)?)?;
    m.add_function(wrap_pyfunction!(run_noisy, m)?)?;
    m.add_function(wrap_pyfunction!(frqi_ideal_state, m)?)?;
    m.add_function(wrap_pyfunction!(decode_counts, m)?)?;
    m.add_function(wrap_pyfunction!(decode_statevector, m)?)?;
    m.add_function(wrap_pyfunction!(correctness, m)?)?;
    m.add_function(wrap_pyfunction!(hellinger_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(supermarq, m)?)?;
    Ok(())
}
