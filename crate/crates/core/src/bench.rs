//! Parameter sweeps over encodings, image sizes, backends, shot counts and seeds.
//!
//! A sweep is the Cartesian product `encodings × sizes × backends × shots ×
//! seeds`, iterated in that nesting order. Every cell yields exactly one row;
//! cells that cannot run (for example FRQI on a 3×3 image) become rows whose
//! status is `skipped:<reason>`.
//!
//! Structure columns (`width`, `depth`, `gate_count` and the SupermarQ
//! features) describe the encoding circuit. Simulation runs the encoding
//! circuit followed by the inversion gates when `invert` is set, and the
//! correctness columns compare against the inverted image in that case.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::encode::frqi_shape_issue;
use crate::error::{arg_err, QebError, Result};
use crate::image::GrayImage;
use crate::metrics::{
    circuit_summary, correctness, hellinger_fidelity_to_probs, supermarq, SupermarqFeatures,
};
use crate::pipeline::{apply_inversion, decode_from_statevector, EncodingKind};
use crate::sim::{NoiseConfig, Simulator, DEFAULT_QUBIT_CAP};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "QEB_THREADS";

pub const CSV_HEADER: [&str; 21] = [
    "encoding",
    "rows",
    "cols",
    "backend",
    "shots",
    "seed",
    "status",
    "encode_time_s",
    "simulate_time_s",
    "decode_time_s",
    "width",
    "depth",
    "gate_count",
    "precision_pct",
    "mean_error",
    "hellinger_fidelity",
    "communication",
    "critical_depth",
    "entanglement",
    "parallelism",
    "liveness",
];

/// Timing keys, which are the only fields allowed to differ between equal runs.
pub const TIMING_FIELDS: [&str; 4] = [
    "encode_time_s",
    "simulate_time_s",
    "decode_time_s",
    "total_time_s",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Backend {
    /// Exact probabilities, no sampling.
    #[serde(rename = "statevec")]
    StateVec,
    /// Noiseless multinomial sampling.
    #[serde(rename = "pure")]
    PureShots,
    /// Monte-Carlo trajectories under the configured noise.
    #[serde(rename = "noisy")]
    NoisyShots,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::StateVec => "statevec",
            Backend::PureShots => "pure",
            Backend::NoisyShots => "noisy",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = QebError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "statevec" | "statevector" => Ok(Backend::StateVec),
            "pure" | "shots" | "pure_shots" => Ok(Backend::PureShots),
            "noisy" | "noisy_shots" => Ok(Backend::NoisyShots),
            other => arg_err(format!("unknown backend {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = QebError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => arg_err(format!("unknown report format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ImageSize {
    pub rows: usize,
    pub cols: usize,
}

impl ImageSize {
    pub fn square(n: usize) -> Self {
        Self { rows: n, cols: n }
    }
}

impl<'de> Deserialize<'de> for ImageSize {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Side(usize),
            Pair([usize; 2]),
        }
        Ok(match Raw::deserialize(deserializer)? {
            Raw::Side(n) => ImageSize::square(n),
            Raw::Pair([rows, cols]) => ImageSize { rows, cols },
        })
    }
}

impl FromStr for ImageSize {
    type Err = QebError;

    /// `4` or `3x5`.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| QebError::Argument(format!("bad size {s:?}")))
        };
        match s.split_once(['x', 'X']) {
            Some((r, c)) => Ok(ImageSize {
                rows: parse(r)?,
                cols: parse(c)?,
            }),
            None => Ok(ImageSize::square(parse(s)?)),
        }
    }
}

fn default_encodings() -> Vec<EncodingKind> {
    EncodingKind::ALL.to_vec()
}

fn default_backends() -> Vec<Backend> {
    vec![Backend::StateVec]
}

fn default_shots() -> Vec<u64> {
    vec![10_000]
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_true() -> bool {
    true
}

/// Sweep definition, read from a flat TOML document.
///
/// ```toml
/// encodings = ["ql", "phase", "frqi"]
/// sizes = [2, 3, 4, [2, 8]]
/// backends = ["statevec", "pure", "noisy"]
/// shots = [10000]
/// seeds = [0, 1, 2]
/// invert = true
/// p1 = 0.001
/// p2 = 0.01
/// p_readout = 0.01
/// output = "results.csv"
/// format = "csv"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_encodings")]
    pub encodings: Vec<EncodingKind>,
    pub sizes: Vec<ImageSize>,
    #[serde(default = "default_backends")]
    pub backends: Vec<Backend>,
    #[serde(default = "default_shots")]
    pub shots: Vec<u64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_true")]
    pub invert: bool,
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
    #[serde(default)]
    pub p_readout: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
}

impl ExperimentConfig {
    pub fn new(sizes: Vec<ImageSize>) -> Self {
        Self {
            encodings: default_encodings(),
            sizes,
            backends: default_backends(),
            shots: default_shots(),
            seeds: default_seeds(),
            invert: true,
            p1: 0.0,
            p2: 0.0,
            p_readout: 0.0,
            output: None,
            format: ReportFormat::Csv,
        }
    }

    pub fn noise(&self) -> NoiseConfig {
        NoiseConfig {
            p1: self.p1,
            p2: self.p2,
            p_readout: self.p_readout,
        }
    }

    pub fn set_noise(&mut self, noise: NoiseConfig) {
        self.p1 = noise.p1;
        self.p2 = noise.p2;
        self.p_readout = noise.p_readout;
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| QebError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let config_err = |m: &str| Err(QebError::Config(m.to_string()));
        if self.encodings.is_empty() || self.sizes.is_empty() || self.backends.is_empty() {
            return config_err("encodings, sizes and backends must be non-empty");
        }
        if self.shots.is_empty() || self.seeds.is_empty() {
            return config_err("shots and seeds must be non-empty");
        }
        if self.shots.contains(&0) {
            return config_err("shots entries must be at least 1");
        }
        if self.sizes.iter().any(|s| s.rows == 0 || s.cols == 0) {
            return config_err("image sizes must be positive");
        }
        self.noise()
            .validate()
            .map_err(|e| QebError::Config(e.to_string()))
    }

    /// Number of rows a full sweep produces.
    pub fn cell_count(&self) -> usize {
        self.encodings.len()
            * self.sizes.len()
            * self.backends.len()
            * self.shots.len()
            * self.seeds.len()
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::with_capacity(self.cell_count());
        for &encoding in &self.encodings {
            for &size in &self.sizes {
                for &backend in &self.backends {
                    for &shots in &self.shots {
                        for &seed in &self.seeds {
                            cells.push(Cell {
                                encoding,
                                size,
                                backend,
                                shots,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub encoding: EncodingKind,
    pub size: ImageSize,
    pub backend: Backend,
    pub shots: u64,
    pub seed: u64,
}

/// One report row. Metric fields are `None` for skipped cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub encoding: EncodingKind,
    pub rows: usize,
    pub cols: usize,
    pub backend: Backend,
    pub shots: u64,
    pub seed: u64,
    pub status: String,
    pub encode_time_s: Option<f64>,
    pub simulate_time_s: Option<f64>,
    pub decode_time_s: Option<f64>,
    pub width: Option<usize>,
    pub depth: Option<usize>,
    pub gate_count: Option<usize>,
    pub precision_pct: Option<f64>,
    pub mean_error: Option<f64>,
    pub hellinger_fidelity: Option<f64>,
    pub communication: Option<f64>,
    pub critical_depth: Option<f64>,
    pub entanglement: Option<f64>,
    pub parallelism: Option<f64>,
    pub liveness: Option<f64>,
    pub total_time_s: Option<f64>,
}

impl ExperimentRecord {
    fn skipped(cell: &Cell, reason: &str) -> Self {
        Self {
            encoding: cell.encoding,
            rows: cell.size.rows,
            cols: cell.size.cols,
            backend: cell.backend,
            shots: cell.shots,
            seed: cell.seed,
            status: format!("skipped:{reason}"),
            encode_time_s: None,
            simulate_time_s: None,
            decode_time_s: None,
            width: None,
            depth: None,
            gate_count: None,
            precision_pct: None,
            mean_error: None,
            hellinger_fidelity: None,
            communication: None,
            critical_depth: None,
            entanglement: None,
            parallelism: None,
            liveness: None,
            total_time_s: None,
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.status.starts_with("skipped:")
    }

    pub fn supermarq(&self) -> Option<SupermarqFeatures> {
        Some(SupermarqFeatures {
            communication: self.communication?,
            critical_depth: self.critical_depth?,
            entanglement_ratio: self.entanglement?,
            parallelism: self.parallelism?,
            liveness: self.liveness?,
        })
    }

    fn csv_fields(&self) -> Vec<String> {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|v| v.to_string()).unwrap_or_default()
        }
        vec![
            self.encoding.to_string(),
            self.rows.to_string(),
            self.cols.to_string(),
            self.backend.to_string(),
            self.shots.to_string(),
            self.seed.to_string(),
            self.status.clone(),
            opt(self.encode_time_s),
            opt(self.simulate_time_s),
            opt(self.decode_time_s),
            opt(self.width),
            opt(self.depth),
            opt(self.gate_count),
            opt(self.precision_pct),
            opt(self.mean_error),
            opt(self.hellinger_fidelity),
            opt(self.communication),
            opt(self.critical_depth),
            opt(self.entanglement),
            opt(self.parallelism),
            opt(self.liveness),
        ]
    }
}

/// Random test image; identical for identical `(rows, cols, seed)`.
pub fn generate_image(rows: usize, cols: usize, seed: u64) -> Result<GrayImage> {
    GrayImage::random(rows, cols, seed)
}

/// Seed for shot sampling, decorrelated from the image seed.
fn sampling_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0x5DEE_CE66_D1CE_4E5B
}

/// Reason a cell cannot run, if any.
pub fn skip_reason(encoding: EncodingKind, size: ImageSize) -> Option<String> {
    match encoding {
        EncodingKind::Frqi => frqi_shape_issue(size.rows, size.cols).map(str::to_string),
        _ if size.rows * size.cols > DEFAULT_QUBIT_CAP => Some(format!(
            "width {} exceeds simulation cap {DEFAULT_QUBIT_CAP}",
            size.rows * size.cols
        )),
        _ => None,
    }
}

pub fn run_cell(cell: &Cell, invert: bool, noise: &NoiseConfig) -> Result<ExperimentRecord> {
    if let Some(reason) = skip_reason(cell.encoding, cell.size) {
        return Ok(ExperimentRecord::skipped(cell, &reason));
    }
    let ImageSize { rows, cols } = cell.size;
    let image = generate_image(rows, cols, cell.seed)?;
    let sim = Simulator::default();

    let start = Instant::now();
    let circuit = cell.encoding.encode(&image)?;
    let encode_time = start.elapsed().as_secs_f64();

    let summary = circuit_summary(&circuit);
    let features = supermarq(&circuit);
    let (run_circuit, expected) = if invert {
        (apply_inversion(&circuit, cell.encoding)?, image.inverted())
    } else {
        (circuit, image)
    };

    let start = Instant::now();
    let (outcome, fidelity, simulate_time, decode_time) = match cell.backend {
        Backend::StateVec => {
            let state = sim.run_statevector(&run_circuit)?;
            let simulate_time = start.elapsed().as_secs_f64();
            let start = Instant::now();
            let decoded = decode_from_statevector(&state, cell.encoding, rows, cols)?;
            // exact probabilities compared with themselves
            (decoded, 1.0, simulate_time, start.elapsed().as_secs_f64())
        }
        Backend::PureShots | Backend::NoisyShots => {
            let seed = sampling_seed(cell.seed);
            let (counts, ideal) = if cell.backend == Backend::PureShots {
                let state = sim.run_statevector(&run_circuit)?;
                (state.sample_counts(cell.shots, seed)?, state)
            } else {
                let counts = sim.run_noisy(&run_circuit, noise, cell.shots, seed)?;
                (counts, sim.run_statevector(&run_circuit)?)
            };
            let simulate_time = start.elapsed().as_secs_f64();
            let start = Instant::now();
            let decoded = cell.encoding.decode_counts(&counts, rows, cols)?;
            let decode_time = start.elapsed().as_secs_f64();
            let fidelity = hellinger_fidelity_to_probs(&counts, &ideal.probabilities())?;
            (decoded, fidelity, simulate_time, decode_time)
        }
    };
    let report = correctness(&expected, &outcome)?;

    Ok(ExperimentRecord {
        encoding: cell.encoding,
        rows,
        cols,
        backend: cell.backend,
        shots: cell.shots,
        seed: cell.seed,
        status: "ok".to_string(),
        encode_time_s: Some(encode_time),
        simulate_time_s: Some(simulate_time),
        decode_time_s: Some(decode_time),
        width: Some(summary.width),
        depth: Some(summary.depth),
        gate_count: Some(summary.gate_count),
        precision_pct: Some(report.precision_pct),
        mean_error: Some(report.mean_error),
        hellinger_fidelity: Some(fidelity),
        communication: Some(features.communication),
        critical_depth: Some(features.critical_depth),
        entanglement: Some(features.entanglement_ratio),
        parallelism: Some(features.parallelism),
        liveness: Some(features.liveness),
        total_time_s: Some(encode_time + simulate_time + decode_time),
    })
}

/// Worker count from `QEB_THREADS`, if set to a positive integer.
pub fn thread_limit() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

/// Runs the whole sweep, handing finished rows to `sink` in sweep order.
///
/// Cells are evaluated in parallel batches; each batch is flushed to the sink
/// before the next starts so that an interrupted run keeps its prefix.
pub fn run_experiment_with<F>(
    config: &ExperimentConfig,
    mut sink: F,
) -> Result<Vec<ExperimentRecord>>
where
    F: FnMut(&[ExperimentRecord]) -> Result<()>,
{
    config.validate()?;
    let noise = config.noise();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_limit() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| QebError::Resource(e.to_string()))?;
    let batch = pool.current_num_threads().max(1);
    let cells = config.cells();
    let mut records = Vec::with_capacity(cells.len());
    for chunk in cells.chunks(batch) {
        let done: Vec<ExperimentRecord> = pool.install(|| {
            chunk
                .par_iter()
                .map(|cell| run_cell(cell, config.invert, &noise))
                .collect::<Result<_>>()
        })?;
        sink(&done)?;
        records.extend(done);
    }
    Ok(records)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    run_experiment_with(config, |_| Ok(()))
}

/// Streams records to a CSV or JSON file.
pub struct ReportWriter {
    out: BufWriter<File>,
    format: ReportFormat,
    written: usize,
}

impl ReportWriter {
    pub fn create(path: impl AsRef<Path>, format: ReportFormat) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        match format {
            ReportFormat::Csv => writeln!(out, "{}", CSV_HEADER.join(","))?,
            ReportFormat::Json => write!(out, "[")?,
        }
        out.flush()?;
        Ok(Self {
            out,
            format,
            written: 0,
        })
    }

    pub fn write(&mut self, records: &[ExperimentRecord]) -> Result<()> {
        for record in records {
            match self.format {
                ReportFormat::Csv => {
                    let mut w = csv::WriterBuilder::new()
                        .has_headers(false)
                        .from_writer(Vec::new());
                    w.write_record(record.csv_fields())?;
                    let line = w.into_inner().map_err(|e| QebError::Io(e.into_error()))?;
                    self.out.write_all(&line)?;
                }
                ReportFormat::Json => {
                    if self.written > 0 {
                        write!(self.out, ",")?;
                    }
                    write!(self.out, "\n  {}", serde_json::to_string(record)?)?;
                }
            }
            self.written += 1;
        }
        self.out.flush()?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        if self.format == ReportFormat::Json {
            writeln!(self.out, "\n]")?;
        }
        self.out.flush()?;
        Ok(())
    }
}

pub fn emit_report(
    records: &[ExperimentRecord],
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    if records.is_empty() {
        return arg_err("no records to report");
    }
    let mut writer = ReportWriter::create(path, format)?;
    writer.write(records)?;
    writer.finish()
}

/// Gnuplot script plotting encode time, depth and width against pixel count
/// from a CSV report.
pub fn gnuplot_script(csv_path: &Path) -> String {
    let data = csv_path.display();
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead\nset key left top\n");
    s.push_str("set xlabel 'pixels'\nset logscale x 2\nset terminal pngcairo size 900,600\n");
    for (file, col, label) in [
        ("encode_time.png", 8, "encode time (s)"),
        ("depth.png", 12, "circuit depth"),
        ("width.png", 11, "circuit width"),
    ] {
        s.push_str(&format!("set output '{file}'\nset ylabel '{label}'\n"));
        s.push_str(&format!(
            "plot for [e in \"ql phase frqi\"] '{data}' using (strcol(1) eq e && strcol(7) eq 'ok' ? $2*$3 : 1/0):{col} with linespoints title e\n"
        ));
    }
    s.push_str("set output 'shots.png'\nset xlabel 'shots'\nset ylabel 'mean error'\n");
    s.push_str(&format!(
        "plot '{data}' using (strcol(1) eq 'frqi' && strcol(7) eq 'ok' ? $5 : 1/0):15 with points title 'frqi'\n"
    ));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_parsing() {
        assert_eq!("4".parse::<ImageSize>().unwrap(), ImageSize::square(4));
        assert_eq!(
            "3x5".parse::<ImageSize>().unwrap(),
            ImageSize { rows: 3, cols: 5 }
        );
        assert!("3y5".parse::<ImageSize>().is_err());
    }

    #[test]
    fn config_toml() {
        let cfg = ExperimentConfig::from_toml_str(
            "encodings = [\"ql\", \"frqi\"]\nsizes = [2, [2, 4]]\nbackends = [\"pure\"]\nshots = [10, 20]\np1 = 0.1\n",
        )
        .unwrap();
        assert_eq!(
            cfg.sizes,
            vec![ImageSize::square(2), ImageSize { rows: 2, cols: 4 }]
        );
        assert_eq!(cfg.noise().p1, 0.1);
        assert_eq!(cfg.cell_count(), 2 * 2 * 1 * 2 * 1);
        assert!(cfg.invert);
        assert!(ExperimentConfig::from_toml_str("sizes = [2]\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::from_toml_str("sizes = [2]\nshots = [0]\n").is_err());
        assert!(ExperimentConfig::from_toml_str("sizes = [2]\np2 = 2.0\n").is_err());
        assert!(ExperimentConfig::from_toml_str("sizes = []\n").is_err());
        assert!(matches!(
            ExperimentConfig::from_toml_str("sizes = [2"),
            Err(QebError::Config(_))
        ));
    }

    #[test]
    fn skip_reasons() {
        assert_eq!(
            skip_reason(EncodingKind::Frqi, ImageSize::square(3)).as_deref(),
            Some("non-power-of-two side")
        );
        assert_eq!(
            skip_reason(EncodingKind::Frqi, ImageSize { rows: 2, cols: 4 }).as_deref(),
            Some("non-square image")
        );
        assert!(skip_reason(EncodingKind::QubitLattice, ImageSize::square(6)).is_some());
        assert!(skip_reason(EncodingKind::PhaseEncoding, ImageSize::square(5)).is_none());
    }

    #[test]
    fn csv_row_shape() {
        let cell = Cell {
            encoding: EncodingKind::Frqi,
            size: ImageSize::square(3),
            backend: Backend::StateVec,
            shots: 5,
            seed: 1,
        };
        let row = ExperimentRecord::skipped(&cell, "non-power-of-two side").csv_fields();
        assert_eq!(row.len(), CSV_HEADER.len());
        assert_eq!(row[6], "skipped:non-power-of-two side");
    }
}
