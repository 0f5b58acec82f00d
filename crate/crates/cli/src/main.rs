use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use qeb_core::bench::{gnuplot_script, run_experiment_with, ReportWriter};
use qeb_core::{
    apply_inversion, circuit_summary, correctness, decode_from_statevector, generate_image,
    supermarq, Backend, EncodingKind, ExperimentConfig, GrayImage, ImageSize, NoiseConfig,
    QebError, ReportFormat, Simulator,
};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "qeb", version, about = "Quantum image encoding benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode one image and print the circuit summary
    Encode(EncodeArgs),
    /// Encode, optionally invert, simulate and decode one image
    Roundtrip(RoundtripArgs),
    /// Run a full sweep described by a config file
    Bench(BenchArgs),
    /// SupermarQ features and circuit summary for an encoding
    Metrics(MetricsArgs),
    /// Write a random grayscale image
    Gen(GenArgs),
}

#[derive(Args)]
struct ImageArgs {
    /// Square side `n` or `RxC`
    #[arg(long, default_value = "2")]
    size: ImageSize,
    /// Seed for the random image
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Read the image from a PGM or CSV file instead of generating it
    #[arg(long)]
    image: Option<PathBuf>,
}

impl ImageArgs {
    fn load(&self) -> anyhow::Result<GrayImage> {
        match &self.image {
            Some(path) => {
                GrayImage::load(path).with_context(|| format!("reading {}", path.display()))
            }
            None => Ok(generate_image(self.size.rows, self.size.cols, self.seed)?),
        }
    }
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    encoding: EncodingKind,
    #[command(flatten)]
    image: ImageArgs,
    /// Print one line per gate
    #[arg(long)]
    dump_circuit: bool,
    /// Write the final statevector as JSON
    #[arg(long)]
    dump_state: Option<PathBuf>,
}

#[derive(Args)]
struct RoundtripArgs {
    #[arg(long)]
    encoding: EncodingKind,
    #[command(flatten)]
    image: ImageArgs,
    #[arg(long, default_value = "statevec")]
    backend: Backend,
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    /// Apply the pixel inversion before measuring
    #[arg(long)]
    invert: bool,
    #[arg(long, default_value_t = 0.0)]
    p1: f64,
    #[arg(long, default_value_t = 0.0)]
    p2: f64,
    #[arg(long, default_value_t = 0.0)]
    p_readout: f64,
    /// Write the reconstructed image (PGM or CSV by extension)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output` from the config
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides `format` from the config
    #[arg(long)]
    format: Option<ReportFormat>,
    /// Overrides `seeds` from the config
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Overrides `shots` from the config
    #[arg(long, value_delimiter = ',')]
    shots: Option<Vec<u64>>,
    /// Also write a gnuplot script next to a CSV report
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    encoding: EncodingKind,
    #[command(flatten)]
    image: ImageArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "4")]
    size: ImageSize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; `.pgm` or `.csv`
    #[arg(long)]
    out: PathBuf,
}

fn summary_json(
    encoding: EncodingKind,
    image: &GrayImage,
    circuit: &qeb_core::Circuit,
) -> Map<String, Value> {
    let s = circuit_summary(circuit);
    let mut obj = Map::new();
    obj.insert("encoding".into(), json!(encoding.as_str()));
    obj.insert("rows".into(), json!(image.rows()));
    obj.insert("cols".into(), json!(image.cols()));
    obj.insert("width".into(), json!(s.width));
    obj.insert("depth".into(), json!(s.depth));
    obj.insert("gate_count".into(), json!(s.gate_count));
    obj.insert(
        "multiqubit_gate_count".into(),
        json!(s.multiqubit_gate_count),
    );
    obj
}

fn encode(args: EncodeArgs) -> anyhow::Result<()> {
    let image = args.image.load()?;
    let circuit = args.encoding.encode(&image)?;
    if args.dump_circuit {
        print!("{circuit}");
    }
    println!(
        "{}",
        Value::Object(summary_json(args.encoding, &image, &circuit))
    );
    if let Some(path) = args.dump_state {
        let state = Simulator::default().run_statevector(&circuit)?;
        let amps: Vec<[f64; 2]> = state.amplitudes().iter().map(|a| [a.re, a.im]).collect();
        let doc = json!({ "num_qubits": state.num_qubits(), "amplitudes": amps });
        std::fs::write(&path, doc.to_string())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn roundtrip(args: RoundtripArgs) -> anyhow::Result<()> {
    let image = args.image.load()?;
    let (rows, cols) = (image.rows(), image.cols());
    let mut circuit = args.encoding.encode(&image)?;
    let expected = if args.invert {
        circuit = apply_inversion(&circuit, args.encoding)?;
        image.inverted()
    } else {
        image.clone()
    };
    let sim = Simulator::default();
    let seed = args.image.seed;
    let decoded = match args.backend {
        Backend::StateVec => {
            decode_from_statevector(&sim.run_statevector(&circuit)?, args.encoding, rows, cols)?
        }
        Backend::PureShots => {
            let counts = sim
                .run_statevector(&circuit)?
                .sample_counts(args.shots, seed)?;
            args.encoding.decode_counts(&counts, rows, cols)?
        }
        Backend::NoisyShots => {
            let noise = NoiseConfig::new(args.p1, args.p2, args.p_readout)?;
            let counts = sim.run_noisy(&circuit, &noise, args.shots, seed)?;
            args.encoding.decode_counts(&counts, rows, cols)?
        }
    };
    let report = correctness(&expected, &decoded)?;
    println!("encoding: {}", args.encoding);
    println!("size: {rows}x{cols}");
    println!("backend: {}", args.backend);
    println!("precision_pct: {:.2}", report.precision_pct);
    println!("mean_error: {:.6}", report.mean_error);
    println!("unobserved_pixels: {}", decoded.unobserved_count());
    if let Some(out) = args.out {
        decoded.to_image().save(&out)?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(output) = args.output {
        config.output = Some(output);
    }
    if let Some(format) = args.format {
        config.format = format;
    }
    if let Some(seeds) = args.seeds {
        config.seeds = seeds;
    }
    if let Some(shots) = args.shots {
        config.shots = shots;
    }
    config.validate()?;
    let output = match &config.output {
        Some(p) => p.clone(),
        None => PathBuf::from(match config.format {
            ReportFormat::Csv => "qeb_results.csv",
            ReportFormat::Json => "qeb_results.json",
        }),
    };
    let mut writer = ReportWriter::create(&output, config.format)?;
    let records = run_experiment_with(&config, |batch| writer.write(batch))?;
    writer.finish()?;
    let skipped = records.iter().filter(|r| r.is_skipped()).count();
    eprintln!(
        "wrote {} rows ({skipped} skipped) to {}",
        records.len(),
        output.display()
    );
    if args.gnuplot {
        if config.format != ReportFormat::Csv {
            bail!("--gnuplot needs a CSV report");
        }
        let script = output.with_extension("gp");
        std::fs::write(&script, gnuplot_script(Path::new(&output)))?;
        eprintln!("wrote {}", script.display());
    }
    Ok(())
}

fn metrics(args: MetricsArgs) -> anyhow::Result<()> {
    let image = args.image.load()?;
    let circuit = args.encoding.encode(&image)?;
    let mut obj = summary_json(args.encoding, &image, &circuit);
    let f = supermarq(&circuit);
    obj.insert("communication".into(), json!(f.communication));
    obj.insert("critical_depth".into(), json!(f.critical_depth));
    obj.insert("entanglement_ratio".into(), json!(f.entanglement_ratio));
    obj.insert("parallelism".into(), json!(f.parallelism));
    obj.insert("liveness".into(), json!(f.liveness));
    println!("{}", Value::Object(obj));
    Ok(())
}

fn gen(args: GenArgs) -> anyhow::Result<()> {
    let image = generate_image(args.size.rows, args.size.cols, args.seed)?;
    image
        .save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encode(a) => encode(a),
        Command::Roundtrip(a) => roundtrip(a),
        Command::Bench(a) => bench(a),
        Command::Metrics(a) => metrics(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<QebError>() {
                Some(QebError::Config(_)) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
