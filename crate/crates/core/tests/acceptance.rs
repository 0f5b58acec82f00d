//! Acceptance gate. Every criterion runs in sequence inside one test so the
//! runtime budgets are not distorted by parallel test threads, and each prints
//! a single PASS/FAIL line. Run with `--nocapture` to see the lines.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use qeb_core::bench::{run_cell, run_experiment_with, Cell, ReportWriter, TIMING_FIELDS};
use qeb_core::metrics::hellinger_fidelity_to_probs;
use qeb_core::{
    apply_inversion, decode_from_statevector, encode_frqi, frqi_ideal_state, generate_image,
    hellinger_fidelity, run_statevector, supermarq, Backend, Circuit, Counts, EncodingKind,
    ExperimentConfig, GateOp, ImageSize, NoiseConfig, ReportFormat, SupermarqFeatures,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const LATTICE_SIDES: [usize; 4] = [2, 3, 4, 5];
const FRQI_SIDES: [usize; 4] = [2, 4, 8, 16];

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, budget_s: f64, what: &str) -> Result<(), String> {
    ensure(
        elapsed.as_secs_f64() < budget_s,
        format!(
            "{what} took {:.3}s, budget {budget_s}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn square_cell(encoding: EncodingKind, n: usize, backend: Backend, shots: u64, seed: u64) -> Cell {
    Cell {
        encoding,
        size: ImageSize::square(n),
        backend,
        shots,
        seed,
    }
}

fn width_laws() -> Outcome {
    let start = Instant::now();
    for (i, n) in LATTICE_SIDES.into_iter().enumerate() {
        let img = generate_image(n, n, i as u64).map_err(e)?;
        for kind in [EncodingKind::QubitLattice, EncodingKind::PhaseEncoding] {
            let w = kind.encode(&img).map_err(e)?.width();
            ensure(w == [4, 9, 16, 25][i], format!("{kind} {n}x{n} width {w}"))?;
        }
    }
    for (i, n) in FRQI_SIDES.into_iter().enumerate() {
        let w = encode_frqi(&generate_image(n, n, i as u64).map_err(e)?)
            .map_err(e)?
            .width();
        ensure(w == [3, 5, 7, 9][i], format!("frqi {n}x{n} width {w}"))?;
    }
    within(start.elapsed(), 1.0, "width checks")?;
    Ok(format!(
        "QL/Phase {{4,9,16,25}}, FRQI {{3,5,7,9}} in {:.3}s",
        start.elapsed().as_secs_f64()
    ))
}

fn depth_constancy() -> Outcome {
    for n in LATTICE_SIDES {
        for seed in 0..3 {
            let img = generate_image(n, n, seed).map_err(e)?;
            let ql = EncodingKind::QubitLattice.encode(&img).map_err(e)?.depth();
            let ph = EncodingKind::PhaseEncoding.encode(&img).map_err(e)?.depth();
            ensure(
                ql == 1 && ph == 3,
                format!("{n}x{n}: QL depth {ql}, Phase depth {ph}"),
            )?;
        }
    }
    Ok("QL depth 1 and Phase depth 3 for n = 2..5".into())
}

fn exact_round_trip() -> Outcome {
    let start = Instant::now();
    let mut cases = Vec::new();
    for n in LATTICE_SIDES {
        cases.push((EncodingKind::QubitLattice, n));
        cases.push((EncodingKind::PhaseEncoding, n));
    }
    for n in FRQI_SIDES {
        cases.push((EncodingKind::Frqi, n));
    }
    for (kind, n) in &cases {
        let img = generate_image(*n, *n, 1000 + *n as u64).map_err(e)?;
        let circuit = kind.encode(&img).map_err(e)?;
        let plain = decode_from_statevector(&run_statevector(&circuit).map_err(e)?, *kind, *n, *n)
            .map_err(e)?;
        ensure(
            plain.values == img.pixels(),
            format!("{kind} {n}x{n} plain round trip differs"),
        )?;

        let inverted = apply_inversion(&circuit, *kind).map_err(e)?;
        let got = decode_from_statevector(&run_statevector(&inverted).map_err(e)?, *kind, *n, *n)
            .map_err(e)?;
        let worst = img
            .pixels()
            .iter()
            .zip(&got.values)
            .map(|(&p, &g)| (i32::from(255 - p) - i32::from(g)).abs())
            .max();
        ensure(
            worst <= Some(1),
            format!("{kind} {n}x{n} inverted off by {worst:?}"),
        )?;
    }
    within(start.elapsed(), 10.0, "round trips")?;
    Ok(format!(
        "{} encoding/size pairs, plain exact and inverted within 1, {:.2}s",
        cases.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn table_two_by_two() -> Outcome {
    let mut lines = Vec::new();
    for kind in [EncodingKind::QubitLattice, EncodingKind::PhaseEncoding] {
        for seed in 0..10 {
            let r = run_cell(
                &square_cell(kind, 2, Backend::StateVec, 1, seed),
                true,
                &NoiseConfig::default(),
            )
            .map_err(e)?;
            ensure(
                r.precision_pct == Some(100.0) && r.mean_error == Some(0.0),
                format!(
                    "{kind} statevec seed {seed}: {:?} / {:?}",
                    r.precision_pct, r.mean_error
                ),
            )?;
        }
        let mut precisions = Vec::new();
        for seed in 0..10 {
            let r = run_cell(
                &square_cell(kind, 2, Backend::PureShots, 100_000, seed),
                true,
                &NoiseConfig::default(),
            )
            .map_err(e)?;
            precisions.push(r.precision_pct.unwrap());
        }
        let mean = precisions.iter().sum::<f64>() / precisions.len() as f64;
        ensure(
            mean >= 75.0,
            format!("{kind} 10^5-shot mean precision {mean:.2}%"),
        )?;
        lines.push(format!("{kind} statevec 100%/0.00, 10^5 shots {mean:.2}%"));
    }
    Ok(lines.join("; "))
}

fn frqi_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 1.0f64;
    for n in [2, 4] {
        for seed in 0..50 {
            let img = generate_image(n, n, 7000 + seed).map_err(e)?;
            let ideal = frqi_ideal_state(&img).map_err(e)?;
            let sim = run_statevector(&encode_frqi(&img).map_err(e)?).map_err(e)?;
            let overlap = ideal.overlap(&sim).map_err(e)?;
            worst = worst.min(overlap);
            ensure(
                overlap >= 1.0 - 1e-9,
                format!("{n}x{n} seed {seed}: overlap {overlap}"),
            )?;
        }
    }
    within(start.elapsed(), 5.0, "oracle comparison")?;
    Ok(format!(
        "100 images, min overlap {worst:.15}, {:.3}s",
        start.elapsed().as_secs_f64()
    ))
}

fn shots_trend() -> Outcome {
    let mean_error = |shots: u64| -> Result<f64, String> {
        let mut total = 0.0;
        for seed in 0..10 {
            let r = run_cell(
                &square_cell(EncodingKind::Frqi, 16, Backend::PureShots, shots, seed),
                true,
                &NoiseConfig::default(),
            )
            .map_err(e)?;
            total += r.mean_error.unwrap();
        }
        Ok(total / 10.0)
    };
    let low = mean_error(100)?;
    let high = mean_error(100_000)?;
    ensure(
        high < low,
        format!("mean error {high} at 10^5 shots vs {low} at 10^2"),
    )?;
    Ok(format!(
        "FRQI 16x16 mean error {low:.4} at 10^2 shots > {high:.4} at 10^5"
    ))
}

fn hellinger_sanity() -> Outcome {
    let counts = Counts::from_bitstrings([("00", 412u64), ("01", 100), ("11", 488)]).map_err(e)?;
    let same = hellinger_fidelity(&counts, &counts.clone()).map_err(e)?;
    ensure(same == 1.0, format!("identical counts gave {same}"))?;
    let other = Counts::from_bitstrings([("10", 7u64)]).map_err(e)?;
    let disjoint = hellinger_fidelity(&counts, &other).map_err(e)?;
    ensure(
        disjoint == 0.0,
        format!("disjoint supports gave {disjoint}"),
    )?;

    let mut worst = 1.0f64;
    for seed in 0..10 {
        let img = generate_image(2, 2, seed).map_err(e)?;
        let state =
            run_statevector(&EncodingKind::QubitLattice.encode(&img).map_err(e)?).map_err(e)?;
        let sampled = state.sample_counts(100_000, seed).map_err(e)?;
        let f = hellinger_fidelity_to_probs(&sampled, &state.probabilities()).map_err(e)?;
        worst = worst.min(f);
        ensure(f >= 0.99, format!("QL 2x2 seed {seed}: fidelity {f}"))?;
    }
    Ok(format!(
        "identical 1.0, disjoint 0.0, QL 2x2 10^5-shot min fidelity {worst:.6}"
    ))
}

fn features_close(f: &SupermarqFeatures, want: [f64; 5]) -> bool {
    f.as_array()
        .iter()
        .zip(want)
        .all(|(a, b)| (a - b).abs() < 1e-12)
}

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let width = rng.random_range(1..=8usize);
    let mut c = Circuit::new(width).unwrap();
    for _ in 0..rng.random_range(0..40usize) {
        let q = rng.random_range(0..width);
        let theta = rng.random_range(-7.0..7.0);
        let op = match rng.random_range(0..9u32) {
            0 => GateOp::h(q),
            1 => GateOp::x(q),
            2 => GateOp::z(q),
            3 => GateOp::ry(theta, q),
            4 => GateOp::rz(theta, q),
            5 if width > 1 => GateOp::cx(q, (q + rng.random_range(1..width)) % width),
            6 if width > 1 => {
                let mut qs: Vec<usize> = (0..width).collect();
                let k = rng.random_range(2..=width);
                for i in 0..k {
                    let j = rng.random_range(i..width);
                    qs.swap(i, j);
                }
                let (target, controls) = qs[..k].split_first().unwrap();
                if rng.random_bool(0.5) {
                    GateOp::mcx(controls, *target)
                } else {
                    GateOp::mcry(theta, controls, *target)
                }
            }
            7 => GateOp::barrier((0..width).filter(|&p| p == q || rng.random_bool(0.5))),
            _ => GateOp::ry(theta, q),
        };
        c.append(op).unwrap();
    }
    c
}

fn supermarq_closed_forms() -> Outcome {
    for n in LATTICE_SIDES {
        let img = generate_image(n, n, 3).map_err(e)?;
        for kind in [EncodingKind::QubitLattice, EncodingKind::PhaseEncoding] {
            let f = supermarq(&kind.encode(&img).map_err(e)?);
            ensure(
                features_close(&f, [0.0, 0.0, 0.0, 1.0, 1.0]),
                format!("{kind} {n}x{n}: {:?}", f.as_array()),
            )?;
        }
    }
    let mut bell = Circuit::new(2).map_err(e)?;
    bell.append(GateOp::h(0))
        .map_err(e)?
        .append(GateOp::cx(0, 1))
        .map_err(e)?;
    let f = supermarq(&bell);
    ensure(
        features_close(&f, [1.0, 1.0, 0.5, 0.0, 0.75]),
        format!("Bell: {:?}", f.as_array()),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..200 {
        let c = random_circuit(&mut rng);
        let f = supermarq(&c);
        ensure(
            f.as_array().iter().all(|v| (0.0..=1.0).contains(v)),
            format!("random circuit {i}: {:?}", f.as_array()),
        )?;
    }

    let frqi = supermarq(&encode_frqi(&generate_image(16, 16, 3).map_err(e)?).map_err(e)?);
    let lattice = supermarq(
        &EncodingKind::QubitLattice
            .encode(&generate_image(5, 5, 3).map_err(e)?)
            .map_err(e)?,
    );
    let phase = supermarq(
        &EncodingKind::PhaseEncoding
            .encode(&generate_image(5, 5, 3).map_err(e)?)
            .map_err(e)?,
    );
    for other in [&lattice, &phase] {
        ensure(
            frqi.entanglement_ratio > other.entanglement_ratio
                && frqi.critical_depth > other.critical_depth
                && frqi.communication > other.communication
                && frqi.parallelism < other.parallelism
                && frqi.liveness < other.liveness,
            format!("FRQI {:?} vs {:?}", frqi.as_array(), other.as_array()),
        )?;
    }
    let a = frqi.as_array();
    Ok(format!(
        "QL/Phase (0,0,0,1,1), Bell (1,1,0.5,0,0.75), 200 random in [0,1], FRQI 16x16 C={:.4} D={:.4} E={:.4} P={:.4} L={:.4}",
        a[0], a[1], a[2], a[3], a[4]
    ))
}

fn noise_direction() -> Outcome {
    let noise = NoiseConfig::new(0.01, 0.01, 0.01).map_err(e)?;
    let (mut clean, mut noisy) = (0.0, 0.0);
    for seed in 0..20 {
        let pure = run_cell(
            &square_cell(
                EncodingKind::QubitLattice,
                2,
                Backend::PureShots,
                10_000,
                seed,
            ),
            true,
            &noise,
        )
        .map_err(e)?;
        let dirty = run_cell(
            &square_cell(
                EncodingKind::QubitLattice,
                2,
                Backend::NoisyShots,
                10_000,
                seed,
            ),
            true,
            &noise,
        )
        .map_err(e)?;
        clean += pure.mean_error.unwrap() / 20.0;
        noisy += dirty.mean_error.unwrap() / 20.0;
    }
    ensure(noisy > clean, format!("noisy {noisy} vs noiseless {clean}"))?;
    Ok(format!(
        "QL 2x2 mean error noisy {noisy:.5} > noiseless {clean:.5}"
    ))
}

/// Report text with every timing column blanked.
fn strip_timing(text: &str, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut lines = text.lines();
            let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
            let timing: Vec<usize> = header
                .iter()
                .enumerate()
                .filter(|(_, h)| TIMING_FIELDS.contains(h))
                .map(|(i, _)| i)
                .collect();
            let mut out = header.join(",");
            for line in lines {
                let cells: Vec<&str> = line
                    .split(',')
                    .enumerate()
                    .map(|(i, c)| if timing.contains(&i) { "" } else { c })
                    .collect();
                out.push('\n');
                out.push_str(&cells.join(","));
            }
            out
        }
        ReportFormat::Json => {
            let mut rows: Vec<BTreeMap<String, serde_json::Value>> =
                serde_json::from_str(text).unwrap();
            for row in &mut rows {
                for field in TIMING_FIELDS {
                    row.remove(field);
                }
            }
            serde_json::to_string(&rows).unwrap()
        }
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let mut config = ExperimentConfig::new(vec![
        ImageSize::square(2),
        ImageSize::square(3),
        ImageSize::square(4),
    ]);
    config.backends = vec![Backend::StateVec, Backend::PureShots, Backend::NoisyShots];
    config.shots = vec![100, 1000];
    config.seeds = vec![1, 2];
    config.set_noise(NoiseConfig::new(0.01, 0.01, 0.01).map_err(e)?);
    let mut rows = 0;
    for format in [ReportFormat::Csv, ReportFormat::Json] {
        let mut texts = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("run{run}.{format:?}"));
            let mut writer = ReportWriter::create(&path, format).map_err(e)?;
            rows = run_experiment_with(&config, |batch| writer.write(batch))
                .map_err(e)?
                .len();
            writer.finish().map_err(e)?;
            texts.push(strip_timing(
                &std::fs::read_to_string(&path).map_err(e)?,
                format,
            ));
        }
        ensure(
            texts[0] == texts[1],
            format!("{format:?} reports differ outside timing columns"),
        )?;
    }
    Ok(format!(
        "two sweeps of {rows} rows identical modulo timing (CSV and JSON)"
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("width laws", width_laws),
        ("depth constancy", depth_constancy),
        ("exact round trip", exact_round_trip),
        ("2x2 correctness row", table_two_by_two),
        ("FRQI oracle equivalence", frqi_oracle_equivalence),
        ("shots vs accuracy", shots_trend),
        ("Hellinger sanity", hellinger_sanity),
        ("SupermarQ closed forms", supermarq_closed_forms),
        ("noise direction", noise_direction),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", i + 1),
            Err(why) => {
                println!("FAIL [{:>2}] {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
