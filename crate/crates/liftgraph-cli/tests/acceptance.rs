//! End-to-end acceptance checks for the `liftgraph` binary.
//!
//! Each test invokes the compiled CLI as a subprocess, exactly as a
//! user would, and prints one `criterion NN (...): PASS` line with its
//! runtime against a pinned budget. The determinism criterion is the
//! load-bearing one: repeated `pipeline` invocations with a fixed
//! config must produce byte-identical reports and label maps across
//! at least three runs and two thread settings.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use image::{ImageBuffer, Luma};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liftgraph"))
}

fn run_ok(args: &[&str]) -> Output {
    let output = bin().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "liftgraph {args:?} failed with {:?}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn finish(start: Instant, number: u32, name: &str, budget_seconds: f64) {
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < budget_seconds,
        "criterion {number:02} ({name}) took {elapsed:.2} s, budget {budget_seconds} s"
    );
    println!("criterion {number:02} ({name}): PASS in {elapsed:.2} s (budget {budget_seconds} s)");
}

/// Deterministic pseudo-noise, good enough for test textures.
fn xorshift(state: &mut u64) -> f64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

fn save_gray_png(path: &Path, width: usize, height: usize, values: &[f64]) {
    let raw: Vec<u16> = values
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * 65535.0).round() as u16)
        .collect();
    ImageBuffer::<Luma<u16>, Vec<u16>>::from_raw(width as u32, height as u32, raw)
        .expect("raw buffer matches dimensions")
        .save(path)
        .expect("png written");
}

fn load_labels(path: &Path) -> (usize, usize, Vec<u32>) {
    let decoded = image::open(path).expect("label map readable");
    let buffer = decoded.as_luma16().expect("label maps are 16-bit grayscale");
    let (w, h) = (buffer.width() as usize, buffer.height() as usize);
    (w, h, buffer.pixels().map(|p| u32::from(p.0[0])).collect())
}

/// Four quadrant blocks with optional additive noise.
fn block_image(width: usize, height: usize, noise: f64, seed: u64) -> Vec<f64> {
    let mut state = seed | 1;
    let shades = [0.1, 0.4, 0.7, 1.0];
    (0..width * height)
        .map(|i| {
            let (x, y) = (i % width, i / width);
            let block = (y / (height / 2)).min(1) * 2 + (x / (width / 2)).min(1);
            let jitter = (xorshift(&mut state) - 0.5) * 2.0 * noise;
            (shades[block] + jitter).clamp(0.0, 1.0)
        })
        .collect()
}

/// Smoothed random texture, the same recipe the stereo pair needs:
/// enough local variation that patch matching locks onto the true
/// shift.
fn textured_values(width: usize, height: usize, seed: u64) -> Vec<f64> {
    let mut state = seed | 1;
    let source: Vec<f64> = (0..width * height).map(|_| xorshift(&mut state)).collect();
    let mut out = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            let mut sum = 0.0;
            let mut count = 0.0;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let sx = (x as i64 + dx).clamp(0, width as i64 - 1) as usize;
                    let sy = (y as i64 + dy).clamp(0, height as i64 - 1) as usize;
                    sum += source[sy * width + sx];
                    count += 1.0;
                }
            }
            out[y * width + x] = sum / count;
        }
    }
    out
}

fn read_csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .expect("csv readable")
        .lines()
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect()
}

/// Determinism: repeated `pipeline` invocations with a fixed config
/// produce byte-identical reports and label maps across four runs
/// spanning two thread settings.
#[test]
fn criterion_11_pipeline_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let (width, height) = (48, 48);
    let input = dir.path().join("blocks.png");
    save_gray_png(&input, width, height, &block_image(width, height, 0.02, 0xA11CE));

    let config = dir.path().join("run.cfg");
    fs::write(
        &config,
        format!(
            "# fixed pipeline configuration\n\
             task = cartoon\n\
             input = {}\n\
             labels = 4\n\
             method = l0cp\n\
             alpha_c = 0.02\n\
             lambda = 0.2\n\
             max_iters = 3000\n\
             tol = 1e-6\n\
             seed = 7\n",
            input.display()
        ),
    )
    .unwrap();

    let runs: Vec<(usize, &str)> = vec![(1, "r0"), (2, "r1"), (1, "r2"), (2, "r3")];
    let mut reports: Vec<Vec<u8>> = Vec::new();
    let mut label_maps: Vec<Vec<u8>> = Vec::new();
    for (threads, name) in &runs {
        let out = dir.path().join(name);
        run_ok(&[
            "pipeline",
            "--config",
            config.to_str().unwrap(),
            "--threads",
            &threads.to_string(),
            "--out",
            out.to_str().unwrap(),
        ]);
        reports.push(fs::read(out.join("report.csv")).unwrap());
        label_maps.push(fs::read(out.join("labels.png")).unwrap());
    }
    for i in 1..runs.len() {
        assert_eq!(
            reports[i], reports[0],
            "report.csv differs between run 0 (threads {}) and run {i} (threads {})",
            runs[0].0, runs[i].0
        );
        assert_eq!(
            label_maps[i], label_maps[0],
            "labels.png differs between run 0 and run {i}"
        );
    }
    assert!(reports[0].starts_with(b"task,method,"), "report has the expected header");

    finish(start, 11, "pipeline determinism", 120.0);
}

/// A grid partition with factor 1 is the identity reduction: one node
/// per pixel, reduction rate exactly 1, energy offset exactly 0.
#[test]
fn example_grid_factor_one_is_lossless() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let (width, height) = (24, 24);
    let input = dir.path().join("blocks.png");
    save_gray_png(&input, width, height, &block_image(width, height, 0.01, 0xB0B));

    let out = dir.path().join("cmp");
    run_ok(&[
        "compare",
        "--task", "cartoon",
        "--input", input.to_str().unwrap(),
        "--labels", "4",
        "--method", "grid",
        "--factor", "1",
        "--lambda", "0.2",
        "--max-iters", "2000",
        "--out", out.to_str().unwrap(),
    ]);

    let rows = read_csv_rows(&out.join("comparison.csv"));
    assert_eq!(rows[0][0], "method");
    let grid_row = rows.iter().find(|r| r[0] == "grid").expect("grid row present");
    let nodes: usize = grid_row[1].parse().unwrap();
    let reduction_rate: f64 = grid_row[2].parse().unwrap();
    let energy_offset: f64 = grid_row[6].parse().unwrap();
    assert_eq!(nodes, width * height);
    assert_eq!(reduction_rate, 1.0, "factor-1 grid must keep every pixel");
    assert_eq!(energy_offset, 0.0, "identity reduction must not change the energy");

    finish(start, 12, "factor-1 grid is lossless", 60.0);
}

/// Cartooning a clean four-block image with a small cut penalty
/// recovers the blocks exactly: labels are constant on each block,
/// four distinct labels appear, and the energy offset against the
/// full-grid baseline is at most 0.1%.
#[test]
fn example_cartoon_recovers_flat_blocks() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let (width, height) = (32, 32);
    let input = dir.path().join("clean.png");
    save_gray_png(&input, width, height, &block_image(width, height, 0.0, 1));

    let args_tail = [
        "--task", "cartoon",
        "--input", input.to_str().unwrap(),
        "--labels", "4",
        "--method", "l0cp",
        "--alpha-c", "0.01",
        "--lambda", "0.1",
        "--max-iters", "4000",
        "--tol", "1e-7",
    ];

    let out = dir.path().join("run");
    let mut args = vec!["pipeline"];
    args.extend_from_slice(&args_tail);
    args.extend_from_slice(&["--out", out.to_str().unwrap()]);
    run_ok(&args);

    let (w, h, labels) = load_labels(&out.join("labels.png"));
    assert_eq!((w, h), (width, height));
    let mut block_labels = [None; 4];
    for (i, &label) in labels.iter().enumerate() {
        let (x, y) = (i % width, i / width);
        let block = (y / (height / 2)).min(1) * 2 + (x / (width / 2)).min(1);
        match block_labels[block] {
            None => block_labels[block] = Some(label),
            Some(expected) => assert_eq!(
                label, expected,
                "pixel ({x},{y}) broke the constant labeling of block {block}"
            ),
        }
    }
    let mut distinct: Vec<u32> = block_labels.iter().map(|l| l.unwrap()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    assert_eq!(distinct.len(), 4, "all four blocks must get distinct labels");

    let cmp_out = dir.path().join("cmp");
    let mut args = vec!["compare"];
    args.extend_from_slice(&args_tail);
    args.extend_from_slice(&["--out", cmp_out.to_str().unwrap()]);
    run_ok(&args);
    let rows = read_csv_rows(&cmp_out.join("comparison.csv"));
    let run_row = rows.iter().find(|r| r[0] == "l0cp").expect("l0cp row present");
    let offset: f64 = run_row[6].parse().unwrap();
    assert!(
        offset.abs() <= 1e-3,
        "energy offset {offset} exceeds 0.1% on an exactly recoverable image"
    );

    finish(start, 13, "cartoon recovers flat blocks", 60.0);
}

/// A stereo pair that is a pure 3-pixel horizontal shift comes back
/// with disparity 3 over the interior.
#[test]
fn example_stereo_recovers_uniform_shift() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let (width, height) = (96, 64);
    let shift = 3usize;
    let d_max = 8usize;

    let left = textured_values(width, height, 0xD157);
    let mut right = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            right[y * width + x] = left[y * width + (x + shift).min(width - 1)];
        }
    }
    let left_path = dir.path().join("left.png");
    let right_path = dir.path().join("right.png");
    save_gray_png(&left_path, width, height, &left);
    save_gray_png(&right_path, width, height, &right);

    let out = dir.path().join("run");
    run_ok(&[
        "pipeline",
        "--task", "stereo",
        "--input", left_path.to_str().unwrap(),
        "--right", right_path.to_str().unwrap(),
        "--dmax", "8",
        "--method", "l0cp",
        "--alpha-c", "1.0",
        "--lambda", "0.2",
        "--max-iters", "6000",
        "--tol", "1e-7",
        "--out", out.to_str().unwrap(),
    ]);

    let (w, h, labels) = load_labels(&out.join("labels.png"));
    assert_eq!((w, h), (width, height));
    let mut interior = 0usize;
    let mut correct = 0usize;
    for y in 2..height - 2 {
        for x in d_max..width - d_max {
            interior += 1;
            if labels[y * width + x] as usize == shift {
                correct += 1;
            }
        }
    }
    let share = correct as f64 / interior as f64;
    println!("[14] interior disparity-{shift} share: {:.1}%", share * 100.0);
    assert!(
        share >= 0.8,
        "only {:.1}% of interior pixels recovered disparity {shift}",
        share * 100.0
    );

    finish(start, 14, "stereo recovers a uniform shift", 120.0);
}

/// Failure classes map to distinct exit codes: invalid configuration
/// exits 2, unreadable files exit 3, success exits 0.
#[test]
fn example_exit_codes_distinguish_failures() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();

    let missing_input = bin()
        .args([
            "pipeline",
            "--task", "cartoon",
            "--labels", "4",
            "--input", "/definitely/not/here.png",
            "--out", dir.path().join("x").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(missing_input.status.code(), Some(3), "missing input file");

    let bad_config = dir.path().join("bad.cfg");
    fs::write(&bad_config, "no_such_key = 1\n").unwrap();
    let unknown_key = bin()
        .args(["pipeline", "--config", bad_config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(unknown_key.status.code(), Some(2), "unknown config key");

    let missing_task = bin()
        .args([
            "solve",
            "--input", "/irrelevant.png",
            "--out", dir.path().join("y").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(missing_task.status.code(), Some(2), "missing task setting");

    let usage = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2), "unknown subcommand follows the config class");

    finish(start, 15, "exit codes distinguish failure classes", 60.0);
}
