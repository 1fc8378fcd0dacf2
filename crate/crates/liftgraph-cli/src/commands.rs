//! The four pipeline stages behind the CLI subcommands.
//!
//! Every stage resolves its settings the same way (defaults, then the
//! config file, then flags), reads images, and writes its artifacts
//! into the `out` directory:
//!
//! * `superpixel` — partition.pgm (16-bit segment map + `.meta` sidecar)
//! * `solve` — graph.lgr, labels.png, result.png, diagnostics.csv,
//!   report.csv
//! * `pipeline` — partition.pgm plus everything `solve` writes
//! * `compare` — per-method labels/diagnostics plus comparison.csv
//!
//! report.csv holds only deterministic values (no wall-clock, no
//! thread count), so identical configs produce byte-identical reports;
//! timing lives in diagnostics.csv and comparison.csv.

use std::fs;
use std::path::Path;
use std::time::Instant;

use liftgraph::core::{reduce, Image, Partition, PotentialField, ReducedGraph};
use liftgraph::eval::{
    self, build_partition, execute_run, run_on_partition, MethodSpec, MethodTag, RunRecord,
};
use liftgraph::potentials::{
    argmin_map, cartoon_costs, kmeans_palette, scribble_costs, stereo_cost_volume, ScribbleSet,
};
use liftgraph::solver::SolveDiagnostics;

use crate::config::{Settings, Task, PALETTE_ITERS, STEREO_WINDOW};
use crate::error::{CliError, CliResult};
use crate::io;

/// Column layout of the deterministic per-run report.
pub const REPORT_HEADER: &str =
    "task,method,width,height,labels,nodes,edges,lambda,energy,iterations,seed";

/// A fully assembled labeling problem: the input image, per-pixel
/// label costs, the scalar guide driving superpixel construction, and
/// a recipe for painting a labeling back into an image.
pub struct Problem {
    pub image: Image,
    pub costs: PotentialField,
    pub guide: Vec<f64>,
    renderer: Renderer,
}

enum Renderer {
    /// One color per label (cartoon palette, scribble class means).
    Colors(Vec<Vec<f64>>),
    /// Evenly spaced gray levels for `labels` indices (stereo
    /// disparities, or externally supplied costs without colors).
    Gray(usize),
}

impl Problem {
    /// Paints a full-grid labeling as an image.
    pub fn render(&self, labels: &[u32]) -> CliResult<Image> {
        let (w, h) = (self.image.width(), self.image.height());
        let image = match &self.renderer {
            Renderer::Colors(colors) => {
                let channels = colors.first().map_or(1, Vec::len);
                let mut data = vec![0.0; w * h * channels];
                for (pixel, &label) in labels.iter().enumerate() {
                    let color = colors.get(label as usize).ok_or_else(|| {
                        CliError::config(format!(
                            "label {label} is outside the {}-color palette",
                            colors.len()
                        ))
                    })?;
                    data[pixel * channels..(pixel + 1) * channels].copy_from_slice(color);
                }
                Image::new(w, h, channels, data)?
            }
            Renderer::Gray(labels_total) => {
                let denom = labels_total.saturating_sub(1).max(1) as f64;
                let data = labels.iter().map(|&k| f64::from(k) / denom).collect();
                Image::new(w, h, 1, data)?
            }
        };
        Ok(image)
    }
}

fn load_unaries(path: &Path, image: &Image) -> CliResult<PotentialField> {
    let costs = PotentialField::read_lpot(path)?;
    if costs.width() != image.width() || costs.height() != image.height() {
        return Err(CliError::config(format!(
            "unary file {} is {}x{} but the input image is {}x{}",
            path.display(),
            costs.width(),
            costs.height(),
            image.width(),
            image.height()
        )));
    }
    Ok(costs)
}

/// Reads the input image(s) and builds costs, guide, and renderer for
/// the configured task. A `unaries` file replaces the computed costs.
pub fn build_problem(settings: &Settings) -> CliResult<Problem> {
    let task = settings.task()?;
    let image = io::read_image(settings.input()?)?;
    let unaries = settings
        .unaries
        .as_deref()
        .map(|path| load_unaries(path, &image))
        .transpose()?;

    let (costs, renderer) = match task {
        Task::Cartoon => match unaries {
            Some(costs) => {
                let labels = costs.labels();
                (costs, Renderer::Gray(labels))
            }
            None => {
                let labels = settings
                    .labels
                    .ok_or_else(|| CliError::config("the cartoon task needs `labels`"))?;
                let palette = kmeans_palette(&image, labels, PALETTE_ITERS, settings.seed)?;
                let colors = (0..palette.len()).map(|k| palette.color(k).to_vec()).collect();
                (cartoon_costs(&image, &palette)?, Renderer::Colors(colors))
            }
        },
        Task::Scribble => {
            let path = settings
                .scribbles
                .as_deref()
                .ok_or_else(|| CliError::config("the scribble task needs a `scribbles` mask"))?;
            let (mask_w, mask_h, mask) = io::read_mask(path)?;
            if mask_w != image.width() || mask_h != image.height() {
                return Err(CliError::config(format!(
                    "scribble mask is {mask_w}x{mask_h} but the input image is {}x{}",
                    image.width(),
                    image.height()
                )));
            }
            let scribbles = ScribbleSet::from_map(mask_w, mask_h, &mask)?;
            let colors = class_mean_colors(&image, &scribbles);
            let costs = match unaries {
                Some(costs) => costs,
                None => scribble_costs(&image, &scribbles)?,
            };
            (costs, Renderer::Colors(colors))
        }
        Task::Stereo => {
            let costs = match unaries {
                Some(costs) => costs,
                None => {
                    let right_path = settings
                        .right
                        .as_deref()
                        .ok_or_else(|| CliError::config("the stereo task needs a `right` image"))?;
                    let right = io::read_image(right_path)?;
                    let d_max = settings
                        .dmax
                        .ok_or_else(|| CliError::config("the stereo task needs `dmax`"))?;
                    stereo_cost_volume(&image, &right, d_max, STEREO_WINDOW, None)?
                }
            };
            let labels = costs.labels();
            (costs, Renderer::Gray(labels))
        }
    };

    // Stereo partitions follow the cost structure (best-disparity map);
    // photometric tasks follow image brightness.
    let guide = match task {
        Task::Stereo => argmin_map(&costs),
        Task::Cartoon | Task::Scribble => image.luma(),
    };

    Ok(Problem { image, costs, guide, renderer })
}

fn class_mean_colors(image: &Image, scribbles: &ScribbleSet) -> Vec<Vec<f64>> {
    let channels = image.channels();
    (0..scribbles.label_count())
        .map(|label| {
            let pixels = scribbles.pixels(label);
            if pixels.is_empty() {
                return vec![0.5; channels];
            }
            let mut mean = vec![0.0; channels];
            for &p in pixels {
                for (c, slot) in mean.iter_mut().enumerate() {
                    *slot += image.data()[p * channels + c];
                }
            }
            for slot in &mut mean {
                *slot /= pixels.len() as f64;
            }
            mean
        })
        .collect()
}

fn create_out_dir(settings: &Settings) -> CliResult<&Path> {
    let out = settings.out()?;
    fs::create_dir_all(out)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", out.display())))?;
    Ok(out)
}

/// Writes the single-row deterministic report: problem shape, graph
/// size, rounded full-grid energy, and iteration count. Wall-clock and
/// thread settings are deliberately absent so repeated runs of the
/// same config produce byte-identical files.
fn write_report(
    path: &Path,
    settings: &Settings,
    record: &RunRecord,
    edges: usize,
    iterations: usize,
) -> CliResult<()> {
    let row = format!(
        "{},{},{},{},{},{},{},{},{:.12e},{},{}",
        settings.task()?.name(),
        record.method.name(),
        record.width,
        record.height,
        record.label_count,
        record.nodes,
        edges,
        settings.lambda,
        record.energy,
        iterations,
        settings.seed,
    );
    fs::write(path, format!("{REPORT_HEADER}\n{row}\n"))
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn write_run_artifacts(
    out: &Path,
    settings: &Settings,
    problem: &Problem,
    graph: &ReducedGraph,
    record: &RunRecord,
    diagnostics: &SolveDiagnostics,
) -> CliResult<()> {
    graph.write_binary(&out.join("graph.lgr"))?;
    io::write_labels(&out.join("labels.png"), &record.labels, record.width, record.height)?;
    io::write_image(&out.join("result.png"), &problem.render(&record.labels)?)?;
    diagnostics.write_csv(&out.join("diagnostics.csv"))?;
    write_report(&out.join("report.csv"), settings, record, graph.edges().len(), diagnostics.iterations)
}

/// `superpixel`: build and save a partition of the input image.
///
/// The partition guide is image brightness for photometric tasks and
/// the best-cost disparity map for stereo (when the task is set);
/// without a task it defaults to brightness.
pub fn cmd_superpixel(settings: &Settings) -> CliResult<()> {
    let image = io::read_image(settings.input()?)?;
    let guide = match settings.task {
        Some(Task::Stereo) => build_problem(settings)?.guide,
        _ => image.luma(),
    };
    let start = Instant::now();
    let partition = build_partition(&image, &guide, &settings.method_spec())?;
    let seconds = start.elapsed().as_secs_f64();

    let out = create_out_dir(settings)?;
    let path = out.join("partition.pgm");
    partition.write_pgm(&path)?;
    log::info!(
        "partitioned {}x{} into {} segments in {seconds:.3} s",
        image.width(),
        image.height(),
        partition.segment_count()
    );
    println!(
        "{} segments over {}x{} pixels -> {}",
        partition.segment_count(),
        image.width(),
        image.height(),
        path.display()
    );
    Ok(())
}

/// `solve`: minimize the relaxed energy and round to a labeling.
///
/// With `--partition` the solve runs on that saved partition's reduced
/// graph (attributed to the configured method in the report);
/// otherwise it runs on the full pixel grid.
pub fn cmd_solve(settings: &Settings) -> CliResult<()> {
    let problem = build_problem(settings)?;
    let (partition, tag) = match settings.partition.as_deref() {
        Some(path) => {
            let partition = Partition::read_pgm(path)?;
            if partition.width() != problem.image.width()
                || partition.height() != problem.image.height()
            {
                return Err(CliError::config(format!(
                    "partition {} is {}x{} but the input image is {}x{}",
                    path.display(),
                    partition.width(),
                    partition.height(),
                    problem.image.width(),
                    problem.image.height()
                )));
            }
            (partition, settings.method_spec().tag())
        }
        None => (
            Partition::per_pixel(problem.image.width(), problem.image.height())?,
            MethodTag::Full,
        ),
    };

    let graph = reduce(&partition, &problem.costs)?;
    let (record, diagnostics) = run_on_partition(
        &problem.costs,
        &partition,
        tag,
        settings.lambda,
        &settings.solver_options(),
        0.0,
    )?;

    let out = create_out_dir(settings)?;
    write_run_artifacts(out, settings, &problem, &graph, &record, &diagnostics)?;
    log::info!("solved in {:.3} s over {} nodes", record.seconds, record.nodes);
    println!(
        "{} nodes, {} edges, energy {:.6} after {} iterations -> {}",
        record.nodes,
        graph.edges().len(),
        record.energy,
        diagnostics.iterations,
        out.display()
    );
    Ok(())
}

/// `pipeline`: superpixel construction, reduction, solve, and
/// reassembly in one invocation.
pub fn cmd_pipeline(settings: &Settings) -> CliResult<()> {
    let problem = build_problem(settings)?;
    let spec = settings.method_spec();

    let start = Instant::now();
    let partition = build_partition(&problem.image, &problem.guide, &spec)?;
    let construction_seconds = start.elapsed().as_secs_f64();

    let graph = reduce(&partition, &problem.costs)?;
    let (record, diagnostics) = run_on_partition(
        &problem.costs,
        &partition,
        spec.tag(),
        settings.lambda,
        &settings.solver_options(),
        construction_seconds,
    )?;

    let out = create_out_dir(settings)?;
    partition.write_pgm(&out.join("partition.pgm"))?;
    write_run_artifacts(out, settings, &problem, &graph, &record, &diagnostics)?;
    log::info!(
        "pipeline: {} segments, construction {construction_seconds:.3} s, total {:.3} s",
        record.nodes,
        record.seconds
    );
    println!(
        "{} -> {} nodes, energy {:.6} after {} iterations -> {}",
        record.method.name(),
        record.nodes,
        record.energy,
        diagnostics.iterations,
        out.display()
    );
    Ok(())
}

/// `compare`: run the full-grid baseline and the configured reduced
/// method on the same problem, then report reduction rate, time saved,
/// memory, and energy offset.
pub fn cmd_compare(settings: &Settings) -> CliResult<()> {
    let problem = build_problem(settings)?;
    let options = settings.solver_options();

    let (baseline, baseline_diag) = execute_run(
        &problem.image,
        &problem.costs,
        &problem.guide,
        settings.lambda,
        &MethodSpec::Full,
        &options,
    )?;
    let spec = settings.method_spec();
    let (run, run_diag) = execute_run(
        &problem.image,
        &problem.costs,
        &problem.guide,
        settings.lambda,
        &spec,
        &options,
    )?;

    let report = eval::Report {
        rows: vec![eval::compare(&baseline, &baseline)?, eval::compare(&baseline, &run)?],
    };

    let out = create_out_dir(settings)?;
    report.write_csv(&out.join("comparison.csv"))?;
    io::write_labels(&out.join("labels_full.png"), &baseline.labels, baseline.width, baseline.height)?;
    io::write_labels(
        &out.join(format!("labels_{}.png", run.method.name())),
        &run.labels,
        run.width,
        run.height,
    )?;
    baseline_diag.write_csv(&out.join("diagnostics_full.csv"))?;
    run_diag.write_csv(&out.join(format!("diagnostics_{}.csv", run.method.name())))?;

    print!("{}", report.to_csv());
    println!("-> {}", out.display());
    Ok(())
}
