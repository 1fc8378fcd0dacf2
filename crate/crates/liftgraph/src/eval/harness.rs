use std::time::Instant;

use crate::core::{build_grid_graph, discrete_energy, reduce, Image, Partition, PotentialField};
use crate::error::{Error, Result};
use crate::eval::{MethodTag, RunRecord};
use crate::solver::{round_assignment, solve_relaxation, SolveDiagnostics, SolverOptions};
use crate::superpixel::{grid_subsample, l0_cut_pursuit, slic, SlicParams};

/// How to build the graph a run solves.
#[derive(Debug, Clone)]
pub enum MethodSpec {
    /// One node per pixel — the baseline.
    Full,
    /// Square blocks of the given side length.
    Grid {
        /// Block side length in pixels.
        factor: usize,
    },
    /// Color-and-position clustering of the guide image.
    Slic(SlicParams),
    /// Piecewise-constant cut pursuit on a scalar guide signal.
    L0cp {
        /// Per-edge cut penalty.
        alpha_c: f64,
        /// Maximum outer refinement rounds.
        max_iters: usize,
    },
}

impl MethodSpec {
    /// The tag this construction is reported under.
    pub fn tag(&self) -> MethodTag {
        match self {
            MethodSpec::Full => MethodTag::Full,
            MethodSpec::Grid { .. } => MethodTag::Grid,
            MethodSpec::Slic(_) => MethodTag::Slic,
            MethodSpec::L0cp { .. } => MethodTag::L0cp,
        }
    }
}

/// Build the pixel partition a method solves on.
///
/// `image` drives the clustering constructions; `guide` is the scalar
/// signal cut pursuit flattens (typically luma or a depth proxy) and
/// must have one value per pixel.
pub fn build_partition(image: &Image, guide: &[f64], method: &MethodSpec) -> Result<Partition> {
    if guide.len() != image.width() * image.height() {
        return Err(Error::dims(format!(
            "guide has {} values for {} pixels",
            guide.len(),
            image.width() * image.height()
        )));
    }
    match method {
        MethodSpec::Full => Partition::per_pixel(image.width(), image.height()),
        MethodSpec::Grid { factor } => grid_subsample(image.width(), image.height(), *factor),
        MethodSpec::Slic(params) => slic(image, params),
        MethodSpec::L0cp { alpha_c, max_iters } => Ok(l0_cut_pursuit(
            guide,
            image.width(),
            image.height(),
            *alpha_c,
            *max_iters,
        )?
        .partition),
    }
}

/// Run one method end to end: build a partition of the pixel grid,
/// reduce the potentials onto it, solve the relaxation, round, and carry
/// the labeling back to the full grid.
///
/// `image` guides the clustering constructions and must match the shape
/// of `costs`; `guide` is the scalar signal cut pursuit flattens
/// (typically luma or a depth proxy) and must have one value per pixel.
/// Reported seconds cover partition construction plus reduction and
/// solving; evaluating the result on the full grid is excluded.
pub fn execute_run(
    image: &Image,
    costs: &PotentialField,
    guide: &[f64],
    lambda: f64,
    method: &MethodSpec,
    options: &SolverOptions,
) -> Result<(RunRecord, SolveDiagnostics)> {
    if image.width() != costs.width() || image.height() != costs.height() {
        return Err(Error::dims(format!(
            "image is {}x{} but costs are {}x{}",
            image.width(),
            image.height(),
            costs.width(),
            costs.height()
        )));
    }
    let start = Instant::now();
    let partition = build_partition(image, guide, method)?;
    let construction_seconds = start.elapsed().as_secs_f64();
    run_on_partition(
        costs,
        &partition,
        method.tag(),
        lambda,
        options,
        construction_seconds,
    )
}

/// Reduce, solve, round, and evaluate on an already-built partition.
///
/// `construction_seconds` is added to the measured reduction-and-solve
/// time so the record reflects the whole pipeline that produced the
/// partition. The returned record's energy is the rounded labeling's
/// energy on the full pixel grid, and its memory figure is an analytic
/// estimate summing the major persistent arrays:
///
/// - input potentials: `8·N·L` bytes,
/// - partition labels: `4·N`,
/// - reduced graph (potentials, areas, edges): `8·M·L + 8·M + 16·E`,
/// - solver state (three primal iterates, data-term buffer, duals):
///   `8·L·(4·M + E)`.
pub fn run_on_partition(
    costs: &PotentialField,
    partition: &Partition,
    tag: MethodTag,
    lambda: f64,
    options: &SolverOptions,
    construction_seconds: f64,
) -> Result<(RunRecord, SolveDiagnostics)> {
    let start = Instant::now();
    let graph = reduce(partition, costs)?;
    let (assignment, diagnostics) = solve_relaxation(&graph, lambda, options)?;
    let node_labels = round_assignment(&assignment);
    let full_labels = partition.reassemble_labels(&node_labels)?;
    let seconds = construction_seconds + start.elapsed().as_secs_f64();

    // Evaluation on the full grid — scoring, not part of the run time.
    let grid = build_grid_graph(costs)?;
    let energy = discrete_energy(&grid, &full_labels, lambda)?;

    let pixels = costs.width() * costs.height();
    let labels = costs.labels();
    let nodes = graph.nodes();
    let edge_count = graph.edges().len();
    let memory_bytes = (8 * pixels * labels
        + 4 * pixels
        + 8 * nodes * labels
        + 8 * nodes
        + 16 * edge_count
        + 8 * labels * (4 * nodes + edge_count)) as u64;

    Ok((
        RunRecord {
            method: tag,
            nodes,
            seconds,
            memory_bytes,
            energy,
            labels: full_labels,
            width: costs.width(),
            height: costs.height(),
            label_count: labels,
            lambda,
        },
        diagnostics,
    ))
}
