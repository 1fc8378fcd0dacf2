use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::core::partition::Partition;
use crate::core::potential::PotentialField;
use crate::error::{Error, Result};

/// An undirected weighted edge between two segments, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: u32,
    pub j: u32,
    /// Shared boundary measure: the number of 4-neighbor pixel pairs
    /// straddling the two segments.
    pub w: f64,
}

/// A weighted graph over segments carrying everything the solvers need:
/// per-segment areas, aggregated label costs, and boundary weights.
///
/// Invariants, enforced on construction: areas are positive, potentials
/// are finite, every edge has `i < j < nodes` and positive finite
/// weight, and edges are strictly sorted by `(i, j)` (hence unique).
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGraph {
    nodes: usize,
    labels: usize,
    areas: Vec<u64>,
    potentials: Vec<f64>,
    edges: Vec<Edge>,
}

impl ReducedGraph {
    pub fn new(
        nodes: usize,
        labels: usize,
        areas: Vec<u64>,
        potentials: Vec<f64>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        if nodes == 0 || labels == 0 {
            return Err(Error::invalid("a reduced graph needs nodes and labels"));
        }
        if areas.len() != nodes {
            return Err(Error::dims(format!(
                "expected {} areas, got {}",
                nodes,
                areas.len()
            )));
        }
        if areas.contains(&0) {
            return Err(Error::invalid("every segment must cover at least one pixel"));
        }
        if potentials.len() != nodes * labels {
            return Err(Error::dims(format!(
                "expected {} potentials ({} nodes x {} labels), got {}",
                nodes * labels,
                nodes,
                labels,
                potentials.len()
            )));
        }
        if potentials.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("potentials must be finite"));
        }
        for pair in edges.windows(2) {
            if (pair[1].i, pair[1].j) <= (pair[0].i, pair[0].j) {
                return Err(Error::invalid("edges must be strictly sorted by (i, j)"));
            }
        }
        for e in &edges {
            if e.i >= e.j || (e.j as usize) >= nodes {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) violates i < j < {}",
                    e.i, e.j, nodes
                )));
            }
            if e.w <= 0.0 || !e.w.is_finite() {
                return Err(Error::invalid("edge weights must be positive and finite"));
            }
        }
        Ok(Self {
            nodes,
            labels,
            areas,
            potentials,
            edges,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn areas(&self) -> &[u64] {
        &self.areas
    }

    /// Aggregated potentials, node-major: entry `i * labels + k` is the
    /// cost of giving every pixel of segment `i` the label `k`.
    pub fn potentials(&self) -> &[f64] {
        &self.potentials
    }

    pub fn potential(&self, node: usize, label: usize) -> f64 {
        self.potentials[node * self.labels + label]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of incident edges per node (for solver preconditioning).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.nodes];
        for e in &self.edges {
            deg[e.i as usize] += 1;
            deg[e.j as usize] += 1;
        }
        deg
    }

    /// Serializes the graph to the crate's binary graph format: the
    /// magic `LGR1`, little-endian `u32` node/label/edge counts, `u64`
    /// areas, `f64` node-major potentials, then `(u32 i, u32 j, f64 w)`
    /// per edge.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(b"LGR1")?;
        w.write_all(&(self.nodes as u32).to_le_bytes())?;
        w.write_all(&(self.labels as u32).to_le_bytes())?;
        w.write_all(&(self.edges.len() as u32).to_le_bytes())?;
        for &a in &self.areas {
            w.write_all(&a.to_le_bytes())?;
        }
        for &p in &self.potentials {
            w.write_all(&p.to_le_bytes())?;
        }
        for e in &self.edges {
            w.write_all(&e.i.to_le_bytes())?;
            w.write_all(&e.j.to_le_bytes())?;
            w.write_all(&e.w.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a graph written by [`ReducedGraph::write_binary`],
    /// re-validating every invariant.
    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"LGR1" {
            return Err(Error::Format("not a reduced-graph file".into()));
        }
        let nodes = read_u32(&mut r)? as usize;
        let labels = read_u32(&mut r)? as usize;
        let edge_count = read_u32(&mut r)? as usize;
        let mut areas = Vec::with_capacity(nodes);
        let mut buf8 = [0u8; 8];
        for _ in 0..nodes {
            r.read_exact(&mut buf8)?;
            areas.push(u64::from_le_bytes(buf8));
        }
        let mut potentials = Vec::with_capacity(nodes * labels);
        for _ in 0..nodes.saturating_mul(labels) {
            r.read_exact(&mut buf8)?;
            potentials.push(f64::from_le_bytes(buf8));
        }
        let mut edges = Vec::with_capacity(edge_count);
        for _ in 0..edge_count {
            let i = read_u32(&mut r)?;
            let j = read_u32(&mut r)?;
            r.read_exact(&mut buf8)?;
            edges.push(Edge {
                i,
                j,
                w: f64::from_le_bytes(buf8),
            });
        }
        Self::new(nodes, labels, areas, potentials, edges)
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

/// Aggregates a per-pixel cost field onto a partition: segment
/// potentials are sums of member-pixel costs, and each pair of segments
/// sharing boundary becomes one edge weighted by the number of
/// 4-neighbor pixel pairs crossing it. The resulting graph represents
/// the original labeling problem exactly for labelings constant on
/// segments.
pub fn reduce(partition: &Partition, costs: &PotentialField) -> Result<ReducedGraph> {
    if partition.width() != costs.width() || partition.height() != costs.height() {
        return Err(Error::dims(format!(
            "partition is {}x{} but the cost field is {}x{}",
            partition.width(),
            partition.height(),
            costs.width(),
            costs.height()
        )));
    }
    let (width, height) = (partition.width(), partition.height());
    let (nodes, labels) = (partition.segment_count(), costs.labels());
    let ids = partition.labels();
    let mut potentials = vec![0.0f64; nodes * labels];
    for (pixel, &id) in ids.iter().enumerate() {
        let (x, y) = (pixel % width, pixel / width);
        let base = id as usize * labels;
        for (k, &c) in costs.costs(x, y).iter().enumerate() {
            potentials[base + k] += c;
        }
    }
    let mut weights: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut crossing = |a: u32, b: u32| {
        if a != b {
            *weights.entry((a.min(b), a.max(b))).or_insert(0.0) += 1.0;
        }
    };
    for y in 0..height {
        for x in 0..width {
            let p = y * width + x;
            if x + 1 < width {
                crossing(ids[p], ids[p + 1]);
            }
            if y + 1 < height {
                crossing(ids[p], ids[p + width]);
            }
        }
    }
    let edges = weights
        .into_iter()
        .map(|((i, j), w)| Edge { i, j, w })
        .collect();
    ReducedGraph::new(nodes, labels, partition.segment_areas(), potentials, edges)
}

/// The unreduced baseline: one node per pixel, unit areas, unit-weight
/// 4-neighbor edges. Defined as the reduction of the per-pixel
/// partition, so it agrees with [`reduce`] exactly.
pub fn build_grid_graph(costs: &PotentialField) -> Result<ReducedGraph> {
    let partition = Partition::per_pixel(costs.width(), costs.height())?;
    reduce(&partition, costs)
}
