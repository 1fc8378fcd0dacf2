use crate::core::graph::ReducedGraph;
use crate::core::partition::Partition;
use crate::error::{Error, Result};

/// How far a row may stray from the unit simplex and still count as
/// feasible: components within this of `[0, 1]`, row sum within this
/// of 1.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A relaxed labeling: one point of the unit simplex per node.
///
/// Row `i` holds the label weights `c_i ∈ ℝ^L`; feasibility (components
/// in `[0, 1]`, sum 1, both to [`SIMPLEX_TOLERANCE`]) is enforced on
/// construction, and the data is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    nodes: usize,
    labels: usize,
    data: Vec<f64>,
}

impl Assignment {
    pub fn new(nodes: usize, labels: usize, data: Vec<f64>) -> Result<Self> {
        if nodes == 0 || labels == 0 {
            return Err(Error::invalid("an assignment needs nodes and labels"));
        }
        if data.len() != nodes * labels {
            return Err(Error::dims(format!(
                "expected {} weights ({} nodes x {} labels), got {}",
                nodes * labels,
                nodes,
                labels,
                data.len()
            )));
        }
        for (i, row) in data.chunks_exact(labels).enumerate() {
            let mut sum = 0.0;
            for &c in row {
                if !c.is_finite() || !(-SIMPLEX_TOLERANCE..=1.0 + SIMPLEX_TOLERANCE).contains(&c) {
                    return Err(Error::invalid(format!(
                        "node {} has a weight outside [0, 1]: {}",
                        i, c
                    )));
                }
                sum += c;
            }
            if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
                return Err(Error::invalid(format!(
                    "node {} weights sum to {}, not 1",
                    i, sum
                )));
            }
        }
        Ok(Self {
            nodes,
            labels,
            data,
        })
    }

    /// The one-hot (vertex) assignment for a discrete labeling.
    pub fn from_labels(labels_per_node: &[u32], labels: usize) -> Result<Self> {
        if labels_per_node.is_empty() {
            return Err(Error::invalid("an assignment needs at least one node"));
        }
        let mut data = vec![0.0; labels_per_node.len() * labels];
        for (i, &l) in labels_per_node.iter().enumerate() {
            if l as usize >= labels {
                return Err(Error::invalid(format!(
                    "label {} out of range for {} labels",
                    l, labels
                )));
            }
            data[i * labels + l as usize] = 1.0;
        }
        Self::new(labels_per_node.len(), labels, data)
    }

    /// The simplex barycenter at every node (uniform weights `1/L`).
    pub fn barycenter(nodes: usize, labels: usize) -> Result<Self> {
        if labels == 0 {
            return Err(Error::invalid("an assignment needs labels"));
        }
        Self::new(nodes, labels, vec![1.0 / labels as f64; nodes * labels])
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    /// Node-major weights, row `i` at `i * labels .. (i + 1) * labels`.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, node: usize) -> &[f64] {
        &self.data[node * self.labels..(node + 1) * self.labels]
    }

    /// Largest deviation of any row from the exact simplex (0 when all
    /// rows are exactly feasible).
    pub fn max_simplex_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for row in self.data.chunks_exact(self.labels) {
            let sum: f64 = row.iter().sum();
            worst = worst.max((sum - 1.0).abs());
            for &c in row {
                worst = worst.max(-c).max(c - 1.0);
            }
        }
        worst.max(0.0)
    }

    /// Rounds each row to its heaviest label; ties go to the smallest
    /// label index.
    pub fn argmax_labels(&self) -> Vec<u32> {
        self.data
            .chunks_exact(self.labels)
            .map(|row| {
                let mut best = 0usize;
                for (k, &c) in row.iter().enumerate().skip(1) {
                    if c > row[best] {
                        best = k;
                    }
                }
                best as u32
            })
            .collect()
    }
}

/// Evaluates the partition energy of a relaxed labeling:
/// `Σ_i ⟨c_i, f̃_i⟩ + (λ/2) Σ_{(i,j)} w_ij Σ_k |c_ik − c_jk|`.
///
/// The data term sums aggregated costs weighted by the assignment; the
/// coupling term charges `λ w_ij` per unit of disagreement across each
/// edge (the factor 1/2 makes a one-hot disagreement cost exactly
/// `λ w_ij`).
pub fn energy(graph: &ReducedGraph, assignment: &Assignment, lambda: f64) -> Result<f64> {
    if assignment.nodes() != graph.nodes() || assignment.labels() != graph.labels() {
        return Err(Error::dims(format!(
            "assignment is {}x{} but the graph is {}x{}",
            assignment.nodes(),
            assignment.labels(),
            graph.nodes(),
            graph.labels()
        )));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("lambda must be finite and non-negative"));
    }
    let labels = graph.labels();
    let data: f64 = assignment
        .data()
        .iter()
        .zip(graph.potentials())
        .map(|(c, f)| c * f)
        .sum();
    let mut coupling = 0.0;
    for e in graph.edges() {
        let ri = assignment.row(e.i as usize);
        let rj = assignment.row(e.j as usize);
        let mut jump = 0.0;
        for k in 0..labels {
            jump += (ri[k] - rj[k]).abs();
        }
        coupling += e.w * jump;
    }
    Ok(data + 0.5 * lambda * coupling)
}

/// Evaluates the energy of a discrete labeling directly:
/// `Σ_i f̃_i[ℓ_i] + λ Σ_{(i,j): ℓ_i ≠ ℓ_j} w_ij`.
///
/// Agrees exactly with [`energy`] at the corresponding one-hot
/// assignment.
pub fn discrete_energy(graph: &ReducedGraph, labels_per_node: &[u32], lambda: f64) -> Result<f64> {
    if labels_per_node.len() != graph.nodes() {
        return Err(Error::dims(format!(
            "expected one label per node ({}), got {}",
            graph.nodes(),
            labels_per_node.len()
        )));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("lambda must be finite and non-negative"));
    }
    let mut total = 0.0;
    for (i, &l) in labels_per_node.iter().enumerate() {
        if l as usize >= graph.labels() {
            return Err(Error::invalid(format!(
                "label {} out of range for {} labels",
                l,
                graph.labels()
            )));
        }
        total += graph.potential(i, l as usize);
    }
    for e in graph.edges() {
        if labels_per_node[e.i as usize] != labels_per_node[e.j as usize] {
            total += lambda * e.w;
        }
    }
    Ok(total)
}

/// Lifts a per-segment assignment to the per-pixel grid: every pixel of
/// segment `i` receives row `c_i`. Evaluating the lifted assignment on
/// the full grid graph reproduces the reduced energy exactly.
pub fn lift_assignment(partition: &Partition, assignment: &Assignment) -> Result<Assignment> {
    if assignment.nodes() != partition.segment_count() {
        return Err(Error::dims(format!(
            "assignment has {} rows but the partition has {} segments",
            assignment.nodes(),
            partition.segment_count()
        )));
    }
    let data = partition.reassemble(assignment.data(), assignment.labels())?;
    Assignment::new(
        partition.width() * partition.height(),
        assignment.labels(),
        data,
    )
}
