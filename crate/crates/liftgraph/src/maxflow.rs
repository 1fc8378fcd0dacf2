//! Exact s–t maximum flow / minimum cut on capacitated directed graphs.
//!
//! This is the inner engine of the binary cut step: the cut objective is
//! rewritten as a flow network over the pixel grid plus two terminal
//! nodes, and the minimum cut certifies the globally optimal binary
//! partition. The solver is a level-graph (Dinic) augmenting scheme;
//! with integer-valued capacities the arithmetic is exact, because each
//! augmentation subtracts the bottleneck from itself on at least one
//! arc, which is exact in floating point.

use crate::error::{Error, Result};

/// Endpoint of an arc: one of the two terminals or an internal node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Source,
    Sink,
    Internal(usize),
}

/// A directed flow network over `n` internal nodes plus the terminals.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    n: usize,
    arcs: Vec<(usize, usize, f64)>,
}

/// Result of a max-flow solve: the flow value and a certifying minimum
/// cut (`side[i]` is true when internal node `i` is on the source side,
/// reported as the source-reachable set of the final residual graph).
#[derive(Debug, Clone)]
pub struct CutResult {
    pub flow_value: f64,
    pub side: Vec<bool>,
}

const SOURCE: usize = 0;
const SINK: usize = 1;

impl FlowNetwork {
    pub fn new(internal_nodes: usize) -> Self {
        Self {
            n: internal_nodes,
            arcs: Vec::new(),
        }
    }

    pub fn internal_nodes(&self) -> usize {
        self.n
    }

    fn index(&self, node: Node, role: &str) -> Result<usize> {
        match node {
            Node::Source => Ok(SOURCE),
            Node::Sink => Ok(SINK),
            Node::Internal(i) if i < self.n => Ok(i + 2),
            Node::Internal(i) => Err(Error::invalid(format!(
                "{} node {} out of range for {} internal nodes",
                role, i, self.n
            ))),
        }
    }

    /// Adds a directed arc. Capacities must be finite and non-negative;
    /// arcs leaving the sink or entering the source are rejected.
    pub fn add_arc(&mut self, from: Node, to: Node, capacity: f64) -> Result<()> {
        if !capacity.is_finite() || capacity < 0.0 {
            return Err(Error::invalid(format!(
                "arc capacity must be finite and non-negative, got {}",
                capacity
            )));
        }
        if from == Node::Sink {
            return Err(Error::invalid("no arc may leave the sink"));
        }
        if to == Node::Source {
            return Err(Error::invalid("no arc may enter the source"));
        }
        let f = self.index(from, "from")?;
        let t = self.index(to, "to")?;
        self.arcs.push((f, t, capacity));
        Ok(())
    }

    /// Computes the exact maximum flow and a certifying minimum cut.
    pub fn max_flow(&self) -> CutResult {
        let mut dinic = Dinic::new(self.n + 2, &self.arcs);
        let flow_value = dinic.run(SOURCE, SINK);
        let reachable = dinic.residual_reachable(SOURCE);
        let side = (0..self.n).map(|i| reachable[i + 2]).collect();
        CutResult { flow_value, side }
    }

    /// Total capacity crossing from the source side to the sink side of
    /// the given cut (the quantity a minimum cut minimizes).
    pub fn cut_capacity(&self, side: &[bool]) -> f64 {
        let on_source_side = |v: usize| match v {
            SOURCE => true,
            SINK => false,
            _ => side[v - 2],
        };
        self.arcs
            .iter()
            .filter(|&&(f, t, _)| on_source_side(f) && !on_source_side(t))
            .map(|&(_, _, c)| c)
            .sum()
    }
}

struct DinicEdge {
    to: usize,
    cap: f64,
    rev: usize,
}

struct Dinic {
    adj: Vec<Vec<DinicEdge>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(nodes: usize, arcs: &[(usize, usize, f64)]) -> Self {
        let mut adj: Vec<Vec<DinicEdge>> = (0..nodes).map(|_| Vec::new()).collect();
        for &(f, t, c) in arcs {
            let rev_f = adj[t].len();
            let rev_t = adj[f].len();
            adj[f].push(DinicEdge {
                to: t,
                cap: c,
                rev: rev_f,
            });
            adj[t].push(DinicEdge {
                to: f,
                cap: 0.0,
                rev: rev_t,
            });
        }
        Self {
            adj,
            level: vec![-1; nodes],
            iter: vec![0; nodes],
        }
    }

    fn bfs(&mut self, source: usize, sink: usize) -> bool {
        self.level.fill(-1);
        self.level[source] = 0;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for e in &self.adj[v] {
                if e.cap > 0.0 && self.level[e.to] < 0 {
                    self.level[e.to] = self.level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        self.level[sink] >= 0
    }

    fn dfs(&mut self, v: usize, sink: usize, limit: f64) -> f64 {
        if v == sink {
            return limit;
        }
        while self.iter[v] < self.adj[v].len() {
            let i = self.iter[v];
            let (to, cap, rev) = {
                let e = &self.adj[v][i];
                (e.to, e.cap, e.rev)
            };
            if cap > 0.0 && self.level[to] == self.level[v] + 1 {
                let pushed = self.dfs(to, sink, limit.min(cap));
                if pushed > 0.0 {
                    self.adj[v][i].cap -= pushed;
                    self.adj[to][rev].cap += pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        0.0
    }

    fn run(&mut self, source: usize, sink: usize) -> f64 {
        let mut flow = 0.0;
        while self.bfs(source, sink) {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(source, sink, f64::INFINITY);
                if pushed == 0.0 {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }

    fn residual_reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[source] = true;
        let mut stack = vec![source];
        while let Some(v) = stack.pop() {
            for e in &self.adj[v] {
                if e.cap > 0.0 && !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }
}
