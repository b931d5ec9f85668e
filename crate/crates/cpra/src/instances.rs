//! Problem instances: graphs, diverse-bipartite-matching instances, and the
//! tagged union the solvers consume, plus generators and file I/O.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::Path;

use crate::container;
use crate::error::{CpraError, Result};

/// Restart cap for the pairing-model generator.
const RRG_MAX_RESTARTS: usize = 10_000;

/// Undirected simple graph with optional edge weights and node weights.
///
/// Edges are stored once with `i < j`. Node weights default to 1 and are only
/// consumed by the weighted independent-set objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub node_weights: Vec<f64>,
}

impl Graph {
    /// Builds a graph from an edge list, validating simplicity.
    pub fn new(num_nodes: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if num_nodes == 0 {
            return Err(CpraError::InvalidParameter("graph needs at least one node".into()));
        }
        let mut seen = HashSet::new();
        for &(i, j, _) in &edges {
            if i >= j {
                return Err(CpraError::InvalidParameter(format!(
                    "edge ({i}, {j}) must satisfy i < j"
                )));
            }
            if j >= num_nodes {
                return Err(CpraError::InvalidParameter(format!(
                    "edge ({i}, {j}) out of range for {num_nodes} nodes"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(CpraError::InvalidParameter(format!("duplicate edge ({i}, {j})")));
            }
        }
        Ok(Self {
            num_nodes,
            edges,
            node_weights: vec![1.0; num_nodes],
        })
    }

    /// Same graph with the given node weights (weighted independent set).
    pub fn with_node_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.num_nodes {
            return Err(CpraError::DimensionMismatch(format!(
                "{} node weights for {} nodes",
                weights.len(),
                self.num_nodes
            )));
        }
        self.node_weights = weights;
        Ok(self)
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Adjacency lists: `(neighbor, weight)` per node, in insertion order.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(i, j, w) in &self.edges {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.num_nodes];
        for &(i, j, _) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// Checks simplicity and, when `degree` is given, exact regularity.
    pub fn audit(&self, degree: Option<usize>) -> Result<()> {
        let mut seen = HashSet::new();
        for &(i, j, _) in &self.edges {
            if i == j {
                return Err(CpraError::InvalidParameter(format!("self-loop at {i}")));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(CpraError::InvalidParameter(format!("duplicate edge ({i}, {j})")));
            }
        }
        if let Some(d) = degree {
            for (v, deg) in self.degrees().iter().enumerate() {
                if *deg != d {
                    return Err(CpraError::InvalidParameter(format!(
                        "node {v} has degree {deg}, expected {d}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Diverse bipartite matching instance: reward matrix `C`, different-field
/// indicator `M`, and the same/different-field proportion thresholds `p`, `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbmInstance {
    pub n1: usize,
    pub n2: usize,
    /// Row-major `n1 x n2` reward matrix.
    pub reward: Vec<Vec<f64>>,
    /// Row-major `n1 x n2` indicator, 1 where the endpoints' fields differ.
    pub field_flag: Vec<Vec<u8>>,
    pub p: f64,
    pub q: f64,
}

impl DbmInstance {
    pub fn new(
        n1: usize,
        n2: usize,
        reward: Vec<Vec<f64>>,
        field_flag: Vec<Vec<u8>>,
        p: f64,
        q: f64,
    ) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(CpraError::InvalidParameter("DBM sides must be positive".into()));
        }
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
            return Err(CpraError::InvalidParameter("p and q must lie in [0, 1]".into()));
        }
        let check_shape = |name: &str, rows: usize| {
            if rows != n1 {
                return Err(CpraError::DimensionMismatch(format!("{name} has {rows} rows, expected {n1}")));
            }
            Ok(())
        };
        check_shape("reward", reward.len())?;
        check_shape("field_flag", field_flag.len())?;
        for row in &reward {
            if row.len() != n2 {
                return Err(CpraError::DimensionMismatch("reward row width".into()));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(CpraError::NonFinite("reward entry".into()));
            }
        }
        for row in &field_flag {
            if row.len() != n2 {
                return Err(CpraError::DimensionMismatch("field_flag row width".into()));
            }
            if row.iter().any(|&x| x > 1) {
                return Err(CpraError::InvalidParameter("field_flag entries must be 0/1".into()));
            }
        }
        Ok(Self { n1, n2, reward, field_flag, p, q })
    }

    /// Decision-vector length (variables stored flattened row-major).
    pub fn dim(&self) -> usize {
        self.n1 * self.n2
    }
}

/// A concrete optimization problem: the instance data plus its penalty
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum ProblemInstance {
    Mis { graph: Graph, lambda: f64 },
    MaxCut { graph: Graph },
    Dbm { instance: DbmInstance, lambda: [f64; 4] },
}

impl ProblemInstance {
    /// Length of the binary decision vector.
    pub fn dim(&self) -> usize {
        match self {
            ProblemInstance::Mis { graph, .. } | ProblemInstance::MaxCut { graph } => graph.num_nodes,
            ProblemInstance::Dbm { instance, .. } => instance.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ProblemInstance::Mis { .. } => "mis",
            ProblemInstance::MaxCut { .. } => "maxcut",
            ProblemInstance::Dbm { .. } => "dbm",
        }
    }

    pub fn graph(&self) -> Option<&Graph> {
        match self {
            ProblemInstance::Mis { graph, .. } | ProblemInstance::MaxCut { graph } => Some(graph),
            ProblemInstance::Dbm { .. } => None,
        }
    }
}

/// Generates a random `d`-regular simple graph on `n` nodes via the pairing
/// model: shuffle the stub multiset, pair consecutive stubs, and restart from
/// scratch on any self-loop or duplicate edge.
pub fn generate_rrg(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n == 0 || d == 0 {
        return Err(CpraError::InvalidParameter("n and d must be positive".into()));
    }
    if d >= n {
        return Err(CpraError::InvalidParameter(format!("degree {d} must be < n = {n}")));
    }
    if (n * d) % 2 != 0 {
        return Err(CpraError::InvalidParameter(format!(
            "n*d = {} is odd; no {d}-regular graph on {n} nodes exists",
            n * d
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();

    'restart: for _ in 0..RRG_MAX_RESTARTS {
        stubs.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(n * d / 2);
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'restart;
            }
            edges.push((u, v, 1.0));
        }
        edges.sort_unstable_by_key(|&(i, j, _)| (i, j));
        return Graph::new(n, edges);
    }
    Err(CpraError::GenerationFailure(format!(
        "no simple pairing found for (n={n}, d={d}) within {RRG_MAX_RESTARTS} restarts"
    )))
}

/// Parses the Gset text format: a header line `N M` followed by `M` lines
/// `i j w` with 1-based node indices.
pub fn parse_gset(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CpraError::Parse { line: 1, message: "empty input".into() })?;
    let mut it = header.split_whitespace();
    let parse_usize = |tok: Option<&str>, line: usize, what: &str| -> Result<usize> {
        tok.ok_or_else(|| CpraError::Parse { line, message: format!("missing {what}") })?
            .parse::<usize>()
            .map_err(|e| CpraError::Parse { line, message: format!("bad {what}: {e}") })
    };
    let n = parse_usize(it.next(), 1, "node count")?;
    let m = parse_usize(it.next(), 1, "edge count")?;

    let mut edges = Vec::with_capacity(m);
    let mut seen = HashSet::with_capacity(m);
    let mut parsed = 0usize;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let i = parse_usize(it.next(), line_no, "source index")?;
        let j = parse_usize(it.next(), line_no, "target index")?;
        let w: f64 = match it.next() {
            Some(tok) => tok
                .parse()
                .map_err(|e| CpraError::Parse { line: line_no, message: format!("bad weight: {e}") })?,
            None => 1.0,
        };
        if i < 1 || i > n || j < 1 || j > n {
            return Err(CpraError::Parse {
                line: line_no,
                message: format!("index out of range: ({i}, {j}) with n = {n}"),
            });
        }
        if i == j {
            return Err(CpraError::Parse { line: line_no, message: format!("self-loop at {i}") });
        }
        let (a, b) = ((i - 1).min(j - 1), (i - 1).max(j - 1));
        if !seen.insert((a, b)) {
            return Err(CpraError::Parse { line: line_no, message: format!("duplicate edge ({i}, {j})") });
        }
        edges.push((a, b, w));
        parsed += 1;
    }
    if parsed != m {
        return Err(CpraError::Parse {
            line: parsed + 1,
            message: format!("expected {m} edges, found {parsed}"),
        });
    }
    edges.sort_unstable_by_key(|&(i, j, _)| (i, j));
    Graph::new(n, edges)
}

/// Writes a graph in the Gset text format (inverse of [`parse_gset`]).
pub fn serialize_gset(graph: &Graph) -> String {
    let mut out = format!("{} {}\n", graph.num_nodes, graph.num_edges());
    for &(i, j, w) in &graph.edges {
        if w == w.trunc() && w.abs() < 1e15 {
            out.push_str(&format!("{} {} {}\n", i + 1, j + 1, w as i64));
        } else {
            out.push_str(&format!("{} {} {}\n", i + 1, j + 1, w));
        }
    }
    out
}

/// Generates a synthetic DBM instance: i.i.d. uniform rewards on `[0, 1]` and
/// a two-class field labeling with `M_ij = 1` iff the endpoint labels differ.
pub fn generate_synthetic_dbm(n1: usize, n2: usize, p: f64, q: f64, seed: u64) -> Result<DbmInstance> {
    if n1 == 0 || n2 == 0 {
        return Err(CpraError::InvalidParameter("DBM sides must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reward: Vec<Vec<f64>> = (0..n1)
        .map(|_| (0..n2).map(|_| rng.random::<f64>()).collect())
        .collect();
    let left_labels: Vec<u8> = (0..n1).map(|_| rng.random_range(0..2u8)).collect();
    let right_labels: Vec<u8> = (0..n2).map(|_| rng.random_range(0..2u8)).collect();
    let field_flag: Vec<Vec<u8>> = (0..n1)
        .map(|i| (0..n2).map(|j| u8::from(left_labels[i] != right_labels[j])).collect())
        .collect();
    DbmInstance::new(n1, n2, reward, field_flag, p, q)
}

/// Node-weight vectors drawn i.i.d. uniform on `[lo, hi)`, one per variant.
///
/// Used to spin a single graph into a family of weighted independent-set
/// tasks for the multi-instance and two-stage drivers.
pub fn random_node_weights(n: usize, count: usize, lo: f64, hi: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(CpraError::InvalidParameter("need finite lo < hi".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| (0..n).map(|_| rng.random_range(lo..hi)).collect())
        .collect())
}

const INSTANCE_KIND: &str = "problem_instance";

pub fn save_instance(instance: &ProblemInstance, path: &Path) -> Result<()> {
    container::save(path, INSTANCE_KIND, instance)
}

pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    container::load(path, INSTANCE_KIND)
}
