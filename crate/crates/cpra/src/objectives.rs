//! Relaxed cost functions and their exact gradients for the three supported
//! problems, plus discrete evaluation and violation accounting.
//!
//! Every relaxed loss agrees with its discrete counterpart on binary input;
//! `discrete_loss` recomputes the discrete form by counting, so the two
//! routes can be cross-checked by enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{CpraError, Result};
use crate::instances::{DbmInstance, Graph, ProblemInstance};

/// Non-negative penalty parameters for one shot.
///
/// Length is problem-dependent: 1 for independent set, 0 for max-cut, 4 for
/// bipartite matching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyVector(Vec<f64>);

impl PenaltyVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(CpraError::InvalidParameter(
                "penalty parameters must be finite and >= 0".into(),
            ));
        }
        Ok(Self(values))
    }

    pub fn mis(lambda: f64) -> Result<Self> {
        Self::new(vec![lambda])
    }

    pub fn maxcut() -> Self {
        Self(Vec::new())
    }

    pub fn dbm(lambda: [f64; 4]) -> Result<Self> {
        Self::new(lambda.to_vec())
    }

    /// Default penalties for an instance: the values carried on the instance
    /// itself (λ = 2 for MIS, none for max-cut, (2, 2, 12, 12)-style for DBM).
    pub fn default_for(instance: &ProblemInstance) -> Self {
        match instance {
            ProblemInstance::Mis { lambda, .. } => Self(vec![*lambda]),
            ProblemInstance::MaxCut { .. } => Self(Vec::new()),
            ProblemInstance::Dbm { lambda, .. } => Self(lambda.to_vec()),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn expect_mis(&self) -> Result<f64> {
        match self.0.as_slice() {
            [l] => Ok(*l),
            other => Err(CpraError::DimensionMismatch(format!(
                "MIS expects 1 penalty parameter, got {}",
                other.len()
            ))),
        }
    }

    pub fn expect_dbm(&self) -> Result<[f64; 4]> {
        match self.0.as_slice() {
            [a, b, c, d] => Ok([*a, *b, *c, *d]),
            other => Err(CpraError::DimensionMismatch(format!(
                "DBM expects 4 penalty parameters, got {}",
                other.len()
            ))),
        }
    }
}

/// Value of a relaxed loss split into its cost and penalty parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub loss: f64,
    pub cost: f64,
    pub penalty: f64,
}

impl EvalResult {
    fn new(cost: f64, penalty: f64) -> Self {
        Self { loss: cost + penalty, cost, penalty }
    }
}

fn check_len(p: &[f64], expected: usize, what: &str) -> Result<()> {
    if p.len() != expected {
        return Err(CpraError::DimensionMismatch(format!(
            "{what}: got length {}, expected {expected}",
            p.len()
        )));
    }
    Ok(())
}

/// Relaxed independent-set loss: `-Σ w_i p_i + λ Σ_{(i,j)∈E} p_i p_j`.
pub fn mis_loss(p: &[f64], graph: &Graph, lambda: f64) -> Result<EvalResult> {
    check_len(p, graph.num_nodes, "mis_loss")?;
    let cost: f64 = p
        .iter()
        .zip(&graph.node_weights)
        .map(|(&pi, &wi)| -wi * pi)
        .sum();
    let conflict: f64 = graph.edges.iter().map(|&(i, j, _)| p[i] * p[j]).sum();
    Ok(EvalResult::new(cost, lambda * conflict))
}

/// Gradient of [`mis_loss`]: `∂/∂p_i = -w_i + λ Σ_{j∈N(i)} p_j`.
pub fn mis_grad(p: &[f64], graph: &Graph, lambda: f64, out: &mut [f64]) -> Result<()> {
    check_len(p, graph.num_nodes, "mis_grad")?;
    check_len(out, graph.num_nodes, "mis_grad output")?;
    for (g, &w) in out.iter_mut().zip(&graph.node_weights) {
        *g = -w;
    }
    for &(i, j, _) in &graph.edges {
        out[i] += lambda * p[j];
        out[j] += lambda * p[i];
    }
    Ok(())
}

/// Relaxed max-cut loss: `Σ_{i<j} A_ij (2 p_i p_j - p_i - p_j)`.
///
/// At binary input, the negated loss is the cut weight. There is no penalty
/// part; the problem is unconstrained.
pub fn maxcut_loss(p: &[f64], graph: &Graph) -> Result<EvalResult> {
    check_len(p, graph.num_nodes, "maxcut_loss")?;
    let cost: f64 = graph
        .edges
        .iter()
        .map(|&(i, j, w)| w * (2.0 * p[i] * p[j] - p[i] - p[j]))
        .sum();
    Ok(EvalResult::new(cost, 0.0))
}

/// Gradient of [`maxcut_loss`]: `∂/∂p_i = Σ_{j≠i} A_ij (2 p_j - 1)`.
pub fn maxcut_grad(p: &[f64], graph: &Graph, out: &mut [f64]) -> Result<()> {
    check_len(p, graph.num_nodes, "maxcut_grad")?;
    check_len(out, graph.num_nodes, "maxcut_grad output")?;
    out.fill(0.0);
    for &(i, j, w) in &graph.edges {
        out[i] += w * (2.0 * p[j] - 1.0);
        out[j] += w * (2.0 * p[i] - 1.0);
    }
    Ok(())
}

fn relu(x: f64) -> f64 {
    x.max(0.0)
}

/// The four relu arguments of the matching loss at `p` (row excess per row,
/// column excess per column, and the two field-proportion arguments).
fn dbm_terms(p: &[f64], inst: &DbmInstance) -> (f64, Vec<f64>, Vec<f64>, f64, f64) {
    let (n1, n2) = (inst.n1, inst.n2);
    let mut reward = 0.0;
    let mut row = vec![-1.0; n1];
    let mut col = vec![-1.0; n2];
    let mut total = 0.0;
    let mut diff_field = 0.0;
    for i in 0..n1 {
        for j in 0..n2 {
            let x = p[i * n2 + j];
            reward += inst.reward[i][j] * x;
            row[i] += x;
            col[j] += x;
            total += x;
            if inst.field_flag[i][j] == 1 {
                diff_field += x;
            }
        }
    }
    let same_field = total - diff_field;
    let arg3 = inst.p * total - diff_field;
    let arg4 = inst.q * total - same_field;
    (reward, row, col, arg3, arg4)
}

/// Relaxed diverse-matching loss: reward plus the four relu penalty terms
/// (row degree, column degree, different-field share, same-field share).
pub fn dbm_loss(p: &[f64], inst: &DbmInstance, lambda: &[f64; 4]) -> Result<EvalResult> {
    check_len(p, inst.dim(), "dbm_loss")?;
    let (reward, row, col, arg3, arg4) = dbm_terms(p, inst);
    let penalty = lambda[0] * row.iter().map(|&r| relu(r)).sum::<f64>()
        + lambda[1] * col.iter().map(|&c| relu(c)).sum::<f64>()
        + lambda[2] * relu(arg3)
        + lambda[3] * relu(arg4);
    Ok(EvalResult::new(-reward, penalty))
}

/// Subgradient of [`dbm_loss`] with `relu'(0) = 0`.
pub fn dbm_grad(p: &[f64], inst: &DbmInstance, lambda: &[f64; 4], out: &mut [f64]) -> Result<()> {
    check_len(p, inst.dim(), "dbm_grad")?;
    check_len(out, inst.dim(), "dbm_grad output")?;
    let (n1, n2) = (inst.n1, inst.n2);
    let (_, row, col, arg3, arg4) = dbm_terms(p, inst);
    for i in 0..n1 {
        for j in 0..n2 {
            let m = f64::from(inst.field_flag[i][j]);
            let mut g = -inst.reward[i][j];
            if row[i] > 0.0 {
                g += lambda[0];
            }
            if col[j] > 0.0 {
                g += lambda[1];
            }
            if arg3 > 0.0 {
                g += lambda[2] * (inst.p - m);
            }
            if arg4 > 0.0 {
                g += lambda[3] * (inst.q - (1.0 - m));
            }
            out[i * n2 + j] = g;
        }
    }
    Ok(())
}

/// Per-constraint violation magnitudes of a binary assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ViolationReport {
    /// Number of edges with both endpoints selected.
    Mis { conflicted_edges: usize },
    /// Max-cut is unconstrained.
    MaxCut,
    /// The four relu arguments clamped at zero.
    Dbm {
        row_excess: Vec<f64>,
        col_excess: Vec<f64>,
        diff_field_shortfall: f64,
        same_field_shortfall: f64,
    },
}

impl ViolationReport {
    /// Total violation magnitude; zero iff the assignment is feasible.
    pub fn total(&self) -> f64 {
        match self {
            ViolationReport::Mis { conflicted_edges } => *conflicted_edges as f64,
            ViolationReport::MaxCut => 0.0,
            ViolationReport::Dbm { row_excess, col_excess, diff_field_shortfall, same_field_shortfall } => {
                row_excess.iter().sum::<f64>()
                    + col_excess.iter().sum::<f64>()
                    + diff_field_shortfall
                    + same_field_shortfall
            }
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.total() == 0.0
    }
}

fn check_binary(x: &[f64]) -> Result<()> {
    if x.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(CpraError::InvalidParameter("input vector is not binary".into()));
    }
    Ok(())
}

/// Reports constraint violations of a binary assignment.
pub fn violation_report(x: &[f64], instance: &ProblemInstance) -> Result<ViolationReport> {
    check_binary(x)?;
    check_len(x, instance.dim(), "violation_report")?;
    match instance {
        ProblemInstance::Mis { graph, .. } => {
            let conflicted = graph
                .edges
                .iter()
                .filter(|&&(i, j, _)| x[i] == 1.0 && x[j] == 1.0)
                .count();
            Ok(ViolationReport::Mis { conflicted_edges: conflicted })
        }
        ProblemInstance::MaxCut { .. } => Ok(ViolationReport::MaxCut),
        ProblemInstance::Dbm { instance: inst, .. } => {
            let (_, row, col, arg3, arg4) = dbm_terms(x, inst);
            Ok(ViolationReport::Dbm {
                row_excess: row.iter().map(|&r| relu(r)).collect(),
                col_excess: col.iter().map(|&c| relu(c)).collect(),
                diff_field_shortfall: relu(arg3),
                same_field_shortfall: relu(arg4),
            })
        }
    }
}

/// Cost part `f(x)` of the discrete objective at a binary point, in minimized
/// convention (more negative is better for MIS/max-cut/DBM alike).
pub fn discrete_cost(x: &[f64], instance: &ProblemInstance) -> Result<f64> {
    check_binary(x)?;
    check_len(x, instance.dim(), "discrete_cost")?;
    Ok(match instance {
        ProblemInstance::Mis { graph, .. } => x
            .iter()
            .zip(&graph.node_weights)
            .filter(|(&xi, _)| xi == 1.0)
            .map(|(_, &w)| -w)
            .sum(),
        ProblemInstance::MaxCut { graph } => {
            // -cut weight: an edge contributes -w when its endpoints differ.
            graph
                .edges
                .iter()
                .filter(|&&(i, j, _)| x[i] != x[j])
                .map(|&(_, _, w)| -w)
                .sum()
        }
        ProblemInstance::Dbm { instance: inst, .. } => {
            let mut reward = 0.0;
            for i in 0..inst.n1 {
                for j in 0..inst.n2 {
                    if x[i * inst.n2 + j] == 1.0 {
                        reward += inst.reward[i][j];
                    }
                }
            }
            -reward
        }
    })
}

/// Discrete penalized objective `l(x) = f(x) + Σ λ_i v_i(x)` computed by
/// counting, independently of the relaxed evaluation path.
pub fn discrete_loss(x: &[f64], instance: &ProblemInstance) -> Result<EvalResult> {
    let cost = discrete_cost(x, instance)?;
    let penalty = match instance {
        ProblemInstance::Mis { graph, lambda } => {
            let conflicted = graph
                .edges
                .iter()
                .filter(|&&(i, j, _)| x[i] == 1.0 && x[j] == 1.0)
                .count();
            lambda * conflicted as f64
        }
        ProblemInstance::MaxCut { .. } => 0.0,
        ProblemInstance::Dbm { lambda, .. } => match violation_report(x, instance)? {
            ViolationReport::Dbm { row_excess, col_excess, diff_field_shortfall, same_field_shortfall } => {
                lambda[0] * row_excess.iter().sum::<f64>()
                    + lambda[1] * col_excess.iter().sum::<f64>()
                    + lambda[2] * diff_field_shortfall
                    + lambda[3] * same_field_shortfall
            }
            _ => unreachable!(),
        },
    };
    Ok(EvalResult::new(cost, penalty))
}

/// Relaxed loss of `instance` with explicit penalties, dispatching by kind.
pub fn relaxed_loss(p: &[f64], instance: &ProblemInstance, lambda: &PenaltyVector) -> Result<EvalResult> {
    match instance {
        ProblemInstance::Mis { graph, .. } => mis_loss(p, graph, lambda.expect_mis()?),
        ProblemInstance::MaxCut { graph } => maxcut_loss(p, graph),
        ProblemInstance::Dbm { instance: inst, .. } => dbm_loss(p, inst, &lambda.expect_dbm()?),
    }
}

/// Gradient of [`relaxed_loss`] written into `out`.
pub fn relaxed_grad(
    p: &[f64],
    instance: &ProblemInstance,
    lambda: &PenaltyVector,
    out: &mut [f64],
) -> Result<()> {
    match instance {
        ProblemInstance::Mis { graph, .. } => mis_grad(p, graph, lambda.expect_mis()?, out),
        ProblemInstance::MaxCut { graph } => maxcut_grad(p, graph, out),
        ProblemInstance::Dbm { instance: inst, .. } => dbm_grad(p, inst, &lambda.expect_dbm()?, out),
    }
}
