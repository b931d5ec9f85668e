//! Diversity machinery: the standard-deviation penalty over shots, its
//! subgradient, Hamming-distance statistics, and the diversity score.
//!
//! The penalty `Ψ(P) = -S Σ_i STD[{P_is}_s]` is the continuous relaxation of
//! the max-sum Hamming distance: at binary matrices
//! `S² Σ_i VAR[{X_is}_s] = Σ_{s<l} d_H(X_:s, X_:l)` exactly. Variance and
//! standard deviation use the population (divide-by-`S`) convention; the
//! identity requires it.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{CpraError, Result};
use crate::objectives::ViolationReport;

/// Row variance below this floor is treated as exactly zero when forming the
/// STD subgradient (STD is not differentiable at 0).
const VARIANCE_FLOOR: f64 = 1e-12;

/// Rounded solutions of one run with per-shot scores.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionSet {
    /// Binary `N×S` matrix; column `s` is the shot-`s` solution.
    pub bits: Vec<Vec<f64>>,
    pub per_shot_cost: Vec<f64>,
    pub per_shot_violations: Vec<ViolationReport>,
    pub instance_ref: String,
}

impl SolutionSet {
    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    pub fn shots(&self) -> usize {
        self.bits.first().map_or(0, Vec::len)
    }

    pub fn column(&self, s: usize) -> Vec<f64> {
        self.bits.iter().map(|row| row[s]).collect()
    }

    pub fn to_matrix(&self) -> Array2<f64> {
        let (n, s) = (self.dim(), self.shots());
        Array2::from_shape_fn((n, s), |(i, j)| self.bits[i][j])
    }

    pub fn from_matrix(x: &Array2<f64>, per_shot_cost: Vec<f64>, per_shot_violations: Vec<ViolationReport>, instance_ref: String) -> Self {
        let bits = (0..x.nrows()).map(|i| x.row(i).to_vec()).collect();
        Self { bits, per_shot_cost, per_shot_violations, instance_ref }
    }
}

fn row_mean_var(row: ndarray::ArrayView1<'_, f64>) -> (f64, f64) {
    let s = row.len() as f64;
    let mean = row.sum() / s;
    let var = row.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / s;
    (mean, var)
}

fn check_shots(p: &Array2<f64>, what: &str) -> Result<()> {
    if p.ncols() < 2 {
        return Err(CpraError::InvalidParameter(format!("{what} needs at least 2 shots")));
    }
    Ok(())
}

/// `Ψ(P) = -S Σ_i STD[{P_is}_{1≤s≤S}]`; always ≤ 0, and 0 iff every row is
/// constant across shots.
pub fn std_diversity(p: &Array2<f64>) -> Result<f64> {
    check_shots(p, "std_diversity")?;
    let s = p.ncols() as f64;
    let sum: f64 = p.rows().into_iter().map(|r| row_mean_var(r).1.sqrt()).sum();
    Ok(-s * sum)
}

/// Subgradient of [`std_diversity`]: `-(P_is - mean_i)/STD_i` on rows with
/// variance above the floor, 0 on the rest.
pub fn std_diversity_grad(p: &Array2<f64>) -> Result<Array2<f64>> {
    check_shots(p, "std_diversity_grad")?;
    let mut out = Array2::zeros(p.raw_dim());
    for (i, row) in p.rows().into_iter().enumerate() {
        let (mean, var) = row_mean_var(row);
        if var <= VARIANCE_FLOOR {
            continue;
        }
        let std = var.sqrt();
        for (s, &x) in row.iter().enumerate() {
            out[[i, s]] = -(x - mean) / std;
        }
    }
    Ok(out)
}

/// `Σ_i VAR[{X_is}_s]` with population variance; accepts relaxed or binary
/// input.
pub fn variance_diversity(x: &Array2<f64>) -> Result<f64> {
    check_shots(x, "variance_diversity")?;
    Ok(x.rows().into_iter().map(|r| row_mean_var(r).1).sum())
}

/// Hamming distance between two equal-length binary vectors.
pub fn hamming(a: &[f64], b: &[f64]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(CpraError::DimensionMismatch(format!(
            "hamming: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).filter(|(&x, &y)| x != y).count())
}

/// Max-sum Hamming distance `Σ_{s<l} d_H(X_:s, X_:l)` by explicit pairwise
/// evaluation — the O(S²) reference for the variance identity.
pub fn max_sum_hamming(x: &Array2<f64>) -> Result<u64> {
    check_shots(x, "max_sum_hamming")?;
    let s = x.ncols();
    let mut total = 0u64;
    for a in 0..s {
        for b in (a + 1)..s {
            let d = x
                .column(a)
                .iter()
                .zip(x.column(b).iter())
                .filter(|(&u, &v)| u != v)
                .count();
            total += d as u64;
        }
    }
    Ok(total)
}

/// Normalized average pairwise Hamming distance,
/// `2/(N·S·(S-1)) Σ_{s<l} d_H`, in `[0, 1]`.
pub fn dscore(x: &Array2<f64>) -> Result<f64> {
    check_shots(x, "dscore")?;
    let (n, s) = (x.nrows() as f64, x.ncols() as f64);
    Ok(2.0 * max_sum_hamming(x)? as f64 / (n * s * (s - 1.0)))
}

/// Number of distinct columns.
pub fn unique_solutions(x: &Array2<f64>) -> usize {
    let mut seen: Vec<Vec<u8>> = Vec::new();
    for col in x.columns() {
        let key: Vec<u8> = col.iter().map(|&v| u8::from(v != 0.0)).collect();
        if !seen.contains(&key) {
            seen.push(key);
        }
    }
    seen.len()
}

/// All pairwise Hamming distances in `s < l` order.
pub fn hamming_histogram(x: &Array2<f64>) -> Result<Vec<usize>> {
    check_shots(x, "hamming_histogram")?;
    let s = x.ncols();
    let mut out = Vec::with_capacity(s * (s - 1) / 2);
    for a in 0..s {
        for b in (a + 1)..s {
            out.push(hamming(&x.column(a).to_vec(), &x.column(b).to_vec())?);
        }
    }
    Ok(out)
}

/// Instrumented variants counting entry visits, used to check the O(S) vs
/// O(S²) scaling claim without relying on wall clocks.
#[doc(hidden)]
pub fn variance_diversity_ops(x: &Array2<f64>) -> (f64, usize) {
    // Two passes per row: mean, then squared deviations.
    let ops = 2 * x.nrows() * x.ncols();
    (variance_diversity(x).expect("valid input"), ops)
}

#[doc(hidden)]
pub fn max_sum_hamming_ops(x: &Array2<f64>) -> (u64, usize) {
    let s = x.ncols();
    let ops = x.nrows() * s * (s - 1) / 2;
    (max_sum_hamming(x).expect("valid input"), ops)
}
