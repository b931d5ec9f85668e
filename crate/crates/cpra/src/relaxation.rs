//! The annealed entropy term over the relaxed matrix, its schedule, and
//! rounding back to binary solutions.
//!
//! The entropy `S(P) = Σ_is (1 - (2 P_is - 1)^α)` is maximal at the
//! half-integral matrix and zero exactly at binary matrices. Its weight γ is
//! annealed from negative (smoothing: pulls every entry to 1/2) to positive
//! (sharpening: pushes every entry to {0, 1}).

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{CpraError, Result};

/// Augmented continuous matrix `P ∈ [0,1]^{N×S}`; column `s` is the shot-`s`
/// relaxed solution.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedMatrix(Array2<f64>);

impl RelaxedMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        if entries.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(CpraError::InvalidParameter("relaxed entries must lie in [0, 1]".into()));
        }
        Ok(Self(entries))
    }

    /// Number of decision variables (rows).
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Number of shots (columns).
    pub fn shots(&self) -> usize {
        self.0.ncols()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn column_vec(&self, s: usize) -> Vec<f64> {
        self.0.column(s).to_vec()
    }
}

/// Annealing state: curvature weight γ, additive step ε, even exponent α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealState {
    pub gamma: f64,
    pub rate: f64,
    pub alpha: u32,
    pub epoch: usize,
}

impl AnnealState {
    pub fn new(gamma: f64, rate: f64, alpha: u32) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(CpraError::InvalidParameter("scheduling rate must be > 0".into()));
        }
        check_alpha(alpha)?;
        Ok(Self { gamma, rate, alpha, epoch: 0 })
    }
}

fn check_alpha(alpha: u32) -> Result<()> {
    if alpha == 0 || alpha % 2 != 0 {
        return Err(CpraError::InvalidParameter(format!(
            "curvature exponent must be a positive even integer, got {alpha}"
        )));
    }
    Ok(())
}

/// `S(P) = Σ_is (1 - (2 P_is - 1)^α)`, in `[0, N·S]`.
pub fn entropy_value(p: &Array2<f64>, alpha: u32) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(p.iter().map(|&x| 1.0 - (2.0 * x - 1.0).powi(alpha as i32)).sum())
}

/// Gradient of the weighted term `γ·S(P)`:
/// `∂/∂P_is = -2γα (2 P_is - 1)^{α-1}`.
pub fn entropy_grad(p: &Array2<f64>, gamma: f64, alpha: u32) -> Result<Array2<f64>> {
    check_alpha(alpha)?;
    let coeff = -2.0 * gamma * f64::from(alpha);
    Ok(p.mapv(|x| coeff * (2.0 * x - 1.0).powi(alpha as i32 - 1)))
}

/// One annealing step: `γ ← γ + ε`, epoch counter advances.
pub fn schedule_step(state: AnnealState) -> AnnealState {
    AnnealState {
        gamma: state.gamma + state.rate,
        epoch: state.epoch + 1,
        ..state
    }
}

/// Threshold projection: entries `≤ 0.5` map to 0, everything else to 1.
pub fn round_matrix(p: &RelaxedMatrix) -> Array2<f64> {
    p.entries().mapv(|x| if x <= 0.5 { 0.0 } else { 1.0 })
}

/// Worst-case distance of any entry to the nearest binary value,
/// `max_is min(P_is, 1 - P_is)`; 0 for binary matrices, 0.5 at P ≡ 1/2.
pub fn binariness(p: &RelaxedMatrix) -> f64 {
    p.entries()
        .iter()
        .map(|&x| x.min(1.0 - x))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn entropy_extremes() {
        let half = Array2::from_elem((4, 3), 0.5);
        assert_eq!(entropy_value(&half, 2).unwrap(), 12.0);
        let binary = array![[0.0, 1.0], [1.0, 0.0]];
        assert_eq!(entropy_value(&binary, 2).unwrap(), 0.0);
        let single = array![[0.75]];
        assert!((entropy_value(&single, 2).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn entropy_rejects_odd_alpha() {
        let p = Array2::from_elem((2, 2), 0.5);
        assert!(entropy_value(&p, 3).is_err());
        assert!(entropy_grad(&p, 1.0, 1).is_err());
        assert!(AnnealState::new(-20.0, 1e-3, 5).is_err());
    }

    #[test]
    fn entropy_grad_values_and_fd() {
        let p = array![[0.5, 1.0]];
        let g = entropy_grad(&p, 1.0, 2).unwrap();
        assert_eq!(g[[0, 0]], 0.0);
        assert_eq!(g[[0, 1]], -4.0);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = Array2::from_shape_fn((5, 4), |_| rng.random::<f64>());
        for alpha in [2u32, 4] {
            let gamma = 1.7;
            let grad = entropy_grad(&p, gamma, alpha).unwrap();
            let h = 1e-6;
            for idx in [(0, 0), (2, 3), (4, 1)] {
                let mut hi = p.clone();
                hi[idx] += h;
                let mut lo = p.clone();
                lo[idx] -= h;
                let fd = gamma * (entropy_value(&hi, alpha).unwrap() - entropy_value(&lo, alpha).unwrap())
                    / (2.0 * h);
                let rel = (grad[idx] - fd).abs() / grad[idx].abs().max(1.0);
                assert!(rel <= 1e-6, "alpha={alpha} idx={idx:?} rel={rel}");
            }
        }
    }

    #[test]
    fn schedule_is_additive() {
        let mut s = AnnealState::new(-20.0, 1e-3, 2).unwrap();
        s = schedule_step(s);
        assert!((s.gamma - (-19.999)).abs() < 1e-12);
        assert_eq!(s.epoch, 1);
        for _ in 1..20_000 {
            s = schedule_step(s);
        }
        assert!(s.gamma.abs() < 1e-9);
        for _ in 0..20_000 {
            s = schedule_step(s);
        }
        assert!((s.gamma - 20.0).abs() < 1e-9);
    }

    #[test]
    fn rounding_threshold_and_idempotence() {
        let p = RelaxedMatrix::new(array![[0.5, 0.500001], [0.0, 1.0]]).unwrap();
        let x = round_matrix(&p);
        assert_eq!(x, array![[0.0, 1.0], [0.0, 1.0]]);
        let again = round_matrix(&RelaxedMatrix::new(x.clone()).unwrap());
        assert_eq!(again, x);
    }

    #[test]
    fn binariness_cases() {
        let binary = RelaxedMatrix::new(array![[0.0, 1.0]]).unwrap();
        assert_eq!(binariness(&binary), 0.0);
        let half = RelaxedMatrix::new(Array2::from_elem((2, 2), 0.5)).unwrap();
        assert_eq!(binariness(&half), 0.5);
        let mixed = RelaxedMatrix::new(array![[0.1, 0.8]]).unwrap();
        assert!((binariness(&mixed) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn phi_grid_maximum_symmetry_and_concavity() {
        // φ(p) = 1 - (2p-1)^α on a 1e-3 grid: max 1 at 0.5, min 0 at the
        // endpoints, symmetric about 1/2; γφ concave for γ>0, convex for γ<0.
        let grid: Vec<f64> = (0..=1000).map(|k| k as f64 / 1000.0).collect();
        for alpha in [2u32, 4, 6] {
            let phi = |p: f64| 1.0 - (2.0 * p - 1.0).powi(alpha as i32);
            let values: Vec<f64> = grid.iter().map(|&p| phi(p)).collect();
            let max = values.iter().cloned().fold(f64::MIN, f64::max);
            assert!((max - 1.0).abs() < 1e-12);
            assert!((phi(0.5) - 1.0).abs() < 1e-12);
            assert_eq!(values[0], 0.0);
            assert_eq!(values[1000], 0.0);
            for k in 0..=1000 {
                assert!((phi(grid[k]) - phi(1.0 - grid[k])).abs() < 1e-12);
            }
            let h = 1e-3;
            for gamma in [2.5, -2.5] {
                for k in 1..1000 {
                    let second = gamma * (values[k + 1] - 2.0 * values[k] + values[k - 1]);
                    if gamma > 0.0 {
                        assert!(second <= 1e-12);
                    } else {
                        assert!(second >= -1e-12);
                    }
                    if alpha == 2 {
                        let exact = -4.0 * gamma * f64::from(alpha) * h * h;
                        assert!((second - exact).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn limit_behavior_under_projected_gradient_descent() {
        // Minimizing γ·S(P) alone: γ < 0 drives P to 1/2, γ > 0 to binary.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let start = Array2::from_shape_fn((8, 5), |_| rng.random_range(0.05..0.95));
        let run = |gamma: f64| {
            let mut p = start.clone();
            for _ in 0..2000 {
                let g = entropy_grad(&p, gamma, 2).unwrap();
                p.zip_mut_with(&g, |x, &d| *x = (*x - 1e-3 * d).clamp(0.0, 1.0));
            }
            p
        };
        let smoothed = run(-50.0);
        assert!(smoothed.iter().all(|&x| (x - 0.5).abs() < 0.02));
        let sharpened = run(50.0);
        assert!(sharpened.iter().all(|&x| x.min(1.0 - x) < 0.01));
    }
}
