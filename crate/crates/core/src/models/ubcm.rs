//! Soft configuration model: one positive multiplier per node such that
//! every expected degree matches the observed one, with dyad probability
//! `x_i x_j / (1 + x_i x_j)`.

use crate::error::{Error, Result};
use crate::models::solve_increasing;

/// Fitted node multipliers with solver diagnostics.
#[derive(Debug, Clone)]
pub struct UbcmParams {
    /// One multiplier per node; exactly zero for zero-degree nodes.
    pub x: Vec<f64>,
    /// Largest absolute degree mismatch at the returned solution.
    pub residual: f64,
    /// Whether `residual <= tol` was reached.
    pub converged: bool,
    pub iterations: usize,
}

/// Largest absolute degree mismatch of `x` against `degrees`.
pub fn ubcm_residual(degrees: &[usize], x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        if degrees[i] == 0 {
            continue;
        }
        let mut expected = 0.0;
        for j in 0..x.len() {
            if j != i {
                let t = x[i] * x[j];
                expected += t / (1.0 + t);
            }
        }
        worst = worst.max((expected - degrees[i] as f64).abs());
    }
    worst
}

/// Solves the expected-degree system by cyclic per-node root solves,
/// keeping the best iterate seen and stopping once `tol` is reached,
/// `max_iter` sweeps pass, or five sweeps go by without improvement.
///
/// Zero-degree nodes are fixed at `x = 0` and excluded. Degrees above
/// `n - 1` are rejected. A sequence whose system has no interior solution
/// comes back with `converged: false` and its best residual.
pub fn solve_ubcm(degrees: &[usize], tol: f64, max_iter: usize) -> Result<UbcmParams> {
    const PATIENCE: usize = 5;
    let n = degrees.len();
    for &k in degrees {
        if k > n.saturating_sub(1) {
            return Err(Error::UnrealizableDegree {
                degree: k as u64,
                max: n.saturating_sub(1) as u64,
                nodes: n,
            });
        }
    }
    let active: Vec<usize> = (0..n).filter(|&i| degrees[i] > 0).collect();
    if active.is_empty() {
        return Ok(UbcmParams {
            x: vec![0.0; n],
            residual: 0.0,
            converged: true,
            iterations: 0,
        });
    }

    let total_stubs: f64 = degrees.iter().sum::<usize>() as f64;
    let scale = total_stubs.sqrt();
    let mut x = vec![0.0; n];
    for &i in &active {
        x[i] = degrees[i] as f64 / scale;
    }

    let mut best_x = x.clone();
    let mut best_residual = ubcm_residual(degrees, &x);
    let mut stale = 0;
    let mut iterations = 0;

    for sweep in 1..=max_iter {
        iterations = sweep;
        for &i in &active {
            let target = degrees[i] as f64;
            let xi = solve_increasing(target, x[i], |z| {
                let mut v = 0.0;
                let mut d = 0.0;
                for &j in &active {
                    if j != i {
                        let t = z * x[j];
                        let q = 1.0 + t;
                        v += t / q;
                        d += x[j] / (q * q);
                    }
                }
                (v, d)
            });
            x[i] = xi;
        }
        let residual = ubcm_residual(degrees, &x);
        if residual < best_residual {
            best_residual = residual;
            best_x.copy_from_slice(&x);
            stale = 0;
        } else {
            stale += 1;
        }
        if best_residual <= tol || stale >= PATIENCE {
            break;
        }
    }

    Ok(UbcmParams {
        converged: best_residual <= tol,
        x: best_x,
        residual: best_residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cycle_multiplier_is_sqrt_two() {
        let p = solve_ubcm(&[2, 2, 2, 2], 1e-10, 200).unwrap();
        assert!(p.converged);
        for &xi in &p.x {
            assert!((xi - 2.0f64.sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn regular_degrees_share_one_multiplier() {
        let p = solve_ubcm(&[3, 3, 3, 3, 3, 3], 1e-10, 200).unwrap();
        assert!(p.converged);
        for &xi in &p.x[1..] {
            assert!((xi - p.x[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_degrees_stay_zero() {
        let p = solve_ubcm(&[2, 2, 2, 2, 0, 0], 1e-10, 200).unwrap();
        assert!(p.converged);
        assert_eq!(p.x[4], 0.0);
        assert_eq!(p.x[5], 0.0);
        assert!(p.x[0] > 0.0);
    }

    #[test]
    fn all_zero_sequence_is_trivial() {
        let p = solve_ubcm(&[0, 0, 0], 1e-10, 200).unwrap();
        assert!(p.converged);
        assert_eq!(p.residual, 0.0);
    }

    #[test]
    fn overlarge_degree_is_rejected() {
        assert!(matches!(
            solve_ubcm(&[4, 1, 1, 1], 1e-10, 200),
            Err(Error::UnrealizableDegree { degree: 4, .. })
        ));
    }

    #[test]
    fn star_hub_converges_toward_boundary() {
        // Hub of degree n-1 pushes its multiplier large but the residual
        // still falls below tolerance.
        let p = solve_ubcm(&[4, 1, 1, 1, 1], 1e-6, 500).unwrap();
        assert!(p.converged, "residual {}", p.residual);
        assert!(p.x[0] > p.x[1]);
    }

    #[test]
    fn residual_matches_reported() {
        let p = solve_ubcm(&[3, 2, 2, 1, 1, 1], 1e-10, 300).unwrap();
        assert!(p.converged);
        assert!((ubcm_residual(&[3, 2, 2, 1, 1, 1], &p.x) - p.residual).abs() < 1e-12);
    }
}
