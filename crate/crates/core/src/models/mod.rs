//! Null models for binary undirected graphs and their likelihood scores.
//!
//! Three nested families: a blockwise Bernoulli model with closed-form
//! fits ([`sbm`]), a degree-preserving soft configuration model
//! ([`ubcm`]), and a degree-corrected block model combining both
//! ([`dcsbm`]). Model selection uses an information criterion that
//! penalizes parameter count against a configurable sample size.

pub mod dcsbm;
pub mod sbm;
pub mod ubcm;

pub use dcsbm::{
    bic_dcsbm, loglik_dcsbm, solve_chi_decoupled, solve_dcsbm_joint, DcSbmParams, FitMode,
};
pub use sbm::{bic_sbm, fit_sbm, loglik_sbm, SbmParams};
pub use ubcm::{solve_ubcm, UbcmParams};

/// Sample-size convention for the information criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleSize {
    /// Number of dyads `N (N - 1) / 2`.
    #[default]
    Dyads,
    /// Number of nodes `N`.
    Nodes,
}

impl SampleSize {
    /// Sample count for a graph with `nodes` nodes.
    pub fn count(self, nodes: usize) -> f64 {
        match self {
            SampleSize::Dyads => nodes as f64 * (nodes as f64 - 1.0) / 2.0,
            SampleSize::Nodes => nodes as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SampleSize::Dyads => "dyads",
            SampleSize::Nodes => "nodes",
        }
    }
}

/// Information criterion record: `bic = param_count ln(sample_size) - 2 loglik`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BicScore {
    pub loglik: f64,
    pub param_count: usize,
    pub sample_size: f64,
    pub convention: SampleSize,
    pub bic: f64,
}

impl BicScore {
    pub fn new(loglik: f64, param_count: usize, convention: SampleSize, nodes: usize) -> Self {
        let sample_size = convention.count(nodes);
        Self {
            loglik,
            param_count,
            sample_size,
            convention,
            bic: param_count as f64 * sample_size.ln() - 2.0 * loglik,
        }
    }
}

/// Finds `z >= 0` with `f(z) = target` for increasing `f` with `f(0) = 0`.
///
/// `fdf` returns the value and derivative. The bracket is grown
/// geometrically, then tightened by safeguarded Newton steps. Targets at
/// or beyond the supremum of `f` saturate at a large cap.
pub(crate) fn solve_increasing(
    target: f64,
    guess: f64,
    mut fdf: impl FnMut(f64) -> (f64, f64),
) -> f64 {
    const CAP: f64 = 1e30;
    if target <= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0f64;
    let mut hi = guess.max(1e-12);
    loop {
        let (v, _) = fdf(hi);
        if v >= target {
            break;
        }
        lo = hi;
        hi *= 4.0;
        if hi > CAP {
            return CAP;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..120 {
        let (v, d) = fdf(z);
        if (v - target).abs() <= 1e-13 * target.max(1.0) {
            return z;
        }
        if v > target {
            hi = z;
        } else {
            lo = z;
        }
        let newton = z - (v - target) / d;
        z = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * hi {
            return 0.5 * (lo + hi);
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_size_conventions() {
        assert_eq!(SampleSize::Dyads.count(4), 6.0);
        assert_eq!(SampleSize::Nodes.count(4), 4.0);
    }

    #[test]
    fn bic_identity() {
        let s = BicScore::new(-2.2493, 3, SampleSize::Dyads, 4);
        assert!((s.bic - (3.0 * 6.0f64.ln() + 4.4986)).abs() < 1e-3);
        assert!((s.bic - (s.param_count as f64 * s.sample_size.ln() - 2.0 * s.loglik)).abs() < 1e-12);
    }

    #[test]
    fn root_finder_hits_simple_targets() {
        // f(z) = 2z/(1+z): root of f = 1 at z = 1.
        let z = solve_increasing(1.0, 0.1, |z| {
            (2.0 * z / (1.0 + z), 2.0 / ((1.0 + z) * (1.0 + z)))
        });
        assert!((z - 1.0).abs() < 1e-10);
        assert_eq!(solve_increasing(0.0, 1.0, |z| (z, 1.0)), 0.0);
        // Unreachable target saturates.
        let z = solve_increasing(3.0, 1.0, |z| {
            (2.0 * z / (1.0 + z), 2.0 / ((1.0 + z) * (1.0 + z)))
        });
        assert!(z >= 1e29);
    }
}
