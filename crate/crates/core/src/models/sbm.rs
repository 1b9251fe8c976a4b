//! Blockwise Bernoulli model: every dyad inside a block pair shares one
//! connection probability. Fits are closed-form dyad fractions.

use crate::error::Result;
use crate::graph::Graph;
use crate::models::{BicScore, SampleSize};
use crate::partition::{block_stats, BlockStats, Partition};

/// Symmetric block connection probabilities.
#[derive(Debug, Clone)]
pub struct SbmParams {
    k: usize,
    p: Vec<f64>,
}

impl SbmParams {
    pub fn block_count(&self) -> usize {
        self.k
    }

    /// Connection probability for the block pair `(r, s)`.
    pub fn p(&self, r: usize, s: usize) -> f64 {
        self.p[r * self.k + s]
    }
}

/// Dyads inside the pair `(r, s)`: `C(n_r, 2)` on the diagonal, `n_r n_s`
/// off it.
pub(crate) fn pair_dyads(stats: &BlockStats, r: usize, s: usize) -> u64 {
    if r == s {
        let n = stats.size(r);
        n * n.saturating_sub(1) / 2
    } else {
        stats.size(r) * stats.size(s)
    }
}

pub(crate) fn pair_edges(stats: &BlockStats, r: usize, s: usize) -> u64 {
    if r == s {
        stats.intra(r)
    } else {
        stats.inter(r, s)
    }
}

/// Log-likelihood of one block pair at its fitted probability `l / d`.
/// Zero when the pair has no dyads or fits `p` of zero or one exactly.
pub(crate) fn fitted_pair_term(l: u64, d: u64) -> f64 {
    if d == 0 || l == 0 || l == d {
        return 0.0;
    }
    let p = l as f64 / d as f64;
    l as f64 * p.ln() + (d - l) as f64 * (1.0 - p).ln()
}

/// Maximum-likelihood fit: each pair probability is its edge fraction.
/// Blocks of size one get a within probability of zero.
pub fn fit_sbm(stats: &BlockStats) -> SbmParams {
    let k = stats.block_count();
    debug_assert_eq!(k, stats.slot_count(), "fit requires densified stats");
    let mut p = vec![0.0; k * k];
    for r in 0..k {
        for s in r..k {
            let d = pair_dyads(stats, r, s);
            let v = if d == 0 {
                0.0
            } else {
                pair_edges(stats, r, s) as f64 / d as f64
            };
            p[r * k + s] = v;
            p[s * k + r] = v;
        }
    }
    SbmParams { k, p }
}

/// Log-likelihood of the observed block counts under arbitrary pair
/// probabilities. Probability zero with observed edges (or one with
/// observed non-edges) yields negative infinity.
pub fn loglik_sbm(stats: &BlockStats, params: &SbmParams) -> f64 {
    debug_assert_eq!(params.k, stats.block_count());
    let mut ll = 0.0;
    for r in 0..params.k {
        for s in r..params.k {
            let d = pair_dyads(stats, r, s);
            if d == 0 {
                continue;
            }
            let l = pair_edges(stats, r, s);
            let p = params.p(r, s);
            if l > 0 {
                ll += l as f64 * p.ln();
            }
            if d - l > 0 {
                ll += (d - l) as f64 * (-p).ln_1p();
            }
        }
    }
    ll
}

/// Log-likelihood at the fitted probabilities, computed blockwise.
pub(crate) fn fitted_loglik(stats: &BlockStats) -> f64 {
    let k = stats.slot_count();
    let mut ll = 0.0;
    for r in 0..k {
        for s in r..k {
            ll += fitted_pair_term(pair_edges(stats, r, s), pair_dyads(stats, r, s));
        }
    }
    ll
}

/// Information criterion of the fitted blockwise Bernoulli model:
/// `k (k + 1) / 2` parameters against the chosen sample size.
pub fn bic_sbm(g: &Graph, p: &Partition, convention: SampleSize) -> Result<BicScore> {
    let stats = block_stats(g, p)?;
    let k = stats.block_count();
    Ok(BicScore::new(
        fitted_loglik(&stats),
        k * (k + 1) / 2,
        convention,
        g.n(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    /// Blocks {0, 1} and {2, 3} over edges (0,1), (2,3), (0,2).
    fn four_node() -> (Graph, Partition) {
        let g = build_graph(&[(0, 1), (2, 3), (0, 2)], None).unwrap();
        let p = Partition::from_labels(vec![0, 0, 1, 1]).unwrap();
        (g, p)
    }

    #[test]
    fn closed_form_fit_on_four_nodes() {
        let (g, p) = four_node();
        let s = block_stats(&g, &p).unwrap();
        let params = fit_sbm(&s);
        assert_eq!(params.p(0, 0), 1.0);
        assert_eq!(params.p(1, 1), 1.0);
        assert_eq!(params.p(0, 1), 0.25);
        assert_eq!(params.p(1, 0), 0.25);
    }

    #[test]
    fn loglik_on_four_nodes() {
        let (g, p) = four_node();
        let s = block_stats(&g, &p).unwrap();
        let ll = loglik_sbm(&s, &fit_sbm(&s));
        let expect = 0.25f64.ln() + 3.0 * 0.75f64.ln();
        assert!((ll - expect).abs() < 1e-12);
        assert!((ll + 2.2493).abs() < 1e-4);
        assert!((fitted_loglik(&s) - expect).abs() < 1e-12);
    }

    #[test]
    fn bic_on_four_nodes() {
        let (g, p) = four_node();
        let score = bic_sbm(&g, &p, SampleSize::Dyads).unwrap();
        assert_eq!(score.param_count, 3);
        assert_eq!(score.sample_size, 6.0);
        assert!((score.bic - 9.8740).abs() < 1e-4);
    }

    #[test]
    fn single_block_triangle() {
        let g = build_graph(&[(0, 1), (1, 2), (2, 0)], None).unwrap();
        let score = bic_sbm(&g, &Partition::single_block(3), SampleSize::Dyads).unwrap();
        assert_eq!(score.loglik, 0.0);
        assert!((score.bic - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn singleton_blocks_probability_zero() {
        let g = build_graph(&[(0, 1)], Some(3)).unwrap();
        let p = Partition::singletons(3);
        let s = block_stats(&g, &p).unwrap();
        let params = fit_sbm(&s);
        assert_eq!(params.p(0, 0), 0.0);
        assert_eq!(params.p(0, 1), 1.0);
        assert_eq!(params.p(1, 2), 0.0);
    }

    #[test]
    fn all_singletons_on_empty_graph_scores_zero() {
        let g = build_graph(&[], Some(4)).unwrap();
        let score = bic_sbm(&g, &Partition::singletons(4), SampleSize::Dyads).unwrap();
        assert_eq!(score.loglik, 0.0);
        assert_eq!(score.param_count, 10);
    }

    #[test]
    fn off_fit_probabilities_can_reach_negative_infinity() {
        let (g, p) = four_node();
        let s = block_stats(&g, &p).unwrap();
        let mut params = fit_sbm(&s);
        params.p[0] = 0.0; // observed edge inside block 0
        assert_eq!(loglik_sbm(&s, &params), f64::NEG_INFINITY);
    }
}
