//! Degree-corrected block model: dyad probability
//! `x_i x_j chi_rs / (1 + x_i x_j chi_rs)` with node multipliers `x` and
//! block affinities `chi`.
//!
//! Two fitting modes. The decoupled fit freezes `x` at the soft
//! configuration solution and solves each pair affinity by a univariate
//! root find. The joint fit alternates exact per-coordinate solves of the
//! degree and block-count equations, warm-started from the decoupled one.
//!
//! A pair whose edge count equals its dyad count has no finite affinity;
//! it is marked saturated, its dyads carry probability one, and it
//! contributes zero log-likelihood.

use crate::error::Result;
use crate::graph::Graph;
use crate::models::{solve_increasing, BicScore, SampleSize, UbcmParams};
use crate::partition::{block_stats, BlockStats, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    Decoupled,
    Joint,
}

/// Fitted degree-corrected model with solver diagnostics.
#[derive(Debug, Clone)]
pub struct DcSbmParams {
    /// One multiplier per node; zero for nodes excluded from the solve.
    pub x: Vec<f64>,
    k: usize,
    /// Symmetric affinities; infinite on saturated pairs.
    chi: Vec<f64>,
    saturated: Vec<bool>,
    /// Largest absolute mismatch of the degree equations.
    pub degree_residual: f64,
    /// Largest absolute mismatch of the block-count equations.
    pub block_residual: f64,
    pub converged: bool,
    pub mode: FitMode,
}

impl DcSbmParams {
    pub fn block_count(&self) -> usize {
        self.k
    }

    pub fn chi(&self, r: usize, s: usize) -> f64 {
        self.chi[r * self.k + s]
    }

    pub fn is_saturated(&self, r: usize, s: usize) -> bool {
        self.saturated[r * self.k + s]
    }
}

const DEFAULT_TOL: f64 = 1e-8;
const PATIENCE: usize = 5;
const MAX_SWEEPS: usize = 300;

/// Multiplier products of one block pair, zero factors skipped.
fn pair_products(same: bool, a: &[u32], b: &[u32], x: &[f64]) -> Vec<f64> {
    let mut ts = Vec::new();
    if same {
        for (idx, &i) in a.iter().enumerate() {
            let xi = x[i as usize];
            if xi == 0.0 {
                continue;
            }
            for &j in &a[idx + 1..] {
                let t = xi * x[j as usize];
                if t > 0.0 {
                    ts.push(t);
                }
            }
        }
    } else {
        for &i in a {
            let xi = x[i as usize];
            if xi == 0.0 {
                continue;
            }
            for &j in b {
                let t = xi * x[j as usize];
                if t > 0.0 {
                    ts.push(t);
                }
            }
        }
    }
    ts
}

/// Expected edge count of a pair and its derivative in `chi`.
fn pair_expected(ts: &[f64], chi: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &t in ts {
        let q = 1.0 + t * chi;
        v += t * chi / q;
        d += t / (q * q);
    }
    (v, d)
}

/// Solves one pair affinity; `None` marks a saturated pair.
fn solve_pair(l: u64, ts: &[f64]) -> Option<f64> {
    if l == 0 {
        return Some(0.0);
    }
    if l as usize >= ts.len() {
        return None;
    }
    let t_sum: f64 = ts.iter().sum();
    let guess = l as f64 / t_sum;
    Some(solve_increasing(l as f64, guess, |chi| {
        pair_expected(ts, chi)
    }))
}

/// Fits pair affinities with multipliers frozen at the soft configuration
/// solution. The degree residual is inherited from that solve.
pub fn solve_chi_decoupled(g: &Graph, p: &Partition, ubcm: &UbcmParams) -> Result<DcSbmParams> {
    let stats = block_stats(g, p)?;
    let members = p.members();
    let k = p.block_count();
    let mut chi = vec![0.0; k * k];
    let mut saturated = vec![false; k * k];
    let mut block_residual = 0.0f64;
    for r in 0..k {
        for s in r..k {
            let l = if r == s {
                stats.intra(r)
            } else {
                stats.inter(r, s)
            };
            let ts = pair_products(r == s, &members[r], &members[s], &ubcm.x);
            match solve_pair(l, &ts) {
                Some(c) => {
                    chi[r * k + s] = c;
                    chi[s * k + r] = c;
                    let (e, _) = pair_expected(&ts, c);
                    block_residual = block_residual.max((e - l as f64).abs());
                }
                None => {
                    chi[r * k + s] = f64::INFINITY;
                    chi[s * k + r] = f64::INFINITY;
                    saturated[r * k + s] = true;
                    saturated[s * k + r] = true;
                }
            }
        }
    }
    Ok(DcSbmParams {
        x: ubcm.x.clone(),
        k,
        chi,
        saturated,
        degree_residual: ubcm.residual,
        block_residual,
        converged: ubcm.converged && block_residual <= DEFAULT_TOL,
        mode: FitMode::Decoupled,
    })
}

/// Bernoulli log-likelihood over all dyads. Saturated pairs contribute
/// zero; dyads with a zero multiplier product carry probability zero.
pub fn loglik_dcsbm(g: &Graph, p: &Partition, params: &DcSbmParams) -> f64 {
    debug_assert_eq!(params.k, p.block_count());
    let members = p.members();
    let k = params.k;
    let mut ll = 0.0;
    for r in 0..k {
        for s in r..k {
            let chi = params.chi(r, s);
            if params.is_saturated(r, s) || chi == 0.0 {
                continue;
            }
            for &t in &pair_products(r == s, &members[r], &members[s], &params.x) {
                ll -= (t * chi).ln_1p();
            }
        }
    }
    for (u, v) in g.edges() {
        let (r, s) = (p.label(u), p.label(v));
        if params.is_saturated(r, s) {
            continue;
        }
        ll += (params.x[u] * params.x[v] * params.chi(r, s)).ln();
    }
    ll
}

/// Information criterion of a fitted degree-corrected model:
/// `k (k + 1) / 2 + n` parameters against the chosen sample size.
pub fn bic_dcsbm(
    g: &Graph,
    p: &Partition,
    params: &DcSbmParams,
    convention: SampleSize,
) -> BicScore {
    let k = params.block_count();
    BicScore::new(
        loglik_dcsbm(g, p, params),
        k * (k + 1) / 2 + g.n(),
        convention,
        g.n(),
    )
}

/// Jointly fits multipliers and affinities by alternating exact
/// per-coordinate solves, warm-started from `x0` (typically the soft
/// configuration solution).
///
/// Nodes whose every edge lies in a saturated pair drop out of the solve
/// with `x = 0`; their equations hold in the saturation limit. Keeps the
/// best iterate and stops at tolerance or after five sweeps without
/// improvement.
pub fn solve_dcsbm_joint(g: &Graph, p: &Partition, x0: &[f64]) -> Result<DcSbmParams> {
    let stats = block_stats(g, p)?;
    let members = p.members();
    let k = p.block_count();
    let n = g.n();
    let degrees = g.degrees();
    let pair_l = |r: usize, s: usize| -> u64 {
        if r == s {
            stats.intra(r)
        } else {
            stats.inter(r, s)
        }
    };

    // Saturation and exclusion interact: excluding a node shrinks pair
    // dyad counts, which can saturate further pairs. Iterate to a fixed
    // point; exclusions only grow, so this terminates.
    let mut excluded: Vec<bool> = degrees.iter().map(|&d| d == 0).collect();
    let mut saturated = vec![false; k * k];
    loop {
        for r in 0..k {
            for s in r..k {
                let l = pair_l(r, s);
                let live = |list: &[u32]| list.iter().filter(|&&i| !excluded[i as usize]).count() as u64;
                let dyads = if r == s {
                    let m = live(&members[r]);
                    m * m.saturating_sub(1) / 2
                } else {
                    live(&members[r]) * live(&members[s])
                };
                // Saturation is sticky: exclusions only remove non-edge
                // dyads of other pairs, never unsaturate this one.
                let sat = saturated[r * k + s] || (l > 0 && l == dyads);
                saturated[r * k + s] = sat;
                saturated[s * k + r] = sat;
            }
        }
        let mut saturated_degree = vec![0usize; n];
        for (u, v) in g.edges() {
            if saturated[p.label(u) * k + p.label(v)] {
                saturated_degree[u] += 1;
                saturated_degree[v] += 1;
            }
        }
        let mut changed = false;
        for i in 0..n {
            if !excluded[i] && degrees[i] == saturated_degree[i] {
                excluded[i] = true;
                changed = true;
            }
        }
        if !changed {
            let mut x = vec![0.0; n];
            let mut active_target = vec![0.0; n];
            for i in 0..n {
                if !excluded[i] {
                    x[i] = if x0[i] > 0.0 { x0[i] } else { 1.0 };
                    active_target[i] = (degrees[i] - saturated_degree[i]) as f64;
                }
            }
            return Ok(joint_sweeps(
                g, p, &stats, &members, k, x, active_target, saturated,
            ));
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn joint_sweeps(
    g: &Graph,
    p: &Partition,
    stats: &BlockStats,
    members: &[Vec<u32>],
    k: usize,
    mut x: Vec<f64>,
    target: Vec<f64>,
    saturated: Vec<bool>,
) -> DcSbmParams {
    let n = g.n();
    let active: Vec<usize> = (0..n).filter(|&i| target[i] > 0.0).collect();
    let pair_l = |r: usize, s: usize| -> u64 {
        if r == s {
            stats.intra(r)
        } else {
            stats.inter(r, s)
        }
    };
    let active_pair = |r: usize, s: usize| !saturated[r * k + s] && pair_l(r, s) > 0;

    let mut chi = vec![0.0; k * k];
    let solve_all_chi = |x: &[f64], chi: &mut Vec<f64>| {
        for r in 0..k {
            for s in r..k {
                if !active_pair(r, s) {
                    continue;
                }
                let ts = pair_products(r == s, &members[r], &members[s], x);
                let c = solve_pair(pair_l(r, s), &ts).unwrap_or(f64::INFINITY);
                chi[r * k + s] = c;
                chi[s * k + r] = c;
            }
        }
    };
    solve_all_chi(&x, &mut chi);

    let residuals = |x: &[f64], chi: &[f64]| -> (f64, f64) {
        let mut deg = 0.0f64;
        for &i in &active {
            let mut e = 0.0;
            for j in 0..n {
                if j == i || x[j] == 0.0 {
                    continue;
                }
                let c = chi[p.label(i) * k + p.label(j)];
                if c > 0.0 && c.is_finite() {
                    let t = x[i] * x[j] * c;
                    e += t / (1.0 + t);
                }
            }
            deg = deg.max((e - target[i]).abs());
        }
        let mut blk = 0.0f64;
        for r in 0..k {
            for s in r..k {
                if !active_pair(r, s) {
                    continue;
                }
                let ts = pair_products(r == s, &members[r], &members[s], x);
                let (e, _) = pair_expected(&ts, chi[r * k + s]);
                blk = blk.max((e - pair_l(r, s) as f64).abs());
            }
        }
        (deg, blk)
    };

    let (mut best_deg, mut best_blk) = residuals(&x, &chi);
    let mut best_x = x.clone();
    let mut best_chi = chi.clone();
    let mut stale = 0;

    for _ in 0..MAX_SWEEPS {
        if best_deg.max(best_blk) <= DEFAULT_TOL {
            break;
        }
        for &i in &active {
            let gi = p.label(i);
            let xi = solve_increasing(target[i], x[i], |z| {
                let mut v = 0.0;
                let mut d = 0.0;
                for j in 0..n {
                    if j == i || x[j] == 0.0 {
                        continue;
                    }
                    let c = chi[gi * k + p.label(j)];
                    if c > 0.0 && c.is_finite() {
                        let a = x[j] * c;
                        let q = 1.0 + z * a;
                        v += z * a / q;
                        d += a / (q * q);
                    }
                }
                (v, d)
            });
            x[i] = xi;
        }
        // Rescaling every multiplier of a block and compensating through
        // the affinities leaves all dyad probabilities unchanged, so the
        // fit has one flat direction per block. Pin the gauge (block mean
        // one) before re-solving the affinities, which absorb the scale;
        // without this the alternation wanders along the ridge.
        for r in 0..k {
            let live: Vec<usize> = members[r]
                .iter()
                .map(|&i| i as usize)
                .filter(|&i| x[i] > 0.0)
                .collect();
            if live.is_empty() {
                continue;
            }
            let mean = live.iter().map(|&i| x[i]).sum::<f64>() / live.len() as f64;
            if mean > 0.0 && mean.is_finite() {
                for &i in &live {
                    x[i] /= mean;
                }
            }
        }
        solve_all_chi(&x, &mut chi);
        let (deg, blk) = residuals(&x, &chi);
        if deg.max(blk) < best_deg.max(best_blk) {
            best_deg = deg;
            best_blk = blk;
            best_x.copy_from_slice(&x);
            best_chi.copy_from_slice(&chi);
            stale = 0;
        } else {
            stale += 1;
            if stale >= PATIENCE {
                break;
            }
        }
    }

    for r in 0..k {
        for s in 0..k {
            if saturated[r * k + s] {
                best_chi[r * k + s] = f64::INFINITY;
            }
        }
    }
    DcSbmParams {
        converged: best_deg.max(best_blk) <= DEFAULT_TOL,
        x: best_x,
        k,
        chi: best_chi,
        saturated,
        degree_residual: best_deg,
        block_residual: best_blk,
        mode: FitMode::Joint,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::models::solve_ubcm;

    fn ubcm_of(g: &Graph) -> UbcmParams {
        solve_ubcm(&g.degrees(), 1e-10, 500).unwrap()
    }

    #[test]
    fn single_block_regular_graph_has_unit_affinity() {
        // 6-cycle: regular, so the configuration fit already matches the
        // single-block count and the affinity solves to one.
        let g = build_graph(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], None).unwrap();
        let p = Partition::single_block(6);
        let u = ubcm_of(&g);
        let fit = solve_chi_decoupled(&g, &p, &u).unwrap();
        assert!(fit.converged);
        assert!((fit.chi(0, 0) - 1.0).abs() < 1e-6);

        let ll = loglik_dcsbm(&g, &p, &fit);
        let mut direct = 0.0;
        for i in 0..6 {
            for j in (i + 1)..6 {
                let t = u.x[i] * u.x[j];
                let pij = t / (1.0 + t);
                direct += if g.has_edge(i, j) {
                    pij.ln()
                } else {
                    (1.0 - pij).ln()
                };
            }
        }
        assert!((ll - direct).abs() < 1e-9);
    }

    #[test]
    fn saturated_pairs_contribute_zero() {
        // Two disjoint triangles split by component: both within pairs are
        // complete, the cross pair is empty.
        let g = build_graph(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], None).unwrap();
        let p = Partition::from_labels(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let u = ubcm_of(&g);
        let fit = solve_chi_decoupled(&g, &p, &u).unwrap();
        assert!(fit.is_saturated(0, 0));
        assert!(fit.is_saturated(1, 1));
        assert!(!fit.is_saturated(0, 1));
        assert_eq!(fit.chi(0, 1), 0.0);
        assert_eq!(loglik_dcsbm(&g, &p, &fit), 0.0);
    }

    #[test]
    fn triangle_single_block_bic() {
        let g = build_graph(&[(0, 1), (1, 2), (2, 0)], None).unwrap();
        let p = Partition::single_block(3);
        let u = solve_ubcm(&g.degrees(), 1e-10, 2000).unwrap();
        let fit = solve_chi_decoupled(&g, &p, &u).unwrap();
        let score = bic_dcsbm(&g, &p, &fit, SampleSize::Dyads);
        assert_eq!(score.param_count, 4);
        assert!((score.bic - 4.0 * 3.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn joint_matches_decoupled_on_regular_single_block() {
        let g = build_graph(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], None).unwrap();
        let p = Partition::single_block(6);
        let u = ubcm_of(&g);
        let dec = solve_chi_decoupled(&g, &p, &u).unwrap();
        let joint = solve_dcsbm_joint(&g, &p, &u.x).unwrap();
        assert!(joint.converged);
        assert!((joint.chi(0, 0) - dec.chi(0, 0)).abs() < 1e-6);
        for i in 0..6 {
            assert!((joint.x[i] - dec.x[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn joint_keeps_zero_degree_nodes_at_zero() {
        let g = build_graph(&[(0, 1), (1, 2), (2, 0), (1, 3)], Some(6)).unwrap();
        let p = Partition::from_labels(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let u = ubcm_of(&g);
        let joint = solve_dcsbm_joint(&g, &p, &u.x).unwrap();
        assert!(joint.converged, "residuals {} {}", joint.degree_residual, joint.block_residual);
        assert_eq!(joint.x[4], 0.0);
        assert_eq!(joint.x[5], 0.0);
        assert!(joint.degree_residual <= 1e-8);
        assert!(joint.block_residual <= 1e-8);
    }

    #[test]
    fn joint_residuals_on_heterogeneous_two_blocks() {
        // Assortative two-block graph with uneven degrees. No node exhausts
        // its within-block dyads, so the fit stays interior.
        let edges = [
            (0, 1),
            (0, 2),
            (1, 2),
            (2, 3),
            (3, 4),
            (0, 3),
            (5, 6),
            (6, 7),
            (7, 8),
            (8, 9),
            (5, 8),
            (6, 9),
            (4, 5),
            (0, 9),
            (2, 7),
        ];
        let g = build_graph(&edges, None).unwrap();
        let p = Partition::from_labels(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]).unwrap();
        let u = ubcm_of(&g);
        let joint = solve_dcsbm_joint(&g, &p, &u.x).unwrap();
        assert!(
            joint.converged,
            "residuals {} {}",
            joint.degree_residual,
            joint.block_residual
        );
        assert!(joint.degree_residual <= 1e-8);
        assert!(joint.block_residual <= 1e-8);
        assert_eq!(joint.mode, FitMode::Joint);
    }
}
