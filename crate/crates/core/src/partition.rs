//! Node partitions and incremental block-level edge statistics.
//!
//! `BlockStats` maintains, under single-node moves, everything the quality
//! functions need: block sizes, within- and between-block edge counts,
//! block degree sums, and per-node neighbor counts by block. It works both
//! on plain graphs and on aggregated multigraph levels through [`NodeView`],
//! where nodes stand for groups of original nodes.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Assignment of nodes to blocks with dense labels `0..block_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<u32>,
    blocks: usize,
}

impl Partition {
    /// Validates that every label below the maximum is used.
    pub fn from_labels(labels: Vec<u32>) -> Result<Self> {
        if labels.is_empty() {
            return Ok(Self { labels, blocks: 0 });
        }
        let blocks = *labels.iter().max().unwrap() as usize + 1;
        let mut used = vec![false; blocks];
        for &l in &labels {
            used[l as usize] = true;
        }
        let count = used.iter().filter(|&&u| u).count();
        if count != blocks {
            return Err(Error::SparseLabels {
                used: count,
                declared: blocks,
            });
        }
        Ok(Self { labels, blocks })
    }

    /// Densifies arbitrary labels in order of first appearance.
    pub fn from_raw_labels(raw: &[u64]) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &r in raw {
            let next = map.len() as u32;
            labels.push(*map.entry(r).or_insert(next));
        }
        Self {
            blocks: map.len(),
            labels,
        }
    }

    /// One block per node.
    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n as u32).collect(),
            blocks: n,
        }
    }

    /// All nodes in one block.
    pub fn single_block(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            blocks: if n == 0 { 0 } else { 1 },
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn label(&self, node: usize) -> usize {
        self.labels[node] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Node lists per block, each sorted ascending.
    pub fn members(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.blocks];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(v as u32);
        }
        out
    }

    /// Relabels blocks by order of first appearance.
    pub fn canonical_labels(&self) -> Vec<u32> {
        let mut map = vec![u32::MAX; self.blocks];
        let mut next = 0u32;
        let mut out = Vec::with_capacity(self.labels.len());
        for &l in &self.labels {
            if map[l as usize] == u32::MAX {
                map[l as usize] = next;
                next += 1;
            }
            out.push(map[l as usize]);
        }
        out
    }

    /// Equality ignoring block numbering.
    pub fn same_clustering(&self, other: &Partition) -> bool {
        self.n() == other.n() && self.canonical_labels() == other.canonical_labels()
    }
}

/// Node access shared by plain graphs and aggregated levels.
///
/// `member_count` and `stub_count` are expressed in original-graph units so
/// that block statistics computed at any level agree with the flat ones.
pub trait NodeView {
    fn len(&self) -> usize;
    /// Neighbors with edge multiplicities, self excluded.
    fn weighted_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_;
    /// Original edges internal to `v`.
    fn self_weight(&self, v: usize) -> u64;
    /// Original nodes represented by `v`.
    fn member_count(&self, v: usize) -> u64;
    /// Original degree stubs: weighted degree plus twice the self weight.
    fn stub_count(&self, v: usize) -> u64;
}

impl NodeView for Graph {
    fn len(&self) -> usize {
        self.n()
    }

    fn weighted_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.neighbors(v).iter().map(|&u| (u as usize, 1))
    }

    fn self_weight(&self, _v: usize) -> u64 {
        0
    }

    fn member_count(&self, _v: usize) -> u64 {
        1
    }

    fn stub_count(&self, v: usize) -> u64 {
        self.degree(v) as u64
    }
}

/// Edge statistics of a partition, maintained under single-node moves.
///
/// Slots may become empty during a move pass; `densify` compacts them.
/// All counts are in original-graph units.
#[derive(Debug, Clone)]
pub struct BlockStats {
    node_block: Vec<u32>,
    sizes: Vec<u64>,
    intra: Vec<u64>,
    degree_sum: Vec<u64>,
    /// Full symmetric matrix, diagonal unused; stride `cap`.
    inter: Vec<u64>,
    /// Per-node weighted neighbor counts by block; stride `cap`.
    node_to_block: Vec<u64>,
    cap: usize,
    occupied: usize,
    total_edges: u64,
}

impl BlockStats {
    pub fn build<V: NodeView>(view: &V, labels: &[u32], blocks: usize) -> Self {
        let n = view.len();
        assert_eq!(labels.len(), n, "label count must match node count");
        let cap = blocks;
        let mut s = Self {
            node_block: labels.to_vec(),
            sizes: vec![0; cap],
            intra: vec![0; cap],
            degree_sum: vec![0; cap],
            inter: vec![0; cap * cap],
            node_to_block: vec![0; n * cap],
            cap,
            occupied: 0,
            total_edges: 0,
        };
        for v in 0..n {
            let r = labels[v] as usize;
            s.sizes[r] += view.member_count(v);
            s.degree_sum[r] += view.stub_count(v);
            s.intra[r] += view.self_weight(v);
            s.total_edges += view.self_weight(v);
            for (u, w) in view.weighted_neighbors(v) {
                s.node_to_block[u * cap + r] += w;
                if u > v {
                    s.total_edges += w;
                    let t = labels[u] as usize;
                    if t == r {
                        s.intra[r] += w;
                    } else {
                        s.inter[r * cap + t] += w;
                        s.inter[t * cap + r] += w;
                    }
                }
            }
        }
        s.occupied = s.sizes.iter().filter(|&&z| z > 0).count();
        s
    }

    /// Number of non-empty blocks.
    pub fn block_count(&self) -> usize {
        self.occupied
    }

    /// Number of slots including empty ones.
    pub fn slot_count(&self) -> usize {
        self.cap
    }

    pub fn label_of(&self, v: usize) -> usize {
        self.node_block[v] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.node_block
    }

    /// Original node count of block `r`.
    pub fn size(&self, r: usize) -> u64 {
        self.sizes[r]
    }

    /// Edges inside block `r`.
    pub fn intra(&self, r: usize) -> u64 {
        self.intra[r]
    }

    /// Edges between distinct blocks `r` and `s`.
    pub fn inter(&self, r: usize, s: usize) -> u64 {
        debug_assert_ne!(r, s);
        self.inter[r * self.cap + s]
    }

    /// Sum of original degrees over block `r`.
    pub fn degree_sum(&self, r: usize) -> u64 {
        self.degree_sum[r]
    }

    /// Total edges of the underlying graph.
    pub fn total_edges(&self) -> u64 {
        self.total_edges
    }

    /// Weighted edges from `v` into block `r`, `v` itself excluded.
    pub fn edges_to(&self, v: usize, r: usize) -> u64 {
        self.node_to_block[v * self.cap + r]
    }

    /// Index of an empty slot, growing storage when none is free.
    pub fn fresh_slot(&mut self) -> usize {
        if let Some(r) = self.sizes.iter().position(|&z| z == 0) {
            return r;
        }
        let old = self.cap;
        self.grow(old + 1);
        old
    }

    fn grow(&mut self, cap: usize) {
        let n = self.node_block.len();
        let mut inter = vec![0; cap * cap];
        for r in 0..self.cap {
            inter[r * cap..r * cap + self.cap]
                .copy_from_slice(&self.inter[r * self.cap..(r + 1) * self.cap]);
        }
        let mut n2b = vec![0; n * cap];
        for v in 0..n {
            n2b[v * cap..v * cap + self.cap]
                .copy_from_slice(&self.node_to_block[v * self.cap..(v + 1) * self.cap]);
        }
        self.inter = inter;
        self.node_to_block = n2b;
        self.sizes.resize(cap, 0);
        self.intra.resize(cap, 0);
        self.degree_sum.resize(cap, 0);
        self.cap = cap;
    }

    /// Moves `v` from block `from` to block `to`, touching only `v`'s
    /// neighbors. `from` must be `v`'s current block.
    pub fn apply_move<V: NodeView>(&mut self, view: &V, v: usize, from: usize, to: usize) {
        debug_assert_eq!(self.label_of(v), from);
        if from == to {
            return;
        }
        let cap = self.cap;
        let m = view.member_count(v);
        let stubs = view.stub_count(v);
        let selfw = view.self_weight(v);

        self.sizes[from] -= m;
        self.degree_sum[from] -= stubs;
        self.intra[from] -= selfw;
        if self.sizes[from] == 0 {
            self.occupied -= 1;
        }
        if self.sizes[to] == 0 {
            self.occupied += 1;
        }
        self.sizes[to] += m;
        self.degree_sum[to] += stubs;
        self.intra[to] += selfw;

        for (u, w) in view.weighted_neighbors(v) {
            let s = self.node_block[u] as usize;
            if s == from {
                self.intra[from] -= w;
            } else {
                self.inter[from * cap + s] -= w;
                self.inter[s * cap + from] -= w;
            }
            if s == to {
                self.intra[to] += w;
            } else {
                self.inter[to * cap + s] += w;
                self.inter[s * cap + to] += w;
            }
            self.node_to_block[u * cap + from] -= w;
            self.node_to_block[u * cap + to] += w;
        }
        self.node_block[v] = to as u32;
    }

    /// Drops empty slots and renumbers the rest in ascending slot order.
    /// Returns the old-slot to new-label mapping (`u32::MAX` for dropped).
    pub fn densify(&mut self) -> Vec<u32> {
        let mut map = vec![u32::MAX; self.cap];
        let mut next = 0u32;
        for r in 0..self.cap {
            if self.sizes[r] > 0 {
                map[r] = next;
                next += 1;
            }
        }
        let k = next as usize;
        if k == self.cap {
            return map;
        }
        let n = self.node_block.len();
        let mut inter = vec![0; k * k];
        let mut n2b = vec![0; n * k];
        let mut sizes = vec![0; k];
        let mut intra = vec![0; k];
        let mut degree_sum = vec![0; k];
        for r in 0..self.cap {
            let nr = map[r];
            if nr == u32::MAX {
                continue;
            }
            let nr = nr as usize;
            sizes[nr] = self.sizes[r];
            intra[nr] = self.intra[r];
            degree_sum[nr] = self.degree_sum[r];
            for s in 0..self.cap {
                if map[s] != u32::MAX {
                    inter[nr * k + map[s] as usize] = self.inter[r * self.cap + s];
                }
            }
        }
        for v in 0..n {
            for r in 0..self.cap {
                if map[r] != u32::MAX {
                    n2b[v * k + map[r] as usize] = self.node_to_block[v * self.cap + r];
                }
            }
            self.node_block[v] = map[self.node_block[v] as usize];
        }
        self.sizes = sizes;
        self.intra = intra;
        self.degree_sum = degree_sum;
        self.inter = inter;
        self.node_to_block = n2b;
        self.cap = k;
        map
    }

    /// Dense partition over the current labels. Call after `densify`.
    pub fn to_partition(&self) -> Partition {
        Partition::from_labels(self.node_block.clone()).expect("densified labels")
    }

    /// Total within-block and between-block edge counts.
    pub fn ic_ec(&self) -> (u64, u64) {
        let ic: u64 = self.intra.iter().sum();
        (ic, self.total_edges - ic)
    }
}

/// Block statistics of `p` over `g`.
pub fn block_stats(g: &Graph, p: &Partition) -> Result<BlockStats> {
    if p.n() != g.n() {
        return Err(Error::PartitionLength {
            got: p.n(),
            expected: g.n(),
        });
    }
    Ok(BlockStats::build(g, p.labels(), p.block_count()))
}

/// Ratio of within-block to between-block edges: 0 when there are no
/// within-block edges, infinite when all edges are within blocks.
pub fn ic_ec_ratio(stats: &BlockStats) -> f64 {
    let (ic, ec) = stats.ic_ec();
    if ic == 0 {
        0.0
    } else if ec == 0 {
        f64::INFINITY
    } else {
        ic as f64 / ec as f64
    }
}

/// Writes `node,label` rows in node order, restoring original node ids.
pub fn write_partition(path: &Path, g: &Graph, p: &Partition) -> Result<()> {
    if p.n() != g.n() {
        return Err(Error::PartitionLength {
            got: p.n(),
            expected: g.n(),
        });
    }
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "node,label")?;
    for v in 0..g.n() {
        writeln!(w, "{},{}", g.labels()[v], p.label(v))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `node,label` rows keyed by original node id, in file order.
pub fn read_partition_pairs(path: &Path) -> Result<Vec<(u64, u64)>> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || (idx == 0 && text.eq_ignore_ascii_case("node,label")) {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg,
        };
        let (a, b) = text
            .split_once(',')
            .ok_or_else(|| err("expected node,label".into()))?;
        let node = a
            .trim()
            .parse::<u64>()
            .map_err(|e| err(format!("bad node id {:?}: {e}", a.trim())))?;
        let label = b
            .trim()
            .parse::<u64>()
            .map_err(|e| err(format!("bad label {:?}: {e}", b.trim())))?;
        out.push((node, label));
    }
    Ok(out)
}

/// Reads a partition file and aligns it to `g`'s node order. Every node of
/// `g` must appear exactly once; block ids are densified in file order.
pub fn read_partition(path: &Path, g: &Graph) -> Result<Partition> {
    let pairs = read_partition_pairs(path)?;
    let perr = |msg: String| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        msg,
    };
    if pairs.len() != g.n() {
        return Err(perr(format!(
            "{} rows for a graph with {} nodes",
            pairs.len(),
            g.n()
        )));
    }
    let mut by_id = std::collections::HashMap::with_capacity(pairs.len());
    for (node, label) in pairs {
        if by_id.insert(node, label).is_some() {
            return Err(perr(format!("duplicate node id {node}")));
        }
    }
    let mut raw = Vec::with_capacity(g.n());
    for &id in g.labels() {
        match by_id.get(&id) {
            Some(&l) => raw.push(l),
            None => return Err(perr(format!("missing node id {id}"))),
        }
    }
    Ok(Partition::from_raw_labels(&raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn two_triangles_bridge() -> Graph {
        build_graph(
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn block_counts_on_two_triangles() {
        let g = two_triangles_bridge();
        let p = Partition::from_labels(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let s = block_stats(&g, &p).unwrap();
        assert_eq!(s.size(0), 3);
        assert_eq!(s.size(1), 3);
        assert_eq!(s.intra(0), 3);
        assert_eq!(s.intra(1), 3);
        assert_eq!(s.inter(0, 1), 1);
        assert_eq!(s.degree_sum(0), 7);
        assert!((ic_ec_ratio(&s) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn ic_ec_sentinels() {
        let g = two_triangles_bridge();
        let single = Partition::single_block(6);
        let s = block_stats(&g, &single).unwrap();
        assert!(ic_ec_ratio(&s).is_infinite());

        let empty = build_graph(&[], Some(4)).unwrap();
        let s = block_stats(&empty, &Partition::singletons(4)).unwrap();
        assert_eq!(ic_ec_ratio(&s), 0.0);

        let p = Partition::singletons(6);
        let s = block_stats(&g, &p).unwrap();
        assert_eq!(ic_ec_ratio(&s), 0.0);
    }

    #[test]
    fn sparse_labels_rejected() {
        assert!(matches!(
            Partition::from_labels(vec![0, 2, 2]),
            Err(Error::SparseLabels {
                used: 2,
                declared: 3
            })
        ));
    }

    #[test]
    fn raw_labels_densify_in_first_appearance_order() {
        let p = Partition::from_raw_labels(&[7, 7, 3, 9, 3]);
        assert_eq!(p.labels(), &[0, 0, 1, 2, 1]);
        assert_eq!(p.block_count(), 3);
    }

    #[test]
    fn canonical_labels_ignore_numbering() {
        let a = Partition::from_labels(vec![1, 1, 0, 2]).unwrap();
        let b = Partition::from_labels(vec![0, 0, 2, 1]).unwrap();
        assert!(a.same_clustering(&b));
        let c = Partition::from_labels(vec![0, 1, 0, 2]).unwrap();
        assert!(!a.same_clustering(&c));
    }

    #[test]
    fn moves_match_rebuild() {
        let g = two_triangles_bridge();
        let p = Partition::from_labels(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let mut s = block_stats(&g, &p).unwrap();
        s.apply_move(&g, 2, 0, 1);
        let moved = Partition::from_labels(vec![0, 0, 1, 1, 1, 1]).unwrap();
        let fresh = block_stats(&g, &moved).unwrap();
        for r in 0..2 {
            assert_eq!(s.size(r), fresh.size(r));
            assert_eq!(s.intra(r), fresh.intra(r));
            assert_eq!(s.degree_sum(r), fresh.degree_sum(r));
        }
        assert_eq!(s.inter(0, 1), fresh.inter(0, 1));
        for v in 0..6 {
            for r in 0..2 {
                assert_eq!(s.edges_to(v, r), fresh.edges_to(v, r));
            }
        }
    }

    #[test]
    fn empty_slot_reuse_and_densify() {
        let g = two_triangles_bridge();
        let p = Partition::from_labels(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let mut s = block_stats(&g, &p).unwrap();
        let slot = s.fresh_slot();
        assert_eq!(slot, 2);
        s.apply_move(&g, 5, 1, slot);
        assert_eq!(s.block_count(), 3);
        s.apply_move(&g, 5, slot, 1);
        assert_eq!(s.block_count(), 2);
        // Emptied slot is reused rather than grown.
        assert_eq!(s.fresh_slot(), 2);

        s.apply_move(&g, 0, 0, 1);
        s.apply_move(&g, 1, 0, 1);
        s.apply_move(&g, 2, 0, 1);
        let map = s.densify();
        assert_eq!(map[1], 0);
        assert_eq!(s.block_count(), 1);
        assert_eq!(s.to_partition().labels(), &[0; 6]);
    }

    #[test]
    fn partition_csv_roundtrip_restores_original_ids() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("part.csv");
        let g = build_graph(&[(10, 40), (40, 99)], None).unwrap();
        let p = Partition::from_labels(vec![0, 0, 1]).unwrap();
        write_partition(&path, &g, &p).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "node,label\n10,0\n40,0\n99,1\n");
        let back = read_partition(&path, &g).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn partition_read_rejects_missing_nodes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("part.csv");
        let g = build_graph(&[(0, 1), (1, 2)], None).unwrap();
        std::fs::write(&path, "node,label\n0,0\n1,0\n").unwrap();
        assert!(read_partition(&path, &g).is_err());
        std::fs::write(&path, "node,label\n0,0\n1,0\n1,1\n").unwrap();
        assert!(read_partition(&path, &g).is_err());
    }
}
