//! Binary undirected simple graphs and whole-network metrics.
//!
//! Nodes are dense indices `0..n`. Original input ids are kept in a side
//! mapping so reports can restore them. Adjacency lists are sorted, which
//! makes iteration order (and everything downstream of it) deterministic.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Immutable binary undirected simple graph.
///
/// Invariants: no self-loops, no duplicate edges, sorted adjacency rows,
/// and `sum(degrees) == 2 * edge_count`.
#[derive(Debug, Clone)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    edge_count: usize,
    labels: Vec<u64>,
}

impl Graph {
    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Degree of `node`.
    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    /// Sorted neighbors of `node`.
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.adj[node]
    }

    /// Whether the edge `{u, v}` is present.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// Original input id for each dense node index.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// All edges as `(u, v)` with `u < v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, row)| {
            row.iter()
                .map(move |&v| (u, v as usize))
                .filter(|&(u, v)| u < v)
        })
    }

    /// Degree sequence indexed by node.
    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }
}

/// Builds a graph from raw edge pairs over arbitrary non-negative ids.
///
/// Duplicate edges collapse to one. A self-loop is an error naming the
/// offending original id. Ids are remapped to a dense `0..n` space in
/// ascending id order; with `n_hint` the id space is taken as
/// `0..max(n_hint, max_id + 1)` so isolated nodes below the hint survive.
pub fn build_graph(edges: &[(u64, u64)], n_hint: Option<usize>) -> Result<Graph> {
    for &(u, v) in edges {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
    }

    let labels: Vec<u64> = match n_hint {
        Some(hint) => {
            let max_id = edges.iter().map(|&(u, v)| u.max(v)).max();
            let n = match max_id {
                Some(m) => (hint as u64).max(m + 1),
                None => hint as u64,
            };
            (0..n).collect()
        }
        None => {
            let mut ids: Vec<u64> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        }
    };
    let index_of = |id: u64| -> u32 {
        match n_hint {
            Some(_) => id as u32,
            None => labels.binary_search(&id).expect("id collected above") as u32,
        }
    };

    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); labels.len()];
    let mut pairs: Vec<(u32, u32)> = edges
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (index_of(u), index_of(v));
            (a.min(b), a.max(b))
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    for &(u, v) in &pairs {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    for row in &mut adj {
        row.sort_unstable();
    }

    Ok(Graph {
        adj,
        edge_count: pairs.len(),
        labels,
    })
}

/// Edge density `2L / (N (N - 1))`. Undefined for fewer than two nodes.
pub fn density(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n < 2 {
        return Err(Error::UndefinedDensity(n));
    }
    Ok(2.0 * g.edge_count() as f64 / (n as f64 * (n as f64 - 1.0)))
}

/// Mean, spread, and relative spread of the degree sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    /// Mean degree `2L / N`.
    pub mean: f64,
    /// Population standard deviation.
    pub std_dev: f64,
    /// Coefficient of variation `std_dev / mean`; `None` on edgeless graphs.
    pub cv: Option<f64>,
}

/// Degree sequence summary. Requires at least one node.
pub fn degree_stats(g: &Graph) -> DegreeStats {
    let n = g.n().max(1) as f64;
    let mean = 2.0 * g.edge_count() as f64 / n;
    let var = g
        .adj
        .iter()
        .map(|row| {
            let d = row.len() as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    let std_dev = var.sqrt();
    let cv = (mean > 0.0).then(|| std_dev / mean);
    DegreeStats { mean, std_dev, cv }
}

fn nakamoto_of_degrees(mut degrees: Vec<u64>) -> Option<usize> {
    let total: u64 = degrees.iter().sum();
    if total == 0 {
        return None;
    }
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let threshold = 0.51 * total as f64;
    let mut cum = 0u64;
    for (i, d) in degrees.iter().enumerate() {
        cum += d;
        if cum as f64 >= threshold {
            return Some(i + 1);
        }
    }
    unreachable!("cumulative sum reaches the total")
}

/// Smallest number of top-degree nodes whose degrees reach 51% of all
/// edge endpoints. Undefined for edgeless graphs.
pub fn nakamoto_index(g: &Graph) -> Result<usize> {
    nakamoto_of_degrees(g.adj.iter().map(|row| row.len() as u64).collect())
        .ok_or(Error::UndefinedConcentration)
}

/// Triangle count through each node.
///
/// A triangle `{u, v, w}` is met once per edge it contains, each time
/// crediting the opposite vertex, so every member is counted exactly once.
pub fn triangles(g: &Graph) -> Vec<u64> {
    let mut t = vec![0u64; g.n()];
    for (u, v) in g.edges() {
        let a = g.neighbors(u);
        let b = g.neighbors(v);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    t[a[i] as usize] += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    t
}

/// Local clustering coefficient per node: `2 t_i / (k_i (k_i - 1))`,
/// zero for nodes of degree below two.
pub fn clustering(g: &Graph) -> Vec<f64> {
    triangles(g)
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let k = g.degree(i) as f64;
            if k < 2.0 {
                0.0
            } else {
                2.0 * t as f64 / (k * (k - 1.0))
            }
        })
        .collect()
}

/// Complementary cumulative degree distribution: for each distinct observed
/// degree `k` (ascending), the fraction of nodes with degree at least `k`.
pub fn degree_ccdf(g: &Graph) -> Vec<(usize, f64)> {
    if g.n() == 0 {
        return vec![(0, 1.0)];
    }
    let mut degrees = g.degrees();
    degrees.sort_unstable();
    let n = degrees.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < degrees.len() {
        let k = degrees[i];
        out.push((k, (degrees.len() - i) as f64 / n));
        while i < degrees.len() && degrees[i] == k {
            i += 1;
        }
    }
    out
}

/// Whole-network summary used by the reporting layer.
#[derive(Debug, Clone)]
pub struct MacroReport {
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub degree: DegreeStats,
    /// `None` when the graph has no edges.
    pub nakamoto: Option<usize>,
    pub mean_clustering: f64,
    pub clustering: Vec<f64>,
    pub degree_ccdf: Vec<(usize, f64)>,
}

/// Assembles the whole-network summary. Requires at least two nodes.
pub fn macro_report(g: &Graph) -> Result<MacroReport> {
    let density = density(g)?;
    let clustering = clustering(g);
    let mean_clustering = clustering.iter().sum::<f64>() / g.n() as f64;
    Ok(MacroReport {
        nodes: g.n(),
        edges: g.edge_count(),
        density,
        degree: degree_stats(g),
        nakamoto: nakamoto_index(g).ok(),
        mean_clustering,
        clustering,
        degree_ccdf: degree_ccdf(g),
    })
}

/// Parses an edge-list file: `#` starts a comment, blank lines are skipped,
/// and each remaining line holds two integer ids split on whitespace or
/// commas.
pub fn read_edge_list(path: &Path) -> Result<Vec<(u64, u64)>> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let text = match line.split_once('#') {
            Some((before, _)) => before,
            None => line.as_str(),
        };
        let tokens: Vec<&str> = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg,
        };
        if tokens.len() != 2 {
            return Err(err(format!("expected 2 tokens, found {}", tokens.len())));
        }
        let u = tokens[0]
            .parse::<u64>()
            .map_err(|e| err(format!("bad node id {:?}: {e}", tokens[0])))?;
        let v = tokens[1]
            .parse::<u64>()
            .map_err(|e| err(format!("bad node id {:?}: {e}", tokens[1])))?;
        edges.push((u, v));
    }
    Ok(edges)
}

/// Writes the graph as an edge list of original ids, one `u v` pair per
/// line, with a leading comment recording the node count.
pub fn write_edge_list(path: &Path, g: &Graph) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# nodes: {}", g.n())?;
    for (u, v) in g.edges() {
        writeln!(w, "{} {}", g.labels[u], g.labels[v])?;
    }
    w.flush()?;
    Ok(())
}
