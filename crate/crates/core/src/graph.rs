//! Weighted undirected graphs, text ingestion and modularity.
//!
//! Nodes are dense indices `0..n`. Text sources may use arbitrary string
//! labels; they are mapped to indices in order of first appearance.

use std::collections::{HashMap, HashSet};

use rand::Rng;

use crate::error::{domain, Error, Result};

/// Immutable weighted undirected simple graph with CSR adjacency.
#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize, f64)>,
    labels: Vec<String>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    total_weight: f64,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects self-loops, parallel edges
    /// and non-positive weights.
    pub fn from_edges(node_count: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    pub fn with_labels(labels: Vec<String>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let node_count = labels.len();
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v, w) in &edges {
            if u >= node_count || v >= node_count {
                return Err(domain(format!(
                    "edge ({u}, {v}) references a node outside 0..{node_count}"
                )));
            }
            if u == v {
                return Err(domain(format!("self-loop on node {u}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(domain(format!("edge ({u}, {v}) has non-positive weight {w}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(domain(format!("duplicate edge ({u}, {v})")));
            }
        }

        let mut counts = vec![0usize; node_count + 1];
        for &(u, v, _) in &edges {
            counts[u + 1] += 1;
            counts[v + 1] += 1;
        }
        for i in 0..node_count {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let mut neighbors = vec![0usize; offsets[node_count]];
        let mut weights = vec![0.0f64; offsets[node_count]];
        for &(u, v, w) in &edges {
            neighbors[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            weights[fill[v]] = w;
            fill[v] += 1;
        }

        let degrees: Vec<f64> = (0..node_count)
            .map(|i| weights[offsets[i]..offsets[i + 1]].iter().sum())
            .collect();
        let total_weight = edges.iter().map(|e| e.2).sum();

        Ok(Self {
            node_count,
            edges,
            labels,
            offsets,
            neighbors,
            weights,
            degrees,
            total_weight,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Total edge weight `m` (each undirected edge counted once).
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Iterates `(neighbor, weight)` pairs of node `i`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// Weight of edge `(u, v)`, or 0 when absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.neighbors(u)
            .find(|&(j, _)| j == v)
            .map_or(0.0, |(_, w)| w)
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for (v, _) in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    stack.push(v);
                }
            }
        }
        reached == self.node_count
    }

    /// Returns a copy with every edge weight replaced by 1.
    pub fn unweighted(&self) -> Self {
        let edges = self.edges.iter().map(|&(u, v, _)| (u, v, 1.0)).collect();
        Self::with_labels(self.labels.clone(), edges).expect("source graph is valid")
    }
}

/// Weighted degree `k_i = Σ_j w(i, j)` of every node.
pub fn degree_vector(g: &Graph) -> Vec<f64> {
    g.degrees.clone()
}

/// Maps string labels to dense indices in first-appearance order.
#[derive(Default)]
struct LabelIndex {
    index: HashMap<String, usize>,
    labels: Vec<String>,
}

impl LabelIndex {
    fn get(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.index.insert(label.to_owned(), i);
        self.labels.push(label.to_owned());
        i
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

fn parse_real(field: &str, line: usize, what: &str) -> Result<f64> {
    let value: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} {field:?}"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite {what} {field:?}"),
        });
    }
    Ok(value)
}

/// Parses a whitespace-separated edge list (`u v` or `u v w` per line,
/// `#` comments). With `weighted == false` any weight column is ignored and
/// all weights are 1.
pub fn load_edge_list(text: &str, weighted: bool) -> Result<Graph> {
    let mut index = LabelIndex::default();
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (line, cols) in data_lines(text) {
        if cols.len() < 2 || cols.len() > 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 2 or 3 columns, found {}", cols.len()),
            });
        }
        let w = match cols.get(2) {
            Some(field) if weighted => parse_real(field, line, "weight")?,
            _ => 1.0,
        };
        let u = index.get(cols[0]);
        let v = index.get(cols[1]);
        if u == v {
            return Err(domain(format!("line {line}: self-loop on {:?}", cols[0])));
        }
        if w <= 0.0 {
            return Err(domain(format!("line {line}: non-positive weight {w}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(domain(format!(
                "line {line}: duplicate edge {:?} {:?}",
                cols[0], cols[1]
            )));
        }
        edges.push((u, v, w));
    }
    Graph::with_labels(index.labels, edges)
}

/// Parses a branch table (`u v r x` per line) into a graph weighted by the
/// inverse impedance magnitude `1 / |r + jx|`. Parallel branches keep the
/// first occurrence; the number dropped is returned alongside the graph.
pub fn load_branch_table_with_stats(text: &str) -> Result<(Graph, usize)> {
    let mut index = LabelIndex::default();
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let mut dropped = 0;
    for (line, cols) in data_lines(text) {
        if cols.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 4 columns (u v r x), found {}", cols.len()),
            });
        }
        let r = parse_real(cols[2], line, "resistance")?;
        let x = parse_real(cols[3], line, "reactance")?;
        let z = r.hypot(x);
        if z == 0.0 {
            return Err(domain(format!("line {line}: zero impedance branch")));
        }
        let u = index.get(cols[0]);
        let v = index.get(cols[1]);
        if u == v {
            return Err(domain(format!("line {line}: self-loop on {:?}", cols[0])));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            log::debug!(
                "line {line}: parallel branch {} {} dropped (keeping first)",
                cols[0],
                cols[1]
            );
            dropped += 1;
            continue;
        }
        edges.push((u, v, 1.0 / z));
    }
    if dropped > 0 {
        log::warn!("{dropped} parallel branches dropped (first occurrence kept)");
    }
    Ok((Graph::with_labels(index.labels, edges)?, dropped))
}

pub fn load_branch_table(text: &str) -> Result<Graph> {
    load_branch_table_with_stats(text).map(|(g, _)| g)
}

/// Group label per node, each in `0..group_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityAssignment {
    labels: Vec<usize>,
    group_count: usize,
}

impl CommunityAssignment {
    pub fn new(labels: Vec<usize>, group_count: usize) -> Result<Self> {
        if let Some((i, &c)) = labels.iter().enumerate().find(|(_, &c)| c >= group_count) {
            return Err(domain(format!(
                "node {i} has group {c} outside 0..{group_count}"
            )));
        }
        Ok(Self {
            labels,
            group_count,
        })
    }

    pub fn single(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            group_count: 1,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Same labels with a larger group count (extra groups start empty).
    pub fn with_groups(mut self, group_count: usize) -> Self {
        assert!(group_count >= self.group_count, "cannot shrink group count");
        self.group_count = group_count;
        self
    }

    pub fn group_count(&self) -> usize {
        self.group_count
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.group_count];
        for &c in &self.labels {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn empty_groups(&self) -> usize {
        self.group_sizes().iter().filter(|&&s| s == 0).count()
    }

    pub(crate) fn set(&mut self, node: usize, group: usize) {
        debug_assert!(group < self.group_count);
        self.labels[node] = group;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularityParams {
    pub gamma: f64,
}

impl Default for ModularityParams {
    fn default() -> Self {
        Self { gamma: 1.0 }
    }
}

impl ModularityParams {
    pub fn validate(&self) -> Result<()> {
        if self.gamma > 0.0 && self.gamma.is_finite() {
            Ok(())
        } else {
            Err(domain(format!("resolution gamma must be > 0, got {}", self.gamma)))
        }
    }
}

fn check_inputs(g: &Graph, a: &CommunityAssignment, p: &ModularityParams) -> Result<()> {
    p.validate()?;
    if a.len() != g.node_count() {
        return Err(Error::Dimension {
            expected: g.node_count(),
            got: a.len(),
        });
    }
    if g.total_weight() <= 0.0 {
        return Err(domain("modularity is undefined for a graph without edges"));
    }
    Ok(())
}

/// Modularity `Q` of an assignment, evaluated per community:
/// `Q = Σ_c [ W_c / m − γ (D_c / 2m)² ]` where `W_c` is the intra-community
/// edge weight and `D_c` the summed degree of community `c`.
pub fn modularity(g: &Graph, a: &CommunityAssignment, p: &ModularityParams) -> Result<f64> {
    check_inputs(g, a, p)?;
    let m = g.total_weight();
    let labels = a.labels();
    let mut internal = vec![0.0; a.group_count()];
    let mut degree_sum = vec![0.0; a.group_count()];
    for &(u, v, w) in g.edges() {
        if labels[u] == labels[v] {
            internal[labels[u]] += w;
        }
    }
    for (i, &c) in labels.iter().enumerate() {
        degree_sum[c] += g.degree(i);
    }
    let two_m = 2.0 * m;
    Ok(internal
        .iter()
        .zip(&degree_sum)
        .map(|(&w_in, &d)| w_in / m - p.gamma * (d / two_m) * (d / two_m))
        .sum())
}

/// Direct `O(n²)` double sum `(1/2m) Σ_ij (A_ij − γ k_i k_j / 2m) δ(c_i, c_j)`.
pub fn modularity_pairwise(
    g: &Graph,
    a: &CommunityAssignment,
    p: &ModularityParams,
) -> Result<f64> {
    check_inputs(g, a, p)?;
    let n = g.node_count();
    let two_m = 2.0 * g.total_weight();
    let labels = a.labels();
    let mut row = vec![0.0; n];
    let mut q = 0.0;
    for i in 0..n {
        row.iter_mut().for_each(|x| *x = 0.0);
        for (j, w) in g.neighbors(i) {
            row[j] = w;
        }
        for j in 0..n {
            if labels[i] == labels[j] {
                q += row[j] - p.gamma * g.degree(i) * g.degree(j) / two_m;
            }
        }
    }
    Ok(q / two_m)
}

/// Erdős–Rényi `G(n, p)` with unit weights, resampled until connected.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    assert!(n >= 2, "need at least two nodes");
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v, 1.0));
                }
            }
        }
        let g = Graph::from_edges(n, edges).expect("generated edges are valid");
        if g.is_connected() {
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub(crate) fn two_triangles() -> Graph {
        load_edge_list("0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n", false).unwrap()
    }

    fn assign(labels: &[usize], k: usize) -> CommunityAssignment {
        CommunityAssignment::new(labels.to_vec(), k).unwrap()
    }

    #[test]
    fn triangle_edge_list() {
        let g = load_edge_list("0 1\n1 2\n2 0", false).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.total_weight(), 3.0);
        assert_eq!(degree_vector(&g), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn weighted_string_labels() {
        let g = load_edge_list("# comment\na b 2.5\n", true).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.total_weight(), 2.5);
        assert_eq!(g.degrees(), &[2.5, 2.5]);
        assert_eq!(g.labels(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn unweighted_ignores_weight_column() {
        let g = load_edge_list("a b 2.5\nb c 7", false).unwrap();
        assert_eq!(g.total_weight(), 2.0);
    }

    #[test]
    fn duplicate_edges_rejected() {
        assert!(matches!(
            load_edge_list("0 1\n0 1", false),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            load_edge_list("0 1\n1 0", false),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn malformed_and_invalid_lines() {
        assert_eq!(
            load_edge_list("0 1\n2\n", false).unwrap_err(),
            Error::Parse {
                line: 2,
                msg: "expected 2 or 3 columns, found 1".into()
            }
        );
        assert!(matches!(
            load_edge_list("0 1 x", true),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(load_edge_list("0 1 0", true), Err(Error::Domain(_))));
        assert!(matches!(load_edge_list("0 1 -1", true), Err(Error::Domain(_))));
        assert!(matches!(load_edge_list("3 3", false), Err(Error::Domain(_))));
    }

    #[test]
    fn branch_table_weights() {
        let g = load_branch_table("0 1 3 4").unwrap();
        assert_abs_diff_eq!(g.weight(0, 1), 0.2, epsilon = 1e-15);
        let g = load_branch_table("0 1 1 0").unwrap();
        assert_eq!(g.weight(0, 1), 1.0);
        let g = load_branch_table("0 1 -3 4").unwrap();
        assert_abs_diff_eq!(g.weight(1, 0), 0.2, epsilon = 1e-15);
        assert!(matches!(load_branch_table("0 1 0 0"), Err(Error::Domain(_))));
    }

    #[test]
    fn branch_table_parallel_branches_keep_first() {
        let (g, dropped) = load_branch_table_with_stats("0 1 3 4\n1 0 1 0\n1 2 1 0").unwrap();
        assert_eq!(dropped, 1);
        assert_eq!(g.edge_count(), 2);
        assert_abs_diff_eq!(g.weight(0, 1), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn star_degrees() {
        let g = Graph::from_edges(4, vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        assert_eq!(degree_vector(&g), vec![3.0, 1.0, 1.0, 1.0]);
        assert_eq!(g.degrees().iter().sum::<f64>(), 2.0 * g.total_weight());
    }

    #[test]
    fn single_group_is_zero() {
        let g = two_triangles();
        let q = modularity(&g, &CommunityAssignment::single(6), &Default::default()).unwrap();
        assert_abs_diff_eq!(q, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn two_triangles_natural_split() {
        let g = two_triangles();
        let a = assign(&[0, 0, 0, 1, 1, 1], 2);
        let p = ModularityParams::default();
        // Each triangle: W_c = 3, D_c = 6, m = 6 → 2·(3/6 − (6/12)²) = 0.5.
        assert_abs_diff_eq!(modularity(&g, &a, &p).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(modularity_pairwise(&g, &a, &p).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn two_triangles_split_is_the_two_group_maximum() {
        let g = two_triangles();
        let p = ModularityParams::default();
        let mut best = f64::NEG_INFINITY;
        for mask in 1u32..(1 << 6) - 1 {
            let labels: Vec<usize> = (0..6).map(|i| ((mask >> i) & 1) as usize).collect();
            best = best.max(modularity(&g, &assign(&labels, 2), &p).unwrap());
        }
        assert_abs_diff_eq!(best, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn merge_of_disconnected_groups() {
        let g = two_triangles();
        let p = ModularityParams { gamma: 1.3 };
        let split = modularity(&g, &assign(&[0, 0, 0, 1, 1, 1], 2), &p).unwrap();
        let merged = modularity(&g, &CommunityAssignment::single(6), &p).unwrap();
        let (da, db, two_m) = (6.0, 6.0, 12.0);
        assert_abs_diff_eq!(
            merged - split,
            -2.0 * p.gamma * da * db / (two_m * two_m),
            epsilon = 1e-14
        );
    }

    #[test]
    fn empty_graph_and_bad_lengths() {
        let g = Graph::from_edges(2, vec![]).unwrap();
        assert!(matches!(
            modularity(&g, &CommunityAssignment::single(2), &Default::default()),
            Err(Error::Domain(_))
        ));
        let g = two_triangles();
        assert!(matches!(
            modularity(&g, &CommunityAssignment::single(5), &Default::default()),
            Err(Error::Dimension { .. })
        ));
        assert!(CommunityAssignment::new(vec![0, 2], 2).is_err());
        assert!(ModularityParams { gamma: 0.0 }.validate().is_err());
    }
}
