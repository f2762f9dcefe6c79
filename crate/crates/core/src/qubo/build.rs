//! Builders for the modularity objective and the two constraint penalties.

use super::{ConstraintMode, QuboBuilder, QuboMatrix, VariableLayout};
use crate::error::{domain, Result};
use crate::graph::{Graph, ModularityParams};

fn check_objective_inputs(g: &Graph, layout: &VariableLayout, p: &ModularityParams) -> Result<()> {
    p.validate()?;
    if layout.groups() < 1 {
        return Err(domain("group count K must be at least 1"));
    }
    if layout.nodes() != g.node_count() {
        return Err(domain(format!(
            "layout has {} nodes but graph has {}",
            layout.nodes(),
            g.node_count()
        )));
    }
    if g.total_weight() <= 0.0 {
        return Err(domain("graph has no edges"));
    }
    Ok(())
}

/// Number of non-zero node-block terms the materialized objective needs:
/// one dense upper triangle per group.
pub fn dense_objective_terms(n: usize, k: usize) -> usize {
    k * n * (n + 1) / 2
}

/// Modularity objective `−Σ_k Σ_ij B_ij x_ik x_jk` with
/// `B_ij = (A_ij − γ k_i k_j / 2m) / 2m`, materialized as a QUBO over the
/// layout's full dimension (slack bits get no objective terms).
///
/// On any one-hot encoding of an assignment the energy equals `−Q`.
pub fn build_modularity_objective(
    g: &Graph,
    groups: usize,
    p: &ModularityParams,
    layout: &VariableLayout,
) -> Result<QuboMatrix> {
    if groups != layout.groups() {
        return Err(domain(format!(
            "K = {groups} does not match layout with {} groups",
            layout.groups()
        )));
    }
    check_objective_inputs(g, layout, p)?;
    let n = g.node_count();
    let two_m = 2.0 * g.total_weight();
    let degrees = g.degrees();
    let mut row = vec![0.0; n];
    let mut q = QuboBuilder::new(layout.dimension());
    for i in 0..n {
        for (j, w) in g.neighbors(i) {
            row[j] = w;
        }
        for j in i..n {
            let b = (row[j] - p.gamma * degrees[i] * degrees[j] / two_m) / two_m;
            let coeff = if i == j { -b } else { -2.0 * b };
            for k in 0..groups {
                q.add(layout.node_index(i, k), layout.node_index(j, k), coeff);
            }
        }
        for (j, _) in g.neighbors(i) {
            row[j] = 0.0;
        }
    }
    Ok(q.finish())
}

/// One-group-per-node penalty `C1 = Σ_i (Σ_k x_ik − 1)²`.
pub fn build_assignment_constraint(layout: &VariableLayout) -> QuboMatrix {
    let mut q = QuboBuilder::new(layout.dimension());
    let mut row = Vec::with_capacity(layout.groups());
    for i in 0..layout.nodes() {
        row.clear();
        row.extend((0..layout.groups()).map(|k| (layout.node_index(i, k), 1.0)));
        q.add_squared_linear(&row, -1.0, 1.0);
    }
    q.finish()
}

/// Non-empty-group penalty as an occupancy-counter evaluator:
/// `Σ_k max(0, 1 − Σ_i x_ik)²`, i.e. one unit per empty group.
#[derive(Debug, Clone, Copy)]
pub struct InequalityPenalty {
    layout: VariableLayout,
}

impl InequalityPenalty {
    pub fn new(layout: VariableLayout) -> Self {
        Self { layout }
    }

    pub fn layout(&self) -> &VariableLayout {
        &self.layout
    }

    pub fn occupancy(&self, bits: &[bool]) -> Vec<u32> {
        let mut counts = vec![0u32; self.layout.groups()];
        for i in 0..self.layout.nodes() {
            for (k, c) in counts.iter_mut().enumerate() {
                *c += u32::from(bits[self.layout.node_index(i, k)]);
            }
        }
        counts
    }

    pub fn evaluate(&self, bits: &[bool]) -> f64 {
        self.occupancy(bits).iter().filter(|&&c| c == 0).count() as f64
    }

    /// Penalty change when flipping node variable `(·, group)` whose current
    /// value is `set`, given that group's occupancy.
    #[inline]
    pub fn flip_delta(occupancy: u32, set: bool) -> f64 {
        match (set, occupancy) {
            (false, 0) => -1.0,
            (true, 1) => 1.0,
            _ => 0.0,
        }
    }
}

/// Output of [`build_nonempty_constraint`]: a QUBO in slack mode, an
/// incremental evaluator in inequality mode.
#[derive(Debug, Clone)]
pub enum NonEmptyPenalty {
    Slack(QuboMatrix),
    Inequality(InequalityPenalty),
}

impl NonEmptyPenalty {
    pub fn evaluate(&self, bits: &[bool]) -> f64 {
        use super::Hamiltonian;
        match self {
            Self::Slack(q) => q.energy(bits),
            Self::Inequality(p) => p.evaluate(bits),
        }
    }
}

/// Non-empty-group constraint.
///
/// Slack mode encodes `Σ_i x_ik = d_k + 1` with one-hot slack bits
/// `y_{k,d}`, `d ∈ 0..n`:
/// `C2 = Σ_k (Σ_i x_ik − Σ_d d·y_{k,d} − 1)² + Σ_k (Σ_d y_{k,d} − 1)²`.
pub fn build_nonempty_constraint(layout: &VariableLayout) -> NonEmptyPenalty {
    match layout.mode() {
        ConstraintMode::Inequality => NonEmptyPenalty::Inequality(InequalityPenalty::new(*layout)),
        ConstraintMode::Slack => {
            let n = layout.nodes();
            let mut q = QuboBuilder::new(layout.dimension());
            let mut linear = Vec::with_capacity(2 * n);
            for k in 0..layout.groups() {
                linear.clear();
                linear.extend((0..n).map(|i| (layout.node_index(i, k), 1.0)));
                linear.extend((1..n).map(|d| (layout.slack_index(k, d), -(d as f64))));
                q.add_squared_linear(&linear, -1.0, 1.0);
                linear.clear();
                linear.extend((0..n).map(|d| (layout.slack_index(k, d), 1.0)));
                q.add_squared_linear(&linear, -1.0, 1.0);
            }
            NonEmptyPenalty::Slack(q.finish())
        }
    }
}

/// Modularity objective kept in factored form: sparse adjacency plus the
/// rank-one degree term, so memory stays `O(n + m)` for any `K`.
#[derive(Debug, Clone)]
pub struct FactoredModularity {
    layout: VariableLayout,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    two_m: f64,
    gamma: f64,
}

impl FactoredModularity {
    pub fn new(g: &Graph, p: &ModularityParams, layout: &VariableLayout) -> Result<Self> {
        check_objective_inputs(g, layout, p)?;
        let mut offsets = Vec::with_capacity(g.node_count() + 1);
        let mut neighbors = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for i in 0..g.node_count() {
            for (j, w) in g.neighbors(i) {
                neighbors.push(j);
                weights.push(w);
            }
            offsets.push(neighbors.len());
        }
        Ok(Self {
            layout: *layout,
            offsets,
            neighbors,
            weights,
            degrees: g.degrees().to_vec(),
            two_m: 2.0 * g.total_weight(),
            gamma: p.gamma,
        })
    }

    pub fn layout(&self) -> &VariableLayout {
        &self.layout
    }

    #[inline]
    pub(crate) fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.neighbors[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }

    #[inline]
    pub(crate) fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    pub fn energy(&self, bits: &[bool]) -> f64 {
        let l = &self.layout;
        let mut e = 0.0;
        for k in 0..l.groups() {
            let mut internal = 0.0;
            let mut degree_sum = 0.0;
            for i in 0..l.nodes() {
                if !bits[l.node_index(i, k)] {
                    continue;
                }
                degree_sum += self.degrees[i];
                for (j, w) in self.neighbors(i) {
                    if bits[l.node_index(j, k)] {
                        internal += w;
                    }
                }
            }
            // internal counts every edge twice
            e -= internal / self.two_m - self.gamma * (degree_sum / self.two_m).powi(2);
        }
        e
    }

    /// Per `(node, group)` sums `Σ_j A_ij x_jk` and per-group degree sums.
    pub(crate) fn init_sums(&self, bits: &[bool]) -> (Vec<f64>, Vec<f64>) {
        let l = &self.layout;
        let mut adjacency = vec![0.0; l.node_block()];
        let mut group_degree = vec![0.0; l.groups()];
        for j in 0..l.nodes() {
            for k in 0..l.groups() {
                if bits[l.node_index(j, k)] {
                    group_degree[k] += self.degrees[j];
                    for (i, w) in self.neighbors(j) {
                        adjacency[l.node_index(i, k)] += w;
                    }
                }
            }
        }
        (adjacency, group_degree)
    }

    /// Energy change when flipping node variable `(i, k)`.
    #[inline]
    pub(crate) fn flip_delta(
        &self,
        adjacency_sum: f64,
        group_degree: f64,
        i: usize,
        set: bool,
    ) -> f64 {
        let ki = self.degrees[i];
        let others = group_degree - if set { ki } else { 0.0 };
        let coupling = (adjacency_sum - self.gamma * ki * others / self.two_m) / self.two_m;
        let self_term = -self.gamma * ki * ki / (self.two_m * self.two_m);
        let gain = self_term + 2.0 * coupling;
        if set {
            gain
        } else {
            -gain
        }
    }
}

/// Largest `|B_ij|` over all node pairs including the diagonal.
pub fn max_abs_modularity_coefficient(g: &Graph, p: &ModularityParams) -> f64 {
    let two_m = 2.0 * g.total_weight();
    let k_max = g.degrees().iter().copied().fold(0.0, f64::max);
    let mut best = p.gamma * k_max * k_max / (two_m * two_m);
    for &(u, v, w) in g.edges() {
        let b = (w - p.gamma * g.degree(u) * g.degree(v) / two_m) / two_m;
        best = best.max(b.abs());
    }
    best
}
