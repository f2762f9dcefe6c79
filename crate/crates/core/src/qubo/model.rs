use super::build::{
    build_assignment_constraint, build_modularity_objective, build_nonempty_constraint,
    dense_objective_terms, max_abs_modularity_coefficient, FactoredModularity, InequalityPenalty,
    NonEmptyPenalty,
};
use super::{Hamiltonian, QuboBuilder, QuboMatrix, VariableLayout};
use crate::error::{domain, Error, Result};
use crate::graph::{CommunityAssignment, Graph, ModularityParams};

/// Default size limit (in terms) for materializing the objective densely.
pub const DEFAULT_DENSE_TERM_LIMIT: usize = 200_000;

/// Penalty multipliers for the assignment (`lambda1`) and non-empty
/// (`lambda2`) constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyWeights {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl PenaltyWeights {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        let w = Self { lambda1, lambda2 };
        w.validate()?;
        Ok(w)
    }

    /// One and a half times the largest change a single bit flip can make to
    /// the objective, `(1 + γ) · k_max / m`.
    pub fn auto(g: &Graph, p: &ModularityParams) -> Self {
        let m = g.total_weight();
        let k_max = g.degrees().iter().copied().fold(0.0, f64::max);
        let lambda = if m > 0.0 {
            1.5 * (1.0 + p.gamma) * k_max / m
        } else {
            1.0
        };
        Self::uniform(lambda)
    }

    /// `2 · max|B_ij| · n` for both constraints.
    pub fn coefficient_bound(g: &Graph, p: &ModularityParams) -> Self {
        Self::uniform(2.0 * max_abs_modularity_coefficient(g, p) * g.node_count() as f64)
    }

    pub fn uniform(lambda: f64) -> Self {
        Self {
            lambda1: lambda,
            lambda2: lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if ok(self.lambda1) && ok(self.lambda2) {
            Ok(())
        } else {
            Err(domain(format!(
                "penalty weights must be finite and non-negative, got ({}, {})",
                self.lambda1, self.lambda2
            )))
        }
    }
}

/// Modularity objective in one of its two representations.
#[derive(Debug, Clone)]
pub enum Objective {
    Dense(QuboMatrix),
    Factored(FactoredModularity),
}

/// Assembled Hamiltonian `H = M + λ1·C1 + λ2·C2`.
///
/// The quadratic part holds every materialized term. The factored objective
/// and the inequality penalty, when present, are evaluated from counters that
/// the solver keeps alongside the local fields.
#[derive(Debug, Clone)]
pub struct CommunityModel {
    layout: VariableLayout,
    quadratic: QuboMatrix,
    factored: Option<FactoredModularity>,
    inequality: Option<InequalityPenalty>,
    weights: PenaltyWeights,
}

/// Term-wise weighted sum of objective and penalties.
pub fn assemble(
    layout: &VariableLayout,
    objective: Objective,
    c1: &QuboMatrix,
    c2: NonEmptyPenalty,
    weights: PenaltyWeights,
) -> Result<CommunityModel> {
    weights.validate()?;
    let dim = layout.dimension();
    let mut quad = QuboBuilder::new(dim);
    let factored = match objective {
        Objective::Dense(m) => {
            quad.add_matrix(&m, 1.0)?;
            None
        }
        Objective::Factored(f) => {
            if f.layout() != layout {
                return Err(domain("factored objective layout differs from model layout"));
            }
            Some(f)
        }
    };
    quad.add_matrix(c1, weights.lambda1)?;
    let inequality = match c2 {
        NonEmptyPenalty::Slack(q) => {
            quad.add_matrix(&q, weights.lambda2)?;
            None
        }
        NonEmptyPenalty::Inequality(p) => {
            if p.layout().dimension() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: p.layout().dimension(),
                });
            }
            Some(p)
        }
    };
    Ok(CommunityModel {
        layout: *layout,
        quadratic: quad.finish(),
        factored,
        inequality,
        weights,
    })
}

impl CommunityModel {
    /// Builds and assembles the full model for `groups` communities. The
    /// objective is materialized when its dense size fits `dense_term_limit`
    /// and kept factored otherwise.
    pub fn build(
        g: &Graph,
        layout: VariableLayout,
        p: &ModularityParams,
        weights: PenaltyWeights,
        dense_term_limit: usize,
    ) -> Result<Self> {
        let objective = if dense_objective_terms(layout.nodes(), layout.groups()) <= dense_term_limit
        {
            Objective::Dense(build_modularity_objective(g, layout.groups(), p, &layout)?)
        } else {
            Objective::Factored(FactoredModularity::new(g, p, &layout)?)
        };
        let c1 = build_assignment_constraint(&layout);
        let c2 = build_nonempty_constraint(&layout);
        assemble(&layout, objective, &c1, c2, weights)
    }

    pub fn layout(&self) -> &VariableLayout {
        &self.layout
    }

    pub fn weights(&self) -> PenaltyWeights {
        self.weights
    }

    pub fn is_factored(&self) -> bool {
        self.factored.is_some()
    }

    /// The quadratic part (everything materialized).
    pub fn quadratic(&self) -> &QuboMatrix {
        &self.quadratic
    }

    /// The whole model as a plain QUBO, available when nothing is kept in
    /// factored or counter form (dense objective, slack mode).
    pub fn to_qubo(&self) -> Option<&QuboMatrix> {
        (self.factored.is_none() && self.inequality.is_none()).then_some(&self.quadratic)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CommunityFields {
    local: Vec<f64>,
    adjacency: Vec<f64>,
    group_degree: Vec<f64>,
    occupancy: Vec<u32>,
}

impl CommunityFields {
    pub fn occupancy(&self) -> &[u32] {
        &self.occupancy
    }
}

impl Hamiltonian for CommunityModel {
    type Fields = CommunityFields;

    fn dimension(&self) -> usize {
        self.layout.dimension()
    }

    fn energy(&self, bits: &[bool]) -> f64 {
        let mut e = self.quadratic.energy(bits);
        if let Some(f) = &self.factored {
            e += f.energy(bits);
        }
        if let Some(p) = &self.inequality {
            e += self.weights.lambda2 * p.evaluate(bits);
        }
        e
    }

    fn init_fields(&self, bits: &[bool]) -> CommunityFields {
        let (adjacency, group_degree) = match &self.factored {
            Some(f) => f.init_sums(bits),
            None => (Vec::new(), Vec::new()),
        };
        let occupancy = match &self.inequality {
            Some(p) => p.occupancy(bits),
            None => Vec::new(),
        };
        CommunityFields {
            local: self.quadratic.init_fields(bits),
            adjacency,
            group_degree,
            occupancy,
        }
    }

    #[inline]
    fn flip_delta(&self, fields: &CommunityFields, bits: &[bool], a: usize) -> f64 {
        let set = bits[a];
        let mut delta = if set { -fields.local[a] } else { fields.local[a] };
        if a < self.layout.node_block() {
            let groups = self.layout.groups();
            let k = a % groups;
            if let Some(f) = &self.factored {
                delta += f.flip_delta(fields.adjacency[a], fields.group_degree[k], a / groups, set);
            }
            if self.inequality.is_some() {
                delta += self.weights.lambda2 * InequalityPenalty::flip_delta(fields.occupancy[k], set);
            }
        }
        delta
    }

    fn visit_deltas<F: FnMut(usize, f64)>(
        &self,
        fields: &CommunityFields,
        bits: &[bool],
        range: std::ops::Range<usize>,
        mut visit: F,
    ) {
        let groups = self.layout.groups();
        let node_end = self.layout.node_block().min(range.end);
        let lambda2 = self.weights.lambda2;
        let mut a = range.start;
        if a < node_end {
            let (mut i, mut k) = (a / groups, a % groups);
            while a < node_end {
                let set = bits[a];
                let local = fields.local[a];
                let mut delta = if set { -local } else { local };
                if let Some(f) = &self.factored {
                    delta += f.flip_delta(fields.adjacency[a], fields.group_degree[k], i, set);
                }
                if self.inequality.is_some() {
                    delta += lambda2 * InequalityPenalty::flip_delta(fields.occupancy[k], set);
                }
                visit(a, delta);
                a += 1;
                k += 1;
                if k == groups {
                    k = 0;
                    i += 1;
                }
            }
        }
        while a < range.end {
            let local = fields.local[a];
            visit(a, if bits[a] { -local } else { local });
            a += 1;
        }
    }

    fn commit_flip(&self, fields: &mut CommunityFields, bits: &[bool], a: usize) {
        self.quadratic.commit_flip(&mut fields.local, bits, a);
        let Some((i, k)) = self.layout.node_of(a) else {
            return;
        };
        let set = bits[a];
        if let Some(f) = &self.factored {
            let sign = if set { -1.0 } else { 1.0 };
            for (j, w) in f.neighbors(i) {
                fields.adjacency[self.layout.node_index(j, k)] += sign * w;
            }
            fields.group_degree[k] += sign * f.degree(i);
        }
        if self.inequality.is_some() {
            if set {
                fields.occupancy[k] -= 1;
            } else {
                fields.occupancy[k] += 1;
            }
        }
    }
}

/// One-hot bit image of an assignment. In slack mode the slack block of each
/// non-empty group encodes `size − 1`.
pub fn encode(a: &CommunityAssignment, layout: &VariableLayout) -> Result<Vec<bool>> {
    if a.len() != layout.nodes() {
        return Err(Error::Dimension {
            expected: layout.nodes(),
            got: a.len(),
        });
    }
    if a.group_count() != layout.groups() {
        return Err(domain(format!(
            "assignment has {} groups, layout has {}",
            a.group_count(),
            layout.groups()
        )));
    }
    let mut bits = vec![false; layout.dimension()];
    for (i, &k) in a.labels().iter().enumerate() {
        bits[layout.node_index(i, k)] = true;
    }
    if layout.mode() == super::ConstraintMode::Slack {
        for (k, size) in a.group_sizes().into_iter().enumerate() {
            if size > 0 {
                bits[layout.slack_index(k, size - 1)] = true;
            }
        }
    }
    Ok(bits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub assignment: CommunityAssignment,
    /// Rows that were not one-hot and had to be resolved.
    pub repaired_rows: usize,
}

/// Reads the node block back into an assignment. Strict mode rejects any row
/// that is not one-hot; repair mode takes the lowest set group of each row
/// (group 0 for an all-zero row) and counts those rows.
pub fn decode(bits: &[bool], layout: &VariableLayout, repair: bool) -> Result<Decoded> {
    if bits.len() < layout.node_block() {
        return Err(Error::Dimension {
            expected: layout.node_block(),
            got: bits.len(),
        });
    }
    let groups = layout.groups();
    let mut labels = Vec::with_capacity(layout.nodes());
    let mut repaired_rows = 0;
    for i in 0..layout.nodes() {
        let row = &bits[i * groups..(i + 1) * groups];
        let ones = row.iter().filter(|&&b| b).count();
        if ones != 1 {
            if !repair {
                return Err(Error::Infeasible { row: i, ones });
            }
            repaired_rows += 1;
        }
        labels.push(row.iter().position(|&b| b).unwrap_or(0));
    }
    Ok(Decoded {
        assignment: CommunityAssignment::new(labels, groups)?,
        repaired_rows,
    })
}
