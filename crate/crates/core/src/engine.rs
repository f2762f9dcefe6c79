//! Graph → model → anneal → decode → repair pipeline, K sweeps, budget
//! studies and the exhaustive oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anneal::{anneal, par::map_ordered, SolverConfig};
use crate::error::{domain, Error, Result};
use crate::graph::{
    modularity, random_connected_graph, CommunityAssignment, Graph, ModularityParams,
};
use crate::qubo::{
    decode, CommunityModel, ConstraintMode, PenaltyWeights, VariableLayout,
    DEFAULT_DENSE_TERM_LIMIT,
};

/// Largest number of labelings `brute_force_best` will enumerate.
pub const ORACLE_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionConfig {
    pub solver: SolverConfig,
    pub mode: ConstraintMode,
    /// `None` selects the automatic weight.
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub params: ModularityParams,
    pub dense_term_limit: usize,
    /// Resolve non-one-hot rows and empty groups after annealing.
    pub repair: bool,
    /// Run sweep rows concurrently. Each row still gets its full wall-clock
    /// budget, so this only helps with spare cores.
    pub parallel_rows: bool,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            mode: ConstraintMode::Inequality,
            lambda1: None,
            lambda2: None,
            params: ModularityParams::default(),
            dense_term_limit: DEFAULT_DENSE_TERM_LIMIT,
            repair: true,
            parallel_rows: false,
        }
    }
}

impl PartitionConfig {
    /// Penalty weights for `g`, filling automatic entries.
    pub fn weights_for(&self, g: &Graph) -> Result<PenaltyWeights> {
        let auto = PenaltyWeights::auto(g, &self.params);
        PenaltyWeights::new(
            self.lambda1.unwrap_or(auto.lambda1),
            self.lambda2.unwrap_or(auto.lambda2),
        )
    }

    pub fn build_model(&self, g: &Graph, groups: usize) -> Result<CommunityModel> {
        check_groups(g, groups)?;
        self.params.validate()?;
        let layout = VariableLayout::new(g.node_count(), groups, self.mode);
        CommunityModel::build(
            g,
            layout,
            &self.params,
            self.weights_for(g)?,
            self.dense_term_limit,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    pub assignment: CommunityAssignment,
    /// Recomputed from `assignment`, never taken from the solver energy.
    pub modularity: f64,
    /// Every node in one group and no group empty, after any repair.
    pub feasible: bool,
    /// Node rows of the annealer output that were not one-hot.
    pub repaired_rows: usize,
    /// Empty groups in the annealer output before repair.
    pub empty_groups: usize,
    pub solve_time: f64,
    pub time_limit_sec: f64,
    pub best_energy: f64,
    pub lambda_used: PenaltyWeights,
    pub seed: u64,
    pub sweeps: u64,
    pub steps: u64,
    pub scanned_steps: u64,
    pub accepted_flips: u64,
    pub offset_events: u64,
}

impl PartitionResult {
    /// True when the annealer output needed no repair at all.
    pub fn raw_feasible(&self) -> bool {
        self.repaired_rows == 0 && self.empty_groups == 0
    }
}

fn check_groups(g: &Graph, groups: usize) -> Result<()> {
    if groups == 0 {
        return Err(domain("group count must be at least 1"));
    }
    if groups > g.node_count() {
        return Err(domain(format!(
            "cannot form {groups} non-empty groups from {} nodes",
            g.node_count()
        )));
    }
    Ok(())
}

/// Partitions `g` into `groups` communities within the configured budget.
pub fn partition(g: &Graph, groups: usize, config: &PartitionConfig) -> Result<PartitionResult> {
    let model = config.build_model(g, groups)?;
    let solved = anneal(&model, &config.solver)?;
    let decoded = decode(&solved.best_bits, model.layout(), true)?;
    let empty_groups = decoded.assignment.empty_groups();
    let assignment = if config.repair {
        repair(g, &decoded.assignment, groups, &config.params)?
    } else {
        decoded.assignment
    };
    let feasible = (config.repair || decoded.repaired_rows == 0) && assignment.empty_groups() == 0;
    Ok(PartitionResult {
        modularity: modularity(g, &assignment, &config.params)?,
        assignment,
        feasible,
        repaired_rows: decoded.repaired_rows,
        empty_groups,
        solve_time: solved.solve_time,
        time_limit_sec: config.solver.time_limit_sec,
        best_energy: solved.best_energy,
        lambda_used: model.weights(),
        seed: config.solver.seed,
        sweeps: solved.sweeps,
        steps: solved.steps,
        scanned_steps: solved.scanned_steps,
        accepted_flips: solved.accepted_flips,
        offset_events: solved.offset_events,
    })
}

/// Fills empty groups one at a time. Each empty group receives the node
/// whose move raises modularity the most (lowest node on ties), drawn only
/// from groups holding at least two nodes.
pub fn repair(
    g: &Graph,
    a: &CommunityAssignment,
    groups: usize,
    params: &ModularityParams,
) -> Result<CommunityAssignment> {
    check_groups(g, groups)?;
    if a.len() != g.node_count() {
        return Err(Error::Dimension {
            expected: g.node_count(),
            got: a.len(),
        });
    }
    if a.group_count() > groups {
        return Err(domain(format!(
            "assignment uses {} groups, more than {groups}",
            a.group_count()
        )));
    }
    let mut out = a.clone().with_groups(groups);
    let m = g.total_weight();
    let mut sizes = out.group_sizes();
    let mut group_degree = vec![0.0; groups];
    for (i, &c) in out.labels().iter().enumerate() {
        group_degree[c] += g.degree(i);
    }
    for target in 0..groups {
        if sizes[target] > 0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..g.node_count() {
            let from = out.labels()[i];
            if sizes[from] < 2 {
                continue;
            }
            let k = g.degree(i);
            let internal: f64 = g
                .neighbors(i)
                .filter(|&(j, _)| out.labels()[j] == from)
                .map(|(_, w)| w)
                .sum();
            let gain = -internal / m
                - params.gamma * k * (k - group_degree[from]) / (2.0 * m * m);
            if best.is_none_or(|(_, b)| gain > b) {
                best = Some((i, gain));
            }
        }
        let (i, _) = best.expect("more nodes than groups leaves a donor");
        let from = out.labels()[i];
        out.set(i, target);
        sizes[from] -= 1;
        sizes[target] += 1;
        group_degree[from] -= g.degree(i);
        group_degree[target] += g.degree(i);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub groups: usize,
    pub seed: u64,
    pub outcome: std::result::Result<PartitionResult, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub config: PartitionConfig,
}

impl SweepReport {
    /// Row with the highest modularity among successful rows.
    pub fn best(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.outcome.is_ok())
            .max_by(|a, b| {
                let q = |r: &SweepRow| r.outcome.as_ref().map_or(f64::MIN, |p| p.modularity);
                q(a).total_cmp(&q(b)).then(b.groups.cmp(&a.groups))
            })
    }
}

/// One partition per group count in `groups`, seeded `base_seed + K`.
/// Errors stay in their row.
pub fn sweep_k(
    g: &Graph,
    groups: std::ops::RangeInclusive<usize>,
    config: &PartitionConfig,
) -> SweepReport {
    let ks: Vec<usize> = groups.collect();
    let run = |k: usize| {
        let seed = config.solver.seed.wrapping_add(k as u64);
        let mut c = config.clone();
        c.solver.seed = seed;
        SweepRow {
            groups: k,
            seed,
            outcome: partition(g, k, &c),
        }
    };
    let mut rows = if config.parallel_rows {
        map_ordered(ks, run)
    } else {
        ks.into_iter().map(run).collect()
    };
    rows.sort_by_key(|r| r.groups);
    SweepReport {
        rows,
        config: config.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStudyRow {
    pub time_limit_sec: f64,
    pub solve_time: f64,
    pub modularity: f64,
    pub feasible: bool,
}

/// Independent runs, one per budget, all with the configured seed.
pub fn time_study(
    g: &Graph,
    groups: usize,
    budgets: &[f64],
    config: &PartitionConfig,
) -> Result<Vec<TimeStudyRow>> {
    if budgets.is_empty() {
        return Err(domain("no time budgets given"));
    }
    if let Some(b) = budgets.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
        return Err(domain(format!("time budgets must be positive, got {b}")));
    }
    budgets
        .iter()
        .map(|&b| {
            let mut c = config.clone();
            c.solver.time_limit_sec = b;
            let r = partition(g, groups, &c)?;
            Ok(TimeStudyRow {
                time_limit_sec: b,
                solve_time: r.solve_time,
                modularity: r.modularity,
                feasible: r.feasible,
            })
        })
        .collect()
}

/// Exact maximum-modularity partition into exactly `groups` non-empty
/// groups. Labelings are enumerated as restricted growth strings, so the
/// first maximum found is the lexicographically smallest canonical one.
pub fn brute_force_best(
    g: &Graph,
    groups: usize,
    params: &ModularityParams,
) -> Result<(CommunityAssignment, f64)> {
    check_groups(g, groups)?;
    let n = g.node_count();
    let size = (groups as f64).powi(n as i32);
    if size > ORACLE_LIMIT {
        return Err(Error::TooLarge {
            size,
            limit: ORACLE_LIMIT,
        });
    }
    if groups == 1 {
        let a = CommunityAssignment::single(n);
        let q = modularity(g, &a, params)?;
        return Ok((a, q));
    }
    let mut search = Enumeration {
        g,
        params,
        groups,
        labels: vec![0; n],
        best: None,
    };
    search.descend(1, 1)?;
    let (labels, q) = search.best.expect("groups <= n admits a surjection");
    Ok((CommunityAssignment::new(labels, groups)?, q))
}

struct Enumeration<'a> {
    g: &'a Graph,
    params: &'a ModularityParams,
    groups: usize,
    labels: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
}

impl Enumeration<'_> {
    fn descend(&mut self, i: usize, used: usize) -> Result<()> {
        let n = self.labels.len();
        if n - i < self.groups - used {
            return Ok(());
        }
        if i == n {
            let a = CommunityAssignment::new(self.labels.clone(), self.groups)?;
            let q = modularity(self.g, &a, self.params)?;
            if self.best.as_ref().is_none_or(|(_, b)| q > b + 1e-12) {
                self.best = Some((self.labels.clone(), q));
            }
            return Ok(());
        }
        for c in 0..=used.min(self.groups - 1) {
            self.labels[i] = c;
            self.descend(i + 1, used.max(c + 1))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct OracleCase {
    pub graph: Graph,
    pub groups: usize,
    pub solver_q: f64,
    pub oracle_q: f64,
    pub feasible: bool,
}

impl OracleCase {
    pub fn matches(&self) -> bool {
        self.feasible && (self.solver_q - self.oracle_q).abs() <= 1e-10
    }
}

/// Random connected graphs with 5 to 8 nodes (edge probability 0.5) and
/// group counts 2 or 3, each solved by [`partition`] and by
/// [`brute_force_best`]. Case `c` anneals with seed `config.solver.seed + c`.
pub fn oracle_suite(cases: usize, graph_seed: u64, config: &PartitionConfig) -> Result<Vec<OracleCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(graph_seed);
    let mut out = Vec::with_capacity(cases);
    for c in 0..cases {
        let n = rng.gen_range(5..=8);
        let groups = rng.gen_range(2..=3);
        let g = random_connected_graph(n, 0.5, &mut rng);
        let (_, oracle_q) = brute_force_best(&g, groups, &config.params)?;
        let mut cfg = config.clone();
        cfg.solver.seed = config.solver.seed.wrapping_add(c as u64);
        let r = partition(&g, groups, &cfg)?;
        out.push(OracleCase {
            graph: g,
            groups,
            solver_q: r.modularity,
            oracle_q,
            feasible: r.feasible,
        });
    }
    Ok(out)
}
