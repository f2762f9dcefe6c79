//! Machine-readable run output.

use serde::{Deserialize, Serialize};

use modqubo::{modularity, CommunityAssignment, Graph, ModularityParams, PartitionResult};

use crate::CliError;

pub const SCHEMA: &str = "modqubo.run/1";

/// Everything needed to rerun and check one partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    /// Dataset name or file path.
    pub graph: String,
    pub weighted: bool,
    pub nodes: usize,
    pub edges: usize,
    pub k: usize,
    pub mode: String,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: f64,
    pub seed: u64,
    pub time_limit_sec: f64,
    pub solve_time_sec: f64,
    /// Annealing steps taken; `replay` reruns exactly this many.
    pub steps: u64,
    pub q: f64,
    pub feasible: bool,
    pub repaired_rows: usize,
    pub empty_groups: usize,
    pub assignment: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FlatRecord {
    schema: String,
    graph: String,
    weighted: bool,
    nodes: usize,
    edges: usize,
    k: usize,
    mode: String,
    lambda1: f64,
    lambda2: f64,
    gamma: f64,
    seed: u64,
    time_limit_sec: f64,
    solve_time_sec: f64,
    steps: u64,
    q: f64,
    feasible: bool,
    repaired_rows: usize,
    empty_groups: usize,
    /// Space-separated labels.
    assignment: String,
}

impl RunRecord {
    pub fn new(graph_id: &str, weighted: bool, g: &Graph, mode: &str, gamma: f64, r: &PartitionResult) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            graph: graph_id.to_string(),
            weighted,
            nodes: g.node_count(),
            edges: g.edge_count(),
            k: r.assignment.group_count(),
            mode: mode.to_string(),
            lambda1: r.lambda_used.lambda1,
            lambda2: r.lambda_used.lambda2,
            gamma,
            seed: r.seed,
            time_limit_sec: r.time_limit_sec,
            solve_time_sec: r.solve_time,
            steps: r.steps,
            q: r.modularity,
            feasible: r.feasible,
            repaired_rows: r.repaired_rows,
            empty_groups: r.empty_groups,
            assignment: r.assignment.labels().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let r: Self = serde_json::from_str(text).map_err(|e| CliError::Data(format!("bad run record: {e}")))?;
        r.check_schema()?;
        Ok(r)
    }

    /// Header plus one row; the assignment column is space-separated.
    pub fn to_csv(&self) -> String {
        let flat = FlatRecord {
            schema: self.schema.clone(),
            graph: self.graph.clone(),
            weighted: self.weighted,
            nodes: self.nodes,
            edges: self.edges,
            k: self.k,
            mode: self.mode.clone(),
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            gamma: self.gamma,
            seed: self.seed,
            time_limit_sec: self.time_limit_sec,
            solve_time_sec: self.solve_time_sec,
            steps: self.steps,
            q: self.q,
            feasible: self.feasible,
            repaired_rows: self.repaired_rows,
            empty_groups: self.empty_groups,
            assignment: self
                .assignment
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(flat).expect("record serializes");
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let bad = |e: &dyn std::fmt::Display| CliError::Data(format!("bad run record: {e}"));
        let mut rows = csv::Reader::from_reader(text.as_bytes()).into_deserialize::<FlatRecord>();
        let f = match rows.next() {
            Some(row) => row.map_err(|e| bad(&e))?,
            None => return Err(bad(&"no data row")),
        };
        let assignment = f
            .assignment
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(&e))?;
        let r = Self {
            schema: f.schema,
            graph: f.graph,
            weighted: f.weighted,
            nodes: f.nodes,
            edges: f.edges,
            k: f.k,
            mode: f.mode,
            lambda1: f.lambda1,
            lambda2: f.lambda2,
            gamma: f.gamma,
            seed: f.seed,
            time_limit_sec: f.time_limit_sec,
            solve_time_sec: f.solve_time_sec,
            steps: f.steps,
            q: f.q,
            feasible: f.feasible,
            repaired_rows: f.repaired_rows,
            empty_groups: f.empty_groups,
            assignment,
        };
        r.check_schema()?;
        Ok(r)
    }

    /// Parses JSON or CSV, whichever the text looks like.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_csv(text)
        }
    }

    fn check_schema(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA {
            return Err(CliError::Data(format!(
                "unsupported record schema {:?} (expected {SCHEMA})",
                self.schema
            )));
        }
        Ok(())
    }

    /// Rechecks the record against `g` and returns the recomputed modularity,
    /// which must match the recorded one.
    pub fn validate(&self, g: &Graph) -> Result<f64, CliError> {
        if self.assignment.len() != self.nodes || self.nodes != g.node_count() {
            return Err(CliError::Data(format!(
                "assignment has {} labels, record says {} nodes, graph has {}",
                self.assignment.len(),
                self.nodes,
                g.node_count()
            )));
        }
        if self.edges != g.edge_count() {
            return Err(CliError::Data(format!(
                "record says {} edges, graph has {}",
                self.edges,
                g.edge_count()
            )));
        }
        let a = CommunityAssignment::new(self.assignment.clone(), self.k)?;
        let q = modularity(g, &a, &ModularityParams { gamma: self.gamma })?;
        if (q - self.q).abs() > 1e-12 {
            return Err(CliError::Data(format!(
                "recorded Q {} differs from recomputed {q}",
                self.q
            )));
        }
        if self.feasible && a.empty_groups() > 0 {
            return Err(CliError::Data("record claims feasibility but has empty groups".into()));
        }
        Ok(q)
    }
}
