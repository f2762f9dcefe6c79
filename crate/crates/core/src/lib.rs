//! Modularity-maximizing graph partitioning.
//!
//! A graph and a group count are turned into a binary quadratic model
//! whose feasible minima are the maximum-modularity partitions, which a
//! parallel-trial annealer then searches under a wall-clock budget.
//!
//! ```
//! use modqubo::{load_edge_list, partition, PartitionConfig, SolverConfig};
//!
//! let g = load_edge_list("0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n2 3\n", false).unwrap();
//! let config = PartitionConfig {
//!     solver: SolverConfig::default().with_time_limit(0.2),
//!     ..Default::default()
//! };
//! let r = partition(&g, 2, &config).unwrap();
//! assert!(r.feasible);
//! assert!((r.modularity - 5.0 / 14.0).abs() < 1e-12);
//! ```

pub mod anneal;
pub mod engine;
pub mod error;
pub mod graph;
pub mod qubo;

pub use anneal::{anneal, SolveResult, SolverConfig};
pub use engine::{
    brute_force_best, oracle_suite, partition, repair, sweep_k, time_study, OracleCase,
    PartitionConfig, PartitionResult, SweepReport, SweepRow, TimeStudyRow,
};
pub use error::{Error, Result};
pub use graph::{
    load_branch_table, load_edge_list, modularity, CommunityAssignment, Graph, ModularityParams,
};
pub use qubo::{ConstraintMode, PenaltyWeights};
