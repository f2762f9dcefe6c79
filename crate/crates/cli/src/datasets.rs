//! Bundled graph fixtures and how to find them.

use std::path::{Path, PathBuf};

use modqubo::graph::load_branch_table_with_stats;
use modqubo::{load_edge_list, Graph};

use crate::CliError;

/// Overrides the fixture directory.
pub const DATA_DIR_ENV: &str = "MODQUBO_DATA_DIR";

const DEFAULT_DATA_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    /// `u v [w]` per line.
    EdgeList,
    /// `u v r x` per line, weighted by `1/|r + jx|`.
    BranchTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetEntry {
    pub name: &'static str,
    pub file: &'static str,
    pub format: FileFormat,
    pub weighted_available: bool,
    pub nodes: usize,
    pub edges: usize,
    pub provenance: &'static str,
}

pub const REGISTRY: &[DatasetEntry] = &[
    DatasetEntry {
        name: "karate",
        file: "karate.txt",
        format: FileFormat::EdgeList,
        weighted_available: true,
        nodes: 34,
        edges: 78,
        provenance: "Zachary karate club, networkx karate_club_graph(); weight = interaction count",
    },
    DatasetEntry {
        name: "lesmis",
        file: "lesmis.txt",
        format: FileFormat::EdgeList,
        weighted_available: true,
        nodes: 77,
        edges: 254,
        provenance: "Les Miserables co-appearances, networkx les_miserables_graph(); weight = scene count",
    },
    DatasetEntry {
        name: "football",
        file: "football.txt",
        format: FileFormat::EdgeList,
        weighted_available: false,
        nodes: 115,
        edges: 613,
        provenance: "American college football 2000 (Girvan and Newman); not bundled, supply football.txt",
    },
    DatasetEntry {
        name: "dolphin",
        file: "dolphins.txt",
        format: FileFormat::EdgeList,
        weighted_available: false,
        nodes: 62,
        edges: 159,
        provenance: "Doubtful Sound dolphins (Lusseau et al.); not bundled, supply dolphins.txt",
    },
    DatasetEntry {
        name: "two_triangles",
        file: "two_triangles.txt",
        format: FileFormat::EdgeList,
        weighted_available: false,
        nodes: 6,
        edges: 6,
        provenance: "two disjoint unit triangles (hand-made)",
    },
    DatasetEntry {
        name: "pegase1354",
        file: "pegase1354.txt",
        format: FileFormat::BranchTable,
        weighted_available: true,
        nodes: 1354,
        edges: 1710,
        provenance: "case1354pegase branch table exported from pandapower; see scripts/export_fixtures.py",
    },
];

pub fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR))
}

pub fn lookup(name: &str) -> Option<&'static DatasetEntry> {
    REGISTRY.iter().find(|d| d.name == name)
}

pub fn names() -> String {
    REGISTRY.iter().map(|d| d.name).collect::<Vec<_>>().join(", ")
}

impl DatasetEntry {
    pub fn path(&self) -> PathBuf {
        data_dir().join(self.file)
    }

    pub fn is_present(&self) -> bool {
        self.path().is_file()
    }

    /// Recounts nodes and edges of the fixture on disk.
    pub fn verify(&self) -> Result<(usize, usize), CliError> {
        let g = read_graph(&self.path(), self.format, true)?;
        Ok((g.node_count(), g.edge_count()))
    }
}

/// A graph together with how it was obtained.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    /// Dataset name or the file path as given.
    pub id: String,
    pub weighted: bool,
    pub graph: Graph,
}

fn read_graph(path: &Path, format: FileFormat, weighted: bool) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let g = match format {
        FileFormat::EdgeList => load_edge_list(&text, weighted),
        FileFormat::BranchTable => load_branch_table_with_stats(&text).map(|(g, _)| g),
    }
    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(if weighted { g } else { g.unweighted() })
}

/// Loads a registered dataset by name, or else a file. `weighted = None`
/// uses weights whenever the source has them.
pub fn load(spec: &str, weighted: Option<bool>, format: FileFormat) -> Result<LoadedGraph, CliError> {
    if let Some(entry) = lookup(spec) {
        if weighted == Some(true) && !entry.weighted_available {
            return Err(CliError::Data(format!("dataset {spec} has no edge weights")));
        }
        if !entry.is_present() {
            return Err(CliError::Data(format!(
                "fixture for {spec} not found at {} ({})",
                entry.path().display(),
                entry.provenance
            )));
        }
        let w = weighted.unwrap_or(entry.weighted_available);
        return Ok(LoadedGraph {
            id: spec.to_string(),
            weighted: w,
            graph: read_graph(&entry.path(), entry.format, w)?,
        });
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(CliError::Data(format!(
            "unknown dataset {spec:?} (known: {}) and no such file",
            names()
        )));
    }
    let w = weighted.unwrap_or(true);
    Ok(LoadedGraph {
        id: spec.to_string(),
        weighted: w,
        graph: read_graph(path, format, w)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        for (i, a) in REGISTRY.iter().enumerate() {
            assert!(REGISTRY[i + 1..].iter().all(|b| b.name != a.name));
        }
        assert!(REGISTRY.len() >= 5);
    }

    #[test]
    fn unknown_name_lists_known() {
        let e = load("no-such-graph", None, FileFormat::EdgeList).unwrap_err();
        assert!(e.to_string().contains("karate"));
    }

    #[test]
    fn unweighted_dataset_refuses_weights() {
        assert!(load("two_triangles", Some(true), FileFormat::EdgeList).is_err());
        let g = load("two_triangles", None, FileFormat::EdgeList).unwrap();
        assert!(!g.weighted);
        assert_eq!(g.graph.edge_count(), 6);
    }
}
