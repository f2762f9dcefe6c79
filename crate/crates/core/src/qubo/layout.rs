/// How the non-empty-group constraint is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintMode {
    /// Penalty `Σ_k max(0, 1 − |group k|)²` evaluated from occupancy
    /// counters; node variables only.
    Inequality,
    /// Quadratic penalty over node variables plus one-hot slack bits
    /// encoding `|group k| − 1`.
    Slack,
}

impl ConstraintMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Inequality => "inequality",
            Self::Slack => "slack",
        }
    }
}

impl std::str::FromStr for ConstraintMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inequality" | "native-inequality" => Ok(Self::Inequality),
            "slack" | "slack-qubo" => Ok(Self::Slack),
            other => Err(format!("unknown mode {other:?} (expected inequality|slack)")),
        }
    }
}

/// Maps `(node, group)` and `(group, slack level)` pairs to flat variable
/// indices. Node variables occupy the first `n·K` indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableLayout {
    nodes: usize,
    groups: usize,
    mode: ConstraintMode,
}

impl VariableLayout {
    pub fn new(nodes: usize, groups: usize, mode: ConstraintMode) -> Self {
        Self {
            nodes,
            groups,
            mode,
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn mode(&self) -> ConstraintMode {
        self.mode
    }

    pub fn node_block(&self) -> usize {
        self.nodes * self.groups
    }

    pub fn dimension(&self) -> usize {
        match self.mode {
            ConstraintMode::Inequality => self.node_block(),
            ConstraintMode::Slack => 2 * self.node_block(),
        }
    }

    #[inline]
    pub fn node_index(&self, node: usize, group: usize) -> usize {
        debug_assert!(node < self.nodes && group < self.groups);
        node * self.groups + group
    }

    /// Index of slack bit `y_{k,d}`, `d ∈ 0..n`. Only valid in slack mode.
    #[inline]
    pub fn slack_index(&self, group: usize, level: usize) -> usize {
        debug_assert!(self.mode == ConstraintMode::Slack);
        debug_assert!(group < self.groups && level < self.nodes);
        self.node_block() + group * self.nodes + level
    }

    /// Splits a node-variable index back into `(node, group)`.
    #[inline]
    pub fn node_of(&self, index: usize) -> Option<(usize, usize)> {
        (index < self.node_block()).then(|| (index / self.groups, index % self.groups))
    }
}
