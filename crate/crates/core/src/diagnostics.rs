use serde::{Deserialize, Serialize};

/// Counters for silently repaired or degraded inputs.
///
/// Merged additively; the pipeline merges per-graph counters in id order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub self_loops_stripped: u64,
    pub duplicate_edges_stripped: u64,
    /// Graphs whose raw node ids were not dense and were compacted.
    pub graphs_remapped: u64,
    /// Labels present in the label file for graphs absent from the edge file.
    pub orphan_labels: u64,
    /// One-hot degree entries clipped into the last slot.
    pub degrees_clipped: u64,
    /// Graphs whose leading adjacency eigenvalue is repeated.
    pub eigenvector_ties: u64,
    /// Edgeless graphs whose eigenvector centrality was replaced by zeros.
    pub eigenvector_zero_fallbacks: u64,
}

impl Diagnostics {
    pub fn merge(&mut self, other: &Diagnostics) {
        self.self_loops_stripped += other.self_loops_stripped;
        self.duplicate_edges_stripped += other.duplicate_edges_stripped;
        self.graphs_remapped += other.graphs_remapped;
        self.orphan_labels += other.orphan_labels;
        self.degrees_clipped += other.degrees_clipped;
        self.eigenvector_ties += other.eigenvector_ties;
        self.eigenvector_zero_fallbacks += other.eigenvector_zero_fallbacks;
    }

    pub fn is_clean(&self) -> bool {
        *self == Diagnostics::default()
    }
}
