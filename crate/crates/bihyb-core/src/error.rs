use core::fmt;

use crate::graph::NodeId;

/// Errors surfaced by graph construction, solvers, and environment calls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    /// A structural precondition was violated (sizes, ranges, shapes).
    Contract(&'static str),
    /// Adding the edge would create a directed cycle.
    WouldCycle { src: NodeId, dst: NodeId },
    /// The graph is not acyclic; carries one edge on a cycle.
    CycleDetected { src: NodeId, dst: NodeId },
    /// Node index out of range for the graph it was used with.
    NodeOutOfRange { node: NodeId, node_count: usize },
    /// The action is not legal in the current environment state.
    IllegalAction { a1: NodeId, a2: NodeId },
    /// `step` was called on a finished episode.
    EpisodeDone,
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::Contract(msg) => write!(f, "contract violation: {msg}"),
            CoreError::WouldCycle { src, dst } => {
                write!(f, "adding edge {src}->{dst} would create a cycle")
            }
            CoreError::CycleDetected { src, dst } => {
                write!(f, "graph contains a cycle through edge {src}->{dst}")
            }
            CoreError::NodeOutOfRange { node, node_count } => {
                write!(f, "node {node} out of range for graph with {node_count} nodes")
            }
            CoreError::IllegalAction { a1, a2 } => {
                write!(f, "action ({a1}, {a2}) is not legal in this state")
            }
            CoreError::EpisodeDone => write!(f, "episode is already done"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CoreError {}

pub type Result<T> = core::result::Result<T, CoreError>;
