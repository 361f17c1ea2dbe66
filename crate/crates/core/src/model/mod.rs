//! Shared domain types: the time grid and the SPDT contact network.

mod grid;
pub mod io;
mod network;

pub use grid::{TimeGrid, DEFAULT_STEP_SECONDS, SECONDS_PER_DAY};
pub use network::{
    ActiveCopy, ContactLink, ContactNetwork, CopySpan, LinkClass, LinkEvent, LinkRecord, NetworkBuilder, NodeId,
};

/// Default indirect window: 3 hours at 5-minute steps.
pub const DEFAULT_DELTA_STEPS: u32 = 36;

#[derive(Debug, thiserror::Error)]
pub enum NetworkError {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("node {node} is out of range (node_count={node_count})")]
    UnknownNode { node: u32, node_count: u32 },
    #[error("hosts must appear in non-decreasing order (host {host} after {previous})")]
    HostOrder { host: u32, previous: u32 },
    #[error("copy [{start},{end}) of node {host} is empty or exceeds the horizon {horizon}")]
    CopyInterval { host: u32, start: u32, end: u32, horizon: u32 },
    #[error("copy starting at {start} of node {host} does not start after the previous copy ending at {previous_end}")]
    CopyOrder { host: u32, start: u32, previous_end: u32 },
    #[error("link record has no enclosing copy")]
    NoCopy,
    #[error("self-link on node {host}")]
    SelfLink { host: u32 },
    #[error("join step {join} outside the lifetime [{copy_start},{copy_end}+{delta}) of a copy of node {host}")]
    LinkWindow { host: u32, copy_start: u32, copy_end: u32, join: u32, delta: u32 },
    #[error("link join step {join} is not before leave step {leave}")]
    LinkDuration { join: u32, leave: u32 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<NetworkError>,
    },
    #[error("metadata: {0}")]
    Metadata(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
