use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sensing radius {r_s} is below r_c/sqrt(3) = {min} (r_c = {r_c})")]
    RadiusConstraint { r_c: f64, r_s: f64, min: f64 },

    #[error("hole at ({x}, {y}) with radius {radius} removes every node")]
    HoleSwallowsNetwork { x: f64, y: f64, radius: f64 },

    #[error("raster cell {cell} is coarser than r_s/4 = {limit}")]
    RasterTooCoarse { cell: f64, limit: f64 },

    #[error("partition is not connected ({components} components)")]
    DisconnectedPartition { components: usize },

    #[error("node {0} is not part of the partition")]
    UnknownNode(NodeId),

    #[error("complex has no edges")]
    EmptyComplex,

    #[error("chain is not a cycle: its boundary is nonzero")]
    NotACycle,

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("no path connects boundary components inside the partition")]
    NoConnectingPath,

    #[error("removal leaves no nodes: network too small to classify")]
    Indeterminate,

    #[error("round limit {0} reached before the protocol terminated")]
    RoundLimit(usize),
}
