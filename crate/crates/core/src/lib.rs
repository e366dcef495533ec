//! Coordinate-free topology tools for sensor networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`deploy`] generates node deployments, injects coverage holes and
//!   wormholes and keeps the geometric ground truth used by tests.
//! * [`graph`] holds the communication graph, the only structure the
//!   algorithms are allowed to read.
//! * [`complex`] builds the Rips complex of a graph and provides boundary
//!   operators, exact homology, the first combinatorial Laplacian and the
//!   spectral rank-deficiency test.
//! * [`runtime`] is a synchronous round-based message-passing engine with the
//!   distributed protocols (eccentricity, max consensus, flooding, power
//!   iteration) and broadcast accounting.
//! * [`locator`] is the divide-and-conquer coverage-hole localizer.
//! * [`worm`] classifies surviving cycles as coverage holes or wormholes and
//!   localizes wormhole endpoints.

pub mod complex;
pub mod deploy;
pub mod error;
pub mod graph;
pub mod locator;
pub mod runtime;
pub mod worm;

pub use error::{Error, Result};
pub use graph::{CommGraph, NodeId};
