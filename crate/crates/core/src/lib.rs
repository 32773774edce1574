//! Orientations of complete multipartite graphs.
//!
//! * [`graph`]: topologies, orientations, distances and diameters.
//! * [`construct`]: explicit diameter-2 orientations of `K(3,3,q)` and
//!   `K(3,4,q)`, middle-layer bipartite orientations, tournaments.
//! * [`analysis`]: sign-vector partitions, structural checks, case
//!   signatures and antichains.
//! * [`search`]: exhaustive diameter-2 decision, brute-force oracles and
//!   DIMACS export.
//! * [`io`] and [`claims`]: file formats and the claim report.

pub mod analysis;
pub mod claims;
pub mod construct;
pub mod graph;
pub mod io;
pub mod par;
pub mod search;

pub use graph::{Distance, GraphTopology, Orientation};
