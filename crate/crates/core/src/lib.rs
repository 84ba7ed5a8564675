//! Randomized acyclic edge coloring with witness-forest bookkeeping, exact
//! counting of the trees that bound its running time, and a numeric
//! certificate for the radius of convergence of their generating function.

pub mod census;
pub mod coloring;
pub mod corpus;
pub mod graph;
pub mod radius;
pub mod recolor;
pub mod series;
pub mod validator;

pub use coloring::{verify, ColorConfig, EdgeColoring, VerifyReport};
pub use graph::{load_graph, Cycle, Graph};
pub use recolor::{check_witness, edge_color, RunOptions, RunStats, WitnessForest};
