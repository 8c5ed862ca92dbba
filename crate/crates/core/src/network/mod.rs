//! Time-varying communication graphs and doubly stochastic mixing weights.

mod edges;
mod mixing;
mod topology;
mod weights;

pub use edges::{format_schedule, parse_schedule, EdgeSet};
pub use mixing::{
    convolution_limit_check, geometric_mixing_bound, max_deviation_from_average,
    transition_product,
};
pub use topology::{is_strongly_connected, random_regular_graph, Topology, TopologySchedule};
pub use weights::{metropolis_weights, WeightAudit, WeightMatrix, STOCHASTIC_TOL};
