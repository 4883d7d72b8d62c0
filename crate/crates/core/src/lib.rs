//! Solver-free joint topology and routing optimization for reconfigurable
//! datacenter networks.
//!
//! The crate covers the one-hop topology problem (exact, by accelerated
//! bisection over the utilization), the two-hop joint problem (alternating
//! topology and routing updates with monotone MLU), and the solver-free
//! baselines and workload generators used to evaluate both.
//!
//! Comparisons written as `!(a < b)` are chosen so that NaN takes the
//! rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod absm;
pub mod atro;
pub mod baselines;
mod error;
pub mod io;
pub mod matrix;
pub mod model;
pub mod refinement;
pub mod ro;
pub mod workloads;

pub use absm::{absm, feasibility_check, refine_upper_bound, required_links, AbsmConfig, Epsilon, ToSolution};
pub use atro::{atro, atro_hot_start, atro_with, AtroConfig, AtroResult};
pub use error::{Error, Result};
pub use matrix::SquareMatrix;
pub use model::{
    check_joint_feasibility, compute_link_loads, compute_mlu, direct_path_routing, LinkLoads, Network,
    Routing, SolveReport, Topology, TrafficMatrix,
};
pub use refinement::refine;
pub use ro::{enumerate_two_hop_paths, solve_ro, PathSet, RoConfig, RoSolution, RoutingOptimizer};
