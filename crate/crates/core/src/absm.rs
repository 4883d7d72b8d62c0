//! One-hop topology optimization.
//!
//! For a candidate utilization `u` the minimal symmetric allocation that
//! carries every load is `n_{i,j} = ceil(max(T_{i,j}, T_{j,i}) / (u S_{i,j}))`,
//! and `u` is achievable iff that allocation fits every port budget.
//! Feasibility is monotone in `u`, so a bisection finds the optimum; each
//! feasible probe also yields the exact utilization of its allocation,
//! which replaces the midpoint as the new upper bound.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::model::{LinkLoads, Network, Topology};

/// Convergence threshold for the bisection gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Absolute(f64),
    /// Fraction of the initial upper bound.
    RelativeToBound(f64),
}

impl Epsilon {
    fn value(self) -> f64 {
        match self {
            Epsilon::Absolute(v) | Epsilon::RelativeToBound(v) => v,
        }
    }

    fn resolve(self, upper_bound: f64) -> f64 {
        match self {
            Epsilon::Absolute(v) => v,
            Epsilon::RelativeToBound(v) => v * upper_bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsmConfig {
    pub epsilon: Epsilon,
    /// `None` selects `max T_{i,j}/S_{i,j} + 1`.
    pub initial_upper_bound: Option<f64>,
    pub max_iterations: usize,
}

impl Default for AbsmConfig {
    fn default() -> Self {
        Self {
            epsilon: Epsilon::RelativeToBound(1e-6),
            initial_upper_bound: None,
            max_iterations: 10_000,
        }
    }
}

impl AbsmConfig {
    pub fn validate(&self) -> Result<()> {
        let eps = self.epsilon.value();
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive, got {eps}")));
        }
        if let Some(m) = self.initial_upper_bound {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::Config(format!(
                    "initial upper bound must be positive, got {m}"
                )));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToSolution {
    pub topology: Topology,
    pub mlu: f64,
    /// Feasibility probes, counting the initial probe at the upper bound.
    pub iterations: usize,
    pub feasible: bool,
    /// Upper bound the search started from.
    pub upper_bound: f64,
    /// Absolute gap threshold actually used.
    pub epsilon: f64,
}

impl ToSolution {
    /// `ceil(log2(M / eps)) + 1`, the most probes the search can take.
    pub fn iteration_bound(&self) -> usize {
        iteration_bound(self.upper_bound, self.epsilon)
    }
}

pub fn iteration_bound(upper_bound: f64, epsilon: f64) -> usize {
    if upper_bound <= epsilon {
        return 1;
    }
    (upper_bound / epsilon).log2().ceil() as usize + 1
}

/// Ceiling that absorbs floating-point noise just above an integer, so a
/// ratio like `T / (T / n)` evaluating to `n + 1e-16` still yields `n`.
#[inline]
fn robust_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * r.max(1.0) {
        r
    } else {
        x.ceil()
    }
}

fn check_dims(loads: &LinkLoads, net: &Network) -> Result<()> {
    if loads.n_pods() != net.n_pods() {
        return Err(Error::DimensionMismatch {
            expected: net.n_pods(),
            actual: loads.n_pods(),
        });
    }
    Ok(())
}

fn check_utilization(u: f64) -> Result<()> {
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::InvalidUtilization(u));
    }
    Ok(())
}

/// Minimal symmetric link counts carrying `loads` at utilization `u`.
pub fn required_links(loads: &LinkLoads, net: &Network, u: f64) -> Result<SquareMatrix<u32>> {
    check_dims(loads, net)?;
    check_utilization(u)?;
    Ok(required_links_unchecked(loads, net, u))
}

fn required_links_unchecked(loads: &LinkLoads, net: &Network, u: f64) -> SquareMatrix<u32> {
    let n = loads.n_pods();
    let mut links = SquareMatrix::<u32>::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let t = loads.get(i, j).max(loads.get(j, i));
            if t <= 0.0 {
                continue;
            }
            let count = robust_ceil(t / (u * net.link_capacity(i, j))) as u32;
            links[(i, j)] = count;
            links[(j, i)] = count;
        }
    }
    links
}

fn fits_budgets(links: &SquareMatrix<u32>, net: &Network) -> bool {
    (0..links.dim()).all(|i| {
        let used: u64 = links.row(i).iter().map(|&v| u64::from(v)).sum();
        used <= u64::from(net.port_budget(i))
    })
}

/// Whether `u` is achievable, together with the minimal allocation at `u`.
pub fn feasibility_check(
    loads: &LinkLoads,
    net: &Network,
    u: f64,
) -> Result<(bool, SquareMatrix<u32>)> {
    let links = required_links(loads, net, u)?;
    Ok((fits_budgets(&links, net), links))
}

/// Exact utilization of an allocation: `max T_{i,j} / (n_{i,j} S_{i,j})`.
pub fn refine_upper_bound(loads: &LinkLoads, net: &Network, links: &SquareMatrix<u32>) -> f64 {
    let n = loads.n_pods();
    let mut best = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let t = loads.get(i, j);
            if i == j || t <= 0.0 {
                continue;
            }
            let count = links[(i, j)];
            if count == 0 {
                return f64::INFINITY;
            }
            best = best.max(t / (f64::from(count) * net.link_capacity(i, j)));
        }
    }
    best
}

/// Upper bound of a one-link-per-loaded-pair allocation, plus one.
pub fn auto_upper_bound(loads: &LinkLoads, net: &Network) -> f64 {
    let n = loads.n_pods();
    let mut worst = 0.0f64;
    for (i, j, &t) in loads.matrix().off_diagonal() {
        if t > 0.0 {
            worst = worst.max(t / net.link_capacity(i, j));
        }
    }
    debug_assert_eq!(n, net.n_pods());
    worst + 1.0
}

/// Every loaded pair needs at least one link, so a PoD with more loaded
/// neighbours than ports is infeasible at any utilization.
fn hard_infeasibility(loads: &LinkLoads, net: &Network) -> Option<String> {
    let n = loads.n_pods();
    (0..n).find_map(|i| {
        let neighbours = (0..n)
            .filter(|&j| j != i && (loads.get(i, j) > 0.0 || loads.get(j, i) > 0.0))
            .count();
        (neighbours as u64 > u64::from(net.port_budget(i))).then(|| {
            format!(
                "PoD {i} has {neighbours} loaded neighbours but only {} ports",
                net.port_budget(i)
            )
        })
    })
}

/// Accelerated binary search for the minimum achievable one-hop MLU.
pub fn absm(loads: &LinkLoads, net: &Network, cfg: &AbsmConfig) -> Result<ToSolution> {
    check_dims(loads, net)?;
    cfg.validate()?;
    if let Some(reason) = hard_infeasibility(loads, net) {
        return Err(Error::Infeasible(reason));
    }

    let upper_bound = cfg
        .initial_upper_bound
        .unwrap_or_else(|| auto_upper_bound(loads, net));
    let epsilon = cfg.epsilon.resolve(upper_bound);
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("resolved epsilon {epsilon} is not positive")));
    }

    let mut links = required_links_unchecked(loads, net, upper_bound);
    if !fits_budgets(&links, net) {
        return Err(Error::Infeasible(format!(
            "port budgets cannot carry the loads at utilization {upper_bound}"
        )));
    }
    let mut iterations = 1;
    let mut lower = 0.0f64;
    let mut upper = refine_upper_bound(loads, net, &links);

    while upper - lower > epsilon {
        if iterations >= cfg.max_iterations {
            break;
        }
        iterations += 1;
        let mid = 0.5 * (lower + upper);
        let candidate = required_links_unchecked(loads, net, mid);
        if fits_budgets(&candidate, net) {
            upper = refine_upper_bound(loads, net, &candidate);
            links = candidate;
        } else {
            lower = mid;
        }
    }

    Ok(ToSolution {
        topology: Topology::new(links).expect("required links are symmetric by construction"),
        mlu: upper,
        iterations,
        feasible: true,
        upper_bound,
        epsilon,
    })
}
