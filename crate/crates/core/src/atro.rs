//! Alternating topology and routing optimization.
//!
//! Each round re-optimizes the topology for the link loads induced by the
//! current routing, optionally spends leftover ports, re-optimizes the
//! routing on the new topology (hot-started from the previous routing), and
//! recomputes the loads. The accepted MLU never increases: a round whose
//! result is worse than the incumbent is discarded and the loop stops.

use std::time::Instant;

use crate::absm::{absm, AbsmConfig};
use crate::error::{Error, Result};
use crate::model::{
    compute_link_loads, compute_mlu, direct_path_routing, LinkLoads, Network, Routing, SolveReport,
    Topology, TrafficMatrix,
};
use crate::refinement::refine;
use crate::ro::{BlockDescent, PathSet, RoConfig, RoutingOptimizer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtroConfig {
    /// Stop once consecutive rounds differ by less than this.
    pub epsilon: f64,
    pub max_rounds: usize,
    pub enable_refinement: bool,
    pub absm: AbsmConfig,
    pub ro: RoConfig,
}

impl Default for AtroConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            max_rounds: 10,
            enable_refinement: true,
            absm: AbsmConfig::default(),
            ro: RoConfig::default(),
        }
    }
}

impl AtroConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_rounds == 0 {
            return Err(Error::Config("max_rounds must be at least 1".into()));
        }
        self.absm.validate()?;
        self.ro.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtroResult {
    pub topology: Topology,
    pub routing: Routing,
    /// `mlu_trajectory[0]` is the starting point (the one-hop optimum, or
    /// the seed's MLU when hot-started); each later entry is one accepted
    /// round. `iterations` counts executed rounds, rejected ones included.
    pub report: SolveReport,
}

/// Runs the alternating loop from direct-path routing.
pub fn atro(demand: &TrafficMatrix, net: &Network, cfg: &AtroConfig) -> Result<AtroResult> {
    atro_with(demand, net, cfg, &BlockDescent(cfg.ro), None, None)
}

/// Starts from a supplied topology and/or routing. A seed topology skips
/// the first topology step; a seed topology plus routing also skips the
/// first routing step, so the loop begins at the traffic update.
pub fn atro_hot_start(
    demand: &TrafficMatrix,
    net: &Network,
    cfg: &AtroConfig,
    seed_topology: Option<&Topology>,
    seed_routing: Option<&Routing>,
) -> Result<AtroResult> {
    atro_with(demand, net, cfg, &BlockDescent(cfg.ro), seed_topology, seed_routing)
}

/// The loop with a caller-chosen routing optimizer.
pub fn atro_with(
    demand: &TrafficMatrix,
    net: &Network,
    cfg: &AtroConfig,
    optimizer: &dyn RoutingOptimizer,
    seed_topology: Option<&Topology>,
    seed_routing: Option<&Routing>,
) -> Result<AtroResult> {
    cfg.validate()?;
    if demand.n_pods() != net.n_pods() {
        return Err(Error::DimensionMismatch {
            expected: net.n_pods(),
            actual: demand.n_pods(),
        });
    }
    validate_seeds(demand, net, seed_topology, seed_routing)?;
    let started = Instant::now();

    let mut routing = match seed_routing {
        Some(r) => r.clone(),
        None => direct_path_routing(net),
    };
    let mut loads = compute_link_loads(demand, &routing)?;

    let mut incumbent: Option<(Topology, Routing, f64)> = None;
    let mut trajectory = Vec::new();
    let mut previous = f64::INFINITY;
    let mut rounds = 0;
    let mut converged = false;

    while rounds < cfg.max_rounds {
        rounds += 1;
        let first = rounds == 1;

        let (topo, next_routing, u) = match (first, seed_topology, seed_routing) {
            (true, Some(topo), Some(seeded)) => {
                let u = compute_mlu(&loads, topo, net);
                (topo.clone(), seeded.clone(), u)
            }
            _ => {
                let mut topo = match (first, seed_topology) {
                    (true, Some(topo)) => topo.clone(),
                    _ => absm(&loads, net, &cfg.absm)?.topology,
                };
                let init = project_routing(&routing, &topo, demand, net)?;
                if first {
                    // starting point: the pre-refinement topology with the
                    // initial routing, feasible by construction
                    let start = compute_mlu(&compute_link_loads(demand, &init)?, &topo, net);
                    trajectory.push(start);
                    incumbent = Some((topo.clone(), init.clone(), start));
                }
                if cfg.enable_refinement {
                    topo = refine(&topo, &loads, net)?;
                }
                let sol = optimizer.optimize(demand, &topo, net, &init)?;
                (topo, sol.routing, sol.mlu)
            }
        };

        if let Some((_, _, best)) = &incumbent {
            if u > *best {
                converged = true;
                break;
            }
        }
        trajectory.push(u);
        routing = next_routing;
        loads = compute_link_loads(demand, &routing)?;
        incumbent = Some((topo, routing.clone(), u));

        if u <= 0.0 || (u - previous).abs() < cfg.epsilon {
            converged = true;
            break;
        }
        previous = u;
    }

    let (topology, routing, mlu) = incumbent.expect("at least one round runs");
    Ok(AtroResult {
        topology,
        routing,
        report: SolveReport {
            mlu,
            iterations: rounds,
            wall_time: started.elapsed().as_secs_f64(),
            converged,
            mlu_trajectory: trajectory,
        },
    })
}

fn validate_seeds(
    demand: &TrafficMatrix,
    net: &Network,
    seed_topology: Option<&Topology>,
    seed_routing: Option<&Routing>,
) -> Result<()> {
    let seed_err = |e: Error| Error::SeedInfeasible(e.to_string());
    if let Some(topo) = seed_topology {
        topo.check_budgets(net).map_err(seed_err)?;
        let paths = crate::ro::enumerate_two_hop_paths(topo, net)?;
        if let Some((s, d, _)) = demand
            .matrix()
            .off_diagonal()
            .find(|&(s, d, v)| *v > 0.0 && paths.paths(s, d).is_empty())
        {
            return Err(Error::SeedInfeasible(format!(
                "demand {s} -> {d} has no path in the seed topology"
            )));
        }
    }
    if let Some(routing) = seed_routing {
        if routing.n_pods() != net.n_pods() {
            return Err(Error::SeedInfeasible(format!(
                "seed routing covers {} PoDs, network has {}",
                routing.n_pods(),
                net.n_pods()
            )));
        }
        routing.validate(demand).map_err(seed_err)?;
        if let Some(topo) = seed_topology {
            if !routing.uses_only(topo, demand) {
                return Err(Error::SeedInfeasible(
                    "seed routing uses links missing from the seed topology".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Maps `routing` onto `topo`. Splits over vanished paths are dropped and
/// the survivors renormalized; a pair with no surviving path moves wholly
/// onto its widest available path (direct first on ties). Zero-demand
/// pairs are cleared.
pub fn project_routing(
    routing: &Routing,
    topo: &Topology,
    demand: &TrafficMatrix,
    net: &Network,
) -> Result<Routing> {
    let n = net.n_pods();
    let exists = |e: (usize, usize)| topo.get(e.0, e.1) > 0;
    let mut out = Routing::zeros(n);
    for s in 0..n {
        for d in 0..n {
            if s == d || demand.get(s, d) <= 0.0 {
                continue;
            }
            let mut kept = 0.0;
            for (k, &f) in routing.pair(s, d).iter().enumerate() {
                if f > 0.0 && k != s && PathSet::links(s, d, k).iter().all(exists) {
                    out.set_split(s, d, k, f);
                    kept += f;
                }
            }
            if kept > 0.0 {
                for f in out.pair_mut(s, d) {
                    *f /= kept;
                }
                continue;
            }
            let widest = std::iter::once(d)
                .chain((0..n).filter(|&k| k != s && k != d))
                .filter(|&k| PathSet::links(s, d, k).iter().all(exists))
                .map(|k| {
                    let width = PathSet::links(s, d, k)
                        .iter()
                        .map(|(a, b)| f64::from(topo.get(a, b)) * net.link_capacity(a, b))
                        .fold(f64::INFINITY, f64::min);
                    (k, width)
                })
                .fold(None, |best: Option<(usize, f64)>, cand| match best {
                    Some(b) if b.1 >= cand.1 => Some(b),
                    _ => Some(cand),
                });
            match widest {
                Some((k, _)) => out.set_split(s, d, k, 1.0),
                None => return Err(Error::Unroutable { src: s, dst: d }),
            }
        }
    }
    Ok(out)
}

/// Loads of the final solution, handy for reporting.
pub fn final_loads(demand: &TrafficMatrix, result: &AtroResult) -> Result<LinkLoads> {
    compute_link_loads(demand, &result.routing)
}
