//! Single-instance commands. Each returns what it would print so the
//! binary stays a thin shell and tests can call the library directly.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use tro_core::io::{load_routing_csv, load_topology_csv, save_routing_csv, save_topology_csv, save_traffic_csv};
use tro_core::{absm, atro_hot_start, AbsmConfig, AtroConfig, Epsilon, LinkLoads, Topology};

use crate::specs::{NetSpec, TrafficSpec, UsageError};

/// JSON report of one `to` or `atro` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub method: &'static str,
    pub n_pods: usize,
    pub mlu: f64,
    pub iterations: usize,
    /// Seconds spent inside the solver call.
    pub wall_time: f64,
    pub total_links: u64,
    pub feasible: bool,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mlu_trajectory: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct AbsmOptions {
    pub epsilon: Option<f64>,
    pub relative_epsilon: Option<f64>,
    pub upper_bound: Option<f64>,
}

impl AbsmOptions {
    pub fn config(&self) -> Result<AbsmConfig> {
        let mut cfg = AbsmConfig::default();
        match (self.epsilon, self.relative_epsilon) {
            (Some(_), Some(_)) => {
                return Err(UsageError("--epsilon and --relative-epsilon are exclusive".into()).into())
            }
            (Some(e), None) => cfg.epsilon = Epsilon::Absolute(e),
            (None, Some(e)) => cfg.epsilon = Epsilon::RelativeToBound(e),
            (None, None) => {}
        }
        cfg.initial_upper_bound = self.upper_bound;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct ToArgs {
    pub net: NetSpec,
    pub traffic: TrafficSpec,
    pub seed: u64,
    pub absm: AbsmOptions,
    pub out_topology: Option<PathBuf>,
}

pub fn run_to(args: &ToArgs) -> Result<RunReport> {
    let net = args.net.build()?;
    let demand = args.traffic.build(&net, args.seed)?;
    let cfg = args.absm.config()?;
    let loads = LinkLoads::direct(&demand);

    let started = Instant::now();
    let sol = absm(&loads, &net, &cfg)?;
    let wall_time = started.elapsed().as_secs_f64();

    if let Some(path) = &args.out_topology {
        save_topology_csv(&sol.topology, path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(RunReport {
        method: "absm",
        n_pods: net.n_pods(),
        mlu: sol.mlu,
        iterations: sol.iterations,
        wall_time,
        total_links: sol.topology.total_links(),
        feasible: sol.feasible,
        converged: true,
        mlu_trajectory: Vec::new(),
    })
}

#[derive(Debug, Clone)]
pub struct AtroArgs {
    pub net: NetSpec,
    pub traffic: TrafficSpec,
    pub seed: u64,
    pub absm: AbsmOptions,
    pub no_refine: bool,
    pub max_rounds: Option<usize>,
    pub round_epsilon: Option<f64>,
    pub seed_topology: Option<PathBuf>,
    pub seed_routing: Option<PathBuf>,
    pub out_topology: Option<PathBuf>,
    pub out_routing: Option<PathBuf>,
}

impl AtroArgs {
    pub fn config(&self) -> Result<AtroConfig> {
        let mut cfg = AtroConfig {
            absm: self.absm.config()?,
            enable_refinement: !self.no_refine,
            ..AtroConfig::default()
        };
        if let Some(r) = self.max_rounds {
            cfg.max_rounds = r;
        }
        if let Some(e) = self.round_epsilon {
            cfg.epsilon = e;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn run_atro(args: &AtroArgs) -> Result<RunReport> {
    let net = args.net.build()?;
    let demand = args.traffic.build(&net, args.seed)?;
    let cfg = args.config()?;
    let n = net.n_pods();
    let seed_topology = args
        .seed_topology
        .as_ref()
        .map(|p| load_topology_csv(p, n).with_context(|| format!("reading {}", p.display())))
        .transpose()?;
    let seed_routing = args
        .seed_routing
        .as_ref()
        .map(|p| load_routing_csv(p, n).with_context(|| format!("reading {}", p.display())))
        .transpose()?;

    let started = Instant::now();
    let res = atro_hot_start(&demand, &net, &cfg, seed_topology.as_ref(), seed_routing.as_ref())?;
    let wall_time = started.elapsed().as_secs_f64();

    if let Some(path) = &args.out_topology {
        save_topology_csv(&res.topology, path).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.out_routing {
        save_routing_csv(&res.routing, path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(RunReport {
        method: "atro",
        n_pods: n,
        mlu: res.report.mlu,
        iterations: res.report.iterations,
        wall_time,
        total_links: res.topology.total_links(),
        feasible: true,
        converged: res.report.converged,
        mlu_trajectory: res.report.mlu_trajectory,
    })
}

/// Uniform allocation on a full mesh: `floor(PORTS / (N - 1))` links on
/// every pair. A dense starting topology for hot starts.
pub fn uniform_topology(net: &NetSpec) -> Result<Topology> {
    let network = net.build()?;
    let n = network.n_pods();
    let per_pair = net.ports / (n as u32 - 1);
    let mut topo = Topology::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            topo.set_links(i, j, per_pair);
        }
    }
    topo.check_budgets(&network)?;
    Ok(topo)
}

pub fn run_gen_topo(net: &NetSpec, out: &std::path::Path) -> Result<Topology> {
    let topo = uniform_topology(net)?;
    save_topology_csv(&topo, out).with_context(|| format!("writing {}", out.display()))?;
    Ok(topo)
}

pub fn run_gen_traffic(net: &NetSpec, traffic: &TrafficSpec, seed: u64, out: &std::path::Path) -> Result<f64> {
    let network = net.build()?;
    let demand = traffic.build(&network, seed)?;
    save_traffic_csv(&demand, out).with_context(|| format!("writing {}", out.display()))?;
    Ok(demand.total())
}
