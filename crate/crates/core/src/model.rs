//! Domain types shared by every solver, plus the load and utilization
//! arithmetic that couples a topology to a routing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Absolute slack accepted when checking that a pair's splits sum to one.
pub const SPLIT_TOLERANCE: f64 = 1e-9;

/// PoD count, per-PoD port budgets and per-port capacities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    port_budget: Vec<u32>,
    port_capacity: Vec<f64>,
}

impl Network {
    pub fn new(port_budget: Vec<u32>, port_capacity: Vec<f64>) -> Result<Self> {
        if port_budget.len() != port_capacity.len() {
            return Err(Error::InvalidNetwork(format!(
                "{} port budgets but {} port capacities",
                port_budget.len(),
                port_capacity.len()
            )));
        }
        if port_budget.len() < 2 {
            return Err(Error::InvalidNetwork("at least two PoDs required".into()));
        }
        if let Some((i, s)) = port_capacity
            .iter()
            .enumerate()
            .find(|(_, s)| !(s.is_finite() && **s > 0.0))
        {
            return Err(Error::InvalidNetwork(format!(
                "PoD {i} has non-positive port capacity {s}"
            )));
        }
        Ok(Self {
            port_budget,
            port_capacity,
        })
    }

    /// Every PoD gets `ports` ports of capacity `capacity`.
    pub fn uniform(n_pods: usize, ports: u32, capacity: f64) -> Result<Self> {
        Self::new(vec![ports; n_pods], vec![capacity; n_pods])
    }

    pub fn n_pods(&self) -> usize {
        self.port_budget.len()
    }

    pub fn port_budget(&self, i: usize) -> u32 {
        self.port_budget[i]
    }

    pub fn port_budgets(&self) -> &[u32] {
        &self.port_budget
    }

    pub fn port_capacity(&self, i: usize) -> f64 {
        self.port_capacity[i]
    }

    /// Capacity of one logical link between `i` and `j`: `min(S_i, S_j)`.
    #[inline]
    pub fn link_capacity(&self, i: usize, j: usize) -> f64 {
        self.port_capacity[i].min(self.port_capacity[j])
    }

    /// Number of directed candidate links in a full mesh, `N(N-1)`.
    pub fn candidate_edge_count(&self) -> usize {
        let n = self.n_pods();
        n * (n - 1)
    }

    fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.n_pods() {
            return Err(Error::DimensionMismatch {
                expected: self.n_pods(),
                actual,
            });
        }
        Ok(())
    }
}

/// Non-negative demand matrix `D` with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficMatrix(SquareMatrix<f64>);

impl TrafficMatrix {
    pub fn new(demand: SquareMatrix<f64>) -> Result<Self> {
        for i in 0..demand.dim() {
            for j in 0..demand.dim() {
                let v = demand[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidTraffic(format!(
                        "entry ({i}, {j}) = {v} is not a finite non-negative value"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::InvalidTraffic(format!(
                        "diagonal entry ({i}, {i}) = {v} must be zero"
                    )));
                }
            }
        }
        Ok(Self(demand))
    }

    pub fn zeros(n: usize) -> Self {
        Self(SquareMatrix::zeros(n))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        Self::new(SquareMatrix::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn n_pods(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn matrix(&self) -> &SquareMatrix<f64> {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.as_slice().iter().sum()
    }

    /// Elementwise sum, used to layer sparse flows over a background.
    pub fn add(&self, other: &TrafficMatrix) -> Result<TrafficMatrix> {
        if other.n_pods() != self.n_pods() {
            return Err(Error::DimensionMismatch {
                expected: self.n_pods(),
                actual: other.n_pods(),
            });
        }
        Ok(Self(SquareMatrix::from_fn(self.n_pods(), |i, j| {
            self.get(i, j) + other.get(i, j)
        })))
    }
}

/// Symmetric matrix of logical link counts `n_{i,j}`; zero means no link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology(SquareMatrix<u32>);

impl Topology {
    /// Checks symmetry and the zero diagonal. Port budgets need a network;
    /// see [`Topology::check_budgets`].
    pub fn new(links: SquareMatrix<u32>) -> Result<Self> {
        let n = links.dim();
        for i in 0..n {
            if links[(i, i)] != 0 {
                return Err(Error::InvalidTopology(format!(
                    "self-link at PoD {i}"
                )));
            }
            for j in (i + 1)..n {
                if links[(i, j)] != links[(j, i)] {
                    return Err(Error::InvalidTopology(format!(
                        "asymmetric pair ({i}, {j}): {} vs {}",
                        links[(i, j)],
                        links[(j, i)]
                    )));
                }
            }
        }
        Ok(Self(links))
    }

    pub fn empty(n: usize) -> Self {
        Self(SquareMatrix::zeros(n))
    }

    /// Validated against `net`: symmetry, diagonal and port budgets.
    pub fn for_network(links: SquareMatrix<u32>, net: &Network) -> Result<Self> {
        let topo = Self::new(links)?;
        topo.check_budgets(net)?;
        Ok(topo)
    }

    pub fn n_pods(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.0[(i, j)]
    }

    pub fn matrix(&self) -> &SquareMatrix<u32> {
        &self.0
    }

    /// Adds `delta` links on both directions of the pair.
    pub fn add_links(&mut self, i: usize, j: usize, delta: u32) {
        assert_ne!(i, j, "self-links are not allowed");
        self.0[(i, j)] += delta;
        self.0[(j, i)] += delta;
    }

    pub fn set_links(&mut self, i: usize, j: usize, count: u32) {
        assert_ne!(i, j, "self-links are not allowed");
        self.0[(i, j)] = count;
        self.0[(j, i)] = count;
    }

    pub fn ports_used(&self, i: usize) -> u32 {
        self.0.row(i).iter().sum()
    }

    /// Undirected link count, `sum_{i<j} n_{i,j}`.
    pub fn total_links(&self) -> u64 {
        let n = self.n_pods();
        let mut total = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                total += u64::from(self.get(i, j));
            }
        }
        total
    }

    pub fn check_budgets(&self, net: &Network) -> Result<()> {
        net.check_dim(self.n_pods())?;
        for i in 0..self.n_pods() {
            let used = self.ports_used(i);
            if used > net.port_budget(i) {
                return Err(Error::InvalidTopology(format!(
                    "PoD {i} uses {used} ports, budget is {}",
                    net.port_budget(i)
                )));
            }
        }
        Ok(())
    }

    /// Pointwise `self <= other`.
    pub fn is_dominated_by(&self, other: &Topology) -> bool {
        self.0
            .as_slice()
            .iter()
            .zip(other.0.as_slice())
            .all(|(a, b)| a <= b)
    }
}

/// Two-hop relay splits: `split(s, d, k)` is the fraction of `D_{s,d}`
/// relayed through `k`, with `k == d` meaning the direct link.
#[derive(Debug, Clone, PartialEq)]
pub struct Routing {
    n: usize,
    splits: Vec<f64>,
}

impl Routing {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            splits: vec![0.0; n * n * n],
        }
    }

    pub fn n_pods(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, s: usize, d: usize) -> usize {
        (s * self.n + d) * self.n
    }

    #[inline]
    pub fn split(&self, s: usize, d: usize, k: usize) -> f64 {
        self.splits[self.offset(s, d) + k]
    }

    /// The relay vector of pair `(s, d)`, indexed by relay `k`.
    pub fn pair(&self, s: usize, d: usize) -> &[f64] {
        let o = self.offset(s, d);
        &self.splits[o..o + self.n]
    }

    pub fn pair_mut(&mut self, s: usize, d: usize) -> &mut [f64] {
        let o = self.offset(s, d);
        &mut self.splits[o..o + self.n]
    }

    pub fn set_split(&mut self, s: usize, d: usize, k: usize, value: f64) {
        let o = self.offset(s, d);
        self.splits[o + k] = value;
    }

    pub fn clear_pair(&mut self, s: usize, d: usize) {
        self.pair_mut(s, d).fill(0.0);
    }

    /// Checks non-negativity, the forbidden entries `f_{i,i,k}` and
    /// `f_{i,j,i}`, and that every loaded pair's splits sum to one.
    pub fn validate(&self, demand: &TrafficMatrix) -> Result<()> {
        if demand.n_pods() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: demand.n_pods(),
            });
        }
        let n = self.n;
        for s in 0..n {
            for d in 0..n {
                let row = self.pair(s, d);
                if let Some((k, v)) = row
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !v.is_finite() || **v < 0.0)
                {
                    return Err(Error::InvalidRouting(format!(
                        "split ({s}, {d}, {k}) = {v}"
                    )));
                }
                if s == d {
                    if row.iter().any(|&v| v != 0.0) {
                        return Err(Error::InvalidRouting(format!(
                            "self-pair ({s}, {s}) carries splits"
                        )));
                    }
                    continue;
                }
                if row[s] != 0.0 {
                    return Err(Error::InvalidRouting(format!(
                        "pair ({s}, {d}) relays through its own source"
                    )));
                }
                if demand.get(s, d) > 0.0 {
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > SPLIT_TOLERANCE {
                        return Err(Error::InvalidRouting(format!(
                            "splits of pair ({s}, {d}) sum to {sum}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// True when every loaded pair's positive splits use links that exist
    /// in `topo`.
    pub fn uses_only(&self, topo: &Topology, demand: &TrafficMatrix) -> bool {
        let n = self.n;
        for s in 0..n {
            for d in 0..n {
                if s == d || demand.get(s, d) <= 0.0 {
                    continue;
                }
                for (k, &f) in self.pair(s, d).iter().enumerate() {
                    if f <= 0.0 {
                        continue;
                    }
                    let ok = if k == d {
                        topo.get(s, d) > 0
                    } else {
                        topo.get(s, k) > 0 && topo.get(k, d) > 0
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Traffic carried by each directed logical link, `T_{i,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkLoads(SquareMatrix<f64>);

impl LinkLoads {
    pub fn new(load: SquareMatrix<f64>) -> Result<Self> {
        for (i, j, v) in load.off_diagonal() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidTraffic(format!(
                    "load ({i}, {j}) = {v} is not a finite non-negative value"
                )));
            }
        }
        for i in 0..load.dim() {
            if load[(i, i)] != 0.0 {
                return Err(Error::InvalidTraffic(format!("load on self-pair {i}")));
            }
        }
        Ok(Self(load))
    }

    pub fn zeros(n: usize) -> Self {
        Self(SquareMatrix::zeros(n))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        Self::new(SquareMatrix::from_fn(n, |i, j| rows[i][j]))
    }

    /// Loads of one-hop (direct) routing: exactly the demand.
    pub fn direct(demand: &TrafficMatrix) -> Self {
        Self(demand.matrix().clone())
    }

    pub fn n_pods(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn matrix(&self) -> &SquareMatrix<f64> {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.as_slice().iter().sum()
    }
}

/// Summary of one solver run, serialized as the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mlu: f64,
    pub iterations: usize,
    pub wall_time: f64,
    pub converged: bool,
    pub mlu_trajectory: Vec<f64>,
}

/// Per-link loads induced by `routing`: first-hop traffic leaving `i`
/// towards relay or destination `j`, plus second-hop traffic relayed
/// through `i` into `j`.
pub fn compute_link_loads(demand: &TrafficMatrix, routing: &Routing) -> Result<LinkLoads> {
    let n = demand.n_pods();
    if routing.n_pods() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: routing.n_pods(),
        });
    }
    let mut load = SquareMatrix::<f64>::zeros(n);
    for s in 0..n {
        for d in 0..n {
            let dem = demand.get(s, d);
            if s == d || dem == 0.0 {
                continue;
            }
            for (k, &f) in routing.pair(s, d).iter().enumerate() {
                if f == 0.0 {
                    continue;
                }
                let flow = f * dem;
                if k == d {
                    load[(s, d)] += flow;
                } else {
                    load[(s, k)] += flow;
                    load[(k, d)] += flow;
                }
            }
        }
    }
    Ok(LinkLoads(load))
}

/// Maximum over links of `T_{i,j} / (n_{i,j} S_{i,j})`. A loaded pair with
/// no link gives `+inf`; an unloaded instance gives `0`.
pub fn compute_mlu(loads: &LinkLoads, topo: &Topology, net: &Network) -> f64 {
    let n = loads.n_pods();
    let mut mlu = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let t = loads.get(i, j);
            if i == j || t <= 0.0 {
                continue;
            }
            let links = topo.get(i, j);
            if links == 0 {
                return f64::INFINITY;
            }
            mlu = mlu.max(t / (f64::from(links) * net.link_capacity(i, j)));
        }
    }
    mlu
}

pub fn direct_path_routing(net: &Network) -> Routing {
    let n = net.n_pods();
    let mut routing = Routing::zeros(n);
    for s in 0..n {
        for d in 0..n {
            if s != d {
                routing.set_split(s, d, d, 1.0);
            }
        }
    }
    routing
}

/// Joint feasibility of a (topology, routing) pair: budgets, symmetry,
/// split constraints, and only existing links carrying traffic.
pub fn check_joint_feasibility(
    demand: &TrafficMatrix,
    net: &Network,
    topo: &Topology,
    routing: &Routing,
) -> Result<()> {
    topo.check_budgets(net)?;
    routing.validate(demand)?;
    let loads = compute_link_loads(demand, routing)?;
    if !compute_mlu(&loads, topo, net).is_finite() {
        return Err(Error::InvalidRouting(
            "traffic routed over a pair without links".into(),
        ));
    }
    Ok(())
}
