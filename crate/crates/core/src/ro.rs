//! Routing optimization on a fixed topology.
//!
//! Minimizes the MLU over two-hop splits by block descent: each block is
//! one source-destination pair, re-optimized with every other pair frozen.
//! A pair's candidate paths are link-disjoint (the direct link `s->d` and
//! the relays `s->k->d`), so for a trial bottleneck level `u` the most
//! traffic the pair can place is the sum over paths of the residual
//! headroom `min_e (u c_e - bg_e)`. A bisection on `u` finds the lowest
//! level that fits the pair's demand, and the split follows from filling
//! that headroom.
//!
//! Min-max block descent stalls where several pairs tie on the bottleneck,
//! so the bottleneck sweeps are preceded by a smoothing phase: the same
//! block descent on `sum_e w_e^q` (normalized utilizations `w`), with `q`
//! doubled per stage. Each smoothed block is again a bisection on a level
//! `t`: path `p` takes the flow at which `||w_p||_{q-1} = t`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::model::{compute_link_loads, compute_mlu, Network, Routing, Topology, TrafficMatrix};

/// Candidate two-hop paths per ordered pair. A path is named by its relay
/// `k`; `k == d` is the direct path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    n: usize,
    relays: Vec<Vec<usize>>,
}

impl PathSet {
    pub fn n_pods(&self) -> usize {
        self.n
    }

    /// Relays of pair `(s, d)`; the direct path, when present, comes first.
    pub fn paths(&self, s: usize, d: usize) -> &[usize] {
        &self.relays[s * self.n + d]
    }

    /// Directed links traversed by the path of `(s, d)` through `relay`.
    pub fn links(s: usize, d: usize, relay: usize) -> PathLinks {
        if relay == d {
            PathLinks::Direct((s, d))
        } else {
            PathLinks::Relay((s, relay), (relay, d))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathLinks {
    Direct((usize, usize)),
    Relay((usize, usize), (usize, usize)),
}

impl PathLinks {
    pub fn iter(self) -> impl Iterator<Item = (usize, usize)> {
        let (a, b) = match self {
            PathLinks::Direct(e) => (e, None),
            PathLinks::Relay(e1, e2) => (e1, Some(e2)),
        };
        std::iter::once(a).chain(b)
    }
}

/// Direct path iff `n_{s,d} > 0`; relay `k` iff both hops have links.
pub fn enumerate_two_hop_paths(topo: &Topology, net: &Network) -> Result<PathSet> {
    let n = net.n_pods();
    if topo.n_pods() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: topo.n_pods(),
        });
    }
    let mut relays = Vec::with_capacity(n * n);
    for s in 0..n {
        for d in 0..n {
            let mut p = Vec::new();
            if s != d {
                if topo.get(s, d) > 0 {
                    p.push(d);
                }
                for k in 0..n {
                    if k != s && k != d && topo.get(s, k) > 0 && topo.get(k, d) > 0 {
                        p.push(k);
                    }
                }
            }
            relays.push(p);
        }
    }
    Ok(PathSet { n, relays })
}

/// Splits of each pair aligned with [`PathSet::paths`].
pub fn to_path_splits(routing: &Routing, paths: &PathSet) -> Vec<Vec<f64>> {
    let n = paths.n_pods();
    let mut out = Vec::with_capacity(n * n);
    for s in 0..n {
        for d in 0..n {
            out.push(paths.paths(s, d).iter().map(|&k| routing.split(s, d, k)).collect());
        }
    }
    out
}

pub fn from_path_splits(paths: &PathSet, splits: &[Vec<f64>]) -> Result<Routing> {
    let n = paths.n_pods();
    if splits.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            actual: splits.len(),
        });
    }
    let mut routing = Routing::zeros(n);
    for s in 0..n {
        for d in 0..n {
            let relays = paths.paths(s, d);
            let row = &splits[s * n + d];
            if row.len() != relays.len() {
                return Err(Error::InvalidRouting(format!(
                    "pair ({s}, {d}) has {} paths but {} splits",
                    relays.len(),
                    row.len()
                )));
            }
            for (&k, &f) in relays.iter().zip(row) {
                routing.set_split(s, d, k, f);
            }
        }
    }
    Ok(routing)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoConfig {
    /// Minimum per-sweep progress in `u` to keep sweeping.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Relative width at which the per-pair bisection stops.
    pub epsilon_inner: f64,
    /// Smoothing stages run before the bottleneck sweeps; 0 disables them.
    pub smoothing_stages: usize,
    /// Sweep cap per smoothing stage.
    pub smoothing_sweeps: usize,
}

impl Default for RoConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_sweeps: 50,
            epsilon_inner: 1e-10,
            smoothing_stages: 4,
            smoothing_sweeps: 10,
        }
    }
}

impl RoConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tolerance", self.tolerance), ("epsilon_inner", self.epsilon_inner)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_sweeps == 0 {
            return Err(Error::Config("max_sweeps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoSolution {
    pub routing: Routing,
    pub mlu: f64,
    /// Bottleneck sweeps run.
    pub sweeps: usize,
    pub smoothing_sweeps: usize,
    /// MLU of the initial routing, then the incumbent MLU after each
    /// smoothing sweep and each bottleneck sweep.
    pub trajectory: Vec<f64>,
}

/// Anything that maps `(demand, topology, initial routing)` to a routing.
pub trait RoutingOptimizer {
    fn optimize(
        &self,
        demand: &TrafficMatrix,
        topo: &Topology,
        net: &Network,
        init: &Routing,
    ) -> Result<RoSolution>;
}

/// The block-descent solver behind [`solve_ro`].
#[derive(Debug, Clone, Copy, Default)]
pub struct BlockDescent(pub RoConfig);

impl RoutingOptimizer for BlockDescent {
    fn optimize(
        &self,
        demand: &TrafficMatrix,
        topo: &Topology,
        net: &Network,
        init: &Routing,
    ) -> Result<RoSolution> {
        solve_ro(demand, topo, net, init, &self.0)
    }
}

/// Keeps every pair on its direct link; the one-hop special case.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectOnly;

impl RoutingOptimizer for DirectOnly {
    fn optimize(
        &self,
        demand: &TrafficMatrix,
        topo: &Topology,
        net: &Network,
        _init: &Routing,
    ) -> Result<RoSolution> {
        let routing = crate::model::direct_path_routing(net);
        let loads = compute_link_loads(demand, &routing)?;
        let mlu = compute_mlu(&loads, topo, net);
        if !mlu.is_finite() {
            let (src, dst, _) = demand
                .matrix()
                .off_diagonal()
                .find(|&(s, d, v)| *v > 0.0 && topo.get(s, d) == 0)
                .expect("infinite MLU implies an unlinked loaded pair");
            return Err(Error::Unroutable { src, dst });
        }
        Ok(RoSolution {
            routing,
            mlu,
            sweeps: 0,
            smoothing_sweeps: 0,
            trajectory: vec![mlu],
        })
    }
}

struct BlockState<'a> {
    demand: &'a TrafficMatrix,
    capacity: SquareMatrix<f64>,
    loads: SquareMatrix<f64>,
    paths: PathSet,
    routing: Routing,
    eps_inner: f64,
}

impl BlockState<'_> {
    fn utilization(&self, e: (usize, usize)) -> f64 {
        let c = self.capacity[e];
        if c > 0.0 {
            self.loads[e] / c
        } else if self.loads[e] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    fn mlu(&self) -> f64 {
        let n = self.capacity.dim();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    best = best.max(self.utilization((i, j)));
                }
            }
        }
        best
    }

    /// Highest bottleneck utilization among the paths the pair uses.
    fn pair_priority(&self, s: usize, d: usize) -> f64 {
        let mut best = 0.0f64;
        for &k in self.paths.paths(s, d) {
            if self.routing.split(s, d, k) > 0.0 {
                for e in PathSet::links(s, d, k).iter() {
                    best = best.max(self.utilization(e));
                }
            }
        }
        best
    }

    fn shift(&mut self, s: usize, d: usize, relay: usize, amount: f64) {
        for e in PathSet::links(s, d, relay).iter() {
            let v = self.loads[e] + amount;
            // cancellation can leave a hair below zero
            self.loads[e] = v.max(0.0);
        }
    }

    /// Re-optimizes one pair; returns how much its bottleneck level dropped.
    fn optimize_pair(&mut self, s: usize, d: usize) -> f64 {
        let dem = self.demand.get(s, d);
        let relays: Vec<usize> = self.paths.paths(s, d).to_vec();
        if dem <= 0.0 || relays.len() < 2 {
            return 0.0;
        }
        let old: Vec<f64> = relays.iter().map(|&k| self.routing.split(s, d, k) * dem).collect();
        for (&k, &x) in relays.iter().zip(&old) {
            if x > 0.0 {
                self.shift(s, d, k, -x);
            }
        }

        // per path: (capacity, background) of each hop
        let hops: Vec<Vec<(f64, f64)>> = relays
            .iter()
            .map(|&k| {
                PathSet::links(s, d, k)
                    .iter()
                    .map(|e| (self.capacity[e], self.loads[e]))
                    .collect()
            })
            .collect();
        let level_with = |p: usize, x: f64| -> f64 {
            hops[p]
                .iter()
                .map(|&(c, bg)| (bg + x) / c)
                .fold(0.0, f64::max)
        };
        let headroom = |p: usize, u: f64| -> f64 {
            hops[p]
                .iter()
                .map(|&(c, bg)| u * c - bg)
                .fold(f64::INFINITY, f64::min)
                .max(0.0)
        };
        let placeable = |u: f64| -> f64 { (0..hops.len()).map(|p| headroom(p, u)).sum() };

        let old_level = old
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(|(p, &x)| level_with(p, x))
            .fold(0.0, f64::max);

        let mut lo = (0..hops.len())
            .map(|p| level_with(p, 0.0))
            .fold(f64::INFINITY, f64::min);
        let mut hi = old_level;
        if !(hi > lo) {
            self.restore(s, d, &relays, &old);
            return 0.0;
        }
        let width = self.eps_inner * hi;
        while hi - lo > width {
            let mid = 0.5 * (lo + hi);
            if placeable(mid) >= dem {
                hi = mid;
            } else {
                lo = mid;
            }
        }

        let raw: Vec<f64> = (0..hops.len()).map(|p| headroom(p, hi)).collect();
        let total: f64 = raw.iter().sum();
        if !(total >= dem) || total <= 0.0 {
            self.restore(s, d, &relays, &old);
            return 0.0;
        }
        let splits: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let new_level = splits
            .iter()
            .enumerate()
            .filter(|(_, &f)| f > 0.0)
            .map(|(p, &f)| level_with(p, f * dem))
            .fold(0.0, f64::max);
        if !(new_level < old_level) {
            self.restore(s, d, &relays, &old);
            return 0.0;
        }

        self.routing.clear_pair(s, d);
        for (&k, &f) in relays.iter().zip(&splits) {
            if f > 0.0 {
                self.routing.set_split(s, d, k, f);
                self.shift(s, d, k, f * dem);
            }
        }
        old_level - new_level
    }

    /// Exact minimizer of `sum_e w_e^{r+1}` over the pair's splits, with
    /// `w_e = load_e / (c_e scale)`.
    fn smooth_pair(&mut self, s: usize, d: usize, r: i32, scale: f64) {
        let dem = self.demand.get(s, d);
        let relays: Vec<usize> = self.paths.paths(s, d).to_vec();
        if dem <= 0.0 || relays.len() < 2 {
            return;
        }
        let old: Vec<f64> = relays.iter().map(|&k| self.routing.split(s, d, k) * dem).collect();
        for (&k, &x) in relays.iter().zip(&old) {
            if x > 0.0 {
                self.shift(s, d, k, -x);
            }
        }
        // (scaled capacity, background) per hop; a direct path repeats a
        // zero-background dummy hop of infinite capacity
        let hops: Vec<[(f64, f64); 2]> = relays
            .iter()
            .map(|&k| match PathSet::links(s, d, k) {
                PathLinks::Direct(e) => [(self.capacity[e] * scale, self.loads[e]), (f64::INFINITY, 0.0)],
                PathLinks::Relay(a, b) => [
                    (self.capacity[a] * scale, self.loads[a]),
                    (self.capacity[b] * scale, self.loads[b]),
                ],
            })
            .collect();
        let inv_r = 1.0 / f64::from(r);
        let norm = |h: &[(f64, f64); 2], x: f64| -> f64 {
            let (a, b) = ((h[0].1 + x) / h[0].0, (h[1].1 + x) / h[1].0);
            let m = a.max(b);
            if m <= 0.0 {
                return 0.0;
            }
            m * ((a / m).powi(r) + (b / m).powi(r)).powf(inv_r)
        };
        // path p takes flow only once the level exceeds base[p]
        let base: Vec<f64> = hops.iter().map(|h| norm(h, 0.0)).collect();
        let mut order: Vec<usize> = (0..hops.len()).collect();
        order.sort_by(|&a, &b| base[a].total_cmp(&base[b]));
        let fill = |p: usize, t: f64| -> f64 {
            let h = &hops[p];
            let mut x = (t * h[0].0 - h[0].1).min(t * h[1].0 - h[1].1).max(0.0);
            if h[1].0.is_infinite() {
                return x;
            }
            // Newton from above on a convex increasing residual
            for _ in 0..60 {
                let (mut g, mut dg) = (-1.0, 0.0);
                for &(c, bg) in h {
                    let v = (bg + x) / (c * t);
                    let p = v.powi(r - 1);
                    g += p * v;
                    dg += f64::from(r) * p / (c * t);
                }
                if g <= 1e-13 || dg <= 0.0 {
                    break;
                }
                let step = g / dg;
                x = (x - step).max(0.0);
                if step <= 1e-15 * (1.0 + x) {
                    break;
                }
            }
            x
        };
        let placed = |t: f64| -> f64 {
            order
                .iter()
                .take_while(|&&p| base[p] < t)
                .map(|&p| fill(p, t))
                .sum()
        };

        let mut lo = base[order[0]];
        let mut hi = hops.iter().map(|h| norm(h, dem)).fold(f64::INFINITY, f64::min);
        let width = self.eps_inner * hi;
        while hi - lo > width {
            let mid = 0.5 * (lo + hi);
            if placed(mid) >= dem {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let raw: Vec<f64> = (0..hops.len()).map(|p| if base[p] < hi { fill(p, hi) } else { 0.0 }).collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            self.restore(s, d, &relays, &old);
            return;
        }
        self.routing.clear_pair(s, d);
        for (&k, &x) in relays.iter().zip(&raw) {
            let f = x / total;
            if f > 0.0 {
                self.routing.set_split(s, d, k, f);
                self.shift(s, d, k, f * dem);
            }
        }
    }

    /// `sum_e (load_e / (c_e scale))^q` over links with capacity.
    fn potential(&self, q: i32, scale: f64) -> f64 {
        let n = self.capacity.dim();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                let c = self.capacity[(i, j)];
                if i != j && c > 0.0 {
                    sum += (self.loads[(i, j)] / (c * scale)).powi(q);
                }
            }
        }
        sum
    }

    /// Pairs ordered by descending priority, ties by index.
    fn order(&self, pairs: &mut [(usize, usize)]) {
        let mut keyed: Vec<(f64, (usize, usize))> =
            pairs.iter().map(|&(s, d)| (self.pair_priority(s, d), (s, d))).collect();
        keyed.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        for (slot, (_, p)) in pairs.iter_mut().zip(keyed) {
            *slot = p;
        }
    }

    fn restore(&mut self, s: usize, d: usize, relays: &[usize], old: &[f64]) {
        for (&k, &x) in relays.iter().zip(old) {
            if x > 0.0 {
                self.shift(s, d, k, x);
            }
        }
    }
}

fn capacity_matrix(topo: &Topology, net: &Network) -> SquareMatrix<f64> {
    SquareMatrix::from_fn(net.n_pods(), |i, j| {
        if i == j {
            0.0
        } else {
            f64::from(topo.get(i, j)) * net.link_capacity(i, j)
        }
    })
}

/// Minimizes the MLU over two-hop routings on `topo`, starting from `init`.
///
/// `init` must be a valid routing for `demand` that only uses existing
/// links. The result never has a higher MLU than `init`.
pub fn solve_ro(
    demand: &TrafficMatrix,
    topo: &Topology,
    net: &Network,
    init: &Routing,
    cfg: &RoConfig,
) -> Result<RoSolution> {
    cfg.validate()?;
    let n = net.n_pods();
    for actual in [demand.n_pods(), topo.n_pods(), init.n_pods()] {
        if actual != n {
            return Err(Error::DimensionMismatch { expected: n, actual });
        }
    }
    let paths = enumerate_two_hop_paths(topo, net)?;
    for (s, d, &v) in demand.matrix().off_diagonal() {
        if v > 0.0 && paths.paths(s, d).is_empty() {
            return Err(Error::Unroutable { src: s, dst: d });
        }
    }
    init.validate(demand)?;
    if !init.uses_only(topo, demand) {
        return Err(Error::InvalidRouting(
            "initial routing uses links missing from the topology".into(),
        ));
    }

    let mut state = BlockState {
        demand,
        capacity: capacity_matrix(topo, net),
        loads: compute_link_loads(demand, init)?.matrix().clone(),
        paths,
        routing: init.clone(),
        eps_inner: cfg.epsilon_inner,
    };

    let mut pairs: Vec<(usize, usize)> = demand
        .matrix()
        .off_diagonal()
        .filter(|(s, d, &v)| v > 0.0 && state.paths.paths(*s, *d).len() > 1)
        .map(|(s, d, _)| (s, d))
        .collect();

    let mut mlu = state.mlu();
    let mut trajectory = vec![mlu];
    let mut smoothing_sweeps = 0;

    // the smoothed iterate may wander above the incumbent; only the
    // incumbent is reported and handed to the bottleneck sweeps
    if !pairs.is_empty() && mlu > 0.0 && mlu.is_finite() {
        let mut best = (mlu, state.routing.clone(), state.loads.clone());
        for stage in 0..cfg.smoothing_stages {
            let q = 8i32 << stage.min(6);
            let scale = state.mlu();
            let mut phi = state.potential(q, scale);
            for _ in 0..cfg.smoothing_sweeps {
                smoothing_sweeps += 1;
                state.order(&mut pairs);
                for &(s, d) in &pairs {
                    state.smooth_pair(s, d, q - 1, scale);
                }
                let m = state.mlu();
                if m < best.0 - cfg.tolerance {
                    best = (m, state.routing.clone(), state.loads.clone());
                }
                trajectory.push(best.0);
                let next = state.potential(q, scale);
                let done = !(phi - next > 1e-4 * phi);
                phi = next;
                if done {
                    break;
                }
            }
        }
        mlu = best.0;
        state.routing = best.1;
        state.loads = best.2;
    }

    let mut sweeps = 0;
    while sweeps < cfg.max_sweeps && !pairs.is_empty() {
        sweeps += 1;
        state.order(&mut pairs);

        for &(s, d) in &pairs {
            state.optimize_pair(s, d);
        }
        let next = state.mlu();
        trajectory.push(next);
        let improvement = mlu - next;
        mlu = next;
        if improvement < cfg.tolerance {
            break;
        }
    }

    // recompute from scratch so the reported value carries no drift
    let init_mlu = compute_mlu(&compute_link_loads(demand, init)?, topo, net);
    let mut routing = state.routing;
    let mut mlu = compute_mlu(&compute_link_loads(demand, &routing)?, topo, net);
    if mlu > init_mlu {
        routing = init.clone();
        mlu = init_mlu;
    }
    trajectory[0] = init_mlu;
    if let Some(last) = trajectory.last_mut() {
        *last = mlu;
    }
    Ok(RoSolution {
        routing,
        mlu,
        sweeps,
        smoothing_sweeps,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::direct_path_routing;

    fn mesh(n: usize, links: u32) -> (Network, Topology) {
        let net = Network::uniform(n, 16, 1.0).unwrap();
        let mut t = Topology::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                t.set_links(i, j, links);
            }
        }
        (net, t)
    }

    #[test]
    fn full_mesh_path_counts() {
        let (net, t) = mesh(4, 1);
        let p = enumerate_two_hop_paths(&t, &net).unwrap();
        for s in 0..4 {
            for d in 0..4 {
                if s != d {
                    assert_eq!(p.paths(s, d).len(), 3);
                    assert_eq!(p.paths(s, d)[0], d);
                }
            }
        }
    }

    #[test]
    fn missing_links_restrict_paths() {
        let net = Network::uniform(3, 4, 1.0).unwrap();
        let mut t = Topology::empty(3);
        t.set_links(0, 2, 1);
        t.set_links(2, 1, 1);
        let p = enumerate_two_hop_paths(&t, &net).unwrap();
        assert_eq!(p.paths(0, 1), &[2]);

        let mut t = Topology::empty(3);
        t.set_links(0, 2, 1);
        let p = enumerate_two_hop_paths(&t, &net).unwrap();
        assert!(p.paths(0, 1).is_empty());
    }

    #[test]
    fn unroutable_demand_is_an_error() {
        let net = Network::uniform(3, 4, 1.0).unwrap();
        let mut t = Topology::empty(3);
        t.set_links(0, 2, 1);
        let mut rows = vec![vec![0.0; 3]; 3];
        rows[0][1] = 1.0;
        let d = TrafficMatrix::from_rows(&rows).unwrap();
        let err = solve_ro(&d, &t, &net, &direct_path_routing(&net), &RoConfig::default());
        assert!(matches!(err, Err(Error::Unroutable { src: 0, dst: 1 })));
    }

    #[test]
    fn single_path_instance_keeps_direct_routing() {
        // only direct links; each pair has a unique path
        let net = Network::uniform(3, 4, 2.0).unwrap();
        let mut t = Topology::empty(3);
        t.set_links(0, 1, 2);
        let mut rows = vec![vec![0.0; 3]; 3];
        rows[0][1] = 3.0;
        rows[1][0] = 1.0;
        let d = TrafficMatrix::from_rows(&rows).unwrap();
        let init = direct_path_routing(&net);
        let sol = solve_ro(&d, &t, &net, &init, &RoConfig::default()).unwrap();
        assert_eq!(sol.routing, init);
        assert_eq!(sol.mlu, 0.75);
    }

    #[test]
    fn symmetric_triangle_splits_in_half() {
        let (net, t) = mesh(3, 1);
        let mut rows = vec![vec![0.0; 3]; 3];
        rows[0][1] = 2.0;
        rows[1][0] = 2.0;
        let d = TrafficMatrix::from_rows(&rows).unwrap();
        let sol = solve_ro(&d, &t, &net, &direct_path_routing(&net), &RoConfig::default()).unwrap();
        assert!((sol.mlu - 1.0).abs() < 1e-6, "{}", sol.mlu);
        assert!((sol.routing.split(0, 1, 1) - 0.5).abs() < 1e-6);
        assert!((sol.routing.split(0, 1, 2) - 0.5).abs() < 1e-6);
        sol.routing.validate(&d).unwrap();
    }

    #[test]
    fn hot_start_from_optimum_is_a_fixed_point() {
        let (net, t) = mesh(3, 1);
        let mut rows = vec![vec![0.0; 3]; 3];
        rows[0][1] = 2.0;
        rows[1][0] = 2.0;
        let d = TrafficMatrix::from_rows(&rows).unwrap();
        let first = solve_ro(&d, &t, &net, &direct_path_routing(&net), &RoConfig::default()).unwrap();
        let again = solve_ro(&d, &t, &net, &first.routing, &RoConfig::default()).unwrap();
        assert!((again.mlu - first.mlu).abs() <= 1e-6);
        assert!(again.sweeps <= 1);
        assert_eq!(again.routing, first.routing);
    }

    #[test]
    fn path_split_conversion_is_lossless() {
        let (net, t) = mesh(4, 1);
        let mut rows = vec![vec![1.0; 4]; 4];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = 0.0;
        }
        rows[0][1] = 5.0;
        let d = TrafficMatrix::from_rows(&rows).unwrap();
        let sol = solve_ro(&d, &t, &net, &direct_path_routing(&net), &RoConfig::default()).unwrap();
        let paths = enumerate_two_hop_paths(&t, &net).unwrap();
        let back = from_path_splits(&paths, &to_path_splits(&sol.routing, &paths)).unwrap();
        assert_eq!(back, sol.routing);
    }

    #[test]
    fn rejects_bad_config() {
        let (net, t) = mesh(3, 1);
        let d = TrafficMatrix::zeros(3);
        let cfg = RoConfig {
            max_sweeps: 0,
            ..RoConfig::default()
        };
        assert!(matches!(
            solve_ro(&d, &t, &net, &direct_path_routing(&net), &cfg),
            Err(Error::Config(_))
        ));
    }
}
