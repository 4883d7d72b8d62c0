//! Reference points for the topology solvers: a matching-based heuristic in
//! the spirit of Birkhoff-von Neumann decomposition, a min-cost-flow
//! surrogate, and exhaustive search for tiny instances.

use std::cmp::Ordering;

use crate::absm::ToSolution;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::model::{LinkLoads, Network, Topology, TrafficMatrix};

/// An assignment of rows to columns. `assignment[i] = Some(j)` pairs row
/// `i` with column `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub assignment: Vec<Option<usize>>,
    pub weight: f64,
}

impl Matching {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (i, j)))
    }
}

/// Maximum-weight perfect assignment on an `n x n` weight matrix in
/// `O(n^3)`. Non-finite entries (e.g. `-inf` on the diagonal) are
/// forbidden; if every perfect assignment needs a forbidden entry those
/// rows come back unassigned.
pub fn hungarian(weights: &SquareMatrix<f64>) -> Matching {
    let n = weights.dim();
    if n == 0 {
        return Matching {
            assignment: Vec::new(),
            weight: 0.0,
        };
    }
    let span: f64 = weights
        .as_slice()
        .iter()
        .filter(|w| w.is_finite())
        .map(|w| w.abs())
        .sum();
    let forbidden = 2.0 * span + 1.0;
    // minimize cost = -weight; 1-based arrays with a virtual column 0
    let cost = |i: usize, j: usize| -> f64 {
        let w = weights[(i - 1, j - 1)];
        if w.is_finite() {
            -w
        } else {
            forbidden
        }
    };
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![None; n];
    let mut weight = 0.0;
    for j in 1..=n {
        let i = row_of_col[j];
        if i == 0 {
            continue;
        }
        let w = weights[(i - 1, j - 1)];
        if w.is_finite() {
            assignment[i - 1] = Some(j - 1);
            weight += w;
        }
    }
    Matching { assignment, weight }
}

/// Builds a topology from successive maximum-weight matchings on the
/// symmetrized residual demand `max(D, D^T)`. Each round matches every
/// PoD with free ports at most once, adds one link per matched pair and
/// removes one link capacity of residual demand from it. Runs at most
/// `max_i R_i` rounds.
///
/// The assignment from each round is a permutation; it is turned into
/// undirected pairs by taking its edges heaviest first (ties by index) and
/// skipping any edge whose endpoint is already paired. PoDs left over (odd
/// cycles) are then paired among themselves the same way, so every round
/// is a perfect matching whenever an even number of PoDs is active.
pub fn bvn_topology(demand: &TrafficMatrix, net: &Network) -> Result<Topology> {
    let n = net.n_pods();
    if demand.n_pods() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: demand.n_pods(),
        });
    }
    let mut residual =
        SquareMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { demand.get(i, j).max(demand.get(j, i)) });
    let mut remaining: Vec<u32> = net.port_budgets().to_vec();
    let rounds = remaining.iter().copied().max().unwrap_or(0);
    let mut topo = Topology::empty(n);

    for _ in 0..rounds {
        let active: Vec<usize> = (0..n).filter(|&i| remaining[i] > 0).collect();
        let m = active.len();
        if m < 2 {
            break;
        }
        let weights = SquareMatrix::from_fn(m, |a, b| {
            if a == b {
                f64::NEG_INFINITY
            } else {
                residual[(active[a], active[b])]
            }
        });
        let matching = hungarian(&weights);

        let heaviest_first = |edges: &mut Vec<(f64, usize, usize)>| {
            edges.sort_by(|x, y| {
                y.0.partial_cmp(&x.0)
                    .unwrap_or(Ordering::Equal)
                    .then((x.1, x.2).cmp(&(y.1, y.2)))
            })
        };
        let mut edges: Vec<(f64, usize, usize)> = matching
            .pairs()
            .map(|(a, b)| {
                let (i, j) = (active[a].min(active[b]), active[a].max(active[b]));
                (residual[(i, j)], i, j)
            })
            .collect();
        heaviest_first(&mut edges);
        let mut taken = vec![false; n];
        let mut chosen = Vec::new();
        for (_, i, j) in edges {
            if !taken[i] && !taken[j] {
                taken[i] = true;
                taken[j] = true;
                chosen.push((i, j));
            }
        }
        let left: Vec<usize> = active.iter().copied().filter(|&i| !taken[i]).collect();
        let mut extra: Vec<(f64, usize, usize)> = Vec::new();
        for (a, &i) in left.iter().enumerate() {
            for &j in &left[a + 1..] {
                extra.push((residual[(i, j)], i, j));
            }
        }
        heaviest_first(&mut extra);
        for (_, i, j) in extra {
            if !taken[i] && !taken[j] {
                taken[i] = true;
                taken[j] = true;
                chosen.push((i, j));
            }
        }

        let progressed = !chosen.is_empty();
        for (i, j) in chosen {
            topo.add_links(i, j, 1);
            remaining[i] -= 1;
            remaining[j] -= 1;
            let r = residual[(i, j)];
            let next = r - r.min(net.link_capacity(i, j));
            residual[(i, j)] = next;
            residual[(j, i)] = next;
        }
        if !progressed {
            break;
        }
    }
    Ok(topo)
}

/// Min-cost-flow topology: ports are arc capacities and logical links are
/// unit flows from a PoD's outgoing side to another PoD's incoming side.
/// The `k`-th link on pair `(i, j)` costs `-w_ij / k` with
/// `w_ij = max(T_ij, T_ji) / S_ij`, so flow fills the most utilized pairs
/// first with diminishing returns. Solved by successive shortest paths with
/// node potentials, augmenting while a negative-cost path exists, then
/// symmetrized by the pointwise minimum of the two directions.
pub fn mcf_topology(loads: &LinkLoads, net: &Network) -> Result<Topology> {
    let n = net.n_pods();
    if loads.n_pods() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: loads.n_pods(),
        });
    }
    let weight = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            loads.get(i, j).max(loads.get(j, i)) / net.link_capacity(i, j)
        }
    });
    let flow = ConvexFlow::new(net.port_budgets(), weight).solve();

    let mut topo = Topology::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let links = flow[(i, j)].min(flow[(j, i)]);
            if links > 0 {
                topo.set_links(i, j, links);
            }
        }
    }
    Ok(topo)
}

/// Bipartite flow network source -> out_i -> in_j -> sink with convex
/// costs on the middle arcs, handled unit by unit.
struct ConvexFlow<'a> {
    n: usize,
    budget: &'a [u32],
    weight: SquareMatrix<f64>,
    supply: Vec<u32>,
    intake: Vec<u32>,
    flow: SquareMatrix<u32>,
}

#[derive(Clone, Copy, PartialEq)]
enum Node {
    Source,
    Out(usize),
    In(usize),
    Sink,
}

impl<'a> ConvexFlow<'a> {
    fn new(budget: &'a [u32], weight: SquareMatrix<f64>) -> Self {
        let n = budget.len();
        Self {
            n,
            budget,
            weight,
            supply: vec![0; n],
            intake: vec![0; n],
            flow: SquareMatrix::zeros(n),
        }
    }

    fn index(&self, v: Node) -> usize {
        match v {
            Node::Source => 0,
            Node::Out(i) => 1 + i,
            Node::In(j) => 1 + self.n + j,
            Node::Sink => 1 + 2 * self.n,
        }
    }

    fn node(&self, idx: usize) -> Node {
        let n = self.n;
        match idx {
            0 => Node::Source,
            x if x <= n => Node::Out(x - 1),
            x if x <= 2 * n => Node::In(x - 1 - n),
            _ => Node::Sink,
        }
    }

    fn pair_cap(&self, i: usize, j: usize) -> u32 {
        self.budget[i].min(self.budget[j])
    }

    /// Residual arcs leaving `v` as `(target, cost)`.
    fn arcs(&self, v: Node, out: &mut Vec<(Node, f64)>) {
        out.clear();
        let n = self.n;
        match v {
            Node::Source => {
                for i in 0..n {
                    if self.supply[i] < self.budget[i] {
                        out.push((Node::Out(i), 0.0));
                    }
                }
            }
            Node::Out(i) => {
                if self.supply[i] > 0 {
                    out.push((Node::Source, 0.0));
                }
                for j in 0..n {
                    let w = self.weight[(i, j)];
                    if i == j || w <= 0.0 {
                        continue;
                    }
                    let x = self.flow[(i, j)];
                    if x < self.pair_cap(i, j) {
                        out.push((Node::In(j), -w / f64::from(x + 1)));
                    }
                }
            }
            Node::In(j) => {
                if self.intake[j] < self.budget[j] {
                    out.push((Node::Sink, 0.0));
                }
                for i in 0..n {
                    let x = self.flow[(i, j)];
                    if i != j && x > 0 {
                        out.push((Node::Out(i), self.weight[(i, j)] / f64::from(x)));
                    }
                }
            }
            Node::Sink => {
                for j in 0..n {
                    if self.intake[j] > 0 {
                        out.push((Node::In(j), 0.0));
                    }
                }
            }
        }
    }

    fn solve(mut self) -> SquareMatrix<u32> {
        let n = self.n;
        let v_count = 2 * n + 2;
        // exact shortest distances on the initial DAG
        let mut potential = vec![0.0f64; v_count];
        let mut sink_pot = 0.0f64;
        for j in 0..n {
            let best = (0..n)
                .filter(|&i| i != j && self.weight[(i, j)] > 0.0 && self.pair_cap(i, j) > 0)
                .map(|i| -self.weight[(i, j)])
                .fold(0.0f64, f64::min);
            potential[self.index(Node::In(j))] = best;
            if self.budget[j] > 0 {
                sink_pot = sink_pot.min(best);
            }
        }
        potential[self.index(Node::Sink)] = sink_pot;

        let mut arcs = Vec::new();
        loop {
            let mut dist = vec![f64::INFINITY; v_count];
            let mut prev = vec![usize::MAX; v_count];
            let mut done = vec![false; v_count];
            dist[0] = 0.0;
            loop {
                let mut cur = usize::MAX;
                let mut best = f64::INFINITY;
                for v in 0..v_count {
                    if !done[v] && dist[v] < best {
                        best = dist[v];
                        cur = v;
                    }
                }
                if cur == usize::MAX {
                    break;
                }
                done[cur] = true;
                self.arcs(self.node(cur), &mut arcs);
                for &(to, cost) in &arcs {
                    let t = self.index(to);
                    let reduced = (cost + potential[cur] - potential[t]).max(0.0);
                    if dist[cur] + reduced < dist[t] {
                        dist[t] = dist[cur] + reduced;
                        prev[t] = cur;
                    }
                }
            }
            let sink = self.index(Node::Sink);
            if !dist[sink].is_finite() {
                break;
            }
            for v in 0..v_count {
                if dist[v].is_finite() {
                    potential[v] += dist[v];
                }
            }
            // potential[source] stays 0, so this is the true path cost
            if potential[sink] >= -1e-12 {
                break;
            }
            let mut v = sink;
            while v != 0 {
                let u = prev[v];
                self.push_unit(self.node(u), self.node(v));
                v = u;
            }
        }
        self.flow
    }

    fn push_unit(&mut self, from: Node, to: Node) {
        match (from, to) {
            (Node::Source, Node::Out(i)) => self.supply[i] += 1,
            (Node::Out(i), Node::Source) => self.supply[i] -= 1,
            (Node::Out(i), Node::In(j)) => self.flow[(i, j)] += 1,
            (Node::In(j), Node::Out(i)) => self.flow[(i, j)] -= 1,
            (Node::In(j), Node::Sink) => self.intake[j] += 1,
            (Node::Sink, Node::In(j)) => self.intake[j] -= 1,
            _ => unreachable!("no such residual arc"),
        }
    }
}

/// Largest lattice [`brute_force_to`] agrees to walk.
pub const BRUTE_FORCE_LIMIT: u64 = 20_000_000;

fn same_utilization(a: f64, b: f64) -> bool {
    a == b || (a.is_finite() && b.is_finite() && (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0))
}

struct Lattice<'a> {
    loads: &'a LinkLoads,
    net: &'a Network,
    pairs: Vec<(usize, usize)>,
}

impl Lattice<'_> {
    fn new<'a>(loads: &'a LinkLoads, net: &'a Network) -> Result<Lattice<'a>> {
        let n = net.n_pods();
        if loads.n_pods() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: loads.n_pods(),
            });
        }
        if n > 4 {
            return Err(Error::InstanceTooLarge(format!("{n} PoDs, at most 4 supported")));
        }
        let mut pairs = Vec::new();
        let mut size = 1u64;
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
                let options = u64::from(net.port_budget(i).min(net.port_budget(j))) + 1;
                size = size.saturating_mul(options);
            }
        }
        if size > BRUTE_FORCE_LIMIT {
            return Err(Error::InstanceTooLarge(format!(
                "{size} candidate allocations exceed the limit of {BRUTE_FORCE_LIMIT}"
            )));
        }
        Ok(Lattice { loads, net, pairs })
    }

    fn pair_utilization(&self, p: usize, links: u32) -> f64 {
        let (i, j) = self.pairs[p];
        let t = self.loads.get(i, j).max(self.loads.get(j, i));
        if t <= 0.0 {
            0.0
        } else if links == 0 {
            f64::INFINITY
        } else {
            t / (f64::from(links) * self.net.link_capacity(i, j))
        }
    }

    /// Calls `visit(counts, u)` for every budget-feasible allocation with
    /// finite utilization, in lexicographic order of `counts`.
    fn walk(&self, visit: &mut dyn FnMut(&[u32], f64)) {
        let mut remaining: Vec<u32> = self.net.port_budgets().to_vec();
        let mut counts = vec![0u32; self.pairs.len()];
        self.descend(0, 0.0, &mut remaining, &mut counts, visit);
    }

    fn descend(
        &self,
        p: usize,
        u: f64,
        remaining: &mut [u32],
        counts: &mut [u32],
        visit: &mut dyn FnMut(&[u32], f64),
    ) {
        if p == self.pairs.len() {
            visit(counts, u);
            return;
        }
        let (i, j) = self.pairs[p];
        for links in 0..=remaining[i].min(remaining[j]) {
            let pu = self.pair_utilization(p, links);
            if !pu.is_finite() {
                continue;
            }
            remaining[i] -= links;
            remaining[j] -= links;
            counts[p] = links;
            self.descend(p + 1, u.max(pu), remaining, counts, visit);
            remaining[i] += links;
            remaining[j] += links;
        }
        counts[p] = 0;
    }

    fn topology(&self, counts: &[u32]) -> Topology {
        let mut t = Topology::empty(self.net.n_pods());
        for (&(i, j), &c) in self.pairs.iter().zip(counts) {
            t.set_links(i, j, c);
        }
        t
    }
}

/// Exhaustive one-hop optimum over every symmetric allocation within the
/// port budgets. Ties on utilization go to the fewest links, then to the
/// lexicographically smallest allocation. Limited to `N <= 4`.
pub fn brute_force_to(loads: &LinkLoads, net: &Network) -> Result<ToSolution> {
    let lattice = Lattice::new(loads, net)?;
    let mut best: Option<(f64, u64, Vec<u32>)> = None;
    let mut visited = 0usize;
    lattice.walk(&mut |counts, u| {
        visited += 1;
        let links: u64 = counts.iter().map(|&c| u64::from(c)).sum();
        let better = match &best {
            None => true,
            Some((bu, bl, _)) => {
                if same_utilization(u, *bu) {
                    links < *bl
                } else {
                    u < *bu
                }
            }
        };
        if better {
            best = Some((u, links, counts.to_vec()));
        }
    });
    let (mlu, _, counts) = best.ok_or_else(|| {
        Error::Infeasible("no allocation within the port budgets carries the loads".into())
    })?;
    Ok(ToSolution {
        topology: lattice.topology(&counts),
        mlu,
        iterations: visited,
        feasible: true,
        upper_bound: mlu,
        epsilon: 0.0,
    })
}

/// Every allocation attaining the optimal one-hop utilization.
pub fn optimal_topologies(loads: &LinkLoads, net: &Network) -> Result<(f64, Vec<Topology>)> {
    let lattice = Lattice::new(loads, net)?;
    let mut best = f64::INFINITY;
    let mut optima: Vec<Vec<u32>> = Vec::new();
    lattice.walk(&mut |counts, u| {
        if same_utilization(u, best) {
            optima.push(counts.to_vec());
        } else if u < best {
            best = u;
            optima.clear();
            optima.push(counts.to_vec());
        }
    });
    if optima.is_empty() {
        return Err(Error::Infeasible(
            "no allocation within the port budgets carries the loads".into(),
        ));
    }
    Ok((best, optima.iter().map(|c| lattice.topology(c)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::compute_mlu;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn hungarian_three_by_three() {
        let ninf = f64::NEG_INFINITY;
        let w = SquareMatrix::from_vec(3, vec![ninf, 5.0, 1.0, 5.0, ninf, 1.0, 1.0, 1.0, ninf]).unwrap();
        let m = hungarian(&w);
        // exhaustive: derangements of 3 are the two 3-cycles, both weigh 7
        let best = permutations(3)
            .into_iter()
            .filter(|p| p.iter().enumerate().all(|(i, &j)| i != j))
            .map(|p| p.iter().enumerate().map(|(i, &j)| w[(i, j)]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(best, 7.0);
        assert_eq!(m.weight, 7.0);
        assert!(m.assignment.iter().all(Option::is_some));
    }

    #[test]
    fn hungarian_avoids_forbidden_diagonal() {
        let w = SquareMatrix::from_fn(4, |i, j| if i == j { f64::NEG_INFINITY } else { 1.0 });
        let m = hungarian(&w);
        assert_eq!(m.weight, 4.0);
        for (i, j) in m.pairs() {
            assert_ne!(i, j);
        }
    }

    #[test]
    fn bvn_permutation_demand() {
        let net = Network::uniform(4, 1, 2.0).unwrap();
        let d = TrafficMatrix::from_rows(&[
            vec![0.0, 3.0, 0.0, 0.0],
            vec![3.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 3.0],
            vec![0.0, 0.0, 3.0, 0.0],
        ])
        .unwrap();
        let t = bvn_topology(&d, &net).unwrap();
        assert_eq!(t.get(0, 1), 1);
        assert_eq!(t.get(2, 3), 1);
        assert_eq!(t.total_links(), 2);
        assert_eq!(compute_mlu(&LinkLoads::direct(&d), &t, &net), 1.5);
    }

    #[test]
    fn bvn_uniform_round_robin() {
        let net = Network::uniform(4, 3, 1.0).unwrap();
        let d = TrafficMatrix::new(SquareMatrix::from_fn(4, |i, j| if i == j { 0.0 } else { 1.0 })).unwrap();
        let t = bvn_topology(&d, &net).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(t.get(i, j), 1, "pair ({i}, {j})");
                }
            }
        }
        t.check_budgets(&net).unwrap();
    }

    #[test]
    fn mcf_zero_and_single_pair() {
        let net = Network::uniform(3, 4, 1.0).unwrap();
        assert_eq!(mcf_topology(&LinkLoads::zeros(3), &net).unwrap(), Topology::empty(3));

        let net = Network::new(vec![5, 3, 4], vec![1.0; 3]).unwrap();
        let mut rows = vec![vec![0.0; 3]; 3];
        rows[0][1] = 5.0;
        let t = mcf_topology(&LinkLoads::from_rows(&rows).unwrap(), &net).unwrap();
        assert_eq!(t.get(0, 1), 3);
        assert_eq!(t.get(0, 2), 0);
        assert_eq!(t.get(1, 2), 0);
    }

    #[test]
    fn brute_force_small_cases() {
        let net = Network::uniform(2, 4, 1.0).unwrap();
        let loads = LinkLoads::from_rows(&[vec![0.0, 10.0], vec![0.0, 0.0]]).unwrap();
        let sol = brute_force_to(&loads, &net).unwrap();
        assert_eq!(sol.mlu, 2.5);
        assert_eq!(sol.topology.get(0, 1), 4);

        let sol = brute_force_to(&LinkLoads::zeros(3), &Network::uniform(3, 2, 1.0).unwrap()).unwrap();
        assert_eq!(sol.mlu, 0.0);
        assert_eq!(sol.topology, Topology::empty(3));
    }

    #[test]
    fn brute_force_guards_size() {
        let net = Network::uniform(5, 2, 1.0).unwrap();
        assert!(matches!(
            brute_force_to(&LinkLoads::zeros(5), &net),
            Err(Error::InstanceTooLarge(_))
        ));
    }
}
