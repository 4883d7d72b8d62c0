#![allow(dead_code)]

pub mod lp;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tro_core::{enumerate_two_hop_paths, LinkLoads, Network, SquareMatrix, Topology, TrafficMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One-hop oracle instance: `N in {2,3,4}`, `R_i in 2..=6`, integer loads
/// in `[0, 20]` thinned so that every PoD's loaded neighbours fit its ports.
pub fn oracle_instance(seed: u64) -> (LinkLoads, Network) {
    let n = rng(seed).random_range(2..=4);
    oracle_instance_with(seed, n)
}

pub fn oracle_instance_with(seed: u64, n: usize) -> (LinkLoads, Network) {
    let mut r = rng(seed);
    let _ = r.random_range(2..=4);
    let budgets: Vec<u32> = (0..n).map(|_| r.random_range(2..=6)).collect();
    let caps: Vec<f64> = (0..n)
        .map(|_| if r.random_bool(0.7) { 1.0 } else { r.random_range(1..=4) as f64 })
        .collect();
    let net = Network::new(budgets, caps).unwrap();
    let mut loads = SquareMatrix::from_fn(n, |i, j| {
        if i == j || r.random_bool(0.2) {
            0.0
        } else {
            r.random_range(0..=20) as f64
        }
    });
    // drop whole pairs until every PoD has at most R_i loaded neighbours
    for i in 0..n {
        let budget = net.port_budget(i) as usize;
        let mut seen = 0;
        for j in 0..n {
            if j != i && (loads[(i, j)] > 0.0 || loads[(j, i)] > 0.0) {
                seen += 1;
                if seen > budget {
                    loads[(i, j)] = 0.0;
                    loads[(j, i)] = 0.0;
                }
            }
        }
    }
    (LinkLoads::new(loads).unwrap(), net)
}

/// Random topology (each pair 0..=3 links) with demands only on pairs
/// that have at least one two-hop path.
pub fn routing_instance(seed: u64, n: usize) -> (TrafficMatrix, Topology, Network) {
    let mut r = rng(seed);
    let caps: Vec<f64> = (0..n)
        .map(|_| if r.random_bool(0.6) { 1.0 } else { r.random_range(1..=3) as f64 })
        .collect();
    let net = Network::new(vec![64; n], caps).unwrap();
    let mut topo = Topology::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if !r.random_bool(0.3) {
                topo.set_links(i, j, r.random_range(1..=3));
            }
        }
    }
    let paths = enumerate_two_hop_paths(&topo, &net).unwrap();
    let demand = SquareMatrix::from_fn(n, |i, j| {
        if i == j || paths.paths(i, j).is_empty() || r.random_bool(0.25) {
            0.0
        } else {
            r.random_range(0.0..10.0)
        }
    });
    (TrafficMatrix::new(demand).unwrap(), topo, net)
}

/// Like [`routing_instance`] but the topology always contains a random
/// spanning tree, so it is connected.
pub fn connected_routing_instance(seed: u64, n: usize) -> (TrafficMatrix, Topology, Network) {
    let mut r = rng(seed ^ 0x5eed);
    let caps: Vec<f64> = (0..n)
        .map(|_| if r.random_bool(0.6) { 1.0 } else { r.random_range(1..=3) as f64 })
        .collect();
    let net = Network::new(vec![64; n], caps).unwrap();
    let mut topo = Topology::empty(n);
    for i in 1..n {
        let j = r.random_range(0..i);
        topo.set_links(i, j, r.random_range(1..=3));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if topo.get(i, j) == 0 && r.random_bool(0.6) {
                topo.set_links(i, j, r.random_range(1..=3));
            }
        }
    }
    let paths = enumerate_two_hop_paths(&topo, &net).unwrap();
    let demand = SquareMatrix::from_fn(n, |i, j| {
        if i == j || paths.paths(i, j).is_empty() || r.random_bool(0.2) {
            0.0
        } else {
            r.random_range(0.0..10.0)
        }
    });
    (TrafficMatrix::new(demand).unwrap(), topo, net)
}

/// ATRO suite member: `N in {4, 8, 16}`, full-mesh ports, and gravity,
/// elephant or mixed traffic depending on the seed.
pub fn atro_instance(seed: u64) -> (TrafficMatrix, Network) {
    let n = [4, 8, 16][(seed % 3) as usize];
    let mut r = rng(seed.wrapping_mul(0x9e37_79b9));
    let ports = r.random_range((n as u32 - 1)..=(2 * n as u32));
    let net = tro_core::workloads::gen_full_mesh(n, ports, 1.0).unwrap();
    let demand = match (seed / 3) % 3 {
        0 => tro_core::workloads::gen_gravity_traffic(&net, 100.0 * n as f64, seed).unwrap(),
        1 => tro_core::workloads::gen_ai_traffic(&net, r.random_range(1..=n), 10.0, seed).unwrap(),
        _ => tro_core::workloads::gen_mixed_traffic(&net, r.random_range(1..=n), 10.0, 0.2, seed).unwrap(),
    };
    (demand, net)
}

/// Network with 3 PoDs, 4 ports each, unit-capacity links: ATRO without
/// refinement gets stuck at 0.2 on every demand below, while refinement
/// reaches 0.15.
pub fn ablation_network() -> Network {
    Network::uniform(3, 4, 1.0).unwrap()
}

pub fn ablation_family() -> Vec<TrafficMatrix> {
    [
        [[0.0, 0.2, 0.4], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.4, 0.2], [0.05, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.2, 0.4], [0.1, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.0, 0.6], [0.1, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.4, 0.2], [0.2, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.1, 0.5], [0.2, 0.0, 0.0], [0.0, 0.0, 0.0]],
    ]
    .iter()
    .map(|rows| TrafficMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap())
    .collect()
}

/// Maximum-weight perfect assignment by trying every permutation.
pub fn exhaustive_assignment(w: &SquareMatrix<f64>, forbid_diagonal: bool) -> f64 {
    fn go(w: &SquareMatrix<f64>, row: usize, used: &mut Vec<bool>, acc: f64, fd: bool, best: &mut f64) {
        let n = w.dim();
        if row == n {
            *best = best.max(acc);
            return;
        }
        for c in 0..n {
            if used[c] || (fd && c == row) {
                continue;
            }
            used[c] = true;
            go(w, row + 1, used, acc + w[(row, c)], fd, best);
            used[c] = false;
        }
    }
    let mut best = f64::NEG_INFINITY;
    go(w, 0, &mut vec![false; w.dim()], 0.0, forbid_diagonal, &mut best);
    best
}
