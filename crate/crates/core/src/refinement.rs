//! Traffic-aware refinement: spend leftover ports on the most utilized PoD
//! pairs. Links are only ever added, so utilization under fixed loads can
//! only go down, while relays gain new candidate paths.

use std::cmp::Ordering;

use crate::error::Result;
use crate::model::{LinkLoads, Network, Topology};

/// Greedily adds links on pairs ranked by `max(T_ij, T_ji) / S_ij`,
/// descending, ties by `(i, j)`. Each pair takes as many links as both
/// endpoints still have free ports.
pub fn refine(topo: &Topology, loads: &LinkLoads, net: &Network) -> Result<Topology> {
    topo.check_budgets(net)?;
    let n = net.n_pods();
    if loads.n_pods() != n {
        return Err(crate::Error::DimensionMismatch {
            expected: n,
            actual: loads.n_pods(),
        });
    }

    let mut remaining: Vec<u32> = (0..n)
        .map(|i| net.port_budget(i) - topo.ports_used(i))
        .collect();

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let cap = net.link_capacity(i, j);
            let score = (loads.get(i, j) / cap).max(loads.get(j, i) / cap);
            pairs.push((score, i, j));
        }
    }
    pairs.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then((a.1, a.2).cmp(&(b.1, b.2)))
    });

    let mut refined = topo.clone();
    for (_, i, j) in pairs {
        if remaining[i] == 0 || remaining[j] == 0 {
            continue;
        }
        let delta = remaining[i].min(remaining[j]);
        refined.add_links(i, j, delta);
        remaining[i] -= delta;
        remaining[j] -= delta;
    }
    Ok(refined)
}
