//! Network and traffic generators. Every generator is a pure function of
//! its parameters and seed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::model::{Network, TrafficMatrix};

/// Uniform full mesh: `ports` ports per PoD, every link of `capacity`.
pub fn gen_full_mesh(n_pods: usize, ports: u32, capacity: f64) -> Result<Network> {
    if ports == 0 {
        return Err(Error::InvalidNetwork("ports must be at least 1".into()));
    }
    Network::uniform(n_pods, ports, capacity)
}

/// `D_{i,j} = total * w_i w_j / sum_{a != b} w_a w_b` for given weights.
pub fn gravity_from_weights(weights: &[f64], total_volume: f64) -> Result<TrafficMatrix> {
    if !(total_volume.is_finite() && total_volume >= 0.0) {
        return Err(Error::InvalidTraffic(format!(
            "total volume must be finite and non-negative, got {total_volume}"
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidTraffic("gravity weights must be non-negative".into()));
    }
    let n = weights.len();
    let sum: f64 = weights.iter().sum();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    let pair_mass = sum * sum - sum_sq;
    if total_volume == 0.0 || pair_mass <= 0.0 {
        return Ok(TrafficMatrix::zeros(n));
    }
    let scale = total_volume / pair_mass;
    TrafficMatrix::new(SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            scale * weights[i] * weights[j]
        }
    }))
}

/// Gravity-model background traffic with log-normal (sigma = 1) PoD weights.
pub fn gen_gravity_traffic(net: &Network, total_volume: f64, rng_seed: u64) -> Result<TrafficMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let dist = LogNormal::new(0.0, 1.0).expect("valid log-normal parameters");
    let weights: Vec<f64> = (0..net.n_pods()).map(|_| dist.sample(&mut rng)).collect();
    gravity_from_weights(&weights, total_volume)
}

/// Sparse elephant flows: `n_flows` flows of `flow_size` along consecutive
/// edges of a random cyclic permutation, so no two flows share a source or
/// a destination.
pub fn gen_ai_traffic(
    net: &Network,
    n_flows: usize,
    flow_size: f64,
    rng_seed: u64,
) -> Result<TrafficMatrix> {
    let n = net.n_pods();
    if n_flows > n {
        return Err(Error::InvalidTraffic(format!(
            "{n_flows} flows requested on {n} PoDs"
        )));
    }
    if !(flow_size.is_finite() && flow_size >= 0.0) {
        return Err(Error::InvalidTraffic(format!("bad flow size {flow_size}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut m = SquareMatrix::<f64>::zeros(n);
    for k in 0..n_flows {
        m[(order[k], order[(k + 1) % n])] = flow_size;
    }
    TrafficMatrix::new(m)
}

/// Elephant flows over a gravity floor carrying `background_fraction` of
/// the elephant volume.
pub fn gen_mixed_traffic(
    net: &Network,
    n_flows: usize,
    flow_size: f64,
    background_fraction: f64,
    rng_seed: u64,
) -> Result<TrafficMatrix> {
    let ai = gen_ai_traffic(net, n_flows, flow_size, rng_seed)?;
    let background = gen_gravity_traffic(
        net,
        background_fraction * ai.total(),
        rng_seed.wrapping_add(0x9e37_79b9_7f4a_7c15),
    )?;
    ai.add(&background)
}
