//! Benchmark suites: methods x networks x workloads x seeds, one CSV row per
//! (method, instance), MLU normalized to ATRO on the same instance.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use tro_core::baselines::{brute_force_to, bvn_topology, mcf_topology};
use tro_core::{absm, atro, compute_mlu, AbsmConfig, AtroConfig, LinkLoads};

use crate::specs::{NetSpec, TrafficSpec, UsageError};

/// Worker-count override for the suite thread pool.
pub const WORKERS_ENV: &str = "TRO_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Absm,
    Atro,
    Bvn,
    Mcf,
    Brute,
}

impl FromStr for Method {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "absm" => Ok(Method::Absm),
            "atro" => Ok(Method::Atro),
            "bvn" => Ok(Method::Bvn),
            "mcf" => Ok(Method::Mcf),
            "brute" => Ok(Method::Brute),
            _ => Err(UsageError(format!(
                "unknown method `{s}`, expected absm, atro, bvn, mcf or brute"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Absm => "absm",
            Method::Atro => "atro",
            Method::Bvn => "bvn",
            Method::Mcf => "mcf",
            Method::Brute => "brute",
        })
    }
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>, UsageError> {
    let mut out: Vec<Method> = Vec::new();
    for m in s.split(',').map(str::trim).filter(|m| !m.is_empty()) {
        let m: Method = m.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(UsageError("no methods given".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub methods: Vec<Method>,
    pub nets: Vec<NetSpec>,
    pub traffics: Vec<TrafficSpec>,
    pub seeds: Vec<u64>,
    pub allow_brute: bool,
    pub atro: AtroConfig,
    pub absm: AbsmConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub instance: usize,
    pub network: String,
    pub traffic: String,
    pub seed: u64,
    pub method: String,
    pub mlu: f64,
    pub mlu_normalized_to_atro: Option<f64>,
    pub wall_time: f64,
    pub total_links: u64,
    pub rounds: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub rows: Vec<Row>,
    /// ATRO round count -> number of instances.
    pub round_histogram: BTreeMap<usize, usize>,
}

impl Suite {
    fn check(&self) -> Result<()> {
        if self.methods.contains(&Method::Brute) {
            if !self.allow_brute {
                return Err(UsageError("method brute needs --allow-brute".into()).into());
            }
            if let Some(net) = self.nets.iter().find(|n| n.n_pods > 4) {
                return Err(tro_core::Error::InstanceTooLarge(format!(
                    "brute force supports at most 4 PoDs, `{net}` has {}",
                    net.n_pods
                ))
                .into());
            }
        }
        if self.nets.is_empty() || self.traffics.is_empty() || self.seeds.is_empty() {
            return Err(UsageError("a suite needs at least one network, workload and seed".into()).into());
        }
        Ok(())
    }

    /// Instance keys in output order.
    fn instances(&self) -> Vec<(usize, &NetSpec, &TrafficSpec, u64)> {
        let mut out = Vec::new();
        for net in &self.nets {
            for traffic in &self.traffics {
                for &seed in &self.seeds {
                    out.push((out.len(), net, traffic, seed));
                }
            }
        }
        out
    }
}

struct Measured {
    method: Method,
    mlu: f64,
    wall_time: f64,
    total_links: u64,
    rounds: Option<usize>,
}

fn run_method(method: Method, suite: &Suite, net: &tro_core::Network, demand: &tro_core::TrafficMatrix) -> Result<Measured> {
    let loads = LinkLoads::direct(demand);
    let started = Instant::now();
    let (topo, mlu, rounds) = match method {
        Method::Absm => {
            let s = absm(&loads, net, &suite.absm)?;
            (s.topology, s.mlu, None)
        }
        Method::Brute => {
            let s = brute_force_to(&loads, net)?;
            (s.topology, s.mlu, None)
        }
        Method::Bvn => {
            let t = bvn_topology(demand, net)?;
            let mlu = compute_mlu(&loads, &t, net);
            (t, mlu, None)
        }
        Method::Mcf => {
            let t = mcf_topology(&loads, net)?;
            let mlu = compute_mlu(&loads, &t, net);
            (t, mlu, None)
        }
        Method::Atro => {
            let r = atro(demand, net, &suite.atro)?;
            (r.topology, r.report.mlu, Some(r.report.iterations))
        }
    };
    let wall_time = started.elapsed().as_secs_f64();
    Ok(Measured {
        method,
        mlu,
        wall_time,
        total_links: topo.total_links(),
        rounds,
    })
}

fn normalized(mlu: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        mlu / reference
    } else if mlu == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Runs every instance on a worker pool (`TRO_WORKERS` threads, default all
/// cores). Each instance runs its methods back to back on one worker;
/// rows come back in instance order regardless of scheduling.
pub fn run_suite(suite: &Suite) -> Result<SuiteResult> {
    suite.check()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| UsageError(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("building the worker pool")?;

    let instances = suite.instances();
    let per_instance: Vec<Result<Vec<Row>>> = pool.install(|| {
        instances
            .par_iter()
            .map(|&(idx, net_spec, traffic, seed)| {
                let net = net_spec.build()?;
                let demand = traffic.build(&net, seed)?;
                let measured = suite
                    .methods
                    .iter()
                    .map(|&m| run_method(m, suite, &net, &demand).with_context(|| format!("{m} on instance {idx}")))
                    .collect::<Result<Vec<_>>>()?;
                let reference = measured.iter().find(|m| m.method == Method::Atro).map(|m| m.mlu);
                Ok(measured
                    .into_iter()
                    .map(|m| Row {
                        instance: idx,
                        network: net_spec.to_string(),
                        traffic: traffic.to_string(),
                        seed,
                        method: m.method.to_string(),
                        mlu: m.mlu,
                        mlu_normalized_to_atro: reference.map(|r| normalized(m.mlu, r)),
                        wall_time: m.wall_time,
                        total_links: m.total_links,
                        rounds: m.rounds,
                    })
                    .collect())
            })
            .collect()
    });

    let mut rows = Vec::new();
    for r in per_instance {
        rows.extend(r?);
    }
    let mut round_histogram = BTreeMap::new();
    for row in &rows {
        if let Some(r) = row.rounds {
            *round_histogram.entry(r).or_insert(0) += 1;
        }
    }
    Ok(SuiteResult { rows, round_histogram })
}

pub fn write_rows<W: std::io::Write>(writer: W, rows: &[Row]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_histogram<W: std::io::Write>(writer: W, histogram: &BTreeMap<usize, usize>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["rounds", "count"])?;
    for (r, c) in histogram {
        wtr.write_record([r.to_string(), c.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}
