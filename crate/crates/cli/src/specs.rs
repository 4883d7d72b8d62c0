//! Compact textual specs for networks and workloads.
//!
//! Networks: `full-mesh:N:PORTS[:CAPACITY]`.
//! Traffic: `gravity:TOTAL`, `ai:FLOWS:SIZE`, `mixed:FLOWS:SIZE:BACKGROUND`,
//! each optionally followed by `:seed=S`, or `csv:PATH`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use tro_core::io::load_traffic_csv;
use tro_core::workloads::{gen_ai_traffic, gen_full_mesh, gen_gravity_traffic, gen_mixed_traffic};
use tro_core::{Network, TrafficMatrix};

/// A malformed command line: unknown method, bad spec, conflicting flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn number<T: FromStr>(field: &str, what: &str, spec: &str) -> Result<T, UsageError> {
    field
        .parse()
        .map_err(|_| usage(format!("bad {what} `{field}` in `{spec}`")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetSpec {
    pub n_pods: usize,
    pub ports: u32,
    pub capacity: f64,
}

impl NetSpec {
    pub fn build(&self) -> tro_core::Result<Network> {
        gen_full_mesh(self.n_pods, self.ports, self.capacity)
    }
}

impl FromStr for NetSpec {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["full-mesh", n, ports, rest @ ..] if rest.len() <= 1 => Ok(NetSpec {
                n_pods: number(n, "PoD count", s)?,
                ports: number(ports, "port count", s)?,
                capacity: match rest {
                    [c] => number(c, "capacity", s)?,
                    _ => 1.0,
                },
            }),
            _ => Err(usage(format!(
                "unknown network spec `{s}`, expected full-mesh:N:PORTS[:CAPACITY]"
            ))),
        }
    }
}

impl fmt::Display for NetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "full-mesh:{}:{}", self.n_pods, self.ports)?;
        if self.capacity != 1.0 {
            write!(f, ":{}", self.capacity)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrafficKind {
    Gravity { total: f64 },
    Ai { flows: usize, size: f64 },
    Mixed { flows: usize, size: f64, background: f64 },
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficSpec {
    pub kind: TrafficKind,
    /// Explicit `seed=` suffix, if any.
    pub seed: Option<u64>,
}

impl TrafficSpec {
    /// Builds the matrix for `net`. A generator without an explicit seed
    /// uses `default_seed`; with one, the two are added.
    pub fn build(&self, net: &Network, default_seed: u64) -> tro_core::Result<TrafficMatrix> {
        let seed = self.seed.map_or(default_seed, |s| s.wrapping_add(default_seed));
        match &self.kind {
            TrafficKind::Gravity { total } => gen_gravity_traffic(net, *total, seed),
            TrafficKind::Ai { flows, size } => gen_ai_traffic(net, *flows, *size, seed),
            TrafficKind::Mixed {
                flows,
                size,
                background,
            } => gen_mixed_traffic(net, *flows, *size, *background, seed),
            TrafficKind::Csv(path) => load_traffic_csv(path, net.n_pods()),
        }
    }
}

impl FromStr for TrafficSpec {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        if let Some(path) = s.strip_prefix("csv:") {
            if path.is_empty() {
                return Err(usage("csv traffic spec needs a path"));
            }
            return Ok(TrafficSpec {
                kind: TrafficKind::Csv(PathBuf::from(path)),
                seed: None,
            });
        }
        let mut parts: Vec<&str> = s.split(':').collect();
        let mut seed = None;
        if let Some(last) = parts.last() {
            if let Some(v) = last.strip_prefix("seed=") {
                seed = Some(number(v, "seed", s)?);
                parts.pop();
            }
        }
        let kind = match parts.as_slice() {
            ["gravity", total] => TrafficKind::Gravity {
                total: number(total, "total volume", s)?,
            },
            ["ai", flows, size] => TrafficKind::Ai {
                flows: number(flows, "flow count", s)?,
                size: number(size, "flow size", s)?,
            },
            ["mixed", flows, size, bg] => TrafficKind::Mixed {
                flows: number(flows, "flow count", s)?,
                size: number(size, "flow size", s)?,
                background: number(bg, "background fraction", s)?,
            },
            _ => {
                return Err(usage(format!(
                    "unknown traffic spec `{s}`, expected gravity:TOTAL, ai:FLOWS:SIZE, \
                     mixed:FLOWS:SIZE:BACKGROUND (each with optional :seed=S) or csv:PATH"
                )))
            }
        };
        Ok(TrafficSpec { kind, seed })
    }
}

impl fmt::Display for TrafficSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TrafficKind::Gravity { total } => write!(f, "gravity:{total}")?,
            TrafficKind::Ai { flows, size } => write!(f, "ai:{flows}:{size}")?,
            TrafficKind::Mixed {
                flows,
                size,
                background,
            } => write!(f, "mixed:{flows}:{size}:{background}")?,
            TrafficKind::Csv(p) => return write!(f, "csv:{}", p.display()),
        }
        if let Some(seed) = self.seed {
            write!(f, ":seed={seed}")?;
        }
        Ok(())
    }
}

/// `N` (meaning `0..N`), `A..B`, or a comma-separated list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, UsageError> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (number(a, "seed", s)?, number(b, "seed", s)?);
        if a >= b {
            return Err(usage(format!("empty seed range `{s}`")));
        }
        return Ok((a..b).collect());
    }
    if s.contains(',') {
        return s.split(',').map(|v| number(v.trim(), "seed", s)).collect();
    }
    let n: u64 = number(s, "seed count", s)?;
    if n == 0 {
        return Err(usage("seed count must be positive"));
    }
    Ok((0..n).collect())
}
