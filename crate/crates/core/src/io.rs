//! CSV exchange format for traffic matrices and topologies, and JSON for
//! solve reports.
//!
//! Both matrix kinds use a `i,j,value` header with 0-based PoD indices.
//! Zero entries may be omitted and are written out only when nonzero.
//! Routings use `s,d,k,value`: the share of `s -> d` traffic relayed via
//! `k`, where `k == d` is the direct path.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::model::{Routing, SolveReport, Topology, TrafficMatrix};

const HEADER: [&str; 3] = ["i", "j", "value"];

fn read_entries<R: Read>(reader: R, n_pods: usize) -> Result<Vec<(usize, usize, String)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::MalformedCsv {
            line: 1,
            reason: format!("expected header `i,j,value`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut seen = vec![false; n_pods * n_pods];
    let mut out = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2;
        let record = record?;
        if record.len() != 3 {
            return Err(Error::MalformedCsv {
                line,
                reason: format!("expected 3 fields, got {}", record.len()),
            });
        }
        let parse_index = |field: &str| -> Result<usize> {
            let v: usize = field.parse().map_err(|_| Error::MalformedCsv {
                line,
                reason: format!("bad index `{field}`"),
            })?;
            if v >= n_pods {
                return Err(Error::MalformedCsv {
                    line,
                    reason: format!("index {v} out of range for {n_pods} PoDs"),
                });
            }
            Ok(v)
        };
        let i = parse_index(&record[0])?;
        let j = parse_index(&record[1])?;
        if std::mem::replace(&mut seen[i * n_pods + j], true) {
            return Err(Error::MalformedCsv {
                line,
                reason: format!("duplicate entry ({i}, {j})"),
            });
        }
        out.push((i, j, record[2].to_string()));
    }
    Ok(out)
}

pub fn read_traffic_csv<R: Read>(reader: R, n_pods: usize) -> Result<TrafficMatrix> {
    let mut m = SquareMatrix::<f64>::zeros(n_pods);
    for (line, (i, j, raw)) in read_entries(reader, n_pods)?.into_iter().enumerate() {
        let line = line + 2;
        let v: f64 = raw.parse().map_err(|_| Error::MalformedCsv {
            line,
            reason: format!("bad value `{raw}`"),
        })?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::MalformedCsv {
                line,
                reason: format!("value {v} must be finite and non-negative"),
            });
        }
        if i == j && v != 0.0 {
            return Err(Error::MalformedCsv {
                line,
                reason: format!("nonzero diagonal entry ({i}, {i})"),
            });
        }
        m[(i, j)] = v;
    }
    TrafficMatrix::new(m)
}

pub fn write_traffic_csv<W: Write>(writer: W, demand: &TrafficMatrix) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(HEADER)?;
    for (i, j, v) in demand.matrix().off_diagonal() {
        if *v != 0.0 {
            // `Display` for f64 prints the shortest string that parses back
            // to the same value.
            wtr.write_record([i.to_string(), j.to_string(), v.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn load_traffic_csv(path: impl AsRef<Path>, n_pods: usize) -> Result<TrafficMatrix> {
    read_traffic_csv(File::open(path)?, n_pods)
}

pub fn save_traffic_csv(demand: &TrafficMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_traffic_csv(File::create(path)?, demand)
}

/// Reads a topology; symmetry and the zero diagonal are enforced, port
/// budgets are not (callers check those against their network).
pub fn read_topology_csv<R: Read>(reader: R, n_pods: usize) -> Result<Topology> {
    let mut m = SquareMatrix::<u32>::zeros(n_pods);
    for (line, (i, j, raw)) in read_entries(reader, n_pods)?.into_iter().enumerate() {
        let v: u32 = raw.parse().map_err(|_| Error::MalformedCsv {
            line: line + 2,
            reason: format!("bad link count `{raw}`"),
        })?;
        m[(i, j)] = v;
    }
    Topology::new(m)
}

pub fn write_topology_csv<W: Write>(writer: W, topo: &Topology) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(HEADER)?;
    for (i, j, v) in topo.matrix().off_diagonal() {
        if *v != 0 {
            wtr.write_record([i.to_string(), j.to_string(), v.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn load_topology_csv(path: impl AsRef<Path>, n_pods: usize) -> Result<Topology> {
    read_topology_csv(File::open(path)?, n_pods)
}

pub fn save_topology_csv(topo: &Topology, path: impl AsRef<Path>) -> Result<()> {
    write_topology_csv(File::create(path)?, topo)
}

const ROUTING_HEADER: [&str; 4] = ["s", "d", "k", "value"];

/// Reads a routing. Indices and values are checked here; whether the
/// splits sum to one is left to [`Routing::validate`].
pub fn read_routing_csv<R: Read>(reader: R, n_pods: usize) -> Result<Routing> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ROUTING_HEADER {
        return Err(Error::MalformedCsv {
            line: 1,
            reason: "expected header `s,d,k,value`".into(),
        });
    }
    let mut routing = Routing::zeros(n_pods);
    let mut seen = vec![false; n_pods * n_pods * n_pods];
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2;
        let record = record?;
        let bad = |reason: String| Error::MalformedCsv { line, reason };
        if record.len() != 4 {
            return Err(bad(format!("expected 4 fields, got {}", record.len())));
        }
        let mut ix = [0usize; 3];
        for (slot, field) in ix.iter_mut().zip(record.iter()) {
            *slot = field
                .parse()
                .ok()
                .filter(|&v| v < n_pods)
                .ok_or_else(|| bad(format!("bad index `{field}` for {n_pods} PoDs")))?;
        }
        let [s, d, k] = ix;
        if s == d || k == s {
            return Err(bad(format!("({s}, {d}) via {k} is not a path")));
        }
        let v: f64 = record[3]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| bad(format!("bad split `{}`", &record[3])))?;
        if std::mem::replace(&mut seen[(s * n_pods + d) * n_pods + k], true) {
            return Err(bad(format!("duplicate entry ({s}, {d}, {k})")));
        }
        routing.set_split(s, d, k, v);
    }
    Ok(routing)
}

pub fn write_routing_csv<W: Write>(writer: W, routing: &Routing) -> Result<()> {
    let n = routing.n_pods();
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(ROUTING_HEADER)?;
    for s in 0..n {
        for d in 0..n {
            for (k, &v) in routing.pair(s, d).iter().enumerate() {
                if v != 0.0 {
                    wtr.write_record([s.to_string(), d.to_string(), k.to_string(), v.to_string()])?;
                }
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn load_routing_csv(path: impl AsRef<Path>, n_pods: usize) -> Result<Routing> {
    read_routing_csv(File::open(path)?, n_pods)
}

pub fn save_routing_csv(routing: &Routing, path: impl AsRef<Path>) -> Result<()> {
    write_routing_csv(File::create(path)?, routing)
}

pub fn report_to_json(report: &SolveReport) -> String {
    serde_json::to_string_pretty(report).expect("report is always serializable")
}

pub fn report_from_json(s: &str) -> Result<SolveReport> {
    serde_json::from_str(s).map_err(|e| Error::Config(format!("bad report JSON: {e}")))
}
