use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tro_cli::bench::{parse_methods, run_suite, write_histogram, write_rows, Method, Suite};
use tro_cli::commands::{run_atro, run_gen_topo, run_gen_traffic, run_to, AbsmOptions, AtroArgs, RunReport, ToArgs};
use tro_cli::exit;
use tro_cli::specs::{parse_seeds, NetSpec, TrafficSpec};

#[derive(Parser)]
#[command(name = "tro", version, about = "Topology and routing optimization for reconfigurable datacenter fabrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One-hop topology optimization with routing fixed to direct paths.
    To(ToCmd),
    /// Alternating topology and routing optimization over two-hop paths.
    Atro(AtroCmd),
    /// Runs a suite of methods over networks, workloads and seeds.
    Bench(BenchCmd),
    /// Writes a uniform full-mesh link allocation as a topology CSV.
    GenTopo(GenTopoCmd),
    /// Writes a generated traffic matrix as CSV.
    GenTraffic(GenTrafficCmd),
}

#[derive(Args)]
struct InstanceArgs {
    /// Network, e.g. full-mesh:16:32 or full-mesh:16:32:2.5.
    #[arg(long = "gen", value_name = "NET")]
    net: NetSpec,
    /// Workload, e.g. gravity:1000:seed=7, ai:8:10, mixed:8:10:0.2 or csv:tm.csv.
    #[arg(long, value_name = "TRAFFIC")]
    traffic: TrafficSpec,
    /// Seed added to the workload's own seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AbsmArgs {
    /// Absolute stopping gap of the binary search.
    #[arg(long, conflicts_with = "relative_epsilon")]
    epsilon: Option<f64>,
    /// Stopping gap relative to the initial upper bound (default 1e-6).
    #[arg(long)]
    relative_epsilon: Option<f64>,
    /// Initial upper bound instead of the automatic one.
    #[arg(long)]
    upper_bound: Option<f64>,
}

impl AbsmArgs {
    fn options(&self) -> AbsmOptions {
        AbsmOptions {
            epsilon: self.epsilon,
            relative_epsilon: self.relative_epsilon,
            upper_bound: self.upper_bound,
        }
    }
}

#[derive(Args)]
struct ToCmd {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    absm: AbsmArgs,
    /// Topology CSV output.
    #[arg(long)]
    out_topology: Option<PathBuf>,
    /// JSON report output; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct AtroCmd {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    absm: AbsmArgs,
    /// Skip refinement.
    #[arg(long)]
    no_refine: bool,
    /// Upper limit on alternation rounds.
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Stop once consecutive rounds differ by less than this.
    #[arg(long)]
    round_epsilon: Option<f64>,
    /// Topology CSV used instead of the first topology step.
    #[arg(long)]
    seed_topology: Option<PathBuf>,
    /// Routing CSV (s,d,k,value) used as the starting routing.
    #[arg(long)]
    seed_routing: Option<PathBuf>,
    /// Final topology CSV output.
    #[arg(long)]
    out_topology: Option<PathBuf>,
    /// Routing CSV output.
    #[arg(long)]
    out_routing: Option<PathBuf>,
    /// JSON report output; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchCmd {
    /// Comma-separated subset of absm, atro, bvn, mcf, brute.
    #[arg(long, default_value = "absm,atro,bvn,mcf")]
    methods: String,
    /// Network spec; repeat for several.
    #[arg(long = "gen", value_name = "NET", required = true)]
    nets: Vec<NetSpec>,
    /// Workload spec; repeat for several.
    #[arg(long = "traffic", value_name = "TRAFFIC", required = true)]
    traffics: Vec<TrafficSpec>,
    /// Seeds: a count N (0..N), a range A..B, or a list 1,2,3.
    #[arg(long, default_value = "1")]
    seeds: String,
    /// Permit exhaustive search (at most 4 PoDs).
    #[arg(long)]
    allow_brute: bool,
    /// Skip refinement in atro runs.
    #[arg(long)]
    no_refine: bool,
    /// Result CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Round-count histogram CSV output; stderr when absent.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Args)]
struct GenTopoCmd {
    /// Network, e.g. full-mesh:16:32.
    #[arg(long = "gen", value_name = "NET")]
    net: NetSpec,
    /// Topology CSV output.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenTrafficCmd {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Traffic CSV output.
    #[arg(long)]
    out: PathBuf,
}

fn emit_report(report: &RunReport, path: Option<&PathBuf>) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    match path {
        Some(p) => std::fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::To(c) => {
            let report = run_to(&ToArgs {
                net: c.instance.net,
                traffic: c.instance.traffic,
                seed: c.instance.seed,
                absm: c.absm.options(),
                out_topology: c.out_topology,
            })?;
            emit_report(&report, c.report.as_ref())
        }
        Command::Atro(c) => {
            let report = run_atro(&AtroArgs {
                net: c.instance.net,
                traffic: c.instance.traffic,
                seed: c.instance.seed,
                absm: c.absm.options(),
                no_refine: c.no_refine,
                max_rounds: c.max_rounds,
                round_epsilon: c.round_epsilon,
                seed_topology: c.seed_topology,
                seed_routing: c.seed_routing,
                out_topology: c.out_topology,
                out_routing: c.out_routing,
            })?;
            emit_report(&report, c.report.as_ref())
        }
        Command::Bench(c) => {
            let methods: Vec<Method> = parse_methods(&c.methods)?;
            let suite = Suite {
                methods,
                nets: c.nets,
                traffics: c.traffics,
                seeds: parse_seeds(&c.seeds)?,
                allow_brute: c.allow_brute,
                atro: tro_core::AtroConfig {
                    enable_refinement: !c.no_refine,
                    ..Default::default()
                },
                absm: Default::default(),
            };
            let result = run_suite(&suite)?;
            match &c.out {
                Some(p) => write_rows(File::create(p).with_context(|| format!("creating {}", p.display()))?, &result.rows)?,
                None => write_rows(io::stdout().lock(), &result.rows)?,
            }
            match &c.histogram {
                Some(p) => write_histogram(
                    File::create(p).with_context(|| format!("creating {}", p.display()))?,
                    &result.round_histogram,
                )?,
                None => write_histogram(io::stderr().lock(), &result.round_histogram)?,
            }
            Ok(())
        }
        Command::GenTopo(c) => {
            let topo = run_gen_topo(&c.net, &c.out)?;
            writeln!(
                io::stderr(),
                "{} PoDs, {} candidate edges, {} links",
                c.net.n_pods,
                c.net.n_pods * (c.net.n_pods - 1),
                topo.total_links()
            )?;
            Ok(())
        }
        Command::GenTraffic(c) => {
            let total = run_gen_traffic(&c.instance.net, &c.instance.traffic, c.instance.seed, &c.out)?;
            writeln!(io::stderr(), "total demand {total}")?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::SUCCESS });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::SUCCESS),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code_for(&e))
        }
    }
}
