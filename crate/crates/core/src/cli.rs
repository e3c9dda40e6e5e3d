//! Command-line front end. Each command builds a [`Report`]: a JSON value
//! with sorted keys plus a short human-readable rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::correlation::{graph_from_timeseries, hypergraph_from_timeseries, rho_histogram, TimeSeriesMatrix};
use crate::error::{Error, Result};
use crate::hypergraph::{Topology, UniformHypergraph};
use crate::mon::{brute_force_mon, mon, MonOptions, MonResult, TieBreak, DEFAULT_SUBSET_BUDGET};
use crate::observability::{is_locally_weakly_observable, EvalLimits, RankConfig};
use crate::scalar::MODULUS;

#[derive(Parser, Debug)]
#[command(name = "hyperobs", version, about = "Observability and minimum observable nodes of uniform hypergraph dynamics")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TopologyArg {
    Chain,
    Ring,
    Star,
    Complete,
}

impl From<TopologyArg> for Topology {
    fn from(t: TopologyArg) -> Self {
        match t {
            TopologyArg::Chain => Topology::Chain,
            TopologyArg::Ring => Topology::Ring,
            TopologyArg::Star => Topology::Star,
            TopologyArg::Complete => Topology::Complete,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TieBreakArg {
    Degree,
    Index,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

/// Measured nodes: a comma-separated id list or `all`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeSel {
    All,
    List(Vec<usize>),
}

fn parse_nodes(s: &str) -> std::result::Result<NodeSel, String> {
    if s.trim() == "all" {
        return Ok(NodeSel::All);
    }
    let ids = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad node id '{}': {e}", t.trim())))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if ids.is_empty() {
        return Err("empty node list".into());
    }
    Ok(NodeSel::List(ids))
}

#[derive(clap::Args, Debug, Clone)]
pub struct RankArgs {
    /// Lie-derivative levels beyond J_0 (default: n for `observable`, n-1 for `mon`).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Random evaluation points for the generic rank.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cap on recursion calls per Lie-derivative evaluation.
    #[arg(long, default_value_t = EvalLimits::default().term_budget)]
    pub term_budget: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a hypergraph from a topology family.
    Gen {
        #[arg(value_enum)]
        topology: TopologyArg,
        n: usize,
        k: usize,
        /// Output file (hypergraph JSON); stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test local weak observability from a set of measured nodes.
    Observable {
        input: PathBuf,
        #[arg(long, value_parser = parse_nodes)]
        nodes: NodeSel,
        #[command(flatten)]
        rank: RankArgs,
    },
    /// Greedy minimum observable node selection.
    Mon {
        input: PathBuf,
        #[command(flatten)]
        rank: RankArgs,
        #[arg(long, value_enum, default_value_t = TieBreakArg::Degree)]
        tie_break: TieBreakArg,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        per_component: Switch,
        /// Cross-check the greedy size against exhaustive search.
        #[arg(long)]
        brute_force: bool,
    },
    /// Build a 3-uniform hypergraph from time series by multi-correlation.
    Ingest {
        csv: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        threshold: f64,
        /// Output file (hypergraph JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also select MON for the hypergraph and the pairwise graph.
        #[arg(long)]
        mon: bool,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        bins: u64,
    },
}

/// Result of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub value: Value,
    pub text: String,
    /// Raw payload written to stdout instead of the report (used by `gen`
    /// without `--out`).
    pub payload: Option<String>,
}

impl Report {
    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.value).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        if let Some(p) = &self.payload {
            return p.clone();
        }
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.text.clone(),
        }
    }
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource(_) => 2,
        Error::Invariant(_) => 3,
        _ => 1,
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Gen { topology, n, k, out } => cmd_gen((*topology).into(), *n, *k, out.as_deref()),
        Command::Observable { input, nodes, rank } => cmd_observable(input, nodes, rank),
        Command::Mon { input, rank, tie_break, per_component, brute_force } => {
            let opts = MonOptions {
                depth: rank.depth,
                trials: rank.trials as usize,
                seed: rank.seed,
                tie_break: match tie_break {
                    TieBreakArg::Degree => TieBreak::Degree,
                    TieBreakArg::Index => TieBreak::LowestIndex,
                    TieBreakArg::Random => TieBreak::Random,
                },
                per_component: *per_component == Switch::On,
                limits: EvalLimits { term_budget: rank.term_budget, ..Default::default() },
            };
            cmd_mon(input, &opts, *brute_force)
        }
        Command::Ingest { csv, threshold, out, mon, bins } => cmd_ingest(csv, *threshold, out.as_deref(), *mon, *bins as usize),
    }
}

fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

fn read_hypergraph(path: &Path) -> Result<(UniformHypergraph, String)> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let g = UniformHypergraph::from_json(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok((g, digest(&bytes)))
}

/// `n`, `k`, edge count, degree sequence and degree histogram.
pub fn summary(g: &UniformHypergraph) -> Value {
    let degrees = g.degrees();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in &degrees {
        *hist.entry(d).or_default() += 1;
    }
    json!({
        "n": g.n(),
        "k": g.k(),
        "edges": g.edge_count(),
        "degrees": degrees,
        "degree_histogram": hist.into_iter().map(|(d, c)| json!({"degree": d, "count": c})).collect::<Vec<_>>(),
        "components": g.connected_components().len(),
    })
}

pub fn cmd_gen(topology: Topology, n: usize, k: usize, out: Option<&Path>) -> Result<Report> {
    let g = topology.generate(n, k)?;
    let mut body = g.to_json();
    body.push('\n');
    let value = json!({
        "command": {"name": "gen", "topology": topology.name(), "n": n, "k": k,
                    "out": out.map(|p| p.display().to_string())},
        "hypergraph": summary(&g),
        "output_digest": digest(body.as_bytes()),
    });
    let text = format!("{} n={n} k={k}: {} edges\n", topology.name(), g.edge_count());
    let payload = match out {
        Some(p) => {
            std::fs::write(p, &body)?;
            None
        }
        None => Some(body),
    };
    Ok(Report { value, text, payload })
}

pub fn cmd_observable(input: &Path, nodes: &NodeSel, rank: &RankArgs) -> Result<Report> {
    let (g, dig) = read_hypergraph(input)?;
    let ids: Vec<usize> = match nodes {
        NodeSel::All => (1..=g.n()).collect(),
        NodeSel::List(v) => v.clone(),
    };
    let cfg = RankConfig {
        trials: rank.trials as usize,
        seed: rank.seed,
        depth: rank.depth,
        limits: EvalLimits { term_budget: rank.term_budget, ..Default::default() },
    };
    let v = is_locally_weakly_observable(&g, &ids, &cfg)?;
    let value = json!({
        "command": {"name": "observable", "input": input.display().to_string(), "nodes": ids,
                    "depth": rank.depth, "trials": rank.trials, "seed": rank.seed},
        "input_digest": dig,
        "hypergraph": summary(&g),
        "verdict": v,
        "modulus": MODULUS,
        "trials": rank.trials,
        "seed": rank.seed,
    });
    let text = format!(
        "nodes {:?}: rank {}/{} at depth {} -> {}\n",
        ids,
        v.rank,
        v.n,
        v.depth,
        if v.is_observable() { "observable" } else { "not observable at this depth" }
    );
    Ok(Report { value, text, payload: None })
}

fn mon_text(label: &str, r: &MonResult) -> String {
    let mut s = format!("{label}: |D| = {} {:?}, rank trace {:?}, {:?}\n", r.size(), r.selected, r.rank_trace, r.verdict);
    if r.component_breakdown.len() > 1 {
        for c in &r.component_breakdown {
            let _ = writeln!(s, "  component {:?}: {:?}", c.nodes, c.selected);
        }
    }
    s
}

pub fn cmd_mon(input: &Path, opts: &MonOptions, brute: bool) -> Result<Report> {
    let (g, dig) = read_hypergraph(input)?;
    let r = mon(&g, opts)?;
    let mut text = mon_text("greedy", &r);
    let brute_value = if brute {
        let b = brute_force_mon(&g, g.n(), opts, DEFAULT_SUBSET_BUDGET)?;
        let _ = writeln!(text, "brute force: |D| = {} {:?}", b.size(), b.selected);
        json!({"selected": b.selected, "size": b.size(), "verdict": b.verdict, "agrees": b.size() == r.size()})
    } else {
        Value::Null
    };
    let tie = match &opts.tie_break {
        TieBreak::Degree => "degree",
        TieBreak::LowestIndex => "index",
        TieBreak::Random => "random",
        TieBreak::Priority(_) => "priority",
    };
    let value = json!({
        "command": {"name": "mon", "input": input.display().to_string(), "depth": opts.depth,
                    "trials": opts.trials, "seed": opts.seed, "tie_break": tie,
                    "per_component": opts.per_component, "brute_force": brute},
        "input_digest": dig,
        "hypergraph": summary(&g),
        "mon": r,
        "brute_force": brute_value,
        "modulus": MODULUS,
        "trials": opts.trials,
        "seed": opts.seed,
    });
    Ok(Report { value, text, payload: None })
}

pub fn cmd_ingest(csv: &Path, threshold: f64, out: Option<&Path>, with_mon: bool, bins: usize) -> Result<Report> {
    let bytes = std::fs::read(csv).map_err(|e| Error::Parse(format!("{}: {e}", csv.display())))?;
    let data = TimeSeriesMatrix::from_csv(bytes.as_slice())?;
    let ing = hypergraph_from_timeseries(&data, threshold)?;
    let g = &ing.hypergraph;
    if let Some(p) = out {
        let mut body = g.to_json();
        body.push('\n');
        std::fs::write(p, body)?;
    }
    let edges_named: Vec<Vec<&str>> =
        g.edges().iter().map(|e| e.iter().map(|&v| data.labels()[v - 1].as_str()).collect()).collect();
    let mut text = format!(
        "{} signals, {} samples: {} triples, {} above {threshold}\n",
        data.signals(),
        data.samples(),
        ing.triples.len(),
        g.edge_count()
    );
    let mon_value = if with_mon {
        let opts = MonOptions::default();
        let hyper = mon(g, &opts)?;
        let pair = mon(&graph_from_timeseries(&data, threshold)?, &opts)?;
        let _ = writeln!(text, "MON hypergraph {} vs pairwise graph {}", hyper.size(), pair.size());
        json!({"hypergraph": hyper.sorted_selection(), "pairwise": pair.sorted_selection(),
               "hypergraph_size": hyper.size(), "pairwise_size": pair.size()})
    } else {
        Value::Null
    };
    let value = json!({
        "command": {"name": "ingest", "csv": csv.display().to_string(), "threshold": threshold,
                    "out": out.map(|p| p.display().to_string()), "bins": bins},
        "input_digest": digest(&bytes),
        "signals": data.signals(),
        "samples": data.samples(),
        "labels": data.labels(),
        "triples": ing.triples.len(),
        "edges": edges_named,
        "hypergraph": summary(g),
        "rho_histogram": rho_histogram(&ing.triples, bins),
        "mon": mon_value,
    });
    Ok(Report { value, text, payload: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_lists() {
        assert_eq!(parse_nodes("all").unwrap(), NodeSel::All);
        assert_eq!(parse_nodes("1, 3,5").unwrap(), NodeSel::List(vec![1, 3, 5]));
        assert!(parse_nodes("1,x").is_err());
        assert!(parse_nodes("").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 1);
        assert_eq!(exit_code(&Error::Domain("x".into())), 1);
        assert_eq!(exit_code(&Error::Resource("x".into())), 2);
        assert_eq!(exit_code(&Error::Invariant("x".into())), 3);
    }

    #[test]
    fn summary_fields() {
        let g = Topology::Star.generate(5, 3).unwrap();
        let s = summary(&g);
        assert_eq!(s["edges"], 3);
        assert_eq!(s["degrees"], json!([3, 3, 1, 1, 1]));
        assert_eq!(s["degree_histogram"], json!([{"degree": 1, "count": 3}, {"degree": 3, "count": 2}]));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
