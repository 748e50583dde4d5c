mod io;
mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use canon_core::bounds::{self, BoundsRow, Epsilon, LogValue};
use canon_core::canon::{self, Method};
use canon_core::coverage::{self, CoverageReport};
use canon_core::synth::{self, SynthConfig};
use canon_core::{MetricKind, PointCloud};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::io::{Manifest, ManifestEntry, Table};

/// Exact bound integers are included in JSON output up to this many digits.
const MAX_JSON_DIGITS: u64 = 4096;

#[derive(Parser)]
#[command(name = "canon", version, about = "Canonizations, quotient metrics and covering-number bounds for point clouds")]
struct Cli {
    /// Worker threads for coverage scans; 0 uses every core.
    #[arg(long, global = true, env = "CANON_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonize a point-cloud CSV and record the group element applied.
    Canonize(CanonizeArgs),
    /// Distance between two point-cloud CSVs.
    Dist(DistArgs),
    /// Per-item nearest-neighbour coverage of a test set by a train set.
    Coverage(CoverageArgs),
    /// Covering-number bounds table.
    Bounds(BoundsArgs),
    /// Generate a seeded synthetic dataset of clustered point clouds.
    Gen(GenArgs),
    /// Run a property suite and report pass/fail per property.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(clap::Args)]
struct CanonizeArgs {
    /// Input CSV, one point per row.
    input: PathBuf,
    /// sort, lexsort, hilbert(M), centralize or pca-skew.
    #[arg(long, short)]
    method: Method,
    /// Output CSV; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Where to write the group-element record; defaults to OUTPUT.group.json.
    #[arg(long)]
    group: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DistArgs {
    a: PathBuf,
    b: PathBuf,
    /// Metric id, e.g. inf, mean-euclidean, perm-sum, perm-bottleneck, sign:frobenius, wasserstein-1d:2.
    #[arg(long, short, default_value = "perm-sum")]
    metric: MetricKind,
}

#[derive(clap::Args)]
struct CoverageArgs {
    /// Train manifest (JSON Lines).
    #[arg(long)]
    train: PathBuf,
    /// Test manifest (JSON Lines).
    #[arg(long)]
    test: PathBuf,
    /// One or more metric ids, comma separated.
    #[arg(long, short, value_delimiter = ',', default_value = "perm-sum")]
    metric: Vec<MetricKind>,
    /// Canonize both sets before measuring.
    #[arg(long)]
    canon: Option<Method>,
    /// Only compare items that share a label.
    #[arg(long)]
    same_label: bool,
    /// Report the four standard distances: Euclidean, Lexsort, Hilbert and the quotient.
    #[arg(long, conflicts_with_all = ["metric", "canon"])]
    sweep: bool,
    /// Hilbert curve order used by --sweep.
    #[arg(long, default_value_t = 6)]
    hilbert_order: u32,
    /// Seed for manifest normalization sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BoundsArgs {
    /// Point counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "250,500,750,1000,2000")]
    n: Vec<u64>,
    #[arg(long, default_value_t = 3)]
    d: u32,
    /// Tolerance as p/q or a decimal.
    #[arg(long, default_value = "1/6")]
    eps: Epsilon,
    /// Hilbert curve order, or `inf` for the limit of infinite order.
    #[arg(long, default_value = "10")]
    m: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long, default_value_t = 100)]
    per_cluster: usize,
    /// Dimension of each point.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Points per cloud.
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Standard deviation of the per-entry noise.
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write train.jsonl and test.jsonl with these sizes, e.g. 200,100.
    #[arg(long, value_delimiter = ',')]
    split: Option<Vec<usize>>,
    /// Output directory.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// hilbert, isometry, poor-c1, canon, metrics, assignment, coverage, bounds or all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let result = match cli.command {
        Command::Canonize(a) => cmd_canonize(a),
        Command::Dist(a) => cmd_dist(a),
        Command::Coverage(a) => cmd_coverage(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_canonize(a: CanonizeArgs) -> Result<ExitCode> {
    let table = Table::read(&a.input)?;
    let mut record = json!({ "method": a.method.name() });
    let out = match a.method {
        Method::Sort => {
            let Some((values, layout)) = table.vector() else {
                bail!("sort expects a single row or a single column; use lexsort or hilbert for point clouds");
            };
            let x = PointCloud::from_rows(&[values])?;
            let r = a.method.apply(&x)?;
            record["perm"] = json!(r.perm);
            Table::from_vector(r.cloud.row(0), layout, table.header.clone())
        }
        Method::PcaSkew => {
            let (aligned, signed) = canon::canon_pca_skew(&table.cloud()?)?;
            record["shift"] = json!(aligned.shift);
            record["rotation"] = json!(aligned.frame);
            record["signs"] = json!(signed.signs);
            Table::from_cloud(&signed.cloud, table.header.clone())
        }
        m => {
            let r = m.apply(&table.cloud()?)?;
            for (key, value) in [("perm", json!(r.perm)), ("signs", json!(r.signs)), ("shift", json!(r.shift))] {
                if !value.is_null() {
                    record[key] = value;
                }
            }
            Table::from_cloud(&r.cloud, table.header.clone())
        }
    };
    out.write(io::output(a.output.as_deref())?)?;
    let group = a.group.or_else(|| {
        a.output.as_ref().map(|o| {
            let mut p = o.clone().into_os_string();
            p.push(".group.json");
            PathBuf::from(p)
        })
    });
    if let Some(path) = group {
        write_json(&path, &record)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dist(a: DistArgs) -> Result<ExitCode> {
    let load = |p: &Path| -> Result<PointCloud> {
        let t = Table::read(p)?;
        match (a.metric, t.vector()) {
            (MetricKind::Wasserstein1d(_), Some((v, _))) => Ok(PointCloud::from_rows(&[v])?),
            _ => t.cloud(),
        }
    };
    let x = load(&a.a)?;
    let y = load(&a.b)?;
    let d = a.metric.distance(&x, &y)?;
    println!("{}", io::sig12(d.value()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_coverage(a: CoverageArgs) -> Result<ExitCode> {
    let train = Manifest::read(&a.train)?.load("train", a.seed)?;
    let test = Manifest::read(&a.test)?.load("test", a.seed)?;
    let euclid: MetricKind = "mean-euclidean".parse()?;
    let runs: Vec<(Option<Method>, MetricKind)> = if a.sweep {
        vec![
            (None, euclid),
            (Some(Method::Lexsort), euclid),
            (Some(Method::Hilbert(a.hilbert_order)), euclid),
            (None, MetricKind::PERM_SUM),
        ]
    } else {
        a.metric.iter().map(|&m| (a.canon, m)).collect()
    };
    let reports = runs
        .into_iter()
        .map(|(canon, metric)| match canon {
            Some(c) => coverage::canonized_coverage(&train, &test, c, metric, a.same_label),
            None => coverage::coverage(&train, &test, metric, a.same_label),
        })
        .collect::<canon_core::Result<Vec<CoverageReport>>>()?;

    let mut out = io::output(a.output.as_deref())?;
    match a.format {
        Format::Json => {
            let doc = json!({
                "seed": a.seed,
                "train_items": train.len(),
                "test_items": test.len(),
                "reports": reports,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Format::Csv => {
            writeln!(out, "metric,canon,same_label,mean_coverage,max_coverage")?;
            for r in &reports {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.metric,
                    r.canon.as_deref().unwrap_or("none"),
                    r.same_label_only,
                    io::sig12(r.mean_coverage),
                    io::sig12(r.max_coverage)
                )?;
            }
        }
        Format::Text => {
            writeln!(out, "{:<28} {:>16} {:>16}", "distance", "mean coverage", "max coverage")?;
            for r in &reports {
                let name = match &r.canon {
                    Some(c) => format!("{} on {c}", r.metric),
                    None => r.metric.clone(),
                };
                writeln!(out, "{name:<28} {:>16} {:>16}", io::sig12(r.mean_coverage), io::sig12(r.max_coverage))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_order(m: &str) -> Result<Option<u32>> {
    match m.trim() {
        "inf" | "limit" => Ok(None),
        s => s
            .parse()
            .map(Some)
            .with_context(|| format!("curve order must be an integer or 'inf', got '{s}'")),
    }
}

#[derive(Serialize)]
struct CellJson {
    formula: &'static str,
    sci: String,
    log10: f64,
    digits: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

fn cell_json(v: &LogValue) -> CellJson {
    let digits = v.digits();
    CellJson {
        formula: v.formula.label(),
        sci: v.sci(),
        log10: v.log10,
        digits,
        exact: v
            .exact
            .as_ref()
            .filter(|_| digits <= MAX_JSON_DIGITS)
            .map(|x| x.to_string()),
    }
}

fn cmd_bounds(a: BoundsArgs) -> Result<ExitCode> {
    let order = parse_order(&a.m)?;
    let rows: Vec<BoundsRow> = bounds::bounds_table(&a.n, a.d, &a.eps, order)?;
    let order_label = order.map_or("inf".to_owned(), |m| m.to_string());
    let mut out = io::output(a.output.as_deref())?;
    match a.format {
        Format::Json => {
            let doc = json!({
                "d": a.d,
                "epsilon": a.eps.to_string(),
                "m": order_label,
                "rows": rows.iter().map(|r| json!({
                    "n": r.n,
                    "cells": r.values().iter().map(|v| cell_json(v)).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Format::Csv => {
            writeln!(out, "n,formula,value,log10,digits")?;
            for r in &rows {
                for v in r.values() {
                    writeln!(out, "{},{},{},{},{}", r.n, v.formula.label(), v.sci(), io::sig12(v.log10), v.digits())?;
                }
            }
        }
        Format::Text => {
            writeln!(out, "covering-number bounds, d = {}, eps = {}, m = {order_label}", a.d, a.eps)?;
            write!(out, "{:<24}", "")?;
            for r in &rows {
                write!(out, " {:>11}", format!("n={}", r.n))?;
            }
            writeln!(out)?;
            let names = ["Quotient (upper)", "Hilbert (upper)", "Lexsort (lower)", "Hypercube (exact)"];
            for (k, name) in names.iter().enumerate() {
                write!(out, "{name:<24}")?;
                for r in &rows {
                    write!(out, " {:>11}", r.values()[k].sci())?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(a: GenArgs) -> Result<ExitCode> {
    let cfg = SynthConfig {
        clusters: a.clusters,
        per_cluster: a.per_cluster,
        dim: a.d,
        points: a.n,
        sigma: a.sigma,
        seed: a.seed,
    };
    let items = synth::generate(&cfg)?;
    let cloud_dir = a.out.join("clouds");
    fs::create_dir_all(&cloud_dir).with_context(|| format!("cannot create {}", cloud_dir.display()))?;
    let mut entries = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let rel = PathBuf::from("clouds").join(format!("c{i:05}.csv"));
        let file = fs::File::create(a.out.join(&rel))?;
        Table::from_cloud(item, None).write(std::io::BufWriter::new(file))?;
        entries.push(ManifestEntry { path: rel, label: item.label });
    }
    io::write_manifest(&a.out.join("manifest.jsonl"), &entries)?;
    if let Some(split) = a.split {
        if split.len() != 2 {
            bail!("--split takes two sizes, TRAIN,TEST");
        }
        let (train, test) = synth::train_test_split(entries, split[0], split[1], a.seed)?;
        io::write_manifest(&a.out.join("train.jsonl"), &train)?;
        io::write_manifest(&a.out.join("test.jsonl"), &test)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let Some(checks) = verify::run(&a.suite, a.seed) else {
        bail!("unknown suite '{}' (known: {}, all)", a.suite, verify::SUITES.join(", "));
    };
    let mut out = std::io::stdout().lock();
    for c in &checks {
        writeln!(out, "{}", serde_json::to_string(c)?)?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    eprintln!("{} properties checked, {failed} failed", checks.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
}
