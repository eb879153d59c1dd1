//! Suite files and CSV reports.
//!
//! A suite lists one instance per line: `<path> <algo,...> [budget] [td=<path>]`.
//! Paths are relative to the suite file; `#` starts a comment. Without a budget
//! every search algorithm minimizes.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use dagpart::format::{parse_instance, parse_td};
use dagpart::reduction::reduce;
use dagpart::Weight;
use rayon::prelude::*;

use crate::run::{run, Algo, Request};

pub const CSV_VERSION: &str = "# dagpart-bench v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteEntry {
    pub instance: PathBuf,
    pub algos: Vec<Algo>,
    pub budget: Option<Weight>,
    pub td: Option<PathBuf>,
}

pub fn parse_suite(text: &str, base: &Path) -> Result<Vec<SuiteEntry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| anyhow!("suite line {}: {msg}", i + 1);
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(err("expected `<instance> <algo,...> [budget] [td=<path>]`".into()));
        }
        let algos = toks[1]
            .split(',')
            .map(|a| Algo::from_str(a, false).map_err(|_| err(format!("unknown algorithm `{a}`"))))
            .collect::<Result<Vec<_>>>()?;
        let mut entry = SuiteEntry {
            instance: base.join(toks[0]),
            algos,
            budget: None,
            td: None,
        };
        for tok in &toks[2..] {
            if let Some(p) = tok.strip_prefix("td=") {
                if entry.td.replace(base.join(p)).is_some() {
                    return Err(err("`td=` given twice".into()));
                }
            } else if entry.budget.is_none() {
                entry.budget = Some(tok.parse().map_err(|_| err(format!("invalid budget `{tok}`")))?);
            } else {
                return Err(err(format!("unexpected token `{tok}`")));
            }
        }
        out.push(entry);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRecord {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub red_n: usize,
    pub red_m: usize,
    pub algo: Algo,
    pub k: Option<Weight>,
    pub weight: Option<Weight>,
    pub status: String,
    pub time_ms: u128,
    pub nodes: u64,
}

impl BenchRecord {
    fn fields(&self) -> [String; 11] {
        let opt = |x: Option<Weight>| x.map_or(String::new(), |v| v.to_string());
        [
            self.instance.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.red_n.to_string(),
            self.red_m.to_string(),
            self.algo.to_string(),
            opt(self.k),
            opt(self.weight),
            self.status.clone(),
            self.time_ms.to_string(),
            self.nodes.to_string(),
        ]
    }
}

pub const COLUMNS: [&str; 11] = [
    "instance", "n", "m", "red_n", "red_m", "algo", "k", "weight", "status", "time_ms", "nodes",
];

fn run_entry(entry: &SuiteEntry, timeout: Option<Duration>) -> Vec<BenchRecord> {
    let name = entry.instance.display().to_string();
    let load = || -> Result<_> {
        let g = parse_instance(&fs::read_to_string(&entry.instance).with_context(|| name.clone())?)?;
        let td = match &entry.td {
            Some(p) => Some(parse_td(&fs::read_to_string(p).with_context(|| p.display().to_string())?)?),
            None => None,
        };
        Ok((g, td))
    };
    let (g, td) = match load() {
        Ok(x) => x,
        Err(e) => {
            return entry
                .algos
                .iter()
                .map(|&algo| BenchRecord {
                    instance: name.clone(),
                    n: 0,
                    m: 0,
                    red_n: 0,
                    red_m: 0,
                    algo,
                    k: entry.budget,
                    weight: None,
                    status: format!("ERROR: {e:#}"),
                    time_ms: 0,
                    nodes: 0,
                })
                .collect()
        }
    };
    let (r, _) = reduce(&g);
    entry
        .algos
        .iter()
        .map(|&algo| {
            let req = Request {
                algo,
                budget: entry.budget,
                minimize: entry.budget.is_none(),
                td: td.as_ref(),
                timeout,
            };
            let base = BenchRecord {
                instance: name.clone(),
                n: g.vertex_count(),
                m: g.arc_count(),
                red_n: r.vertex_count(),
                red_m: r.arc_count(),
                algo,
                k: entry.budget,
                weight: None,
                status: String::new(),
                time_ms: 0,
                nodes: 0,
            };
            match run(&g, &req) {
                Ok(o) => BenchRecord {
                    weight: o.weight(),
                    status: o.status.name().to_string(),
                    time_ms: o.elapsed.as_millis(),
                    nodes: o.nodes,
                    ..base
                },
                Err(e) => BenchRecord {
                    status: format!("ERROR: {e:#}"),
                    ..base
                },
            }
        })
        .collect()
}

/// Runs every (instance, algorithm) pair; rows come back in suite order
/// whatever the number of worker threads.
pub fn run_suite(suite: &[SuiteEntry], jobs: usize, timeout: Option<Duration>) -> Result<Vec<BenchRecord>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let rows: Vec<Vec<BenchRecord>> = pool.install(|| suite.par_iter().map(|e| run_entry(e, timeout)).collect());
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_csv(path: &Path, rows: &[BenchRecord]) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(CSV_VERSION.as_bytes());
    out.push(b'\n');
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(COLUMNS)?;
        for r in rows {
            w.write_record(r.fields())?;
        }
        w.flush()?;
    }
    fs::write(path, out).with_context(|| path.display().to_string())?;
    Ok(())
}

pub fn check_jobs(jobs: usize) -> Result<usize> {
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    Ok(jobs)
}
