//! Line-based text formats: instances, solutions, tree decompositions and DIMACS CNF.
//!
//! All vertex ids on disk are 1-based. Blank lines are ignored; every other line
//! is a record whose token count is checked exactly.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::generators::CnfFormula;
use crate::graph::{PartitioningSet, Vertex, WeightedDag, Weight};
use crate::treewidth::TreeDecomposition;

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_ascii_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty() && t[0] != "c")
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

fn vertex(line: usize, tok: &str, n: usize) -> Result<Vertex> {
    let v: usize = num(line, tok, "vertex id")?;
    if v == 0 || v > n {
        return Err(parse_err(line, format!("vertex id {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

fn expect_len(line: usize, toks: &[&str], len: usize) -> Result<()> {
    if toks.len() != len {
        return Err(parse_err(
            line,
            format!("`{}` record takes {} fields, found {}", toks[0], len - 1, toks.len() - 1),
        ));
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<WeightedDag> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs = Vec::new();
    let mut last_line = 0;
    for (line, toks) in records(text) {
        last_line = line;
        match toks[0] {
            "p" => {
                expect_len(line, &toks, 4)?;
                if header.is_some() {
                    return Err(parse_err(line, "second `p` header"));
                }
                if toks[1] != "dagp" {
                    return Err(parse_err(line, format!("expected `p dagp`, found `p {}`", toks[1])));
                }
                let n = num(line, toks[2], "vertex count")?;
                let m: usize = num(line, toks[3], "arc count")?;
                arcs.reserve(m.min(1 << 24));
                header = Some((n, m));
            }
            "a" => {
                expect_len(line, &toks, 4)?;
                let (n, m) = header.ok_or_else(|| parse_err(line, "arc before `p` header"))?;
                if arcs.len() == m {
                    return Err(parse_err(line, format!("more than the declared {m} arcs")));
                }
                let u = vertex(line, toks[1], n)?;
                let v = vertex(line, toks[2], n)?;
                let w: Weight = num(line, toks[3], "weight")?;
                if w == 0 {
                    return Err(parse_err(line, "arc weight must be at least 1"));
                }
                if u == v {
                    return Err(parse_err(line, "self-loop"));
                }
                arcs.push((u, v, w));
            }
            other => return Err(parse_err(line, format!("unknown record `{other}`"))),
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(last_line.max(1), "missing `p dagp` header"))?;
    if arcs.len() != m {
        return Err(parse_err(
            last_line.max(1),
            format!("header declares {m} arcs, found {}", arcs.len()),
        ));
    }
    WeightedDag::new(n, arcs)
}

pub fn write_instance(g: &WeightedDag) -> String {
    let mut out = String::with_capacity(16 * (g.arc_count() + 1));
    writeln!(out, "p dagp {} {}", g.vertex_count(), g.arc_count()).unwrap();
    for (u, v, w) in g.arcs() {
        writeln!(out, "a {} {} {}", u + 1, v + 1, w).unwrap();
    }
    out
}

/// Summary line `s dagp W N`, followed by the `d` lines when `with_arcs` is set.
pub fn write_solution(g: &WeightedDag, s: &PartitioningSet, with_arcs: bool) -> String {
    let mut out = String::new();
    writeln!(out, "s dagp {} {}", s.total_weight(), s.len()).unwrap();
    if with_arcs {
        for (u, v) in s.endpoints(g) {
            writeln!(out, "d {} {}", u + 1, v + 1).unwrap();
        }
    }
    out
}

/// A parsed solution file: the weight it claims and the arcs it lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionFile {
    pub claimed_weight: Weight,
    pub set: PartitioningSet,
}

pub fn parse_solution(text: &str, g: &WeightedDag) -> Result<SolutionFile> {
    let n = g.vertex_count();
    let mut header: Option<(Weight, usize)> = None;
    let mut arcs = Vec::new();
    let mut seen = HashSet::new();
    let mut last_line = 0;
    for (line, toks) in records(text) {
        last_line = line;
        match toks[0] {
            "s" => {
                expect_len(line, &toks, 4)?;
                if header.is_some() {
                    return Err(parse_err(line, "second `s` line"));
                }
                if toks[1] != "dagp" {
                    return Err(parse_err(line, "expected `s dagp`"));
                }
                header = Some((num(line, toks[2], "weight")?, num(line, toks[3], "arc count")?));
            }
            "d" => {
                expect_len(line, &toks, 3)?;
                if header.is_none() {
                    return Err(parse_err(line, "`d` before `s` line"));
                }
                let u = vertex(line, toks[1], n)?;
                let v = vertex(line, toks[2], n)?;
                let a = g
                    .find_arc(u, v)
                    .ok_or_else(|| parse_err(line, format!("no arc ({}, {}) in the instance", u + 1, v + 1)))?;
                if !seen.insert(a) {
                    return Err(parse_err(line, "arc listed twice"));
                }
                arcs.push(a);
            }
            other => return Err(parse_err(line, format!("unknown record `{other}`"))),
        }
    }
    let (claimed_weight, count) = header.ok_or_else(|| parse_err(last_line.max(1), "missing `s dagp` line"))?;
    if arcs.len() != count {
        return Err(parse_err(
            last_line.max(1),
            format!("solution declares {count} arcs, found {}", arcs.len()),
        ));
    }
    Ok(SolutionFile {
        claimed_weight,
        set: PartitioningSet::new(g, arcs)?,
    })
}

/// Reads a PACE `.td` file: `s td B W N`, then `b id v...`, then tree edges.
pub fn parse_td(text: &str) -> Result<TreeDecomposition> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
    let mut edges = Vec::new();
    let mut last_line = 0;
    for (line, toks) in records(text) {
        last_line = line;
        match toks[0] {
            "s" => {
                expect_len(line, &toks, 5)?;
                if header.is_some() || toks[1] != "td" {
                    return Err(parse_err(line, "expected a single `s td` header"));
                }
                let b: usize = num(line, toks[2], "bag count")?;
                let w: usize = num(line, toks[3], "bag size")?;
                let n: usize = num(line, toks[4], "vertex count")?;
                bags = vec![None; b];
                header = Some((b, w, n));
            }
            "b" => {
                let (b, w, n) = header.ok_or_else(|| parse_err(line, "bag before `s td` header"))?;
                if toks.len() < 2 {
                    return Err(parse_err(line, "missing bag id"));
                }
                let id: usize = num(line, toks[1], "bag id")?;
                if id == 0 || id > b {
                    return Err(parse_err(line, format!("bag id {id} outside 1..={b}")));
                }
                let mut bag = toks[2..]
                    .iter()
                    .map(|t| vertex(line, t, n))
                    .collect::<Result<Vec<_>>>()?;
                bag.sort_unstable();
                bag.dedup();
                if bag.len() > w {
                    return Err(parse_err(line, format!("bag of size {} exceeds declared {w}", bag.len())));
                }
                if bags[id - 1].replace(bag).is_some() {
                    return Err(parse_err(line, format!("bag {id} listed twice")));
                }
            }
            _ => {
                let (b, _, _) = header.ok_or_else(|| parse_err(line, "tree edge before `s td` header"))?;
                if toks.len() != 2 {
                    return Err(parse_err(line, "tree edge takes two bag ids"));
                }
                let i: usize = num(line, toks[0], "bag id")?;
                let j: usize = num(line, toks[1], "bag id")?;
                if i == 0 || i > b || j == 0 || j > b {
                    return Err(parse_err(line, "tree edge references an unknown bag"));
                }
                edges.push((i - 1, j - 1));
            }
        }
    }
    let (_, _, n) = header.ok_or_else(|| parse_err(last_line.max(1), "missing `s td` header"))?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| parse_err(last_line.max(1), format!("bag {} missing", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeDecomposition::new(n, bags, edges))
}

pub fn write_td(td: &TreeDecomposition) -> String {
    let mut out = String::new();
    let max_bag = td.bags().iter().map(Vec::len).max().unwrap_or(0);
    writeln!(out, "s td {} {} {}", td.bags().len(), max_bag, td.vertex_count()).unwrap();
    for (i, bag) in td.bags().iter().enumerate() {
        write!(out, "b {}", i + 1).unwrap();
        for v in bag {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    for &(i, j) in td.edges() {
        writeln!(out, "{} {}", i + 1, j + 1).unwrap();
    }
    out
}

pub fn parse_cnf(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (line, toks) in records(text) {
        last_line = line;
        if toks[0] == "p" {
            expect_len(line, &toks, 4)?;
            if header.is_some() || toks[1] != "cnf" {
                return Err(parse_err(line, "expected a single `p cnf` header"));
            }
            header = Some((num(line, toks[2], "variable count")?, num(line, toks[3], "clause count")?));
            continue;
        }
        let (n, _) = header.ok_or_else(|| parse_err(line, "clause before `p cnf` header"))?;
        for tok in toks {
            let lit: i32 = num(line, tok, "literal")?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(parse_err(line, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > n {
                return Err(parse_err(line, format!("literal {lit} exceeds {n} variables")));
            } else {
                current.push(lit);
            }
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(last_line.max(1), "missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(parse_err(last_line, "clause not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(parse_err(
            last_line.max(1),
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(n, clauses).map_err(|e| match e {
        Error::InvalidArgument(msg) => parse_err(last_line.max(1), msg),
        other => other,
    })
}

pub fn write_cnf(f: &CnfFormula) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", f.variable_count(), f.clauses().len()).unwrap();
    for clause in f.clauses() {
        for lit in clause {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}
