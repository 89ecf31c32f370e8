//! PACE `.gr` / `.td` readers and writers, and terminal lists.

use std::fmt::Write as _;

use super::graph::Graph;
use super::td::{validate_td, TreeDecomposition};
use super::InstanceError;

fn parse_err(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        msg: msg.into(),
    }
}

fn numbers(line: usize, fields: &[&str]) -> Result<Vec<usize>, InstanceError> {
    fields
        .iter()
        .map(|f| f.parse::<usize>().map_err(|_| parse_err(line, format!("expected a number, found `{f}`"))))
        .collect()
}

/// Content lines (1-based number, fields), skipping blanks and `c` comments.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let fields: Vec<&str> = l.split_whitespace().collect();
        match fields.first() {
            None => None,
            Some(&"c") => None,
            Some(_) => Some((i + 1, fields)),
        }
    })
}

/// Parses a PACE `.gr` graph: `p tw <n> <m>` followed by `m` edge lines.
pub fn parse_graph(text: &str) -> Result<Graph, InstanceError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `p tw` header"))?;
    if header.len() != 4 || header[0] != "p" || header[1] != "tw" {
        return Err(parse_err(hl, "header must be `p tw <n> <m>`"));
    }
    let nm = numbers(hl, &header[2..])?;
    let (n, m) = (nm[0], nm[1]);
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::new();
    for (ln, fields) in lines {
        if fields.len() != 2 {
            return Err(parse_err(ln, "edge line must be `<u> <v>`"));
        }
        let uv = numbers(ln, &fields)?;
        let (u, v) = (uv[0], uv[1]);
        if u == 0 || v == 0 || u > n || v > n {
            return Err(parse_err(ln, format!("vertex id out of range 1..={n}")));
        }
        if u == v {
            return Err(parse_err(ln, format!("loop at vertex {u}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(parse_err(ln, format!("duplicate edge {u} {v}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(parse_err(hl, format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::new(n, &edges)
}

/// Parses a PACE `.td` decomposition of `g` and validates it.
pub fn parse_td(text: &str, g: &Graph) -> Result<TreeDecomposition, InstanceError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `s td` line"))?;
    if header.len() != 5 || header[0] != "s" || header[1] != "td" {
        return Err(parse_err(hl, "solution line must be `s td <bags> <width+1> <n>`"));
    }
    let h = numbers(hl, &header[2..])?;
    let (nb, declared, n) = (h[0], h[1], h[2]);
    if n != g.n() {
        return Err(parse_err(hl, format!("decomposition is for {n} vertices, graph has {}", g.n())));
    }
    let mut bags: Vec<Option<Vec<usize>>> = vec![None; nb];
    let mut tree_edges = Vec::new();
    for (ln, fields) in lines {
        if fields[0] == "b" {
            let nums = numbers(ln, &fields[1..])?;
            let id = *nums.first().ok_or_else(|| parse_err(ln, "bag line needs an id"))?;
            if id == 0 || id > nb {
                return Err(parse_err(ln, format!("bag id {id} out of range 1..={nb}")));
            }
            if bags[id - 1].is_some() {
                return Err(parse_err(ln, format!("bag {id} given twice")));
            }
            if let Some(&v) = nums[1..].iter().find(|&&v| v == 0 || v > n) {
                return Err(parse_err(ln, format!("vertex {v} out of range 1..={n}")));
            }
            bags[id - 1] = Some(nums[1..].to_vec());
        } else {
            if fields.len() != 2 {
                return Err(parse_err(ln, "tree edge line must be `<bag> <bag>`"));
            }
            let ab = numbers(ln, &fields)?;
            if ab.iter().any(|&b| b == 0 || b > nb) {
                return Err(parse_err(ln, format!("tree edge refers to a bag outside 1..={nb}")));
            }
            tree_edges.push((ab[0] - 1, ab[1] - 1));
        }
    }
    let found = bags.iter().filter(|b| b.is_some()).count();
    if found != nb {
        return Err(parse_err(hl, format!("header declares {nb} bags, found {found}")));
    }
    let td = TreeDecomposition::new(bags.into_iter().map(Option::unwrap).collect(), tree_edges);
    let actual = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    if actual != declared {
        return Err(parse_err(hl, format!("header declares bag size {declared}, largest bag has {actual}")));
    }
    validate_td(&td, g)?;
    Ok(td)
}

/// Parses a terminal list: one vertex id per line, `#` starts a comment.
pub fn parse_terminals(text: &str, g: &Graph) -> Result<Vec<usize>, InstanceError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: usize = body
            .parse()
            .map_err(|_| parse_err(i + 1, format!("expected a vertex id, found `{body}`")))?;
        if v == 0 || v > g.n() {
            return Err(parse_err(i + 1, format!("terminal {v} out of range 1..={}", g.n())));
        }
        out.push(v);
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(InstanceError::NoTerminals);
    }
    Ok(out)
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = format!("p tw {} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let size = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    let mut s = format!("s td {} {size} {n}\n", td.bags.len());
    for (i, b) in td.bags.iter().enumerate() {
        let _ = write!(s, "b {}", i + 1);
        for v in b {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    for &(a, b) in &td.tree_edges {
        let _ = writeln!(s, "{} {}", a + 1, b + 1);
    }
    s
}

pub fn write_terminals(k: &[usize]) -> String {
    k.iter().map(|v| format!("{v}\n")).collect()
}
