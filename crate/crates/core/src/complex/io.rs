//! `.sc` text format: `v <N>`, then `e <i> <j>` lines, then `t <i> <j> <k>`
//! lines, all sorted. Lines starting with `#` and blank lines are skipped.

use std::fmt::Write as _;
use std::path::Path;

use super::{ComplexError, SimplicialComplex2};

pub fn parse_sc(text: &str) -> Result<SimplicialComplex2, ComplexError> {
    let mut vertex_count: Option<usize> = None;
    let mut edges: Vec<[usize; 2]> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| ComplexError::Parse { line, message };
        let mut fields = trimmed.split_whitespace();
        let tag = fields.next().unwrap_or_default();
        let nums: Vec<usize> = fields
            .map(|f| f.parse::<usize>().map_err(|_| err(format!("bad integer '{f}'"))))
            .collect::<Result<_, _>>()?;
        match (tag, nums.as_slice()) {
            ("v", &[n]) => {
                if vertex_count.is_some() || !edges.is_empty() || !triangles.is_empty() {
                    return Err(err("'v' must be the first record and appear once".into()));
                }
                vertex_count = Some(n);
            }
            ("e", &[i, j]) => {
                if vertex_count.is_none() {
                    return Err(err("'e' before 'v'".into()));
                }
                if !triangles.is_empty() {
                    return Err(err("'e' after a 't' record".into()));
                }
                check_order(edges.last(), &[i, j], line)?;
                edges.push([i, j]);
            }
            ("t", &[i, j, k]) => {
                if vertex_count.is_none() {
                    return Err(err("'t' before 'v'".into()));
                }
                check_order(triangles.last(), &[i, j, k], line)?;
                triangles.push([i, j, k]);
            }
            _ => return Err(err(format!("unrecognised record '{trimmed}'"))),
        }
    }
    let n = vertex_count.ok_or(ComplexError::Parse { line: 0, message: "missing 'v' record".into() })?;
    SimplicialComplex2::new(n, edges, triangles)
}

fn check_order<const K: usize>(
    prev: Option<&[usize; K]>,
    cur: &[usize; K],
    line: usize,
) -> Result<(), ComplexError> {
    if cur.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ComplexError::Parse { line, message: "vertices must be strictly increasing".into() });
    }
    if let Some(p) = prev {
        if p == cur {
            return Err(ComplexError::Parse { line, message: "duplicate record".into() });
        }
        if p > cur {
            return Err(ComplexError::Parse { line, message: "records out of order".into() });
        }
    }
    Ok(())
}

pub fn to_sc_string(k: &SimplicialComplex2) -> String {
    let mut s = String::with_capacity(16 * (k.edge_count() + k.triangle_count() + 1));
    writeln!(s, "v {}", k.vertex_count()).unwrap();
    for [i, j] in k.edges() {
        writeln!(s, "e {i} {j}").unwrap();
    }
    for [i, j, l] in k.triangles() {
        writeln!(s, "t {i} {j} {l}").unwrap();
    }
    s
}

pub fn read_sc(path: impl AsRef<Path>) -> Result<SimplicialComplex2, ComplexError> {
    let text = std::fs::read_to_string(path).map_err(|e| ComplexError::Io(e.to_string()))?;
    parse_sc(&text)
}

pub fn write_sc(path: impl AsRef<Path>, k: &SimplicialComplex2) -> Result<(), ComplexError> {
    std::fs::write(path, to_sc_string(k)).map_err(|e| ComplexError::Io(e.to_string()))
}
