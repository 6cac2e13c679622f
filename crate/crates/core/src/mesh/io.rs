//! Plain-text `trimesh v1` format.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::TriMesh;
use crate::error::{Error, Result};

pub fn write_trimesh<W: Write>(mesh: &TriMesh, mut w: W) -> std::io::Result<()> {
    writeln!(w, "trimesh v1")?;
    writeln!(w, "v {}", mesh.vertex_count())?;
    for t in mesh.triangles() {
        writeln!(w, "t {} {} {}", t[0], t[1], t[2])?;
    }
    for (e, l) in mesh.edges().iter().zip(mesh.edge_lengths()) {
        writeln!(w, "e {} {} {}", e[0], e[1], l)?;
    }
    for (name, vs) in mesh.labels() {
        write!(w, "l {name}")?;
        for v in vs {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what}")))
}

pub fn read_trimesh<R: BufRead>(r: R) -> Result<TriMesh> {
    let mut lines = r.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == "trimesh v1" => {}
        Some((_, Err(e))) => return Err(e.into()),
        _ => return Err(parse_err(1, "expected header `trimesh v1`")),
    }
    let mut count = None;
    let mut tris = Vec::new();
    let mut lengths = Vec::new();
    let mut labels = BTreeMap::new();
    for (i, line) in lines {
        let line = line?;
        let ln = i + 1;
        let mut tok = line.split_whitespace();
        match tok.next() {
            None => continue,
            Some("v") => count = Some(num::<usize>(tok.next(), ln, "vertex count")?),
            Some("t") => {
                let a = num(tok.next(), ln, "vertex")?;
                let b = num(tok.next(), ln, "vertex")?;
                let c = num(tok.next(), ln, "vertex")?;
                tris.push([a, b, c]);
            }
            Some("e") => {
                let a = num(tok.next(), ln, "vertex")?;
                let b = num(tok.next(), ln, "vertex")?;
                let l: f64 = num(tok.next(), ln, "length")?;
                lengths.push(((a, b), l));
            }
            Some("l") => {
                let name = tok
                    .next()
                    .ok_or_else(|| parse_err(ln, "missing label name"))?
                    .to_string();
                let vs = tok
                    .map(|t| t.parse().map_err(|_| parse_err(ln, "invalid vertex")))
                    .collect::<Result<Vec<usize>>>()?;
                labels.insert(name, vs);
            }
            Some(other) => return Err(parse_err(ln, format!("unknown record `{other}`"))),
        }
        if tok_rest_nonempty(&line) {
            return Err(parse_err(ln, "trailing tokens"));
        }
    }
    let n = count.ok_or_else(|| parse_err(0, "missing `v` line"))?;
    TriMesh::new(n, tris, lengths, labels)
}

fn tok_rest_nonempty(line: &str) -> bool {
    let mut t = line.split_whitespace();
    match t.next() {
        Some("t") => t.count() > 3,
        Some("e") => t.count() > 3,
        Some("v") => t.count() > 1,
        _ => false,
    }
}
