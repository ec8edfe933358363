//! Graph file format.
//!
//! Line 1: `n d m`. Then exactly m lines `u v` in lexicographic order with
//! u < v. Single space separators, every line terminated by one `\n`,
//! nothing after the last edge. Readers reject anything non-canonical, so a
//! file is bit-for-bit reproducible from the graph it encodes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{RegularGraph, Vertex};
use crate::error::{Error, Result};

pub fn write_graph<W: Write>(g: &RegularGraph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{} {} {}", g.n(), g.d(), g.m())?;
    for &(u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn save_graph(g: &RegularGraph, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_graph(g, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_graph<R: BufRead>(mut r: R) -> Result<RegularGraph> {
    let header = read_line(&mut r, 1)?.ok_or_else(|| fail(1, "missing header"))?;
    let fields = split_canonical(&header, 1)?;
    let [n, d, m] = fields[..] else {
        return Err(fail(1, "header must be `n d m`"));
    };

    let mut edges: Vec<(Vertex, Vertex)> = Vec::with_capacity(m as usize);
    let mut prev: Option<(Vertex, Vertex)> = None;
    for i in 0..m as usize {
        let line_no = i + 2;
        let line = read_line(&mut r, line_no)?
            .ok_or_else(|| fail(line_no, "fewer edge lines than the header promises"))?;
        let fields = split_canonical(&line, line_no)?;
        let [u, v] = fields[..] else {
            return Err(fail(line_no, "edge line must be `u v`"));
        };
        if u >= v {
            return Err(fail(line_no, "edge endpoints must satisfy u < v"));
        }
        let (u, v) = (to_vertex(u, line_no)?, to_vertex(v, line_no)?);
        if prev.is_some_and(|p| p >= (u, v)) {
            return Err(fail(line_no, "edges out of lexicographic order"));
        }
        prev = Some((u, v));
        edges.push((u, v));
    }
    if read_line(&mut r, m as usize + 2)?.is_some() {
        return Err(fail(m as usize + 2, "trailing data after the edge list"));
    }

    let g = RegularGraph::from_edges(n as usize, d as usize, edges)?;
    if g.m() as u64 != m {
        return Err(fail(1, "edge count disagrees with n*d/2"));
    }
    Ok(g)
}

pub fn load_graph(path: &Path) -> Result<RegularGraph> {
    read_graph(BufReader::new(File::open(path)?))
}

/// Next line without its single `\n` terminator; None at EOF.
fn read_line<R: BufRead>(r: &mut R, line_no: usize) -> Result<Option<String>> {
    let mut buf = String::new();
    if r.read_line(&mut buf)? == 0 {
        return Ok(None);
    }
    let Some(line) = buf.strip_suffix('\n') else {
        return Err(fail(line_no, "line not terminated by \\n"));
    };
    Ok(Some(line.to_string()))
}

/// Splits on single spaces and parses each token as a canonically written
/// non-negative integer (no leading zeros, signs, or stray whitespace).
fn split_canonical(line: &str, line_no: usize) -> Result<Vec<u64>> {
    line.split(' ')
        .map(|tok| {
            let ok = !tok.is_empty()
                && tok.bytes().all(|b| b.is_ascii_digit())
                && (tok == "0" || !tok.starts_with('0'));
            if !ok {
                return Err(fail(line_no, &format!("malformed integer `{tok}`")));
            }
            tok.parse::<u64>()
                .map_err(|_| fail(line_no, &format!("integer `{tok}` out of range")))
        })
        .collect()
}

fn to_vertex(x: u64, line_no: usize) -> Result<Vertex> {
    Vertex::try_from(x).map_err(|_| fail(line_no, &format!("vertex id {x} too large")))
}

fn fail(line: usize, msg: &str) -> Error {
    Error::GraphFormat {
        line,
        msg: msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> RegularGraph {
        RegularGraph::from_edges(4, 3, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .unwrap()
    }

    fn render(g: &RegularGraph) -> String {
        let mut buf = Vec::new();
        write_graph(g, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn k4_serialization_is_exact() {
        assert_eq!(render(&k4()), "4 3 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    }

    #[test]
    fn roundtrip() {
        let g = k4();
        let text = render(&g);
        let h = read_graph(text.as_bytes()).unwrap();
        assert_eq!(render(&h), text);
        assert_eq!(h.neighbors(0), g.neighbors(0));
    }

    #[test]
    fn rejects_non_canonical_input() {
        let good = "4 3 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";
        assert!(read_graph(good.as_bytes()).is_ok());

        let cases: &[&str] = &[
            "4 3 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3",      // missing final newline
            "4 3 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n\n",  // trailing blank line
            "4 3 6\n0 1\n0 2\n0 3\n1 2\n2 3\n1 3\n",    // out of order
            "4 3 6\n0 1\n0 2\n0 3\n1 2\n1 3\n3 2\n",    // u >= v
            "4 3 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2  3\n",   // double space
            "4 3 6\n0 1\n0 2\n0 3\n1 2\n1 3\n02 3\n",   // leading zero
            "4 3 6\n0 1\n0 2\n0 3\n1 2\n1 3\n 2 3\n",   // leading space
            "4 3 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3 \n",   // trailing space
            "4 3 5\n0 1\n0 2\n0 3\n1 2\n1 3\n",         // header inconsistent with d
            "4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n",      // short header
            "4 3 6\n0 1\n0 2\n0 3\n1 2\n1 3\n",         // truncated edge list
        ];
        for case in cases {
            assert!(read_graph(case.as_bytes()).is_err(), "accepted: {case:?}");
        }
    }

    #[test]
    fn rejects_windows_line_endings() {
        let text = "4 3 6\r\n0 1\r\n0 2\r\n0 3\r\n1 2\r\n1 3\r\n2 3\r\n";
        assert!(read_graph(text.as_bytes()).is_err());
    }
}
