//! Text graph files.
//!
//! ```text
//! # comment
//! V E
//! u v        (E lines, 0-based vertices)
//! B: u1 u2 … (optional; default is every vertex)
//! ```

use std::path::Path;

use f2orbits_core::lattice::{Graph, LatticeSpec};

#[derive(Debug, thiserror::Error)]
pub enum GraphFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Invalid(#[from] f2orbits_core::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: Graph,
    pub basis: Option<Vec<usize>>,
}

impl GraphFile {
    pub fn lattice(&self) -> Result<LatticeSpec, f2orbits_core::Error> {
        match &self.basis {
            Some(b) => LatticeSpec::build(self.graph.clone(), b),
            None => LatticeSpec::build_full(self.graph.clone()),
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> GraphFileError {
    GraphFileError::Syntax {
        line,
        message: message.into(),
    }
}

fn numbers(line: usize, text: &str) -> Result<Vec<usize>, GraphFileError> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| syntax(line, format!("expected a vertex number, found {t:?}")))
        })
        .collect()
}

pub fn parse(text: &str) -> Result<GraphFile, GraphFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "missing `V E` header"))?;
    let header = numbers(hline, header)?;
    let [v, e] = header[..] else {
        return Err(syntax(hline, "header must be `V E`"));
    };

    let mut edges = Vec::with_capacity(e);
    let mut basis = None;
    for (line, text) in lines {
        if let Some(rest) = text.strip_prefix("B:") {
            if basis.is_some() {
                return Err(syntax(line, "more than one `B:` line"));
            }
            basis = Some(numbers(line, rest)?);
            continue;
        }
        if basis.is_some() {
            return Err(syntax(line, "edges must come before the `B:` line"));
        }
        match numbers(line, text)?[..] {
            [a, b] => edges.push((a, b)),
            _ => return Err(syntax(line, "an edge line must hold two vertices")),
        }
    }
    if edges.len() != e {
        return Err(syntax(
            hline,
            format!("header announces {e} edges, found {}", edges.len()),
        ));
    }
    let graph = Graph::new(v, &edges)?;
    if let Some(b) = &basis {
        if let Some(&bad) = b.iter().find(|&&u| u >= v) {
            return Err(f2orbits_core::Error::InvalidGraph(format!(
                "basis vertex {bad} is out of range for {v} vertices"
            ))
            .into());
        }
    }
    Ok(GraphFile { graph, basis })
}

pub fn read(path: &Path) -> Result<GraphFile, GraphFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| GraphFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

/// Writes `graph` in the file format, with a `B:` line when `basis` is given.
pub fn format(graph: &Graph, basis: Option<&[usize]>) -> String {
    let mut out = format!("{} {}\n", graph.vertex_count(), graph.edge_count());
    for (u, v) in graph.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    if let Some(b) = basis {
        let list: Vec<String> = b.iter().map(usize::to_string).collect();
        out.push_str(&format!("B: {}\n", list.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_basis() {
        let f = parse("# triangle\n3 3\n0 1\n1 2 # last two\n0 2\nB: 0 1\n").unwrap();
        assert_eq!(f.graph, Graph::complete(3));
        assert_eq!(f.basis, Some(vec![0, 1]));
        let f = parse("3 3\n0 1\n1 2\n0 2\n").unwrap();
        assert_eq!(f.basis, None);
    }

    #[test]
    fn rejects_malformed_files() {
        for bad in [
            "",
            "3\n",
            "3 2\n0 1\n",
            "3 1\n0 x\n",
            "3 1\n0 1 2\n",
            "3 1\n0 3\n",
            "3 1\n1 1\n",
            "3 1\n0 1\nB: 5\n",
            "3 1\nB: 0\n0 1\n",
        ] {
            assert!(parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn format_round_trips() {
        let g = Graph::hex(5).unwrap();
        let text = format(&g, Some(&[0, 2]));
        let f = parse(&text).unwrap();
        assert_eq!(f.graph.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        assert_eq!(f.basis, Some(vec![0, 2]));
    }
}
