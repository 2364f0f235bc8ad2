//! Line-oriented graph text format.
//!
//! ```text
//! # comment
//! vertex W
//! W <-> X        # bi-directed edge
//! u -> W         # directed edge
//! latent u
//! ```
//!
//! Edge endpoints that have not been declared with `vertex` are declared
//! implicitly on first mention. A file may hold bi-directed or directed
//! edges, never both.

use std::str::FromStr;

use super::{BidirectedGraph, Dag, Vertices};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedGraph {
    Bidirected(BidirectedGraph),
    Dag(Dag),
}

#[derive(Debug, Default)]
struct RawGraph {
    labels: Vec<String>,
    bidirected: Vec<(usize, usize, usize)>,
    directed: Vec<(usize, usize, usize)>,
    latent: Vec<(usize, usize)>,
}

impl RawGraph {
    fn declare(&mut self, label: &str, line: usize) -> Result<usize> {
        if label.is_empty() || label.contains(char::is_whitespace) || label.contains("->") {
            return Err(Error::Input(format!("line {line}: invalid vertex label `{label}`")));
        }
        Ok(match self.labels.iter().position(|l| l == label) {
            Some(i) => i,
            None => {
                self.labels.push(label.to_string());
                self.labels.len() - 1
            }
        })
    }

    fn parse(text: &str) -> Result<Self> {
        let mut raw = RawGraph::default();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some((a, b)) = content.split_once("<->") {
                let (a, b) = (raw.declare(a.trim(), line_no)?, raw.declare(b.trim(), line_no)?);
                raw.bidirected.push((a, b, line_no));
            } else if let Some((a, b)) = content.split_once("->") {
                let (a, b) = (raw.declare(a.trim(), line_no)?, raw.declare(b.trim(), line_no)?);
                raw.directed.push((a, b, line_no));
            } else {
                let tokens: Vec<&str> = content.split_whitespace().collect();
                match tokens.as_slice() {
                    ["vertex", label] => {
                        raw.declare(label, line_no)?;
                    }
                    ["latent", label] => {
                        let v = raw.declare(label, line_no)?;
                        raw.latent.push((v, line_no));
                    }
                    _ => {
                        return Err(Error::Input(format!(
                            "line {line_no}: expected `vertex <label>`, `latent <label>`, `<a> <-> <b>` or `<a> -> <b>`, found `{content}`"
                        )))
                    }
                }
            }
        }
        Ok(raw)
    }

    fn into_bidirected(self) -> Result<BidirectedGraph> {
        if let Some(&(_, _, line)) = self.directed.first() {
            return Err(Error::Input(format!(
                "line {line}: directed edge in a bi-directed graph file"
            )));
        }
        if let Some(&(_, line)) = self.latent.first() {
            return Err(Error::Input(format!(
                "line {line}: latent marker in a bi-directed graph file"
            )));
        }
        let vertices = Vertices::new(self.labels)?;
        let mut g = BidirectedGraph::empty_on(vertices);
        for (a, b, line) in self.bidirected {
            g.insert_checked(a, b)
                .map_err(|e| Error::Input(format!("line {line}: {}", strip_kind(&e))))?;
        }
        Ok(g)
    }

    fn into_dag(self) -> Result<Dag> {
        if let Some(&(_, _, line)) = self.bidirected.first() {
            return Err(Error::Input(format!(
                "line {line}: bi-directed edge in a DAG file"
            )));
        }
        let vertices = Vertices::new(self.labels)?;
        let latent: Vec<usize> = self.latent.iter().map(|&(v, _)| v).collect();
        Dag::from_index_edges(vertices, self.directed.iter().map(|&(a, b, _)| (a, b)), &latent)
    }
}

fn strip_kind(e: &Error) -> String {
    match e {
        Error::Input(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Parses either kind of graph. A file with directed edges or latent
/// markers is a DAG; anything else, including an edgeless file, is a
/// bi-directed graph.
pub fn parse_graph(text: &str) -> Result<ParsedGraph> {
    let raw = RawGraph::parse(text)?;
    if !raw.directed.is_empty() && !raw.bidirected.is_empty() {
        let line = raw.directed[0].2.max(raw.bidirected[0].2);
        return Err(Error::Input(format!(
            "line {line}: file mixes directed and bi-directed edges"
        )));
    }
    if !raw.directed.is_empty() || !raw.latent.is_empty() {
        raw.into_dag().map(ParsedGraph::Dag)
    } else {
        raw.into_bidirected().map(ParsedGraph::Bidirected)
    }
}

impl BidirectedGraph {
    pub fn parse(text: &str) -> Result<Self> {
        RawGraph::parse(text)?.into_bidirected()
    }

    /// Canonical text: all `vertex` lines in index order, then edges in
    /// lexicographic order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for label in self.labels() {
            out.push_str(&format!("vertex {label}\n"));
        }
        for (i, j) in self.edges() {
            out.push_str(&format!("{} <-> {}\n", self.label(i), self.label(j)));
        }
        out
    }
}

impl FromStr for BidirectedGraph {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BidirectedGraph::parse(s)
    }
}

impl Dag {
    pub fn parse(text: &str) -> Result<Self> {
        RawGraph::parse(text)?.into_dag()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            out.push_str(&format!("vertex {}\n", self.label(i)));
        }
        for i in self.latent() {
            out.push_str(&format!("latent {}\n", self.label(i)));
        }
        for (a, b) in self.edges() {
            out.push_str(&format!("{} -> {}\n", self.label(a), self.label(b)));
        }
        out
    }
}

impl FromStr for Dag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Dag::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn parses_bidirected_file() {
        let text = "# four variables\nvertex 1\nvertex 2\nvertex 3\nvertex 4\n1 <-> 3\n3<->4  # inline\n\n2 <-> 4\n";
        assert_eq!(BidirectedGraph::parse(text).unwrap(), four_path());
    }

    #[test]
    fn parses_dag_file_with_latents() {
        let text = "vertex 1\nvertex 2\nvertex 3\nvertex 4\n\
                    latent u13\nlatent u34\nlatent u24\n\
                    u13 -> 1\nu13 -> 3\nu34 -> 3\nu34 -> 4\nu24 -> 2\nu24 -> 4\n";
        match parse_graph(text).unwrap() {
            ParsedGraph::Dag(d) => assert_eq!(d, four_path_dag()),
            other => panic!("expected DAG, got {other:?}"),
        }
    }

    #[test]
    fn implicit_declaration_follows_first_mention() {
        let g = BidirectedGraph::parse("b <-> a\nvertex c\n").unwrap();
        assert_eq!(g.labels(), ["b", "a", "c"]);
    }

    #[test]
    fn text_round_trip() {
        let g = four_path();
        assert_eq!(BidirectedGraph::parse(&g.to_text()).unwrap(), g);
        let d = four_path_dag();
        assert_eq!(Dag::parse(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn rejects_mixed_and_malformed_files() {
        assert!(parse_graph("a <-> b\nb -> c\n").is_err());
        assert!(BidirectedGraph::parse("a -> b\n").is_err());
        assert!(BidirectedGraph::parse("latent a\n").is_err());
        let err = BidirectedGraph::parse("a <-> b\nb <-> a\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = BidirectedGraph::parse("a b c\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn edgeless_file_is_bidirected() {
        assert!(matches!(
            parse_graph("vertex a\nvertex b\n").unwrap(),
            ParsedGraph::Bidirected(_)
        ));
        assert!(Dag::parse("vertex a\nvertex b\n").unwrap().edges().is_empty());
    }
}
