use std::fmt;

use super::{BidirectedGraph, Dag};
use crate::{Error, Result};

/// Induced subgraph that rules out a Markov-equivalent DAG.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForbiddenSubgraph {
    /// `a <-> b <-> c <-> d`, with no other edges among the four.
    Path([usize; 4]),
    /// `a <-> b <-> c <-> d <-> a`, with no chords.
    Cycle([usize; 4]),
}

impl ForbiddenSubgraph {
    pub fn vertices(&self) -> [usize; 4] {
        match *self {
            ForbiddenSubgraph::Path(v) | ForbiddenSubgraph::Cycle(v) => v,
        }
    }

    /// Renders the witness with labels, e.g. `1 <-> 3 <-> 4 <-> 2`.
    pub fn describe(&self, g: &BidirectedGraph) -> String {
        let v = self.vertices();
        let mut s = v.iter().map(|&i| g.label(i)).collect::<Vec<_>>().join(" <-> ");
        if let ForbiddenSubgraph::Cycle(_) = self {
            s.push_str(" <-> ");
            s.push_str(g.label(v[0]));
        }
        s
    }
}

/// A triple `a - b - c` with `a`, `c` non-adjacent and `b` not a collider.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnshieldedNonCollider {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl UnshieldedNonCollider {
    pub fn describe(&self, d: &Dag) -> String {
        let arrow = |x: usize, y: usize| {
            if d.has_edge(x, y) {
                format!("{} -> {}", d.label(x), d.label(y))
            } else {
                format!("{} <- {}", d.label(x), d.label(y))
            }
        };
        let first = arrow(self.a, self.b);
        let second = if d.has_edge(self.b, self.c) { "->" } else { "<-" };
        format!("{first} {second} {}", d.label(self.c))
    }
}

impl fmt::Display for ForbiddenSubgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self {
            ForbiddenSubgraph::Path(_) => "induced 4-path",
            ForbiddenSubgraph::Cycle(_) => "induced 4-cycle",
        };
        write!(f, "{kind} {:?}", self.vertices())
    }
}

impl BidirectedGraph {
    /// First induced 4-path or 4-cycle over 4-subsets taken in lexicographic
    /// order, or `None` if the graph has neither.
    pub fn dag_equivalence_obstruction(&self) -> Option<ForbiddenSubgraph> {
        let p = self.len();
        for a in 0..p {
            for b in a + 1..p {
                for c in b + 1..p {
                    for d in c + 1..p {
                        if let Some(w) = self.classify_quad([a, b, c, d]) {
                            return Some(w);
                        }
                    }
                }
            }
        }
        None
    }

    /// Whether some DAG on the same vertex set is Markov equivalent.
    pub fn dag_equivalent_exists(&self) -> bool {
        self.dag_equivalence_obstruction().is_none()
    }

    fn classify_quad(&self, quad: [usize; 4]) -> Option<ForbiddenSubgraph> {
        let deg = |k: usize| (0..4).filter(|&m| m != k && self.adjacent(quad[k], quad[m])).count();
        let degrees: [usize; 4] = [deg(0), deg(1), deg(2), deg(3)];
        let edges: usize = degrees.iter().sum::<usize>() / 2;
        // With three edges, degrees {1,1,2,2} force a path; four edges with all
        // degrees 2 force a cycle.
        let is_path = edges == 3 && degrees.iter().filter(|&&d| d == 1).count() == 2
            && degrees.iter().filter(|&&d| d == 2).count() == 2;
        let is_cycle = edges == 4 && degrees.iter().all(|&d| d == 2);
        if !is_path && !is_cycle {
            return None;
        }
        let start = if is_path {
            (0..4).find(|&k| degrees[k] == 1).unwrap()
        } else {
            0
        };
        let mut order = [quad[start]; 4];
        let mut used = [false; 4];
        used[start] = true;
        for slot in 1..4 {
            let prev = order[slot - 1];
            let k = (0..4)
                .find(|&k| !used[k] && self.adjacent(prev, quad[k]))
                .expect("connected quad");
            used[k] = true;
            order[slot] = quad[k];
        }
        Some(if is_path {
            ForbiddenSubgraph::Path(order)
        } else {
            ForbiddenSubgraph::Cycle(order)
        })
    }
}

impl Dag {
    /// First unshielded non-collider `(a, b, c)` with `a < c`, scanning the
    /// middle vertex `b` in index order.
    ///
    /// Only defined for DAGs without latent vertices.
    pub fn bidirected_equivalence_obstruction(&self) -> Result<Option<UnshieldedNonCollider>> {
        if let Some(&u) = self.latent().first() {
            return Err(Error::Input(format!(
                "bi-directed equivalence is defined for fully observed DAGs; `{}` is latent",
                self.label(u)
            )));
        }
        let p = self.len();
        for b in 0..p {
            let nbrs: Vec<usize> = (0..p).filter(|&v| v != b && self.adjacent(v, b)).collect();
            for (x, &a) in nbrs.iter().enumerate() {
                for &c in &nbrs[x + 1..] {
                    if self.adjacent(a, c) {
                        continue;
                    }
                    if !(self.has_edge(a, b) && self.has_edge(c, b)) {
                        return Ok(Some(UnshieldedNonCollider { a, b, c }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Whether some bi-directed graph on the same vertex set is Markov
    /// equivalent: every unshielded triple must be a collider.
    pub fn bidirected_equivalent_exists(&self) -> Result<bool> {
        Ok(self.bidirected_equivalence_obstruction()?.is_none())
    }
}
