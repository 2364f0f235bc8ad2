//! Bi-directed graphs, DAGs with latent vertices, and their separation and
//! equivalence queries.
//!
//! Vertices carry case-sensitive string labels. The order in which they are
//! declared fixes the index order used everywhere else in the crate, in
//! particular the row/column order of covariance matrices.

use std::collections::HashMap;
use std::fmt;

use crate::{Error, Result};

mod equivalence;
mod projection;
mod separation;
mod text;

pub use equivalence::{ForbiddenSubgraph, UnshieldedNonCollider};
pub use text::{parse_graph, ParsedGraph};

/// Ordered set of distinct vertex labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertices {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vertices {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Vertices {
            labels: Vec::new(),
            index: HashMap::new(),
        };
        for label in labels {
            let label = label.into();
            if label.is_empty() {
                return Err(Error::Input("empty vertex label".into()));
            }
            if out.index.contains_key(&label) {
                return Err(Error::Input(format!("duplicate vertex label `{label}`")));
            }
            out.index.insert(label.clone(), out.labels.len());
            out.labels.push(label);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::Input(format!("unknown vertex `{label}`")))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    fn resolve<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    pub(crate) fn restrict(&self, keep: &[usize]) -> Vertices {
        Vertices::new(keep.iter().map(|&i| self.labels[i].clone()))
            .expect("subset of distinct labels")
    }
}

/// Graph whose every edge is bi-directed, `i <-> j`.
///
/// The adjacency is stored densely; the intended scale is at most a few
/// hundred vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidirectedGraph {
    vertices: Vertices,
    adj: Vec<bool>,
}

impl BidirectedGraph {
    /// Builds a graph from labels and label pairs. Self-loops, duplicate
    /// edges and undeclared endpoints are rejected.
    pub fn new<S, A, B>(labels: &[S], edges: &[(A, B)]) -> Result<Self>
    where
        S: AsRef<str>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let vertices = Vertices::new(labels.iter().map(|s| s.as_ref().to_string()))?;
        let mut g = BidirectedGraph::empty_on(vertices);
        for (a, b) in edges {
            let i = g.vertices.index_of(a.as_ref())?;
            let j = g.vertices.index_of(b.as_ref())?;
            g.insert_checked(i, j)?;
        }
        Ok(g)
    }

    pub fn empty_on(vertices: Vertices) -> Self {
        let p = vertices.len();
        BidirectedGraph {
            vertices,
            adj: vec![false; p * p],
        }
    }

    pub fn complete_on(vertices: Vertices) -> Self {
        let p = vertices.len();
        let mut adj = vec![true; p * p];
        for i in 0..p {
            adj[i * p + i] = false;
        }
        BidirectedGraph { vertices, adj }
    }

    /// Builds a graph from index pairs; duplicates are merged.
    pub fn from_index_edges<I>(vertices: Vertices, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = BidirectedGraph::empty_on(vertices);
        let p = g.len();
        for (i, j) in edges {
            if i >= p || j >= p {
                return Err(Error::Input(format!("edge ({i},{j}) out of range for {p} vertices")));
            }
            if i == j {
                return Err(Error::Input(format!("self-loop at `{}`", g.label(i))));
            }
            g.set(i, j);
        }
        Ok(g)
    }

    fn insert_checked(&mut self, i: usize, j: usize) -> Result<()> {
        if i == j {
            return Err(Error::Input(format!("self-loop at `{}`", self.label(i))));
        }
        if self.adjacent(i, j) {
            return Err(Error::Input(format!(
                "duplicate edge `{}` <-> `{}`",
                self.label(i),
                self.label(j)
            )));
        }
        self.set(i, j);
        Ok(())
    }

    fn set(&mut self, i: usize, j: usize) {
        let p = self.len();
        self.adj[i * p + j] = true;
        self.adj[j * p + i] = true;
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &Vertices {
        &self.vertices
    }

    pub fn labels(&self) -> &[String] {
        self.vertices.labels()
    }

    pub fn label(&self, i: usize) -> &str {
        self.vertices.label(i)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.vertices.index_of(label)
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.len() + j]
    }

    /// Edges as index pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let p = self.len();
        let mut out = Vec::new();
        for i in 0..p {
            for j in i + 1..p {
                if self.adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&e| e).count() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.len()).filter(|&j| self.adjacent(i, j)).count()
    }

    /// `sp(i)`: vertices joined to `i` by an edge, in index order.
    pub fn spouse_indices(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.adjacent(i, j)).collect()
    }

    /// `nsp(i) = V \ (sp(i) ∪ {i})`, in index order.
    pub fn nonspouse_indices(&self, i: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| j != i && !self.adjacent(i, j))
            .collect()
    }

    pub fn spouses(&self, label: &str) -> Result<Vec<&str>> {
        let i = self.index_of(label)?;
        Ok(self.spouse_indices(i).into_iter().map(|j| self.label(j)).collect())
    }

    pub fn nonspouses(&self, label: &str) -> Result<Vec<&str>> {
        let i = self.index_of(label)?;
        Ok(self
            .nonspouse_indices(i)
            .into_iter()
            .map(|j| self.label(j))
            .collect())
    }

    /// Pairs `{i, j}` that are not adjacent; each encodes the marginal
    /// independence of the two variables. Lexicographic in vertex order.
    pub fn pairwise_independences(&self) -> Vec<(usize, usize)> {
        let p = self.len();
        let mut out = Vec::with_capacity(p * p.saturating_sub(1) / 2);
        for i in 0..p {
            for j in i + 1..p {
                if !self.adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The free index set `F = {(i, j) : i = j or i <-> j}` as pairs with
    /// `i <= j`, in lexicographic order.
    pub fn free_pairs(&self) -> Vec<(usize, usize)> {
        let p = self.len();
        let mut out = Vec::new();
        for i in 0..p {
            out.push((i, i));
            for j in i + 1..p {
                if self.adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The same graph with vertices listed in the order `perm`, where
    /// `perm[k]` is the old index of the new vertex `k`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let p = self.len();
        let mut seen = vec![false; p];
        if perm.len() != p || perm.iter().any(|&k| k >= p || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::Input("not a permutation of the vertex indices".into()));
        }
        let vertices = self.vertices.restrict(perm);
        let mut g = BidirectedGraph::empty_on(vertices);
        for a in 0..p {
            for b in a + 1..p {
                if self.adjacent(perm[a], perm[b]) {
                    g.set(a, b);
                }
            }
        }
        Ok(g)
    }
}

impl fmt::Display for BidirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Directed acyclic graph over observed and latent vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    vertices: Vertices,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    latent: Vec<bool>,
}

impl Dag {
    /// Builds a DAG; every vertex not listed in `latent` is observed.
    pub fn new<S, A, B, L>(labels: &[S], edges: &[(A, B)], latent: &[L]) -> Result<Self>
    where
        S: AsRef<str>,
        A: AsRef<str>,
        B: AsRef<str>,
        L: AsRef<str>,
    {
        let vertices = Vertices::new(labels.iter().map(|s| s.as_ref().to_string()))?;
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            idx_edges.push((vertices.index_of(a.as_ref())?, vertices.index_of(b.as_ref())?));
        }
        let latent = vertices.resolve(latent)?;
        Dag::from_index_edges(vertices, idx_edges, &latent)
    }

    pub fn from_index_edges<I>(vertices: Vertices, edges: I, latent: &[usize]) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let p = vertices.len();
        let mut parents = vec![Vec::new(); p];
        let mut children = vec![Vec::new(); p];
        for (a, b) in edges {
            if a >= p || b >= p {
                return Err(Error::Input(format!("edge ({a},{b}) out of range for {p} vertices")));
            }
            if a == b {
                return Err(Error::Input(format!("self-loop at `{}`", vertices.label(a))));
            }
            if children[a].contains(&b) {
                return Err(Error::Input(format!(
                    "duplicate edge `{}` -> `{}`",
                    vertices.label(a),
                    vertices.label(b)
                )));
            }
            children[a].push(b);
            parents[b].push(a);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let mut is_latent = vec![false; p];
        for &u in latent {
            if u >= p {
                return Err(Error::Input(format!("latent index {u} out of range")));
            }
            is_latent[u] = true;
        }
        let dag = Dag {
            vertices,
            parents,
            children,
            latent: is_latent,
        };
        if let Some(v) = dag.find_cycle_vertex() {
            return Err(Error::Input(format!(
                "directed cycle through `{}`",
                dag.vertices.label(v)
            )));
        }
        Ok(dag)
    }

    fn find_cycle_vertex(&self) -> Option<usize> {
        let p = self.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut stack: Vec<usize> = (0..p).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = stack.pop() {
            removed += 1;
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    stack.push(c);
                }
            }
        }
        if removed == p {
            None
        } else {
            (0..p).find(|&v| indeg[v] > 0)
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &Vertices {
        &self.vertices
    }

    pub fn label(&self, i: usize) -> &str {
        self.vertices.label(i)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.vertices.index_of(label)
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.children[from].binary_search(&to).is_ok()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.has_edge(i, j) || self.has_edge(j, i)
    }

    /// Directed edges `(from, to)` sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(a, cs)| cs.iter().map(move |&b| (a, b)))
            .collect()
    }

    pub fn is_latent(&self, i: usize) -> bool {
        self.latent[i]
    }

    pub fn observed(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.latent[i]).collect()
    }

    pub fn latent(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.latent[i]).collect()
    }

    /// `an(i)`, including `i` itself, as a membership mask.
    pub fn ancestors(&self, i: usize) -> Vec<bool> {
        self.closure(&[i], |v| &self.parents[v])
    }

    /// Union of `an(v)` over `set`, including the set itself.
    pub fn ancestors_of_set(&self, set: &[usize]) -> Vec<bool> {
        self.closure(set, |v| &self.parents[v])
    }

    pub fn descendants(&self, i: usize) -> Vec<bool> {
        self.closure(&[i], |v| &self.children[v])
    }

    fn closure<'a, F>(&'a self, start: &[usize], next: F) -> Vec<bool>
    where
        F: Fn(usize) -> &'a [usize],
    {
        let mut mark = vec![false; self.len()];
        let mut stack = Vec::new();
        for &s in start {
            if !mark[s] {
                mark[s] = true;
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            for &w in next(v) {
                if !mark[w] {
                    mark[w] = true;
                    stack.push(w);
                }
            }
        }
        mark
    }
}

impl fmt::Display for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A query "are `a` and `b` separated given `given`?" over vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationQuery {
    a: Vec<usize>,
    b: Vec<usize>,
    given: Vec<usize>,
}

impl SeparationQuery {
    /// Resolves labels against `vertices`. `a` and `b` must be non-empty and
    /// the three sets pairwise disjoint.
    pub fn new<S: AsRef<str>>(vertices: &Vertices, a: &[S], b: &[S], given: &[S]) -> Result<Self> {
        let resolve = |set: &[S]| {
            vertices
                .resolve(set)
                .map_err(|e| match e {
                    Error::Input(msg) => Error::Query(msg),
                    other => other,
                })
        };
        Self::from_indices(vertices.len(), resolve(a)?, resolve(b)?, resolve(given)?)
    }

    pub fn from_indices(p: usize, a: Vec<usize>, b: Vec<usize>, given: Vec<usize>) -> Result<Self> {
        let norm = |mut v: Vec<usize>| {
            v.sort_unstable();
            v.dedup();
            v
        };
        let (a, b, given) = (norm(a), norm(b), norm(given));
        if a.is_empty() || b.is_empty() {
            return Err(Error::Query("both separated sets must be non-empty".into()));
        }
        if let Some(&v) = a.iter().chain(&b).chain(&given).find(|&&v| v >= p) {
            return Err(Error::Query(format!("vertex index {v} out of range for {p} vertices")));
        }
        let overlap = |x: &[usize], y: &[usize]| x.iter().any(|v| y.binary_search(v).is_ok());
        if overlap(&a, &b) || overlap(&a, &given) || overlap(&b, &given) {
            return Err(Error::Query("query sets must be pairwise disjoint".into()));
        }
        Ok(SeparationQuery { a, b, given })
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn given(&self) -> &[usize] {
        &self.given
    }

    /// The same query with `a` and `b` exchanged.
    pub fn swapped(&self) -> Self {
        SeparationQuery {
            a: self.b.clone(),
            b: self.a.clone(),
            given: self.given.clone(),
        }
    }

    fn check_range(&self, p: usize) -> Result<()> {
        match self.a.iter().chain(&self.b).chain(&self.given).find(|&&v| v >= p) {
            Some(v) => Err(Error::Query(format!("vertex index {v} out of range for {p} vertices"))),
            None => Ok(()),
        }
    }
}
