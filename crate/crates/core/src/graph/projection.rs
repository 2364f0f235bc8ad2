use super::{BidirectedGraph, Dag};
use crate::{Error, Result};

impl Dag {
    /// The bi-directed graph induced on the observed vertices: `i <-> j`
    /// exactly when `i` and `j` have a common ancestor (each vertex counting
    /// as its own ancestor).
    ///
    /// Every observed vertex must be childless; otherwise the projection
    /// would not preserve the separation relation.
    pub fn latent_projection(&self) -> Result<BidirectedGraph> {
        let observed = self.observed();
        if let Some(&v) = observed.iter().find(|&&v| !self.children(v).is_empty()) {
            return Err(Error::Precondition(format!(
                "observed vertex `{}` has children; latent projection requires childless observed vertices",
                self.label(v)
            )));
        }
        let ancestors: Vec<Vec<bool>> = observed.iter().map(|&v| self.ancestors(v)).collect();
        let vertices = self.vertices().restrict(&observed);
        let mut edges = Vec::new();
        for a in 0..observed.len() {
            for b in a + 1..observed.len() {
                if ancestors[a].iter().zip(&ancestors[b]).any(|(&x, &y)| x && y) {
                    edges.push((a, b));
                }
            }
        }
        BidirectedGraph::from_index_edges(vertices, edges)
    }
}
