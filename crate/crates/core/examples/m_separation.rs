//! m-separation queries on the bi-directed four-path 1 <-> 3 <-> 4 <-> 2.

use covfit::{BidirectedGraph, SeparationQuery};

fn show(g: &BidirectedGraph, a: &[&str], b: &[&str], given: &[&str]) -> covfit::Result<()> {
    let q = SeparationQuery::new(g.vertices(), a, b, given)?;
    let verdict = match g.m_connecting_path(&q)? {
        None => "separated".to_string(),
        Some(path) => {
            let labels: Vec<&str> = path.iter().map(|&v| g.label(v)).collect();
            format!("connected via {}", labels.join(" <-> "))
        }
    };
    println!("{{{}}} vs {{{}}} given {{{}}}: {verdict}", a.join(","), b.join(","), given.join(","));
    Ok(())
}

fn main() -> covfit::Result<()> {
    let g = BidirectedGraph::parse(include_str!("../data/four_path.graph"))?;

    // Paths only pass through conditioned vertices, so 1 and 2 are
    // connected given both middle vertices and separated otherwise.
    show(&g, &["1"], &["2"], &["3", "4"])?;
    show(&g, &["1"], &["2"], &["3"])?;
    show(&g, &["1"], &["2"], &["4"])?;
    show(&g, &["1"], &["2"], &[])?;
    show(&g, &["1"], &["2", "4"], &[])?;
    show(&g, &["1"], &["4"], &["3"])?;

    println!("\npairwise independences (zero covariances):");
    for (i, j) in g.pairwise_independences() {
        println!("  {} _||_ {}", g.label(i), g.label(j));
    }
    Ok(())
}
