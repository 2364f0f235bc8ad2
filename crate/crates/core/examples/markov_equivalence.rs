//! When does a bi-directed graph have a Markov-equivalent DAG, and a DAG a
//! Markov-equivalent bi-directed graph?

use covfit::graph::{parse_graph, ParsedGraph};

const CASES: &[(&str, &str)] = &[
    ("four-path", include_str!("../data/four_path.graph")),
    ("four-cycle", "a <-> b\nb <-> c\nc <-> d\nd <-> a\n"),
    ("three-path", "a <-> b\nb <-> c\n"),
    ("chain DAG", include_str!("../data/chain.dag")),
    ("collider DAG", "a -> b\nc -> b\n"),
    ("fork DAG", "b -> a\nb -> c\n"),
];

fn main() -> covfit::Result<()> {
    for (name, text) in CASES {
        let verdict = match parse_graph(text)? {
            ParsedGraph::Bidirected(g) => match g.dag_equivalence_obstruction() {
                None => "has an equivalent DAG".to_string(),
                Some(w) => format!("no equivalent DAG, induced {}", w.describe(&g)),
            },
            ParsedGraph::Dag(d) => match d.bidirected_equivalence_obstruction()? {
                None => "has an equivalent bi-directed graph".to_string(),
                Some(w) => format!("no equivalent bi-directed graph, unshielded non-collider {}", w.describe(&d)),
            },
        };
        println!("{name:<13} {verdict}");
    }
    Ok(())
}
