//! Seeded benchmark over random five-variable instances.
//!
//! ```text
//! cargo run --release --example random_benchmark -- 200
//! ```

use covfit::cli::report::{BenchRecord, BenchSummary};
use covfit::random::{generate, InstanceConfig};
use covfit::{anderson, icf};
use rayon::prelude::*;

fn main() -> covfit::Result<()> {
    let count: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let cfg = InstanceConfig::default();
    let records: Vec<BenchRecord> = (0..count)
        .into_par_iter()
        .map(|seed| {
            let inst = generate(seed, &cfg)?;
            let i = icf::fit(&inst.summary, &inst.graph, &Default::default())?;
            let a = anderson::fit_anderson(&inst.summary, &inst.graph, &Default::default())?;
            Ok(BenchRecord::new(Some(seed), cfg.p, inst.graph.edge_count(), &i, &a))
        })
        .collect::<covfit::Result<_>>()?;

    for r in records.iter().filter(|r| r.agree != Some(true)) {
        println!("seed {:>4}: icf {} / anderson {}", r.seed.unwrap_or(0), r.icf.status, r.anderson.status);
    }
    let summary = BenchSummary::from_records(&records);
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(())
}
