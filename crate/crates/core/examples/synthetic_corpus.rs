//! Runs a synthetic corpus through the bench and prints per-mesh ratios.
//!
//! ```bash
//! cargo run --release -p amt-core --example synthetic_corpus
//! ```

use amt_core::prelude::*;

fn main() {
    let mut sources: Vec<MeshSource> = Vec::new();
    for s in 1..=3 {
        sources.push(Synthetic::Icosphere { subdivisions: s }.into());
    }
    for n in [10, 16, 20, 28] {
        sources.push(
            Synthetic::Grid {
                width: n,
                height: n,
            }
            .into(),
        );
    }
    for n in [50, 200, 1000] {
        sources.push(Synthetic::Strip { faces: n }.into());
    }
    for seed in 0..4 {
        sources.push(Synthetic::RandomTriangulation { cells: 12, seed }.into());
    }
    sources.push(Synthetic::Fan { faces: 40 }.into());
    sources.push(Synthetic::Soup { faces: 50, seed: 1 }.into());

    let report = run_corpus(&sources, &BenchConfig::default());
    println!(
        "{:<32} {:>6} {:>7} {:>7} {:>8} {:>7}",
        "source", "faces", "amt", "naive", "ratio", "restarts"
    );
    for r in &report.records {
        println!(
            "{:<32} {:>6} {:>7} {:>7} {:>8.4} {:>7}",
            r.source, r.faces, r.amt_len, r.naive_len, r.ratio, r.restarts
        );
    }
    println!(
        "macro ratio {:.4}  micro ratio {:.4}  over cap {}",
        report.macro_avg_ratio.unwrap_or(f64::NAN),
        report.micro_avg_ratio.unwrap_or(f64::NAN),
        report.totals.over_face_cap
    );
}
