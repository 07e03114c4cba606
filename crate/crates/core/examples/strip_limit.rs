//! Best case (one long strip) and worst case (disconnected triangles):
//! the strip ratio (N + 2) / 3N falls toward 1/3 while a soup of N faces
//! costs (10N - 1) / 9N, above 1.
//!
//! ```bash
//! cargo run --release -p amt-core --example strip_limit
//! ```

use amt_core::prelude::*;

fn main() {
    let config = BenchConfig::default();
    println!(
        "{:>6}  {:>10} {:>10}  {:>10} {:>10}",
        "N", "strip", "(N+2)/3N", "soup", "(10N-1)/9N"
    );
    for n in [1usize, 2, 5, 10, 50, 100, 500, 1000] {
        let strip = run_corpus(&[Synthetic::Strip { faces: n }.into()], &config);
        let soup = run_corpus(&[Synthetic::Soup { faces: n, seed: 0 }.into()], &config);
        let nf = n as f64;
        println!(
            "{n:>6}  {:>10.6} {:>10.6}  {:>10.6} {:>10.6}",
            strip.records[0].ratio,
            (nf + 2.0) / (3.0 * nf),
            soup.records[0].ratio,
            (10.0 * nf - 1.0) / (9.0 * nf)
        );
    }
}
