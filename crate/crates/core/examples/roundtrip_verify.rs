//! Round-trip suite over synthetic meshes plus one deliberately broken
//! token stream.
//!
//! ```bash
//! cargo run -p amt-core --example roundtrip_verify
//! ```

use amt_core::bench::{run_roundtrip_suite, VerifyItem};
use amt_core::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut items: Vec<VerifyItem> = Vec::new();
    for n in [1, 2, 7, 64] {
        items.push(MeshSource::from(Synthetic::Strip { faces: n }).into());
    }
    for seed in 0..8 {
        items.push(MeshSource::from(Synthetic::RandomTriangulation { cells: 6, seed }).into());
    }
    items.push(MeshSource::from(Synthetic::Icosphere { subdivisions: 2 }).into());

    // a valid stream with one strip vertex chopped off
    let config = PipelineConfig::default();
    let mesh = prepare(&Synthetic::Strip { faces: 4 }.generate()?, &config);
    let good = encode_amt(&tokenize(&mesh)?, mesh.vertices(), config.vocabulary())?;
    let n = good.len();
    let mut ids = good.ids().to_vec();
    let mut types = good.types().to_vec();
    ids.remove(n - 2);
    types.remove(n - 2);
    items.push(VerifyItem::Tokens {
        label: "strip n=4 minus one coordinate".into(),
        tokens: TokenSequence::new(good.bins(), ids, types)?,
    });

    let report = run_roundtrip_suite(&items, &BenchConfig::default());
    for case in &report.cases {
        println!("{:?}  {}", case.status, case.source);
        if let Some(detail) = &case.detail {
            println!("        {detail}");
        }
    }
    println!("passed {} failed {}", report.passed, report.failed);
    Ok(())
}
