//! OBJ text in, canonical tokens out, and back to OBJ.
//!
//! ```bash
//! cargo run -p amt-core --example obj_pipeline [mesh.obj]
//! ```

use std::io::BufReader;

use amt_core::prelude::*;

const PYRAMID: &str = "\
# square pyramid, y up
v -0.5 0 -0.5
v  0.5 0 -0.5
v  0.5 0  0.5
v -0.5 0  0.5
v  0   0.8 0
vn 0 1 0
f 1 2 3 4
f 1 2 5
f 2 3 5
f 3 4 5
f 4 1 5
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (raw, report) = match std::env::args().nth(1) {
        Some(path) => parse_obj(BufReader::new(std::fs::File::open(path)?))?,
        None => parse_obj(PYRAMID.as_bytes())?,
    };
    println!(
        "parsed {} vertices, {} faces (ignored records: {:?}, quads split: {})",
        raw.vertices.len(),
        raw.faces.len(),
        report.ignored_records,
        report.polygons_triangulated
    );

    let config = PipelineConfig {
        quantization: QuantizationSpec::new(128, BboxMode::PerMeshTight),
        up_axis: UpAxis::Y,
    };
    let grid = quantize(&raw, &config.quantization);
    println!("applied box {:?}", grid.bbox);
    let mesh = canonicalize(&grid, config.up_axis);
    for (i, v) in mesh.vertices().iter().enumerate() {
        println!("  v{i} (vertical, depth, x) = {v:?}");
    }

    let seq = tokenize(&mesh)?;
    println!("amt sequence: {seq}");

    let rebuilt = detokenize(&seq, mesh.vertices())?;
    assert_eq!(rebuilt, mesh);
    print!("{}", write_obj(&rebuilt.to_raw(config.up_axis)));
    Ok(())
}
