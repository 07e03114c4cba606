//! Traces both codecs on three tiny meshes and prints the token counts.
//!
//! ```bash
//! cargo run -p amt-core --example quickstart
//! ```

use amt_core::prelude::*;

fn show(name: &str, vertices: &[[u32; 3]], faces: &[[u32; 3]]) {
    let (mesh, _) = CanonicalMesh::from_key_vertices(vertices, faces);
    let amt = tokenize(&mesh).expect("mesh has faces");
    let naive = tokenize_naive(&mesh);
    let vocab = Vocabulary::new(128);
    let amt_tokens = encode_amt(&amt, mesh.vertices(), vocab).unwrap();
    let naive_tokens = encode_naive(&naive, mesh.vertices(), vocab).unwrap();

    println!("{name}");
    println!("  faces        {:?}", mesh.faces());
    println!("  amt          {amt}");
    println!("  naive        {:?}", naive.items);
    println!(
        "  payload      amt {} / naive {} = {:.4}",
        amt_tokens.payload_len(),
        naive_tokens.payload_len(),
        amt_tokens.payload_len() as f64 / naive_tokens.payload_len() as f64
    );
    assert_eq!(detokenize(&amt, mesh.vertices()).unwrap(), mesh);
}

fn main() {
    // vertex `i` sits at key (0, 0, i), so index order is coordinate order
    let line = |n: u32| (0..n).map(|i| [0, 0, i]).collect::<Vec<_>>();

    show("square", &line(4), &[[0, 1, 2], [1, 2, 3]]);
    show(
        "three-face strip",
        &line(5),
        &[[0, 1, 2], [1, 2, 3], [2, 3, 4]],
    );
    show("two loose triangles", &line(6), &[[0, 1, 2], [3, 4, 5]]);
    show("fan (needs a restart)", &line(4), &[[0, 1, 2], [0, 2, 3]]);
}
