//! Token ids, embedding-type tags and the two file formats.
//!
//! ```bash
//! cargo run -p amt-core --example token_stream
//! ```

use amt_core::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = PipelineConfig::default();
    let raw = Synthetic::Grid {
        width: 2,
        height: 1,
    }
    .generate()?;
    let mesh = prepare(&raw, &config);
    let vocab = config.vocabulary();
    println!(
        "vocabulary: {} coordinate ids, BOS {} EOS {} PAD {} & {}",
        vocab.coord_bins(),
        vocab.bos(),
        vocab.eos(),
        vocab.pad(),
        vocab.amp()
    );

    let seq = tokenize(&mesh)?;
    let tokens = encode_amt(&seq, mesh.vertices(), vocab)?;
    println!("sequence: {seq}");
    for (id, ty) in tokens.ids().iter().zip(tokens.types()) {
        println!("  {id:>4}  {ty:?}");
    }

    let bytes = serialize(&tokens);
    println!(
        "binary: {} bytes, header {:02x?}",
        bytes.len(),
        &bytes[..20]
    );
    assert_eq!(deserialize(&bytes)?, tokens);

    let json = tokens.to_json();
    println!("json: {json}");
    assert_eq!(TokenSequence::from_json(&json)?, tokens);

    let decoded = decode(&tokens, vocab, Codec::detect(&tokens))?;
    assert_eq!(decoded.to_mesh()?, mesh);
    println!("decoded back to {} faces", mesh.face_count());
    Ok(())
}
