//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its PASS/FAIL line; the process exits non-zero if any fails.

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use amt_core::amt_codec::{self, AmtItem};
use amt_core::bench::synthetic::Synthetic;
use amt_core::bench::{self, BenchConfig, MeshSource};
use amt_core::canonical::{CanonicalMesh, UpAxis};
use amt_core::encoding::{self, Codec, TokenSequence, TokenType, Vocabulary};
use amt_core::mesh_io::{BboxMode, QuantizationSpec, RawMesh};
use amt_core::{naive_codec, PipelineConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn config() -> PipelineConfig {
    PipelineConfig::default()
}

fn prepared(s: &Synthetic, config: &PipelineConfig) -> CanonicalMesh {
    amt_core::prepare(&s.generate().unwrap(), config)
}

fn payloads(mesh: &CanonicalMesh, vocab: Vocabulary) -> (u128, u128) {
    let amt = amt_core::mesh_to_tokens(mesh, Codec::Amt, vocab).unwrap();
    let naive = amt_core::mesh_to_tokens(mesh, Codec::Naive, vocab).unwrap();
    (amt.payload_len() as u128, naive.payload_len() as u128)
}

fn round_trip_corpus() -> Vec<Synthetic> {
    let mut corpus = Vec::new();
    corpus.extend((1..=200).map(|faces| Synthetic::Strip { faces }));
    corpus.extend((1..=60).map(|faces| Synthetic::Fan { faces }));
    for width in [1, 2, 3, 5, 8, 13, 20, 27, 34, 40] {
        for height in [1, 4, 11, 25, 40] {
            corpus.push(Synthetic::Grid { width, height });
        }
    }
    corpus.extend((0..=3).map(|subdivisions| Synthetic::Icosphere { subdivisions }));
    corpus.extend((1..=200).map(|faces| Synthetic::Soup {
        faces,
        seed: faces as u64,
    }));
    corpus.extend((0..220u64).map(|seed| Synthetic::RandomTriangulation {
        cells: 1 + (seed as usize * 7) % 24,
        seed,
    }));
    corpus
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let corpus = round_trip_corpus();
    let random = corpus
        .iter()
        .filter(|s| matches!(s, Synthetic::RandomTriangulation { .. }))
        .count();
    ensure!(
        corpus.len() >= 500 && random >= 200,
        "corpus too small: {} meshes",
        corpus.len()
    );
    let config = config();
    for s in &corpus {
        let mesh = prepared(s, &config);
        ensure!(mesh.face_count() > 0, "{s}: no faces");
        let seq = amt_codec::tokenize(&mesh).map_err(|e| format!("{s}: {e}"))?;
        let back = amt_codec::detokenize(&seq, mesh.vertices()).map_err(|e| format!("{s}: {e}"))?;
        ensure!(back == mesh, "{s}: detokenize(tokenize(m)) != m");
        // and through the token stream
        let tokens = encoding::encode_amt(&seq, mesh.vertices(), config.vocabulary()).unwrap();
        let decoded = encoding::decode(&tokens, config.vocabulary(), Codec::Amt)
            .map_err(|e| format!("{s}: {e}"))?;
        ensure!(
            decoded.to_mesh().ok().as_ref() == Some(&mesh),
            "{s}: decoded tokens give another mesh"
        );
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "{} meshes ({random} random) in {:.2} s",
        corpus.len(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let vocab = config().vocabulary();
    let mut checked = Vec::new();
    for n in [1u128, 2, 10, 100, 1000] {
        let strip = prepared(&Synthetic::Strip { faces: n as usize }, &config());
        ensure!(strip.face_count() as u128 == n, "strip({n}) lost faces");
        let (amt, naive) = payloads(&strip, vocab);
        // amt / naive == 3(n + 2) / 9n
        ensure!(
            amt * 9 * n == 3 * (n + 2) * naive,
            "strip({n}): {amt}/{naive} != {}/{}",
            3 * (n + 2),
            9 * n
        );

        let soup = prepared(
            &Synthetic::Soup {
                faces: n as usize,
                seed: 1,
            },
            &config(),
        );
        ensure!(soup.face_count() as u128 == n, "soup({n}) lost faces");
        let (amt, naive) = payloads(&soup, vocab);
        ensure!(
            amt * 9 * n == (10 * n - 1) * naive,
            "soup({n}): {amt}/{naive} != {}/{}",
            10 * n - 1,
            9 * n
        );
        checked.push(n.to_string());
    }
    Ok(format!(
        "strip and soup exact for N = {}",
        checked.join(", ")
    ))
}

fn criterion_3() -> Outcome {
    let config = config();
    let mut corpus = round_trip_corpus();
    corpus.extend(compression_corpus());
    let mut faces = 0;
    for s in &corpus {
        let mesh = prepared(s, &config);
        let seq = naive_codec::tokenize_naive(&mesh);
        ensure!(
            seq.len() == 3 * mesh.face_count(),
            "{s}: {} items",
            seq.len()
        );
        let tokens = encoding::encode_naive(&seq, mesh.vertices(), config.vocabulary()).unwrap();
        ensure!(
            tokens.payload_len() == 9 * mesh.face_count(),
            "{s}: payload {} for {} faces",
            tokens.payload_len(),
            mesh.face_count()
        );
        faces += mesh.face_count();
    }
    Ok(format!("{} meshes, {faces} faces", corpus.len()))
}

fn compression_corpus() -> Vec<Synthetic> {
    let mut corpus: Vec<Synthetic> = (1..=3)
        .map(|subdivisions| Synthetic::Icosphere { subdivisions })
        .collect();
    for (width, height) in [
        (10, 10),
        (12, 10),
        (16, 16),
        (20, 14),
        (24, 24),
        (32, 20),
        (40, 40),
    ] {
        corpus.push(Synthetic::Grid { width, height });
    }
    corpus.extend([50, 64, 100, 250, 500, 1000].map(|faces| Synthetic::Strip { faces }));
    corpus
}

fn criterion_4() -> Outcome {
    let sources: Vec<MeshSource> = compression_corpus()
        .into_iter()
        .map(MeshSource::from)
        .collect();
    let config = BenchConfig {
        max_faces: usize::MAX,
        ..BenchConfig::default()
    };
    let report = bench::run_corpus(&sources, &config);
    ensure!(
        report.records.len() == sources.len(),
        "only {} of {} meshes measured",
        report.records.len(),
        sources.len()
    );
    let ratio = report.macro_avg_ratio.ok_or("no ratio")?;
    let (lo, hi) = report
        .records
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), r| {
            (lo.min(r.ratio), hi.max(r.ratio))
        });
    ensure!(
        (0.34..=0.60).contains(&ratio),
        "macro ratio {ratio:.4} outside [0.34, 0.60]"
    );
    Ok(format!(
        "macro ratio {ratio:.4} over {} meshes (per-mesh {lo:.4}..{hi:.4})",
        report.records.len()
    ))
}

fn shuffled(mesh: &RawMesh, rng: &mut ChaCha8Rng) -> RawMesh {
    let mut perm: Vec<u32> = (0..mesh.vertices.len() as u32).collect();
    perm.shuffle(rng);
    let mut vertices = vec![[0.0; 3]; mesh.vertices.len()];
    for (old, &new) in perm.iter().enumerate() {
        vertices[new as usize] = mesh.vertices[old];
    }
    let mut faces: Vec<[u32; 3]> = mesh
        .faces
        .iter()
        .map(|f| {
            let mut f = f.map(|v| perm[v as usize]);
            f.rotate_left(rng.gen_range(0..3));
            if rng.gen_bool(0.5) {
                f.swap(1, 2);
            }
            f
        })
        .collect();
    faces.shuffle(rng);
    RawMesh::new(vertices, faces)
}

fn criterion_5() -> Outcome {
    let meshes = [
        Synthetic::Strip { faces: 3 },
        Synthetic::Strip { faces: 40 },
        Synthetic::Fan { faces: 5 },
        Synthetic::Fan { faces: 18 },
        Synthetic::Grid {
            width: 3,
            height: 2,
        },
        Synthetic::Grid {
            width: 6,
            height: 6,
        },
        Synthetic::Grid {
            width: 9,
            height: 4,
        },
        Synthetic::Icosphere { subdivisions: 0 },
        Synthetic::Icosphere { subdivisions: 1 },
        Synthetic::Icosphere { subdivisions: 2 },
        Synthetic::Soup { faces: 4, seed: 1 },
        Synthetic::Soup { faces: 25, seed: 2 },
        Synthetic::RandomTriangulation { cells: 3, seed: 1 },
        Synthetic::RandomTriangulation { cells: 5, seed: 2 },
        Synthetic::RandomTriangulation { cells: 6, seed: 3 },
        Synthetic::RandomTriangulation { cells: 8, seed: 4 },
        Synthetic::RandomTriangulation { cells: 9, seed: 5 },
        Synthetic::RandomTriangulation { cells: 11, seed: 6 },
        Synthetic::RandomTriangulation { cells: 12, seed: 7 },
        Synthetic::RandomTriangulation { cells: 14, seed: 8 },
    ];
    let config = config();
    let vocab = config.vocabulary();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut references: Vec<Vec<u32>> = Vec::new();
    for s in &meshes {
        let raw = s.generate().unwrap();
        let reference =
            amt_core::mesh_to_tokens(&amt_core::prepare(&raw, &config), Codec::Amt, vocab).unwrap();
        ensure!(
            !references.contains(&reference.ids().to_vec()),
            "{s}: not distinct from an earlier mesh"
        );
        for trial in 0..100 {
            let mesh = amt_core::prepare(&shuffled(&raw, &mut rng), &config);
            let tokens = amt_core::mesh_to_tokens(&mesh, Codec::Amt, vocab).unwrap();
            ensure!(
                tokens.ids() == reference.ids(),
                "{s}: permutation {trial} changed the ids"
            );
            ensure!(
                tokens == reference,
                "{s}: permutation {trial} changed the type tags"
            );
        }
        references.push(reference.ids().to_vec());
    }
    Ok(format!(
        "{} meshes x 100 permutations identical",
        meshes.len()
    ))
}

fn criterion_6() -> Outcome {
    let vocab = config().vocabulary();
    let mut at_most_one = Vec::new();
    let mut worst = f64::MAX;
    for n in (1..=200).chain([500, 1000]) {
        for seed in [1u64, 2, 3] {
            let mesh = prepared(&Synthetic::Soup { faces: n, seed }, &config());
            let (amt, naive) = payloads(&mesh, vocab);
            worst = worst.min(amt as f64 / naive as f64);
            if amt <= naive {
                at_most_one.push(format!("soup n={n} seed={seed}: {amt}/{naive}"));
            }
        }
    }
    ensure!(
        at_most_one.is_empty(),
        "ratio not above 1 for {} case(s) (a lone face is 9 payload tokens in both codecs): {}",
        at_most_one.len(),
        at_most_one.join("; ")
    );
    Ok(format!("minimum ratio {worst:.4}"))
}

/// Two strip faces, a restart, then one face with ids above 255.
fn golden_tokens() -> TokenSequence {
    let keys = [
        [0, 0, 0],
        [0, 0, 1],
        [0, 1, 0],
        [0, 1, 1],
        [258, 0, 0],
        [258, 0, 299],
    ];
    let (mesh, _) = CanonicalMesh::from_key_vertices(&keys, &[[0, 1, 2], [1, 2, 3], [3, 4, 5]]);
    let seq = amt_codec::tokenize(&mesh).unwrap();
    assert_eq!(seq.to_string(), "v0 v1 v2 v3 & v3 v4 v5");
    assert!(matches!(seq.items[4], AmtItem::Restart));
    encoding::encode_amt(&seq, mesh.vertices(), Vocabulary::new(300)).unwrap()
}

#[rustfmt::skip]
const GOLDEN: &[u8] = &[
    0x41, 0x4d, 0x54, 0x4b,                         // "AMTK"
    0x01, 0x00, 0x00, 0x00,                         // version 1
    0x2c, 0x01, 0x00, 0x00,                         // 300 bins
    0x18, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, // 24 tokens
    0x2c, 0x01, 0x00, 0x00, 0x03,                   // BOS
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x01, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x01, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x01,
    0x01, 0x00, 0x00, 0x00, 0x01,
    0x01, 0x00, 0x00, 0x00, 0x01,
    0x2f, 0x01, 0x00, 0x00, 0x02,                   // &
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x01, 0x00, 0x00, 0x00, 0x00,
    0x01, 0x00, 0x00, 0x00, 0x00,
    0x02, 0x01, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x02, 0x01, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00,
    0x2b, 0x01, 0x00, 0x00, 0x00,
    0x2d, 0x01, 0x00, 0x00, 0x03,                   // EOS
];

fn criterion_7() -> Outcome {
    let tokens = golden_tokens();
    let bytes = encoding::serialize(&tokens);
    ensure!(
        bytes == GOLDEN,
        "serialized bytes differ from the golden file:\n{bytes:02x?}"
    );
    let read = encoding::deserialize(GOLDEN).map_err(|e| e.to_string())?;
    ensure!(read == tokens, "golden file decodes to another stream");
    ensure!(read.types()[13] == TokenType::Amp, "type tags misread");

    let config = config();
    let mut files = 0;
    for s in round_trip_corpus().iter().step_by(3) {
        let mesh = prepared(s, &config);
        for codec in [Codec::Amt, Codec::Naive] {
            let tokens = amt_core::mesh_to_tokens(&mesh, codec, config.vocabulary()).unwrap();
            let bytes = encoding::serialize(&tokens);
            let back = encoding::deserialize(&bytes).map_err(|e| format!("{s}: {e}"))?;
            ensure!(
                back == tokens && encoding::serialize(&back) == bytes,
                "{s}: {codec} bytes changed"
            );
            let mirror = TokenSequence::from_json(&tokens.to_json()).map_err(|e| e.to_string())?;
            ensure!(mirror == tokens, "{s}: JSON mirror differs");
            files += 1;
        }
    }
    Ok(format!(
        "golden bytes match; {files} streams round-trip bit-exactly"
    ))
}

fn criterion_8() -> Outcome {
    let config = PipelineConfig {
        quantization: QuantizationSpec::new(512, BboxMode::PerMeshTight),
        up_axis: UpAxis::Y,
    };
    let mesh = prepared(
        &Synthetic::Grid {
            width: 224,
            height: 224,
        },
        &config,
    );
    ensure!(
        mesh.face_count() >= 100_000,
        "only {} faces",
        mesh.face_count()
    );
    let start = Instant::now();
    let seq = amt_codec::tokenize(&mesh).map_err(|e| e.to_string())?;
    let tokens = encoding::encode_amt(&seq, mesh.vertices(), config.vocabulary())
        .map_err(|e| e.to_string())?;
    let single = start.elapsed();
    ensure!(
        tokens.payload_len() < 9 * mesh.face_count(),
        "no compression on the large grid"
    );
    ensure!(
        single < Duration::from_secs(1),
        "{} faces took {single:?}",
        mesh.face_count()
    );

    let kinds = |i: u64| match i % 6 {
        0 => Synthetic::Strip {
            faces: 1 + (i as usize % 90),
        },
        1 => Synthetic::Fan {
            faces: 1 + (i as usize % 40),
        },
        2 => Synthetic::Grid {
            width: 1 + (i as usize % 9),
            height: 1 + (i as usize % 7),
        },
        3 => Synthetic::Icosphere {
            subdivisions: (i % 3) as u32,
        },
        4 => Synthetic::Soup {
            faces: 1 + (i as usize % 30),
            seed: i,
        },
        _ => Synthetic::RandomTriangulation {
            cells: 2 + (i as usize % 10),
            seed: i,
        },
    };
    let sources: Vec<MeshSource> = (0..10_000).map(|i| kinds(i).into()).collect();
    let bench_config = BenchConfig {
        jobs: 8,
        ..BenchConfig::default()
    };
    let start = Instant::now();
    let report = bench::run_corpus(&sources, &bench_config);
    let corpus = start.elapsed();
    ensure!(
        report.failures.is_empty(),
        "{} meshes failed",
        report.failures.len()
    );
    ensure!(
        report.records.len() == sources.len(),
        "{} meshes measured",
        report.records.len()
    );
    ensure!(
        corpus < Duration::from_secs(300),
        "10k meshes took {corpus:?}"
    );
    Ok(format!(
        "{} faces in {:.1} ms; 10k meshes in {:.2} s",
        mesh.face_count(),
        single.as_secs_f64() * 1e3,
        corpus.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("round trip", criterion_1),
        ("closed forms", criterion_2),
        ("naive accounting", criterion_3),
        ("compression band", criterion_4),
        ("order independence", criterion_5),
        ("soup worst case", criterion_6),
        ("binary format", criterion_7),
        ("performance", criterion_8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS  {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL  {reason}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
