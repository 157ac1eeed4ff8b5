//! Byte-for-byte snapshots of generated scripts. Regenerate with
//! `UPDATE_GOLDEN=1 cargo test -p modelgate-core --test golden`.

use std::path::PathBuf;

use modelgate_core::dsl::parse_model;
use modelgate_core::encoder::{encode, EncodingConfig, PfsMode};

/// Depth used for the path-query snapshots.
const GOLDEN_DEPTH: u32 = 4;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn configs() -> Vec<(&'static str, EncodingConfig)> {
    vec![
        ("vfs", EncodingConfig::vfs()),
        ("pfs_unrolled", EncodingConfig::pfs(PfsMode::Unrolled, GOLDEN_DEPTH)),
        ("pfs_recursive", EncodingConfig::pfs(PfsMode::Recursive, GOLDEN_DEPTH)),
    ]
}

#[test]
fn snapshots_match() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for model in ["mc_model1", "mc_model2", "mc_model3"] {
        let src = std::fs::read_to_string(root().join("../../corpus").join(format!("{model}.tsm"))).unwrap();
        let m = parse_model(&src).unwrap();
        for (tag, config) in configs() {
            let text = encode(&m, &config).unwrap().text;
            assert_eq!(text, encode(&m, &config).unwrap().text, "encoding is not deterministic");
            let path = root().join("tests/golden").join(format!("{model}_{tag}.smt2"));
            if update {
                std::fs::write(&path, &text).unwrap();
                continue;
            }
            match std::fs::read_to_string(&path) {
                Ok(expected) if expected == text => {}
                Ok(_) => mismatches.push(format!("{} differs", path.display())),
                Err(e) => mismatches.push(format!("{}: {e}", path.display())),
            }
        }
    }
    assert!(mismatches.is_empty(), "golden mismatches (set UPDATE_GOLDEN=1 to regenerate):\n{}", mismatches.join("\n"));
}
