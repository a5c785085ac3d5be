//! Deterministic replay of the fuzz-target bodies: every parser is fed
//! the corpus seeds plus a few thousand mutations and must never panic;
//! accepted inputs must round-trip through their canonical form.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn mutations(seed: &[u8], rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut bytes = seed.to_vec();
        for _ in 0..rng.gen_range(1..=4) {
            match rng.gen_range(0..3) {
                0 if !bytes.is_empty() => {
                    let i = rng.gen_range(0..bytes.len());
                    bytes[i] = rng.gen();
                }
                1 => {
                    let i = rng.gen_range(0..=bytes.len());
                    bytes.insert(i, rng.gen());
                }
                _ if !bytes.is_empty() => {
                    bytes.remove(rng.gen_range(0..bytes.len()));
                }
                _ => {}
            }
        }
        out.push(bytes);
    }
    out
}

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = format!("{}/fuzz/corpus/{target}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_dir(dir)
        .expect("corpus directory present")
        .map(|entry| std::fs::read(entry.unwrap().path()).unwrap())
        .collect()
}

fn replay(target: &str, body: impl Fn(&[u8])) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf422);
    let seeds = corpus(target);
    assert!(!seeds.is_empty(), "{target} has corpus seeds");
    for seed in &seeds {
        body(seed);
        for case in mutations(seed, &mut rng, 800) {
            body(&case);
        }
    }
}

#[test]
fn rational_parser() {
    replay("parse_rational", |data| {
        if let Ok(s) = std::str::from_utf8(data) {
            if let Ok(q) = tamepi1::arith::parse_rational(s) {
                let rendered = tamepi1::arith::format_rational(&q);
                assert_eq!(tamepi1::arith::parse_rational(&rendered).unwrap(), q);
            }
        }
    });
}

#[test]
fn points_parser() {
    replay("parse_points", |data| {
        if let Ok(s) = std::str::from_utf8(data) {
            if let Ok(points) = tamepi1::cli::parse_points(s) {
                for point in points {
                    let rendered = point.to_string();
                    assert_eq!(tamepi1::tree::parse_point(&rendered).unwrap(), point);
                }
            }
        }
    });
}

#[test]
fn word_parser() {
    replay("parse_word", |data| {
        let Some((&rank_byte, rest)) = data.split_first() else {
            return;
        };
        let rank = usize::from(rank_byte % 8) + 1;
        if let Ok(s) = std::str::from_utf8(rest) {
            if let Ok(word) = tamepi1::words::parse_word(rank, s) {
                let rendered = word.to_string();
                assert_eq!(tamepi1::words::parse_word(rank, &rendered).unwrap(), word);
            }
        }
    });
}

#[test]
fn permutation_parser() {
    replay("parse_permutation", |data| {
        if let Ok(s) = std::str::from_utf8(data) {
            if let Ok(g) = tamepi1::groups::parse_permutation(s, 0) {
                let rendered = g.to_string();
                assert_eq!(
                    tamepi1::groups::parse_permutation(&rendered, g.degree()).unwrap(),
                    g
                );
            }
        }
    });
}

#[test]
fn tree_json_parser() {
    replay("parse_tree_json", |data| {
        let Ok(value) = serde_json::from_slice::<serde_json::Value>(data) else {
            return;
        };
        if let Ok(tree) = tamepi1::tree::MarkedTree::from_json_value(&value) {
            let rendered = tree.to_json_value();
            let back = tamepi1::tree::MarkedTree::from_json_value(&rendered).unwrap();
            assert_eq!(back, tree);
            assert_eq!(back.to_json_value(), rendered);
        }
    });
}

#[test]
fn spec_file_parser() {
    replay("parse_spec_file", |data| {
        if let Ok(s) = std::str::from_utf8(data) {
            if let Ok(specs) = tamepi1::cli::parse_spec_file(s) {
                for (p, ld) in &specs {
                    assert_eq!(*p, ld.prime);
                }
            }
        }
    });
}
