#![allow(dead_code)]

use std::path::PathBuf;

use lexsamp::{Permutation, Poset};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const FIVE_PAIRS: [(usize, usize); 6] = [(1, 3), (1, 5), (2, 3), (2, 5), (3, 5), (4, 5)];

/// The eight extensions in the order the reference experiment tallies them.
pub const FIVE_CELLS: [[usize; 5]; 8] = [
    [1, 2, 3, 4, 5],
    [1, 2, 4, 3, 5],
    [1, 4, 2, 3, 5],
    [4, 1, 2, 3, 5],
    [2, 1, 3, 4, 5],
    [2, 1, 4, 3, 5],
    [2, 4, 1, 3, 5],
    [4, 2, 1, 3, 5],
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> Poset {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    Poset::parse(&text).expect("fixture parses")
}

pub fn five_cells() -> Vec<Permutation> {
    FIVE_CELLS
        .iter()
        .map(|c| Permutation::from_one_based(c).unwrap())
        .collect()
}

/// A random order on `n` items: each pair of a hidden random ranking is
/// related with probability `density`, then labels are shuffled so the
/// identity is usually not an extension.
pub fn random_poset(n: usize, density: f64, seed: u64) -> Poset {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(&mut rng);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(density) {
                pairs.push((labels[a], labels[b]));
            }
        }
    }
    Poset::from_pairs(n, &pairs).expect("acyclic by construction")
}
