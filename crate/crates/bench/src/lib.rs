//! Shared instance builders for the workspace benchmarks.

use crowdobj_core::{
    generate, Assignment, GroundTruth, ResponseMatrix, SimConfig, SplitMix64,
};

/// A full-assignment instance of the given shape with mixed-ability workers.
pub fn simulated_instance(k: usize, d: usize, seed: u64) -> (GroundTruth, ResponseMatrix) {
    let cfg = SimConfig::uniform_ability(k, d, 0.6, 0.95, Assignment::Full, seed);
    generate(&cfg).expect("valid config")
}

/// A tiny dense instance with uniformly random answers, as used by the
/// convex-solver checks.
pub fn random_tiny_instance(seed: u64) -> ResponseMatrix {
    let mut rng = SplitMix64::new(seed);
    let k = 1 + rng.next_below(3) as usize;
    let d = 1 + rng.next_below(3) as usize;
    let mut triples = Vec::new();
    for i in 0..k {
        for j in 0..d {
            triples.push((i, j, rng.next_u64() & 1 == 1));
        }
    }
    ResponseMatrix::from_triples(k, d, &triples).expect("valid instance")
}
