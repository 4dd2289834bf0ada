#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specsumm::summary::Membership;
use specsumm::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph G(n, p).
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Uniform assignment to `k` supernodes, each guaranteed non-empty.
pub fn random_membership(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Membership {
    let mut assign: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for (j, &v) in order.iter().take(k).enumerate() {
        assign[v] = j;
    }
    Membership::new(assign, k).unwrap()
}

pub fn two_triangles() -> Graph {
    Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
}
