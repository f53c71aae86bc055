//! Fixtures shared by the criterion benches.

use trichain::{run_chain, ChainConfig, ChainKind, DegreeSequence, Graph, Switch};

/// A realization of `k`-regular degrees on `n` vertices, mixed by the
/// switch chain so that it is not the deterministic construction.
pub fn regular_graph(n: usize, k: usize, seed: u64) -> Graph {
    let d = DegreeSequence::regular(n, k).expect("valid regular sequence");
    let mut g = Graph::from_degree_sequence(&d, Some(seed)).expect("graphical");
    let cfg = ChainConfig {
        seed,
        steps: 20 * n as u64,
        ..Default::default()
    };
    run_chain(&mut g, &cfg, ChainKind::Switch).expect("chain runs");
    g
}

/// Every valid switch of `g`, capped at `limit`.
pub fn switches(g: &Graph, limit: usize) -> Vec<Switch> {
    let mut all = trichain::switch::all_switches(g);
    all.truncate(limit);
    all
}
