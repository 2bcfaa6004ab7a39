//! Deterministic graph generators.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// Draws allowed before `random-sc` gives up.
pub const RESAMPLE_BUDGET: usize = 1000;

pub const DEFAULT_EDGE_PROBABILITY: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphModel {
    Cycle,
    BidirectedComplete,
    RandomSc,
}

impl FromStr for GraphModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cycle" => Ok(GraphModel::Cycle),
            "bidirected-complete" => Ok(GraphModel::BidirectedComplete),
            "random-sc" => Ok(GraphModel::RandomSc),
            other => Err(Error::InvalidArgument(format!(
                "unknown model {other:?} (expected cycle, bidirected-complete or random-sc)"
            ))),
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    Ok(())
}

/// 0 → 1 → … → n−1 → 0.
pub fn cycle(n: usize) -> Result<DirectedGraph> {
    check_size(n)?;
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    DirectedGraph::from_edges(n, &edges)
}

/// Every ordered pair of distinct vertices.
pub fn bidirected_complete(n: usize) -> Result<DirectedGraph> {
    check_size(n)?;
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    DirectedGraph::from_edges(n, &edges)
}

/// Each ordered pair becomes an edge with probability `p`; redrawn until the
/// result is strongly connected.
pub fn random_strongly_connected(n: usize, p: f64, seed: u64) -> Result<DirectedGraph> {
    check_size(n)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "edge probability must lie in (0, 1], got {p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESAMPLE_BUDGET {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = DirectedGraph::from_edges(n, &edges)?;
        if g.is_strongly_connected() {
            return Ok(g);
        }
    }
    Err(Error::GenerationBudget {
        attempts: RESAMPLE_BUDGET,
    })
}

pub fn generate(model: GraphModel, n: usize, p: f64, seed: u64) -> Result<DirectedGraph> {
    match model {
        GraphModel::Cycle => cycle(n),
        GraphModel::BidirectedComplete => bidirected_complete(n),
        GraphModel::RandomSc => random_strongly_connected(n, p, seed),
    }
}
