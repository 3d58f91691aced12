use std::time::Instant;

use dovetail::gen::generate_edges;
use dovetail::{dt_sort, Record, SortConfig};

use crate::run::{oracle_sorted, verify, VerifyError};

/// Compressed sparse rows of the transposed graph: in-neighbours of `v` are
/// `sources[offsets[v]..offsets[v + 1]]`, in edge-list order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Csr {
    pub offsets: Vec<usize>,
    pub sources: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct TransposeReport {
    pub vertices: u64,
    pub edges: usize,
    pub max_in_degree: usize,
    pub sort_ms: f64,
    pub csr: Csr,
}

#[derive(Debug, thiserror::Error)]
pub enum TransposeError {
    #[error(transparent)]
    Gen(#[from] dovetail::gen::GenError),
    #[error("sorted edges differ from the oracle: {0}")]
    Sort(#[from] VerifyError),
    #[error("CSR row {0} differs from the edge-order adjacency list")]
    Csr(usize),
}

/// Builds the CSR from edge records already sorted by destination.
pub fn csr_from_sorted(sorted: &[Record<u32, u64>], edges: &[(u32, u32)], vertices: u64) -> Csr {
    let mut offsets = vec![0usize; vertices as usize + 1];
    for r in sorted {
        offsets[r.key as usize + 1] += 1;
    }
    for v in 0..vertices as usize {
        offsets[v + 1] += offsets[v];
    }
    let sources = sorted.iter().map(|r| edges[r.payload as usize].0).collect();
    Csr { offsets, sources }
}

/// Sorts Zipf-skewed edges by destination with `dt_sort`, checks the result
/// against the oracle and checks every CSR row against a direct bucketing of
/// the edge list.
pub fn transpose_demo(
    vertices: u64,
    edges: usize,
    skew: f64,
    seed: u64,
    cfg: &SortConfig,
) -> Result<TransposeReport, TransposeError> {
    let list = generate_edges(vertices, edges, skew, seed)?;
    let input: Vec<Record<u32, u64>> = list
        .iter()
        .enumerate()
        .map(|(i, &(_, dst))| Record::new(dst, i as u64))
        .collect();
    let mut sorted = input.clone();
    let t = Instant::now();
    dt_sort(&mut sorted, cfg).expect("valid config");
    let sort_ms = t.elapsed().as_secs_f64() * 1e3;
    verify(&sorted, &oracle_sorted(&input))?;

    let csr = csr_from_sorted(&sorted, &list, vertices);
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); vertices as usize];
    for &(src, dst) in &list {
        adj[dst as usize].push(src);
    }
    for (v, row) in adj.iter().enumerate() {
        if csr.sources[csr.offsets[v]..csr.offsets[v + 1]] != row[..] {
            return Err(TransposeError::Csr(v));
        }
    }
    Ok(TransposeReport {
        vertices,
        edges,
        max_in_degree: adj.iter().map(Vec::len).max().unwrap_or(0),
        sort_ms,
        csr,
    })
}
