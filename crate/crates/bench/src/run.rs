use std::fmt;
use std::time::Instant;

use dovetail::gen::format::Dataset;
use dovetail::{dt_sort, plain_msd_sort, InstrumentReport, Record, SortConfig, SortKey};
use rayon::prelude::*;
use thiserror::Error;

use crate::oracle::merge_sort_by_key;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    DtSort,
    Plain,
    /// rayon's parallel stable comparison sort.
    Baseline,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::DtSort, Algo::Plain, Algo::Baseline];

    pub fn label(self) -> &'static str {
        match self {
            Algo::DtSort => "dtsort",
            Algo::Plain => "plain",
            Algo::Baseline => "baseline-stable",
        }
    }

    pub fn parse(s: &str) -> Option<Algo> {
        match s {
            "dtsort" => Some(Algo::DtSort),
            "plain" => Some(Algo::Plain),
            "baseline" | "baseline-stable" => Some(Algo::Baseline),
            _ => None,
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Sorts `data` in place with `algo`. The report is `None` for the baseline
/// and whenever `cfg.instrument` is off.
pub fn run_algo<K: SortKey>(algo: Algo, data: &mut [Record<K, u64>], cfg: &SortConfig) -> Option<InstrumentReport> {
    match algo {
        Algo::DtSort => dt_sort(data, cfg).expect("invalid sort config"),
        Algo::Plain => plain_msd_sort(data, cfg).expect("invalid sort config"),
        Algo::Baseline => {
            data.par_sort_by_key(|r| r.key);
            None
        }
    }
}

/// Times one run of `algo` on a private copy of `input`.
pub fn timed<K: SortKey>(
    algo: Algo,
    input: &[Record<K, u64>],
    cfg: &SortConfig,
) -> (Vec<Record<K, u64>>, f64, Option<InstrumentReport>) {
    let mut data = input.to_vec();
    let t = Instant::now();
    let rep = run_algo(algo, &mut data, cfg);
    let ms = t.elapsed().as_secs_f64() * 1e3;
    (data, ms, rep)
}

pub fn oracle_sorted<K: SortKey>(input: &[Record<K, u64>]) -> Vec<Record<K, u64>> {
    let mut v = input.to_vec();
    merge_sort_by_key(&mut v, |r| r.key.to_u64());
    v
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("length {got}, expected {want}")]
    Length { got: usize, want: usize },
    #[error("keys out of order at index {0}")]
    NotSorted(usize),
    #[error("output is not a permutation of the input")]
    NotPermutation,
    #[error("equal keys reordered at index {0}")]
    NotStable(usize),
}

/// Checks `out` against the oracle's sorted `want`: sorted first, then
/// permutation, then stability.
pub fn verify<K: SortKey>(out: &[Record<K, u64>], want: &[Record<K, u64>]) -> Result<(), VerifyError> {
    if out.len() != want.len() {
        return Err(VerifyError::Length { got: out.len(), want: want.len() });
    }
    if out == want {
        return Ok(());
    }
    if let Some(i) = out.windows(2).position(|w| w[0].key > w[1].key) {
        return Err(VerifyError::NotSorted(i + 1));
    }
    let mut a = out.to_vec();
    let mut b = want.to_vec();
    a.sort_unstable_by_key(|r| (r.key, r.payload));
    b.sort_unstable_by_key(|r| (r.key, r.payload));
    if a != b {
        return Err(VerifyError::NotPermutation);
    }
    let i = out.iter().zip(want).position(|(x, y)| x != y).unwrap_or(0);
    Err(VerifyError::NotStable(i))
}

/// Records from a dataset. Missing payloads become original indices.
pub fn to_records<K: SortKey>(ds: &Dataset) -> Vec<Record<K, u64>> {
    ds.keys
        .iter()
        .enumerate()
        .map(|(i, &k)| Record::new(K::from_u64(k), if ds.payloads.is_empty() { i as u64 } else { ds.payloads[i] }))
        .collect()
}

pub fn to_dataset<K: SortKey>(records: &[Record<K, u64>], key_bits: u8, payload_bytes: u8) -> Dataset {
    Dataset {
        key_bits,
        payload_bytes,
        keys: records.iter().map(|r| r.key.to_u64()).collect(),
        payloads: if payload_bytes == 0 { Vec::new() } else { records.iter().map(|r| r.payload).collect() },
    }
}

/// Thread count from the flag, else `ISRT_THREADS`, else rayon's default.
pub fn thread_count(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var("ISRT_THREADS").ok()?.parse().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

pub fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build thread pool")
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}
