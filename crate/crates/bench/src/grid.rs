use std::io::Write;

use anyhow::{bail, Context, Result};
use dovetail::gen::{generate, DistSpec, Family};
use dovetail::{Record, SortConfig, SortKey};
use serde::Serialize;

use crate::run::{median, oracle_sorted, pool, timed, verify, Algo};

pub const CSV_HEADER: &str = "algo,dist,param,n,bits,threads,seed,time_ms,verified,moves,levels,merge_out_copies";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Paper32,
    Paper64,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Preset> {
        match s {
            "paper32" => Some(Preset::Paper32),
            "paper64" => Some(Preset::Paper64),
            _ => None,
        }
    }

    pub fn key_bits(self) -> u32 {
        match self {
            Preset::Paper32 => 32,
            Preset::Paper64 => 64,
        }
    }
}

/// One CSV row. Counter columns stay empty for the baseline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult {
    pub algo: &'static str,
    pub dist: &'static str,
    pub param: String,
    pub n: usize,
    pub bits: u32,
    pub threads: usize,
    pub seed: u64,
    pub time_ms: String,
    pub verified: bool,
    pub moves: Option<u64>,
    pub levels: Option<usize>,
    pub merge_out_copies: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub preset: Preset,
    pub n: usize,
    pub repeat: usize,
    pub seed: u64,
    pub threads: usize,
    pub algos: Vec<Algo>,
    pub families: Vec<Family>,
}

impl BenchOptions {
    pub fn new(preset: Preset, n: usize) -> Self {
        BenchOptions {
            preset,
            n,
            repeat: 6,
            seed: 1,
            threads: rayon::current_num_threads(),
            algos: Algo::ALL.to_vec(),
            families: Family::paper_grid(),
        }
    }
}

/// `12.0` prints as `12`, `1.5` as `1.5`.
pub fn fmt_param(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e18 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Runs the whole grid. Every output is checked against the oracle before
/// its row is produced; a mismatch aborts the run.
pub fn run_grid(opts: &BenchOptions, mut on_row: impl FnMut(&RunResult) -> Result<()>) -> Result<Vec<RunResult>> {
    if opts.repeat == 0 {
        bail!("--repeat must be at least 1");
    }
    let tp = pool(opts.threads);
    let mut rows = Vec::new();
    for &family in &opts.families {
        let spec = DistSpec::new(family, opts.n, opts.preset.key_bits(), opts.seed);
        let batch = tp.install(|| match opts.preset {
            Preset::Paper32 => grid_point::<u32>(&spec, opts),
            Preset::Paper64 => grid_point::<u64>(&spec, opts),
        })?;
        for row in batch {
            on_row(&row)?;
            rows.push(row);
        }
    }
    Ok(rows)
}

fn grid_point<K: SortKey>(spec: &DistSpec, opts: &BenchOptions) -> Result<Vec<RunResult>> {
    let input: Vec<Record<K, u64>> = generate(spec).with_context(|| format!("generating {:?}", spec.family))?;
    let want = oracle_sorted(&input);
    let base = SortConfig::default().with_seed(opts.seed);
    let mut rows = Vec::new();
    for &algo in &opts.algos {
        let (out, _, rep) = timed(algo, &input, &base.clone().with_instrument(true));
        verify(&out, &want).with_context(|| format!("{algo} on {} {}", spec.family.label(), spec.family.param()))?;
        let mut times = Vec::with_capacity(opts.repeat);
        for _ in 0..opts.repeat {
            let (out, ms, _) = timed(algo, &input, &base);
            verify(&out, &want).with_context(|| format!("{algo} timed run"))?;
            times.push(ms);
        }
        let tail = if times.len() > 1 { &times[1..] } else { &times[..] };
        rows.push(RunResult {
            algo: algo.label(),
            dist: spec.family.label(),
            param: fmt_param(spec.family.param()),
            n: spec.n,
            bits: spec.key_bits,
            threads: opts.threads,
            seed: spec.seed,
            time_ms: format!("{:.3}", median(tail)),
            verified: true,
            moves: rep.as_ref().map(|r| r.moves),
            levels: rep.as_ref().map(|r| r.levels),
            merge_out_copies: rep.as_ref().map(|r| r.merge_out_copies),
        });
    }
    Ok(rows)
}

pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(true).from_writer(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_row_fields() {
        let mut w = csv_writer(Vec::new());
        let row = RunResult {
            algo: "plain",
            dist: "zipf",
            param: fmt_param(1.5),
            n: 10,
            bits: 32,
            threads: 1,
            seed: 3,
            time_ms: "0.100".into(),
            verified: true,
            moves: None,
            levels: Some(1),
            merge_out_copies: None,
        };
        w.serialize(&row).unwrap();
        let s = String::from_utf8(w.into_inner().unwrap()).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("plain,zipf,1.5,10,32,1,3,0.100,true,,1,"));
    }

    #[test]
    fn params_print_plainly() {
        assert_eq!(fmt_param(1e9), "1000000000");
        assert_eq!(fmt_param(0.6), "0.6");
        assert_eq!(fmt_param(10.0), "10");
    }
}
