use std::fmt::Write;

use dovetail::gen::{generate, DistSpec, Family};
use dovetail::{dt_sort, Record, SortConfig, SortKey};

use crate::run::{oracle_sorted, verify};

/// One instrumented run checked against the structural work bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoryRow {
    pub dist: String,
    pub n: usize,
    pub bits: u32,
    pub levels: usize,
    /// `ceil((bits - skipped) / γ_min)`.
    pub level_bound: usize,
    pub moves: u64,
    pub mass1: u64,
    pub correct: bool,
}

impl TheoryRow {
    pub fn moves_per_record(&self) -> f64 {
        self.moves as f64 / self.n.max(1) as f64
    }

    pub fn ok(&self) -> bool {
        self.correct
            && self.levels <= self.level_bound
            && self.moves <= 3 * self.n as u64 * self.levels as u64
    }
}

pub fn full_range(bits: u32) -> Family {
    Family::Uniform { mu: if bits == 64 { u64::MAX } else { 1 << bits } }
}

pub fn theory_run<K: SortKey>(family: Family, n: usize, seed: u64, cfg: &SortConfig) -> TheoryRow {
    let spec = DistSpec::new(family, n, K::BITS, seed);
    let input: Vec<Record<K, u64>> = generate(&spec).expect("valid grid point");
    let mut out = input.clone();
    let rep = dt_sort(&mut out, &cfg.clone().with_instrument(true))
        .expect("valid config")
        .expect("instrumented");
    let correct = verify(&out, &oracle_sorted(&input)).is_ok();
    let active = K::BITS - rep.skipped_bits;
    let g = cfg.gamma_policy.min_gamma(K::BITS) as usize;
    TheoryRow {
        dist: format!("{}-{}", family.label(), crate::grid::fmt_param(family.param())),
        n,
        bits: K::BITS,
        levels: rep.levels,
        level_bound: (active as usize).div_ceil(g),
        moves: rep.moves,
        mass1: rep.mass_at(1),
        correct,
    }
}

/// Full-range and μ = 10 uniform inputs at every `n`, for both key widths.
pub fn theory_check(ns: &[usize], seed: u64) -> Vec<TheoryRow> {
    let cfg = SortConfig::default().with_seed(seed);
    let mut rows = Vec::new();
    for &n in ns {
        rows.push(theory_run::<u32>(full_range(32), n, seed, &cfg));
        rows.push(theory_run::<u64>(full_range(64), n, seed, &cfg));
        rows.push(theory_run::<u32>(Family::Uniform { mu: 10 }, n, seed, &cfg));
    }
    rows
}

pub fn render(rows: &[TheoryRow]) -> String {
    let mut s = String::new();
    writeln!(s, "{:<16} {:>10} {:>4} {:>6} {:>5} {:>12} {:>9}  ok", "dist", "n", "bits", "levels", "bound", "moves/rec", "mass1/n").unwrap();
    for r in rows {
        writeln!(
            s,
            "{:<16} {:>10} {:>4} {:>6} {:>5} {:>12.3} {:>9.4}  {}",
            r.dist,
            r.n,
            r.bits,
            r.levels,
            r.level_bound,
            r.moves_per_record(),
            r.mass1 as f64 / r.n.max(1) as f64,
            if r.ok() { "yes" } else { "NO" }
        )
        .unwrap();
    }
    s
}
