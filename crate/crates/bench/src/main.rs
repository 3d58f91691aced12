use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use dovetail::gen::format::Dataset;
use dovetail::gen::{generate_keys, DistSpec, Family};
use dovetail::{Record, SortConfig, SortKey};

use dovetail_bench::grid::{csv_writer, run_grid, BenchOptions, Preset};
use dovetail_bench::run::{oracle_sorted, pool, run_algo, thread_count, timed, to_dataset, to_records, verify, Algo};
use dovetail_bench::theory::{render, theory_check};
use dovetail_bench::transpose::transpose_demo;

#[derive(Parser)]
#[command(name = "isrt", version, about = "Generate, sort, verify and benchmark integer datasets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a synthetic dataset with original-index payloads.
    Gen {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        param: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        bits: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Payload width in bytes: 0, 4 or 8.
        #[arg(long, default_value_t = 8)]
        payload: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sort a dataset file.
    Sort {
        #[arg(long, default_value = "dtsort")]
        algo: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check the output against the reference mergesort.
        #[arg(long)]
        verify: bool,
        /// Print operation counters.
        #[arg(long)]
        instrument: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time every algorithm on the benchmark grid and write CSV.
    Bench {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 6)]
        repeat: usize,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        /// Output path; stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check a sorted file whose payloads are original indices: it must be
    /// sorted, stable and a permutation of the input it encodes, and `--algo`
    /// must reproduce it.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "dtsort")]
        algo: String,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Transpose a Zipf-skewed edge list by sorting on destination.
    TransposeDemo {
        #[arg(long, default_value_t = 1 << 20)]
        vertices: u64,
        #[arg(long, default_value_t = 1_000_000)]
        edges: usize,
        #[arg(long, default_value_t = 1.0)]
        skew: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Instrumented runs checked against the level and move bounds.
    Theory {
        #[arg(long, value_delimiter = ',', default_values_t = [100_000usize, 1_000_000, 10_000_000])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("isrt: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Gen { dist, param, n, bits, seed, payload, out } => {
            let family = Family::parse(&dist, &param).ok_or_else(|| anyhow!("unknown distribution {dist} {param}"))?;
            let keys = generate_keys(&DistSpec::new(family, n, bits, seed))?;
            let mut ds = Dataset::indexed(bits as u8, keys);
            match payload {
                0 => ds.payloads.clear(),
                4 | 8 => {}
                p => bail!("payload width {p} not in {{0, 4, 8}}"),
            }
            ds.payload_bytes = payload;
            ds.write_file(&out).with_context(|| format!("writing {}", out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sort { algo, input, threads, seed, verify, instrument, out } => {
            let algo = parse_algo(&algo)?;
            let ds = Dataset::read_file(&input).with_context(|| format!("reading {}", input.display()))?;
            let cfg = SortConfig::default().with_seed(seed).with_instrument(instrument);
            pool(thread_count(threads)).install(|| match ds.key_bits {
                32 => sort_cmd::<u32>(&ds, algo, &cfg, verify, out),
                _ => sort_cmd::<u64>(&ds, algo, &cfg, verify, out),
            })
        }
        Cmd::Bench { preset, repeat, n, seed, threads, csv } => {
            let preset = Preset::parse(&preset).ok_or_else(|| anyhow!("unknown preset {preset}"))?;
            let mut opts = BenchOptions::new(preset, n);
            opts.repeat = repeat;
            opts.seed = seed;
            opts.threads = thread_count(threads);
            let sink: Box<dyn Write> = match &csv {
                Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
                None => Box::new(io::stdout().lock()),
            };
            let mut w = csv_writer(sink);
            run_grid(&opts, |row| {
                w.serialize(row)?;
                w.flush()?;
                Ok(())
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { input, algo, threads, seed } => {
            let algo = parse_algo(&algo)?;
            let ds = Dataset::read_file(&input).with_context(|| format!("reading {}", input.display()))?;
            let cfg = SortConfig::default().with_seed(seed);
            pool(thread_count(threads)).install(|| match ds.key_bits {
                32 => verify_cmd::<u32>(&ds, algo, &cfg),
                _ => verify_cmd::<u64>(&ds, algo, &cfg),
            })
        }
        Cmd::TransposeDemo { vertices, edges, skew, seed, threads } => {
            let cfg = SortConfig::default().with_seed(seed);
            let rep = pool(thread_count(threads)).install(|| transpose_demo(vertices, edges, skew, seed, &cfg));
            match rep {
                Ok(r) => {
                    println!(
                        "transpose ok: {} edges, {} vertices, max in-degree {}, sort {:.2} ms",
                        r.edges, r.vertices, r.max_in_degree, r.sort_ms
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("transpose FAILED: {e}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Cmd::Theory { n, seed, threads } => {
            let rows = pool(thread_count(threads)).install(|| theory_check(&n, seed));
            print!("{}", render(&rows));
            let bad = rows.iter().filter(|r| !r.ok()).count();
            if bad > 0 {
                eprintln!("{bad} run(s) exceeded a bound");
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_algo(s: &str) -> Result<Algo> {
    Algo::parse(s).ok_or_else(|| anyhow!("unknown algorithm {s}; expected dtsort, plain or baseline"))
}

fn sort_cmd<K: SortKey>(ds: &Dataset, algo: Algo, cfg: &SortConfig, check: bool, out: Option<PathBuf>) -> Result<ExitCode> {
    let input = to_records::<K>(ds);
    let (sorted, ms, rep) = timed(algo, &input, cfg);
    eprintln!("{algo}: {} records in {ms:.2} ms", sorted.len());
    if let Some(r) = rep {
        eprintln!(
            "moves {} levels {} merge_out_copies {} base_case_records {} skipped_bits {} level_mass {:?}",
            r.moves, r.levels, r.merge_out_copies, r.base_case_records, r.skipped_bits, r.level_mass
        );
    }
    if check {
        if let Err(e) = verify(&sorted, &oracle_sorted(&input)) {
            eprintln!("verification FAILED: {e}");
            return Ok(ExitCode::FAILURE);
        }
        eprintln!("verified: sorted, stable, permutation");
    }
    if let Some(p) = out {
        to_dataset(&sorted, ds.key_bits, ds.payload_bytes)
            .write_file(&p)
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd<K: SortKey>(ds: &Dataset, algo: Algo, cfg: &SortConfig) -> Result<ExitCode> {
    if ds.payload_bytes == 0 {
        bail!("verify needs original-index payloads");
    }
    let claimed = to_records::<K>(ds);
    let mut input = vec![Record::new(K::from_u64(0), 0u64); claimed.len()];
    let mut seen = vec![false; claimed.len()];
    for r in &claimed {
        let i = r.payload as usize;
        if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
            eprintln!("verification FAILED: payloads are not a permutation of 0..{}", claimed.len());
            return Ok(ExitCode::FAILURE);
        }
        input[i] = *r;
    }
    let want = oracle_sorted(&input);
    let mut ok = true;
    if let Err(e) = verify(&claimed, &want) {
        eprintln!("file FAILED: {e}");
        ok = false;
    }
    let mut ours = input;
    run_algo(algo, &mut ours, cfg);
    if let Err(e) = verify(&ours, &want) {
        eprintln!("{algo} FAILED: {e}");
        ok = false;
    }
    if ok {
        eprintln!("verified: sorted, stable, permutation ({algo} agrees)");
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}
