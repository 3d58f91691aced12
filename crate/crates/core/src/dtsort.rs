//! Recursive MSD driver shared by the dovetail sort and the plain MSD sort.
//!
//! Every call works on a pair of equally long buffer segments: `src` holds
//! the subproblem, `other` is the matching range of the second buffer. The
//! distribution always writes into `other`; the frame's `in_place` flag says
//! which of the two must hold the sorted result when the call returns.
//! Children are told to end in the parent's target, so no extra copy-back
//! pass is needed anywhere.

use rayon::prelude::*;

use crate::config::{ConfigError, SortConfig};
use crate::counting::counting_sort;
use crate::dtmerge::{dt_merge, dt_merge_split, HeavyRun, MergeStats};
use crate::instrument::InstrumentReport;
use crate::record::{Payload, Record, SortKey};
use crate::rng::{rng_stream, stream_id};
use crate::sampler::{
    detect_heavy, draw_sample_count, get_bucket_id, plan_buckets, plan_overflow, BucketKind,
    BucketPlan,
};

/// Sorts `data` stably by key with heavy-key detection and dovetail merging.
///
/// Returns the operation counters when `cfg.instrument` is set.
pub fn dt_sort<K: SortKey, P: Payload>(
    data: &mut [Record<K, P>],
    cfg: &SortConfig,
) -> Result<Option<InstrumentReport>, ConfigError> {
    run(data, cfg, true)
}

/// Sorts `data` stably by key with the plain MSD framework: distribute by
/// the top digit, recurse on every bucket, no sampling.
pub fn plain_msd_sort<K: SortKey, P: Payload>(
    data: &mut [Record<K, P>],
    cfg: &SortConfig,
) -> Result<Option<InstrumentReport>, ConfigError> {
    run(data, cfg, false)
}

fn run<K: SortKey, P: Payload>(
    data: &mut [Record<K, P>],
    cfg: &SortConfig,
    detect: bool,
) -> Result<Option<InstrumentReport>, ConfigError> {
    cfg.validate(K::BITS)?;
    let ctx = Ctx {
        cfg,
        key_bits: K::BITS,
        n_original: data.len(),
        detect,
    };
    let root = Frame {
        consumed: 0,
        depth: 0,
        offset: 0,
        in_place: true,
    };
    let report = if data.len() < 2 {
        InstrumentReport::default()
    } else {
        let mut tmp = data.to_vec();
        sort_rec(data, &mut tmp, root, &ctx)
    };
    Ok(cfg.instrument.then_some(report))
}

struct Ctx<'a> {
    cfg: &'a SortConfig,
    key_bits: u32,
    n_original: usize,
    detect: bool,
}

/// Position of one subproblem in the recursion.
#[derive(Clone, Copy, Debug)]
struct Frame {
    /// Leading key bits already sorted above this call.
    consumed: u32,
    depth: usize,
    /// Start of the subproblem in the whole array; names its random stream.
    offset: usize,
    /// Result must end in `src` (true) or in `other` (false).
    in_place: bool,
}

/// One zone after distribution: `light_len` light records, then heavy runs.
struct ZoneSpan {
    start: usize,
    light_len: usize,
    heavy: Vec<HeavyRun>,
}

impl ZoneSpan {
    fn len(&self) -> usize {
        self.light_len + self.heavy.iter().map(|h| h.len).sum::<usize>()
    }
}

#[inline(always)]
fn key_of<K: SortKey, P>(r: &Record<K, P>) -> u64 {
    r.key.to_u64()
}

fn base_sort<K: SortKey, P: Payload>(src: &mut [Record<K, P>], other: &mut [Record<K, P>], in_place: bool) {
    if in_place {
        src.sort_by_key(|r| r.key);
    } else {
        other.copy_from_slice(src);
        other.sort_by_key(|r| r.key);
    }
}

fn sort_rec<K: SortKey, P: Payload>(
    src: &mut [Record<K, P>],
    other: &mut [Record<K, P>],
    frame: Frame,
    ctx: &Ctx<'_>,
) -> InstrumentReport {
    let cfg = ctx.cfg;
    let n = src.len();
    let mut rep = InstrumentReport::default();
    if n == 0 {
        return rep;
    }
    if frame.consumed == ctx.key_bits {
        // every digit sorted: all keys equal
        if !frame.in_place {
            other.copy_from_slice(src);
            rep.moves += n as u64;
        }
        return rep;
    }
    let mut consumed = frame.consumed;
    let remaining = ctx.key_bits - consumed;
    let gamma = cfg.gamma_for(n, remaining, ctx.key_bits);
    if n < cfg.threshold(gamma).max(2) {
        base_sort(src, other, frame.in_place);
        rep.base_case_records += n as u64;
        return rep;
    }

    let plan = build_plan(src, frame, gamma, &mut consumed, ctx, &mut rep);
    let bounds = counting_sort(src, other, plan.bucket_count(), |r| get_bucket_id(key_of(r), &plan), cfg)
        .expect("bucket plan covers every key of the subproblem");

    let mut zones = Vec::with_capacity(plan.zones());
    let mut heavy_records = 0;
    for z in 0..plan.zones() {
        let light = plan.light_lookup[z] as usize;
        let heavy: Vec<HeavyRun> = (light + 1..light + 1 + plan.heavy_in_zone(z))
            .map(|id| {
                let BucketKind::Heavy(k) = plan.descriptors[id].kind else {
                    unreachable!("heavy buckets follow their zone's light bucket")
                };
                HeavyRun {
                    key: k,
                    len: bounds[id + 1] - bounds[id],
                }
            })
            .collect();
        heavy_records += heavy.iter().map(|h| h.len).sum::<usize>();
        zones.push(ZoneSpan {
            start: bounds[light],
            light_len: bounds[light + 1] - bounds[light],
            heavy,
        });
    }
    rep.record_distribution(frame.depth, n, heavy_records);
    let overflow_start = plan.overflow_id().map_or(n, |id| bounds[id]);
    if frame.depth == 0 {
        rep.overflow_records = (n - overflow_start) as u64;
    }

    // carve both buffers into per-zone segments
    let mut tasks = Vec::with_capacity(zones.len());
    let (mut s_rest, mut o_rest) = (src, other);
    let mut at = 0;
    for zone in zones {
        debug_assert_eq!(zone.start, at);
        let len = zone.len();
        let (s, s_tail) = std::mem::take(&mut s_rest).split_at_mut(len);
        let (o, o_tail) = std::mem::take(&mut o_rest).split_at_mut(len);
        s_rest = s_tail;
        o_rest = o_tail;
        at += len;
        tasks.push((s, o, zone));
    }
    debug_assert_eq!(at, overflow_start);

    let child_frame = |zone: &ZoneSpan| Frame {
        consumed: consumed + plan.gamma,
        depth: frame.depth + 1,
        offset: frame.offset + zone.start,
        in_place: !frame.in_place,
    };
    let process = |(s, o, zone): (&mut [Record<K, P>], &mut [Record<K, P>], ZoneSpan)| {
        let mut r = InstrumentReport::default();
        let l = zone.light_len;
        // distributed data lives in `o`; the child sorts it into the parent's target
        r.absorb(sort_rec(&mut o[..l], &mut s[..l], child_frame(&zone), ctx));
        if !zone.heavy.is_empty() {
            let stats = if frame.in_place {
                dt_merge_split(s, l, &zone.heavy, o, key_of, cfg.parallel_grain)
            } else if l > 0 {
                dt_merge(o, l, &zone.heavy, s, key_of, cfg.parallel_grain)
            } else {
                Ok(MergeStats::default())
            }
            .expect("zone layout matches the distribution");
            r.moves += stats.writes();
            r.merge_out_copies += stats.out_copies;
            r.merge_in_array_moves += stats.in_array_moves;
        }
        r
    };
    let merged = if n >= cfg.parallel_grain {
        tasks
            .into_par_iter()
            .map(process)
            .reduce(InstrumentReport::default, |mut a, b| {
                a.absorb(b);
                a
            })
    } else {
        tasks.into_iter().map(process).fold(InstrumentReport::default(), |mut a, b| {
            a.absorb(b);
            a
        })
    };
    rep.absorb(merged);

    // overflow bucket: comparison-sorted once, never recursed
    if !s_rest.is_empty() {
        base_sort(o_rest, s_rest, !frame.in_place);
        rep.base_case_records += s_rest.len() as u64;
    }
    rep
}

/// Step 1: sampling, heavy detection, and (at the root) overflow planning.
/// Falls back to an all-light plan when detection is off or the sample
/// would be a large fraction of the subproblem.
fn build_plan<K: SortKey, P: Payload>(
    src: &[Record<K, P>],
    frame: Frame,
    gamma: u32,
    consumed: &mut u32,
    ctx: &Ctx<'_>,
    rep: &mut InstrumentReport,
) -> BucketPlan {
    let n = src.len();
    let count = ctx.cfg.sample_count(n, ctx.n_original, gamma);
    if !ctx.detect || n < 2 * count {
        return plan_buckets(&[], gamma, ctx.key_bits - *consumed - gamma, None);
    }
    let mut rng = rng_stream(ctx.cfg.seed, stream_id(&[frame.depth as u64, frame.offset as u64]));
    let samples = draw_sample_count(src, key_of, count, &mut rng);
    let heavy = detect_heavy(&samples, ctx.n_original);
    let mut overflow = None;
    if frame.depth == 0 {
        let (skip, threshold) = plan_overflow(&samples, ctx.key_bits, gamma);
        *consumed += skip;
        rep.skipped_bits = skip;
        overflow = threshold;
    }
    plan_buckets(&heavy, gamma, ctx.key_bits - *consumed - gamma, overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::with_index;

    fn stable_ref<K: SortKey>(v: &[Record<K, u64>]) -> Vec<Record<K, u64>> {
        let mut w = v.to_vec();
        w.sort_by_key(|r| r.key);
        w
    }

    #[test]
    fn tiny_example() {
        let mut v = with_index(&[3u32, 1, 2, 1]);
        dt_sort(&mut v, &SortConfig::default()).unwrap();
        assert_eq!(v.iter().map(|r| (r.key, r.payload)).collect::<Vec<_>>(), vec![(1, 1), (1, 3), (2, 2), (3, 0)]);
    }

    #[test]
    fn sorted_input_unchanged() {
        let keys: Vec<u32> = (0..100_000).map(|i| i / 3).collect();
        let mut v = with_index(&keys);
        let before = v.clone();
        dt_sort(&mut v, &SortConfig::default()).unwrap();
        assert_eq!(v, before);
    }

    #[test]
    fn all_equal_is_one_level() {
        let mut v = with_index(&vec![12345u32; 1_000_000]);
        let before = v.clone();
        let rep = dt_sort(&mut v, &SortConfig::default().with_instrument(true)).unwrap().unwrap();
        assert_eq!(v, before);
        assert_eq!(rep.levels, 1);
        assert_eq!(rep.mass_at(1), 0);
        assert_eq!(rep.heavy_at(0), 1_000_000);
    }

    #[test]
    fn small_input_is_pure_base_case() {
        let keys: Vec<u64> = (0..1000u64).map(|i| i.wrapping_mul(0x9e3779b97f4a7c15)).collect();
        let mut v = with_index(&keys);
        let want = stable_ref(&v);
        let rep = plain_msd_sort(&mut v, &SortConfig::default().with_instrument(true)).unwrap().unwrap();
        assert_eq!(v, want);
        assert_eq!(rep.levels, 0);
        assert_eq!(rep.moves, 0);
        assert_eq!(rep.base_case_records, 1000);
    }

    #[test]
    fn mixed_heavy_and_light() {
        // every third key is 7, the rest spread out; forces merges at the root
        let keys: Vec<u32> = (0..200_000u32)
            .map(|i| if i % 3 == 0 { 7 } else { i.wrapping_mul(2654435761) })
            .collect();
        let mut v = with_index(&keys);
        let want = stable_ref(&v);
        let rep = dt_sort(&mut v, &SortConfig::default().with_instrument(true)).unwrap().unwrap();
        assert_eq!(v, want);
        assert!(rep.heavy_at(0) >= 66_000);
    }

    #[test]
    fn empty_and_single() {
        let mut v: Vec<Record<u32, u64>> = vec![];
        dt_sort(&mut v, &SortConfig::default()).unwrap();
        let mut v = with_index(&[5u32]);
        dt_sort(&mut v, &SortConfig::default()).unwrap();
        assert_eq!(v[0].key, 5);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut v = with_index(&[5u32, 1]);
        let cfg = SortConfig::default().with_gamma(crate::config::GammaPolicy::Fixed(0));
        assert!(dt_sort(&mut v, &cfg).is_err());
    }
}
