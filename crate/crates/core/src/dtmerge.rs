//! Dovetail merging of one MSD zone.
//!
//! A zone holds a sorted light bucket `B0` followed by heavy buckets
//! `B1..Bm`, each a run of one key, keys strictly increasing. The heavy keys
//! cut `B0` into `m + 1` fragments that must be interleaved with the heavy
//! runs. The smaller side is copied out to scratch; the larger side is moved
//! inside the zone bucket by bucket, each record written at most twice; the
//! scratch side is then copied straight to its final positions.

use thiserror::Error;

use crate::par::{copy, copy_disjoint, shift_block_left, shift_block_right};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MergeError {
    #[error("scratch holds {got} records, merge needs {need}")]
    ScratchTooSmall { got: usize, need: usize },
    #[error("zone has {zone} records but light + heavy lengths sum to {sum}")]
    LengthMismatch { zone: usize, sum: usize },
}

/// One heavy bucket: `len` records all carrying `key`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeavyRun {
    pub key: u64,
    pub len: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MergeStats {
    /// Records copied from the zone to scratch.
    pub out_copies: u64,
    /// Writes made while moving buckets inside the zone.
    pub in_array_moves: u64,
    /// Records copied from scratch (or the other buffer) into the zone.
    pub copy_back: u64,
}

impl MergeStats {
    pub fn writes(&self) -> u64 {
        self.out_copies + self.in_array_moves + self.copy_back
    }
}

/// Final layout of a zone: insert points of the heavy keys in `B0` and the
/// start of every heavy bucket after interleaving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeLayout {
    pub light_len: usize,
    pub heavy_lens: Vec<usize>,
    /// `p[i]`: number of light records with key below heavy key `i`.
    pub insert_points: Vec<usize>,
    /// `q[i] = p[i] + Σ_{j<i} heavy_lens[j]`.
    pub dest_starts: Vec<usize>,
}

impl MergeLayout {
    pub fn new<T>(light: &[T], heavy: &[HeavyRun], key: impl Fn(&T) -> u64) -> Self {
        let mut insert_points = Vec::with_capacity(heavy.len());
        let mut dest_starts = Vec::with_capacity(heavy.len());
        let mut before = 0;
        for h in heavy {
            let p = light.partition_point(|r| key(r) < h.key);
            insert_points.push(p);
            dest_starts.push(p + before);
            before += h.len;
        }
        MergeLayout {
            light_len: light.len(),
            heavy_lens: heavy.iter().map(|h| h.len).collect(),
            insert_points,
            dest_starts,
        }
    }

    /// Light fragment `j` as (source start within `B0`, length, destination).
    fn fragment(&self, j: usize) -> (usize, usize, usize) {
        let lo = if j == 0 { 0 } else { self.insert_points[j - 1] };
        let hi = self.insert_points.get(j).copied().unwrap_or(self.light_len);
        let heavy_before: usize = if j == 0 {
            0
        } else {
            self.dest_starts[j - 1] - self.insert_points[j - 1] + self.heavy_lens[j - 1]
        };
        (lo, hi - lo, lo + heavy_before)
    }

    fn heavy_total(&self) -> usize {
        self.heavy_lens.iter().sum()
    }
}

/// Interleaves the zone's light bucket with its heavy buckets in place.
///
/// `scratch` must hold at least `min(light_len, Σ heavy lens)` records; its
/// contents are clobbered.
pub fn dt_merge<T, F>(
    zone: &mut [T],
    light_len: usize,
    heavy: &[HeavyRun],
    scratch: &mut [T],
    key: F,
    grain: usize,
) -> Result<MergeStats, MergeError>
where
    T: Copy + Send + Sync,
    F: Fn(&T) -> u64,
{
    let heavy_total: usize = heavy.iter().map(|h| h.len).sum();
    if light_len + heavy_total != zone.len() {
        return Err(MergeError::LengthMismatch {
            zone: zone.len(),
            sum: light_len + heavy_total,
        });
    }
    let need = light_len.min(heavy_total);
    if scratch.len() < need {
        return Err(MergeError::ScratchTooSmall { got: scratch.len(), need });
    }
    if heavy.is_empty() || light_len == 0 {
        return Ok(MergeStats::default());
    }
    let layout = MergeLayout::new(&zone[..light_len], heavy, key);
    let mut stats = MergeStats::default();

    if heavy_total >= light_len {
        copy(&zone[..light_len], &mut scratch[..light_len], grain);
        stats.out_copies = light_len as u64;
        stats.in_array_moves = move_heavy_left(zone, &layout, grain);
        for j in 0..=heavy.len() {
            let (lo, len, dest) = layout.fragment(j);
            if len > 0 {
                copy(&scratch[lo..lo + len], &mut zone[dest..dest + len], grain);
            }
        }
        stats.copy_back = light_len as u64;
    } else {
        copy(&zone[light_len..], &mut scratch[..heavy_total], grain);
        stats.out_copies = heavy_total as u64;
        stats.in_array_moves = move_light_right(zone, &layout, grain);
        stats.copy_back = place_heavy(zone, &layout, &scratch[..heavy_total], grain);
    }
    Ok(stats)
}

/// Merge variant for a zone whose heavy buckets still sit in the other
/// buffer. `zone[..light_len]` holds the sorted light bucket and
/// `heavy_src[light_len..]` the heavy runs; the rest of `zone` is dead.
/// Only the light fragments move inside `zone`; heavy runs are copied in.
pub fn dt_merge_split<T, F>(
    zone: &mut [T],
    light_len: usize,
    heavy: &[HeavyRun],
    heavy_src: &[T],
    key: F,
    grain: usize,
) -> Result<MergeStats, MergeError>
where
    T: Copy + Send + Sync,
    F: Fn(&T) -> u64,
{
    let heavy_total: usize = heavy.iter().map(|h| h.len).sum();
    if light_len + heavy_total != zone.len() || heavy_src.len() != zone.len() {
        return Err(MergeError::LengthMismatch {
            zone: zone.len(),
            sum: light_len + heavy_total,
        });
    }
    let layout = MergeLayout::new(&zone[..light_len], heavy, key);
    let in_array_moves = move_light_right(zone, &layout, grain);
    let copy_back = place_heavy(zone, &layout, &heavy_src[light_len..], grain);
    Ok(MergeStats {
        out_copies: 0,
        in_array_moves,
        copy_back,
    })
}

/// Heavy buckets, left to right, to their destinations. Light records are
/// already backed up, and every earlier bucket has reached its final place,
/// so anything left of a bucket's current start is free to overwrite.
fn move_heavy_left<T: Copy + Send + Sync>(zone: &mut [T], layout: &MergeLayout, grain: usize) -> u64 {
    let mut writes = 0;
    let mut cur = layout.light_len;
    for (i, &len) in layout.heavy_lens.iter().enumerate() {
        let dest = layout.dest_starts[i];
        debug_assert!(dest <= cur);
        if dest + len <= cur {
            if dest != cur {
                copy_disjoint(zone, cur, dest, len, grain);
                writes += len as u64;
            }
        } else {
            writes += shift_block_left(&mut zone[dest..cur + len], len, grain);
        }
        cur += len;
    }
    writes
}

/// Light fragments, right to left, to their destinations. Heavy records are
/// out of the zone and every later fragment has already moved.
fn move_light_right<T: Copy + Send + Sync>(zone: &mut [T], layout: &MergeLayout, grain: usize) -> u64 {
    let mut writes = 0;
    for j in (0..=layout.heavy_lens.len()).rev() {
        let (cur, len, dest) = layout.fragment(j);
        if len == 0 || dest == cur {
            continue;
        }
        debug_assert!(dest > cur);
        if cur + len <= dest {
            copy_disjoint(zone, cur, dest, len, grain);
            writes += len as u64;
        } else {
            writes += shift_block_right(&mut zone[cur..dest + len], len, grain);
        }
    }
    writes
}

/// Copies the concatenated heavy runs in `src` to their final starts.
fn place_heavy<T: Copy + Send + Sync>(zone: &mut [T], layout: &MergeLayout, src: &[T], grain: usize) -> u64 {
    debug_assert_eq!(src.len(), layout.heavy_total());
    let mut off = 0;
    for (i, &len) in layout.heavy_lens.iter().enumerate() {
        let q = layout.dest_starts[i];
        copy(&src[off..off + len], &mut zone[q..q + len], grain);
        off += len;
    }
    off as u64
}
