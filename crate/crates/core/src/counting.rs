//! Stable blocked counting sort.
//!
//! Three phases: per-block histograms, a column-major exclusive prefix sum
//! over the blocks × buckets matrix, and a per-block scatter. Every
//! (block, bucket) pair owns one contiguous destination range, so the
//! scatter needs no synchronization and its result does not depend on the
//! number of blocks.

use rayon::prelude::*;
use thiserror::Error;

use crate::config::SortConfig;
use crate::par::SendPtr;

/// Matrices at most this large are scanned sequentially.
const SEQUENTIAL_SCAN_ENTRIES: usize = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountingError {
    #[error("bucket function returned {bucket} for a sort with {buckets} buckets")]
    BucketOutOfRange { bucket: usize, buckets: usize },
    #[error("output buffer holds {got} records, input has {want}")]
    OutputLength { got: usize, want: usize },
}

/// Occurrence counts per (block, bucket) and the matching destination offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountMatrix {
    pub blocks: usize,
    pub buckets: usize,
    pub block_len: usize,
    counts: Vec<usize>,
    offsets: Vec<usize>,
    totals: Vec<usize>,
}

impl CountMatrix {
    pub fn count(&self, block: usize, bucket: usize) -> usize {
        self.counts[block * self.buckets + bucket]
    }

    /// Where block `block` starts writing its records of bucket `bucket`.
    pub fn offset(&self, block: usize, bucket: usize) -> usize {
        self.offsets[block * self.buckets + bucket]
    }

    pub fn bucket_total(&self, bucket: usize) -> usize {
        self.totals[bucket]
    }

    /// Bucket start positions, with the input length appended.
    pub fn boundaries(&self) -> Vec<usize> {
        let mut b = Vec::with_capacity(self.buckets + 1);
        let mut acc = 0;
        b.push(0);
        for &t in &self.totals {
            acc += t;
            b.push(acc);
        }
        b
    }

    /// Phases 1 and 2: counts every block, then prefix-sums column-major.
    pub fn build<T, F>(
        input: &[T],
        buckets: usize,
        blocks: usize,
        bucket_of: &F,
        parallel: bool,
    ) -> Result<Self, CountingError>
    where
        T: Sync,
        F: Fn(&T) -> usize + Sync,
    {
        let n = input.len();
        let blocks = blocks.max(1);
        let block_len = n.div_ceil(blocks).max(1);
        let mut counts = vec![0usize; blocks * buckets];

        let count_block = |(j, row): (usize, &mut [usize])| -> Result<(), CountingError> {
            let lo = (j * block_len).min(n);
            let hi = (lo + block_len).min(n);
            for r in &input[lo..hi] {
                let b = bucket_of(r);
                if b >= buckets {
                    return Err(CountingError::BucketOutOfRange { bucket: b, buckets });
                }
                row[b] += 1;
            }
            Ok(())
        };
        if buckets > 0 {
            if parallel && blocks > 1 {
                counts.par_chunks_mut(buckets).enumerate().try_for_each(count_block)?;
            } else {
                counts.chunks_mut(buckets).enumerate().try_for_each(count_block)?;
            }
        } else if n > 0 {
            return Err(CountingError::BucketOutOfRange { bucket: bucket_of(&input[0]), buckets });
        }

        let mut offsets = vec![0usize; blocks * buckets];
        let totals: Vec<usize>;
        if !parallel || blocks * buckets <= SEQUENTIAL_SCAN_ENTRIES {
            let mut t = vec![0usize; buckets];
            let mut acc = 0;
            for i in 0..buckets {
                for j in 0..blocks {
                    offsets[j * buckets + i] = acc;
                    acc += counts[j * buckets + i];
                }
                t[i] = acc - offsets[i];
            }
            totals = t;
        } else {
            totals = (0..buckets)
                .into_par_iter()
                .map(|i| (0..blocks).map(|j| counts[j * buckets + i]).sum())
                .collect();
            let mut starts = Vec::with_capacity(buckets);
            let mut acc = 0;
            for &t in &totals {
                starts.push(acc);
                acc += t;
            }
            // blocks are rows; each row needs the running sum of the rows above it
            let mut running = starts;
            for j in 0..blocks {
                let row = &mut offsets[j * buckets..(j + 1) * buckets];
                let crow = &counts[j * buckets..(j + 1) * buckets];
                row.par_iter_mut()
                    .zip(running.par_iter_mut())
                    .zip(crow.par_iter())
                    .for_each(|((o, r), c)| {
                        *o = *r;
                        *r += c;
                    });
            }
        }

        Ok(CountMatrix {
            blocks,
            buckets,
            block_len,
            counts,
            offsets,
            totals,
        })
    }
}

/// Stably distributes `input` into `out` by `bucket_of`.
///
/// Returns the `buckets + 1` bucket boundaries in `out`. A bucket id outside
/// `0..buckets` is reported as an error and `out` is left unspecified.
pub fn counting_sort<T, F>(
    input: &[T],
    out: &mut [T],
    buckets: usize,
    bucket_of: F,
    cfg: &SortConfig,
) -> Result<Vec<usize>, CountingError>
where
    T: Copy + Send + Sync,
    F: Fn(&T) -> usize + Sync,
{
    let blocks = cfg
        .block_policy
        .block_count(input.len(), buckets, rayon::current_num_threads());
    counting_sort_blocks(input, out, buckets, &bucket_of, blocks, input.len() >= cfg.parallel_grain)
}

pub(crate) fn counting_sort_blocks<T, F>(
    input: &[T],
    out: &mut [T],
    buckets: usize,
    bucket_of: &F,
    blocks: usize,
    parallel: bool,
) -> Result<Vec<usize>, CountingError>
where
    T: Copy + Send + Sync,
    F: Fn(&T) -> usize + Sync,
{
    let n = input.len();
    if out.len() != n {
        return Err(CountingError::OutputLength { got: out.len(), want: n });
    }
    if n == 0 {
        return Ok(vec![0; buckets + 1]);
    }
    let m = CountMatrix::build(input, buckets, blocks, bucket_of, parallel)?;
    let dst = SendPtr(out.as_mut_ptr());
    let scatter = |j: usize| {
        let lo = (j * m.block_len).min(n);
        let hi = (lo + m.block_len).min(n);
        let mut cursor = m.offsets[j * buckets..(j + 1) * buckets].to_vec();
        for r in &input[lo..hi] {
            let b = bucket_of(r);
            // SAFETY: cursor[b] walks the range [offset(j, b), offset(j, b) +
            // count(j, b)), which no other block writes to and which lies
            // inside `out` because the offsets are a prefix sum over n counts.
            unsafe { dst.write(cursor[b], *r) };
            cursor[b] += 1;
        }
    };
    if parallel && m.blocks > 1 {
        (0..m.blocks).into_par_iter().for_each(scatter);
    } else {
        (0..m.blocks).for_each(scatter);
    }
    Ok(m.boundaries())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::Record;
    use proptest::prelude::*;

    fn reference(input: &[Record<u32, u64>], buckets: usize) -> (Vec<Record<u32, u64>>, Vec<usize>) {
        let mut out = Vec::new();
        let mut bounds = vec![0];
        for b in 0..buckets {
            out.extend(input.iter().filter(|r| r.key as usize == b));
            bounds.push(out.len());
        }
        (out, bounds)
    }

    fn recs(keys: &[u32]) -> Vec<Record<u32, u64>> {
        keys.iter().enumerate().map(|(i, &k)| Record::new(k, i as u64)).collect()
    }

    #[test]
    fn small_example_is_stable() {
        let input = recs(&[2, 0, 1, 0]);
        let mut out = vec![Record::default(); 4];
        let b = counting_sort(&input, &mut out, 3, |r| r.key as usize, &SortConfig::default()).unwrap();
        assert_eq!(b, vec![0, 2, 3, 4]);
        let keys: Vec<u32> = out.iter().map(|r| r.key).collect();
        let pay: Vec<u64> = out.iter().map(|r| r.payload).collect();
        assert_eq!(keys, vec![0, 0, 1, 2]);
        assert_eq!(pay, vec![1, 3, 2, 0]);
    }

    #[test]
    fn single_bucket_is_identity() {
        let input = recs(&[9, 3, 7, 1, 1]);
        let mut out = vec![Record::default(); 5];
        let b = counting_sort(&input, &mut out, 1, |_| 0, &SortConfig::default()).unwrap();
        assert_eq!(out, input);
        assert_eq!(b, vec![0, 5]);
    }

    #[test]
    fn empty_input() {
        let input: Vec<Record<u32, u64>> = vec![];
        let mut out = vec![];
        let b = counting_sort(&input, &mut out, 4, |r| r.key as usize, &SortConfig::default()).unwrap();
        assert_eq!(b, vec![0; 5]);
    }

    #[test]
    fn out_of_range_bucket_is_an_error() {
        let input = recs(&[0, 1, 5]);
        let mut out = vec![Record::default(); 3];
        let err = counting_sort(&input, &mut out, 3, |r| r.key as usize, &SortConfig::default()).unwrap_err();
        assert_eq!(err, CountingError::BucketOutOfRange { bucket: 5, buckets: 3 });
    }

    #[test]
    fn matrix_offsets_are_column_major_prefix_sums() {
        let keys: Vec<u32> = (0..40).map(|i| (i * 7 % 5) as u32).collect();
        let input = recs(&keys);
        let m = CountMatrix::build(&input, 5, 4, &|r: &Record<u32, u64>| r.key as usize, false).unwrap();
        let mut acc = 0;
        for i in 0..5 {
            for j in 0..4 {
                assert_eq!(m.offset(j, i), acc);
                acc += m.count(j, i);
            }
        }
        assert_eq!(acc, 40);
    }

    proptest! {
        #[test]
        fn matches_reference_for_any_block_count(
            keys in proptest::collection::vec(0u32..37, 0..3000),
            blocks in 1usize..40,
            parallel in any::<bool>(),
        ) {
            let input = recs(&keys);
            let mut out = vec![Record::default(); input.len()];
            let b = counting_sort_blocks(&input, &mut out, 37, &|r: &Record<u32, u64>| r.key as usize, blocks, parallel).unwrap();
            let (want, wb) = reference(&input, 37);
            prop_assert_eq!(out, want);
            prop_assert_eq!(b, wb);
        }
    }
}
