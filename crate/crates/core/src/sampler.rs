//! Heavy-key detection and bucket planning for one subproblem.
//!
//! Buckets are laid out zone by zone: each MSD zone gets one light bucket,
//! immediately followed by one bucket per heavy key of that zone in key
//! order. An optional overflow bucket comes last. Sorting records by bucket
//! id therefore never contradicts key order across zones, and each zone's
//! buckets are adjacent for the merge that follows recursion.

use rand::Rng;

use crate::config::ceil_log2;
use crate::rng::mix64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BucketKind {
    Light,
    Heavy(u64),
    Overflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BucketDescriptor {
    pub id: usize,
    pub zone: usize,
    pub kind: BucketKind,
}

/// Open-addressing map from heavy key to bucket id. At most `2^γ` entries;
/// lookups never allocate.
#[derive(Clone, Debug, Default)]
pub struct HeavyMap {
    slots: Vec<(u64, u32)>,
    shift: u32,
    len: usize,
}

const EMPTY: u32 = u32::MAX;

impl HeavyMap {
    fn with_entries(entries: &[(u64, u32)]) -> Self {
        if entries.is_empty() {
            return HeavyMap::default();
        }
        let cap = (entries.len() * 2).next_power_of_two().max(4);
        let bits = cap.trailing_zeros();
        let mut slots = vec![(0u64, EMPTY); cap];
        for &(k, v) in entries {
            let mut i = (mix64(k) >> (64 - bits)) as usize;
            while slots[i].1 != EMPTY {
                i = (i + 1) & (cap - 1);
            }
            slots[i] = (k, v);
        }
        HeavyMap {
            slots,
            shift: 64 - bits,
            len: entries.len(),
        }
    }

    #[inline]
    pub fn get(&self, key: u64) -> Option<usize> {
        if self.len == 0 {
            return None;
        }
        let mask = self.slots.len() - 1;
        let mut i = (mix64(key) >> self.shift) as usize;
        loop {
            let (k, v) = self.slots[i];
            if v == EMPTY {
                return None;
            }
            if k == key {
                return Some(v as usize);
            }
            i = (i + 1) & mask;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Bucket layout of one subproblem together with the constant-time lookup
/// structures used while distributing.
#[derive(Clone, Debug)]
pub struct BucketPlan {
    pub descriptors: Vec<BucketDescriptor>,
    pub heavy_map: HeavyMap,
    /// Light bucket id of every zone.
    pub light_lookup: Vec<u32>,
    /// Right shift that brings the current digit to the low bits.
    pub digit_shift: u32,
    pub gamma: u32,
    /// Keys at or above this value go to the overflow bucket.
    pub overflow_threshold: Option<u64>,
}

impl BucketPlan {
    pub fn bucket_count(&self) -> usize {
        self.descriptors.len()
    }

    pub fn zones(&self) -> usize {
        1 << self.gamma
    }

    #[inline(always)]
    pub fn zone_of(&self, key: u64) -> usize {
        ((key >> self.digit_shift) & ((1u64 << self.gamma) - 1)) as usize
    }

    pub fn overflow_id(&self) -> Option<usize> {
        self.overflow_threshold.map(|_| self.descriptors.len() - 1)
    }

    /// Number of heavy buckets that follow zone `z`'s light bucket.
    pub fn heavy_in_zone(&self, z: usize) -> usize {
        let start = self.light_lookup[z] as usize + 1;
        let end = if z + 1 < self.zones() {
            self.light_lookup[z + 1] as usize
        } else {
            self.descriptors.len() - self.overflow_threshold.is_some() as usize
        };
        end - start
    }
}

/// Bucket id of `key`: overflow first, then the heavy map, then the zone's
/// light bucket.
#[inline(always)]
pub fn get_bucket_id(key: u64, plan: &BucketPlan) -> usize {
    if let Some(t) = plan.overflow_threshold {
        if key >= t {
            return plan.descriptors.len() - 1;
        }
    }
    if let Some(id) = plan.heavy_map.get(key) {
        return id;
    }
    plan.light_lookup[plan.zone_of(key)] as usize
}

/// Draws `min(n', 2^γ · ceil(log2 n))` keys uniformly with replacement and
/// returns them sorted.
pub fn draw_samples<T, R: Rng>(
    records: &[T],
    key: impl Fn(&T) -> u64,
    n_original: usize,
    gamma: u32,
    rng: &mut R,
) -> Vec<u64> {
    let count = ((1usize << gamma) * ceil_log2(n_original).max(1)).min(records.len());
    draw_sample_count(records, key, count, rng)
}

pub(crate) fn draw_sample_count<T, R: Rng>(
    records: &[T],
    key: impl Fn(&T) -> u64,
    count: usize,
    rng: &mut R,
) -> Vec<u64> {
    assert!(!records.is_empty(), "cannot sample an empty subproblem");
    let n = records.len();
    let mut s: Vec<u64> = (0..count).map(|_| key(&records[rng.gen_range(0..n)])).collect();
    s.sort();
    s
}

/// Keys seen at least twice among every `ceil(log2 n)`-th sample.
pub fn detect_heavy(samples: &[u64], n_original: usize) -> Vec<u64> {
    let stride = ceil_log2(n_original).max(1);
    let mut heavy: Vec<u64> = Vec::new();
    let mut prev: Option<u64> = None;
    for &k in samples.iter().step_by(stride) {
        if prev == Some(k) && heavy.last() != Some(&k) {
            heavy.push(k);
        }
        prev = Some(k);
    }
    heavy
}

/// Builds the bucket layout by merging the light list `(z, -)` for every
/// zone with the heavy list `(msd(k), k)`; ids are assigned in merged order.
pub fn plan_buckets(heavy_keys: &[u64], gamma: u32, digit_shift: u32, overflow: Option<u64>) -> BucketPlan {
    debug_assert!(heavy_keys.windows(2).all(|w| w[0] < w[1]));
    let zones = 1usize << gamma;
    let mask = (1u64 << gamma) - 1;
    let zone_of = |k: u64| ((k >> digit_shift) & mask) as usize;

    let mut heavy: Vec<(usize, u64)> = heavy_keys
        .iter()
        .filter(|&&k| overflow.is_none_or(|t| k < t))
        .map(|&k| (zone_of(k), k))
        .collect();
    heavy.sort_unstable();

    let mut descriptors = Vec::with_capacity(zones + heavy.len() + 1);
    let mut light_lookup = Vec::with_capacity(zones);
    let mut entries = Vec::with_capacity(heavy.len());
    let mut h = heavy.into_iter().peekable();
    for z in 0..zones {
        light_lookup.push(descriptors.len() as u32);
        descriptors.push(BucketDescriptor {
            id: descriptors.len(),
            zone: z,
            kind: BucketKind::Light,
        });
        while let Some(&(hz, k)) = h.peek() {
            if hz != z {
                break;
            }
            entries.push((k, descriptors.len() as u32));
            descriptors.push(BucketDescriptor {
                id: descriptors.len(),
                zone: z,
                kind: BucketKind::Heavy(k),
            });
            h.next();
        }
    }
    if overflow.is_some() {
        descriptors.push(BucketDescriptor {
            id: descriptors.len(),
            zone: zones,
            kind: BucketKind::Overflow,
        });
    }
    BucketPlan {
        descriptors,
        heavy_map: HeavyMap::with_entries(&entries),
        light_lookup,
        digit_shift,
        gamma,
        overflow_threshold: overflow,
    }
}

/// Decides how many leading bits to skip from the largest sampled key.
///
/// The skip is the leading-zero count of `max(S)` within `key_bits`, rounded
/// down to a multiple of `gamma` and capped so at least one digit remains.
/// Keys at or above `2^(key_bits - skip)` belong to the overflow bucket.
pub fn plan_overflow(samples: &[u64], key_bits: u32, gamma: u32) -> (u32, Option<u64>) {
    let max = *samples.last().expect("plan_overflow needs samples");
    let lz = if max == 0 {
        key_bits
    } else {
        max.leading_zeros() - (64 - key_bits)
    };
    let skip = ((lz / gamma) * gamma).min(key_bits - gamma.min(key_bits));
    if skip == 0 {
        (0, None)
    } else {
        (skip, Some(1u64 << (key_bits - skip)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_stream;

    fn kinds(plan: &BucketPlan) -> Vec<(usize, BucketKind)> {
        plan.descriptors.iter().map(|d| (d.zone, d.kind)).collect()
    }

    #[test]
    fn no_heavy_keys() {
        let p = plan_buckets(&[], 2, 0, None);
        assert_eq!(p.bucket_count(), 4);
        assert_eq!(p.light_lookup, vec![0, 1, 2, 3]);
        assert!(p.heavy_map.is_empty());
        for (i, d) in p.descriptors.iter().enumerate() {
            assert_eq!(d.id, i);
            assert_eq!(d.kind, BucketKind::Light);
        }
    }

    #[test]
    fn heavy_follows_its_zone_light_bucket() {
        // 5 = 0b01_01 sits in zone 1 of a 2-bit digit at shift 2
        let p = plan_buckets(&[5], 2, 2, None);
        use BucketKind::*;
        assert_eq!(
            kinds(&p),
            vec![(0, Light), (1, Light), (1, Heavy(5)), (2, Light), (3, Light)]
        );
        assert_eq!(p.light_lookup, vec![0, 1, 3, 4]);
        assert_eq!(p.heavy_map.get(5), Some(2));
        assert_eq!(p.heavy_map.len(), 1);
        assert_eq!(get_bucket_id(5, &p), 2);
        assert_eq!(get_bucket_id(4, &p), 1);
        assert_eq!(get_bucket_id(0, &p), 0);
        assert_eq!(p.heavy_in_zone(1), 1);
        assert_eq!(p.heavy_in_zone(3), 0);
    }

    #[test]
    fn one_bit_digit_two_heavy() {
        use BucketKind::*;
        let p = plan_buckets(&[0, 1], 1, 0, None);
        assert_eq!(kinds(&p), vec![(0, Light), (0, Heavy(0)), (1, Light), (1, Heavy(1))]);
        assert_eq!(p.descriptors.iter().map(|d| d.id).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn overflow_bucket_is_last_and_checked_first() {
        let p = plan_buckets(&[3, 300], 8, 0, Some(256));
        assert_eq!(p.descriptors.last().unwrap().kind, BucketKind::Overflow);
        assert_eq!(p.bucket_count(), 256 + 1 + 1);
        assert_eq!(get_bucket_id(300, &p), p.bucket_count() - 1);
        assert_eq!(get_bucket_id(3, &p), 4);
        assert_eq!(p.overflow_id(), Some(257));
    }

    #[test]
    fn samples_count_and_cap() {
        let recs: Vec<u64> = (0..1_000_000).collect();
        let mut rng = rng_stream(3, 0);
        let s = draw_samples(&recs, |&k| k, 1_000_000, 8, &mut rng);
        assert_eq!(s.len(), 5120);
        assert!(s.windows(2).all(|w| w[0] <= w[1]));
        let small: Vec<u64> = (0..100).collect();
        assert_eq!(draw_samples(&small, |&k| k, 1_000_000, 8, &mut rng).len(), 100);
        let same = vec![42u64; 1000];
        assert!(draw_samples(&same, |&k| k, 1000, 8, &mut rng).iter().all(|&k| k == 42));
    }

    #[test]
    fn detect_repeated_key() {
        let s = vec![7u64; 5120];
        assert_eq!(detect_heavy(&s, 1_000_000), vec![7]);
        let d: Vec<u64> = (0..5120).collect();
        assert!(detect_heavy(&d, 1_000_000).is_empty());
    }

    #[test]
    fn overflow_plan() {
        assert_eq!(plan_overflow(&[3, 65535], 32, 8), (16, Some(1 << 16)));
        assert_eq!(plan_overflow(&[1 << 31], 32, 8), (0, None));
        assert_eq!(plan_overflow(&[0, 0], 32, 8), (24, Some(1 << 8)));
        assert_eq!(plan_overflow(&[65535], 32, 12), (12, Some(1 << 20)));
        assert_eq!(plan_overflow(&[1 << 40], 64, 8), (16, Some(1 << 48)));
    }

    #[test]
    fn plan_is_pure() {
        let a = plan_buckets(&[1, 9, 1000], 4, 4, Some(1 << 12));
        let b = plan_buckets(&[1, 9, 1000], 4, 4, Some(1 << 12));
        assert_eq!(a.descriptors, b.descriptors);
        assert_eq!(a.light_lookup, b.light_lookup);
    }
}
