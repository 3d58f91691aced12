use std::fmt::Debug;
use std::hash::Hash;

/// Unsigned integer key of a fixed bit width.
///
/// Keys are viewed as a sequence of radix-`2^γ` digits read from the most
/// significant end; the driver picks `γ` per recursion level.
pub trait SortKey: Copy + Ord + Eq + Hash + Debug + Send + Sync + 'static {
    const BITS: u32;

    fn to_u64(self) -> u64;

    fn from_u64(v: u64) -> Self;
}

impl SortKey for u32 {
    const BITS: u32 = 32;

    #[inline(always)]
    fn to_u64(self) -> u64 {
        self as u64
    }

    #[inline(always)]
    fn from_u64(v: u64) -> Self {
        debug_assert!(v <= u32::MAX as u64);
        v as u32
    }
}

impl SortKey for u64 {
    const BITS: u32 = 64;

    #[inline(always)]
    fn to_u64(self) -> u64 {
        self
    }

    #[inline(always)]
    fn from_u64(v: u64) -> Self {
        v
    }
}

/// A key with an opaque fixed-size payload. The payload is never inspected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
#[repr(C)]
pub struct Record<K, P> {
    pub key: K,
    pub payload: P,
}

impl<K, P> Record<K, P> {
    pub fn new(key: K, payload: P) -> Self {
        Record { key, payload }
    }
}

/// Bounds every payload type must satisfy.
pub trait Payload: Copy + Send + Sync + 'static {}

impl<T: Copy + Send + Sync + 'static> Payload for T {}

/// Wraps plain keys into records whose payload is the original position.
pub fn with_index<K: SortKey>(keys: &[K]) -> Vec<Record<K, u64>> {
    keys.iter()
        .enumerate()
        .map(|(i, &k)| Record::new(k, i as u64))
        .collect()
}
