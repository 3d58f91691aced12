//! Small fork-join building blocks shared by distribution and merging.

use rayon::prelude::*;

/// Chunk length used when splitting a copy or flip across workers.
const COPY_CHUNK: usize = 1 << 14;

/// Raw pointer that may cross into worker closures. Every user writes only to
/// index ranges it owns exclusively.
#[derive(Clone, Copy)]
pub(crate) struct SendPtr<T>(pub *mut T);

unsafe impl<T: Send> Send for SendPtr<T> {}
unsafe impl<T: Send> Sync for SendPtr<T> {}

impl<T> SendPtr<T> {
    #[inline(always)]
    pub unsafe fn write(self, idx: usize, v: T) {
        self.0.add(idx).write(v);
    }
}

pub(crate) fn copy<T: Copy + Send + Sync>(src: &[T], dst: &mut [T], grain: usize) {
    debug_assert_eq!(src.len(), dst.len());
    if src.len() < grain.max(COPY_CHUNK) {
        dst.copy_from_slice(src);
    } else {
        dst.par_chunks_mut(COPY_CHUNK)
            .zip(src.par_chunks(COPY_CHUNK))
            .for_each(|(d, s)| d.copy_from_slice(s));
    }
}

/// Copies `s[from..from + len]` to `s[to..to + len]`; the ranges must not overlap.
pub(crate) fn copy_disjoint<T: Copy + Send + Sync>(
    s: &mut [T],
    from: usize,
    to: usize,
    len: usize,
    grain: usize,
) {
    if len == 0 || from == to {
        return;
    }
    if from < to {
        debug_assert!(from + len <= to);
        let (a, b) = s.split_at_mut(to);
        copy(&a[from..from + len], &mut b[..len], grain);
    } else {
        debug_assert!(to + len <= from);
        let (a, b) = s.split_at_mut(from);
        copy(&b[..len], &mut a[to..to + len], grain);
    }
}

/// Reverses `s` in place by swapping mirrored pairs.
pub fn reverse<T: Send>(s: &mut [T], grain: usize) {
    let half = s.len() / 2;
    if s.len() < grain.max(COPY_CHUNK) {
        s.reverse();
        return;
    }
    let tail = s.len() - half;
    let (a, b) = s.split_at_mut(half);
    a.par_iter_mut()
        .zip(b[tail - half..].par_iter_mut().rev())
        .for_each(|(x, y)| std::mem::swap(x, y));
}

/// Writes performed by [`reverse`] on a slice of `len` elements.
pub(crate) fn reverse_writes(len: usize) -> u64 {
    (2 * (len / 2)) as u64
}

/// `s` holds a dead gap followed by a live block of `len` records, with the
/// gap shorter than the block. Moves the block to the front of `s`, keeping
/// its order: flip the block, then flip all of `s`. Positions that would only
/// receive dead records in the second flip are not written.
///
/// Returns the number of record writes.
pub fn shift_block_left<T: Copy + Send + Sync>(s: &mut [T], len: usize, grain: usize) -> u64 {
    let total = s.len();
    let gap = total - len;
    debug_assert!(gap <= len);
    if gap == 0 {
        return 0;
    }
    reverse(&mut s[gap..], grain);
    let half = total / 2;
    let (a, b) = s.split_at_mut(half);
    let b_len = b.len();
    // pair (i, total - 1 - i); the right element lands in the dead tail when
    // total - 1 - i >= len, i.e. i < gap
    let body = |(i, (x, y)): (usize, (&mut T, &mut T))| {
        if i < gap {
            *x = *y;
        } else {
            std::mem::swap(x, y);
        }
    };
    if total < grain.max(COPY_CHUNK) {
        a.iter_mut().zip(b[b_len - half..].iter_mut().rev()).enumerate().for_each(body);
    } else {
        a.par_iter_mut()
            .zip(b[b_len - half..].par_iter_mut().rev())
            .enumerate()
            .for_each(body);
    }
    reverse_writes(len) + (2 * half - gap) as u64
}

/// Mirror of [`shift_block_left`]: `s` holds a live block of `len` records
/// followed by a shorter dead gap; moves the block to the end of `s`.
pub fn shift_block_right<T: Copy + Send + Sync>(s: &mut [T], len: usize, grain: usize) -> u64 {
    let total = s.len();
    let gap = total - len;
    debug_assert!(gap <= len);
    if gap == 0 {
        return 0;
    }
    reverse(&mut s[..len], grain);
    let half = total / 2;
    let (a, b) = s.split_at_mut(half);
    let b_len = b.len();
    // left position i is dead after the move when i < gap
    let body = |(i, (x, y)): (usize, (&mut T, &mut T))| {
        if i < gap {
            *y = *x;
        } else {
            std::mem::swap(x, y);
        }
    };
    if total < grain.max(COPY_CHUNK) {
        a.iter_mut().zip(b[b_len - half..].iter_mut().rev()).enumerate().for_each(body);
    } else {
        a.par_iter_mut()
            .zip(b[b_len - half..].par_iter_mut().rev())
            .enumerate()
            .for_each(body);
    }
    reverse_writes(len) + (2 * half - gap) as u64
}

/// Two-flip block move on fully live data: reverse `s[..mid]`, then reverse
/// all of `s`. The block `s[..mid]` ends up at the end of `s` in its original
/// order; the rest ends up at the front, reversed.
pub fn flip_to_back<T: Send>(s: &mut [T], mid: usize, grain: usize) {
    reverse(&mut s[..mid], grain);
    reverse(s, grain);
}
