//! Reference sort used to check every other sorter in this crate.
//!
//! A plain top-down mergesort written against nothing but slices, so a bug in
//! the library cannot hide a bug here.

/// Stable sort by `key`. Takes from the left run on ties.
pub fn merge_sort_by_key<T: Clone, F: Fn(&T) -> u64>(v: &mut [T], key: F) {
    if v.len() < 2 {
        return;
    }
    let mut buf = v.to_vec();
    sort_into(&mut buf, v, &key);
}

// Sorts `src` into `dst`; both hold the same elements on entry.
fn sort_into<T: Clone, F: Fn(&T) -> u64>(src: &mut [T], dst: &mut [T], key: &F) {
    let n = src.len();
    if n < 2 {
        return;
    }
    let mid = n / 2;
    {
        let (dl, dr) = dst.split_at_mut(mid);
        let (sl, sr) = src.split_at_mut(mid);
        sort_into(dl, sl, key);
        sort_into(dr, sr, key);
    }
    let (l, r) = src.split_at(mid);
    let (mut i, mut j) = (0, 0);
    for slot in dst.iter_mut() {
        if j == r.len() || (i < l.len() && key(&l[i]) <= key(&r[j])) {
            *slot = l[i].clone();
            i += 1;
        } else {
            *slot = r[j].clone();
            j += 1;
        }
    }
}
