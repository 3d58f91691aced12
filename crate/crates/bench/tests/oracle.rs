use dovetail_bench::merge_sort_by_key;
use proptest::prelude::*;

proptest! {
    #[test]
    fn matches_std_stable_sort(keys in prop::collection::vec(0u64..20, 0..500)) {
        let mut v: Vec<(u64, usize)> = keys.iter().copied().zip(0..).collect();
        let mut want = v.clone();
        want.sort_by_key(|x| x.0);
        merge_sort_by_key(&mut v, |x| x.0);
        prop_assert_eq!(v, want);
    }
}
