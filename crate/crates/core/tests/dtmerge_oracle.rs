use dovetail::dtmerge::{dt_merge, dt_merge_split, HeavyRun};
use dovetail::rng::rng_stream;
use dovetail::Record;
use rand::Rng;

type R = Record<u32, u32>;

fn key(r: &R) -> u64 {
    r.key as u64
}

/// Two-pointer stable merge of the light run and the concatenated heavy runs.
fn oracle(light: &[R], heavy: &[R]) -> Vec<R> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(light.len() + heavy.len());
    while i < light.len() && j < heavy.len() {
        if heavy[j].key < light[i].key {
            out.push(heavy[j]);
            j += 1;
        } else {
            out.push(light[i]);
            i += 1;
        }
    }
    out.extend_from_slice(&light[i..]);
    out.extend_from_slice(&heavy[j..]);
    out
}

fn build(light: &[u32], heavy: &[(u32, usize)]) -> (Vec<R>, Vec<HeavyRun>) {
    let mut z: Vec<R> = light.iter().map(|&k| Record::new(k, 0)).collect();
    let mut runs = Vec::new();
    for &(k, n) in heavy {
        z.extend(std::iter::repeat(Record::new(k, 0)).take(n));
        runs.push(HeavyRun { key: k as u64, len: n });
    }
    for (i, r) in z.iter_mut().enumerate() {
        r.payload = i as u32;
    }
    (z, runs)
}

fn check(light: &[u32], heavy: &[(u32, usize)], grain: usize) {
    let (zone, runs) = build(light, heavy);
    let l = light.len();
    let h: usize = heavy.iter().map(|x| x.1).sum();
    let want = oracle(&zone[..l], &zone[l..]);

    let mut z = zone.clone();
    let mut scratch = vec![R::default(); l.min(h)];
    let stats = dt_merge(&mut z, l, &runs, &mut scratch, key, grain).unwrap();
    assert_eq!(z, want, "light {light:?} heavy {heavy:?}");
    assert!(stats.out_copies <= l.min(h) as u64);
    assert!(stats.in_array_moves <= 2 * l.max(h) as u64);

    let mut dst = vec![R::default(); zone.len()];
    dst[..l].copy_from_slice(&zone[..l]);
    dt_merge_split(&mut dst, l, &runs, &zone, key, grain).unwrap();
    assert_eq!(dst, want);
}

/// All nondecreasing sequences of length `len` over `alphabet`.
fn sorted_seqs(alphabet: &[u32], len: usize) -> Vec<Vec<u32>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for s in sorted_seqs(alphabet, len - 1) {
        for &a in alphabet {
            if s.last().map_or(true, |&l| l <= a) {
                let mut t = s.clone();
                t.push(a);
                out.push(t);
            }
        }
    }
    out
}

#[test]
fn exhaustive_small_zones() {
    // light keys odd, heavy keys even, so no light key equals a heavy key
    let light_alpha = [1u32, 3, 5, 7];
    let heavy_keys = [2u32, 4, 6];
    let mut cases = 0;
    for l in 0..=4 {
        for light in sorted_seqs(&light_alpha, l) {
            for m in 0..=3usize {
                // choose which heavy keys appear (increasing) and their lengths 1..=3
                for mask in 0u32..8 {
                    if mask.count_ones() as usize != m {
                        continue;
                    }
                    let keys: Vec<u32> = (0..3).filter(|b| mask >> b & 1 == 1).map(|b| heavy_keys[b as usize]).collect();
                    for lens in 0..3usize.pow(m as u32) {
                        let heavy: Vec<(u32, usize)> = keys
                            .iter()
                            .enumerate()
                            .map(|(i, &k)| (k, lens / 3usize.pow(i as u32) % 3 + 1))
                            .collect();
                        check(&light, &heavy, 1);
                        cases += 1;
                    }
                }
            }
        }
    }
    assert!(cases > 4000, "{cases}");
}

#[test]
fn randomized_zones() {
    let mut rng = rng_stream(2024, 0);
    for case in 0..10_000 {
        let l = rng.gen_range(0..=1000);
        let m = rng.gen_range(0..=64usize);
        let mut light: Vec<u32> = (0..l).map(|_| rng.gen_range(0..5000) * 2 + 1).collect();
        light.sort();
        let mut hk: Vec<u32> = (0..m).map(|_| rng.gen_range(0..5001) * 2).collect();
        hk.sort();
        hk.dedup();
        let heavy: Vec<(u32, usize)> = hk
            .into_iter()
            .map(|k| (k, if rng.gen_bool(0.3) { rng.gen_range(1..2000) } else { rng.gen_range(1..20) }))
            .collect();
        check(&light, &heavy, if case % 2 == 0 { 1 } else { 1 << 20 });
    }
}
