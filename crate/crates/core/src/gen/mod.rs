//! Deterministic synthetic inputs.
//!
//! Generation is split into fixed-size chunks, each drawing from its own
//! random stream, so the output depends only on the spec and never on the
//! number of worker threads.

pub mod format;
pub mod zipf;

use rand::distributions::{Bernoulli, Distribution};
use rand::Rng;
use rand_distr::Exp;
use rayon::prelude::*;
use thiserror::Error;

use crate::record::{Record, SortKey};
use crate::rng::{mix64, rng_stream};
pub use zipf::Zipf;

const CHUNK: usize = 1 << 16;

/// Stream ids used by the edge generator live above every key-chunk id.
const EDGE_STREAM_BASE: u64 = 1 << 62;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("key width must be 32 or 64, got {0}")]
    KeyWidth(u32),
    #[error("{mu} distinct keys do not fit in {bits} bits")]
    TooManyDistinct { mu: u64, bits: u32 },
    #[error("invalid {family} parameter {value}")]
    Parameter { family: &'static str, value: f64 },
    #[error("generator asked for {want}-bit records but spec says {have} bits")]
    WidthMismatch { want: u32, have: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// `μ` distinct keys, each equally likely.
    Uniform { mu: u64 },
    /// `Exp(10^-5 · λ)`, rounded to the nearest integer.
    Exponential { lambda: f64 },
    /// Zipf ranks over `[1, n]` with exponent `s`.
    Zipfian { s: f64 },
    /// Every bit independently zero with probability `1/t`.
    BExp { t: f64 },
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Uniform { .. } => "uniform",
            Family::Exponential { .. } => "exp",
            Family::Zipfian { .. } => "zipf",
            Family::BExp { .. } => "bexp",
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            Family::Uniform { mu } => mu as f64,
            Family::Exponential { lambda } => lambda,
            Family::Zipfian { s } => s,
            Family::BExp { t } => t,
        }
    }

    /// Parses a family name with its numeric parameter, e.g. `("zipf", "1.2")`.
    pub fn parse(name: &str, param: &str) -> Option<Family> {
        let x: f64 = param.parse().ok()?;
        Some(match name {
            "uniform" => Family::Uniform {
                mu: param.parse().ok().or_else(|| (x >= 1.0 && x <= u64::MAX as f64).then_some(x as u64))?,
            },
            "exp" | "exponential" => Family::Exponential { lambda: x },
            "zipf" | "zipfian" => Family::Zipfian { s: x },
            "bexp" => Family::BExp { t: x },
            _ => return None,
        })
    }

    /// The parameter grid used for benchmarking: five settings per family.
    pub fn paper_grid() -> Vec<Family> {
        let mut v = Vec::new();
        for mu in [10u64, 1_000, 100_000, 10_000_000, 1_000_000_000] {
            v.push(Family::Uniform { mu });
        }
        for lambda in [1.0, 2.0, 5.0, 7.0, 10.0] {
            v.push(Family::Exponential { lambda });
        }
        for s in [0.6, 0.8, 1.0, 1.2, 1.5] {
            v.push(Family::Zipfian { s });
        }
        for t in [10.0, 30.0, 50.0, 100.0, 300.0] {
            v.push(Family::BExp { t });
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistSpec {
    pub family: Family,
    pub n: usize,
    pub key_bits: u32,
    pub seed: u64,
}

impl DistSpec {
    pub fn new(family: Family, n: usize, key_bits: u32, seed: u64) -> Self {
        DistSpec { family, n, key_bits, seed }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.key_bits != 32 && self.key_bits != 64 {
            return Err(GenError::KeyWidth(self.key_bits));
        }
        let bad = |family, value| Err(GenError::Parameter { family, value });
        match self.family {
            Family::Uniform { mu } => {
                if mu == 0 {
                    return bad("uniform", 0.0);
                }
                if self.key_bits == 32 && mu > 1 << 32 {
                    return Err(GenError::TooManyDistinct { mu, bits: 32 });
                }
            }
            Family::Exponential { lambda } if !(lambda > 0.0 && lambda.is_finite()) => return bad("exp", lambda),
            Family::Zipfian { s } if !(s > 0.0 && s.is_finite()) => return bad("zipf", s),
            Family::BExp { t } if !(t >= 1.0 && t.is_finite()) => return bad("bexp", t),
            _ => {}
        }
        Ok(())
    }
}

/// Seed-derived odd-multiplier bijection on `bits`-bit integers. Scatters
/// small raw values over the whole key range without collisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyMap {
    mult: u64,
    add: u64,
    mask: u64,
}

impl KeyMap {
    pub fn new(seed: u64, bits: u32) -> Self {
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        KeyMap {
            mult: mix64(seed ^ 0x5851_f42d_4c95_7f2d) | 1,
            add: mix64(seed ^ 0x1405_7b7e_f767_814f),
            mask,
        }
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        x.wrapping_mul(self.mult).wrapping_add(self.add) & self.mask
    }
}

/// Draws `spec.n` keys.
pub fn generate_keys(spec: &DistSpec) -> Result<Vec<u64>, GenError> {
    spec.validate()?;
    let map = KeyMap::new(spec.seed, spec.key_bits);
    let mask = map.mask;
    let zipf = match spec.family {
        Family::Zipfian { s } => Zipf::new(spec.n.max(1) as u64, s),
        _ => None,
    };
    let exp = match spec.family {
        Family::Exponential { lambda } => Some(Exp::new(1e-5 * lambda).expect("validated rate")),
        _ => None,
    };
    let zero_bit = match spec.family {
        Family::BExp { t } => Some(Bernoulli::new(1.0 / t).expect("validated t")),
        _ => None,
    };
    let mut keys = vec![0u64; spec.n];
    keys.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
        let mut rng = rng_stream(spec.seed, c as u64);
        for k in out.iter_mut() {
            *k = match spec.family {
                Family::Uniform { mu } => map.apply(rng.gen_range(0..mu)),
                Family::Exponential { .. } => {
                    let x: f64 = exp.unwrap().sample(&mut rng);
                    let r = x.round();
                    // clamp to the key range; saturates for absurd draws
                    let r = if r >= mask as f64 { mask } else { r as u64 };
                    map.apply(r)
                }
                Family::Zipfian { .. } => map.apply(zipf.unwrap().sample(&mut rng) - 1),
                Family::BExp { .. } => {
                    let b = zero_bit.unwrap();
                    let mut v = 0u64;
                    for bit in 0..spec.key_bits {
                        if !b.sample(&mut rng) {
                            v |= 1 << bit;
                        }
                    }
                    v
                }
            };
        }
    });
    Ok(keys)
}

/// Draws `spec.n` records whose payload is their original index.
pub fn generate<K: SortKey>(spec: &DistSpec) -> Result<Vec<Record<K, u64>>, GenError> {
    if K::BITS != spec.key_bits {
        return Err(GenError::WidthMismatch { want: K::BITS, have: spec.key_bits });
    }
    let keys = generate_keys(spec)?;
    Ok(keys
        .into_par_iter()
        .enumerate()
        .map(|(i, k)| Record::new(K::from_u64(k), i as u64))
        .collect())
}

/// Affine permutation `x -> (a·x + b) mod v` of `[0, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexPerm {
    a: u64,
    b: u64,
    v: u64,
}

impl VertexPerm {
    pub fn new(seed: u64, vertices: u64) -> Self {
        let v = vertices.max(1);
        let mut a = (mix64(seed ^ 0x2545_f491_4f6c_dd1d) % v).max(1);
        while gcd(a, v) != 1 {
            a += 1;
        }
        VertexPerm {
            a,
            b: mix64(seed ^ 0x9e37_79b9) % v,
            v,
        }
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        ((x as u128 * self.a as u128 + self.b as u128) % self.v as u128) as u64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Edge list `(src, dst)` with uniform sources and Zipf-skewed destinations:
/// the vertex of Zipf rank `k` is `VertexPerm::new(seed, vertices).apply(k - 1)`.
pub fn generate_edges(vertices: u64, edges: usize, skew: f64, seed: u64) -> Result<Vec<(u32, u32)>, GenError> {
    if vertices == 0 || vertices > 1 << 32 {
        return Err(GenError::Parameter { family: "vertices", value: vertices as f64 });
    }
    let zipf = Zipf::new(vertices, skew).ok_or(GenError::Parameter { family: "zipf", value: skew })?;
    let perm = VertexPerm::new(seed, vertices);
    let mut out = vec![(0u32, 0u32); edges];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let mut rng = rng_stream(seed, EDGE_STREAM_BASE + c as u64);
        for e in chunk.iter_mut() {
            let src = rng.gen_range(0..vertices) as u32;
            let dst = perm.apply(zipf.sample(&mut rng) - 1) as u32;
            *e = (src, dst);
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn uniform_one_key() {
        let k = generate_keys(&DistSpec::new(Family::Uniform { mu: 1 }, 1000, 32, 7)).unwrap();
        assert!(k.iter().all(|&x| x == k[0]));
    }

    #[test]
    fn bexp_t1_is_zero() {
        let k = generate_keys(&DistSpec::new(Family::BExp { t: 1.0 }, 1000, 64, 7)).unwrap();
        assert!(k.iter().all(|&x| x == 0));
    }

    #[test]
    fn uniform_distinct_count_is_exact() {
        let k = generate_keys(&DistSpec::new(Family::Uniform { mu: 1000 }, 200_000, 32, 3)).unwrap();
        let distinct: std::collections::HashSet<u64> = k.iter().copied().collect();
        assert_eq!(distinct.len(), 1000);
        assert!(k.iter().all(|&x| x < 1 << 32));
    }

    #[test]
    fn too_many_distinct_keys() {
        let spec = DistSpec::new(Family::Uniform { mu: (1 << 32) + 1 }, 10, 32, 0);
        assert_eq!(generate_keys(&spec), Err(GenError::TooManyDistinct { mu: (1 << 32) + 1, bits: 32 }));
        assert!(generate_keys(&DistSpec::new(Family::Uniform { mu: 1 << 32 }, 10, 32, 0)).is_ok());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(generate_keys(&DistSpec::new(Family::Zipfian { s: 0.0 }, 10, 32, 0)).is_err());
        assert!(generate_keys(&DistSpec::new(Family::BExp { t: 0.5 }, 10, 32, 0)).is_err());
        assert!(generate_keys(&DistSpec::new(Family::Exponential { lambda: -1.0 }, 10, 32, 0)).is_err());
        assert!(generate_keys(&DistSpec::new(Family::Uniform { mu: 3 }, 10, 16, 0)).is_err());
        assert!(generate::<u64>(&DistSpec::new(Family::Uniform { mu: 3 }, 10, 32, 0)).is_err());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let spec = DistSpec::new(Family::Zipfian { s: 1.2 }, 300_000, 64, 9);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| generate_keys(&spec).unwrap());
        let b = four.install(|| generate_keys(&spec).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn keymap_is_a_bijection_on_small_prefix() {
        let m = KeyMap::new(5, 32);
        let images: std::collections::HashSet<u64> = (0..100_000).map(|x| m.apply(x)).collect();
        assert_eq!(images.len(), 100_000);
    }

    #[test]
    fn exponential_mean() {
        // mean of Exp(1e-5 λ) is 1e5/λ; invert the key map to recover raw values
        let spec = DistSpec::new(Family::Exponential { lambda: 2.0 }, 200_000, 64, 4);
        let keys = generate_keys(&spec).unwrap();
        let m = KeyMap::new(4, 64);
        let inv = mod_inverse(m.mult);
        let mean = keys
            .iter()
            .map(|&k| (k.wrapping_sub(m.add)).wrapping_mul(inv) as f64)
            .sum::<f64>()
            / keys.len() as f64;
        assert!((mean - 50_000.0).abs() < 1_000.0, "mean {mean}");
    }

    fn mod_inverse(a: u64) -> u64 {
        // Newton iteration for the inverse of an odd number mod 2^64
        let mut x = a;
        for _ in 0..6 {
            x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
        }
        x
    }

    #[test]
    fn edges_reproducible_and_empty() {
        assert_eq!(generate_edges(4, 4, 1.0, 3).unwrap(), generate_edges(4, 4, 1.0, 3).unwrap());
        assert!(generate_edges(4, 0, 1.0, 3).unwrap().is_empty());
        assert!(generate_edges(0, 4, 1.0, 3).is_err());
    }

    #[test]
    fn vertex_perm_is_a_permutation() {
        for v in [1u64, 6, 97, 1000] {
            let p = VertexPerm::new(17, v);
            let mut seen: HashMap<u64, ()> = HashMap::new();
            for x in 0..v {
                let y = p.apply(x);
                assert!(y < v);
                seen.insert(y, ());
            }
            assert_eq!(seen.len() as u64, v);
        }
    }
}
