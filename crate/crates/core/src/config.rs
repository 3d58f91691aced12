use thiserror::Error;

/// Largest digit width any policy may emit. `2^16` bucket tables are the
/// upper end of what still fits comfortably in cache.
pub const MAX_GAMMA: u32 = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("digit width bounds [{min}, {max}] must satisfy 1 <= min <= max <= {MAX_GAMMA}")]
    GammaBounds { min: u32, max: u32 },
    #[error("base case threshold {threshold} is below 2^{gamma}, the widest digit the policy can emit")]
    ThresholdTooSmall { threshold: usize, gamma: u32 },
    #[error("base case exponent must be in 1..=4, got {0}")]
    BadExponent(u32),
    #[error("sample factor must be positive")]
    ZeroSampleFactor,
    #[error("block policy needs a positive minimum block size and blocks per worker")]
    BadBlockPolicy,
}

/// How many bits each recursion level consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaPolicy {
    /// `clamp(floor(log2(n') / 3), min, max)`: a cube-root-of-n' bucket count.
    Adaptive { min: u32, max: u32 },
    /// `ceil(sqrt(key_bits))`, independent of the subproblem size.
    Theory,
    Fixed(u32),
}

impl Default for GammaPolicy {
    fn default() -> Self {
        GammaPolicy::Adaptive { min: 8, max: 12 }
    }
}

impl GammaPolicy {
    /// Widest digit this policy can produce for keys of `key_bits` bits.
    pub fn max_gamma(&self, key_bits: u32) -> u32 {
        match *self {
            GammaPolicy::Adaptive { max, .. } => max,
            GammaPolicy::Theory => theory_gamma(key_bits),
            GammaPolicy::Fixed(g) => g,
        }
    }

    /// Narrowest digit this policy produces when enough bits remain.
    pub fn min_gamma(&self, key_bits: u32) -> u32 {
        match *self {
            GammaPolicy::Adaptive { min, .. } => min,
            GammaPolicy::Theory => theory_gamma(key_bits),
            GammaPolicy::Fixed(g) => g,
        }
    }
}

fn theory_gamma(key_bits: u32) -> u32 {
    ((key_bits as f64).sqrt().ceil() as u32).clamp(1, MAX_GAMMA)
}

/// Size below which a subproblem is handed to the stable comparison sort.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseCase {
    Fixed(usize),
    /// `θ = 2^(c·γ)` for the digit width of the subproblem.
    Theory { c: u32 },
}

impl Default for BaseCase {
    fn default() -> Self {
        BaseCase::Fixed(1 << 14)
    }
}

impl BaseCase {
    pub fn threshold(&self, gamma: u32) -> usize {
        match *self {
            BaseCase::Fixed(t) => t,
            BaseCase::Theory { c } => 1usize << (c * gamma).min(usize::BITS - 2),
        }
    }
}

/// Block sizing for the blocked counting sort:
/// `l = min(ceil(n' / max(r', min_block)), blocks_per_worker * workers)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockPolicy {
    pub min_block: usize,
    pub blocks_per_worker: usize,
}

impl Default for BlockPolicy {
    fn default() -> Self {
        BlockPolicy {
            min_block: 1024,
            blocks_per_worker: 8,
        }
    }
}

impl BlockPolicy {
    pub fn block_count(&self, n: usize, buckets: usize, workers: usize) -> usize {
        if n == 0 || n < 2 * buckets {
            return 1;
        }
        let per_block = buckets.max(self.min_block);
        n.div_ceil(per_block)
            .min(self.blocks_per_worker * workers.max(1))
            .max(1)
    }
}

/// Every tunable of the sorters. Construct with [`SortConfig::default`] and
/// adjust through the `with_*` methods; [`SortConfig::validate`] checks the
/// cross-field invariants and is called by the sort entry points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortConfig {
    pub gamma_policy: GammaPolicy,
    pub base_case: BaseCase,
    /// Multiplier on `2^γ · ceil(log2 n)` samples.
    pub sample_factor: u32,
    pub seed: u64,
    pub block_policy: BlockPolicy,
    /// Subproblems smaller than this run without forking.
    pub parallel_grain: usize,
    pub instrument: bool,
}

impl Default for SortConfig {
    fn default() -> Self {
        SortConfig {
            gamma_policy: GammaPolicy::default(),
            base_case: BaseCase::default(),
            sample_factor: 1,
            seed: 0,
            block_policy: BlockPolicy::default(),
            parallel_grain: 4096,
            instrument: false,
        }
    }
}

impl SortConfig {
    /// Parameters matching the work analysis: `γ = ceil(sqrt(w))`, `θ = 2^(2γ)`.
    pub fn theory() -> Self {
        SortConfig {
            gamma_policy: GammaPolicy::Theory,
            base_case: BaseCase::Theory { c: 2 },
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_instrument(mut self, on: bool) -> Self {
        self.instrument = on;
        self
    }

    pub fn with_gamma(mut self, policy: GammaPolicy) -> Self {
        self.gamma_policy = policy;
        self
    }

    pub fn with_base_case(mut self, base: BaseCase) -> Self {
        self.base_case = base;
        self
    }

    pub fn with_parallel_grain(mut self, grain: usize) -> Self {
        self.parallel_grain = grain;
        self
    }

    pub fn validate(&self, key_bits: u32) -> Result<(), ConfigError> {
        let (lo, hi) = match self.gamma_policy {
            GammaPolicy::Adaptive { min, max } => (min, max),
            GammaPolicy::Theory => {
                let g = theory_gamma(key_bits);
                (g, g)
            }
            GammaPolicy::Fixed(g) => (g, g),
        };
        if lo == 0 || lo > hi || hi > MAX_GAMMA {
            return Err(ConfigError::GammaBounds { min: lo, max: hi });
        }
        match self.base_case {
            BaseCase::Fixed(t) => {
                if t < (1usize << hi) {
                    return Err(ConfigError::ThresholdTooSmall { threshold: t, gamma: hi });
                }
            }
            BaseCase::Theory { c } => {
                if !(1..=4).contains(&c) {
                    return Err(ConfigError::BadExponent(c));
                }
            }
        }
        if self.sample_factor == 0 {
            return Err(ConfigError::ZeroSampleFactor);
        }
        if self.block_policy.min_block == 0 || self.block_policy.blocks_per_worker == 0 {
            return Err(ConfigError::BadBlockPolicy);
        }
        Ok(())
    }

    /// Digit width for a subproblem of `n_prime` records with `remaining_bits`
    /// bits still unsorted.
    ///
    /// Panics when `remaining_bits == 0`: the driver must have taken the
    /// exhausted-digits base case before asking.
    pub fn gamma_for(&self, n_prime: usize, remaining_bits: u32, key_bits: u32) -> u32 {
        assert!(
            remaining_bits >= 1,
            "gamma_for called with no bits left; base case should have triggered"
        );
        let g = match self.gamma_policy {
            GammaPolicy::Adaptive { min, max } => {
                let lg = if n_prime <= 1 { 0 } else { n_prime.ilog2() };
                (lg / 3).clamp(min, max)
            }
            GammaPolicy::Theory => theory_gamma(key_bits),
            GammaPolicy::Fixed(g) => g,
        };
        g.min(remaining_bits).clamp(1, MAX_GAMMA)
    }

    /// Base case threshold `θ` for a level using digit width `gamma`.
    pub fn threshold(&self, gamma: u32) -> usize {
        self.base_case.threshold(gamma)
    }

    /// Number of samples for a subproblem: `min(n', factor · 2^γ · ceil(log2 n))`.
    pub fn sample_count(&self, n_prime: usize, n_original: usize, gamma: u32) -> usize {
        let want = (self.sample_factor as usize) * (1usize << gamma) * ceil_log2(n_original).max(1);
        want.min(n_prime)
    }
}

/// `ceil(log2 n)`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_gamma_for_a_billion() {
        let cfg = SortConfig::default();
        // log2(1e9) = 29.9 -> floor(29.9 / 3) = 9, inside [8, 12]
        assert_eq!(cfg.gamma_for(1_000_000_000, 32, 32), 9);
    }

    #[test]
    fn adaptive_gamma_clamps() {
        let cfg = SortConfig::default();
        assert_eq!(cfg.gamma_for(1000, 32, 32), 8);
        assert_eq!(cfg.gamma_for(usize::MAX, 64, 64), 12);
    }

    #[test]
    fn theory_gamma_for_64_bit_keys() {
        let cfg = SortConfig::theory();
        assert_eq!(cfg.gamma_for(1 << 40, 64, 64), 8);
        assert_eq!(cfg.threshold(8), 1 << 16);
    }

    #[test]
    fn gamma_capped_by_remaining_bits() {
        let cfg = SortConfig::default();
        for n in [1usize, 100, 1 << 20, 1 << 40] {
            assert_eq!(cfg.gamma_for(n, 3, 32), 3);
        }
    }

    #[test]
    #[should_panic(expected = "no bits left")]
    fn gamma_without_bits_is_a_driver_bug() {
        SortConfig::default().gamma_for(10, 0, 32);
    }

    #[test]
    fn default_config_is_valid() {
        assert_eq!(SortConfig::default().validate(32), Ok(()));
        assert_eq!(SortConfig::theory().validate(64), Ok(()));
        assert_eq!(SortConfig::default().threshold(12), 1 << 14);
    }

    #[test]
    fn rejects_threshold_below_bucket_count() {
        let cfg = SortConfig::default().with_gamma(GammaPolicy::Fixed(16));
        assert_eq!(
            cfg.validate(32),
            Err(ConfigError::ThresholdTooSmall { threshold: 1 << 14, gamma: 16 })
        );
        let cfg = SortConfig::default().with_gamma(GammaPolicy::Adaptive { min: 0, max: 8 });
        assert!(cfg.validate(32).is_err());
    }

    #[test]
    fn sample_count_rule() {
        let cfg = SortConfig::default();
        assert_eq!(cfg.sample_count(1_000_000, 1_000_000, 8), 256 * 20);
        assert_eq!(cfg.sample_count(100, 1_000_000, 8), 100);
    }

    #[test]
    fn block_count_policy() {
        let p = BlockPolicy::default();
        assert_eq!(p.block_count(100, 256, 4), 1);
        assert_eq!(p.block_count(1 << 20, 256, 1), 8);
        assert_eq!(p.block_count(4096, 256, 64), 4);
        assert_eq!(p.block_count(0, 256, 4), 1);
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(1_000_000), 20);
        assert_eq!(ceil_log2(1 << 20), 20);
        assert_eq!(ceil_log2((1 << 20) + 1), 21);
    }
}
