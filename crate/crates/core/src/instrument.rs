/// Operation counters gathered by an instrumented sort.
///
/// Each subproblem fills its own report; parents fold children in with
/// [`InstrumentReport::absorb`], so totals do not depend on scheduling.
///
/// `moves` counts record writes made by distribution, dovetail merging and
/// plain copies between the two buffers. Writes performed inside the
/// comparison-sort base cases are not moves; those records are tallied in
/// `base_case_records` instead.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstrumentReport {
    pub moves: u64,
    /// Records copied out to scratch space by dovetail merges.
    pub merge_out_copies: u64,
    /// Record writes inside the zone during dovetail merges (direct moves and flips).
    pub merge_in_array_moves: u64,
    /// Deepest distribution level reached; 0 when the input never left the base case.
    pub levels: usize,
    /// Records entering a distribution at each depth.
    pub level_mass: Vec<u64>,
    pub base_case_records: u64,
    /// Records routed to heavy buckets at each depth.
    pub heavy_records_removed: Vec<u64>,
    /// Leading bits skipped at the root by the overflow-bucket plan.
    pub skipped_bits: u32,
    /// Records that landed in the root's overflow bucket.
    pub overflow_records: u64,
}

impl InstrumentReport {
    pub fn absorb(&mut self, other: InstrumentReport) {
        self.moves += other.moves;
        self.merge_out_copies += other.merge_out_copies;
        self.merge_in_array_moves += other.merge_in_array_moves;
        self.levels = self.levels.max(other.levels);
        add_elementwise(&mut self.level_mass, &other.level_mass);
        self.base_case_records += other.base_case_records;
        add_elementwise(&mut self.heavy_records_removed, &other.heavy_records_removed);
        self.skipped_bits = self.skipped_bits.max(other.skipped_bits);
        self.overflow_records += other.overflow_records;
    }

    pub(crate) fn record_distribution(&mut self, depth: usize, n: usize, heavy: usize) {
        if self.level_mass.len() <= depth {
            self.level_mass.resize(depth + 1, 0);
            self.heavy_records_removed.resize(depth + 1, 0);
        }
        self.level_mass[depth] += n as u64;
        self.heavy_records_removed[depth] += heavy as u64;
        self.moves += n as u64;
        self.levels = self.levels.max(depth + 1);
    }

    /// Records entering distribution at `depth`, zero past the deepest level.
    pub fn mass_at(&self, depth: usize) -> u64 {
        self.level_mass.get(depth).copied().unwrap_or(0)
    }

    pub fn heavy_at(&self, depth: usize) -> u64 {
        self.heavy_records_removed.get(depth).copied().unwrap_or(0)
    }

    /// The counters that must be identical across thread counts for a fixed
    /// input and configuration.
    pub fn structural(&self) -> (u64, usize, &[u64]) {
        (self.moves, self.levels, &self.level_mass)
    }
}

fn add_elementwise(acc: &mut Vec<u64>, other: &[u64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absorb_merges_levels_elementwise() {
        let mut a = InstrumentReport::default();
        a.record_distribution(0, 100, 10);
        let mut b = InstrumentReport::default();
        b.record_distribution(1, 40, 0);
        b.record_distribution(2, 5, 1);
        a.absorb(b);
        assert_eq!(a.level_mass, vec![100, 40, 5]);
        assert_eq!(a.heavy_records_removed, vec![10, 0, 1]);
        assert_eq!(a.levels, 3);
        assert_eq!(a.moves, 145);
        assert_eq!(a.mass_at(7), 0);
    }
}
