//! Histogram shifting of ±1 AC coefficients.
//!
//! Coefficients with magnitude one carry a bit each (they stay or grow to
//! magnitude two); larger magnitudes are pushed outward by one to keep the
//! mapping invertible. Which frequencies and blocks take part is chosen by an
//! estimate of the resulting growth of the entropy-coded scan.

use crate::cost::Ratio;
use crate::error::{Error, Result};
use crate::jpeg::scan::{size_category, Block, CoefficientImage, MAX_AC_MAGNITUDE};
use crate::jpeg::CodeAssignment;

/// Number of AC frequencies per block (zigzag indices 1..=63).
pub const AC_FREQUENCIES: usize = 63;

/// Longest zero run a coefficient can be preceded by.
pub const MAX_RUN: usize = 62;

pub fn embed_coefficient(d: i32, bit: bool) -> Result<i32> {
    match d.abs() {
        0 => Err(Error::ZeroCoefficient),
        1 => Ok(d + d.signum() * bit as i32),
        _ => Ok(d + d.signum()),
    }
}

/// Inverse of [`embed_coefficient`]: the carried bit (if any) and the
/// original value.
pub fn extract_recover_coefficient(d: i32) -> Result<(Option<bool>, i32)> {
    match d.abs() {
        0 => Err(Error::ZeroCoefficient),
        1 => Ok((Some(false), d)),
        2 => Ok((Some(true), d.signum())),
        _ => Ok((None, d - d.signum())),
    }
}

/// Code lengths of the AC run/size symbols and their per-size increments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeLengthTable {
    // column 0 unused so that columns are size categories
    hclt: [[u8; 11]; 16],
    hcit: [[i32; 10]; 16],
}

impl CodeLengthTable {
    pub fn from_assignment(ac: &CodeAssignment) -> Result<Self> {
        let mut hclt = [[0u8; 11]; 16];
        for (r, row) in hclt.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate().skip(1) {
                let symbol = ((r as u8) << 4) | c as u8;
                let slot = ac.slot_of(symbol).ok_or(Error::MissingSymbol(symbol))?;
                *cell = ac.length(slot);
            }
        }
        let mut hcit = [[0i32; 10]; 16];
        for r in 0..16 {
            for c in 1..10 {
                hcit[r][c] = hclt[r][c + 1] as i32 - hclt[r][c] as i32;
            }
        }
        Ok(CodeLengthTable { hclt, hcit })
    }

    /// Code length of run `run` (0..=15) and size `size` (1..=10).
    pub fn hclt(&self, run: usize, size: usize) -> u8 {
        assert!((1..=10).contains(&size));
        self.hclt[run][size]
    }

    /// Length increment from size `size` to `size + 1` (size 1..=9).
    pub fn hcit(&self, run: usize, size: usize) -> i32 {
        assert!((1..=9).contains(&size));
        self.hcit[run][size]
    }

    /// Expected growth in half-bits when `value` (preceded by a zero run of
    /// `run`) is modified: zero unless the value sits at the top of its size
    /// category, weighted by one half for carriers. `None` when the value
    /// cannot grow within baseline limits.
    pub fn weighted_growth_half_bits(&self, run: usize, value: i32) -> Option<i64> {
        let mag = value.abs();
        if mag >= MAX_AC_MAGNITUDE {
            return None;
        }
        let c = size_category(mag) as usize;
        if mag != (1 << c) - 1 {
            return Some(0);
        }
        let grow = (self.hcit[run % 16][c] + 1) as i64;
        Some(if mag == 1 { grow } else { 2 * grow })
    }
}

pub fn code_length_tables(ac: &CodeAssignment) -> Result<CodeLengthTable> {
    CodeLengthTable::from_assignment(ac)
}

/// Nonzero AC coefficients of a block as `(zigzag index, zero run, value)`,
/// the run counting every zero since the previous nonzero AC coefficient.
pub fn nonzero_ac(block: &Block) -> impl Iterator<Item = (usize, usize, i32)> + '_ {
    let mut run = 0;
    (1..64).filter_map(move |k| {
        if block[k] == 0 {
            run += 1;
            None
        } else {
            let r = run;
            run = 0;
            Some((k, r, block[k] as i32))
        }
    })
}

/// Cost statistics of one AC frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyCost {
    /// Zigzag index, 1..=63.
    pub k: usize,
    /// Estimated scan growth in half-bits over all blocks.
    pub growth_half_bits: i64,
    /// Nonzero coefficients at this frequency.
    pub nonzero: u64,
    /// Coefficients of magnitude one (bit carriers).
    pub carriers: u64,
    /// Some coefficient is already at the baseline magnitude limit.
    pub saturated: bool,
}

impl FrequencyCost {
    pub fn s(&self) -> Ratio {
        Ratio::half_bits(self.growth_half_bits)
    }

    /// Growth per nonzero coefficient; `None` when the frequency is empty.
    pub fn uf(&self) -> Option<Ratio> {
        (self.nonzero > 0).then(|| Ratio::new(self.growth_half_bits, 2 * self.nonzero))
    }

    pub fn inc1(&self) -> Option<Ratio> {
        self.uf().map(|uf| uf.scale(self.nonzero))
    }

    pub fn usable(&self) -> bool {
        self.nonzero > 0 && self.carriers > 0 && !self.saturated
    }

    pub fn capacity(&self) -> u64 {
        self.carriers
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyCostTable {
    entries: Vec<FrequencyCost>,
    order: Vec<usize>,
    lengths: CodeLengthTable,
}

impl FrequencyCostTable {
    /// Builds a table from per-frequency entries (indexed by `k - 1`) and the
    /// code lengths they were computed under.
    pub fn from_entries(entries: Vec<FrequencyCost>, lengths: CodeLengthTable) -> Self {
        assert_eq!(entries.len(), AC_FREQUENCIES);
        let mut order: Vec<usize> = entries.iter().filter(|e| e.usable()).map(|e| e.k).collect();
        order.sort_by(|&a, &b| {
            let (ea, eb) = (&entries[a - 1], &entries[b - 1]);
            ea.uf().cmp(&eb.uf()).then(a.cmp(&b))
        });
        FrequencyCostTable { entries, order, lengths }
    }

    pub fn lengths(&self) -> &CodeLengthTable {
        &self.lengths
    }

    /// Entry for zigzag index `k` (1..=63).
    pub fn get(&self, k: usize) -> &FrequencyCost {
        &self.entries[k - 1]
    }

    pub fn entries(&self) -> &[FrequencyCost] {
        &self.entries
    }

    /// Usable frequencies, cheapest first (ties by zigzag index).
    pub fn ordered(&self) -> &[usize] {
        &self.order
    }

    /// Carriers over the `count` cheapest frequencies.
    pub fn cumulative_capacity(&self, count: usize) -> u64 {
        self.order[..count].iter().map(|&k| self.get(k).carriers).sum()
    }

    /// Estimated growth (half-bits) of using the `count` cheapest frequencies
    /// in every block.
    pub fn cumulative_inc1_half_bits(&self, count: usize) -> i64 {
        self.order[..count].iter().map(|&k| self.get(k).growth_half_bits).sum()
    }

    pub fn total_capacity(&self) -> u64 {
        self.cumulative_capacity(self.order.len())
    }

    /// Smallest number of cheapest frequencies whose carriers cover `bits`.
    pub fn frequencies_needed(&self, bits: usize) -> Option<usize> {
        if bits == 0 {
            return Some(0);
        }
        let mut acc = 0u64;
        for (i, &k) in self.order.iter().enumerate() {
            acc += self.get(k).carriers;
            if acc >= bits as u64 {
                return Some(i + 1);
            }
        }
        None
    }
}

pub fn frequency_costs(image: &CoefficientImage, table: &CodeLengthTable) -> FrequencyCostTable {
    let mut entries: Vec<FrequencyCost> = (1..64)
        .map(|k| FrequencyCost { k, growth_half_bits: 0, nonzero: 0, carriers: 0, saturated: false })
        .collect();
    for block in &image.blocks {
        for (k, run, v) in nonzero_ac(block) {
            let e = &mut entries[k - 1];
            e.nonzero += 1;
            if v.abs() == 1 {
                e.carriers += 1;
            }
            match table.weighted_growth_half_bits(run, v) {
                Some(g) => e.growth_half_bits += g,
                None => e.saturated = true,
            }
        }
    }
    FrequencyCostTable::from_entries(entries, table.clone())
}

/// Block indices ordered by descending count of zero AC coefficients; equal
/// counts keep their original order.
pub fn sort_blocks(image: &CoefficientImage) -> Vec<usize> {
    let zeros = image.zero_ac_counts();
    let mut order: Vec<usize> = (0..zeros.len()).collect();
    order.sort_by(|&a, &b| zeros[b].cmp(&zeros[a]));
    order
}

/// Frequencies, block count and traversal extent of a coefficient-domain
/// embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DctEmbedPlan {
    /// Selected zigzag indices, cheapest first.
    pub freqs: Vec<usize>,
    /// Number of blocks (in sorted order) taking part.
    pub n_bar: usize,
    /// Zero run of the final traversal pass.
    pub run_bar: u8,
    pub l1: usize,
    /// Estimated growth of the selection in half-bits.
    pub estimated_half_bits: i64,
}

impl DctEmbedPlan {
    pub fn empty() -> Self {
        DctEmbedPlan { freqs: Vec::new(), n_bar: 0, run_bar: 0, l1: 0, estimated_half_bits: 0 }
    }

    pub fn k_bar(&self) -> usize {
        self.freqs.len()
    }

    /// Bit `k` set for every selected zigzag index `k`.
    pub fn freq_mask(&self) -> u64 {
        self.freqs.iter().fold(0, |m, &k| m | (1u64 << k))
    }

    /// Rebuilds a plan from transmitted parameters; frequencies come back in
    /// ascending index order, which does not affect traversal.
    pub fn from_parts(mask: u64, n_bar: usize, run_bar: u8, l1: usize) -> Self {
        let freqs = (1..64).filter(|&k| mask & (1u64 << k) != 0).collect();
        DctEmbedPlan { freqs, n_bar, run_bar, l1, estimated_half_bits: 0 }
    }
}

/// Chooses how many of the cheapest frequencies and how many sorted blocks to
/// use for `l1` bits, minimising estimated growth.
pub fn plan_dct(image: &CoefficientImage, l1: usize, costs: &FrequencyCostTable) -> Result<DctEmbedPlan> {
    if l1 == 0 {
        return Ok(DctEmbedPlan::empty());
    }
    let available = costs.total_capacity() as usize;
    if available < l1 {
        return Err(Error::InsufficientCapacity { needed: l1, available });
    }
    let table = costs.lengths();
    let order = sort_blocks(image);
    let n = order.len();

    // Per sorted block position, carriers and growth at each frequency.
    let mut carriers = vec![[0u32; 64]; n];
    let mut growth = vec![[0i64; 64]; n];
    for (pos, &b) in order.iter().enumerate() {
        for (k, run, v) in nonzero_ac(&image.blocks[b]) {
            if v.abs() == 1 {
                carriers[pos][k] += 1;
            }
            growth[pos][k] += table.weighted_growth_half_bits(run, v).unwrap_or(0);
        }
    }

    let mut block_carriers = vec![0u64; n];
    let mut block_growth = vec![0i64; n];
    let mut best: Option<(i64, usize, usize)> = None;
    for (i, &k) in costs.ordered().iter().enumerate() {
        for pos in 0..n {
            block_carriers[pos] += carriers[pos][k] as u64;
            block_growth[pos] += growth[pos][k];
        }
        let (mut acc, mut cost) = (0u64, 0i64);
        for pos in 0..n {
            acc += block_carriers[pos];
            cost += block_growth[pos];
            if acc >= l1 as u64 {
                if best.is_none_or(|(c, _, _)| cost < c) {
                    best = Some((cost, i + 1, pos + 1));
                }
                break;
            }
        }
    }
    let (cost, kk, n_bar) = best.expect("capacity was checked");
    Ok(DctEmbedPlan {
        freqs: costs.ordered()[..kk].to_vec(),
        n_bar,
        run_bar: 0,
        l1,
        estimated_half_bits: cost,
    })
}

// Selected coefficients grouped by zero run; within a run, by sorted block
// position then zigzag index.
fn traversal(image: &CoefficientImage, plan: &DctEmbedPlan) -> Result<Vec<Vec<(usize, usize)>>> {
    let order = sort_blocks(image);
    if plan.n_bar > order.len() {
        return Err(Error::IntegrityFailure("block count exceeds image"));
    }
    let mask = plan.freq_mask();
    let mut buckets = vec![Vec::new(); MAX_RUN + 1];
    for &b in &order[..plan.n_bar] {
        for (k, run, _) in nonzero_ac(&image.blocks[b]) {
            if mask & (1u64 << k) != 0 {
                buckets[run].push((b, k));
            }
        }
    }
    Ok(buckets)
}

/// Embeds `bits` following the plan and records the final run in
/// `plan.run_bar`. Every selected coefficient of the final run pass is
/// processed, so shifting continues after the last bit within that pass.
pub fn embed_dct(image: &mut CoefficientImage, bits: &[bool], plan: &mut DctEmbedPlan) -> Result<u8> {
    plan.l1 = bits.len();
    plan.run_bar = 0;
    if bits.is_empty() {
        return Ok(0);
    }
    let buckets = traversal(image, plan)?;
    let mut next = 0;
    for (run, bucket) in buckets.iter().enumerate() {
        for &(b, k) in bucket {
            let d = image.blocks[b][k] as i32;
            let bit = if d.abs() == 1 && next < bits.len() {
                next += 1;
                bits[next - 1]
            } else {
                false
            };
            let v = embed_coefficient(d, bit)?;
            if v.abs() > MAX_AC_MAGNITUDE {
                return Err(Error::CoefficientRange(v));
            }
            image.blocks[b][k] = v as i16;
        }
        if next == bits.len() {
            plan.run_bar = run as u8;
            return Ok(plan.run_bar);
        }
    }
    Err(Error::CapacityExceeded { remaining: bits.len() - next })
}

/// Replays the traversal of [`embed_dct`], returning the `plan.l1` embedded
/// bits and restoring the coefficients in place.
pub fn extract_dct(image: &mut CoefficientImage, plan: &DctEmbedPlan) -> Result<Vec<bool>> {
    let mut bits = Vec::with_capacity(plan.l1);
    if plan.l1 == 0 {
        return Ok(bits);
    }
    if plan.run_bar as usize > MAX_RUN {
        return Err(Error::IntegrityFailure("zero run out of range"));
    }
    let buckets = traversal(image, plan)?;
    for bucket in &buckets[..=plan.run_bar as usize] {
        for &(b, k) in bucket {
            let (bit, d) = extract_recover_coefficient(image.blocks[b][k] as i32)?;
            if let Some(bit) = bit {
                if bits.len() < plan.l1 {
                    bits.push(bit);
                } else if bit {
                    return Err(Error::IntegrityFailure("carrier modified beyond payload length"));
                }
            }
            image.blocks[b][k] = d as i16;
        }
    }
    if bits.len() < plan.l1 {
        return Err(Error::PayloadUnderrun { expected: plan.l1, got: bits.len() });
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jpeg::HuffmanSpec;

    fn image(blocks: Vec<Block>) -> CoefficientImage {
        CoefficientImage {
            width: 8 * blocks.len(),
            height: 8,
            blocks,
            quant: [1; 64],
            dc_spec: HuffmanSpec::standard_dc(),
            ac_spec: HuffmanSpec::standard_ac(),
        }
    }

    fn standard() -> CodeLengthTable {
        code_length_tables(&CodeAssignment::new(&HuffmanSpec::standard_ac()).unwrap()).unwrap()
    }

    #[test]
    fn coefficient_rules() {
        assert_eq!(embed_coefficient(1, true).unwrap(), 2);
        assert_eq!(embed_coefficient(1, false).unwrap(), 1);
        assert_eq!(embed_coefficient(-3, true).unwrap(), -4);
        assert_eq!(embed_coefficient(-1, true).unwrap(), -2);
        assert_eq!(embed_coefficient(0, true), Err(Error::ZeroCoefficient));
        assert_eq!(extract_recover_coefficient(2).unwrap(), (Some(true), 1));
        assert_eq!(extract_recover_coefficient(-1).unwrap(), (Some(false), -1));
        assert_eq!(extract_recover_coefficient(6).unwrap(), (None, 5));
        assert_eq!(extract_recover_coefficient(0), Err(Error::ZeroCoefficient));
    }

    #[test]
    fn coefficient_round_trip() {
        for d in (-40..=40).filter(|&d| d != 0) {
            for bit in [false, true] {
                let m = embed_coefficient(d, bit).unwrap();
                let (b, back) = extract_recover_coefficient(m).unwrap();
                assert_eq!(back, d);
                if d.abs() == 1 {
                    assert_eq!(b, Some(bit));
                } else {
                    assert_eq!(b, None);
                }
            }
        }
    }

    #[test]
    fn standard_table_spot_values() {
        let t = standard();
        assert_eq!(t.hclt(0, 1), 2);
        assert_eq!(t.hclt(0, 4), 4);
        assert_eq!(t.hcit(0, 4), 1);
        assert_eq!(t.hcit(0, 8), 6);
        for r in 0..16 {
            let mut acc = t.hclt(r, 1) as i32;
            for c in 1..10 {
                acc += t.hcit(r, c);
                assert_eq!(acc, t.hclt(r, c + 1) as i32);
            }
        }
    }

    #[test]
    fn single_block_costs() {
        let t = standard();
        for (value, expect_half) in [(3, 4), (1, 1), (4, 0)] {
            let mut b = [0i16; 64];
            b[1] = value;
            let costs = frequency_costs(&image(vec![b]), &t);
            let e = costs.get(1);
            assert_eq!(e.growth_half_bits, expect_half, "value {value}");
            assert_eq!(e.nonzero, 1);
        }
        let mut b = [0i16; 64];
        b[1] = 3;
        let costs = frequency_costs(&image(vec![b]), &t);
        assert_eq!(costs.get(1).uf(), Some(Ratio::integer(2)));
        // no carrier at this frequency
        assert!(costs.ordered().is_empty());
    }

    #[test]
    fn block_sort_is_stable_descending() {
        let zero_counts = [60usize, 63, 61];
        let blocks = zero_counts
            .iter()
            .map(|&z| {
                let mut b = [0i16; 64];
                for v in b[1..].iter_mut().take(63 - z) {
                    *v = 1;
                }
                b
            })
            .collect();
        assert_eq!(sort_blocks(&image(blocks)), vec![1, 2, 0]);
        let mut b = [0i16; 64];
        b[5] = 2;
        assert_eq!(sort_blocks(&image(vec![b, b, [0; 64]])), vec![2, 0, 1]);
    }

    #[test]
    fn single_carrier_embed() {
        let mut b = [0i16; 64];
        b[1] = 1;
        let mut img = image(vec![b]);
        let costs = frequency_costs(&img, &standard());
        let mut plan = plan_dct(&img, 1, &costs).unwrap();
        assert_eq!(plan.freqs, vec![1]);
        assert_eq!(embed_dct(&mut img, &[true], &mut plan).unwrap(), 0);
        assert_eq!(img.blocks[0][1], 2);
        let bits = extract_dct(&mut img, &plan).unwrap();
        assert_eq!(bits, vec![true]);
        assert_eq!(img.blocks[0][1], 1);
    }

    #[test]
    fn shift_continues_through_final_pass() {
        let mut b = [0i16; 64];
        b[1] = 1;
        b[2] = 5;
        let original = b;
        let mut img = image(vec![b]);
        let mut plan = DctEmbedPlan { freqs: vec![1, 2], n_bar: 1, run_bar: 0, l1: 1, estimated_half_bits: 0 };
        embed_dct(&mut img, &[false], &mut plan).unwrap();
        assert_eq!(img.blocks[0][1], 1);
        assert_eq!(img.blocks[0][2], 6);
        assert_eq!(extract_dct(&mut img, &plan).unwrap(), vec![false]);
        assert_eq!(img.blocks[0], original);
    }

    #[test]
    fn empty_payload_plan() {
        let img = image(vec![[0; 64]]);
        let costs = frequency_costs(&img, &standard());
        let plan = plan_dct(&img, 0, &costs).unwrap();
        assert_eq!(plan.k_bar(), 0);
        assert_eq!(plan.n_bar, 0);
    }

    #[test]
    fn saturation_uses_every_usable_frequency() {
        let mut blocks = Vec::new();
        for i in 0..4 {
            let mut b = [0i16; 64];
            b[1 + i] = 1;
            b[10] = -1;
            blocks.push(b);
        }
        let img = image(blocks);
        let costs = frequency_costs(&img, &standard());
        let total = costs.total_capacity() as usize;
        let plan = plan_dct(&img, total, &costs).unwrap();
        assert_eq!(plan.k_bar(), costs.ordered().len());
        assert_eq!(plan.n_bar, 4);
        assert!(matches!(plan_dct(&img, total + 1, &costs), Err(Error::InsufficientCapacity { .. })));
    }

    #[test]
    fn tampered_carrier_after_payload_detected() {
        let mut b = [0i16; 64];
        b[1] = 1;
        b[2] = 1;
        let mut img = image(vec![b]);
        let mut plan = DctEmbedPlan { freqs: vec![1, 2], n_bar: 1, run_bar: 0, l1: 0, estimated_half_bits: 0 };
        embed_dct(&mut img, &[true], &mut plan).unwrap();
        img.blocks[0][2] = 2;
        assert!(matches!(extract_dct(&mut img, &plan), Err(Error::IntegrityFailure(_))));
    }
}
