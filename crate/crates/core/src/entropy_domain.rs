//! Lossless embedding in the Huffman-coded stream.
//!
//! The AC run/length histogram is sorted so the most frequent symbols get the
//! shortest codes. A peak symbol is then given a second code by shifting the
//! symbols between it and the first unused one a position to the right;
//! occurrences of the peak choose between its two codes to carry bits.
//! Coefficients never change.

use crate::cost::Ratio;
use crate::error::{Error, Result};
use crate::jpeg::{CodeAssignment, HuffmanSpec, ScanTokens, TableClass};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VlcEntry {
    pub symbol: u8,
    pub code: u16,
    pub length: u8,
    pub count: u64,
}

/// Occurrences of every code position of an AC table, in DHT order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VlcHistogram {
    pub table_id: u8,
    pub entries: Vec<VlcEntry>,
}

impl VlcHistogram {
    pub fn counts(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.count).collect()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    /// Huffman table whose DHT order matches the entries.
    pub fn to_spec(&self) -> HuffmanSpec {
        let mut counts = [0u8; 16];
        for e in &self.entries {
            counts[e.length as usize - 1] += 1;
        }
        HuffmanSpec {
            class: TableClass::Ac,
            id: self.table_id,
            counts,
            symbols: self.entries.iter().map(|e| e.symbol).collect(),
        }
    }

    /// Total bits spent on AC codes (VLI bits excluded).
    pub fn code_bits(&self) -> u64 {
        self.entries.iter().map(|e| e.count * e.length as u64).sum()
    }
}

pub fn build_histogram(tokens: &ScanTokens, ac: &CodeAssignment, table_id: u8) -> VlcHistogram {
    let counts = tokens.slot_counts(ac.len());
    let entries = (0..ac.len())
        .map(|slot| {
            let (code, length) = ac.code(slot);
            VlcEntry { symbol: ac.symbol(slot), code, length, count: counts[slot] }
        })
        .collect();
    VlcHistogram { table_id, entries }
}

/// Reassigns symbols to code positions by descending frequency. Codes stay
/// attached to positions; equal counts keep their DHT order.
pub fn optimize_table(hist: &VlcHistogram) -> (VlcHistogram, HuffmanSpec) {
    let mut order: Vec<usize> = (0..hist.entries.len()).collect();
    order.sort_by(|&a, &b| hist.entries[b].count.cmp(&hist.entries[a].count));
    let entries = order
        .iter()
        .zip(&hist.entries)
        .map(|(&from, at)| VlcEntry {
            symbol: hist.entries[from].symbol,
            code: at.code,
            length: at.length,
            count: hist.entries[from].count,
        })
        .collect();
    let sorted = VlcHistogram { table_id: hist.table_id, entries };
    let spec = sorted.to_spec();
    (sorted, spec)
}

/// Peak position and the zero position that absorbs the shift (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeakZero {
    pub p: usize,
    pub z: usize,
}

/// Embedding cost of one candidate peak.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyCost {
    pub position: usize,
    pub symbol: u8,
    pub count: u64,
    pub zero: usize,
    /// Growth from re-coding the shifted symbols, in bits.
    pub shift_bits: i64,
    /// Expected growth from embedding `count` uniform bits, in half-bits.
    pub embed_half_bits: i64,
}

impl EntropyCost {
    pub fn s(&self) -> Ratio {
        Ratio::integer(self.shift_bits)
    }

    pub fn m(&self) -> Ratio {
        Ratio::half_bits(self.embed_half_bits)
    }

    pub fn e(&self) -> Ratio {
        Ratio::new(2 * self.shift_bits + self.embed_half_bits, 2 * self.count)
    }

    pub fn inc2(&self) -> Ratio {
        self.e().scale(self.count)
    }

    pub fn inc2_half_bits(&self) -> i64 {
        2 * self.shift_bits + self.embed_half_bits
    }

    pub fn peak_zero(&self) -> PeakZero {
        PeakZero { p: self.position, z: self.zero }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyCostTable {
    entries: Vec<EntropyCost>,
    order: Vec<usize>,
}

impl EntropyCostTable {
    pub fn from_entries(entries: Vec<EntropyCost>) -> Self {
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&a, &b| {
            entries[a].e().cmp(&entries[b].e()).then(entries[a].position.cmp(&entries[b].position))
        });
        EntropyCostTable { entries, order }
    }

    /// Candidates in position order.
    pub fn entries(&self) -> &[EntropyCost] {
        &self.entries
    }

    /// Candidates by ascending cost (ties by position).
    pub fn ascending(&self) -> impl Iterator<Item = &EntropyCost> {
        self.order.iter().map(|&i| &self.entries[i])
    }

    pub fn at_position(&self, p: usize) -> Option<&EntropyCost> {
        self.entries.iter().find(|e| e.position == p)
    }

    pub fn for_symbol(&self, symbol: u8) -> Option<&EntropyCost> {
        self.entries.iter().find(|e| e.symbol == symbol)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Costs of every usable peak of a sorted histogram.
pub fn entropy_costs(hist: &VlcHistogram) -> Result<EntropyCostTable> {
    let e = &hist.entries;
    if e.iter().all(|x| x.count > 0) {
        return Err(Error::NoZeroPoint);
    }
    let len = |i: usize| e[i].length as i64;
    let mut out = Vec::new();
    for p in 0..e.len() {
        if e[p].count == 0 {
            continue;
        }
        let Some(z) = (p + 1..e.len()).find(|&i| e[i].count == 0) else {
            continue;
        };
        let shift: i64 = (p + 1..z).map(|i| e[i].count as i64 * (len(i + 1) - len(i))).sum();
        out.push(EntropyCost {
            position: p,
            symbol: e[p].symbol,
            count: e[p].count,
            zero: z,
            shift_bits: shift,
            embed_half_bits: e[p].count as i64 * (len(p + 1) - len(p)),
        });
    }
    Ok(EntropyCostTable::from_entries(out))
}

/// Rightmost position whose count exceeds `l2`, and the first zero after it.
pub fn select_peak(hist: &VlcHistogram, l2: usize) -> Result<PeakZero> {
    let e = &hist.entries;
    let p = (0..e.len()).rev().find(|&i| e[i].count > l2 as u64).ok_or(Error::NoFeasiblePeak(l2))?;
    let z = (p + 1..e.len()).find(|&i| e[i].count == 0).ok_or(Error::NoZeroPoint)?;
    Ok(PeakZero { p, z })
}

/// Table after shifting: the peak symbol occupies `p` and `p + 1`, the
/// symbols formerly at `p + 1 .. z` move one position right and the zero
/// symbol is dropped.
pub fn shifted_spec(spec: &HuffmanSpec, pz: PeakZero) -> HuffmanSpec {
    let s = &spec.symbols;
    let mut symbols = Vec::with_capacity(s.len());
    symbols.extend_from_slice(&s[..=pz.p]);
    symbols.push(s[pz.p]);
    symbols.extend_from_slice(&s[pz.p + 1..pz.z]);
    symbols.extend_from_slice(&s[pz.z + 1..]);
    HuffmanSpec { symbols, ..spec.clone() }
}

/// Shifts the histogram at `pz` and embeds `bits` in the first occurrences of
/// the peak. `tokens` must be coded under `spec`; returns the marked table.
pub fn shift_and_embed(tokens: &mut ScanTokens, spec: &HuffmanSpec, pz: PeakZero, bits: &[bool]) -> Result<HuffmanSpec> {
    let PeakZero { p, z } = pz;
    if !(p < z && z < spec.symbols.len()) {
        return Err(Error::InvalidArgument(format!("peak {p} and zero {z} out of order")));
    }
    let counts = tokens.slot_counts(spec.symbols.len());
    if counts[z] != 0 {
        return Err(Error::InvalidArgument(format!("position {z} is in use")));
    }
    if bits.len() as u64 > counts[p] {
        return Err(Error::PayloadOverflow { requested: bits.len(), available: counts[p] as usize });
    }
    let mut next = 0;
    for t in tokens.ac_tokens_mut() {
        let slot = t.slot as usize;
        if slot == p {
            if next < bits.len() {
                if bits[next] {
                    t.slot += 1;
                }
                next += 1;
            }
        } else if slot > p && slot < z {
            t.slot += 1;
        }
    }
    Ok(shifted_spec(spec, pz))
}

/// Locates the duplicated symbol of a marked table. `slot_counts` are the
/// occurrences of each position in the marked scan.
pub fn detect_peak_zero(spec: &HuffmanSpec, slot_counts: &[u64]) -> Result<PeakZero> {
    let mut seen = [None::<usize>; 256];
    let mut dup: Option<(usize, usize)> = None;
    for (i, &s) in spec.symbols.iter().enumerate() {
        match seen[s as usize] {
            None => seen[s as usize] = Some(i),
            Some(first) => {
                if dup.is_some() {
                    return Err(Error::MultipleDuplicates);
                }
                dup = Some((first, i));
            }
        }
    }
    let (p, second) = dup.ok_or(Error::NoDuplicate)?;
    if second != p + 1 {
        return Err(Error::IntegrityFailure("duplicated symbol positions are not adjacent"));
    }
    let n = spec.symbols.len();
    let z = (p + 2..n).find(|&i| slot_counts[i] == 0).map_or(n - 1, |i| i - 1);
    Ok(PeakZero { p, z })
}

/// Reads `l2` bits from a marked stream and undoes the shift. Tokens end up
/// coded under the returned pre-shift table.
pub fn extract_restore(
    tokens: &mut ScanTokens,
    spec: &HuffmanSpec,
    pz: PeakZero,
    l2: usize,
) -> Result<(Vec<bool>, HuffmanSpec)> {
    let PeakZero { p, z } = pz;
    let n = spec.symbols.len();
    if !(p < z && z < n) {
        return Err(Error::IntegrityFailure("peak and zero positions out of order"));
    }
    let mut present = [false; 256];
    for &s in &spec.symbols {
        present[s as usize] = true;
    }
    let universe = HuffmanSpec::standard_ac().symbols;
    let missing: Vec<u8> = universe.into_iter().filter(|&s| !present[s as usize]).collect();
    let [missing] = missing[..] else {
        return Err(Error::IntegrityFailure("table does not drop exactly one symbol"));
    };

    let mut bits = Vec::with_capacity(l2);
    for t in tokens.ac_tokens_mut() {
        let slot = t.slot as usize;
        if slot == p || slot == p + 1 {
            if bits.len() < l2 {
                bits.push(slot == p + 1);
            } else if slot == p + 1 {
                return Err(Error::IntegrityFailure("second peak code used beyond payload length"));
            }
            t.slot = p as u8;
        } else if slot > p + 1 && slot <= z {
            t.slot -= 1;
        } else if slot > z && slot < n {
            return Err(Error::IntegrityFailure("token coded at an unused position"));
        }
    }
    if bits.len() < l2 {
        return Err(Error::PayloadUnderrun { expected: l2, got: bits.len() });
    }
    let s = &spec.symbols;
    let mut symbols = Vec::with_capacity(n);
    symbols.extend_from_slice(&s[..=p]);
    symbols.extend_from_slice(&s[p + 2..=z]);
    symbols.push(missing);
    symbols.extend_from_slice(&s[z + 1..]);
    Ok((bits, HuffmanSpec { symbols, ..spec.clone() }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(counts: &[u64], lengths: &[u8]) -> VlcHistogram {
        VlcHistogram {
            table_id: 0,
            entries: counts
                .iter()
                .zip(lengths)
                .enumerate()
                .map(|(i, (&count, &length))| VlcEntry { symbol: i as u8, code: 0, length, count })
                .collect(),
        }
    }

    #[test]
    fn peak_selection_walks_from_the_right() {
        let h = hist(&[50, 30, 10, 0], &[2, 2, 3, 3]);
        assert_eq!(select_peak(&h, 20).unwrap(), PeakZero { p: 1, z: 3 });
        assert_eq!(select_peak(&h, 40).unwrap(), PeakZero { p: 0, z: 3 });
        assert_eq!(select_peak(&h, 50), Err(Error::NoFeasiblePeak(50)));
        let full = hist(&[5, 4], &[1, 1]);
        assert_eq!(select_peak(&full, 1), Err(Error::NoZeroPoint));
        assert_eq!(entropy_costs(&full), Err(Error::NoZeroPoint));
    }

    #[test]
    fn hand_evaluated_costs() {
        let h = hist(&[100, 40, 0], &[4, 5, 5]);
        let c = entropy_costs(&h).unwrap();
        let e = c.at_position(0).unwrap();
        assert_eq!(e.s(), Ratio::integer(0));
        assert_eq!(e.m(), Ratio::integer(50));
        assert_eq!(e.e(), Ratio::half_bits(1));
        assert_eq!(e.inc2(), Ratio::integer(50));
        // adjacent zero point: nothing shifts
        let e = c.at_position(1).unwrap();
        assert_eq!(e.shift_bits, 0);
        assert_eq!(e.e(), Ratio::integer(0));
    }

    #[test]
    fn optimize_swaps_by_frequency() {
        let h = hist(&[10, 20], &[2, 3]);
        let (sorted, spec) = optimize_table(&h);
        assert_eq!(spec.symbols, vec![1, 0]);
        assert_eq!(h.code_bits() - sorted.code_bits(), 10);
        let (again, _) = optimize_table(&sorted);
        assert_eq!(again, sorted);
    }

    #[test]
    fn shifted_spec_layout() {
        let spec = HuffmanSpec { class: TableClass::Ac, id: 0, counts: [0, 5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0], symbols: vec![10, 11, 12, 13, 14] };
        let marked = shifted_spec(&spec, PeakZero { p: 1, z: 3 });
        assert_eq!(marked.symbols, vec![10, 11, 11, 12, 14]);
        let pz = detect_peak_zero(&marked, &[9, 5, 0, 3, 0]).unwrap();
        assert_eq!(pz, PeakZero { p: 1, z: 3 });
    }

    #[test]
    fn detection_errors() {
        let std = HuffmanSpec::standard_ac();
        assert_eq!(detect_peak_zero(&std, &[1; 162]), Err(Error::NoDuplicate));
        let mut two = std.clone();
        two.symbols[5] = two.symbols[4];
        two.symbols[9] = two.symbols[8];
        assert_eq!(detect_peak_zero(&two, &[1; 162]), Err(Error::MultipleDuplicates));
        let mut apart = std;
        apart.symbols[7] = apart.symbols[4];
        assert!(matches!(detect_peak_zero(&apart, &[1; 162]), Err(Error::IntegrityFailure(_))));
    }
}
