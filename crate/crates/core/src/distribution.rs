//! Splitting the payload between the coefficient and entropy-coding domains.

use crate::cost::Ratio;
use crate::dct_domain::FrequencyCostTable;
use crate::entropy_domain::{EntropyCost, EntropyCostTable};
use crate::error::{Error, Result};

/// Scratch values of the peak judgment on the marked image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    /// Position of the chosen peak in the marked sorted histogram.
    pub j_prime: usize,
    /// Position of the alternative peak.
    pub j_double: usize,
    pub k_prime: usize,
    pub s1: Ratio,
    pub s2: Ratio,
    pub switched: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionState {
    pub length: usize,
    /// Bits for the coefficient domain.
    pub l1: usize,
    /// Bits for the entropy domain.
    pub l2: usize,
    /// Number of cheapest frequencies the estimate charges for.
    pub k: usize,
    /// Peak run/length symbol, tracked by symbol because positions move when
    /// the histogram is re-sorted.
    pub peak: Option<u8>,
    /// Estimated growth of the split, in half-bits.
    pub estimated_half_bits: i64,
    pub judgment: Option<Judgment>,
}

impl DistributionState {
    pub fn all_dct(length: usize, uf: &FrequencyCostTable) -> Self {
        let k = uf.frequencies_needed(length).unwrap_or(uf.ordered().len());
        DistributionState {
            length,
            l1: length,
            l2: 0,
            k,
            peak: None,
            estimated_half_bits: uf.cumulative_inc1_half_bits(k),
            judgment: None,
        }
    }

    /// Moves the bits the peak cannot hold (`count` occurrences leave room
    /// for `count - 1`) to the coefficient domain. Returns whether anything
    /// moved.
    pub fn absorb_excess(&mut self, count: u64) -> bool {
        if (self.l2 as u64) < count {
            return false;
        }
        let excess = (self.l2 + 1).saturating_sub(count as usize).min(self.l2);
        self.l2 -= excess;
        self.l1 += excess;
        if self.l2 == 0 {
            self.peak = None;
        }
        true
    }
}

/// Bits a peak with `count` occurrences takes out of `length`.
pub fn peak_share(count: u64, length: usize) -> usize {
    (count.saturating_sub(1) as usize).min(length)
}

/// Initial split. Frequencies are visited cheapest first; for each, every
/// peak no more expensive per bit than that frequency is a candidate, as is
/// sending everything to the coefficient domain. The cheapest feasible
/// candidate over the whole loop wins (ties keep the earliest).
pub fn initialize_distribution(
    uf: &FrequencyCostTable,
    e: &EntropyCostTable,
    length: usize,
) -> Result<DistributionState> {
    let empty = DistributionState {
        length,
        l1: 0,
        l2: 0,
        k: 0,
        peak: None,
        estimated_half_bits: 0,
        judgment: None,
    };
    if length == 0 {
        return Ok(empty);
    }
    let peaks: Vec<&EntropyCost> = e.ascending().collect();
    let kmax = uf.ordered().len();
    let mut best: Option<DistributionState> = None;
    let consider = |best: &mut Option<DistributionState>, k: usize, peak: Option<&EntropyCost>| {
        let l2 = peak.map_or(0, |p| peak_share(p.count, length));
        let l1 = length - l2;
        if uf.cumulative_capacity(k) < l1 as u64 {
            return;
        }
        let mut cost = 0;
        if l1 > 0 {
            cost += uf.cumulative_inc1_half_bits(k);
        }
        if l2 > 0 {
            cost += peak.unwrap().inc2_half_bits();
        }
        if best.as_ref().is_none_or(|b| cost < b.estimated_half_bits) {
            *best = Some(DistributionState {
                length,
                l1,
                l2,
                k: if l1 > 0 { k } else { 0 },
                peak: if l2 > 0 { peak.map(|p| p.symbol) } else { None },
                estimated_half_bits: cost,
                judgment: None,
            });
        }
    };
    for i in 1..=kmax {
        let threshold = uf.get(uf.ordered()[i - 1]).uf().expect("usable frequency");
        consider(&mut best, i, None);
        for p in &peaks {
            if p.e() > threshold {
                break;
            }
            consider(&mut best, i, Some(p));
        }
    }
    if best.is_none() {
        // nothing fits under the cost guard: accept any peak that fits
        for i in 0..=kmax {
            for p in &peaks {
                consider(&mut best, i, Some(p));
            }
        }
    }
    best.ok_or_else(|| Error::InsufficientTotalCapacity {
        requested: length,
        dct_capacity: uf.total_capacity() as usize,
        entropy_capacity: peaks.iter().map(|p| peak_share(p.count, usize::MAX)).max().unwrap_or(0),
    })
}

/// Checks the chosen peak against the highest cheaper peak of the marked
/// image. Moving to the alternative sends the bits it cannot hold to the
/// coefficient domain; the move happens when staying costs more than that.
pub fn judge_peak(e_marked: &EntropyCostTable, state: &DistributionState, uf: &FrequencyCostTable) -> DistributionState {
    let mut out = state.clone();
    let Some(symbol) = state.peak else {
        return out;
    };
    if state.l2 == 0 {
        return out;
    }
    let Some(jp) = e_marked.for_symbol(symbol) else {
        return out;
    };
    let mut jdd: Option<&EntropyCost> = None;
    for c in e_marked.ascending() {
        if c.e() >= jp.e() {
            break;
        }
        if jdd.is_none_or(|d| c.count > d.count) {
            jdd = Some(c);
        }
    }
    let Some(jdd) = jdd else {
        return out;
    };
    let s1 = jp.e().scale(state.l2 as u64).sub(&jdd.e().scale(jdd.count));
    let l2_new = peak_share(jdd.count, state.l2);
    let remainder = state.l2 - l2_new;
    let l1_new = state.l1 + remainder;
    let Some(needed) = uf.frequencies_needed(l1_new) else {
        return out;
    };
    let k_prime = state.k.max(needed);
    let s2 = Ratio::half_bits(uf.cumulative_inc1_half_bits(k_prime) - uf.cumulative_inc1_half_bits(state.k));
    let switched = s1 > s2;
    out.judgment = Some(Judgment {
        j_prime: jp.position,
        j_double: jdd.position,
        k_prime,
        s1,
        s2,
        switched,
    });
    if switched {
        out.l1 = l1_new;
        out.l2 = l2_new;
        out.k = k_prime;
        out.peak = (l2_new > 0).then_some(jdd.symbol);
    }
    out
}
