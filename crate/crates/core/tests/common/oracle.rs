//! Brute-force reference implementations used to check the optimised
//! searches.

use std::cmp::Ordering;

use mdrdh::dct_domain::{code_length_tables, nonzero_ac, FrequencyCost, FrequencyCostTable};
use mdrdh::entropy_domain::{EntropyCost, EntropyCostTable};
use mdrdh::jpeg::{Block, CodeAssignment, CoefficientImage, HuffmanSpec};
use rand::Rng;

/// Random sparse image of `bw x bh` blocks under the standard tables.
pub fn random_image<R: Rng>(rng: &mut R, bw: usize, bh: usize) -> CoefficientImage {
    let blocks = (0..bw * bh)
        .map(|_| {
            let mut b: Block = [0; 64];
            b[0] = rng.gen_range(-60..=60);
            let density = rng.gen_range(0.05..0.7);
            for (k, c) in b.iter_mut().enumerate().skip(1) {
                if rng.gen_bool(density / (1.0 + k as f64 / 12.0)) {
                    let mag = match rng.gen_range(0..10) {
                        0..=5 => 1,
                        6 | 7 => 2,
                        8 => 3,
                        _ => rng.gen_range(4..=40),
                    };
                    *c = if rng.gen() { mag } else { -mag };
                }
            }
            b
        })
        .collect();
    CoefficientImage {
        width: bw * 8,
        height: bh * 8,
        blocks,
        quant: [1; 64],
        dc_spec: HuffmanSpec::standard_dc(),
        ac_spec: HuffmanSpec::standard_ac(),
    }
}

pub fn standard_lengths() -> mdrdh::dct_domain::CodeLengthTable {
    code_length_tables(&CodeAssignment::new(&HuffmanSpec::standard_ac()).unwrap()).unwrap()
}

/// Best (cost, frequency count, block count) by trying every pair, with
/// frequencies ranked by growth per nonzero coefficient and blocks by zero
/// count. Ties keep the smaller frequency count, then the smaller block count.
pub fn exhaustive_dct_plan(image: &CoefficientImage, l1: usize) -> Option<(i64, Vec<usize>, usize)> {
    let lengths = standard_lengths();
    let mut growth = [0i64; 64];
    let mut nonzero = [0u64; 64];
    let mut carriers = [0u64; 64];
    let mut saturated = [false; 64];
    for b in &image.blocks {
        for (k, run, v) in nonzero_ac(b) {
            nonzero[k] += 1;
            carriers[k] += (v.abs() == 1) as u64;
            match lengths.weighted_growth_half_bits(run, v) {
                Some(g) => growth[k] += g,
                None => saturated[k] = true,
            }
        }
    }
    let mut freqs: Vec<usize> = (1..64).filter(|&k| nonzero[k] > 0 && carriers[k] > 0 && !saturated[k]).collect();
    // growth[a]/nonzero[a] vs growth[b]/nonzero[b]
    freqs.sort_by(|&a, &b| {
        (growth[a] as i128 * nonzero[b] as i128)
            .cmp(&(growth[b] as i128 * nonzero[a] as i128))
            .then(a.cmp(&b))
    });
    let zeros = |b: &Block| b[1..].iter().filter(|&&c| c == 0).count();
    let mut blocks: Vec<&Block> = image.blocks.iter().collect();
    blocks.sort_by_key(|b| std::cmp::Reverse(zeros(b)));

    let mut best: Option<(i64, usize, usize)> = None;
    for kk in 1..=freqs.len() {
        let set = &freqs[..kk];
        for n in 1..=blocks.len() {
            let mut cap = 0;
            let mut cost = 0;
            for b in &blocks[..n] {
                for (k, run, v) in nonzero_ac(b) {
                    if set.contains(&k) {
                        cap += (v.abs() == 1) as usize;
                        cost += lengths.weighted_growth_half_bits(run, v).unwrap();
                    }
                }
            }
            if cap >= l1 {
                let cand = (cost, kk, n);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
    }
    best.map(|(c, kk, n)| (c, freqs[..kk].to_vec(), n))
}

/// Toy frequency table from (growth half-bits, nonzero, carriers) per
/// frequency, starting at zigzag index 1.
pub fn toy_uf(rows: &[(i64, u64, u64)]) -> FrequencyCostTable {
    let entries = (1..64)
        .map(|k| {
            let (g, nz, c) = rows.get(k - 1).copied().unwrap_or((0, 0, 0));
            FrequencyCost { k, growth_half_bits: g, nonzero: nz, carriers: c.min(nz), saturated: false }
        })
        .collect();
    FrequencyCostTable::from_entries(entries, standard_lengths())
}

/// Toy peak table from (shift bits, embed half-bits, count).
pub fn toy_e(rows: &[(i64, i64, u64)]) -> EntropyCostTable {
    EntropyCostTable::from_entries(
        rows.iter()
            .enumerate()
            .map(|(i, &(s, m, count))| EntropyCost {
                position: i,
                symbol: i as u8,
                count,
                zero: rows.len(),
                shift_bits: s,
                embed_half_bits: m,
            })
            .collect(),
    )
}

/// Split chosen by exhaustive enumeration: (l1, l2, k, peak, cost).
///
/// Candidates pair a frequency prefix length `i` with either no peak or a
/// peak whose per-bit cost does not exceed that of the `i`-th frequency.
/// Among feasible candidates the cheapest wins; ties prefer smaller `i`,
/// then no peak, then cheaper peaks. Without any feasible candidate every
/// peak is allowed with any prefix, including the empty one.
pub fn brute_force_split(
    rows_uf: &[(i64, u64, u64)],
    rows_e: &[(i64, i64, u64)],
    length: usize,
) -> Option<(usize, usize, usize, Option<u8>, i64)> {
    if length == 0 {
        return Some((0, 0, 0, None, 0));
    }
    // frequencies as (k, growth, nonzero, carriers), usable only
    let mut freqs: Vec<(usize, i64, u64, u64)> = rows_uf
        .iter()
        .enumerate()
        .map(|(i, &(g, nz, c))| (i + 1, g, nz, c.min(nz)))
        .filter(|f| f.2 > 0 && f.3 > 0)
        .collect();
    let per_bit = |g: i64, d: u64| (g as i128, d as i128);
    let cmp_frac = |a: (i128, i128), b: (i128, i128)| (a.0 * b.1).cmp(&(b.0 * a.1));
    freqs.sort_by(|a, b| cmp_frac(per_bit(a.1, 2 * a.2), per_bit(b.1, 2 * b.2)).then(a.0.cmp(&b.0)));
    // peaks as (index, e-fraction, inc2 half-bits, count)
    let mut peaks: Vec<(usize, (i128, i128), i64, u64)> = rows_e
        .iter()
        .enumerate()
        .filter(|(_, r)| r.2 > 0)
        .map(|(i, &(s, m, c))| (i, per_bit(2 * s + m, 2 * c), 2 * s + m, c))
        .collect();
    peaks.sort_by(|a, b| cmp_frac(a.1, b.1).then(a.0.cmp(&b.0)));

    let evaluate = |i: usize, peak: Option<usize>| -> Option<(i64, usize, usize, Option<u8>)> {
        let l2 = peak.map_or(0, |j| ((peaks[j].3 - 1) as usize).min(length));
        let l1 = length - l2;
        let cap: u64 = freqs[..i].iter().map(|f| f.3).sum();
        if cap < l1 as u64 {
            return None;
        }
        let mut cost = 0;
        if l1 > 0 {
            cost += freqs[..i].iter().map(|f| f.1).sum::<i64>();
        }
        if l2 > 0 {
            cost += peaks[peak.unwrap()].2;
        }
        Some((cost, l1, l2, if l2 > 0 { peak.map(|j| peaks[j].0 as u8) } else { None }))
    };
    let mut best = None;
    type Best = Option<((i64, usize, usize), (usize, usize, usize, Option<u8>, i64))>;
    let offer = |best: &mut Best, key: (i64, usize, usize), r: (i64, usize, usize, Option<u8>), i: usize| {
        if best.as_ref().is_none_or(|(k, _)| key.cmp(k) == Ordering::Less) {
            let k = if r.1 > 0 { i } else { 0 };
            *best = Some((key, (r.1, r.2, k, r.3, r.0)));
        }
    };
    for i in 1..=freqs.len() {
        let uf = per_bit(freqs[i - 1].1, 2 * freqs[i - 1].2);
        if let Some(r) = evaluate(i, None) {
            offer(&mut best, (r.0, i, 0), r, i);
        }
        for (j, peak) in peaks.iter().enumerate() {
            if cmp_frac(peak.1, uf) != Ordering::Greater {
                if let Some(r) = evaluate(i, Some(j)) {
                    offer(&mut best, (r.0, i, j + 1), r, i);
                }
            }
        }
    }
    if best.is_none() {
        for i in 0..=freqs.len() {
            for j in 0..peaks.len() {
                if let Some(r) = evaluate(i, Some(j)) {
                    offer(&mut best, (r.0, i, j + 1), r, i);
                }
            }
        }
    }
    best.map(|(_, r)| r)
}
