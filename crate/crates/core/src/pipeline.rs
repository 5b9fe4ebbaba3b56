//! End-to-end embedding and extraction on JPEG files.

use std::fmt;
use std::str::FromStr;

use crate::dct_domain::{code_length_tables, embed_dct, extract_dct, frequency_costs, plan_dct, DctEmbedPlan, FrequencyCostTable};
use crate::distribution::{initialize_distribution, judge_peak, DistributionState};
use crate::entropy_domain::{
    build_histogram, detect_peak_zero, entropy_costs, extract_restore, optimize_table, select_peak, shift_and_embed,
    EntropyCostTable, PeakZero, VlcHistogram,
};
use crate::error::{Error, Result};
use crate::jpeg::{
    encode_tokens, entropy_decode, CodeAssignment, CoefficientImage, HuffmanSpec, JpegFile, ScanTokens,
    AC_SYMBOL_COUNT,
};
use crate::side_info::SideInfo;

/// Bound on the rounds that move bits from an overfull peak to the
/// coefficient domain.
pub const REFINE_ROUNDS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Cost-driven split between both domains.
    Multi,
    /// Every bit in the coefficients; the standard table is kept.
    DctOnly,
    /// Every bit in the Huffman-coded stream after table optimization.
    EntropyOnly,
    /// No payload; only the table optimization.
    HuffoptOnly,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Multi, Mode::DctOnly, Mode::EntropyOnly, Mode::HuffoptOnly];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Multi => "multi",
            Mode::DctOnly => "dct-only",
            Mode::EntropyOnly => "entropy-only",
            Mode::HuffoptOnly => "huffopt-only",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode {s:?}")))
    }
}

/// What an embedding did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedReport {
    pub mode: Mode,
    pub side_info: SideInfo,
    pub plan: DctEmbedPlan,
    /// Peak and zero positions in the sorted table, when bits went there.
    pub peak_zero: Option<PeakZero>,
    pub peak_symbol: Option<u8>,
    pub distribution: Option<DistributionState>,
    pub refine_rounds: usize,
}

impl EmbedReport {
    pub fn l1(&self) -> usize {
        self.side_info.l1 as usize
    }

    pub fn l2(&self) -> usize {
        self.side_info.l2 as usize
    }
}

/// A parsed input that satisfies every precondition of embedding.
struct Carrier {
    file: JpegFile,
    image: CoefficientImage,
    tokens: ScanTokens,
    dc: CodeAssignment,
    std_ac: CodeAssignment,
    uf: FrequencyCostTable,
}

impl Carrier {
    fn load(bytes: &[u8]) -> Result<Self> {
        let file = JpegFile::parse(bytes)?;
        if file.segments_before_scan().iter().any(SideInfo::is_side_info) {
            return Err(Error::InvalidArgument("file already carries side information".into()));
        }
        let (image, tokens) = entropy_decode(&file)?;
        if image.ac_spec.symbols.len() != AC_SYMBOL_COUNT {
            return Err(Error::NotFullTable(image.ac_spec.symbols.len()));
        }
        if !image.ac_spec.is_standard_ac() {
            return Err(Error::NonStandardTable);
        }
        let dc = CodeAssignment::new(&image.dc_spec)?;
        let std_ac = CodeAssignment::new(&image.ac_spec)?;
        // Restoration regenerates the scan from coefficients, so the input
        // scan must be exactly what canonical coding produces.
        let canonical = ScanTokens::from_blocks(&image.blocks, &dc, &std_ac)?;
        if canonical != tokens || encode_tokens(&canonical, &dc, &std_ac)? != file.scan {
            return Err(Error::NonCanonicalScan);
        }
        let uf = frequency_costs(&image, &code_length_tables(&std_ac)?);
        Ok(Carrier { file, image, tokens, dc, std_ac, uf })
    }

    fn table_id(&self) -> u8 {
        self.image.ac_spec.id
    }

    /// Coefficient-domain embedding of `bits` into a copy of the original.
    fn mark_dct(&self, bits: &[bool]) -> Result<Marked> {
        let mut image = self.image.clone();
        let mut plan = plan_dct(&image, bits.len(), &self.uf)?;
        embed_dct(&mut image, bits, &mut plan)?;
        let tokens = if bits.is_empty() {
            self.tokens.clone()
        } else {
            ScanTokens::from_blocks(&image.blocks, &self.dc, &self.std_ac)?
        };
        let hist = build_histogram(&tokens, &self.std_ac, self.table_id());
        let (sorted, spec) = optimize_table(&hist);
        Ok(Marked { plan, tokens, sorted, spec })
    }

    fn finish(
        mut self,
        tokens: &ScanTokens,
        ac_spec: &HuffmanSpec,
        side_info: SideInfo,
    ) -> Result<Vec<u8>> {
        let ac = CodeAssignment::new(ac_spec)?;
        self.file.scan = encode_tokens(tokens, &self.dc, &ac)?;
        self.file.replace_huffman_spec(ac_spec)?;
        self.file.insert_before_scan(side_info.to_segment());
        Ok(self.file.serialize())
    }
}

struct Marked {
    plan: DctEmbedPlan,
    /// Tokens under the standard table.
    tokens: ScanTokens,
    sorted: VlcHistogram,
    spec: HuffmanSpec,
}

impl Marked {
    fn count_of(&self, symbol: u8) -> u64 {
        self.sorted.entries.iter().find(|e| e.symbol == symbol).map_or(0, |e| e.count)
    }

    fn position_of(&self, symbol: u8) -> Option<usize> {
        self.sorted.entries.iter().position(|e| e.symbol == symbol)
    }

    fn costs(&self) -> EntropyCostTable {
        entropy_costs(&self.sorted).unwrap_or_else(|_| EntropyCostTable::from_entries(Vec::new()))
    }
}

fn side_info(plan: &DctEmbedPlan, l2: usize, length: usize) -> SideInfo {
    SideInfo {
        l1: plan.l1 as u32,
        l2: l2 as u32,
        freq_bitmap: plan.freq_mask(),
        n_bar: plan.n_bar as u32,
        run_bar: plan.run_bar,
        payload_len: length as u32,
    }
}

/// Embeds `payload` and returns the marked file. Bits `0..L1` go to the
/// coefficients, the rest to the Huffman-coded stream.
pub fn embed(bytes: &[u8], payload: &[bool], mode: Mode) -> Result<(Vec<u8>, EmbedReport)> {
    if payload.len() > u32::MAX as usize {
        return Err(Error::InvalidArgument("payload too long".into()));
    }
    let carrier = Carrier::load(bytes)?;
    let length = payload.len();
    match mode {
        Mode::DctOnly => {
            let marked = carrier.mark_dct(payload).map_err(|e| capacity_error(e, length, &carrier.uf, 0))?;
            let info = side_info(&marked.plan, 0, length);
            let std_spec = carrier.image.ac_spec.clone();
            let out = carrier.finish(&marked.tokens, &std_spec, info)?;
            Ok((out, report(mode, info, marked.plan, None, None, None, 0)))
        }
        Mode::HuffoptOnly | Mode::EntropyOnly => {
            if mode == Mode::HuffoptOnly && length > 0 {
                return Err(Error::InvalidArgument("table optimization mode takes no payload".into()));
            }
            let marked = carrier.mark_dct(&[])?;
            let mut tokens = marked.tokens.clone();
            tokens.retarget(&CodeAssignment::new(&marked.spec)?)?;
            let (spec, pz) = if length > 0 {
                let pz = select_peak(&marked.sorted, length).map_err(|_| Error::InsufficientTotalCapacity {
                    requested: length,
                    dct_capacity: 0,
                    entropy_capacity: max_peak_share(&marked.sorted),
                })?;
                (shift_and_embed(&mut tokens, &marked.spec, pz, payload)?, Some(pz))
            } else {
                (marked.spec.clone(), None)
            };
            let info = side_info(&marked.plan, length, length);
            let symbol = pz.map(|pz| marked.sorted.entries[pz.p].symbol);
            let out = carrier.finish(&tokens, &spec, info)?;
            Ok((out, report(mode, info, marked.plan, pz, symbol, None, 0)))
        }
        Mode::Multi => embed_multi(carrier, payload),
    }
}

fn max_peak_share(hist: &VlcHistogram) -> usize {
    hist.entries.iter().map(|e| e.count.saturating_sub(1) as usize).max().unwrap_or(0)
}

fn capacity_error(e: Error, length: usize, uf: &FrequencyCostTable, entropy: usize) -> Error {
    match e {
        Error::InsufficientCapacity { .. } => Error::InsufficientTotalCapacity {
            requested: length,
            dct_capacity: uf.total_capacity() as usize,
            entropy_capacity: entropy,
        },
        other => other,
    }
}

#[allow(clippy::too_many_arguments)]
fn report(
    mode: Mode,
    side_info: SideInfo,
    plan: DctEmbedPlan,
    peak_zero: Option<PeakZero>,
    peak_symbol: Option<u8>,
    distribution: Option<DistributionState>,
    refine_rounds: usize,
) -> EmbedReport {
    EmbedReport { mode, side_info, plan, peak_zero, peak_symbol, distribution, refine_rounds }
}

fn embed_multi(carrier: Carrier, payload: &[bool]) -> Result<(Vec<u8>, EmbedReport)> {
    let length = payload.len();
    let original = carrier.mark_dct(&[])?;
    let e = original.costs();
    let mut state = initialize_distribution(&carrier.uf, &e, length)?;
    let embed_l1 = |state: &DistributionState| -> Result<Marked> {
        carrier
            .mark_dct(&payload[..state.l1])
            .map_err(|e| capacity_error(e, length, &carrier.uf, max_peak_share(&original.sorted)))
    };
    // Fallback on the histogram matching the current L1: the rightmost peak
    // that still holds L2, else everything in the coefficient domain.
    let settle = |state: &mut DistributionState, marked: &mut Marked| -> Result<()> {
        match select_peak(&marked.sorted, state.l2) {
            Ok(pz) if state.l2 > 0 => state.peak = Some(marked.sorted.entries[pz.p].symbol),
            _ => {
                let judgment = state.judgment.take();
                *state = DistributionState { judgment, ..DistributionState::all_dct(length, &carrier.uf) };
                *marked = embed_l1(state)?;
            }
        }
        Ok(())
    };

    // Keep L2 strictly below the marked height of the peak.
    let mut marked = embed_l1(&state)?;
    let mut rounds = 0;
    while let Some(symbol) = state.peak {
        let count = marked.count_of(symbol);
        if (state.l2 as u64) < count {
            break;
        }
        if rounds == REFINE_ROUNDS {
            settle(&mut state, &mut marked)?;
            break;
        }
        let before = state.clone();
        state.absorb_excess(count);
        if carrier.uf.total_capacity() < state.l1 as u64 {
            state = before;
            settle(&mut state, &mut marked)?;
            break;
        }
        rounds += 1;
        marked = embed_l1(&state)?;
    }

    let judged = judge_peak(&marked.costs(), &state, &carrier.uf);
    let switched = judged.judgment.as_ref().is_some_and(|j| j.switched);
    state = judged;
    if switched {
        marked = embed_l1(&state)?;
        if let Some(symbol) = state.peak {
            if (state.l2 as u64) >= marked.count_of(symbol) {
                settle(&mut state, &mut marked)?;
            }
        }
    }

    let entropy_bits = &payload[state.l1..];
    let mut tokens = marked.tokens.clone();
    tokens.retarget(&CodeAssignment::new(&marked.spec)?)?;
    let mut pz = None;
    let spec = match state.peak {
        Some(symbol) if state.l2 > 0 => {
            let p = marked.position_of(symbol).expect("peak symbol present");
            let z = (p + 1..marked.sorted.entries.len())
                .find(|&i| marked.sorted.entries[i].count == 0)
                .ok_or(Error::NoZeroPoint)?;
            pz = Some(PeakZero { p, z });
            shift_and_embed(&mut tokens, &marked.spec, PeakZero { p, z }, entropy_bits)?
        }
        _ => marked.spec.clone(),
    };
    let info = side_info(&marked.plan, state.l2, length);
    let peak_symbol = state.peak;
    let plan = marked.plan.clone();
    let out = carrier.finish(&tokens, &spec, info)?;
    Ok((out, report(Mode::Multi, info, plan, pz, peak_symbol, Some(state), rounds)))
}

/// Recovers the payload and the original file from a marked file.
pub fn extract(bytes: &[u8]) -> Result<(Vec<bool>, Vec<u8>)> {
    let mut file = JpegFile::parse(bytes)?;
    let info = SideInfo::find(&file)?;
    let (mut image, mut tokens) = entropy_decode(&file)?;
    let entropy_bits = if info.l2 > 0 {
        let counts = tokens.slot_counts(image.ac_spec.symbols.len());
        let pz = detect_peak_zero(&image.ac_spec, &counts)?;
        let (bits, _restored) = extract_restore(&mut tokens, &image.ac_spec, pz, info.l2 as usize)?;
        bits
    } else {
        Vec::new()
    };
    let std_spec = HuffmanSpec { id: image.ac_spec.id, ..HuffmanSpec::standard_ac() };
    if std_spec.counts != image.ac_spec.counts {
        return Err(Error::IntegrityFailure("marked table has non-standard code lengths"));
    }
    let mut bits = if info.l1 > 0 {
        let plan = DctEmbedPlan::from_parts(info.freq_bitmap, info.n_bar as usize, info.run_bar, info.l1 as usize);
        extract_dct(&mut image, &plan)?
    } else {
        Vec::new()
    };
    bits.extend(entropy_bits);
    if bits.len() != info.payload_len as usize {
        return Err(Error::IntegrityFailure("payload length mismatch"));
    }
    let dc = CodeAssignment::new(&image.dc_spec)?;
    let std_ac = CodeAssignment::new(&std_spec)?;
    let restored = ScanTokens::from_blocks(&image.blocks, &dc, &std_ac)?;
    file.scan = encode_tokens(&restored, &dc, &std_ac)?;
    file.replace_huffman_spec(&std_spec)?;
    file.remove_segments(SideInfo::is_side_info);
    Ok((bits, file.serialize()))
}
