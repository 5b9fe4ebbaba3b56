use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variant names double as the machine-readable error names printed by the
/// command-line tool; [`Error::exit_code`] maps each one to a distinct
/// process exit status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("frame is not baseline sequential DCT (SOF marker 0x{0:02X})")]
    NotBaseline(u8),
    #[error("expected a single-component (grayscale) frame, found {0} components")]
    NotGrayscale(u8),
    #[error("restart intervals are not supported")]
    RestartIntervalsPresent,
    #[error("arithmetic-coded JPEG is not supported")]
    ArithmeticCoding,
    #[error("stream ended unexpectedly: {0}")]
    TruncatedStream(&'static str),
    #[error("invalid or unexpected marker: {0}")]
    InvalidMarker(String),
    #[error("Huffman table is not a valid prefix code (Kraft inequality violated)")]
    KraftViolation,
    #[error("AC Huffman table carries {0} symbols; all 162 run/length symbols are required")]
    NotFullTable(usize),
    #[error("AC Huffman table is not the standard luminance table")]
    NonStandardTable,
    #[error("missing Huffman or quantization table: {0}")]
    MissingTable(&'static str),
    #[error("bit pattern does not match any Huffman code")]
    InvalidCode,
    #[error("block holds more than 64 coefficients")]
    BlockOverflow,
    #[error("run/length symbol 0x{0:02X} has no code in the active table")]
    UnmappableSymbol(u8),
    #[error("coefficient magnitude {0} cannot be represented in baseline JPEG")]
    CoefficientRange(i32),
    #[error("scan is not in canonical run-length form and cannot be restored bit-exactly")]
    NonCanonicalScan,
    #[error("zero coefficient passed to a non-zero coefficient operation")]
    ZeroCoefficient,
    #[error("run/length symbol 0x{0:02X} is missing from the code assignment")]
    MissingSymbol(u8),
    #[error("coefficient domain holds {available} carriers, {needed} requested")]
    InsufficientCapacity { needed: usize, available: usize },
    #[error("embedding traversal ran out of carriers with {remaining} bits left")]
    CapacityExceeded { remaining: usize },
    #[error("payload stream ended after {got} of {expected} bits")]
    PayloadUnderrun { expected: usize, got: usize },
    #[error("every run/length symbol occurs in the scan; no zero point exists")]
    NoZeroPoint,
    #[error("no histogram peak is higher than {0} bits")]
    NoFeasiblePeak(usize),
    #[error("peak holds {available} occurrences, {requested} bits requested")]
    PayloadOverflow { requested: usize, available: usize },
    #[error("Huffman table contains no duplicated run/length symbol")]
    NoDuplicate,
    #[error("Huffman table contains more than one duplicated run/length symbol")]
    MultipleDuplicates,
    #[error(
        "payload of {requested} bits exceeds capacity (coefficient domain {dct_capacity}, \
         entropy domain {entropy_capacity})"
    )]
    InsufficientTotalCapacity {
        requested: usize,
        dct_capacity: usize,
        entropy_capacity: usize,
    },
    #[error("file carries no side-information segment")]
    NotMarked,
    #[error("restored data is inconsistent with the side information: {0}")]
    IntegrityFailure(&'static str),
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotBaseline(_) => "NotBaseline",
            Error::NotGrayscale(_) => "NotGrayscale",
            Error::RestartIntervalsPresent => "RestartIntervalsPresent",
            Error::ArithmeticCoding => "ArithmeticCoding",
            Error::TruncatedStream(_) => "TruncatedStream",
            Error::InvalidMarker(_) => "InvalidMarker",
            Error::KraftViolation => "KraftViolation",
            Error::NotFullTable(_) => "NotFullTable",
            Error::NonStandardTable => "NonStandardTable",
            Error::MissingTable(_) => "MissingTable",
            Error::InvalidCode => "InvalidCode",
            Error::BlockOverflow => "BlockOverflow",
            Error::UnmappableSymbol(_) => "UnmappableSymbol",
            Error::CoefficientRange(_) => "CoefficientRange",
            Error::NonCanonicalScan => "NonCanonicalScan",
            Error::ZeroCoefficient => "ZeroCoefficient",
            Error::MissingSymbol(_) => "MissingSymbol",
            Error::InsufficientCapacity { .. } => "InsufficientCapacity",
            Error::CapacityExceeded { .. } => "CapacityExceeded",
            Error::PayloadUnderrun { .. } => "PayloadUnderrun",
            Error::NoZeroPoint => "NoZeroPoint",
            Error::NoFeasiblePeak(_) => "NoFeasiblePeak",
            Error::PayloadOverflow { .. } => "PayloadOverflow",
            Error::NoDuplicate => "NoDuplicate",
            Error::MultipleDuplicates => "MultipleDuplicates",
            Error::InsufficientTotalCapacity { .. } => "CapacityError",
            Error::NotMarked => "NotMarked",
            Error::IntegrityFailure(_) => "IntegrityFailure",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Process exit status for this error kind. `0` is success and `1` is
    /// reserved for I/O and usage errors outside the library.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotBaseline(_) => 10,
            Error::NotGrayscale(_) => 11,
            Error::RestartIntervalsPresent => 12,
            Error::ArithmeticCoding => 13,
            Error::TruncatedStream(_) => 14,
            Error::InvalidMarker(_) => 15,
            Error::KraftViolation => 16,
            Error::NotFullTable(_) => 17,
            Error::NonStandardTable => 18,
            Error::MissingTable(_) => 19,
            Error::InvalidCode => 20,
            Error::BlockOverflow => 21,
            Error::UnmappableSymbol(_) => 22,
            Error::CoefficientRange(_) => 23,
            Error::NonCanonicalScan => 24,
            Error::ZeroCoefficient => 30,
            Error::MissingSymbol(_) => 31,
            Error::InsufficientCapacity { .. } => 32,
            Error::CapacityExceeded { .. } => 33,
            Error::PayloadUnderrun { .. } => 34,
            Error::NoZeroPoint => 40,
            Error::NoFeasiblePeak(_) => 41,
            Error::PayloadOverflow { .. } => 42,
            Error::NoDuplicate => 43,
            Error::MultipleDuplicates => 44,
            Error::InsufficientTotalCapacity { .. } => 50,
            Error::NotMarked => 51,
            Error::IntegrityFailure(_) => 52,
            Error::DimensionMismatch(..) => 60,
            Error::InvalidArgument(_) => 61,
        }
    }
}
