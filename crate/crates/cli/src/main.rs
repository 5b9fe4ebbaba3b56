mod analyze;
mod bench;
mod payload;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use mdrdh::metrics::{format_psnr, EvalReport};
use mdrdh::pipeline::{embed, extract, Mode};
use sha2::{Digest, Sha256};

/// Reversible data hiding in baseline grayscale JPEG files.
#[derive(Parser)]
#[command(name = "mdrdh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hide a payload and write the marked file.
    #[command(group(ArgGroup::new("source").required(true)))]
    Embed {
        input: PathBuf,
        output: PathBuf,
        /// Payload file, embedded most significant bit first.
        #[arg(long, group = "source")]
        payload: Option<PathBuf>,
        /// Number of seeded random bits to embed.
        #[arg(long, group = "source")]
        random_bits: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "multi", value_parser = parse_mode)]
        mode: Mode,
    },
    /// Recover the payload and the original file from a marked file.
    Extract {
        input: PathBuf,
        /// Payload bytes, most significant bit first, zero-padded.
        #[arg(long)]
        payload_out: PathBuf,
        #[arg(long)]
        restored: PathBuf,
    },
    /// Check that a marked file restores to the original and, when given, the
    /// expected payload.
    #[command(group(ArgGroup::new("source")))]
    Verify {
        original: PathBuf,
        marked: PathBuf,
        #[arg(long, group = "source")]
        payload: Option<PathBuf>,
        #[arg(long, group = "source")]
        random_bits: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print cost tables, the sorted code histogram and code length grids.
    Analyze { input: PathBuf },
    /// Embed random payloads across a directory of JPEG files.
    Bench {
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2000,5000,8000,11000")]
        payloads: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "multi,dct-only", value_parser = parse_mode)]
        modes: Vec<Mode>,
        /// Quality label; defaults to a `qfNN` component of the corpus path.
        #[arg(long)]
        qf: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Per-payload means; defaults to the output name with `_aggregate`.
        #[arg(long)]
        aggregate: Option<PathBuf>,
        /// Leave the elapsed time column empty so output is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: mdrdh::Error| e.to_string())
}

fn payload_bits(file: &Option<PathBuf>, random: Option<usize>, seed: u64) -> Result<Option<Vec<bool>>> {
    if let Some(path) = file {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(Some(payload::bytes_to_bits(&bytes)));
    }
    Ok(random.map(|n| payload::random_bits(n, seed)))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Embed { input, output, payload, random_bits, seed, mode } => {
            let original = read(&input)?;
            let bits = payload_bits(&payload, random_bits, seed)?.unwrap_or_default();
            let (marked, report) = embed(&original, &bits, mode)?;
            write(&output, &marked)?;
            let eval = EvalReport::evaluate(&original, &marked, bits.len(), "")?;
            println!(
                "mode={mode} payload_bits={} l1={} l2={} expansion_bits={} expansion_excl_sideinfo_bits={} psnr_db={}",
                bits.len(),
                report.l1(),
                report.l2(),
                eval.expansion_bits,
                eval.expansion_excl_sideinfo_bits,
                format_psnr(eval.psnr_db)
            );
        }
        Command::Extract { input, payload_out, restored } => {
            let marked = read(&input)?;
            let (bits, original) = extract(&marked)?;
            write(&payload_out, &payload::bits_to_bytes(&bits))?;
            write(&restored, &original)?;
            println!("payload_bits={} restored_sha256={}", bits.len(), sha256_hex(&original));
        }
        Command::Verify { original, marked, payload, random_bits, seed } => {
            let original = read(&original)?;
            let (bits, restored) = extract(&read(&marked)?)?;
            if restored != original {
                return Err(mdrdh::Error::IntegrityFailure("restored file differs from the original").into());
            }
            if let Some(expected) = payload_bits(&payload, random_bits, seed)? {
                if expected != bits {
                    return Err(mdrdh::Error::IntegrityFailure("payload differs from the expected one").into());
                }
            }
            println!("ok payload_bits={} sha256={}", bits.len(), sha256_hex(&restored));
        }
        Command::Analyze { input } => {
            print!("{}", analyze::analyze(&read(&input)?)?);
        }
        Command::Bench { corpus, payloads, modes, qf, seed, out, aggregate, no_timing } => {
            let cfg = bench::BenchConfig { corpus, payloads, modes, qf, seed, timing: !no_timing };
            let result = bench::run(&cfg)?;
            bench::write_rows(&out, &result.rows, seed)?;
            let aggregate = aggregate.unwrap_or_else(|| {
                let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                out.with_file_name(format!("{stem}_aggregate.csv"))
            });
            bench::write_aggregate(&aggregate, &result, &cfg)?;
            for s in &result.skipped {
                eprintln!("skipped {} {} {}: {}", s.image, s.mode, s.payload_bits, s.reason);
            }
            let failed = result.rows.iter().filter(|r| !r.reversibility).count();
            println!(
                "rows={} skipped={} reversibility_failures={failed} out={} aggregate={}",
                result.rows.len(),
                result.skipped.len(),
                out.display(),
                aggregate.display()
            );
            if failed > 0 {
                return Err(mdrdh::Error::IntegrityFailure("some marked files did not restore").into());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<mdrdh::Error>() {
            Some(err) => {
                eprintln!("error: {}: {err}", err.name());
                ExitCode::from(err.exit_code() as u8)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}
