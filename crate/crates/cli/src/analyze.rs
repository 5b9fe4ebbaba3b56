//! Plain-text dump of the cost tables of one file.

use std::fmt::Write;

use mdrdh::dct_domain::{code_length_tables, frequency_costs};
use mdrdh::entropy_domain::{build_histogram, entropy_costs, optimize_table};
use mdrdh::jpeg::{code_string, entropy_decode, CodeAssignment, JpegFile};
use mdrdh::Result;

pub fn analyze(bytes: &[u8]) -> Result<String> {
    let file = JpegFile::parse(bytes)?;
    let (image, tokens) = entropy_decode(&file)?;
    let ac = CodeAssignment::new(&image.ac_spec)?;
    let lengths = code_length_tables(&ac)?;
    let uf = frequency_costs(&image, &lengths);
    let mut out = String::new();

    writeln!(out, "# image").unwrap();
    writeln!(out, "width,height,blocks,ac_tokens").unwrap();
    writeln!(out, "{},{},{},{}", image.width, image.height, image.blocks.len(), tokens.ac_tokens().count()).unwrap();

    writeln!(out, "\n# frequency costs (cheapest first)").unwrap();
    writeln!(out, "rank,k,nonzero,carriers,growth_bits,uf").unwrap();
    for (rank, &k) in uf.ordered().iter().enumerate() {
        let e = uf.get(k);
        writeln!(out, "{},{},{},{},{},{}", rank + 1, k, e.nonzero, e.carriers, e.s(), e.uf().unwrap()).unwrap();
    }
    let unusable: Vec<String> = uf
        .entries()
        .iter()
        .filter(|e| e.nonzero > 0 && !e.usable())
        .map(|e| e.k.to_string())
        .collect();
    if !unusable.is_empty() {
        writeln!(out, "# nonzero but unusable: {}", unusable.join(" ")).unwrap();
    }

    let hist = build_histogram(&tokens, &ac, image.ac_spec.id);
    let (sorted, _) = optimize_table(&hist);
    writeln!(out, "\n# sorted code histogram").unwrap();
    writeln!(out, "position,symbol,code,length,count").unwrap();
    for (i, e) in sorted.entries.iter().enumerate() {
        writeln!(out, "{},{:02X},{},{},{}", i, e.symbol, code_string(e.code, e.length), e.length, e.count).unwrap();
    }
    writeln!(out, "\n# peak costs (cheapest first)").unwrap();
    writeln!(out, "position,symbol,count,zero,shift_bits,embed_bits,e").unwrap();
    match entropy_costs(&sorted) {
        Ok(table) => {
            for c in table.ascending() {
                writeln!(out, "{},{:02X},{},{},{},{},{}", c.position, c.symbol, c.count, c.zero, c.s(), c.m(), c.e())
                    .unwrap();
            }
        }
        Err(e) => writeln!(out, "# none: {e}").unwrap(),
    }

    writeln!(out, "\n# code lengths by run (rows) and size 1-10").unwrap();
    for r in 0..16 {
        let row: Vec<String> = (1..=10).map(|c| lengths.hclt(r, c).to_string()).collect();
        writeln!(out, "{r},{}", row.join(",")).unwrap();
    }
    writeln!(out, "\n# code length increments by run (rows) and size 1-9").unwrap();
    for r in 0..16 {
        let row: Vec<String> = (1..=9).map(|c| lengths.hcit(r, c).to_string()).collect();
        writeln!(out, "{r},{}", row.join(",")).unwrap();
    }
    Ok(out)
}
