//! CSV writers with a fixed column order and deterministic formatting.
//!
//! Floats print with 10 significant digits in scientific notation so files
//! from identical seeds compare byte for byte. Bound probabilities are
//! clipped to 1 for reporting (the raw sums can exceed 1 at low SNR).

use lcitgsm::mapping::{encode, BitBlock, PatternBook};
use lcitgsm::{BoundResult, Constellation, SweepResult};

/// 10 significant digits, scientific.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.9e}")
}

fn fmt_prob(x: f64) -> String {
    fmt_float(x.min(1.0))
}

/// Quote a field per RFC 4180 when it contains commas.
fn quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// The full bit-to-(antennas, symbol) mapping of one book/constellation.
pub fn map_table(book: &PatternBook, constellation: &Constellation) -> String {
    let m_s = book.spatial_bits();
    let m_a = constellation.bits_per_symbol();
    let mut out = String::from("input_bits,active_TAs,symbol_re,symbol_im\n");
    for value in 0u32..(1 << (m_s + m_a)) {
        let block = BitBlock::new(value >> m_a, value & ((1 << m_a) - 1), m_s, m_a);
        let (k, s, _) = encode(book, constellation, block).expect("lengths match by construction");
        let antennas = book
            .antennas(k)
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!(
            "{},{},{},{}\n",
            block.bit_string(),
            quote(&format!("({antennas})")),
            fmt_float(s.re),
            fmt_float(s.im),
        ));
    }
    out
}

/// Per-point sweep results. Wall-clock time is deliberately omitted so
/// equal-seed runs emit identical files.
pub fn sweep(result: &SweepResult) -> String {
    let mut out = String::from(
        "snr_db,bits_simulated,bit_errors,spatial_bit_errors,symbol_bit_errors,ber,stop_rule_met,avg_mults\n",
    );
    for p in &result.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_float(p.snr_db),
            p.bits,
            p.bit_errors,
            p.spatial_bit_errors,
            p.symbol_bit_errors,
            fmt_float(p.ber),
            p.stop_rule_met,
            fmt_float(p.avg_mults),
        ));
    }
    out
}

/// Bound curves, one row per SNR point.
pub fn bounds(rows: &[BoundResult]) -> String {
    let mut out =
        String::from("snr_db,classic_ub,improved_ub,p_signal,p_spatial,p_joint,method\n");
    for b in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_float(b.snr_db),
            fmt_prob(b.classic_ub),
            fmt_prob(b.improved_ub),
            fmt_prob(b.p_signal),
            fmt_prob(b.p_spatial),
            fmt_prob(b.p_joint),
            b.method.as_str(),
        ));
    }
    out
}

/// Complexity-model rows: (nt, alphabet size, detector, multiplications).
pub fn complexity(rows: &[(usize, usize, &'static str, f64)]) -> String {
    let mut out = String::from("nt,n,detector,mults\n");
    for (nt, n, detector, mults) in rows {
        out.push_str(&format!("{nt},{n},{detector},{}\n", fmt_float(*mults)));
    }
    out
}
