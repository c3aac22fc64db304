//! Deterministic CSV and key-value output.
//!
//! Floats are printed with 17 significant digits (`{:.16e}`), which
//! round-trips binary64 exactly, uses `.` as the decimal separator, and has
//! no thousands grouping. Identical inputs therefore produce byte-identical
//! files on every run and every parallel schedule.

use optomech::scattering::Spectrum;
use std::io::{self, Write};

/// Render one f64 with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a CSV table: header plus rows of formatted floats.
pub fn write_csv<W: Write>(out: &mut W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub const SPECTRUM_HEADER: [&str; 8] =
    ["omega", "p_ab", "p_ba", "theta_vac_a", "theta_vac_b", "t_ab", "t_ba", "sigma_ab"];

/// Serialize a spectrum as the canonical eight-column CSV.
pub fn spectrum_rows(spectrum: &Spectrum) -> Vec<Vec<f64>> {
    spectrum
        .points
        .iter()
        .map(|p| {
            vec![
                p.omega,
                p.probs.p_ab,
                p.probs.p_ba,
                p.probs.theta_vac_a,
                p.probs.theta_vac_b,
                p.probs.t_ab,
                p.probs.t_ba,
                p.probs.sigma_ab,
            ]
        })
        .collect()
}

/// Write `key=value` lines for a flat record.
pub fn write_flat<W: Write>(out: &mut W, entries: &[(&str, String)]) -> io::Result<()> {
    for (key, value) in entries {
        writeln!(out, "{key}={value}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatted_floats_round_trip() {
        for x in [3.87e-15, 0.1 + 0.2, f64::MIN_POSITIVE, 6.6, -1.0 / 3.0] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], &[vec![1.0, 2.0]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "a,b");
        assert_eq!(lines.next().unwrap(), "1.0000000000000000e0,2.0000000000000000e0");
    }
}
