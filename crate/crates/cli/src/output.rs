use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};

use crate::cli::FormatArgs;

/// Six significant digits: fixed notation for moderate magnitudes,
/// scientific otherwise. Output is stable across platforms.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding can carry into the next decade
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    let exp = exp.max(rounded.abs().log10().floor() as i32);
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

impl FormatArgs {
    pub fn throughput(&self, bits_per_s: f64) -> String {
        if self.mbps {
            sig6(bits_per_s / 1e6)
        } else {
            sig6(bits_per_s)
        }
    }

    /// Column name for throughput values under the chosen unit.
    pub fn unit_column(&self, stem: &str) -> String {
        if self.mbps {
            format!("{stem}_mbps")
        } else {
            format!("{stem}_bits_per_s")
        }
    }
}

pub fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(sink))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(113450000.0), "1.13450e8");
        assert_eq!(sig6(0.0570443207), "0.0570443");
        assert_eq!(sig6(15.5), "15.5000");
        assert_eq!(sig6(999999.7), "1.00000e6");
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(-2.5e-7), "-2.50000e-7");
        assert_eq!(sig6(0.0), "0");
    }
}
