//! Deterministic number and CSV formatting.
//!
//! Every float is written in scientific notation with 12 significant
//! digits, a '.' decimal separator, and no locale dependence, so repeated
//! runs produce byte-identical files.

/// 12-significant-digit scientific notation, e.g. `9.00000000000e-1`.
pub fn float(value: f64) -> String {
    format!("{value:.11e}")
}

/// One CSV row from already-formatted fields.
pub fn row(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

/// A '#'-prefixed comment line.
pub fn comment(text: &str) -> String {
    format!("# {text}\n")
}
