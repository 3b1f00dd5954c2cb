//! Deterministic text output: number formatting, CSV assembly, content
//! digests and atomic file replacement.

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

/// Significant digits every formatted number carries at minimum.
pub const MIN_SIGNIFICANT_DIGITS: usize = 9;

/// Shortest round-trip scientific representation of `x`, zero-padded to at
/// least [`MIN_SIGNIFICANT_DIGITS`] significant digits.
///
/// `0.5` becomes `5.00000000e-1`; `0.1 + 0.2` keeps all 17 digits it needs
/// to round-trip. Parsing the text always gives back `x` exactly.
pub fn number(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let shortest = format!("{x:e}");
    let (mantissa, exponent) = shortest.split_once('e').expect("LowerExp always has an exponent");
    let digits = mantissa.chars().filter(char::is_ascii_digit).count();
    let mut mantissa = mantissa.to_string();
    if digits < MIN_SIGNIFICANT_DIGITS {
        if !mantissa.contains('.') {
            mantissa.push('.');
        }
        mantissa.extend(std::iter::repeat_n('0', MIN_SIGNIFICANT_DIGITS - digits));
    }
    format!("{mantissa}e{exponent}")
}

/// A CSV document built row by row: one header line, comma separated,
/// `\n` line endings.
#[derive(Debug, Clone)]
pub struct Csv {
    columns: usize,
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            columns: header.len(),
            text,
        }
    }

    /// Appends one row of already formatted fields.
    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        assert_eq!(fields.len(), self.columns, "CSV row width must match the header");
        let line: Vec<&str> = fields.iter().map(AsRef::as_ref).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.text.as_bytes()
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Quotes a free-text field when it contains a separator or quote.
pub fn text_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace('\n', " "))
    } else {
        s.to_string()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes `bytes` to a hidden sibling temp file, syncs it and renames it
/// over `path`, so readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = path.with_file_name(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
