//! Text cache of zero ordinates.
//!
//! ```text
//! SECZETA-ZEROS v1 <digits> <count>
//! <index> <ordinate with exactly <digits> significant digits>
//! ...
//! CRC32 <hex of the CRC-32 of every preceding byte>
//! ```

use std::fs;
use std::path::Path;

use rug::Float;

use super::ZeroTable;
use crate::error::CacheError;
use crate::format::{format_sig, significant_digits};
use crate::mpcontext::digits_to_bits;

const MAGIC: &str = "SECZETA-ZEROS";
const VERSION: u32 = 1;

/// Render the table's leading stored ordinates in the cache format.
pub fn render_cache(table: &ZeroTable) -> String {
    let (values, digits) = table.stored();
    let mut body = format!("{MAGIC} v{VERSION} {digits} {}\n", values.len());
    for (i, v) in values.iter().enumerate() {
        body.push_str(&format!("{} {}\n", i + 1, format_sig(v, digits as usize)));
    }
    let crc = crc32fast::hash(body.as_bytes());
    body.push_str(&format!("CRC32 {crc:08x}\n"));
    body
}

pub fn save_cache(table: &ZeroTable, path: impl AsRef<Path>) -> Result<(), CacheError> {
    let path = path.as_ref();
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, render_cache(table))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Parsed cache contents: digit count and ordinates.
pub fn parse_cache(text: &str) -> Result<(u32, Vec<Float>), CacheError> {
    let crc_pos = text
        .rfind("CRC32 ")
        .ok_or_else(|| CacheError::MalformedHeader("missing CRC32 line".into()))?;
    let (body, crc_line) = text.split_at(crc_pos);
    let stored = u32::from_str_radix(crc_line["CRC32 ".len()..].trim(), 16)
        .map_err(|_| CacheError::MalformedHeader("unreadable CRC32 value".into()))?;
    let computed = crc32fast::hash(body.as_bytes());
    let mut lines = body.lines();
    let header = lines
        .next()
        .ok_or_else(|| CacheError::MalformedHeader("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != MAGIC {
        return Err(CacheError::MalformedHeader(header.to_string()));
    }
    let version: u32 = fields[1]
        .strip_prefix('v')
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CacheError::MalformedHeader(format!("bad version field {:?}", fields[1])))?;
    if version != VERSION {
        return Err(CacheError::UnsupportedVersion(version));
    }
    if stored != computed {
        return Err(CacheError::Checksum { stored, computed });
    }
    let digits: u32 = fields[2]
        .parse()
        .map_err(|_| CacheError::MalformedHeader(format!("bad digit count {:?}", fields[2])))?;
    let count: usize = fields[3]
        .parse()
        .map_err(|_| CacheError::MalformedHeader(format!("bad entry count {:?}", fields[3])))?;
    let prec = digits_to_bits(digits.max(1));
    let mut values = Vec::with_capacity(count);
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(lit), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(CacheError::MalformedEntry {
                line: lineno,
                reason: "expected `<index> <ordinate>`".into(),
            });
        };
        if idx.parse::<usize>().ok() != Some(k + 1) {
            return Err(CacheError::MalformedEntry {
                line: lineno,
                reason: format!("index {idx:?} out of sequence"),
            });
        }
        let found = significant_digits(lit) as u32;
        if found != digits {
            return Err(CacheError::DigitCount {
                line: lineno,
                expected: digits,
                found,
            });
        }
        let v = Float::parse(lit).map_err(|e| CacheError::MalformedEntry {
            line: lineno,
            reason: e.to_string(),
        })?;
        values.push(Float::with_val(prec, v));
    }
    if values.len() != count {
        return Err(CacheError::MalformedHeader(format!(
            "header announces {count} entries, file has {}",
            values.len()
        )));
    }
    Ok((digits, values))
}

/// Read a cache file into a fresh table; the ordinates are re-certified as
/// they are used.
pub fn load_cache(path: impl AsRef<Path>) -> Result<ZeroTable, CacheError> {
    let text = fs::read_to_string(path)?;
    let (digits, values) = parse_cache(&text)?;
    Ok(ZeroTable::from_loaded(
        values.into_iter().map(|v| (v, digits)).collect(),
    ))
}

/// Like [`load_cache`], but a file holding fewer than `want_digits` digits is
/// reported as a miss.
pub fn load_cache_for(path: impl AsRef<Path>, want_digits: u32) -> Result<ZeroTable, CacheError> {
    let text = fs::read_to_string(path)?;
    let (digits, values) = parse_cache(&text)?;
    if digits < want_digits {
        return Err(CacheError::InsufficientDigits {
            have: digits,
            want: want_digits,
        });
    }
    Ok(ZeroTable::from_loaded(
        values.into_iter().map(|v| (v, digits)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize, digits: u32) -> ZeroTable {
        let t = ZeroTable::new();
        t.ordinates(n, digits).unwrap();
        t
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("zeros.txt");
        let t = table(10, 42);
        save_cache(&t, &path).unwrap();
        let back = load_cache(&path).unwrap();
        let (a, da) = t.stored();
        let (b, db) = back.stored();
        assert_eq!(da, db);
        assert_eq!(a, b);
        assert_eq!(render_cache(&t), render_cache(&back));
        // Served values survive certification unchanged.
        let served = back.ordinates(10, 50).unwrap();
        assert_eq!(served, a);
    }

    #[test]
    fn rejects_bad_files() {
        let t = table(3, 20);
        let text = render_cache(&t);
        let v2 = text.replacen("v1", "v2", 1);
        assert!(matches!(parse_cache(&v2), Err(CacheError::UnsupportedVersion(2))));
        let corrupt = text.replacen("14.", "15.", 1);
        assert!(matches!(parse_cache(&corrupt), Err(CacheError::Checksum { .. })));
        assert!(matches!(parse_cache("garbage"), Err(CacheError::MalformedHeader(_))));
    }

    #[test]
    fn fewer_digits_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("zeros.txt");
        save_cache(&table(4, 25), &path).unwrap();
        match load_cache_for(&path, 50) {
            Err(CacheError::InsufficientDigits { have: 30, want: 50 }) => {}
            other => panic!("expected a cache miss, got {other:?}"),
        }
        assert!(load_cache_for(&path, 30).is_ok());
    }

    #[test]
    fn wrong_digit_count_is_reported() {
        let body = "SECZETA-ZEROS v1 5 1\n1 14.1347251\n";
        let text = format!("{body}CRC32 {:08x}\n", crc32fast::hash(body.as_bytes()));
        assert!(matches!(
            parse_cache(&text),
            Err(CacheError::DigitCount { expected: 5, found: 9, .. })
        ));
    }
}
