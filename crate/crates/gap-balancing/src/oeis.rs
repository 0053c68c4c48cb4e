//! OEIS b-file parsing and sequence cross-checks against local fixtures,
//! with an explicit network refresh path.

use std::path::Path;
use std::time::Duration;

use num_bigint::BigInt;
use serde::Serialize;

use crate::{Error, Result};

/// Environment variable overriding the b-file URL template. `{id}` is the
/// A-number, `{num}` its six digits.
pub const URL_TEMPLATE_ENV: &str = "GAPBAL_OEIS_URL";
pub const DEFAULT_URL_TEMPLATE: &str = "https://oeis.org/{id}/b{num}.txt";

/// Parsed b-file: strictly increasing indices with their values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BFile {
    pub id: String,
    pub entries: Vec<(i64, BigInt)>,
}

/// Validates an A-number of the form 'A' + 6 digits.
pub fn validate_id(id: &str) -> Result<()> {
    let ok = id.len() == 7
        && id.starts_with('A')
        && id[1..].chars().all(|c| c.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("malformed sequence id '{id}'")))
    }
}

/// Parses the standard two-column text format; '#' lines are comments.
pub fn parse_bfile(id: &str, text: &str) -> Result<BFile> {
    validate_id(id)?;
    let mut entries: Vec<(i64, BigInt)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (index, value) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(i), Some(v), None) => (i, v),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected 'index value', got '{line}'"),
                })
            }
        };
        let index: i64 = index.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            message: format!("non-integer index '{index}'"),
        })?;
        let value: BigInt = value.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            message: format!("non-integer value '{value}'"),
        })?;
        if let Some((last, _)) = entries.last() {
            if index <= *last {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("index {index} not above previous {last}"),
                });
            }
        }
        entries.push((index, value));
    }
    Ok(BFile {
        id: id.to_string(),
        entries,
    })
}

/// Serializes back to b-file text (round-trips through `parse_bfile`).
pub fn to_bfile_text(bfile: &BFile) -> String {
    let mut out = String::new();
    for (i, v) in &bfile.entries {
        out.push_str(&format!("{i} {v}\n"));
    }
    out
}

/// Result of aligning a generated prefix against a fixture.
#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub id: String,
    pub matched: bool,
    /// b-file index at which the first generated term sits.
    pub offset: Option<i64>,
    /// Number of terms compared at the matching alignment.
    pub compared: usize,
}

/// Searches for a position in the fixture where the generated prefix
/// matches contiguously. Positions 0..=window are tried; the match must
/// cover either the whole generated list or the whole fixture tail.
pub fn cross_check(generated: &[BigInt], fixture: &BFile, window: usize) -> MatchReport {
    for start in 0..=window.min(fixture.entries.len().saturating_sub(1)) {
        let tail = &fixture.entries[start..];
        let n = generated.len().min(tail.len());
        if n == 0 {
            break;
        }
        if (0..n).all(|i| tail[i].1 == generated[i]) {
            return MatchReport {
                id: fixture.id.clone(),
                matched: true,
                offset: Some(tail[0].0),
                compared: n,
            };
        }
    }
    MatchReport {
        id: fixture.id.clone(),
        matched: false,
        offset: None,
        compared: 0,
    }
}

/// Loads a committed fixture `<dir>/<id>.txt`.
pub fn load_fixture(dir: &Path, id: &str) -> Result<BFile> {
    let text = std::fs::read_to_string(dir.join(format!("{id}.txt")))?;
    parse_bfile(id, &text)
}

/// Fetches a b-file over HTTP. Never called implicitly; the CLI exposes
/// this as its own refresh action and falls back to fixtures on failure.
pub fn fetch_bfile(id: &str, url_template: &str, timeout: Duration) -> Result<String> {
    validate_id(id)?;
    let url = url_template.replace("{id}", id).replace("{num}", &id[1..]);
    let client = reqwest::blocking::Client::builder()
        .timeout(timeout)
        .build()
        .map_err(|e| Error::Domain(format!("http client: {e}")))?;
    let resp = client
        .get(&url)
        .send()
        .and_then(|r| r.error_for_status())
        .map_err(|e| Error::Domain(format!("fetch {url}: {e}")))?;
    resp.text()
        .map_err(|e| Error::Domain(format!("read {url}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn parse_basic() {
        let b = parse_bfile("A001109", "0 0\n1 1\n2 6\n3 35").unwrap();
        assert_eq!(
            b.entries,
            vec![(0, big(0)), (1, big(1)), (2, big(6)), (3, big(35))]
        );
    }

    #[test]
    fn parse_comments_and_errors() {
        let b = parse_bfile("A000001", "# comment\n1 2").unwrap();
        assert_eq!(b.entries, vec![(1, big(2))]);
        // duplicate index
        assert!(parse_bfile("A000001", "1 2\n1 3").is_err());
        // decreasing index
        assert!(parse_bfile("A000001", "2 2\n1 3").is_err());
        // junk tokens
        assert!(parse_bfile("A000001", "1 x").is_err());
        assert!(parse_bfile("A000001", "1 2 3").is_err());
        // bad ids
        assert!(validate_id("B001109").is_err());
        assert!(validate_id("A00110").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "0 0\n1 1\n2 6\n3 35\n";
        let b = parse_bfile("A001109", text).unwrap();
        assert_eq!(to_bfile_text(&b), text);
    }

    #[test]
    fn cross_check_alignment() {
        let fixture = parse_bfile("A001109", "0 0\n1 1\n2 6\n3 35\n4 204").unwrap();
        // generated list starts one entry into the fixture
        let generated = vec![big(1), big(6), big(35), big(204)];
        let report = cross_check(&generated, &fixture, 5);
        assert!(report.matched);
        assert_eq!(report.offset, Some(1));
        assert_eq!(report.compared, 4);

        let report = cross_check(&[big(7)], &fixture, 5);
        assert!(!report.matched);
    }

    #[test]
    fn cross_check_offset_zero() {
        let fixture = parse_bfile("A053141", "0 0\n1 2\n2 14\n3 84").unwrap();
        let generated = vec![big(0), big(2), big(14), big(84)];
        let report = cross_check(&generated, &fixture, 5);
        assert_eq!(report.offset, Some(0));
    }
}
