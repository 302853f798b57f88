//! Well-known-text parsing for asset footprints.
//!
//! Only `POLYGON` with a single outer ring is accepted — that is all a
//! footprint may be. The parser is whitespace-tolerant, case-insensitive on
//! the keyword, and reports syntax errors with the byte offset of the
//! offending input.

use crate::error::{Error, Result};
use crate::footprint::AssetFootprint;

struct Scanner<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_whitespace(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, expected: char) -> Result<()> {
        self.skip_whitespace();
        match self.rest().chars().next() {
            Some(c) if c == expected => {
                self.pos += c.len_utf8();
                Ok(())
            }
            found => Err(self.syntax_error(format!(
                "expected '{expected}', found {}",
                found.map(|c| format!("'{c}'")).unwrap_or_else(|| "end of input".to_string())
            ))),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_whitespace();
        self.rest().chars().next()
    }

    fn keyword(&mut self) -> String {
        self.skip_whitespace();
        let word: String = self
            .rest()
            .chars()
            .take_while(|c| c.is_ascii_alphabetic())
            .collect();
        self.pos += word.len();
        word
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_whitespace();
        let start = self.pos;
        let mut len = 0usize;
        let mut seen_exp = false;
        for (i, c) in self.rest().char_indices() {
            let ok = c.is_ascii_digit()
                || c == '.'
                || ((c == '+' || c == '-') && (i == 0 || seen_exp && len == i))
                || (c == 'e' || c == 'E');
            if !ok {
                break;
            }
            if c == 'e' || c == 'E' {
                seen_exp = true;
            }
            len = i + c.len_utf8();
        }
        if len == 0 {
            return Err(self.syntax_error("expected a number".to_string()));
        }
        let token = &self.rest()[..len];
        let value: f64 = token.parse().map_err(|_| Error::WktSyntax {
            offset: start,
            message: format!("malformed number {token:?}"),
        })?;
        if !value.is_finite() {
            return Err(Error::WktSyntax {
                offset: start,
                message: format!("non-finite coordinate {token:?}"),
            });
        }
        self.pos += len;
        Ok(value)
    }

    fn syntax_error(&self, message: String) -> Error {
        Error::WktSyntax {
            offset: self.pos,
            message,
        }
    }
}

/// Parses a WKT `POLYGON` with one outer ring into its closed vertex ring.
///
/// Closure is validated (first vertex must equal the last); inner rings and
/// multi-geometries are rejected as unsupported.
pub fn parse_wkt_polygon(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut scanner = Scanner::new(text);
    let keyword = scanner.keyword();
    if keyword.is_empty() {
        return Err(scanner.syntax_error("expected a geometry keyword".to_string()));
    }
    if !keyword.eq_ignore_ascii_case("POLYGON") {
        return Err(Error::UnsupportedGeometry {
            found: keyword.to_ascii_uppercase(),
        });
    }
    if let Some(c) = scanner.peek() {
        if c.is_ascii_alphabetic() {
            let modifier = scanner.keyword();
            return Err(Error::UnsupportedGeometry {
                found: format!("POLYGON {}", modifier.to_ascii_uppercase()),
            });
        }
    }
    scanner.eat('(')?;
    let ring = parse_ring(&mut scanner)?;
    scanner.skip_whitespace();
    if scanner.peek() == Some(',') {
        return Err(Error::UnsupportedGeometry {
            found: "POLYGON with interior rings".to_string(),
        });
    }
    scanner.eat(')')?;
    scanner.skip_whitespace();
    if !scanner.rest().is_empty() {
        return Err(scanner.syntax_error("trailing characters after polygon".to_string()));
    }
    if ring.first() != ring.last() {
        return Err(Error::UnclosedRing);
    }
    Ok(ring)
}

fn parse_ring(scanner: &mut Scanner) -> Result<Vec<(f64, f64)>> {
    scanner.eat('(')?;
    let mut ring = Vec::new();
    loop {
        let lon = scanner.number()?;
        let lat = scanner.number()?;
        ring.push((lon, lat));
        match scanner.peek() {
            Some(',') => {
                scanner.eat(',')?;
            }
            Some(')') => {
                scanner.eat(')')?;
                return Ok(ring);
            }
            _ => {
                return Err(scanner.syntax_error("expected ',' or ')' after coordinate".to_string()))
            }
        }
    }
}

/// Formats a ring back to WKT. Coordinates print in Rust's shortest
/// round-trip form, so `parse(format(ring))` reproduces the ring exactly.
pub fn format_wkt_polygon(ring: &[(f64, f64)]) -> String {
    let coords = ring
        .iter()
        .map(|(lon, lat)| format!("{lon} {lat}"))
        .collect::<Vec<_>>()
        .join(", ");
    format!("POLYGON(({coords}))")
}

/// Parses a footprint file: one asset per line as `asset_id<TAB>WKT`.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_footprint_file(text: &str) -> Result<Vec<AssetFootprint>> {
    let mut footprints: Vec<AssetFootprint> = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (asset_id, wkt) = trimmed.split_once('\t').ok_or(Error::FootprintFile {
            line: line_no,
            message: "expected 'asset_id<TAB>WKT'".to_string(),
        })?;
        let asset_id = asset_id.trim();
        if asset_id.is_empty() {
            return Err(Error::FootprintFile {
                line: line_no,
                message: "empty asset id".to_string(),
            });
        }
        if footprints.iter().any(|f| f.asset_id() == asset_id) {
            return Err(Error::FootprintFile {
                line: line_no,
                message: format!("duplicate asset id {asset_id:?}"),
            });
        }
        let ring = parse_wkt_polygon(wkt).map_err(|e| Error::FootprintFile {
            line: line_no,
            message: e.to_string(),
        })?;
        let footprint =
            AssetFootprint::new(asset_id, ring).map_err(|e| Error::FootprintFile {
                line: line_no,
                message: e.to_string(),
            })?;
        footprints.push(footprint);
    }
    Ok(footprints)
}
