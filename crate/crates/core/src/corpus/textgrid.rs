//! Praat TextGrid reader and writer (long text format, interval tiers).
//!
//! The parser accepts UTF-8 (with or without BOM) and UTF-16 with BOM,
//! preserves empty labels, and validates the tier invariants: intervals
//! sorted, non-overlapping, strictly positive length, inside the tier
//! range. Short and binary TextGrid formats are rejected with an error
//! that names the offending line.

use thiserror::Error;

/// Slack for floating-point boundary comparisons, in seconds.
const BOUNDARY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub xmin: f64,
    pub xmax: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalTier {
    pub name: String,
    pub xmin: f64,
    pub xmax: f64,
    pub intervals: Vec<Interval>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TextGridError {
    #[error("TextGrid syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("TextGrid tier {index} at line {line} is a point tier, which is not supported")]
    PointTierUnsupported { line: usize, index: usize },
    #[error("overlapping intervals in tier {tier:?}: interval {index} starts before the previous interval ends")]
    OverlappingIntervals { tier: String, index: usize },
    #[error("unsupported text encoding: {0}")]
    Encoding(String),
}

fn syntax(line: usize, message: impl Into<String>) -> TextGridError {
    TextGridError::Syntax {
        line,
        message: message.into(),
    }
}

/// Decode raw bytes into text with BOM detection (UTF-8, UTF-16LE/BE).
pub fn decode_text(bytes: &[u8]) -> Result<String, TextGridError> {
    if bytes.starts_with(&[0xEF, 0xBB, 0xBF]) {
        return String::from_utf8(bytes[3..].to_vec())
            .map_err(|e| TextGridError::Encoding(e.to_string()));
    }
    let (utf16, le) = if bytes.starts_with(&[0xFF, 0xFE]) {
        (true, true)
    } else if bytes.starts_with(&[0xFE, 0xFF]) {
        (true, false)
    } else {
        (false, false)
    };
    if utf16 {
        let body = &bytes[2..];
        if body.len() % 2 != 0 {
            return Err(TextGridError::Encoding(
                "UTF-16 stream has odd byte length".to_string(),
            ));
        }
        let units: Vec<u16> = body
            .chunks_exact(2)
            .map(|b| {
                if le {
                    u16::from_le_bytes([b[0], b[1]])
                } else {
                    u16::from_be_bytes([b[0], b[1]])
                }
            })
            .collect();
        return String::from_utf16(&units).map_err(|e| TextGridError::Encoding(e.to_string()));
    }
    String::from_utf8(bytes.to_vec()).map_err(|e| TextGridError::Encoding(e.to_string()))
}

struct Cursor<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            lines: text.lines().collect(),
            pos: 0,
        }
    }

    fn line_no(&self) -> usize {
        self.pos.min(self.lines.len().saturating_sub(1)) + 1
    }

    /// Advance to the next non-blank line and return (line number, trimmed text).
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        while self.pos < self.lines.len() {
            let raw = self.lines[self.pos];
            self.pos += 1;
            let trimmed = raw.trim();
            if !trimmed.is_empty() {
                return Some((self.pos, trimmed));
            }
        }
        None
    }

    fn peek_content(&self) -> Option<&'a str> {
        self.lines[self.pos.min(self.lines.len())..]
            .iter()
            .map(|l| l.trim())
            .find(|l| !l.is_empty())
    }

    /// Expect a `key = value` line; returns (line number, raw value text).
    fn expect_kv(&mut self, key: &str) -> Result<(usize, &'a str), TextGridError> {
        let (no, line) = self
            .next_content()
            .ok_or_else(|| syntax(self.line_no(), format!("expected `{key} = ...`, found end of file")))?;
        let rest = line.strip_prefix(key).ok_or_else(|| {
            syntax(
                no,
                format!(
                    "expected `{key} = ...`, found {line:?} (only the Praat long text format is supported)"
                ),
            )
        })?;
        let rest = rest.trim_start();
        let value = rest
            .strip_prefix('=')
            .ok_or_else(|| syntax(no, format!("expected `=` after `{key}`")))?;
        Ok((no, value.trim()))
    }

    fn expect_number(&mut self, key: &str) -> Result<(usize, f64), TextGridError> {
        let (no, value) = self.expect_kv(key)?;
        let parsed = value
            .parse::<f64>()
            .map_err(|_| syntax(no, format!("`{key}` is not a number: {value:?}")))?;
        if !parsed.is_finite() {
            return Err(syntax(no, format!("`{key}` is not finite")));
        }
        Ok((no, parsed))
    }

    /// Expect a quoted string value. Praat escapes an embedded quote by
    /// doubling it; a string may continue over multiple physical lines.
    fn expect_string(&mut self, key: &str) -> Result<(usize, String), TextGridError> {
        let (no, value) = self.expect_kv(key)?;
        let mut chars: Vec<char> = value.chars().collect();
        if chars.first() != Some(&'"') {
            return Err(syntax(no, format!("`{key}` is not a quoted string")));
        }
        chars.remove(0);
        let mut out = String::new();
        loop {
            let mut i = 0;
            while i < chars.len() {
                if chars[i] == '"' {
                    if chars.get(i + 1) == Some(&'"') {
                        out.push('"');
                        i += 2;
                    } else {
                        return Ok((no, out));
                    }
                } else {
                    out.push(chars[i]);
                    i += 1;
                }
            }
            // unterminated on this line: the label contains a newline
            let (_, next) = self
                .next_content()
                .ok_or_else(|| syntax(no, format!("unterminated string for `{key}`")))?;
            out.push('\n');
            chars = next.chars().collect();
        }
    }

    /// Expect a block-opening line like `item [3]:`.
    fn expect_block(&mut self, key: &str, index: usize) -> Result<usize, TextGridError> {
        let (no, line) = self
            .next_content()
            .ok_or_else(|| syntax(self.line_no(), format!("expected `{key} [{index}]:`")))?;
        let normalized: String = line.chars().filter(|c| !c.is_whitespace()).collect();
        let want = format!("{key}[{index}]:");
        if normalized != want {
            return Err(syntax(no, format!("expected `{key} [{index}]:`, found {line:?}")));
        }
        Ok(no)
    }
}

/// Parse the Praat long text format into interval tiers, in file order.
pub fn parse_textgrid(text: &str) -> Result<Vec<IntervalTier>, TextGridError> {
    let mut cur = Cursor::new(text);

    let (no, file_type) = cur.expect_string("File type")?;
    if file_type != "ooTextFile" {
        return Err(syntax(
            no,
            format!("file type {file_type:?} is not supported (expected \"ooTextFile\"; binary TextGrids are not readable here)"),
        ));
    }
    let (no, class) = cur.expect_string("Object class")?;
    if class != "TextGrid" {
        return Err(syntax(no, format!("object class {class:?} is not a TextGrid")));
    }

    let (_, _g_xmin) = cur.expect_number("xmin")?;
    let (_, _g_xmax) = cur.expect_number("xmax")?;

    let (no, tiers_flag) = {
        let (no, line) = cur
            .next_content()
            .ok_or_else(|| syntax(cur.line_no(), "expected `tiers? <exists>`"))?;
        if !line.starts_with("tiers?") {
            return Err(syntax(no, format!("expected `tiers? <exists>`, found {line:?}")));
        }
        (no, line.contains("<exists>"))
    };
    if !tiers_flag {
        return Ok(Vec::new());
    }
    let (size_no, size) = cur.expect_number("size")?;
    if size < 0.0 || size.fract() != 0.0 {
        return Err(syntax(size_no, "tier count is not a non-negative integer"));
    }
    let size = size as usize;
    let _ = no;

    // Praat writes a bare `item []:` before the numbered items.
    if let Some(line) = cur.peek_content() {
        let normalized: String = line.chars().filter(|c| !c.is_whitespace()).collect();
        if normalized == "item[]:" {
            cur.next_content();
        }
    }

    let mut tiers = Vec::with_capacity(size);
    for tier_index in 1..=size {
        cur.expect_block("item", tier_index)?;
        let (class_no, class) = cur.expect_string("class")?;
        match class.as_str() {
            "IntervalTier" => {}
            "TextTier" => {
                return Err(TextGridError::PointTierUnsupported {
                    line: class_no,
                    index: tier_index,
                })
            }
            other => {
                return Err(syntax(class_no, format!("unknown tier class {other:?}")));
            }
        }
        let (_, name) = cur.expect_string("name")?;
        let (_, t_xmin) = cur.expect_number("xmin")?;
        let (_, t_xmax) = cur.expect_number("xmax")?;
        let (count_no, count) = cur.expect_number("intervals: size")?;
        if count < 0.0 || count.fract() != 0.0 {
            return Err(syntax(count_no, "interval count is not a non-negative integer"));
        }
        let count = count as usize;

        let mut intervals = Vec::with_capacity(count);
        for j in 1..=count {
            cur.expect_block("intervals", j)?;
            let (min_no, i_xmin) = cur.expect_number("xmin")?;
            let (_, i_xmax) = cur.expect_number("xmax")?;
            let (_, label) = cur.expect_string("text")?;
            if i_xmin >= i_xmax {
                return Err(syntax(min_no, format!("interval {j} has xmin >= xmax")));
            }
            if i_xmin < t_xmin - BOUNDARY_EPS || i_xmax > t_xmax + BOUNDARY_EPS {
                return Err(syntax(
                    min_no,
                    format!("interval {j} lies outside the tier range [{t_xmin}, {t_xmax}]"),
                ));
            }
            intervals.push(Interval {
                xmin: i_xmin,
                xmax: i_xmax,
                label,
            });
        }
        for j in 1..intervals.len() {
            if intervals[j].xmin < intervals[j - 1].xmax - BOUNDARY_EPS {
                return Err(TextGridError::OverlappingIntervals {
                    tier: name.clone(),
                    index: j + 1,
                });
            }
        }
        tiers.push(IntervalTier {
            name,
            xmin: t_xmin,
            xmax: t_xmax,
            intervals,
        });
    }
    Ok(tiers)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Serialize tiers back to the long text format. Numbers use the
/// shortest representation that round-trips exactly, so
/// `parse(serialize(tiers))` reproduces every boundary bit for bit.
pub fn serialize_textgrid(tiers: &[IntervalTier]) -> String {
    let g_xmin = tiers.iter().map(|t| t.xmin).fold(f64::INFINITY, f64::min);
    let g_xmax = tiers.iter().map(|t| t.xmax).fold(f64::NEG_INFINITY, f64::max);
    let (g_xmin, g_xmax) = if tiers.is_empty() {
        (0.0, 0.0)
    } else {
        (g_xmin, g_xmax)
    };

    let mut out = String::new();
    out.push_str("File type = \"ooTextFile\"\n");
    out.push_str("Object class = \"TextGrid\"\n\n");
    out.push_str(&format!("xmin = {g_xmin}\n"));
    out.push_str(&format!("xmax = {g_xmax}\n"));
    out.push_str("tiers? <exists>\n");
    out.push_str(&format!("size = {}\n", tiers.len()));
    out.push_str("item []:\n");
    for (i, tier) in tiers.iter().enumerate() {
        out.push_str(&format!("    item [{}]:\n", i + 1));
        out.push_str("        class = \"IntervalTier\"\n");
        out.push_str(&format!("        name = {}\n", quote(&tier.name)));
        out.push_str(&format!("        xmin = {}\n", tier.xmin));
        out.push_str(&format!("        xmax = {}\n", tier.xmax));
        out.push_str(&format!("        intervals: size = {}\n", tier.intervals.len()));
        for (j, iv) in tier.intervals.iter().enumerate() {
            out.push_str(&format!("        intervals [{}]:\n", j + 1));
            out.push_str(&format!("            xmin = {}\n", iv.xmin));
            out.push_str(&format!("            xmax = {}\n", iv.xmax));
            out.push_str(&format!("            text = {}\n", quote(&iv.label)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(body: &str) -> String {
        format!(
            "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\nxmin = 0\nxmax = 4\ntiers? <exists>\n{body}"
        )
    }

    fn one_tier(intervals: &[(f64, f64, &str)]) -> String {
        let mut body = String::from("size = 1\nitem []:\n    item [1]:\n        class = \"IntervalTier\"\n        name = \"Aggression\"\n        xmin = 0\n        xmax = 4\n");
        body.push_str(&format!(
            "        intervals: size = {}\n",
            intervals.len()
        ));
        for (j, (a, b, l)) in intervals.iter().enumerate() {
            body.push_str(&format!(
                "        intervals [{}]:\n            xmin = {a}\n            xmax = {b}\n            text = \"{l}\"\n",
                j + 1
            ));
        }
        grid(&body)
    }

    #[test]
    fn handcrafted_two_interval_tier() {
        let text = one_tier(&[(0.0, 2.5, "OAG_NT"), (2.5, 4.0, "NAG")]);
        let tiers = parse_textgrid(&text).unwrap();
        assert_eq!(tiers.len(), 1);
        assert_eq!(tiers[0].name, "Aggression");
        assert_eq!(tiers[0].intervals.len(), 2);
        assert_eq!(tiers[0].intervals[0].label, "OAG_NT");
        assert_eq!(tiers[0].intervals[0].xmax, 2.5);
        assert_eq!(tiers[0].intervals[1].label, "NAG");
    }

    #[test]
    fn zero_interval_tier_is_fine() {
        let tiers = parse_textgrid(&one_tier(&[])).unwrap();
        assert_eq!(tiers.len(), 1);
        assert!(tiers[0].intervals.is_empty());
    }

    #[test]
    fn overlapping_intervals_rejected() {
        let text = one_tier(&[(0.0, 2.0, "NAG"), (1.0, 3.0, "OAG_T")]);
        assert!(matches!(
            parse_textgrid(&text),
            Err(TextGridError::OverlappingIntervals { index: 2, .. })
        ));
    }

    #[test]
    fn point_tier_rejected() {
        let body = "size = 1\nitem []:\n    item [1]:\n        class = \"TextTier\"\n        name = \"pts\"\n";
        assert!(matches!(
            parse_textgrid(&grid(body)),
            Err(TextGridError::PointTierUnsupported { .. })
        ));
    }

    #[test]
    fn syntax_error_carries_line_number() {
        let text = "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\nxmin = 0\nxmax = oops\n";
        match parse_textgrid(text) {
            Err(TextGridError::Syntax { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn short_format_rejected_with_hint() {
        let text = "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n0\n4\n<exists>\n";
        match parse_textgrid(text) {
            Err(TextGridError::Syntax { message, .. }) => {
                assert!(message.contains("long text format"), "{message}");
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn inverted_interval_rejected() {
        let text = one_tier(&[(1.0, 1.0, "NAG")]);
        assert!(matches!(parse_textgrid(&text), Err(TextGridError::Syntax { .. })));
    }

    #[test]
    fn utf16le_with_bom_decodes() {
        let text = one_tier(&[(0.0, 2.5, "OAG_NT")]);
        let mut bytes = vec![0xFF, 0xFE];
        for unit in text.encode_utf16() {
            bytes.extend_from_slice(&unit.to_le_bytes());
        }
        let decoded = decode_text(&bytes).unwrap();
        let tiers = parse_textgrid(&decoded).unwrap();
        assert_eq!(tiers[0].intervals[0].label, "OAG_NT");
    }

    #[test]
    fn quoted_label_with_embedded_quote() {
        let text = one_tier(&[(0.0, 2.5, "said \"\"no\"\" loudly")]);
        let tiers = parse_textgrid(&text).unwrap();
        assert_eq!(tiers[0].intervals[0].label, "said \"no\" loudly");
    }

    #[test]
    fn serialize_parse_round_trip_preserves_structure() {
        let tiers = vec![
            IntervalTier {
                name: "Aggression".to_string(),
                xmin: 0.0,
                xmax: 4.125,
                intervals: vec![
                    Interval { xmin: 0.0, xmax: 1.0 / 3.0, label: "OAG_T".into() },
                    Interval { xmin: 1.0 / 3.0, xmax: 2.7182818, label: String::new() },
                    Interval { xmin: 3.0, xmax: 4.125, label: "NAG".into() },
                ],
            },
            IntervalTier {
                name: "Turn taking".to_string(),
                xmin: 0.0,
                xmax: 4.125,
                intervals: vec![Interval { xmin: 0.5, xmax: 1.5, label: "TCU".into() }],
            },
        ];
        let reparsed = parse_textgrid(&serialize_textgrid(&tiers)).unwrap();
        assert_eq!(tiers, reparsed);
    }
}
