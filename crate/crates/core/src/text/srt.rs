//! SubRip (`.srt`) parsing down to plain dialogue text.

use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};

static TIMESTAMP_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*\d{1,2}:\d{2}:\d{2}[,.]\d{1,3}\s*-->\s*\d{1,2}:\d{2}:\d{2}[,.]\d{1,3}").unwrap());
static TIMESTAMP_ANYWHERE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\d{1,2}:\d{2}:\d{2}[,.]\d{1,3}\s*-->\s*\d{1,2}:\d{2}:\d{2}[,.]\d{1,3}").unwrap());
static MARKUP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^>]*>|\{[^}]*\}").unwrap());

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SrtText {
    pub text: String,
    pub cues: usize,
    /// Blocks without a recognizable timestamp line.
    pub skipped_blocks: usize,
}

/// Decodes UTF-8 (leading BOM tolerated), drops cue indices, timing lines and
/// markup, and joins the remaining cue lines with single spaces.
pub fn parse_srt(bytes: &[u8]) -> Result<SrtText> {
    let (body, offset) = match bytes.strip_prefix(b"\xEF\xBB\xBF") {
        Some(rest) => (rest, 3),
        None => (bytes, 0),
    };
    let text = std::str::from_utf8(body).map_err(|e| Error::Encoding {
        offset: offset + e.valid_up_to(),
    })?;
    let text = text.replace("\r\n", "\n").replace('\r', "\n");

    let mut out = SrtText::default();
    let mut pieces: Vec<String> = Vec::new();
    let mut block: Vec<&str> = Vec::new();
    for line in text.lines().chain(std::iter::once("")) {
        if !line.trim().is_empty() {
            block.push(line);
            continue;
        }
        if block.is_empty() {
            continue;
        }
        match cue_text(&block) {
            Some(lines) => {
                out.cues += 1;
                pieces.extend(lines.iter().filter_map(|l| clean_line(l)));
            }
            None => out.skipped_blocks += 1,
        }
        block.clear();
    }
    if out.skipped_blocks > 0 {
        tracing::warn!(skipped = out.skipped_blocks, "skipped malformed subtitle blocks");
    }
    out.text = pieces.join(" ");
    Ok(out)
}

fn cue_text<'a>(block: &'a [&'a str]) -> Option<&'a [&'a str]> {
    let is_index = |l: &str| {
        let l = l.trim();
        !l.is_empty() && l.bytes().all(|b| b.is_ascii_digit())
    };
    if TIMESTAMP_LINE.is_match(block[0]) {
        Some(&block[1..])
    } else if block.len() >= 2 && is_index(block[0]) && TIMESTAMP_LINE.is_match(block[1]) {
        Some(&block[2..])
    } else {
        None
    }
}

fn clean_line(line: &str) -> Option<String> {
    let stripped = MARKUP.replace_all(line, " ");
    let stripped = TIMESTAMP_ANYWHERE.replace_all(&stripped, " ");
    let joined = stripped.split_whitespace().collect::<Vec<_>>().join(" ");
    (!joined.is_empty()).then_some(joined)
}
