//! Line-oriented parsers for chat answers. All of them tolerate prose before
//! and after the structured part and never panic on arbitrary input.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::bbox::BBox;
use crate::error::{CoreError, Result};
use crate::model::{DraftObject, KeywordCategory, KeywordSet};
use crate::DEFAULT_CANVAS_PX;

/// Drafts read from a recombination answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DraftText {
    pub caption: String,
    pub objects: Vec<DraftObject>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedDrafts {
    pub drafts: Vec<DraftText>,
    /// Fewer than three usable drafts, or some block was rejected.
    pub degraded: bool,
    pub issues: Vec<String>,
}

/// One `(name, box)` pair of a layout answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutEntry {
    pub name: String,
    pub bbox: BBox,
    /// The box had to be fitted back onto the canvas.
    pub clamped: bool,
    /// The numbers were read as pixels rather than fractions.
    pub pixel_input: bool,
}

const EXPECTED_DRAFTS: usize = 3;

fn label_category(label: &str) -> Option<KeywordCategory> {
    let label = label.replace('*', "");
    let label = label.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    match label.as_str() {
        "subject matter" | "subject matters" => Some(KeywordCategory::SubjectMatter),
        "action & pose" | "actions & poses" | "action and pose" | "action & poses" => {
            Some(KeywordCategory::ActionPose)
        }
        "theme & mood" | "themes & moods" | "theme and mood" | "theme & moods" => {
            Some(KeywordCategory::ThemeMood)
        }
        _ => None,
    }
}

fn strip_bullet(line: &str) -> &str {
    line.trim_start_matches(|c: char| c.is_whitespace() || matches!(c, '-' | '*' | '#' | '•'))
}

fn clean_item(item: &str) -> &str {
    item.trim()
        .trim_end_matches('.')
        .trim_matches(|c: char| matches!(c, '"' | '\'' | '*') || c.is_whitespace())
}

/// Reads the `Subject matter:`, `Action & pose:` and `Theme & mood:` lines
/// (labels are case-insensitive). Items are comma separated; trailing
/// periods and empty items are dropped.
pub fn parse_keyword_response(text: &str) -> Result<KeywordSet> {
    let mut set = KeywordSet::new();
    let mut found = false;
    for line in text.lines() {
        let line = strip_bullet(line);
        let Some((label, rest)) = line.split_once(':') else {
            continue;
        };
        let Some(category) = label_category(label) else {
            continue;
        };
        found = true;
        for item in rest.split(',') {
            set.insert(category, clean_item(item));
        }
    }
    if !found {
        return Err(CoreError::parse(
            "no Subject matter / Action & pose / Theme & mood line found",
            text,
        ));
    }
    Ok(set)
}

fn header_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*\**\s*(\d{1,2})\s*[.)]\s*\**\s*(.*)$").expect("valid regex"))
}

fn caption_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)^\s*[-*]*\s*\**\s*(caption|scene|description)\s*\**\s*:\s*\**\s*(.*)$")
            .expect("valid regex")
    })
}

fn objects_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)^\s*[-*]*\s*\**\s*objects\s*\**\s*:\s*\**\s*(.*)$").expect("valid regex")
    })
}

/// Splits a recombination answer on `1.`, `2.`, `3.` headers and reads a
/// caption (`Caption:` or `Scene:`) and an object list from each block.
/// Blocks without a caption or with an empty object list are rejected.
pub fn parse_recombination_response(text: &str) -> Result<ParsedDrafts> {
    let mut blocks: Vec<Vec<&str>> = Vec::new();
    let mut preamble: Vec<&str> = Vec::new();
    for line in text.lines() {
        if let Some(caps) = header_re().captures(line) {
            let rest = caps.get(2).map_or("", |m| m.as_str());
            blocks.push(if rest.trim().is_empty() { vec![] } else { vec![rest] });
        } else if let Some(block) = blocks.last_mut() {
            block.push(line);
        } else {
            preamble.push(line);
        }
    }
    if blocks.is_empty() {
        blocks.push(preamble);
    }

    let mut drafts = Vec::new();
    let mut issues = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        match parse_block(block) {
            Ok(d) if drafts.len() < EXPECTED_DRAFTS => drafts.push(d),
            Ok(_) => issues.push(format!("block {}: extra draft ignored", i + 1)),
            Err(e) => issues.push(format!("block {}: {e}", i + 1)),
        }
    }
    if drafts.is_empty() {
        let detail = if issues.is_empty() {
            "no draft blocks found".to_string()
        } else {
            issues.join("; ")
        };
        return Err(CoreError::parse(detail, text));
    }
    let degraded = drafts.len() < EXPECTED_DRAFTS || !issues.is_empty();
    Ok(ParsedDrafts { drafts, degraded, issues })
}

fn parse_block(lines: &[&str]) -> std::result::Result<DraftText, String> {
    let mut caption: Option<String> = None;
    let mut objects_text: Option<String> = None;
    for line in lines {
        if let Some(c) = caption_re().captures(line) {
            if caption.is_none() {
                caption = Some(c[2].trim().trim_end_matches("**").trim().to_string());
            }
            continue;
        }
        if let Some(c) = objects_re().captures(line) {
            objects_text = Some(c[1].to_string());
            continue;
        }
        if let Some(t) = objects_text.as_mut() {
            t.push(' ');
            t.push_str(line.trim());
        }
    }
    let caption = caption
        .filter(|c| !c.is_empty())
        .ok_or_else(|| "missing caption".to_string())?;
    let objects_text = objects_text.ok_or_else(|| "missing object list".to_string())?;
    let objects = parse_object_list(&objects_text)?;
    if objects.is_empty() {
        return Err("empty object list".into());
    }
    Ok(DraftText { caption, objects })
}

/// Parses `[(name, detail), ...]`. Details may contain commas and nested
/// parentheses; names and details may be quoted.
pub fn parse_object_list(s: &str) -> std::result::Result<Vec<DraftObject>, String> {
    let chars: Vec<char> = s.chars().collect();
    let start = chars
        .iter()
        .position(|&c| c == '[')
        .ok_or_else(|| "object list does not start with '['".to_string())?;
    let mut i = start + 1;
    let mut out = Vec::new();
    loop {
        while i < chars.len() && (chars[i].is_whitespace() || chars[i] == ',') {
            i += 1;
        }
        match chars.get(i) {
            None => return Err("unbalanced brackets in object list".into()),
            Some(']') => return Ok(out),
            Some('(') => {
                let mut depth = 1usize;
                let body_start = i + 1;
                i += 1;
                while i < chars.len() && depth > 0 {
                    match chars[i] {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        _ => {}
                    }
                    i += 1;
                }
                if depth != 0 {
                    return Err("unbalanced parentheses in object list".into());
                }
                let body: String = chars[body_start..i - 1].iter().collect();
                out.push(split_object(&body)?);
            }
            Some(c) => return Err(format!("unexpected {c:?} in object list")),
        }
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    for q in ['\'', '"'] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return s[1..s.len() - 1].trim();
        }
    }
    s
}

fn split_object(body: &str) -> std::result::Result<DraftObject, String> {
    let (name, detail) = body.split_once(',').unwrap_or((body, ""));
    let name = unquote(name);
    if name.is_empty() {
        return Err("object without a name".into());
    }
    Ok(DraftObject {
        name: name.to_string(),
        detail: unquote(detail).to_string(),
    })
}

/// Parses `[('name', [x, y, w, h]), ...]` with the default 512 px canvas.
pub fn parse_layout_response(text: &str) -> Result<Vec<LayoutEntry>> {
    parse_layout_response_with_canvas(text, DEFAULT_CANVAS_PX)
}

/// Boxes whose components are all at most 1 are fractions; a box with any
/// component above 1 is read as pixels on a `canvas_px` canvas. Every box is
/// then fitted onto the canvas.
pub fn parse_layout_response_with_canvas(text: &str, canvas_px: u32) -> Result<Vec<LayoutEntry>> {
    if canvas_px == 0 {
        return Err(CoreError::invalid("canvas_px must be positive"));
    }
    let raw = LayoutScanner::new(text)
        .parse()
        .map_err(|m| CoreError::parse(m, text))?;
    let side = canvas_px as f64;
    let mut out = Vec::with_capacity(raw.len());
    for (name, nums) in raw {
        let pixel_input = nums.iter().any(|&v| v > 1.0);
        let nums = if pixel_input { nums.map(|v| v / side) } else { nums };
        let (bbox, clamped) = BBox::from_array(nums)
            .fit_to_canvas()
            .ok_or_else(|| CoreError::parse(format!("non-finite box for {name:?}"), text))?;
        out.push(LayoutEntry {
            name,
            bbox,
            clamped,
            pixel_input,
        });
    }
    Ok(out)
}

struct LayoutScanner {
    chars: Vec<char>,
    pos: usize,
}

impl LayoutScanner {
    fn new(text: &str) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> std::result::Result<(), String> {
        self.skip_ws();
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            Some(got) => Err(format!("expected {c:?}, found {got:?}")),
            None => Err(format!("unbalanced brackets: expected {c:?} before end of text")),
        }
    }

    /// Finds the `[` that opens the tuple list: the first `[` followed by `(`.
    fn seek_payload(&mut self) -> std::result::Result<(), String> {
        let n = self.chars.len();
        let mut i = 0;
        while i < n {
            if self.chars[i] == '[' {
                let mut j = i + 1;
                while j < n && self.chars[j].is_whitespace() {
                    j += 1;
                }
                if j < n && self.chars[j] == '(' {
                    self.pos = i + 1;
                    return Ok(());
                }
            }
            i += 1;
        }
        Err("no layout list of the form [('name', [x, y, w, h]), ...] found".into())
    }

    fn parse(mut self) -> std::result::Result<Vec<(String, [f64; 4])>, String> {
        self.seek_payload()?;
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(']') => {
                    self.pos += 1;
                    break;
                }
                Some('(') => {
                    self.pos += 1;
                    out.push(self.tuple()?);
                    self.skip_ws();
                    if self.peek() == Some(',') {
                        self.pos += 1;
                    }
                }
                Some(c) => return Err(format!("unexpected {c:?} in layout list")),
                None => return Err("unbalanced brackets: layout list is not closed".into()),
            }
        }
        if out.is_empty() {
            return Err("layout list is empty".into());
        }
        Ok(out)
    }

    fn tuple(&mut self) -> std::result::Result<(String, [f64; 4]), String> {
        self.skip_ws();
        let name = self.name()?;
        self.expect(',')?;
        self.expect('[')?;
        let start = self.pos;
        while self.peek().is_some_and(|c| c != ']') {
            if matches!(self.peek(), Some('[' | '(' | ')')) {
                return Err("unbalanced brackets inside a box".into());
            }
            self.pos += 1;
        }
        if self.peek().is_none() {
            return Err("unbalanced brackets: box is not closed".into());
        }
        let inner: String = self.chars[start..self.pos].iter().collect();
        self.pos += 1;
        self.expect(')')?;

        let nums: Vec<f64> = inner
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("non-numeric box component {s:?} for {name:?}"))
            })
            .collect::<std::result::Result<_, _>>()?;
        let nums: [f64; 4] = nums
            .try_into()
            .map_err(|v: Vec<f64>| format!("box for {name:?} has {} components, expected 4", v.len()))?;
        Ok((name, nums))
    }

    /// A quoted name ends at the matching quote that is followed by a comma,
    /// so apostrophes inside the name survive.
    fn name(&mut self) -> std::result::Result<String, String> {
        let quote = match self.peek() {
            Some(q @ ('\'' | '"')) => {
                self.pos += 1;
                Some(q)
            }
            _ => None,
        };
        let start = self.pos;
        let end = loop {
            match self.peek() {
                None => return Err("unbalanced brackets: tuple is not closed".into()),
                Some(c) if Some(c) == quote => {
                    let mut j = self.pos + 1;
                    while j < self.chars.len() && self.chars[j].is_whitespace() {
                        j += 1;
                    }
                    if self.chars.get(j) == Some(&',') {
                        let end = self.pos;
                        self.pos += 1;
                        break end;
                    }
                    self.pos += 1;
                }
                Some(',') if quote.is_none() => break self.pos,
                Some(_) => self.pos += 1,
            }
        };
        let name: String = self.chars[start..end].iter().collect();
        let name = name.trim().to_string();
        if name.is_empty() {
            return Err("layout entry without a name".into());
        }
        Ok(name)
    }
}
