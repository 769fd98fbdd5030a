//! Concrete syntax for problem instances.
//!
//! ```text
//! # overtaking
//! theory { }
//! level 1 { p -> !r }
//! level 2 { q -> r }
//! level 3 { !r }
//! situation { p, q }
//! consequence r
//! ```
//!
//! Block items are separated by commas or newlines; `#` starts a comment.
//! Level 1 is the most important level.

use std::path::Path;

use crate::error::{Error, Result};
use crate::hierarchy::{ConstraintHierarchy, Limits, NormCase};
use crate::logic::{Formula, FormulaSet};

/// A formula string with its byte offset in the source.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Item {
    pub text: String,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormFile {
    pub theory: Vec<Item>,
    /// Level `i + 1` at position `i`.
    pub levels: Vec<Vec<Item>>,
    pub situation: Vec<Item>,
    pub consequence: Item,
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

fn error_at(src: &str, offset: usize, message: impl Into<String>) -> Error {
    let (line, column) = line_col(src, offset);
    Error::NormFile {
        line,
        column,
        message: message.into(),
    }
}

impl<'a> Scanner<'a> {
    fn err(&self, offset: usize, message: impl Into<String>) -> Error {
        error_at(self.src, offset, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn word(&mut self) -> &'a str {
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn block(&mut self) -> Result<Vec<Item>> {
        self.skip_trivia();
        if !self.rest().starts_with('{') {
            return Err(self.err(self.pos, "expected `{`"));
        }
        let open = self.pos;
        self.pos += 1;
        let body_start = self.pos;
        let close = self
            .rest()
            .find('}')
            .ok_or_else(|| self.err(open, "unclosed `{`"))?;
        let body = &self.src[body_start..body_start + close];
        self.pos = body_start + close + 1;

        let mut items = Vec::new();
        let mut start = 0;
        let mut in_comment = false;
        let flush = |from: usize, to: usize, items: &mut Vec<Item>| {
            let raw = &body[from..to];
            let text = raw.trim();
            if !text.is_empty() {
                let lead = raw.len() - raw.trim_start().len();
                items.push(Item {
                    text: text.to_string(),
                    offset: body_start + from + lead,
                });
            }
        };
        for (i, c) in body.char_indices() {
            match c {
                '\n' => {
                    if !in_comment {
                        flush(start, i, &mut items);
                    }
                    in_comment = false;
                    start = i + 1;
                }
                '#' if !in_comment => {
                    flush(start, i, &mut items);
                    in_comment = true;
                }
                ',' if !in_comment => {
                    flush(start, i, &mut items);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if !in_comment {
            flush(start, body.len(), &mut items);
        }
        Ok(items)
    }

    fn line_item(&mut self) -> Result<Item> {
        let rest = self.rest();
        let end = rest.find(['\n', '#']).unwrap_or(rest.len());
        let raw = &rest[..end];
        let lead = raw.len() - raw.trim_start().len();
        let item = Item {
            text: raw.trim().to_string(),
            offset: self.pos + lead,
        };
        self.pos += end;
        if item.text.is_empty() {
            return Err(self.err(self.pos, "expected a formula after `consequence`"));
        }
        Ok(item)
    }
}

pub fn parse_normfile(src: &str) -> Result<NormFile> {
    let mut sc = Scanner { src, pos: 0 };
    let mut theory = None;
    let mut situation = None;
    let mut consequence = None;
    let mut levels: Vec<(usize, usize, Vec<Item>)> = Vec::new();

    loop {
        sc.skip_trivia();
        if sc.pos >= src.len() {
            break;
        }
        let at = sc.pos;
        match sc.word() {
            "theory" => {
                let items = sc.block()?;
                if theory.replace(items).is_some() {
                    return Err(sc.err(at, "duplicate `theory` section"));
                }
            }
            "situation" => {
                let items = sc.block()?;
                if situation.replace(items).is_some() {
                    return Err(sc.err(at, "duplicate `situation` section"));
                }
            }
            "level" => {
                sc.skip_trivia();
                let num_at = sc.pos;
                let index: usize = sc
                    .word()
                    .parse()
                    .map_err(|_| sc.err(num_at, "expected a level number"))?;
                levels.push((index, at, sc.block()?));
            }
            "consequence" => {
                let item = sc.line_item()?;
                if consequence.replace(item).is_some() {
                    return Err(sc.err(at, "more than one `consequence`"));
                }
            }
            "" => {
                let c = sc.rest().chars().next().unwrap_or(' ');
                return Err(sc.err(at, format!("unexpected `{c}`")));
            }
            other => {
                return Err(sc.err(
                    at,
                    format!("unknown section `{other}` (expected theory, level, situation or consequence)"),
                ))
            }
        }
    }

    if levels.is_empty() {
        return Err(sc.err(src.len(), "at least one `level` section is required"));
    }
    levels.sort_by_key(|(index, at, _)| (*index, *at));
    for (expected, (index, at, _)) in (1..).zip(&levels) {
        if *index != expected {
            return Err(sc.err(
                *at,
                format!("level indices must be contiguous from 1; expected level {expected}, found level {index}"),
            ));
        }
    }
    let consequence =
        consequence.ok_or_else(|| sc.err(src.len(), "missing `consequence` line"))?;
    Ok(NormFile {
        theory: theory.unwrap_or_default(),
        levels: levels.into_iter().map(|(_, _, items)| items).collect(),
        situation: situation.unwrap_or_default(),
        consequence,
    })
}

impl NormFile {
    fn formula(src: &str, item: &Item) -> Result<Formula> {
        Formula::parse(&item.text).map_err(|e| match e {
            Error::Syntax { offset, message } => {
                error_at(src, item.offset + offset, format!("in `{}`: {message}", item.text))
            }
            other => other,
        })
    }

    fn formulas(src: &str, items: &[Item]) -> Result<FormulaSet> {
        items.iter().map(|item| Self::formula(src, item)).collect()
    }

    /// Parses every formula and validates the instance. `src` is the text the
    /// file was read from; it is used to turn offsets into positions.
    pub fn to_case(&self, src: &str, limits: Limits) -> Result<NormCase> {
        let theory = Self::formulas(src, &self.theory)?;
        let levels = self
            .levels
            .iter()
            .map(|items| Self::formulas(src, items))
            .collect::<Result<Vec<_>>>()?;
        let situation = Self::formulas(src, &self.situation)?;
        let consequence = Self::formula(src, &self.consequence)?;
        NormCase::with_limits(
            theory,
            ConstraintHierarchy::new(levels)?,
            situation,
            consequence,
            limits,
        )
    }
}

pub fn parse_case(src: &str, limits: Limits) -> Result<NormCase> {
    parse_normfile(src)?.to_case(src, limits)
}

/// Reads and validates a norm file, honouring the atom-cap environment override.
pub fn load_normfile(path: impl AsRef<Path>) -> Result<NormCase> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_case(&src, Limits::from_env())
}

fn write_block(out: &mut String, head: &str, fs: &FormulaSet) {
    let items: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
    if items.is_empty() {
        out.push_str(&format!("{head} {{ }}\n"));
    } else {
        out.push_str(&format!("{head} {{ {} }}\n", items.join(", ")));
    }
}

/// Serializes a case back into norm-file syntax.
pub fn to_normfile(case: &NormCase) -> String {
    let mut out = String::new();
    write_block(&mut out, "theory", case.theory());
    for (i, level) in case.hierarchy().levels().iter().enumerate() {
        write_block(&mut out, &format!("level {}", i + 1), level);
    }
    write_block(&mut out, "situation", case.situation());
    out.push_str(&format!("consequence {}\n", case.consequence()));
    out
}
