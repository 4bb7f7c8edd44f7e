//! Plain-text trace and schedule files.
//!
//! Trace:
//!
//! ```text
//! buffers <m>
//! <B_1> ... <B_m>
//! packets <n>
//! <id> <release> <deadline> <value> <buffer>    (n lines)
//! ```
//!
//! Schedule: one `<step> <id>` line per send, ascending by step. In both
//! formats blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Instance, Packet, PacketId, Schedule, Step, ValidationMode, Violation};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {violation}")]
    Semantic { line: usize, violation: Violation },
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last_line: 0,
        }
    }

    /// Next meaningful line as tokens, skipping comments and blanks.
    fn next_tokens(&mut self) -> Option<(usize, Vec<Token<'a>>)> {
        for (idx, raw) in self.inner.by_ref() {
            let line = idx + 1;
            self.last_line = line;
            let trimmed = raw.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some((line, tokenize(raw, line)));
        }
        None
    }

    fn expect_tokens(&mut self, what: &str) -> Result<(usize, Vec<Token<'a>>), TraceError> {
        self.next_tokens().ok_or_else(|| TraceError::Syntax {
            line: self.last_line + 1,
            column: 1,
            message: format!("unexpected end of input, expected {what}"),
        })
    }
}

fn tokenize(raw: &str, line: usize) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in raw.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                tokens.push(token(raw, s, i, line));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        tokens.push(token(raw, s, raw.len(), line));
    }
    tokens
}

fn token(raw: &str, start: usize, end: usize, line: usize) -> Token<'_> {
    Token {
        text: &raw[start..end],
        line,
        column: raw[..start].chars().count() + 1,
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> TraceError {
    TraceError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(tok: &Token<'_>, what: &str) -> Result<T, TraceError> {
    if !tok.text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(
            tok.line,
            tok.column,
            format!("expected non-negative integer {what}, found `{}`", tok.text),
        ));
    }
    tok.text
        .parse()
        .map_err(|_| syntax(tok.line, tok.column, format!("{what} `{}` out of range", tok.text)))
}

fn exact_arity(line: usize, tokens: &[Token<'_>], arity: usize, what: &str) -> Result<(), TraceError> {
    if tokens.len() == arity {
        return Ok(());
    }
    let column = tokens
        .get(arity)
        .map(|t| t.column)
        .or_else(|| tokens.last().map(|t| t.column + t.text.chars().count()))
        .unwrap_or(1);
    Err(syntax(
        line,
        column,
        format!("expected {arity} field(s) for {what}, found {}", tokens.len()),
    ))
}

fn keyword_line<'a>(lines: &mut Lines<'a>, keyword: &str) -> Result<(usize, usize), TraceError> {
    let (line, tokens) = lines.expect_tokens(&format!("`{keyword} <count>`"))?;
    if tokens[0].text != keyword {
        return Err(syntax(
            line,
            tokens[0].column,
            format!("expected `{keyword}`, found `{}`", tokens[0].text),
        ));
    }
    exact_arity(line, &tokens, 2, keyword)?;
    Ok((line, number(&tokens[1], "count")?))
}

/// Parses a trace. Semantic checks are the general instance invariants.
pub fn parse_instance<W: Weight>(text: &str) -> Result<Instance<W>, TraceError> {
    let mut lines = Lines::new(text);
    let (buffers_line, m) = keyword_line(&mut lines, "buffers")?;
    if m == 0 {
        return Err(TraceError::Semantic {
            line: buffers_line,
            violation: Violation::NoBuffers,
        });
    }
    let (cap_line, tokens) = lines.expect_tokens("buffer capacities")?;
    exact_arity(cap_line, &tokens, m, "capacities")?;
    let capacities = tokens
        .iter()
        .map(|t| number::<usize>(t, "capacity"))
        .collect::<Result<Vec<_>, _>>()?;

    let (_, n) = keyword_line(&mut lines, "packets")?;
    let mut packets = Vec::with_capacity(n);
    let mut packet_lines = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, tokens) = lines.expect_tokens("a packet line")?;
        exact_arity(line, &tokens, 5, "packet")?;
        packets.push(Packet {
            id: number(&tokens[0], "id")?,
            release: number(&tokens[1], "release")?,
            deadline: number(&tokens[2], "deadline")?,
            value: number(&tokens[3], "value")?,
            buffer: number(&tokens[4], "buffer")?,
        });
        packet_lines.push(line);
    }
    if let Some((line, tokens)) = lines.next_tokens() {
        return Err(syntax(
            line,
            tokens[0].column,
            format!("trailing content after {n} packet line(s)"),
        ));
    }

    let inst = Instance::new(capacities, packets);
    if let Some(violation) = inst.validate(ValidationMode::General).into_iter().next() {
        let line = match violation {
            Violation::ZeroCapacity { .. } | Violation::NoBuffers => cap_line,
            Violation::BufferOutOfRange { packet, .. }
            | Violation::DuplicateId { packet }
            | Violation::IdOutOfRange { packet, .. }
            | Violation::EmptyWindow { packet, .. }
            | Violation::DeadlineMismatch { packet, .. } => {
                // the last line carrying this id is the offending one for duplicates
                inst.packets
                    .iter()
                    .zip(&packet_lines)
                    .rev()
                    .find(|(p, _)| p.id == packet)
                    .map(|(_, &l)| l)
                    .unwrap_or(cap_line)
            }
            Violation::ArrivalOverflow { .. } => cap_line,
        };
        return Err(TraceError::Semantic { line, violation });
    }
    Ok(inst)
}

pub fn serialize_instance<W: Weight>(inst: &Instance<W>) -> String {
    let mut out = String::new();
    writeln!(out, "buffers {}", inst.capacities.len()).unwrap();
    let caps: Vec<String> = inst.capacities.iter().map(ToString::to_string).collect();
    writeln!(out, "{}", caps.join(" ")).unwrap();
    writeln!(out, "packets {}", inst.packets.len()).unwrap();
    for p in &inst.packets {
        writeln!(out, "{} {} {} {} {}", p.id, p.release, p.deadline, p.value, p.buffer).unwrap();
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Schedule, TraceError> {
    let mut lines = Lines::new(text);
    let mut sends: Vec<(Step, PacketId)> = Vec::new();
    while let Some((line, tokens)) = lines.next_tokens() {
        exact_arity(line, &tokens, 2, "send")?;
        let step: Step = number(&tokens[0], "step")?;
        if let Some(&(prev, _)) = sends.last() {
            if step < prev {
                return Err(syntax(
                    line,
                    tokens[0].column,
                    format!("step {step} is not ascending (previous {prev})"),
                ));
            }
        }
        sends.push((step, number(&tokens[1], "packet id")?));
    }
    Ok(Schedule { sends })
}

pub fn serialize_schedule(schedule: &Schedule) -> String {
    let mut sends = schedule.sends.clone();
    sends.sort_unstable();
    let mut out = String::new();
    for (step, id) in sends {
        writeln!(out, "{step} {id}").unwrap();
    }
    out
}
