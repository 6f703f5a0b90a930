//! Text format for complexes.
//!
//! ```text
//! complex figure8 flavor minus
//! gen x0 grw 1 A 1
//! gen x3 grw 0 A 0
//! d x3 = V*x4 + U*x0
//! ```
//!
//! Blank lines and `#` comments are ignored. A differential line lists
//! `monomial*target` terms; a bare target means coefficient 1, and repeated
//! targets add.

use std::fmt::Write as _;

use crate::complex::{Flavor, Generator, KnotComplex};
use crate::error::{CoreError, Result};
use crate::poly::{parse_monomial, Poly};

fn syntax(line: usize, column: usize, message: impl Into<String>) -> CoreError {
    CoreError::Syntax { line, column, message: message.into() }
}

fn valid_id(s: &str) -> bool {
    !s.is_empty()
        && s != "U"
        && s != "V"
        && s.chars().all(|c| !c.is_whitespace() && !matches!(c, '*' | '+' | '=' | '#'))
        && s.parse::<i64>().is_err()
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..k]));
                start = None;
            }
            (false, None) => start = Some(k),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (line[..s].chars().count() + 1, t)).collect()
}

fn int_token(tok: Option<&(usize, &str)>, line: usize, fallback_col: usize, what: &str) -> Result<i64> {
    match tok {
        Some((col, t)) => t.parse().map_err(|_| syntax(line, *col, format!("expected integer {what}, found `{t}`"))),
        None => Err(syntax(line, fallback_col, format!("missing {what}"))),
    }
}

fn keyword(tok: Option<&(usize, &str)>, expected: &str, line: usize, fallback_col: usize) -> Result<()> {
    match tok {
        Some((_, t)) if *t == expected => Ok(()),
        Some((col, t)) => Err(syntax(line, *col, format!("expected `{expected}`, found `{t}`"))),
        None => Err(syntax(line, fallback_col, format!("expected `{expected}`"))),
    }
}

struct PendingTerm {
    line: usize,
    column: usize,
    source: usize,
    target: String,
    coefficient: Poly,
}

/// Parses and validates a complex.
pub fn parse(text: &str) -> Result<KnotComplex> {
    let mut header: Option<(String, Flavor)> = None;
    let mut gens: Vec<Generator> = Vec::new();
    let mut pending: Vec<PendingTerm> = Vec::new();
    let mut sources: Vec<(usize, usize, String)> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        let Some(&(col0, head)) = toks.first() else { continue };
        let end_col = line.chars().count() + 1;
        match head {
            "complex" => {
                if header.is_some() {
                    return Err(syntax(line_no, col0, "second `complex` header"));
                }
                let (_, name) = toks.get(1).ok_or_else(|| syntax(line_no, end_col, "missing complex name"))?;
                keyword(toks.get(2), "flavor", line_no, end_col)?;
                let flavor = match toks.get(3) {
                    Some((_, "minus")) => Flavor::Minus,
                    Some((_, "infinity")) => Flavor::Infinity,
                    Some((c, t)) => return Err(syntax(line_no, *c, format!("unknown flavor `{t}`"))),
                    None => return Err(syntax(line_no, end_col, "missing flavor")),
                };
                if let Some((c, _)) = toks.get(4) {
                    return Err(syntax(line_no, *c, "trailing input"));
                }
                header = Some((name.to_string(), flavor));
            }
            "gen" => {
                if header.is_none() {
                    return Err(syntax(line_no, col0, "`gen` before `complex` header"));
                }
                let (c, name) = toks.get(1).ok_or_else(|| syntax(line_no, end_col, "missing generator name"))?;
                if !valid_id(name) {
                    return Err(syntax(line_no, *c, format!("invalid generator name `{name}`")));
                }
                keyword(toks.get(2), "grw", line_no, end_col)?;
                let gr_w = int_token(toks.get(3), line_no, end_col, "gr_w")?;
                keyword(toks.get(4), "A", line_no, end_col)?;
                let a = int_token(toks.get(5), line_no, end_col, "Alexander grading")?;
                if let Some((c, _)) = toks.get(6) {
                    return Err(syntax(line_no, *c, "trailing input"));
                }
                gens.push(Generator::new(*name, gr_w, a));
            }
            "d" => {
                if header.is_none() {
                    return Err(syntax(line_no, col0, "`d` before `complex` header"));
                }
                let (c, name) = toks.get(1).ok_or_else(|| syntax(line_no, end_col, "missing source generator"))?;
                keyword(toks.get(2), "=", line_no, end_col)?;
                let src_idx = sources.len();
                sources.push((line_no, *c, name.to_string()));
                let rhs_col = toks[2].0 + 1;
                let rhs: String = line.chars().skip(rhs_col - 1).collect();
                parse_rhs(&rhs, line_no, rhs_col, src_idx, &mut pending)?;
            }
            other => return Err(syntax(line_no, col0, format!("unknown directive `{other}`"))),
        }
    }

    let (name, flavor) = header.ok_or_else(|| syntax(1, 1, "missing `complex` header"))?;
    let lookup = |name: &str| gens.iter().position(|g| g.name == name);
    let mut source_index = Vec::with_capacity(sources.len());
    for (line, col, s) in &sources {
        source_index.push(lookup(s).ok_or_else(|| syntax(*line, *col, format!("unknown generator `{s}`")))?);
    }
    let mut entries = Vec::with_capacity(pending.len());
    for t in pending {
        let target = lookup(&t.target)
            .ok_or_else(|| syntax(t.line, t.column, format!("unknown generator `{}`", t.target)))?;
        entries.push((source_index[t.source], target, t.coefficient));
    }
    KnotComplex::new(name, flavor, gens, entries)
}

fn parse_rhs(rhs: &str, line: usize, col: usize, source: usize, out: &mut Vec<PendingTerm>) -> Result<()> {
    if rhs.trim() == "0" {
        return Ok(());
    }
    let mut offset = 0;
    for piece in rhs.split('+') {
        let lead = piece.chars().take_while(|c| c.is_whitespace()).count();
        let term_col = col + offset + lead;
        offset += piece.chars().count() + 1;
        let term = piece.trim();
        if term.is_empty() {
            return Err(syntax(line, term_col, "empty term"));
        }
        let (coef, target) = match term.rsplit_once('*') {
            Some((m, t)) => (m.trim(), t.trim()),
            None => ("1", term),
        };
        if !valid_id(target) {
            return Err(syntax(line, term_col, format!("expected a generator name, found `{target}`")));
        }
        let m = parse_monomial(coef).map_err(|msg| syntax(line, term_col, msg))?;
        out.push(PendingTerm { line, column: term_col, source, target: target.to_string(), coefficient: m.into() });
    }
    Ok(())
}

/// Canonical text form: generators in order, one `d` line per nonzero
/// differential, targets in generator order.
pub fn serialize(c: &KnotComplex) -> String {
    let mut s = String::new();
    writeln!(s, "complex {} flavor {}", c.name(), c.flavor().as_str()).unwrap();
    for g in c.generators() {
        writeln!(s, "gen {} grw {} A {}", g.name, g.gr_w, g.alexander).unwrap();
    }
    for (i, g) in c.generators().iter().enumerate() {
        let row = c.differential(i);
        if row.is_empty() {
            continue;
        }
        let terms: Vec<String> = row
            .iter()
            .flat_map(|(t, p)| {
                let target = &c.generator(*t).name;
                p.terms().map(move |m| {
                    if m.u == 0 && m.v == 0 {
                        target.clone()
                    } else {
                        format!("{m}*{target}")
                    }
                })
            })
            .collect();
        writeln!(s, "d {} = {}", g.name, terms.join(" + ")).unwrap();
    }
    s
}
