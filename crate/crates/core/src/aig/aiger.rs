//! AIGER 1.9 reader and writer for combinational designs.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use super::{Aig, Lit, NodeId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AigerFormat {
    Ascii,
    Binary,
}

impl AigerFormat {
    /// Format implied by a file name (`.aag` is ASCII, anything else binary).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("aag") => AigerFormat::Ascii,
            _ => AigerFormat::Binary,
        }
    }
}

struct Header {
    max_var: usize,
    inputs: usize,
    outputs: usize,
    ands: usize,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn line(&mut self) -> Option<&'a str> {
        if self.pos >= self.bytes.len() {
            return None;
        }
        let rest = &self.bytes[self.pos..];
        let end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
        self.pos += (end + 1).min(rest.len());
        std::str::from_utf8(&rest[..end]).ok().map(|s| s.trim_end_matches('\r'))
    }

    fn expect_line(&mut self, what: &str) -> Result<&'a str> {
        self.line().ok_or_else(|| Error::parse(format!("truncated body: missing {what}")))
    }

    fn varint(&mut self) -> Result<u32> {
        let mut x: u64 = 0;
        let mut shift = 0;
        loop {
            let b = *self
                .bytes
                .get(self.pos)
                .ok_or_else(|| Error::parse("truncated body: binary AND section ends early"))?;
            self.pos += 1;
            x |= ((b & 0x7f) as u64) << shift;
            if b & 0x80 == 0 {
                break;
            }
            shift += 7;
            if shift > 35 {
                return Err(Error::parse("varint overflow in binary AND section"));
            }
        }
        u32::try_from(x).map_err(|_| Error::parse("varint overflow in binary AND section"))
    }
}

fn parse_usize(tok: &str, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::parse(format!("bad {what} `{tok}`")))
}

fn parse_header(line: &str) -> Result<(AigerFormat, Header)> {
    let toks: Vec<&str> = line.split_ascii_whitespace().collect();
    let format = match toks.first() {
        Some(&"aag") => AigerFormat::Ascii,
        Some(&"aig") => AigerFormat::Binary,
        _ => return Err(Error::parse("malformed header: expected `aag` or `aig`")),
    };
    if toks.len() < 6 || toks.len() > 10 {
        return Err(Error::parse("malformed header: expected `M I L O A`"));
    }
    let nums: Vec<usize> = toks[1..]
        .iter()
        .map(|t| parse_usize(t, "header field"))
        .collect::<Result<_>>()?;
    let (m, i, l, o, a) = (nums[0], nums[1], nums[2], nums[3], nums[4]);
    if l > 0 {
        return Err(Error::Latches(l));
    }
    if nums[5..].iter().any(|&x| x != 0) {
        return Err(Error::parse("bad-state, constraint, justice and fairness sections are not supported"));
    }
    if i + l + a > m {
        return Err(Error::parse(format!("malformed header: M={m} smaller than I+L+A={}", i + l + a)));
    }
    if format == AigerFormat::Binary && i + l + a != m {
        return Err(Error::parse("malformed header: binary files need M = I+L+A"));
    }
    Ok((format, Header { max_var: m, inputs: i, outputs: o, ands: a }))
}

/// Parses a combinational AIGER file. The file's structure is kept verbatim:
/// no structural hashing or constant folding is applied, so the resulting
/// size equals the header's AND count.
pub fn parse_aiger(bytes: &[u8], format: AigerFormat) -> Result<Aig> {
    let mut r = Reader { bytes, pos: 0 };
    let header_line = r.line().ok_or_else(|| Error::parse("empty input"))?;
    let (found, h) = parse_header(header_line)?;
    if found != format {
        return Err(Error::parse(format!("expected {format:?} AIGER, found {found:?} header")));
    }

    // Variable -> literal in the new graph.
    let mut map: Vec<Option<Lit>> = vec![None; h.max_var + 1];
    map[0] = Some(Lit::FALSE);
    let mut g = Aig::new();
    let mut input_vars = Vec::with_capacity(h.inputs);
    for k in 0..h.inputs {
        let var = match format {
            AigerFormat::Binary => k + 1,
            AigerFormat::Ascii => {
                let tok = r.expect_line("input literal")?.trim();
                let lit = parse_usize(tok, "input literal")?;
                if lit < 2 || lit & 1 == 1 || lit / 2 > h.max_var {
                    return Err(Error::parse(format!("invalid input literal {lit}")));
                }
                lit / 2
            }
        };
        if map[var].is_some() {
            return Err(Error::parse(format!("variable {var} defined twice")));
        }
        map[var] = Some(g.add_input());
        input_vars.push(var);
    }

    let mut out_lits = Vec::with_capacity(h.outputs);
    for _ in 0..h.outputs {
        let tok = r.expect_line("output literal")?.trim();
        let lit = parse_usize(tok, "output literal")?;
        if lit / 2 > h.max_var {
            return Err(Error::parse(format!("output literal {lit} exceeds M")));
        }
        out_lits.push(lit);
    }

    let mut ands: Vec<(usize, usize, usize)> = Vec::with_capacity(h.ands);
    match format {
        AigerFormat::Ascii => {
            for _ in 0..h.ands {
                let line = r.expect_line("AND gate")?;
                let nums: Vec<usize> = line
                    .split_ascii_whitespace()
                    .map(|t| parse_usize(t, "AND literal"))
                    .collect::<Result<_>>()?;
                if nums.len() != 3 {
                    return Err(Error::parse(format!("malformed AND line `{line}`")));
                }
                ands.push((nums[0], nums[1], nums[2]));
            }
        }
        AigerFormat::Binary => {
            for k in 0..h.ands {
                let lhs = 2 * (h.inputs + k + 1);
                let d0 = r.varint()? as usize;
                let d1 = r.varint()? as usize;
                if d0 == 0 || d0 > lhs || d1 > lhs - d0 {
                    return Err(Error::parse(format!("invalid delta encoding for AND {lhs}")));
                }
                let rhs0 = lhs - d0;
                ands.push((lhs, rhs0, rhs0 - d1));
            }
        }
    }
    for &(lhs, _, _) in &ands {
        if lhs < 2 || lhs & 1 == 1 || lhs / 2 > h.max_var {
            return Err(Error::parse(format!("invalid AND literal {lhs}")));
        }
    }
    ands.sort_by_key(|a| a.0);
    for &(lhs, r0, r1) in &ands {
        let var = lhs / 2;
        if map[var].is_some() {
            return Err(Error::parse(format!("variable {var} defined twice")));
        }
        let mut fan = [Lit::FALSE; 2];
        for (slot, rhs) in fan.iter_mut().zip([r0, r1]) {
            if rhs / 2 >= var {
                return Err(Error::parse(format!("cycle: AND {lhs} uses literal {rhs} not below it")));
            }
            let l = map[rhs / 2].ok_or_else(|| Error::parse(format!("AND {lhs} uses undefined literal {rhs}")))?;
            *slot = l ^ (rhs & 1 == 1);
        }
        map[var] = Some(g.add_and_raw(fan[0], fan[1]));
    }

    for lit in out_lits {
        let l = map[lit / 2].ok_or_else(|| Error::parse(format!("output uses undefined literal {lit}")))?;
        g.add_output(l ^ (lit & 1 == 1));
    }

    // Symbol table, then optional comment section.
    while let Some(line) = r.line() {
        if line == "c" {
            let rest = &bytes[r.pos.min(bytes.len())..];
            g.comment = Some(String::from_utf8_lossy(rest).into_owned());
            break;
        }
        if line.is_empty() {
            continue;
        }
        let (kind, rest) = line.split_at(1);
        let (idx, name) = rest
            .split_once(' ')
            .ok_or_else(|| Error::parse(format!("malformed symbol line `{line}`")))?;
        let idx = parse_usize(idx, "symbol index")?;
        match kind {
            "i" if idx < g.num_inputs() => g.set_input_name(idx, name),
            "o" if idx < g.num_outputs() => g.set_output_name(idx, name),
            _ => return Err(Error::parse(format!("invalid symbol `{line}`"))),
        }
    }
    Ok(g)
}

/// Parses either format, chosen by the header magic.
pub fn parse_aiger_auto(bytes: &[u8]) -> Result<Aig> {
    if bytes.starts_with(b"aag") {
        parse_aiger(bytes, AigerFormat::Ascii)
    } else {
        parse_aiger(bytes, AigerFormat::Binary)
    }
}

pub fn read_aiger_file(path: impl AsRef<Path>) -> Result<Aig> {
    let bytes = fs::read(path)?;
    parse_aiger_auto(&bytes)
}

fn push_varint(out: &mut Vec<u8>, mut x: u32) {
    while x >= 0x80 {
        out.push((x as u8 & 0x7f) | 0x80);
        x >>= 7;
    }
    out.push(x as u8);
}

/// Serializes alive nodes only, re-indexed compactly in topological order.
/// Symbol names are kept; the comment section is not written.
pub fn write_aiger(aig: &Aig, format: AigerFormat) -> Vec<u8> {
    let (g, _) = aig.compact();
    let i = g.num_inputs();
    let a = g.size();
    let mut out = Vec::new();
    let magic = match format {
        AigerFormat::Ascii => "aag",
        AigerFormat::Binary => "aig",
    };
    writeln!(out, "{magic} {} {i} 0 {} {a}", i + a, g.num_outputs()).unwrap();
    if format == AigerFormat::Ascii {
        for &id in g.inputs() {
            writeln!(out, "{}", 2 * id).unwrap();
        }
    }
    for o in g.outputs() {
        writeln!(out, "{}", o.code()).unwrap();
    }
    for id in (i + 1) as NodeId..(i + a + 1) as NodeId {
        let (f0, f1) = g.fanins(id);
        let lhs = 2 * id;
        let (hi, lo) = (f1.code().max(f0.code()), f0.code().min(f1.code()));
        match format {
            AigerFormat::Ascii => writeln!(out, "{lhs} {hi} {lo}").unwrap(),
            AigerFormat::Binary => {
                push_varint(&mut out, lhs - hi);
                push_varint(&mut out, hi - lo);
            }
        }
    }
    for k in 0..i {
        if let Some(name) = g.input_name(k) {
            writeln!(out, "i{k} {name}").unwrap();
        }
    }
    for k in 0..g.num_outputs() {
        if let Some(name) = g.output_name(k) {
            writeln!(out, "o{k} {name}").unwrap();
        }
    }
    out
}

pub fn write_aiger_file(aig: &Aig, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_aiger(aig, AigerFormat::from_path(path)))?;
    Ok(())
}
