//! Text file formats: encodings, SLPs and LZ77 factor lists.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use sigenc::slp::{Rule, Slp};
use sigenc::{Assignment, Encoding, Factor, GrammarStore, ParserParams, Sig, Symbol};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Content(String),
    #[error(transparent)]
    Core(#[from] sigenc::Error),
}

fn at(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Line { line, msg: msg.into() }
}

/// Non-empty lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty())
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, FormatError> {
    tok.parse().map_err(|_| at(line, format!("bad {} `{}`", what, tok)))
}

fn header<'a>(
    it: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    want: &[&str],
) -> Result<(usize, Vec<&'a str>), FormatError> {
    let (ln, toks) = it.next().ok_or_else(|| FormatError::Content(format!("missing `{}` line", want.join(" "))))?;
    if toks.len() < want.len() || toks[..want.len()] != *want {
        return Err(at(ln, format!("expected `{}`", want.join(" "))));
    }
    Ok((ln, toks))
}

pub fn write_encoding(enc: &Encoding) -> String {
    let mut s = String::new();
    writeln!(s, "SIGENC 1").unwrap();
    writeln!(s, "N {}", enc.len()).unwrap();
    match enc.start() {
        Some(x) => writeln!(s, "S {}", x).unwrap(),
        None => writeln!(s, "S -").unwrap(),
    }
    for (sig, m) in enc.store().iter() {
        match m.assign {
            Assignment::Char(c) => writeln!(s, "{} C {}", sig, c),
            Assignment::Pair(l, r) => writeln!(s, "{} P {} {}", sig, l, r),
            Assignment::RunOf(b, d) => writeln!(s, "{} R {} {}", sig, b, d),
        }
        .unwrap();
    }
    s
}

pub fn read_encoding(text: &str) -> Result<Encoding, FormatError> {
    let mut it = lines(text);
    header(&mut it, &["SIGENC", "1"])?;
    let (ln, toks) = header(&mut it, &["N"])?;
    let n: u64 = num(ln, toks.get(1).copied().unwrap_or(""), "length")?;
    let (ln, toks) = header(&mut it, &["S"])?;
    let start = match toks.get(1).copied() {
        Some("-") => None,
        Some(t) => Some(Sig(num(ln, t, "start signature")?)),
        None => return Err(at(ln, "missing start signature")),
    };
    let mut st = GrammarStore::new();
    for (ln, toks) in it {
        let id = Sig(num(ln, toks[0], "signature")?);
        let arg = |k: usize| -> Result<u64, FormatError> {
            num(ln, toks.get(k).copied().unwrap_or(""), "operand")
        };
        let want = match toks.get(1).copied() {
            Some("C") => 3,
            Some("P") | Some("R") => 4,
            _ => return Err(at(ln, "expected C, P or R")),
        };
        if toks.len() != want {
            return Err(at(ln, "wrong number of fields"));
        }
        let a = match toks[1] {
            "C" => Assignment::Char(
                Symbol::try_from(arg(2)?).map_err(|_| at(ln, "character out of range"))?,
            ),
            "P" => Assignment::Pair(Sig(arg(2)?), Sig(arg(3)?)),
            _ => Assignment::RunOf(Sig(arg(2)?), arg(3)?),
        };
        st.insert_with_id(id, a).map_err(|e| at(ln, e.to_string()))?;
    }
    if let Some(s) = start {
        st.meta(s).map_err(|_| FormatError::Content(format!("start signature {} has no rule", s)))?;
        let mut seen = BTreeSet::new();
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            if seen.insert(x) {
                q.extend(st.assgn(x)?.operands());
            }
        }
        if let Some((x, _)) = st.iter().find(|(x, _)| !seen.contains(x)) {
            return Err(FormatError::Content(format!("signature {} is not reachable from the start", x)));
        }
    } else if !st.is_empty() {
        return Err(FormatError::Content("empty text with a nonempty dictionary".into()));
    }
    let enc = Encoding::from_parts(st, start, ParserParams::DEFAULT)?;
    if enc.len() != n {
        return Err(FormatError::Content(format!("N is {} but the start derives {} symbols", n, enc.len())));
    }
    enc.audit()?;
    Ok(enc)
}

pub fn write_slp(slp: &Slp) -> String {
    let mut s = String::new();
    writeln!(s, "SLP 1").unwrap();
    writeln!(s, "S {}", slp.start()).unwrap();
    for (id, r) in slp.rules() {
        match r {
            Rule::Char(c) => writeln!(s, "{} C {}", id, c),
            Rule::Pair(l, r) => writeln!(s, "{} P {} {}", id, l, r),
        }
        .unwrap();
    }
    s
}

pub fn read_slp(text: &str) -> Result<Slp, FormatError> {
    let mut it = lines(text);
    header(&mut it, &["SLP", "1"])?;
    let (ln, toks) = header(&mut it, &["S"])?;
    let start: u64 = num(ln, toks.get(1).copied().unwrap_or(""), "start variable")?;
    let mut rules = Vec::new();
    for (ln, toks) in it {
        let id: u64 = num(ln, toks[0], "variable")?;
        match (toks.get(1).copied(), toks.len()) {
            (Some("C"), 3) => rules.push((id, Rule::Char(num(ln, toks[2], "codepoint")?))),
            (Some("P"), 4) => rules.push((id, Rule::Pair(num(ln, toks[2], "operand")?, num(ln, toks[3], "operand")?))),
            _ => return Err(at(ln, "expected `<id> C <codepoint>` or `<id> P <l> <r>`")),
        }
    }
    Ok(Slp::from_rules(rules, start)?)
}

/// `L` lines carry printable ASCII other than `#` as is; anything else is
/// written `#<decimal>`.
pub fn write_factors(factors: &[Factor]) -> String {
    let mut s = String::new();
    for f in factors {
        match *f {
            Factor::Literal(c) => match char::from_u32(c) {
                Some(ch) if ch.is_ascii_graphic() && ch != '#' => writeln!(s, "L {}", ch),
                _ => writeln!(s, "L #{}", c),
            },
            Factor::Ref { pos, len } => writeln!(s, "F {} {}", pos, len),
        }
        .unwrap();
    }
    s
}

pub fn read_factors(text: &str) -> Result<Vec<Factor>, FormatError> {
    let mut out = Vec::new();
    for (ln, toks) in lines(text) {
        match (toks[0], toks.len()) {
            ("L", 2) => {
                let t = toks[1];
                let c = if let Some(d) = t.strip_prefix('#').filter(|d| !d.is_empty()) {
                    num(ln, d, "symbol")?
                } else {
                    let mut cs = t.chars();
                    match (cs.next(), cs.next()) {
                        (Some(ch), None) => ch as u32,
                        _ => return Err(at(ln, format!("literal `{}` is not one character", t))),
                    }
                };
                out.push(Factor::Literal(c));
            }
            ("F", 3) => {
                let pos: u64 = num(ln, toks[1], "position")?;
                let len: u64 = num(ln, toks[2], "length")?;
                if pos == 0 || len == 0 {
                    return Err(at(ln, "positions and lengths start at 1"));
                }
                out.push(Factor::Ref { pos, len });
            }
            _ => return Err(at(ln, "expected `L <char>` or `F <pos> <len>`")),
        }
    }
    Ok(out)
}

/// Symbols below 256 become single bytes; larger ones their UTF-8 form.
pub fn symbols_to_bytes(s: &[Symbol]) -> Result<Vec<u8>, FormatError> {
    let mut out = Vec::with_capacity(s.len());
    for &c in s {
        if c < 256 {
            out.push(c as u8);
        } else {
            let ch = char::from_u32(c).ok_or_else(|| FormatError::Content(format!("symbol {} is not printable", c)))?;
            let mut buf = [0u8; 4];
            out.extend_from_slice(ch.encode_utf8(&mut buf).as_bytes());
        }
    }
    Ok(out)
}

pub fn bytes_to_symbols(b: &[u8]) -> Vec<Symbol> {
    b.iter().map(|&x| x as Symbol).collect()
}
