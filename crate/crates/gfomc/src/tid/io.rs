use std::fmt::Write as _;
use std::path::Path;

use super::Tid;
use crate::exactla::{fmt_rational, parse_rational};
use crate::formula::VarId;
use crate::Error;

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, col: 1, msg: msg.into() }
}

/// Parses a tuple such as `S(u,t1)` or `R(u)`.
fn parse_atom(text: &str, line: usize) -> Result<VarId, Error> {
    let (sym, rest) = text.split_once('(').ok_or_else(|| syntax(line, format!("malformed tuple `{text}`")))?;
    let args = rest.strip_suffix(')').ok_or_else(|| syntax(line, format!("malformed tuple `{text}`")))?;
    if sym.is_empty() || !sym.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(syntax(line, format!("malformed symbol in `{text}`")));
    }
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    match args.as_slice() {
        [a] => Ok(VarId::unary(sym, a)),
        [a, b] => Ok(VarId::binary(sym, a, b)),
        _ => Err(syntax(line, format!("tuple `{text}` must have one or two arguments"))),
    }
}

/// Reads the line-oriented text format:
///
/// ```text
/// domain left: u v
/// domain right: t1
/// default 1
/// tuple S(u,t1) 1/2
/// ```
pub fn parse_tid(text: &str) -> Result<Tid, Error> {
    let mut left = None;
    let mut right = None;
    let mut default = None;
    let mut tuples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("domain left:") {
            left = Some(rest.split_whitespace().map(String::from).collect::<Vec<_>>());
        } else if let Some(rest) = content.strip_prefix("domain right:") {
            right = Some(rest.split_whitespace().map(String::from).collect::<Vec<_>>());
        } else if let Some(rest) = content.strip_prefix("default") {
            default = Some(match rest.trim() {
                "0" => false,
                "1" => true,
                other => return Err(syntax(line, format!("default must be 0 or 1, got `{other}`"))),
            });
        } else if let Some(rest) = content.strip_prefix("tuple") {
            let rest = rest.trim();
            let (atom, p) = rest.rsplit_once(char::is_whitespace).ok_or_else(|| syntax(line, "expected `tuple ATOM PROB`"))?;
            let v = parse_atom(atom.trim(), line)?;
            let p = parse_rational(p).map_err(|_| syntax(line, format!("bad probability `{p}`")))?;
            tuples.push((line, v, p));
        } else {
            return Err(syntax(line, format!("unrecognized line `{content}`")));
        }
    }
    let default = default.ok_or_else(|| syntax(1, "missing `default` line"))?;
    let mut tid = Tid::new(default);
    for c in left.unwrap_or_default() {
        tid.add_left(c)?;
    }
    for c in right.unwrap_or_default() {
        tid.add_right(c)?;
    }
    for (line, v, p) in tuples {
        tid.set(v, p).map_err(|e| syntax(line, e.to_string()))?;
    }
    Ok(tid)
}

pub fn read_tid(path: &Path) -> Result<Tid, Error> {
    parse_tid(&std::fs::read_to_string(path)?)
}

/// Canonical text: tuples sorted, those equal to the default omitted.
pub fn write_tid(tid: &Tid) -> String {
    let tid = tid.canonical();
    let mut out = String::new();
    let _ = writeln!(out, "domain left: {}", tid.left.join(" "));
    let _ = writeln!(out, "domain right: {}", tid.right.join(" "));
    let _ = writeln!(out, "default {}", u8::from(tid.default));
    for (v, p) in &tid.probs {
        let _ = writeln!(out, "tuple {v} {}", fmt_rational(p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{half, rat};

    const SMALL: &str = "# two tuples\ndomain left: a\ndomain right: b\ndefault 1\ntuple S(a,b) 1/2\ntuple R(a) 1/3\n";

    #[test]
    fn parses_and_round_trips() {
        let t = parse_tid(SMALL).unwrap();
        assert_eq!(t.prob(&VarId::binary("S", "a", "b")), half());
        assert_eq!(t.prob(&VarId::unary("R", "a")), rat(1, 3));
        assert_eq!(parse_tid(&write_tid(&t)).unwrap(), t);
        assert_eq!(write_tid(&parse_tid(&write_tid(&t)).unwrap()), write_tid(&t));
    }

    #[test]
    fn errors() {
        assert!(parse_tid("domain left: a\ndomain right: b\ntuple S(a,b) 1/2\n").is_err());
        assert!(parse_tid("domain left: a\ndomain right: b\ndefault 1\ntuple S(a,c) 1/2\n").is_err());
        assert!(parse_tid("domain left: a\ndomain right: b\ndefault 1\ntuple S(a,b) 3/2\n").is_err());
        assert!(parse_tid("domain left: a\ndefault 2\n").is_err());
        assert!(parse_tid("domain left: a\ndefault 1\nbogus\n").is_err());
    }
}
