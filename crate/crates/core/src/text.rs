//! Text grammars.
//!
//! * Groups: `F2 * C3`, `C2 * C3`, `Z * Z/3`, or with names `F2(x,y) * C3(b)`.
//! * Words: space separated letters, `x1 x2^-1 y1^2`, optional groups `(x1 y1)^3`.
//! * Chains: `3[x1 y1] - 2[y1 x1 y1^2] + 1/2[x2]`.
//! * Orbifolds: `orb(orientable=true, genus=0, boundary=1, cones=[2,3])`.
//!
//! Without declared names the generators are `x1..xm` and `y1..yn`; single
//! letter shorthands `x y z w` (free, at most four) and `a..h` (torsion, at
//! most eight) are accepted as well. With declared names only those are used.

use std::fmt;

use num_bigint::BigInt;

use crate::chain::Chain;
use crate::group::{GroupSpec, Letter, Word};
use crate::orbifold::OrbifoldSpec;
use crate::rational::{fmt_q, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UndeclaredGenerator,
    ExponentOutOfRange,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Character offset into the input.
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.pos + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(kind: ParseErrorKind, pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { kind, pos, message: message.into() })
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, _src: src }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    /// Next char without skipping whitespace.
    fn peek_raw(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            err(ParseErrorKind::Syntax, self.pos, format!("expected '{c}'"))
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn ident(&mut self) -> Option<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        match self.peek_raw() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return None,
        }
        while let Some(c) = self.peek_raw() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some((start, self.chars[start..self.pos].iter().collect()))
    }

    fn digits(&mut self) -> Option<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek_raw() {
            if c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            None
        } else {
            Some((start, self.chars[start..self.pos].iter().collect()))
        }
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let Some((p, d)) = self.digits() else {
            return err(ParseErrorKind::Syntax, start, "expected an integer");
        };
        let v: i64 = d.parse().or_else(|_| err(ParseErrorKind::Invalid, p, "integer too large"))?;
        Ok(if neg { -v } else { v })
    }

    fn unsigned(&mut self) -> Result<u64, ParseError> {
        let Some((p, d)) = self.digits() else {
            return err(ParseErrorKind::Syntax, self.pos, "expected a non-negative integer");
        };
        d.parse().or_else(|_| err(ParseErrorKind::Invalid, p, "integer too large"))
    }
}

pub fn parse_group(text: &str) -> Result<GroupSpec, ParseError> {
    let mut c = Cursor::new(text);
    let mut free_names: Vec<String> = Vec::new();
    let mut torsion_names: Vec<String> = Vec::new();
    let mut free_rank = 0usize;
    let mut orders: Vec<u32> = Vec::new();
    let mut named: Option<bool> = None;
    loop {
        let Some((p, id)) = c.ident() else {
            return err(ParseErrorKind::Syntax, c.pos, "expected a factor such as F2, C3, Z or Z/3");
        };
        let (is_free, count) = match id.as_str() {
            "Z" => {
                if c.eat('/') {
                    let o = c.unsigned()?;
                    (false, o)
                } else {
                    (true, 1)
                }
            }
            s if s.starts_with('F') && s.len() > 1 && s[1..].chars().all(|ch| ch.is_ascii_digit()) => {
                (true, s[1..].parse().unwrap_or(u64::MAX))
            }
            s if s.starts_with('C') && s.len() > 1 && s[1..].chars().all(|ch| ch.is_ascii_digit()) => {
                (false, s[1..].parse().unwrap_or(u64::MAX))
            }
            _ => return err(ParseErrorKind::Syntax, p, format!("unknown factor {id:?}")),
        };
        if !is_free && !(2..=u32::MAX as u64).contains(&count) {
            return err(ParseErrorKind::Invalid, p, "cyclic factor order must be at least 2");
        }
        if is_free && count > 1 << 16 {
            return err(ParseErrorKind::Invalid, p, "free rank too large");
        }
        let names = if c.peek() == Some('(') {
            c.pos += 1;
            let mut v = Vec::new();
            loop {
                let Some((_, n)) = c.ident() else {
                    return err(ParseErrorKind::Syntax, c.pos, "expected a generator name");
                };
                v.push(n);
                if c.eat(')') {
                    break;
                }
                c.expect(',')?;
            }
            Some(v)
        } else {
            None
        };
        match (named, names.is_some()) {
            (Some(a), b) if a != b => {
                return err(ParseErrorKind::Syntax, p, "either name every factor or none");
            }
            _ => named = Some(names.is_some()),
        }
        let expected = if is_free { count as usize } else { 1 };
        if let Some(v) = names {
            if v.len() != expected {
                return err(ParseErrorKind::Invalid, p, format!("{id} needs {expected} name(s)"));
            }
            if is_free {
                free_names.extend(v);
            } else {
                torsion_names.extend(v);
            }
        }
        if is_free {
            free_rank += count as usize;
        } else {
            orders.push(count as u32);
        }
        if c.at_end() {
            break;
        }
        c.expect('*')?;
    }
    let g = GroupSpec::new(free_rank, orders).map_err(|e| ParseError {
        kind: ParseErrorKind::Invalid,
        pos: 0,
        message: e.to_string(),
    })?;
    if named == Some(true) {
        free_names.extend(torsion_names);
        return g.with_names(free_names).map_err(|e| ParseError {
            kind: ParseErrorKind::Invalid,
            pos: 0,
            message: e.to_string(),
        });
    }
    Ok(g)
}

/// Which generator a name refers to: `(is_free, index)`.
pub fn resolve_name(group: &GroupSpec, name: &str) -> Option<(bool, usize)> {
    let m = group.free_rank();
    let n = group.torsion_orders().len();
    if let Some(names) = group.declared_names() {
        let i = names.iter().position(|s| s == name)?;
        return Some(if i < m { (true, i) } else { (false, i - m) });
    }
    let indexed = |prefix: char| -> Option<usize> {
        let rest = name.strip_prefix(prefix)?;
        if rest.is_empty() || rest.starts_with('0') || !rest.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        rest.parse::<usize>().ok().map(|i| i - 1)
    };
    if let Some(i) = indexed('x') {
        return (i < m).then_some((true, i));
    }
    if let Some(i) = indexed('y') {
        return (i < n).then_some((false, i));
    }
    const FREE: [&str; 4] = ["x", "y", "z", "w"];
    const TORSION: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
    if m <= FREE.len() {
        if let Some(i) = FREE.iter().position(|s| *s == name) {
            return (i < m).then_some((true, i));
        }
    }
    if n <= TORSION.len() {
        if let Some(i) = TORSION.iter().position(|s| *s == name) {
            return (i < n).then_some((false, i));
        }
    }
    None
}

fn parse_exponent(c: &mut Cursor) -> Result<Option<i64>, ParseError> {
    if c.peek_raw() == Some('⁻') {
        let p = c.pos;
        c.pos += 1;
        if c.peek_raw() == Some('¹') {
            c.pos += 1;
            return Ok(Some(-1));
        }
        return err(ParseErrorKind::Syntax, p, "expected ⁻¹");
    }
    if c.peek_raw() == Some('²') {
        c.pos += 1;
        return Ok(Some(2));
    }
    if c.peek_raw() == Some('^') {
        c.pos += 1;
        return Ok(Some(c.signed_int()?));
    }
    Ok(None)
}

fn parse_letters(c: &mut Cursor, group: &GroupSpec, depth: usize, out: &mut Vec<Letter>) -> Result<(), ParseError> {
    loop {
        match c.peek() {
            None => return Ok(()),
            Some(')') | Some(']') => return Ok(()),
            Some('(') => {
                let open = c.pos;
                c.pos += 1;
                let mut inner = Vec::new();
                parse_letters(c, group, depth + 1, &mut inner)?;
                if !c.eat(')') {
                    return err(ParseErrorKind::Syntax, open, "unclosed '('");
                }
                let k = parse_exponent(c)?.unwrap_or(1);
                let w = group.reduce_unchecked(&inner);
                let p = group.power(&w, k);
                out.extend_from_slice(p.letters());
            }
            Some('1') if depth == 0 && out.is_empty() => {
                // "1" denotes the identity.
                let p = c.pos;
                c.pos += 1;
                if !c.at_end() {
                    return err(ParseErrorKind::Syntax, p, "unexpected input after identity '1'");
                }
            }
            Some(_) => {
                let Some((p, name)) = c.ident() else {
                    return err(ParseErrorKind::Syntax, c.pos, "expected a generator");
                };
                let Some((is_free, idx)) = resolve_name(group, &name) else {
                    return err(ParseErrorKind::UndeclaredGenerator, p, format!("undeclared generator {name:?}"));
                };
                let e = parse_exponent(c)?;
                if is_free {
                    let k = e.unwrap_or(1);
                    if k.unsigned_abs() > 1 << 20 {
                        return err(ParseErrorKind::Invalid, p, "exponent too large");
                    }
                    let l = if k < 0 { Letter::x_inv(idx) } else { Letter::x(idx) };
                    for _ in 0..k.unsigned_abs() {
                        out.push(l);
                    }
                } else {
                    let o = group.order_of(idx) as i64;
                    let k = e.unwrap_or(1);
                    if !(1..o).contains(&k) {
                        return err(
                            ParseErrorKind::ExponentOutOfRange,
                            p,
                            format!("exponent of {name} must lie in 1..{}", o - 1),
                        );
                    }
                    out.push(Letter::y(idx, k as u32));
                }
            }
        }
    }
}

/// Parses and reduces a word.
pub fn parse_word(text: &str, group: &GroupSpec) -> Result<Word, ParseError> {
    let mut c = Cursor::new(text);
    let mut letters = Vec::new();
    parse_letters(&mut c, group, 0, &mut letters)?;
    if !c.at_end() {
        return err(ParseErrorKind::Syntax, c.pos, "unexpected character");
    }
    Ok(group.reduce_unchecked(&letters))
}

fn parse_coefficient(c: &mut Cursor) -> Result<Option<Q>, ParseError> {
    let Some((p, n)) = c.digits() else {
        return Ok(None);
    };
    let num: BigInt = n.parse().expect("digits");
    if c.eat('/') {
        let Some((q, d)) = c.digits() else {
            return err(ParseErrorKind::Syntax, c.pos, "expected a denominator");
        };
        let den: BigInt = d.parse().expect("digits");
        if den == BigInt::from(0) {
            return err(ParseErrorKind::Invalid, q, "zero denominator");
        }
        return Ok(Some(Q::new(num, den)));
    }
    let _ = p;
    Ok(Some(Q::from_integer(num)))
}

/// Parses a chain; terms are kept as written (only zero coefficients are dropped).
pub fn parse_chain(text: &str, group: &GroupSpec) -> Result<Chain, ParseError> {
    let mut c = Cursor::new(text);
    let mut terms = Vec::new();
    let mut first = true;
    while !c.at_end() {
        let mut sign = 1i64;
        if c.eat('-') {
            sign = -1;
        } else if !c.eat('+') && !first {
            return err(ParseErrorKind::Syntax, c.pos, "expected '+' or '-' between terms");
        }
        first = false;
        let coef = parse_coefficient(&mut c)?.unwrap_or_else(|| Q::from_integer(1.into()));
        c.eat('*');
        let open = c.pos;
        c.expect('[')?;
        let mut letters = Vec::new();
        parse_letters(&mut c, group, 1, &mut letters)?;
        if !c.eat(']') {
            return err(ParseErrorKind::Syntax, open, "unclosed '['");
        }
        terms.push((coef * Q::from_integer(sign.into()), group.reduce_unchecked(&letters)));
    }
    Ok(Chain::new(terms))
}

pub fn format_chain(group: &GroupSpec, chain: &Chain) -> String {
    if chain.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (c, w)) in chain.terms().iter().enumerate() {
        let neg = c < &Q::from_integer(0.into());
        let a = if neg { -c.clone() } else { c.clone() };
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if a != Q::from_integer(1.into()) {
            s.push_str(&fmt_q(&a));
        }
        s.push('[');
        s.push_str(&group.format_word(w));
        s.push(']');
    }
    s
}

pub fn parse_orbifold(text: &str) -> Result<OrbifoldSpec, ParseError> {
    let mut c = Cursor::new(text);
    match c.ident() {
        Some((_, id)) if id == "orb" => {}
        _ => return err(ParseErrorKind::Syntax, 0, "expected 'orb('"),
    }
    c.expect('(')?;
    let mut orientable = true;
    let mut genus = 0u64;
    let mut boundary = 0u64;
    let mut cones: Vec<u32> = Vec::new();
    let mut seen: Vec<String> = Vec::new();
    if !c.eat(')') {
        loop {
            let Some((p, key)) = c.ident() else {
                return err(ParseErrorKind::Syntax, c.pos, "expected a key");
            };
            if seen.contains(&key) {
                return err(ParseErrorKind::Syntax, p, format!("duplicate key {key}"));
            }
            c.expect('=')?;
            match key.as_str() {
                "orientable" => match c.ident() {
                    Some((_, v)) if v == "true" => orientable = true,
                    Some((_, v)) if v == "false" => orientable = false,
                    _ => return err(ParseErrorKind::Syntax, c.pos, "expected true or false"),
                },
                "genus" => genus = c.unsigned()?,
                "boundary" => boundary = c.unsigned()?,
                "cones" => {
                    c.expect('[')?;
                    if !c.eat(']') {
                        loop {
                            let q = c.pos;
                            let o = c.unsigned()?;
                            if !(2..=u32::MAX as u64).contains(&o) {
                                return err(ParseErrorKind::Invalid, q, "cone orders must be at least 2");
                            }
                            cones.push(o as u32);
                            if c.eat(']') {
                                break;
                            }
                            c.expect(',')?;
                        }
                    }
                }
                _ => return err(ParseErrorKind::Syntax, p, format!("unknown key {key}")),
            }
            seen.push(key);
            if c.eat(')') {
                break;
            }
            c.expect(',')?;
        }
    }
    if !c.at_end() {
        return err(ParseErrorKind::Syntax, c.pos, "unexpected input after ')'");
    }
    if genus > 1 << 16 || boundary > 1 << 16 {
        return err(ParseErrorKind::Invalid, 0, "genus or boundary count too large");
    }
    OrbifoldSpec::new(orientable, genus as usize, boundary as usize, cones).map_err(|e| ParseError {
        kind: ParseErrorKind::Invalid,
        pos: 0,
        message: e.to_string(),
    })
}

pub fn format_orbifold(o: &OrbifoldSpec) -> String {
    let cones: Vec<String> = o.cone_orders().iter().map(|c| c.to_string()).collect();
    format!(
        "orb(orientable={}, genus={}, boundary={}, cones=[{}])",
        o.orientable(),
        o.genus(),
        o.boundary_components(),
        cones.join(",")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn groups() {
        let g = parse_group("F2 * C3").unwrap();
        assert_eq!((g.free_rank(), g.torsion_orders()), (2, &[3u32][..]));
        let g = parse_group("Z/2*Z/3").unwrap();
        assert_eq!((g.free_rank(), g.torsion_orders()), (0, &[2u32, 3][..]));
        let g = parse_group("Z * Z/3").unwrap();
        assert_eq!((g.free_rank(), g.torsion_orders()), (1, &[3u32][..]));
        let g = parse_group("F2(p,q) * C5(r)").unwrap();
        assert_eq!(g.to_string(), "F2(p,q) * C5(r)");
        assert!(parse_group("F2 * C1").is_err());
        assert!(parse_group("F2 *").is_err());
        assert!(parse_group("F1(x) * C3").is_err());
    }

    #[test]
    fn words() {
        let g = parse_group("C2 * C3").unwrap();
        assert_eq!(g.format_word(&parse_word("a b b", &g).unwrap()), "y1 y2^2");
        assert_eq!(g.format_word(&parse_word("(a b)^3", &g).unwrap()), "y1 y2 y1 y2 y1 y2");
        assert_eq!(g.format_word(&parse_word("(a b)^-1", &g).unwrap()), "y2^2 y1");
        let e = parse_word("a b^3", &g).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ExponentOutOfRange);
        assert_eq!(e.pos, 2);
        let e = parse_word("a q", &g).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredGenerator);
        let f = parse_group("F2").unwrap();
        assert_eq!(f.format_word(&parse_word("x^3 y x⁻¹", &f).unwrap()), "x1 x1 x1 x2 x1^-1");
        assert_eq!(parse_word("", &f).unwrap(), Word::empty());
        assert_eq!(parse_word("1", &f).unwrap(), Word::empty());
    }

    #[test]
    fn declared_names_only() {
        let g = parse_group("F1(t) * C3(s)").unwrap();
        assert!(parse_word("x1", &g).is_err());
        assert_eq!(g.format_word(&parse_word("s t s^2", &g).unwrap()), "s t s^2");
    }

    #[test]
    fn chains() {
        let g = parse_group("F2 * C2").unwrap();
        let c = parse_chain("3[x1 y1] - 1/2[y1]", &g).unwrap();
        assert_eq!(c.terms().len(), 2);
        assert_eq!(c.terms()[0].0, int(3));
        assert_eq!(c.terms()[1].0, frac(-1, 2));
        assert_eq!(format_chain(&g, &c), "3[x1 y1] - 1/2[y1]");
        assert!(parse_chain("3[x1] 2[x2]", &g).is_err());
        assert!(parse_chain("[x1", &g).is_err());
        assert_eq!(format_chain(&g, &parse_chain("", &g).unwrap()), "0");
    }

    #[test]
    fn orbifolds() {
        let o = parse_orbifold("orb(orientable=true, genus=0, boundary=1, cones=[2,3])").unwrap();
        assert_eq!(format_orbifold(&o), "orb(orientable=true, genus=0, boundary=1, cones=[2,3])");
        assert!(parse_orbifold("orb(orientable=false, genus=0)").is_err());
        assert!(parse_orbifold("orb(genus=1, genus=2)").is_err());
        assert!(parse_orbifold("orb(cones=[1])").is_err());
    }
}
