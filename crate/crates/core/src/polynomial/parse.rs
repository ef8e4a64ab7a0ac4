//! Text input: `;`-terminated polynomials, `#` comments, optional
//! `vars:` header fixing the variable order.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Coefficient, GaussianRational, LaurentPoly, LaurentSystem};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Semi,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, column, message: message.into() }
}

fn is_imaginary_unit(name: &str) -> bool {
    name == "i" || name == "I"
}

/// Exact value of a decimal literal such as `12`, `0.25` or `1.5e-3`.
fn decimal_value(text: &str) -> Option<BigRational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(k) => (&text[..k], text[k + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int, frac) = match mantissa.find('.') {
        Some(k) => (&mantissa[..k], &mantissa[k + 1..]),
        None => (mantissa, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    })
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut k = 0;
        while k < chars.len() {
            let c = chars[k];
            let (line, column) = (ln + 1, k + 1);
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                k += 1;
                continue;
            }
            let simple = match c {
                '+' => Some(Tok::Plus),
                '-' | '\u{2212}' => Some(Tok::Minus),
                '*' => Some(Tok::Star),
                '/' => Some(Tok::Slash),
                '^' => Some(Tok::Caret),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ';' => Some(Tok::Semi),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token { tok, line, column });
                k += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = k;
                while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                    k += 1;
                }
                if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                    let mut j = k + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        k = j;
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                    }
                }
                let lit: String = chars[start..k].iter().collect();
                let v = decimal_value(&lit)
                    .ok_or_else(|| syntax(line, column, format!("bad number '{lit}'")))?;
                out.push(Token { tok: Tok::Num(v), line, column });
            } else if c.is_alphabetic() || c == '_' {
                let start = k;
                while k < chars.len() && (chars[k].is_alphanumeric() || chars[k] == '_') {
                    k += 1;
                }
                let name: String = chars[start..k].iter().collect();
                out.push(Token { tok: Tok::Ident(name), line, column });
            } else {
                return Err(syntax(line, column, format!("unexpected character '{c}'")));
            }
        }
    }
    Ok(out)
}

/// Splits off a leading `vars:` header line, blanking it in the returned text
/// so that line numbers stay valid.
fn split_header(text: &str) -> Result<(Option<Vec<String>>, String)> {
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    for (ln, line) in lines.iter_mut().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(rest) = t.strip_prefix("vars:") {
            let rest = rest.split('#').next().unwrap_or("");
            let names: Vec<String> = rest
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            for (k, n) in names.iter().enumerate() {
                let ok = n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                    && n.chars().all(|c| c.is_alphanumeric() || c == '_');
                if !ok {
                    return Err(syntax(ln + 1, 1, format!("bad variable name '{n}'")));
                }
                if names[..k].contains(n) {
                    return Err(Error::InconsistentVariables(format!("'{n}' declared twice")));
                }
            }
            *line = String::new();
            return Ok((Some(names), lines.join("\n")));
        }
        break;
    }
    Ok((None, text.to_string()))
}

/// Orders undeclared variables: by index when every name is `x<k>`,
/// otherwise by first appearance.
fn infer_names(tokens: &[Token]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for t in tokens {
        if let Tok::Ident(n) = &t.tok {
            if !is_imaginary_unit(n) && !names.contains(n) {
                names.push(n.clone());
            }
        }
    }
    let index = |n: &str| -> Option<u64> {
        let d = n.strip_prefix('x')?;
        if d.is_empty() || !d.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        d.parse().ok()
    };
    if names.iter().all(|n| index(n).is_some()) {
        names.sort_by_key(|n| index(n));
    }
    names
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    vars: HashMap<&'a str, usize>,
    nvars: usize,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.column))
    }

    fn err(&self, message: impl Into<String>) -> Error {
        let (l, c) = self.here();
        syntax(l, c, message)
    }

    fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.tok);
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn constant(&self, c: Coefficient) -> LaurentPoly {
        LaurentPoly::constant(self.nvars, c)
    }

    fn expr(&mut self) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::zero(self.nvars);
        let mut first = true;
        loop {
            let negate = match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    false
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let t = self.term()?;
            acc = if negate { acc.sub(&t) } else { acc.add(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LaurentPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = acc.mul(&f)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let f = self.power()?;
                    let inv = invert_monomial(&f).ok_or_else(|| {
                        self.err("division is only allowed by a nonzero monomial")
                    })?;
                    acc = acc.mul(&inv)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn integer(&mut self) -> Result<i64> {
        let negative = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                true
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        match self.bump() {
            Some(Tok::Num(r)) if r.is_integer() => {
                let k: i64 = r
                    .to_integer()
                    .try_into()
                    .map_err(|_| Error::ExponentOverflow)?;
                Ok(if negative { -k } else { k })
            }
            _ => {
                self.pos -= 1;
                Err(self.err("expected an integer exponent"))
            }
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let k = self.integer()?;
            self.expect(Tok::RParen, "')'")?;
            Ok(k)
        } else {
            self.integer()
        }
    }

    fn power(&mut self) -> Result<LaurentPoly> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.here();
        let k = self.exponent()?;
        let base = if k < 0 {
            invert_monomial(&base)
                .ok_or_else(|| syntax(at.0, at.1, "negative power of a non-monomial"))?
        } else {
            base
        };
        let mut acc = self.constant(Coefficient::one());
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<LaurentPoly> {
        let (line, column) = self.here();
        match self.bump() {
            Some(Tok::Num(r)) => Ok(self.constant(Coefficient::from_rational(r.clone()))),
            Some(Tok::Ident(name)) => {
                if let Some(&k) = self.vars.get(name.as_str()) {
                    Ok(LaurentPoly::variable(self.nvars, k))
                } else if is_imaginary_unit(name) {
                    Ok(self.constant(Coefficient::from_exact(GaussianRational::new(
                        BigRational::zero(),
                        BigRational::one(),
                    ))))
                } else {
                    Err(Error::InconsistentVariables(format!(
                        "undeclared variable '{name}' at line {line}, column {column}"
                    )))
                }
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => Err(syntax(line, column, "expected a number, variable or '('")),
        }
    }
}

fn invert_monomial(p: &LaurentPoly) -> Option<LaurentPoly> {
    if p.num_terms() != 1 {
        return None;
    }
    let (e, c) = p.terms().next()?;
    let neg: Vec<i64> = e.iter().map(|x| -x).collect();
    Some(LaurentPoly::monomial(neg, c.inv()?))
}

fn parser<'a>(toks: &'a [Token], names: &'a [String], text: &str) -> Parser<'a> {
    let vars = names.iter().enumerate().map(|(k, n)| (n.as_str(), k)).collect();
    let nlines = text.lines().count().max(1);
    let lastcol = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    Parser { toks, pos: 0, vars, nvars: names.len(), end: (nlines, lastcol) }
}

/// Parses a system; every polynomial must end with `;`.
pub fn parse_system(text: &str) -> Result<LaurentSystem> {
    let (header, body) = split_header(text)?;
    let toks = tokenize(&body)?;
    let names = header.unwrap_or_else(|| infer_names(&toks));
    let mut p = parser(&toks, &names, &body);
    let mut polys = Vec::new();
    while p.peek().is_some() {
        if p.peek() == Some(&Tok::Semi) {
            return Err(p.err("empty statement"));
        }
        let f = p.expr()?;
        p.expect(Tok::Semi, "'+', '-', '*' or ';'")?;
        if f.is_zero() {
            return Err(Error::ZeroEquation);
        }
        polys.push(f);
    }
    if polys.is_empty() {
        return Err(Error::EmptyInput);
    }
    LaurentSystem::new(polys, names)
}

/// Parses one polynomial in the given variables (a trailing `;` is allowed).
pub fn parse_polynomial(text: &str, names: &[String]) -> Result<LaurentPoly> {
    let toks = tokenize(text)?;
    let mut p = parser(&toks, names, text);
    let f = p.expr()?;
    if p.peek() == Some(&Tok::Semi) {
        p.pos += 1;
    }
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CYCLIC4: &str = "# cyclic 4-roots
x1 + x2 + x3 + x4;
x1*x2 + x2*x3 + x3*x4 + x4*x1;
x1*x2*x3 + x2*x3*x4 + x3*x4*x1 + x4*x1*x2;
x1*x2*x3*x4 - 1;
";

    #[test]
    fn binomial_line() {
        let s = parse_system("x1*x2^2*x3 - 2*x1^2*x2^3*x3;").unwrap();
        assert_eq!(s.len(), 1);
        let f = &s.polys()[0];
        assert_eq!(f.num_terms(), 2);
        assert_eq!(f.coefficient(&[1, 2, 1]), Some(&Coefficient::one()));
        assert_eq!(f.coefficient(&[2, 3, 1]), Some(&Coefficient::from_i64(-2)));
    }

    #[test]
    fn zero_equation_rejected() {
        assert_eq!(parse_system("x1 - x1;"), Err(Error::ZeroEquation));
    }

    #[test]
    fn cyclic4_supports() {
        let s = parse_system(CYCLIC4).unwrap();
        let sizes: Vec<usize> = s.supports().iter().map(|a| a.len()).collect();
        assert_eq!(sizes, vec![4, 4, 4, 2]);
        assert_eq!(s.names(), &["x1", "x2", "x3", "x4"]);
    }

    #[test]
    fn literals() {
        let names = vec!["y".to_string()];
        let p = parse_polynomial("(1/2 - 3*i)*y^-2 + 0.25 + 1.5e-1*y", &names).unwrap();
        assert_eq!(p.coefficient(&[-2]), Some(&Coefficient::gaussian((1, 2), (-3, 1))));
        assert_eq!(p.coefficient(&[0]), Some(&Coefficient::from_ratio(1, 4)));
        assert_eq!(p.coefficient(&[1]), Some(&Coefficient::from_ratio(3, 20)));
        let q = parse_polynomial("y^(-1)/2 - I*y", &names).unwrap();
        assert_eq!(q.coefficient(&[-1]), Some(&Coefficient::from_ratio(1, 2)));
        assert_eq!(q.coefficient(&[1]), Some(&Coefficient::gaussian((0, 1), (-1, 1))));
    }

    #[test]
    fn header_fixes_order() {
        let s = parse_system("# c\nvars: b a c\na*b + c;\n").unwrap();
        assert_eq!(s.names(), &["b", "a", "c"]);
        assert_eq!(s.polys()[0].coefficient(&[1, 1, 0]), Some(&Coefficient::one()));
        assert!(matches!(
            parse_system("vars: a\na + b;"),
            Err(Error::InconsistentVariables(_))
        ));
        let s = parse_system("x10 + x2;").unwrap();
        assert_eq!(s.names(), &["x2", "x10"]);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_system("x1 + x2;\nx1 * * x2;") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 6)),
            other => panic!("{other:?}"),
        }
        match parse_system("x1 + $;") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 6)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_system("x1 + x2"), Err(Error::Syntax { .. })));
        assert_eq!(parse_system("# nothing\n"), Err(Error::EmptyInput));
    }
}
