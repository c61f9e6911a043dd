//! Recursive-descent parser for the equation mini-language.

use std::collections::BTreeSet;

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::ast::{Atom, Coefficient, EquationAst, Term, Transcendental};
use super::DslError;

/// Parser configuration.
#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Declared parameter names. `None` accepts any identifier as a symbolic
    /// parameter.
    pub declared: Option<BTreeSet<String>>,
    /// Largest derivative order allowed on any path through a term.
    pub max_order: u32,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { declared: None, max_order: 6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Ratio<i64>),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Underscore,
    LParen,
    RParen,
    Equals,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(r) => format!("number {r}"),
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Caret => "'^'".into(),
        Tok::Underscore => "'_'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Equals => "'='".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'^' => Some(Tok::Caret),
            b'_' => Some(Tok::Underscore),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, offset: start });
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let (value, len) = lex_number(&text[i..], start)?;
            out.push(Token { tok: Tok::Num(value), offset: start });
            i += len;
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(text[start..i].to_string()), offset: start });
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(DslError::Syntax { offset: start, message: format!("unexpected character '{ch}'") });
        }
    }
    out.push(Token { tok: Tok::End, offset: text.len() });
    Ok(out)
}

/// Integer, decimal (`0.25`) or ratio (`3/4`) literal.
fn lex_number(s: &str, offset: usize) -> Result<(Ratio<i64>, usize), DslError> {
    let b = s.as_bytes();
    let digits = |from: usize| b[from..].iter().take_while(|c| c.is_ascii_digit()).count();
    let overflow = || DslError::Syntax { offset, message: "numeric literal too large".into() };
    let int_len = digits(0);
    let mut len = int_len;
    let mut numer: i64 = s[..int_len].parse().map_err(|_| overflow())?;
    let mut denom: i64 = 1;
    if len < b.len() && b[len] == b'.' {
        let frac_len = digits(len + 1);
        if frac_len == 0 {
            return Err(DslError::Syntax { offset: offset + len, message: "expected digits after '.'".into() });
        }
        let frac = &s[len + 1..len + 1 + frac_len];
        for ch in frac.bytes() {
            numer = numer.checked_mul(10).and_then(|n| n.checked_add((ch - b'0') as i64)).ok_or_else(overflow)?;
            denom = denom.checked_mul(10).ok_or_else(overflow)?;
        }
        len += 1 + frac_len;
    } else if len + 1 < b.len() && b[len] == b'/' && b[len + 1].is_ascii_digit() {
        let d_len = digits(len + 1);
        denom = s[len + 1..len + 1 + d_len].parse().map_err(|_| overflow())?;
        if denom == 0 {
            return Err(DslError::Syntax { offset: offset + len + 1, message: "zero denominator".into() });
        }
        len += 1 + d_len;
    }
    Ok((Ratio::new(numer, denom), len))
}

/// A factor before it is folded into a term.
struct Factor {
    atoms: Vec<Atom>,
    outer_x: u32,
    trans: Option<Transcendental>,
    offset: usize,
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    opts: &'a ParseOptions,
    used: BTreeSet<String>,
}

pub(crate) fn parse(text: &str, opts: &ParseOptions) -> Result<EquationAst, DslError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, opts, used: BTreeSet::new() };
    let (terms, offsets) = p.equation()?;
    check_time_terms(&terms, &offsets, opts)?;
    Ok(EquationAst { terms, parameters: p.used, source_text: text.to_string() })
}

fn check_time_terms(terms: &[Term], offsets: &[usize], opts: &ParseOptions) -> Result<(), DslError> {
    for (term, &offset) in terms.iter().zip(offsets) {
        if term.max_order() > opts.max_order {
            return Err(DslError::OrderTooHigh { offset, order: term.max_order(), max: opts.max_order });
        }
    }
    let time: Vec<usize> = (0..terms.len()).filter(|&i| terms[i].is_time_term()).collect();
    match time.as_slice() {
        [] => Err(DslError::Unsupported {
            offset: 0,
            message: "equation has no time-derivative term (u_t or u_xt)".into(),
        }),
        [i] => {
            let t = &terms[*i];
            let ok = t.factors.len() == 1
                && t.factors[0].t_order == 1
                && t.factors[0].power == 1
                && t.factors[0].x_order + t.outer_x_order <= 1;
            if ok {
                Ok(())
            } else {
                Err(DslError::Unsupported {
                    offset: offsets[*i],
                    message: "time derivative must appear alone as u_t or u_xt".into(),
                })
            }
        }
        [_, second, ..] => Err(DslError::Unsupported {
            offset: offsets[*second],
            message: "more than one time-derivative term".into(),
        }),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].offset
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expected(&self, what: &str) -> DslError {
        DslError::Syntax { offset: self.offset(), message: format!("expected {what}, found {}", describe(self.peek())) }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), DslError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn equation(&mut self) -> Result<(Vec<Term>, Vec<usize>), DslError> {
        let mut terms = Vec::new();
        let mut offsets = Vec::new();
        let mut negative = false;
        if *self.peek() == Tok::Minus {
            self.bump();
            negative = true;
        }
        loop {
            offsets.push(self.offset());
            let mut term = self.term()?;
            if negative {
                term.coefficient = term.coefficient.negated();
            }
            terms.push(term);
            match self.peek() {
                Tok::Plus => negative = false,
                Tok::Minus => negative = true,
                _ => break,
            }
            self.bump();
        }
        self.expect(Tok::Equals, "'+', '-' or '='")?;
        match self.peek().clone() {
            Tok::Num(r) if r.is_zero() => {
                self.bump();
            }
            _ => return Err(self.expected("'0' on the right-hand side")),
        }
        if *self.peek() != Tok::End {
            return Err(self.expected("end of input"));
        }
        Ok((terms, offsets))
    }

    fn term(&mut self) -> Result<Term, DslError> {
        let mut value = Ratio::one();
        let mut symbol = None;
        if let Tok::Num(r) = self.peek().clone() {
            self.bump();
            value = r;
            if *self.peek() != Tok::Star {
                return Err(self.expected("'*' after coefficient"));
            }
            self.bump();
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if !matches!(name.as_str(), "u" | "sin" | "cos") {
                symbol = Some(self.parameter(&name)?);
                if *self.peek() != Tok::Star {
                    return Err(self.expected("'*' after parameter"));
                }
                self.bump();
            }
        }
        let mut factors = vec![self.factor()?];
        while *self.peek() == Tok::Star {
            self.bump();
            factors.push(self.factor()?);
        }
        assemble(Coefficient { value, symbol }, factors)
    }

    /// Consume a coefficient identifier and check it against the declared set.
    fn parameter(&mut self, name: &str) -> Result<String, DslError> {
        let offset = self.offset();
        match self.peek_at(1) {
            Tok::Underscore => {
                return Err(DslError::Unsupported {
                    offset,
                    message: format!("second dependent variable '{name}'"),
                })
            }
            Tok::LParen => {
                return Err(DslError::Unsupported { offset, message: format!("unsupported function '{name}'") })
            }
            _ => {}
        }
        if name == "x" || name == "t" {
            return Err(DslError::Unsupported {
                offset,
                message: format!("explicit dependence on '{name}' is not supported"),
            });
        }
        if let Some(declared) = &self.opts.declared {
            if !declared.contains(name) {
                return Err(DslError::UndeclaredParameter { offset, name: name.to_string() });
            }
        }
        self.bump();
        self.used.insert(name.to_string());
        Ok(name.to_string())
    }

    fn factor(&mut self) -> Result<Factor, DslError> {
        let offset = self.offset();
        if let Tok::Ident(name) = self.peek().clone() {
            let trans = match name.as_str() {
                "sin" => Some(Transcendental::Sin),
                "cos" => Some(Transcendental::Cos),
                _ => None,
            };
            if let Some(trans) = trans {
                self.bump();
                self.expect(Tok::LParen, "'(' after function name")?;
                match self.peek() {
                    Tok::Ident(u) if u == "u" => {
                        self.bump();
                    }
                    _ => {
                        return Err(DslError::Unsupported {
                            offset: self.offset(),
                            message: format!("{} applies only to a bare u", trans.name()),
                        })
                    }
                }
                self.expect(Tok::RParen, "')'")?;
                return Ok(Factor { atoms: vec![Atom::U], outer_x: 0, trans: Some(trans), offset });
            }
        }
        self.pow()
    }

    fn pow(&mut self) -> Result<Factor, DslError> {
        let mut f = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp_offset = self.offset();
            let n = match self.peek().clone() {
                Tok::Num(r) if r.is_integer() && *r.numer() >= 1 && *r.numer() <= 64 => *r.numer() as u32,
                _ => return Err(self.expected("positive integer exponent")),
            };
            self.bump();
            if f.outer_x > 0 {
                return Err(DslError::Unsupported {
                    offset: exp_offset,
                    message: "power of a differentiated group".into(),
                });
            }
            for a in &mut f.atoms {
                a.power *= n;
            }
        }
        Ok(f)
    }

    fn base(&mut self) -> Result<Factor, DslError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Ident(name) if name == "u" => {
                self.bump();
                let (x, t) = self.subscript()?;
                Ok(Factor { atoms: vec![Atom { x_order: x, t_order: t, power: 1 }], outer_x: 0, trans: None, offset })
            }
            Tok::Ident(name) => {
                let message = if matches!(self.peek_at(1), Tok::Underscore) {
                    format!("second dependent variable '{name}'")
                } else {
                    format!("identifier '{name}' in factor position")
                };
                Err(DslError::Unsupported { offset, message })
            }
            Tok::LParen => {
                self.bump();
                let mut atoms = Vec::new();
                loop {
                    let inner = self.pow()?;
                    if inner.outer_x > 0 {
                        return Err(DslError::Unsupported {
                            offset: inner.offset,
                            message: "nested differentiated groups".into(),
                        });
                    }
                    atoms.extend(inner.atoms);
                    if *self.peek() == Tok::Star {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RParen, "')'")?;
                let sub_offset = self.offset();
                let (x, t) = self.subscript()?;
                if t > 0 {
                    return Err(DslError::Unsupported {
                        offset: sub_offset,
                        message: "time derivative of a group".into(),
                    });
                }
                Ok(Factor { atoms, outer_x: x, trans: None, offset })
            }
            _ => Err(self.expected("'u', '(' or a function")),
        }
    }

    /// Optional `_xt...` subscript; returns (x count, t count).
    fn subscript(&mut self) -> Result<(u32, u32), DslError> {
        if *self.peek() != Tok::Underscore {
            return Ok((0, 0));
        }
        self.bump();
        let offset = self.offset();
        let letters = match self.peek().clone() {
            Tok::Ident(s) => s,
            _ => return Err(self.expected("subscript letters")),
        };
        let mut x = 0;
        let mut t = 0;
        for (i, ch) in letters.chars().enumerate() {
            match ch {
                'x' => x += 1,
                't' => t += 1,
                _ => {
                    return Err(DslError::Syntax {
                        offset: offset + i,
                        message: format!("subscript letter '{ch}' is not x or t"),
                    })
                }
            }
        }
        self.bump();
        Ok((x, t))
    }
}

/// Merge the factors of one term into canonical form.
fn assemble(coefficient: Coefficient, factors: Vec<Factor>) -> Result<Term, DslError> {
    if factors.len() > 1 {
        if let Some(f) = factors.iter().find(|f| f.trans.is_some() || f.outer_x > 0) {
            let message = if f.trans.is_some() {
                "sin/cos must form a term on their own"
            } else {
                "differentiated group multiplied by another factor"
            };
            return Err(DslError::Unsupported { offset: f.offset, message: message.into() });
        }
    }
    let trans = factors[0].trans;
    let outer_x_order = factors[0].outer_x;
    let mut atoms: Vec<Atom> = Vec::new();
    for f in factors {
        for a in f.atoms {
            match atoms.iter_mut().find(|b| b.x_order == a.x_order && b.t_order == a.t_order) {
                Some(b) => b.power += a.power,
                None => atoms.push(a),
            }
        }
    }
    // Canonical order: ascending derivative order, x before t.
    atoms.sort_by_key(|a| (a.x_order + a.t_order, a.t_order));
    Ok(Term { coefficient, factors: atoms, outer_x_order, transcendental: trans })
}
