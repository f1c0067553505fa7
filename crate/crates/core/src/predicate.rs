//! Predicates over input counts: linear threshold atoms, modular atoms and
//! boolean combinations of them.
//!
//! Textual form, as accepted by [`Predicate::parse`]:
//!
//! ```text
//! count(sigma) >= 2
//! count(sigma) >= count(tau)
//! count(one) mod 2 == 1
//! not (count(a) + 2*count(b) < 3 or count(c) == 0)
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{InputMultiset, SymbolId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Ge,
    Eq,
    Le,
}

impl Relation {
    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Eq => "==",
            Relation::Le => "<=",
        }
    }
}

/// A predicate on input multisets.
///
/// `Threshold` holds when `Σ coefficients[σ]·x.σ  relation  constant`;
/// `Mod` holds when `Σ coefficients[σ]·x.σ ≡ remainder (mod modulus)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Predicate {
    Threshold {
        coefficients: BTreeMap<SymbolId, i64>,
        constant: i64,
        relation: Relation,
    },
    Mod {
        coefficients: BTreeMap<SymbolId, i64>,
        remainder: i64,
        modulus: i64,
    },
    Not(Box<Predicate>),
    And(Vec<Predicate>),
    Or(Vec<Predicate>),
}

impl Predicate {
    /// `[x.symbol >= k]`
    pub fn at_least(symbol: SymbolId, k: i64) -> Self {
        Predicate::Threshold {
            coefficients: BTreeMap::from([(symbol, 1)]),
            constant: k,
            relation: Relation::Ge,
        }
    }

    /// `[x.symbol == k]`
    pub fn exactly(symbol: SymbolId, k: i64) -> Self {
        Predicate::Threshold {
            coefficients: BTreeMap::from([(symbol, 1)]),
            constant: k,
            relation: Relation::Eq,
        }
    }

    /// `[x.a >= x.b]`
    pub fn at_least_as_many(a: SymbolId, b: SymbolId) -> Self {
        Predicate::Threshold {
            coefficients: BTreeMap::from([(a, 1), (b, -1)]),
            constant: 0,
            relation: Relation::Ge,
        }
    }

    /// `[x.symbol ≡ remainder (mod modulus)]`
    pub fn modulo(symbol: SymbolId, remainder: i64, modulus: i64) -> Self {
        Predicate::Mod {
            coefficients: BTreeMap::from([(symbol, 1)]),
            remainder: remainder.rem_euclid(modulus),
            modulus,
        }
    }

    pub fn evaluate(&self, x: &InputMultiset) -> bool {
        let linear = |coefficients: &BTreeMap<SymbolId, i64>| -> i64 {
            coefficients
                .iter()
                .map(|(&s, &c)| c * x.count(s) as i64)
                .sum()
        };
        match self {
            Predicate::Threshold {
                coefficients,
                constant,
                relation,
            } => relation.holds(linear(coefficients), *constant),
            Predicate::Mod {
                coefficients,
                remainder,
                modulus,
            } => linear(coefficients).rem_euclid(*modulus) == remainder.rem_euclid(*modulus),
            Predicate::Not(inner) => !inner.evaluate(x),
            Predicate::And(children) => children.iter().all(|c| c.evaluate(x)),
            Predicate::Or(children) => children.iter().any(|c| c.evaluate(x)),
        }
    }

    /// Parses the textual form, resolving `count(name)` against `symbols`.
    pub fn parse(text: &str, symbols: &[String]) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            symbols,
        };
        let pred = parser.disjunction()?;
        if parser.pos != parser.tokens.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(pred)
    }

    pub fn display<'a>(&'a self, symbols: &'a [String]) -> impl fmt::Display + 'a {
        DisplayPredicate { pred: self, symbols }
    }
}

struct DisplayPredicate<'a> {
    pred: &'a Predicate,
    symbols: &'a [String],
}

impl DisplayPredicate<'_> {
    fn linear(&self, f: &mut fmt::Formatter<'_>, coefficients: &BTreeMap<SymbolId, i64>) -> fmt::Result {
        let mut first = true;
        for (&s, &c) in coefficients.iter().filter(|(_, &c)| c != 0) {
            let name = &self.symbols[s.index()];
            let magnitude = c.abs();
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            first = false;
            if magnitude == 1 {
                write!(f, "count({name})")?;
            } else {
                write!(f, "{magnitude}*count({name})")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }

    fn child(&self, pred: &Predicate) -> String {
        let inner = DisplayPredicate {
            pred,
            symbols: self.symbols,
        }
        .to_string();
        match pred {
            Predicate::And(_) | Predicate::Or(_) => format!("({inner})"),
            _ => inner,
        }
    }
}

impl fmt::Display for DisplayPredicate<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pred {
            Predicate::Threshold {
                coefficients,
                constant,
                relation,
            } => {
                self.linear(f, coefficients)?;
                write!(f, " {} {}", relation.symbol(), constant)
            }
            Predicate::Mod {
                coefficients,
                remainder,
                modulus,
            } => {
                self.linear(f, coefficients)?;
                write!(f, " mod {modulus} == {remainder}")
            }
            Predicate::Not(inner) => {
                let text = self.child(inner);
                match **inner {
                    Predicate::Threshold { .. } | Predicate::Mod { .. } => write!(f, "not ({text})"),
                    _ => write!(f, "not {text}"),
                }
            }
            Predicate::And(children) | Predicate::Or(children) => {
                let sep = if matches!(self.pred, Predicate::And(_)) {
                    " and "
                } else {
                    " or "
                };
                let parts: Vec<String> = children.iter().map(|c| self.child(c)).collect();
                f.write_str(&parts.join(sep))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Cmp(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '(' => out.push((start, Token::LParen)),
            ')' => out.push((start, Token::RParen)),
            '+' => out.push((start, Token::Plus)),
            '-' => out.push((start, Token::Minus)),
            '*' => out.push((start, Token::Star)),
            '>' | '<' | '=' | '!' => {
                let two = text.get(i..i + 2).unwrap_or("");
                let op = match two {
                    ">=" => ">=",
                    "<=" => "<=",
                    "==" => "==",
                    "!=" => "!=",
                    _ => match c {
                        '>' => ">",
                        '<' => "<",
                        '=' => "==",
                        _ => {
                            return Err(Error::invalid(format!(
                                "predicate: unexpected `!` at column {}",
                                start + 1
                            )))
                        }
                    },
                };
                i += if op.len() == 2 && two == op { 2 } else { 1 };
                out.push((start, Token::Cmp(op)));
                continue;
            }
            _ if c.is_ascii_digit() => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                // identifiers may start with a digit inside count(...)
                if i < bytes.len() && is_ident_char(bytes[i] as char) {
                    while i < bytes.len() && is_ident_char(bytes[i] as char) {
                        i += 1;
                    }
                    out.push((start, Token::Ident(text[start..i].to_string())));
                } else {
                    let value = digits.parse().map_err(|_| {
                        Error::invalid(format!("predicate: integer out of range at column {}", start + 1))
                    })?;
                    out.push((start, Token::Int(value)));
                }
                continue;
            }
            _ if is_ident_char(c) => {
                while i < bytes.len() && is_ident_char(bytes[i] as char) {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(Error::invalid(format!(
                    "predicate: unexpected character `{c}` at column {}",
                    start + 1
                )))
            }
        }
        i += 1;
    }
    Ok(out)
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    symbols: &'a [String],
}

/// `Σ coefficients·x + constant`
#[derive(Default)]
struct Linear {
    coefficients: BTreeMap<SymbolId, i64>,
    constant: i64,
}

impl Linear {
    fn add(&mut self, other: Linear, sign: i64) {
        for (s, c) in other.coefficients {
            *self.coefficients.entry(s).or_insert(0) += sign * c;
        }
        self.constant += sign * other.constant;
    }

    fn into_coefficients(self) -> (BTreeMap<SymbolId, i64>, i64) {
        let coefficients = self.coefficients.into_iter().filter(|(_, c)| *c != 0).collect();
        (coefficients, self.constant)
    }
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, message: &str) -> Error {
        match self.tokens.get(self.pos) {
            Some((col, _)) => Error::invalid(format!("predicate: {message} at column {}", col + 1)),
            None => Error::invalid(format!("predicate: {message} at end of input")),
        }
    }

    fn keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token::Ident(w)) if w == word)
    }

    fn expect(&mut self, token: Token) -> Result<()> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {token:?}")))
        }
    }

    fn disjunction(&mut self) -> Result<Predicate> {
        let mut parts = vec![self.conjunction()?];
        while self.keyword("or") {
            self.pos += 1;
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Predicate::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Predicate> {
        let mut parts = vec![self.unary()?];
        while self.keyword("and") {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Predicate::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Predicate> {
        if self.keyword("not") {
            self.pos += 1;
            return Ok(Predicate::Not(Box::new(self.unary()?)));
        }
        if self.peek() == Some(&Token::LParen) {
            self.pos += 1;
            let inner = self.disjunction()?;
            self.expect(Token::RParen)?;
            return Ok(inner);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Predicate> {
        let lhs = self.linear()?;
        if self.keyword("mod") {
            self.pos += 1;
            let modulus = match self.next() {
                Some(Token::Int(m)) if m >= 2 => m,
                _ => {
                    self.pos -= 1;
                    return Err(self.error("modulus must be an integer >= 2"));
                }
            };
            self.expect(Token::Cmp("=="))?;
            let negative = if self.peek() == Some(&Token::Minus) {
                self.pos += 1;
                true
            } else {
                false
            };
            let remainder = match self.next() {
                Some(Token::Int(r)) => {
                    if negative {
                        -r
                    } else {
                        r
                    }
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.error("expected remainder"));
                }
            };
            let (coefficients, constant) = lhs.into_coefficients();
            return Ok(Predicate::Mod {
                coefficients,
                remainder: (remainder - constant).rem_euclid(modulus),
                modulus,
            });
        }
        let op = match self.next() {
            Some(Token::Cmp(op)) => op,
            _ => {
                self.pos -= 1;
                return Err(self.error("expected comparison"));
            }
        };
        let rhs = self.linear()?;
        let mut diff = lhs;
        diff.add(rhs, -1);
        let (coefficients, constant) = diff.into_coefficients();
        // Σ c·x + constant  op  0
        let bound = -constant;
        let atom = |relation, constant| Predicate::Threshold {
            coefficients: coefficients.clone(),
            constant,
            relation,
        };
        Ok(match op {
            ">=" => atom(Relation::Ge, bound),
            ">" => atom(Relation::Ge, bound + 1),
            "<=" => atom(Relation::Le, bound),
            "<" => atom(Relation::Le, bound - 1),
            "==" => atom(Relation::Eq, bound),
            "!=" => Predicate::Not(Box::new(atom(Relation::Eq, bound))),
            _ => unreachable!("tokenizer only emits known comparisons"),
        })
    }

    fn linear(&mut self) -> Result<Linear> {
        let mut acc = Linear::default();
        let mut sign = 1;
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            sign = -1;
        }
        loop {
            acc.add(self.term()?, sign);
            match self.peek() {
                Some(Token::Plus) => sign = 1,
                Some(Token::Minus) => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Linear> {
        let mut out = Linear::default();
        match self.peek().cloned() {
            Some(Token::Int(k)) => {
                self.pos += 1;
                if self.peek() == Some(&Token::Star) {
                    self.pos += 1;
                    let s = self.count()?;
                    out.coefficients.insert(s, k);
                } else {
                    out.constant = k;
                }
            }
            Some(Token::Ident(w)) if w == "count" => {
                let s = self.count()?;
                out.coefficients.insert(s, 1);
            }
            _ => return Err(self.error("expected `count(...)` or an integer")),
        }
        Ok(out)
    }

    fn count(&mut self) -> Result<SymbolId> {
        if !self.keyword("count") {
            return Err(self.error("expected `count`"));
        }
        self.pos += 1;
        self.expect(Token::LParen)?;
        let name = match self.next() {
            Some(Token::Ident(name)) => name,
            Some(Token::Int(k)) => k.to_string(),
            _ => {
                self.pos -= 1;
                return Err(self.error("expected a symbol name"));
            }
        };
        let id = self
            .symbols
            .iter()
            .position(|s| *s == name)
            .map(|i| SymbolId(i as u16));
        let Some(id) = id else {
            self.pos -= 1;
            return Err(self.error(&format!("unknown input symbol `{name}`")));
        };
        self.expect(Token::RParen)?;
        Ok(id)
    }
}
