//! Sparse multivariate polynomials over the rationals with a small text
//! grammar: signed sums of terms, each term a '*'-separated product of an
//! optional rational coefficient and powered variables, e.g.
//! "x^2 + y^3" or "3/2*x*y^4 - z". Like terms merge; zero coefficients are
//! never stored.

use crate::rat::{format_rat, Rat};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    SyntaxError { position: usize, message: String },
    UnknownVariable { position: usize, name: String },
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::SyntaxError { position, message } => {
                write!(f, "syntax error at byte {position}: {message}")
            }
            PolyError::UnknownVariable { position, name } => {
                write!(f, "unknown variable `{name}` at byte {position}")
            }
        }
    }
}

impl std::error::Error for PolyError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    variables: Vec<String>,
    terms: BTreeMap<Vec<u64>, Rat>,
}

impl Polynomial {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// Exponent vector -> coefficient, all coefficients nonzero.
    pub fn terms(&self) -> &BTreeMap<Vec<u64>, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn parse(text: &str, variables: &[String]) -> Result<Polynomial, PolyError> {
        Parser::new(text, variables).parse()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (exps, coeff)) in self.terms.iter().enumerate() {
            let negative = coeff < &Rat::zero();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = if negative { -coeff.clone() } else { coeff.clone() };
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || exps.iter().all(|&e| e == 0) {
                factors.push(format_rat(&abs));
            }
            for (v, &e) in self.variables.iter().zip(exps) {
                match e {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Int(BigInt),
    Ident(String),
}

struct Parser<'a> {
    variables: &'a [String],
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, variables: &'a [String]) -> Parser<'a> {
        let mut tokens = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    tokens.push((i, Token::Plus));
                    i += 1;
                }
                '-' => {
                    tokens.push((i, Token::Minus));
                    i += 1;
                }
                '*' => {
                    tokens.push((i, Token::Star));
                    i += 1;
                }
                '^' => {
                    tokens.push((i, Token::Caret));
                    i += 1;
                }
                '/' => {
                    tokens.push((i, Token::Slash));
                    i += 1;
                }
                '0'..='9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let value: BigInt = text[start..i].parse().expect("digits");
                    tokens.push((start, Token::Int(value)));
                }
                'a'..='z' | 'A'..='Z' | '_' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    tokens.push((start, Token::Ident(text[start..i].to_string())));
                }
                _ => {
                    // Surface the bad byte as a zero-length "token"; the
                    // parser reports it on first contact.
                    tokens.push((i, Token::Ident(String::new())));
                    i += 1;
                }
            }
        }
        Parser { variables, tokens, pos: 0, end: text.len() }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn syntax<T>(&self, message: &str) -> Result<T, PolyError> {
        Err(PolyError::SyntaxError { position: self.here(), message: message.to_string() })
    }

    fn parse(mut self) -> Result<Polynomial, PolyError> {
        let mut terms: BTreeMap<Vec<u64>, Rat> = BTreeMap::new();
        let mut sign = Rat::one();
        match self.peek() {
            Some(Token::Plus) => {
                self.bump();
            }
            Some(Token::Minus) => {
                sign = -sign;
                self.bump();
            }
            None => return self.syntax("empty polynomial"),
            _ => {}
        }
        loop {
            let (exps, coeff) = self.term()?;
            let signed = coeff * &sign;
            let entry = terms.entry(exps).or_insert_with(Rat::zero);
            *entry += signed;
            if entry.is_zero() {
                let key: Vec<Vec<u64>> =
                    terms.iter().filter(|(_, c)| c.is_zero()).map(|(k, _)| k.clone()).collect();
                for k in key {
                    terms.remove(&k);
                }
            }
            match self.bump() {
                None => break,
                Some((_, Token::Plus)) => sign = Rat::one(),
                Some((_, Token::Minus)) => sign = -Rat::one(),
                Some(_) => {
                    self.pos -= 1;
                    return self.syntax("expected `+`, `-`, or end of input");
                }
            }
        }
        Ok(Polynomial { variables: self.variables.to_vec(), terms })
    }

    fn term(&mut self) -> Result<(Vec<u64>, Rat), PolyError> {
        let mut coeff = Rat::one();
        let mut exps = vec![0u64; self.variables.len()];
        loop {
            self.factor(&mut coeff, &mut exps)?;
            if self.peek() == Some(&Token::Star) {
                self.bump();
            } else {
                return Ok((exps, coeff));
            }
        }
    }

    fn factor(&mut self, coeff: &mut Rat, exps: &mut [u64]) -> Result<(), PolyError> {
        match self.bump() {
            Some((_, Token::Int(numer))) => {
                let mut value = Rat::from_integer(numer);
                if self.peek() == Some(&Token::Slash) {
                    self.bump();
                    match self.bump() {
                        Some((_, Token::Int(denom))) if !denom.is_zero() => {
                            value /= Rat::from_integer(denom);
                        }
                        Some((_, Token::Int(_))) => {
                            self.pos -= 1;
                            return self.syntax("zero denominator");
                        }
                        _ => {
                            self.pos -= 1;
                            return self.syntax("expected denominator digits after `/`");
                        }
                    }
                }
                *coeff *= value;
                Ok(())
            }
            Some((position, Token::Ident(name))) => {
                if name.is_empty() {
                    self.pos -= 1;
                    return self.syntax("unexpected character");
                }
                let Some(index) = self.variables.iter().position(|v| v == &name) else {
                    return Err(PolyError::UnknownVariable { position, name });
                };
                let mut exponent = 1u64;
                if self.peek() == Some(&Token::Caret) {
                    self.bump();
                    match self.bump() {
                        Some((_, Token::Int(e))) => {
                            exponent = u64::try_from(&e).map_err(|_| PolyError::SyntaxError {
                                position,
                                message: "exponent too large".to_string(),
                            })?;
                        }
                        _ => {
                            self.pos -= 1;
                            return self.syntax("expected integer exponent after `^`");
                        }
                    }
                }
                exps[index] += exponent;
                Ok(())
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.syntax("expected a coefficient or variable")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn coeff(p: &Polynomial, exps: &[u64]) -> Rat {
        p.terms().get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    #[test]
    fn parses_basic_sums() {
        let p = Polynomial::parse("x^2 + y^3", &vars(&["x", "y"])).unwrap();
        assert_eq!(coeff(&p, &[2, 0]), rat_int(1));
        assert_eq!(coeff(&p, &[0, 3]), rat_int(1));
        assert_eq!(p.terms().len(), 2);
    }

    #[test]
    fn parses_coefficients_and_signs() {
        let p = Polynomial::parse("2*x*y - y", &vars(&["x", "y"])).unwrap();
        assert_eq!(coeff(&p, &[1, 1]), rat_int(2));
        assert_eq!(coeff(&p, &[0, 1]), rat_int(-1));
        let q = Polynomial::parse("-3/2*x^2 + 1/2", &vars(&["x"])).unwrap();
        assert_eq!(coeff(&q, &[2]), rat(-3, 2));
        assert_eq!(coeff(&q, &[0]), rat(1, 2));
    }

    #[test]
    fn merges_like_terms_and_drops_zero() {
        let p = Polynomial::parse("x^2 + x^2", &vars(&["x"])).unwrap();
        assert_eq!(coeff(&p, &[2]), rat_int(2));
        let z = Polynomial::parse("x - x", &vars(&["x"])).unwrap();
        assert!(z.is_zero());
        let repeated = Polynomial::parse("x*x*x", &vars(&["x"])).unwrap();
        assert_eq!(coeff(&repeated, &[3]), rat_int(1));
    }

    #[test]
    fn reports_positions() {
        let err = Polynomial::parse("x^2 + z", &vars(&["x", "y"])).unwrap_err();
        assert_eq!(err, PolyError::UnknownVariable { position: 6, name: "z".to_string() });
        match Polynomial::parse("x^2 +", &vars(&["x"])).unwrap_err() {
            PolyError::SyntaxError { position, .. } => assert_eq!(position, 5),
            other => panic!("unexpected: {other:?}"),
        }
        match Polynomial::parse("x/2", &vars(&["x"])).unwrap_err() {
            PolyError::SyntaxError { position, .. } => assert_eq!(position, 1),
            other => panic!("unexpected: {other:?}"),
        }
        match Polynomial::parse("x^y", &vars(&["x", "y"])).unwrap_err() {
            PolyError::SyntaxError { position, .. } => assert_eq!(position, 2),
            other => panic!("unexpected: {other:?}"),
        }
        match Polynomial::parse("x @ y", &vars(&["x", "y"])).unwrap_err() {
            PolyError::SyntaxError { position, .. } => assert_eq!(position, 2),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        for text in ["x^2 + y^3", "2*x*y - y", "-3/2*x^2*y + 1/2", "x - y^4"] {
            let p = Polynomial::parse(text, &vars(&["x", "y"])).unwrap();
            let reparsed = Polynomial::parse(&p.to_string(), &vars(&["x", "y"])).unwrap();
            assert_eq!(p, reparsed, "{text} -> {p}");
        }
        let z = Polynomial::parse("x - x", &vars(&["x"])).unwrap();
        assert_eq!(z.to_string(), "0");
    }
}
