//! A small arithmetic expression evaluator over arbitrary-precision floats,
//! used to specify spectra exactly (e.g. "sqrt(5)" or "pi/sqrt(8)") where
//! binary64 literals would silently perturb the mathematics being tested.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent suffix like 1.5e-3
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                out.push(Token::Num(chars[start..i].iter().collect()));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            _ => return Err(format!("unexpected character '{c}' in expression")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    prec: u32,
}

/// Evaluate `src` to a float of `prec` bits. Supported: decimal literals,
/// `pi`, `+ - * / ^`, parentheses, and the functions sqrt, cbrt, exp, ln,
/// log10, log2, sin, cos, tan, asin, acos, atan (alias arctan), abs.
pub fn eval(src: &str, prec: u32) -> Result<Float, String> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err("empty expression".into());
    }
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        prec,
    };
    let v = p.expr()?;
    if p.pos != tokens.len() {
        return Err(format!("trailing input at token {}", p.pos));
    }
    if !v.is_finite() {
        return Err("expression did not evaluate to a finite value".into());
    }
    Ok(v)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Float, String> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Float, String> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc *= self.factor()?;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let d = self.factor()?;
                    if d.is_zero() {
                        return Err("division by zero".into());
                    }
                    acc /= d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Float, String> {
        let base = self.unary()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let exponent = self.factor()?; // right associative
            return Ok(base.pow(&exponent));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Float, String> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        if self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Float, String> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| "unexpected end of expression".to_string())?;
        match tok {
            Token::Num(s) => {
                self.pos += 1;
                let parsed = Float::parse(&s).map_err(|e| format!("bad number '{s}': {e}"))?;
                Ok(Float::with_val(self.prec, parsed))
            }
            Token::Ident(name) => {
                self.pos += 1;
                if self.peek() == Some(&Token::LParen) {
                    self.pos += 1;
                    let arg = self.expr()?;
                    if self.peek() != Some(&Token::RParen) {
                        return Err(format!("missing ')' after {name}(...)"));
                    }
                    self.pos += 1;
                    self.apply(&name, arg)
                } else {
                    match name.as_str() {
                        "pi" => Ok(Float::with_val(self.prec, Constant::Pi)),
                        _ => Err(format!("unknown constant '{name}'")),
                    }
                }
            }
            Token::LParen => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err("missing ')'".into());
                }
                self.pos += 1;
                Ok(v)
            }
            other => Err(format!("unexpected token {other:?}")),
        }
    }

    fn apply(&self, name: &str, arg: Float) -> Result<Float, String> {
        let v = match name {
            "sqrt" => {
                if arg.is_sign_negative() && !arg.is_zero() {
                    return Err("sqrt of negative value".into());
                }
                arg.sqrt()
            }
            "cbrt" => arg.cbrt(),
            "exp" => arg.exp(),
            "ln" => arg.ln(),
            "log10" => arg.log10(),
            "log2" => arg.log2(),
            "sin" => arg.sin(),
            "cos" => arg.cos(),
            "tan" => arg.tan(),
            "asin" => arg.asin(),
            "acos" => arg.acos(),
            "atan" | "arctan" => arg.atan(),
            "abs" => arg.abs(),
            _ => return Err(format!("unknown function '{name}'")),
        };
        Ok(v)
    }
}
