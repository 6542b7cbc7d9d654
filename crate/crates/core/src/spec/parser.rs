use super::{ParseError, SafetySpec};
use crate::geometry::LinearConstraint;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num { value: f64, integral: bool },
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    Bang,
    Plus,
    Minus,
    Star,
    Le,
    Ge,
    Lt,
    Gt,
    EqEq,
    Eq,
    AndAnd,
    And,
    OrOr,
    Or,
    Arrow,
    FatArrow,
    Top,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() || (c == '.' && next.is_some_and(|d| d.is_ascii_digit())) {
            let mut j = i;
            let mut integral = true;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j < chars.len() && chars[j] == '.' {
                integral = false;
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    integral = false;
                    j = k;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
            }
            let lexeme: String = chars[i..j].iter().collect();
            let value: f64 = lexeme.parse().map_err(|_| ParseError::Syntax {
                line: start_line,
                col: start_col,
                message: format!("malformed number `{lexeme}`"),
            })?;
            if !value.is_finite() {
                return Err(ParseError::Syntax {
                    line: start_line,
                    col: start_col,
                    message: format!("number `{lexeme}` is out of range"),
                });
            }
            (Tok::Num { value, integral }, j - i)
        } else {
            match (c, next) {
                ('<', Some('=')) => (Tok::Le, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('=', Some('=')) => (Tok::EqEq, 2),
                ('=', Some('>')) => (Tok::FatArrow, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('&', Some('&')) => (Tok::AndAnd, 2),
                ('|', Some('|')) => (Tok::OrOr, 2),
                ('<', _) => (Tok::Lt, 1),
                ('>', _) => (Tok::Gt, 1),
                ('=', _) => (Tok::Eq, 1),
                ('&', _) => (Tok::And, 1),
                ('|', _) => (Tok::Or, 1),
                ('[', _) => (Tok::LBrack, 1),
                (']', _) => (Tok::RBrack, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                ('!' | '~' | '¬', _) => (Tok::Bang, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('⊤', _) => (Tok::Top, 1),
                _ => {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        out.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a [String],
}

/// Linear expression `coefficients·x + constant`.
struct Affine {
    coefficients: Vec<f64>,
    constant: f64,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn unsupported(&self, construct: &str) -> ParseError {
        let t = self.peek();
        ParseError::Unsupported {
            construct: construct.to_string(),
            line: t.line,
            col: t.col,
        }
    }

    fn is_variable(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// Boolean connectives and the until operator, which the fragment excludes.
    fn connective(&self) -> Option<&'static str> {
        match &self.peek().tok {
            Tok::AndAnd => Some("&&"),
            Tok::And => Some("&"),
            Tok::OrOr => Some("||"),
            Tok::Or => Some("|"),
            Tok::Arrow => Some("->"),
            Tok::FatArrow => Some("=>"),
            Tok::Ident(s) if !self.is_variable(s) => match s.as_str() {
                "and" => Some("and"),
                "or" => Some("or"),
                "U" => Some("U"),
                _ => None,
            },
            _ => None,
        }
    }

    fn temporal_keyword(&self) -> Option<&'static str> {
        match &self.peek().tok {
            Tok::Ident(s) if !self.is_variable(s) => match s.as_str() {
                "G" => Some("G"),
                "F" => Some("F"),
                "X" => Some("X"),
                "U" => Some("U"),
                _ => None,
            },
            _ => None,
        }
    }

    fn is_top(&self) -> bool {
        match &self.peek().tok {
            Tok::Top => true,
            Tok::Ident(s) => s == "true" && !self.is_variable(s),
            _ => false,
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}")))
        }
    }

    fn index(&mut self) -> Result<usize, ParseError> {
        match self.peek().tok {
            Tok::Num {
                value,
                integral: true,
            } if value <= usize::MAX as f64 => {
                self.bump();
                Ok(value as usize)
            }
            _ => Err(self.syntax("expected a non-negative integer time step")),
        }
    }

    fn formula(&mut self) -> Result<SafetySpec, ParseError> {
        if self.is_top() {
            return Err(self.unsupported("true"));
        }
        match self.temporal_keyword() {
            Some("G") => {}
            Some(other) => return Err(self.unsupported(other)),
            None => {
                return Err(match self.peek().tok {
                    Tok::Bang => self.unsupported("negation outside G"),
                    Tok::Ident(_) | Tok::Num { .. } => self.unsupported("proposition without G"),
                    _ => self.syntax("expected `G[i1,i2]`"),
                })
            }
        }
        self.bump();
        self.expect(Tok::LBrack, "`[`")?;
        let lower = self.index()?;
        self.expect(Tok::Comma, "`,`")?;
        let upper = self.index()?;
        self.expect(Tok::RBrack, "`]`")?;

        match self.temporal_keyword() {
            Some("G") => return Err(self.unsupported("nested G")),
            Some(other) => return Err(self.unsupported(other)),
            None => {}
        }
        if self.peek().tok != Tok::Bang {
            return Err(match self.peek().tok {
                Tok::LParen | Tok::Ident(_) | Tok::Num { .. } => {
                    self.unsupported("G without negation")
                }
                _ => self.syntax("expected `!(`"),
            });
        }
        self.bump();
        match self.temporal_keyword() {
            Some("G") => return Err(self.unsupported("nested G")),
            Some(other) => return Err(self.unsupported(other)),
            None => {}
        }
        if self.peek().tok == Tok::Bang {
            return Err(self.unsupported("double negation"));
        }
        self.expect(Tok::LParen, "`(`")?;
        if self.peek().tok == Tok::Bang {
            return Err(self.unsupported("double negation"));
        }
        if self.is_top() {
            return Err(self.unsupported("true"));
        }
        if let Some(k) = self.temporal_keyword() {
            return Err(self.unsupported(if k == "G" { "nested G" } else { k }));
        }

        let lhs = self.expression()?;
        let flip = match self.peek().tok {
            Tok::Le => false,
            Tok::Ge => true,
            Tok::Lt => return Err(self.unsupported("<")),
            Tok::Gt => return Err(self.unsupported(">")),
            Tok::EqEq => return Err(self.unsupported("==")),
            Tok::Eq => return Err(self.unsupported("=")),
            _ => {
                return Err(match self.connective() {
                    Some(c) => self.unsupported(c),
                    None => self.syntax("expected `<=` or `>=`"),
                })
            }
        };
        self.bump();
        let rhs = self.expression()?;
        if self.peek().tok != Tok::RParen {
            return Err(match self.connective() {
                Some(c) => self.unsupported(c),
                None => match self.peek().tok {
                    Tok::Le | Tok::Ge | Tok::Lt | Tok::Gt => self.unsupported("chained comparison"),
                    _ => self.syntax("expected `)`"),
                },
            });
        }
        self.bump();
        if self.peek().tok != Tok::Eof {
            return Err(match self.connective() {
                Some(c) => self.unsupported(c),
                None => self.syntax("unexpected trailing input"),
            });
        }

        // lhs - rhs <= 0, or >= 0 when flipped
        let mut coefficients: Vec<f64> = lhs
            .coefficients
            .iter()
            .zip(&rhs.coefficients)
            .map(|(l, r)| l - r)
            .collect();
        let mut bound = rhs.constant - lhs.constant;
        if flip {
            for c in &mut coefficients {
                *c = -*c;
            }
            bound = -bound;
        }
        let psi = LinearConstraint::new(coefficients, bound).map_err(|e| ParseError::Syntax {
            line: 1,
            col: 1,
            message: e.to_string(),
        })?;
        SafetySpec::new(lower, upper, psi)
    }

    fn expression(&mut self) -> Result<Affine, ParseError> {
        let mut acc = Affine {
            coefficients: vec![0.0; self.names.len()],
            constant: 0.0,
        };
        let mut sign = match self.peek().tok {
            Tok::Minus => {
                self.bump();
                -1.0
            }
            Tok::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        loop {
            self.term(sign, &mut acc)?;
            sign = match self.peek().tok {
                Tok::Plus => 1.0,
                Tok::Minus => -1.0,
                _ => return Ok(acc),
            };
            self.bump();
        }
    }

    fn term(&mut self, sign: f64, acc: &mut Affine) -> Result<(), ParseError> {
        let coefficient = match self.peek().tok {
            Tok::Num { value, .. } => {
                self.bump();
                match &self.peek().tok {
                    Tok::Star => {
                        self.bump();
                        Some(value)
                    }
                    Tok::Ident(s) if self.is_variable(s) || self.connective().is_none() => {
                        Some(value)
                    }
                    _ => {
                        acc.constant += sign * value;
                        return Ok(());
                    }
                }
            }
            _ => None,
        };
        let t = self.peek().clone();
        match &t.tok {
            Tok::Ident(name) => {
                let Some(v) = self.names.iter().position(|n| n == name) else {
                    if name == "true" {
                        return Err(self.unsupported("true"));
                    }
                    return Err(ParseError::UnknownVariable {
                        name: name.clone(),
                        line: t.line,
                        col: t.col,
                    });
                };
                self.bump();
                acc.coefficients[v] += sign * coefficient.unwrap_or(1.0);
                Ok(())
            }
            Tok::Bang => Err(self.unsupported("double negation")),
            Tok::Top => Err(self.unsupported("true")),
            _ => Err(self.syntax("expected a number or variable")),
        }
    }
}

pub(super) fn parse(text: &str, names: &[String]) -> Result<SafetySpec, ParseError> {
    let tokens = lex(text)?;
    Parser {
        tokens,
        pos: 0,
        names,
    }
    .formula()
}
