use std::collections::BTreeSet;

use super::{BinOp, Func, Node, ParseError, ParseErrorKind, WarpExpr};

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn tokenize(src: &[char]) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let c = src[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < src.len() && src[j].is_ascii_digit() {
                    j += 1;
                }
                if j < src.len() && src[j] == '.' {
                    j += 1;
                    while j < src.len() && src[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                // exponent only if followed by digits, otherwise leave 'e' for the next token
                if j < src.len() && (src[j] == 'e' || src[j] == 'E') {
                    let mut k = j + 1;
                    if k < src.len() && (src[k] == '+' || src[k] == '-') {
                        k += 1;
                    }
                    if k < src.len() && src[k].is_ascii_digit() {
                        while k < src.len() && src[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text: String = src[i..j].iter().collect();
                let v: f64 = text.parse().map_err(|_| ParseError {
                    position: start,
                    kind: ParseErrorKind::UnexpectedToken,
                })?;
                if !v.is_finite() {
                    return Err(ParseError {
                        position: start,
                        kind: ParseErrorKind::UnexpectedToken,
                    });
                }
                i = j;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < src.len() && (src[j].is_ascii_alphanumeric() || src[j] == '_') {
                    j += 1;
                }
                let name: String = src[i..j].iter().collect();
                i = j;
                out.push((Tok::Ident(name), start));
                continue;
            }
            _ => {
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::UnexpectedToken,
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
    vars: &'a [String],
    params: BTreeSet<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.at(),
            kind,
        }
    }

    fn descend(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::NestingTooDeep));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        self.descend()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            self.descend()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            self.descend()?;
            // right-associative; the exponent may carry its own unary minus
            let exp = self.unary()?;
            self.depth -= 1;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Node::Lit(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.err(ParseErrorKind::UnexpectedToken));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name).ok_or(ParseError {
                        position: at,
                        kind: ParseErrorKind::UnknownFunction,
                    })?;
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.expr()?);
                            if *self.peek() == Tok::Comma {
                                self.bump();
                                continue;
                            }
                            break;
                        }
                    }
                    if *self.peek() != Tok::RParen {
                        return Err(self.err(ParseErrorKind::UnexpectedToken));
                    }
                    self.bump();
                    if args.len() != func.arity() {
                        return Err(ParseError {
                            position: at,
                            kind: ParseErrorKind::ArityMismatch,
                        });
                    }
                    return Ok(Node::Call(func, args));
                }
                if Func::from_name(&name).is_some() {
                    return Err(ParseError {
                        position: at,
                        kind: ParseErrorKind::UnknownIdentifier,
                    });
                }
                if let Some(k) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Node::Var(k));
                }
                if looks_like_coordinate(&name) {
                    return Err(ParseError {
                        position: at,
                        kind: ParseErrorKind::UnknownIdentifier,
                    });
                }
                self.params.insert(name.clone());
                Ok(Node::Param(name))
            }
            _ => Err(ParseError {
                position: at,
                kind: ParseErrorKind::UnexpectedToken,
            }),
        }
    }
}

/// `x_<k>` names are reserved for graph coordinates and never become parameters.
fn looks_like_coordinate(name: &str) -> bool {
    name.strip_prefix("x_")
        .is_some_and(|k| !k.is_empty() && k.chars().all(|c| c.is_ascii_digit()))
}

pub(super) fn parse_with_vars(source: &str, vars: &[String]) -> Result<WarpExpr, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let toks = tokenize(&chars)?;
    if toks.len() == 1 {
        return Err(ParseError {
            position: 0,
            kind: ParseErrorKind::EmptyInput,
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        vars,
        params: BTreeSet::new(),
    };
    let root = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err(ParseErrorKind::UnexpectedToken));
    }
    Ok(WarpExpr {
        root,
        params: p.params,
        vars: vars.to_vec(),
    })
}
