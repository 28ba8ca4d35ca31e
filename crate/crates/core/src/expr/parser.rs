use super::lexer::{tokenize, Token, TokenKind};
use super::{BinOp, Expr, ExprKind, Func, UnaryOp};
use crate::error::{ParseError, ParseErrorKind};

/// Parses `source` as a function of `x1..x<dimension>`.
pub fn parse(source: &str, dimension: usize) -> Result<Expr, ParseError> {
    parse_with_params(source, dimension, 0)
}

/// Parses a parametrized expression that may also reference `p1..p<params>`.
pub fn parse_with_params(source: &str, dimension: usize, params: usize) -> Result<Expr, ParseError> {
    let tokens = tokenize(source)?;
    let end = source.chars().count();
    if tokens.is_empty() {
        return Err(ParseError { kind: ParseErrorKind::EmptyInput, position: 0 });
    }
    let mut p = Parser { tokens, idx: 0, end, dimension, params };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(p.unexpected(t.clone()));
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    end: usize,
    dimension: usize,
    params: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.idx).cloned();
        self.idx += 1;
        t
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: TokenKind::Operator(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn unexpected(&self, t: Token) -> ParseError {
        ParseError { kind: ParseErrorKind::UnexpectedToken(t.text), position: t.position }
    }

    fn end_error(&self) -> ParseError {
        ParseError { kind: ParseErrorKind::UnexpectedEnd, position: self.end }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            let pos = self.next().map(|t| t.position).unwrap_or_default();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.power()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            let pos = self.next().map(|t| t.position).unwrap_or_default();
            let rhs = self.power()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if self.peek_op() == Some('^') {
            let pos = self.next().map(|t| t.position).unwrap_or_default();
            let exponent = self.power()?;
            return Ok(Expr::new(ExprKind::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)), pos));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_op() == Some('-') {
            let pos = self.next().map(|t| t.position).unwrap_or_default();
            let child = self.unary()?;
            return Ok(Expr::new(ExprKind::Unary(UnaryOp::Neg, Box::new(child)), pos));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.next().ok_or_else(|| self.end_error())?;
        match t.kind {
            TokenKind::Number(v) => Ok(Expr::new(ExprKind::Const(v), t.position)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.close_paren()?;
                Ok(inner)
            }
            TokenKind::Ident => {
                if matches!(self.peek(), Some(Token { kind: TokenKind::LParen, .. })) {
                    self.call(t)
                } else {
                    self.identifier(t)
                }
            }
            _ => Err(self.unexpected(t)),
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(Token { kind: TokenKind::RParen, .. }) => Ok(()),
            Some(t) => Err(self.unexpected(t)),
            None => Err(ParseError { kind: ParseErrorKind::UnclosedParen, position: self.end }),
        }
    }

    fn identifier(&self, t: Token) -> Result<Expr, ParseError> {
        let indexed = |prefix: char| -> Option<usize> {
            let rest = t.text.strip_prefix(prefix)?;
            if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            rest.parse::<usize>().ok().filter(|&i| i >= 1)
        };
        if let Some(i) = indexed('x') {
            if i > self.dimension {
                return Err(ParseError {
                    kind: ParseErrorKind::VariableOutOfRange { index: i, dimension: self.dimension },
                    position: t.position,
                });
            }
            return Ok(Expr::new(ExprKind::Var(i), t.position));
        }
        if let Some(j) = indexed('p') {
            if j > self.params {
                return Err(ParseError {
                    kind: ParseErrorKind::ParameterOutOfRange { index: j, count: self.params },
                    position: t.position,
                });
            }
            return Ok(Expr::new(ExprKind::Param(j), t.position));
        }
        Err(ParseError { kind: ParseErrorKind::UnknownIdentifier(t.text), position: t.position })
    }

    fn call(&mut self, name: Token) -> Result<Expr, ParseError> {
        let func = Func::from_name(&name.text).ok_or_else(|| ParseError {
            kind: ParseErrorKind::UnknownFunction(name.text.clone()),
            position: name.position,
        })?;
        self.next(); // '('
        let mut args = Vec::new();
        if matches!(self.peek(), Some(Token { kind: TokenKind::RParen, .. })) {
            self.next();
        } else {
            loop {
                args.push(self.expr()?);
                match self.next() {
                    Some(Token { kind: TokenKind::Comma, .. }) => continue,
                    Some(Token { kind: TokenKind::RParen, .. }) => break,
                    Some(t) => return Err(self.unexpected(t)),
                    None => return Err(ParseError { kind: ParseErrorKind::UnclosedParen, position: self.end }),
                }
            }
        }
        if args.len() != func.arity() {
            return Err(ParseError {
                kind: ParseErrorKind::ArityMismatch { name: name.text, expected: func.arity(), found: args.len() },
                position: name.position,
            });
        }
        Ok(Expr::new(ExprKind::Call(func, args), name.position))
    }
}
