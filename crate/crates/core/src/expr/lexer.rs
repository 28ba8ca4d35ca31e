use crate::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Number(f64),
    Ident,
    Operator(char),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Character offset of the first character.
    pub position: usize,
}

/// Splits `source` into tokens. Offsets count characters, not bytes.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = |kind| Token { kind, text: c.to_string(), position: start };
        match c {
            '+' | '-' | '*' | '/' | '^' => {
                tokens.push(simple(TokenKind::Operator(c)));
                i += 1;
            }
            '(' => {
                tokens.push(simple(TokenKind::LParen));
                i += 1;
            }
            ')' => {
                tokens.push(simple(TokenKind::RParen));
                i += 1;
            }
            ',' => {
                tokens.push(simple(TokenKind::Comma));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                i = scan_number(&chars, i);
                let text: String = chars[start..i].iter().collect();
                let value = text
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ParseError { kind: ParseErrorKind::InvalidNumber(text.clone()), position: start })?;
                tokens.push(Token { kind: TokenKind::Number(value), text, position: start });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                tokens.push(Token { kind: TokenKind::Ident, text, position: start });
            }
            other => {
                return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(other), position: start });
            }
        }
    }
    Ok(tokens)
}

fn scan_number(chars: &[char], mut i: usize) -> usize {
    let digits = |mut j: usize| {
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    i = digits(i);
    if i < chars.len() && chars[i] == '.' {
        i = digits(i + 1);
    }
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        let mut j = i + 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            j += 1;
        }
        // Only consume the exponent when digits follow; "2e" stays "2" + ident.
        if j < chars.len() && chars[j].is_ascii_digit() {
            i = digits(j);
        }
    }
    i
}
