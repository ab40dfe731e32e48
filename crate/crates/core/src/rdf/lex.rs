//! Character cursor shared by the N-Quads and Turtle readers.

use super::{Iri, RdfError};

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    pub line: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str, line: usize) -> Self {
        Self { src, pos: 0, line }
    }

    pub fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub fn peek_nth(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn err(&self, message: impl Into<String>) -> RdfError {
        RdfError::Syntax { line: self.line, message: message.into() }
    }

    /// Skips whitespace and `#` comments.
    pub fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn read_hex(&mut self, n: usize) -> Result<char, RdfError> {
        let mut v = 0u32;
        for _ in 0..n {
            let d = self.bump().and_then(|c| c.to_digit(16)).ok_or_else(|| self.err("invalid \\u escape"))?;
            v = v * 16 + d;
        }
        char::from_u32(v).ok_or_else(|| self.err("escape is not a scalar value"))
    }

    /// `<...>` with `\u`/`\U` escapes.
    pub fn read_iriref(&mut self) -> Result<Iri, RdfError> {
        if !self.eat('<') {
            return Err(self.err("expected '<'"));
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.err("unterminated IRI")),
                Some('>') => break,
                Some('\\') => match self.bump() {
                    Some('u') => out.push(self.read_hex(4)?),
                    Some('U') => out.push(self.read_hex(8)?),
                    _ => return Err(self.err("invalid escape in IRI")),
                },
                Some(c) => out.push(c),
            }
        }
        Iri::new(out).map_err(|e| self.err(e.to_string()))
    }

    /// A `"..."` string with ECHAR/UCHAR escapes; the opening quote is consumed here.
    pub fn read_quoted(&mut self) -> Result<String, RdfError> {
        let quote = match self.bump() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.err("expected string literal")),
        };
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') | Some('\r') => return Err(self.err("unterminated literal")),
                Some(c) if c == quote => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('t') => out.push('\t'),
                    Some('b') => out.push('\u{8}'),
                    Some('n') => out.push('\n'),
                    Some('r') => out.push('\r'),
                    Some('f') => out.push('\u{c}'),
                    Some('"') => out.push('"'),
                    Some('\'') => out.push('\''),
                    Some('\\') => out.push('\\'),
                    Some('u') => out.push(self.read_hex(4)?),
                    Some('U') => out.push(self.read_hex(8)?),
                    _ => return Err(self.err("invalid escape in literal")),
                },
                Some(c) => out.push(c),
            }
        }
    }

    /// Language tag after `@`.
    pub fn read_langtag(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '-' {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        out
    }

    /// Blank node label after `_:`.
    pub fn read_bnode_label(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-') {
                out.push(c);
                self.bump();
            } else if c == '.' && self.peek_nth(1).is_some_and(|n| n.is_alphanumeric() || matches!(n, '_' | '-')) {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        out
    }
}
