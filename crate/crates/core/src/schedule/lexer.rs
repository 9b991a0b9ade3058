use crate::error::{Error, Result};

use super::{SourcePos, Span};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(_) => "number".into(),
            Tok::Str(_) => "string".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: SourcePos,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn eat_digits(&mut self, buf: &mut String) -> usize {
        let mut n = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            buf.push(c);
            self.bump();
            n += 1;
        }
        n
    }
}

fn lex_error(pos: SourcePos, message: impl Into<String>) -> Error {
    Error::Parse { pos, message: message.into() }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut cur = Cursor { chars: src.chars().peekable(), pos: SourcePos::START };
    let mut out = Vec::new();
    loop {
        // whitespace and comments
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '#' {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let start = cur.pos;
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, span: Span { start, end: start } });
            return Ok(out);
        };
        let tok = match c {
            '{' | '}' | '(' | ')' | ';' | '=' | '+' | '-' | '*' | '/' => {
                cur.bump();
                match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ';' => Tok::Semi,
                    '=' => Tok::Eq,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    _ => Tok::Slash,
                }
            }
            '"' => {
                cur.bump();
                let mut s = String::new();
                loop {
                    let at = cur.pos;
                    match cur.bump() {
                        None | Some('\n') => return Err(lex_error(start, "unterminated string literal")),
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            _ => return Err(lex_error(at, "unknown escape sequence in string")),
                        },
                        Some(ch) => s.push(ch),
                    }
                }
                Tok::Str(s)
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut buf = String::new();
                let int_digits = cur.eat_digits(&mut buf);
                let mut frac_digits = 0;
                if cur.peek() == Some('.') {
                    buf.push('.');
                    cur.bump();
                    frac_digits = cur.eat_digits(&mut buf);
                }
                if int_digits + frac_digits == 0 {
                    return Err(lex_error(start, "expected digits in number"));
                }
                if matches!(cur.peek(), Some('e' | 'E')) {
                    buf.push('e');
                    cur.bump();
                    if let Some(sign @ ('+' | '-')) = cur.peek() {
                        buf.push(sign);
                        cur.bump();
                    }
                    if cur.eat_digits(&mut buf) == 0 {
                        return Err(lex_error(start, "malformed exponent in number"));
                    }
                }
                if cur.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
                    return Err(lex_error(start, "malformed number: letters directly after digits"));
                }
                let v: f64 = buf.parse().map_err(|_| lex_error(start, "malformed number"))?;
                Tok::Number(v)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(ch) = cur.peek().filter(|ch| ch.is_ascii_alphanumeric() || *ch == '_') {
                    s.push(ch);
                    cur.bump();
                }
                Tok::Ident(s)
            }
            other => return Err(lex_error(start, format!("unexpected character {other:?}"))),
        };
        out.push(Token { tok, span: Span { start, end: cur.pos } });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numbers() {
        assert_eq!(
            toks("1 2.5 .5 3. 1e3 2.5E-2 1.2345678901234567e1"),
            vec![
                Tok::Number(1.0),
                Tok::Number(2.5),
                Tok::Number(0.5),
                Tok::Number(3.0),
                Tok::Number(1e3),
                Tok::Number(2.5e-2),
                Tok::Number(1.2345678901234567e1),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("# header\n  resonate q0;").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("resonate".into()));
        assert_eq!(t[0].span.start, SourcePos { line: 2, column: 3 });
        assert_eq!(t[1].span.start, SourcePos { line: 2, column: 12 });
    }

    #[test]
    fn lexical_errors() {
        let e = tokenize("schedule \"x").unwrap_err();
        assert_eq!(e.position(), Some(SourcePos { line: 1, column: 10 }));
        let e = tokenize("a = 1e;").unwrap_err();
        assert_eq!(e.position(), Some(SourcePos { line: 1, column: 5 }));
        let e = tokenize("a @ b").unwrap_err();
        assert_eq!(e.position(), Some(SourcePos { line: 1, column: 3 }));
        assert!(tokenize("3q").is_err());
    }

    #[test]
    fn string_escapes() {
        assert_eq!(toks(r#""a\"b\\c""#), vec![Tok::Str("a\"b\\c".into()), Tok::Eof]);
    }
}
