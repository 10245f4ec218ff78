use super::error::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    Str(String),
    // Keywords.
    New,
    If,
    Then,
    Else,
    True,
    False,
    Not,
    Sessions,
    Env,
    End,
    IntTy,
    BoolTy,
    StringTy,
    // Punctuation.
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Shl,
    Shr,
    Le,
    EqEq,
    AndAnd,
    Amp,
    Plus,
    Minus,
    Star,
    Bar,
    Dot,
    Comma,
    Colon,
    Semi,
    Question,
    Bang,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::New => "new",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Not => "not",
            Tok::Sessions => "sessions",
            Tok::Env => "env",
            Tok::End => "end",
            Tok::IntTy => "int",
            Tok::BoolTy => "bool",
            Tok::StringTy => "string",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Shl => "<<",
            Tok::Shr => ">>",
            Tok::Le => "<=",
            Tok::EqEq => "==",
            Tok::AndAnd => "&&",
            Tok::Amp => "&",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Bar => "|",
            Tok::Dot => ".",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Question => "?",
            Tok::Bang => "!",
            Tok::Ident(_) | Tok::Int(_) | Tok::Str(_) | Tok::Eof => "",
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "new", "if", "then", "else", "true", "false", "not", "sessions", "env", "end", "int", "bool",
    "string",
];

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "new" => Tok::New,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "true" => Tok::True,
        "false" => Tok::False,
        "not" => Tok::Not,
        "sessions" => Tok::Sessions,
        "env" => Tok::Env,
        "end" => Tok::End,
        "int" => Tok::IntTy,
        "bool" => Tok::BoolTy,
        "string" => Tok::StringTy,
        _ => return None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            while i < chars.len() && chars[i] == '\'' {
                s.push('\'');
                advance(&mut i, &mut line, &mut col, '\'');
            }
            out.push((keyword(&s).unwrap_or(Tok::Ident(s)), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                let d = chars[i] as u64 - '0' as u64;
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(d))
                    .ok_or(ParseError::new(pos, ParseErrorKind::IntOverflow))?;
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            out.push((Tok::Int(n), pos));
            continue;
        }
        if c == '"' {
            advance(&mut i, &mut line, &mut col, c);
            let mut s = String::new();
            loop {
                let Some(&c) = chars.get(i) else {
                    return Err(ParseError::new(pos, ParseErrorKind::UnterminatedString));
                };
                advance(&mut i, &mut line, &mut col, c);
                match c {
                    '"' => break,
                    '\\' => {
                        let esc_pos = Pos { line, col };
                        let Some(&e) = chars.get(i) else {
                            return Err(ParseError::new(pos, ParseErrorKind::UnterminatedString));
                        };
                        advance(&mut i, &mut line, &mut col, e);
                        s.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            '\\' => '\\',
                            '"' => '"',
                            other => {
                                return Err(ParseError::new(
                                    esc_pos,
                                    ParseErrorKind::BadEscape(other),
                                ))
                            }
                        });
                    }
                    c => s.push(c),
                }
            }
            out.push((Tok::Str(s), pos));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            ('<', Some('<')) => (Tok::Shl, 2),
            ('>', Some('>')) => (Tok::Shr, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('=', Some('=')) => (Tok::EqEq, 2),
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('&', _) => (Tok::Amp, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('|', _) => (Tok::Bar, 1),
            ('.', _) => (Tok::Dot, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            (';', _) => (Tok::Semi, 1),
            ('?', _) => (Tok::Question, 1),
            ('!', _) => (Tok::Bang, 1),
            _ => return Err(ParseError::new(pos, ParseErrorKind::BadChar(c))),
        };
        for _ in 0..len {
            {
                let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
            }
        }
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn primes_and_double_angles() {
        assert_eq!(
            toks("k'' << ok"),
            vec![
                Tok::Ident("k''".into()),
                Tok::Shl,
                Tok::Ident("ok".into()),
                Tok::Eof
            ]
        );
        assert_eq!(
            toks("x<=1 && y"),
            vec![
                Tok::Ident("x".into()),
                Tok::Le,
                Tok::Int(1),
                Tok::AndAnd,
                Tok::Ident("y".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_and_comments() {
        let t = tokenize("// hi\n  k").unwrap();
        assert_eq!(t[0].1, Pos { line: 2, col: 3 });
    }

    #[test]
    fn rejects_reserved_prefix() {
        let e = tokenize("#inh0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::BadChar('#'));
    }

    #[test]
    fn string_escapes() {
        assert_eq!(
            toks(r#""a\"b\n""#),
            vec![Tok::Str("a\"b\n".into()), Tok::Eof]
        );
    }
}
