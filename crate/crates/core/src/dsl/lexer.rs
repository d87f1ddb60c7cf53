use std::fmt;

use super::{DslError, ErrorKind, Pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    State,
    Terminal,
    Action,
    Gamma,
    Reward,
}

impl Keyword {
    fn from_word(word: &str) -> Option<Keyword> {
        Some(match word {
            "state" => Keyword::State,
            "terminal" => Keyword::Terminal,
            "action" => Keyword::Action,
            "gamma" => Keyword::Gamma,
            "reward" => Keyword::Reward,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Amp,
    Pipe,
    Gt,
    Star,
    LParen,
    RParen,
    Number,
    Keyword(Keyword),
    Newline,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Ident => "identifier",
            TokenKind::Amp => "`&`",
            TokenKind::Pipe => "`|`",
            TokenKind::Gt => "`>`",
            TokenKind::Star => "`*`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::Number => "number",
            TokenKind::Keyword(Keyword::State) => "`state`",
            TokenKind::Keyword(Keyword::Terminal) => "`terminal`",
            TokenKind::Keyword(Keyword::Action) => "`action`",
            TokenKind::Keyword(Keyword::Gamma) => "`gamma`",
            TokenKind::Keyword(Keyword::Reward) => "`reward`",
            TokenKind::Newline => "end of line",
            TokenKind::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    pub pos: Pos,
}

impl Token<'_> {
    /// Numeric value of a `Number` token.
    pub fn number(&self) -> f64 {
        self.text.parse().expect("lexer only emits parseable numbers")
    }
}

/// Splits DSL source into tokens. `#` starts a comment running to the end
/// of the line; newlines are kept as statement separators.
pub fn tokenize(text: &str) -> Result<Vec<Token<'_>>, DslError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut line = 1;
    let mut line_start = 0;

    while let Some(&(offset, c)) = chars.peek() {
        // Columns count characters, not bytes.
        let pos = Pos {
            line,
            col: text[line_start..offset].chars().count() + 1,
        };
        let single = |kind| Token {
            kind,
            text: &text[offset..offset + c.len_utf8()],
            pos,
        };
        match c {
            '\n' => {
                chars.next();
                tokens.push(single(TokenKind::Newline));
                line += 1;
                line_start = offset + 1;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while chars.next_if(|&(_, c)| c != '\n').is_some() {}
            }
            '&' | '|' | '>' | '*' | '(' | ')' => {
                chars.next();
                tokens.push(single(match c {
                    '&' => TokenKind::Amp,
                    '|' => TokenKind::Pipe,
                    '>' => TokenKind::Gt,
                    '*' => TokenKind::Star,
                    '(' => TokenKind::LParen,
                    _ => TokenKind::RParen,
                }));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = offset;
                while let Some((i, c)) = chars.next_if(|&(_, c)| c.is_ascii_alphanumeric() || c == '_') {
                    end = i + c.len_utf8();
                }
                let word = &text[offset..end];
                let kind = Keyword::from_word(word).map_or(TokenKind::Ident, TokenKind::Keyword);
                tokens.push(Token { kind, text: word, pos });
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' => {
                let end = scan_number(text, offset).ok_or_else(|| {
                    DslError::new(ErrorKind::Lex(format!("malformed number starting with `{c}`")), pos)
                })?;
                while chars.next_if(|&(i, _)| i < end).is_some() {}
                let literal = &text[offset..end];
                match literal.parse::<f64>() {
                    Ok(v) if v.is_finite() => tokens.push(Token {
                        kind: TokenKind::Number,
                        text: literal,
                        pos,
                    }),
                    _ => {
                        return Err(DslError::new(
                            ErrorKind::Lex(format!("number `{literal}` is not a finite real")),
                            pos,
                        ))
                    }
                }
            }
            other => {
                return Err(DslError::new(
                    ErrorKind::Lex(format!("unexpected character `{other}`")),
                    pos,
                ))
            }
        }
    }

    let col = text[line_start..].chars().count() + 1;
    tokens.push(Token {
        kind: TokenKind::Eof,
        text: "",
        pos: Pos { line, col },
    });
    Ok(tokens)
}

/// Returns the end offset of `[+-]? (digits [. digits*] | . digits) ([eE] [+-]? digits)?`.
fn scan_number(text: &str, start: usize) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut i = start;
    if matches!(bytes.get(i), Some(b'+' | b'-')) {
        i += 1;
    }
    let int_start = i;
    while bytes.get(i).is_some_and(u8::is_ascii_digit) {
        i += 1;
    }
    let mut digits = i - int_start;
    if bytes.get(i) == Some(&b'.') {
        i += 1;
        let frac_start = i;
        while bytes.get(i).is_some_and(u8::is_ascii_digit) {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if matches!(bytes.get(i), Some(b'e' | b'E')) {
        let mut j = i + 1;
        if matches!(bytes.get(j), Some(b'+' | b'-')) {
            j += 1;
        }
        let exp_start = j;
        while bytes.get(j).is_some_and(u8::is_ascii_digit) {
            j += 1;
        }
        if j == exp_start {
            return None;
        }
        i = j;
    }
    Some(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn transition_line() {
        use TokenKind::*;
        assert_eq!(
            kinds("start & a1 > reward(1.0)"),
            vec![Ident, Amp, Ident, Gt, Keyword(super::Keyword::Reward), LParen, Number, RParen, Eof]
        );
    }

    #[test]
    fn weighted_keyword() {
        use TokenKind::*;
        assert_eq!(kinds("state * 3"), vec![Keyword(super::Keyword::State), Star, Number, Eof]);
    }

    #[test]
    fn illegal_character_position() {
        let err = tokenize("st@rt").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 3 });
        assert!(matches!(err.kind, ErrorKind::Lex(_)));
    }

    #[test]
    fn numbers_and_comments() {
        let toks = tokenize("reward(-1.) # trailing\nreward(2.5e-1)\n").unwrap();
        let nums: Vec<f64> = toks.iter().filter(|t| t.kind == TokenKind::Number).map(Token::number).collect();
        assert_eq!(nums, vec![-1.0, 0.25]);
        assert_eq!(toks.iter().filter(|t| t.kind == TokenKind::Newline).count(), 2);
        assert_eq!(toks.last().unwrap().pos, Pos { line: 3, col: 1 });
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("state a\n  action b").unwrap();
        let b = toks.iter().find(|t| t.text == "b").unwrap();
        assert_eq!(b.pos, Pos { line: 2, col: 10 });
    }

    #[test]
    fn malformed_numbers() {
        assert!(tokenize("-").is_err());
        assert!(tokenize("1e").is_err());
        assert!(tokenize("1e999").is_err());
        assert!(tokenize(".").is_err());
    }
}
