use super::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Names, numbers and keywords share one class; numbers are words of digits.
    Word(String),
    Str(String),
    Punct(char),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

const PUNCT: &str = "{}[]()/=,;";

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || "_-.'*+".contains(c)
}

pub(crate) fn lex(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    macro_rules! advance {
        ($c:expr) => {{
            if $c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }};
    }
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                advance!(c);
            }
        } else if c.is_whitespace() {
            chars.next();
            advance!(c);
        } else if PUNCT.contains(c) {
            chars.next();
            advance!(c);
            out.push(Token { tok: Tok::Punct(c), span });
        } else if c == '"' {
            chars.next();
            advance!(c);
            let mut s = String::new();
            let mut closed = false;
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                advance!(c);
                if c == '"' {
                    closed = true;
                    break;
                }
                s.push(c);
            }
            if !closed {
                diags.push(Diagnostic::new(span, "unterminated string"));
            }
            out.push(Token { tok: Tok::Str(s), span });
        } else if is_word(c) {
            let mut w = String::new();
            while let Some(&c) = chars.peek() {
                if !is_word(c) {
                    break;
                }
                chars.next();
                advance!(c);
                w.push(c);
            }
            out.push(Token { tok: Tok::Word(w), span });
        } else {
            chars.next();
            advance!(c);
            diags.push(Diagnostic::new(span, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, col },
    });
    (out, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let (t, d) = lex("op f/2 = [0 1] # note\n  rel");
        assert!(d.is_empty());
        let words: Vec<&Tok> = t.iter().map(|t| &t.tok).collect();
        assert_eq!(words[0], &Tok::Word("op".into()));
        assert_eq!(words[2], &Tok::Punct('/'));
        assert_eq!(t[t.len() - 2].span, Span { line: 2, col: 3 });
        assert_eq!(t.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn bad_characters_are_reported_and_skipped() {
        let (t, d) = lex("a @ b");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].span, Span { line: 1, col: 3 });
        assert_eq!(t.len(), 3);
    }
}
