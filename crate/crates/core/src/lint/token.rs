//! Lexer for sketch scripts.
//!
//! Produces every lexeme of the input, trivia included, so the concatenation
//! of token texts reconstructs the source byte for byte. Rules look only at
//! code tokens; comments and whitespace are trivia, and string literals are
//! single tokens so text inside them never matches a code pattern.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    /// Quoted string; `value` holds the decoded contents.
    Str,
    /// Backtick template; `value` holds the raw contents.
    Template,
    Regex,
    Punct,
    Whitespace,
    LineComment,
    BlockComment,
}

impl TokenKind {
    pub fn is_trivia(self) -> bool {
        matches!(
            self,
            TokenKind::Whitespace | TokenKind::LineComment | TokenKind::BlockComment
        )
    }

    pub fn is_string(self) -> bool {
        matches!(self, TokenKind::Str | TokenKind::Template)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub value: Option<String>,
    /// 1-based line of the first byte.
    pub line: usize,
    pub start: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_ident(&self, name: &str) -> bool {
        self.is(TokenKind::Ident, name)
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punct, text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexProblemKind {
    UnterminatedString,
    UnterminatedTemplate,
    UnterminatedComment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexProblem {
    pub kind: LexProblemKind,
    pub line: usize,
}

#[derive(Debug, Clone, Default)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub problems: Vec<LexProblem>,
}

impl TokenStream {
    /// Tokens that are not whitespace or comments.
    pub fn code(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| !t.kind.is_trivia())
    }

    /// Concatenation of every lexeme; equals the tokenized input.
    pub fn reconstruct(&self) -> String {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    /// Moves every line number down by `offset` lines (for scripts embedded
    /// in a larger file).
    pub fn shift_lines(&mut self, offset: usize) {
        for t in &mut self.tokens {
            t.line += offset;
        }
        for p in &mut self.problems {
            p.line += offset;
        }
    }
}

const PUNCTUATORS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "=>", "==", "!=",
    "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "**", "<<", ">>",
];

const REGEX_AFTER_KEYWORDS: &[&str] = &[
    "return", "typeof", "instanceof", "case", "do", "else", "in", "of", "new", "delete", "void",
    "throw", "yield", "await",
];

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    out: TokenStream,
    // whether a `/` at this point would start a regex rather than divide
    regex_ok: bool,
}

/// Splits `src` into lexemes with 1-based line numbers.
pub fn tokenize(src: &str) -> TokenStream {
    let mut lexer = Lexer {
        src,
        pos: 0,
        line: 1,
        out: TokenStream::default(),
        regex_ok: true,
    };
    while lexer.pos < src.len() {
        lexer.next_lexeme();
    }
    lexer.out
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn emit(&mut self, kind: TokenKind, end: usize, value: Option<String>) {
        let text = &self.src[self.pos..end];
        let line = self.line;
        self.line += text.matches('\n').count();
        if !kind.is_trivia() {
            self.regex_ok = match kind {
                TokenKind::Ident => REGEX_AFTER_KEYWORDS.contains(&text),
                TokenKind::Punct => !matches!(text, ")" | "]" | "}"),
                _ => false,
            };
        }
        self.out.tokens.push(Token {
            kind,
            text: text.to_string(),
            value,
            line,
            start: self.pos,
        });
        self.pos = end;
    }

    fn problem(&mut self, kind: LexProblemKind) {
        self.out.problems.push(LexProblem {
            kind,
            line: self.line,
        });
    }

    fn next_lexeme(&mut self) {
        let rest = self.rest();
        let c = self.peek().expect("not at end");
        if c.is_whitespace() {
            let len = rest
                .find(|ch: char| !ch.is_whitespace())
                .unwrap_or(rest.len());
            self.emit(TokenKind::Whitespace, self.pos + len, None);
        } else if rest.starts_with("//") {
            let len = rest.find('\n').unwrap_or(rest.len());
            self.emit(TokenKind::LineComment, self.pos + len, None);
        } else if rest.starts_with("/*") {
            match rest[2..].find("*/") {
                Some(i) => self.emit(TokenKind::BlockComment, self.pos + i + 4, None),
                None => {
                    self.problem(LexProblemKind::UnterminatedComment);
                    self.emit(TokenKind::BlockComment, self.src.len(), None);
                }
            }
        } else if c == '"' || c == '\'' {
            self.string(c);
        } else if c == '`' {
            self.template();
        } else if c.is_ascii_digit() || (c == '.' && rest[1..].starts_with(|d: char| d.is_ascii_digit())) {
            self.number();
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            let len = rest
                .find(|ch: char| !(ch.is_alphanumeric() || ch == '_' || ch == '$'))
                .unwrap_or(rest.len());
            self.emit(TokenKind::Ident, self.pos + len, None);
        } else if c == '/' && self.regex_ok {
            match scan_regex(rest) {
                Some(len) => self.emit(TokenKind::Regex, self.pos + len, None),
                None => self.punct(),
            }
        } else {
            self.punct();
        }
    }

    fn punct(&mut self) {
        let rest = self.rest();
        let len = PUNCTUATORS
            .iter()
            .find(|p| rest.starts_with(*p))
            .map(|p| p.len())
            .unwrap_or_else(|| rest.chars().next().map_or(1, char::len_utf8));
        self.emit(TokenKind::Punct, self.pos + len, None);
    }

    fn number(&mut self) {
        let bytes = self.rest().as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let b = bytes[i];
            let exponent_sign = (b == b'+' || b == b'-')
                && i > 0
                && matches!(bytes[i - 1], b'e' | b'E')
                && !self.rest()[..i].starts_with("0x")
                && !self.rest()[..i].starts_with("0X");
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || exponent_sign {
                i += 1;
            } else {
                break;
            }
        }
        self.emit(TokenKind::Number, self.pos + i, None);
    }

    fn string(&mut self, quote: char) {
        let rest = self.rest();
        let mut value = String::new();
        let mut chars = rest.char_indices().skip(1).peekable();
        while let Some((i, ch)) = chars.next() {
            match ch {
                c if c == quote => {
                    self.emit(TokenKind::Str, self.pos + i + 1, Some(value));
                    return;
                }
                '\n' => break,
                '\\' => {
                    let Some((_, esc)) = chars.next() else { break };
                    match esc {
                        'n' => value.push('\n'),
                        't' => value.push('\t'),
                        'r' => value.push('\r'),
                        'b' => value.push('\u{8}'),
                        'f' => value.push('\u{c}'),
                        'v' => value.push('\u{b}'),
                        '0' => value.push('\0'),
                        '\n' => {}
                        '\r' => {
                            if chars.peek().is_some_and(|(_, c)| *c == '\n') {
                                chars.next();
                            }
                        }
                        'x' => {
                            let hex: String = (0..2).filter_map(|_| chars.next().map(|(_, c)| c)).collect();
                            push_code_point(&mut value, &hex);
                        }
                        'u' => {
                            let hex: String = if chars.peek().is_some_and(|(_, c)| *c == '{') {
                                chars.next();
                                let mut h = String::new();
                                for (_, c) in chars.by_ref() {
                                    if c == '}' {
                                        break;
                                    }
                                    h.push(c);
                                }
                                h
                            } else {
                                (0..4).filter_map(|_| chars.next().map(|(_, c)| c)).collect()
                            };
                            push_code_point(&mut value, &hex);
                        }
                        other => value.push(other),
                    }
                }
                other => value.push(other),
            }
        }
        // unterminated: the literal runs to the end of its line
        self.problem(LexProblemKind::UnterminatedString);
        let len = rest.find('\n').unwrap_or(rest.len());
        self.emit(TokenKind::Str, self.pos + len, Some(value));
    }

    fn template(&mut self) {
        let rest = self.rest();
        let bytes = rest.as_bytes();
        let mut i = 1;
        let mut depth = 0usize;
        while i < bytes.len() {
            match bytes[i] {
                b'\\' => i += 1,
                b'`' if depth == 0 => {
                    let value = rest[1..i].to_string();
                    self.emit(TokenKind::Template, self.pos + i + 1, Some(value));
                    return;
                }
                b'$' if depth == 0 && bytes.get(i + 1) == Some(&b'{') => {
                    depth = 1;
                    i += 1;
                }
                b'{' if depth > 0 => depth += 1,
                b'}' if depth > 0 => depth -= 1,
                _ => {}
            }
            i += 1;
        }
        self.problem(LexProblemKind::UnterminatedTemplate);
        let value = rest[1..].to_string();
        self.emit(TokenKind::Template, self.src.len(), Some(value));
    }
}

fn push_code_point(out: &mut String, hex: &str) {
    if let Some(c) = u32::from_str_radix(hex, 16).ok().and_then(char::from_u32) {
        out.push(c);
    }
}

/// Length of a regex literal at the start of `rest`, or `None` when the
/// line ends before the closing slash.
fn scan_regex(rest: &str) -> Option<usize> {
    let bytes = rest.as_bytes();
    if bytes.get(1).is_some_and(|b| *b == b'/' || *b == b'*') {
        return None;
    }
    let mut i = 1;
    let mut in_class = false;
    while i < bytes.len() {
        match bytes[i] {
            b'\n' | b'\r' => return None,
            b'\\' => i += 1,
            b'[' => in_class = true,
            b']' => in_class = false,
            b'/' if !in_class => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                return Some(i);
            }
            _ => {}
        }
        i += 1;
    }
    None
}
