use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    ChemAtom,
    ChemBond,
    Structural,
    IndexOpen,
    IndexClose,
    Digit,
    Table,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>) -> Self {
        Token {
            kind,
            text: text.into(),
        }
    }

    pub(crate) fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }
}

pub const INDEX_OPEN: &str = "<i>";
pub const INDEX_CLOSE: &str = "</i>";
pub const TABLE_START: &str = "<t>";
pub const GROUP_START: &str = "<g>";
pub const VALUES_START: &str = "<v>";
pub const SEPARATOR: &str = "<sep>";

/// Backbone (with its extension sections) and substituent-table tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub backbone: Vec<Token>,
    pub table: Vec<Token>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.backbone.len() + self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backbone.is_empty() && self.table.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.backbone.iter().chain(&self.table)
    }

    pub fn to_text(&self) -> String {
        self.tokens().map(|t| t.text.as_str()).collect()
    }

    /// Splits serialized text into tokens. Total: unrecognized characters
    /// become `Text` tokens in the backbone.
    pub fn from_text(text: &str) -> TokenSequence {
        tokenize(text)
    }
}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

const LABEL_ESCAPED: [char; 14] = ['&', ';', '$', '|', ',', ':', ' ', '{', '}', '<', '>', '.', '[', ']'];

/// Escapes a label for use inside `{...}` atoms and extension sections.
pub(crate) fn escape_label(label: &str) -> String {
    let mut s = String::with_capacity(label.len());
    for c in label.chars() {
        if LABEL_ESCAPED.contains(&c) || c.is_whitespace() {
            s.push_str(&format!("&#{};", c as u32));
        } else {
            s.push(c);
        }
    }
    s
}

/// Escapes free table text.
pub(crate) fn escape_text(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub(crate) fn unescape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(p) = rest.find('&') {
        out.push_str(&rest[..p]);
        rest = &rest[p..];
        let (c, len) = [("&amp;", '&'), ("&lt;", '<'), ("&gt;", '>')]
            .into_iter()
            .find(|(e, _)| rest.starts_with(e))
            .map_or(('&', 1), |(e, c)| (c, e.len()));
        out.push(c);
        rest = &rest[len..];
    }
    out.push_str(rest);
    out
}

/// Length of a `&#NN;` escape at the start of `s`, if any.
fn escape_len(s: &str) -> Option<usize> {
    let rest = s.strip_prefix("&#")?;
    let digits = rest.bytes().take_while(u8::is_ascii_digit).count();
    (digits > 0 && rest.as_bytes().get(digits) == Some(&b';')).then_some(digits + 3)
}

const ORGANIC_TWO: [&str; 2] = ["Cl", "Br"];
const ORGANIC_ONE: &str = "BCNOPSFIbcnops*";

#[derive(PartialEq)]
enum Mode {
    Backbone,
    Extension,
    Table,
}

fn tokenize(text: &str) -> TokenSequence {
    let mut seq = TokenSequence::default();
    let mut mode = Mode::Backbone;
    let mut in_index = false;
    // position inside the current extension section: fields seen, keyword
    let mut field = 0usize;
    let mut keyword = String::new();
    let mut rest = text;

    while !rest.is_empty() {
        if rest.starts_with(TABLE_START) {
            seq.table.push(Token::new(TokenKind::Table, TABLE_START));
            rest = &rest[TABLE_START.len()..];
            mode = Mode::Table;
            continue;
        }
        match mode {
            Mode::Backbone => {
                let (token, len) = backbone_token(rest, &mut in_index);
                if token.is(TokenKind::Structural, "|") {
                    mode = Mode::Extension;
                    field = 0;
                    keyword.clear();
                }
                seq.backbone.push(token);
                rest = &rest[len..];
            }
            Mode::Extension => {
                let c = rest.chars().next().expect("non-empty");
                let (token, len) = if ",:.|".contains(c) {
                    if c == ',' {
                        field = 0;
                        keyword.clear();
                    } else if c == ':' {
                        field += 1;
                    }
                    (Token::new(TokenKind::Structural, c), 1)
                } else if c.is_ascii_digit() {
                    (Token::new(TokenKind::Digit, c), 1)
                } else {
                    let mut len = 0;
                    while len < rest.len() {
                        let tail = &rest[len..];
                        if let Some(e) = escape_len(tail) {
                            len += e;
                            continue;
                        }
                        let ch = tail.chars().next().expect("non-empty");
                        if ",:.|".contains(ch) || ch.is_ascii_digit() || tail.starts_with(TABLE_START) {
                            break;
                        }
                        len += ch.len_utf8();
                    }
                    let word = &rest[..len];
                    let is_keyword = (field == 0 && keyword.is_empty() && (word == "m" || word == "Sg"))
                        || (field == 1 && keyword == "Sg" && word == "n");
                    if field == 0 && keyword.is_empty() {
                        keyword = word.to_string();
                    }
                    let kind = if is_keyword { TokenKind::Structural } else { TokenKind::Text };
                    (Token::new(kind, word), len)
                };
                seq.backbone.push(token);
                rest = &rest[len..];
            }
            Mode::Table => {
                let marker = [GROUP_START, VALUES_START, SEPARATOR].into_iter().find(|m| rest.starts_with(m));
                if let Some(m) = marker {
                    seq.table.push(Token::new(TokenKind::Table, m));
                    rest = &rest[m.len()..];
                    continue;
                }
                // text runs end at the next marker-like '<'
                let first = rest.chars().next().map_or(1, char::len_utf8);
                let len = rest[first..].find('<').map_or(rest.len(), |p| p + first);
                seq.table.push(Token::new(TokenKind::Text, &rest[..len]));
                rest = &rest[len..];
            }
        }
    }
    seq
}

fn backbone_token(rest: &str, in_index: &mut bool) -> (Token, usize) {
    if rest.starts_with(INDEX_OPEN) {
        *in_index = true;
        return (Token::new(TokenKind::IndexOpen, INDEX_OPEN), INDEX_OPEN.len());
    }
    if rest.starts_with(INDEX_CLOSE) {
        *in_index = false;
        return (Token::new(TokenKind::IndexClose, INDEX_CLOSE), INDEX_CLOSE.len());
    }
    let c = rest.chars().next().expect("non-empty");
    if c.is_ascii_digit() {
        let kind = if *in_index { TokenKind::Digit } else { TokenKind::Structural };
        return (Token::new(kind, c), 1);
    }
    *in_index = false;
    let single = |kind| (Token::new(kind, c), c.len_utf8());
    match c {
        '[' | '{' => {
            let close = if c == '[' { ']' } else { '}' };
            match rest.find(close) {
                Some(end) => (Token::new(TokenKind::ChemAtom, &rest[..=end]), end + 1),
                None => (Token::new(TokenKind::Text, rest), rest.len()),
            }
        }
        '%' => {
            let digits = rest[1..].bytes().take(2).take_while(u8::is_ascii_digit).count();
            if digits == 2 {
                (Token::new(TokenKind::Structural, &rest[..3]), 3)
            } else {
                single(TokenKind::Text)
            }
        }
        '-' | '=' | '#' | ':' | '/' | '\\' => single(TokenKind::ChemBond),
        '(' | ')' | '.' | '|' => single(TokenKind::Structural),
        _ => {
            if let Some(two) = ORGANIC_TWO.iter().find(|t| rest.starts_with(**t)) {
                return (Token::new(TokenKind::ChemAtom, *two), 2);
            }
            if ORGANIC_ONE.contains(c) {
                single(TokenKind::ChemAtom)
            } else {
                single(TokenKind::Text)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<(TokenKind, String)> {
        TokenSequence::from_text(text)
            .tokens()
            .map(|t| (t.kind, t.text.clone()))
            .collect()
    }

    #[test]
    fn backbone_tokens() {
        use TokenKind::*;
        let k = kinds("C<i>0</i>1Cl<i>12</i>=[nH+]<i>2</i>");
        let expected = [
            (ChemAtom, "C"),
            (IndexOpen, "<i>"),
            (Digit, "0"),
            (IndexClose, "</i>"),
            (Structural, "1"),
            (ChemAtom, "Cl"),
            (IndexOpen, "<i>"),
            (Digit, "1"),
            (Digit, "2"),
            (IndexClose, "</i>"),
            (ChemBond, "="),
            (ChemAtom, "[nH+]"),
            (IndexOpen, "<i>"),
            (Digit, "2"),
            (IndexClose, "</i>"),
        ];
        assert_eq!(k, expected.map(|(k, t)| (k, t.to_string())));
    }

    #[test]
    fn extension_and_table_tokens() {
        use TokenKind::*;
        let k = kinds("{R1}<i>0</i>|Sg:n:0:n:ht<t><g>n<v>1-5");
        assert_eq!(k[0], (ChemAtom, "{R1}".to_string()));
        assert!(k.contains(&(Structural, "Sg".to_string())));
        assert!(k.contains(&(Structural, "n".to_string())));
        assert!(k.contains(&(Text, "n".to_string())));
        assert!(k.contains(&(Text, "ht".to_string())));
        assert_eq!(&k[k.len() - 4..], &[
            (Table, "<g>".to_string()),
            (Text, "n".to_string()),
            (Table, "<v>".to_string()),
            (Text, "1-5".to_string()),
        ]);
    }

    #[test]
    fn text_round_trip() {
        for text in [
            "",
            "C<i>0</i>C<i>1</i>O<i>2</i>",
            "*<i>0</i>c<i>1</i>1ccccc1|m:0:1.2.3,Sg:n:2.3:&#32;x:hh<t><g>R1<sep>R2<v>a&lt;b<sep>c",
            "garbage ?? <i>x",
        ] {
            assert_eq!(TokenSequence::from_text(text).to_text(), text);
        }
    }

    #[test]
    fn escapes() {
        assert_eq!(escape_label("a b.c"), "a&#32;b&#46;c");
        assert_eq!(unescape_text(&escape_text("<sep>&amp;")), "<sep>&amp;");
    }
}
