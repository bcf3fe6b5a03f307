//! Canonical text form of token lists.

use thiserror::Error;

use super::Token;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("token {index}: word {word:?} contains a reserved token surface string")]
    ReservedWord { index: usize, word: String },
    #[error("token {index}: words must be non-empty and free of whitespace")]
    MalformedWord { index: usize },
}

const FIXED: [(&str, Token); 8] = [
    ("<boxs>", Token::BoxStart),
    ("<boxe>", Token::BoxEnd),
    ("<adds>", Token::AddStart),
    ("<adde>", Token::AddEnd),
    ("<dels>", Token::DelStart),
    ("<dele>", Token::DelEnd),
    ("<mods>", Token::ModStart),
    ("<mode>", Token::ModEnd),
];

const COORD_PREFIX: &str = "<coord_";

/// Recognizes a reserved token at the start of `s`, returning it and the
/// number of bytes it spans.
fn match_reserved(s: &str) -> Option<(Token, usize)> {
    if !s.starts_with('<') {
        return None;
    }
    for (surface, tok) in &FIXED {
        if s.starts_with(surface) {
            return Some((tok.clone(), surface.len()));
        }
    }
    let rest = s.strip_prefix(COORD_PREFIX)?;
    let digits = rest.bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 || rest.as_bytes().get(digits) != Some(&b'>') {
        return None;
    }
    let bin: u32 = rest[..digits].parse().ok()?;
    Some((Token::Coord(bin), COORD_PREFIX.len() + digits + 1))
}

/// True if the lexer would find a reserved token anywhere inside `word`.
pub(crate) fn contains_reserved(word: &str) -> bool {
    word.char_indices()
        .any(|(i, _)| match_reserved(&word[i..]).is_some())
}

/// Renders tokens as text. Reserved tokens are written back to back; a single
/// space separates any pair of neighbours in which at least one is a word.
pub fn render_tokens(tokens: &[Token]) -> Result<String, RenderError> {
    let mut out = String::new();
    let mut prev_word = false;
    for (index, tok) in tokens.iter().enumerate() {
        match tok {
            Token::Word(w) => {
                if w.is_empty() || w.chars().any(char::is_whitespace) {
                    return Err(RenderError::MalformedWord { index });
                }
                if contains_reserved(w) {
                    return Err(RenderError::ReservedWord {
                        index,
                        word: w.clone(),
                    });
                }
                if index > 0 {
                    out.push(' ');
                }
                out.push_str(w);
                prev_word = true;
            }
            other => {
                if prev_word {
                    out.push(' ');
                }
                out.push_str(&other.surface().unwrap_or_default());
                prev_word = false;
            }
        }
    }
    Ok(out)
}

/// Splits text into tokens. Reserved surface strings become their tokens
/// wherever they appear; everything else is split on whitespace into words.
/// Never fails: out-of-range coordinate bins are left for the parser.
pub fn lex(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut pending_start = 0;
    let mut i = 0;
    while i < text.len() {
        if let Some((tok, len)) = match_reserved(&text[i..]) {
            out.extend(text[pending_start..i].split_whitespace().map(Token::word));
            out.push(tok);
            i += len;
            pending_start = i;
        } else {
            i += text[i..].chars().next().map_or(1, char::len_utf8);
        }
    }
    out.extend(text[pending_start..].split_whitespace().map(Token::word));
    out
}
