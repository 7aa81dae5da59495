//! Text normalization helpers shared by every stage.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Join key for concepts: NFC, lowercased, whitespace collapsed.
pub fn concept_id(label: &str) -> String {
    let nfc: String = label.nfc().collect::<String>().to_lowercase();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercased NFC word tokens; everything that is not alphanumeric separates.
pub fn word_tokens(label: &str) -> Vec<String> {
    let nfc: String = label.nfc().collect::<String>().to_lowercase();
    nfc.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn strip_accents(s: &str) -> String {
    s.nfd().filter(|c| !is_combining_mark(*c)).nfc().collect()
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{02BC}')
}

/// A token as cut from raw text, before any lexicon lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken {
    pub surface: String,
    /// Character index of the first character.
    pub offset: usize,
    /// Character index one past the last character.
    pub end: usize,
}

/// Splits text into words and punctuation marks.
///
/// Words are maximal alphanumeric runs; a hyphen between two alphanumerics
/// keeps the compound together, and an apostrophe between two alphanumerics
/// ends an elided article (`l'`, `d'`) which becomes its own token with a
/// straight apostrophe. Any other non-space character is a one-character
/// punctuation token.
pub fn tokenize(text: &str) -> Vec<RawToken> {
    let chars: Vec<char> = text.nfc().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if !c.is_alphanumeric() {
            tokens.push(RawToken {
                surface: c.to_string(),
                offset: i,
                end: i + 1,
            });
            i += 1;
            continue;
        }
        let mut start = i;
        loop {
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            let joins_next = i + 1 < chars.len() && chars[i + 1].is_alphanumeric();
            if i < chars.len() && chars[i] == '-' && joins_next {
                i += 1;
            } else if i < chars.len() && is_apostrophe(chars[i]) && joins_next {
                let mut surface: String = chars[start..i].iter().collect();
                surface.push('\'');
                tokens.push(RawToken {
                    surface,
                    offset: start,
                    end: i + 1,
                });
                i += 1;
                start = i;
            } else {
                break;
            }
        }
        tokens.push(RawToken {
            surface: chars[start..i].iter().collect(),
            offset: start,
            end: i,
        });
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn elision_is_split_and_hyphens_kept() {
        assert_eq!(
            surfaces("l’état d'un relais tout-ou-rien."),
            ["l'", "état", "d'", "un", "relais", "tout-ou-rien", "."]
        );
    }

    #[test]
    fn offsets_are_character_indices() {
        let toks = tokenize("é relais");
        assert_eq!(toks[1].offset, 2);
        assert_eq!(toks[1].end, 8);
    }

    #[test]
    fn stray_marks_are_punctuation() {
        assert_eq!(surfaces("« relais » -x '"), ["«", "relais", "»", "-", "x", "'"]);
    }

    #[test]
    fn concept_ids_collapse_case_and_space() {
        assert_eq!(concept_id("  Relais   à Seuil "), "relais à seuil");
        // decomposed "à" normalizes to the composed form
        assert_eq!(concept_id("a\u{0300}"), "à");
    }

    #[test]
    fn accents_stripped() {
        assert_eq!(strip_accents("électromagnétique à"), "electromagnetique a");
    }

    #[test]
    fn word_tokens_split_on_any_punctuation() {
        assert_eq!(word_tokens("relais d'intensité tout-ou-rien"), ["relais", "d", "intensité", "tout", "ou", "rien"]);
    }
}
