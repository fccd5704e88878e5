//! Word tokenizer used for annotation spans and text transforms.
//!
//! Splits on whitespace and peels the characters `.,!?;:"'()` off both ends
//! of every chunk as single-character tokens. Case is preserved.

const EDGE_PUNCT: &[char] = &['.', ',', '!', '?', ';', ':', '"', '\'', '(', ')'];

pub fn is_edge_punct(c: char) -> bool {
    EDGE_PUNCT.contains(&c)
}

/// True for tokens that carry at least one alphanumeric character.
pub fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric)
}

pub fn tokenize(raw: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in raw.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        while start < chars.len() && is_edge_punct(chars[start]) {
            out.push(chars[start].to_string());
            start += 1;
        }
        let mut end = chars.len();
        while end > start && is_edge_punct(chars[end - 1]) {
            end -= 1;
        }
        if start < end {
            out.push(chars[start..end].iter().collect());
        }
        out.extend(chars[end..].iter().map(|c| c.to_string()));
    }
    out
}

fn attaches_left(tok: &str) -> bool {
    matches!(tok, "." | "," | "!" | "?" | ";" | ":" | ")")
}

/// Join tokens back into text. Closing punctuation attaches to the previous
/// token and `(` to the next; `tokenize(&detokenize(t)) == t` for any `t`
/// produced by [`tokenize`].
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut glue_next = false;
    for (i, tok) in tokens.iter().enumerate() {
        let tok = tok.as_ref();
        if i > 0 && !glue_next && !attaches_left(tok) {
            out.push(' ');
        }
        out.push_str(tok);
        glue_next = tok == "(";
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn splits_trailing_period() {
        assert_eq!(tokenize("He throws a dart."), ["He", "throws", "a", "dart", "."]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \t").is_empty());
    }

    #[test]
    fn standalone_comma() {
        assert_eq!(tokenize("a man , smiling"), ["a", "man", ",", "smiling"]);
    }

    #[test]
    fn peels_both_ends_and_keeps_inner() {
        assert_eq!(
            tokenize("(don't!) \"ok\""),
            ["(", "don't", "!", ")", "\"", "ok", "\""]
        );
        assert_eq!(tokenize("..."), [".", ".", "."]);
    }

    #[test]
    fn detokenize_attaches_punctuation() {
        let toks = tokenize("A man (smiling) throws a dart, then leaves.");
        assert_eq!(detokenize(&toks), "A man (smiling) throws a dart, then leaves.");
    }

    proptest! {
        #[test]
        fn retokenize_is_fixed_point(s in "[a-zA-Z.,!?;:'\"() \\-]{0,40}") {
            let toks = tokenize(&s);
            prop_assert_eq!(tokenize(&detokenize(&toks)), toks);
        }
    }
}
