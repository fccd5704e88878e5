//! Splitting compound sentences into simple ones.

use super::lexicon::{is_stopword, Lexicons};
use crate::corpus::is_word;

const CONJUNCTIONS: &[&str] = &["and", "but", "then", "while"];
const AUXILIARIES: &[&str] = &["is", "are", "was", "were", "am"];

fn is_verb(token: &str, lexicons: &Lexicons) -> bool {
    !is_stopword(token) && !lexicons.is_person(token) && lexicons.action_base(token).is_some()
}

fn is_aux(token: &str) -> bool {
    AUXILIARIES.contains(&token.to_lowercase().as_str())
}

fn has_verb(tokens: &[String], lexicons: &Lexicons) -> bool {
    tokens.iter().any(|t| is_verb(t, lexicons))
}

/// Tokens before the first auxiliary or verb.
fn subject<'a>(tokens: &'a [String], lexicons: &Lexicons) -> &'a [String] {
    let end = tokens
        .iter()
        .position(|t| is_aux(t) || is_verb(t, lexicons))
        .unwrap_or(0);
    &tokens[..end]
}

fn trim_trailing_punct(mut tokens: Vec<String>) -> Vec<String> {
    while tokens.last().is_some_and(|t| !is_word(t)) {
        tokens.pop();
    }
    tokens
}

fn capitalize(tokens: &mut [String]) {
    if let Some(first) = tokens.first_mut() {
        let mut c = first.chars();
        if let Some(f) = c.next() {
            *first = f.to_uppercase().chain(c).collect();
        }
    }
}

/// Split at coordinating conjunctions that join two clauses which both
/// contain a verb. A clause without its own subject borrows the first
/// clause's subject (and auxiliary, for a bare participle). Sentences with
/// no split point come back as a single-element list.
pub fn simplify(tokens: &[String], lexicons: &Lexicons) -> Vec<Vec<String>> {
    let split = tokens.iter().enumerate().find_map(|(i, t)| {
        let l = t.to_lowercase();
        if !CONJUNCTIONS.contains(&l.as_str()) || i == 0 {
            return None;
        }
        let mut rest = i + 1;
        if rest < tokens.len() && tokens[rest].eq_ignore_ascii_case("then") {
            rest += 1;
        }
        let (left, right) = (&tokens[..i], &tokens[rest..]);
        (has_verb(left, lexicons) && has_verb(right, lexicons)).then_some((i, rest))
    });
    let Some((conj, rest)) = split else {
        return vec![tokens.to_vec()];
    };
    let first = trim_trailing_punct(tokens[..conj].to_vec());
    let right = &tokens[rest..];
    let subj = subject(&first, lexicons);
    let mut second: Vec<String> = match right.first() {
        Some(t) if is_aux(t) && !subj.is_empty() => subj.iter().chain(right).cloned().collect(),
        Some(t) if is_verb(t, lexicons) && !subj.is_empty() => {
            let aux = first.get(subj.len()).filter(|a| is_aux(a));
            let participle = t.to_lowercase().ends_with("ing");
            let prefix: Vec<String> = match aux {
                Some(a) if participle => subj.iter().chain(std::iter::once(a)).cloned().collect(),
                _ => subj.to_vec(),
            };
            prefix.into_iter().chain(right.iter().cloned()).collect()
        }
        _ => {
            let mut r = right.to_vec();
            capitalize(&mut r);
            r
        }
    };
    if subj.first().is_some_and(|t| t.chars().next().is_some_and(char::is_uppercase)) {
        capitalize(&mut second);
    }
    let mut out = vec![first];
    out.extend(simplify(&second, lexicons));
    out
}
