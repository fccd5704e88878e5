//! Rule-based corruptions. Each takes a tokenized sentence and returns the
//! corrupted tokens, or `None` when the rule does not apply. A returned
//! sentence always differs from the input in at least one token.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lexicon::{ing_form, is_stopword, s_form, Lexicons};
use crate::corpus::is_word;

pub const UNK: &str = "UNK";

const AUXILIARIES: &[&str] = &["is", "are", "was", "were", "am", "be", "being"];
const JOINERS: &[&str] = &["and", "then", "while", ","];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Copy the capitalization pattern of `template` onto `word`.
pub fn match_case(template: &str, word: &str) -> String {
    let mut t = template.chars();
    let first_upper = t.next().is_some_and(char::is_uppercase);
    let all_upper = template.chars().count() > 1 && template.chars().all(|c| !c.is_lowercase());
    if all_upper {
        word.to_uppercase()
    } else if first_upper {
        let mut c = word.chars();
        match c.next() {
            Some(f) => f.to_uppercase().chain(c).collect(),
            None => String::new(),
        }
    } else {
        word.to_string()
    }
}

/// Replace every person word with its counterpart.
pub fn person_swap(tokens: &[String], lexicons: &Lexicons) -> Option<Vec<String>> {
    let mut changed = false;
    let out = tokens
        .iter()
        .map(|t| match lexicons.person_pair(t) {
            Some(p) => {
                changed = true;
                match_case(t, p)
            }
            None => t.clone(),
        })
        .collect();
    changed.then_some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionMode {
    /// Delete an action word, inserting one when none is present.
    Delete,
    /// Always insert.
    Insert,
    /// Choose between delete and insert from the seed.
    Auto,
}

fn action_positions(tokens: &[String], lexicons: &Lexicons) -> Vec<usize> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !is_stopword(t) && !lexicons.is_person(t) && lexicons.action_base(t).is_some())
        .map(|(i, _)| i)
        .collect()
}

/// Remove the last action word together with a joiner right before it.
fn delete_action(tokens: &[String], positions: &[usize]) -> Option<Vec<String>> {
    let &pos = positions.last()?;
    let mut start = pos;
    if start > 0 && JOINERS.contains(&tokens[start - 1].to_lowercase().as_str()) {
        start -= 1;
    }
    let mut out: Vec<String> = tokens[..start].iter().chain(&tokens[pos + 1..]).cloned().collect();
    // Drop a joiner left dangling at the end of the clause.
    while let Some(last) = out.last() {
        let idx = out.len() - 1;
        if JOINERS.contains(&last.to_lowercase().as_str()) && idx > 0 {
            out.pop();
        } else {
            break;
        }
    }
    out.iter().any(|t| is_word(t)).then_some(out)
}

/// End of the subject region: the first auxiliary or verb after position 0,
/// otherwise just after the first person or object word, otherwise 1.
fn subject_end(tokens: &[String], lexicons: &Lexicons) -> usize {
    for (i, t) in tokens.iter().enumerate().skip(1) {
        let l = t.to_lowercase();
        if AUXILIARIES.contains(&l.as_str()) || (!is_stopword(t) && lexicons.action_base(t).is_some() && !lexicons.is_person(t)) {
            return i;
        }
    }
    tokens
        .iter()
        .position(|t| lexicons.is_person(t) || lexicons.object_base(t).is_some())
        .map_or(1, |i| i + 1)
        .min(tokens.len())
}

fn insert_action(tokens: &[String], lexicons: &Lexicons, rng: &mut ChaCha8Rng) -> Option<Vec<String>> {
    if !tokens.iter().any(|t| is_word(t)) {
        return None;
    }
    let present: Vec<&str> = tokens.iter().filter_map(|t| lexicons.action_base(t)).collect();
    let choices: Vec<&String> = lexicons.actions().iter().filter(|a| !present.contains(&a.as_str())).collect();
    let verb = choices.choose(rng)?;
    let at = subject_end(tokens, lexicons);
    let mut out = tokens.to_vec();
    out.insert(at, ing_form(verb));
    Some(out)
}

/// Delete an action word or insert a random one as a participle after the
/// subject.
pub fn action_swap(tokens: &[String], lexicons: &Lexicons, seed: u64, mode: ActionMode) -> Option<Vec<String>> {
    let mut rng = rng(seed);
    let positions = action_positions(tokens, lexicons);
    let try_delete = match mode {
        ActionMode::Delete => true,
        ActionMode::Insert => false,
        ActionMode::Auto => rng.gen_bool(0.5),
    };
    if try_delete {
        if let Some(out) = delete_action(tokens, &positions) {
            return Some(out);
        }
    }
    insert_action(tokens, lexicons, &mut rng)
}

/// Replace one randomly chosen word with a different entry from `pool`,
/// keeping plural and case.
fn substitute<F>(tokens: &[String], candidates: &[(usize, &str, bool)], pool: &[F], rng: &mut ChaCha8Rng) -> Option<Vec<String>>
where
    F: AsRef<str>,
{
    let &(pos, base, plural) = candidates.choose(rng)?;
    let others: Vec<&str> = pool.iter().map(AsRef::as_ref).filter(|w| *w != base).collect();
    let pick = others.choose(rng)?;
    let word = if plural { s_form(pick) } else { pick.to_string() };
    let mut out = tokens.to_vec();
    out[pos] = match_case(&tokens[pos], &word);
    (out[pos].to_lowercase() != tokens[pos].to_lowercase()).then_some(out)
}

/// Swap one object word for a different object.
pub fn object_swap(tokens: &[String], lexicons: &Lexicons, seed: u64) -> Option<Vec<String>> {
    let mut rng = rng(seed);
    let candidates: Vec<(usize, &str, bool)> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !is_stopword(t) && !lexicons.is_person(t))
        .filter_map(|(i, t)| lexicons.object_base(t).map(|b| (i, b, t.to_lowercase() != b)))
        .collect();
    let pool: Vec<&String> = lexicons.objects().iter().collect();
    substitute(tokens, &candidates, &pool, &mut rng)
}

/// Swap one color for another color, or one numeral for another numeral.
pub fn adjective_swap(tokens: &[String], lexicons: &Lexicons, seed: u64) -> Option<Vec<String>> {
    let mut rng = rng(seed);
    let candidates: Vec<(usize, bool)> = tokens
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            if lexicons.is_color(t) {
                Some((i, true))
            } else if lexicons.is_numeral(t) {
                Some((i, false))
            } else {
                None
            }
        })
        .collect();
    let &(pos, is_color) = candidates.choose(&mut rng)?;
    let lower = tokens[pos].to_lowercase();
    let pool: Vec<&String> = if is_color { lexicons.colors() } else { lexicons.numerals() }.iter().collect();
    substitute(tokens, &[(pos, lower.as_str(), false)], &pool, &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoorMode {
    /// Replace a content word with `UNK`.
    Unk,
    /// Repeat a 2–4 word span right after itself.
    Redundant,
    /// Choose between the two from the seed.
    Auto,
}

fn unk(tokens: &[String], rng: &mut ChaCha8Rng) -> Option<Vec<String>> {
    let eligible = |content: bool| -> Vec<usize> {
        tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| is_word(t) && t.as_str() != UNK && (!content || !is_stopword(t)))
            .map(|(i, _)| i)
            .collect()
    };
    let mut positions = eligible(true);
    if positions.is_empty() {
        positions = eligible(false);
    }
    let &pos = positions.choose(rng)?;
    let mut out = tokens.to_vec();
    out[pos] = UNK.to_string();
    Some(out)
}

fn redundant(tokens: &[String], rng: &mut ChaCha8Rng) -> Option<Vec<String>> {
    let spans: Vec<(usize, usize)> = (0..tokens.len())
        .flat_map(|s| (2..=4).map(move |len| (s, len)))
        .filter(|&(s, len)| s + len <= tokens.len() && tokens[s..s + len].iter().all(|t| is_word(t)))
        .collect();
    let &(start, len) = spans.choose(rng)?;
    let mut out = tokens[..start + len].to_vec();
    out.extend_from_slice(&tokens[start..]);
    Some(out)
}

/// Simulate a degenerate generation: an `UNK` token or a repeated phrase.
pub fn poor_generation(tokens: &[String], seed: u64, mode: PoorMode) -> Option<Vec<String>> {
    if tokens.iter().filter(|t| is_word(t)).count() < 2 {
        return None;
    }
    let mut rng = rng(seed);
    let mode = match mode {
        PoorMode::Auto if rng.gen_bool(0.5) => PoorMode::Unk,
        PoorMode::Auto => PoorMode::Redundant,
        m => m,
    };
    match mode {
        PoorMode::Unk => unk(tokens, &mut rng),
        _ => redundant(tokens, &mut rng).or_else(|| unk(tokens, &mut rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;

    fn lex() -> Lexicons {
        Lexicons::builtin()
    }

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    fn run<F: Fn(&[String], u64) -> Option<Vec<String>>>(f: F, s: &str, seed: u64) -> Option<String> {
        f(&toks(s), seed).map(|t| t.join(" "))
    }

    #[test]
    fn person_swap_examples() {
        let l = lex();
        assert_eq!(run(|t, _| person_swap(t, &l), "A woman is throwing darts", 0).unwrap(), "A man is throwing darts");
        assert_eq!(run(|t, _| person_swap(t, &l), "She throws them", 0).unwrap(), "He throws them");
        assert_eq!(run(|t, _| person_swap(t, &l), "Add pasta to a bowl", 0), None);
    }

    #[test]
    fn action_delete_removes_last_action_and_joiner() {
        let l = lex();
        let out = run(|t, s| action_swap(t, &l, s, ActionMode::Delete), "The man is throwing darts and smiling", 3);
        assert_eq!(out.unwrap(), "The man is throwing darts");
    }

    #[test]
    fn action_delete_falls_back_to_insert() {
        let l = lex();
        let input = toks("The bread on the table");
        let out = action_swap(&input, &l, 9, ActionMode::Delete).unwrap();
        assert_eq!(out.len(), input.len() + 1);
        let inserted: Vec<&String> = out.iter().filter(|t| !input.contains(t)).collect();
        assert_eq!(inserted.len(), 1);
        assert!(inserted[0].ends_with("ing"));
        assert!(l.action_base(inserted[0]).is_some());
    }

    #[test]
    fn action_insert_goes_after_subject() {
        let l = lex();
        let out = action_swap(&toks("The man is throwing darts"), &l, 1, ActionMode::Insert).unwrap();
        assert_eq!(out[..2], ["The", "man"]);
        assert!(out[2].ends_with("ing"));
        assert_eq!(out[3..], ["is", "throwing", "darts"]);
    }

    #[test]
    fn object_swap_replaces_one_object() {
        let objects = ["cup", "plate", "sink", "bowl"];
        let l = Lexicons::from_parts(&[("man", "woman")], &["wash"], &objects, &["red"], &["one"]).unwrap();
        let input = toks("washing a cup in the sink");
        let mut seen_plate = false;
        for seed in 0..40 {
            let out = object_swap(&input, &l, seed).unwrap();
            let diff: Vec<usize> = (0..input.len()).filter(|&i| out[i] != input[i]).collect();
            assert_eq!(diff.len(), 1);
            assert!(objects.contains(&out[diff[0]].as_str()));
            assert_ne!(out[diff[0]], input[diff[0]]);
            seen_plate |= out.join(" ") == "washing a plate in the sink";
        }
        assert!(seen_plate);
    }

    #[test]
    fn object_swap_needs_alternative() {
        let l = Lexicons::from_parts(&[("man", "woman")], &["wash"], &["cup"], &["red"], &["one"]).unwrap();
        assert_eq!(object_swap(&toks("washing a cup"), &l, 0), None);
    }

    #[test]
    fn object_swap_keeps_plural() {
        let l = Lexicons::from_parts(&[("man", "woman")], &["wash"], &["cup", "dish"], &["red"], &["one"]).unwrap();
        assert_eq!(run(|t, s| object_swap(t, &l, s), "two cups", 0).unwrap(), "two dishes");
    }

    #[test]
    fn adjective_swap_examples() {
        let l = lex();
        let out = run(|t, s| adjective_swap(t, &l, s), "a red shirt", 5).unwrap();
        let word = out.split(' ').nth(1).unwrap();
        assert!(l.is_color(word) && word != "red");
        let out = run(|t, s| adjective_swap(t, &l, s), "two cups", 5).unwrap();
        let word = out.split(' ').next().unwrap();
        assert!(l.is_numeral(word) && word != "two");
        assert!((0..100).any(|s| run(|t, _| adjective_swap(t, &l, s), "a red shirt", 0).unwrap() == "a blue shirt"));
        assert!((0..100).any(|s| run(|t, _| adjective_swap(t, &l, s), "two cups", 0).unwrap() == "three cups"));
        assert_eq!(run(|t, s| adjective_swap(t, &l, s), "a shirt", 0), None);
    }

    #[test]
    fn poor_generation_examples() {
        let unk_out: Vec<String> = (0..50)
            .map(|s| run(|t, s| poor_generation(t, s, PoorMode::Unk), "the bull is bucking", s).unwrap())
            .collect();
        assert!(unk_out.iter().all(|o| o == "the UNK is bucking" || o == "the bull is UNK"));
        assert!(unk_out.iter().any(|o| o == "the bull is UNK"));
        let red_out: Vec<String> = (0..80)
            .map(|s| run(|t, s| poor_generation(t, s, PoorMode::Redundant), "He throws a dart", s).unwrap())
            .collect();
        assert!(red_out.iter().any(|o| o == "He throws a throws a dart"));
        assert_eq!(run(|t, s| poor_generation(t, s, PoorMode::Auto), "Hello", 0), None);
    }

    #[test]
    fn deterministic_under_seed() {
        let l = lex();
        let input = toks("A man in a red shirt is throwing two darts at a board");
        for seed in [0, 1, 77] {
            assert_eq!(action_swap(&input, &l, seed, ActionMode::Auto), action_swap(&input, &l, seed, ActionMode::Auto));
            assert_eq!(object_swap(&input, &l, seed), object_swap(&input, &l, seed));
            assert_eq!(adjective_swap(&input, &l, seed), adjective_swap(&input, &l, seed));
            assert_eq!(poor_generation(&input, seed, PoorMode::Auto), poor_generation(&input, seed, PoorMode::Auto));
        }
    }
}
