//! Word lists driving the corruption rules and the error-span classifier.
//!
//! A lexicon directory holds `person_pairs.tsv` (`a<TAB>b` per line),
//! `actions.txt`, `objects.txt`, `colors.txt` and `numerals.txt` (one
//! lowercase entry per line). Blank lines and `#` comments are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const BUILTIN_PERSONS: &str = include_str!("../../data/lexicon/person_pairs.tsv");
const BUILTIN_ACTIONS: &str = include_str!("../../data/lexicon/actions.txt");
const BUILTIN_OBJECTS: &str = include_str!("../../data/lexicon/objects.txt");
const BUILTIN_COLORS: &str = include_str!("../../data/lexicon/colors.txt");
const BUILTIN_NUMERALS: &str = include_str!("../../data/lexicon/numerals.txt");

/// Function words that never count as content.
pub const STOPWORDS: &[&str] = &[
    "a", "an", "the", "is", "are", "was", "were", "be", "been", "being", "am", "of", "in", "on", "at", "to",
    "with", "and", "or", "but", "then", "while", "into", "onto", "from", "by", "for", "as", "it", "its", "this",
    "that", "these", "those", "there", "their", "they", "them", "up", "down", "out", "off", "over", "some",
    "has", "have", "had", "do", "does", "did", "so", "very", "just", "also", "again", "around", "back",
];

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.contains(&token.to_lowercase().as_str())
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

const NO_DOUBLING: &[&str] = &["open", "edit", "visit", "offer", "enter", "order", "water", "listen"];

fn doubles_final(base: &str) -> bool {
    let c: Vec<char> = base.chars().collect();
    let n = c.len();
    (3..=4).contains(&n)
        && !NO_DOUBLING.contains(&base)
        && !is_vowel(c[n - 1])
        && !matches!(c[n - 1], 'w' | 'x' | 'y')
        && is_vowel(c[n - 2])
        && !is_vowel(c[n - 3])
}

/// `-s` form: plural noun or third-person verb.
pub fn s_form(base: &str) -> String {
    if base.ends_with(['s', 'x', 'z', 'o']) || base.ends_with("sh") || base.ends_with("ch") {
        format!("{base}es")
    } else if base.ends_with('y') && base.len() > 1 && !is_vowel(base.chars().rev().nth(1).unwrap()) {
        format!("{}ies", &base[..base.len() - 1])
    } else {
        format!("{base}s")
    }
}

pub fn ing_form(base: &str) -> String {
    if let Some(stem) = base.strip_suffix("ie") {
        format!("{stem}ying")
    } else if base.ends_with('e') && !base.ends_with("ee") && !base.ends_with("ye") && !base.ends_with("oe") && base.len() > 2 {
        format!("{}ing", &base[..base.len() - 1])
    } else if doubles_final(base) {
        format!("{base}{}ing", base.chars().last().unwrap())
    } else {
        format!("{base}ing")
    }
}

pub fn past_form(base: &str) -> String {
    if base.ends_with('e') {
        format!("{base}d")
    } else if base.ends_with('y') && base.len() > 1 && !is_vowel(base.chars().rev().nth(1).unwrap()) {
        format!("{}ied", &base[..base.len() - 1])
    } else if doubles_final(base) {
        format!("{base}{}ed", base.chars().last().unwrap())
    } else {
        format!("{base}ed")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicons {
    person_pairs: BTreeMap<String, String>,
    actions: BTreeSet<String>,
    action_forms: BTreeMap<String, String>,
    objects: BTreeSet<String>,
    object_forms: BTreeMap<String, String>,
    colors: BTreeSet<String>,
    numerals: BTreeSet<String>,
}

fn entries(text: &str) -> impl Iterator<Item = String> + '_ {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
}

impl Lexicons {
    pub fn from_parts<S: AsRef<str>>(
        person_pairs: &[(S, S)],
        actions: &[S],
        objects: &[S],
        colors: &[S],
        numerals: &[S],
    ) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for (a, b) in person_pairs {
            let (a, b) = (a.as_ref().to_lowercase(), b.as_ref().to_lowercase());
            for (k, v) in [(&a, &b), (&b, &a)] {
                if let Some(prev) = pairs.insert(k.clone(), v.clone()) {
                    if &prev != v {
                        return Err(Error::Invalid(format!(
                            "person word {k:?} paired with both {prev:?} and {v:?}"
                        )));
                    }
                }
            }
        }
        let set = |xs: &[S], what: &str| -> Result<BTreeSet<String>> {
            let s: BTreeSet<String> = xs.iter().map(|x| x.as_ref().to_lowercase()).collect();
            if s.is_empty() {
                return Err(Error::Invalid(format!("{what} lexicon is empty")));
            }
            Ok(s)
        };
        let actions = set(actions, "action")?;
        let objects = set(objects, "object")?;
        let mut action_forms = BTreeMap::new();
        for a in &actions {
            for f in [a.clone(), s_form(a), ing_form(a), past_form(a)] {
                action_forms.entry(f).or_insert_with(|| a.clone());
            }
        }
        let mut object_forms = BTreeMap::new();
        for o in &objects {
            object_forms.entry(o.clone()).or_insert_with(|| o.clone());
            object_forms.entry(s_form(o)).or_insert_with(|| o.clone());
        }
        Ok(Self {
            person_pairs: pairs,
            actions,
            action_forms,
            objects,
            object_forms,
            colors: set(colors, "color")?,
            numerals: set(numerals, "numeral")?,
        })
    }

    fn from_texts(persons: &str, actions: &str, objects: &str, colors: &str, numerals: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for line in entries(persons) {
            let mut parts = line.split('\t').map(str::trim);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => pairs.push((a.to_string(), b.to_string())),
                _ => return Err(Error::Invalid(format!("bad person pair line {line:?}"))),
            }
        }
        let list = |t: &str| entries(t).collect::<Vec<_>>();
        Self::from_parts(&pairs, &list(actions), &list(objects), &list(colors), &list(numerals))
    }

    /// The lists shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_texts(BUILTIN_PERSONS, BUILTIN_ACTIONS, BUILTIN_OBJECTS, BUILTIN_COLORS, BUILTIN_NUMERALS)
            .expect("builtin lexicons are valid")
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let read = |name: &str| {
            let p = dir.join(name);
            fs::read_to_string(&p).map_err(|e| Error::io(&p, e))
        };
        Self::from_texts(
            &read("person_pairs.tsv")?,
            &read("actions.txt")?,
            &read("objects.txt")?,
            &read("colors.txt")?,
            &read("numerals.txt")?,
        )
    }

    pub fn person_pair(&self, token: &str) -> Option<&str> {
        self.person_pairs.get(&token.to_lowercase()).map(String::as_str)
    }

    pub fn is_person(&self, token: &str) -> bool {
        self.person_pair(token).is_some()
    }

    /// Base form of an action token.
    pub fn action_base(&self, token: &str) -> Option<&str> {
        self.action_forms.get(&token.to_lowercase()).map(String::as_str)
    }

    pub fn actions(&self) -> &BTreeSet<String> {
        &self.actions
    }

    /// Base form of an object token, singular or plural.
    pub fn object_base(&self, token: &str) -> Option<&str> {
        self.object_forms.get(&token.to_lowercase()).map(String::as_str)
    }

    pub fn objects(&self) -> &BTreeSet<String> {
        &self.objects
    }

    pub fn colors(&self) -> &BTreeSet<String> {
        &self.colors
    }

    pub fn numerals(&self) -> &BTreeSet<String> {
        &self.numerals
    }

    pub fn is_color(&self, token: &str) -> bool {
        self.colors.contains(&token.to_lowercase())
    }

    pub fn is_numeral(&self, token: &str) -> bool {
        self.numerals.contains(&token.to_lowercase())
    }
}
