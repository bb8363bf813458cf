//! The corpus language inventory.

/// The twenty official languages plus Romanian, with English names.
pub const LANGUAGES: [(&str, &str); 21] = [
    ("cs", "Czech"),
    ("da", "Danish"),
    ("de", "German"),
    ("el", "Greek"),
    ("en", "English"),
    ("es", "Spanish"),
    ("et", "Estonian"),
    ("fi", "Finnish"),
    ("fr", "French"),
    ("hu", "Hungarian"),
    ("it", "Italian"),
    ("lt", "Lithuanian"),
    ("lv", "Latvian"),
    ("mt", "Maltese"),
    ("nl", "Dutch"),
    ("pl", "Polish"),
    ("pt", "Portuguese"),
    ("ro", "Romanian"),
    ("sk", "Slovak"),
    ("sl", "Slovenian"),
    ("sv", "Swedish"),
];

/// Languages of the 2004 accession states.
pub const NEW_MEMBER_LANGUAGES: [&str; 9] = ["cs", "et", "hu", "lt", "lv", "mt", "pl", "sk", "sl"];

pub fn is_known(code: &str) -> bool {
    LANGUAGES.iter().any(|(c, _)| *c == code)
}

pub fn english_name(code: &str) -> Option<&'static str> {
    LANGUAGES.iter().find(|(c, _)| *c == code).map(|(_, n)| *n)
}

pub fn code_for_name(name: &str) -> Option<&'static str> {
    LANGUAGES.iter().find(|(_, n)| *n == name).map(|(c, _)| *c)
}

/// Orders a language pair lexicographically.
pub fn canonical_pair<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// All unordered pairs over `langs`, each canonicalized, in sorted order.
pub fn all_pairs(langs: &[String]) -> Vec<(String, String)> {
    let mut sorted: Vec<&String> = langs.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut out = Vec::new();
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            out.push(((*a).clone(), (*b).clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_count_follows_language_set() {
        let all: Vec<String> = LANGUAGES.iter().map(|(c, _)| c.to_string()).collect();
        assert_eq!(all_pairs(&all).len(), 210);
        assert_eq!(all_pairs(&all[..20]).len(), 190);
    }

    #[test]
    fn canonical_pair_sorts() {
        assert_eq!(canonical_pair("mt", "et"), ("et", "mt"));
        assert_eq!(canonical_pair("et", "mt"), ("et", "mt"));
    }
}
