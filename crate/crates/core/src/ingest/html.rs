use std::sync::OnceLock;

use regex::Regex;

const BREAK: char = '\u{2029}';

struct Patterns {
    dropped: Vec<Regex>,
    block: Regex,
    cell: Regex,
    any_tag: Regex,
    looks_like_html: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        dropped: vec![
            Regex::new(r"(?s)<!--.*?(-->|$)").unwrap(),
            Regex::new(r"(?is)<script\b.*?(</script\s*>|$)").unwrap(),
            Regex::new(r"(?is)<style\b.*?(</style\s*>|$)").unwrap(),
            Regex::new(r"(?is)<head\b.*?(</head\s*>|$)").unwrap(),
            Regex::new(r"(?is)<!doctype[^>]*>").unwrap(),
            Regex::new(r"(?s)<\?.*?\?>").unwrap(),
        ],
        block: Regex::new(
            r"(?i)<\s*/?\s*(p|br|div|h[1-6]|li|ul|ol|dl|dt|dd|tr|table|hr|blockquote|center|pre|body|html|form|address)\b[^>]*(>|$)",
        )
        .unwrap(),
        cell: Regex::new(r"(?i)<\s*/?\s*(td|th)\b[^>]*(>|$)").unwrap(),
        any_tag: Regex::new(r"<[A-Za-z/!][^>]*(>|$)").unwrap(),
        looks_like_html: Regex::new(r"<[A-Za-z/!]").unwrap(),
    })
}

/// Splits HTML (or plain text) into trimmed paragraph strings.
///
/// Paragraph breaks come from `<p>`, `<br>` and other block-level tags,
/// matched case-insensitively and without requiring closing tags. Input that
/// contains no markup at all is treated as plain text with one paragraph
/// per line. Entities are decoded after markup removal and whitespace runs
/// collapse to a single space; control characters count as whitespace.
pub fn html_to_paragraphs(content: &str) -> Vec<String> {
    let p = patterns();
    let chunked = if p.looks_like_html.is_match(content) {
        let mut text = content.to_owned();
        for re in &p.dropped {
            text = re.replace_all(&text, "").into_owned();
        }
        let text = p.block.replace_all(&text, BREAK.to_string().as_str());
        let text = p.cell.replace_all(&text, " ");
        p.any_tag.replace_all(&text, "").into_owned()
    } else {
        content.replace('\n', &BREAK.to_string())
    };
    chunked
        .split(BREAK)
        .filter_map(|chunk| {
            let decoded = html_escape::decode_html_entities(chunk);
            let normalized = decoded
                .split(|c: char| c.is_whitespace() || c.is_control() || c == '\u{a0}')
                .filter(|w| !w.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            (!normalized.is_empty()).then_some(normalized)
        })
        .collect()
}
